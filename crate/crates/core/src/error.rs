use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("Dyson index must be 1, 2 or 4, got {0}")]
    InvalidBeta(u32),

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e}, scale {scale:e})")]
    NotHermitian { asymmetry: f64, scale: f64 },

    #[error("Kramers pairing failed at pair {index}: {lower} vs {upper} (relative gap {gap:e})")]
    PairingFailure {
        index: usize,
        lower: f64,
        upper: f64,
        gap: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid ensemble specification: {0}")]
    InvalidSpec(String),

    #[error("Jacobi parameters not realizable by truncation and MCMC is disabled: {0}")]
    UnrealizableParameters(String),

    #[error("MCMC chain diverged: log-density evaluated to {0}")]
    ChainDiverged(f64),

    #[error("Cauchy-Lorentz exponent mu = {mu} violates the convergence bound mu > {bound} for k = {k}")]
    ConvergenceBound { mu: f64, bound: f64, k: usize },

    #[error("degenerate grid: analytic value {value:e} at index {index} is too close to zero")]
    DegenerateGrid { index: usize, value: f64 },

    #[error("parameter maps are stated for a single mass only, got {0} masses")]
    UnsupportedMassCount(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("contour radius {radius} lies within 1e-6 of the singularity at |z| = {singularity}")]
    PoleOnContour { radius: f64, singularity: f64 },

    #[error("contour radius {radius} encloses the singularity at |z| = {singularity} (need Gamma > 1 with radius 1)")]
    ContourEnclosesSingularity { radius: f64, singularity: f64 },

    #[error("masses coincide: |{m1} - {m2}| < 1e-8")]
    CoincidentMasses { m1: f64, m2: f64 },

    #[error("series did not converge within {0} terms")]
    NonConvergent(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
