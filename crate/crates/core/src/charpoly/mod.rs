//! Monte Carlo estimation of averages of products of characteristic
//! polynomials of the Gram matrix `W W†`.
//!
//! For masses `m_1..m_k` the averaged quantity is
//! `det^{1/(γγ̃)}(W W† ⊗ 1_{γ̃k} - M)` with `M = 1 ⊗ diag(m_a repeated γ̃ times)`.
//! For every Dyson index this equals `∏_i ∏_a (λ_i - m_a)` over the
//! Kramers-collapsed Gram spectrum: the real case's mass doubling cancels
//! the square root, and for quaternions the square root of the doubly
//! degenerate determinant is the quaternion determinant.

mod csv_io;

pub use csv_io::{read_estimate_csv, write_estimate_csv, EstimateRow};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{collapse_kramers, eigenvalues_hermitian, gram, DysonIndex, SpectrumWithMultiplicity, KRAMERS_TOL};
use crate::ensembles::{McmcConfig, Model, ModelSampler};
use crate::error::{Error, Result};
use crate::rng::shard_rng;

/// Masses `m_1..m_k` of the source term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<MassValue>", into = "Vec<MassValue>")]
pub struct SourceSpec {
    masses: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum MassValue {
    Real(f64),
    Complex([f64; 2]),
}

impl TryFrom<Vec<MassValue>> for SourceSpec {
    type Error = Error;
    fn try_from(v: Vec<MassValue>) -> Result<Self> {
        let masses = v
            .into_iter()
            .map(|m| match m {
                MassValue::Real(x) => Complex64::new(x, 0.0),
                MassValue::Complex([re, im]) => Complex64::new(re, im),
            })
            .collect();
        SourceSpec::complex(masses)
    }
}

impl From<SourceSpec> for Vec<MassValue> {
    fn from(s: SourceSpec) -> Self {
        s.masses
            .into_iter()
            .map(|m| {
                if m.im == 0.0 {
                    MassValue::Real(m.re)
                } else {
                    MassValue::Complex([m.re, m.im])
                }
            })
            .collect()
    }
}

impl SourceSpec {
    pub fn real(masses: &[f64]) -> Result<Self> {
        SourceSpec::complex(masses.iter().map(|&m| Complex64::new(m, 0.0)).collect())
    }

    pub fn single(mass: f64) -> Self {
        SourceSpec {
            masses: vec![Complex64::new(mass, 0.0)],
        }
    }

    pub fn complex(masses: Vec<Complex64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidSpec("a source needs at least one mass".into()));
        }
        if masses.iter().any(|m| !(m.re.is_finite() && m.im.is_finite())) {
            return Err(Error::InvalidSpec("masses must be finite".into()));
        }
        Ok(SourceSpec { masses })
    }

    /// Number of characteristic polynomials `k`.
    pub fn k(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[Complex64] {
        &self.masses
    }

    pub fn is_real(&self) -> bool {
        self.masses.iter().all(|m| m.im == 0.0)
    }

    pub fn real_masses(&self) -> Option<Vec<f64>> {
        self.is_real().then(|| self.masses.iter().map(|m| m.re).collect())
    }

    /// Diagonal of the realised mass slot: each mass repeated `γ̃` times.
    pub fn realized_diagonal(&self, beta: DysonIndex) -> Vec<Complex64> {
        self.masses
            .iter()
            .flat_map(|&m| std::iter::repeat_n(m, beta.gamma_tilde()))
            .collect()
    }
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Characteristic-polynomial product for one Gram spectrum.
pub fn char_poly_observable(
    spectrum: &SpectrumWithMultiplicity,
    src: &SourceSpec,
    beta: DysonIndex,
) -> Result<Complex64> {
    let collapsed;
    let values = if beta == DysonIndex::Quaternion {
        collapsed = collapse_kramers(spectrum, KRAMERS_TOL)?;
        &collapsed.values
    } else {
        &spectrum.values
    };
    let mut acc = Complex64::new(1.0, 0.0);
    for &lambda in values {
        for &m in &src.masses {
            acc *= Complex64::new(lambda, 0.0) - m;
        }
    }
    Ok(acc)
}

fn real_observable(values: &[f64], masses: &[f64]) -> f64 {
    let mut acc = 1.0;
    for &lambda in values {
        for &m in masses {
            acc *= lambda - m;
        }
    }
    acc
}

/// Knobs of the sharded estimator. Results are reproducible for a fixed
/// `(seed, shards)` pair, independent of the number of worker threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimatorOptions {
    pub shards: usize,
    pub mcmc: McmcConfig,
    /// Use a Metropolis chain for Jacobi exponents that no truncation realises.
    pub jacobi_mcmc: bool,
    /// Batches per shard for the batch-means error of correlated draws.
    pub batches_per_shard: usize,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            shards: 8,
            mcmc: McmcConfig::default(),
            jacobi_mcmc: true,
            batches_per_shard: 25,
        }
    }
}

/// Estimates on a mass grid, all computed from one sample stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveEstimate {
    pub points: Vec<Estimate>,
    /// Covariance of the grid-point means.
    pub covariance: Vec<Vec<f64>>,
    /// Whether errors come from batch means over Markov chains.
    pub markov: bool,
}

pub fn estimate_z(model: &Model, src: &SourceSpec, n_samples: usize, seed: u64) -> Result<Estimate> {
    estimate_z_with(model, src, n_samples, seed, &EstimatorOptions::default())
}

pub fn estimate_z_with(
    model: &Model,
    src: &SourceSpec,
    n_samples: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<Estimate> {
    let curve = estimate_z_curve_with(model, std::slice::from_ref(src), n_samples, seed, opts)?;
    Ok(curve.points[0])
}

pub fn estimate_z_curve(model: &Model, grid: &[SourceSpec], n_samples: usize, seed: u64) -> Result<CurveEstimate> {
    estimate_z_curve_with(model, grid, n_samples, seed, &EstimatorOptions::default())
}

struct ShardOutput {
    /// `values[g][s]`: observable of grid point `g` on draw `s`.
    values: Vec<Vec<f64>>,
    markov: bool,
}

fn run_shard(
    model: &Model,
    masses: &[Vec<f64>],
    count: usize,
    seed: u64,
    shard: usize,
    opts: &EstimatorOptions,
) -> Result<ShardOutput> {
    let mut rng = shard_rng(seed, shard as u64);
    let jacobi = opts.jacobi_mcmc.then_some(&opts.mcmc);
    let mut sampler = ModelSampler::new(model, &opts.mcmc, jacobi, &mut rng)?;
    let beta = model.beta();
    let mut values = vec![Vec::with_capacity(count); masses.len()];
    for _ in 0..count {
        let w = sampler.draw(&mut rng)?;
        let mut spectrum = eigenvalues_hermitian(&gram(&w))?;
        if beta == DysonIndex::Quaternion {
            spectrum = collapse_kramers(&spectrum, KRAMERS_TOL)?;
        }
        for (g, m) in masses.iter().enumerate() {
            values[g].push(real_observable(&spectrum.values, m));
        }
    }
    Ok(ShardOutput {
        values,
        markov: sampler.is_markov(),
    })
}

fn shard_sizes(n_samples: usize, shards: usize) -> Vec<usize> {
    let base = n_samples / shards;
    let extra = n_samples % shards;
    (0..shards).map(|s| base + usize::from(s < extra)).filter(|&c| c > 0).collect()
}

/// Sample covariance (divisor `len - 1`) of equally weighted vectors.
fn covariance(rows: &[Vec<f64>], means: &[f64]) -> DMatrix<f64> {
    let g = means.len();
    let len = rows.len();
    let mut cov = DMatrix::zeros(g, g);
    for r in rows {
        for i in 0..g {
            let di = r[i] - means[i];
            for j in i..g {
                cov[(i, j)] += di * (r[j] - means[j]);
            }
        }
    }
    for i in 0..g {
        for j in i..g {
            let v = cov[(i, j)] / (len as f64 - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    cov
}

/// Estimates on every source of the grid from a shared sample stream
/// (common random numbers), so that ratios across the grid have
/// correlated errors.
pub fn estimate_z_curve_with(
    model: &Model,
    grid: &[SourceSpec],
    n_samples: usize,
    seed: u64,
    opts: &EstimatorOptions,
) -> Result<CurveEstimate> {
    if n_samples < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 samples, got {n_samples}")));
    }
    if grid.is_empty() {
        return Err(Error::InvalidSpec("empty source grid".into()));
    }
    if opts.shards == 0 || opts.batches_per_shard == 0 {
        return Err(Error::InvalidSpec("shards and batches must be positive".into()));
    }
    opts.mcmc.validate()?;
    model.validate()?;
    let masses = grid
        .iter()
        .map(|src| {
            model.check_mass_count(src.k())?;
            src.real_masses()
                .ok_or_else(|| Error::Unsupported("complex masses: use estimate_z_complex".into()))
        })
        .collect::<Result<Vec<_>>>()?;

    let sizes = shard_sizes(n_samples, opts.shards);
    let outputs = sizes
        .par_iter()
        .enumerate()
        .map(|(shard, &count)| run_shard(model, &masses, count, seed, shard, opts))
        .collect::<Result<Vec<_>>>()?;
    let markov = outputs.iter().any(|o| o.markov);
    let g = grid.len();

    let mut sums = vec![0.0; g];
    for o in &outputs {
        for (i, v) in o.values.iter().enumerate() {
            sums[i] += v.iter().sum::<f64>();
        }
    }
    let means: Vec<f64> = sums.iter().map(|s| s / n_samples as f64).collect();

    let cov_of_mean = if markov {
        let mut batch_rows = Vec::new();
        for o in &outputs {
            let len = o.values[0].len();
            let batches = opts.batches_per_shard.min(len);
            let size = len / batches;
            for b in 0..batches {
                let range = b * size..(b + 1) * size;
                batch_rows.push(
                    o.values
                        .iter()
                        .map(|v| v[range.clone()].iter().sum::<f64>() / size as f64)
                        .collect::<Vec<_>>(),
                );
            }
        }
        if batch_rows.len() < 2 {
            return Err(Error::InvalidSpec("too few samples for batch means".into()));
        }
        let batch_means: Vec<f64> = (0..g)
            .map(|i| batch_rows.iter().map(|r| r[i]).sum::<f64>() / batch_rows.len() as f64)
            .collect();
        covariance(&batch_rows, &batch_means) / batch_rows.len() as f64
    } else {
        let rows: Vec<Vec<f64>> = outputs
            .iter()
            .flat_map(|o| (0..o.values[0].len()).map(move |s| o.values.iter().map(|v| v[s]).collect::<Vec<_>>()))
            .collect();
        covariance(&rows, &means) / n_samples as f64
    };

    let points = (0..g)
        .map(|i| Estimate {
            value: means[i],
            stderr: cov_of_mean[(i, i)].max(0.0).sqrt(),
            n_samples,
            seed,
        })
        .collect();
    let covariance = (0..g).map(|i| (0..g).map(|j| cov_of_mean[(i, j)]).collect()).collect();
    Ok(CurveEstimate {
        points,
        covariance,
        markov,
    })
}

/// Real and imaginary parts of the average for complex masses, estimated
/// from i.i.d. draws (Markov routes are not supported here).
pub fn estimate_z_complex(model: &Model, src: &SourceSpec, n_samples: usize, seed: u64) -> Result<(Estimate, Estimate)> {
    if n_samples < 2 {
        return Err(Error::InvalidSpec(format!("need at least 2 samples, got {n_samples}")));
    }
    model.check_mass_count(src.k())?;
    let opts = EstimatorOptions::default();
    let mut rng = shard_rng(seed, 0);
    let mut sampler = ModelSampler::new(model, &opts.mcmc, None, &mut rng)?;
    if sampler.is_markov() {
        return Err(Error::Unsupported("complex masses with Markov-chain samplers".into()));
    }
    let beta = model.beta();
    let mut re = Vec::with_capacity(n_samples);
    let mut im = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let w = sampler.draw(&mut rng)?;
        let z = char_poly_observable(&eigenvalues_hermitian(&gram(&w))?, src, beta)?;
        re.push(z.re);
        im.push(z.im);
    }
    let summarize = |v: &[f64]| {
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() as f64 - 1.0);
        Estimate {
            value: mean,
            stderr: (var / v.len() as f64).sqrt(),
            n_samples,
            seed,
        }
    };
    Ok((summarize(&re), summarize(&im)))
}

/// `Z(m) / ∏_a (-m_a)^n`: tends to one for large masses.
pub fn large_mass_ratio(estimate: &Estimate, src: &SourceSpec, n: usize) -> Option<f64> {
    let masses = src.real_masses()?;
    let lead: f64 = masses.iter().map(|m| (-m).powi(n as i32)).product();
    Some(estimate.value / lead)
}

/// Outcome of a ratio-constancy test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTest {
    pub ratios: Vec<f64>,
    pub ratio_errors: Vec<f64>,
    pub mean_ratio: f64,
    pub max_deviation_sigmas: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Default statistical gate in standard errors.
pub const SIGMA_GATE: f64 = 3.0;

pub fn ratio_constancy_test(mc: &[Estimate], analytic: &[f64]) -> Result<RatioTest> {
    ratio_constancy_test_with(mc, analytic, SIGMA_GATE)
}

/// Checks `mc_i / analytic_i` for constancy: error-weighted mean ratio and
/// the largest deviation from it in units of each ratio's standard error.
pub fn ratio_constancy_test_with(mc: &[Estimate], analytic: &[f64], threshold: f64) -> Result<RatioTest> {
    if mc.len() != analytic.len() || mc.is_empty() {
        return Err(Error::DimensionMismatch(format!(
            "{} estimates vs {} analytic values",
            mc.len(),
            analytic.len()
        )));
    }
    if let Some((index, &value)) = analytic.iter().enumerate().find(|(_, a)| a.abs() <= 1e-12) {
        return Err(Error::DegenerateGrid { index, value });
    }
    let ratios: Vec<f64> = mc.iter().zip(analytic).map(|(e, a)| e.value / a).collect();
    // roundoff floor so that exact proportionality with zero errors passes
    let ratio_errors: Vec<f64> = mc
        .iter()
        .zip(analytic)
        .zip(&ratios)
        .map(|((e, a), r)| (e.stderr / a.abs()).max(4.0 * f64::EPSILON * r.abs()).max(f64::MIN_POSITIVE))
        .collect();
    let (num, den) = ratios
        .iter()
        .zip(&ratio_errors)
        .fold((0.0, 0.0), |(n, d), (r, s)| (n + r / (s * s), d + 1.0 / (s * s)));
    let mean_ratio = num / den;
    let max_deviation_sigmas = ratios
        .iter()
        .zip(&ratio_errors)
        .map(|(r, s)| (r - mean_ratio).abs() / s)
        .fold(0.0, f64::max);
    Ok(RatioTest {
        pass: max_deviation_sigmas <= threshold,
        ratios,
        ratio_errors,
        mean_ratio,
        max_deviation_sigmas,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::EnsembleSpec;

    fn spectrum(v: &[f64]) -> SpectrumWithMultiplicity {
        SpectrumWithMultiplicity {
            values: v.to_vec(),
            kramers_collapsed: false,
        }
    }

    #[test]
    fn observable_examples() {
        let z = char_poly_observable(&spectrum(&[1.0, 2.0]), &SourceSpec::single(0.0), DysonIndex::Complex).unwrap();
        assert_eq!(z, Complex64::new(2.0, 0.0));
        let z = char_poly_observable(&spectrum(&[2.0, 2.0]), &SourceSpec::single(1.0), DysonIndex::Quaternion).unwrap();
        assert_eq!(z, Complex64::new(1.0, 0.0));
        for beta in [DysonIndex::Real, DysonIndex::Complex] {
            let z = char_poly_observable(&spectrum(&[1.0, 3.0]), &SourceSpec::single(1.0), beta).unwrap();
            assert_eq!(z.re, 0.0);
        }
        assert!(matches!(
            char_poly_observable(&spectrum(&[1.0, 2.0]), &SourceSpec::single(0.0), DysonIndex::Quaternion),
            Err(Error::PairingFailure { .. })
        ));
    }

    #[test]
    fn realized_mass_slot() {
        let src = SourceSpec::real(&[1.0, 2.0]).unwrap();
        assert_eq!(src.realized_diagonal(DysonIndex::Real).len(), 4);
        assert_eq!(src.realized_diagonal(DysonIndex::Quaternion).len(), 2);
        assert!(SourceSpec::real(&[]).is_err());
    }

    #[test]
    fn source_json_accepts_real_and_complex() {
        let s: SourceSpec = serde_json::from_str("[1.5, [0.0, 2.0]]").unwrap();
        assert_eq!(s.masses()[1], Complex64::new(0.0, 2.0));
        assert!(!s.is_real());
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1.5,[0.0,2.0]]");
    }

    #[test]
    fn ratio_test_examples() {
        let est = |v: f64, s: f64| Estimate {
            value: v,
            stderr: s,
            n_samples: 10,
            seed: 0,
        };
        let analytic = [1.0, 2.0, 4.0, -0.5];
        let exact: Vec<_> = analytic.iter().map(|a| est(2.5 * a, 0.0)).collect();
        let t = ratio_constancy_test(&exact, &analytic).unwrap();
        assert_eq!(t.max_deviation_sigmas, 0.0);
        assert!(t.pass);

        let mut planted: Vec<_> = analytic.iter().map(|a| est(2.5 * a, 0.01 * a.abs())).collect();
        planted[2].value += 10.0 * planted[2].stderr;
        assert!(!ratio_constancy_test(&planted, &analytic).unwrap().pass);

        assert!(matches!(
            ratio_constancy_test(&exact, &[1.0, 0.0, 1.0, 1.0]),
            Err(Error::DegenerateGrid { index: 1, .. })
        ));
        assert!(ratio_constancy_test(&exact[..2], &analytic).is_err());
    }

    #[test]
    fn shard_sizes_cover_all_samples() {
        assert_eq!(shard_sizes(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(shard_sizes(3, 8), vec![1, 1, 1]);
    }

    #[test]
    fn estimator_rejects_bad_inputs() {
        let m = Model::Single(EnsembleSpec::wishart(DysonIndex::Complex, 1, 0, 1.0).unwrap());
        assert!(estimate_z(&m, &SourceSpec::single(0.0), 1, 0).is_err());
        let cl = Model::Single(EnsembleSpec::cauchy_lorentz(DysonIndex::Complex, 1, 0, 1.0, 3.5).unwrap());
        // k = 2 needs mu > 4
        let two = SourceSpec::real(&[0.0, 1.0]).unwrap();
        assert!(matches!(estimate_z(&cl, &two, 10, 0), Err(Error::ConvergenceBound { .. })));
    }

    #[test]
    fn estimates_are_deterministic() {
        let m = Model::Single(EnsembleSpec::wishart(DysonIndex::Quaternion, 2, 1, 1.0).unwrap());
        let grid = [SourceSpec::single(0.5), SourceSpec::single(2.0)];
        let a = estimate_z_curve(&m, &grid, 1000, 9).unwrap();
        let b = estimate_z_curve(&m, &grid, 1000, 9).unwrap();
        assert_eq!(a, b);
        let single = estimate_z(&m, &grid[0], 1000, 9).unwrap();
        assert_eq!(single, a.points[0]);
    }
}
