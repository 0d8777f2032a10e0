//! Samplers for the Wishart-Laguerre, Cauchy-Lorentz and Jacobi ensembles
//! and for ordered products of independent factors.
//!
//! Every sampler returns the rectangular `n x (n + nu)` matrix `W'`; the
//! induced `det^{nu/gamma_tilde}` factor of the square ensemble is carried by
//! its Gram matrix. Gaussian entries follow the density `exp(-tr W W† / Γ²)`
//! with the trace taken in the complex representation:
//!
//! | field      | real components per entry | variance of each component |
//! |------------|---------------------------|----------------------------|
//! | real       | 1                         | Γ²/2                       |
//! | complex    | 2                         | Γ²/2 (so `E|w|² = Γ²`)     |
//! | quaternion | 4                         | Γ²/4 (so `E|q|² = Γ²`)     |
//!
//! Hence `E tr W W† = γ n (n+ν) Γ² c_β` with `c_1 = 1/2` and `c_2 = c_4 = 1`.

mod mcmc;
mod product;

pub use mcmc::{ChainTarget, McmcConfig, MetropolisChain};
pub use product::{sample_product, sample_product_with, ProductSample};

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::algebra::{haar_sample, DysonIndex, Field, FieldMatrix};
use crate::error::{Error, Result};
use crate::rng::RngState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleKind {
    WishartLaguerre,
    CauchyLorentz,
    Jacobi,
}

/// Parameters of one factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnsembleSpec")]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub beta: DysonIndex,
    pub n: usize,
    #[serde(default)]
    pub nu: usize,
    #[serde(default = "one")]
    pub gamma_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
}

fn one() -> f64 {
    1.0
}

#[derive(Deserialize)]
struct RawEnsembleSpec {
    kind: EnsembleKind,
    beta: DysonIndex,
    n: usize,
    #[serde(default)]
    nu: usize,
    #[serde(default = "one")]
    gamma_scale: f64,
    #[serde(default)]
    mu: Option<f64>,
    #[serde(default)]
    kappa: Option<f64>,
}

impl TryFrom<RawEnsembleSpec> for EnsembleSpec {
    type Error = Error;
    fn try_from(r: RawEnsembleSpec) -> Result<Self> {
        let spec = EnsembleSpec {
            kind: r.kind,
            beta: r.beta,
            n: r.n,
            nu: r.nu,
            gamma_scale: r.gamma_scale,
            mu: r.mu,
            kappa: r.kappa,
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Lower bound on the Cauchy-Lorentz exponent for `k` characteristic
/// polynomials: `mu > k/γ + (2n+ν)/γ̃ - (γγ̃-1)/2`.
pub fn cl_mu_bound(beta: DysonIndex, n: usize, nu: usize, k: usize) -> f64 {
    let g = beta.gamma() as f64;
    let gt = beta.gamma_tilde() as f64;
    k as f64 / g + (2 * n + nu) as f64 / gt - (g * gt - 1.0) / 2.0
}

impl EnsembleSpec {
    pub fn wishart(beta: DysonIndex, n: usize, nu: usize, gamma_scale: f64) -> Result<Self> {
        let s = EnsembleSpec {
            kind: EnsembleKind::WishartLaguerre,
            beta,
            n,
            nu,
            gamma_scale,
            mu: None,
            kappa: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn cauchy_lorentz(beta: DysonIndex, n: usize, nu: usize, gamma_scale: f64, mu: f64) -> Result<Self> {
        let s = EnsembleSpec {
            kind: EnsembleKind::CauchyLorentz,
            beta,
            n,
            nu,
            gamma_scale,
            mu: Some(mu),
            kappa: None,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn jacobi(beta: DysonIndex, n: usize, nu: usize, gamma_scale: f64, kappa: f64) -> Result<Self> {
        let s = EnsembleSpec {
            kind: EnsembleKind::Jacobi,
            beta,
            n,
            nu,
            gamma_scale,
            mu: None,
            kappa: Some(kappa),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn gamma_sq(&self) -> f64 {
        self.gamma_scale * self.gamma_scale
    }

    pub fn field(&self) -> Field {
        self.beta.field()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be positive".into()));
        }
        if !(self.gamma_scale.is_finite() && self.gamma_scale > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "gamma_scale must be positive, got {}",
                self.gamma_scale
            )));
        }
        match self.kind {
            EnsembleKind::WishartLaguerre => {
                if self.mu.is_some() || self.kappa.is_some() {
                    return Err(Error::InvalidSpec("Wishart-Laguerre takes neither mu nor kappa".into()));
                }
            }
            EnsembleKind::CauchyLorentz => {
                let mu = self
                    .mu
                    .ok_or_else(|| Error::InvalidSpec("Cauchy-Lorentz needs mu".into()))?;
                if self.kappa.is_some() {
                    return Err(Error::InvalidSpec("Cauchy-Lorentz takes no kappa".into()));
                }
                if !mu.is_finite() {
                    return Err(Error::InvalidSpec(format!("mu must be finite, got {mu}")));
                }
                self.check_mass_count(0)?;
            }
            EnsembleKind::Jacobi => {
                let kappa = self
                    .kappa
                    .ok_or_else(|| Error::InvalidSpec("Jacobi needs kappa".into()))?;
                if self.mu.is_some() {
                    return Err(Error::InvalidSpec("Jacobi takes no mu".into()));
                }
                let bound = -1.0 / (2.0 * self.beta.gamma() as f64);
                if !(kappa.is_finite() && kappa > bound) {
                    return Err(Error::InvalidSpec(format!("kappa = {kappa} must exceed {bound}")));
                }
            }
        }
        Ok(())
    }

    /// Checks that averages of `k` characteristic polynomials converge.
    pub fn check_mass_count(&self, k: usize) -> Result<()> {
        if let (EnsembleKind::CauchyLorentz, Some(mu)) = (self.kind, self.mu) {
            let bound = cl_mu_bound(self.beta, self.n, self.nu, k);
            if !(mu > bound) {
                return Err(Error::ConvergenceBound { mu, bound, k });
            }
        }
        Ok(())
    }

    /// Dimension `N_H` of the compact group whose truncation realises this
    /// Jacobi ensemble, if any.
    ///
    /// A `rows x cols` block of a Haar matrix of `U^(β)(N_H)` has density
    /// `det^{κ}(1 - W W†)` (complex-representation determinant) with
    /// `γ̃κ + γ̃/γ - 1 = N_H - rows - cols`, so `N_H` exists exactly when
    /// that shifted exponent is a non-negative integer.
    pub fn truncation_dimension(&self) -> Option<usize> {
        if self.kind != EnsembleKind::Jacobi {
            return None;
        }
        let kappa = self.kappa?;
        let gt = self.beta.gamma_tilde() as f64;
        let g = self.beta.gamma() as f64;
        let shifted = gt * kappa + gt / g - 1.0;
        let rounded = shifted.round();
        if rounded >= 0.0 && (shifted - rounded).abs() < 1e-12 {
            Some(2 * self.n + self.nu + rounded as usize)
        } else {
            None
        }
    }

    /// Target density for the Metropolis route, if this kind has one.
    pub fn chain_target(&self) -> Option<ChainTarget> {
        match self.kind {
            EnsembleKind::WishartLaguerre => None,
            EnsembleKind::CauchyLorentz => Some(ChainTarget::CauchyLorentz {
                mu: self.mu?,
                gamma_sq: self.gamma_sq(),
            }),
            EnsembleKind::Jacobi => Some(ChainTarget::Jacobi {
                kappa: self.kappa?,
                gamma_sq: self.gamma_sq(),
            }),
        }
    }
}

fn require_kind(spec: &EnsembleSpec, kind: EnsembleKind) -> Result<()> {
    spec.validate()?;
    if spec.kind != kind {
        return Err(Error::InvalidSpec(format!(
            "expected a {:?} spec, got {:?}",
            kind, spec.kind
        )));
    }
    Ok(())
}

/// Gaussian `n x (n+ν)` matrix with density `∝ exp(-tr W W† / Γ²)`.
pub fn sample_wishart_laguerre<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> Result<FieldMatrix> {
    require_kind(spec, EnsembleKind::WishartLaguerre)?;
    Ok(draw_gaussian(spec, rng))
}

fn draw_gaussian<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R) -> FieldMatrix {
    let field = spec.field();
    let variance = spec.gamma_sq() / (2.0 * field.gamma() as f64);
    FieldMatrix::gaussian(field, spec.n, spec.n + spec.nu, variance, rng)
}

fn draw_truncation<R: Rng + ?Sized>(spec: &EnsembleSpec, dim: usize, rng: &mut R) -> Result<FieldMatrix> {
    let u = haar_sample(spec.beta, dim, rng)?;
    Ok(u.top_left(spec.n, spec.n + spec.nu)?.scale(spec.gamma_scale))
}

/// Jacobi sample: a scaled truncation of a Haar matrix when the exponent
/// allows it, otherwise a Metropolis chain (when `mcmc` is given).
pub fn sample_jacobi<R: Rng + ?Sized>(
    spec: &EnsembleSpec,
    rng: &mut R,
    mcmc: Option<&McmcConfig>,
) -> Result<FieldMatrix> {
    require_kind(spec, EnsembleKind::Jacobi)?;
    match (spec.truncation_dimension(), mcmc) {
        (Some(dim), _) => draw_truncation(spec, dim, rng),
        (None, Some(cfg)) => single_chain_draw(spec, rng, cfg),
        (None, None) => Err(Error::UnrealizableParameters(format!(
            "{} kappa = {:?}",
            spec.beta, spec.kappa
        ))),
    }
}

/// One Cauchy-Lorentz draw: burn in a fresh chain, then return its state.
pub fn sample_cauchy_lorentz<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R, cfg: &McmcConfig) -> Result<FieldMatrix> {
    require_kind(spec, EnsembleKind::CauchyLorentz)?;
    single_chain_draw(spec, rng, cfg)
}

fn single_chain_draw<R: Rng + ?Sized>(spec: &EnsembleSpec, rng: &mut R, cfg: &McmcConfig) -> Result<FieldMatrix> {
    let mut sampler = EnsembleSampler::new(spec, cfg, Some(cfg), rng)?;
    sampler.draw(rng)
}

enum Route {
    Gaussian,
    Truncation(usize),
    Chain(Box<MetropolisChain>),
}

/// Stream of draws from one ensemble. Direct routes draw from the caller's
/// RNG; chain routes own an RNG derived from it at construction (mixed with
/// `McmcConfig::chain_seed`) and are already burnt in.
pub struct EnsembleSampler {
    spec: EnsembleSpec,
    route: Route,
}

impl EnsembleSampler {
    /// `jacobi_mcmc` enables the chain fallback for non-truncatable Jacobi
    /// exponents; Cauchy-Lorentz always uses `mcmc`.
    pub fn new<R: Rng + ?Sized>(
        spec: &EnsembleSpec,
        mcmc: &McmcConfig,
        jacobi_mcmc: Option<&McmcConfig>,
        rng: &mut R,
    ) -> Result<Self> {
        spec.validate()?;
        let chain = |cfg: &McmcConfig, rng: &mut R| -> Result<Route> {
            let target = spec.chain_target().expect("kind has a chain target");
            let chain_rng = RngState::seed_from_u64(rng.next_u64() ^ cfg.chain_seed);
            let mut chain = MetropolisChain::new(spec.field(), spec.n, spec.n + spec.nu, target, cfg.clone(), chain_rng)?;
            chain.burn_in()?;
            Ok(Route::Chain(Box::new(chain)))
        };
        let route = match spec.kind {
            EnsembleKind::WishartLaguerre => Route::Gaussian,
            EnsembleKind::CauchyLorentz => chain(mcmc, rng)?,
            EnsembleKind::Jacobi => match (spec.truncation_dimension(), jacobi_mcmc) {
                (Some(dim), _) => Route::Truncation(dim),
                (None, Some(cfg)) => chain(cfg, rng)?,
                (None, None) => {
                    return Err(Error::UnrealizableParameters(format!(
                        "{} kappa = {:?}",
                        spec.beta, spec.kappa
                    )))
                }
            },
        };
        Ok(EnsembleSampler {
            spec: spec.clone(),
            route,
        })
    }

    pub fn spec(&self) -> &EnsembleSpec {
        &self.spec
    }

    /// Whether consecutive draws are correlated.
    pub fn is_markov(&self) -> bool {
        matches!(self.route, Route::Chain(_))
    }

    pub fn acceptance_rate(&self) -> Option<f64> {
        match &self.route {
            Route::Chain(c) => Some(c.acceptance_rate()),
            _ => None,
        }
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<FieldMatrix> {
        match &mut self.route {
            Route::Gaussian => Ok(draw_gaussian(&self.spec, rng)),
            Route::Truncation(dim) => draw_truncation(&self.spec, *dim, rng),
            Route::Chain(chain) => chain.next_draw(),
        }
    }
}

/// Ordered list of independent factors sharing `beta` and `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProductSpec")]
pub struct ProductSpec {
    pub factors: Vec<EnsembleSpec>,
}

#[derive(Deserialize)]
struct RawProductSpec {
    factors: Vec<EnsembleSpec>,
}

impl TryFrom<RawProductSpec> for ProductSpec {
    type Error = Error;
    fn try_from(r: RawProductSpec) -> Result<Self> {
        ProductSpec::new(r.factors)
    }
}

impl ProductSpec {
    pub fn new(factors: Vec<EnsembleSpec>) -> Result<Self> {
        let first = factors
            .first()
            .ok_or_else(|| Error::InvalidSpec("a product needs at least one factor".into()))?;
        for f in &factors {
            f.validate()?;
            if f.beta != first.beta || f.n != first.n {
                return Err(Error::DimensionMismatch(format!(
                    "all factors must share beta and n: ({}, {}) vs ({}, {})",
                    first.beta, first.n, f.beta, f.n
                )));
            }
        }
        Ok(ProductSpec { factors })
    }

    pub fn beta(&self) -> DysonIndex {
        self.factors[0].beta
    }

    pub fn n(&self) -> usize {
        self.factors[0].n
    }

    /// Same factors in the opposite order.
    pub fn reversed(&self) -> ProductSpec {
        ProductSpec {
            factors: self.factors.iter().rev().cloned().collect(),
        }
    }
}

/// What an estimator averages over: a single ensemble or a product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    Single(EnsembleSpec),
    Product(ProductSpec),
}

impl Model {
    pub fn beta(&self) -> DysonIndex {
        match self {
            Model::Single(s) => s.beta,
            Model::Product(p) => p.beta(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Model::Single(s) => s.n,
            Model::Product(p) => p.n(),
        }
    }

    pub fn factors(&self) -> &[EnsembleSpec] {
        match self {
            Model::Single(s) => std::slice::from_ref(s),
            Model::Product(p) => &p.factors,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Model::Single(s) => s.validate(),
            Model::Product(p) => ProductSpec::new(p.factors.clone()).map(|_| ()),
        }
    }

    pub fn check_mass_count(&self, k: usize) -> Result<()> {
        self.factors().iter().try_for_each(|f| f.check_mass_count(k))
    }
}

/// Stream of draws from a [`Model`]; yields the matrix whose Gram spectrum
/// enters the characteristic polynomial.
pub struct ModelSampler {
    samplers: Vec<EnsembleSampler>,
}

impl ModelSampler {
    pub fn new<R: Rng + ?Sized>(
        model: &Model,
        mcmc: &McmcConfig,
        jacobi_mcmc: Option<&McmcConfig>,
        rng: &mut R,
    ) -> Result<Self> {
        model.validate()?;
        let samplers = model
            .factors()
            .iter()
            .map(|f| EnsembleSampler::new(f, mcmc, jacobi_mcmc, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok(ModelSampler { samplers })
    }

    pub fn is_markov(&self) -> bool {
        self.samplers.iter().any(EnsembleSampler::is_markov)
    }

    pub fn draw<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<FieldMatrix> {
        if self.samplers.len() == 1 {
            return self.samplers[0].draw(rng);
        }
        let samplers = &mut self.samplers;
        let mut index = 0;
        let sample = product::assemble(samplers.len(), |_| {
            let m = samplers[index].draw(rng);
            index += 1;
            m
        })?;
        Ok(sample.product)
    }
}
