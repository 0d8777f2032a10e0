//! Closed-form duals of the characteristic-polynomial averages: the
//! hypergeometric series, the β = 1, 4 parameter maps, contour and k = 2
//! circular-ensemble quadratures and the hard-edge limit.
//!
//! Every value is the bare displayed sum or integral without prefactors;
//! comparisons with Monte Carlo are made up to a constant.

mod csv_io;
mod hard_edge;
mod quadrature;
pub mod special;

pub use csv_io::{read_xy_csv, write_xy_csv, XyRow};
pub use hard_edge::{hard_edge_limit, hard_edge_limit_with_bound, hard_edge_scan, HardEdgeFactor, HardEdgeScan, HardEdgeSpec, LimitTerms};
pub use quadrature::{cbe2_quadrature, christoffel_darboux, contour_quadrature_k1, QuadratureConfig};

use serde::{Deserialize, Serialize};

use crate::algebra::DysonIndex;
use crate::ensembles::{EnsembleKind, EnsembleSpec, Model};
use crate::error::{Error, Result};
use special::{ln_factorial, ln_gamma_signed, ln_rgamma_signed, sum_signed_logs, Scaled};

/// Weight attached to one factor of the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorWeight {
    Gaussian,
    CauchyLorentz { mu: f64 },
    Jacobi { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesFactor {
    pub nu: usize,
    pub weight: FactorWeight,
}

/// Which `ν` enters the `Γ(n+κ+ν+j+1)` and `1/Γ(μ-n-ν-j)` factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuPairing {
    /// The factor's own `ν_a`.
    #[default]
    PerFactor,
    /// One common `ν` for all factors.
    Uniform(usize),
}

/// Parameters of the product series. A single ensemble is a one-factor list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub n: usize,
    pub factors: Vec<SeriesFactor>,
    /// `Γ² = ∏_j Γ_j²`
    pub gamma_sq_total: f64,
    #[serde(default)]
    pub nu_pairing: NuPairing,
}

impl SeriesParams {
    pub fn laguerre(n: usize, nu: usize, gamma_sq: f64) -> Self {
        Self::single(n, nu, FactorWeight::Gaussian, gamma_sq)
    }

    pub fn cauchy_lorentz(n: usize, nu: usize, mu: f64, gamma_sq: f64) -> Self {
        Self::single(n, nu, FactorWeight::CauchyLorentz { mu }, gamma_sq)
    }

    pub fn jacobi(n: usize, nu: usize, kappa: f64, gamma_sq: f64) -> Self {
        Self::single(n, nu, FactorWeight::Jacobi { kappa }, gamma_sq)
    }

    fn single(n: usize, nu: usize, weight: FactorWeight, gamma_sq: f64) -> Self {
        SeriesParams {
            n,
            factors: vec![SeriesFactor { nu, weight }],
            gamma_sq_total: gamma_sq,
            nu_pairing: NuPairing::PerFactor,
        }
    }

    /// Series parameters matching a model's factors (β = 2 reading).
    pub fn from_model(model: &Model) -> Self {
        let factors = model.factors();
        SeriesParams {
            n: model.n(),
            factors: factors.iter().map(factor_of).collect(),
            gamma_sq_total: factors.iter().map(EnsembleSpec::gamma_sq).product(),
            nu_pairing: NuPairing::PerFactor,
        }
    }

    pub fn nu_list(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.nu).collect()
    }

    pub fn mu_list(&self) -> Vec<f64> {
        self.factors
            .iter()
            .filter_map(|f| match f.weight {
                FactorWeight::CauchyLorentz { mu } => Some(mu),
                _ => None,
            })
            .collect()
    }

    pub fn kappa_list(&self) -> Vec<f64> {
        self.factors
            .iter()
            .filter_map(|f| match f.weight {
                FactorWeight::Jacobi { kappa } => Some(kappa),
                _ => None,
            })
            .collect()
    }

    pub fn with_n(&self, n: usize) -> Self {
        SeriesParams { n, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.factors.is_empty() {
            return Err(Error::InvalidSpec("series needs n >= 1 and at least one factor".into()));
        }
        if !(self.gamma_sq_total.is_finite() && self.gamma_sq_total > 0.0) {
            return Err(Error::InvalidSpec(format!("gamma_sq_total = {}", self.gamma_sq_total)));
        }
        Ok(())
    }

    fn paired_nu(&self, f: &SeriesFactor) -> f64 {
        match self.nu_pairing {
            NuPairing::PerFactor => f.nu as f64,
            NuPairing::Uniform(nu) => nu as f64,
        }
    }

    /// `ln|·|` and sign of the `m`-independent part of term `j`, or a zero sign.
    fn coefficient(&self, j: usize) -> (f64, f64) {
        let n = self.n as f64;
        let jf = j as f64;
        let mut sign = 1.0;
        let mut parts: Vec<f64> = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let nu = self.paired_nu(f);
            let mut c = -ln_factorial(f.nu + j);
            match f.weight {
                FactorWeight::Gaussian => {}
                FactorWeight::CauchyLorentz { mu } => match ln_rgamma_signed(mu - n - nu - jf) {
                    Some((l, s)) => {
                        c += l;
                        sign *= s;
                    }
                    None => return (f64::NEG_INFINITY, 0.0),
                },
                FactorWeight::Jacobi { kappa } => match ln_gamma_signed(n + kappa + nu + jf + 1.0) {
                    Some((l, s)) => {
                        c += l;
                        sign *= s;
                    }
                    None => return (f64::INFINITY, f64::NAN),
                },
            }
            parts.push(c);
        }
        // order-independent accumulation over the factor multiset
        parts.sort_by(f64::total_cmp);
        let mut log = -ln_factorial(j) - ln_factorial(self.n - j);
        for c in parts {
            log += c;
        }
        (log, sign)
    }

    /// Coefficient of `m^n`, as `(ln|c|, sign)`.
    pub fn leading_coefficient(&self) -> (f64, f64) {
        let (l, s) = self.coefficient(self.n);
        let sign = if self.n.is_multiple_of(2) { s } else { -s };
        (l - self.n as f64 * self.gamma_sq_total.ln(), sign)
    }
}

fn factor_of(spec: &EnsembleSpec) -> SeriesFactor {
    let weight = match spec.kind {
        EnsembleKind::WishartLaguerre => FactorWeight::Gaussian,
        EnsembleKind::CauchyLorentz => FactorWeight::CauchyLorentz {
            mu: spec.mu.unwrap_or(f64::NAN),
        },
        EnsembleKind::Jacobi => FactorWeight::Jacobi {
            kappa: spec.kappa.unwrap_or(f64::NAN),
        },
    };
    SeriesFactor { nu: spec.nu, weight }
}

/// `Σ_{j=0}^{n} [∏_a Γ(n+κ_a+ν_a+j+1)] (-m/Γ²)^j /
/// (j!(n-j)! ∏_a (ν_a+j)! ∏_a Γ(μ_a-n-ν_a-j))`, as a scaled value.
///
/// `ν_a` inside the κ and μ factors is the factor's own index unless
/// [`NuPairing::Uniform`] is selected. Reciprocal Gammas at poles are zero.
pub fn product_series_scaled(p: &SeriesParams, m: f64) -> Scaled {
    let x = -m / p.gamma_sq_total;
    let terms: Vec<(f64, f64)> = (0..=p.n)
        .map(|j| {
            let (l, s) = p.coefficient(j);
            if j == 0 {
                (l, s)
            } else if x == 0.0 {
                (f64::NEG_INFINITY, 0.0)
            } else {
                let sx = if x < 0.0 && j % 2 == 1 { -1.0 } else { 1.0 };
                (l + j as f64 * x.abs().ln(), s * sx)
            }
        })
        .collect();
    sum_signed_logs(&terms)
}

pub fn product_series(p: &SeriesParams, m: f64) -> f64 {
    product_series_scaled(p, m).value()
}

/// Sum of the absolute values of the terms, the natural scale for
/// judging cancellation near zeros of the polynomial.
pub fn product_series_abs_scaled(p: &SeriesParams, m: f64) -> Scaled {
    let x = (m / p.gamma_sq_total).abs();
    let terms: Vec<(f64, f64)> = (0..=p.n)
        .map(|j| {
            let (l, s) = p.coefficient(j);
            if j > 0 && x == 0.0 {
                (f64::NEG_INFINITY, 0.0)
            } else {
                (l + if j == 0 { 0.0 } else { j as f64 * x.ln() }, s.abs())
            }
        })
        .collect();
    sum_signed_logs(&terms)
}

/// Monic polynomial `p_n(m)`: the series divided by its leading coefficient.
pub fn monic_series(p: &SeriesParams, m: f64) -> f64 {
    let s = product_series_scaled(p, m);
    let (l, sign) = p.leading_coefficient();
    s.mantissa * sign * (s.log_scale - l).exp()
}

/// `Σ_j (-m/Γ²)^j / (j!(n-j)!(ν+j)!)`
pub fn laguerre_series(n: usize, nu: usize, gamma_sq: f64, m: f64) -> f64 {
    product_series(&SeriesParams::laguerre(n, nu, gamma_sq), m)
}

/// `Σ_j (-m/Γ²)^j / (j!(n-j)!(ν+j)! Γ(μ-n-ν-j))`
pub fn cl_series(n: usize, nu: usize, mu: f64, gamma_sq: f64, m: f64) -> f64 {
    product_series(&SeriesParams::cauchy_lorentz(n, nu, mu, gamma_sq), m)
}

/// `Σ_j Γ(n+κ+ν+j+1) (-m/Γ²)^j / (j!(n-j)!(ν+j)!)`
pub fn jacobi_series(n: usize, nu: usize, kappa: f64, gamma_sq: f64, m: f64) -> f64 {
    product_series(&SeriesParams::jacobi(n, nu, kappa, gamma_sq), m)
}

/// β = 2 series parameters and argument reproducing a β = 1 or 4 average
/// of a single characteristic polynomial, up to a constant:
/// `m → γ̃m` (Wishart-Laguerre), `μ → γ̃μ - γ̃/γ + 1` (Cauchy-Lorentz),
/// `κ → γ̃κ + γ̃/γ - 1` (Jacobi).
pub fn map_beta14(beta: DysonIndex, params: &SeriesParams, masses: &[f64]) -> Result<(SeriesParams, f64)> {
    if masses.len() != 1 {
        return Err(Error::UnsupportedMassCount(masses.len()));
    }
    let m = masses[0];
    if beta == DysonIndex::Complex {
        return Ok((params.clone(), m));
    }
    if params.factors.len() != 1 {
        return Err(Error::Unsupported(format!("{beta} maps for products")));
    }
    let gt = beta.gamma_tilde() as f64;
    let g = beta.gamma() as f64;
    let mut mapped = params.clone();
    let mut m_mapped = m;
    let f = &mut mapped.factors[0];
    match f.weight {
        FactorWeight::Gaussian => m_mapped = gt * m,
        FactorWeight::CauchyLorentz { mu } => {
            f.weight = FactorWeight::CauchyLorentz {
                mu: gt * mu - gt / g + 1.0,
            }
        }
        FactorWeight::Jacobi { kappa } => {
            f.weight = FactorWeight::Jacobi {
                kappa: gt * kappa + gt / g - 1.0,
            }
        }
    }
    Ok((mapped, m_mapped))
}
