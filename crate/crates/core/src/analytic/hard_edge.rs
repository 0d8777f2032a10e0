use serde::{Deserialize, Serialize};

use super::special::{ln_factorial, KahanSum};
use super::{product_series_scaled, FactorWeight, NuPairing, SeriesFactor, SeriesParams};
use crate::error::{Error, Result};

const MAX_TERMS: usize = 10_000;
const REL_TOL: f64 = 1e-16;

/// Partial sum of the limit series and the first term left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitTerms {
    pub value: f64,
    pub first_omitted: f64,
    pub terms: usize,
}

/// `Σ_{j≥0} (-x)^j / (j! ∏_a (ν_a+j)!)`; for one factor this is
/// `x^{-ν/2} J_ν(2√x)`.
pub fn hard_edge_limit(nu_list: &[usize], x: f64) -> Result<f64> {
    hard_edge_limit_with_bound(nu_list, x, REL_TOL).map(|t| t.value)
}

/// As [`hard_edge_limit`], stopping once a term in the decaying tail drops
/// below `tol` relative to the partial sum.
pub fn hard_edge_limit_with_bound(nu_list: &[usize], x: f64, tol: f64) -> Result<LimitTerms> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidSpec(format!("hard-edge argument must be >= 0, got {x}")));
    }
    let mut term = (-nu_list.iter().map(|&nu| ln_factorial(nu)).sum::<f64>()).exp();
    let mut sum = KahanSum::default();
    for j in 0..MAX_TERMS {
        sum.add(term);
        let denom = (j + 1) as f64 * nu_list.iter().map(|&nu| (nu + j + 1) as f64).product::<f64>();
        let next = term * (-x) / denom;
        if next == 0.0 || (next.abs() <= term.abs() && next.abs() < tol * sum.value().abs()) {
            return Ok(LimitTerms {
                value: sum.value(),
                first_omitted: next,
                terms: j + 1,
            });
        }
        term = next;
    }
    Err(Error::NonConvergent(MAX_TERMS))
}

/// One factor of a hard-edge scan. Cauchy-Lorentz and Jacobi exponents are
/// given through `μ = n(μ̂ + 1)` and `κ = n(κ̂ - 1)` so that the limit
/// exists as `n` grows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HardEdgeFactor {
    WishartLaguerre { nu: usize },
    CauchyLorentz { nu: usize, mu_hat: f64 },
    Jacobi { nu: usize, kappa_hat: f64 },
}

impl HardEdgeFactor {
    pub fn nu(&self) -> usize {
        match *self {
            HardEdgeFactor::WishartLaguerre { nu }
            | HardEdgeFactor::CauchyLorentz { nu, .. }
            | HardEdgeFactor::Jacobi { nu, .. } => nu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardEdgeSpec {
    pub factors: Vec<HardEdgeFactor>,
    #[serde(default = "one")]
    pub gamma_sq: f64,
}

fn one() -> f64 {
    1.0
}

impl HardEdgeSpec {
    pub fn nu_list(&self) -> Vec<usize> {
        self.factors.iter().map(HardEdgeFactor::nu).collect()
    }

    /// Series parameters at size `n` and the source scale `m / x`.
    pub fn at(&self, n: usize) -> Result<(SeriesParams, f64)> {
        if n == 0 || self.factors.is_empty() {
            return Err(Error::InvalidSpec("hard-edge scan needs n >= 1 and a factor".into()));
        }
        if !(self.gamma_sq.is_finite() && self.gamma_sq > 0.0) {
            return Err(Error::InvalidSpec(format!("gamma_sq = {}", self.gamma_sq)));
        }
        let nf = n as f64;
        let mut denom = nf;
        let mut factors = Vec::with_capacity(self.factors.len());
        for f in &self.factors {
            let weight = match *f {
                HardEdgeFactor::WishartLaguerre { .. } => FactorWeight::Gaussian,
                HardEdgeFactor::CauchyLorentz { mu_hat, .. } => {
                    if !(mu_hat > 0.0) {
                        return Err(Error::InvalidSpec(format!("mu_hat must be positive, got {mu_hat}")));
                    }
                    denom *= nf * mu_hat;
                    FactorWeight::CauchyLorentz { mu: nf * (mu_hat + 1.0) }
                }
                HardEdgeFactor::Jacobi { kappa_hat, .. } => {
                    let kappa = nf * (kappa_hat - 1.0);
                    if !(kappa > -1.0) {
                        return Err(Error::InvalidSpec(format!("kappa_hat = {kappa_hat} gives kappa = {kappa} at n = {n}")));
                    }
                    denom *= nf * kappa_hat;
                    FactorWeight::Jacobi { kappa }
                }
            };
            factors.push(SeriesFactor { nu: f.nu(), weight });
        }
        let params = SeriesParams {
            n,
            factors,
            gamma_sq_total: self.gamma_sq,
            nu_pairing: NuPairing::PerFactor,
        };
        Ok((params, self.gamma_sq / denom))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardEdgeScan {
    pub n_list: Vec<usize>,
    pub x_grid: Vec<f64>,
    /// Finite-`n` values normalised to one at `x = 0`, per `n`.
    pub curves: Vec<Vec<f64>>,
    /// Limit normalised to one at `x = 0`.
    pub limit: Vec<f64>,
    /// Sup-distance between each curve and the limit.
    pub distances: Vec<f64>,
}

/// Finite-`n` series at `m = x Γ² / (n ∏(nμ̂) ∏(nκ̂))` against the limit,
/// both normalised at `x = 0`.
pub fn hard_edge_scan(spec: &HardEdgeSpec, n_list: &[usize], x_grid: &[f64]) -> Result<HardEdgeScan> {
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidSpec("n_list must be strictly ascending".into()));
    }
    let nus = spec.nu_list();
    let l0 = hard_edge_limit(&nus, 0.0)?;
    let limit = x_grid
        .iter()
        .map(|&x| hard_edge_limit(&nus, x).map(|v| v / l0))
        .collect::<Result<Vec<_>>>()?;
    let mut curves = Vec::with_capacity(n_list.len());
    let mut distances = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let (params, scale) = spec.at(n)?;
        let at0 = product_series_scaled(&params, 0.0);
        let curve: Vec<f64> = x_grid
            .iter()
            .map(|&x| product_series_scaled(&params, scale * x).ratio(&at0))
            .collect();
        distances.push(curve.iter().zip(&limit).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
        curves.push(curve);
    }
    Ok(HardEdgeScan {
        n_list: n_list.to_vec(),
        x_grid: x_grid.to_vec(),
        curves,
        limit,
        distances,
    })
}
