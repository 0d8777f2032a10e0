use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{monic_series, FactorWeight, SeriesParams};
use crate::algebra::DysonIndex;
use crate::error::{Error, Result};

/// Trapezoid rule on the circle `|z| = radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    /// Points per angle.
    pub nodes: usize,
    pub radius: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { nodes: 64, radius: 1.0 }
    }
}

const POLE_GAP: f64 = 1e-6;

impl QuadratureConfig {
    fn check(&self, weight: &FactorWeight, gamma_sq: f64) -> Result<()> {
        if self.nodes < 16 {
            return Err(Error::InvalidSpec(format!("need at least 16 nodes, got {}", self.nodes)));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidSpec(format!("radius must be positive, got {}", self.radius)));
        }
        if !matches!(weight, FactorWeight::Gaussian) {
            if (self.radius - gamma_sq).abs() < POLE_GAP {
                return Err(Error::PoleOnContour {
                    radius: self.radius,
                    singularity: gamma_sq,
                });
            }
            if self.radius > gamma_sq {
                return Err(Error::ContourEnclosesSingularity {
                    radius: self.radius,
                    singularity: gamma_sq,
                });
            }
        }
        Ok(())
    }

    fn node(&self, a: usize) -> Complex64 {
        Complex64::from_polar(self.radius, 2.0 * PI * a as f64 / self.nodes as f64)
    }
}

fn single_factor(p: &SeriesParams) -> Result<(usize, FactorWeight)> {
    p.validate()?;
    match p.factors.as_slice() {
        [f] => Ok((f.nu, f.weight)),
        _ => Err(Error::Unsupported("quadrature for products".into())),
    }
}

/// Kind-dependent part of the weight, `e^{z/Γ²}`, `(Γ²+z)^{e}` or `(Γ²-z)^{e}`
/// with `e` shifted by `shift` (the number of masses).
fn kind_weight(weight: FactorWeight, n: usize, shift: f64, gamma_sq: f64, z: Complex64) -> Complex64 {
    let n = n as f64;
    match weight {
        FactorWeight::Gaussian => (z / gamma_sq).exp(),
        FactorWeight::CauchyLorentz { mu } => (gamma_sq + z).powf(mu - n - shift),
        FactorWeight::Jacobi { kappa } => (gamma_sq - z).powf(-(n + kappa + shift)),
    }
}

/// `(1/2πi) ∮ dz z^{-(n+ν+1)} (z-m)^n w(z)` with `w(z)` equal to
/// `e^{z/Γ²}`, `(Γ²+z)^{μ-n-1}` or `(Γ²-z)^{-(n+κ+1)}`.
///
/// For the Gaussian weight this equals `n! Γ^{-2ν}` times the Laguerre series.
pub fn contour_quadrature_k1(params: &SeriesParams, m: f64, cfg: &QuadratureConfig) -> Result<Complex64> {
    let (nu, weight) = single_factor(params)?;
    let gamma_sq = params.gamma_sq_total;
    cfg.check(&weight, gamma_sq)?;
    let n = params.n;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in 0..cfg.nodes {
        let z = cfg.node(a);
        sum += (z - m).powu(n as u32) * z.powi(-((n + nu) as i32)) * kind_weight(weight, n, 1.0, gamma_sq, z);
    }
    Ok(sum / cfg.nodes as f64)
}

/// k = 2 circular-ensemble integral (β = 2), normalised by the same
/// quadrature without the mass insertion.
///
/// The eigenvector integral over U(2) is done in closed form: with
/// `a = (z₁-m₁)(z₂-m₂)` and `b = (z₁-m₂)(z₂-m₁)` the insertion is
/// `Σ_{i=0}^{n} aⁱ b^{n-i} / (n+1)`. The eigenvalue weight is
/// `|z₁-z₂|² (z₁z₂)^{-(n+ν)} w(z₁) w(z₂)` with the weights of
/// [`contour_quadrature_k1`] shifted by one more power.
pub fn cbe2_quadrature(
    beta: DysonIndex,
    params: &SeriesParams,
    masses: (f64, f64),
    cfg: &QuadratureConfig,
) -> Result<Complex64> {
    if beta != DysonIndex::Complex {
        return Err(Error::Unsupported(format!("k = 2 quadrature for {beta}")));
    }
    let (nu, weight) = single_factor(params)?;
    let gamma_sq = params.gamma_sq_total;
    cfg.check(&weight, gamma_sq)?;
    let (m1, m2) = ordered_masses(masses)?;
    let n = params.n;
    let pts: Vec<(Complex64, Complex64)> = (0..cfg.nodes)
        .map(|a| {
            let z = cfg.node(a);
            (z, z.powi(-((n + nu) as i32)) * kind_weight(weight, n, 2.0, gamma_sq, z))
        })
        .collect();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for &(z1, w1) in &pts {
        for &(z2, w2) in &pts {
            let w = (z1 - z2).norm_sqr() * w1 * w2;
            let a = (z1 - m1) * (z2 - m2);
            let b = (z1 - m2) * (z2 - m1);
            let mut ins = Complex64::new(0.0, 0.0);
            let mut ai = Complex64::new(1.0, 0.0);
            for i in 0..=n {
                ins += ai * b.powu((n - i) as u32);
                ai *= a;
            }
            num += w * ins;
            den += w;
        }
    }
    Ok(num / den / (n + 1) as f64)
}

fn ordered_masses((m1, m2): (f64, f64)) -> Result<(f64, f64)> {
    if (m1 - m2).abs() < 1e-8 {
        return Err(Error::CoincidentMasses { m1, m2 });
    }
    Ok(if m1 < m2 { (m1, m2) } else { (m2, m1) })
}

/// `[p_{n+1}(m₁)p_n(m₂) - p_{n+1}(m₂)p_n(m₁)] / (m₁-m₂)` for the monic
/// polynomials `p_n` obtained from the series of the same kind.
pub fn christoffel_darboux(params: &SeriesParams, m1: f64, m2: f64) -> Result<f64> {
    single_factor(params)?;
    let (m1, m2) = ordered_masses((m1, m2))?;
    let next = params.with_n(params.n + 1);
    let p = |q: &SeriesParams, m| monic_series(q, m);
    Ok((p(&next, m1) * p(params, m2) - p(&next, m2) * p(params, m1)) / (m1 - m2))
}
