//! Reference values computed independently of the library.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Classical Jacobi polynomial `P_n^{(a,b)}(x)` by its three-term recurrence.
pub fn jacobi_recurrence(n: usize, a: f64, b: f64, x: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 1..n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
        let c2 = (s + 1.0) * (s * (s + 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (k + a) * (k + b) * (s + 2.0);
        let p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn binomial(top: f64, k: usize) -> f64 {
    (0..k).map(|i| (top - i as f64) / (i + 1) as f64).product()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Generalised Laguerre polynomial from its explicit sum.
pub fn laguerre_explicit(n: usize, alpha: f64, x: f64) -> f64 {
    (0..=n)
        .map(|i| (-1f64).powi(i as i32) * binomial(n as f64 + alpha, n - i) * x.powi(i as i32) / factorial(i))
        .sum()
}

/// Monic Laguerre polynomial in `m/Γ²` times `Γ^{2n}`.
pub fn monic_laguerre(n: usize, nu: usize, gamma_sq: f64, m: f64) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * factorial(n) * gamma_sq.powi(n as i32) * laguerre_explicit(n, nu as f64, m / gamma_sq)
}

/// Christoffel-Darboux combination of monic Laguerre polynomials.
pub fn laguerre_christoffel_darboux(n: usize, nu: usize, gamma_sq: f64, m1: f64, m2: f64) -> f64 {
    let p = |k, m| monic_laguerre(k, nu, gamma_sq, m);
    (p(n + 1, m1) * p(n, m2) - p(n + 1, m2) * p(n, m1)) / (m1 - m2)
}

/// `J_0(y) = (1/π) ∫_0^π cos(y sin θ) dθ` by the trapezoid rule, which is
/// spectrally accurate for this periodic integrand.
pub fn bessel_j0_integral(y: f64) -> f64 {
    let nodes = 400;
    let h = PI / nodes as f64;
    let mut s = 0.5 * (1.0 + (y * PI.sin()).cos());
    for i in 1..nodes {
        s += (y * (i as f64 * h).sin()).cos();
    }
    s * h / PI
}

/// Composite Simpson rule on `[a, b]` with `intervals` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let h = (b - a) / intervals as f64;
    let mut s = f(a) + f(b);
    for i in 1..intervals {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Mean of `λ` under the density `∝ λ^ν (Γ² + λ)^{-μ}` on `λ > 0`, by
/// Simpson's rule after `λ = Γ² t/(1-t)`.
pub fn cauchy_lorentz_scalar_mean(nu: f64, mu: f64, gamma_sq: f64) -> f64 {
    // λ^ν (Γ²+λ)^{-μ} dλ = Γ^{2(ν+1-μ)} t^ν (1-t)^{μ-ν-2} dt
    let weight = |t: f64, k: f64| {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        t.powf(nu + k) * (1.0 - t).powf(mu - nu - 2.0 - k)
    };
    let num = simpson(|t| weight(t, 1.0), 0.0, 1.0, 200_000);
    let den = simpson(|t| weight(t, 0.0), 0.0, 1.0, 200_000);
    gamma_sq * num / den
}

/// Asymptotic Kolmogorov p-value for the statistic `d` with `n` samples.
pub fn kolmogorov_p_value(d: f64, n: usize) -> f64 {
    let t = d * (n as f64).sqrt();
    if t < 0.2 {
        return 1.0;
    }
    let mut p = 0.0;
    for k in 1..200 {
        let k = k as f64;
        let term = 2.0 * (-1f64).powf(k - 1.0) * (-2.0 * k * k * t * t).exp();
        p += term;
        if term.abs() < 1e-16 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

/// Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Mean and batch-means standard error of a correlated sequence.
pub fn batch_means(values: &[f64], batches: usize) -> (f64, f64) {
    let size = values.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| values[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let bm = means.iter().sum::<f64>() / batches as f64;
    let var = means.iter().map(|m| (m - bm).powi(2)).sum::<f64>() / (batches as f64 - 1.0);
    (mean, (var / batches as f64).sqrt())
}
