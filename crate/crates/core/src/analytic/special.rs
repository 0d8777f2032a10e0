use std::f64::consts::PI;
use std::sync::OnceLock;

use statrs::function::gamma::ln_gamma;

/// `(ln|Γ(x)|, sign Γ(x))`, or `None` at the poles `x = 0, -1, -2, …`.
pub fn ln_gamma_signed(x: f64) -> Option<(f64, f64)> {
    if x > 0.0 {
        if x == x.floor() && x <= FACTORIAL_TABLE as f64 {
            return Some((ln_factorial(x as usize - 1), 1.0));
        }
        return Some((ln_gamma(x), 1.0));
    }
    if x == x.floor() {
        return None;
    }
    // reflection, with the sine argument reduced to [0, 2) first
    let s = (PI * (x - 2.0 * (x / 2.0).floor())).sin();
    Some((PI.ln() - s.abs().ln() - ln_gamma(1.0 - x), s.signum()))
}

/// `ln|1/Γ(x)|` and sign; `None` means `1/Γ(x) = 0` exactly.
pub fn ln_rgamma_signed(x: f64) -> Option<(f64, f64)> {
    ln_gamma_signed(x).map(|(l, s)| (-l, s))
}

const FACTORIAL_TABLE: usize = 170;

/// `ln k!`, from running f64 products below 171 and `ln Γ` beyond.
pub fn ln_factorial(k: usize) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut f = 1.0f64;
        (0..=FACTORIAL_TABLE)
            .map(|i| {
                if i > 0 {
                    f *= i as f64;
                }
                f.ln()
            })
            .collect()
    });
    table.get(k).copied().unwrap_or_else(|| ln_gamma(k as f64 + 1.0))
}

/// Neumaier-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `mantissa · exp(log_scale)`, for values outside the f64 range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl Scaled {
    pub fn zero() -> Self {
        Scaled {
            mantissa: 0.0,
            log_scale: 0.0,
        }
    }

    pub fn value(&self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `self / other` as a plain number.
    pub fn ratio(&self, other: &Scaled) -> f64 {
        self.mantissa / other.mantissa * (self.log_scale - other.log_scale).exp()
    }
}

/// Sum of `sign_i · exp(log_i)` without overflow.
pub fn sum_signed_logs(terms: &[(f64, f64)]) -> Scaled {
    let max = terms
        .iter()
        .filter(|(_, s)| *s != 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return Scaled::zero();
    }
    let mut acc = KahanSum::default();
    for &(l, s) in terms {
        if s != 0.0 {
            acc.add(s * (l - max).exp());
        }
    }
    Scaled {
        mantissa: acc.value(),
        log_scale: max,
    }
}
