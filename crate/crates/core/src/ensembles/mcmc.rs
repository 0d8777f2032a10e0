use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::{eigenvalues_hermitian, gram, Field, FieldMatrix};
use crate::error::{Error, Result};
use crate::rng::RngState;

/// Random-walk Metropolis settings. A sweep proposes one move per matrix
/// entry (all real components of the entry at once).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct McmcConfig {
    /// Initial proposal standard deviation in units of `Γ`; adapted towards
    /// 30% acceptance during burn-in.
    pub step_scale: f64,
    pub burn_in: usize,
    pub thinning: usize,
    /// Mixed into the chain's RNG stream.
    pub chain_seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            step_scale: 0.5,
            burn_in: 10_000,
            thinning: 10,
            chain_seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_scale.is_finite() && self.step_scale > 0.0) {
            return Err(Error::InvalidSpec(format!("step_scale must be positive, got {}", self.step_scale)));
        }
        if self.thinning == 0 {
            return Err(Error::InvalidSpec("thinning must be at least 1".into()));
        }
        Ok(())
    }
}

/// Log-density of `W'` up to a constant, as a function of the Gram
/// spectrum in the complex representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChainTarget {
    /// `-μ log det(Γ² + W W†)`
    CauchyLorentz { mu: f64, gamma_sq: f64 },
    /// `κ log det(Γ² - W W†)` on `W W† < Γ²`
    Jacobi { kappa: f64, gamma_sq: f64 },
}

impl ChainTarget {
    fn log_density(&self, spectrum: &[f64]) -> f64 {
        match *self {
            ChainTarget::CauchyLorentz { mu, gamma_sq } => {
                -mu * spectrum.iter().map(|&l| (gamma_sq + l).ln()).sum::<f64>()
            }
            ChainTarget::Jacobi { kappa, gamma_sq } => {
                if spectrum.iter().any(|&l| l >= gamma_sq) {
                    return f64::NEG_INFINITY;
                }
                kappa * spectrum.iter().map(|&l| (gamma_sq - l).ln()).sum::<f64>()
            }
        }
    }

    fn scale(&self) -> f64 {
        match *self {
            ChainTarget::CauchyLorentz { gamma_sq, .. } | ChainTarget::Jacobi { gamma_sq, .. } => gamma_sq.sqrt(),
        }
    }
}

const TARGET_ACCEPTANCE: f64 = 0.3;
const ADAPT_WINDOW: usize = 50;

pub struct MetropolisChain {
    field: Field,
    rows: usize,
    cols: usize,
    params: Vec<f64>,
    log_density: f64,
    target: ChainTarget,
    cfg: McmcConfig,
    step: f64,
    rng: RngState,
    accepted: u64,
    proposed: u64,
}

impl MetropolisChain {
    /// Chain started at the zero matrix, which lies in every target's support.
    pub fn new(field: Field, rows: usize, cols: usize, target: ChainTarget, cfg: McmcConfig, rng: RngState) -> Result<Self> {
        cfg.validate()?;
        let params = vec![0.0; rows * cols * field.real_components()];
        let step = cfg.step_scale * target.scale();
        let mut chain = MetropolisChain {
            field,
            rows,
            cols,
            params,
            log_density: 0.0,
            target,
            cfg,
            step,
            rng,
            accepted: 0,
            proposed: 0,
        };
        chain.log_density = chain.evaluate(&chain.params)?;
        Ok(chain)
    }

    fn matrix(&self, params: &[f64]) -> FieldMatrix {
        FieldMatrix::from_real_params(self.field, self.rows, self.cols, params).expect("parameter count is fixed")
    }

    fn evaluate(&self, params: &[f64]) -> Result<f64> {
        let h = gram(&self.matrix(params));
        let spectrum = eigenvalues_hermitian(&h)?;
        let ld = self.target.log_density(&spectrum.values);
        if ld.is_nan() || ld == f64::INFINITY {
            return Err(Error::ChainDiverged(ld));
        }
        Ok(ld)
    }

    fn sweep(&mut self) -> Result<(u64, u64)> {
        let d = self.field.real_components();
        let mut accepted = 0;
        let entries = self.rows * self.cols;
        let mut proposal = self.params.clone();
        for e in 0..entries {
            for c in 0..d {
                let z: f64 = self.rng.sample(StandardNormal);
                proposal[e * d + c] = self.params[e * d + c] + self.step * z;
            }
            let ld = self.evaluate(&proposal)?;
            let log_u = self.rng.random::<f64>().ln();
            if log_u < ld - self.log_density {
                self.params[e * d..(e + 1) * d].copy_from_slice(&proposal[e * d..(e + 1) * d]);
                self.log_density = ld;
                accepted += 1;
            } else {
                proposal[e * d..(e + 1) * d].copy_from_slice(&self.params[e * d..(e + 1) * d]);
            }
        }
        self.accepted += accepted;
        self.proposed += entries as u64;
        Ok((accepted, entries as u64))
    }

    /// Runs `burn_in` sweeps, adapting the step size every few sweeps.
    pub fn burn_in(&mut self) -> Result<()> {
        let (mut acc, mut prop) = (0, 0);
        for s in 1..=self.cfg.burn_in {
            let (a, p) = self.sweep()?;
            acc += a;
            prop += p;
            if s % ADAPT_WINDOW == 0 {
                let rate = acc as f64 / prop as f64;
                self.step *= (2.0 * (rate - TARGET_ACCEPTANCE)).exp();
                acc = 0;
                prop = 0;
            }
        }
        self.accepted = 0;
        self.proposed = 0;
        Ok(())
    }

    /// Advances `thinning` sweeps and returns the current state.
    pub fn next_draw(&mut self) -> Result<FieldMatrix> {
        for _ in 0..self.cfg.thinning {
            self.sweep()?;
        }
        Ok(self.matrix(&self.params))
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }

    pub fn step(&self) -> f64 {
        self.step
    }
}
