use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::analytic::{HardEdgeSpec, QuadratureConfig, SeriesParams};
use crate::charpoly::{EstimatorOptions, SourceSpec};
use crate::ensembles::Model;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Sample,
    Estimate,
    Analytic,
    Compare,
    HardEdge,
    Quadrature,
}

/// Verdict thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Statistical gate for Monte Carlo comparisons, in standard errors.
    pub sigma: f64,
    /// Contour identity / proportionality, scaled relative.
    pub identity_rel: f64,
    /// k = 2 quadrature against Christoffel-Darboux, relative.
    pub k2_rel: f64,
    /// Largest allowed hard-edge sup-distance at the last `n`.
    pub hard_edge_final: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            sigma: 3.0,
            identity_rel: 1e-10,
            k2_rel: 1e-8,
            hard_edge_final: 1e-2,
        }
    }
}

/// Perturbation of the analytic side, for checking that a comparison can fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NegativeControl {
    #[serde(default)]
    pub nu_shift: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardEdgeSection {
    #[serde(flatten)]
    pub spec: HardEdgeSpec,
    pub n_list: Vec<usize>,
    #[serde(default = "default_x_max")]
    pub x_max: f64,
    #[serde(default = "default_x_points")]
    pub x_points: usize,
}

fn default_x_max() -> f64 {
    10.0
}

fn default_x_points() -> usize {
    201
}

impl HardEdgeSection {
    /// `x_points` equally spaced points on `[0, x_max]`.
    pub fn x_grid(&self) -> Vec<f64> {
        if self.x_points == 1 {
            return vec![0.0];
        }
        let step = self.x_max / (self.x_points - 1) as f64;
        (0..self.x_points).map(|i| i as f64 * step).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSection {
    #[serde(flatten)]
    pub config: QuadratureConfig,
    /// Mass pairs for the k = 2 check.
    pub k2_masses: Vec<(f64, f64)>,
}

/// JSON experiment description. `seed` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub experiment: Option<ExperimentKind>,
    pub seed: u64,
    #[serde(default)]
    pub model: Option<Model>,
    /// Single-mass grid.
    #[serde(default)]
    pub masses: Vec<f64>,
    /// Multi-mass sources, used by `estimate` instead of `masses` when given.
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub estimator: EstimatorOptions,
    #[serde(default)]
    pub negative_control: Option<NegativeControl>,
    /// Explicit series parameters for `analytic` runs without a model.
    #[serde(default)]
    pub series: Option<SeriesParams>,
    #[serde(default)]
    pub hard_edge: Option<HardEdgeSection>,
    #[serde(default)]
    pub quadrature: Option<QuadratureSection>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Minimal config around a seed.
    pub fn with_seed(seed: u64) -> Self {
        ExperimentConfig {
            experiment: None,
            seed,
            model: None,
            masses: vec![],
            sources: vec![],
            samples: None,
            output: None,
            tolerances: Tolerances::default(),
            estimator: EstimatorOptions::default(),
            negative_control: None,
            series: None,
            hard_edge: None,
            quadrature: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        for (name, v) in [
            ("sigma", t.sigma),
            ("identity_rel", t.identity_rel),
            ("k2_rel", t.k2_rel),
            ("hard_edge_final", t.hard_edge_final),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        if let Some(m) = &self.model {
            m.validate()?;
        }
        if self.masses.iter().any(|m| !m.is_finite()) {
            return Err(Error::Config("masses must be finite".into()));
        }
        if let Some(he) = &self.hard_edge {
            if he.x_points == 0 || !(he.x_max >= 0.0 && he.x_max.is_finite()) {
                return Err(Error::Config("hard_edge needs x_points >= 1 and x_max >= 0".into()));
            }
        }
        Ok(())
    }

    pub(crate) fn require_model(&self) -> Result<&Model> {
        self.model.as_ref().ok_or_else(|| Error::Config("a model is required".into()))
    }

    pub(crate) fn require_samples(&self) -> Result<usize> {
        self.samples.ok_or_else(|| Error::Config("a sample budget is required".into()))
    }

    pub(crate) fn single_masses(&self) -> Result<Vec<f64>> {
        if self.masses.is_empty() {
            return Err(Error::Config("a mass grid is required".into()));
        }
        Ok(self.masses.clone())
    }

    pub(crate) fn sources(&self) -> Result<Vec<SourceSpec>> {
        if !self.sources.is_empty() {
            return Ok(self.sources.clone());
        }
        Ok(self.single_masses()?.into_iter().map(SourceSpec::single).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        assert!(ExperimentConfig::from_json(r#"{"masses": [1.0]}"#).is_err());
        let c = ExperimentConfig::from_json(r#"{"seed": 3, "masses": [1.0]}"#).unwrap();
        assert_eq!(c.seed, 3);
    }

    #[test]
    fn unknown_fields_and_bad_tolerances_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"seed": 3, "mases": [1.0]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"seed": 3, "tolerances": {"sigma": 0}}"#).is_err());
    }

    #[test]
    fn full_config_parses() {
        let text = r#"{
            "experiment": "hard-edge",
            "seed": 1,
            "model": {"single": {"kind": "jacobi", "beta": 2, "n": 3, "kappa": 1.0}},
            "hard_edge": {"factors": [{"kind": "wishart_laguerre", "nu": 0}], "n_list": [10, 20], "x_points": 5},
            "quadrature": {"nodes": 32, "k2_masses": [[1.0, 2.0]]}
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.experiment, Some(ExperimentKind::HardEdge));
        assert_eq!(c.hard_edge.unwrap().x_grid(), vec![0.0, 2.5, 5.0, 7.5, 10.0]);
        assert_eq!(c.quadrature.unwrap().config.nodes, 32);
    }
}
