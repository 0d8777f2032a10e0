//! Experiment runner behind the CLI: Monte Carlo against series, hard-edge
//! scans and quadrature identities, with JSON configs and CSV/JSON reports.

mod config;
mod report;

pub use config::{ExperimentConfig, ExperimentKind, HardEdgeSection, NegativeControl, QuadratureSection, Tolerances};
pub use report::{read_records_csv, write_atomic, Provenance, Record, Report, Verdict};

use num_complex::Complex64;

use crate::algebra::{eigenvalues_hermitian, gram, DysonIndex};
use crate::analytic::{
    cbe2_quadrature, christoffel_darboux, contour_quadrature_k1, hard_edge_scan, map_beta14, product_series,
    product_series_abs_scaled, special::ln_factorial, FactorWeight, SeriesParams,
};
use crate::charpoly::{estimate_z_curve_with, ratio_constancy_test_with, SourceSpec};
use crate::ensembles::{Model, ModelSampler};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Runs the experiment named by `kind` (or by the config when `None`).
pub fn run(cfg: &ExperimentConfig, kind: Option<ExperimentKind>) -> Result<Report> {
    let kind = kind
        .or(cfg.experiment)
        .ok_or_else(|| Error::Config("no experiment kind given".into()))?;
    match kind {
        ExperimentKind::Sample => run_sample(cfg),
        ExperimentKind::Estimate => run_estimate(cfg),
        ExperimentKind::Analytic => run_analytic(cfg),
        ExperimentKind::Compare => run_compare(cfg),
        ExperimentKind::HardEdge => run_hard_edge(cfg),
        ExperimentKind::Quadrature => run_quadrature_identity(cfg),
    }
}

fn mass_label(src: &SourceSpec) -> String {
    src.masses()
        .iter()
        .map(|m| m.re.to_string())
        .collect::<Vec<_>>()
        .join(";")
}

/// Gram spectra of `samples` draws, one record per eigenvalue.
pub fn run_sample(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let model = cfg.require_model()?;
    let samples = cfg.require_samples()?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut sampler = ModelSampler::new(model, &cfg.estimator.mcmc, Some(&cfg.estimator.mcmc), &mut rng)?;
    let mut records = Vec::new();
    for s in 0..samples {
        let spectrum = eigenvalues_hermitian(&gram(&sampler.draw(&mut rng)?))?;
        for (i, &v) in spectrum.values.iter().enumerate() {
            records.push(Record {
                label: format!("sample {s}"),
                x: i.to_string(),
                value: v,
                stderr: None,
                reference: None,
                n_samples: None,
                seed: Some(cfg.seed),
            });
        }
    }
    Ok(Report::new(ExperimentKind::Sample, cfg, records, vec![]))
}

/// Monte Carlo estimates on the configured source grid.
pub fn run_estimate(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let model = cfg.require_model()?;
    let sources = cfg.sources()?;
    let samples = cfg.require_samples()?;
    let curve = estimate_z_curve_with(model, &sources, samples, cfg.seed, &cfg.estimator)?;
    let records = sources
        .iter()
        .zip(&curve.points)
        .map(|(src, e)| Record {
            label: "estimate".into(),
            x: mass_label(src),
            value: e.value,
            stderr: Some(e.stderr),
            reference: None,
            n_samples: Some(e.n_samples),
            seed: Some(e.seed),
        })
        .collect();
    Ok(Report::new(ExperimentKind::Estimate, cfg, records, vec![]))
}

/// Series parameters and mapped masses for the model's β = 2 dual, with
/// any negative-control perturbation applied.
fn dual_series(cfg: &ExperimentConfig, model: &Model, masses: &[f64]) -> Result<(SeriesParams, Vec<f64>)> {
    let base = SeriesParams::from_model(model);
    let beta = model.beta();
    let (mut params, mapped) = if beta == DysonIndex::Complex {
        (base, masses.to_vec())
    } else {
        if model.factors().len() > 1 {
            return Err(Error::Unsupported(format!("series comparison for {beta} products")));
        }
        let mut params = None;
        let mut out = Vec::with_capacity(masses.len());
        for &m in masses {
            let (p, mm) = map_beta14(beta, &base, &[m])?;
            params = Some(p);
            out.push(mm);
        }
        (params.unwrap_or(base), out)
    };
    if let Some(ctl) = &cfg.negative_control {
        for f in &mut params.factors {
            let nu = f.nu as i64 + ctl.nu_shift;
            if nu < 0 {
                return Err(Error::Config(format!("nu_shift {} makes nu negative", ctl.nu_shift)));
            }
            f.nu = nu as usize;
        }
    }
    Ok((params, mapped))
}

/// Series values for the model (or explicit series parameters) on the mass grid.
pub fn run_analytic(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let masses = cfg.single_masses()?;
    let (params, mapped) = match (&cfg.series, &cfg.model) {
        (Some(p), _) => (p.clone(), masses.clone()),
        (None, Some(model)) => dual_series(cfg, model, &masses)?,
        (None, None) => return Err(Error::Config("analytic needs a model or series parameters".into())),
    };
    params.validate()?;
    let records = masses
        .iter()
        .zip(&mapped)
        .map(|(&m, &mm)| Record {
            label: "series".into(),
            x: m.to_string(),
            value: product_series(&params, mm),
            stderr: None,
            reference: None,
            n_samples: None,
            seed: None,
        })
        .collect();
    Ok(Report::new(ExperimentKind::Analytic, cfg, records, vec![]))
}

/// Monte Carlo curve against the matching series, judged by the ratio test.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let model = cfg.require_model()?;
    let masses = cfg.single_masses()?;
    let samples = cfg.require_samples()?;
    let (params, mapped) = dual_series(cfg, model, &masses)?;
    let sources: Vec<SourceSpec> = masses.iter().map(|&m| SourceSpec::single(m)).collect();
    let curve = estimate_z_curve_with(model, &sources, samples, cfg.seed, &cfg.estimator)?;
    let analytic: Vec<f64> = mapped.iter().map(|&m| product_series(&params, m)).collect();
    let test = ratio_constancy_test_with(&curve.points, &analytic, cfg.tolerances.sigma)?;
    let records = masses
        .iter()
        .zip(&curve.points)
        .zip(&analytic)
        .map(|((&m, e), &a)| Record {
            label: "mc".into(),
            x: m.to_string(),
            value: e.value,
            stderr: Some(e.stderr),
            reference: Some(a),
            n_samples: Some(e.n_samples),
            seed: Some(e.seed),
        })
        .collect();
    let verdict = Verdict {
        name: "ratio_constancy".into(),
        pass: test.pass,
        statistic: test.max_deviation_sigmas,
        threshold: test.threshold,
        detail: format!("mean ratio {:e}", test.mean_ratio),
    };
    Ok(Report::new(ExperimentKind::Compare, cfg, records, vec![verdict]))
}

/// Hard-edge scan: monotone decrease of the sup-distance over `n` and the
/// final distance below tolerance.
pub fn run_hard_edge(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let he = cfg
        .hard_edge
        .as_ref()
        .ok_or_else(|| Error::Config("hard-edge experiment needs a hard_edge section".into()))?;
    let x_grid = he.x_grid();
    let scan = hard_edge_scan(&he.spec, &he.n_list, &x_grid)?;
    let mut records = Vec::new();
    for (n, curve) in scan.n_list.iter().zip(&scan.curves) {
        for ((x, v), l) in x_grid.iter().zip(curve).zip(&scan.limit) {
            records.push(Record {
                label: format!("n={n}"),
                x: x.to_string(),
                value: *v,
                stderr: None,
                reference: Some(*l),
                n_samples: None,
                seed: None,
            });
        }
    }
    for (n, d) in scan.n_list.iter().zip(&scan.distances) {
        records.push(Record {
            label: "distance".into(),
            x: n.to_string(),
            value: *d,
            stderr: None,
            reference: None,
            n_samples: None,
            seed: None,
        });
    }
    let mut verdicts = Vec::new();
    if scan.distances.len() > 1 {
        let worst = scan
            .distances
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max);
        verdicts.push(Verdict {
            name: "monotone_decrease".into(),
            pass: worst < 0.0,
            statistic: worst,
            threshold: 0.0,
            detail: "largest step in sup-distance between consecutive n".into(),
        });
    }
    let last = *scan.distances.last().unwrap_or(&0.0);
    verdicts.push(Verdict {
        name: "final_distance".into(),
        pass: last < cfg.tolerances.hard_edge_final,
        statistic: last,
        threshold: cfg.tolerances.hard_edge_final,
        detail: format!("sup-distance at n = {}", scan.n_list.last().copied().unwrap_or(0)),
    });
    Ok(Report::new(ExperimentKind::HardEdge, cfg, records, verdicts))
}

/// Largest deviation of `values` from `c · series`, in units of
/// `|c| · Σ_j |term_j|` (the magnitude scale of the series at each mass).
fn scaled_deviation(values: &[Complex64], series: &[f64], scales: &[f64], c: f64) -> f64 {
    values
        .iter()
        .zip(series)
        .zip(scales)
        .map(|((v, s), sc)| (*v - c * s).norm() / (c.abs() * sc))
        .fold(0.0, f64::max)
}

/// Contour quadrature against the series (exact identity for the Gaussian
/// weight, proportionality otherwise) and, when masses pairs are given,
/// the k = 2 circular integral against Christoffel-Darboux.
pub fn run_quadrature_identity(cfg: &ExperimentConfig) -> Result<Report> {
    cfg.validate()?;
    let model = cfg.require_model()?;
    let [spec] = model.factors() else {
        return Err(Error::Unsupported("quadrature identities for products".into()));
    };
    let params = SeriesParams::from_model(model);
    let weight = params.factors[0].weight;
    if !matches!(weight, FactorWeight::Gaussian) && spec.gamma_scale <= 1.0 {
        return Err(Error::Config(format!(
            "contour quadrature for {:?} needs gamma_scale > 1, got {}",
            spec.kind, spec.gamma_scale
        )));
    }
    if model.beta() != DysonIndex::Complex {
        return Err(Error::Unsupported(format!("quadrature identities for {}", model.beta())));
    }
    let section = cfg.quadrature.clone().unwrap_or_default();
    let masses = cfg.single_masses()?;
    let contour = masses
        .iter()
        .map(|&m| contour_quadrature_k1(&params, m, &section.config))
        .collect::<Result<Vec<_>>>()?;
    let series: Vec<f64> = masses.iter().map(|&m| product_series(&params, m)).collect();
    let scales: Vec<f64> = masses.iter().map(|&m| product_series_abs_scaled(&params, m).value()).collect();
    let (c, name) = match weight {
        FactorWeight::Gaussian => {
            let nu = params.factors[0].nu as i32;
            (ln_factorial(params.n).exp() * params.gamma_sq_total.powi(-nu), "contour_identity")
        }
        _ => {
            // least squares in units of each point's magnitude scale, so that
            // masses near a zero of the polynomial do not drag the constant
            let (num, den) = contour
                .iter()
                .zip(&series)
                .zip(&scales)
                .fold((0.0, 0.0), |(n, d), ((v, s), sc)| (n + v.re * s / (sc * sc), d + s * s / (sc * sc)));
            (num / den, "contour_proportionality")
        }
    };
    let dev = scaled_deviation(&contour, &series, &scales, c);
    let mut records: Vec<Record> = masses
        .iter()
        .zip(&contour)
        .zip(&series)
        .map(|((&m, v), &s)| Record {
            label: "contour".into(),
            x: m.to_string(),
            value: v.re,
            stderr: None,
            reference: Some(c * s),
            n_samples: None,
            seed: None,
        })
        .collect();
    let mut verdicts = vec![Verdict {
        name: name.into(),
        pass: dev <= cfg.tolerances.identity_rel,
        statistic: dev,
        threshold: cfg.tolerances.identity_rel,
        detail: format!("constant {c:e}, {} nodes", section.config.nodes),
    }];
    if !section.k2_masses.is_empty() {
        let mut ratios = Vec::new();
        for &(m1, m2) in &section.k2_masses {
            let q = cbe2_quadrature(model.beta(), &params, (m1, m2), &section.config)?;
            let cd = christoffel_darboux(&params, m1, m2)?;
            ratios.push(q.re / cd);
            records.push(Record {
                label: "cbe2".into(),
                x: format!("{m1};{m2}"),
                value: q.re,
                stderr: None,
                reference: Some(cd),
                n_samples: None,
                seed: None,
            });
        }
        let dev = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
        verdicts.push(Verdict {
            name: "k2_christoffel_darboux".into(),
            pass: dev <= cfg.tolerances.k2_rel,
            statistic: dev,
            threshold: cfg.tolerances.k2_rel,
            detail: format!("ratio {:e}", ratios[0]),
        });
    }
    Ok(Report::new(ExperimentKind::Quadrature, cfg, records, verdicts))
}
