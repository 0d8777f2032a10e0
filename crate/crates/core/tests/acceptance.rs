//! Acceptance criteria AC-1 to AC-10. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

mod common;

use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::Rng;
use statrs::distribution::{Beta, ContinuousCDF};

use rmtprod::algebra::{collapse_kramers, eigenvalues_hermitian, gram, DysonIndex};
use rmtprod::analytic::{
    cbe2_quadrature, hard_edge_scan, jacobi_series, HardEdgeFactor, HardEdgeSpec, QuadratureConfig, SeriesParams,
};
use rmtprod::charpoly::{estimate_z, estimate_z_curve, SourceSpec};
use rmtprod::ensembles::{sample_wishart_laguerre, EnsembleSampler, EnsembleSpec, McmcConfig, Model, ProductSpec};
use rmtprod::harness::{run_compare, run_quadrature_identity, ExperimentConfig, QuadratureSection, Report};
use rmtprod::rng::rng_from_seed;

type Outcome = Result<String, String>;

fn verdicts(report: &Report) -> String {
    report
        .verdicts
        .iter()
        .map(|v| format!("{} {:.3e} (<= {:.1e})", v.name, v.statistic, v.threshold))
        .collect::<Vec<_>>()
        .join(", ")
}

fn compare(model: Model, masses: &[f64], samples: usize, seed: u64) -> Result<Report, String> {
    let mut cfg = ExperimentConfig::with_seed(seed);
    cfg.model = Some(model);
    cfg.masses = masses.to_vec();
    cfg.samples = Some(samples);
    run_compare(&cfg).map_err(|e| e.to_string())
}

fn single(spec: rmtprod::Result<EnsembleSpec>) -> Model {
    Model::Single(spec.expect("valid spec"))
}

fn ac1() -> Outcome {
    let start = Instant::now();
    let model = single(EnsembleSpec::wishart(DysonIndex::Complex, 4, 1, 1.0));
    let r = compare(model, &[0.5, 1.0, 2.0, 4.0], 200_000, 101)?;
    let msg = format!("{} in {:.1}s", verdicts(&r), start.elapsed().as_secs_f64());
    if r.passed() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac2() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for (beta, seed) in [(DysonIndex::Real, 201), (DysonIndex::Quaternion, 202)] {
        let model = single(EnsembleSpec::wishart(beta, 3, 0, 1.0));
        let r = compare(model, &[0.5, 1.0, 2.0, 4.0], 200_000, seed)?;
        ok &= r.passed();
        lines.push(format!("{beta}: {}", verdicts(&r)));
    }
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac3() -> Outcome {
    let mut rng = rng_from_seed(301);
    let (mut worst_pair, mut worst_det) = (0.0f64, 0.0f64);
    for i in 0..100 {
        let n = 1 + i % 16;
        let nu = rng.random_range(0..4);
        let spec = EnsembleSpec::wishart(DysonIndex::Quaternion, n, nu, 1.0).unwrap();
        let h = gram(&sample_wishart_laguerre(&spec, &mut rng).unwrap());
        let spectrum = eigenvalues_hermitian(&h).map_err(|e| e.to_string())?;
        for p in spectrum.values.chunks(2) {
            worst_pair = worst_pair.max((p[1] - p[0]).abs() / p[0].abs().max(p[1].abs()));
        }
        let collapsed = collapse_kramers(&spectrum, 1e-8).map_err(|e| e.to_string())?;
        let qdet: f64 = collapsed.values.iter().product();
        let det = h.data().clone().determinant();
        worst_det = worst_det.max((qdet * qdet - det.re).abs() / det.norm());
    }
    let msg = format!("pairing {worst_pair:.2e} (<= 1e-8), qdet^2 vs det {worst_det:.2e} (<= 1e-10)");
    if worst_pair <= 1e-8 && worst_det <= 1e-10 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac4() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [1, 4, 8] {
        let nu = 1;
        let specs = [
            ("WL", EnsembleSpec::wishart(DysonIndex::Complex, n, nu, 1.0)),
            (
                "CL",
                EnsembleSpec::cauchy_lorentz(DysonIndex::Complex, n, nu, 3.0, (2 * n + nu) as f64 + 5.5),
            ),
            ("J", EnsembleSpec::jacobi(DysonIndex::Complex, n, nu, 3.0, 1.5)),
        ];
        for (name, spec) in specs {
            let mut cfg = ExperimentConfig::with_seed(0);
            cfg.model = Some(single(spec));
            cfg.masses = vec![0.0, 1.0, 2.5, 5.0, 8.0];
            let mut q = QuadratureSection::default();
            q.config.nodes = 256;
            cfg.quadrature = Some(q);
            let r = run_quadrature_identity(&cfg).map_err(|e| e.to_string())?;
            ok &= r.passed();
            let worst = r.verdicts.iter().map(|v| v.statistic).fold(0.0, f64::max);
            lines.push(format!("{name} n={n} {worst:.1e}"));
        }
    }
    let msg = format!("scaled deviation (<= 1e-10): {}", lines.join(", "));
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac5() -> Outcome {
    let grid = [-0.5, 0.15, 0.45, 0.85, 1.5];
    let mut worst = 0.0f64;
    for n in 1..=6 {
        for kappa in [0.0, 1.5] {
            for nu in [0usize, 2] {
                let ratios: Vec<f64> = grid
                    .iter()
                    .map(|&m| {
                        jacobi_series(n, nu, kappa, 1.0, m) / common::jacobi_recurrence(n, kappa, nu as f64, 2.0 * m - 1.0)
                    })
                    .collect();
                for r in &ratios {
                    worst = worst.max((r / ratios[0] - 1.0).abs());
                }
            }
        }
    }
    let msg = format!("max ratio spread {worst:.2e} (<= 1e-8)");
    if worst <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac6() -> Outcome {
    let wl = EnsembleSpec::wishart(DysonIndex::Complex, 3, 1, 1.0).unwrap();
    let jac = EnsembleSpec::jacobi(DysonIndex::Complex, 3, 1, 1.0, 2.0).unwrap();
    let product = ProductSpec::new(vec![wl, jac]).unwrap();
    let masses = [0.1, 0.3, 0.6, 1.0];
    let r = compare(Model::Product(product.clone()), &masses, 200_000, 601)?;
    let grid: Vec<SourceSpec> = masses.iter().map(|&m| SourceSpec::single(m)).collect();
    let a = estimate_z_curve(&Model::Product(product.clone()), &grid, 200_000, 602).map_err(|e| e.to_string())?;
    let b = estimate_z_curve(&Model::Product(product.reversed()), &grid, 200_000, 603).map_err(|e| e.to_string())?;
    let swap = a
        .points
        .iter()
        .zip(&b.points)
        .map(|(x, y)| (x.value - y.value).abs() / x.stderr.hypot(y.stderr))
        .fold(0.0, f64::max);
    let msg = format!("{}, order swap {swap:.2} sigma (< 3)", verdicts(&r));
    if r.passed() && swap < 3.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac7() -> Outcome {
    let n_list = [50, 100, 200, 400];
    let x_grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.05).collect();
    let decreasing = |d: &[f64]| d.windows(2).all(|w| w[1] < w[0]);
    let mut lines = Vec::new();
    let mut ok = true;
    for nu in [0, 1] {
        let spec = HardEdgeSpec {
            factors: vec![HardEdgeFactor::WishartLaguerre { nu }],
            gamma_sq: 1.0,
        };
        let d = hard_edge_scan(&spec, &n_list, &x_grid).map_err(|e| e.to_string())?.distances;
        ok &= decreasing(&d) && d[3] < 1e-2;
        lines.push(format!("WL nu={nu}: {:?}", d.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()));
    }
    let spec = HardEdgeSpec {
        factors: vec![HardEdgeFactor::WishartLaguerre { nu: 1 }, HardEdgeFactor::WishartLaguerre { nu: 1 }],
        gamma_sq: 1.0,
    };
    let d = hard_edge_scan(&spec, &n_list, &x_grid).map_err(|e| e.to_string())?.distances;
    ok &= decreasing(&d);
    lines.push(format!("WLxWL nu=1: {:?}", d.iter().map(|v| format!("{v:.2e}")).collect::<Vec<_>>()));
    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac8() -> Outcome {
    let p = SeriesParams::laguerre(2, 0, 1.0);
    let cfg = QuadratureConfig::default();
    let pairs = [(1.0, 2.0), (0.5, 3.0)];
    let ratios = pairs
        .iter()
        .map(|&(m1, m2)| {
            let q = cbe2_quadrature(DysonIndex::Complex, &p, (m1, m2), &cfg).map_err(|e| e.to_string())?;
            Ok(q.re / common::laguerre_christoffel_darboux(2, 0, 1.0, m1, m2))
        })
        .collect::<Result<Vec<f64>, String>>()?;
    let dev = (ratios[1] / ratios[0] - 1.0).abs();
    let msg = format!("ratios {:?}, spread {dev:.2e} (<= 1e-8)", ratios);
    if dev <= 1e-8 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac9() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;

    let wl = single(EnsembleSpec::wishart(DysonIndex::Complex, 1, 0, 1.0));
    let e = estimate_z(&wl, &SourceSpec::single(0.0), 100_000, 901).map_err(|e| e.to_string())?;
    let z = (e.value - 1.0) / e.stderr;
    ok &= z.abs() <= 3.0;
    lines.push(format!("WL mean {:.4} ({z:+.2} sigma)", e.value));

    let cl = EnsembleSpec::cauchy_lorentz(DysonIndex::Complex, 1, 0, 1.0, 3.0).unwrap();
    let mut rng = rng_from_seed(902);
    let mcmc = McmcConfig::default();
    let mut sampler = EnsembleSampler::new(&cl, &mcmc, None, &mut rng).map_err(|e| e.to_string())?;
    let draws = (0..200_000)
        .map(|_| {
            let w = sampler.draw(&mut rng)?;
            Ok(eigenvalues_hermitian(&gram(&w))?.values[0])
        })
        .collect::<rmtprod::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    let (mean, se) = common::batch_means(&draws, 50);
    let oracle = common::cauchy_lorentz_scalar_mean(0.0, 3.0, 1.0);
    let z = (mean - oracle) / se;
    ok &= z.abs() <= 3.0;
    lines.push(format!("CL mean {mean:.4} vs {oracle:.4} ({z:+.2} sigma)"));

    let mut worst_p = 1.0f64;
    for (beta, nu, kappa, seed) in [
        (DysonIndex::Complex, 0, 1.0, 903),
        (DysonIndex::Complex, 1, 2.0, 904),
        (DysonIndex::Real, 0, 0.5, 905),
        (DysonIndex::Quaternion, 1, 1.5, 906),
    ] {
        let spec = EnsembleSpec::jacobi(beta, 1, nu, 1.0, kappa).unwrap();
        let mut rng = rng_from_seed(seed);
        let mut sampler = EnsembleSampler::new(&spec, &mcmc, None, &mut rng).map_err(|e| e.to_string())?;
        let mut xs = (0..20_000)
            .map(|_| Ok(eigenvalues_hermitian(&gram(&sampler.draw(&mut rng)?))?.values[0]))
            .collect::<rmtprod::Result<Vec<f64>>>()
            .map_err(|e| e.to_string())?;
        // λ ~ Beta((1+ν)d/2, κ_c + 1), d real components, κ_c the exponent per eigenvalue
        let d = [1.0, 2.0, 4.0][[DysonIndex::Real, DysonIndex::Complex, DysonIndex::Quaternion]
            .iter()
            .position(|b| *b == beta)
            .unwrap()];
        let kc = if beta == DysonIndex::Quaternion { 2.0 * kappa } else { kappa };
        let law = Beta::new((1.0 + nu as f64) * d / 2.0, kc + 1.0).unwrap();
        let stat = common::ks_statistic(&mut xs, |x| law.cdf(x));
        worst_p = worst_p.min(common::kolmogorov_p_value(stat, xs.len()));
    }
    ok &= worst_p > 0.01;
    lines.push(format!("Jacobi KS min p {worst_p:.3} (> 0.01)"));

    let msg = lines.join("; ");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn ac10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let configs = [
        (
            "estimate",
            r#"{"seed": 1001, "samples": 20000,
                "model": {"product": {"factors": [
                    {"kind": "wishart_laguerre", "beta": 4, "n": 2, "nu": 1},
                    {"kind": "jacobi", "beta": 4, "n": 2, "kappa": 0.5}]}},
                "masses": [0.25, 1.0, 3.0]}"#,
        ),
        (
            "compare",
            r#"{"seed": 1002, "samples": 20000,
                "model": {"single": {"kind": "wishart_laguerre", "beta": 1, "n": 3}},
                "masses": [0.5, 2.0]}"#,
        ),
        (
            "sample",
            r#"{"seed": 1003, "samples": 50,
                "estimator": {"mcmc": {"burn_in": 500}},
                "model": {"single": {"kind": "cauchy_lorentz", "beta": 2, "n": 2, "mu": 8.0}}}"#,
        ),
    ];
    let mut compared = 0;
    for (cmd, text) in configs {
        let cfg = dir.path().join(format!("{cmd}.json"));
        std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{cmd}-{run}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_rmtprod"))
                .args([cmd, "--config"])
                .arg(&cfg)
                .arg("--out")
                .arg(&out)
                .status()
                .map_err(|e| e.to_string())?;
            if status.code() == Some(2) {
                return Err(format!("{cmd} exited with an error"));
            }
            outputs.push(std::fs::read(&out).map_err(|e| e.to_string())?);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return Err(format!("{cmd}: payloads differ"));
        }
        compared += 1;
    }
    Ok(format!("{compared} CLI configs reproduced byte-identical CSV"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC-1", ac1),
        ("AC-2", ac2),
        ("AC-3", ac3),
        ("AC-4", ac4),
        ("AC-5", ac5),
        ("AC-6", ac6),
        ("AC-7", ac7),
        ("AC-8", ac8),
        ("AC-9", ac9),
        ("AC-10", ac10),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(msg) => println!("{name} PASS: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("{name} FAIL: {msg}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
