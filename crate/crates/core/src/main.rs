use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rmtprod::harness::{self, write_atomic, ExperimentConfig, ExperimentKind, Report};

#[derive(Parser)]
#[command(name = "rmtprod", version, about = "Random matrix products and characteristic polynomial averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw matrices and print their Gram spectra
    Sample(Args),
    /// Monte Carlo averages on a mass grid
    Estimate(Args),
    /// Series values on a mass grid
    Analytic(Args),
    /// Monte Carlo against the series, with a ratio-constancy verdict
    Compare(Args),
    /// Hard-edge convergence scan
    HardEdge(Args),
    /// Contour and k = 2 quadrature identities
    Quadrature(Args),
}

#[derive(clap::Args)]
struct Args {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config sample budget
    #[arg(long)]
    samples: Option<usize>,
    /// Output path (default: config `output`, else stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn execute(kind: ExperimentKind, args: &Args) -> rmtprod::Result<Report> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(samples) = args.samples {
        cfg.samples = Some(samples);
    }
    let report = harness::run(&cfg, Some(kind))?;
    let payload = match args.format {
        Format::Csv => report.to_csv()?,
        Format::Json => report.to_json()?,
    };
    match args.out.as_ref().or(cfg.output.as_ref()) {
        Some(path) => write_atomic(path, &payload)?,
        None => std::io::stdout().write_all(&payload)?,
    }
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Sample(a) => (ExperimentKind::Sample, a),
        Command::Estimate(a) => (ExperimentKind::Estimate, a),
        Command::Analytic(a) => (ExperimentKind::Analytic, a),
        Command::Compare(a) => (ExperimentKind::Compare, a),
        Command::HardEdge(a) => (ExperimentKind::HardEdge, a),
        Command::Quadrature(a) => (ExperimentKind::Quadrature, a),
    };
    match execute(kind, args) {
        Ok(report) => {
            for v in &report.verdicts {
                eprintln!(
                    "{} {}: statistic {:e}, threshold {:e} ({})",
                    if v.pass { "PASS" } else { "FAIL" },
                    v.name,
                    v.statistic,
                    v.threshold,
                    v.detail
                );
            }
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
