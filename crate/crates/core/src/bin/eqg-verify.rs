use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use elliptic_center::algebra::coeffs::PROBE_POINTS;
use elliptic_center::algebra::{LatticePoint, ProbeBrackets, TabulatedBrackets};
use elliptic_center::qdet::calibrate;
use elliptic_center::sampling::{random_weight, SampleStream};
use elliptic_center::verify::{check_names, run, RunConfig, EXIT_CONFIG, EXIT_FAIL};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Numerical verification of the elliptic quantum group identities.
#[derive(Debug, Parser)]
#[command(name = "eqg-verify", version)]
struct Cli {
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Rank n (2, 3 or 4).
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Samples per check.
    #[arg(long)]
    samples: Option<usize>,
    /// Residual tolerance for the identity checks.
    #[arg(long)]
    tol: Option<f64>,
    /// Check to run; repeatable. Defaults to all.
    #[arg(long = "check", value_name = "NAME")]
    checks: Vec<String>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the fundamental coefficient brackets as a JSON table.
    #[arg(long, value_name = "PATH")]
    export_brackets: Option<PathBuf>,
    /// Print the known check names and exit.
    #[arg(long)]
    list_checks: bool,
}

fn config(cli: &Cli) -> elliptic_center::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.n = n;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.samples = s;
    }
    if let Some(t) = cli.tol {
        cfg.tol_residual = t;
    }
    if !cli.checks.is_empty() {
        cfg.checks = cli.checks.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn export_brackets(cfg: &RunConfig, path: &PathBuf) -> elliptic_center::Result<()> {
    let params = cfg.params()?;
    let (rep, _) = calibrate(&params)?;
    let br = ProbeBrackets { probe: &rep, z_ref: PROBE_POINTS[0] };
    let stream = SampleStream::new(cfg.seed, "bracket-export");
    let mut points = Vec::new();
    for s in 0..cfg.samples as u64 {
        let a = random_weight(&mut stream.rng(s, 0), params.n);
        points.extend((0..params.n).map(|h| LatticePoint::new(a.clone(), a.shifted(h))));
    }
    let table = TabulatedBrackets::tabulate(&br, &points)?;
    std::fs::write(path, table.to_json()?)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if cli.list_checks {
        let mut out = std::io::stdout().lock();
        for name in check_names() {
            if writeln!(out, "{name}").is_err() {
                break;
            }
        }
        return ExitCode::SUCCESS;
    }
    let cfg = match config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("eqg-verify: invalid configuration: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("eqg-verify: {e}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    if let Some(path) = &cli.export_brackets {
        if let Err(e) = export_brackets(&cfg, path) {
            eprintln!("eqg-verify: bracket export failed: {e}");
            return ExitCode::from(EXIT_FAIL as u8);
        }
    }
    let body = match cli.format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    };
    match &cli.out {
        Some(p) => {
            if let Err(e) = std::fs::write(p, &body) {
                eprintln!("eqg-verify: cannot write {}: {e}", p.display());
                return ExitCode::from(EXIT_FAIL as u8);
            }
        }
        None => {
            // a closed pipe is not a verification failure
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
        }
    }
    if report.summary.failed > 0 {
        if let Some(c) = report.checks.iter().find(|c| c.name == "calibration" && c.verdict.name() == "fail") {
            eprintln!("eqg-verify: calibration failed: {}", c.notes.join("; "));
        }
    }
    ExitCode::from(report.exit_status() as u8)
}
