use clap::{Args, Parser, Subcommand};
use schiffer_cli::config::{load, RunSettings, Tolerances};
use schiffer_cli::{report, run, Experiment};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "schiffer", version, about = "Numerical experiments for Schiffer and jump operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pointwise operator identities and negative controls.
    Identities(Opts),
    /// Singular values, left inverse and surjectivity of T.
    Isomorphism(Opts),
    /// Jump problem: closed forms, solver, uniqueness, inverse.
    Jump(Opts),
    /// Density sweeps and the annulus counterexample.
    Density(Opts),
    /// Restriction / Schiffer adjointness.
    Adjoint(Opts),
    /// Every suite.
    All(Opts),
}

#[derive(Args)]
struct Opts {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: $SCHIFFER_OUT or ./schiffer_out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the truncation order.
    #[arg(long)]
    truncation: Option<usize>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Replace every tolerance (negative controls keep their defaults).
    #[arg(long)]
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, opts) = match cli.command {
        Command::Identities(o) => (Experiment::Identities, o),
        Command::Isomorphism(o) => (Experiment::Isomorphism, o),
        Command::Jump(o) => (Experiment::Jump, o),
        Command::Density(o) => (Experiment::Density, o),
        Command::Adjoint(o) => (Experiment::Adjoint, o),
        Command::All(o) => (Experiment::All, o),
    };
    let (mut file, bytes) = match load(&opts.config) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("invalid config: {e}");
            return ExitCode::from(3);
        }
    };
    if let Some(n) = opts.truncation {
        file.truncation = n;
    }
    if let Some(t) = opts.tol {
        file.tolerances = Tolerances::uniform(t);
    }
    let violations = file.violations();
    if !violations.is_empty() {
        eprintln!("invalid config:");
        for v in &violations {
            eprintln!("  {v}");
        }
        return ExitCode::from(3);
    }
    let set = RunSettings { truncation: file.truncation, disc: file.quadrature, tol: file.tolerances, seed: opts.seed };
    let rep = run(&file, &bytes, experiment, &set);
    let dir = opts.out.or_else(|| std::env::var_os("SCHIFFER_OUT").map(PathBuf::from)).unwrap_or_else(|| PathBuf::from("schiffer_out"));
    match report::emit(&rep, &dir) {
        Ok(path) => println!("report: {}", path.display()),
        Err(e) => {
            eprintln!("cannot write report: {e}");
            return ExitCode::from(2);
        }
    }
    let failed: Vec<_> = rep.checks.iter().filter(|c| !c.pass).collect();
    println!("{} checks, {} failed", rep.checks.len(), failed.len());
    for c in &failed {
        println!("  FAIL {} [{}]: {:e} vs {:e}{}", c.name, c.anchor, c.measured, c.tolerance, c.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default());
    }
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}
