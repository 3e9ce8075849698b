//! `kerrkit`: batch front end to the kerrkit library.
//!
//! Each subcommand reads an optional JSON config, runs one family of checks
//! and writes CSV tables plus `summary.json` into `--out`. Exit status is 0
//! when every assertion passes, 1 when one fails (or the run errors) and 2
//! for a bad config.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig, SchemaError};
use report::{write_summary, Artifacts, Report};

#[derive(Parser)]
#[command(name = "kerrkit", version, about = "Kerr geometry, geodesic, causal and thermal checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration; omitted sections take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for CSV tables and summary.json.
    #[arg(long, global = true, default_value = "kerrkit-out")]
    out: PathBuf,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Offset into the quasi-random sequences.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Spin parameter a.
    #[arg(long = "a", global = true, allow_hyphen_values = true)]
    spin: Option<f64>,
    /// Mass M.
    #[arg(long = "M", global = true)]
    mass: Option<f64>,
    /// Level T of every configured surface.
    #[arg(long = "T", global = true, allow_hyphen_values = true)]
    level: Option<f64>,
    /// Main sample or grid size of the command.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Surface gravity for the exponential identity.
    #[arg(long, global = true)]
    kappa: Option<f64>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Chart transitions as isometries and metric determinants.
    Charts,
    /// Integrate and classify null geodesics.
    Geodesic,
    /// Spherical photon orbits: locus and Killing-field checks.
    Orbits,
    /// Gradient and crossing checks of the candidate Cauchy surfaces.
    Cauchy,
    /// Half-line projector routes and the exponential identity.
    Thermal,
    /// Spin sweeps for the small-spin thresholds.
    Sweep,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Charts => "charts",
            Command::Geodesic => "geodesic",
            Command::Orbits => "orbits",
            Command::Cauchy => "cauchy",
            Command::Thermal => "thermal",
            Command::Sweep => "sweep",
        }
    }
}

fn load(cli: &Cli) -> Result<RunConfig, SchemaError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let o = Overrides {
        mass: cli.mass,
        spin: cli.spin,
        level: cli.level,
        n: cli.n,
        seed: cli.seed,
        kappa: cli.kappa,
    };
    cfg.apply(cli.command.name(), &o);
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, cfg: &RunConfig, report: &mut Report) -> anyhow::Result<()> {
    let out = Artifacts::new(&cli.out)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j.max(1));
    }
    pool.build()?.install(|| match cli.command {
        Command::Charts => commands::charts::run(cfg, &out, report),
        Command::Geodesic => commands::geodesic::run(cfg, &out, report),
        Command::Orbits => commands::orbits::run(cfg, &out, report),
        Command::Cauchy => commands::cauchy::run(cfg, &out, report),
        Command::Thermal => commands::thermal::run(cfg, &out, report),
        Command::Sweep => commands::sweep::run(cfg, &out, report),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let mut report = Report::default();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("kerrkit {name}: config error: {e}");
            let _ = write_summary(&cli.out, name, "schema_error", None, &report, Some(&e.to_string()));
            return ExitCode::from(2);
        }
    };
    let (status, code, error) = match execute(&cli, &cfg, &mut report) {
        Err(e) => {
            eprintln!("kerrkit {name}: error: {e:#}");
            ("error", 1, Some(format!("{e:#}")))
        }
        Ok(()) => match report.first_failure() {
            Some(a) => {
                eprintln!("kerrkit {name}: assertion failed: {} ({}): {:e} vs limit {:e}", a.name, a.record, a.value, a.limit);
                ("failed", 1, None)
            }
            None => ("passed", 0, None),
        },
    };
    if let Err(e) = write_summary(&cli.out, name, status, Some(&cfg), &report, error.as_deref()) {
        eprintln!("kerrkit {name}: cannot write summary: {e:#}");
        return ExitCode::from(1);
    }
    let passed = report.assertions.iter().filter(|a| a.passed).count();
    println!("{name}: {status} ({passed}/{} assertions)", report.assertions.len());
    ExitCode::from(code)
}
