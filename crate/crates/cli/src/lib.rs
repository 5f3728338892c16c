//! Command-line front end: config parsing, catalog, verdicts, artifacts and the acceptance suite.

pub mod acceptance;
pub mod catalog;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod verdict;

use clap::{Args, Parser, Subcommand};
use config::ExperimentConfig;
use error::CliError;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "rough-hj", version, about = "Pathwise Hamilton–Jacobi and conservation-law experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run an experiment config file (`key = value` lines, one `[module]` section).
    Run {
        config: PathBuf,
        /// Overrides the seed of the file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Driving paths: sample | reduce | stats.
    Path(Common),
    /// Legendre transforms and Hopf iterations: legendre | envelope | hopf-iterate.
    Convex(Common),
    /// One-dimensional pathwise solve: exact | scheme.
    Solve(Common),
    /// Characteristics invertibility windows: window.
    Chars(Common),
    /// Finite-difference schemes: rates | gassiat | evolve.
    Scheme(Common),
    /// Semilinear equations by the flow transform: run.
    Semilinear(Common),
    /// Conservation laws with rough fluxes: run | contraction | kinetic.
    Scl(Common),
    /// Print every built-in Hamiltonian, flux, potential, path and initial datum.
    Catalog(Common),
    /// Run the acceptance criteria.
    Acceptance(Common),
}

#[derive(Debug, Args)]
struct Common {
    action: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory, relative to the output root unless absolute.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Parameter as `key=value`; repeatable.
    #[arg(long = "set", short = 's', value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Acceptance suite name.
    #[arg(long)]
    suite: Option<String>,
}

fn config_from(cli: Cli) -> Result<ExperimentConfig, CliError> {
    let (name, c) = match cli.cmd {
        Cmd::Run { config, seed } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::parse(&text)?;
            cfg.seed = seed.or(cfg.seed);
            return Ok(cfg);
        }
        Cmd::Path(c) => ("path", c),
        Cmd::Convex(c) => ("convex", c),
        Cmd::Solve(c) => ("solve", c),
        Cmd::Chars(c) => ("chars", c),
        Cmd::Scheme(c) => ("scheme", c),
        Cmd::Semilinear(c) => ("semilinear", c),
        Cmd::Scl(c) => ("scl", c),
        Cmd::Catalog(c) => ("catalog", c),
        Cmd::Acceptance(c) => ("acceptance", c),
    };
    let mut cfg = ExperimentConfig::new(name, c.action.as_deref().unwrap_or(""));
    cfg.seed = c.seed;
    cfg.out = c.out;
    if let Some(s) = c.suite {
        cfg = cfg.with("suite", s);
    }
    for kv in c.set {
        let (k, v) =
            kv.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {kv:?}")))?;
        cfg = cfg.with(k.trim(), v.trim());
    }
    Ok(cfg)
}

/// Parses `args`, runs, and returns the exit code: 0 when every verdict passes, 1 when one
/// fails, otherwise [`CliError::exit_code`]. Errors go to `err` as one JSON line.
pub fn main_with(args: impl IntoIterator<Item = OsString>, out: &mut impl Write, err: &mut impl Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return 0;
        }
        Err(e) => {
            let _ = writeln!(err, "{}", CliError::Usage(e.to_string().trim().to_string()).to_json());
            return 2;
        }
    };
    let result = config_from(cli).and_then(|cfg| commands::run(&cfg).map(|o| (cfg, o)));
    match result {
        Ok((cfg, o)) => {
            let _ = write!(out, "{}", o.stdout);
            if cfg.command != "catalog" {
                if cfg.command != "acceptance" {
                    for v in &o.manifest.verdicts {
                        let _ = writeln!(out, "{}", v.line());
                    }
                }
                let _ = writeln!(out, "wrote {}", o.dir.join("manifest.json").display());
            }
            if o.manifest.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.exit_code()
        }
    }
}
