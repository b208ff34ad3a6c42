//! `rbo` command line.
//!
//! Exit status is 0 when every check passes, 1 when a run finishes with a
//! failing (or indeterminate) verdict or dies midway, and 2 for usage and
//! configuration errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use rbo_core::experiments::{run_experiment, ExperimentConfig, ExperimentKind, Verdict};
use rbo_core::io::{self, RunManifest};
use rbo_core::Error;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "rbo", version, about = "Regularized Benjamin-Ono experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// TOML experiment config; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV series, summaries and the manifest.
    #[arg(long, default_value = "rbo-out")]
    out: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// RK4 evolution with per-sample diagnostics.
    Simulate {
        #[command(flatten)]
        args: RunArgs,
        /// Override the final time.
        #[arg(long)]
        t_final: Option<f64>,
    },
    /// Picard iteration of the Duhamel map.
    Picard {
        #[command(flatten)]
        args: RunArgs,
    },
    /// Check the weighted linear group bounds at L and 2L.
    VerifyGroup {
        #[command(flatten)]
        args: RunArgs,
        /// Weight exponent (0, 1 or 2).
        #[arg(long)]
        r: Option<f64>,
    },
    /// Run the experiment named in the config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "rbo-out")]
        out: PathBuf,
    },
    /// Print an RBOF1 snapshot as `x,u` CSV.
    SnapshotDump {
        path: PathBuf,
        /// Only print n, L and max |u|.
        #[arg(long)]
        summary: bool,
    },
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e.to_string())
    }
}

fn config_error(e: Error) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parse `argv` (program name first), run, and return the exit status.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_PASS
            };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            EXIT_FAIL
        }
    }
}

fn load(args: &RunArgs, kind: ExperimentKind) -> Result<ExperimentConfig, Failure> {
    let cfg = match &args.config {
        Some(path) => io::parse_config(path).map_err(config_error)?,
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(Failure::Usage(format!(
            "config names experiment \"{}\" but the subcommand runs \"{}\"",
            cfg.experiment.name(),
            kind.name()
        )));
    }
    Ok(cfg)
}

fn dispatch(command: Command) -> Result<i32, Failure> {
    match command {
        Command::Simulate { args, t_final } => {
            let mut cfg = load(&args, ExperimentKind::Simulate)?;
            if let Some(t) = t_final {
                cfg.run.t_final = t;
            }
            execute("simulate", cfg, &args.out)
        }
        Command::Picard { args } => {
            let cfg = load(&args, ExperimentKind::Picard)?;
            execute("picard", cfg, &args.out)
        }
        Command::VerifyGroup { args, r } => {
            let mut cfg = load(&args, ExperimentKind::GroupBounds)?;
            if let Some(r) = r {
                cfg.run.r = r;
            }
            execute("verify-group", cfg, &args.out)
        }
        Command::Experiment { config, out } => {
            let cfg = io::parse_config(&config).map_err(config_error)?;
            execute("experiment", cfg, &out)
        }
        Command::SnapshotDump { path, summary } => snapshot_dump(&path, summary),
    }
}

fn execute(command: &str, cfg: ExperimentConfig, out: &Path) -> Result<i32, Failure> {
    cfg.validate().map_err(config_error)?;
    let start = Instant::now();
    let mut report = run_experiment(&cfg)?;
    let artifacts = report.write(out)?;
    let manifest = RunManifest {
        command: command.to_string(),
        config: Some(cfg),
        artifacts,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        finished_unix_seconds: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    manifest.write(out.join("manifest.json"))?;
    println!("{}", report.summary_line());
    Ok(match report.verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail | Verdict::Indeterminate => EXIT_FAIL,
    })
}

fn snapshot_dump(path: &Path, summary: bool) -> Result<i32, Failure> {
    let field = io::snapshot_load(path)?;
    let grid = field.grid();
    if summary {
        let info = serde_json::json!({
            "n": grid.n(),
            "length": grid.length(),
            "max_abs": field.max_abs(),
        });
        println!("{info}");
        return Ok(EXIT_PASS);
    }
    let mut text = String::from("x,u\n");
    for (j, u) in field.values().iter().enumerate() {
        text.push_str(&io::format_f64(grid.node(j)));
        text.push(',');
        text.push_str(&io::format_f64(*u));
        text.push('\n');
    }
    print!("{text}");
    Ok(EXIT_PASS)
}
