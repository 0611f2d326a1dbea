//! Binary entry point: gathers the config (defaults, then file, then
//! flags), dispatches the subcommand, prints the report to stdout, and
//! maps verdicts to the exit code. Timing goes to stderr so stdout stays
//! deterministic.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use hahnlog_cli::commands;
use hahnlog_cli::config::RunConfig;
use hahnlog_cli::report::Format;

#[derive(Parser)]
#[command(
    name = "hahnlog",
    version,
    about = "Computable logarithms and exponentials on Hahn series over a label chain"
)]
struct Cli {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Comma-separated chain labels, e.g. t0,t1,t2.
    #[arg(long, global = true)]
    tau: Option<String>,

    /// Tower depth (stages 0..=depth).
    #[arg(long, global = true)]
    depth: Option<String>,

    /// Taylor truncation order for unit logs and exponentials.
    #[arg(long, global = true)]
    order: Option<String>,

    /// Sample count per suite check.
    #[arg(long, global = true)]
    samples: Option<String>,

    /// Seed for the deterministic sampler.
    #[arg(long, global = true)]
    seed: Option<String>,

    /// Residue mode: monic or interval.
    #[arg(long, global = true)]
    mode: Option<String>,

    /// Offset window as lo..hi, e.g. -3..3.
    #[arg(long, global = true, allow_hyphen_values = true)]
    window: Option<String>,

    /// Interval width as n/d or an integer.
    #[arg(long, global = true)]
    width: Option<String>,

    /// Report format: text or kv.
    #[arg(long, global = true, default_value = "text")]
    format: String,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the chain, contraction, and tower; report what was built.
    Build,
    /// Evaluate an expression in the ambient field.
    Eval {
        /// Expression, e.g. "log(t^{-e(t0,0)})" or "(1 + t^{e(t0,0)})^2".
        expr: String,
    },
    /// Run a named check suite.
    Check {
        /// Suite name; an unknown name lists the catalog.
        suite: String,
    },
    /// Report the rank structures of the chain.
    Rank,
    /// Report the stage ladder and its descent counts.
    Tower,
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = Cli::parse();
    let started = std::time::Instant::now();

    let mut config = RunConfig::default();
    if let Some(path) = &cli.config {
        if let Err(e) = config.load_file(path) {
            eprintln!("error: {e}");
            return 2;
        }
    }
    let overrides: [(&str, &Option<String>); 8] = [
        ("tau", &cli.tau),
        ("depth", &cli.depth),
        ("order", &cli.order),
        ("samples", &cli.samples),
        ("seed", &cli.seed),
        ("mode", &cli.mode),
        ("window", &cli.window),
        ("width", &cli.width),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            if let Err(e) = config.set(key, v) {
                eprintln!("error: --{key}: {e}");
                return 2;
            }
        }
    }
    let format = match cli.format.as_str() {
        "text" => Format::Text,
        "kv" => Format::KeyValue,
        other => {
            eprintln!("error: unknown format {other:?}; use text or kv");
            return 2;
        }
    };

    let result = match &cli.command {
        Command::Build => commands::cmd_build(&config),
        Command::Eval { expr } => commands::cmd_eval(&config, expr),
        Command::Check { suite } => commands::cmd_check(&config, suite),
        Command::Rank => commands::cmd_rank(&config),
        Command::Tower => commands::cmd_tower(&config),
    };
    match result {
        Ok(report) => {
            print!("{}", report.render(format));
            eprintln!("elapsed: {:.3?}", started.elapsed());
            if report.passed() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
