//! Command-line front end: reads a scenario config, runs it and writes a report.

mod config;
mod scenarios;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::{ConfigError, ScenarioConfig};
use scenarios::{Failure, Outcome};

#[derive(Parser)]
#[command(name = "korteweg", version, about = "Resolvent solvers and symbol checks for a linearized Korteweg fluid")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for the report and any field files.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads.
    #[arg(long, global = true, env = "KORTEWEG_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check admissibility and print the derived constants.
    Validate,
    /// Lower-bound scans, the empirical non-degeneracy angle and optional certificates.
    Scan,
    /// Solve the whole-space, reduced half-space or full problem.
    Solve,
    /// Estimate R-bounds of the solution operator families.
    Rbound,
    /// Contraction ratios of the pressure map against |lambda|.
    Probe,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
    let Some(path) = &cli.config else {
        return fail(2, "--config is required");
    };
    let mut cfg = match ScenarioConfig::load(path) {
        Ok(c) => c,
        Err(ConfigError::Io(m)) => return fail(4, &m),
        Err(ConfigError::Invalid(m)) => return fail(2, &m),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let result = match cli.command {
        Command::Validate => scenarios::validate_scenario(&cfg),
        Command::Scan => scenarios::scan_scenario(&cfg),
        Command::Solve => scenarios::solve_scenario(&cfg, cli.out.as_deref()),
        Command::Rbound => scenarios::rbound_scenario(&cfg),
        Command::Probe => scenarios::probe_scenario(&cfg),
    };
    match result {
        Ok(outcome) => match emit(&outcome, cli.format, cli.out.as_deref()) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(4, &e.to_string()),
        },
        Err(Failure::Validation(m)) => fail(2, &m),
        Err(Failure::Numerical(m)) => fail(3, &m),
        Err(Failure::Io(m)) => fail(4, &m),
    }
}

fn render(outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(&outcome.report).expect("report serializes") + "\n",
        Format::Csv => outcome.csv.iter().map(|row| row.join(",") + "\n").collect(),
    }
}

fn emit(outcome: &Outcome, format: Format, out: Option<&std::path::Path>) -> std::io::Result<()> {
    let text = render(outcome, format);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let name = if format == Format::Json { "report.json" } else { "report.csv" };
        std::fs::write(dir.join(name), &text)?;
    }
    print!("{text}");
    Ok(())
}
