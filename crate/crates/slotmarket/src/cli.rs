//! Command-line interface.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse or validation
//! error, 3 infeasible market, 4 instance too large for the oracles.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use slotmarket_core::horizon::{
    run_horizon, ClearingLog, CostUpdateHook, DelayPropagation, HorizonConfig, HorizonError, OnInfeasible,
};
use slotmarket_core::oracle::{enumerate_optimal_schedules, min_equilibrium_prices_oracle};
use slotmarket_core::{clear, validate_instance, Error, Instance, Money, PriceRule, PriceVector, Schedule, Violation};

use crate::report::{summary_csv, SolveReport};
use crate::scenario::{load_instance, ScenarioError};
use crate::verify::verify_instance;
use crate::windowed::load_windowed;

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_TOO_LARGE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "slotmarket", version, about = "Landing-slot market clearing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Prices {
    Raw,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Hook {
    None,
    /// Scale the costs of flights whose feeder landed late.
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfeasibleMode {
    Abort,
    Skip,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Clear one airport market and print schedule, prices and costs.
    Solve {
        scenario: PathBuf,
        #[arg(long, value_enum, default_value = "min")]
        prices: Prices,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-check a small market against the brute-force oracles.
    Verify {
        scenario: PathBuf,
        /// Corrupt the minimum prices before checking them.
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Print brute-force optima and minimum prices of a small market.
    Oracle { scenario: PathBuf },
    /// Run a multi-airport rolling-horizon scenario.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum, default_value = "none")]
        hook: Hook,
        /// Cost multiplier used by `--hook delay`.
        #[arg(long, default_value_t = 2)]
        factor: Money,
        #[arg(long, value_enum, default_value = "abort")]
        on_infeasible: InfeasibleMode,
    },
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => EXIT_INFEASIBLE,
        Error::InvalidInstance(_) | Error::InvalidCostReport { .. } => EXIT_INPUT,
        Error::TooLarge(_) => EXIT_TOO_LARGE,
        _ => EXIT_FAILED,
    }
}

fn load(path: &Path, err: &mut dyn Write) -> Result<Instance, u8> {
    let inst = load_instance(path).map_err(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INPUT
    })?;
    let report = validate_instance(&inst);
    let fatal: Vec<&Violation> =
        report.violations.iter().filter(|v| !matches!(v, Violation::CapacityDeficit { .. })).collect();
    if !fatal.is_empty() {
        for v in fatal {
            let _ = writeln!(err, "invalid: {v}");
        }
        return Err(EXIT_INPUT);
    }
    Ok(inst)
}

fn fail(err: &mut dyn Write, e: &Error) -> u8 {
    let _ = writeln!(err, "error: {e}");
    error_code(e)
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match &cli.command {
        Command::Solve { scenario, prices, format, output } => {
            solve(scenario, *prices, *format, output.as_deref(), out, err)
        }
        Command::Verify { scenario, tamper } => verify(scenario, *tamper, out, err),
        Command::Oracle { scenario } => oracle(scenario, out, err),
        Command::Simulate { scenario, out_dir, hook, factor, on_infeasible } => {
            simulate(scenario, out_dir, *hook, *factor, *on_infeasible, out, err)
        }
    };
    result.unwrap_or_else(|code| code)
}

fn emit(text: &str, output: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), u8> {
    let written = match output {
        Some(path) => fs::write(path, text),
        None => out.write_all(text.as_bytes()),
    };
    written.map_err(|e| {
        let _ = writeln!(err, "error: cannot write output: {e}");
        EXIT_FAILED
    })
}

fn solve(
    path: &Path,
    prices: Prices,
    format: Format,
    output: Option<&Path>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, u8> {
    let inst = load(path, err)?;
    let rule = match prices {
        Prices::Raw => PriceRule::Raw,
        Prices::Min => PriceRule::Min,
    };
    let outcome = clear(&inst, rule).map_err(|e| fail(err, &e))?;
    let report = SolveReport::new(&outcome, rule);
    let text = match format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report.to_csv(&inst),
    };
    emit(&text, output, out, err)?;
    Ok(EXIT_OK)
}

fn verify(path: &Path, tamper: bool, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, u8> {
    let inst = load(path, err)?;
    let checks = verify_instance(&inst, tamper).map_err(|e| fail(err, &e))?;
    let mut failed = false;
    for c in &checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{tag} {:<20} {}", c.name, c.detail);
        failed |= !c.passed;
    }
    Ok(if failed { EXIT_FAILED } else { EXIT_OK })
}

#[derive(Serialize)]
struct OracleReport {
    objective: Money,
    optimal_schedules: Vec<Schedule>,
    min_prices: PriceVector,
}

fn oracle(path: &Path, out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, u8> {
    let inst = load(path, err)?;
    let (objective, optimal_schedules) = enumerate_optimal_schedules(&inst).map_err(|e| fail(err, &e))?;
    let min_prices = min_equilibrium_prices_oracle(&inst, &optimal_schedules[0]).map_err(|e| fail(err, &e))?;
    let report = OracleReport { objective, optimal_schedules, min_prices };
    emit(&(serde_json::to_string_pretty(&report).unwrap() + "\n"), None, out, err)?;
    Ok(EXIT_OK)
}

fn file_stem(airport: &str) -> String {
    airport.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' }).collect()
}

/// Writes `log.json`, one JSON file per round under `rounds/`, and
/// `summary.csv`.
pub fn write_log(dir: &Path, log: &ClearingLog) -> std::io::Result<()> {
    let rounds = dir.join("rounds");
    fs::create_dir_all(&rounds)?;
    for r in &log.rounds {
        let name = format!("{}-{:03}.json", file_stem(r.airport.as_str()), r.round);
        fs::write(rounds.join(name), serde_json::to_string_pretty(r).unwrap() + "\n")?;
    }
    fs::write(dir.join("log.json"), serde_json::to_string_pretty(log).unwrap() + "\n")?;
    fs::write(dir.join("summary.csv"), summary_csv(log))
}

fn simulate(
    path: &Path,
    dir: &Path,
    hook: Hook,
    factor: Money,
    on_infeasible: InfeasibleMode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, u8> {
    let (scn, feeders) = load_windowed(path).map_err(|e: ScenarioError| {
        let _ = writeln!(err, "error: {e}");
        EXIT_INPUT
    })?;
    let mut delay = DelayPropagation { feeders, factor };
    let hook: Option<&mut dyn CostUpdateHook> = match hook {
        Hook::None => None,
        Hook::Delay => Some(&mut delay),
    };
    let config = HorizonConfig {
        on_infeasible: match on_infeasible {
            InfeasibleMode::Abort => OnInfeasible::Abort,
            InfeasibleMode::Skip => OnInfeasible::Skip,
        },
    };
    let (log, code) = match run_horizon(&scn, hook, config) {
        Ok(log) => (log, EXIT_OK),
        Err(HorizonError::RoundFailed { partial, error, airport, round, timestamp }) => {
            let _ = writeln!(err, "error: {airport} round {round} (t={timestamp}): {error}");
            (partial, error_code(&error))
        }
        Err(e @ (HorizonError::InvalidScenario(_) | HorizonError::Revision { .. })) => {
            let _ = writeln!(err, "error: {e}");
            return Err(EXIT_INPUT);
        }
    };
    write_log(dir, &log).map_err(|e| {
        let _ = writeln!(err, "error: cannot write log: {e}");
        EXIT_FAILED
    })?;
    let _ = writeln!(out, "{} rounds logged to {}", log.rounds.len(), dir.display());
    Ok(code)
}
