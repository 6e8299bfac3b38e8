//! `acceptrisk` command line.
//!
//! Exit codes: 0 on success, 1 when the input is well formed but the
//! answer is negative (invalid market, arbitrage in `validate`, property
//! violations, solver failure), 2 on usage or parse errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "acceptrisk", version, about = "Capital requirements for finite scenario markets")]
pub struct Cli {
    /// Tolerance for market checks and acceptance constraints.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for every randomised check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest |m| probed when bracketing the requirement.
    #[arg(long = "bracket-max", global = true, default_value_t = 2f64.powi(40))]
    pub bracket_max: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Direct,
    Var,
    Reduction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Axioms,
    Levelsets,
    Domain,
    Degeneracy,
    Induced,
    Variation,
    GoodDeal,
    Topology,
    Acceptance,
    Market,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a market and scan it for arbitrage.
    Validate { market: PathBuf },
    /// Price an eligible payoff.
    Price {
        market: PathBuf,
        /// Payoff, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        payoff: String,
    },
    /// Full arbitrage report.
    Arbitrage { market: PathBuf },
    /// Capital requirement ρ(X).
    Requirement {
        market: PathBuf,
        acceptance: PathBuf,
        /// Position, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
        /// Allow the sampled kernel search for large VaR sets.
        #[arg(long)]
        allow_approximate: bool,
    },
    /// Holdings of the cheapest hedge found for X.
    Portfolio {
        market: PathBuf,
        acceptance: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Classify points against the level set {ρ <= m}.
    Levelset {
        market: PathBuf,
        acceptance: PathBuf,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        m: f64,
        /// Grid `lo:hi:k` on every axis; two or three states only.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Explicit points `a,b;c,d`.
        #[arg(long, allow_hyphen_values = true)]
        points: Option<String>,
    },
    /// Run property checks.
    Properties {
        market: PathBuf,
        acceptance: PathBuf,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Levels for the level-set suite, comma separated.
        #[arg(long, allow_hyphen_values = true, default_value = "-1,0,1")]
        m: String,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = commands::run(&cli);
    let code = match &result {
        Ok(out) => {
            output::emit(&out.body, cli.format);
            out.code
        }
        Err(err) => {
            output::emit(&err.body(), cli.format);
            eprintln!("error: {}", err.message);
            err.code
        }
    };
    ExitCode::from(code)
}
