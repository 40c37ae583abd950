//! `affine-hecke`: equilibrium-state computations for the affine Hecke system of Q and
//! quadratic fields, plus a checker for finite groupoid models.
//!
//! Exit codes: 0 on success, 1 when a requested check ran and failed, 2 on errors. Errors are
//! printed to stdout as `{"error": {"kind": ..., "message": ...}}`.

mod cache;
mod commands;
mod config;
mod expr;
mod render;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::{CliError, Outcome};
use crate::config::RunConfig;

#[derive(Parser, Debug)]
#[command(name = "affine-hecke", version, about = "Affine Hecke system of Q and quadratic fields")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Squarefree integer selecting the field Q(sqrt(d)); 1 means Q.
    #[arg(short = 'd', long = "field", global = true, default_value_t = 1, allow_negative_numbers = true)]
    d: i128,
    /// Level m of the finite-level computations; defaults to the least level the input needs.
    #[arg(long, global = true)]
    level: Option<i128>,
    /// Inverse temperatures, comma separated; rationals like 3/2 are kept exact.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Vec<String>,
    /// Norm truncation bound for series.
    #[arg(long, global = true, default_value_t = 10_000)]
    bound: i128,
    /// Emit JSON instead of the human-readable table.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for persisted enumeration results.
    #[arg(long, global = true, env = cache::ENV_VAR)]
    cache_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Units, discriminant and narrow class group.
    Field,
    /// Minimal-norm integral ideals in each narrow class.
    MinimalIdeals,
    /// Norm-one fractional ideals relating minimal ideals of one class.
    Szero,
    /// Shape of the boundary algebra at a finite level.
    BoundaryAlgebra,
    /// Truncated Dedekind zeta with a tail bound.
    Zeta {
        /// Restrict to one narrow class.
        #[arg(long)]
        class: Option<usize>,
    },
    /// Products, relations and actions in the Hecke algebra.
    #[command(subcommand)]
    Hecke(HeckeCommand),
    /// Ground and KMS state values and their symmetry checks.
    #[command(subcommand)]
    State(StateCommand),
    /// Validate a groupoid file and check the state it carries.
    GroupoidCheck { file: PathBuf },
}

#[derive(Subcommand, Debug)]
pub enum HeckeCommand {
    /// Product of the given expressions, e.g. `mu(2) e(1/2) mustar(2)`.
    Mul { words: Vec<String> },
    /// Verify the presentation relations by enumeration.
    Relations {
        #[arg(long, default_value_t = 6)]
        norm_bound: i128,
        #[arg(long, default_value_t = 8)]
        denominator_bound: i128,
        /// Check only this many random pairs `(r, s)`.
        #[arg(long)]
        sample: Option<usize>,
    },
    /// Apply a symmetry or the time evolution to an expression.
    Act {
        expr: String,
        /// `tau(u)` for a unit `u` modulo the level.
        #[arg(long, group = "action", allow_negative_numbers = true)]
        tau: Option<String>,
        /// `sigma_t` at real time `t`.
        #[arg(long, group = "action", allow_negative_numbers = true)]
        sigma_t: Option<f64>,
        /// Analytic continuation `sigma_{i beta}` at rational `beta`.
        #[arg(long, group = "action", allow_negative_numbers = true)]
        sigma_beta: Option<String>,
        /// The arithmetic action `beta(u)` on cyclotomic coefficients.
        #[arg(long, group = "action", allow_negative_numbers = true)]
        galois: Option<String>,
    },
}

#[derive(Args, Debug, Clone)]
pub struct PointArgs {
    /// Narrow class index of the cell.
    #[arg(long, default_value_t = 0)]
    pub class: usize,
    /// Index of the minimal ideal within its class.
    #[arg(long, default_value_t = 0)]
    pub cell: usize,
    /// Unit part of the boundary point modulo the level.
    #[arg(long, default_value = "1", allow_negative_numbers = true)]
    pub unit: String,
}

#[derive(Subcommand, Debug)]
pub enum StateCommand {
    /// Extremal ground state at a boundary cell.
    Ground {
        expr: String,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Extremal KMS state at each requested beta.
    Kms {
        expr: String,
        #[command(flatten)]
        point: PointArgs,
    },
    /// Galois compatibility of a ground state on an arithmetic element.
    Fabulous {
        expr: String,
        #[command(flatten)]
        point: PointArgs,
        /// The unit acting.
        #[arg(long, allow_negative_numbers = true)]
        u: String,
        /// Replace the element by its average over the arithmetic action first.
        #[arg(long)]
        average: bool,
    },
    /// `r(u) chi(z) = chi(N(u) z)` for the character used by the states.
    Weil {
        #[arg(long, allow_negative_numbers = true)]
        u: String,
        #[arg(long, allow_negative_numbers = true)]
        z: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = RunConfig::from_args(&cli.global).and_then(|cfg| Ok((commands::run(&cfg, &cli.command)?, cfg.json)));
    match result {
        Ok((Outcome { value, passed }, json)) => {
            let text = if json {
                format!("{}\n", serde_json::to_string_pretty(&value).expect("serializable"))
            } else {
                render::human(&value)
            };
            emit(&text);
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            let out = serde_json::json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            emit(&format!("{}\n", serde_json::to_string_pretty(&out).expect("serializable")));
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout; a closed pipe is not an error for a report printer.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

impl From<affine_hecke::Error> for CliError {
    fn from(e: affine_hecke::Error) -> Self {
        CliError::Core(e)
    }
}
