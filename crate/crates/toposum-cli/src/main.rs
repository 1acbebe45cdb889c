//! `toposum`: lattice sums on quadratic-form trees, verified from the
//! shell. Every subcommand emits one JSON report (stdout, or the file
//! named by `--json`); `export` instead passes the tree itself through.
//!
//! Exit codes: 0 when every requested check passed, 1 when a check missed
//! its bar or a computation gave out, 2 for unusable input.

mod commands;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use toposum::Error;

#[derive(Parser)]
#[command(
    name = "toposum",
    version,
    about = "Exact lattice sums on trees of binary quadratic forms",
    after_help = "Reports are JSON with reals as decimal strings tagged by \
                  their precision in bits. Runs are deterministic for fixed \
                  inputs, seed, and precision."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Working precision in bits for real arithmetic
    #[arg(long, global = true, default_value_t = 128, value_name = "BITS")]
    prec: usize,

    /// Target tolerance; each subcommand states its own default
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,

    /// Tree-walk node budget
    #[arg(long, global = true, default_value_t = toposum::DEFAULT_NODE_BUDGET, value_name = "NODES")]
    budget: u64,

    /// Seed for the random star generator
    #[arg(long, global = true, default_value_t = 0x746f_706f, value_name = "S")]
    seed: u64,

    /// Write the JSON output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
}

/// Three comma-separated integers, as in `--root 1,0,1`.
#[derive(Clone, Copy)]
struct Triple(i64, i64, i64);

impl FromStr for Triple {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(format!("expected three comma-separated integers, got `{s}`"));
        }
        let mut v = [0i64; 3];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .parse()
                .map_err(|e| format!("bad integer `{part}`: {e}"))?;
        }
        Ok(Triple(v[0], v[1], v[2]))
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{},{},{}", self.0, self.1, self.2)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check the exact and angle identities on random vertex stars
    Identities {
        /// Stars for the exact identities; angle checks use 200 per sign
        #[arg(long, default_value_t = 1000)]
        count: u32,
    },
    /// Sum 1/(r s t) over the half-tree above a root edge
    SumRst {
        /// Root edge p,h,q
        #[arg(long, allow_hyphen_values = true)]
        root: Triple,
        /// Exact telescoped partial over this many levels instead of the
        /// adaptive sum
        #[arg(long, value_name = "N")]
        depth: Option<u32>,
    },
    /// Sum 1/(h f g) over the half-tree above a root edge
    SumEfg {
        /// Root edge p,h,q
        #[arg(long, allow_hyphen_values = true)]
        root: Triple,
        /// Exact telescoped partial over this many levels instead of the
        /// adaptive sum
        #[arg(long, value_name = "N")]
        depth: Option<u32>,
    },
    /// Evaluate one series from the named catalog
    Series {
        /// Catalog id, e.g. hurwitz_quarter, mu_family(1/2), hata(10000)
        id: String,
    },
    /// River period, fundamental unit, and both river sums
    River {
        /// Positive nonsquare discriminant
        #[arg(allow_negative_numbers = true)]
        d: i64,
    },
    /// Reduced forms, class number, and the lattice double sum
    ClassNumber {
        /// Negative fundamental discriminant
        #[arg(allow_negative_numbers = true)]
        d: i64,
        /// Form a,b,c for the whole-tree check (default: principal form)
        #[arg(long, allow_hyphen_values = true)]
        form: Option<Triple>,
    },
    /// Lake-to-lake walks and the residue identity for discriminant m^2
    SquareD {
        /// Square root of the discriminant, at least 2
        m: i64,
    },
    /// Emit a truncated tree as JSON (stdout or --json) and optionally DOT
    Export {
        /// Root edge p,h,q
        #[arg(long, allow_hyphen_values = true)]
        root: Triple,
        /// Levels to materialize
        #[arg(long, default_value_t = 3, value_name = "N")]
        depth: u32,
        /// Write Graphviz DOT here
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Run the whole acceptance checklist
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(passed) => {
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InvalidInput(_)
                | Error::UnknownSeries(_)
                | Error::Domain(_)
                | Error::NotIndefinite(_)
                | Error::PeriodNotFound(_) => 2,
                _ => 1,
            })
        }
    }
}
