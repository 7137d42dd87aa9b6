//! Command-line surface. Precedence: flags, then `GCDSEQ_*` environment
//! variables, then the defaults shown in `--help`.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::render::Format;

#[derive(Debug, Parser)]
#[command(name = "gcdseq", version, about = "Explore a(n) = a(n-1) + gcd(n, a(n-1))")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Index n1 of the initial state.
    #[arg(long, global = true, env = "GCDSEQ_SEED_N", default_value_t = 1)]
    pub seed_n: u64,
    /// Value a(n1) of the initial state.
    #[arg(long, global = true, env = "GCDSEQ_SEED_A", default_value = "7")]
    pub seed_a: String,
    /// Last index to compute.
    #[arg(long, global = true, env = "GCDSEQ_N_MAX")]
    pub n_max: Option<String>,
    /// Number of nontrivial-gcd events to produce.
    #[arg(long, global = true, env = "GCDSEQ_EVENTS")]
    pub events: Option<u64>,
    /// Step through every index, or jump between nontrivial gcds.
    #[arg(long, global = true, env = "GCDSEQ_MODE", value_enum, default_value_t = Mode::Shortcut)]
    pub mode: Mode,
    #[arg(long, global = true, env = "GCDSEQ_FORMAT", value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// fixed: 128-bit, overflow is an error (exit 3); unbounded: arbitrary precision.
    #[arg(long, global = true, env = "GCDSEQ_INTEGERS", value_enum, default_value_t = Integers::Fixed)]
    pub integers: Integers,
    /// Print ratios as reduced fractions instead of 6-digit decimals.
    #[arg(long, global = true)]
    pub exact: bool,
    /// Worker threads for seed scans [default: available cores].
    #[arg(long, global = true, env = "GCDSEQ_WORKERS")]
    pub workers: Option<usize>,
    /// Seed for the randomized factoring methods (affects speed, never results).
    #[arg(long, global = true, env = "GCDSEQ_RHO_SEED")]
    pub rho_seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Naive,
    Shortcut,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Integers {
    Fixed,
    Unbounded,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of n, Δ(n), g(n), a(n), a(n)/n up to --n-max (events only in shortcut mode).
    Evolve,
    /// The nontrivial gcds, one per event (default 20 events).
    Primes,
    /// The first --count differences a(n) - a(n-1).
    Diffs {
        #[arg(long, default_value_t = 20)]
        count: u64,
    },
    /// CSV series for plotting.
    Plotdata {
        #[arg(long, value_enum)]
        kind: PlotKind,
    },
    /// Run one of the trajectory analyses.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotKind {
    /// (j, n_j) for the j-th nontrivial gcd.
    Clusters,
    /// (n, a(n)/n) at every index.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Analysis {
    Transience,
    Coverage,
    Classes,
    Persistence,
    Bounds,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long, value_enum)]
    pub analysis: Analysis,
    /// Range of a(1) values, "LO..HI" inclusive (classes, bounds).
    #[arg(long, env = "GCDSEQ_SEED_RANGE", value_parser = parse_range)]
    pub seed_range: Option<RangeInclusive<u64>>,
    /// Horizon for class merging [default: 8388608].
    #[arg(long, env = "GCDSEQ_N_LIMIT")]
    pub n_limit: Option<String>,
    /// Seed indices for persistence, "LO..HI".
    #[arg(long, value_parser = parse_range, default_value = "1..10000")]
    pub n1_range: RangeInclusive<u64>,
    /// Ratios for persistence, "LO..HI".
    #[arg(long, value_parser = parse_range, default_value = "4..20")]
    pub r_range: RangeInclusive<u64>,
    /// Event budget for transience.
    #[arg(long, default_value_t = 100_000)]
    pub budget: u64,
    /// Resumable state file for the class scan.
    #[arg(long, env = "GCDSEQ_CHECKPOINT")]
    pub checkpoint: Option<PathBuf>,
    /// Report progress on stderr.
    #[arg(long)]
    pub progress: bool,
}

/// "LO..HI" (inclusive) or a single value.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let parse = |t: &str| {
        t.trim()
            .replace('_', "")
            .parse::<u64>()
            .map_err(|e| format!("{t:?}: {e}"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.trim_start_matches('='))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if hi < lo {
        return Err(format!("empty range {s:?}"));
    }
    Ok(lo..=hi)
}

/// Decimal, `2^k`, or `10^k`.
pub fn parse_big(s: &str) -> Result<num_bigint::BigInt, String> {
    let s = s.trim().replace('_', "");
    if let Some((base, exp)) = s.split_once('^') {
        let base: num_bigint::BigInt = base.parse().map_err(|e| format!("{s:?}: {e}"))?;
        let exp: u32 = exp.parse().map_err(|e| format!("{s:?}: {e}"))?;
        return Ok(base.pow(exp));
    }
    s.parse().map_err(|e| format!("{s:?}: {e}"))
}
