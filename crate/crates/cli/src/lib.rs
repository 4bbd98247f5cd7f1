//! Front end for `schmidt-core`: argument parsing, dispatch, output formats
//! and the on-disk cache.
//!
//! [`run`] never touches the real stdout or stderr; it returns the bytes and
//! the exit status so tests can compare runs byte for byte.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub mod cache;
mod commands;
pub mod wire;

pub use cache::Cache;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSIFIED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    K,
    I,
    J,
}

#[derive(Clone, Debug, PartialEq, Eq, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Prove the product identity on the (k, i) grid.
    Verify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: usize,
    },
    /// Like verify for a q-family, plus its exponent laws.
    Qverify {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: usize,
    },
    /// Expansion coefficients of f(n,k)^r.
    Coeffs {
        #[arg(long)]
        family: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        /// Solve the expansion directly instead of recursing on S.
        #[arg(long)]
        direct: bool,
    },
    /// The numbers c^(r)_0..=c^(r)_nmax.
    Schmidt {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        nmax: usize,
    },
    /// Recover S(k', *, i') for k' <= k, i' <= i from values of f alone.
    Discover {
        /// A classical family id; `--d N` is short for `--family D:d=N`.
        #[arg(long, required_unless_present = "d", conflicts_with = "d")]
        family: Option<String>,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        i: usize,
    },
    /// Fit a polynomial-coefficient recurrence.
    Guess {
        /// Comma-separated integers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["d", "random_length"])]
        terms: Option<Vec<String>>,
        /// Random integers of this length drawn from `--seed`.
        #[arg(long, conflicts_with = "d")]
        random_length: Option<usize>,
        /// Slice of S for binom(n + d k, k), selected with `--along`.
        #[arg(long, requires = "along")]
        d: Option<u32>,
        /// Index that varies along the slice.
        #[arg(long, value_enum)]
        along: Option<Axis>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        i: Option<usize>,
        /// j minus the varying index (along k or i).
        #[arg(long, allow_hyphen_values = true)]
        j_offset: Option<i64>,
        #[arg(long, default_value_t = 30)]
        length: usize,
        #[arg(long, default_value_t = 2)]
        max_order: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
    },
    /// Integrality scan of S and a^(r) for binom(n + d k, k).
    Scan {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        kmax: usize,
        /// Defaults to kmax.
        #[arg(long)]
        imax: Option<usize>,
        #[arg(long, default_value_t = 3)]
        rmax: usize,
    },
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "schmidt",
    version,
    about = "Exact experiments with Schmidt-type binomial sums"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    pub format: Format,

    /// Worker threads; never changes output.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,

    #[arg(long, global = true, env = "SCHMIDT_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    #[arg(long, global = true)]
    pub no_cache: bool,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Test hook: `k,j,i` adds one to S(k,j,i) in verify commands.
    #[arg(long, global = true, hide = true)]
    pub perturb: Option<String>,
}

impl RunConfig {
    pub fn jobs(&self) -> usize {
        self.jobs
            .map(|j| j as usize)
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    }
}

/// Exit status plus everything the process would print.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub exit: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

impl Outcome {
    fn usage(msg: &str) -> Self {
        Self {
            exit: EXIT_USAGE,
            stdout: Vec::new(),
            stderr: format!("error: {msg}\n\nFor more information, try '--help'.\n").into_bytes(),
        }
    }
}

/// A failure that maps to the usage exit status.
#[derive(Debug)]
pub(crate) struct UsageError(pub String);

impl From<schmidt_core::Error> for UsageError {
    fn from(e: schmidt_core::Error) -> Self {
        UsageError(e.to_string())
    }
}

/// Parses `args` (including the program name) and runs.
pub fn run_from_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match RunConfig::try_parse_from(args) {
        Ok(cfg) => run(&cfg),
        Err(e) => Outcome {
            exit: if e.use_stderr() { EXIT_USAGE } else { EXIT_OK },
            stdout: if e.use_stderr() {
                Vec::new()
            } else {
                e.to_string().into_bytes()
            },
            stderr: if e.use_stderr() {
                e.render().to_string().into_bytes()
            } else {
                Vec::new()
            },
        },
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let cache = match (&cfg.cache_dir, cfg.no_cache) {
        (Some(dir), false) => Cache::open(dir),
        _ => Cache::disabled(),
    };
    run_with_cache(cfg, &cache)
}

/// [`run`] against an explicit cache, so callers can inspect its counters.
pub fn run_with_cache(cfg: &RunConfig, cache: &Cache) -> Outcome {
    let descriptor = match commands::descriptor(cfg) {
        Ok(d) => d,
        Err(UsageError(msg)) => return Outcome::usage(&msg),
    };
    let mut outcome = match cache.get(&descriptor) {
        Some(hit) => Outcome {
            exit: hit.exit,
            stdout: hit.payload,
            stderr: Vec::new(),
        },
        None => match commands::execute(cfg, cache) {
            Ok((exit, stdout)) => {
                cache.put(&descriptor, exit, &stdout);
                Outcome {
                    exit,
                    stdout,
                    stderr: Vec::new(),
                }
            }
            Err(UsageError(msg)) => Outcome::usage(&msg),
        },
    };
    let mut warnings = Vec::new();
    for w in cache.take_warnings() {
        warnings.extend_from_slice(w.as_bytes());
        warnings.push(b'\n');
    }
    warnings.append(&mut outcome.stderr);
    outcome.stderr = warnings;
    outcome
}
