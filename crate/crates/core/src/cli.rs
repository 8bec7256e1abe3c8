//! Command-line front end.
//!
//! Four subcommands: `product-sample` (Dirichlet × Haar Monte Carlo),
//! `enumerate` (exact lattice enumeration with metric weights),
//! `random-search` (randomized disc search), and `grid-info` (lattice
//! introspection). Every run emits a versioned JSON report whose only
//! run-to-run variation for a fixed config and seed is the metadata block.

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::enumerate::{disc_grid, simplex_count, EnumerationSpec};
use crate::estimate::run::{
    rat_string, run_disc_search, run_enumeration, run_product_sample, EstimateOptions,
};
use crate::estimate::{self, finalize, McReport, Meta, Report, Totals};
use crate::linalg::exact::parse_rational;
use crate::linalg::BipartiteDims;
use crate::measures::{DirichletParams, DiscSearchSpec};
use crate::metrics::MetricKind;
use crate::states::ppt_is_conclusive;
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "sepprob",
    version,
    about = "Separability probabilities of bipartite quantum states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Monte Carlo over the product measure: Dirichlet eigenvalues, Haar frame
    ProductSample(ProductSampleArgs),
    /// Exact lattice enumeration with monotone-metric weights
    Enumerate(EnumerateArgs),
    /// Randomized search for density matrices in the raw entry space
    RandomSearch(RandomSearchArgs),
    /// Grid and simplex lattice facts
    GridInfo(GridInfoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    pub workers: Option<usize>,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; csv applies to binned tables only
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct ProductSampleArgs {
    /// Bipartite dimensions, e.g. 2x2, 2x3, 3x3
    #[arg(long)]
    pub dims: String,
    /// Dirichlet parameter: a scalar (symmetric) or N comma-separated values
    #[arg(long, default_value = "1")]
    pub nu: String,
    #[arg(long)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Bipartite dimensions, e.g. 2x2 or 2x3
    #[arg(long)]
    pub dims: String,
    /// Simplex resolution for trial diagonals
    #[arg(long)]
    pub n1: u32,
    /// Grid resolution for trial off-diagonals (spacing 1/n2)
    #[arg(long)]
    pub n2: u32,
    /// Reject states with determinant below this exact rational, e.g. 1/2560000
    #[arg(long, default_value = "0")]
    pub det_threshold: String,
    /// Comma-separated metric list: min,kmb,max,identric
    #[arg(long, default_value = "min,kmb,max")]
    pub metrics: String,
    /// Exploit the complex-conjugation symmetry (halves the search tree)
    #[arg(long)]
    pub use_symmetry: bool,
    /// Add a participation-ratio histogram to the report
    #[arg(long)]
    pub bins: bool,
    /// Histogram bin width
    #[arg(long, default_value_t = 0.05)]
    pub bin_width: f64,
    /// Merge partial results in a pinned order (bit-identical at any worker count)
    #[arg(long)]
    pub deterministic_reduce: bool,
    /// Checkpoint file, written after every completed batch of simplex partitions
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Abort with a checkpoint once this many states have been emitted
    #[arg(long)]
    pub max_states: Option<u64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct RandomSearchArgs {
    /// Bipartite dimensions, e.g. 2x2
    #[arg(long)]
    pub dims: String,
    /// Off-diagonal disc radius in (0, 1/2], e.g. 1/4 or 0.25
    #[arg(long)]
    pub radius: String,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Comma-separated metric list: min,kmb,max,identric
    #[arg(long, default_value = "min,kmb,max")]
    pub metrics: String,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct GridInfoArgs {
    /// Grid resolution to describe
    #[arg(long)]
    pub n2: Option<u32>,
    /// Simplex resolution to describe
    #[arg(long)]
    pub n1: Option<u32>,
    /// Number of simplex parts (defaults to dims' total dimension, else 4)
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Bipartite dimensions, e.g. 2x2
    #[arg(long)]
    pub dims: Option<String>,
}

/// Machine-readable process exit codes.
pub mod exit_code {
    pub const OK: i32 = 0;
    pub const INVALID_CONFIG: i32 = 2;
    pub const BUDGET_EXCEEDED: i32 = 3;
    pub const RUNTIME: i32 = 4;
}

pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_)
        | Error::NonPositive { .. }
        | Error::CheckpointMismatch { .. } => exit_code::INVALID_CONFIG,
        Error::BudgetExceeded { .. } => exit_code::BUDGET_EXCEEDED,
        _ => exit_code::RUNTIME,
    }
}

/// Stable error identifier for the stderr JSON line.
pub fn error_code_name(err: &Error) -> &'static str {
    match err {
        Error::InvalidConfig(_) => "invalid_config",
        Error::NonPositive { .. } => "invalid_config",
        Error::CheckpointMismatch { .. } => "checkpoint_mismatch",
        Error::BudgetExceeded { .. } => "budget_exceeded",
        Error::EmptyTally => "empty_tally",
        Error::Io(_) => "io_error",
        Error::Serde(_) => "serialization_error",
        _ => "runtime_error",
    }
}

pub fn parse_dims(s: &str) -> Result<BipartiteDims> {
    let (a, b) = s
        .trim()
        .split_once(['x', 'X'])
        .ok_or_else(|| Error::InvalidConfig(format!("dims must look like 2x2, got '{s}'")))?;
    let bad = |_| Error::InvalidConfig(format!("dims must look like 2x2, got '{s}'"));
    let da: usize = a.trim().parse().map_err(bad)?;
    let db: usize = b.trim().parse().map_err(bad)?;
    if da < 2 || db < 2 || da * db > 9 {
        return Err(Error::InvalidConfig(format!(
            "supported systems have factors >= 2 and total dimension <= 9, got {da}x{db}"
        )));
    }
    Ok(BipartiteDims::new(da, db))
}

fn parse_nu(s: &str, n: usize) -> Result<DirichletParams> {
    let values: Vec<f64> = s
        .split(',')
        .map(|part| parse_rational(part).map(|r| *r.numer() as f64 / *r.denom() as f64))
        .collect::<Result<Vec<_>>>()?;
    match values.len() {
        1 => DirichletParams::symmetric(values[0], n),
        len if len == n => DirichletParams::new(values),
        len => Err(Error::InvalidConfig(format!(
            "nu must be a scalar or {n} values, got {len}"
        ))),
    }
}

fn parse_metrics(s: &str) -> Result<Vec<MetricKind>> {
    let kinds = s.split(',').map(MetricKind::parse).collect::<Result<Vec<_>>>()?;
    if kinds.is_empty() {
        return Err(Error::InvalidConfig("metric list is empty".into()));
    }
    Ok(kinds)
}

fn semantics(dims: BipartiteDims) -> String {
    if ppt_is_conclusive(dims) { "ppt-iff-separable" } else { "ppt-upper-bound" }.to_string()
}

fn meta(started: Instant) -> Meta {
    Meta {
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0),
        runtime_seconds: started.elapsed().as_secs_f64(),
        workers: rayon::current_num_threads(),
        package_version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            if w == 0 {
                return Err(Error::InvalidConfig("worker count must be positive".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot build worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

pub fn run_product_sample_cmd(args: &ProductSampleArgs) -> Result<Report> {
    let started = Instant::now();
    let dims = parse_dims(&args.dims)?;
    let params = parse_nu(&args.nu, dims.n())?;
    let (samples, separable) = in_pool(args.common.workers, || {
        run_product_sample(&params, dims, args.samples, args.seed)
    })??;
    let (p_hat, stderr) = estimate::unweighted_estimate(samples, separable);
    Ok(Report {
        schema_version: estimate::SCHEMA_VERSION,
        command: "product-sample".into(),
        config: json!({
            "dims": dims.to_string(),
            "nu": params.components(),
            "samples": args.samples,
            "seed": args.seed,
        }),
        separability_semantics: semantics(dims),
        totals: Totals {
            states: samples,
            separable,
            skipped_nonfinite_weight: 0,
            trials: None,
            enumeration: None,
        },
        metrics: Vec::new(),
        mc: Some(McReport { samples, separable, p_hat, stderr }),
        bins: None,
        meta: meta(started),
    })
}

pub fn run_enumerate_cmd(args: &EnumerateArgs) -> Result<Report> {
    let started = Instant::now();
    let dims = parse_dims(&args.dims)?;
    let threshold = parse_rational(&args.det_threshold)?;
    let kinds = parse_metrics(&args.metrics)?;
    let spec = EnumerationSpec::new(dims, args.n1, args.n2, threshold, args.use_symmetry)?;
    let opts = EstimateOptions {
        kinds: kinds.clone(),
        bin_width: args.bins.then_some(args.bin_width),
        deterministic: args.deterministic_reduce,
        max_states: args.max_states,
        checkpoint: args.checkpoint.clone(),
    };
    let run = in_pool(args.common.workers, || run_enumeration(&spec, &[threshold], &opts))??;
    let outcome = &run.outcomes[0];
    Ok(Report {
        schema_version: estimate::SCHEMA_VERSION,
        command: "enumerate".into(),
        config: json!({
            "dims": dims.to_string(),
            "n1": args.n1,
            "n2": args.n2,
            "det_threshold": rat_string(threshold),
            "metrics": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
            "use_symmetry": args.use_symmetry,
            "bins": args.bins,
            "bin_width": args.bins.then_some(args.bin_width),
        }),
        separability_semantics: semantics(dims),
        totals: Totals {
            states: outcome.tally.n,
            separable: outcome.tally.n_separable,
            skipped_nonfinite_weight: outcome.tally.skipped_nonfinite,
            trials: None,
            enumeration: Some(run.stats.clone()),
        },
        metrics: finalize(&outcome.tally)?,
        mc: None,
        bins: outcome.binned.as_ref().map(|b| b.rows()),
        meta: meta(started),
    })
}

pub fn run_random_search_cmd(args: &RandomSearchArgs) -> Result<Report> {
    let started = Instant::now();
    let dims = parse_dims(&args.dims)?;
    let radius_rat = parse_rational(&args.radius)?;
    let radius = *radius_rat.numer() as f64 / *radius_rat.denom() as f64;
    let kinds = parse_metrics(&args.metrics)?;
    let search = DiscSearchSpec::new(dims, radius, args.trials)?;
    let run = in_pool(args.common.workers, || run_disc_search(&search, args.seed, &kinds))??;
    let metrics = if run.tally.n > 0 { finalize(&run.tally)? } else { Vec::new() };
    Ok(Report {
        schema_version: estimate::SCHEMA_VERSION,
        command: "random-search".into(),
        config: json!({
            "dims": dims.to_string(),
            "radius": rat_string(radius_rat),
            "trials": args.trials,
            "seed": args.seed,
            "metrics": kinds.iter().map(|k| k.name()).collect::<Vec<_>>(),
        }),
        separability_semantics: semantics(dims),
        totals: Totals {
            states: run.stats.hits,
            separable: run.stats.hits_separable,
            skipped_nonfinite_weight: run.tally.skipped_nonfinite,
            trials: Some(run.stats.trials),
            enumeration: None,
        },
        metrics,
        mc: None,
        bins: None,
        meta: meta(started),
    })
}

pub fn run_grid_info_cmd(args: &GridInfoArgs) -> Result<String> {
    if args.n2.is_none() && args.n1.is_none() {
        return Err(Error::InvalidConfig("grid-info needs --n2 and/or --n1".into()));
    }
    let dims = args.dims.as_deref().map(parse_dims).transpose()?;
    let mut out = serde_json::Map::new();
    if let Some(n2) = args.n2 {
        if n2 < 1 {
            return Err(Error::InvalidConfig("n2 must be at least 1".into()));
        }
        let grid = disc_grid(n2);
        out.insert(
            "grid".into(),
            json!({
                "n2": n2,
                "points": grid.len(),
                "min_modulus": grid.min_modulus(),
                "contains_origin": grid.contains_origin(),
            }),
        );
    }
    if let Some(n1) = args.n1 {
        if n1 < 1 {
            return Err(Error::InvalidConfig("n1 must be at least 1".into()));
        }
        let k = args.k.unwrap_or_else(|| dims.map(|d| d.n() as u32).unwrap_or(4));
        if k < 1 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        out.insert(
            "simplex".into(),
            json!({
                "n1": n1,
                "parts": k,
                "points": simplex_count(n1 as u64, k as u64) as u64,
            }),
        );
    }
    Ok(serde_json::to_string_pretty(&serde_json::Value::Object(out))?)
}

/// Run a parsed command line and return what should be printed to stdout.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::GridInfo(args) => run_grid_info_cmd(args),
        Command::ProductSample(args) => render(run_product_sample_cmd(args)?, &args.common),
        Command::Enumerate(args) => render(run_enumerate_cmd(args)?, &args.common),
        Command::RandomSearch(args) => render(run_random_search_cmd(args)?, &args.common),
    }
}

fn render(report: Report, common: &CommonArgs) -> Result<String> {
    let body = match common.format {
        OutputFormat::Json => report.to_json()?,
        OutputFormat::Csv => report.bins_csv().map_err(|_| {
            Error::InvalidConfig("csv output requires a binned run (--bins)".into())
        })?,
    };
    match &common.out {
        None => Ok(body),
        Some(path) => {
            std::fs::write(path, &body)?;
            let summary = match &report.mc {
                Some(mc) => format!(
                    "{}: p_hat = {:.6} +/- {:.6} ({} of {}) -> {}",
                    report.command,
                    mc.p_hat,
                    mc.stderr,
                    mc.separable,
                    mc.samples,
                    path.display()
                ),
                None => format!(
                    "{}: {} states, {} separable -> {}",
                    report.command, report.totals.states, report.totals.separable,
                    path.display()
                ),
            };
            Ok(summary)
        }
    }
}
