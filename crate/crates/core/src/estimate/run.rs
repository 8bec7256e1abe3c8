//! Parallel drivers: enumeration with per-diagonal partitioning and
//! checkpoints, product-measure Monte Carlo, and the randomized disc search.
//!
//! Work is partitioned deterministically (fixed batches of simplex indices,
//! fixed trial chunks per RNG stream), so state counts never depend on the
//! worker count. Weighted sums merge associatively; with
//! `deterministic_reduce` the merge order is pinned and results are
//! bit-identical for any number of workers.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{BinnedTally, WeightedTally};
use crate::enumerate::{EnumerationSpec, Enumerator, RunStats};
use crate::linalg::exact::Rat;
use crate::linalg::BipartiteDims;
use crate::measures::{self, DirichletParams, DiscSearchSpec, DiscSearchStats, RngStream};
use crate::metrics::MetricKind;
use crate::states::DensityMatrix;
use crate::{Error, Result};

/// Diagonals processed between merge/checkpoint boundaries. Fixed so that
/// partitioning does not depend on the worker count.
const BATCH: usize = 64;

/// Trials per RNG stream in randomized searches.
const TRIALS_PER_STREAM: u64 = 1 << 16;

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub kinds: Vec<MetricKind>,
    /// Some(width) adds a participation-ratio histogram.
    pub bin_width: Option<f64>,
    /// Pin the merge order for bit-identical results at any worker count.
    pub deterministic: bool,
    /// Abort (with a checkpoint) once this many states have been emitted.
    pub max_states: Option<u64>,
    pub checkpoint: Option<PathBuf>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            kinds: vec![MetricKind::Minimal, MetricKind::Kmb, MetricKind::Maximal],
            bin_width: None,
            deterministic: false,
            max_states: None,
            checkpoint: None,
        }
    }
}

/// Accumulated result for one determinant threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdOutcome {
    /// Threshold echoed as an exact "numer/denom" string.
    pub threshold: String,
    pub tally: WeightedTally,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub binned: Option<BinnedTally>,
}

#[derive(Debug, Clone)]
pub struct EnumerationRun {
    pub stats: RunStats,
    pub outcomes: Vec<ThresholdOutcome>,
    /// Diagonal index this run resumed from, if a checkpoint was loaded.
    pub resumed_from: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    fingerprint: String,
    completed_diagonals: usize,
    stats: RunStats,
    outcomes: Vec<ThresholdOutcome>,
}

const CHECKPOINT_VERSION: u32 = 1;

struct Partial {
    stats: RunStats,
    outcomes: Vec<ThresholdOutcome>,
}

impl Partial {
    fn empty(enumr: &Enumerator, thresholds: &[Rat], opts: &EstimateOptions) -> Result<Self> {
        let n = enumr.spec().dims.n();
        let outcomes = thresholds
            .iter()
            .map(|t| {
                Ok(ThresholdOutcome {
                    threshold: rat_string(*t),
                    tally: WeightedTally::new(&opts.kinds),
                    binned: match opts.bin_width {
                        Some(w) => Some(BinnedTally::new(&opts.kinds, n, w)?),
                        None => None,
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { stats: enumr.fresh_stats(), outcomes })
    }

    fn merge(&mut self, other: &Partial) {
        self.stats.merge(&other.stats);
        for (a, b) in self.outcomes.iter_mut().zip(&other.outcomes) {
            a.tally.merge(&b.tally);
            if let (Some(x), Some(y)) = (a.binned.as_mut(), b.binned.as_ref()) {
                x.merge(y);
            }
        }
    }
}

pub fn rat_string(r: Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn fingerprint(spec: &EnumerationSpec, thresholds: &[Rat], opts: &EstimateOptions) -> String {
    let kinds: Vec<&str> = opts.kinds.iter().map(|k| k.name()).collect();
    let text = format!(
        "{};thresholds={};kinds={};bin_width={:?}",
        spec.canonical_string(),
        thresholds.iter().map(|t| rat_string(*t)).collect::<Vec<_>>().join(","),
        kinds.join(","),
        opts.bin_width,
    );
    format!("{:016x}", fnv1a64(&text))
}

fn fnv1a64(s: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in s.bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Enumerate under `spec` and tally each state into every threshold bucket it
/// clears. The enumeration itself runs once, at the smallest threshold.
pub fn run_enumeration(
    spec: &EnumerationSpec,
    thresholds: &[Rat],
    opts: &EstimateOptions,
) -> Result<EnumerationRun> {
    if thresholds.is_empty() {
        return Err(Error::InvalidConfig("at least one determinant threshold required".into()));
    }
    let base_threshold = *thresholds.iter().min().unwrap();
    let base_spec = EnumerationSpec::new(
        spec.dims,
        spec.n1,
        spec.n2,
        base_threshold,
        spec.use_symmetry,
    )?;
    for &t in thresholds {
        // Validates the upper bound for every requested threshold.
        EnumerationSpec::new(spec.dims, spec.n1, spec.n2, t, spec.use_symmetry)?;
    }

    let enumr = Enumerator::new(base_spec)?;
    let total = enumr.simplex().len();
    let print = fingerprint(spec, thresholds, opts);

    let mut global = Partial::empty(&enumr, thresholds, opts)?;
    global.stats.diagonals_total = total as u64;
    let mut start = 0usize;
    let mut resumed_from = None;

    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let file: CheckpointFile = serde_json::from_str(&std::fs::read_to_string(path)?)?;
            if file.version != CHECKPOINT_VERSION || file.fingerprint != print {
                return Err(Error::CheckpointMismatch {
                    expected: print,
                    found: file.fingerprint,
                });
            }
            start = file.completed_diagonals;
            global.stats = file.stats;
            global.outcomes = file.outcomes;
            resumed_from = Some(start);
        }
    }

    let mut next = start;
    while next < total {
        let end = (next + BATCH).min(total);
        let indices: Vec<usize> = (next..end).collect();
        let process = |idx: &usize| -> Partial {
            let mut partial = Partial::empty(&enumr, thresholds, opts)
                .expect("options validated before the run");
            let mut sink = |st: crate::enumerate::EnumeratedState| {
                consume_state(&st, thresholds, opts, &mut partial.outcomes);
            };
            enumr.enumerate_diagonal(*idx, &mut sink, &mut partial.stats);
            partial
        };
        if opts.deterministic {
            let results: Vec<Partial> = indices.par_iter().map(process).collect();
            for r in &results {
                global.merge(r);
            }
        } else {
            let merged = indices
                .par_iter()
                .map(process)
                .reduce_with(|mut a, b| {
                    a.merge(&b);
                    a
                });
            if let Some(r) = merged {
                global.merge(&r);
            }
        }
        next = end;

        if let Some(path) = &opts.checkpoint {
            let file = CheckpointFile {
                version: CHECKPOINT_VERSION,
                fingerprint: print.clone(),
                completed_diagonals: next,
                stats: global.stats.clone(),
                outcomes: global.outcomes.clone(),
            };
            let tmp = path.with_extension("tmp");
            std::fs::write(&tmp, serde_json::to_string(&file)?)?;
            std::fs::rename(&tmp, path)?;
        }
        if let Some(max) = opts.max_states {
            if global.stats.emitted >= max && next < total {
                return Err(Error::BudgetExceeded { completed: next, total });
            }
        }
    }

    Ok(EnumerationRun { stats: global.stats, outcomes: global.outcomes, resumed_from })
}

fn consume_state(
    st: &crate::enumerate::EnumeratedState,
    thresholds: &[Rat],
    opts: &EstimateOptions,
    outcomes: &mut [ThresholdOutcome],
) {
    let weights: Option<Vec<f64>> = opts
        .kinds
        .iter()
        .map(|&k| crate::metrics::volume_weight(k, st.state.spectrum()).ok())
        .collect();
    match weights {
        Some(weights) => {
            let d = st.state.degree_of_entanglement();
            let r = st.state.participation_ratio();
            for (outcome, &t) in outcomes.iter_mut().zip(thresholds) {
                if st.det >= t {
                    outcome.tally.accumulate(st.verdict.ppt, &weights, d, st.multiplicity);
                    if let Some(binned) = outcome.binned.as_mut() {
                        binned.accumulate(r, st.verdict.ppt, &weights, st.multiplicity);
                    }
                }
            }
        }
        None => {
            // A weight overflowed or the floating spectrum grazed zero: skip
            // the state everywhere it would have counted, audibly.
            for (outcome, &t) in outcomes.iter_mut().zip(thresholds) {
                if st.det >= t {
                    outcome.tally.skip(st.multiplicity);
                }
            }
        }
    }
}

/// Product-measure Monte Carlo: `samples` independent draws, one RNG stream
/// per sample index. Counts are exact and independent of scheduling.
pub fn run_product_sample(
    params: &DirichletParams,
    dims: BipartiteDims,
    samples: u64,
    seed: u64,
) -> Result<(u64, u64)> {
    if samples == 0 {
        return Err(Error::InvalidConfig("sample count must be positive".into()));
    }
    if params.len() != dims.n() {
        return Err(Error::InvalidConfig(format!(
            "Dirichlet parameter vector has length {} but the state space is {}",
            params.len(),
            dims.n()
        )));
    }
    let separable = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i).rng();
            let state = measures::sample_product_measure(params, dims, &mut rng);
            u64::from(state.is_ppt().ppt)
        })
        .sum();
    Ok((samples, separable))
}

#[derive(Debug, Clone)]
pub struct SearchRun {
    pub stats: DiscSearchStats,
    pub tally: WeightedTally,
}

/// Randomized disc search with weighted tallies over the hits. Trials are
/// split into fixed chunks, one RNG stream per chunk, merged in chunk order.
pub fn run_disc_search(
    search: &DiscSearchSpec,
    seed: u64,
    kinds: &[MetricKind],
) -> Result<SearchRun> {
    if search.trials == 0 {
        return Err(Error::InvalidConfig("trial count must be positive".into()));
    }
    let chunks: Vec<(u64, u64)> = {
        let mut out = Vec::new();
        let mut start = 0u64;
        let mut stream = 0u64;
        while start < search.trials {
            let len = TRIALS_PER_STREAM.min(search.trials - start);
            out.push((stream, len));
            start += len;
            stream += 1;
        }
        out
    };

    let results: Vec<(DiscSearchStats, WeightedTally)> = chunks
        .par_iter()
        .map(|&(stream, trials)| {
            let chunk_spec = DiscSearchSpec { trials, ..*search };
            let mut rng = RngStream::new(seed, stream).rng();
            let mut tally = WeightedTally::new(kinds);
            let stats = measures::random_disc_search(&chunk_spec, &mut rng, |state| {
                tally_hit(state, kinds, &mut tally);
            });
            (stats, tally)
        })
        .collect();

    let mut stats = DiscSearchStats::default();
    let mut tally = WeightedTally::new(kinds);
    for (s, t) in &results {
        stats.trials += s.trials;
        stats.hits += s.hits;
        stats.hits_separable += s.hits_separable;
        tally.merge(t);
    }
    Ok(SearchRun { stats, tally })
}

fn tally_hit(state: &DensityMatrix, kinds: &[MetricKind], tally: &mut WeightedTally) {
    let weights: Option<Vec<f64>> = kinds
        .iter()
        .map(|&k| crate::metrics::volume_weight(k, state.spectrum()).ok())
        .collect();
    match weights {
        Some(weights) => {
            let verdict = state.is_ppt();
            let d = state.degree_of_entanglement();
            tally.accumulate(verdict.ppt, &weights, d, 1);
        }
        None => tally.skip(1),
    }
}
