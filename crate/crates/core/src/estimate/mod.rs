//! Weighted and unweighted estimators over state streams.
//!
//! Lattice runs weight every state by monotone-metric volume elements whose
//! magnitudes span many orders near degeneracy, so all accumulators use
//! Neumaier-compensated summation and merge associatively; Monte Carlo runs
//! only need integer counters. [`run`] holds the parallel drivers.

pub mod run;

use serde::{Deserialize, Serialize};

use crate::metrics::MetricKind;
use crate::{Error, Result};

/// Kahan summation with Neumaier's correction for terms larger than the
/// running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct CompensatedSum {
    s: f64,
    c: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.s + value;
        if self.s.abs() >= value.abs() {
            self.c += (self.s - t) + value;
        } else {
            self.c += (value - t) + self.s;
        }
        self.s = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.s);
        self.c += other.c;
    }

    pub fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Per-metric weighted sums: Σw, Σw·1[separable], Σw·d.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct MetricSums {
    pub weight: CompensatedSum,
    pub weight_separable: CompensatedSum,
    pub weight_entanglement: CompensatedSum,
}

/// Weighted accumulators for a set of metrics, plus unweighted counters.
/// Merging is associative, so tallies can be built per partition and
/// combined in any grouping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightedTally {
    kinds: Vec<MetricKind>,
    sums: Vec<MetricSums>,
    pub n: u64,
    pub n_separable: u64,
    /// States dropped because a weight overflowed or a spectrum rounded
    /// nonpositive; surfaced in reports as an audit counter.
    pub skipped_nonfinite: u64,
}

impl WeightedTally {
    pub fn new(kinds: &[MetricKind]) -> Self {
        Self {
            kinds: kinds.to_vec(),
            sums: vec![MetricSums::default(); kinds.len()],
            n: 0,
            n_separable: 0,
            skipped_nonfinite: 0,
        }
    }

    pub fn kinds(&self) -> &[MetricKind] {
        &self.kinds
    }

    pub fn sums(&self) -> &[MetricSums] {
        &self.sums
    }

    /// Advance all sums by one state carrying `multiplicity`. `weights` must
    /// be ordered like `kinds` and finite.
    pub fn accumulate(&mut self, separable: bool, weights: &[f64], d: f64, multiplicity: u32) {
        debug_assert_eq!(weights.len(), self.kinds.len());
        let m = multiplicity as f64;
        self.n += multiplicity as u64;
        if separable {
            self.n_separable += multiplicity as u64;
        }
        for (sums, &w) in self.sums.iter_mut().zip(weights) {
            let wm = w * m;
            sums.weight.add(wm);
            if separable {
                sums.weight_separable.add(wm);
            }
            sums.weight_entanglement.add(wm * d);
        }
    }

    /// Record a state whose weights could not be evaluated.
    pub fn skip(&mut self, multiplicity: u32) {
        self.skipped_nonfinite += multiplicity as u64;
    }

    pub fn merge(&mut self, other: &WeightedTally) {
        assert_eq!(self.kinds, other.kinds, "cannot merge tallies over different metrics");
        self.n += other.n;
        self.n_separable += other.n_separable;
        self.skipped_nonfinite += other.skipped_nonfinite;
        for (a, b) in self.sums.iter_mut().zip(&other.sums) {
            a.weight.merge(&b.weight);
            a.weight_separable.merge(&b.weight_separable);
            a.weight_entanglement.merge(&b.weight_entanglement);
        }
    }
}

/// Per-bin weighted mass over the participation-ratio range [1, N].
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct BinSums {
    pub mass: CompensatedSum,
    pub mass_separable: CompensatedSum,
}

/// Participation-ratio histogram: half-open bins [lo, hi) of fixed width
/// anchored at R = 1; the top bin also absorbs R = N exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinnedTally {
    pub width: f64,
    pub r_max: f64,
    kinds: Vec<MetricKind>,
    /// bins[bin][kind]
    bins: Vec<Vec<BinSums>>,
}

impl BinnedTally {
    pub fn new(kinds: &[MetricKind], n_dim: usize, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidConfig(format!("bin width must be positive, got {width}")));
        }
        let r_max = n_dim as f64;
        let nbins = ((r_max - 1.0) / width).ceil().max(1.0) as usize;
        Ok(Self {
            width,
            r_max,
            kinds: kinds.to_vec(),
            bins: vec![vec![BinSums::default(); kinds.len()]; nbins],
        })
    }

    pub fn bin_count(&self) -> usize {
        self.bins.len()
    }

    pub fn bin_index(&self, r: f64) -> usize {
        let idx = ((r - 1.0) / self.width).floor();
        (idx.max(0.0) as usize).min(self.bins.len() - 1)
    }

    pub fn accumulate(&mut self, r: f64, separable: bool, weights: &[f64], multiplicity: u32) {
        debug_assert_eq!(weights.len(), self.kinds.len());
        let bin = self.bin_index(r);
        let m = multiplicity as f64;
        for (sums, &w) in self.bins[bin].iter_mut().zip(weights) {
            sums.mass.add(w * m);
            if separable {
                sums.mass_separable.add(w * m);
            }
        }
    }

    pub fn merge(&mut self, other: &BinnedTally) {
        assert_eq!(self.kinds, other.kinds);
        assert_eq!(self.bins.len(), other.bins.len());
        for (row, other_row) in self.bins.iter_mut().zip(&other.bins) {
            for (a, b) in row.iter_mut().zip(other_row) {
                a.mass.merge(&b.mass);
                a.mass_separable.merge(&b.mass_separable);
            }
        }
    }

    /// Occupied bins as report rows; empty bins are omitted, not zeroed.
    pub fn rows(&self) -> Vec<BinRow> {
        let mut rows = Vec::new();
        for (b, row) in self.bins.iter().enumerate() {
            let lo = 1.0 + b as f64 * self.width;
            let hi = (lo + self.width).min(self.r_max);
            for (kind, sums) in self.kinds.iter().zip(row) {
                let mass = sums.mass.total();
                if mass == 0.0 {
                    continue;
                }
                let mass_separable = sums.mass_separable.total();
                rows.push(BinRow {
                    bin_lo: lo,
                    bin_hi: hi,
                    metric: kind.name().to_string(),
                    mass,
                    mass_separable,
                    p_conditional: mass_separable / mass,
                });
            }
        }
        rows
    }
}

/// Unweighted binomial estimate: p̂ = n_sep/n with its standard error.
pub fn unweighted_estimate(n: u64, n_separable: u64) -> (f64, f64) {
    assert!(n >= 1, "estimate requires at least one sample");
    let p = n_separable as f64 / n as f64;
    let stderr = (p * (1.0 - p) / n as f64).sqrt();
    (p, stderr)
}

// ---------------------------------------------------------------------------
// Report schema
// ---------------------------------------------------------------------------

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MetricReport {
    pub metric: String,
    pub weight_sum: f64,
    pub weight_separable_sum: f64,
    pub weight_entanglement_sum: f64,
    /// Weighted separability probability Σw·1[sep] / Σw.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Weighted average degree of entanglement Σw·d / Σw.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinRow {
    pub bin_lo: f64,
    pub bin_hi: f64,
    pub metric: String,
    pub mass: f64,
    pub mass_separable: f64,
    pub p_conditional: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McReport {
    pub samples: u64,
    pub separable: u64,
    pub p_hat: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Totals {
    pub states: u64,
    pub separable: u64,
    pub skipped_nonfinite_weight: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<crate::enumerate::RunStats>,
}

/// Runtime metadata; the only block allowed to differ between reruns of an
/// identical configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Meta {
    pub timestamp_unix: f64,
    pub runtime_seconds: f64,
    pub workers: usize,
    pub package_version: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    /// "ppt-iff-separable" for 2x2 and 2x3; "ppt-upper-bound" above, where
    /// the PPT pass rate only bounds the separability probability.
    pub separability_semantics: String,
    pub totals: Totals,
    pub metrics: Vec<MetricReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mc: Option<McReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bins: Option<Vec<BinRow>>,
    pub meta: Meta,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// CSV of the binned table with a fixed header.
    pub fn bins_csv(&self) -> Result<String> {
        let bins = self
            .bins
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("report has no binned table".into()))?;
        let mut out = String::from("bin_lo,bin_hi,metric,mass,mass_separable,p_conditional\n");
        for row in bins {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                row.bin_lo, row.bin_hi, row.metric, row.mass, row.mass_separable, row.p_conditional
            ));
        }
        Ok(out)
    }
}

/// Turn a tally into per-metric report lines. Fails on an empty tally;
/// metrics whose total weight is zero report no probabilities.
pub fn finalize(tally: &WeightedTally) -> Result<Vec<MetricReport>> {
    if tally.n == 0 {
        return Err(Error::EmptyTally);
    }
    Ok(tally
        .kinds
        .iter()
        .zip(&tally.sums)
        .map(|(kind, sums)| {
            let w = sums.weight.total();
            let ws = sums.weight_separable.total();
            let wd = sums.weight_entanglement.total();
            let (p, d) = if w > 0.0 { (Some(ws / w), Some(wd / w)) } else { (None, None) };
            MetricReport {
                metric: kind.name().to_string(),
                weight_sum: w,
                weight_separable_sum: ws,
                weight_entanglement_sum: wd,
                p,
                d,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_survives_cancellation() {
        let mut s = CompensatedSum::default();
        s.add(1e200);
        s.add(0.1);
        s.add(0.2);
        s.add(0.3);
        s.add(-1e200);
        assert!((s.total() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn single_state_probabilities() {
        let kinds = [MetricKind::Minimal, MetricKind::Maximal];
        let mut t = WeightedTally::new(&kinds);
        t.accumulate(true, &[2.0, 5.0], 0.0, 1);
        let reports = finalize(&t).unwrap();
        assert_eq!(reports[0].p, Some(1.0));
        assert_eq!(reports[1].p, Some(1.0));

        let mut t = WeightedTally::new(&kinds);
        t.accumulate(false, &[2.0, 5.0], 0.3, 1);
        let reports = finalize(&t).unwrap();
        assert_eq!(reports[0].p, Some(0.0));
        assert!((reports[0].d.unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn weighted_fraction() {
        // Two states, weights (1, 3), only the second separable: p = 0.75.
        let kinds = [MetricKind::Minimal];
        let mut t = WeightedTally::new(&kinds);
        t.accumulate(false, &[1.0], 0.5, 1);
        t.accumulate(true, &[3.0], 0.0, 1);
        let reports = finalize(&t).unwrap();
        assert!((reports[0].p.unwrap() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn empty_tally_errors() {
        let t = WeightedTally::new(&[MetricKind::Minimal]);
        assert!(matches!(finalize(&t), Err(Error::EmptyTally)));
    }

    #[test]
    fn merge_is_association_of_accumulate() {
        let kinds = [MetricKind::Minimal, MetricKind::Kmb];
        let states = [
            (true, [1.5, 2.5], 0.0, 1u32),
            (false, [0.5, 0.25], 0.7, 2),
            (true, [4.0, 1.0], 0.0, 1),
            (false, [2.0, 2.0], 0.2, 1),
        ];
        let mut whole = WeightedTally::new(&kinds);
        for (sep, w, d, m) in &states {
            whole.accumulate(*sep, w, *d, *m);
        }
        let mut left = WeightedTally::new(&kinds);
        let mut right = WeightedTally::new(&kinds);
        for (k, (sep, w, d, m)) in states.iter().enumerate() {
            if k < 2 {
                left.accumulate(*sep, w, *d, *m);
            } else {
                right.accumulate(*sep, w, *d, *m);
            }
        }
        left.merge(&right);
        assert_eq!(left.n, whole.n);
        assert_eq!(left.n_separable, whole.n_separable);
        for (a, b) in left.sums().iter().zip(whole.sums()) {
            assert!((a.weight.total() - b.weight.total()).abs() < 1e-12);
            assert!((a.weight_separable.total() - b.weight_separable.total()).abs() < 1e-12);
        }
    }

    #[test]
    fn binning_boundaries() {
        let kinds = [MetricKind::Minimal];
        let mut b = BinnedTally::new(&kinds, 4, 0.05).unwrap();
        assert_eq!(b.bin_count(), 60);
        // R = 4 exactly lands in the top bin, not one past it.
        assert_eq!(b.bin_index(4.0), 59);
        assert_eq!(b.bin_index(1.0), 0);
        // Half-open bins: the left edge belongs to the bin.
        assert_eq!(b.bin_index(1.05), 1);

        b.accumulate(4.0, true, &[2.0], 1);
        let rows = b.rows();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].bin_lo, 1.0 + 59.0 * 0.05);
        assert_eq!(rows[0].p_conditional, 1.0);
    }

    #[test]
    fn bin_masses_sum_to_totals() {
        let kinds = [MetricKind::Minimal, MetricKind::Maximal];
        let mut tally = WeightedTally::new(&kinds);
        let mut binned = BinnedTally::new(&kinds, 4, 0.05).unwrap();
        let states = [(1.5, false, [1.0, 0.5]), (3.5, true, [2.0, 4.0]), (2.2, true, [0.1, 9.0])];
        for (r, sep, w) in &states {
            tally.accumulate(*sep, w, 0.0, 1);
            binned.accumulate(*r, *sep, w, 1);
        }
        for (k, kind) in kinds.iter().enumerate() {
            let total: f64 = binned
                .rows()
                .iter()
                .filter(|row| row.metric == kind.name())
                .map(|row| row.mass)
                .sum();
            let expected = tally.sums()[k].weight.total();
            assert!((total - expected).abs() <= 1e-10 * expected.abs());
        }
        // Two distinct occupied bins with equal weights give 0.5/0.5
        // marginals for the Minimal metric in this configuration.
        let mut even = BinnedTally::new(&[MetricKind::Minimal], 4, 0.05).unwrap();
        even.accumulate(1.5, false, &[1.0], 1);
        even.accumulate(3.5, true, &[1.0], 1);
        let rows = even.rows();
        assert_eq!(rows.len(), 2);
        assert!((rows[0].mass - rows[1].mass).abs() < 1e-15);
    }

    #[test]
    fn unweighted_estimates() {
        let (p, se) = unweighted_estimate(10_000, 6_564);
        assert!((p - 0.6564).abs() < 1e-15);
        assert!((se - (0.6564f64 * (1.0 - 0.6564) / 10_000.0).sqrt()).abs() < 1e-15);
        let (p, se) = unweighted_estimate(100, 0);
        assert_eq!(p, 0.0);
        assert_eq!(se, 0.0);
    }

    #[test]
    fn report_probability_recomputable_from_sums() {
        let kinds = [MetricKind::Minimal];
        let mut t = WeightedTally::new(&kinds);
        t.accumulate(true, &[0.123456789], 0.1, 1);
        t.accumulate(false, &[9.87654321], 0.2, 3);
        t.accumulate(true, &[1.0e-7], 0.0, 1);
        let r = &finalize(&t).unwrap()[0];
        // Bit-for-bit: p is the quotient of the two stored sums.
        assert_eq!(r.p.unwrap().to_bits(), (r.weight_separable_sum / r.weight_sum).to_bits());
    }
}
