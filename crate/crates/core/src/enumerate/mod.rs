//! Exhaustive enumeration of lattice density matrices.
//!
//! A run is parameterized by the simplex resolution `n1` (trial diagonals),
//! the grid resolution `n2` (trial off-diagonals) and an optional determinant
//! threshold below which near-degenerate states are rejected. The full
//! Cartesian product is astronomically large, so the enumerator backtracks:
//! off-diagonals are filled in a fixed order and a branch dies as soon as any
//! completed principal minor goes negative (every principal minor of a
//! density matrix is nonnegative). The 2×2 minors `ρ_ii ρ_jj − |ρ_ij|²` are
//! strongest and are applied up front by restricting each pair's trial set.
//!
//! All decisions are exact: entries have denominators dividing
//! `lcm(n1, 2·n2)`, and minors are Gaussian-integer determinants of the
//! scaled matrix.

mod grid;
mod simplex;

pub use grid::{disc_grid, DiscGrid, GridPoint};
pub use simplex::{binomial, simplex_count, simplex_points, SimplexLattice};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::linalg::exact::{GaussInt, Rat, ScaledHermitian};
use crate::linalg::BipartiteDims;
use crate::states::{DensityMatrix, SeparabilityVerdict};
use crate::{Error, Result};

/// Parameters of one enumeration run.
#[derive(Debug, Clone, Copy)]
pub struct EnumerationSpec {
    pub dims: BipartiteDims,
    /// Simplex resolution: diagonals are compositions of n1 divided by n1.
    pub n1: u32,
    /// Grid resolution: off-diagonal spacing is 1/n2.
    pub n2: u32,
    /// Reject states with det(ρ) strictly below this value.
    pub det_threshold: Rat,
    /// Halve the search tree by enumerating one representative per
    /// complex-conjugation orbit, with multiplicity 2 for non-real states.
    pub use_symmetry: bool,
}

impl EnumerationSpec {
    pub fn new(
        dims: BipartiteDims,
        n1: u32,
        n2: u32,
        det_threshold: Rat,
        use_symmetry: bool,
    ) -> Result<Self> {
        if n1 < 1 || n2 < 1 {
            return Err(Error::InvalidConfig("n1 and n2 must be at least 1".into()));
        }
        if det_threshold < Rat::from_integer(0) {
            return Err(Error::InvalidConfig("det threshold must be nonnegative".into()));
        }
        let n = dims.n();
        let det_max = Rat::new(1, (n as i128).pow(n as u32));
        if det_threshold > det_max {
            return Err(Error::InvalidConfig(format!(
                "det threshold {det_threshold} exceeds the maximum determinant {det_max}"
            )));
        }
        Ok(Self { dims, n1, n2, det_threshold, use_symmetry })
    }

    /// Canonical one-line form, used for checkpoint fingerprints.
    pub fn canonical_string(&self) -> String {
        format!(
            "dims={};n1={};n2={};threshold={}/{};symmetry={}",
            self.dims,
            self.n1,
            self.n2,
            self.det_threshold.numer(),
            self.det_threshold.denom(),
            self.use_symmetry
        )
    }
}

/// One state off the enumeration stream.
#[derive(Debug, Clone)]
pub struct EnumeratedState {
    pub state: DensityMatrix,
    pub verdict: SeparabilityVerdict,
    /// 1, or 2 when this state stands for itself and its complex conjugate.
    pub multiplicity: u32,
    /// Exact determinant.
    pub det: Rat,
    pub diagonal_index: usize,
}

/// Counters describing an enumeration run. `emitted` and `separable` are
/// multiplicity-weighted and independent of the symmetry optimization; the
/// node counters describe the tree actually walked.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub emitted: u64,
    pub separable: u64,
    pub diagonals_total: u64,
    /// Diagonals with at least one admissible grid point for every pair.
    pub diagonals_feasible: u64,
    /// Nodes visited per fill level.
    pub visited_nodes: Vec<u64>,
    /// Branches killed by a negative principal minor, per fill level.
    pub pruned_nodes: Vec<u64>,
    /// Fully assembled candidates reaching the final positivity test.
    pub final_candidates: u64,
    pub rejected_not_positive: u64,
    pub rejected_det_threshold: u64,
    /// Boundary audit: final candidates rejected with some leading principal
    /// minor exactly zero, and the subset of those with det exactly zero.
    pub boundary_minor_zero: u64,
    pub boundary_det_zero: u64,
}

impl RunStats {
    fn with_levels(levels: usize) -> Self {
        Self {
            visited_nodes: vec![0; levels],
            pruned_nodes: vec![0; levels],
            ..Default::default()
        }
    }

    pub fn merge(&mut self, other: &RunStats) {
        self.emitted += other.emitted;
        self.separable += other.separable;
        self.diagonals_total += other.diagonals_total;
        self.diagonals_feasible += other.diagonals_feasible;
        if self.visited_nodes.len() < other.visited_nodes.len() {
            self.visited_nodes.resize(other.visited_nodes.len(), 0);
        }
        for (a, b) in self.visited_nodes.iter_mut().zip(&other.visited_nodes) {
            *a += b;
        }
        if self.pruned_nodes.len() < other.pruned_nodes.len() {
            self.pruned_nodes.resize(other.pruned_nodes.len(), 0);
        }
        for (a, b) in self.pruned_nodes.iter_mut().zip(&other.pruned_nodes) {
            *a += b;
        }
        self.final_candidates += other.final_candidates;
        self.rejected_not_positive += other.rejected_not_positive;
        self.rejected_det_threshold += other.rejected_det_threshold;
        self.boundary_minor_zero += other.boundary_minor_zero;
        self.boundary_det_zero += other.boundary_det_zero;
    }
}

/// Prepared enumeration tables: fill order, per-level minor schedule, entry
/// scaling. One instance serves any number of per-diagonal walks, which are
/// independent and safe to run concurrently.
pub struct Enumerator {
    spec: EnumerationSpec,
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// Principal-index subsets (as bitmasks) that become fully determined at
    /// each fill level; size ≥ 3, full set excluded (handled at acceptance).
    schedule: Vec<Vec<u32>>,
    denom: i128,
    denom_pow_n: i128,
    diag_unit: i128,
    off_unit: i128,
    simplex: SimplexLattice,
    grid: DiscGrid,
    /// det(ρ) ≥ tn/td tested as det_scaled·td ≥ tn·denomⁿ.
    threshold_rhs: i128,
    threshold_lhs_factor: i128,
}

impl Enumerator {
    pub fn new(spec: EnumerationSpec) -> Result<Self> {
        let n = spec.dims.n();
        if n > 9 {
            return Err(Error::InvalidConfig(format!(
                "enumeration supports total dimension up to 9, got {n}"
            )));
        }
        let denom = (spec.n1 as i128).lcm(&(2 * spec.n2 as i128));
        // Exactness guard: Hadamard's bound on any minor of the scaled
        // matrix, times the threshold denominator, must stay inside i128.
        let hadamard = ((n as f64).sqrt() * denom as f64).powi(n as i32);
        let td = *spec.det_threshold.denom() as f64;
        if hadamard * td.max(1.0) * 512.0 > i128::MAX as f64 / 16.0 {
            return Err(Error::InvalidConfig(format!(
                "resolutions n1={}, n2={} are too fine for exact 128-bit arithmetic",
                spec.n1, spec.n2
            )));
        }

        // Leading-first fill order: all pairs within {0..j} before any pair
        // touching j+1. Each leading principal submatrix is complete as
        // early as possible, so its minor can prune before the tree branches
        // over later columns — orders of magnitude fewer nodes than row-major
        // filling once the matrix is 6×6.
        let mut pairs = Vec::new();
        for j in 1..n {
            for i in 0..j {
                pairs.push((i, j));
            }
        }

        // Level at which a pair is filled.
        let pair_level = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j)).unwrap();
        let full_mask = (1u32 << n) - 1;
        let mut schedule = vec![Vec::new(); pairs.len()];
        for mask in 0u32..=full_mask {
            let size = mask.count_ones();
            if size < 3 || mask == full_mask {
                continue;
            }
            let mut last = 0usize;
            for i in 0..n {
                for j in (i + 1)..n {
                    if mask >> i & 1 == 1 && mask >> j & 1 == 1 {
                        last = last.max(pair_level(i, j));
                    }
                }
            }
            schedule[last].push(mask);
        }
        // Cheapest checks first: a negative 3×3 minor usually fires before
        // the larger determinants are worth computing.
        for level in &mut schedule {
            level.sort_by_key(|m| m.count_ones());
        }

        let denom_pow_n = denom.pow(n as u32);
        let tn = *spec.det_threshold.numer();
        let td = *spec.det_threshold.denom();
        Ok(Self {
            spec,
            n,
            pairs,
            schedule,
            denom,
            denom_pow_n,
            diag_unit: denom / spec.n1 as i128,
            off_unit: denom / (2 * spec.n2 as i128),
            simplex: simplex_points(spec.n1, n),
            grid: disc_grid(spec.n2),
            threshold_rhs: tn * denom_pow_n,
            threshold_lhs_factor: td,
        })
    }

    pub fn spec(&self) -> &EnumerationSpec {
        &self.spec
    }

    pub fn simplex(&self) -> &SimplexLattice {
        &self.simplex
    }

    pub fn grid(&self) -> &DiscGrid {
        &self.grid
    }

    pub fn levels(&self) -> usize {
        self.pairs.len()
    }

    pub fn fresh_stats(&self) -> RunStats {
        RunStats::with_levels(self.levels())
    }

    /// Walk the sub-enumeration rooted at one simplex point.
    pub fn enumerate_diagonal<F>(&self, diag_idx: usize, sink: &mut F, stats: &mut RunStats)
    where
        F: FnMut(EnumeratedState),
    {
        let c = self.simplex.point(diag_idx);
        // A strictly positive definite matrix needs a strictly positive
        // diagonal, so vertices and faces of the simplex contribute nothing.
        if c.iter().any(|&ci| ci == 0) {
            return;
        }

        // Admissible grid points per pair: |z|² ≤ ρ_ii ρ_jj, exactly
        // (a² + b²)·n1² ≤ 4·n2²·c_i·c_j.
        let n1_sq = (self.spec.n1 as i128) * (self.spec.n1 as i128);
        let four_n2_sq = 4 * (self.spec.n2 as i128) * (self.spec.n2 as i128);
        let mut sets: Vec<Vec<GaussInt>> = Vec::with_capacity(self.pairs.len());
        for &(i, j) in &self.pairs {
            let bound = four_n2_sq * (c[i] as i128) * (c[j] as i128);
            let set: Vec<GaussInt> = self
                .grid
                .points()
                .iter()
                .filter(|p| (p.norm_sqr_num() as i128) * n1_sq <= bound)
                .map(|p| GaussInt::new(p.a as i128 * self.off_unit, p.b as i128 * self.off_unit))
                .collect();
            if set.is_empty() {
                return;
            }
            sets.push(set);
        }
        stats.diagonals_feasible += 1;

        let diag_scaled: Vec<i128> =
            c.iter().map(|&ci| ci as i128 * self.diag_unit).collect();
        let work = ScaledHermitian::diagonal_scaled(self.n, self.denom, &diag_scaled);
        let mut walk = DiagonalWalk { enumr: self, work, sets, diag_idx, sink, stats };
        walk.descend(0, 1);
    }

    /// Full sequential run in deterministic order (ascending diagonal index,
    /// grid order within each level).
    pub fn enumerate_all<F>(&self, mut sink: F) -> RunStats
    where
        F: FnMut(EnumeratedState),
    {
        let mut stats = self.fresh_stats();
        stats.diagonals_total = self.simplex.len() as u64;
        for idx in 0..self.simplex.len() {
            self.enumerate_diagonal(idx, &mut sink, &mut stats);
        }
        stats
    }
}

struct DiagonalWalk<'a, F: FnMut(EnumeratedState)> {
    enumr: &'a Enumerator,
    work: ScaledHermitian,
    sets: Vec<Vec<GaussInt>>,
    diag_idx: usize,
    sink: &'a mut F,
    stats: &'a mut RunStats,
}

impl<F: FnMut(EnumeratedState)> DiagonalWalk<'_, F> {
    /// `mult == 1` while every entry so far is real (the conjugation-orbit
    /// representative rule applies); once a non-real entry is placed the
    /// whole subtree carries multiplicity 2.
    fn descend(&mut self, level: usize, mult: u32) {
        if level == self.enumr.pairs.len() {
            self.accept(mult);
            return;
        }
        let (i, j) = self.enumr.pairs[level];
        for idx in 0..self.sets[level].len() {
            let z = self.sets[level][idx];
            let child_mult = if self.enumr.spec.use_symmetry && mult == 1 {
                match z.im.signum() {
                    -1 => continue,
                    0 => 1,
                    _ => 2,
                }
            } else {
                mult
            };
            self.work.set_pair(i, j, z);
            self.stats.visited_nodes[level] += 1;
            let mut pruned = false;
            for &mask in &self.enumr.schedule[level] {
                if self.work.scaled_minor(mask) < 0 {
                    pruned = true;
                    break;
                }
            }
            if pruned {
                self.stats.pruned_nodes[level] += 1;
                continue;
            }
            self.descend(level + 1, child_mult);
        }
        // No undo needed: entries above `level` are only read by checks
        // scheduled at deeper levels, which always rewrite them first.
    }

    fn accept(&mut self, mult: u32) {
        self.stats.final_candidates += 1;
        // Sylvester chain: strict positivity of every leading principal
        // minor. Order 1 is the diagonal, already strictly positive.
        let mut det_scaled: i128 = 0;
        for k in 2..=self.enumr.n {
            let v = self.work.scaled_minor((1u32 << k) - 1);
            if v <= 0 {
                self.stats.rejected_not_positive += 1;
                if v == 0 {
                    self.stats.boundary_minor_zero += 1;
                    if k == self.enumr.n {
                        self.stats.boundary_det_zero += 1;
                    }
                }
                return;
            }
            det_scaled = v;
        }
        if det_scaled * self.enumr.threshold_lhs_factor < self.enumr.threshold_rhs {
            self.stats.rejected_det_threshold += 1;
            return;
        }

        let state =
            DensityMatrix::from_exact_unchecked(self.work.clone(), self.enumr.spec.dims);
        let verdict = state.is_ppt();
        self.stats.emitted += mult as u64;
        if verdict.ppt {
            self.stats.separable += mult as u64;
        }
        (self.sink)(EnumeratedState {
            state,
            verdict,
            multiplicity: mult,
            det: Rat::new(det_scaled, self.enumr.denom_pow_n),
            diagonal_index: self.diag_idx,
        });
    }
}

/// Enumerate every state for `spec`, in deterministic order, streaming each
/// one to `sink`; returns the run counters.
pub fn enumerate_states<F>(spec: &EnumerationSpec, sink: F) -> Result<RunStats>
where
    F: FnMut(EnumeratedState),
{
    Ok(Enumerator::new(*spec)?.enumerate_all(sink))
}

/// Backtracking prune test on a partially filled matrix: returns false
/// (prune) when any principal minor computable from the filled entries is
/// negative — every 2×2 minor over a filled pair, and every principal subset
/// of size ≥ 3 all of whose pairs are filled. A minor equal to zero does not
/// prune; the final strict-positivity test settles boundary cases.
pub fn prune_check(matrix: &ScaledHermitian, filled: &[(usize, usize)]) -> bool {
    let n = matrix.n();
    let mut filled_mask = vec![false; n * n];
    for &(i, j) in filled {
        assert!(i < j && j < n, "pairs must be upper-triangle indices");
        filled_mask[i * n + j] = true;
        if matrix.scaled_minor((1u32 << i) | (1u32 << j)) < 0 {
            return false;
        }
    }
    let full = (1u32 << n) - 1;
    for mask in 0..=full {
        if mask.count_ones() < 3 {
            continue;
        }
        let mut complete = true;
        'pairs: for i in 0..n {
            for j in (i + 1)..n {
                if mask >> i & 1 == 1 && mask >> j & 1 == 1 && !filled_mask[i * n + j] {
                    complete = false;
                    break 'pairs;
                }
            }
        }
        if complete && matrix.scaled_minor(mask) < 0 {
            return false;
        }
    }
    true
}
