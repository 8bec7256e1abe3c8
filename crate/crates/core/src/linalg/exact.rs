//! Exact Hermitian linear algebra over Gaussian integers.
//!
//! Lattice-generated density matrices have entries whose real and imaginary
//! parts are rationals with small denominators (the simplex resolution on the
//! diagonal, twice the grid resolution off it). Multiplying through by the
//! least common denominator turns every acceptance decision — principal-minor
//! signs, the Sylvester positivity chain, determinant thresholds — into exact
//! integer arithmetic, so boundary cases (a minor equal to zero, a determinant
//! equal to the threshold) are decided deterministically.
//!
//! All magnitudes stay far below the `i128` range for the resolutions this
//! crate targets (Hadamard's bound gives < 2^60 for 6×6 matrices with the
//! largest supported denominators).

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;

use super::{BipartiteDims, ComplexMatrix};
use crate::{Error, Result};

/// Exact rational scalar.
pub type Rat = Ratio<i128>;

/// Gaussian integer `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GaussInt {
    pub re: i128,
    pub im: i128,
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };

    #[inline]
    pub fn new(re: i128, im: i128) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self { re: self.re, im: -self.im }
    }

    #[inline]
    pub fn norm_sqr(self) -> i128 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn mul(self, other: Self) -> Self {
        Self {
            re: self.re * other.re - self.im * other.im,
            im: self.re * other.im + self.im * other.re,
        }
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        Self { re: self.re + other.re, im: self.im + other.im }
    }

    #[inline]
    pub fn sub(self, other: Self) -> Self {
        Self { re: self.re - other.re, im: self.im - other.im }
    }

    #[inline]
    pub fn neg(self) -> Self {
        Self { re: -self.re, im: -self.im }
    }
}

/// Hermitian matrix with entries `(re + i·im) / denom`, `denom > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledHermitian {
    n: usize,
    denom: i128,
    entries: Vec<GaussInt>,
}

impl ScaledHermitian {
    /// Build from scaled Gaussian-integer entries (row-major, length `n*n`).
    pub fn from_scaled(n: usize, denom: i128, entries: Vec<GaussInt>) -> Result<Self> {
        assert!(n >= 1 && n <= 9, "supported dimensions are 1..=9");
        assert!(denom > 0, "denominator must be positive");
        assert_eq!(entries.len(), n * n);
        let m = Self { n, denom, entries };
        m.require_hermitian()?;
        Ok(m)
    }

    /// Build from rational entries given as (real, imaginary) pairs.
    pub fn from_rational(n: usize, entries: &[(Rat, Rat)]) -> Result<Self> {
        assert_eq!(entries.len(), n * n);
        let mut denom: i128 = 1;
        for (re, im) in entries {
            denom = denom.lcm(re.denom());
            denom = denom.lcm(im.denom());
        }
        let scaled = entries
            .iter()
            .map(|(re, im)| {
                GaussInt::new(
                    re.numer() * (denom / re.denom()),
                    im.numer() * (denom / im.denom()),
                )
            })
            .collect();
        Self::from_scaled(n, denom, scaled)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denom(&self) -> i128 {
        self.denom
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> GaussInt {
        self.entries[row * self.n + col]
    }

    fn require_hermitian(&self) -> Result<()> {
        for i in 0..self.n {
            if self.entry(i, i).im != 0 {
                return Err(Error::NotHermitian { deviation: f64::NAN, tolerance: 0.0 });
            }
            for j in (i + 1)..self.n {
                if self.entry(i, j) != self.entry(j, i).conj() {
                    return Err(Error::NotHermitian { deviation: f64::NAN, tolerance: 0.0 });
                }
            }
        }
        Ok(())
    }

    /// Exact trace.
    pub fn trace(&self) -> Rat {
        let s: i128 = (0..self.n).map(|i| self.entry(i, i).re).sum();
        Rat::new(s, self.denom)
    }

    pub fn to_complex(&self) -> ComplexMatrix {
        let d = self.denom as f64;
        let mut out = ComplexMatrix::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let e = self.entry(i, j);
                out.set(i, j, Complex64::new(e.re as f64 / d, e.im as f64 / d));
            }
        }
        out
    }

    /// Determinant of the scaled principal submatrix selected by `mask`
    /// (bit i set = index i included). The true minor is this over
    /// `denom^popcount(mask)`. Exact; the empty mask gives 1.
    pub fn scaled_minor(&self, mask: u32) -> i128 {
        let mut idx = [0usize; 9];
        let mut k = 0usize;
        let mut m = mask;
        while m != 0 {
            idx[k] = m.trailing_zeros() as usize;
            k += 1;
            m &= m - 1;
        }
        let g = match k {
            0 => GaussInt::ONE,
            1 => self.entry(idx[0], idx[0]),
            2 => det2(self, idx[0], idx[1]),
            3 => det3(self, idx[0], idx[1], idx[2]),
            _ => det_subset_dp(self, &idx[..k]),
        };
        debug_assert_eq!(g.im, 0, "principal minor of a Hermitian matrix must be real");
        g.re
    }

    /// Exact principal minor as a rational value.
    pub fn principal_minor(&self, rows: &[usize]) -> Rat {
        let mut mask: u32 = 0;
        for &r in rows {
            assert!(r < self.n);
            mask |= 1 << r;
        }
        let k = mask.count_ones();
        Rat::new(self.scaled_minor(mask), self.denom.pow(k))
    }

    /// Exact determinant.
    pub fn determinant(&self) -> Rat {
        self.principal_minor(&(0..self.n).collect::<Vec<_>>())
    }

    /// Scaled leading principal minors of orders 1..=n. Stops early after the
    /// first non-positive value (everything after it is returned as 0).
    pub fn scaled_leading_minors(&self) -> Vec<i128> {
        let mut out = Vec::with_capacity(self.n);
        for k in 1..=self.n {
            let v = self.scaled_minor((1u32 << k) - 1);
            out.push(v);
            if v <= 0 {
                out.resize(self.n, 0);
                break;
            }
        }
        out
    }

    /// Strict positive definiteness by Sylvester's criterion: all leading
    /// principal minors strictly positive.
    pub fn is_positive_definite(&self) -> bool {
        for k in 1..=self.n {
            if self.scaled_minor((1u32 << k) - 1) <= 0 {
                return false;
            }
        }
        true
    }

    /// Positive semidefiniteness via the characteristic polynomial: a
    /// Hermitian matrix is PSD iff every elementary symmetric function of its
    /// eigenvalues — the sum of all k×k principal minors — is nonnegative.
    /// (Leading minors alone are not sufficient for the semidefinite case.)
    pub fn is_positive_semidefinite(&self) -> bool {
        for k in 1..=self.n {
            let mut ek: i128 = 0;
            let mut mask: u32 = (1 << k) - 1;
            let full: u32 = 1 << self.n;
            while mask < full {
                ek += self.scaled_minor(mask);
                // Next subset of the same size (Gosper's hack).
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                mask = (((r ^ mask) >> 2) / c) | r;
            }
            if ek < 0 {
                return false;
            }
        }
        true
    }

    /// Diagonal matrix from already-scaled diagonal entries; off-diagonals
    /// zero. Used by the enumerator as a mutable workspace.
    pub(crate) fn diagonal_scaled(n: usize, denom: i128, diag: &[i128]) -> Self {
        assert_eq!(diag.len(), n);
        let mut entries = vec![GaussInt::ZERO; n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = GaussInt::new(d, 0);
        }
        Self { n, denom, entries }
    }

    /// Write the scaled off-diagonal pair (i, j) and its conjugate mirror.
    #[inline]
    pub(crate) fn set_pair(&mut self, i: usize, j: usize, value: GaussInt) {
        debug_assert!(i < j);
        self.entries[i * self.n + j] = value;
        self.entries[j * self.n + i] = value.conj();
    }

    /// Partial transpose of the second tensor factor; exactness is preserved.
    pub fn partial_transpose(&self, dims: BipartiteDims) -> Result<ScaledHermitian> {
        if self.n != dims.n() {
            return Err(Error::DimensionMismatch { matrix: self.n, expected: dims.n() });
        }
        let (da, db) = (dims.da, dims.db);
        let mut entries = vec![GaussInt::ZERO; self.n * self.n];
        for a in 0..da {
            for b in 0..db {
                for a2 in 0..da {
                    for b2 in 0..db {
                        entries[(a * db + b) * self.n + (a2 * db + b2)] =
                            self.entry(a * db + b2, a2 * db + b);
                    }
                }
            }
        }
        Ok(Self { n: self.n, denom: self.denom, entries })
    }
}

#[inline]
fn det2(m: &ScaledHermitian, i: usize, j: usize) -> GaussInt {
    let dij = m.entry(i, j);
    GaussInt::new(m.entry(i, i).re * m.entry(j, j).re - dij.norm_sqr(), 0)
}

#[inline]
fn det3(m: &ScaledHermitian, i: usize, j: usize, k: usize) -> GaussInt {
    let di = m.entry(i, i).re;
    let dj = m.entry(j, j).re;
    let dk = m.entry(k, k).re;
    let a = m.entry(i, j);
    let b = m.entry(j, k);
    let c = m.entry(i, k);
    // det = di dj dk + 2 Re(a b c̄) − di |b|² − dj |c|² − dk |a|².
    let abc = a.mul(b).mul(c.conj());
    GaussInt::new(
        di * dj * dk + 2 * abc.re - di * b.norm_sqr() - dj * c.norm_sqr() - dk * a.norm_sqr(),
        0,
    )
}

/// Determinant by Laplace expansion with shared sub-minors: `table[cols]`
/// holds the minor of the last `popcount(cols)` rows against column set
/// `cols`. O(k·2^k) Gaussian multiplications, no divisions.
fn det_subset_dp(m: &ScaledHermitian, idx: &[usize]) -> GaussInt {
    let k = idx.len();
    if k <= 6 {
        let mut table = [GaussInt::ZERO; 64];
        det_subset_dp_in(m, idx, &mut table[..1 << k])
    } else {
        let mut table = vec![GaussInt::ZERO; 1 << k];
        det_subset_dp_in(m, idx, &mut table)
    }
}

fn det_subset_dp_in(m: &ScaledHermitian, idx: &[usize], table: &mut [GaussInt]) -> GaussInt {
    let k = idx.len();
    table[0] = GaussInt::ONE;
    for mask in 1u32..(1 << k) as u32 {
        let rows_used = mask.count_ones() as usize;
        let row = idx[k - rows_used];
        let mut acc = GaussInt::ZERO;
        let mut rest = mask;
        let mut rank = 0u32;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let sub = table[(mask & !(1u32 << c)) as usize];
            if !(sub.re == 0 && sub.im == 0) {
                let term = m.entry(row, idx[c]).mul(sub);
                acc = if rank % 2 == 0 { acc.add(term) } else { acc.sub(term) };
            }
            rank += 1;
        }
        table[mask as usize] = acc;
    }
    table[(1 << k) - 1]
}

/// Parse an exact rational from `"p/q"`, a decimal string, or an integer.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = |_| Error::InvalidConfig(format!("cannot parse rational '{s}'"));
    if let Some((num, den)) = s.split_once('/') {
        let n: i128 = num.trim().parse().map_err(bad)?;
        let d: i128 = den.trim().parse().map_err(bad)?;
        if d == 0 {
            return Err(Error::InvalidConfig(format!("zero denominator in '{s}'")));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let sign = if int.trim_start().starts_with('-') { -1 } else { 1 };
        let i: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(bad)? };
        if frac.is_empty() {
            return Ok(Rat::from_integer(i));
        }
        let f: i128 = frac.parse().map_err(bad)?;
        if f < 0 {
            return Err(Error::InvalidConfig(format!("cannot parse rational '{s}'")));
        }
        let scale = 10i128.checked_pow(frac.len() as u32).ok_or_else(|| {
            Error::InvalidConfig(format!("too many decimal digits in '{s}'"))
        })?;
        return Ok(Rat::from_integer(i) + Rat::new(sign * f, scale));
    }
    Ok(Rat::from_integer(s.parse().map_err(bad)?))
}
