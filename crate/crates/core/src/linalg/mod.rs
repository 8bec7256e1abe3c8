//! Complex linear algebra for small (≤ 9×9) Hermitian matrices.
//!
//! Two representations live here: [`ComplexMatrix`] holds floating entries and
//! backs every spectral quantity, while [`exact::ScaledHermitian`] holds exact
//! Gaussian-integer entries over a common denominator and backs every lattice
//! acceptance decision.

pub mod exact;
mod jacobi;

use num_complex::Complex64;

use crate::{Error, Result};

/// Absolute Hermiticity tolerance for floating-point matrices.
pub const TAU_HERM: f64 = 1e-12;

/// Dimensions of a bipartite split: the full space is `dA * dB`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BipartiteDims {
    pub da: usize,
    pub db: usize,
}

impl BipartiteDims {
    pub fn new(da: usize, db: usize) -> Self {
        assert!(da >= 2 && db >= 2, "bipartite factors must be at least 2");
        Self { da, db }
    }

    /// Total dimension `dA * dB`.
    pub fn n(&self) -> usize {
        self.da * self.db
    }
}

impl std::fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{}", self.da, self.db)
    }
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        Self { n, data: vec![Complex64::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    /// Build from a row-major slice of length `n*n`.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Self {
        assert_eq!(entries.len(), n * n);
        Self { n, data: entries.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.n + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.n + col] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest absolute deviation from `M = M†`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            worst = worst.max(self.get(i, i).im.abs());
            for j in (i + 1)..self.n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.hermitian_deviation() <= tolerance
    }

    fn require_hermitian(&self) -> Result<()> {
        let deviation = self.hermitian_deviation();
        if deviation > TAU_HERM {
            return Err(Error::NotHermitian { deviation, tolerance: TAU_HERM });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Maximum entry modulus of `self† self − I`, a unitarity defect.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { Complex64::ONE } else { Complex64::ZERO };
                worst = worst.max((p.get(i, j) - target).norm());
            }
        }
        worst
    }
}

/// Eigenvalues of a Hermitian matrix, ascending, via cyclic Jacobi rotations.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    m.require_hermitian()?;
    jacobi::eigenvalues(m)
}

/// Determinant of a Hermitian matrix, by LU factorization with partial
/// pivoting. Independent of the Jacobi eigensolver.
pub fn determinant(m: &ComplexMatrix) -> Result<f64> {
    m.require_hermitian()?;
    Ok(lu_determinant(m).re)
}

/// Determinant of the principal submatrix selected by `rows` (sorted, deduped
/// internally). The empty selection has determinant 1.
pub fn principal_minor(m: &ComplexMatrix, rows: &[usize]) -> Result<f64> {
    let mut idx: Vec<usize> = rows.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.is_empty() {
        return Ok(1.0);
    }
    assert!(*idx.last().unwrap() < m.n(), "row index out of range");
    let k = idx.len();
    let mut sub = ComplexMatrix::zeros(k);
    for (a, &i) in idx.iter().enumerate() {
        for (b, &j) in idx.iter().enumerate() {
            sub.set(a, b, m.get(i, j));
        }
    }
    sub.require_hermitian()?;
    Ok(lu_determinant(&sub).re)
}

fn lu_determinant(m: &ComplexMatrix) -> Complex64 {
    let n = m.n();
    let mut a = m.clone();
    let mut det = Complex64::ONE;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a.get(col, col).norm();
        for r in (col + 1)..n {
            let v = a.get(r, col).norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Complex64::ZERO;
        }
        if pivot != col {
            for j in 0..n {
                let (x, y) = (a.get(col, j), a.get(pivot, j));
                a.set(col, j, y);
                a.set(pivot, j, x);
            }
            det = -det;
        }
        let p = a.get(col, col);
        det *= p;
        for r in (col + 1)..n {
            let factor = a.get(r, col) / p;
            for j in col..n {
                let v = a.get(r, j) - factor * a.get(col, j);
                a.set(r, j, v);
            }
        }
    }
    det
}

/// Transpose the second tensor factor of a bipartite matrix: with composite
/// index `(a, b) -> a*dB + b`, `out(a,b; a',b') = in(a,b'; a',b)`.
///
/// The PPT verdict does not depend on which factor is transposed (transposing
/// the first factor yields the overall transpose, which has the same
/// spectrum), so the second-factor convention is fixed here once.
pub fn partial_transpose(m: &ComplexMatrix, dims: BipartiteDims) -> Result<ComplexMatrix> {
    let n = m.n();
    if n != dims.n() {
        return Err(Error::DimensionMismatch { matrix: n, expected: dims.n() });
    }
    let (da, db) = (dims.da, dims.db);
    let mut out = ComplexMatrix::zeros(n);
    for a in 0..da {
        for b in 0..db {
            for a2 in 0..da {
                for b2 in 0..db {
                    out.set(a * db + b, a2 * db + b2, m.get(a * db + b2, a2 * db + b));
                }
            }
        }
    }
    Ok(out)
}
