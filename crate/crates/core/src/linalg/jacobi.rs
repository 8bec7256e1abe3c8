//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first strips the phase of the targeted off-diagonal entry,
//! reducing the 2×2 pivot block to a real symmetric one, then applies the
//! classical Jacobi rotation that annihilates it. Unconditionally stable at
//! the dimensions used here (≤ 9).

use num_complex::Complex64;

use super::ComplexMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigenvalues in ascending order.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = m.n();
    if n == 1 {
        return Ok(vec![m.get(0, 0).re]);
    }
    let mut a = m.clone();
    // Symmetrize exactly so rounding in the input cannot bias rotations.
    for i in 0..n {
        a.set(i, i, Complex64::new(a.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let avg = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            a.set(i, j, avg);
            a.set(j, i, avg.conj());
        }
    }

    let norm = a.frobenius_norm().max(f64::MIN_POSITIVE);
    let threshold = 1e-14 * norm;

    for _ in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    s += 2.0 * a.get(i, j).norm_sqr();
                }
            }
            s.sqrt()
        };
        if off < threshold {
            let mut eigs: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
            eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
            return Ok(eigs);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, p, q);
            }
        }
    }
    Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
}

/// Annihilate entry (p, q) by the unitary J with
/// `J[p][p] = c`, `J[p][q] = s·e^{iφ}`, `J[q][p] = −s·e^{−iφ}`, `J[q][q] = c`,
/// where φ = arg A[p][q], applied as A ← J† A J.
fn rotate(a: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a.get(p, q);
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase = apq / g; // e^{iφ}
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;

    let theta = (beta - alpha) / (2.0 * g);
    let t = if theta.abs() > 1e153 {
        // Avoid overflow in theta^2; the rotation angle is ~1/(2 theta).
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let n = a.n();
    let jpq = phase * s; // J[p][q]
    let jqp = -phase.conj() * s; // J[q][p]

    // Right-multiply columns p, q by J.
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c + akq * jqp);
        a.set(k, q, akp * jpq + akq * c);
    }
    // Left-multiply rows p, q by J†.
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, apk * c + aqk * jqp.conj());
        a.set(q, k, apk * jpq.conj() + aqk * c);
    }

    // The pivot pair is now real on the diagonal and zero off it; pin the
    // rounding residue so later sweeps see exact structure.
    a.set(p, q, Complex64::ZERO);
    a.set(q, p, Complex64::ZERO);
    a.set(p, p, Complex64::new(a.get(p, p).re, 0.0));
    a.set(q, q, Complex64::new(a.get(q, q).re, 0.0));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_complex_offdiagonal() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2.
        let mut m = ComplexMatrix::zeros(2);
        m.set(0, 0, Complex64::new(1.0, 0.0));
        m.set(1, 1, Complex64::new(1.0, 0.0));
        m.set(0, 1, Complex64::new(0.0, 1.0));
        m.set(1, 0, Complex64::new(0.0, -1.0));
        let eigs = eigenvalues(&m).unwrap();
        assert!((eigs[0] - 0.0).abs() < 1e-14);
        assert!((eigs[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn nine_by_nine_moments() {
        // Dense 9x9 Hermitian with deterministic entries; verify power sums
        // against traces of matrix powers.
        let n = 9;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, Complex64::new(((i * i + 3) as f64 * 0.37).sin(), 0.0));
            for j in (i + 1)..n {
                let re = ((i * 13 + j * 5) as f64 * 0.21).sin() * 0.4;
                let im = ((i * 3 + j * 11) as f64 * 0.17).cos() * 0.4;
                m.set(i, j, Complex64::new(re, im));
                m.set(j, i, Complex64::new(re, -im));
            }
        }
        let eigs = eigenvalues(&m).unwrap();
        assert!(eigs.windows(2).all(|w| w[0] <= w[1]));
        let mut pk = ComplexMatrix::identity(n);
        for power in 1..=4usize {
            pk = pk.matmul(&m);
            let trace = pk.trace().re;
            let sum: f64 = eigs.iter().map(|l| l.powi(power as i32)).sum();
            assert!(
                (trace - sum).abs() < 1e-9 * trace.abs().max(1.0),
                "power {power}: {trace} vs {sum}"
            );
        }
    }
}
