//! Density matrices and per-state observables.
//!
//! A [`DensityMatrix`] is Hermitian with unit trace and a strictly positive
//! spectrum (the mixed-state convention: rank-deficient matrices are rejected
//! because the metric weights are singular on them). Lattice-generated states
//! additionally carry their exact rational form, which makes the PPT verdict
//! a deterministic sign computation instead of a floating comparison.

use std::sync::OnceLock;

use crate::linalg::exact::ScaledHermitian;
use crate::linalg::{self, BipartiteDims, ComplexMatrix};
use crate::{Error, Result};

/// PPT verdict tolerance on the smallest partial-transpose eigenvalue.
pub const EPS_PPT: f64 = 1e-12;

/// Floating-point strict-positivity threshold for state validation.
pub const EPS_POSITIVITY: f64 = 1e-12;

/// Unit-trace tolerance for floating-point states.
pub const EPS_TRACE: f64 = 1e-12;

/// Outcome of the partial-transposition test.
///
/// For 2×2 and 2×3 systems positivity of the partial transpose is necessary
/// and sufficient for separability; for larger systems it is necessary only,
/// and callers should label pass rates as upper bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparabilityVerdict {
    pub ppt: bool,
    pub min_pt_eigenvalue: f64,
}

/// Whether PPT is equivalent to separability at these dimensions.
pub fn ppt_is_conclusive(dims: BipartiteDims) -> bool {
    dims.n() <= 6
}

/// A validated bipartite mixed state.
#[derive(Debug)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    exact: Option<ScaledHermitian>,
    dims: BipartiteDims,
    spectrum: OnceLock<Vec<f64>>,
    pt_spectrum: OnceLock<Vec<f64>>,
}

impl Clone for DensityMatrix {
    fn clone(&self) -> Self {
        Self {
            mat: self.mat.clone(),
            exact: self.exact.clone(),
            dims: self.dims,
            spectrum: self.spectrum.clone(),
            pt_spectrum: self.pt_spectrum.clone(),
        }
    }
}

/// Validate a floating matrix as a mixed state.
pub fn make_density(mat: ComplexMatrix, dims: BipartiteDims) -> Result<DensityMatrix> {
    if mat.n() != dims.n() {
        return Err(Error::DimensionMismatch { matrix: mat.n(), expected: dims.n() });
    }
    let deviation = mat.hermitian_deviation();
    if deviation > linalg::TAU_HERM {
        return Err(Error::NotHermitian { deviation, tolerance: linalg::TAU_HERM });
    }
    let trace = mat.trace().re;
    if (trace - 1.0).abs() > EPS_TRACE {
        return Err(Error::TraceNotOne { trace });
    }
    let spectrum = linalg::hermitian_eigenvalues(&mat)?;
    if spectrum[0] <= EPS_POSITIVITY {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: spectrum[0] });
    }
    let state = DensityMatrix {
        mat,
        exact: None,
        dims,
        spectrum: OnceLock::new(),
        pt_spectrum: OnceLock::new(),
    };
    let _ = state.spectrum.set(spectrum);
    Ok(state)
}

/// Validate an exact rational matrix as a mixed state. Positivity is decided
/// by the exact Sylvester criterion, so boundary cases never depend on
/// floating rounding.
pub fn make_density_exact(exact: ScaledHermitian, dims: BipartiteDims) -> Result<DensityMatrix> {
    if exact.n() != dims.n() {
        return Err(Error::DimensionMismatch { matrix: exact.n(), expected: dims.n() });
    }
    if exact.trace() != num_rational::Ratio::from_integer(1) {
        let t = exact.trace();
        return Err(Error::TraceNotOne { trace: *t.numer() as f64 / *t.denom() as f64 });
    }
    if !exact.is_positive_definite() {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: f64::NAN });
    }
    Ok(DensityMatrix::from_exact_unchecked(exact, dims))
}

impl DensityMatrix {
    /// Exact matrix already proven Hermitian, unit-trace and positive
    /// definite by the caller (the lattice enumerator).
    pub(crate) fn from_exact_unchecked(exact: ScaledHermitian, dims: BipartiteDims) -> Self {
        debug_assert!(exact.is_positive_definite());
        DensityMatrix {
            mat: exact.to_complex(),
            exact: Some(exact),
            dims,
            spectrum: OnceLock::new(),
            pt_spectrum: OnceLock::new(),
        }
    }

    /// Spectrally constructed state: `mat = U† diag(eigs) U` with known
    /// spectrum, already validated by the sampler.
    pub(crate) fn from_spectral_parts(
        mat: ComplexMatrix,
        mut eigs: Vec<f64>,
        dims: BipartiteDims,
    ) -> Self {
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let state = DensityMatrix {
            mat,
            exact: None,
            dims,
            spectrum: OnceLock::new(),
            pt_spectrum: OnceLock::new(),
        };
        let _ = state.spectrum.set(eigs);
        state
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn exact(&self) -> Option<&ScaledHermitian> {
        self.exact.as_ref()
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn n(&self) -> usize {
        self.dims.n()
    }

    /// Eigenvalues ascending, computed once on first use.
    pub fn spectrum(&self) -> &[f64] {
        self.spectrum.get_or_init(|| {
            linalg::hermitian_eigenvalues(&self.mat).expect("validated state is Hermitian")
        })
    }

    /// Eigenvalues of the partial transpose, ascending, computed once.
    pub fn pt_spectrum(&self) -> &[f64] {
        self.pt_spectrum.get_or_init(|| {
            let pt = linalg::partial_transpose(&self.mat, self.dims)
                .expect("dimensions validated at construction");
            linalg::hermitian_eigenvalues(&pt).expect("partial transpose stays Hermitian")
        })
    }

    /// Peres–Horodecki test: is the partial transpose positive?
    ///
    /// Exact states are decided by exact principal-minor signs; floating
    /// states by the smallest partial-transpose eigenvalue against
    /// [`EPS_PPT`].
    pub fn is_ppt(&self) -> SeparabilityVerdict {
        let min_pt_eigenvalue = self.pt_spectrum()[0];
        let ppt = match &self.exact {
            Some(exact) => exact
                .partial_transpose(self.dims)
                .expect("dimensions validated at construction")
                .is_positive_semidefinite(),
            None => min_pt_eigenvalue >= -EPS_PPT,
        };
        SeparabilityVerdict { ppt, min_pt_eigenvalue }
    }

    /// Participation ratio R = 1/Tr(ρ²), between 1 (pure) and N (maximally
    /// mixed). Computed from the entries, not the spectrum.
    pub fn participation_ratio(&self) -> f64 {
        let n = self.mat.n();
        let mut purity = 0.0f64;
        for i in 0..n {
            purity += self.mat.get(i, i).re.powi(2);
            for j in (i + 1)..n {
                purity += 2.0 * self.mat.get(i, j).norm_sqr();
            }
        }
        1.0 / purity
    }

    /// Degree of entanglement Σ|λ'_i| − 1 over the partial-transpose
    /// spectrum (twice the negativity). Zero exactly on PPT states.
    ///
    /// The λ' are taken as absolute values of the partial-transpose
    /// eigenvalues; this vanishes on separable states and stays within
    /// [0, 1] for two-qubit systems.
    pub fn degree_of_entanglement(&self) -> f64 {
        self.pt_spectrum().iter().map(|l| l.abs()).sum::<f64>() - 1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn maximally_mixed(dims: BipartiteDims) -> DensityMatrix {
        let n = dims.n();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, c(1.0 / n as f64, 0.0));
        }
        make_density(m, dims).unwrap()
    }

    /// Werner state p·|Φ+⟩⟨Φ+| + (1−p)·I/4.
    pub(crate) fn werner(p: f64) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(4);
        let off = 0.5 * p;
        let base = (1.0 - p) / 4.0;
        for i in 0..4 {
            m.set(i, i, c(base, 0.0));
        }
        m.set(0, 0, c(base + off, 0.0));
        m.set(3, 3, c(base + off, 0.0));
        m.set(0, 3, c(off, 0.0));
        m.set(3, 0, c(off, 0.0));
        m
    }

    #[test]
    fn maximally_mixed_is_valid_and_ppt() {
        let rho = maximally_mixed(BipartiteDims::new(2, 2));
        let verdict = rho.is_ppt();
        assert!(verdict.ppt);
        assert!((verdict.min_pt_eigenvalue - 0.25).abs() < 1e-14);
        assert!((rho.participation_ratio() - 4.0).abs() < 1e-12);
        assert!(rho.degree_of_entanglement().abs() < 1e-12);
    }

    #[test]
    fn pure_and_rank_deficient_states_rejected() {
        let bell = {
            let h = c(0.5, 0.0);
            let z = Complex64::ZERO;
            ComplexMatrix::from_rows(4, &[h, z, z, h, z, z, z, z, z, z, z, z, h, z, z, h])
        };
        assert!(matches!(
            make_density(bell, BipartiteDims::new(2, 2)),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let half = ComplexMatrix::from_diagonal(&[0.5, 0.5, 0.0, 0.0]);
        assert!(make_density(half, BipartiteDims::new(2, 2)).is_err());
    }

    #[test]
    fn trace_and_hermiticity_validated() {
        let m = ComplexMatrix::from_diagonal(&[0.5, 0.5, 0.5, 0.5]);
        assert!(matches!(
            make_density(m, BipartiteDims::new(2, 2)),
            Err(Error::TraceNotOne { .. })
        ));
        let mut bad = ComplexMatrix::from_diagonal(&[0.25; 4]);
        bad.set(0, 1, c(0.1, 0.0));
        assert!(matches!(
            make_density(bad, BipartiteDims::new(2, 2)),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn werner_state_ppt_thresholds() {
        // min PT eigenvalue of the Werner state is (1 − 3p)/4.
        let rho = make_density(werner(0.5), BipartiteDims::new(2, 2)).unwrap();
        let verdict = rho.is_ppt();
        assert!(!verdict.ppt);
        assert!((verdict.min_pt_eigenvalue + 0.125).abs() < 1e-13);

        let rho = make_density(werner(0.2), BipartiteDims::new(2, 2)).unwrap();
        let verdict = rho.is_ppt();
        assert!(verdict.ppt);
        assert!((verdict.min_pt_eigenvalue - 0.1).abs() < 1e-13);
    }

    #[test]
    fn werner_degree_of_entanglement() {
        // PT spectrum at p = 0.5 is (−0.125, 0.375, 0.375, 0.375), so
        // Σ|λ'| − 1 = 0.25.
        let rho = make_density(werner(0.5), BipartiteDims::new(2, 2)).unwrap();
        assert!((rho.degree_of_entanglement() - 0.25).abs() < 1e-13);
        // Entangled branch: d = (3p − 1)/2, approaching 1 at the pure Bell
        // state (PT spectrum {−1/2, 1/2, 1/2, 1/2}).
        let rho = make_density(werner(0.999), BipartiteDims::new(2, 2)).unwrap();
        assert!((rho.degree_of_entanglement() - (3.0 * 0.999 - 1.0) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn participation_ratio_from_spectrum() {
        let m = ComplexMatrix::from_diagonal(&[0.4, 0.3, 0.2, 0.1]);
        let rho = make_density(m, BipartiteDims::new(2, 2)).unwrap();
        assert!((rho.participation_ratio() - 1.0 / 0.30).abs() < 1e-12);
        // Near-pure limit: R -> 1.
        let delta = 1e-9;
        let m = ComplexMatrix::from_diagonal(&[delta, delta, delta, 1.0 - 3.0 * delta]);
        let rho = make_density(m, BipartiteDims::new(2, 2)).unwrap();
        assert!((rho.participation_ratio() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn degree_of_entanglement_vanishes_iff_ppt() {
        for p in [0.0, 0.1, 0.2, 0.33, 1.0 / 3.0 + 0.01, 0.6, 0.9] {
            let Ok(rho) = make_density(werner(p), BipartiteDims::new(2, 2)) else {
                continue;
            };
            let d = rho.degree_of_entanglement();
            let ppt = rho.is_ppt().ppt;
            assert_eq!(d.abs() <= 2.0 * EPS_PPT, ppt, "p = {p}, d = {d}");
        }
    }

    #[test]
    fn exact_states_use_exact_ppt_verdict() {
        use crate::linalg::exact::{GaussInt, ScaledHermitian};
        // Werner state at p = 1/3, the exact PPT boundary: entries over
        // denominator 6 are diag(2, 1, 1, 2) with corners (0,3) = 1. The
        // partial transpose has a zero eigenvalue exactly; the exact verdict
        // must call it PPT.
        let g = |v| GaussInt::new(v, 0);
        #[rustfmt::skip]
        let entries = vec![
            g(2), g(0), g(0), g(1),
            g(0), g(1), g(0), g(0),
            g(0), g(0), g(1), g(0),
            g(1), g(0), g(0), g(2),
        ];
        let exact = ScaledHermitian::from_scaled(4, 6, entries).unwrap();
        let rho = make_density_exact(exact, BipartiteDims::new(2, 2)).unwrap();
        let verdict = rho.is_ppt();
        assert!(verdict.ppt);
        assert!(verdict.min_pt_eigenvalue.abs() < 1e-12);
        assert!(rho.degree_of_entanglement().abs() < 1e-10);
    }

    #[test]
    fn ppt_conclusiveness_by_dimension() {
        assert!(ppt_is_conclusive(BipartiteDims::new(2, 2)));
        assert!(ppt_is_conclusive(BipartiteDims::new(2, 3)));
        assert!(!ppt_is_conclusive(BipartiteDims::new(3, 3)));
    }
}
