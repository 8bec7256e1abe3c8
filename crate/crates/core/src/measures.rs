//! Random state generators.
//!
//! Product-measure sampling combines Dirichlet-distributed eigenvalues with a
//! Haar-random unitary frame; the randomized disc search instead draws raw
//! matrix entries (simplex diagonal, uniform-in-disc off-diagonals) and keeps
//! the rare draws that happen to be positive definite.
//!
//! Every sampler is a deterministic function of an explicit [`RngStream`], so
//! runs are reproducible and concurrent workers partition work by stream id
//! without sharing state.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::linalg::{BipartiteDims, ComplexMatrix};
use crate::states::{self, DensityMatrix};
use crate::{Error, Result};

/// Dirichlet concentration parameters, one per eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletParams {
    nu: Vec<f64>,
}

impl DirichletParams {
    pub fn new(nu: Vec<f64>) -> Result<Self> {
        if nu.is_empty() {
            return Err(Error::InvalidConfig("empty Dirichlet parameter vector".into()));
        }
        for &v in &nu {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositive { value: v });
            }
        }
        Ok(Self { nu })
    }

    /// Symmetric Dirichlet(ν, ..., ν) on `n` components.
    pub fn symmetric(nu: f64, n: usize) -> Result<Self> {
        Self::new(vec![nu; n])
    }

    pub fn components(&self) -> &[f64] {
        &self.nu
    }

    pub fn len(&self) -> usize {
        self.nu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nu.is_empty()
    }
}

/// Seed plus stream id; identical pairs yield identical draw sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream.into());
        rng
    }
}

/// One draw from Dirichlet(ν) as normalized independent gamma variates.
/// Components are nonnegative and sum to 1 up to a final renormalization.
pub fn sample_dirichlet<R: Rng + ?Sized>(params: &DirichletParams, rng: &mut R) -> Vec<f64> {
    loop {
        let mut draws: Vec<f64> = params
            .nu
            .iter()
            .map(|&nu| {
                Gamma::new(nu, 1.0).expect("validated shape").sample(rng)
            })
            .collect();
        let sum: f64 = draws.iter().sum();
        // Total gamma mass can underflow to zero for tiny shapes; redraw.
        if sum > 0.0 && sum.is_finite() {
            for d in &mut draws {
                *d /= sum;
            }
            return draws;
        }
    }
}

/// Haar-random N×N unitary: a complex Ginibre matrix orthonormalized by
/// modified Gram-Schmidt. Requiring the triangular factor's diagonal to be
/// real positive (which Gram-Schmidt does by construction) makes the
/// resulting Q exactly Haar-distributed.
pub fn sample_haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    assert!(n >= 1);
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
                })
                .collect()
        })
        .collect();

    for j in 0..n {
        // Two orthogonalization passes keep the defect near machine epsilon.
        for _pass in 0..2 {
            for i in 0..j {
                let proj: Complex64 = (0..n).map(|k| cols[i][k].conj() * cols[j][k]).sum();
                for k in 0..n {
                    let v = cols[i][k];
                    cols[j][k] -= proj * v;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for k in 0..n {
            cols[j][k] /= norm;
        }
    }

    let mut u = ComplexMatrix::zeros(n);
    for j in 0..n {
        for k in 0..n {
            u.set(k, j, cols[j][k]);
        }
    }
    u
}

/// ρ = U† diag(eigs) U. The spectrum of the result is `eigs` by construction;
/// degenerate inputs (any eigenvalue at or below the positivity floor) are
/// rejected.
pub fn compose_density(
    eigs: &[f64],
    u: &ComplexMatrix,
    dims: BipartiteDims,
) -> Result<DensityMatrix> {
    if u.n() != dims.n() || eigs.len() != dims.n() {
        return Err(Error::DimensionMismatch { matrix: u.n(), expected: dims.n() });
    }
    if let Some(&min) = eigs.iter().min_by(|a, b| a.partial_cmp(b).unwrap()) {
        if min <= states::EPS_POSITIVITY {
            return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
        }
    }
    let n = dims.n();
    let mut mat = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let mut acc = Complex64::ZERO;
            for (k, &lambda) in eigs.iter().enumerate() {
                acc += u.get(k, i).conj() * lambda * u.get(k, j);
            }
            if i == j {
                mat.set(i, i, Complex64::new(acc.re, 0.0));
            } else {
                mat.set(i, j, acc);
                mat.set(j, i, acc.conj());
            }
        }
    }
    Ok(DensityMatrix::from_spectral_parts(mat, eigs.to_vec(), dims))
}

/// One state from the product measure: Dirichlet eigenvalues × Haar frame.
/// Degenerate spectra (a probability-zero event) are resampled.
pub fn sample_product_measure<R: Rng + ?Sized>(
    params: &DirichletParams,
    dims: BipartiteDims,
    rng: &mut R,
) -> DensityMatrix {
    assert_eq!(params.len(), dims.n(), "Dirichlet dimension must match the state space");
    loop {
        let eigs = sample_dirichlet(params, rng);
        if eigs.iter().any(|&l| l <= states::EPS_POSITIVITY) {
            continue;
        }
        let u = sample_haar_unitary(dims.n(), rng);
        match compose_density(&eigs, &u, dims) {
            Ok(state) => return state,
            Err(_) => continue,
        }
    }
}

/// Parameters of a randomized search for density matrices in the raw
/// entry parameterization.
#[derive(Debug, Clone, Copy)]
pub struct DiscSearchSpec {
    pub dims: BipartiteDims,
    /// Off-diagonal entries are drawn uniformly in the complex disc of this
    /// radius; it cannot exceed 1/2, the modulus bound for density matrices.
    pub radius: f64,
    pub trials: u64,
}

impl DiscSearchSpec {
    pub fn new(dims: BipartiteDims, radius: f64, trials: u64) -> Result<Self> {
        if !(radius > 0.0 && radius <= 0.5) {
            return Err(Error::InvalidConfig(format!(
                "disc radius must lie in (0, 1/2], got {radius}"
            )));
        }
        Ok(Self { dims, radius, trials })
    }
}

/// Tallied outcome of a disc search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiscSearchStats {
    pub trials: u64,
    pub hits: u64,
    pub hits_separable: u64,
}

/// Run `spec.trials` independent draws: diagonal uniform on the simplex, each
/// off-diagonal uniform in the disc. Draws that validate as strictly positive
/// density matrices are passed to `sink`; failures are counted, not errors.
pub fn random_disc_search<R, F>(spec: &DiscSearchSpec, rng: &mut R, mut sink: F) -> DiscSearchStats
where
    R: Rng + ?Sized,
    F: FnMut(&DensityMatrix),
{
    let mut stats = DiscSearchStats { trials: spec.trials, ..Default::default() };
    let uniform_simplex =
        DirichletParams::symmetric(1.0, spec.dims.n()).expect("positive parameter");
    for _ in 0..spec.trials {
        if let Some(state) = disc_trial(spec, &uniform_simplex, rng) {
            stats.hits += 1;
            if state.is_ppt().ppt {
                stats.hits_separable += 1;
            }
            sink(&state);
        }
    }
    stats
}

fn disc_trial<R: Rng + ?Sized>(
    spec: &DiscSearchSpec,
    simplex: &DirichletParams,
    rng: &mut R,
) -> Option<DensityMatrix> {
    let n = spec.dims.n();
    let diag = sample_dirichlet(simplex, rng);
    let mut mat = ComplexMatrix::zeros(n);
    for (i, &d) in diag.iter().enumerate() {
        mat.set(i, i, Complex64::new(d, 0.0));
    }
    let mut plausible = true;
    for i in 0..n {
        for j in (i + 1)..n {
            // Uniform in the disc of radius `spec.radius`.
            let r = spec.radius * rng.random::<f64>().sqrt();
            let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            let z = Complex64::from_polar(r, theta);
            mat.set(i, j, z);
            mat.set(j, i, z.conj());
            // A 2x2 principal minor already negative settles the trial, but
            // every entry must still be drawn to keep the stream aligned.
            if z.norm_sqr() > diag[i] * diag[j] {
                plausible = false;
            }
        }
    }
    if !plausible {
        return None;
    }
    states::make_density(mat, spec.dims).ok()
}
