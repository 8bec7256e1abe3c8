//! C ABI for the separability-probability library.
//!
//! Conventions: every fallible call returns a [`SepStatus`] and writes its
//! results through out-pointers; handles are opaque and freed with their
//! dedicated `_free` function; no call unwinds across the boundary.
//!
//! The header `include/sepprob.h` is generated from this file by cbindgen at
//! build time.

use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sepprob::enumerate::{disc_grid, simplex_count, EnumerationSpec};
use sepprob::estimate::run::{run_enumeration, run_product_sample, EstimateOptions};
use sepprob::estimate::{finalize, unweighted_estimate};
use sepprob::linalg::exact::parse_rational;
use sepprob::linalg::{BipartiteDims, ComplexMatrix};
use sepprob::measures::DirichletParams;
use sepprob::metrics::MetricKind;
use sepprob::states::{make_density, DensityMatrix};
use sepprob::Error;

/// Call outcome. Anything other than `Ok` leaves out-parameters untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotHermitian = 3,
    TraceNotOne = 4,
    NotPositiveDefinite = 5,
    DimensionMismatch = 6,
    NumericFailure = 7,
    InternalPanic = 8,
}

/// Metric selector mirroring the library's four monotone metrics.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepMetric {
    Minimal = 0,
    Kmb = 1,
    Maximal = 2,
    Identric = 3,
}

impl From<SepMetric> for MetricKind {
    fn from(m: SepMetric) -> Self {
        match m {
            SepMetric::Minimal => MetricKind::Minimal,
            SepMetric::Kmb => MetricKind::Kmb,
            SepMetric::Maximal => MetricKind::Maximal,
            SepMetric::Identric => MetricKind::Identric,
        }
    }
}

/// Opaque handle to a validated density matrix.
pub struct SepState {
    inner: DensityMatrix,
}

/// Aggregate result of an exact lattice enumeration. Probabilities are
/// weighted by the volume element of each monotone metric; `d_*` are the
/// weighted average degrees of entanglement.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct SepEnumerationSummary {
    pub states: u64,
    pub separable: u64,
    pub p_minimal: f64,
    pub p_kmb: f64,
    pub p_maximal: f64,
    pub p_identric: f64,
    pub d_minimal: f64,
    pub d_kmb: f64,
    pub d_maximal: f64,
    pub d_identric: f64,
}

fn status_of(err: &Error) -> SepStatus {
    match err {
        Error::NotHermitian { .. } => SepStatus::NotHermitian,
        Error::TraceNotOne { .. } => SepStatus::TraceNotOne,
        Error::NotPositiveDefinite { .. } => SepStatus::NotPositiveDefinite,
        Error::DimensionMismatch { .. } => SepStatus::DimensionMismatch,
        Error::InvalidConfig(_) | Error::NonPositive { .. } => SepStatus::InvalidArgument,
        _ => SepStatus::NumericFailure,
    }
}

fn guarded(f: impl FnOnce() -> SepStatus) -> SepStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(SepStatus::InternalPanic)
}

fn dims_of(dim_a: usize, dim_b: usize) -> Result<BipartiteDims, SepStatus> {
    if dim_a < 2 || dim_b < 2 || dim_a * dim_b > 9 {
        return Err(SepStatus::InvalidArgument);
    }
    Ok(BipartiteDims::new(dim_a, dim_b))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sep_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Build a density matrix from row-major real and imaginary parts of an
/// n×n matrix (n = dim_a·dim_b). Validates Hermiticity, unit trace and
/// strict positivity; on success `*out` owns a new handle.
///
/// # Safety
/// `re` and `im` must point to `n*n` readable doubles; `out` must be a valid
/// pointer. The handle must be released with [`sep_state_free`].
#[no_mangle]
pub unsafe extern "C" fn sep_state_new(
    re: *const f64,
    im: *const f64,
    dim_a: usize,
    dim_b: usize,
    out: *mut *mut SepState,
) -> SepStatus {
    if re.is_null() || im.is_null() || out.is_null() {
        return SepStatus::NullPointer;
    }
    if dims_of(dim_a, dim_b).is_err() {
        return SepStatus::InvalidArgument;
    }
    let n = dim_a * dim_b;
    let res = unsafe { std::slice::from_raw_parts(re, n * n) };
    let ims = unsafe { std::slice::from_raw_parts(im, n * n) };
    guarded(|| {
        let dims = BipartiteDims::new(dim_a, dim_b);
        let mut mat = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                mat.set(i, j, num_complex::Complex64::new(res[i * n + j], ims[i * n + j]));
            }
        }
        match make_density(mat, dims) {
            Ok(state) => {
                unsafe { *out = Box::into_raw(Box::new(SepState { inner: state })) };
                SepStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release a handle created by this library. NULL is a no-op.
///
/// # Safety
/// `state` must be a pointer returned by [`sep_state_new`] (or NULL) that has
/// not already been freed.
#[no_mangle]
pub unsafe extern "C" fn sep_state_free(state: *mut SepState) {
    if !state.is_null() {
        drop(unsafe { Box::from_raw(state) });
    }
}

/// Peres–Horodecki test: `*ppt` is true when the partial transpose is
/// positive; `*min_pt_eigenvalue` receives its smallest eigenvalue.
///
/// # Safety
/// `state` must be a live handle; out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_state_is_ppt(
    state: *const SepState,
    ppt: *mut bool,
    min_pt_eigenvalue: *mut f64,
) -> SepStatus {
    if state.is_null() || ppt.is_null() || min_pt_eigenvalue.is_null() {
        return SepStatus::NullPointer;
    }
    let state = unsafe { &*state };
    guarded(|| {
        let verdict = state.inner.is_ppt();
        unsafe {
            *ppt = verdict.ppt;
            *min_pt_eigenvalue = verdict.min_pt_eigenvalue;
        }
        SepStatus::Ok
    })
}

/// Participation ratio R = 1/Tr(ρ²).
///
/// # Safety
/// `state` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_state_participation_ratio(
    state: *const SepState,
    out: *mut f64,
) -> SepStatus {
    if state.is_null() || out.is_null() {
        return SepStatus::NullPointer;
    }
    let state = unsafe { &*state };
    guarded(|| {
        unsafe { *out = state.inner.participation_ratio() };
        SepStatus::Ok
    })
}

/// Degree of entanglement Σ|λ'| − 1 over the partial-transpose spectrum.
///
/// # Safety
/// `state` must be a live handle; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_state_degree_of_entanglement(
    state: *const SepState,
    out: *mut f64,
) -> SepStatus {
    if state.is_null() || out.is_null() {
        return SepStatus::NullPointer;
    }
    let state = unsafe { &*state };
    guarded(|| {
        unsafe { *out = state.inner.degree_of_entanglement() };
        SepStatus::Ok
    })
}

/// Eigenvalues in ascending order, written to `out[0..n]`.
///
/// # Safety
/// `state` must be a live handle; `out` must hold `dim_a*dim_b` doubles.
#[no_mangle]
pub unsafe extern "C" fn sep_state_spectrum(
    state: *const SepState,
    out: *mut f64,
) -> SepStatus {
    if state.is_null() || out.is_null() {
        return SepStatus::NullPointer;
    }
    let state = unsafe { &*state };
    guarded(|| {
        let spectrum = state.inner.spectrum();
        unsafe { std::slice::from_raw_parts_mut(out, spectrum.len()) }.copy_from_slice(spectrum);
        SepStatus::Ok
    })
}

/// Morozova–Chentsov kernel f(a, b) of the chosen metric.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sep_mc_function(
    metric: SepMetric,
    a: f64,
    b: f64,
    out: *mut f64,
) -> SepStatus {
    if out.is_null() {
        return SepStatus::NullPointer;
    }
    guarded(|| match sepprob::metrics::mc_function(metric.into(), a, b) {
        Ok(v) => {
            unsafe { *out = v };
            SepStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Volume-element weight of a strictly positive spectrum of length `n`.
///
/// # Safety
/// `eigs` must point to `n` readable doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_volume_weight(
    metric: SepMetric,
    eigs: *const f64,
    n: usize,
    out: *mut f64,
) -> SepStatus {
    if eigs.is_null() || out.is_null() {
        return SepStatus::NullPointer;
    }
    let eigs = unsafe { std::slice::from_raw_parts(eigs, n) };
    guarded(|| match sepprob::metrics::volume_weight(metric.into(), eigs) {
        Ok(v) => {
            unsafe { *out = v };
            SepStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Monte Carlo estimate of the separability probability under the product
/// measure with symmetric Dirichlet(ν) eigenvalues. For systems larger than
/// 2x3 the estimate is a PPT pass rate, an upper bound on separability.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_product_sample_estimate(
    dim_a: usize,
    dim_b: usize,
    nu: f64,
    samples: u64,
    seed: u64,
    p_hat: *mut f64,
    stderr_out: *mut f64,
    separable: *mut u64,
) -> SepStatus {
    if p_hat.is_null() || stderr_out.is_null() || separable.is_null() {
        return SepStatus::NullPointer;
    }
    guarded(|| {
        let dims = match dims_of(dim_a, dim_b) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let params = match DirichletParams::symmetric(nu, dims.n()) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        match run_product_sample(&params, dims, samples, seed) {
            Ok((n, sep)) => {
                let (p, se) = unweighted_estimate(n, sep);
                unsafe {
                    *p_hat = p;
                    *stderr_out = se;
                    *separable = sep;
                }
                SepStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Exact lattice enumeration with all four metric weights.
/// `det_threshold` is an exact rational string like "1/2560000"; NULL means
/// zero. Runs on the global thread pool; fine resolutions take minutes.
///
/// # Safety
/// `det_threshold` must be NULL or a NUL-terminated string; `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sep_enumerate(
    dim_a: usize,
    dim_b: usize,
    n1: u32,
    n2: u32,
    det_threshold: *const c_char,
    use_symmetry: bool,
    out: *mut SepEnumerationSummary,
) -> SepStatus {
    if out.is_null() {
        return SepStatus::NullPointer;
    }
    let threshold_text = if det_threshold.is_null() {
        None
    } else {
        match unsafe { CStr::from_ptr(det_threshold) }.to_str() {
            Ok(s) => Some(s.to_owned()),
            Err(_) => return SepStatus::InvalidArgument,
        }
    };
    guarded(|| {
        let dims = match dims_of(dim_a, dim_b) {
            Ok(d) => d,
            Err(s) => return s,
        };
        let threshold = match threshold_text.as_deref().map(parse_rational).transpose() {
            Ok(t) => t.unwrap_or_default(),
            Err(e) => return status_of(&e),
        };
        let spec = match EnumerationSpec::new(dims, n1, n2, threshold, use_symmetry) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let opts = EstimateOptions { kinds: MetricKind::ALL.to_vec(), ..Default::default() };
        let run = match run_enumeration(&spec, &[threshold], &opts) {
            Ok(r) => r,
            Err(e) => return status_of(&e),
        };
        let tally = &run.outcomes[0].tally;
        let mut summary = SepEnumerationSummary {
            states: tally.n,
            separable: tally.n_separable,
            ..Default::default()
        };
        if tally.n > 0 {
            let metrics = match finalize(tally) {
                Ok(m) => m,
                Err(e) => return status_of(&e),
            };
            for m in &metrics {
                let (p, d) = (m.p.unwrap_or(f64::NAN), m.d.unwrap_or(f64::NAN));
                match m.metric.as_str() {
                    "minimal" => (summary.p_minimal, summary.d_minimal) = (p, d),
                    "kmb" => (summary.p_kmb, summary.d_kmb) = (p, d),
                    "maximal" => (summary.p_maximal, summary.d_maximal) = (p, d),
                    "identric" => (summary.p_identric, summary.d_identric) = (p, d),
                    _ => {}
                }
            }
        }
        unsafe { *out = summary };
        SepStatus::Ok
    })
}

/// Size and minimum modulus of the off-diagonal trial grid at resolution n2.
///
/// # Safety
/// Out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sep_disc_grid_info(
    n2: u32,
    points: *mut usize,
    min_modulus: *mut f64,
) -> SepStatus {
    if points.is_null() || min_modulus.is_null() {
        return SepStatus::NullPointer;
    }
    if n2 < 1 {
        return SepStatus::InvalidArgument;
    }
    guarded(|| {
        let grid = disc_grid(n2);
        unsafe {
            *points = grid.len();
            *min_modulus = grid.min_modulus();
        }
        SepStatus::Ok
    })
}

/// Number of simplex lattice points: C(n1 + parts − 1, parts − 1).
///
/// # Safety
/// `count` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sep_simplex_point_count(
    n1: u32,
    parts: u32,
    count: *mut u64,
) -> SepStatus {
    if count.is_null() {
        return SepStatus::NullPointer;
    }
    if n1 < 1 || parts < 1 {
        return SepStatus::InvalidArgument;
    }
    let value = simplex_count(n1 as u64, parts as u64);
    if value > u64::MAX as u128 {
        return SepStatus::NumericFailure;
    }
    unsafe { *count = value as u64 };
    SepStatus::Ok
}
