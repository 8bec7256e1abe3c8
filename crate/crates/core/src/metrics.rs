//! Monotone-metric volume-element weights.
//!
//! A monotone Riemannian metric on state space is fixed by its
//! Morozova–Chentsov function `f(a, b)`, an eigenvalue-pair kernel whose
//! reciprocal is a classical mean: arithmetic for the minimal (Bures) metric,
//! logarithmic for Kubo–Mori/Bogoliubov, harmonic for the maximal metric, and
//! the identric mean for the fourth kind supported here. The weight attached
//! to a state with spectrum λ is `[Π_{i,j} f(λ_i, λ_j)]^{1/2}` over all N²
//! ordered pairs, diagonal included.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Relative spacing below which the coincident-eigenvalue limit is used.
const EQUAL_BRANCH_REL: f64 = 1e-12;

/// Selector for the Morozova–Chentsov function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    /// Minimal monotone (Bures); kernel 2/(a+b).
    Minimal,
    /// Kubo–Mori/Bogoliubov; kernel (ln a − ln b)/(a − b).
    Kmb,
    /// Maximal monotone; kernel (a+b)/(2ab).
    Maximal,
    /// Reciprocal of the identric (exponential) mean.
    Identric,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] =
        [MetricKind::Minimal, MetricKind::Kmb, MetricKind::Maximal, MetricKind::Identric];

    pub fn name(&self) -> &'static str {
        match self {
            MetricKind::Minimal => "minimal",
            MetricKind::Kmb => "kmb",
            MetricKind::Maximal => "maximal",
            MetricKind::Identric => "identric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "min" | "minimal" | "bures" => Ok(MetricKind::Minimal),
            "kmb" | "kubo-mori" | "kubomori" => Ok(MetricKind::Kmb),
            "max" | "maximal" => Ok(MetricKind::Maximal),
            "identric" | "id" => Ok(MetricKind::Identric),
            other => Err(Error::InvalidConfig(format!("unknown metric '{other}'"))),
        }
    }
}

impl std::fmt::Display for MetricKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One weight per metric kind, in the order of `kinds`.
#[derive(Debug, Clone)]
pub struct WeightBundle {
    pub kinds: Vec<MetricKind>,
    pub weights: Vec<f64>,
}

impl WeightBundle {
    pub fn compute(kinds: &[MetricKind], eigs: &[f64]) -> Result<Self> {
        let weights = kinds
            .iter()
            .map(|&k| volume_weight(k, eigs))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kinds: kinds.to_vec(), weights })
    }
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonPositive { value: x });
    }
    Ok(())
}

/// Morozova–Chentsov function of the given kind, symmetric in (a, b); the
/// coincident limit of every kind is 1/a.
pub fn mc_function(kind: MetricKind, a: f64, b: f64) -> Result<f64> {
    check_positive(a)?;
    check_positive(b)?;
    Ok(ln_mc_function(kind, a, b).exp())
}

/// ln f(a, b), the form accumulated when computing volume weights.
fn ln_mc_function(kind: MetricKind, a: f64, b: f64) -> f64 {
    match kind {
        MetricKind::Minimal => std::f64::consts::LN_2 - (a + b).ln(),
        MetricKind::Maximal => (a + b).ln() - (2.0 * a * b).ln(),
        MetricKind::Kmb => {
            if nearly_equal(a, b) {
                -a.ln()
            } else {
                ((a.ln() - b.ln()) / (a - b)).ln()
            }
        }
        MetricKind::Identric => {
            if nearly_equal(a, b) {
                -a.ln()
            } else {
                // ln[e·(a^a / b^b)^{1/(b−a)}] = 1 + (a ln a − b ln b)/(b − a).
                1.0 + (a * a.ln() - b * b.ln()) / (b - a)
            }
        }
    }
}

#[inline]
fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQUAL_BRANCH_REL * a.abs().max(b.abs())
}

/// Volume-element weight `[Π_{i,j=1}^{N} f(λ_i, λ_j)]^{1/2}`, accumulated in
/// log space and exponentiated once: near-degenerate spectra drive the
/// maximal-metric weight across hundreds of orders of magnitude.
pub fn volume_weight(kind: MetricKind, eigs: &[f64]) -> Result<f64> {
    let mut ln_sum = 0.0f64;
    for (i, &a) in eigs.iter().enumerate() {
        check_positive(a)?;
        ln_sum += ln_mc_function(kind, a, a);
        for &b in &eigs[i + 1..] {
            check_positive(b)?;
            ln_sum += 2.0 * ln_mc_function(kind, a, b);
        }
    }
    let w = (0.5 * ln_sum).exp();
    if !w.is_finite() {
        return Err(Error::SingularWeight);
    }
    Ok(w)
}
