//! Greedy extraction of near-diameter simplices from near-extremal sets.
//!
//! Work on a normalized set: scaled so that `jung * diameter = 1`, which
//! puts the Chebyshev radius `r` in `(1/2, 1)` and makes `1 - r^p` the
//! natural smallness parameter. Certificate weights then concentrate on
//! points that are pairwise nearly a diameter apart, and that concentration
//! is quantified here in three steps:
//!
//! - `T_j`, a weighted spread statistic per certificate point, whose large
//!   values mark the "heavy" points carrying the certificate;
//! - neighborhood masses: how much certificate weight sits within the
//!   near-diameter neighborhood of each point;
//! - a greedy pass that picks `m + 1` heavy points from the running
//!   intersection of those neighborhoods, so every selected pair is at
//!   powered distance at least `d^p * (1 - delta)`.
//!
//! The reported `min_edge` is re-measured in the original (unnormalized)
//! scale, so a successful extraction certifies a packing of `m + 1` points
//! with pairwise distances at least `d * (1 - delta)^(1/p)`.

use crate::chebyshev::{
    chebyshev_center, extract_certificate, Certificate, CertificateError, SolverConfig,
    SolverError, ACTIVE_TOL_DEFAULT,
};
use crate::extremal::jung_constant;
use crate::space::{abs_pow, PointSet, SpaceError};
use thiserror::Error;

/// Tolerance on `|jung * diameter - 1|` for a set to count as normalized.
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtractError {
    #[error("invalid extraction parameters: {0}")]
    InvalidParams(String),
    #[error("need at least two distinct points (positive diameter)")]
    DegenerateSet,
    #[error("need at least m + 1 = {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("set is not normalized: jung * diameter = {jd} (expected 1 within {NORMALIZATION_TOL:e})")]
    NotNormalized { jd: f64 },
    #[error("certificate does not match the point set: {0}")]
    CertificateMismatch(String),
    #[error("index {index} is not an active certificate point")]
    NotActive { index: usize },
    #[error(
        "candidate set emptied after {found} of {need} vertices \
         (feasibility margin {margin:.6e})"
    )]
    IntersectionEmpty { found: usize, need: usize, margin: f64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// Parameters for [`extract_simplex`]: the simplex has `m + 1` vertices and
/// every edge must have powered length at least `d^p * (1 - delta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractionParams {
    pub m: usize,
    /// Relative slack on powered edge lengths, strictly between 0 and 1.
    pub delta: f64,
}

impl ExtractionParams {
    fn validate(&self) -> Result<(), ExtractError> {
        if self.m < 1 {
            return Err(ExtractError::InvalidParams("m must be at least 1".into()));
        }
        if !self.delta.is_finite() || self.delta <= 0.0 || self.delta >= 1.0 {
            return Err(ExtractError::InvalidParams(format!(
                "delta must lie strictly between 0 and 1, got {}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// The heavy subset of certificate points and the weight left outside it.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavySet {
    /// Original point-set indices of the heavy certificate points.
    pub indices: Vec<usize>,
    /// Certificate weight outside the heavy set; bounded by
    /// `sqrt(1 - r^p)` for near-exact certificates.
    pub lambda: f64,
    /// Whether `1 - r^p` had to be clamped at zero (radius beyond the Jung
    /// bound, only possible through numerical slack).
    pub clamped: bool,
}

/// Outcome of the union-bound feasibility estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityCheck {
    pub feasible: bool,
    /// `min_j alpha(S(y_j)) - (m - 1) * max_j alpha(complement)`; positive
    /// margins certify that the greedy intersection cannot empty.
    pub margin: f64,
}

/// Diagnostics accompanying a successful extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionDiagnostics {
    /// `T_j` per certificate point, parallel to the certificate's
    /// `active_indices`.
    pub t_values: Vec<f64>,
    /// Original indices of the heavy certificate points.
    pub heavy_set: Vec<usize>,
    pub lambda: f64,
    /// Per selected vertex: certificate weight outside its neighborhood.
    pub neighborhood_masses: Vec<f64>,
    /// See [`HeavySet::clamped`].
    pub clamped: bool,
}

/// A successful extraction: `m + 1` vertex indices into the original set.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexResult {
    pub vertex_indices: Vec<usize>,
    /// Smallest pairwise distance among the vertices, measured in the
    /// original scale; at least `d * (1 - delta)^(1/p)` up to rounding.
    pub min_edge: f64,
    pub diagnostics: ExtractionDiagnostics,
}

fn validate_certificate(a: &PointSet, cert: &Certificate) -> Result<(), ExtractError> {
    let m = cert.active_indices.len();
    if m == 0 {
        return Err(ExtractError::CertificateMismatch("certificate has no active points".into()));
    }
    if cert.weights.len() != m || cert.functionals.len() != m {
        return Err(ExtractError::CertificateMismatch(
            "weights/functionals/indices lengths differ".into(),
        ));
    }
    for &i in &cert.active_indices {
        if i >= a.len() {
            return Err(ExtractError::CertificateMismatch(format!(
                "active index {i} out of range for a set of {} points",
                a.len()
            )));
        }
    }
    for f in &cert.functionals {
        if f.len() != a.dim() {
            return Err(ExtractError::CertificateMismatch(
                "functional dimension does not match the set".into(),
            ));
        }
    }
    Ok(())
}

/// The spread statistic `T_j = kappa_p * sum_i alpha_i ||y_i - y_j||^p` for
/// each certificate point, with `kappa_p = 2^(2-p)` for `p <= 2` and `1`
/// otherwise. Entries are parallel to the certificate's `active_indices`.
pub fn t_values(a: &PointSet, cert: &Certificate) -> Result<Vec<f64>, ExtractError> {
    validate_certificate(a, cert)?;
    let space = a.space();
    let p = space.p();
    let kappa = if p <= 2.0 { 2.0_f64.powf(2.0 - p) } else { 1.0 };
    let m = cert.active_indices.len();
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let yj = a.point(cert.active_indices[j]);
        let mut sum = 0.0;
        for i in 0..m {
            let yi = a.point(cert.active_indices[i]);
            sum += cert.weights[i] * space.distance_pow_p(yi, yj);
        }
        out.push(kappa * sum);
    }
    Ok(out)
}

fn check_normalized(a: &PointSet) -> Result<(), ExtractError> {
    let jd = jung_constant(a.space()).value * a.diameter();
    if (jd - 1.0).abs() > NORMALIZATION_TOL {
        return Err(ExtractError::NotNormalized { jd });
    }
    Ok(())
}

/// The heavy set `S = { j : T_j >= 2 r^p (1 - sqrt(1 - r^p)) }` of a
/// normalized set, along with `lambda`, the certificate weight outside it.
/// `1 - r^p` is clamped at zero if rounding pushes `r` past 1.
pub fn heavy_set(a: &PointSet, cert: &Certificate) -> Result<HeavySet, ExtractError> {
    check_normalized(a)?;
    let t = t_values(a, cert)?;
    let p = a.space().p();
    let rp = abs_pow(cert.radius, p);
    let slack = 1.0 - rp;
    let clamped = slack < 0.0;
    let threshold = 2.0 * rp * (1.0 - slack.max(0.0).sqrt());
    let mut indices = Vec::new();
    let mut lambda = 0.0;
    for (j, &tj) in t.iter().enumerate() {
        if tj >= threshold {
            indices.push(cert.active_indices[j]);
        } else {
            lambda += cert.weights[j];
        }
    }
    Ok(HeavySet { indices, lambda, clamped })
}

/// Certificate points within powered distance `>= d^p * (1 - delta)` of the
/// active point with original index `j`. Returned as original indices.
pub fn neighborhood(
    a: &PointSet,
    cert: &Certificate,
    j: usize,
    delta: f64,
) -> Result<Vec<usize>, ExtractError> {
    validate_certificate(a, cert)?;
    if !delta.is_finite() || delta <= 0.0 || delta >= 1.0 {
        return Err(ExtractError::InvalidParams(format!(
            "delta must lie strictly between 0 and 1, got {delta}"
        )));
    }
    if !cert.active_indices.contains(&j) {
        return Err(ExtractError::NotActive { index: j });
    }
    let space = a.space();
    let threshold = abs_pow(a.diameter(), space.p()) * (1.0 - delta);
    let yj = a.point(j);
    Ok(cert
        .active_indices
        .iter()
        .copied()
        .filter(|&i| space.distance_pow_p(a.point(i), yj) >= threshold)
        .collect())
}

/// Union-bound feasibility: given the complement masses
/// `beta_j = alpha(I \ S(y_j))` of candidate vertices, the greedy
/// intersection of `m - 1` neighborhoods cannot empty if
/// `min_j (1 - beta_j) - (m - 1) * max_j beta_j > 0`.
pub fn feasibility_check(
    complement_masses: &[f64],
    m: usize,
) -> Result<FeasibilityCheck, ExtractError> {
    if complement_masses.is_empty() {
        return Err(ExtractError::InvalidParams("no complement masses supplied".into()));
    }
    if m < 1 {
        return Err(ExtractError::InvalidParams("m must be at least 1".into()));
    }
    let max_beta = complement_masses.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let min_mass = 1.0 - max_beta;
    let margin = min_mass - (m as f64 - 1.0) * max_beta;
    Ok(FeasibilityCheck { feasible: margin > 0.0, margin })
}

/// Normalizes the set, solves for a certificate, and greedily selects
/// `m + 1` heavy certificate points whose pairwise powered distances all
/// reach `d^p * (1 - delta)`.
pub fn extract_simplex(
    a: &PointSet,
    params: &ExtractionParams,
    cfg: &SolverConfig,
) -> Result<SimplexResult, ExtractError> {
    params.validate()?;
    let d = a.diameter();
    if a.len() < 2 || d <= 0.0 {
        return Err(ExtractError::DegenerateSet);
    }
    let need = params.m + 1;
    if a.len() < need {
        return Err(ExtractError::TooFewPoints { need, got: a.len() });
    }
    let space = a.space();
    let jung = jung_constant(space).value;
    let normalized = a.scaled(1.0 / (jung * d))?;

    let center = chebyshev_center(&normalized, cfg)?;
    let cert = extract_certificate(&normalized, &center.center, ACTIVE_TOL_DEFAULT)?;
    let t = t_values(&normalized, &cert)?;
    let heavy = heavy_set(&normalized, &cert)?;

    let m_cert = cert.active_indices.len();
    let d_norm = normalized.diameter();
    let threshold = abs_pow(d_norm, space.p()) * (1.0 - params.delta);
    // Powered distances between certificate points, by certificate position.
    let powdist: Vec<Vec<f64>> = (0..m_cert)
        .map(|i| {
            let yi = normalized.point(cert.active_indices[i]);
            (0..m_cert)
                .map(|j| space.distance_pow_p(yi, normalized.point(cert.active_indices[j])))
                .collect()
        })
        .collect();
    let heavy_positions: Vec<usize> = (0..m_cert)
        .filter(|&k| heavy.indices.contains(&cert.active_indices[k]))
        .collect();

    // Complement mass of a certificate position's neighborhood.
    let complement_mass = |pos: usize| -> f64 {
        (0..m_cert)
            .filter(|&i| powdist[i][pos] < threshold)
            .map(|i| cert.weights[i])
            .sum()
    };

    let mut selected: Vec<usize> = Vec::with_capacity(need);
    let mut candidates: Vec<usize> = heavy_positions.clone();
    while selected.len() < need {
        // Maximal weight, ties to the lowest original index (candidate order
        // is ascending in original index, so the first maximum wins).
        let pick = candidates
            .iter()
            .copied()
            .max_by(|&x, &y| cert.weights[x].partial_cmp(&cert.weights[y]).unwrap())
            .map(|best| {
                candidates
                    .iter()
                    .copied()
                    .find(|&k| cert.weights[k] == cert.weights[best])
                    .unwrap()
            });
        let Some(z) = pick else {
            let masses: Vec<f64> = selected.iter().map(|&s| complement_mass(s)).collect();
            let margin = if masses.is_empty() {
                f64::NEG_INFINITY
            } else {
                feasibility_check(&masses, params.m)?.margin
            };
            return Err(ExtractError::IntersectionEmpty {
                found: selected.len(),
                need,
                margin,
            });
        };
        selected.push(z);
        candidates.retain(|&k| k != z && powdist[k][z] >= threshold);
    }

    let masses: Vec<f64> = selected.iter().map(|&s| complement_mass(s)).collect();
    let vertex_indices: Vec<usize> = selected.iter().map(|&k| cert.active_indices[k]).collect();

    // Re-measure edges in the original scale; the greedy construction
    // guarantees the normalized bound, asserted below.
    let mut min_edge = f64::INFINITY;
    let mut min_edge_norm = f64::INFINITY;
    for x in 0..vertex_indices.len() {
        for y in (x + 1)..vertex_indices.len() {
            let orig =
                space.distance_unchecked(a.point(vertex_indices[x]), a.point(vertex_indices[y]));
            min_edge = min_edge.min(orig);
            let norm = space.distance_unchecked(
                normalized.point(vertex_indices[x]),
                normalized.point(vertex_indices[y]),
            );
            min_edge_norm = min_edge_norm.min(norm);
        }
    }
    debug_assert!(
        min_edge_norm >= d_norm * (1.0 - params.delta).powf(1.0 / space.p()) - 1e-9,
        "selected edges violate the normalized bound"
    );

    Ok(SimplexResult {
        vertex_indices,
        min_edge,
        diagnostics: ExtractionDiagnostics {
            t_values: t,
            heavy_set: heavy.indices,
            lambda: heavy.lambda,
            neighborhood_masses: masses,
            clamped: heavy.clamped,
        },
    })
}

/// Bisection on `delta` (20 rounds) for the tightest slack at which
/// [`extract_simplex`] still succeeds; returns the best re-measured
/// `min_edge` over all successes, a certified packing lower bound, or zero
/// when even the loosest slack fails.
pub fn packing_lower_bound(
    a: &PointSet,
    m: usize,
    cfg: &SolverConfig,
) -> Result<f64, ExtractError> {
    const LOOSEST: f64 = 1.0 - 1e-9;
    let mut best = 0.0_f64;
    let attempt = |delta: f64, best: &mut f64| -> Result<bool, ExtractError> {
        match extract_simplex(a, &ExtractionParams { m, delta }, cfg) {
            Ok(result) => {
                if result.min_edge > *best {
                    *best = result.min_edge;
                }
                Ok(true)
            }
            Err(ExtractError::IntersectionEmpty { .. }) => Ok(false),
            Err(other) => Err(other),
        }
    };
    if !attempt(LOOSEST, &mut best)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0_f64, LOOSEST);
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        if attempt(mid, &mut best)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(best)
}
