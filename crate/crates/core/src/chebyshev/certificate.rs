//! Optimality certificates for farthest-point minimization.
//!
//! A candidate center `c` for a point set is optimal exactly when some convex
//! combination of unit dual functionals at the farthest points vanishes:
//! there are active points `y_i` at distance `r` from `c`, functionals
//! `f_i = J(y_i - c) / r^(p-1)` of unit dual norm, and weights `alpha_i > 0`
//! summing to one with `sum_i alpha_i f_i = 0`. Everything here measures how
//! far a concrete `(c, y_i, f_i, alpha_i)` tuple is from that ideal.

use crate::chebyshev::weights;
use crate::space::{abs_pow, dual_pairing, PointSet, SpaceError};
use thiserror::Error;

/// Default relative width of the active band: points within `1e-4 * r` of
/// the radius participate in the weight solve.
pub const ACTIVE_TOL_DEFAULT: f64 = 1e-4;

/// Weights below this after the solve are dropped and the rest renormalized.
pub const WEIGHT_DROP_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertificateError {
    #[error("all points coincide with the center, so the radius is zero")]
    ZeroRadius,
    #[error("active tolerance must be finite and nonnegative, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// A (near-)optimality certificate at a candidate center.
///
/// `active_indices`, `functionals`, and `weights` are parallel: entry `k`
/// describes the point `a[active_indices[k]]`. Only points that retained
/// weight above [`WEIGHT_DROP_THRESHOLD`] appear, so all weights are
/// positive and sum to one. `residual` is the larger of two defects a
/// perfect certificate drives to zero: the dual norm of
/// `sum_k weights[k] * functionals[k]`, and the relative distance slack
/// `max_k (radius - ||y_k - c||) / radius` over the retained points.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub active_indices: Vec<usize>,
    pub functionals: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub radius: f64,
    pub residual: f64,
}

/// Extracts a certificate at `c`.
///
/// `active_tol` is the widest relative band considered: points within
/// `active_tol * r` of the radius may participate in the weight solve. A
/// single wide band is not enough, though: when zero is attainable without
/// some marginal member, the minimum-norm weights may still park mass on it,
/// and a point measurably below the radius carrying weight breaks the
/// distance and pairing conditions no matter how well the functionals
/// cancel. So the extraction walks a ladder of geometrically tighter
/// sub-bands and keeps the certificate whose worst defect (cancellation
/// versus retained slack) is smallest, preferring the tighter band on ties.
pub fn extract_certificate(
    a: &PointSet,
    c: &[f64],
    active_tol: f64,
) -> Result<Certificate, CertificateError> {
    if !active_tol.is_finite() || active_tol < 0.0 {
        return Err(CertificateError::InvalidTolerance(active_tol));
    }
    let space = a.space();
    if c.len() != a.dim() {
        return Err(SpaceError::DimensionMismatch { expected: a.dim(), got: c.len() }.into());
    }
    let dists: Vec<f64> = a.iter().map(|pt| space.distance_unchecked(pt, c)).collect();
    let radius = dists.iter().fold(0.0_f64, |m, &d| m.max(d));
    if radius <= 0.0 {
        return Err(CertificateError::ZeroRadius);
    }
    let functional_of = |i: usize| -> Vec<f64> {
        let scale = abs_pow(radius, 1.0 - space.p());
        let diff: Vec<f64> = a.point(i).iter().zip(c).map(|(&y, &ck)| y - ck).collect();
        space.duality_map(&diff).iter().map(|&g| g * scale).collect()
    };

    const LADDER_FLOOR: f64 = 1e-12;
    let mut tau = active_tol;
    let mut prev_band_len = usize::MAX;
    let mut prev_band: Vec<usize> = Vec::new();
    let mut prev_alpha: Vec<f64> = Vec::new();
    let mut best: Option<(f64, Certificate)> = None;
    loop {
        let cut = (1.0 - tau) * radius;
        let band: Vec<usize> = (0..a.len()).filter(|&i| dists[i] >= cut).collect();
        // A rung that drops nobody would reproduce the previous solve.
        if band.len() != prev_band_len {
            prev_band_len = band.len();
            let functionals: Vec<Vec<f64>> = band.iter().map(|&i| functional_of(i)).collect();
            // Carry the fatter rung's weights down to the surviving members.
            let warm: Option<Vec<f64>> = if prev_band.is_empty() {
                None
            } else {
                let carried: Vec<f64> = band
                    .iter()
                    .map(|&i| {
                        prev_band.binary_search(&i).map(|k| prev_alpha[k]).unwrap_or(0.0)
                    })
                    .collect();
                let total: f64 = carried.iter().sum();
                (total > 0.0).then(|| carried.iter().map(|&w| w / total).collect())
            };
            let alpha = weights::solve_weights(&functionals, warm.as_deref(), 10_000);

            // Drop negligible weights, keep the rest in index order,
            // renormalize.
            let kept: Vec<usize> = (0..band.len())
                .filter(|&k| alpha[k] >= WEIGHT_DROP_THRESHOLD)
                .collect();
            let total: f64 = kept.iter().map(|&k| alpha[k]).sum();
            let active_indices: Vec<usize> = kept.iter().map(|&k| band[k]).collect();
            let kept_functionals: Vec<Vec<f64>> =
                kept.iter().map(|&k| functionals[k].clone()).collect();
            let weights_out: Vec<f64> = kept.iter().map(|&k| alpha[k] / total).collect();
            let combined = weights::combine(&kept_functionals, &weights_out);
            let cancellation = space.dual_norm(&combined);
            let slack = active_indices
                .iter()
                .fold(0.0_f64, |m, &i| m.max((radius - dists[i]) / radius));
            let score = cancellation.max(slack);
            if best.as_ref().is_none_or(|(s, _)| score <= *s) {
                best = Some((
                    score,
                    Certificate {
                        active_indices,
                        functionals: kept_functionals,
                        weights: weights_out,
                        radius,
                        residual: score,
                    },
                ));
            }
            prev_band = band;
            prev_alpha = alpha;
        }
        if tau <= LADDER_FLOOR {
            break;
        }
        tau = (tau / 4.0).max(LADDER_FLOOR);
    }
    Ok(best.expect("the widest rung always produces a certificate").1)
}

/// Residuals of the three certificate conditions at tolerance `tol`.
///
/// A perfect certificate has every field zero: each active point sits at
/// distance `radius` and pairs to `radius` against its functional (i), each
/// functional has unit dual norm (ii), and the weights are a convex
/// combination whose functional average vanishes (iii).
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    /// Condition (i): `max_k | <y_k - c, f_k> - r |`.
    pub pairing_residual: f64,
    /// Condition (i): `max_k | ||y_k - c|| - r |`.
    pub distance_residual: f64,
    /// Condition (ii): `max_k | ||f_k||_q - 1 |`.
    pub functional_norm_residual: f64,
    /// Condition (iii): `|| sum_k alpha_k f_k ||_q`.
    pub cancellation_residual: f64,
    /// Condition (iii): `| sum_k alpha_k - 1 |`.
    pub weight_sum_residual: f64,
    /// The tolerance the pass verdict was taken at.
    pub tol: f64,
    pub passed: bool,
}

impl VerificationReport {
    /// The largest of the five residuals.
    pub fn max_residual(&self) -> f64 {
        self.pairing_residual
            .max(self.distance_residual)
            .max(self.functional_norm_residual)
            .max(self.cancellation_residual)
            .max(self.weight_sum_residual)
    }
}

/// Checks a certificate against the set and center it claims to describe.
/// Failures are reported in the residuals, never thrown; the certificate
/// must simply be well-formed for `a` (consistent lengths, in-range indices).
pub fn verify_certificate(
    a: &PointSet,
    c: &[f64],
    cert: &Certificate,
    tol: f64,
) -> VerificationReport {
    let m = cert.active_indices.len();
    assert!(m > 0, "certificate has no active points");
    assert_eq!(cert.functionals.len(), m, "functionals/index length mismatch");
    assert_eq!(cert.weights.len(), m, "weights/index length mismatch");
    assert_eq!(c.len(), a.dim(), "center dimension mismatch");
    let space = a.space();
    let r = cert.radius;

    let mut pairing = 0.0_f64;
    let mut distance = 0.0_f64;
    let mut fnorm = 0.0_f64;
    for k in 0..m {
        let i = cert.active_indices[k];
        assert!(i < a.len(), "active index {i} out of range");
        let f = &cert.functionals[k];
        assert_eq!(f.len(), a.dim(), "functional dimension mismatch");
        let y = a.point(i);
        let diff: Vec<f64> = y.iter().zip(c).map(|(&yk, &ck)| yk - ck).collect();
        let pair = dual_pairing(&diff, f).expect("dimensions checked above");
        pairing = pairing.max((pair - r).abs());
        distance = distance.max((space.norm(&diff) - r).abs());
        fnorm = fnorm.max((space.dual_norm(f) - 1.0).abs());
    }
    let combined = weights::combine(&cert.functionals, &cert.weights);
    let cancellation = space.dual_norm(&combined);
    let weight_sum = (cert.weights.iter().sum::<f64>() - 1.0).abs();

    let report = VerificationReport {
        pairing_residual: pairing,
        distance_residual: distance,
        functional_norm_residual: fnorm,
        cancellation_residual: cancellation,
        weight_sum_residual: weight_sum,
        tol,
        passed: false,
    };
    let passed = report.max_residual() <= tol;
    VerificationReport { passed, ..report }
}

/// The pairwise spread statistic
/// `T = sum_{i,j} alpha_i alpha_j <y_i - y_j, f_i - f_j>`,
/// which equals `2r` for an exact certificate. Comparing it against the
/// certificate radius is an end-to-end consistency check on the extracted
/// functionals and weights.
pub fn t_identity(a: &PointSet, cert: &Certificate) -> f64 {
    let m = cert.active_indices.len();
    let mut t = 0.0;
    for i in 0..m {
        let yi = a.point(cert.active_indices[i]);
        for j in 0..m {
            if i == j {
                continue;
            }
            let yj = a.point(cert.active_indices[j]);
            let mut pair = 0.0;
            for k in 0..yi.len() {
                pair += (yi[k] - yj[k]) * (cert.functionals[i][k] - cert.functionals[j][k]);
            }
            t += cert.weights[i] * cert.weights[j] * pair;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LpSpace;

    fn pair_set(p: f64) -> PointSet {
        PointSet::from_rows(
            LpSpace::new(p).unwrap(),
            vec![vec![-1.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap()
    }

    #[test]
    fn symmetric_pair_certificate() {
        let a = pair_set(3.0);
        let cert = extract_certificate(&a, &[0.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        assert_eq!(cert.active_indices, vec![0, 1]);
        assert_eq!(cert.radius, 1.0);
        assert!((cert.weights[0] - 0.5).abs() <= 1e-9);
        assert!((cert.weights[1] - 0.5).abs() <= 1e-9);
        // Functionals are the opposed unit vectors -e1, +e1.
        assert!((cert.functionals[0][0] + 1.0).abs() <= 1e-12);
        assert!((cert.functionals[1][0] - 1.0).abs() <= 1e-12);
        assert!(cert.residual <= 1e-10);
    }

    #[test]
    fn off_center_probe_has_unit_residual() {
        // Centering on one of two points leaves a single active functional
        // of unit dual norm, so nothing can cancel.
        let a = PointSet::from_rows(
            LpSpace::new(2.5).unwrap(),
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
        )
        .unwrap();
        let cert = extract_certificate(&a, &[1.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        assert_eq!(cert.active_indices, vec![0]);
        assert_eq!(cert.weights, vec![1.0]);
        assert!((cert.residual - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_radius_rejected() {
        let a = PointSet::from_rows(
            LpSpace::new(2.0).unwrap(),
            vec![vec![1.0, 2.0], vec![1.0, 2.0]],
        )
        .unwrap();
        assert!(matches!(
            extract_certificate(&a, &[1.0, 2.0], 1e-4),
            Err(CertificateError::ZeroRadius)
        ));
    }

    #[test]
    fn bad_tolerance_rejected() {
        let a = pair_set(2.0);
        assert!(matches!(
            extract_certificate(&a, &[0.0, 0.0], -1.0),
            Err(CertificateError::InvalidTolerance(_))
        ));
        assert!(extract_certificate(&a, &[0.0, 0.0], f64::NAN).is_err());
    }

    #[test]
    fn verify_exact_pair() {
        let a = pair_set(3.0);
        let cert = extract_certificate(&a, &[0.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        let report = verify_certificate(&a, &[0.0, 0.0], &cert, 1e-8);
        assert!(report.passed, "residuals: {report:?}");
        assert!(report.max_residual() <= 1e-10);
    }

    #[test]
    fn verify_flags_skewed_weights() {
        let a = pair_set(2.0);
        let mut cert = extract_certificate(&a, &[0.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        cert.weights = vec![0.6, 0.4];
        let report = verify_certificate(&a, &[0.0, 0.0], &cert, 1e-8);
        assert!(!report.passed);
        assert!((report.cancellation_residual - 0.2).abs() <= 1e-12);
        assert!(report.weight_sum_residual <= 1e-12);
    }

    #[test]
    fn verify_flags_off_center() {
        // Shift the center: distances split to 0.9 and 1.1 while the claimed
        // radius stays at the certificate value, so condition (i) fails.
        let a = pair_set(2.0);
        let cert = extract_certificate(&a, &[0.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        let report = verify_certificate(&a, &[0.1, 0.0], &cert, 1e-8);
        assert!(!report.passed);
        assert!(report.distance_residual >= 0.09);
    }

    #[test]
    fn t_identity_equals_twice_radius_for_pair() {
        let a = pair_set(3.0);
        let cert = extract_certificate(&a, &[0.0, 0.0], ACTIVE_TOL_DEFAULT).unwrap();
        let t = t_identity(&a, &cert);
        assert!((t - 2.0 * cert.radius).abs() <= 1e-9, "T = {t}");
    }
}
