//! Jung constants and extremality diagnostics.
//!
//! The Jung constant of a space bounds the Chebyshev radius of any bounded
//! set by a multiple of its diameter: `r(A) <= J * d(A)`. For l_p it is
//! exactly `2^(-1/q)` when `1 < p <= 2` and `2^(-1/p)` when `p > 2` (the
//! branches agree at `p = 2`, the Hilbert value `1/sqrt(2)`). A set is
//! extremal when it attains the bound; finite sets never do, so the gap
//! `J * d(A) - r(A)` is strictly positive and its size measures how far a
//! set is from extremality. This module reports those quantities, exposes
//! the coordinatewise inequalities the bounds rest on, and generates the two
//! canonical families whose ratios approach 1: standard basis vectors and
//! scaled Hadamard rows.

use crate::chebyshev::{chebyshev_center, SolverConfig, SolverError};
use crate::space::{abs_pow, signed_pow, LpSpace, PointSet, SpaceError};
use thiserror::Error;

/// Largest `k` accepted by [`generate_hadamard_set`]; `2^k` points of
/// dimension `2^k` at `k = 12` already occupy over 100 MB.
pub const MAX_HADAMARD_LOG: u32 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremalError {
    #[error("need at least two distinct points (positive diameter)")]
    DegenerateSet,
    #[error("basis sets need n >= 2, got {0}")]
    BasisTooSmall(usize),
    #[error("Hadamard sets need 1 <= k <= {MAX_HADAMARD_LOG}, got {0}")]
    InvalidHadamardSize(u32),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// The Jung constant of an l_p space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JungValue {
    pub p: f64,
    /// `2^(-1/q)` for `p <= 2`, `2^(-1/p)` for `p > 2`; always in `(1/2, 1)`.
    pub value: f64,
}

/// The exact Jung constant of the space.
pub fn jung_constant(s: LpSpace) -> JungValue {
    let exponent = if s.p() <= 2.0 { -1.0 / s.q() } else { -1.0 / s.p() };
    JungValue { p: s.p(), value: 2.0_f64.powf(exponent) }
}

/// How close a set comes to the Jung bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityReport {
    pub diameter: f64,
    pub radius: f64,
    /// The Jung constant of the ambient space.
    pub jung: f64,
    /// `radius / (jung * diameter)`; approaches 1 along near-extremal
    /// families but stays below it for every finite set.
    pub ratio: f64,
    /// `jung * diameter - radius`, strictly positive for finite sets.
    pub gap: f64,
    /// Residual of the certificate behind `radius`.
    pub certificate_residual: f64,
}

/// Solves for the Chebyshev radius and reports it against the Jung bound.
///
/// There is deliberately no boolean verdict: finite sets are never exactly
/// extremal, so the meaningful outputs are the ratio and the gap.
pub fn extremality_report(
    a: &PointSet,
    cfg: &SolverConfig,
) -> Result<ExtremalityReport, ExtremalError> {
    let diameter = a.diameter();
    if a.len() < 2 || diameter <= 0.0 {
        return Err(ExtremalError::DegenerateSet);
    }
    let jung = jung_constant(a.space()).value;
    let result = chebyshev_center(a, cfg)?;
    let bound = jung * diameter;
    Ok(ExtremalityReport {
        diameter,
        radius: result.radius,
        jung,
        ratio: result.radius / bound,
        gap: bound - result.radius,
        certificate_residual: result.certificate_residual,
    })
}

/// The strict-inequality gap `jung * diameter - radius`, positive for every
/// finite set with at least two distinct points.
pub fn gulevich_gap(a: &PointSet, cfg: &SolverConfig) -> Result<f64, ExtremalError> {
    Ok(extremality_report(a, cfg)?.gap)
}

/// Residual `RHS - LHS` of the coordinatewise power inequality at `(a, b)`:
///
/// - for `1 < p <= 2`:
///   `2^(2-p) |a-b|^(p-1) - | sign(a)|a|^(p-1) - sign(b)|b|^(p-1) |`;
/// - for `p > 2`:
///   `|a-b|^p - ( |a|^p + |b|^p - p (a sign(b)|b|^(p-1) + b sign(a)|a|^(p-1)) )`.
///
/// The first form is nonnegative for all real `(a, b)` (identically zero at
/// `p = 2`). The second is nonnegative for `p >= 3` but genuinely fails on
/// `2 < p < 3`: at `a = -b` it reduces to `2^p >= 2 + 2p`, false on that
/// whole interval and tight exactly at `p = 3`. These scalar bounds are what
/// turn certificate weights into the pairwise-distance estimates used by the
/// heavy-set machinery.
pub fn chernykh_check(s: LpSpace, a: f64, b: f64) -> f64 {
    let p = s.p();
    if p <= 2.0 {
        let lhs = (signed_pow(a, p - 1.0) - signed_pow(b, p - 1.0)).abs();
        let rhs = 2.0_f64.powf(2.0 - p) * abs_pow(a - b, p - 1.0);
        rhs - lhs
    } else {
        let cross = a * signed_pow(b, p - 1.0) + b * signed_pow(a, p - 1.0);
        let lhs = abs_pow(a, p) + abs_pow(b, p) - p * cross;
        let rhs = abs_pow(a - b, p);
        rhs - lhs
    }
}

/// The standard basis `e_1, ..., e_n` of `R^n` as a point set in `s`.
///
/// All pairwise distances equal `2^(1/p)`, and the radius-to-bound ratio
/// increases toward 1 as `n` grows (for `p >= 2`).
pub fn generate_basis_set(n: usize, s: LpSpace) -> Result<PointSet, ExtremalError> {
    if n < 2 {
        return Err(ExtremalError::BasisTooSmall(n));
    }
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    Ok(PointSet::from_rows(s, rows)?)
}

/// The `2^k` rows of the Sylvester Hadamard matrix `H_{2^k}`, scaled by
/// `n^(-1/p)` so every point has unit norm.
///
/// Any two rows differ in exactly half their coordinates, so all pairwise
/// distances equal `2^(1/q)`; for `1 < p <= 2` that makes the family
/// asymptotically extremal as `k` grows.
pub fn generate_hadamard_set(k: u32, s: LpSpace) -> Result<PointSet, ExtremalError> {
    if k == 0 || k > MAX_HADAMARD_LOG {
        return Err(ExtremalError::InvalidHadamardSize(k));
    }
    let n = 1usize << k;
    let scale = (n as f64).powf(-1.0 / s.p());
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    // Sylvester closed form: sign is the parity of <bits(i), bits(j)>.
                    if (i & j).count_ones() % 2 == 0 {
                        scale
                    } else {
                        -scale
                    }
                })
                .collect()
        })
        .collect();
    Ok(PointSet::from_rows(s, rows)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::dual_pairing;

    fn space(p: f64) -> LpSpace {
        LpSpace::new(p).unwrap()
    }

    #[test]
    fn jung_values() {
        assert!((jung_constant(space(2.0)).value - 0.5_f64.sqrt()).abs() <= 1e-15);
        assert!((jung_constant(space(1.5)).value - 2.0_f64.powf(-1.0 / 3.0)).abs() <= 1e-15);
        assert!((jung_constant(space(4.0)).value - 2.0_f64.powf(-0.25)).abs() <= 1e-15);
        for p in [1.01, 1.3, 2.0, 3.0, 17.0] {
            let v = jung_constant(space(p)).value;
            assert!(v > 0.5 && v < 1.0, "jung({p}) = {v}");
        }
    }

    #[test]
    fn jung_branches_agree_at_two() {
        // Approaching p = 2 from either side changes the formula branch but
        // not the value, because q = p there.
        let below = jung_constant(space(2.0 - 1e-12)).value;
        let above = jung_constant(space(2.0 + 1e-12)).value;
        assert!((below - above).abs() <= 1e-12);
    }

    #[test]
    fn jung_conjugate_symmetry() {
        for p in [1.2, 1.5, 1.9] {
            let s = space(p);
            let j_p = jung_constant(s).value;
            let j_q = jung_constant(s.conjugate()).value;
            assert_eq!(j_p.to_bits(), j_q.to_bits(), "p = {p}");
        }
    }

    #[test]
    fn report_symmetric_pair() {
        let a = PointSet::from_rows(space(2.0), vec![vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let rep = extremality_report(&a, &SolverConfig::default()).unwrap();
        assert_eq!(rep.diameter, 2.0);
        assert!((rep.radius - 1.0).abs() <= 1e-12);
        assert!((rep.ratio - 0.5_f64.sqrt()).abs() <= 1e-10);
        assert!((rep.gap - (2.0_f64.sqrt() - 1.0)).abs() <= 1e-10);
    }

    #[test]
    fn degenerate_sets_rejected() {
        let single = PointSet::from_rows(space(2.0), vec![vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            extremality_report(&single, &SolverConfig::default()),
            Err(ExtremalError::DegenerateSet)
        ));
        let dupes =
            PointSet::from_rows(space(3.0), vec![vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            gulevich_gap(&dupes, &SolverConfig::default()),
            Err(ExtremalError::DegenerateSet)
        ));
    }

    #[test]
    fn chernykh_frozen_values() {
        // p = 1.5, (1, 0): sqrt(2) * 1 - 1.
        let r = chernykh_check(space(1.5), 1.0, 0.0);
        assert!((r - (2.0_f64.sqrt() - 1.0)).abs() <= 1e-12);
        // p = 4, (1, -1): 2^4 - (1 + 1 - 4 * (-2)) = 16 - 10.
        let r = chernykh_check(space(4.0), 1.0, -1.0);
        assert!((r - 6.0).abs() <= 1e-12);
        // p = 2 collapses to |a-b| - |a-b|.
        for (a, b) in [(0.3, -0.7), (2.0, 2.0), (-1.5, 4.0)] {
            assert!(chernykh_check(space(2.0), a, b).abs() <= 1e-12);
        }
    }

    fn worst_grid_residual(p: f64) -> (f64, (f64, f64)) {
        let s = space(p);
        let mut worst = f64::INFINITY;
        let mut at = (0.0, 0.0);
        for i in -20..=20 {
            for j in -20..=20 {
                let (a, b) = (i as f64 / 4.0, j as f64 / 4.0);
                let res = chernykh_check(s, a, b);
                let scale = (abs_pow(a, p) + abs_pow(b, p)).max(1.0);
                if res / scale < worst {
                    worst = res / scale;
                    at = (a, b);
                }
            }
        }
        (worst, at)
    }

    #[test]
    fn chernykh_nonnegative_on_grid() {
        // The second branch holds only from p = 3 up; see the companion test
        // for the gap between 2 and 3.
        for p in [1.1, 1.5, 1.9, 2.0, 3.0, 4.0, 8.0] {
            let (worst, at) = worst_grid_residual(p);
            assert!(worst >= -1e-10, "p = {p}: residual {worst} at {at:?}");
        }
    }

    #[test]
    fn chernykh_second_branch_fails_below_three() {
        // On the a = -b line the second branch needs 2 + 2p <= 2^p, which is
        // false on all of (2, 3) and tight at exactly p = 3. The check
        // reports honest negative residuals there.
        let r = chernykh_check(space(2.5), 1.0, -1.0);
        let expected = 2.0_f64.powf(2.5) - 7.0;
        assert!((r - expected).abs() <= 1e-12, "residual {r}");
        assert!(r < -1.0);
        let (worst, _) = worst_grid_residual(2.5);
        assert!(worst < -0.5);
        // At p = 3 the opposite-sign slice is identically tight.
        for t in [0.25, 1.0, 2.5] {
            assert!(chernykh_check(space(3.0), t, -t).abs() <= 1e-9);
        }
    }

    #[test]
    fn basis_set_shape() {
        let a = generate_basis_set(4, space(2.0)).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.dim(), 4);
        let d = 2.0_f64.sqrt();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let dist = a.space().distance(a.point(i), a.point(j)).unwrap();
                assert!((dist - d).abs() <= 1e-15);
            }
        }
        assert!(matches!(generate_basis_set(1, space(2.0)), Err(ExtremalError::BasisTooSmall(1))));
    }

    #[test]
    fn hadamard_small_case() {
        // k = 1, p = 1.5: two points 2^(-2/3) * (1, 1) and 2^(-2/3) * (1, -1)
        // at distance 2^(1/3).
        let s = space(1.5);
        let a = generate_hadamard_set(1, s).unwrap();
        assert_eq!(a.len(), 2);
        let scale = 2.0_f64.powf(-2.0 / 3.0);
        assert!((a.point(0)[0] - scale).abs() <= 1e-15);
        assert!((a.point(1)[1] + scale).abs() <= 1e-15);
        let d = s.distance(a.point(0), a.point(1)).unwrap();
        assert!((d - 2.0_f64.powf(1.0 / 3.0)).abs() <= 1e-14);
    }

    #[test]
    fn hadamard_rows_are_unit_and_equidistant() {
        for (k, p) in [(3u32, 1.5), (3, 2.0), (4, 3.0)] {
            let s = space(p);
            let a = generate_hadamard_set(k, s).unwrap();
            let n = 1usize << k;
            assert_eq!(a.len(), n);
            let expected = 2.0_f64.powf(1.0 / s.q());
            for i in 0..n {
                assert!((s.norm(a.point(i)) - 1.0).abs() <= 1e-12);
                for j in (i + 1)..n {
                    let d = s.distance(a.point(i), a.point(j)).unwrap();
                    assert!((d - expected).abs() <= 1e-12, "k={k} p={p} pair ({i},{j})");
                }
            }
        }
        assert!(generate_hadamard_set(0, space(2.0)).is_err());
        assert!(generate_hadamard_set(MAX_HADAMARD_LOG + 1, space(2.0)).is_err());
    }

    #[test]
    fn hadamard_rows_multiply_into_each_other() {
        // The rows form a group under coordinatewise multiplication, which
        // is what makes the family so symmetric.
        let s = space(2.0);
        let a = generate_hadamard_set(2, s).unwrap();
        let scale = 4.0_f64.powf(-0.5);
        let product: Vec<f64> = a
            .point(1)
            .iter()
            .zip(a.point(2))
            .map(|(&x, &y)| x * y / (scale * scale) * scale)
            .collect();
        let matches = (0..4).any(|i| {
            a.point(i)
                .iter()
                .zip(&product)
                .all(|(&x, &y)| (x - y).abs() <= 1e-12)
        });
        assert!(matches);
        // Rows are mutually orthogonal before scaling.
        assert!(dual_pairing(a.point(1), a.point(2)).unwrap().abs() <= 1e-15);
    }
}
