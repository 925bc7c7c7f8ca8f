//! Finite-dimensional l_p spaces: validated exponents, vectors, point sets,
//! and the norm/duality primitives everything else is built on.
//!
//! Throughout, `p` is restricted to the uniformly convex range `1 < p < inf`
//! and `q = p / (p - 1)` denotes the conjugate exponent, so `1/p + 1/q = 1`.

use thiserror::Error;

/// Errors from constructing or combining the basic geometric types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("exponent p must satisfy 1 < p < inf, got {0}")]
    InvalidExponent(f64),
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("vector must have at least one coordinate")]
    EmptyVector,
    #[error("point set must contain at least one point")]
    EmptyPointSet,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scale factor must be finite and positive, got {0}")]
    InvalidScale(f64),
}

/// `|x|^e` with an explicit zero branch so the `x == 0` case never goes
/// through a logarithm.
#[inline]
pub(crate) fn abs_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(e)
    }
}

/// `sign(x) * |x|^e`, the signed power underlying the duality map.
#[inline]
pub(crate) fn signed_pow(x: f64, e: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x > 0.0 {
        x.powf(e)
    } else {
        -((-x).powf(e))
    }
}

/// An l_p space with a validated exponent and its precomputed conjugate.
///
/// `p = 2` takes the same code paths as every other exponent; no case is
/// special-cased on the Hilbert structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpSpace {
    p: f64,
    q: f64,
}

impl LpSpace {
    /// Creates the space, rejecting `p <= 1`, infinities, and NaN.
    pub fn new(p: f64) -> Result<Self, SpaceError> {
        if !p.is_finite() || p <= 1.0 {
            return Err(SpaceError::InvalidExponent(p));
        }
        Ok(Self { p, q: p / (p - 1.0) })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// The conjugate exponent `q = p / (p - 1)`.
    #[inline]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// The conjugate space; conjugation is an involution up to rounding.
    pub fn conjugate(&self) -> Self {
        Self { p: self.q, q: self.q / (self.q - 1.0) }
    }

    /// The l_p norm `(sum_k |v_k|^p)^(1/p)`.
    pub fn norm(&self, v: &[f64]) -> f64 {
        let mut sum = 0.0;
        for &x in v {
            sum += abs_pow(x, self.p);
        }
        abs_pow(sum, 1.0 / self.p)
    }

    /// The l_q norm of a dual-side vector.
    pub fn dual_norm(&self, g: &[f64]) -> f64 {
        let mut sum = 0.0;
        for &x in g {
            sum += abs_pow(x, self.q);
        }
        abs_pow(sum, 1.0 / self.q)
    }

    /// `||a - b||_p`; the inputs must share a dimension.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> Result<f64, SpaceError> {
        if a.len() != b.len() {
            return Err(SpaceError::DimensionMismatch { expected: a.len(), got: b.len() });
        }
        Ok(self.distance_unchecked(a, b))
    }

    /// Distance without the dimension check, for hot paths where both slices
    /// come out of the same `PointSet`.
    #[inline]
    pub(crate) fn distance_unchecked(&self, a: &[f64], b: &[f64]) -> f64 {
        abs_pow(self.distance_pow_p(a, b), 1.0 / self.p)
    }

    /// `||a - b||_p^p` as a plain coordinate sum, skipping the root and the
    /// re-powering it would take to get the powered distance back.
    #[inline]
    pub(crate) fn distance_pow_p(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut sum = 0.0;
        for (&x, &y) in a.iter().zip(b) {
            sum += abs_pow(x - y, self.p);
        }
        sum
    }

    /// The duality map `J(v)_k = sign(v_k) * |v_k|^(p-1)`.
    ///
    /// It satisfies `<v, J(v)> = ||v||_p^p` and `||J(v)||_q = ||v||_p^(p-1)`,
    /// and applying the conjugate space's map inverts it. For `p = 2` it is
    /// the identity (up to rounding, since no branch special-cases it).
    pub fn duality_map(&self, v: &[f64]) -> Vec<f64> {
        let e = self.p - 1.0;
        v.iter().map(|&x| signed_pow(x, e)).collect()
    }
}

/// The canonical pairing `<v, g> = sum_k v_k * g_k`.
pub fn dual_pairing(v: &[f64], g: &[f64]) -> Result<f64, SpaceError> {
    if v.len() != g.len() {
        return Err(SpaceError::DimensionMismatch { expected: v.len(), got: g.len() });
    }
    let mut sum = 0.0;
    for (&x, &y) in v.iter().zip(g) {
        sum += x * y;
    }
    Ok(sum)
}

/// A point with finitely many, all-finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    /// Validates that every coordinate is finite and the vector is nonempty.
    pub fn new(coords: Vec<f64>) -> Result<Self, SpaceError> {
        if coords.is_empty() {
            return Err(SpaceError::EmptyVector);
        }
        for (index, x) in coords.iter().enumerate() {
            if !x.is_finite() {
                return Err(SpaceError::NonFiniteCoordinate { index });
            }
        }
        Ok(Self(coords))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl std::ops::Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// A nonempty finite set of points in a common l_p space.
///
/// All points share one dimension; this is checked once at construction so
/// the algorithms can skip per-pair dimension checks.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    space: LpSpace,
    dim: usize,
    points: Vec<Vector>,
}

impl PointSet {
    pub fn new(space: LpSpace, points: Vec<Vector>) -> Result<Self, SpaceError> {
        let first = points.first().ok_or(SpaceError::EmptyPointSet)?;
        let dim = first.dim();
        for v in &points {
            if v.dim() != dim {
                return Err(SpaceError::DimensionMismatch { expected: dim, got: v.dim() });
            }
        }
        Ok(Self { space, dim, points })
    }

    /// Builds a set from raw coordinate rows.
    pub fn from_rows(space: LpSpace, rows: Vec<Vec<f64>>) -> Result<Self, SpaceError> {
        let points = rows.into_iter().map(Vector::new).collect::<Result<Vec<_>, _>>()?;
        Self::new(space, points)
    }

    #[inline]
    pub fn space(&self) -> LpSpace {
        self.space
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn points(&self) -> &[Vector] {
        &self.points
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.points.iter().map(|v| v.as_slice())
    }

    /// The diameter `max_{i,j} ||a_i - a_j||_p`; zero for a singleton.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                let dist = self.space.distance_unchecked(&self.points[i], &self.points[j]);
                if dist > d {
                    d = dist;
                }
            }
        }
        d
    }

    /// The set scaled coordinatewise by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self, SpaceError> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(SpaceError::InvalidScale(factor));
        }
        let points = self
            .points
            .iter()
            .map(|v| Vector::new(v.iter().map(|&x| x * factor).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.space, points)
    }

    /// The set translated by `shift`.
    pub fn translated(&self, shift: &[f64]) -> Result<Self, SpaceError> {
        if shift.len() != self.dim {
            return Err(SpaceError::DimensionMismatch { expected: self.dim, got: shift.len() });
        }
        let points = self
            .points
            .iter()
            .map(|v| Vector::new(v.iter().zip(shift).map(|(&x, &s)| x + s).collect()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(self.space, points)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(p: f64) -> LpSpace {
        LpSpace::new(p).unwrap()
    }

    #[test]
    fn exponent_validation() {
        for bad in [1.0, 0.5, -2.0, f64::INFINITY, f64::NAN] {
            assert!(LpSpace::new(bad).is_err(), "p = {bad} should be rejected");
        }
        for good in [1.0 + 1e-9, 1.5, 2.0, 10.0, 1e6] {
            assert!(LpSpace::new(good).is_ok());
        }
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(space(2.0).q(), 2.0);
        assert_eq!(space(3.0).q(), 1.5);
        assert_eq!(space(1.5).q(), 3.0);
        let s = space(1.3);
        assert!((1.0 / s.p() + 1.0 / s.q() - 1.0).abs() <= 1e-12);
        let back = s.conjugate().conjugate();
        assert!((back.p() - s.p()).abs() <= 1e-12);
    }

    #[test]
    fn norms() {
        assert_eq!(space(2.0).norm(&[3.0, 4.0]), 5.0);
        assert!((space(2.0).norm(&[1.0, 1.0]) - 2.0_f64.sqrt()).abs() <= 1e-15);
        assert!((space(3.0).norm(&[1.0, 1.0, 1.0]) - 3.0_f64.powf(1.0 / 3.0)).abs() <= 1e-15);
        assert_eq!(space(4.0).norm(&[0.0, 0.0]), 0.0);
        // powf round-trip: |x| -> |x|^p -> (..)^(1/p) may be off by an ulp.
        assert!((space(2.5).norm(&[-7.0]) - 7.0).abs() <= 1e-12);
    }

    #[test]
    fn distances() {
        let s = space(3.0);
        let d = s.distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert!((d - 2.0_f64.powf(1.0 / 3.0)).abs() <= 1e-15);
        assert_eq!(s.distance(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert!(matches!(
            s.distance(&[1.0], &[1.0, 2.0]),
            Err(SpaceError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn duality_map_values() {
        let s = space(3.0);
        let j = s.duality_map(&[2.0, -1.0, 0.0]);
        assert_eq!(j, vec![4.0, -1.0, 0.0]);
        // p = 2 goes through the general path yet stays the identity to rounding.
        let v = [0.3, -1.7, 0.0, 2.5];
        let id = space(2.0).duality_map(&v);
        for (a, b) in id.iter().zip(v.iter()) {
            assert!((a - b).abs() <= 1e-15 * b.abs());
        }
    }

    #[test]
    fn duality_map_identities() {
        let s = space(1.7);
        let v = [0.4, -2.0, 0.0, 1.25];
        let j = s.duality_map(&v);
        let n = s.norm(&v);
        let pairing = dual_pairing(&v, &j).unwrap();
        assert!((pairing - n.powf(s.p())).abs() <= 1e-12 * n.powf(s.p()));
        assert!((s.dual_norm(&j) - n.powf(s.p() - 1.0)).abs() <= 1e-12);
        // The conjugate map inverts: J_q(J_p(v)) = v.
        let back = s.conjugate().duality_map(&j);
        for (a, b) in back.iter().zip(v.iter()) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }

    #[test]
    fn pairing() {
        assert_eq!(dual_pairing(&[1.0, 2.0], &[3.0, -1.0]).unwrap(), 1.0);
        assert!(dual_pairing(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn vector_validation() {
        assert!(Vector::new(vec![]).is_err());
        assert!(matches!(
            Vector::new(vec![1.0, f64::NAN]),
            Err(SpaceError::NonFiniteCoordinate { index: 1 })
        ));
        assert!(Vector::new(vec![1.0, -2.0]).is_ok());
    }

    #[test]
    fn point_set_validation() {
        let s = space(2.0);
        assert!(matches!(PointSet::new(s, vec![]), Err(SpaceError::EmptyPointSet)));
        let ragged = PointSet::from_rows(s, vec![vec![1.0], vec![1.0, 2.0]]);
        assert!(matches!(ragged, Err(SpaceError::DimensionMismatch { .. })));
    }

    #[test]
    fn diameters() {
        let s = space(2.0);
        let a = PointSet::from_rows(s, vec![vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        assert_eq!(a.diameter(), 2.0);
        let single = PointSet::from_rows(s, vec![vec![5.0, 5.0]]).unwrap();
        assert_eq!(single.diameter(), 0.0);
        let basis = PointSet::from_rows(
            space(3.0),
            vec![
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
        )
        .unwrap();
        assert!((basis.diameter() - 2.0_f64.powf(1.0 / 3.0)).abs() <= 1e-15);
    }

    #[test]
    fn scaling_and_translation() {
        let s = space(1.5);
        let a = PointSet::from_rows(s, vec![vec![0.0, 1.0], vec![2.0, -1.0]]).unwrap();
        let scaled = a.scaled(3.0).unwrap();
        assert!((scaled.diameter() - 3.0 * a.diameter()).abs() <= 1e-12 * a.diameter());
        let moved = a.translated(&[5.0, -5.0]).unwrap();
        assert!((moved.diameter() - a.diameter()).abs() <= 1e-12 * a.diameter());
        assert!(a.scaled(0.0).is_err());
        assert!(a.translated(&[1.0]).is_err());
    }
}
