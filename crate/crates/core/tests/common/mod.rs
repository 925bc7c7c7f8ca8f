//! Oracles shared by the integration suites. Everything here is independent
//! of the solver under test: closed forms, one-dimensional searches, and
//! planar brute force.
#![allow(dead_code)]

use lpcheb::{LpSpace, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimizer of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Farthest-point distance of the symmetric candidate `t * (1, .., 1)` to
/// the `n` basis vectors of `l_p^n`.
pub fn basis_objective(n: usize, p: f64, t: f64) -> f64 {
    let nm1 = (n - 1) as f64;
    ((1.0 - t).abs().powf(p) + nm1 * t.abs().powf(p)).powf(1.0 / p)
}

/// Basis-set radius by one-dimensional search over symmetric centers.
pub fn basis_radius_search(n: usize, p: f64) -> f64 {
    golden_min(|t| basis_objective(n, p, t), 0.0, 1.0, 200).1
}

/// The stationary point of the symmetric basis objective.
pub fn basis_center_parameter(n: usize, p: f64) -> f64 {
    1.0 / (1.0 + ((n - 1) as f64).powf(1.0 / (p - 1.0)))
}

/// Closed-form basis-set radius, evaluated at the stationary point.
pub fn basis_radius_closed_form(n: usize, p: f64) -> f64 {
    basis_objective(n, p, basis_center_parameter(n, p))
}

/// Radius of the scaled Sylvester-Hadamard rows.
///
/// Coordinatewise sign flips by any row permute the set transitively, so by
/// uniqueness the center is fixed by all of them, forcing every coordinate
/// except the first to zero; minimizing over the remaining scalar gives the
/// center `(n^(-1/p), 0, .., 0)` and radius `(1 - 1/n)^(1/p)`.
pub fn hadamard_radius_closed_form(n: usize, p: f64) -> f64 {
    (1.0 - 1.0 / n as f64).powf(1.0 / p)
}

/// Brute-force planar Chebyshev center: a 101 x 101 grid over the padded
/// bounding box, refined around the incumbent twice.
pub fn grid_search_2d(a: &PointSet) -> (Vec<f64>, f64) {
    assert_eq!(a.dim(), 2, "planar oracle needs dimension 2");
    let space = a.space();
    let radius = |x: f64, y: f64| -> f64 {
        a.iter()
            .map(|pt| space.distance(pt, &[x, y]).unwrap())
            .fold(0.0, f64::max)
    };
    let mut xlo = f64::INFINITY;
    let mut xhi = f64::NEG_INFINITY;
    let mut ylo = f64::INFINITY;
    let mut yhi = f64::NEG_INFINITY;
    for pt in a.iter() {
        xlo = xlo.min(pt[0]);
        xhi = xhi.max(pt[0]);
        ylo = ylo.min(pt[1]);
        yhi = yhi.max(pt[1]);
    }
    let pad = 0.05 * ((xhi - xlo).max(yhi - ylo)).max(1e-6);
    let (mut xlo, mut xhi) = (xlo - pad, xhi + pad);
    let (mut ylo, mut yhi) = (ylo - pad, yhi + pad);

    const STEPS: usize = 100;
    let mut best = (0.5 * (xlo + xhi), 0.5 * (ylo + yhi));
    let mut best_r = radius(best.0, best.1);
    for _pass in 0..3 {
        let dx = (xhi - xlo) / STEPS as f64;
        let dy = (yhi - ylo) / STEPS as f64;
        for i in 0..=STEPS {
            let x = xlo + dx * i as f64;
            for j in 0..=STEPS {
                let y = ylo + dy * j as f64;
                let r = radius(x, y);
                if r < best_r {
                    best_r = r;
                    best = (x, y);
                }
            }
        }
        // Refine: a tenth of the span around the incumbent.
        let (sx, sy) = ((xhi - xlo) / 20.0, (yhi - ylo) / 20.0);
        xlo = best.0 - sx;
        xhi = best.0 + sx;
        ylo = best.1 - sy;
        yhi = best.1 + sy;
    }
    (vec![best.0, best.1], best_r)
}

/// Deterministic random point set with coordinates uniform in
/// `[-scale, scale]`.
pub fn random_set(p: f64, n: usize, dim: usize, scale: f64, seed: u64) -> PointSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-scale..scale)).collect())
        .collect();
    PointSet::from_rows(LpSpace::new(p).unwrap(), rows).unwrap()
}

/// FNV-1a over the exact bit patterns of a float sequence, for determinism
/// comparisons.
pub fn hash_bits<I: IntoIterator<Item = f64>>(values: I) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for byte in v.to_bits().to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
