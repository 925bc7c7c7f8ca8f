//! Chebyshev centers of finite point sets: minimize, over candidate centers
//! `c`, the farthest-point distance `max_i ||c - a_i||_p`.
//!
//! The solver is a two-phase first-order method:
//!
//! 1. an annealed smoothing phase minimizes the temperature-weighted
//!    log-sum-exp of the distances by gradient descent with backtracking,
//!    walking the temperature down a configured schedule, then
//! 2. a polish phase descends the true max along the minimum-norm convex
//!    combination of near-active unit functionals, with a golden-section
//!    line search per step, so the radius decreases monotonically.
//!
//! Optimality is therefore never declared from step sizes or iteration
//! counts alone; a run only succeeds once a certificate meets the tolerance.

mod certificate;
pub(crate) mod weights;

pub use certificate::{
    extract_certificate, t_identity, verify_certificate, Certificate, CertificateError,
    VerificationReport, ACTIVE_TOL_DEFAULT, WEIGHT_DROP_THRESHOLD,
};

use crate::space::{abs_pow, signed_pow, LpSpace, PointSet, SpaceError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Tuning for [`chebyshev_center`].
///
/// Invariants, checked on use: `tol` is finite and positive, `max_iters >= 1`,
/// and `smoothing_schedule` is strictly decreasing with positive entries.
/// Schedule entries are temperatures relative to the initial radius estimate,
/// which keeps the whole solve equivariant under rescaling of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Certificate residual at which the solve is accepted.
    pub tol: f64,
    /// Total iteration budget across both phases and any restarts.
    pub max_iters: usize,
    /// Relative temperatures for the smoothing phase, strictly decreasing.
    pub smoothing_schedule: Vec<f64>,
    /// Seed for the (rarely needed) randomized restart perturbations.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iters: 100_000,
            smoothing_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(SolverError::InvalidConfig(format!(
                "tol must be finite and positive, got {}",
                self.tol
            )));
        }
        if self.max_iters == 0 {
            return Err(SolverError::InvalidConfig("max_iters must be at least 1".into()));
        }
        let s = &self.smoothing_schedule;
        for (k, &t) in s.iter().enumerate() {
            if !t.is_finite() || t <= 0.0 {
                return Err(SolverError::InvalidConfig(format!(
                    "smoothing_schedule[{k}] must be finite and positive, got {t}"
                )));
            }
            if k > 0 && t >= s[k - 1] {
                return Err(SolverError::InvalidConfig(
                    "smoothing_schedule must be strictly decreasing".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A solved center with its recomputed radius and certificate residual.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterResult {
    pub center: Vec<f64>,
    /// `max_i ||center - a_i||`, recomputed from the returned center rather
    /// than trusted from solver state.
    pub radius: f64,
    /// Residual of the certificate extracted at `center` with the default
    /// active tolerance; zero by convention for single-point sets.
    pub certificate_residual: f64,
    /// Iterations consumed across both phases.
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(
        "no certificate below residual {tol:.3e} within {iterations} iterations \
         (best residual {residual:.3e}); best iterate is attached"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
        best: Box<CenterResult>,
    },
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// The farthest-point distance `max_i ||c - a_i||` at a candidate center.
pub fn radius_at(a: &PointSet, c: &[f64]) -> Result<f64, SpaceError> {
    if c.len() != a.dim() {
        return Err(SpaceError::DimensionMismatch { expected: a.dim(), got: c.len() });
    }
    let space = a.space();
    Ok(a.iter().fold(0.0, |m, pt| m.max(space.distance_unchecked(pt, c))))
}

/// Computes the Chebyshev center of `a`.
///
/// Single-point sets (after removing duplicates) return the point itself with
/// radius zero; two-point sets return the midpoint. Larger sets run the
/// two-phase solve. On success the result's certificate residual is at most
/// `cfg.tol`; when the budget runs out, the best iterate found is returned
/// inside [`SolverError::NonConvergence`].
pub fn chebyshev_center(a: &PointSet, cfg: &SolverConfig) -> Result<CenterResult, SolverError> {
    cfg.validate()?;
    let distinct = dedup_points(a);
    if distinct.len() == 1 {
        let center = a.point(distinct[0]).to_vec();
        let radius = radius_at(a, &center)?;
        return Ok(CenterResult { center, radius, certificate_residual: 0.0, iterations: 0 });
    }
    if distinct.len() == 2 {
        let x = a.point(distinct[0]);
        let y = a.point(distinct[1]);
        let center: Vec<f64> = x.iter().zip(y).map(|(&u, &v)| 0.5 * (u + v)).collect();
        let radius = radius_at(a, &center)?;
        let residual = extract_certificate(a, &center, ACTIVE_TOL_DEFAULT)
            .map(|cert| cert.residual)
            .unwrap_or(0.0);
        return Ok(CenterResult { center, radius, certificate_residual: residual, iterations: 0 });
    }
    Engine::new(a, distinct, cfg).run()
}

/// Indices of the first occurrences of each distinct point, in input order.
fn dedup_points(a: &PointSet) -> Vec<usize> {
    use std::collections::HashSet;
    let mut seen: HashSet<Vec<u64>> = HashSet::with_capacity(a.len());
    let mut kept = Vec::new();
    for i in 0..a.len() {
        // `x + 0.0` collapses -0.0 onto +0.0 so the bit key matches value
        // equality; NaN cannot occur in a validated point set.
        let key: Vec<u64> = a.point(i).iter().map(|&x| (x + 0.0).to_bits()).collect();
        if seen.insert(key) {
            kept.push(i);
        }
    }
    kept
}

struct BestIterate {
    center: Vec<f64>,
    radius: f64,
}

struct Engine<'a> {
    a: &'a PointSet,
    pts: Vec<&'a [f64]>,
    space: LpSpace,
    dim: usize,
    cfg: &'a SolverConfig,
    iterations: usize,
}

enum PolishOutcome {
    Converged(CenterResult),
    /// Budget exhausted or progress stalled; the caller may restart.
    Halted,
}

impl<'a> Engine<'a> {
    fn new(a: &'a PointSet, distinct: Vec<usize>, cfg: &'a SolverConfig) -> Self {
        let pts: Vec<&[f64]> = distinct.iter().map(|&i| a.point(i)).collect();
        Self { a, pts, space: a.space(), dim: a.dim(), cfg, iterations: 0 }
    }

    fn run(mut self) -> Result<CenterResult, SolverError> {
        let mut c = self.mean();
        let r_scale = self.max_dist(&c).max(f64::MIN_POSITIVE);
        let mut best = BestIterate { center: c.clone(), radius: self.max_dist(&c) };
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);

        const MAX_ATTEMPTS: usize = 3;
        for attempt in 0..MAX_ATTEMPTS {
            if attempt > 0 {
                // Rare path: re-enter from a perturbed best iterate. The
                // objective is convex, so there is no basin to escape and no
                // point re-running the smoothing schedule; the jiggle only
                // shuffles which kinks the polish sees first.
                c = best.center.clone();
                let scale = 1e-3 * best.radius.max(f64::MIN_POSITIVE);
                for x in c.iter_mut() {
                    *x += scale * rng.gen_range(-1.0..1.0);
                }
            } else {
                for &tau_rel in &self.cfg.smoothing_schedule {
                    self.smooth_stage(&mut c, tau_rel * r_scale, r_scale, &mut best);
                    if self.iterations >= self.cfg.max_iters {
                        break;
                    }
                }
            }
            match self.polish(&mut c, &mut best) {
                PolishOutcome::Converged(result) => return Ok(result),
                PolishOutcome::Halted => {
                    if self.iterations >= self.cfg.max_iters {
                        break;
                    }
                }
            }
        }

        let residual = extract_certificate(self.a, &best.center, ACTIVE_TOL_DEFAULT)
            .map(|cert| cert.residual)
            .unwrap_or(f64::INFINITY);
        let radius = radius_at(self.a, &best.center)?;
        Err(SolverError::NonConvergence {
            iterations: self.iterations,
            residual,
            tol: self.cfg.tol,
            best: Box::new(CenterResult {
                center: best.center,
                radius,
                certificate_residual: residual,
                iterations: self.iterations,
            }),
        })
    }

    fn mean(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for pt in &self.pts {
            for (ck, &x) in c.iter_mut().zip(*pt) {
                *ck += x;
            }
        }
        let n = self.pts.len() as f64;
        for ck in c.iter_mut() {
            *ck /= n;
        }
        c
    }

    fn distances(&self, c: &[f64]) -> Vec<f64> {
        self.pts.iter().map(|pt| self.space.distance_unchecked(pt, c)).collect()
    }

    fn max_dist(&self, c: &[f64]) -> f64 {
        self.distances(c).into_iter().fold(0.0, f64::max)
    }

    /// Smoothed objective `tau * log sum_i exp(d_i / tau)` (max-shifted) and
    /// its gradient at `c`.
    fn smoothed(&self, c: &[f64], tau: f64) -> (f64, Vec<f64>) {
        let d = self.distances(c);
        let m = d.iter().fold(f64::NEG_INFINITY, |acc, &x| acc.max(x));
        let w: Vec<f64> = d.iter().map(|&di| ((di - m) / tau).exp()).collect();
        let wsum: f64 = w.iter().sum();
        let value = m + tau * wsum.ln();
        let e = self.space.p() - 1.0;
        let mut grad = vec![0.0; self.dim];
        for (i, pt) in self.pts.iter().enumerate() {
            let wi = w[i] / wsum;
            if wi <= 1e-18 || d[i] <= 0.0 {
                continue;
            }
            // grad of d_i at c is J(c - a_i) / d_i^(p-1).
            let scale = wi * abs_pow(d[i], -e);
            for (gk, (&ck, &ak)) in grad.iter_mut().zip(c.iter().zip(*pt)) {
                *gk += scale * signed_pow(ck - ak, e);
            }
        }
        (value, grad)
    }

    /// One temperature stage: gradient descent with backtracking until the
    /// gradient is small on the scale of `tau` or the stage budget is spent.
    fn smooth_stage(&mut self, c: &mut Vec<f64>, tau: f64, r_scale: f64, best: &mut BestIterate) {
        const STAGE_BUDGET: usize = 300;
        const ARMIJO: f64 = 1e-4;
        let mut step = 0.1 * r_scale;
        let (mut value, mut grad) = self.smoothed(c, tau);
        for _ in 0..STAGE_BUDGET {
            if self.iterations >= self.cfg.max_iters {
                return;
            }
            let gn2: f64 = grad.iter().map(|g| g * g).sum();
            if gn2.sqrt() * r_scale <= 0.05 * tau {
                return;
            }
            let mut s = (step * 2.0).min(10.0 * r_scale);
            let mut accepted = false;
            for _ in 0..60 {
                let trial: Vec<f64> = c.iter().zip(&grad).map(|(&ck, &gk)| ck - s * gk).collect();
                let (tv, tg) = self.smoothed(&trial, tau);
                if tv <= value - ARMIJO * s * gn2 {
                    *c = trial;
                    value = tv;
                    grad = tg;
                    step = s;
                    accepted = true;
                    break;
                }
                s *= 0.5;
            }
            self.iterations += 1;
            let r_here = self.max_dist(c);
            if r_here < best.radius {
                best.center = c.clone();
                best.radius = r_here;
            }
            if !accepted {
                // Line search hit the kink floor; the polish phase takes over.
                return;
            }
        }
    }

    /// `max_i ||c + t v - a_i||`, the line-search objective along `v`.
    fn radius_along(&self, c: &[f64], v: &[f64], t: f64) -> f64 {
        let shifted: Vec<f64> = c.iter().zip(v).map(|(&ck, &vk)| ck + t * vk).collect();
        self.max_dist(&shifted)
    }

    /// Min-norm subgradient polish with exact line search on the true max.
    ///
    /// Per round: convex weights minimizing `|| sum_i alpha_i u_i ||_2` over
    /// a near-active band make `v = sum_i alpha_i u_i` the negative of the
    /// minimum-norm element of the band's subdifferential; by the projection
    /// inequality `<u_i, v> >= ||v||^2` every band distance shrinks to first
    /// order along `v`, and a golden-section search picks the best step, so
    /// the radius never increases. A wide band can have a vanishing
    /// direction while the true farthest points still spread, so a round
    /// whose band cannot move the center hands over to a geometrically
    /// tighter band; only the tightest band's direction vanishing signals
    /// optimality. Convergence is declared once the certificate extracted at
    /// the center meets `tol`; rounds without certificate progress count
    /// toward a stall exit.
    fn polish(&mut self, c: &mut Vec<f64>, best: &mut BestIterate) -> PolishOutcome {
        let e = self.space.p() - 1.0;
        let mut alpha: Vec<f64> = Vec::new();
        let mut prev_support: Vec<usize> = Vec::new();
        let mut best_residual = f64::INFINITY;
        let mut last_check_radius = f64::INFINITY;
        let mut stalled_checks = 0usize;
        let mut round = 0usize;
        let tau_floor = (0.25 * self.cfg.tol).max(1e-13);

        loop {
            if self.iterations >= self.cfg.max_iters {
                return PolishOutcome::Halted;
            }
            let d = self.distances(c);
            let r_c = d.iter().fold(0.0_f64, |m, &x| m.max(x));
            if r_c < best.radius {
                best.center = c.clone();
                best.radius = r_c;
            }

            let mut tau = ACTIVE_TOL_DEFAULT;
            let mut moved = false;
            let mut band_len = usize::MAX;
            loop {
                let cut = (1.0 - tau) * r_c;
                let support: Vec<usize> =
                    (0..self.pts.len()).filter(|&i| d[i] >= cut).collect();
                // Nested bands of equal size are the same set; skip the rung.
                if support.len() != band_len {
                    band_len = support.len();
                    // Unit dual functionals u_i = J(a_i - c) / d_i^(p-1).
                    let units: Vec<Vec<f64>> = support
                        .iter()
                        .map(|&i| {
                            let scale = abs_pow(d[i], -e);
                            self.pts[i]
                                .iter()
                                .zip(c.iter())
                                .map(|(&ak, &ck)| scale * signed_pow(ak - ck, e))
                                .collect()
                        })
                        .collect();
                    if support != prev_support {
                        alpha = remap_weights(&prev_support, &alpha, &support);
                        prev_support = support;
                    }
                    alpha = weights::solve_weights(&units, Some(alpha.as_slice()), 150);
                    let v = weights::combine(&units, &alpha);
                    let rho = self.space.dual_norm(&v);
                    self.iterations += 1;
                    // A direction below tolerance is noise; fall through to
                    // the tighter rung instead of searching along it.
                    if rho > self.cfg.tol {
                        let vn2: f64 = v.iter().map(|x| x * x).sum();
                        let step = self.line_search(c, &v, r_c, vn2.sqrt());
                        if step > 0.0 {
                            for (ck, &vk) in c.iter_mut().zip(&v) {
                                *ck += step * vk;
                            }
                            moved = true;
                            break;
                        }
                    }
                }
                if tau <= tau_floor {
                    break;
                }
                tau = (tau / 4.0).max(tau_floor);
            }

            // A round that cannot decrease the radius at any band width sits
            // at the kink floor: verify right away instead of on cadence.
            if !moved || round % 16 == 15 {
                match extract_certificate(self.a, c, ACTIVE_TOL_DEFAULT) {
                    Ok(cert) if cert.residual <= self.cfg.tol => {
                        let radius = self.full_radius(c);
                        return PolishOutcome::Converged(CenterResult {
                            center: c.clone(),
                            radius,
                            certificate_residual: cert.residual,
                            iterations: self.iterations,
                        });
                    }
                    Ok(cert) if !moved => {
                        // The search is radius-driven, and near the optimum
                        // the radius is quadratically flat while the
                        // certificate residual is linear in the center
                        // error, so the line search runs out of visible
                        // decreases first. Finish with a Newton solve on the
                        // active-set optimality system, which needs no
                        // radius comparisons at all.
                        if let Some(refined) = self.newton_refine(c, &cert) {
                            *c = refined;
                            if let Ok(after) =
                                extract_certificate(self.a, c, ACTIVE_TOL_DEFAULT)
                            {
                                let r_here = self.full_radius(c);
                                if r_here < best.radius {
                                    best.center = c.clone();
                                    best.radius = r_here;
                                }
                                if after.residual <= self.cfg.tol {
                                    return PolishOutcome::Converged(CenterResult {
                                        center: c.clone(),
                                        radius: r_here,
                                        certificate_residual: after.residual,
                                        iterations: self.iterations,
                                    });
                                }
                            }
                        }
                        let radius_moved = r_c <= last_check_radius * (1.0 - 1e-13);
                        last_check_radius = r_c;
                        if cert.residual < 0.7 * best_residual || radius_moved {
                            best_residual = best_residual.min(cert.residual);
                            stalled_checks = 0;
                        } else {
                            stalled_checks += 1;
                            if stalled_checks >= 12 {
                                return PolishOutcome::Halted;
                            }
                        }
                    }
                    Ok(cert) => {
                        // For p away from 2 the residual tracks the center
                        // error through a small Hoelder exponent and decays
                        // slowly, so a shrinking radius also counts as
                        // progress; stall only when both measures sit still.
                        let radius_moved = r_c <= last_check_radius * (1.0 - 1e-13);
                        last_check_radius = r_c;
                        if cert.residual < 0.7 * best_residual || radius_moved {
                            best_residual = best_residual.min(cert.residual);
                            stalled_checks = 0;
                        } else {
                            stalled_checks += 1;
                            if stalled_checks >= 12 {
                                return PolishOutcome::Halted;
                            }
                        }
                    }
                    Err(_) => return PolishOutcome::Halted,
                }
            }
            round += 1;
        }
    }

    /// Golden-section line search for `argmin_t` of the radius along `v`;
    /// returns 0 when no probed step beats the current radius `r_c`.
    fn line_search(&self, c: &[f64], v: &[f64], r_c: f64, vn: f64) -> f64 {
        const INV_PHI: f64 = 0.618_033_988_749_894_8;
        let mut t_best = 0.0_f64;
        let mut g_best = r_c;
        let mut consider = |t: f64, g: f64| {
            if g < g_best {
                g_best = g;
                t_best = t;
            }
        };

        // Bracket a minimum of the (convex) section: expand while the
        // objective keeps falling, otherwise the minimum is below the probe.
        let probe = 0.1 * r_c / vn;
        let g_probe = self.radius_along(c, v, probe);
        consider(probe, g_probe);
        let (lo, hi) = if g_probe < r_c {
            let mut t_prev = 0.0_f64;
            let mut t_cur = probe;
            let mut g_cur = g_probe;
            let mut upper = 2.0 * probe;
            for _ in 0..80 {
                let t_next = 2.0 * t_cur;
                let g_next = self.radius_along(c, v, t_next);
                consider(t_next, g_next);
                if g_next >= g_cur {
                    upper = t_next;
                    break;
                }
                t_prev = t_cur;
                t_cur = t_next;
                g_cur = g_next;
                upper = 2.0 * t_next;
            }
            (t_prev, upper)
        } else {
            (0.0, probe)
        };

        let (mut lo, mut hi) = (lo, hi);
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let mut g1 = self.radius_along(c, v, x1);
        consider(x1, g1);
        let mut g2 = self.radius_along(c, v, x2);
        consider(x2, g2);
        for _ in 0..48 {
            if g1 <= g2 {
                hi = x2;
                x2 = x1;
                g2 = g1;
                x1 = hi - INV_PHI * (hi - lo);
                g1 = self.radius_along(c, v, x1);
                consider(x1, g1);
            } else {
                lo = x1;
                x1 = x2;
                g1 = g2;
                x2 = lo + INV_PHI * (hi - lo);
                g2 = self.radius_along(c, v, x2);
                consider(x2, g2);
            }
        }
        t_best
    }

    fn full_radius(&self, c: &[f64]) -> f64 {
        let space = self.a.space();
        self.a.iter().fold(0.0, |m, pt| m.max(space.distance_unchecked(pt, c)))
    }

    /// Damped Newton solve of the active-set optimality system
    ///
    /// ```text
    /// sum_i alpha_i u_i(c) = 0,    ||a_i - c|| = r  (i in support),
    /// sum_i alpha_i = 1,
    /// ```
    ///
    /// in the unknowns `(c, alpha, r)`, seeded with the certificate's
    /// support and weights. The duality map has a diagonal Jacobian, so each
    /// step is one dense LU solve in `dim + m + 1` variables and the
    /// iteration needs no radius comparisons, which is exactly what the
    /// line-search phases run out of near the optimum. Returns the refined
    /// center only when the system residual reaches near machine precision,
    /// the weights stay strictly positive (otherwise the support is wrong),
    /// and the overall radius did not regress; any failure returns `None`
    /// and the caller keeps crawling.
    fn newton_refine(&self, c0: &[f64], cert: &Certificate) -> Option<Vec<f64>> {
        use nalgebra::{DMatrix, DVector};

        let m = cert.active_indices.len();
        let dim = self.dim;
        if m < 2 {
            return None;
        }
        let p = self.space.p();
        let e = p - 1.0;
        let pts: Vec<&[f64]> = cert.active_indices.iter().map(|&i| self.a.point(i)).collect();
        let entry_radius = self.max_dist(c0);

        // F(c, alpha, r) and the per-point quantities its Jacobian reuses.
        struct Eval {
            f: DVector<f64>,
            fnorm: f64,
            deltas: Vec<Vec<f64>>,
            dists: Vec<f64>,
            units: Vec<Vec<f64>>,
        }
        let eval = |c: &[f64], alpha: &[f64], r: f64| -> Option<Eval> {
            let mut deltas = Vec::with_capacity(pts.len());
            let mut dists = Vec::with_capacity(pts.len());
            let mut units = Vec::with_capacity(pts.len());
            for pt in &pts {
                let delta: Vec<f64> = pt.iter().zip(c).map(|(&ak, &ck)| ak - ck).collect();
                let d = self.space.norm(&delta);
                if !d.is_finite() || d <= 0.0 {
                    return None;
                }
                let scale = abs_pow(d, -e);
                let u: Vec<f64> = delta.iter().map(|&dk| scale * signed_pow(dk, e)).collect();
                deltas.push(delta);
                dists.push(d);
                units.push(u);
            }
            let mut f = DVector::zeros(dim + pts.len() + 1);
            for k in 0..dim {
                f[k] = alpha.iter().zip(&units).map(|(&w, u)| w * u[k]).sum();
            }
            for (i, &d) in dists.iter().enumerate() {
                f[dim + i] = d - r;
            }
            f[dim + pts.len()] = alpha.iter().sum::<f64>() - 1.0;
            let fnorm = f.amax();
            fnorm.is_finite().then_some(Eval { f, fnorm, deltas, dists, units })
        };

        let mut c = c0.to_vec();
        let mut alpha = cert.weights.clone();
        let mut r = cert.radius;
        let mut cur = eval(&c, &alpha, r)?;
        let nvar = dim + m + 1;

        for _ in 0..30 {
            if cur.fnorm <= 1e-14 * (1.0 + r.abs()) {
                break;
            }
            let mut jac = DMatrix::<f64>::zeros(nvar, nvar);
            // d u_k / d c_l = -(p-1) [ |delta_k|^(p-2) [k=l] d^(1-p) - u_k u_l / d ].
            for (i, u) in cur.units.iter().enumerate() {
                let d = cur.dists[i];
                let w = alpha[i];
                let dscale = abs_pow(d, 1.0 - p);
                for k in 0..dim {
                    // |delta_k|^(p-2) by its limit at zero: 1 for p = 2 (so
                    // the factor drops out), 0 for p > 2, and a pole for
                    // p < 2 where the curvature model breaks down.
                    let dk = cur.deltas[i][k];
                    let diag = if dk == 0.0 {
                        if p < 2.0 {
                            return None;
                        }
                        if p == 2.0 {
                            dscale
                        } else {
                            0.0
                        }
                    } else {
                        dk.abs().powf(p - 2.0) * dscale
                    };
                    if !diag.is_finite() {
                        return None;
                    }
                    jac[(k, k)] -= w * e * diag;
                    for l in 0..dim {
                        jac[(k, l)] += w * e * u[k] * u[l] / d;
                    }
                    // d F1_k / d alpha_i and d F2_i / d c_k.
                    jac[(k, dim + i)] = u[k];
                    jac[(dim + i, k)] = -u[k];
                }
                jac[(dim + i, dim + m)] = -1.0;
                jac[(dim + m, dim + i)] = 1.0;
            }
            let step = jac.lu().solve(&(-&cur.f))?;

            // Backtrack on the residual norm; Newton is quadratic once the
            // support is right, so the full step almost always wins.
            let mut s = 1.0;
            let mut accepted = None;
            for _ in 0..10 {
                let c_try: Vec<f64> =
                    c.iter().enumerate().map(|(k, &ck)| ck + s * step[k]).collect();
                let alpha_try: Vec<f64> =
                    alpha.iter().enumerate().map(|(i, &w)| w + s * step[dim + i]).collect();
                let r_try = r + s * step[dim + m];
                if let Some(next) = eval(&c_try, &alpha_try, r_try) {
                    if next.fnorm < cur.fnorm {
                        accepted = Some((c_try, alpha_try, r_try, next));
                        break;
                    }
                }
                s *= 0.5;
            }
            match accepted {
                Some((c_new, alpha_new, r_new, next)) => {
                    c = c_new;
                    alpha = alpha_new;
                    r = r_new;
                    cur = next;
                }
                None => break,
            }
        }

        let solved = cur.fnorm <= 1e-10 * (1.0 + r.abs());
        let interior = alpha.iter().all(|&w| w > 1e-12);
        let contained = self.max_dist(&c) <= entry_radius * (1.0 + 1e-9);
        (solved && interior && contained && r > 0.0).then_some(c)
    }
}

/// Carries weights from one active support to the next (both ascending);
/// indices leaving the support drop their mass, new ones start at zero.
fn remap_weights(old_support: &[usize], old_alpha: &[f64], new_support: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; new_support.len()];
    let mut oi = 0usize;
    for (k, &idx) in new_support.iter().enumerate() {
        while oi < old_support.len() && old_support[oi] < idx {
            oi += 1;
        }
        if oi < old_support.len() && old_support[oi] == idx {
            out[k] = old_alpha[oi];
        }
    }
    let sum: f64 = out.iter().sum();
    if sum > 0.0 {
        for x in out.iter_mut() {
            *x /= sum;
        }
    } else {
        let unif = 1.0 / new_support.len().max(1) as f64;
        for x in out.iter_mut() {
            *x = unif;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::LpSpace;

    fn set(p: f64, rows: Vec<Vec<f64>>) -> PointSet {
        PointSet::from_rows(LpSpace::new(p).unwrap(), rows).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.tol = 0.0;
        assert!(matches!(cfg.validate(), Err(SolverError::InvalidConfig(_))));
        cfg = SolverConfig { max_iters: 0, ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = SolverConfig { smoothing_schedule: vec![1e-2, 1e-2], ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = SolverConfig { smoothing_schedule: vec![1e-2, -1.0], ..SolverConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = SolverConfig { smoothing_schedule: vec![], ..SolverConfig::default() };
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn radius_at_values() {
        let a = set(2.0, vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        assert_eq!(radius_at(&a, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(radius_at(&a, &[0.0, 0.0]).unwrap(), 2.0);
        assert!(radius_at(&a, &[0.0]).is_err());
    }

    #[test]
    fn singleton_and_duplicates() {
        let a = set(3.0, vec![vec![1.0, -2.0], vec![1.0, -2.0], vec![1.0, -2.0]]);
        let res = chebyshev_center(&a, &SolverConfig::default()).unwrap();
        assert_eq!(res.center, vec![1.0, -2.0]);
        assert_eq!(res.radius, 0.0);
        assert_eq!(res.certificate_residual, 0.0);
    }

    #[test]
    fn two_point_midpoint() {
        let a = set(1.5, vec![vec![0.0, 0.0], vec![2.0, 0.0]]);
        let res = chebyshev_center(&a, &SolverConfig::default()).unwrap();
        assert_eq!(res.center, vec![1.0, 0.0]);
        assert_eq!(res.radius, 1.0);
        assert!(res.certificate_residual <= 1e-10);
    }

    #[test]
    fn signed_zero_duplicates_collapse() {
        let a = set(2.0, vec![vec![0.0, 1.0], vec![-0.0, 1.0]]);
        let res = chebyshev_center(&a, &SolverConfig::default()).unwrap();
        assert_eq!(res.radius, 0.0);
    }

    #[test]
    fn equilateral_center_in_plane() {
        // Equilateral triangle in l_2: the center is the centroid.
        let h = 3.0_f64.sqrt() / 2.0;
        let a = set(2.0, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, h]]);
        let res = chebyshev_center(&a, &SolverConfig::default()).unwrap();
        let circum = 1.0 / 3.0_f64.sqrt();
        assert!((res.radius - circum).abs() <= 1e-7, "radius {}", res.radius);
        assert!((res.center[0] - 0.5).abs() <= 1e-6);
        assert!((res.center[1] - h / 3.0).abs() <= 1e-6);
        assert!(res.certificate_residual <= 1e-8);
    }

    #[test]
    fn basis_vectors_match_diagonal_form() {
        // For the standard basis in l_p the center is t*(1,..,1) with
        // t = 1 / (1 + (n-1)^(1/(p-1))): equalize the one large coordinate
        // gap against the n-1 small ones.
        let p = 3.0;
        let n = 3;
        let rows: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let a = set(p, rows);
        let res = chebyshev_center(&a, &SolverConfig::default()).unwrap();
        let t = 1.0 / (1.0 + 2.0_f64.powf(1.0 / (p - 1.0)));
        let expected = ((1.0 - t).powf(p) + 2.0 * t.powf(p)).powf(1.0 / p);
        assert!((res.radius - expected).abs() <= 1e-7, "radius {}", res.radius);
        for &ck in &res.center {
            assert!((ck - t).abs() <= 1e-5, "center {:?}", res.center);
        }
        assert!(res.certificate_residual <= 1e-8);
    }

    #[test]
    fn radius_dominates_half_diameter() {
        let a = set(
            2.5,
            vec![
                vec![0.3, -1.2, 0.4],
                vec![1.1, 0.2, -0.7],
                vec![-0.5, 0.8, 0.1],
                vec![0.9, -0.4, 1.3],
                vec![-1.0, -0.9, -0.2],
            ],
        );
        let cfg = SolverConfig::default();
        let res = chebyshev_center(&a, &cfg).unwrap();
        assert!(res.radius >= a.diameter() / 2.0 - cfg.tol);
        assert!(res.certificate_residual <= cfg.tol);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = set(
            1.7,
            vec![
                vec![0.0, 1.0, 0.0, 2.0],
                vec![1.0, -1.0, 0.5, 0.0],
                vec![-2.0, 0.3, 1.0, 1.0],
                vec![0.7, 0.7, -0.7, -0.7],
            ],
        );
        let cfg = SolverConfig::default();
        let r1 = chebyshev_center(&a, &cfg).unwrap();
        let r2 = chebyshev_center(&a, &cfg).unwrap();
        assert_eq!(r1.center, r2.center);
        assert_eq!(r1.radius.to_bits(), r2.radius.to_bits());
        assert_eq!(r1.certificate_residual.to_bits(), r2.certificate_residual.to_bits());
    }

    #[test]
    fn budget_exhaustion_reports_best_iterate() {
        let a = set(
            3.0,
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
        );
        let cfg = SolverConfig { max_iters: 2, tol: 1e-14, ..SolverConfig::default() };
        match chebyshev_center(&a, &cfg) {
            Err(SolverError::NonConvergence { best, iterations, .. }) => {
                assert!(iterations <= 2);
                assert_eq!(best.center.len(), 3);
                assert!(best.radius.is_finite());
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }
}
