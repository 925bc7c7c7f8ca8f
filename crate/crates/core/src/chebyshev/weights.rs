//! Weight subproblem behind certificate extraction: minimize
//! `(1/2) * || sum_i alpha_i f_i ||_2^2` over the probability simplex.
//!
//! Projected gradient with a fixed `1/L` step does the bulk of the work; a
//! least-squares solve on the identified support then sharpens the weights,
//! which matters because downstream checks read residuals near 1e-8.

/// Euclidean projection onto `{ alpha : alpha_i >= 0, sum alpha_i = 1 }`.
///
/// Sort-based: find the largest prefix of the descending sort whose shifted
/// values stay positive, subtract the common shift, clip the rest to zero.
pub(crate) fn project_to_simplex(v: &mut [f64]) {
    let n = v.len();
    if n == 0 {
        return;
    }
    if n == 1 {
        v[0] = 1.0;
        return;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = sorted[0] - 1.0;
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - 1.0) / (k as f64 + 1.0);
        if u - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
    // One exact renormalization pass to absorb the clip rounding.
    let sum: f64 = v.iter().sum();
    if sum > 0.0 {
        for x in v.iter_mut() {
            *x /= sum;
        }
    } else {
        let uniform = 1.0 / n as f64;
        for x in v.iter_mut() {
            *x = uniform;
        }
    }
}

/// `sum_i alpha_i f_i`, accumulated in index order.
pub(crate) fn combine(functionals: &[Vec<f64>], alpha: &[f64]) -> Vec<f64> {
    let dim = functionals.first().map_or(0, |f| f.len());
    let mut v = vec![0.0; dim];
    for (f, &a) in functionals.iter().zip(alpha) {
        if a == 0.0 {
            continue;
        }
        for (vk, &fk) in v.iter_mut().zip(f) {
            *vk += a * fk;
        }
    }
    v
}

fn objective(functionals: &[Vec<f64>], alpha: &[f64]) -> f64 {
    let v = combine(functionals, alpha);
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

/// Upper estimate of the largest eigenvalue of the Gram matrix of the
/// functionals, via matrix-free power iteration.
fn lipschitz_estimate(functionals: &[Vec<f64>]) -> f64 {
    let m = functionals.len();
    let mut u: Vec<f64> = (0..m).map(|j| 1.0 + 1e-3 * j as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..25 {
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            break;
        }
        for x in u.iter_mut() {
            *x /= norm;
        }
        let v = combine(functionals, &u);
        // (G u)_j = <f_j, v>; lambda tracks the Rayleigh quotient.
        let mut gu = vec![0.0; m];
        let mut rayleigh = 0.0;
        for (j, f) in functionals.iter().enumerate() {
            let dot = f.iter().zip(&v).map(|(&a, &b)| a * b).sum::<f64>();
            gu[j] = dot;
            rayleigh += dot * u[j];
        }
        lambda = rayleigh;
        u = gu;
    }
    if lambda > 0.0 {
        lambda * 1.02
    } else {
        1.0
    }
}

/// Runs `iters` projected-gradient steps in place, returning the objective.
///
/// `alpha` is projected on entry, so any warm start is acceptable.
pub(crate) fn pgd_steps(functionals: &[Vec<f64>], alpha: &mut [f64], iters: usize) -> f64 {
    let m = functionals.len();
    debug_assert_eq!(alpha.len(), m);
    if m == 1 {
        alpha[0] = 1.0;
        return objective(functionals, alpha);
    }
    project_to_simplex(alpha);
    let step = 1.0 / lipschitz_estimate(functionals);
    let mut obj = objective(functionals, alpha);
    let mut since_check = 0usize;
    let mut obj_at_check = obj;
    for _ in 0..iters {
        let v = combine(functionals, alpha);
        for (j, f) in functionals.iter().enumerate() {
            let grad = f.iter().zip(&v).map(|(&a, &b)| a * b).sum::<f64>();
            alpha[j] -= step * grad;
        }
        project_to_simplex(alpha);
        since_check += 1;
        if since_check == 50 {
            obj = objective(functionals, alpha);
            // Plateau exit: nothing left to gain at f64 resolution.
            if obj_at_check - obj <= 1e-12 * obj.max(1e-30) {
                break;
            }
            obj_at_check = obj;
            since_check = 0;
        }
    }
    objective(functionals, alpha)
}

/// Least-squares polish on a candidate support: minimize `||F beta||_2` over
/// `sum beta = 1` with the simplex inequality handled by support pruning.
///
/// Returns `None` when every support shrinks to nothing or the solve fails;
/// the caller keeps the projected-gradient weights in that case.
fn face_polish(functionals: &[Vec<f64>], support: &[usize]) -> Option<Vec<f64>> {
    use nalgebra::{DMatrix, DVector};

    let dim = functionals[0].len();
    let mut sup: Vec<usize> = support.to_vec();
    for _round in 0..support.len() {
        let s = sup.len();
        if s == 0 {
            return None;
        }
        if s == 1 {
            let mut beta = vec![0.0; functionals.len()];
            beta[sup[0]] = 1.0;
            return Some(beta);
        }
        // Parametrize the affine constraint: beta = uniform + N u, where the
        // columns of N are e_k - e_{k+1} over support positions.
        let base = 1.0 / s as f64;
        let a_mat = DMatrix::from_fn(dim, s - 1, |r, c| {
            functionals[sup[c]][r] - functionals[sup[c + 1]][r]
        });
        let rhs = DVector::from_fn(dim, |r, _| {
            -base * sup.iter().map(|&j| functionals[j][r]).sum::<f64>()
        });
        let svd = a_mat.svd(true, true);
        let u = match svd.solve(&rhs, 1e-13) {
            Ok(u) => u,
            Err(_) => return None,
        };
        let mut beta_sup = vec![base; s];
        for k in 0..(s - 1) {
            beta_sup[k] += u[k];
            beta_sup[k + 1] -= u[k];
        }
        let (worst_pos, worst) = beta_sup
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, &x)| (i, x))?;
        if worst < -1e-10 {
            sup.remove(worst_pos);
            continue;
        }
        let mut beta = vec![0.0; functionals.len()];
        let total: f64 = beta_sup.iter().map(|&x| x.max(0.0)).sum();
        if !total.is_finite() || total <= 0.0 {
            return None;
        }
        for (k, &j) in sup.iter().enumerate() {
            beta[j] = beta_sup[k].max(0.0) / total;
        }
        return Some(beta);
    }
    None
}

/// Full solve: projected gradient from a warm start (or uniform), then the
/// face polish if it does not worsen the objective.
pub(crate) fn solve_weights(
    functionals: &[Vec<f64>],
    warm: Option<&[f64]>,
    max_iters: usize,
) -> Vec<f64> {
    let m = functionals.len();
    if m == 0 {
        return vec![];
    }
    let mut alpha = match warm {
        Some(w) if w.len() == m => w.to_vec(),
        _ => vec![1.0 / m as f64; m],
    };
    let obj_pgd = pgd_steps(functionals, &mut alpha, max_iters);
    let support: Vec<usize> = (0..m).filter(|&j| alpha[j] > 1e-12).collect();
    if let Some(beta) = face_polish(functionals, &support) {
        if objective(functionals, &beta) <= obj_pgd * (1.0 + 1e-12) + 1e-300 {
            return beta;
        }
    }
    alpha
}
