//! The proximal gradient method and the proximal point algorithm.

use nalgebra::{DMatrix, DVector};

use crate::diagnostics::residual;
use crate::error::{check_dim, Error, Result};
use crate::losses::SmoothLoss;
use crate::oracle;
use crate::penalties::{QuadPiece, TIE_TOL};
use crate::problem::{Bounds, ProblemSpec, SolverConfig};
use crate::trace::IterateTrace;

/// Largest number of piece/active-set combinations the exact PPA step enumerates.
const MAX_PPA_COMBOS: usize = 2_000_000;

fn finite_or_abort(k: usize, f: f64, x: &DVector<f64>) -> Result<()> {
    if f.is_finite() && x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NumericAbort { k, detail: format!("objective {f} is not finite") })
    }
}

fn check_domain(cfg: &SolverConfig, k: usize, x: &DVector<f64>) -> Result<()> {
    if let (true, Some(dom)) = (cfg.theory_mode, cfg.domain.as_ref()) {
        if dom.distance(x) > dom.diameter() {
            return Err(Error::NumericAbort { k, detail: "iterate left the Lipschitz box by more than its diameter".into() });
        }
    }
    Ok(())
}

/// Runs `x^{k+1} ∈ Prox_g^γ(x^k − γ∇f(x^k))`, choosing the minimiser closest
/// to `x^k` (then lexicographically smallest) when the prox is set-valued.
pub fn pg_solve(prob: &ProblemSpec, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<IterateTrace> {
    check_dim(prob.n, x0.len())?;
    cfg.validate(prob)?;
    let gamma = cfg.gamma;
    let mut x = x0.clone();
    let f0 = prob.objective(&x)?;
    finite_or_abort(0, f0, &x)?;
    let mut trace = IterateTrace::new(x.clone(), f0);
    for k in 0..cfg.max_iter {
        check_domain(cfg, k, &x)?;
        let u = &x - gamma * prob.gradient(&x)?;
        let next = prob.penalty.prox_select(&u, gamma, &x)?;
        let f = prob.objective(&next)?;
        finite_or_abort(k + 1, f, &next)?;
        trace.push(next.clone(), f);
        // the selected minimiser is the closest one, so ‖p‖ is the residual
        let pnorm = trace.pnorm(k + 1).unwrap();
        trace.residuals[k] = pnorm;
        x = next;
        if pnorm <= cfg.stop_tol {
            break;
        }
    }
    let last = trace.len() - 1;
    trace.residuals[last] = residual(prob, &x, gamma)?;
    Ok(trace)
}

/// Runs `x^{k+1} ∈ argmin F(x) + ‖x − x^k‖²/(2γ)`. Quadratic losses with
/// separable penalties are solved exactly; other problems in at most two
/// dimensions use the brute-force oracle.
pub fn ppa_solve(prob: &ProblemSpec, cfg: &SolverConfig, x0: &DVector<f64>) -> Result<IterateTrace> {
    check_dim(prob.n, x0.len())?;
    cfg.validate(prob)?;
    let gamma = cfg.gamma;
    let mut x = x0.clone();
    let f0 = prob.objective(&x)?;
    finite_or_abort(0, f0, &x)?;
    let mut trace = IterateTrace::new(x.clone(), f0);
    trace.residuals[0] = residual(prob, &x, gamma)?;
    for k in 0..cfg.max_iter {
        let next = ppa_step(prob, &x, gamma)?;
        let f = prob.objective(&next)?;
        finite_or_abort(k + 1, f, &next)?;
        trace.push(next.clone(), f);
        *trace.residuals.last_mut().unwrap() = residual(prob, &next, gamma)?;
        let pnorm = trace.pnorm(k + 1).unwrap();
        x = next;
        if pnorm <= cfg.stop_tol {
            break;
        }
    }
    Ok(trace)
}

/// One exact proximal-point step from `x`.
pub fn ppa_step(prob: &ProblemSpec, x: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    match (&prob.loss, prob.penalty.scalar()) {
        (SmoothLoss::Quadratic { q_mat, q_vec }, Some(phi)) => {
            let pieces = phi.pieces();
            exact_quadratic_step(prob, q_mat, q_vec, &pieces, x, gamma)
        }
        _ if prob.n <= 2 => brute_force_step(prob, x, gamma),
        _ => Err(Error::InvalidConfig("PPA needs n <= 2 or a quadratic loss with a separable penalty".into())),
    }
}

/// Enumerates one smooth piece and an active set (lower / upper / free) per
/// coordinate; each choice is a linear solve.
fn exact_quadratic_step(
    prob: &ProblemSpec,
    q_mat: &DMatrix<f64>,
    q_vec: &DVector<f64>,
    pieces: &[QuadPiece],
    x: &DVector<f64>,
    gamma: f64,
) -> Result<DVector<f64>> {
    let n = prob.n;
    let per = pieces.len() * 3;
    let total = (per as f64).powi(n as i32);
    if total > MAX_PPA_COMBOS as f64 {
        let limit = ((MAX_PPA_COMBOS as f64).ln() / (per as f64).ln()).floor() as usize;
        return Err(Error::TooManyCoordinates { n, limit });
    }
    let obj = |y: &DVector<f64>| -> f64 {
        prob.objective(y).unwrap_or(f64::INFINITY) + (y - x).norm_squared() / (2.0 * gamma)
    };
    let mut best: Vec<(DVector<f64>, f64)> = Vec::new();
    let mut consider = |y: DVector<f64>| {
        let v = obj(&y);
        if !v.is_finite() {
            return;
        }
        let cur = best.first().map_or(f64::INFINITY, |b| b.1);
        let tol = TIE_TOL * (1.0 + v.abs().min(cur.abs()));
        if v < cur - tol {
            best.clear();
            best.push((y, v));
        } else if v <= cur + tol {
            best.push((y, v));
        }
    };
    for code in 0..per.pow(n as u32) {
        let choice: Vec<(usize, usize)> = (0..n).map(|i| (code / per.pow(i as u32)) % per).map(|c| (c / 3, c % 3)).collect();
        let mut y = DVector::zeros(n);
        let mut free = Vec::new();
        let mut ok = true;
        for (i, &(pi, mode)) in choice.iter().enumerate() {
            let piece = pieces[pi];
            match mode {
                0 if piece.lo.is_finite() => y[i] = piece.lo,
                1 if piece.hi.is_finite() => y[i] = piece.hi,
                2 => free.push(i),
                _ => ok = false,
            }
        }
        if !ok {
            continue;
        }
        if !free.is_empty() {
            // ∇ of ½yᵀQy + qᵀy + Σ(c2 yᵢ² + c1 yᵢ) + ‖y − x‖²/(2γ) on the free block
            let m = free.len();
            let mut h = DMatrix::zeros(m, m);
            let mut rhs = DVector::zeros(m);
            for (a, &i) in free.iter().enumerate() {
                let piece = pieces[choice[i].0];
                rhs[a] = -(q_vec[i] + piece.c1 - x[i] / gamma);
                for j in 0..n {
                    if !free.contains(&j) {
                        rhs[a] -= q_mat[(i, j)] * y[j];
                    }
                }
                for (b, &j) in free.iter().enumerate() {
                    h[(a, b)] = q_mat[(i, j)];
                }
                h[(a, a)] += 2.0 * piece.c2 + 1.0 / gamma;
            }
            let svd = h.clone().svd(true, true);
            let smax = svd.singular_values.max();
            let Ok(sol) = svd.solve(&rhs, 1e-12 * smax.max(1.0)) else { continue };
            if (&h * &sol - &rhs).amax() > 1e-9 * (1.0 + rhs.amax()) {
                continue;
            }
            for (a, &i) in free.iter().enumerate() {
                y[i] = sol[a];
            }
        }
        let inside = choice.iter().enumerate().all(|(i, &(pi, _))| y[i] >= pieces[pi].lo && y[i] <= pieces[pi].hi);
        if inside {
            consider(y);
        }
    }
    closest(best.into_iter().map(|b| b.0).collect(), x)
}

fn brute_force_step(prob: &ProblemSpec, x: &DVector<f64>, gamma: f64) -> Result<DVector<f64>> {
    let obj = |y: &DVector<f64>| -> f64 {
        prob.objective(y).unwrap_or(f64::INFINITY) + (y - x).norm_squared() / (2.0 * gamma)
    };
    let mut radius = 1.0 + x.amax() + gamma * prob.gradient(x)?.amax();
    for _ in 0..4 {
        let (mins, _, edge) = oracle::minimize_box(&obj, &Bounds::around(x, radius), 400)?;
        if !edge {
            return closest(mins, x);
        }
        radius *= 4.0;
    }
    Err(Error::OracleWindow(format!("PPA minimiser still on the boundary at radius {radius}")))
}

fn closest(candidates: Vec<DVector<f64>>, x: &DVector<f64>) -> Result<DVector<f64>> {
    candidates
        .into_iter()
        .min_by(|a, b| {
            (a - x).norm().total_cmp(&(b - x).norm()).then_with(|| {
                a.iter().zip(b.iter()).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .ok_or(Error::OracleNoSolution)
}
