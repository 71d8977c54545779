//! Decentering term under a sup-norm box: `min hᵀ Σ^{-1} h` over
//! `|h_i - f0_i| ≤ ε`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Result};
use crate::gaussian::FiniteGaussian;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxSolution {
    /// Squared RKHS norm `hᵀ Σ^{-1} h` of the minimizer.
    pub value: f64,
    pub h: Vec<f64>,
    pub iterations: usize,
    /// Largest KKT violation, scaled by the gradient norm.
    pub kkt_residual: f64,
    /// Whether the active-set refinement replaced the first-order iterate.
    pub polished: bool,
}

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxOptions {
    pub max_iterations: usize,
    /// Relative objective change that counts as stalled.
    pub rel_tol: f64,
    /// Window over which the change is measured.
    pub window: usize,
}

impl Default for BoxOptions {
    fn default() -> Self {
        Self { max_iterations: 200_000, rel_tol: 1e-8, window: 50 }
    }
}

pub fn phi_a_box(g: &FiniteGaussian, f0: &[f64], epsilon: f64) -> Result<BoxSolution> {
    phi_a_box_with(g, f0, epsilon, BoxOptions::default())
}

pub fn phi_a_box_with(g: &FiniteGaussian, f0: &[f64], epsilon: f64, opts: BoxOptions) -> Result<BoxSolution> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if f0.len() != g.dim() {
        return Err(domain(format!("center of length {} for a {}-dim law", f0.len(), g.dim())));
    }
    let lo: Vec<f64> = f0.iter().map(|c| c - epsilon).collect();
    let hi: Vec<f64> = f0.iter().map(|c| c + epsilon).collect();
    solve_box_qp(&g.precision(), &lo, &hi, opts)
}

/// `min hᵀ P h` over `lo ≤ h ≤ hi` for symmetric positive definite `P`.
pub fn solve_box_qp(p: &DMatrix<f64>, lo: &[f64], hi: &[f64], opts: BoxOptions) -> Result<BoxSolution> {
    let n = lo.len();
    let project = |x: &mut DVector<f64>| {
        for i in 0..n {
            x[i] = x[i].clamp(lo[i], hi[i]);
        }
    };
    let objective = |x: &DVector<f64>| x.dot(&(p * x));
    let mut x = DVector::zeros(n);
    project(&mut x);
    if x.iter().all(|&v| v == 0.0) {
        return Ok(BoxSolution { value: 0.0, h: vec![0.0; n], iterations: 0, kkt_residual: 0.0, polished: false });
    }

    // accelerated projected gradient with backtracking and objective restart
    let mut y = x.clone();
    let mut t = 1.0f64;
    let mut step_l = 2.0 * p.diagonal().iter().fold(0.0f64, |a, &d| a.max(d)) / n as f64;
    let mut fx = objective(&x);
    let mut history = vec![fx];
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        let grad = 2.0 * (p * &y);
        let fy = objective(&y);
        let next = loop {
            let mut cand = &y - &grad / step_l;
            project(&mut cand);
            let d = &cand - &y;
            if objective(&cand) <= fy + grad.dot(&d) + 0.5 * step_l * d.norm_squared() * (1.0 + 1e-12) {
                break cand;
            }
            step_l *= 2.0;
        };
        let fnext = objective(&next);
        if fnext > fx {
            // restart momentum from the previous iterate
            t = 1.0;
            y = x.clone();
            continue;
        }
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        y = &next + (&next - &x) * ((t - 1.0) / t_next);
        t = t_next;
        x = next;
        fx = fnext;
        history.push(fx);
        if history.len() > opts.window {
            let old = history[history.len() - 1 - opts.window];
            if (old - fx).abs() <= opts.rel_tol * fx.abs() {
                converged = true;
                break;
            }
        }
    }

    let (x, polished) = match polish(p, lo, hi, &x) {
        Some(px) if objective(&px) <= fx * (1.0 + 1e-9) => (px, true),
        _ => (x, false),
    };
    let kkt = kkt_residual(p, lo, hi, &x);
    if !polished && !converged {
        return Err(numeric(format!(
            "box QP did not converge in {iterations} iterations (KKT residual {kkt:e})"
        )));
    }
    Ok(BoxSolution { value: objective(&x), h: x.iter().copied().collect(), iterations, kkt_residual: kkt, polished })
}

/// Re-solves exactly on the active set read off `x`; returns the result only
/// if it is feasible and satisfies KKT.
fn polish(p: &DMatrix<f64>, lo: &[f64], hi: &[f64], x: &DVector<f64>) -> Option<DVector<f64>> {
    let n = lo.len();
    let mut fixed: Vec<Option<f64>> = (0..n)
        .map(|i| {
            let tol = 1e-7 * (1.0 + lo[i].abs().max(hi[i].abs()));
            if x[i] <= lo[i] + tol {
                Some(lo[i])
            } else if x[i] >= hi[i] - tol {
                Some(hi[i])
            } else {
                None
            }
        })
        .collect();
    // a few rounds of releasing bounds with wrong-sign multipliers
    for _ in 0..=n {
        let cand = solve_with_fixed(p, &fixed)?;
        let grad = 2.0 * (p * &cand);
        let mut changed = false;
        for i in 0..n {
            let tol = 1e-9 * (1.0 + hi[i].abs().max(lo[i].abs()));
            match fixed[i] {
                None if cand[i] < lo[i] - tol => {
                    fixed[i] = Some(lo[i]);
                    changed = true;
                }
                None if cand[i] > hi[i] + tol => {
                    fixed[i] = Some(hi[i]);
                    changed = true;
                }
                Some(v) if v == lo[i] && grad[i] < 0.0 => {
                    fixed[i] = None;
                    changed = true;
                }
                Some(v) if v == hi[i] && grad[i] > 0.0 => {
                    fixed[i] = None;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return (kkt_residual(p, lo, hi, &cand) < 1e-8).then_some(cand);
        }
    }
    None
}

fn solve_with_fixed(p: &DMatrix<f64>, fixed: &[Option<f64>]) -> Option<DVector<f64>> {
    let n = fixed.len();
    let free: Vec<usize> = (0..n).filter(|&i| fixed[i].is_none()).collect();
    let mut x = DVector::from_iterator(n, fixed.iter().map(|v| v.unwrap_or(0.0)));
    if free.is_empty() {
        return Some(x);
    }
    let pff = DMatrix::from_fn(free.len(), free.len(), |a, b| p[(free[a], free[b])]);
    let rhs = DVector::from_fn(free.len(), |a, _| {
        -(0..n).filter_map(|j| fixed[j].map(|v| p[(free[a], j)] * v)).sum::<f64>()
    });
    let sol = pff.cholesky()?.solve(&rhs);
    for (a, &i) in free.iter().enumerate() {
        x[i] = sol[a];
    }
    Some(x)
}

/// Scaled violation of: feasibility, zero gradient on free coordinates,
/// `∇ ≤ 0` at upper bounds and `∇ ≥ 0` at lower bounds.
pub fn kkt_residual(p: &DMatrix<f64>, lo: &[f64], hi: &[f64], x: &DVector<f64>) -> f64 {
    let grad = 2.0 * (p * x);
    let scale = grad.amax().max(1e-300);
    let mut worst = 0.0f64;
    for i in 0..lo.len() {
        let width = (hi[i] - lo[i]).max(1e-300);
        worst = worst.max((lo[i] - x[i]).max(0.0) / width).max((x[i] - hi[i]).max(0.0) / width);
        let at_lo = (x[i] - lo[i]).abs() <= 1e-10 * width;
        let at_hi = (hi[i] - x[i]).abs() <= 1e-10 * width;
        let v = if at_lo && at_hi {
            0.0
        } else if at_lo {
            (-grad[i]).max(0.0)
        } else if at_hi {
            grad[i].max(0.0)
        } else {
            grad[i].abs()
        };
        worst = worst.max(v / scale);
    }
    worst
}
