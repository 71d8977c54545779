//! Exact decentering term under an L2 ball and a diagonal RKHS norm.

use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Error, Result};
use crate::sequences::FourierFunction;

/// Minimizer of `Σ w_k h_k²` over `Σ_{k≤K} (h_k - f_k)² + tail ≤ ε²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterfillSolution {
    /// `Σ w_k h_k²`, the squared RKHS norm of the minimizer.
    pub value: f64,
    pub h: Vec<f64>,
    /// Lagrange multiplier; 0 when the ball already contains the origin.
    pub mu: f64,
    pub tail: f64,
}

impl WaterfillSolution {
    /// Largest violation of the stationarity conditions `h_k (w_k + μ) = μ f_k`
    /// (relative) and of the active constraint (absolute, in distance).
    pub fn kkt_residual(&self, weights: &[f64], f: &[f64], epsilon: f64) -> f64 {
        if self.mu == 0.0 {
            return self.h.iter().fold(0.0, |a, v| a.max(v.abs()));
        }
        let mut worst = 0.0f64;
        let mut dist2 = self.tail;
        for ((&h, &w), &fk) in self.h.iter().zip(weights).zip(f) {
            let lhs = h * (w + self.mu);
            let rhs = self.mu * fk;
            worst = worst.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE));
            dist2 += (h - fk).powi(2);
        }
        worst.max((dist2.sqrt() - epsilon).abs())
    }
}

/// Decentering term `inf {Σ w_k h_k² : ‖h - f0‖_2 ≤ ε}` with `K = weights.len()`.
///
/// Coefficients of `f0` beyond `K` enter as a fixed residual; they must carry
/// less than `ε²/4` of squared mass.
pub fn phi_a_waterfill(weights: &[f64], f0: &FourierFunction, epsilon: f64) -> Result<WaterfillSolution> {
    let k = weights.len();
    let f: Vec<f64> = (1..=k).map(|i| f0.coeff(i)).collect();
    phi_a_waterfill_with_tail(weights, &f, f0.tail_beyond(k), epsilon)
}

/// As [`phi_a_waterfill`] with the truncated coefficients and the squared
/// tail mass given separately.
pub fn phi_a_waterfill_with_tail(
    weights: &[f64],
    f: &[f64],
    tail: f64,
    epsilon: f64,
) -> Result<WaterfillSolution> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if weights.len() != f.len() || weights.is_empty() {
        return Err(domain("weights and coefficients must have the same positive length"));
    }
    if weights.iter().any(|&w| !(w > 0.0 && w.is_finite())) {
        return Err(domain("weights must be positive and finite"));
    }
    let eps2 = epsilon * epsilon;
    if !(tail >= 0.0) {
        return Err(domain(format!("tail mass must be non-negative, got {tail}")));
    }
    if tail >= eps2 / 4.0 {
        return Err(Error::TruncationInsufficient { tail, limit: eps2 / 4.0 });
    }
    let norm2: f64 = f.iter().map(|v| v * v).sum();
    if norm2 + tail <= eps2 {
        return Ok(WaterfillSolution { value: 0.0, h: vec![0.0; f.len()], mu: 0.0, tail });
    }
    let budget = eps2 - tail;
    let mu = solve_multiplier(weights, f, budget)?;
    let h: Vec<f64> = weights.iter().zip(f).map(|(&w, &fk)| mu * fk / (w + mu)).collect();
    let value = weights.iter().zip(&h).map(|(w, h)| w * h * h).sum();
    Ok(WaterfillSolution { value, h, mu, tail })
}

/// Residual `Σ (w f/(w+μ))²` and its derivative in `log μ`.
fn residual(weights: &[f64], f: &[f64], mu: f64) -> (f64, f64) {
    let mut g = 0.0;
    let mut dg = 0.0;
    for (&w, &fk) in weights.iter().zip(f) {
        let r = w * fk / (w + mu);
        g += r * r;
        dg -= 2.0 * r * r / (w + mu);
    }
    (g, dg * mu)
}

/// Root of `log Σ (w f/(w+μ))² = log budget` in `x = log μ`: Newton steps
/// kept inside a bisection bracket.
fn solve_multiplier(weights: &[f64], f: &[f64], budget: f64) -> Result<f64> {
    let norm2: f64 = f.iter().map(|v| v * v).sum();
    let w_max = weights.iter().fold(0.0f64, |a, &w| a.max(w));
    // Σ (w f/(w+μ))² ≤ w_max² ‖f‖²/μ², so this upper end undershoots the budget.
    let mut hi = (w_max * (norm2 / budget).sqrt() * 2.0).ln();
    let mut lo = hi;
    let target = budget.ln();
    let mut steps = 0;
    while residual(weights, f, lo.exp()).0.ln() <= target {
        lo -= std::f64::consts::LN_10;
        steps += 1;
        if steps > 400 {
            return Err(numeric("could not bracket the water-filling multiplier"));
        }
    }
    while residual(weights, f, hi.exp()).0.ln() > target {
        hi += std::f64::consts::LN_10;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (g, dg) = residual(weights, f, x.exp());
        let fx = g.ln() - target;
        if fx > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / (dg / g);
        let next = if newton > lo && newton < hi && newton.is_finite() { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() < 1e-15 * x.abs().max(1.0) || hi - lo < 1e-14 {
            return Ok(next.exp());
        }
        x = next;
    }
    Ok(x.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn one_dimensional_projection() {
        let f0 = FourierFunction::new(vec![0.5, 0.0, 0.0]).unwrap();
        let s = phi_a_waterfill(&[1.0, 4.0, 9.0], &f0, 0.1).unwrap();
        assert_relative_eq!(s.value, 0.16, epsilon = 1e-12);
        assert_relative_eq!(s.h[0], 0.4, epsilon = 1e-12);
        assert_relative_eq!(s.mu, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn zero_inside_ball() {
        let s = phi_a_waterfill(&[1.0, 2.0], &FourierFunction::zeros(2), 0.3).unwrap();
        assert_eq!((s.value, s.mu), (0.0, 0.0));
        let f0 = FourierFunction::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(phi_a_waterfill(&[1.0, 2.0], &f0, 0.3).unwrap().value, 0.0);
        assert!(phi_a_waterfill(&[1.0, 2.0], &f0, 0.2).unwrap().value > 0.0);
    }

    #[test]
    fn tail_guard_and_domain() {
        let f0 = FourierFunction::new(vec![1.0, 0.0, 0.3]).unwrap();
        let err = phi_a_waterfill(&[1.0, 2.0], &f0, 0.5).unwrap_err();
        assert!(matches!(err, Error::TruncationInsufficient { .. }));
        assert!(phi_a_waterfill(&[1.0, 2.0, 3.0], &f0, 0.5).is_ok());
        assert!(phi_a_waterfill(&[1.0], &f0, 0.0).is_err());
    }

    #[test]
    fn kkt_holds() {
        let w: Vec<f64> = (1..=8).map(|k| (k as f64).powi(3)).collect();
        let f: Vec<f64> = (1..=8).map(|k| 1.0 / k as f64).collect();
        let s = phi_a_waterfill_with_tail(&w, &f, 0.0, 0.2).unwrap();
        assert!(s.kkt_residual(&w, &f, 0.2) < 1e-10);
    }
}
