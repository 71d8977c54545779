//! Monte Carlo checks of the two-sided bound
//! `φ(ε) ≤ -log P(‖Z - f0‖ < ε) ≤ φ(ε/2)` and of the lower bound on the
//! concentration function under a constant shift.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::gaussian::{FiniteGaussian, SeriesPrior};
use crate::rng::{derive_seed, Rng};
use crate::sequences::FourierFunction;

use super::box_qp::phi_a_box;
use super::small_ball::{small_ball_series, small_ball_sup_mc, QuadForm, SmallBallMethod};
use super::waterfill::phi_a_waterfill;

/// Deliberate distortion of the bounds, used as a negative control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "factor")]
pub enum Corruption {
    None,
    /// Multiply only the decentering term.
    PhiA(f64),
    /// Multiply the whole concentration function.
    Phi(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub epsilon: f64,
    /// Estimate of `-log P(‖Z - f0‖ < ε)`.
    pub l_hat: f64,
    pub l_se: f64,
    pub phi_eps: f64,
    pub phi_half: f64,
    pub phi_a_eps: f64,
    pub phi_a_half: f64,
    pub se_total: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

/// Compares a tilted Monte Carlo estimate of the decentered small-ball
/// exponent with `φ(ε)` and `φ(ε/2)`; `φ^B` is estimated by tilted MC with
/// `samples` draws and `φ^A` is exact.
pub fn sandwich_check(
    prior: &SeriesPrior,
    f0: &FourierFunction,
    epsilon: f64,
    samples: u64,
    seed: u64,
    corruption: Corruption,
) -> Result<SandwichReport> {
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if f0.support() > prior.k {
        return Err(domain(format!("center has support {} beyond the prior truncation {}", f0.support(), prior.k)));
    }
    let weights = prior.rkhs_weights();
    let centers: Vec<f64> = (1..=prior.k).map(|k| f0.coeff(k)).collect();
    let l = QuadForm::new(prior.variances(), centers)?.neg_log_cdf_tilted(epsilon * epsilon, samples, derive_seed(seed, 0))?;
    let b_eps = small_ball_series(prior, epsilon, SmallBallMethod::TiltedMc, samples, derive_seed(seed, 1))?;
    let b_half = small_ball_series(prior, epsilon / 2.0, SmallBallMethod::TiltedMc, samples, derive_seed(seed, 2))?;
    let a_eps = phi_a_waterfill(&weights, f0, epsilon)?.value;
    let a_half = phi_a_waterfill(&weights, f0, epsilon / 2.0)?.value;
    let (phi_eps, phi_half) = match corruption {
        Corruption::None => (a_eps + b_eps.neg_log_prob, a_half + b_half.neg_log_prob),
        Corruption::PhiA(k) => (k * a_eps + b_eps.neg_log_prob, k * a_half + b_half.neg_log_prob),
        Corruption::Phi(k) => (k * (a_eps + b_eps.neg_log_prob), k * (a_half + b_half.neg_log_prob)),
    };
    let se_total = (l.se.powi(2) + b_eps.se.powi(2) + b_half.se.powi(2)).sqrt();
    let lower = phi_eps - 3.0 * se_total;
    let upper = phi_half + 3.0 * se_total;
    Ok(SandwichReport {
        epsilon,
        l_hat: l.neg_log_prob,
        l_se: l.se,
        phi_eps,
        phi_half,
        phi_a_eps: a_eps,
        phi_a_half: a_half,
        se_total,
        lower,
        upper,
        holds: lower <= l.neg_log_prob && l.neg_log_prob <= upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftReport {
    pub rho: f64,
    pub epsilon: f64,
    /// `φ` at the shifted center `w0 + ρ`.
    pub phi_shifted: f64,
    /// `φ` at `w0`.
    pub phi_base: f64,
    pub phi_a_shifted: f64,
    pub phi_a_base: f64,
    pub phi_b: f64,
    /// `ρ² - 2(|w0(0)| + ε)|ρ|`.
    pub shift_term: f64,
    pub se_total: f64,
    pub holds: bool,
}

/// Checks `φ_{w0+ρ}(ε) ≥ φ_{w0}(ε) + ρ² - 2(|w0(0)| + ε)|ρ| - 3 SE` on a
/// grid law, with one sup-norm small-ball estimate shared by both sides.
pub fn shift_bound_check<F>(
    g: &FiniteGaussian,
    sampler: F,
    w0: &[f64],
    rho: f64,
    epsilon: f64,
    samples: u64,
    seed: u64,
) -> Result<ShiftReport>
where
    F: Fn(&mut Rng) -> Vec<f64> + Sync,
{
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if w0.is_empty() {
        return Err(domain("empty center"));
    }
    let shifted: Vec<f64> = w0.iter().map(|w| w + rho).collect();
    let a_base = phi_a_box(g, w0, epsilon)?.value;
    let a_shift = phi_a_box(g, &shifted, epsilon)?.value;
    let b = small_ball_sup_mc(sampler, epsilon, samples, seed)?;
    let shift_term = rho * rho - 2.0 * (w0[0].abs() + epsilon) * rho.abs();
    let phi_base = a_base + b.neg_log_prob;
    let phi_shifted = a_shift + b.neg_log_prob;
    Ok(ShiftReport {
        rho,
        epsilon,
        phi_shifted,
        phi_base,
        phi_a_shifted: a_shift,
        phi_a_base: a_base,
        phi_b: b.neg_log_prob,
        shift_term,
        se_total: b.se,
        holds: phi_shifted >= phi_base + shift_term - 3.0 * b.se,
    })
}
