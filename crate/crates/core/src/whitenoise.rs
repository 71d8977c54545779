//! Gaussian white-noise model in coefficient form.
//!
//! Projecting `dX(t) = f(t) dt + n^{-1/2} dW(t)` on the basis gives
//! `X_k = f_k + g_k/√n` with independent standard normal `g_k`. Under the
//! series prior the posterior is Gaussian with independent coordinates.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::{QuadForm, SmallBallMethod};
use crate::error::{domain, Error, Result};
use crate::gaussian::SeriesPrior;
use crate::rng::{derive_seed, stream};
use crate::sequences::{rate_rn, FourierFunction, RateParams};
use crate::stats::Moments;

/// Coefficient data `X_1, ..., X_K` at noise level `n^{-1/2}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceObservation {
    pub n: f64,
    pub x: Vec<f64>,
}

impl SequenceObservation {
    pub fn k(&self) -> usize {
        self.x.len()
    }
}

pub fn observe<R: Rng + ?Sized>(f0: &FourierFunction, n: f64, k: usize, rng: &mut R) -> Result<SequenceObservation> {
    if !(n >= 1.0 && n.is_finite()) {
        return Err(domain(format!("n must be at least 1, got {n}")));
    }
    if k == 0 {
        return Err(domain("truncation must be at least 1"));
    }
    let sd = n.sqrt().recip();
    let x = (1..=k)
        .map(|i| {
            let g: f64 = rng.sample(StandardNormal);
            f0.coeff(i) + sd * g
        })
        .collect();
    Ok(SequenceObservation { n, x })
}

/// Independent Gaussian coordinates `N(m_k, v_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPosterior {
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

/// `m_k = σ_k² X_k/(σ_k² + 1/n)`, `v_k = (σ_k²/n)/(σ_k² + 1/n)`.
pub fn posterior(prior: &SeriesPrior, obs: &SequenceObservation) -> Result<GaussianPosterior> {
    if prior.k != obs.k() {
        return Err(domain(format!("prior truncation {} differs from data length {}", prior.k, obs.k())));
    }
    let inv_n = 1.0 / obs.n;
    let (means, variances) = prior
        .variances()
        .into_iter()
        .zip(&obs.x)
        .map(|(s2, &x)| (s2 * x / (s2 + inv_n), s2 * inv_n / (s2 + inv_n)))
        .unzip();
    Ok(GaussianPosterior { means, variances })
}

/// The prior seen as a posterior without data.
pub fn prior_as_posterior(prior: &SeriesPrior) -> GaussianPosterior {
    GaussianPosterior { means: vec![0.0; prior.k], variances: prior.variances() }
}

/// A probability with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub probability: f64,
    pub se: f64,
}

fn ball_form(post: &GaussianPosterior, f0: &FourierFunction) -> Result<(QuadForm, f64)> {
    let k = post.means.len();
    let centers = post.means.iter().enumerate().map(|(i, m)| m - f0.coeff(i + 1)).collect();
    Ok((QuadForm::new(post.variances.clone(), centers)?, f0.tail_beyond(k)))
}

/// `Π(Σ_k (θ_k - f0_k)² ≤ r²)`; coefficients of `f0` beyond the posterior
/// truncation add a constant to the quadratic form.
pub fn ball_mass(
    post: &GaussianPosterior,
    f0: &FourierFunction,
    r: f64,
    method: SmallBallMethod,
    samples: u64,
    seed: u64,
) -> Result<MassEstimate> {
    if !(r >= 0.0) {
        return Err(domain(format!("radius must be non-negative, got {r}")));
    }
    let (form, tail) = ball_form(post, f0)?;
    let x = r * r - tail;
    if x <= 0.0 {
        return Ok(MassEstimate { probability: 0.0, se: 0.0 });
    }
    let est = form.cdf(x, method, samples, seed)?;
    let p = est.probability();
    Ok(MassEstimate { probability: p, se: p * est.se })
}

/// Same as [`ball_mass`] but in log space, falling back to the Chernoff
/// upper bound when sampling sees no hits. Returns `(log mass, se, bound_only)`.
pub fn log_ball_mass(
    post: &GaussianPosterior,
    f0: &FourierFunction,
    r: f64,
    method: SmallBallMethod,
    samples: u64,
    seed: u64,
) -> Result<(f64, f64, bool)> {
    let (form, tail) = ball_form(post, f0)?;
    let x = r * r - tail;
    if x <= 0.0 {
        return Ok((f64::NEG_INFINITY, 0.0, false));
    }
    match form.cdf(x, method, samples, seed) {
        Ok(e) => Ok((-e.neg_log_prob, e.se, false)),
        Err(Error::RareEvent { .. }) | Err(Error::InversionFailed(_)) => Ok((form.log_chernoff_bound(x), 0.0, true)),
        Err(e) => Err(e),
    }
}

/// `(K, V2) = (n/2 ‖f - f0‖², n ‖f - f0‖²)`.
pub fn kl_divergence_wn(f0: &FourierFunction, f: &FourierFunction, n: f64) -> (f64, f64) {
    let d2 = f.sub(f0).coeffs().iter().map(|c| c * c).sum::<f64>();
    (0.5 * n * d2, n * d2)
}

/// Membership in `B_KL(f0, ε)`: both `K` and `V2` at most `n ε²`.
pub fn kl_ball_contains(f0: &FourierFunction, f: &FourierFunction, n: f64, epsilon: f64) -> bool {
    let (k, v2) = kl_divergence_wn(f0, f, n);
    let t = n * epsilon * epsilon;
    k <= t && v2 <= t
}

/// `max(4 n^{1/(2α+1)}, K_max(f0))`.
pub fn default_truncation(alpha: f64, n: f64, f0: &FourierFunction) -> usize {
    let k = (4.0 * n.powf(1.0 / (2.0 * alpha + 1.0))).ceil() as usize;
    k.max(f0.support()).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingConfig {
    pub alpha: f64,
    pub beta: f64,
    pub f0: FourierFunction,
    pub ns: Vec<f64>,
    /// Outer radius multiplier.
    pub outer: f64,
    /// Inner radius multiplier.
    pub inner: f64,
    /// Inner radius is `inner · rate / log^p n`.
    pub inner_log_power: f64,
    pub replicates: usize,
    /// Fixed truncation; default rule when `None`.
    pub k: Option<usize>,
    pub method: SmallBallMethod,
    /// Draws per mass when sampling.
    pub samples: u64,
    pub seed: u64,
}

/// Masses for one data replicate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingReplicate {
    pub n: f64,
    pub replicate: usize,
    pub k: usize,
    pub rate: f64,
    pub outer_radius: f64,
    pub inner_radius: f64,
    pub outer_mass: f64,
    pub inner_mass: f64,
    pub ring_mass: f64,
}

/// Replicate averages for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSummary {
    pub n: f64,
    pub k: usize,
    pub rate: f64,
    pub outer_mean: f64,
    pub outer_se: f64,
    pub inner_mean: f64,
    pub inner_se: f64,
    pub ring_mean: f64,
    pub ring_se: f64,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RingResult {
    pub replicates: Vec<RingReplicate>,
    pub summary: Vec<RingSummary>,
}

fn validate_ns(ns: &[f64]) -> Result<()> {
    if ns.is_empty() || ns.iter().any(|&n| !(n >= 1.0 && n.is_finite())) {
        return Err(domain("sample sizes must be a non-empty list of values >= 1"));
    }
    Ok(())
}

/// Posterior masses of `‖f - f0‖ ≤ outer·r_n` and `≤ inner·r_n/log^p n`
/// over replicated data, with `r_n = n^{-(α∧β)/(2α+1)}`.
pub fn ring_experiment(cfg: &RingConfig) -> Result<RingResult> {
    validate_ns(&cfg.ns)?;
    if cfg.replicates == 0 {
        return Err(domain("need at least one replicate"));
    }
    if !(cfg.outer > 0.0 && cfg.inner >= 0.0) {
        return Err(domain("radius multipliers must be non-negative (outer positive)"));
    }
    let mut replicates = Vec::new();
    let mut summary = Vec::new();
    for (idx, &n) in cfg.ns.iter().enumerate() {
        let k = cfg.k.unwrap_or_else(|| default_truncation(cfg.alpha, n, &cfg.f0));
        let prior = SeriesPrior::new(cfg.alpha, k)?;
        let rate = rate_rn(&RateParams::new(cfg.alpha, cfg.beta, n.round() as u64)?);
        let outer_radius = cfg.outer * rate;
        let inner_radius = cfg.inner * rate / n.ln().powf(cfg.inner_log_power);
        let seed_n = derive_seed(cfg.seed, idx as u64);
        let rows: Vec<RingReplicate> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| -> Result<RingReplicate> {
                let obs = observe(&cfg.f0, n, k, &mut stream(seed_n, r as u64))?;
                let post = posterior(&prior, &obs)?;
                let mc_seed = derive_seed(seed_n, r as u64);
                let outer = ball_mass(&post, &cfg.f0, outer_radius, cfg.method, cfg.samples, derive_seed(mc_seed, 1))?;
                let inner = ball_mass(&post, &cfg.f0, inner_radius, cfg.method, cfg.samples, derive_seed(mc_seed, 2))
                    .or_else(|e| match e {
                        Error::RareEvent { .. } => Ok(MassEstimate { probability: 0.0, se: 0.0 }),
                        other => Err(other),
                    })?;
                Ok(RingReplicate {
                    n,
                    replicate: r,
                    k,
                    rate,
                    outer_radius,
                    inner_radius,
                    outer_mass: outer.probability,
                    inner_mass: inner.probability,
                    ring_mass: outer.probability - inner.probability,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let stats = |f: fn(&RingReplicate) -> f64| Moments::from_slice(&rows.iter().map(f).collect::<Vec<_>>());
        let (o, i, g) = (stats(|r| r.outer_mass), stats(|r| r.inner_mass), stats(|r| r.ring_mass));
        summary.push(RingSummary {
            n,
            k,
            rate,
            outer_mean: o.mean(),
            outer_se: o.std_error(),
            inner_mean: i.mean(),
            inner_se: i.std_error(),
            ring_mean: g.mean(),
            ring_se: g.std_error(),
            replicates: cfg.replicates,
        });
        replicates.extend(rows);
    }
    Ok(RingResult { replicates, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// `log Π(‖f - f0‖ ≤ ζ)`.
    pub log_numerator: f64,
    /// `log Π(B_KL(f0, α_n))`.
    pub log_denominator: f64,
    pub log_ratio: f64,
    /// `-2 n α_n²`.
    pub log_threshold: f64,
    pub condition_met: bool,
    /// The numerator is a Chernoff upper bound rather than an estimate.
    pub bound_only: bool,
}

/// Prior mass ratio `Π(‖f - f0‖ ≤ ζ) / Π(B_KL(f0, α_n))` against `e^{-2nα_n²}`.
#[allow(clippy::too_many_arguments)]
pub fn lemma1_ratio(
    prior: &SeriesPrior,
    f0: &FourierFunction,
    zeta: f64,
    alpha_n: f64,
    n: f64,
    method: SmallBallMethod,
    samples: u64,
    seed: u64,
) -> Result<Lemma1Report> {
    if n * alpha_n * alpha_n < 10.0 {
        return Err(Error::Precondition(format!("n α_n² = {} must be at least 10", n * alpha_n * alpha_n)));
    }
    let post = prior_as_posterior(prior);
    let (log_num, _, bound_only) = log_ball_mass(&post, f0, zeta, method, samples, derive_seed(seed, 1))?;
    let (log_den, _, den_bound) = log_ball_mass(&post, f0, alpha_n, method, samples, derive_seed(seed, 2))?;
    if den_bound {
        return Err(Error::RareEvent { hits: 0, samples });
    }
    let log_ratio = log_num - log_den;
    let log_threshold = -2.0 * n * alpha_n * alpha_n;
    Ok(Lemma1Report {
        log_numerator: log_num,
        log_denominator: log_den,
        log_ratio,
        log_threshold,
        condition_met: log_ratio <= log_threshold,
        bound_only,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remark2Row {
    pub n: f64,
    pub k_n: usize,
    pub coefficient: f64,
    pub rate: f64,
    pub radius: f64,
    pub inner_mean: f64,
    pub inner_se: f64,
    pub replicates: usize,
}

/// Truth with a single coefficient `L k_n^{-β}` at `k_n = ⌈n^{1/(2α+1)}⌉`.
pub fn remark2_truth(alpha: f64, beta: f64, n: f64, radius: f64) -> Result<(usize, FourierFunction)> {
    let k_n = n.powf(1.0 / (2.0 * alpha + 1.0)).ceil() as usize;
    let c = radius * (k_n as f64).powf(-beta);
    Ok((k_n, FourierFunction::from_fn(k_n, |k| if k == k_n { c } else { 0.0 })?))
}

/// Inner posterior mass at `rate/M` for the moving truth of [`remark2_truth`].
#[allow(clippy::too_many_arguments)]
pub fn remark2_experiment(
    alpha: f64,
    beta: f64,
    ns: &[f64],
    big_m: f64,
    radius: f64,
    replicates: usize,
    method: SmallBallMethod,
    samples: u64,
    seed: u64,
) -> Result<Vec<Remark2Row>> {
    if !(beta < alpha) {
        return Err(Error::Precondition(format!("requires β < α, got β = {beta}, α = {alpha}")));
    }
    if !(big_m > 0.0 && radius > 0.0) {
        return Err(domain("M and the Sobolev radius must be positive"));
    }
    validate_ns(ns)?;
    let mut out = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let (k_n, f0) = remark2_truth(alpha, beta, n, radius)?;
        let rate = rate_rn(&RateParams::new(alpha, beta, n.round() as u64)?);
        let cfg = RingConfig {
            alpha,
            beta,
            f0: f0.clone(),
            ns: vec![n],
            outer: big_m,
            inner: 1.0 / big_m,
            inner_log_power: 0.0,
            replicates,
            k: None,
            method,
            samples,
            seed: derive_seed(seed, idx as u64),
        };
        let s = ring_experiment(&cfg)?.summary[0];
        out.push(Remark2Row {
            n,
            k_n,
            coefficient: f0.coeff(k_n),
            rate,
            radius: rate / big_m,
            inner_mean: s.inner_mean,
            inner_se: s.inner_se,
            replicates,
        });
    }
    Ok(out)
}
