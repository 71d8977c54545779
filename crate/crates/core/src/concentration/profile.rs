//! Tabulated concentration functions `φ(ε) = φ^A(ε) + φ^B(ε)`, their
//! shape checks, inverse, and the rate equations built on them.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{FiniteGaussian, SeriesPrior};
use crate::rng::{derive_seed, Rng};
use crate::sequences::FourierFunction;

use super::box_qp::phi_a_box;
use super::small_ball::{small_ball_series, small_ball_sup_mc, SmallBallMethod};
use super::waterfill::phi_a_waterfill;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    L2Coefficients,
    SupGrid,
    /// Closed-form profile, no norm attached.
    Analytic,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub truncation: Option<usize>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Tilt used at each `ε` (empty when no tilting).
    pub tilts: Vec<f64>,
}

/// `φ` tabulated on a decreasing grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationProfile {
    pub epsilons: Vec<f64>,
    pub phi_a: Vec<f64>,
    pub phi_b: Vec<f64>,
    pub phi: Vec<f64>,
    pub se: Vec<f64>,
    pub norm_kind: NormKind,
    pub provenance: Provenance,
}

/// Outcome of the shape checks on a profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProfileCheck {
    /// Pairs `(i, j)` with `ε_i < ε_j` but `φ_i < φ_j - 2(se_i + se_j)`.
    pub monotone_violations: Vec<(usize, usize)>,
    /// Middle index of triples whose chord lies below the midpoint by more
    /// than `3 (se sum)`.
    pub convexity_violations: Vec<usize>,
}

impl ProfileCheck {
    pub fn passed(&self) -> bool {
        self.monotone_violations.is_empty() && self.convexity_violations.is_empty()
    }
}

impl ConcentrationProfile {
    pub fn new(
        epsilons: Vec<f64>,
        phi_a: Vec<f64>,
        phi_b: Vec<f64>,
        se: Vec<f64>,
        norm_kind: NormKind,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = epsilons.len();
        if n < 2 || phi_a.len() != n || phi_b.len() != n || se.len() != n {
            return Err(domain("profile columns must share a length of at least 2"));
        }
        if epsilons.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return Err(domain("radii must be positive"));
        }
        if epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(domain("radii must be strictly decreasing"));
        }
        let phi = phi_a.iter().zip(&phi_b).map(|(a, b)| a + b).collect();
        Ok(Self { epsilons, phi_a, phi_b, phi, se, norm_kind, provenance })
    }

    /// Exact profile of a closed-form `φ` (no decentering split, zero SE).
    pub fn analytic(epsilons: Vec<f64>, phi: impl Fn(f64) -> f64) -> Result<Self> {
        let n = epsilons.len();
        let values: Vec<f64> = epsilons.iter().map(|&e| phi(e)).collect();
        Self::new(epsilons, vec![0.0; n], values, vec![0.0; n], NormKind::Analytic, Provenance::default())
    }

    /// Monotonicity and chord convexity with SE slack.
    pub fn check_invariants(&self) -> ProfileCheck {
        let n = self.epsilons.len();
        let mut out = ProfileCheck::default();
        for i in 0..n {
            for j in 0..i {
                // ε_i < ε_j since the grid decreases
                if self.phi[i] < self.phi[j] - 2.0 * (self.se[i] + self.se[j]) {
                    out.monotone_violations.push((i, j));
                }
            }
        }
        for b in 1..n.saturating_sub(1) {
            let (a, c) = (b + 1, b - 1); // ε_a < ε_b < ε_c
            let (ea, eb, ec) = (self.epsilons[a], self.epsilons[b], self.epsilons[c]);
            let chord = self.phi[a] * (ec - eb) / (ec - ea) + self.phi[c] * (eb - ea) / (ec - ea);
            let slack = 3.0 * (self.se[a] + self.se[b] + self.se[c]);
            if self.phi[b] > chord + slack {
                out.convexity_violations.push(b);
            }
        }
        out
    }

    /// `φ` made nonincreasing in `ε`, in increasing-`ε` order.
    fn envelope(&self) -> (Vec<f64>, Vec<f64>) {
        let eps: Vec<f64> = self.epsilons.iter().rev().copied().collect();
        let mut phi: Vec<f64> = self.phi.iter().rev().copied().collect();
        for i in (0..phi.len() - 1).rev() {
            phi[i] = phi[i].max(phi[i + 1]);
        }
        (eps, phi)
    }

    /// Interpolated `φ` at `ε` inside the grid: linear in log-log where both
    /// ends are positive, linear otherwise.
    pub fn interpolate(&self, epsilon: f64) -> Result<f64> {
        let (eps, phi) = self.envelope();
        interpolate_sorted(&eps, &phi, epsilon)
    }

    pub fn epsilon_range(&self) -> (f64, f64) {
        (*self.epsilons.last().expect("non-empty"), self.epsilons[0])
    }
}

fn interpolate_sorted(eps: &[f64], phi: &[f64], e: f64) -> Result<f64> {
    let n = eps.len();
    if !(e >= eps[0] && e <= eps[n - 1]) {
        return Err(Error::Range { value: e, lo: eps[0], hi: eps[n - 1] });
    }
    let j = eps.partition_point(|&x| x <= e).clamp(1, n - 1);
    let (e0, e1, p0, p1) = (eps[j - 1], eps[j], phi[j - 1], phi[j]);
    if p0 > 0.0 && p1 > 0.0 {
        let w = (e.ln() - e0.ln()) / (e1.ln() - e0.ln());
        Ok((p0.ln() + w * (p1.ln() - p0.ln())).exp())
    } else {
        let w = (e - e0) / (e1 - e0);
        Ok(p0 + w * (p1 - p0))
    }
}

/// Bisection in `log ε` on a decreasing function over `[lo, hi]`.
fn bisect_decreasing(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if f(mid.exp()) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
        if b - a < 1e-12 {
            break;
        }
    }
    (0.5 * (a + b)).exp()
}

/// `ε` with `φ(ε) = y` on the monotone interpolant.
pub fn phi_inverse(profile: &ConcentrationProfile, y: f64) -> Result<f64> {
    let (eps, phi) = profile.envelope();
    let n = eps.len();
    let (ymin, ymax) = (phi[n - 1], phi[0]);
    if !(y >= ymin && y <= ymax) {
        return Err(Error::Range { value: y, lo: ymin, hi: ymax });
    }
    if y == ymax {
        return Ok(eps[0]);
    }
    let at = |e: f64| interpolate_sorted(&eps, &phi, e.clamp(eps[0], eps[n - 1])).expect("inside grid");
    Ok(bisect_decreasing(|e| at(e) - y, eps[0], eps[n - 1]))
}

/// Crossing `φ(ε_n) = n ε_n²`.
pub fn solve_epsilon_n(profile: &ConcentrationProfile, n: f64) -> Result<f64> {
    if !(n >= 1.0) {
        return Err(domain(format!("n must be at least 1, got {n}")));
    }
    let (eps, phi) = profile.envelope();
    let last = eps.len() - 1;
    let diff = |e: f64| {
        interpolate_sorted(&eps, &phi, e.clamp(eps[0], eps[last])).expect("inside grid") - n * e * e
    };
    if diff(eps[0]) < 0.0 || diff(eps[last]) > 0.0 {
        return Err(Error::Range { value: n, lo: eps[0], hi: eps[last] });
    }
    Ok(bisect_decreasing(diff, eps[0], eps[last]))
}

/// `φ^{-1}((2 + c) n ε_n²)`, the lower-bound radius.
pub fn zeta_lower(profile: &ConcentrationProfile, n: f64, epsilon_n: f64, c: f64) -> Result<f64> {
    phi_inverse(profile, (2.0 + c) * n * epsilon_n * epsilon_n)
}

/// Constant `c` in [`zeta_lower`] giving the factor `9 n ε_n²`.
pub const WHITE_NOISE_LOWER_C: f64 = 7.0;

/// A Kullback-Leibler neighbourhood `B_KL(f0, ε)` at sample size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KLNeighborhoodSpec {
    pub f0: FourierFunction,
    pub n: f64,
    pub epsilon: f64,
}

impl KLNeighborhoodSpec {
    pub fn new(f0: FourierFunction, n: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(domain(format!("epsilon must be positive, got {epsilon}")));
        }
        if !(n >= 1.0) {
            return Err(domain(format!("n must be at least 1, got {n}")));
        }
        Ok(Self { f0, n, epsilon })
    }

    /// Threshold `n ε²` shared by the KL divergence and its second moment.
    pub fn threshold(&self) -> f64 {
        self.n * self.epsilon * self.epsilon
    }
}

/// Settings for a series-prior profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesProfileSettings {
    pub method: SmallBallMethod,
    pub samples: u64,
    pub seed: u64,
}

/// L2 profile of the series prior at `f0`; `eps_grid` must be decreasing.
pub fn build_series_profile(
    prior: &SeriesPrior,
    f0: &FourierFunction,
    eps_grid: &[f64],
    settings: SeriesProfileSettings,
) -> Result<ConcentrationProfile> {
    let weights = prior.rkhs_weights();
    let mut phi_a = Vec::with_capacity(eps_grid.len());
    let mut phi_b = Vec::with_capacity(eps_grid.len());
    let mut se = Vec::with_capacity(eps_grid.len());
    let mut tilts = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        phi_a.push(phi_a_waterfill(&weights, f0, eps)?.value);
        let b = small_ball_series(prior, eps, settings.method, settings.samples, derive_seed(settings.seed, i as u64))?;
        phi_b.push(b.neg_log_prob);
        se.push(b.se);
        tilts.push(b.theta);
    }
    let samples = (settings.method == SmallBallMethod::TiltedMc).then_some(settings.samples);
    ConcentrationProfile::new(
        eps_grid.to_vec(),
        phi_a,
        phi_b,
        se,
        NormKind::L2Coefficients,
        Provenance { truncation: Some(prior.k), samples, seed: Some(settings.seed), tilts },
    )
}

/// Sup-norm profile of a finite Gaussian law at grid values `f0`.
pub fn build_sup_profile<F>(
    g: &FiniteGaussian,
    sampler: F,
    f0: &[f64],
    eps_grid: &[f64],
    samples: u64,
    seed: u64,
) -> Result<ConcentrationProfile>
where
    F: Fn(&mut Rng) -> Vec<f64> + Sync,
{
    let mut phi_a = Vec::with_capacity(eps_grid.len());
    let mut phi_b = Vec::with_capacity(eps_grid.len());
    let mut se = Vec::with_capacity(eps_grid.len());
    for (i, &eps) in eps_grid.iter().enumerate() {
        phi_a.push(phi_a_box(g, f0, eps)?.value);
        let b = small_ball_sup_mc(&sampler, eps, samples, derive_seed(seed, i as u64))?;
        phi_b.push(b.neg_log_prob);
        se.push(b.se);
    }
    ConcentrationProfile::new(
        eps_grid.to_vec(),
        phi_a,
        phi_b,
        se,
        NormKind::SupGrid,
        Provenance { truncation: Some(g.dim()), samples: Some(samples), seed: Some(seed), tilts: vec![] },
    )
}
