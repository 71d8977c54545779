//! Density estimation with the exponential link `p_w = e^w / ∫ e^w`.
//!
//! Densities live on the uniform grid; integrals use the trapezoid rule.
//! The posterior on `w` is sampled with preconditioned Crank-Nicolson moves
//! in the Karhunen-Loève coordinates of a [`FiniteGaussian`] prior.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::{solve_epsilon_n, ConcentrationProfile};
use crate::error::{domain, Result};
use crate::fractional::theorem4_bound;
use crate::gaussian::FiniteGaussian;
use crate::quadrature::trapezoid;
use crate::rng::{derive_seed, stream};
use crate::sequences::GridFunction;
use crate::stats::{batch_means_se, Moments};

/// Nonnegative grid values with unit trapezoid mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOnGrid {
    values: Vec<f64>,
}

impl DensityOnGrid {
    /// Normalizes nonnegative values to unit mass.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 || values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(domain("density needs at least 2 finite nonnegative values"));
        }
        let mass = trapezoid(&values, 1.0 / (values.len() - 1) as f64);
        if !(mass > 0.0) {
            return Err(domain("density has zero mass"));
        }
        Ok(Self { values: values.into_iter().map(|v| v / mass).collect() })
    }

    pub fn uniform(m: usize) -> Result<Self> {
        Self::from_values(vec![1.0; m])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn mass(&self) -> f64 {
        trapezoid(&self.values, 1.0 / (self.m() - 1) as f64)
    }
}

/// `log ∫ e^w` by the trapezoid rule, with the maximum factored out.
pub fn log_normalizer(w: &[f64]) -> f64 {
    let max = w.iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v));
    let e: Vec<f64> = w.iter().map(|v| (v - max).exp()).collect();
    max + trapezoid(&e, 1.0 / (w.len() - 1) as f64).ln()
}

/// `p_w(s) = e^{w(s)} / ∫ e^w`.
pub fn p_w(w: &GridFunction) -> DensityOnGrid {
    let log_z = log_normalizer(w.values());
    DensityOnGrid { values: w.values().iter().map(|v| (v - log_z).exp()).collect() }
}

fn check_same_grid(f: &DensityOnGrid, g: &DensityOnGrid) {
    assert_eq!(f.m(), g.m(), "densities on different grids");
}

/// `(∫ (√f - √g)²)^{1/2}`.
pub fn hellinger(f: &DensityOnGrid, g: &DensityOnGrid) -> f64 {
    check_same_grid(f, g);
    let d: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| (a.sqrt() - b.sqrt()).powi(2)).collect();
    trapezoid(&d, 1.0 / (f.m() - 1) as f64).sqrt()
}

fn log_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        (a / b).ln()
    }
}

/// `∫ f log(f/g)`; infinite when `g` vanishes where `f` does not.
pub fn kl(f: &DensityOnGrid, g: &DensityOnGrid) -> f64 {
    check_same_grid(f, g);
    let d: Vec<f64> = f.values.iter().zip(&g.values).map(|(&a, &b)| if a == 0.0 { 0.0 } else { a * log_ratio(a, b) }).collect();
    trapezoid(&d, 1.0 / (f.m() - 1) as f64)
}

/// `∫ f (log(f/g) - K)²` with `K = kl(f, g)`.
pub fn v2(f: &DensityOnGrid, g: &DensityOnGrid) -> f64 {
    let k = kl(f, g);
    if !k.is_finite() {
        return f64::INFINITY;
    }
    let d: Vec<f64> = f
        .values
        .iter()
        .zip(&g.values)
        .map(|(&a, &b)| if a == 0.0 { 0.0 } else { a * (log_ratio(a, b) - k).powi(2) })
        .collect();
    trapezoid(&d, 1.0 / (f.m() - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma5Report {
    pub sup_distance: f64,
    pub hellinger: f64,
    /// `‖v - w‖_∞ e^{‖v - w‖_∞/2}`.
    pub hellinger_bound: f64,
    pub hellinger_ok: bool,
    pub kl: f64,
    pub v2: f64,
    /// `(K ∨ V2) / (‖v-w‖_∞² e^{‖v-w‖_∞/2} (1 + ‖v-w‖_∞)²)`; `None` when `v = w`.
    pub kv_ratio: Option<f64>,
}

/// Hellinger, KL and `V2` between `p_v` and `p_w` against the sup distance
/// of the log densities.
pub fn lemma5_check(v: &GridFunction, w: &GridFunction) -> Result<Lemma5Report> {
    if v.m() != w.m() {
        return Err(domain("grids differ"));
    }
    let sup = v.values().iter().zip(w.values()).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let (pv, pw) = (p_w(v), p_w(w));
    let h = hellinger(&pv, &pw);
    let bound = sup * (sup / 2.0).exp();
    let (k, v2v) = (kl(&pv, &pw), v2(&pv, &pw));
    let denom = sup * sup * (sup / 2.0).exp() * (1.0 + sup).powi(2);
    Ok(Lemma5Report {
        sup_distance: sup,
        hellinger: h,
        hellinger_bound: bound,
        // rounding slack for the v ≈ w case
        hellinger_ok: h <= bound + 1e-12,
        kl: k,
        v2: v2v,
        kv_ratio: (denom > 0.0).then(|| k.max(v2v) / denom),
    })
}

/// `n` i.i.d. draws from the piecewise-linear CDF of `f`.
pub fn sample_iid<R: Rng + ?Sized>(f: &DensityOnGrid, n: usize, rng: &mut R) -> Vec<f64> {
    let m = f.m();
    let h = 1.0 / (m - 1) as f64;
    let mut cdf = Vec::with_capacity(m);
    cdf.push(0.0);
    for j in 0..m - 1 {
        cdf.push(cdf[j] + 0.5 * h * (f.values[j] + f.values[j + 1]));
    }
    let total = cdf[m - 1];
    (0..n)
        .map(|_| {
            let u = rng.random::<f64>() * total;
            let j = cdf.partition_point(|&c| c <= u).clamp(1, m - 1) - 1;
            let width = cdf[j + 1] - cdf[j];
            let frac = if width > 0.0 { (u - cdf[j]) / width } else { 0.5 };
            ((j as f64 + frac) * h).clamp(0.0, 1.0)
        })
        .collect()
}

/// `Σ_i log p_w(X_i)` with `w(X_i)` linearly interpolated, reduced to
/// per-node weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityLikelihood {
    weights: Vec<f64>,
    n: usize,
}

impl DensityLikelihood {
    pub fn new(data: &[f64], m: usize) -> Result<Self> {
        if m < 2 {
            return Err(domain("grid needs m >= 2"));
        }
        let mut weights = vec![0.0; m];
        for &x in data {
            if !(0.0..=1.0).contains(&x) {
                return Err(domain(format!("observation {x} outside [0, 1]")));
            }
            let pos = x * (m - 1) as f64;
            let j = (pos.floor() as usize).min(m - 2);
            let u = pos - j as f64;
            weights[j] += 1.0 - u;
            weights[j + 1] += u;
        }
        Ok(Self { weights, n: data.len() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_likelihood(&self, w: &[f64]) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let lin: f64 = self.weights.iter().zip(w).map(|(a, b)| a * b).sum();
        lin - self.n as f64 * log_normalizer(w)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcnConfig {
    pub steps: usize,
    /// Fraction of steps used for burn-in and step-size tuning.
    pub burn_in: f64,
    pub initial_step: f64,
    pub target_acceptance: f64,
    pub adapt: bool,
    /// Keep every `thin`-th post-burn-in state.
    pub thin: usize,
}

impl Default for PcnConfig {
    fn default() -> Self {
        Self { steps: 20_000, burn_in: 0.2, initial_step: 0.2, target_acceptance: 0.3, adapt: true, thin: 10 }
    }
}

/// Post-burn-in output of one chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcnChain {
    /// Thinned Karhunen-Loève coordinates.
    pub states: Vec<Vec<f64>>,
    /// Matching grid values of `w`.
    pub paths: Vec<Vec<f64>>,
    pub log_likelihoods: Vec<f64>,
    /// Accepted moves after burn-in.
    pub accepted: usize,
    /// Proposals after burn-in.
    pub proposals: usize,
    /// Frozen step size.
    pub step: f64,
    /// Proposals rejected because the likelihood was not finite.
    pub nonfinite_rejections: usize,
}

impl PcnChain {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposals == 0 {
            0.0
        } else {
            self.accepted as f64 / self.proposals as f64
        }
    }

    /// Fraction of kept states satisfying `pred`, with a batch-means SE.
    pub fn fraction(&self, pred: impl Fn(&[f64]) -> bool) -> (f64, f64) {
        let hits: Vec<f64> = self.paths.iter().map(|p| if pred(p) { 1.0 } else { 0.0 }).collect();
        (Moments::from_slice(&hits).mean(), batch_means_se(&hits, 20))
    }
}

pub const MIN_STEP: f64 = 1e-4;
pub const MAX_STEP: f64 = 0.999;

/// pCN chain for the posterior of `w` under prior `g` given data on `[0, 1]`.
///
/// Proposal `ξ' = √(1 - s²) ξ + s ζ` with `ζ` standard normal in the retained
/// eigen-coordinates, accepted with probability `min(1, e^{ℓ(w') - ℓ(w)})`.
/// During burn-in `s` is adjusted every 50 steps towards the target rate.
pub fn pcn_posterior<R: Rng + ?Sized>(
    g: &FiniteGaussian,
    likelihood: &DensityLikelihood,
    cfg: &PcnConfig,
    rng: &mut R,
) -> Result<PcnChain> {
    if !(cfg.initial_step > 0.0 && cfg.initial_step < 1.0) {
        return Err(domain(format!("step must lie in (0, 1), got {}", cfg.initial_step)));
    }
    if cfg.steps == 0 || cfg.thin == 0 {
        return Err(domain("steps and thinning must be positive"));
    }
    if !(0.0..1.0).contains(&cfg.burn_in) {
        return Err(domain("burn-in fraction must lie in [0, 1)"));
    }
    let r = g.rank();
    let burn = (cfg.burn_in * cfg.steps as f64).round() as usize;
    let mut xi: Vec<f64> = (0..r).map(|_| rng.sample(StandardNormal)).collect();
    let mut w = g.kl_map(&xi);
    let mut ll = likelihood.log_likelihood(&w);
    let mut s = cfg.initial_step;
    let mut chain = PcnChain {
        states: Vec::new(),
        paths: Vec::new(),
        log_likelihoods: Vec::new(),
        accepted: 0,
        proposals: 0,
        step: s,
        nonfinite_rejections: 0,
    };
    let mut window_accepts = 0usize;
    for step in 0..cfg.steps {
        let c = (1.0 - s * s).sqrt();
        let prop: Vec<f64> = xi.iter().map(|x| c * x + s * rng.sample::<f64, _>(StandardNormal)).collect();
        let w_prop = g.kl_map(&prop);
        let ll_prop = likelihood.log_likelihood(&w_prop);
        let u: f64 = rng.random();
        let accept = if ll_prop.is_finite() {
            u.ln() < ll_prop - ll
        } else {
            chain.nonfinite_rejections += 1;
            false
        };
        if accept {
            xi = prop;
            w = w_prop;
            ll = ll_prop;
        }
        if step < burn {
            window_accepts += accept as usize;
            if cfg.adapt && (step + 1) % 50 == 0 {
                let rate = window_accepts as f64 / 50.0;
                s = (s * (rate - cfg.target_acceptance).exp()).clamp(MIN_STEP, MAX_STEP);
                window_accepts = 0;
            }
        } else {
            chain.proposals += 1;
            chain.accepted += accept as usize;
            if (step - burn).is_multiple_of(cfg.thin) {
                chain.states.push(xi.clone());
                chain.paths.push(w.clone());
                chain.log_likelihoods.push(ll);
            }
        }
    }
    chain.step = s;
    Ok(chain)
}

/// Configuration of the density contraction experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityExperimentConfig {
    pub alpha: f64,
    /// Declared Hölder regularity of `w0`.
    pub beta: f64,
    pub w0: GridFunction,
    pub ns: Vec<usize>,
    pub replicates: usize,
    pub chain: PcnConfig,
    /// Hellinger radius multiplier.
    pub big_m: f64,
    pub c1: f64,
    pub c2: f64,
    /// Constant in the sup-norm tail event `‖w‖_∞ > C √n ε_n`.
    pub tail_c: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityReplicate {
    pub n: usize,
    pub replicate: usize,
    pub epsilon_n: f64,
    pub zeta_n: f64,
    pub hellinger_mass: f64,
    pub hellinger_se: f64,
    pub sup_inner_mass: f64,
    pub sup_inner_se: f64,
    pub sup_tail_fraction: f64,
    pub acceptance: f64,
    pub step: f64,
    /// Acceptance outside `[0.1, 0.9]` after tuning.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensitySummary {
    pub n: usize,
    pub epsilon_n: f64,
    pub zeta_n: f64,
    pub hellinger_mean: f64,
    pub hellinger_se: f64,
    pub sup_inner_mean: f64,
    pub sup_inner_se: f64,
    pub sup_tail_mean: f64,
    pub flagged: usize,
    pub replicates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityResult {
    pub replicates: Vec<DensityReplicate>,
    pub summary: Vec<DensitySummary>,
}

/// Profile `ε ↦ ε^{-a} (log 1/ε)^{b}` from the explicit concentration bound.
pub fn rate_bound_profile(alpha: f64, beta: f64) -> Result<ConcentrationProfile> {
    let eps: Vec<f64> = (0..200).map(|i| 0.99 * (1e-6f64 / 0.99).powf(i as f64 / 199.0)).collect();
    for &e in &eps {
        theorem4_bound(alpha, beta, e)?;
    }
    ConcentrationProfile::analytic(eps, |e| theorem4_bound(alpha, beta, e).map(|b| b.value).unwrap_or(f64::NAN))
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Posterior masses of Hellinger balls and sup-norm balls around `p_{w0}`
/// under an RL-type prior, over replicated data sets.
pub fn contraction_experiment(g: &FiniteGaussian, cfg: &DensityExperimentConfig) -> Result<DensityResult> {
    if cfg.w0.m() != g.dim() {
        return Err(domain(format!("truth on {} points, prior on {}", cfg.w0.m(), g.dim())));
    }
    if cfg.ns.is_empty() || cfg.replicates == 0 {
        return Err(domain("need sample sizes and at least one replicate"));
    }
    let profile = rate_bound_profile(cfg.alpha, cfg.beta)?;
    let f0 = p_w(&cfg.w0);
    let mut replicates = Vec::new();
    let mut summary = Vec::new();
    for (idx, &n) in cfg.ns.iter().enumerate() {
        let nf = n as f64;
        let eps_n = solve_epsilon_n(&profile, nf)?;
        let zeta_n = cfg.c1 * crate::concentration::phi_inverse(&profile, cfg.c2 * nf * eps_n * eps_n)?;
        let seed_n = derive_seed(cfg.seed, idx as u64);
        let rows: Vec<DensityReplicate> = (0..cfg.replicates)
            .into_par_iter()
            .map(|r| -> Result<DensityReplicate> {
                let mut rng = stream(seed_n, r as u64);
                let data = sample_iid(&f0, n, &mut rng);
                let lik = DensityLikelihood::new(&data, g.dim())?;
                let chain = pcn_posterior(g, &lik, &cfg.chain, &mut rng)?;
                let radius = cfg.big_m * eps_n;
                let (hm, hse) = chain.fraction(|w| {
                    let f = p_w(&GridFunction::new(w.to_vec()).expect("finite path"));
                    hellinger(&f, &f0) <= radius
                });
                let (sm, sse) = chain.fraction(|w| {
                    let f = p_w(&GridFunction::new(w.to_vec()).expect("finite path"));
                    sup_distance(f.values(), f0.values()) <= zeta_n
                });
                let tail_level = cfg.tail_c * nf.sqrt() * eps_n;
                let (tail, _) = chain.fraction(|w| w.iter().any(|v| v.abs() > tail_level));
                let acc = chain.acceptance_rate();
                Ok(DensityReplicate {
                    n,
                    replicate: r,
                    epsilon_n: eps_n,
                    zeta_n,
                    hellinger_mass: hm,
                    hellinger_se: hse,
                    sup_inner_mass: sm,
                    sup_inner_se: sse,
                    sup_tail_fraction: tail,
                    acceptance: acc,
                    step: chain.step,
                    flagged: !(0.1..=0.9).contains(&acc),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let col = |f: fn(&DensityReplicate) -> f64| Moments::from_slice(&rows.iter().map(f).collect::<Vec<_>>());
        let (h, s, t) = (col(|r| r.hellinger_mass), col(|r| r.sup_inner_mass), col(|r| r.sup_tail_fraction));
        summary.push(DensitySummary {
            n,
            epsilon_n: eps_n,
            zeta_n,
            hellinger_mean: h.mean(),
            hellinger_se: h.std_error(),
            sup_inner_mean: s.mean(),
            sup_inner_se: s.std_error(),
            sup_tail_mean: t.mean(),
            flagged: rows.iter().filter(|r| r.flagged).count(),
            replicates: cfg.replicates,
        });
        replicates.extend(rows);
    }
    Ok(DensityResult { replicates, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Remark3Row {
    pub n: usize,
    pub m_const: f64,
    pub threshold: f64,
    pub mass_mean: f64,
    pub mass_se: f64,
    pub replicates: usize,
}

/// Posterior mass of `‖f - f0‖_∞ ≥ m n^{-1/4}` for each `m` under the prior
/// `g` (Brownian motion released at zero in the standard setting).
pub fn remark3_experiment(
    g: &FiniteGaussian,
    w0: &GridFunction,
    ns: &[usize],
    m_grid: &[f64],
    replicates: usize,
    chain: &PcnConfig,
    seed: u64,
) -> Result<Vec<Remark3Row>> {
    if w0.m() != g.dim() {
        return Err(domain(format!("truth on {} points, prior on {}", w0.m(), g.dim())));
    }
    if replicates == 0 || ns.is_empty() || m_grid.is_empty() {
        return Err(domain("need sample sizes, constants and at least one replicate"));
    }
    let f0 = p_w(w0);
    let mut out = Vec::new();
    for (idx, &n) in ns.iter().enumerate() {
        let seed_n = derive_seed(seed, idx as u64);
        let scale = (n as f64).powf(-0.25);
        // per replicate: sup distances of every kept state
        let dists: Vec<Vec<f64>> = (0..replicates)
            .into_par_iter()
            .map(|r| -> Result<Vec<f64>> {
                let mut rng = stream(seed_n, r as u64);
                let data = sample_iid(&f0, n, &mut rng);
                let lik = DensityLikelihood::new(&data, g.dim())?;
                let c = pcn_posterior(g, &lik, chain, &mut rng)?;
                Ok(c.paths
                    .iter()
                    .map(|w| sup_distance(p_w(&GridFunction::new(w.clone()).expect("finite path")).values(), f0.values()))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        for &m_const in m_grid {
            let threshold = m_const * scale;
            let masses: Vec<f64> = dists
                .iter()
                .map(|d| d.iter().filter(|&&x| x >= threshold).count() as f64 / d.len().max(1) as f64)
                .collect();
            let mm = Moments::from_slice(&masses);
            out.push(Remark3Row { n, m_const, threshold, mass_mean: mm.mean(), mass_se: mm.std_error(), replicates });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{covariance_rl_type, RLTypeParams};
    use approx::assert_relative_eq;

    #[test]
    fn p_w_examples() {
        let u = p_w(&GridFunction::constant(11, 0.0).unwrap());
        assert!(u.values().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        let w = GridFunction::from_fn(2001, |t| t).unwrap();
        let p = p_w(&w);
        // trapezoid error is O(h²)
        assert_relative_eq!(p.values()[2000], 1.581_976_706_869_326_5, max_relative = 1e-6);
        let shifted = p_w(&w.map(|v| v + 3.7));
        for (a, b) in p.values().iter().zip(shifted.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
        assert_relative_eq!(p_w(&w.map(|v| 800.0 * v)).mass(), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn hellinger_examples() {
        let u = DensityOnGrid::uniform(4001).unwrap();
        let e = p_w(&GridFunction::from_fn(4001, |t| t).unwrap());
        assert_eq!(hellinger(&u, &u), 0.0);
        assert_relative_eq!(hellinger(&u, &e), 0.142_932_478_741_101_85, max_relative = 1e-6);
        assert_relative_eq!(hellinger(&u, &e), hellinger(&e, &u), epsilon = 1e-15);
    }

    #[test]
    fn kl_infinite_on_missing_support() {
        let f = DensityOnGrid::from_values(vec![1.0, 1.0, 1.0]).unwrap();
        let g = DensityOnGrid::from_values(vec![1.0, 0.0, 1.0]).unwrap();
        assert!(kl(&f, &g).is_infinite());
        assert!(v2(&f, &g).is_infinite());
        assert_eq!(kl(&f, &f), 0.0);
    }

    #[test]
    fn lemma5_examples() {
        let v = GridFunction::from_fn(51, |t| (3.0 * t).sin()).unwrap();
        let r = lemma5_check(&v, &v).unwrap();
        assert!(r.hellinger_ok && r.kv_ratio.is_none());
        let a = GridFunction::constant(51, 0.3).unwrap();
        let b = GridFunction::constant(51, -1.2).unwrap();
        let r = lemma5_check(&a, &b).unwrap();
        assert!(r.hellinger.abs() < 1e-12 && r.hellinger_bound > 0.0 && r.hellinger_ok);
    }

    #[test]
    fn uniform_sampling_passes_ks() {
        let u = DensityOnGrid::uniform(101).unwrap();
        let n = 10_000;
        let mut x = sample_iid(&u, n, &mut stream(5, 0));
        x.sort_by(f64::total_cmp);
        let d = x
            .iter()
            .enumerate()
            .map(|(i, &v)| ((i + 1) as f64 / n as f64 - v).max(v - i as f64 / n as f64))
            .fold(0.0, f64::max);
        assert!(d < 1.63 / (n as f64).sqrt(), "KS {d}");
        let mut dedup = x.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), n);
        assert_eq!(sample_iid(&u, 10, &mut stream(5, 1)), sample_iid(&u, 10, &mut stream(5, 1)));
    }

    #[test]
    fn likelihood_matches_direct_sum() {
        let w = GridFunction::from_fn(21, |t| (2.0 * t).cos()).unwrap();
        let data = [0.0, 0.13, 0.5, 0.77, 1.0];
        let lik = DensityLikelihood::new(&data, 21).unwrap();
        let log_z = log_normalizer(w.values());
        let direct: f64 = data.iter().map(|&x| w.interpolate(x) - log_z).sum();
        assert_relative_eq!(lik.log_likelihood(w.values()), direct, max_relative = 1e-12);
        assert!(DensityLikelihood::new(&[1.5], 21).is_err());
    }

    #[test]
    fn tiny_steps_accept_everything() {
        let g = covariance_rl_type(&RLTypeParams::new(1.0, 21).unwrap()).unwrap();
        let data = sample_iid(&DensityOnGrid::uniform(21).unwrap(), 200, &mut stream(1, 0));
        let lik = DensityLikelihood::new(&data, 21).unwrap();
        let cfg = PcnConfig { steps: 2000, initial_step: 1e-4, adapt: false, ..PcnConfig::default() };
        let c = pcn_posterior(&g, &lik, &cfg, &mut stream(2, 0)).unwrap();
        assert!(c.acceptance_rate() > 0.95);
        assert!(c.accepted <= c.proposals);
    }
}
