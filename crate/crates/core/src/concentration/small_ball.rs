//! Small-ball probabilities.
//!
//! L2 balls reduce to the lower tail of a noncentral weighted chi-square sum
//! `S = Σ Y_k²` with independent `Y_k ~ N(c_k, λ_k)`. Two estimators are
//! provided: importance sampling under an exponential tilt, and inversion of
//! the Laplace transform along the vertical line through its saddle point.
//! Sup-norm balls of grid processes use plain Monte Carlo.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng as _;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::SeriesPrior;
use crate::quadrature::adaptive;
use crate::rng::{stream, Rng};
use crate::stats::Moments;

/// Draws per independent random stream in Monte Carlo estimators.
pub const CHUNK: u64 = 1 << 14;

/// `S = Σ Y_k²` with `Y_k ~ N(c_k, λ_k)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadForm {
    lambdas: Vec<f64>,
    centers: Vec<f64>,
}

/// `-log P(S < x)` with its standard error and diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallBallEstimate {
    pub neg_log_prob: f64,
    pub se: f64,
    /// Exponential tilt used (0 for plain sampling and for inversion).
    pub theta: f64,
    pub hits: u64,
    pub samples: u64,
}

impl SmallBallEstimate {
    pub fn probability(&self) -> f64 {
        (-self.neg_log_prob).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SmallBallMethod {
    TiltedMc,
    CfInversion,
}

impl std::str::FromStr for SmallBallMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tilted-mc" | "mc" => Ok(Self::TiltedMc),
            "cf-inversion" | "cf" => Ok(Self::CfInversion),
            other => Err(domain(format!("unknown small-ball method '{other}'"))),
        }
    }
}

impl QuadForm {
    pub fn new(lambdas: Vec<f64>, centers: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() || lambdas.len() != centers.len() {
            return Err(domain("variances and centers must have the same positive length"));
        }
        if lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(domain("variances must be positive and finite"));
        }
        if centers.iter().any(|c| !c.is_finite()) {
            return Err(domain("centers must be finite"));
        }
        Ok(Self { lambdas, centers })
    }

    pub fn central(lambdas: Vec<f64>) -> Result<Self> {
        let n = lambdas.len();
        Self::new(lambdas, vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.lambdas.iter().zip(&self.centers).map(|(l, c)| l + c * c).sum()
    }

    /// `log E e^{-θS}` for real `θ > -1/(2 max λ)`.
    pub fn log_mgf(&self, theta: f64) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.centers)
            .map(|(&l, &c)| {
                let d = 1.0 + 2.0 * theta * l;
                -0.5 * d.ln() - theta * c * c / d
            })
            .sum()
    }

    /// Mean of `S` under the tilted law `∝ e^{-θS}`.
    pub fn tilted_mean(&self, theta: f64) -> f64 {
        self.lambdas
            .iter()
            .zip(&self.centers)
            .map(|(&l, &c)| {
                let d = 1.0 + 2.0 * theta * l;
                l / d + c * c / (d * d)
            })
            .sum()
    }

    /// Tilt `θ ≥ 0` solving `E_θ S = x`; 0 when `x ≥ E S`.
    pub fn saddlepoint_tilt(&self, x: f64) -> f64 {
        if x >= self.mean() {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while self.tilted_mean(hi) > x {
            lo = hi;
            hi *= 4.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.tilted_mean(mid) > x {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-13 * hi {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Chernoff bound `log P(S < x) ≤ log E e^{-θS} + θx` at the saddlepoint tilt.
    pub fn log_chernoff_bound(&self, x: f64) -> f64 {
        let theta = self.saddlepoint_tilt(x);
        (self.log_mgf(theta) + theta * x).min(0.0)
    }

    /// `-log P(S < x)` by importance sampling under the saddlepoint tilt.
    ///
    /// Draw `j` belongs to stream `j / CHUNK` of `seed`, so the estimate does
    /// not depend on how chunks are scheduled.
    pub fn neg_log_cdf_tilted(&self, x: f64, samples: u64, seed: u64) -> Result<SmallBallEstimate> {
        if !(x > 0.0) {
            return Err(domain(format!("threshold must be positive, got {x}")));
        }
        if samples == 0 {
            return Err(domain("need at least one sample"));
        }
        let theta = self.saddlepoint_tilt(x);
        let (means, sds): (Vec<f64>, Vec<f64>) = self
            .lambdas
            .iter()
            .zip(&self.centers)
            .map(|(&l, &c)| {
                let d = 1.0 + 2.0 * theta * l;
                (c / d, (l / d).sqrt())
            })
            .unzip();
        let chunks = samples.div_ceil(CHUNK);
        let parts: Vec<(Moments, u64)> = (0..chunks)
            .into_par_iter()
            .map(|j| {
                let mut rng = stream(seed, j);
                let count = CHUNK.min(samples - j * CHUNK);
                let mut m = Moments::default();
                let mut hits = 0;
                for _ in 0..count {
                    let mut s = 0.0;
                    for (mu, sd) in means.iter().zip(&sds) {
                        let z: f64 = rng.sample(StandardNormal);
                        let y = mu + sd * z;
                        s += y * y;
                    }
                    if s < x {
                        hits += 1;
                        m.push((theta * (s - x)).exp());
                    } else {
                        m.push(0.0);
                    }
                }
                (m, hits)
            })
            .collect();
        let mut total = Moments::default();
        let mut hits = 0;
        for (m, h) in &parts {
            total.merge(m);
            hits += h;
        }
        if hits == 0 {
            return Err(Error::RareEvent { hits, samples });
        }
        let mean = total.mean();
        Ok(SmallBallEstimate {
            neg_log_prob: -self.log_mgf(theta) - theta * x - mean.ln(),
            se: total.std_error() / mean,
            theta,
            hits,
            samples,
        })
    }

    fn log_laplace_c(&self, s: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&l, &c) in self.lambdas.iter().zip(&self.centers) {
            let d = 1.0 + 2.0 * l * s;
            acc += -0.5 * d.ln() - s * (c * c) / d;
        }
        acc
    }

    /// `-log P(S < x)` by inverting the Laplace transform of `S`.
    ///
    /// `P(S < x) = (1/2πi) ∫ L(s) e^{sx} s^{-1} ds` along `Re s = c`, with `c`
    /// the real saddle point of the integrand. The central part is integrated
    /// adaptively and the oscillatory tail panel by panel with Wynn's epsilon
    /// algorithm. The returned `se` is the relative quadrature error.
    pub fn neg_log_cdf_cf(&self, x: f64) -> Result<SmallBallEstimate> {
        if !(x > 0.0 && x.is_finite()) {
            return Err(domain(format!("threshold must be positive, got {x}")));
        }
        let c = self.contour_abscissa(x)?;
        let g = |s: Complex64| self.log_laplace_c(s) + s * x - s.ln();
        let g0 = g(Complex64::new(c, 0.0)).re;
        let g2: f64 = self
            .lambdas
            .iter()
            .zip(&self.centers)
            .map(|(&l, &cc)| {
                let d = 1.0 + 2.0 * c * l;
                2.0 * l * l / (d * d) + 4.0 * l * cc * cc / (d * d * d)
            })
            .sum::<f64>()
            + 1.0 / (c * c);
        let scale = 1.0 / g2.sqrt();
        let integrand = |y: f64| (g(Complex64::new(c, y)) - g0).exp().re;

        let fail = |why: String| Error::InversionFailed(why);
        let central_end = 8.0 * scale;
        let central = adaptive(integrand, 0.0, central_end, 1e-16, 1e-12, 2000)
            .map_err(|e| fail(format!("central integral: {e}")))?;
        let mut total = central.value;
        let mut error = central.error;
        if !(total > 0.0) {
            return Err(fail(format!("non-positive central integral {total:e}")));
        }
        let width = (PI / x).min(4.0 * scale);
        let mut sums = Vec::new();
        let mut start = central_end;
        let mut last_extrapolation = f64::NAN;
        let mut done = false;
        for _ in 0..5000 {
            let panel = adaptive(integrand, start, start + width, 1e-18, 1e-10, 200)
                .map_err(|e| fail(format!("tail panel at {start}: {e}")))?;
            start += width;
            total += panel.value;
            error += panel.error;
            sums.push(total);
            if panel.value.abs() < 1e-15 * total.abs() {
                done = true;
                break;
            }
            if sums.len() >= 8 {
                let ext = wynn_epsilon(&sums);
                if (ext - last_extrapolation).abs() < 1e-11 * ext.abs() {
                    error += (ext - total).abs().min((ext - last_extrapolation).abs());
                    total = ext;
                    done = true;
                    break;
                }
                last_extrapolation = ext;
            }
        }
        if !done {
            return Err(fail("oscillatory tail did not converge".into()));
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(fail(format!("probability underflow (integral {total:e})")));
        }
        let log_p = g0 - PI.ln() + total.ln();
        if log_p > 1e-9 {
            return Err(fail(format!("probability estimate {} exceeds one", log_p.exp())));
        }
        Ok(SmallBallEstimate {
            neg_log_prob: (-log_p).max(0.0),
            se: error / total,
            theta: 0.0,
            hits: 0,
            samples: 0,
        })
    }

    /// Saddle point `c > 0` of `log L(s) + sx - log s` on the real axis.
    fn contour_abscissa(&self, x: f64) -> Result<f64> {
        let h = |c: f64| self.tilted_mean(c) + 1.0 / c - x;
        let (mut lo, mut hi) = (1.0f64, 1.0f64);
        while h(lo) < 0.0 {
            lo *= 0.25;
            if lo < 1e-300 {
                return Err(Error::InversionFailed("no saddle point".into()));
            }
        }
        while h(hi) > 0.0 {
            hi *= 4.0;
            if !hi.is_finite() {
                return Err(Error::InversionFailed("no saddle point".into()));
            }
        }
        for _ in 0..300 {
            let mid = (lo * hi).sqrt();
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-14 {
                break;
            }
        }
        Ok((lo * hi).sqrt())
    }

    /// `P(S ≤ x)` by either method.
    pub fn cdf(&self, x: f64, method: SmallBallMethod, samples: u64, seed: u64) -> Result<SmallBallEstimate> {
        match method {
            SmallBallMethod::TiltedMc => self.neg_log_cdf_tilted(x, samples, seed),
            SmallBallMethod::CfInversion => self.neg_log_cdf_cf(x),
        }
    }
}

/// Wynn epsilon extrapolation of a sequence of partial sums.
pub fn wynn_epsilon(sums: &[f64]) -> f64 {
    let n = sums.len();
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = sums.to_vec();
    let mut best = *sums.last().expect("non-empty");
    let mut k = 0;
    while cur.len() > 1 {
        let next: Vec<f64> = (0..cur.len() - 1)
            .map(|i| {
                let d = cur[i + 1] - cur[i];
                if d == 0.0 {
                    f64::INFINITY
                } else {
                    prev[i + 1] + 1.0 / d
                }
            })
            .collect();
        prev = cur;
        cur = next;
        k += 1;
        if k % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                } else {
                    break;
                }
            }
        }
    }
    best
}

/// `-log P(Σ_{k≤K} σ_k² Z_k² < ε²)` for the series prior.
pub fn small_ball_series(
    prior: &SeriesPrior,
    epsilon: f64,
    method: SmallBallMethod,
    samples: u64,
    seed: u64,
) -> Result<SmallBallEstimate> {
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    QuadForm::central(prior.variances())?.cdf(epsilon * epsilon, method, samples, seed)
}

/// `-log P(sup_i |X_i| < ε)` by plain Monte Carlo over paths drawn by
/// `sampler`; draw `j` uses stream `j / CHUNK` of `seed`.
pub fn small_ball_sup_mc<F>(sampler: F, epsilon: f64, samples: u64, seed: u64) -> Result<SmallBallEstimate>
where
    F: Fn(&mut Rng) -> Vec<f64> + Sync,
{
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if samples == 0 {
        return Err(domain("need at least one sample"));
    }
    let chunks = samples.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream(seed, j);
            let count = CHUNK.min(samples - j * CHUNK);
            (0..count)
                .filter(|_| sampler(&mut rng).iter().all(|v| v.abs() < epsilon))
                .count() as u64
        })
        .collect::<Vec<u64>>()
        .into_iter()
        .sum();
    if hits < 10 {
        return Err(Error::RareEvent { hits, samples });
    }
    let p = hits as f64 / samples as f64;
    Ok(SmallBallEstimate {
        neg_log_prob: -p.ln(),
        se: ((1.0 - p) / (samples as f64 * p)).sqrt(),
        theta: 0.0,
        hits,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::normal_cdf;
    use approx::assert_relative_eq;

    #[test]
    fn single_term_matches_normal_cdf() {
        let prior = SeriesPrior::new(0.5, 1).unwrap();
        let exact = -(2.0 * normal_cdf(0.1) - 1.0).ln();
        assert_relative_eq!(exact, 2.530_042_001_547_238, max_relative = 1e-12);
        let cf = small_ball_series(&prior, 0.1, SmallBallMethod::CfInversion, 0, 0).unwrap();
        assert_relative_eq!(cf.neg_log_prob, exact, max_relative = 1e-8);
        let mc = small_ball_series(&prior, 0.1, SmallBallMethod::TiltedMc, 200_000, 1).unwrap();
        assert!((mc.neg_log_prob - exact).abs() < 3.0 * mc.se, "{mc:?}");
    }

    #[test]
    fn noncentral_single_term() {
        // Y ~ N(0.7, 0.25): P(Y² < 0.09) = Φ((0.3-0.7)/0.5) - Φ((-0.3-0.7)/0.5)
        let q = QuadForm::new(vec![0.25], vec![0.7]).unwrap();
        let exact = -(normal_cdf(-0.8) - normal_cdf(-2.0)).ln();
        assert_relative_eq!(q.neg_log_cdf_cf(0.09).unwrap().neg_log_prob, exact, max_relative = 1e-8);
        let mc = q.neg_log_cdf_tilted(0.09, 200_000, 3).unwrap();
        assert!((mc.neg_log_prob - exact).abs() < 3.0 * mc.se);
    }

    #[test]
    fn two_term_exponential_case() {
        // λ = (1, 1): S ~ χ²_2 = Exp(1/2), P(S < x) = 1 - e^{-x/2}
        let q = QuadForm::central(vec![1.0, 1.0]).unwrap();
        for x in [0.01, 0.5, 3.0, 20.0] {
            let exact = -(-(-x / 2.0f64).exp_m1()).ln();
            let got = q.neg_log_cdf_cf(x).unwrap().neg_log_prob;
            assert!((got - exact).abs() < 1e-8 * exact.max(1e-6), "x={x}: {got} vs {exact}");
        }
    }

    #[test]
    fn methods_agree_on_series_prior() {
        let prior = SeriesPrior::new(0.5, 50).unwrap();
        let cf = small_ball_series(&prior, 0.2, SmallBallMethod::CfInversion, 0, 0).unwrap();
        let mc = small_ball_series(&prior, 0.2, SmallBallMethod::TiltedMc, 100_000, 5).unwrap();
        assert!((cf.neg_log_prob - mc.neg_log_prob).abs() < 3.0 * (mc.se + cf.se), "{cf:?} {mc:?}");
    }

    #[test]
    fn tilted_estimate_is_reproducible() {
        let q = QuadForm::central(vec![1.0, 0.5, 0.25]).unwrap();
        let a = q.neg_log_cdf_tilted(0.1, 40_000, 9).unwrap();
        let b = q.neg_log_cdf_tilted(0.1, 40_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // partial sums of ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=15)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn sup_mc_near_certain_event() {
        let sampler = |rng: &mut Rng| (0..5).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let est = small_ball_sup_mc(sampler, 6.0, 20_000, 1).unwrap();
        assert!(est.neg_log_prob < 1e-3);
        let err = small_ball_sup_mc(sampler, 1e-4, 1000, 1).unwrap_err();
        assert!(matches!(err, Error::RareEvent { .. }));
    }
}
