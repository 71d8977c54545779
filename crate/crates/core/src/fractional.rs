//! Fractional integration, mollification and the approximation bounds used
//! to control the RKHS part of the concentration function.
//!
//! The fractional integral is unnormalized: `I^α f(t) = ∫_0^t (t-s)^{α-1} f(s) ds`
//! with no `1/Γ(α)` factor, so `I^a I^b = B(a, b) I^{a+b}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quadrature::{adaptive, gl8_panel};
use crate::sequences::{grid_point, GridFunction};

/// `∫_0^t (t-s)^{α-1} f(s) ds` for the piecewise-linear interpolant of `f`.
///
/// The kernel is integrated exactly against each linear piece, so the
/// singularity at `s = t` costs nothing. Returns 0 for `t < 0`.
pub fn frac_integral(f: &GridFunction, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("fractional order must be positive, got {alpha}")));
    }
    if t < 0.0 {
        return Ok(0.0);
    }
    if t > 1.0 {
        return Err(domain(format!("t = {t} beyond the grid")));
    }
    Ok(frac_integral_unchecked(f.values(), alpha, t))
}

fn frac_integral_unchecked(v: &[f64], alpha: f64, t: f64) -> f64 {
    let m = v.len();
    let h = 1.0 / (m - 1) as f64;
    let a1 = alpha + 1.0;
    let mut total = 0.0;
    for j in 0..m - 1 {
        let s0 = j as f64 * h;
        if s0 >= t {
            break;
        }
        let s1 = ((j + 1) as f64 * h).min(t);
        // f(s) = c + b s on the cell
        let b = (v[j + 1] - v[j]) / h;
        let c = v[j] - b * s0;
        let (u0, u1) = (t - s0, t - s1);
        total += (c + b * t) * (u0.powf(alpha) - u1.powf(alpha)) / alpha
            - b * (u0.powf(a1) - u1.powf(a1)) / a1;
    }
    total
}

/// `I^α f` evaluated at every grid point.
pub fn frac_integral_grid(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(domain(format!("fractional order must be positive, got {alpha}")));
    }
    let m = f.m();
    let values = (0..m).map(|i| frac_integral_unchecked(f.values(), alpha, grid_point(i, m))).collect();
    GridFunction::new(values)
}

/// Compactly supported kernel `g` with known breakpoints (points where `g`
/// may fail to be smooth).
#[derive(Clone)]
pub struct CompactKernel {
    lo: f64,
    hi: f64,
    breakpoints: Vec<f64>,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for CompactKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompactKernel")
            .field("support", &(self.lo, self.hi))
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

impl CompactKernel {
    /// Kernel supported on `[lo, hi]`; `eval` is only called inside it.
    pub fn new(
        lo: f64,
        hi: f64,
        breakpoints: Vec<f64>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(domain(format!("invalid support [{lo}, {hi}]")));
        }
        let mut bp: Vec<f64> = breakpoints.into_iter().filter(|&b| b > lo && b < hi).collect();
        bp.sort_by(f64::total_cmp);
        bp.dedup();
        Ok(Self { lo, hi, breakpoints: bp, eval: Arc::new(eval) })
    }

    /// The zero kernel on `[-1, 1]`.
    pub fn zero() -> Self {
        Self::new(-1.0, 1.0, vec![], |_| 0.0).expect("valid support")
    }

    /// `+1` on `(0, 1]`, `-1` on `[-1, 0)`.
    pub fn odd_step() -> Self {
        Self::new(-1.0, 1.0, vec![0.0], |u| if u > 0.0 { 1.0 } else if u < 0.0 { -1.0 } else { 0.0 })
            .expect("valid support")
    }

    pub fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u < self.lo || u > self.hi {
            0.0
        } else {
            (self.eval)(u)
        }
    }

    /// `g_σ(u) = σ^{-1} g(u/σ)`.
    pub fn dilate(&self, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain(format!("dilation must be positive, got {sigma}")));
        }
        let inner = Arc::clone(&self.eval);
        Ok(Self {
            lo: self.lo * sigma,
            hi: self.hi * sigma,
            breakpoints: self.breakpoints.iter().map(|b| b * sigma).collect(),
            eval: Arc::new(move |u| inner(u / sigma) / sigma),
        })
    }

    /// Support split at the breakpoints and at the extra points given.
    fn pieces(&self, extra: &[f64]) -> Vec<(f64, f64)> {
        let mut pts = vec![self.lo, self.hi];
        pts.extend_from_slice(&self.breakpoints);
        pts.extend(extra.iter().copied().filter(|&x| x > self.lo && x < self.hi));
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts.windows(2).map(|w| (w[0], w[1])).collect()
    }

    /// `∫ w(u) g(u) du` by adaptive quadrature on each smooth piece.
    pub fn integrate(&self, w: impl Fn(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in self.pieces(&[0.0]) {
            total += adaptive(|u| w(u) * (self.eval)(u), a, b, 1e-15, 1e-12, 4000)?.value;
        }
        Ok(total)
    }

    /// `∫ w(u) |g(u)| du`.
    pub fn integrate_abs(&self, w: impl Fn(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in self.pieces(&[0.0]) {
            total += adaptive(|u| w(u) * (self.eval)(u).abs(), a, b, 1e-15, 1e-12, 4000)?.value;
        }
        Ok(total)
    }

    /// `∫ w(u) g(u)² du`.
    pub fn integrate_sq(&self, w: impl Fn(f64) -> f64) -> Result<f64> {
        let mut total = 0.0;
        for (a, b) in self.pieces(&[0.0]) {
            total += adaptive(|u| w(u) * (self.eval)(u).powi(2), a, b, 1e-15, 1e-12, 4000)?.value;
        }
        Ok(total)
    }
}

/// Even kernel `φ(u) = P(u²)(1-u²)^3` on `[-1, 1]` with `∫φ = 1` and
/// `∫u^j φ = 0` for `1 ≤ j ≤ q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mollifier {
    order: usize,
    /// Coefficients of `P` in powers of `u²`.
    poly: Vec<f64>,
}

const MOLLIFIER_POWER: i32 = 3;
pub const MAX_MOLLIFIER_ORDER: usize = 6;

impl Mollifier {
    pub fn new(order: usize) -> Result<Self> {
        if order > MAX_MOLLIFIER_ORDER {
            return Err(domain(format!("mollifier order {order} exceeds {MAX_MOLLIFIER_ORDER}")));
        }
        let n = order / 2 + 1;
        // ∫_{-1}^{1} u^{2i} (1-u²)^3 du = B(i + 1/2, 4) = 3! / ((i+1/2)(i+3/2)(i+5/2)(i+7/2))
        let a = DMatrix::from_fn(n, n, |l, j| {
            let x = (l + j) as f64 + 0.5;
            6.0 / (x * (x + 1.0) * (x + 2.0) * (x + 3.0))
        });
        let mut rhs = DVector::zeros(n);
        rhs[0] = 1.0;
        let poly = a
            .lu()
            .solve(&rhs)
            .ok_or_else(|| domain("singular moment system"))?
            .iter()
            .copied()
            .collect();
        Ok(Self { order, poly })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn support_radius(&self) -> f64 {
        1.0
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u.abs() >= 1.0 {
            return 0.0;
        }
        let u2 = u * u;
        self.poly.iter().rev().fold(0.0, |acc, c| acc * u2 + c) * (1.0 - u2).powi(MOLLIFIER_POWER)
    }

    /// `∫ u^j φ(u) du` by quadrature.
    pub fn moment(&self, j: u32) -> f64 {
        adaptive(|u: f64| u.powi(j as i32) * self.eval(u), -1.0, 1.0, 1e-15, 1e-13, 200)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    }

    /// `φ_σ` as a convolution kernel.
    pub fn kernel(&self, sigma: f64) -> Result<CompactKernel> {
        let me = self.clone();
        CompactKernel::new(-1.0, 1.0, vec![], move |u| me.eval(u))?.dilate(sigma)
    }
}

/// `(f * g)(t_i) = ∫ f(t_i - u) g(u) du` on the grid, with `f` reflected at 0
/// and 1. Each piece between grid-induced and kernel breakpoints is
/// integrated with an 8-point Gauss-Legendre rule.
pub fn convolve(f: &GridFunction, g: &CompactKernel) -> Result<GridFunction> {
    let (lo, hi) = g.support();
    if lo < -1.0 || hi > 1.0 {
        return Err(domain(format!("kernel support [{lo}, {hi}] wider than the reflection range")));
    }
    let m = f.m();
    let h = f.spacing();
    let v = f.values();
    let reflected = |x: f64| {
        let y = if x < 0.0 {
            -x
        } else if x > 1.0 {
            2.0 - x
        } else {
            x
        };
        let pos = (y / h).clamp(0.0, (m - 1) as f64);
        let j = (pos.floor() as usize).min(m - 2);
        let w = pos - j as f64;
        v[j] * (1.0 - w) + v[j + 1] * w
    };
    let kmin = (lo / h).floor() as i64;
    let kmax = (hi / h).ceil() as i64;
    let grid_breaks: Vec<f64> = (kmin..=kmax).map(|k| k as f64 * h).collect();
    let pieces = g.pieces(&grid_breaks);
    let values = (0..m)
        .map(|i| {
            let t = grid_point(i, m);
            pieces
                .iter()
                .map(|&(a, b)| gl8_panel(&mut |u: f64| reflected(t - u) * g.eval(u), a, b))
                .sum()
        })
        .collect();
    GridFunction::new(values)
}

/// `f * φ_σ` with reflection at the boundary.
pub fn mollify(f: &GridFunction, phi: &Mollifier, sigma: f64) -> Result<GridFunction> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(domain(format!("bandwidth must lie in (0, 1), got {sigma}")));
    }
    convolve(f, &phi.kernel(sigma)?)
}

fn check_vanishing(g: &CompactKernel, power: i32, what: &str) -> Result<()> {
    let scale = g.integrate_abs(|u| u.abs().powi(power))?;
    let value = g.integrate(|u| u.powi(power))?;
    if value.abs() > 1e-8 * scale.max(1e-300) && value.abs() > 1e-14 {
        return Err(Error::Precondition(format!("{what} = {value:e}, expected 0")));
    }
    Ok(())
}

/// `∫ |u|^s |g(u)| du`, the moment controlling `‖I^α(f * g)‖_∞` for
/// Hölder-`λ` `f` with `s = α + λ`.
pub fn lemma6_rhs(g: &CompactKernel, s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) || (s - 1.0).abs() < 1e-12 {
        return Err(Error::Precondition(format!("moment order must lie in (0, 2) \\ {{1}}, got {s}")));
    }
    check_vanishing(g, 0, "∫g")?;
    if s > 1.0 {
        check_vanishing(g, 1, "∫u g")?;
    }
    g.integrate_abs(|u| u.abs().powf(s))
}

/// `∫ u² {1 + log²(1 + |u|^{-1})} g(u)² du`.
pub fn lemma7_rhs(g: &CompactKernel) -> Result<f64> {
    check_vanishing(g, 0, "∫g")?;
    g.integrate_sq(|u| {
        if u == 0.0 {
            0.0
        } else {
            let l = (1.0 + 1.0 / u.abs()).ln();
            u * u * (1.0 + l * l)
        }
    })
}

/// Left side, right side and their ratio for one bound evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundRatio {
    pub lhs: f64,
    pub rhs: f64,
    /// `None` when the right side vanishes.
    pub ratio: Option<f64>,
}

impl BoundRatio {
    fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = (rhs > 0.0).then(|| lhs / rhs);
        Self { lhs, rhs, ratio }
    }

    pub fn is_degenerate(&self) -> bool {
        self.ratio.is_none()
    }
}

/// `‖I^{1-δ}(f * g)‖_2²` against [`lemma7_rhs`] for a Hölder-`δ` grid function.
pub fn check_lemma7(f: &GridFunction, delta: f64, g: &CompactKernel) -> Result<BoundRatio> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(domain(format!("Hölder exponent must lie in (0, 1), got {delta}")));
    }
    let rhs = lemma7_rhs(g)?;
    let lhs = frac_integral_grid(&convolve(f, g)?, 1.0 - delta)?.l2_norm().powi(2);
    Ok(BoundRatio::new(lhs, rhs))
}

/// `‖I^α(f * g)‖_∞` against [`lemma6_rhs`] with `s = α + λ`.
pub fn check_lemma6(f: &GridFunction, alpha: f64, lambda: f64, g: &CompactKernel) -> Result<BoundRatio> {
    let rhs = lemma6_rhs(g, alpha + lambda)?;
    let conv = frac_integral_grid(&convolve(f, g)?, alpha)?;
    let lhs = conv.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    Ok(BoundRatio::new(lhs, rhs))
}

/// Random Weierstrass-type function `Σ_j 2^{-jδ} cos(2^j π t + θ_j)` with
/// Hölder exponent `δ`, truncated where `2^j` exceeds the grid resolution.
pub fn holder_test_function<R: Rng + ?Sized>(delta: f64, m: usize, rng: &mut R) -> Result<GridFunction> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(domain(format!("Hölder exponent must lie in (0, 1], got {delta}")));
    }
    let terms = ((m as f64).log2().ceil() as i32).max(1);
    let phases: Vec<f64> = (0..terms).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
    GridFunction::from_fn(m, |t| {
        phases
            .iter()
            .enumerate()
            .map(|(j, th)| {
                let a = 2f64.powi(j as i32);
                a.powf(-delta) * (a * PI * t + th).cos()
            })
            .sum()
    })
}

/// Rate exponent of the concentration function of the released RL process
/// at a `β`-regular truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Bound {
    pub exponent: f64,
    pub log_factor: bool,
    pub value: f64,
}

/// `ε^{-1/α}` when `α ≤ β`, otherwise `ε^{-(2α-2β+1)/β}`, times `log(1/ε)`
/// when `{α} ≠ 1/2` and `α - β - 1/2` is a non-negative integer.
pub fn theorem4_bound(alpha: f64, beta: f64, epsilon: f64) -> Result<Theorem4Bound> {
    if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
        return Err(domain(format!("regularities must be positive, got ({alpha}, {beta})")));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    const TOL: f64 = 1e-9;
    let (exponent, log_factor) = if alpha <= beta {
        (1.0 / alpha, false)
    } else {
        let frac_half = (alpha.fract() - 0.5).abs() < TOL;
        let gap = alpha - beta - 0.5;
        let integer_gap = gap > -TOL && (gap - gap.round()).abs() < TOL;
        ((2.0 * alpha - 2.0 * beta + 1.0) / beta, !frac_half && integer_gap)
    };
    let mut value = epsilon.powf(-exponent);
    if log_factor {
        value *= (1.0 / epsilon).ln();
    }
    Ok(Theorem4Bound { exponent, log_factor, value })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_relative_eq;

    #[test]
    fn frac_integral_examples() {
        let one = GridFunction::constant(11, 1.0).unwrap();
        assert_relative_eq!(frac_integral(&one, 0.5, 1.0).unwrap(), 2.0, epsilon = 1e-13);
        assert_relative_eq!(frac_integral(&one, 1.0, 0.5).unwrap(), 0.5, epsilon = 1e-13);
        let lin = GridFunction::from_fn(11, |s| s).unwrap();
        assert_relative_eq!(frac_integral(&lin, 0.5, 1.0).unwrap(), 4.0 / 3.0, epsilon = 1e-13);
        assert_eq!(frac_integral(&lin, 0.5, -0.2).unwrap(), 0.0);
        assert!(frac_integral(&lin, 0.0, 0.5).is_err());
        assert!(frac_integral(&lin, -1.0, 0.5).is_err());
    }

    #[test]
    fn frac_integral_between_grid_points() {
        let lin = GridFunction::from_fn(5, |s| 2.0 * s + 1.0).unwrap();
        // ∫_0^t (t-s)^{-1/2}(2s+1) ds = 2 t^{1/2} + (8/3) t^{3/2}
        let t: f64 = 0.37;
        let exact = 2.0 * t.sqrt() + 8.0 / 3.0 * t.powf(1.5);
        assert_relative_eq!(frac_integral(&lin, 0.5, t).unwrap(), exact, epsilon = 1e-13);
    }

    #[test]
    fn mollifier_moments() {
        for q in 0..=MAX_MOLLIFIER_ORDER {
            let phi = Mollifier::new(q).unwrap();
            assert_relative_eq!(phi.moment(0), 1.0, epsilon = 1e-8);
            for j in 1..=q as u32 {
                assert!(phi.moment(j).abs() < 1e-8, "q={q}, j={j}: {}", phi.moment(j));
            }
            assert_eq!(phi.eval(1.0), 0.0);
            assert_eq!(phi.eval(-1.5), 0.0);
        }
        assert!(Mollifier::new(7).is_err());
    }

    #[test]
    fn mollify_constants_and_lines() {
        let phi = Mollifier::new(2).unwrap();
        let c = GridFunction::constant(101, 3.25).unwrap();
        let out = mollify(&c, &phi, 0.1).unwrap();
        assert!(out.values().iter().all(|v| (v - 3.25).abs() < 1e-8));
        let lin = GridFunction::from_fn(101, |t| t).unwrap();
        let out = mollify(&lin, &phi, 0.1).unwrap();
        for i in 15..=85 {
            assert!((out.values()[i] - lin.values()[i]).abs() < 1e-6);
        }
        assert!(mollify(&lin, &phi, 0.0).is_err());
    }

    #[test]
    fn mollify_holder_error_scales() {
        let beta = 0.6;
        let f = GridFunction::from_fn(4001, |t| (t - 0.5f64).abs().powf(beta)).unwrap();
        let phi = Mollifier::new(2).unwrap();
        let sigmas = [0.1, 0.05, 0.025];
        let errs: Vec<f64> = sigmas
            .iter()
            .map(|&s| {
                let g = mollify(&f, &phi, s).unwrap();
                (800..=3200).map(|i| (g.values()[i] - f.values()[i]).abs()).fold(0.0, f64::max)
            })
            .collect();
        let x: Vec<f64> = sigmas.iter().map(|s| s.ln()).collect();
        let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
        let slope = crate::stats::ols_slope(&x, &y);
        assert!((slope - beta).abs() < 0.15, "slope {slope}");
    }

    #[test]
    fn lemma6_examples() {
        let g = CompactKernel::odd_step();
        assert_relative_eq!(lemma6_rhs(&g, 0.75).unwrap(), 8.0 / 7.0, epsilon = 1e-10);
        assert_eq!(lemma6_rhs(&CompactKernel::zero(), 0.5).unwrap(), 0.0);
        let half = g.dilate(0.5).unwrap();
        assert_relative_eq!(lemma6_rhs(&half, 0.75).unwrap(), 0.5f64.powf(0.75) * 8.0 / 7.0, epsilon = 1e-10);
        // odd step has nonzero first moment, so s > 1 is rejected
        assert!(matches!(lemma6_rhs(&g, 1.5), Err(Error::Precondition(_))));
        assert!(lemma6_rhs(&g, 1.0).is_err());
        let bump = CompactKernel::new(-1.0, 1.0, vec![], |_| 1.0).unwrap();
        assert!(matches!(lemma6_rhs(&bump, 0.5), Err(Error::Precondition(_))));
    }

    #[test]
    fn lemma7_examples() {
        // independent high-precision value of 2∫_0^1 u²(1 + log²(1 + 1/u)) du
        assert_relative_eq!(
            lemma7_rhs(&CompactKernel::odd_step()).unwrap(),
            1.222_167_581_629_898_7,
            max_relative = 1e-10
        );
        let f = GridFunction::from_fn(65, |t| t).unwrap();
        let r = check_lemma7(&f, 0.5, &CompactKernel::zero()).unwrap();
        assert!(r.is_degenerate());
        assert_eq!(r.rhs, 0.0);
    }

    #[test]
    fn lemma7_ratio_bounded_under_refinement() {
        let mut rng = stream(17, 0);
        let g = CompactKernel::odd_step();
        let mut worst = [0.0f64; 2];
        for _ in 0..20 {
            let seed: u64 = rng.random();
            for (slot, m) in [257usize, 513].into_iter().enumerate() {
                let f = holder_test_function(0.5, m, &mut stream(seed, 0)).unwrap();
                for sigma in [0.2, 0.1] {
                    let r = check_lemma7(&f, 0.5, &g.dilate(sigma).unwrap()).unwrap();
                    worst[slot] = worst[slot].max(r.ratio.unwrap());
                }
            }
        }
        assert!(worst.iter().all(|w| w.is_finite()));
        assert!((worst[0] - worst[1]).abs() < 0.25 * worst[1], "{worst:?}");
    }

    #[test]
    fn lemma6_ratio_bounded_over_dilations() {
        let f = GridFunction::from_fn(1025, |t| (t - 0.4f64).abs().powf(0.5)).unwrap();
        let g = CompactKernel::odd_step();
        let ratios: Vec<f64> = [0.2, 0.1, 0.05]
            .iter()
            .map(|&s| check_lemma6(&f, 0.3, 0.5, &g.dilate(s).unwrap()).unwrap().ratio.unwrap())
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::MAX, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
        assert!(hi.is_finite() && hi < 10.0 * lo, "{ratios:?}");
    }

    #[test]
    fn theorem4_examples() {
        let b = theorem4_bound(0.5, 0.5, 0.1).unwrap();
        assert_eq!((b.exponent, b.log_factor), (2.0, false));
        assert_relative_eq!(b.value, 100.0, epsilon = 1e-10);
        let b = theorem4_bound(1.0, 0.5, 0.1).unwrap();
        assert_eq!((b.exponent, b.log_factor), (4.0, true));
        assert_relative_eq!(b.value, 1e4 * 10f64.ln(), max_relative = 1e-12);
        let b = theorem4_bound(1.0, 0.7, 0.1).unwrap();
        assert_relative_eq!(b.exponent, 1.6 / 0.7, epsilon = 1e-12);
        assert!(!b.log_factor);
        // {α} = 1/2 suppresses the log even on the integer lattice
        assert!(!theorem4_bound(1.5, 1.0, 0.1).unwrap().log_factor);
        assert!(theorem4_bound(2.0, 0.5, 0.1).unwrap().log_factor);
        assert!(theorem4_bound(1.0, 1.0, 1.0).is_err());
    }
}
