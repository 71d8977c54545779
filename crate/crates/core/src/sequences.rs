//! Trigonometric coefficient sequences, grid functions, norms and the
//! contraction rate `n^{-(alpha ∧ beta)/(2 alpha + 1)}`.
//!
//! Basis indexing is one-based: `e_1 = 1`, `e_{2j} = √2 cos(2πj t)`,
//! `e_{2j+1} = √2 sin(2πj t)`, orthonormal in `L²[0, 1]`. Coefficient `k` lives at `coeffs[k - 1]`.
//! Sequences are always finite; the stored length is the truncation level.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quadrature::trapezoid;

/// Finite real coefficient sequence on the trigonometric basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierFunction {
    coeffs: Vec<f64>,
}

impl FourierFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(domain("a coefficient sequence needs K_max >= 1"));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(domain(format!("coefficient {} is not finite", k + 1)));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(k_max: usize) -> Self {
        Self { coeffs: vec![0.0; k_max.max(1)] }
    }

    /// Builds `f_k = g(k)` for `k = 1..=k_max`.
    pub fn from_fn(k_max: usize, g: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=k_max).map(g).collect())
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation level K_max.
    pub fn k_max(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient `k` (one-based); zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.coeffs.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Largest index carrying a nonzero coefficient, 0 for the zero sequence.
    pub fn support(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1)
    }

    /// Copy truncated or zero-padded to `k_max` entries.
    pub fn resized(&self, k_max: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(k_max.max(1), 0.0);
        Self { coeffs }
    }

    /// Squared L2 mass of the coefficients past index `k`.
    pub fn tail_beyond(&self, k: usize) -> f64 {
        self.coeffs.iter().skip(k).map(|c| c * c).sum()
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn sub(&self, other: &FourierFunction) -> Self {
        let k = self.k_max().max(other.k_max());
        Self { coeffs: (1..=k).map(|i| self.coeff(i) - other.coeff(i)).collect() }
    }
}

/// Real values on the uniform grid `t_i = i/(m-1)`, `i = 0..m-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(domain("a grid function needs m >= 2 points"));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(domain(format!("grid value {i} is not finite")));
        }
        Ok(Self { values })
    }

    /// Samples `g` on the `m`-point grid.
    pub fn from_fn(m: usize, g: impl Fn(f64) -> f64) -> Result<Self> {
        if m < 2 {
            return Err(domain("a grid function needs m >= 2 points"));
        }
        Self::new((0..m).map(|i| g(grid_point(i, m))).collect())
    }

    pub fn constant(m: usize, c: f64) -> Result<Self> {
        Self::from_fn(m, |_| c)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.values.len() - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        grid_point(i, self.values.len())
    }

    /// Piecewise-linear interpolant at `t`, clamped to `[0, 1]`.
    pub fn interpolate(&self, t: f64) -> f64 {
        let m = self.values.len();
        let x = t.clamp(0.0, 1.0) * (m - 1) as f64;
        let j = (x.floor() as usize).min(m - 2);
        let lam = x - j as f64;
        (1.0 - lam) * self.values[j] + lam * self.values[j + 1]
    }

    /// Trapezoid integral over [0, 1].
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.spacing())
    }

    /// Grid L2 norm under trapezoid quadrature.
    pub fn l2_norm(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|v| v * v).collect();
        trapezoid(&sq, self.spacing()).sqrt()
    }

    pub fn map(&self, g: impl Fn(f64) -> f64) -> Self {
        Self { values: self.values.iter().map(|&v| g(v)).collect() }
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        if self.m() != other.m() {
            return Err(domain(format!("grid sizes differ: {} vs {}", self.m(), other.m())));
        }
        Ok(Self { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() })
    }
}

pub fn grid_point(i: usize, m: usize) -> f64 {
    i as f64 / (m - 1) as f64
}

/// Alpha, beta and n of the rate `r_n^{alpha,beta}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParams {
    pub alpha: f64,
    pub beta: f64,
    pub n: u64,
}

impl RateParams {
    pub fn new(alpha: f64, beta: f64, n: u64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(domain(format!("beta must be positive, got {beta}")));
        }
        if n == 0 {
            return Err(domain("n must be at least 1"));
        }
        Ok(Self { alpha, beta, n })
    }
}

/// Trigonometric basis function `e_k(t)`.
pub fn basis_eval(k: usize, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(domain("basis index starts at 1"));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(domain(format!("t = {t} outside [0, 1]")));
    }
    Ok(basis_unchecked(k, t))
}

fn basis_unchecked(k: usize, t: f64) -> f64 {
    if k == 1 {
        return 1.0;
    }
    let j = (k / 2) as f64;
    if k.is_multiple_of(2) {
        SQRT_2 * (2.0 * PI * j * t).cos()
    } else {
        SQRT_2 * (2.0 * PI * j * t).sin()
    }
}

/// Evaluates `Σ f_k e_k(t_i)` on the `m`-point grid.
pub fn synthesize(f: &FourierFunction, m: usize) -> Result<GridFunction> {
    if m < 2 {
        return Err(domain("synthesis grid needs m >= 2"));
    }
    let values = (0..m)
        .map(|i| {
            let t = grid_point(i, m);
            f.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(idx, c)| c * basis_unchecked(idx + 1, t))
                .sum()
        })
        .collect();
    GridFunction::new(values)
}

/// `(Σ k^{2β} f_k²)^{1/2}`; `f` lies in the Sobolev ball of radius `L` iff
/// this is at most `L`.
pub fn sobolev_norm(f: &FourierFunction, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(domain(format!("Sobolev order must be positive, got {beta}")));
    }
    Ok(f.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as f64).powf(2.0 * beta) * c * c)
        .sum::<f64>()
        .sqrt())
}

/// Unscaled worst-case coefficient `[k^{1/2+β} (1 + log k)^{1/2} log log k]^{-1}`.
///
/// Defined for `k >= 3`; indices 1 and 2 are set to zero because `log log k`
/// is `-∞` at 1 and negative at 2.
pub fn worst_case_coeff(beta: f64, k: usize) -> f64 {
    if k < 3 {
        return 0.0;
    }
    let kf = k as f64;
    1.0 / (kf.powf(0.5 + beta) * (1.0 + kf.ln()).sqrt() * kf.ln().ln())
}

/// Worst-case truth truncated at `k_max`, optionally rescaled so its Sobolev
/// norm of order `beta` equals `radius`.
pub fn worst_case_f0(beta: f64, k_max: usize, radius: Option<f64>) -> Result<FourierFunction> {
    if !(beta > 0.0) {
        return Err(domain(format!("beta must be positive, got {beta}")));
    }
    if k_max < 3 {
        return Err(domain(format!("worst-case truth needs K_max >= 3, got {k_max}")));
    }
    let f = FourierFunction::from_fn(k_max, |k| worst_case_coeff(beta, k))?;
    match radius {
        None => Ok(f),
        Some(l) if l > 0.0 => {
            let norm = sobolev_norm(&f, beta)?;
            Ok(f.scaled(l / norm))
        }
        Some(l) => Err(domain(format!("Sobolev radius must be positive, got {l}"))),
    }
}

/// Squared L2 mass `Σ_{k > k_max} f_{0,k}²` of the unscaled worst-case truth.
///
/// Summed exactly up to `4 k_max`, then closed by the integral of the
/// continuous extension (the summand is decreasing, so the midpoint
/// integral brackets the remaining sum tightly).
pub fn worst_case_tail(beta: f64, k_max: usize) -> f64 {
    let k_max = k_max.max(2);
    let stop = k_max.saturating_mul(4);
    let direct: f64 = (k_max + 1..=stop).map(|k| worst_case_coeff(beta, k).powi(2)).sum();
    // ∫_{stop+1/2}^∞ x^{-1-2β} / ((1+ln x)(ln ln x)²) dx via x = e^u
    let g = |u: f64| (-2.0 * beta * u).exp() / ((1.0 + u) * u.ln().powi(2));
    let u0 = (stop as f64 + 0.5).ln();
    let rest = crate::quadrature::adaptive(
        |v: f64| {
            // v in (0, 1] maps to u = u0 / v
            if v <= 0.0 {
                0.0
            } else {
                let u = u0 / v;
                g(u) * u0 / (v * v)
            }
        },
        0.0,
        1.0,
        1e-18,
        1e-10,
        400,
    )
    .map(|r| r.value)
    .unwrap_or(0.0);
    direct + rest
}

/// `r_n^{alpha,beta} = n^{-(alpha ∧ beta)/(2 alpha + 1)}`.
pub fn rate_rn(p: &RateParams) -> f64 {
    (p.n as f64).powf(-p.alpha.min(p.beta) / (2.0 * p.alpha + 1.0))
}

/// Euclidean norm of the coefficients (the L2 norm by Parseval).
pub fn l2_norm(f: &FourierFunction) -> f64 {
    f.coeffs().iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Largest absolute grid value.
pub fn sup_norm(g: &GridFunction) -> f64 {
    g.values().iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn basis_values() {
        assert_eq!(basis_eval(1, 0.3).unwrap(), 1.0);
        assert_relative_eq!(basis_eval(2, 0.0).unwrap(), SQRT_2);
        assert_relative_eq!(basis_eval(3, 0.25).unwrap(), SQRT_2, epsilon = 1e-15);
        assert!(basis_eval(0, 0.5).is_err());
        assert!(basis_eval(2, 1.5).is_err());
        assert!(basis_eval(2, -0.1).is_err());
    }

    #[test]
    fn synthesize_examples() {
        let c = synthesize(&FourierFunction::new(vec![2.5]).unwrap(), 7).unwrap();
        assert!(c.values().iter().all(|&v| v == 2.5));
        let z = synthesize(&FourierFunction::zeros(5), 9).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));
        let cosine = synthesize(&FourierFunction::new(vec![0.0, 1.0]).unwrap(), 101).unwrap();
        assert_relative_eq!(cosine.values()[50], -SQRT_2, epsilon = 1e-14);
        assert!(synthesize(&FourierFunction::zeros(1), 1).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let mut c = vec![0.0; 3];
        c[2] = 2.0;
        let f = FourierFunction::new(c).unwrap();
        assert_relative_eq!(sobolev_norm(&f, 1.0).unwrap(), 6.0, epsilon = 1e-14);
        assert_eq!(sobolev_norm(&FourierFunction::zeros(4), 0.7).unwrap(), 0.0);
        assert!(sobolev_norm(&f, 0.0).is_err());
    }

    #[test]
    fn sobolev_partial_sums_stabilize() {
        // Oracle: independent partial sums of Σ k^{-1.2}.
        let oracle = |kmax: usize| (1..=kmax).map(|k| (k as f64).powf(-1.2)).sum::<f64>().sqrt();
        let f1 = FourierFunction::from_fn(10_000, |k| (k as f64).powf(-1.6)).unwrap();
        let f2 = FourierFunction::from_fn(20_000, |k| (k as f64).powf(-1.6)).unwrap();
        let s1 = sobolev_norm(&f1, 1.0).unwrap();
        let s2 = sobolev_norm(&f2, 1.0).unwrap();
        assert_relative_eq!(s1, oracle(10_000), max_relative = 1e-12);
        assert_relative_eq!(s2, oracle(20_000), max_relative = 1e-12);
        // Σ k^{-1.2} converges slowly: doubling K_max moves the norm by 1.06%.
        let change = s2 / s1 - 1.0;
        assert!(change > 0.0 && change < 0.011, "relative change {change}");
    }

    #[test]
    fn worst_case_examples() {
        let f = worst_case_f0(0.5, 10, None).unwrap();
        assert_eq!(f.coeff(1), 0.0);
        assert_eq!(f.coeff(2), 0.0);
        // direct evaluation: 1 / (3 · sqrt(1 + ln 3) · ln ln 3)
        assert_relative_eq!(f.coeff(3), 2.446_605_068_601_89, max_relative = 1e-12);
        assert!(worst_case_f0(0.5, 2, None).is_err());
        let scaled = worst_case_f0(0.5, 1000, Some(0.5)).unwrap();
        assert_relative_eq!(sobolev_norm(&scaled, 0.5).unwrap(), 0.5, max_relative = 1e-12);
    }

    #[test]
    fn worst_case_sobolev_partial_sums_converge() {
        // Bertrand series Σ 1/(k (1+log k)(log log k)²): increments shrink.
        let f = worst_case_f0(0.5, 100_000, None).unwrap();
        let partial = |kmax: usize| {
            (3..=kmax).map(|k| (k as f64) * f.coeff(k).powi(2)).sum::<f64>()
        };
        let (a, b, c) = (partial(1_000), partial(10_000), partial(100_000));
        assert!(sobolev_norm(&f, 0.5).unwrap().is_finite());
        assert!(c - b < b - a);
        assert_relative_eq!(sobolev_norm(&f, 0.5).unwrap().powi(2), c, max_relative = 1e-10);
    }

    #[test]
    fn worst_case_tail_matches_direct_sum() {
        let direct: f64 = (1001..=2_000_000).map(|k| worst_case_coeff(0.5, k).powi(2)).sum();
        let remainder = worst_case_tail(0.5, 2_000_000);
        assert_relative_eq!(worst_case_tail(0.5, 1000), direct + remainder, max_relative = 1e-6);
    }

    #[test]
    fn rate_examples() {
        let r = rate_rn(&RateParams::new(0.5, 0.5, 10_000).unwrap());
        assert_relative_eq!(r, 0.1, max_relative = 1e-14);
        let r = rate_rn(&RateParams::new(1.0, 2.0, 1_000_000).unwrap());
        assert_relative_eq!(r, 0.01, max_relative = 1e-12);
        for &a in &[0.3, 1.0, 2.5] {
            let r = rate_rn(&RateParams::new(a, a, 777).unwrap());
            assert_relative_eq!(r, 777f64.powf(-a / (2.0 * a + 1.0)), max_relative = 1e-14);
        }
        assert!(RateParams::new(0.0, 1.0, 1).is_err());
        assert!(RateParams::new(1.0, 1.0, 0).is_err());
    }

    #[test]
    fn rate_is_maximized_at_alpha_equal_beta() {
        let beta = 0.8;
        let grid: Vec<f64> = (1..=40).map(|i| 0.05 * i as f64).collect();
        let best = grid
            .iter()
            .copied()
            .max_by(|a, b| {
                let ra = rate_rn(&RateParams::new(*a, beta, 1000).unwrap());
                let rb = rate_rn(&RateParams::new(*b, beta, 1000).unwrap());
                // largest exponent = smallest rate
                rb.total_cmp(&ra)
            })
            .unwrap();
        assert_relative_eq!(best, beta, epsilon = 1e-12);
    }

    #[test]
    fn norms() {
        assert_eq!(l2_norm(&FourierFunction::new(vec![3.0, 4.0]).unwrap()), 5.0);
        assert_eq!(sup_norm(&GridFunction::constant(5, -2.0).unwrap()), 2.0);
    }

    #[test]
    fn type_invariants() {
        assert!(FourierFunction::new(vec![]).is_err());
        assert!(FourierFunction::new(vec![1.0, f64::NAN]).is_err());
        assert!(GridFunction::new(vec![1.0]).is_err());
        assert!(GridFunction::new(vec![1.0, f64::INFINITY]).is_err());
    }

    proptest! {
        #[test]
        fn parseval_on_grid(coeffs in prop::collection::vec(-2.0f64..2.0, 1..=51)) {
            let f = FourierFunction::new(coeffs).unwrap();
            let m = 4 * f.k_max() + 1;
            let g = synthesize(&f, m.max(5)).unwrap();
            let exact = l2_norm(&f);
            if exact > 1e-8 {
                prop_assert!((g.l2_norm() - exact).abs() <= 1e-3 * exact);
            }
        }

        #[test]
        fn sobolev_monotone_in_beta(
            coeffs in prop::collection::vec(-1.0f64..1.0, 2..20),
            b1 in 0.05f64..3.0,
            db in 0.0f64..2.0,
        ) {
            let f = FourierFunction::new(coeffs).unwrap();
            prop_assume!(f.coeffs()[1..].iter().any(|c| *c != 0.0));
            let lo = sobolev_norm(&f, b1).unwrap();
            let hi = sobolev_norm(&f, b1 + db).unwrap();
            prop_assert!(hi >= lo * (1.0 - 1e-12));
        }

        #[test]
        fn rate_decreasing_in_n(a in 0.1f64..3.0, b in 0.1f64..3.0, n in 1u64..1_000_000) {
            let r1 = rate_rn(&RateParams::new(a, b, n).unwrap());
            let r2 = rate_rn(&RateParams::new(a, b, n + 1).unwrap());
            prop_assert!(r2 < r1);
        }

        #[test]
        fn worst_case_positive_and_decreasing(beta in 0.05f64..3.0, k in 3usize..100_000) {
            let a = worst_case_coeff(beta, k);
            let b = worst_case_coeff(beta, k + 1);
            prop_assert!(a > 0.0 && b > 0.0 && b < a);
        }
    }
}
