//! Gaussian priors: the trigonometric series prior with `σ_k = k^{-1/2-α}`,
//! the Riemann-Liouville process `R_t = ∫_0^t (t-s)^{α-1/2} dB_s`, its
//! polynomially released variant, and finite-dimensional Gaussian laws on
//! grid values with a retained eigendecomposition.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, numeric, Error, Result};
use crate::quadrature::adaptive;
use crate::sequences::{grid_point, FourierFunction, GridFunction};

/// Truncated Gaussian series prior `Σ_{k≤K} σ_k Z_k e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPrior {
    pub alpha: f64,
    pub k: usize,
}

impl SeriesPrior {
    pub fn new(alpha: f64, k: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("prior regularity must be positive, got {alpha}")));
        }
        if k == 0 {
            return Err(domain("prior truncation must be at least 1"));
        }
        Ok(Self { alpha, k })
    }

    /// `σ_k = k^{-1/2-α}`.
    pub fn sigma(&self, k: usize) -> f64 {
        (k as f64).powf(-0.5 - self.alpha)
    }

    pub fn variances(&self) -> Vec<f64> {
        (1..=self.k).map(|k| (k as f64).powf(-1.0 - 2.0 * self.alpha)).collect()
    }

    /// RKHS weights `k^{1+2α} = σ_k^{-2}`.
    pub fn rkhs_weights(&self) -> Vec<f64> {
        (1..=self.k).map(|k| (k as f64).powf(1.0 + 2.0 * self.alpha)).collect()
    }
}

/// One draw of the series prior.
pub fn sample_series<R: Rng + ?Sized>(prior: &SeriesPrior, rng: &mut R) -> FourierFunction {
    let coeffs = (1..=prior.k)
        .map(|k| {
            let z: f64 = rng.sample(StandardNormal);
            prior.sigma(k) * z
        })
        .collect();
    FourierFunction::new(coeffs).expect("finite draws")
}

/// RKHS norm `(Σ k^{1+2α} h_k²)^{1/2}` of a coefficient sequence.
pub fn rkhs_norm_series(prior: &SeriesPrior, h: &FourierFunction) -> Result<f64> {
    if h.support() > prior.k {
        return Err(Error::OutsideRkhs {
            residual: h.tail_beyond(prior.k).sqrt(),
            tolerance: 0.0,
        });
    }
    Ok(h.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| ((i + 1) as f64).powf(1.0 + 2.0 * prior.alpha) * c * c)
        .sum::<f64>()
        .sqrt())
}

/// Discretized Riemann-Liouville process on the `m`-point grid.
///
/// Uses `R_{t_i} = Σ_{j<i} (t_i - s_{j+1/2})^{α-1/2} ΔB_j` with the kernel
/// evaluated at cell midpoints, which stays finite when `α < 1/2`.
#[derive(Debug, Clone)]
pub struct RiemannLiouville {
    alpha: f64,
    m: usize,
    /// Row-major lower-triangular kernel: row `i` holds `i` weights.
    kernel: Vec<f64>,
}

impl RiemannLiouville {
    pub fn new(alpha: f64, m: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("RL parameter must be positive, got {alpha}")));
        }
        if m < 2 {
            return Err(domain("RL grid needs m >= 2"));
        }
        let h = 1.0 / (m - 1) as f64;
        let mut kernel = Vec::with_capacity(m * (m - 1) / 2);
        for i in 1..m {
            let t = i as f64 * h;
            for j in 0..i {
                let s = (j as f64 + 0.5) * h;
                kernel.push((t - s).powf(alpha - 0.5));
            }
        }
        Ok(Self { alpha, m, kernel })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> GridFunction {
        let sd = (1.0 / (self.m - 1) as f64).sqrt();
        let increments: Vec<f64> = (0..self.m - 1)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                sd * z
            })
            .collect();
        self.apply(&increments)
    }

    /// Path for the given Brownian increments.
    pub fn apply(&self, increments: &[f64]) -> GridFunction {
        let mut values = vec![0.0; self.m];
        let mut offset = 0;
        for (i, v) in values.iter_mut().enumerate().skip(1) {
            let row = &self.kernel[offset..offset + i];
            *v = row.iter().zip(increments).map(|(k, db)| k * db).sum();
            offset += i;
        }
        GridFunction::new(values).expect("finite path")
    }
}

/// One path of the Riemann-Liouville process.
pub fn rl_sample<R: Rng + ?Sized>(alpha: f64, m: usize, rng: &mut R) -> Result<GridFunction> {
    Ok(RiemannLiouville::new(alpha, m)?.sample(rng))
}

/// Parameters of the released process `R_t + Σ_{k=0}^{⌊α⌋+1} Z_k t^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RLTypeParams {
    pub alpha: f64,
    pub m: usize,
    pub poly_degree: usize,
}

impl RLTypeParams {
    pub fn new(alpha: f64, m: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(domain(format!("RL parameter must be positive, got {alpha}")));
        }
        if m < 2 {
            return Err(domain("RL grid needs m >= 2"));
        }
        Ok(Self { alpha, m, poly_degree: alpha.floor() as usize + 1 })
    }
}

/// A draw of the RL-type process with its components kept apart.
#[derive(Debug, Clone)]
pub struct RlTypeDraw {
    pub path: GridFunction,
    pub rl: GridFunction,
    /// `Z_0, ..., Z_{poly_degree}`.
    pub poly: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct RlTypeSampler {
    params: RLTypeParams,
    rl: RiemannLiouville,
}

impl RlTypeSampler {
    pub fn new(params: RLTypeParams) -> Result<Self> {
        Ok(Self { params, rl: RiemannLiouville::new(params.alpha, params.m)? })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> RlTypeDraw {
        let rl = self.rl.sample(rng);
        let poly: Vec<f64> = (0..=self.params.poly_degree).map(|_| rng.sample(StandardNormal)).collect();
        let m = self.params.m;
        let values = (0..m)
            .map(|i| {
                let t = grid_point(i, m);
                rl.values()[i] + poly.iter().rev().fold(0.0, |acc, z| acc * t + z)
            })
            .collect();
        RlTypeDraw { path: GridFunction::new(values).expect("finite path"), rl, poly }
    }
}

/// One path of the RL-type process.
pub fn rl_type_sample<R: Rng + ?Sized>(p: &RLTypeParams, rng: &mut R) -> Result<GridFunction> {
    Ok(RlTypeSampler::new(*p)?.draw(rng).path)
}

/// `∫_0^{s∧t} (s-u)^{α-1/2} (t-u)^{α-1/2} du`.
///
/// With `v = s∧t - u` and `v = (s∧t) y^{1/p}`, `p = α + 1/2`, the endpoint
/// singularity of `v^{α-1/2}` is absorbed and the remaining integrand is
/// bounded, which adaptive Gauss-Kronrod handles for every `α > 0`.
pub fn rl_covariance_entry(alpha: f64, s: f64, t: f64) -> Result<f64> {
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    if lo <= 0.0 {
        return Ok(0.0);
    }
    let a = alpha - 0.5;
    let p = alpha + 0.5;
    let d = hi - lo;
    if d == 0.0 {
        return Ok(lo.powf(2.0 * alpha) / (2.0 * alpha));
    }
    let scale = lo.powf(p) / p;
    let inv_p = 1.0 / p;
    let r = adaptive(|y: f64| (d + lo * y.powf(inv_p)).powf(a), 0.0, 1.0, 1e-14, 1e-11, 4000)
        .map_err(|e| numeric(format!("RL covariance at (s={s}, t={t}, alpha={alpha}): {e}")))?;
    Ok(scale * r.value)
}

/// Grid covariance of the RL process plus `Σ_{k=0}^{degree} s^k t^k`.
pub fn rl_covariance_matrix(alpha: f64, m: usize, poly_degree: Option<usize>) -> Result<DMatrix<f64>> {
    let mut c = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let (s, t) = (grid_point(i, m), grid_point(j, m));
            let mut v = rl_covariance_entry(alpha, s, t)?;
            if let Some(deg) = poly_degree {
                let st = s * t;
                let mut pw = 1.0;
                for _ in 0..=deg {
                    v += pw;
                    pw *= st;
                }
            }
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// Largest grid accepted by [`covariance_rl_type`] (eigendecomposition cost).
pub const MAX_COVARIANCE_GRID: usize = 2048;

/// Finite Gaussian surrogate of the RL-type process on its grid.
pub fn covariance_rl_type(p: &RLTypeParams) -> Result<FiniteGaussian> {
    if p.m > MAX_COVARIANCE_GRID {
        return Err(domain(format!("grid of {} points exceeds {MAX_COVARIANCE_GRID}", p.m)));
    }
    FiniteGaussian::from_covariance(rl_covariance_matrix(p.alpha, p.m, Some(p.poly_degree))?)
}

/// Brownian motion released at zero, `B_t + Z_0`: covariance `min(s,t) + 1`.
pub fn released_brownian(m: usize) -> Result<FiniteGaussian> {
    if m < 2 {
        return Err(domain("grid needs m >= 2"));
    }
    let c = DMatrix::from_fn(m, m, |i, j| grid_point(i.min(j), m) + 1.0);
    FiniteGaussian::from_covariance(c)
}

/// Mean-zero Gaussian law on `R^dim` with retained eigendecomposition.
#[derive(Debug, Clone)]
pub struct FiniteGaussian {
    covariance: DMatrix<f64>,
    /// Descending, clamped at zero.
    eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    eigenvectors: DMatrix<f64>,
    rank: usize,
    rank_tol: f64,
    proj_tol: f64,
}

pub const DEFAULT_RANK_TOL: f64 = 1e-12;
pub const DEFAULT_PROJ_TOL: f64 = 1e-6;

impl FiniteGaussian {
    pub fn from_covariance(covariance: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerances(covariance, DEFAULT_RANK_TOL, DEFAULT_PROJ_TOL)
    }

    pub fn with_tolerances(covariance: DMatrix<f64>, rank_tol: f64, proj_tol: f64) -> Result<Self> {
        let n = covariance.nrows();
        if n == 0 || covariance.ncols() != n {
            return Err(domain("covariance must be a non-empty square matrix"));
        }
        if covariance.iter().any(|v| !v.is_finite()) {
            return Err(domain("covariance has non-finite entries"));
        }
        let asym = (&covariance - covariance.transpose()).norm();
        if asym > 1e-10 * covariance.norm().max(f64::MIN_POSITIVE) {
            return Err(domain(format!("covariance is not symmetric (asymmetry {asym:e})")));
        }
        let eig = SymmetricEigen::new(covariance.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let top = eig.eigenvalues[order[0]];
        if !(top > 0.0) {
            return Err(domain("covariance has no positive eigenvalue"));
        }
        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let lam = eig.eigenvalues[src];
            if lam < -1e-10 * top {
                return Err(domain(format!(
                    "covariance is not positive semidefinite: eigenvalue {lam:e} vs top {top:e}"
                )));
            }
            eigenvalues.push(lam.max(0.0));
            eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        let rank = eigenvalues.iter().take_while(|&&l| l > rank_tol * top).count();
        let g = Self { covariance, eigenvalues, eigenvectors, rank, rank_tol, proj_tol };
        let err = g.reconstruction_error();
        if err > 1e-8 {
            return Err(numeric(format!("eigendecomposition reconstruction error {err:e}")));
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Relative Frobenius error of `Σ λ_i u_i u_iᵀ` against the covariance.
    pub fn reconstruction_error(&self) -> f64 {
        let d = DMatrix::from_diagonal(&DVector::from_column_slice(&self.eigenvalues));
        let rec = &self.eigenvectors * d * self.eigenvectors.transpose();
        (rec - &self.covariance).norm() / self.covariance.norm()
    }

    /// Maps standard coordinates `ξ` (length `rank`) to `Σ √λ_i ξ_i u_i`.
    pub fn kl_map(&self, xi: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        for (i, &x) in xi.iter().enumerate().take(self.rank) {
            let c = self.eigenvalues[i].sqrt() * x;
            for (o, u) in out.iter_mut().zip(self.eigenvectors.column(i).iter()) {
                *o += c * u;
            }
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let xi: Vec<f64> = (0..self.rank).map(|_| rng.sample(StandardNormal)).collect();
        self.kl_map(&xi)
    }

    /// Precision matrix on the retained eigenbasis; discarded directions get
    /// the floor eigenvalue `rank_tol · λ_1`.
    pub fn precision(&self) -> DMatrix<f64> {
        let floor = self.rank_tol * self.eigenvalues[0];
        let inv: Vec<f64> = self.eigenvalues.iter().map(|&l| 1.0 / l.max(floor)).collect();
        let d = DMatrix::from_diagonal(&DVector::from_vec(inv));
        &self.eigenvectors * d * self.eigenvectors.transpose()
    }

    /// RKHS norm `(Σ_{i≤r} (u_iᵀh)²/λ_i)^{1/2}` of grid values `h`.
    pub fn rkhs_norm(&self, h: &[f64]) -> Result<f64> {
        if h.len() != self.dim() {
            return Err(domain(format!("vector of length {} for a {}-dim law", h.len(), self.dim())));
        }
        let hv = DVector::from_column_slice(h);
        let coords = self.eigenvectors.transpose() * &hv;
        let total = hv.norm();
        let residual: f64 = coords.iter().skip(self.rank).map(|c| c * c).sum::<f64>().sqrt();
        if residual > self.proj_tol * total {
            return Err(Error::OutsideRkhs { residual, tolerance: self.proj_tol * total });
        }
        Ok(coords
            .iter()
            .zip(&self.eigenvalues)
            .take(self.rank)
            .map(|(c, l)| c * c / l)
            .sum::<f64>()
            .sqrt())
    }
}

/// Free-function form of [`FiniteGaussian::rkhs_norm`].
pub fn rkhs_norm_finite(g: &FiniteGaussian, h: &[f64]) -> Result<f64> {
    g.rkhs_norm(h)
}
