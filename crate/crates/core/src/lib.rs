//! Numerical laboratory for posterior contraction under Gaussian priors.
//!
//! The crate covers the objects needed to measure prior concentration and
//! posterior contraction empirically: Fourier and grid representations of
//! functions, Gaussian series and Riemann-Liouville priors, fractional
//! integration and mollification, the decentered small-ball concentration
//! function, and two observation models (white noise and density estimation).

// NaN must fail validation guards, so `!(x > 0.0)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod quadrature;
pub mod rng;
pub mod sequences;
pub mod stats;
pub mod whitenoise;

pub mod concentration;
pub mod density;
pub mod fractional;
pub mod gaussian;

pub use error::{Error, Result};
