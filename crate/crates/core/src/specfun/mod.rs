//! Special functions and quadrature primitives underpinning the transforms.

pub mod bessel;
pub mod gamma;
pub mod quad;

pub use bessel::NormalizedBessel;
pub use gamma::{binomial, eval_gamma, eval_ln_gamma, reciprocal_gamma, sin_pi};
pub use quad::{
    integrate_finite, integrate_semi_infinite, richardson_extrapolate, KahanSum,
    QuadratureConfig, TailHint,
};
