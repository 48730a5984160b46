//! Radial potential theory on the half line: a self-inverse Hankel-type
//! transform, the heat / Poisson / stable-order semigroups it diagonalizes,
//! the associated potential operators (Riesz, Bessel, Flett and a
//! bi-parametric family), and wavelet-style inversion of those potentials.
//!
//! Everything is parameterized by a dimension-like pair `(n, gamma)` through
//! [`radial::FrameworkParams`]; the effective transform order is
//! `nu = n + 2 gamma - 2`.

pub mod error;
pub(crate) mod ladder;
pub mod potential;
pub mod radial;
pub mod semigroup;
pub mod specfun;
pub mod verify;
pub mod wavelet;

pub use error::{Error, Result};
pub use potential::{
    bessel_kernel_profile, potential_apply_spectral, potential_apply_subordinated,
    potential_apply_subordinated_via, potential_compose, potential_law_residual,
    potential_multiplier, riesz_kernel_check, PotentialKind,
};
pub use radial::{
    default_grid, geometric_grid, hankel_apply, hankel_inverse, multiplier_apply,
    multiplier_apply_to_spectrum, radial_mass, Decay, FrameworkParams, PowerTailSeries,
    RadialProfile, SpectralMultiplier, SpectralProfile,
};
pub use semigroup::{
    beta_kernel_direct, kernel_profile, semigroup_apply, semigroup_multiplier,
    stable_half_density, subordinate_poisson_from_heat, SemigroupKind,
};
pub use specfun::quad::{QuadratureConfig, TailHint};
pub use verify::{run_full_suite, CheckResult, VerifyOptions};
pub use wavelet::{
    c_constant, c_constant_routes, design_measure, inversion_sweep, measure_laplace,
    wavelet_spectral_multiplier, wavelet_transform, InversionReport, WaveletFamily,
    WaveletMeasure,
};
