//! Riesz, Bessel, Flett, and bi-parametric potential operators.
//!
//! Every family is a spectral multiplier:
//!
//! * riesz:  `s^{-alpha}`, `0 < alpha < nu+1`;
//! * bessel: `(1+s)^{-alpha/2}`;
//! * flett:  `(1+sqrt(s))^{-alpha}`;
//! * biparam(beta): `(1+s^{beta/2})^{-alpha/beta}`, reducing to flett at
//!   `beta = 1` and bessel at `beta = 2`.
//!
//! Each also has an independent time-subordination realization as a
//! Gamma-weighted integral of a semigroup, so the operators can be computed
//! by two genuinely different numerical paths:
//!
//! * bessel:  `(1/Gamma(alpha/2)) int e^{-t} t^{alpha/2-1} H^t f dt`;
//! * flett:   `(1/Gamma(alpha))   int e^{-t} t^{alpha-1}   P^t f dt`;
//! * riesz:   `(1/Gamma(2a/b))    int t^{2a/b-1} B^{(b,t)} f dt` for *any*
//!   subordination order `b > 0` (a caller-visible knob, default 2);
//! * biparam: `(1/Gamma(a/b))     int e^{-t} t^{a/b-1} B^{(b,t)} f dt`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::radial::{
    damped_inverse_point, hankel_apply, multiplier_apply, multiplier_apply_to_spectrum, Decay,
    FrameworkParams, ProfileCore, RadialProfile, SpectralMultiplier,
};
use crate::specfun::gamma::eval_gamma;
use crate::specfun::quad::{
    integrate_semi_infinite, richardson_extrapolate, QuadratureConfig, TailHint,
};

/// The four potential families.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum PotentialKind {
    /// Spectral `s^{-alpha}`; requires `0 < alpha < nu+1`.
    Riesz { alpha: f64 },
    /// Spectral `(1+s)^{-alpha/2}`.
    Bessel { alpha: f64 },
    /// Spectral `(1+sqrt(s))^{-alpha}`.
    Flett { alpha: f64 },
    /// Spectral `(1+s^{beta/2})^{-alpha/beta}`.
    Biparam { alpha: f64, beta: f64 },
}

impl PotentialKind {
    pub fn alpha(&self) -> f64 {
        match *self {
            PotentialKind::Riesz { alpha }
            | PotentialKind::Bessel { alpha }
            | PotentialKind::Flett { alpha }
            | PotentialKind::Biparam { alpha, .. } => alpha,
        }
    }

    /// Parameter-free shape checks (orders positive and finite).
    fn validate_shape(&self) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Domain(format!(
                "potential order alpha must be finite and > 0, got {alpha}"
            )));
        }
        if let PotentialKind::Biparam { beta, .. } = self {
            if !(beta.is_finite() && *beta > 0.0) {
                return Err(Error::Domain(format!(
                    "bi-parametric order beta must be finite and > 0, got {beta}"
                )));
            }
        }
        Ok(())
    }

    /// Full validation: the riesz range `0 < alpha < nu+1` depends on the
    /// framework order.
    pub fn validate(&self, params: &FrameworkParams) -> Result<()> {
        self.validate_shape()?;
        if let PotentialKind::Riesz { alpha } = self {
            let limit = params.transform_order() + 1.0;
            if *alpha >= limit {
                return Err(Error::Domain(format!(
                    "riesz order must lie in (0, {limit}) at this framework \
                     order, got {alpha}"
                )));
            }
        }
        Ok(())
    }
}

impl std::fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            PotentialKind::Riesz { alpha } => write!(f, "riesz({alpha})"),
            PotentialKind::Bessel { alpha } => write!(f, "bessel({alpha})"),
            PotentialKind::Flett { alpha } => write!(f, "flett({alpha})"),
            PotentialKind::Biparam { alpha, beta } => write!(f, "biparam({alpha},{beta})"),
        }
    }
}

/// The family's spectral multiplier, with origin metadata that drives output
/// decay tagging: riesz is singular (`s^{-alpha}`), flett and non-reduced
/// biparam have a fractional-power kink at `s = 0`, bessel is analytic.
pub fn potential_multiplier(kind: PotentialKind) -> Result<SpectralMultiplier> {
    kind.validate_shape()?;
    Ok(match kind {
        PotentialKind::Riesz { alpha } => {
            SpectralMultiplier::new(format!("riesz[{alpha}]"), move |s: f64| s.powf(-alpha))
                .with_singularity(-alpha)
        }
        PotentialKind::Bessel { alpha } => {
            SpectralMultiplier::new(format!("bessel[{alpha}]"), move |s: f64| {
                (1.0 + s).powf(-0.5 * alpha)
            })
        }
        PotentialKind::Flett { alpha } => {
            SpectralMultiplier::new(format!("flett[{alpha}]"), move |s: f64| {
                (1.0 + s.sqrt()).powf(-alpha)
            })
            .with_kink(0.5)
        }
        PotentialKind::Biparam { alpha, beta } => {
            let m = SpectralMultiplier::new(format!("biparam[{alpha},{beta}]"), move |s: f64| {
                (1.0 + s.powf(0.5 * beta)).powf(-alpha / beta)
            });
            let half = 0.5 * beta;
            // Integer powers of s are analytic at the origin and imprint no
            // power tail.
            if half.fract() == 0.0 {
                m
            } else {
                m.with_kink(half)
            }
        }
    })
}

/// The potential through the spectral path: `T^{-1}(m * T f)`.
pub fn potential_apply_spectral(
    kind: PotentialKind,
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    kind.validate(params)?;
    multiplier_apply(f, &potential_multiplier(kind)?, params, cfg)
}

/// The potential through its subordination formula (riesz subordinated to
/// the heat semigroup, `beta = 2`).
pub fn potential_apply_subordinated(
    kind: PotentialKind,
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    potential_apply_subordinated_via(kind, 2.0, f, params, cfg)
}

/// As [`potential_apply_subordinated`], with the riesz subordination order
/// explicit: `R^alpha = (1/Gamma(2 alpha/beta)) int_0^inf t^{2 alpha/beta - 1}
/// B^{(beta, t)} f dt` holds for every `beta > 0`, and exercising several
/// orders checks that independence. The knob is ignored by the other kinds.
pub fn potential_apply_subordinated_via(
    kind: PotentialKind,
    riesz_beta: f64,
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    kind.validate(params)?;
    if !(riesz_beta.is_finite() && riesz_beta > 0.0) {
        return Err(Error::Domain(format!(
            "riesz subordination order must be finite and > 0, got {riesz_beta}"
        )));
    }
    let nu = params.transform_order();
    // Weight t^{theta-1} (times e^{-t} for the damped families) against the
    // semigroup with symbol e^{-t s^kappa}.
    let (theta, kappa, damped) = match kind {
        PotentialKind::Bessel { alpha } => (0.5 * alpha, 1.0, true),
        PotentialKind::Flett { alpha } => (alpha, 0.5, true),
        PotentialKind::Riesz { alpha } => (2.0 * alpha / riesz_beta, 0.5 * riesz_beta, false),
        PotentialKind::Biparam { alpha, beta } => (alpha / beta, 0.5 * beta, true),
    };
    let pref = 1.0 / eval_gamma(theta)?;
    let fhat = hankel_apply(f, params, cfg)?;
    let quad_cfg = if damped {
        cfg.clone()
            .with_tail(TailHint::Exponential)
            .with_singularity(theta - 1.0)
    } else {
        // Undamped riesz integrand: the semigroup value at large t scales
        // like its kernel height t^{-2(nu+1)/beta}, so the integrand decays
        // like t^{-(1 + 2(nu+1-alpha)/beta)}. The exponent certifies a
        // finite tail exactly when alpha < nu+1, which `validate` enforced.
        let p = 1.0 + 2.0 * (nu + 1.0 - kind.alpha()) / riesz_beta;
        cfg.clone()
            .with_tail(TailHint::Power(p))
            .with_singularity(theta - 1.0)
    };
    // Output tags mirror the spectral path's multiplier-derived rules.
    let m = potential_multiplier(kind)?;
    let out_decay = if m.singularity_order() < 0.0 {
        Decay::Power { exponent: -(nu + 1.0 + m.singularity_order()) }
    } else if let Some(k) = m.kink_order() {
        Decay::Power { exponent: -(nu + 1.0 + k) }
    } else {
        match f.decay() {
            Decay::Power { exponent } => Decay::Power { exponent },
            _ => Decay::Exponential { rate: 1.0 },
        }
    };
    let label = format!("{kind}[{}] (subordinated)", f.label());
    let params = params.clone();
    let eval = move |r: f64| -> f64 {
        let fh = fhat.clone();
        let p = params.clone();
        let v = integrate_semi_infinite(
            move |t: f64| {
                let weight =
                    (if damped { (-t).exp() } else { 1.0 }) * t.powf(theta - 1.0);
                weight
                    * damped_inverse_point(
                        &fh,
                        "subordination",
                        Arc::new(move |s: f64| (-t * s.powf(kappa)).exp()),
                        &p,
                        r,
                    )
            },
            &quad_cfg,
        );
        pref * v.unwrap_or(f64::NAN)
    };
    Ok(RadialProfile::from_core(ProfileCore::new(
        label,
        out_decay,
        0.0,
        true,
        Arc::new(eval),
    )))
}

/// `outer(inner(f))` by two honest operator passes: the inner output is
/// genuinely re-transformed, and only then is its spectrum re-tagged with
/// the exponential decay the multiplier algebra guarantees (the product of
/// a bounded-at-infinity multiplier with an exponentially damped spectrum
/// stays exponentially damped). The conservative default tag from the inner
/// output's power tail would otherwise force the slow oscillatory path on
/// every downstream inverse.
///
/// Cost note: when the inner output carries a power tail (riesz, flett,
/// non-reduced biparam), its re-transform runs the adaptive oscillatory
/// engine per spectral node, and the final inverse visits hundreds of
/// nodes — minutes of work per output point set. For those families use
/// [`potential_law_residual`], which checks the same semigroup content at a
/// handful of spectral probes. Bessel-type intermediates stay on the cheap
/// ladder throughout and compose in under a second.
pub fn potential_compose(
    outer: PotentialKind,
    inner: PotentialKind,
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    outer.validate(params)?;
    inner.validate(params)?;
    if !matches!(f.decay(), Decay::Exponential { .. }) {
        return Err(Error::Precondition(
            "potential composition needs an exponential-type input so the \
             re-transform's spectrum keeps an exponential tail bound"
                .into(),
        ));
    }
    let h = potential_apply_spectral(inner, f, params, cfg)?;
    let hhat = hankel_apply(&h, params, cfg)?.with_decay(Decay::Exponential { rate: 1.0 });
    multiplier_apply_to_spectrum(&hhat, &potential_multiplier(outer)?, params, cfg)
}

/// Semigroup-law residual at spectral probe points:
/// `max_s | m_outer(s) * T[inner f](s) - m_combined(s) * T f(s) |`.
///
/// The multiplier family composes exactly in the algebra
/// (`m_outer * m_inner = m_combined` identically), so the law's entire
/// numerical content is whether the *operator output's* spectrum equals
/// `m_inner * T f` — which is what the residual measures, weighted by the
/// outer multiplier exactly as the composed operator would weight it. The
/// inner output is evaluated by the honest inverse quadrature and its
/// forward transform re-runs the full oscillatory engine per probe; nothing
/// is assumed about either beyond the decay tags.
///
/// The caller names the `combined` kind because only same-family pairs have
/// one (`flett(a) . flett(b) = flett(a+b)` and so on).
pub fn potential_law_residual(
    outer: PotentialKind,
    inner: PotentialKind,
    combined: PotentialKind,
    f: &RadialProfile,
    probes: &[f64],
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    outer.validate(params)?;
    inner.validate(params)?;
    combined.validate(params)?;
    let h = potential_apply_spectral(inner, f, params, cfg)?;
    let hhat = hankel_apply(&h, params, cfg)?;
    let fhat = hankel_apply(f, params, cfg)?;
    let m_outer = potential_multiplier(outer)?;
    let m_combined = potential_multiplier(combined)?;
    let mut worst = 0.0f64;
    for &s in probes {
        let lhs = m_outer.eval(s) * hhat.eval(s);
        let rhs = m_combined.eval(s) * fhat.eval(s);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// The bessel kernel `g^alpha(r) = (1/Gamma(alpha/2)) int_0^inf e^{-t}
/// e^{-r/t} t^{alpha/2 - (nu+1) - 1} dt`: nonnegative, of mass
/// `Gamma(nu+1)`, with transform `(1+s)^{-alpha/2}`. Behaves like
/// `r^{alpha/2 - nu - 1}` at the origin (infinite there for
/// `alpha <= 2(nu+1)`) and decays like `e^{-2 sqrt(r)}` (Laplace point
/// `t = sqrt(r)`) — subexponential, but "eventually faster than any power",
/// which is all the exponential decay class promises the quadrature (its
/// dyadic tail closure uses observed segment ratios, not the nominal rate).
pub fn bessel_kernel_profile(
    alpha: f64,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain(format!(
            "bessel kernel order must be finite and > 0, got {alpha}"
        )));
    }
    let nu = params.transform_order();
    let pref = 1.0 / eval_gamma(0.5 * alpha)?;
    let texp = 0.5 * alpha - nu - 2.0;
    let small_r = 0.5 * alpha - nu - 1.0;
    let origin = if small_r > 0.0 {
        pref * eval_gamma(small_r)?
    } else {
        f64::INFINITY
    };
    // e^{-r/t} kills the t -> 0 end to all orders, so no endpoint
    // singularity is declared despite texp < -1; the inward geometric
    // closure resolves the boundary layer at t ~ sqrt(r) for small r.
    let quad_cfg = cfg.clone().with_tail(TailHint::Exponential);
    let eval = move |r: f64| -> f64 {
        if r == 0.0 {
            return origin;
        }
        let v = integrate_semi_infinite(move |t: f64| (-t - r / t).exp() * t.powf(texp), &quad_cfg);
        pref * v.unwrap_or(f64::NAN)
    };
    Ok(RadialProfile::from_core(ProfileCore::new(
        format!("bessel-g[{alpha}] kernel"),
        Decay::Exponential { rate: 1.0 },
        small_r.min(0.0),
        true,
        Arc::new(eval),
    )))
}

/// Verifies the riesz kernel identity: the transform of
/// `rho_alpha(r) = [Gamma(nu+1-alpha)/Gamma(alpha)] r^{alpha-(nu+1)}`
/// equals `s^{-alpha}`. The defining integral converges only conditionally,
/// so it is Abel-regularized with `e^{-eps u}` at `eps_j = (s/4)/2^j`,
/// `j = 0..7`, and Richardson-extrapolated to `eps = 0` (the regularized
/// value expands in integer powers of `eps/s`). Returns the maximum
/// relative deviation over `s in {0.5, 1, 2, 4}`.
pub fn riesz_kernel_check(
    alpha: f64,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let nu = params.transform_order();
    if !(alpha.is_finite() && alpha > 0.0 && alpha < nu + 1.0) {
        return Err(Error::Precondition(format!(
            "riesz kernel constant needs 0 < alpha < {}, got {alpha}",
            nu + 1.0
        )));
    }
    let c = eval_gamma(nu + 1.0 - alpha)? / eval_gamma(alpha)?;
    let mut worst = 0.0f64;
    for s in [0.5f64, 1.0, 2.0, 4.0] {
        let mut vals = Vec::with_capacity(8);
        for j in 0..8 {
            let eps = 0.25 * s / f64::powi(2.0, j);
            // u = w^2 linearizes the oscillation phase; the integrand is
            // then 2 c w^{2 alpha - 1} e^{-eps w^2} B_nu(2 w sqrt(s)).
            let quad_cfg = cfg
                .clone()
                .with_tail(TailHint::Oscillatory {
                    half_period: std::f64::consts::FRAC_PI_2 / s.sqrt(),
                })
                .with_singularity(2.0 * alpha - 1.0);
            let kernel = Arc::clone(params.kernel());
            let v = integrate_semi_infinite(
                move |w: f64| {
                    2.0 * c
                        * w.powf(2.0 * alpha - 1.0)
                        * (-eps * w * w).exp()
                        * kernel.eval(2.0 * w * s.sqrt())
                },
                &quad_cfg,
            )?;
            vals.push(v);
        }
        let got = richardson_extrapolate(&vals);
        let want = s.powf(-alpha);
        worst = worst.max(((got - want) / want).abs());
    }
    Ok(worst)
}
