//! Frozen spectral ladder: a fixed composite Gauss rule on octave rungs
//! covering [2^-40, 2^7], used to transform quadrature-backed profiles whose
//! spectral side is exponentially damped (multiplier products `m * T f` with
//! `T f` decaying exponentially — the common case in semigroup and potential
//! application).
//!
//! Why not the adaptive engine? A nested transform evaluates its input
//! (itself a quadrature) at every node the adaptive subdivision decides to
//! visit: the node set varies per output point and the cost compounds
//! multiplicatively. The ladder pins a bounded node universe — per rung the
//! panel count is a power of two chosen from the local oscillation span — so
//! profile memo caches keep hitting across output points, epsilons and
//! operator parameters.
//!
//! Accuracy: GL-20 panels sized to <= ~8 radians of kernel phase resolve the
//! integrand to well below 1e-10 locally; the truncation at 2^7 = 128 is
//! controlled by the exponential damping of the product (the only profiles
//! routed here). Profiles with power tails take the adaptive oscillatory
//! path in `radial` instead.

use crate::radial::ProfileCore;
use crate::specfun::bessel::NormalizedBessel;
use crate::specfun::quad::{gl20, KahanSum};
use std::sync::Arc;

const RUNG_LO: i32 = -40;
const RUNG_HI: i32 = 7; // exclusive upper octave boundary is 2^RUNG_HI

/// Phase radians covered by a single GL-20 panel.
const RADIANS_PER_PANEL: f64 = 8.0;
const MAX_PANELS_PER_RUNG: usize = 256;
/// Local-variation allowance when bounding a rung's integrand by its edge
/// values: smooth spectra (transform products) stay within this factor of
/// `max(|g(a)|, |g(b)|)` on an octave. A hypothetical interior excursion a
/// hundredfold beyond it would still sit under the ladder's 1e-10 promise,
/// since skipped rungs are budgeted at 1e-12 of the dominant rung mass.
const EDGE_SLACK: f64 = 4.0;

/// Integrate `g(s) B_nu(2 sqrt(s x)) s^nu ds` over (0, inf) with the frozen
/// rung/panel layout. `g` is evaluated through its memo cache.
///
/// `skip_floor` is an absolute error budget for rungs the probe pass can
/// certify negligible (pass 0.0 to keep only the relative 1e-12 budget).
/// Rung bounds use `|normalized kernel| <= 1` and edge probes of `g`, which
/// the memo cache shares across output points, so the probe pass is
/// amortized free while dead octaves (underflowed exponential tails, the
/// vanishing s^(sigma+nu) origin mass) drop from the node count.
pub(crate) fn ladder_transform(
    g: &Arc<ProfileCore>,
    kernel: &Arc<NormalizedBessel>,
    nu: f64,
    x: f64,
    skip_floor: f64,
) -> f64 {
    let rule = gl20();
    let mut total = KahanSum::new();
    let sqrt_x = x.sqrt();
    let sigma = g.singularity_order;
    let rung_count = (RUNG_HI - RUNG_LO) as usize;

    // Probe pass: bound each rung's contribution by edge values of the
    // de-singularized spectrum times the exact |s^(sigma+nu)| octave mass.
    let mut bounds = vec![0.0f64; rung_count];
    let power = sigma + nu + 1.0;
    let mut prev_edge = {
        let a = (2.0f64).powi(RUNG_LO);
        (g.eval(a) / a.powf(sigma)).abs()
    };
    let mut bound_sum = 0.0f64;
    for (idx, j) in (RUNG_LO..RUNG_HI).enumerate() {
        let a = (2.0f64).powi(j);
        let b = 2.0 * a;
        let edge_b = (g.eval(b) / b.powf(sigma)).abs();
        let scale = prev_edge.max(edge_b);
        let mass = if power > 0.0 {
            (b.powf(power) - a.powf(power)) / power
        } else {
            // Declared singularity stronger than the weight can absorb
            // never reaches the ladder (transform preconditions), but keep
            // a defensive non-skippable marker.
            f64::INFINITY
        };
        bounds[idx] = EDGE_SLACK * scale * mass;
        if bounds[idx].is_finite() {
            bound_sum += bounds[idx];
        }
        prev_edge = edge_b;
    }
    let budget = (1e-12 * bound_sum).max(skip_floor) / rung_count as f64;

    for (idx, j) in (RUNG_LO..RUNG_HI).enumerate() {
        if bounds[idx] <= budget {
            continue;
        }
        let a = (2.0f64).powi(j);
        let b = 2.0 * a;
        // Kernel phase span across the rung: 2 sqrt(x) (sqrt(b) - sqrt(a)).
        let span = 2.0 * sqrt_x * (b.sqrt() - a.sqrt());
        let mut panels = ((span / RADIANS_PER_PANEL).ceil() as usize).max(1);
        panels = panels.next_power_of_two().min(MAX_PANELS_PER_RUNG);
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let pa = a + h * p as f64;
            let c = pa + 0.5 * h;
            let half = 0.5 * h;
            for &(t, w) in rule {
                let s = c + half * t;
                let v = g.eval(s) * kernel.eval(2.0 * (s * x).sqrt()) * s.powf(nu);
                total.add(w * half * v);
            }
        }
    }
    // Stub below the lowest rung, using the declared origin behaviour
    // g(s) ~ c s^sigma.
    let s_lo = (2.0f64).powi(RUNG_LO);
    let sigma = g.singularity_order;
    let power = sigma + nu + 1.0;
    if power > 0.0 {
        let g_lo = g.eval(s_lo);
        if g_lo.is_finite() && g_lo != 0.0 {
            let c = g_lo / s_lo.powf(sigma);
            let kernel_mid = kernel.eval(2.0 * (0.5 * s_lo * x).sqrt());
            total.add(c * kernel_mid * s_lo.powf(power) / power);
        }
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use crate::radial::{
        hankel_apply, multiplier_apply, FrameworkParams, RadialProfile,
        SpectralMultiplier,
    };
    use crate::specfun::quad::QuadratureConfig;

    /// Heat-type multiplier on the fixed point has a closed form:
    /// applying e^{-t s} to e^{-r} yields (1+t)^{-(nu+1)} e^{-r/(1+t)}.
    /// This exercises the full nested path: adaptive forward transform,
    /// product assembly, ladder-backed inverse.
    #[test]
    fn damped_multiplier_on_fixed_point_closed_form() {
        let params = FrameworkParams::new(2, 0.5).unwrap(); // nu = 1
        let cfg = QuadratureConfig::default().with_tolerance(1e-11, 1e-11);
        let f = RadialProfile::unit_exponential();
        let t = 1.0;
        let m = SpectralMultiplier::new("exp(-t s)", move |s: f64| (-t * s).exp())
            .with_damping();
        let out = multiplier_apply(&f, &m, &params, &cfg).unwrap();
        for r in [0.0, 0.4, 1.0, 3.0, 8.0] {
            let want = (1.0f64 + t).powf(-2.0) * (-r / (1.0 + t)).exp();
            let got = out.eval(r);
            assert!(
                (got - want).abs() <= 1e-8 * want.abs().max(1e-6),
                "r={r}: got {got:e} want {want:e}"
            );
        }
    }

    /// Identity multiplier through the nested path reproduces the input.
    /// With no damping multiplier, the quadrature noise of the numeric
    /// spectrum (~abs_tol) is amplified by the s^nu ladder weight, so the
    /// honest expectation here is ~1e-6 absolute, not the 1e-8 the damped
    /// paths reach.
    #[test]
    fn identity_multiplier_roundtrip() {
        let params = FrameworkParams::new(3, 1.0).unwrap(); // nu = 3
        let cfg = QuadratureConfig::default().with_tolerance(1e-11, 1e-11);
        let f = RadialProfile::linear_exponential();
        // Not damped, but the transform of r e^{-r} is tagged exponential,
        // so the product still routes through the ladder.
        let m = SpectralMultiplier::new("one", |_s: f64| 1.0).with_damping();
        let out = multiplier_apply(&f, &m, &params, &cfg).unwrap();
        for r in [0.2f64, 1.0, 2.5, 6.0] {
            let want = r * (-r).exp();
            let got = out.eval(r);
            assert!(
                (got - want).abs() <= 1e-6,
                "r={r}: got {got:e} want {want:e}"
            );
        }
    }

    /// The ladder sees the same spectrum object across multiplier calls on
    /// the same input (forward-transform caching), so its memo fills once.
    #[test]
    fn spectrum_shared_across_operator_calls() {
        let params = FrameworkParams::new(2, 0.5).unwrap();
        let cfg = QuadratureConfig::default().with_tolerance(1e-9, 1e-9);
        let f = RadialProfile::unit_exponential();
        let a = hankel_apply(&f, &params, &cfg).unwrap();
        for t in [0.5, 1.0, 2.0] {
            let m = SpectralMultiplier::new("damp", move |s: f64| (-t * s).exp())
                .with_damping();
            let _ = multiplier_apply(&f, &m, &params, &cfg).unwrap().eval(1.0);
        }
        let b = hankel_apply(&f, &params, &cfg).unwrap();
        assert_eq!(a.profile_id(), b.profile_id());
    }
}
