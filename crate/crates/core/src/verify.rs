//! The full invariant suite as a library: every check measures a deviation,
//! compares it against a gate, and reports wall time. The command-line
//! `verify` subcommand renders these rows as a table; the acceptance tests
//! assert them.
//!
//! Checks come in two kinds. Parameter-generic checks (involution, kernel
//! normalizations, semigroup laws, two-path agreement, ...) run at the
//! caller's `(n, gamma)`. Checks whose statements pin their own parameter
//! sets (the fixed-point trio, the riesz kernel constant, the inversion
//! sweeps) run those regardless of the caller's choice and say so in their
//! detail line.

use std::time::Instant;

use crate::error::Result;
use crate::potential::{
    potential_apply_spectral, potential_apply_subordinated_via, potential_compose,
    potential_law_residual, potential_multiplier, riesz_kernel_check, PotentialKind,
};
use crate::radial::{
    geometric_grid, hankel_apply, hankel_inverse, radial_mass, Decay, FrameworkParams,
    RadialProfile,
};
use crate::semigroup::{
    beta_kernel_direct, kernel_profile, semigroup_apply, semigroup_multiplier,
    subordinate_poisson_from_heat, SemigroupKind,
};
use crate::specfun::gamma::eval_gamma;
use crate::specfun::quad::{integrate_semi_infinite, QuadratureConfig, TailHint};
use crate::wavelet::{c_constant, c_constant_routes, design_measure, inversion_sweep};

/// Suite-wide options.
#[derive(Debug, Clone, Default)]
pub struct VerifyOptions {
    /// Loosen every gate to at least this value; inner quadrature budgets
    /// scale with the effective gate where the integrands allow it.
    pub tol: Option<f64>,
}

/// One row of the verification table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    /// Largest measured deviation (`NaN` when the check errored out).
    pub max_dev: f64,
    /// The deviation gate after any loosening.
    pub gate: f64,
    pub pass: bool,
    pub seconds: f64,
    /// What was measured, or the error that interrupted the check.
    pub detail: String,
}

fn run_check(
    name: &'static str,
    gate: f64,
    body: impl FnOnce() -> Result<(f64, String)>,
) -> CheckResult {
    let t0 = Instant::now();
    let (max_dev, pass, detail) = match body() {
        Ok((dev, detail)) => (dev, dev.is_finite() && dev <= gate, detail),
        Err(e) => (f64::NAN, false, e.to_string()),
    };
    CheckResult { name, max_dev, gate, pass, seconds: t0.elapsed().as_secs_f64(), detail }
}

/// Quadrature budget that keeps the integrator's own error two orders under
/// the gate, within the engine's trustworthy range.
fn quad_for(gate: f64) -> QuadratureConfig {
    let t = (gate / 100.0).clamp(1e-12, 1e-4);
    QuadratureConfig::default().with_tolerance(t, t)
}

/// Budget for pipelines that re-transform multiplier-built profiles through
/// the oscillatory engine. Measured end-to-end accuracy of those forwards is
/// non-monotone in the tolerance (loose budgets contaminate the spectrum
/// samples the acceleration then chases); `1e-11` is the calibrated sweet
/// spot, simultaneously the most accurate and the fastest.
fn quad_oscillatory() -> QuadratureConfig {
    QuadratureConfig::default().with_tolerance(1e-11, 1e-11)
}

fn fmt_at(label: &str, at: &str, dev: f64) -> String {
    format!("worst {label} {dev:.3e} at {at}")
}

/// Run every check and collect the table. Never aborts early: a failing or
/// erroring check becomes a failing row and the suite moves on.
pub fn run_full_suite(params: &FrameworkParams, opts: &VerifyOptions) -> Vec<CheckResult> {
    let floor = opts.tol.unwrap_or(0.0);
    let gate = |default: f64| default.max(floor);

    vec![
        check_fixed_point(gate(1e-8)),
        check_involution(params, gate(1e-6)),
        check_poisson_kernel(params, gate(1e-7)),
        check_beta_integral(gate(1e-8)),
        check_kernel_masses(params, gate(1e-6)),
        check_beta_scaling(params, gate(1e-6)),
        check_semigroup_composition(params, gate(1e-6)),
        check_potential_laws(params, gate(1e-6)),
        check_two_path(params, gate(1e-5)),
        check_c_routes(gate(1e-6)),
        check_c_goldens(gate(1e-9)),
        check_inversion(gate(1e-2)),
        check_riesz_kernel(gate(1e-4)),
        check_subordination(params, gate(1e-6)),
        check_commutation(params, gate(1e-6)),
        check_beta_sign_oscillation(params, gate(0.5)),
    ]
}

/// `T(e^{-r})(s) = e^{-s}` to relative accuracy, on `s in [0, 20]` for the
/// pinned parameter trio.
fn check_fixed_point(gate: f64) -> CheckResult {
    run_check("transform-fixed-point", gate, || {
        let cfg = quad_for(gate);
        let f = RadialProfile::unit_exponential();
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (n, gamma) in [(1u32, 0.5f64), (2, 0.5), (3, 1.0)] {
            let p = FrameworkParams::new(n, gamma)?;
            let fhat = hankel_apply(&f, &p, &cfg)?;
            for i in 0..=80 {
                let s = 0.25 * i as f64;
                let want = (-s).exp();
                let rel = ((fhat.eval(s) - want) / want).abs();
                if rel > worst {
                    worst = rel;
                    at = format!("(n,gamma)=({n},{gamma}), s={s}");
                }
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// Double transform reproduces three profiles: two exponential-type and one
/// compactly supported.
fn check_involution(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("involution", gate, || {
        // Pinned budget: the bump's roundtrip re-transforms a numeric
        // spectrum through the oscillatory engine (see `quad_oscillatory`).
        let cfg = quad_oscillatory();
        let grid = geometric_grid(24, 1e-2, 12.0);
        let nu = params.transform_order();
        let mut worst = 0.0f64;
        let mut at = String::new();
        let profiles = [
            RadialProfile::unit_exponential(),
            RadialProfile::linear_exponential(),
            RadialProfile::smooth_bump(4.0),
        ];
        for f in &profiles {
            let fhat = hankel_apply(f, params, &cfg)?;
            let fhat = if matches!(f.decay(), Decay::Compact { .. }) {
                // The generic compact-support tag assumes an edge jump; the
                // bump touches down quintically, and each extra smoothness
                // order at the edge buys half a power of spectral decay.
                fhat.with_decay(Decay::Power { exponent: -(0.5 * nu + 0.75 + 2.5) })
            } else {
                fhat
            };
            let back = hankel_inverse(&fhat, params, &cfg)?;
            for &r in &grid {
                let dev = (back.eval(r) - f.eval(r)).abs();
                if dev > worst {
                    worst = dev;
                    at = format!("{}, r={r:.4}", f.label());
                }
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// The closed-form Poisson kernel transforms to `e^{-t sqrt(s)}`, constant
/// included (the `s = 0` value is exactly the kernel mass over
/// `Gamma(nu+1)`).
fn check_poisson_kernel(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("poisson-kernel-identity", gate, || {
        let cfg = quad_for(gate);
        let mut worst = 0.0f64;
        let mut at = String::new();
        for t in [0.5f64, 1.0] {
            let kernel = kernel_profile(SemigroupKind::Poisson, t, params, &cfg)?;
            let khat = hankel_apply(&kernel, params, &cfg)?;
            for s in [0.0f64, 0.25, 1.0, 4.0, 9.0, 16.0, 20.0] {
                let dev = (khat.eval(s) - (-t * s.sqrt()).exp()).abs();
                if dev > worst {
                    worst = dev;
                    at = format!("t={t}, s={s}");
                }
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// `int_0^inf u^{2a} (1+u^2)^{-(q - 1/2)} du` against its Gamma closed form
/// for three `(n, gamma, a)` triples, `q = 2 gamma + n`.
fn check_beta_integral(gate: f64) -> CheckResult {
    run_check("beta-integral", gate, || {
        let cfg = quad_for(gate);
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (n, gamma, a) in [(1u32, 0.5f64, 0.5f64), (2, 0.5, 1.0), (3, 1.0, 2.5)] {
            let q = 2.0 * gamma + n as f64;
            let wanted =
                0.5 * eval_gamma(a + 0.5)? * eval_gamma(q - a - 1.0)? / eval_gamma(q - 0.5)?;
            let quad = cfg
                .clone()
                .with_tail(TailHint::Power(2.0 * q - 1.0 - 2.0 * a))
                .with_singularity(2.0 * a);
            let got = integrate_semi_infinite(
                move |u: f64| u.powf(2.0 * a) * (1.0 + u * u).powf(0.5 - q),
                &quad,
            )?;
            let rel = ((got - wanted) / wanted).abs();
            if rel > worst {
                worst = rel;
                at = format!("(n,gamma,a)=({n},{gamma},{a})");
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// Kernel masses: heat, Poisson and four beta orders all integrate to
/// `Gamma(nu+1)` at unit time.
fn check_kernel_masses(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("kernel-masses", gate, || {
        let cfg = quad_for(gate);
        let gamma_mass = eval_gamma(params.transform_order() + 1.0)?;
        let kinds = [
            SemigroupKind::Heat,
            SemigroupKind::Poisson,
            SemigroupKind::Beta(0.5),
            SemigroupKind::Beta(1.0),
            SemigroupKind::Beta(1.5),
            SemigroupKind::Beta(2.0),
        ];
        let mut worst = 0.0f64;
        let mut at = String::new();
        for kind in kinds {
            let kernel = kernel_profile(kind, 1.0, params, &cfg)?;
            let mass = radial_mass(&kernel, params, &cfg)?;
            let rel = (mass / gamma_mass - 1.0).abs();
            if rel > worst {
                worst = rel;
                at = format!("{kind}");
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// Beta-kernel time scaling: the rescaled cached unit-time kernel matches a
/// fresh direct quadrature at the scaled time.
fn check_beta_scaling(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("beta-scaling", gate, || {
        let cfg = quad_for(gate);
        let beta = 1.5f64;
        let mut worst = 0.0f64;
        let mut at = String::new();
        for lambda in [0.5f64, 2.0] {
            let scaled = kernel_profile(SemigroupKind::Beta(beta), lambda, params, &cfg)?;
            for r in [0.3f64, 1.0, 3.0] {
                let fresh = beta_kernel_direct(beta, lambda, r, params, &cfg)?;
                let dev = (scaled.eval(r) - fresh).abs() / fresh.abs().max(1.0);
                if dev > worst {
                    worst = dev;
                    at = format!("lambda={lambda}, r={r}");
                }
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// `S_t S_s = S_{t+s}` for the heat, Poisson and order-3/2 semigroups.
fn check_semigroup_composition(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("semigroup-composition", gate, || {
        let cfg = quad_for(gate);
        let f = RadialProfile::unit_exponential();
        let grid = geometric_grid(32, 1e-2, 12.0);
        let kinds = [SemigroupKind::Heat, SemigroupKind::Poisson, SemigroupKind::Beta(1.5)];
        let mut worst = 0.0f64;
        let mut at = String::new();
        for kind in kinds {
            for (t, s) in [(0.5f64, 0.5f64), (0.5, 1.0)] {
                let two_step =
                    semigroup_apply(&semigroup_apply(&f, kind, t, params, &cfg)?, kind, s, params, &cfg)?;
                let one_shot = semigroup_apply(&f, kind, t + s, params, &cfg)?;
                for &r in &grid {
                    let dev = (two_step.eval(r) - one_shot.eval(r)).abs();
                    if dev > worst {
                        worst = dev;
                        at = format!("{kind}, t={t}, s={s}, r={r:.4}");
                    }
                }
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// Potential semigroup laws on `f = e^{-r}`: bessel composed physically
/// (both passes ride the ladder), flett through spectral law probes (its
/// intermediate carries a power tail; see `potential_law_residual`).
fn check_potential_laws(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("potential-semigroup-laws", gate, || {
        let f = RadialProfile::unit_exponential();
        let cfg = quad_for(gate);
        let mut worst = 0.0f64;
        let mut at = String::new();

        let (a, b) = (0.7f64, 0.9f64);
        let composed = potential_compose(
            PotentialKind::Bessel { alpha: a },
            PotentialKind::Bessel { alpha: b },
            &f,
            params,
            &cfg,
        )?;
        let one_shot =
            potential_apply_spectral(PotentialKind::Bessel { alpha: a + b }, &f, params, &cfg)?;
        for r in [0.3f64, 1.5, 7.0] {
            let dev = (composed.eval(r) - one_shot.eval(r)).abs();
            if dev > worst {
                worst = dev;
                at = format!("bessel {a}+{b}, r={r}");
            }
        }

        let flett_dev = potential_law_residual(
            PotentialKind::Flett { alpha: 0.6 },
            PotentialKind::Flett { alpha: 0.9 },
            PotentialKind::Flett { alpha: 1.5 },
            &f,
            &[0.25, 1.0, 4.0, 16.0],
            params,
            &quad_oscillatory(),
        )?;
        if flett_dev > worst {
            worst = flett_dev;
            at = "flett 0.6+0.9, spectral probes".into();
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// Subordinated against spectral application for all four potential kinds,
/// two parameter sets each, riesz through both order-1 and order-2
/// subordination.
fn check_two_path(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("two-path-agreement", gate, || {
        let cfg = quad_for(gate);
        let f = RadialProfile::unit_exponential();
        let cases: [(PotentialKind, f64); 8] = [
            (PotentialKind::Bessel { alpha: 1.0 }, 2.0),
            (PotentialKind::Bessel { alpha: 0.6 }, 1.5),
            (PotentialKind::Flett { alpha: 0.8 }, 2.0),
            (PotentialKind::Flett { alpha: 1.2 }, 1.0),
            (PotentialKind::Biparam { alpha: 1.1, beta: 1.5 }, 2.0),
            (PotentialKind::Biparam { alpha: 0.9, beta: 1.0 }, 1.5),
            (PotentialKind::Riesz { alpha: 0.5 }, 2.0),
            (PotentialKind::Riesz { alpha: 0.5 }, 1.0),
        ];
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (kind, sub_beta) in cases {
            let spectral = potential_apply_spectral(kind, &f, params, &cfg)?;
            let subordinated =
                potential_apply_subordinated_via(kind, sub_beta, &f, params, &cfg)?;
            for r in [0.5f64, 2.5] {
                let dev = (spectral.eval(r) - subordinated.eval(r)).abs();
                if dev > worst {
                    worst = dev;
                    at = format!("{kind} via beta={sub_beta}, r={r}");
                }
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// `C(theta, mu)`: Gamma/log closed form against the Laplace-symbol
/// integral.
fn check_c_routes(gate: f64) -> CheckResult {
    run_check("c-constant-routes", gate, || {
        let cfg = quad_for(gate);
        let mu1 = design_measure(1)?;
        let mu2 = design_measure(2)?;
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (theta, mu) in
            [(0.3f64, &mu1), (0.5, &mu1), (1.0, &mu1), (1.7, &mu1), (2.0, &mu2)]
        {
            let (closed, integral) = c_constant_routes(theta, mu, &cfg)?;
            let rel = ((closed - integral) / closed).abs();
            if rel > worst {
                worst = rel;
                at = format!("theta={theta}");
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// The two frozen golden values of the normalization constant.
fn check_c_goldens(gate: f64) -> CheckResult {
    run_check("c-constant-goldens", gate, || {
        let cfg = quad_for(gate);
        let two_sqrt_pi = 2.0 * std::f64::consts::PI.sqrt();
        let two_ln_two = 2.0 * std::f64::consts::LN_2;
        let dev0 =
            ((c_constant(0.5, &design_measure(0)?, &cfg)? - two_sqrt_pi) / two_sqrt_pi).abs();
        let dev1 =
            ((c_constant(1.0, &design_measure(1)?, &cfg)? - two_ln_two) / two_ln_two).abs();
        let worst = dev0.max(dev1);
        let at = if dev0 >= dev1 { "C(0.5) vs 2 sqrt(pi)" } else { "C(1) vs 2 ln 2" };
        Ok((worst, fmt_at("relative", at, worst)))
    })
}

/// Truncated inversion sweeps for the flett, riesz and bi-parametric
/// potentials: errors non-increasing over the dyadic epsilon sweep, final
/// error at or below the target, routes agreeing within 1e-4 (enforced
/// inside the sweep).
fn check_inversion(gate: f64) -> CheckResult {
    run_check("inversion-convergence", gate, || {
        // Pinned configuration: the criterion's own parameter point, a
        // sweep-calibrated quadrature budget, and designs with two spare
        // vanishing moments (the truncation error scales as
        // eps^{m+1-theta}, so m = 0 designs plateau far above 1%).
        let p = FrameworkParams::new(2, 0.5)?;
        let cfg = QuadratureConfig::default().with_tolerance(1e-9, 1e-9);
        let f = RadialProfile::unit_exponential();
        let mu = design_measure(2)?;
        let grid = geometric_grid(24, 1e-2, 10.0);
        let epsilons = [1.0f64, 0.5, 0.25, 0.125, 0.0625];
        let runs: [(PotentialKind, f64); 3] = [
            (PotentialKind::Flett { alpha: 0.7 }, 2.0),
            (PotentialKind::Riesz { alpha: 0.5 }, 2.0),
            (PotentialKind::Biparam { alpha: 0.8, beta: 1.5 }, 1.5),
        ];
        let mut worst = 0.0f64;
        let mut all_converged = true;
        let mut finals = Vec::new();
        for (kind, order) in runs {
            let report =
                inversion_sweep(kind, order, &f, &mu, &epsilons, gate, &grid, &p, &cfg)?;
            let last = *report.sup_errors.last().unwrap();
            finals.push(format!("{kind}: {last:.3e}"));
            worst = worst.max(last);
            all_converged &= report.converged;
        }
        let detail = format!(
            "final sup errors [{}]{}",
            finals.join(", "),
            if all_converged { "" } else { " (non-monotone or above target)" }
        );
        Ok((if all_converged { worst } else { f64::INFINITY }, detail))
    })
}

/// Abel-regularized riesz kernel identity at two pinned configurations.
fn check_riesz_kernel(gate: f64) -> CheckResult {
    run_check("riesz-kernel-constant", gate, || {
        // Pinned budget: Richardson extrapolation amplifies quadrature
        // noise, so the inputs stay tight regardless of the gate.
        let cfg = QuadratureConfig::default().with_tolerance(1e-9, 1e-9);
        let mut worst = 0.0f64;
        let mut at = String::new();
        for (alpha, n, gamma) in [(0.8f64, 2u32, 0.5f64), (1.2, 3, 1.0)] {
            let p = FrameworkParams::new(n, gamma)?;
            let dev = riesz_kernel_check(alpha, &p, &cfg)?;
            if dev > worst {
                worst = dev;
                at = format!("alpha={alpha}, (n,gamma)=({n},{gamma})");
            }
        }
        Ok((worst, fmt_at("relative", &at, worst)))
    })
}

/// The Poisson semigroup realized through the heat one agrees with the
/// spectral realization.
fn check_subordination(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("poisson-subordination", gate, || {
        let cfg = quad_for(gate);
        let f = RadialProfile::unit_exponential();
        let t = 0.8f64;
        let direct = semigroup_apply(&f, SemigroupKind::Poisson, t, params, &cfg)?;
        let subordinated = subordinate_poisson_from_heat(&f, t, params, &cfg)?;
        let mut worst = 0.0f64;
        let mut at = String::new();
        for r in [0.25f64, 1.0, 4.0] {
            let dev = (direct.eval(r) - subordinated.eval(r)).abs();
            if dev > worst {
                worst = dev;
                at = format!("t={t}, r={r}");
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// Flett potential and Poisson semigroup commute: the physical composition
/// in one order reproduces the closed product spectrum of both orders.
fn check_commutation(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("flett-poisson-commutation", gate, || {
        let cfg = quad_oscillatory();
        let f = RadialProfile::unit_exponential();
        let (alpha, t) = (0.8f64, 0.7f64);
        let pf = semigroup_apply(&f, SemigroupKind::Poisson, t, params, &cfg)?;
        let h = potential_apply_spectral(PotentialKind::Flett { alpha }, &pf, params, &cfg)?;
        let hhat = hankel_apply(&h, params, &cfg)?;
        let fhat = hankel_apply(&f, params, &cfg)?;
        let m_flett = potential_multiplier(PotentialKind::Flett { alpha })?;
        let m_poisson = semigroup_multiplier(SemigroupKind::Poisson, t)?;
        let mut worst = 0.0f64;
        let mut at = String::new();
        for s in [0.25f64, 1.0, 4.0] {
            let dev = (hhat.eval(s) - m_flett.eval(s) * m_poisson.eval(s) * fhat.eval(s)).abs();
            if dev > worst {
                worst = dev;
                at = format!("alpha={alpha}, t={t}, s={s}");
            }
        }
        Ok((worst, fmt_at("absolute", &at, worst)))
    })
}

/// Beta kernels change sign beyond order 2 (they stop being probability
/// densities): the order-3 kernel must show a negative lobe while staying
/// positive near the origin.
fn check_beta_sign_oscillation(params: &FrameworkParams, gate: f64) -> CheckResult {
    run_check("beta-sign-oscillation", gate, || {
        let cfg = quad_for(1e-6);
        let kernel = kernel_profile(SemigroupKind::Beta(3.0), 1.0, params, &cfg)?;
        let grid = geometric_grid(40, 5e-2, 10.0);
        let values: Vec<f64> = grid.iter().map(|&r| kernel.eval(r)).collect();
        let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let origin = kernel.eval(0.0);
        let found = min < 0.0 && origin > 0.0;
        let detail = format!(
            "order-3 kernel at t=1: origin {origin:.3e}, deepest lobe {min:.3e}"
        );
        // Deviation 0 when the sign structure is present, 1 when absent.
        Ok((if found { 0.0 } else { 1.0 }, detail))
    })
}
