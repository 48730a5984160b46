//! Radial framework: parameters, tagged function profiles on the half line,
//! and the self-inverse Hankel-type transform pairing them.
//!
//! With `nu = n + 2 gamma - 2`, the transform of a radial profile `f` is
//!
//! `T f (s) = int_0^inf f(u) B_nu(2 sqrt(u s)) u^nu du`,
//!
//! where `B_nu` is the normalized Bessel kernel. `T` is an involution on its
//! natural domain: `T(T f) = f`, and `e^{-r}` is a fixed point for every
//! order. Profiles carry shape metadata (decay class, endpoint singularity,
//! optional far-field power series) that the quadrature engine consumes; the
//! metadata is declared by whoever constructs the profile and is trusted.

use crate::error::{Error, Result};
use crate::specfun::bessel::NormalizedBessel;
use crate::specfun::gamma::reciprocal_gamma;
use crate::specfun::quad::{
    integrate_semi_infinite, QuadratureConfig, TailHint,
};
use dashmap::DashMap;
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

/// Output points below this are treated as the nonoscillatory regime.
const OSC_SWITCH: f64 = 1e-8;
/// Per-profile memo capacity.
const CACHE_CAP: usize = 1 << 21;

static NEXT_PROFILE_ID: AtomicU64 = AtomicU64::new(1);

// ---------------------------------------------------------------------------
// Framework parameters
// ---------------------------------------------------------------------------

/// The `(n, gamma)` pair fixing the radial framework. All operators in this
/// crate act at a fixed `FrameworkParams`; the transform order is
/// `nu = n + 2 gamma - 2` and the radial weight is `u^nu du`.
#[derive(Clone)]
pub struct FrameworkParams {
    inner: Arc<ParamsInner>,
}

struct ParamsInner {
    n: u32,
    gamma: f64,
    nu: f64,
    kernel: Arc<NormalizedBessel>,
    forward_cache: DashMap<(u64, u64), SpectralProfile>,
    inverse_cache: DashMap<(u64, u64), RadialProfile>,
}

impl std::fmt::Debug for FrameworkParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FrameworkParams")
            .field("n", &self.inner.n)
            .field("gamma", &self.inner.gamma)
            .field("nu", &self.inner.nu)
            .finish()
    }
}

impl FrameworkParams {
    /// Requires `n >= 1`, `gamma >= 0`, and `n + 2 gamma > 1` so that the
    /// transform order exceeds -1.
    pub fn new(n: u32, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension parameter n must be >= 1".into()));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(Error::Domain(format!(
                "deformation parameter gamma must be finite and >= 0, got {gamma}"
            )));
        }
        let nu = n as f64 + 2.0 * gamma - 2.0;
        if nu <= -1.0 {
            return Err(Error::Domain(format!(
                "n + 2 gamma = {} must exceed 1",
                n as f64 + 2.0 * gamma
            )));
        }
        let kernel = Arc::new(NormalizedBessel::new(nu)?);
        Ok(FrameworkParams {
            inner: Arc::new(ParamsInner {
                n,
                gamma,
                nu,
                kernel,
                forward_cache: DashMap::new(),
                inverse_cache: DashMap::new(),
            }),
        })
    }

    pub fn n(&self) -> u32 {
        self.inner.n
    }

    pub fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    /// Transform order `nu = n + 2 gamma - 2`.
    pub fn transform_order(&self) -> f64 {
        self.inner.nu
    }

    /// Homogeneous degree of the radial measure: mass of `[0, R]` scales
    /// like `R^{nu+1}`.
    pub fn homogeneous_degree(&self) -> f64 {
        self.inner.nu + 1.0
    }

    pub fn kernel(&self) -> &Arc<NormalizedBessel> {
        &self.inner.kernel
    }

    /// Total integral of the transform kernel against the weight on a unit
    /// exponential: `int u^nu e^{-u} du = Gamma(nu + 1)`. This is the common
    /// normalization of every semigroup kernel in the crate.
    pub fn reference_mass(&self) -> f64 {
        1.0 / reciprocal_gamma(self.inner.nu + 1.0)
    }
}

// ---------------------------------------------------------------------------
// Decay metadata
// ---------------------------------------------------------------------------

/// Declared behaviour of a profile as its argument grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    /// `|f(r)| <~ e^{-rate r}` (or faster).
    Exponential { rate: f64 },
    /// `f(r) ~ r^{exponent}` with `exponent` typically negative.
    Power { exponent: f64 },
    /// `f(r) = 0` for `r >= radius`.
    Compact { radius: f64 },
}

/// Far-field expansion `f(r) = sum_i coefficient_i * r^{-exponent_i}` valid
/// for `r >= valid_from`. Exponents must be positive and increasing.
#[derive(Debug, Clone)]
pub struct PowerTailSeries {
    pub valid_from: f64,
    pub terms: Vec<(f64, f64)>, // (coefficient, exponent)
}

impl PowerTailSeries {
    pub fn eval(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|&(c, e)| c * r.powf(-e))
            .sum()
    }

    /// `int_R^inf f(r) r^weight dr` from the series, term by term.
    /// Requires every `exponent > weight + 1`.
    pub fn weighted_tail_mass(&self, from: f64, weight: f64) -> Result<f64> {
        let mut acc = 0.0;
        for &(c, e) in &self.terms {
            if e <= weight + 1.0 + 1e-12 {
                return Err(Error::Precondition(format!(
                    "tail term r^-{e} is not integrable against weight r^{weight}"
                )));
            }
            acc += c * from.powf(weight + 1.0 - e) / (e - weight - 1.0);
        }
        Ok(acc)
    }
}

// ---------------------------------------------------------------------------
// Profiles
// ---------------------------------------------------------------------------

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub(crate) struct ProfileCore {
    pub(crate) id: u64,
    pub(crate) label: String,
    pub(crate) decay: Decay,
    pub(crate) singularity_order: f64,
    /// True when evaluation is quadrature-backed (set by the transform
    /// routines); steers nested transforms to cheaper evaluation paths.
    pub(crate) numeric: bool,
    pub(crate) tail_series: Option<PowerTailSeries>,
    pub(crate) eval_fn: EvalFn,
    pub(crate) cache: Arc<DashMap<u64, f64>>,
}

impl ProfileCore {
    pub(crate) fn new(
        label: String,
        decay: Decay,
        singularity_order: f64,
        numeric: bool,
        eval_fn: EvalFn,
    ) -> Self {
        ProfileCore {
            id: NEXT_PROFILE_ID.fetch_add(1, Ordering::Relaxed),
            label,
            decay,
            singularity_order,
            numeric,
            tail_series: None,
            eval_fn,
            cache: Arc::new(DashMap::new()),
        }
    }

    pub(crate) fn eval(&self, x: f64) -> f64 {
        if !x.is_finite() {
            return f64::NAN;
        }
        let key = x.to_bits();
        if let Some(v) = self.cache.get(&key) {
            return *v;
        }
        let v = (self.eval_fn)(x);
        if self.cache.len() < CACHE_CAP {
            self.cache.insert(key, v);
        }
        v
    }

    /// Rebuild with changed metadata, sharing the evaluation closure and the
    /// memo cache (the underlying function is unchanged).
    fn retagged(
        &self,
        decay: Decay,
        singularity_order: f64,
        tail_series: Option<PowerTailSeries>,
    ) -> Self {
        ProfileCore {
            id: NEXT_PROFILE_ID.fetch_add(1, Ordering::Relaxed),
            label: self.label.clone(),
            decay,
            singularity_order,
            numeric: self.numeric,
            tail_series,
            eval_fn: Arc::clone(&self.eval_fn),
            cache: Arc::clone(&self.cache),
        }
    }
}

macro_rules! profile_impl {
    ($name:ident, $arg:literal) => {
        impl $name {
            #[doc = concat!(
                "Wrap a closure as a profile of the ", $arg,
                " variable with declared shape metadata."
            )]
            pub fn new(
                label: impl Into<String>,
                decay: Decay,
                f: impl Fn(f64) -> f64 + Send + Sync + 'static,
            ) -> Self {
                $name {
                    core: Arc::new(ProfileCore::new(
                        label.into(),
                        decay,
                        0.0,
                        false,
                        Arc::new(f),
                    )),
                }
            }

            pub fn label(&self) -> &str {
                &self.core.label
            }

            pub fn decay(&self) -> Decay {
                self.core.decay
            }

            /// `f(x) ~ x^sigma` as `x -> 0+`; 0 for profiles bounded with a
            /// nonzero limit at the origin.
            pub fn singularity_order(&self) -> f64 {
                self.core.singularity_order
            }

            pub fn tail_series(&self) -> Option<&PowerTailSeries> {
                self.core.tail_series.as_ref()
            }

            /// Evaluate (memoized). Quadrature-backed profiles return NaN if
            /// their internal integration fails; callers treat NaN as a loud
            /// failure.
            pub fn eval(&self, x: f64) -> f64 {
                self.core.eval(x)
            }

            /// Evaluate on a grid in parallel.
            pub fn values_on(&self, grid: &[f64]) -> Vec<f64> {
                grid.par_iter().map(|&x| self.eval(x)).collect()
            }

            /// Re-declare the decay class. Use when the caller knows more
            /// about the profile than the generic tagging rules do (e.g. the
            /// transform of a *smooth* compactly supported profile decays
            /// much faster than the worst-case tag).
            pub fn with_decay(&self, decay: Decay) -> Self {
                $name {
                    core: Arc::new(self.core.retagged(
                        decay,
                        self.core.singularity_order,
                        self.core.tail_series.clone(),
                    )),
                }
            }

            /// Re-declare the endpoint singularity order.
            pub fn with_singularity(&self, sigma: f64) -> Self {
                $name {
                    core: Arc::new(self.core.retagged(
                        self.core.decay,
                        sigma,
                        self.core.tail_series.clone(),
                    )),
                }
            }

            /// Attach a far-field power series used for analytic tail
            /// completion in mass integrals.
            pub fn with_tail_series(&self, tail: PowerTailSeries) -> Self {
                $name {
                    core: Arc::new(self.core.retagged(
                        self.core.decay,
                        self.core.singularity_order,
                        Some(tail),
                    )),
                }
            }

            pub(crate) fn core(&self) -> &Arc<ProfileCore> {
                &self.core
            }

            pub(crate) fn from_core(core: ProfileCore) -> Self {
                $name { core: Arc::new(core) }
            }

            pub(crate) fn profile_id(&self) -> u64 {
                self.core.id
            }
        }

        impl std::fmt::Debug for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.debug_struct(stringify!($name))
                    .field("label", &self.core.label)
                    .field("decay", &self.core.decay)
                    .field("singularity_order", &self.core.singularity_order)
                    .finish()
            }
        }
    };
}

/// A radial (physical-side) function of `r >= 0`.
#[derive(Clone)]
pub struct RadialProfile {
    core: Arc<ProfileCore>,
}

/// A spectral-side function of `s >= 0`.
#[derive(Clone)]
pub struct SpectralProfile {
    core: Arc<ProfileCore>,
}

profile_impl!(RadialProfile, "radial");
profile_impl!(SpectralProfile, "spectral");

impl RadialProfile {
    /// `e^{-r}`: the fixed point of the transform at every order.
    pub fn unit_exponential() -> Self {
        RadialProfile::new("exp(-r)", Decay::Exponential { rate: 1.0 }, |r: f64| {
            (-r).exp()
        })
    }

    /// `r e^{-r}`.
    pub fn linear_exponential() -> Self {
        RadialProfile::new("r exp(-r)", Decay::Exponential { rate: 1.0 }, |r: f64| {
            r * (-r).exp()
        })
    }

    /// `(1 - (r/radius)^2)^5` on `[0, radius]`: compactly supported with a
    /// quintic-order touchdown at the edge.
    pub fn smooth_bump(radius: f64) -> Self {
        RadialProfile::new(
            "smooth bump",
            Decay::Compact { radius },
            move |r: f64| {
                let q = 1.0 - (r / radius) * (r / radius);
                if q <= 0.0 {
                    0.0
                } else {
                    q.powi(5)
                }
            },
        )
    }
}

// ---------------------------------------------------------------------------
// Spectral multipliers
// ---------------------------------------------------------------------------

/// A real function of the spectral variable applied under the transform:
/// `f -> T^{-1}( m * T f )`. The shape metadata is what the inverse
/// transform needs to tag its output honestly.
#[derive(Clone)]
pub struct SpectralMultiplier {
    label: String,
    func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// `m(s) ~ s^{singularity_order}` as `s -> 0` (0 when bounded nonzero).
    singularity_order: f64,
    /// Lowest non-smooth power of `s` in the expansion of `m` at 0
    /// (`None` when analytic there). Governs the power tail the multiplier
    /// imprints on physical-side output.
    kink_order: Option<f64>,
    /// Whether `m` decays (super)exponentially at infinity.
    damping: bool,
}

impl SpectralMultiplier {
    /// A multiplier bounded and analytic at 0 with no decay claimed.
    pub fn new(label: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        SpectralMultiplier {
            label: label.into(),
            func: Arc::new(func),
            singularity_order: 0.0,
            kink_order: None,
            damping: false,
        }
    }

    pub fn with_singularity(mut self, sigma: f64) -> Self {
        self.singularity_order = sigma;
        self
    }

    pub fn with_kink(mut self, order: f64) -> Self {
        self.kink_order = Some(order);
        self
    }

    pub fn with_damping(mut self) -> Self {
        self.damping = true;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.func)(s)
    }

    pub fn singularity_order(&self) -> f64 {
        self.singularity_order
    }

    pub fn kink_order(&self) -> Option<f64> {
        self.kink_order
    }
}

// ---------------------------------------------------------------------------
// The transform
// ---------------------------------------------------------------------------

/// Check that a profile is transformable and describe why not otherwise.
fn check_transformable(core: &ProfileCore, nu: f64) -> Result<()> {
    if core.singularity_order + nu <= -1.0 {
        return Err(Error::Precondition(format!(
            "profile '{}' has singularity order {} which is not integrable \
             against the weight u^{nu}",
            core.label, core.singularity_order
        )));
    }
    match core.decay {
        Decay::Exponential { rate } => {
            if !(rate > 0.0) {
                return Err(Error::Precondition(format!(
                    "profile '{}' declares a non-positive exponential rate",
                    core.label
                )));
            }
        }
        Decay::Compact { radius } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::Precondition(format!(
                    "profile '{}' declares an invalid support radius",
                    core.label
                )));
            }
        }
        Decay::Power { exponent } => {
            // Conditional convergence through the oscillatory path needs
            // exponent + nu < -1/2.
            if exponent + nu >= -0.5 {
                return Err(Error::Precondition(format!(
                    "profile '{}' decays like r^{exponent}, too slowly to \
                     transform at order {nu}",
                    core.label
                )));
            }
        }
    }
    Ok(())
}

/// Default tags for the transform of a profile with the given tags.
/// Conservative where smoothness cannot be known; callers with more
/// knowledge re-tag via `with_decay`.
fn default_output_tags(core: &ProfileCore, nu: f64) -> (Decay, f64) {
    match core.decay {
        // Smooth-and-exponentially-small profiles have superpolynomially
        // decaying transforms; the rate is a hint, not a bound.
        Decay::Exponential { .. } => (Decay::Exponential { rate: 1.0 }, 0.0),
        // Worst case (edge of support only continuous): envelope
        // s^{-(nu/2 + 3/4)}. Not re-transformable without re-tagging.
        Decay::Compact { .. } => (Decay::Power { exponent: -(0.5 * nu + 0.75) }, 0.0),
        // A power tail r^e maps to spectral behaviour s^{-(nu+1+e)} near 0;
        // for e >= -(nu+1) that is a genuine divergence at s = 0. At
        // infinity a power-singular origin (order sigma) gives
        // s^{-(nu+1+sigma)}.
        Decay::Power { exponent } => {
            let origin_behaviour = -(nu + 1.0 + exponent);
            let sing = if origin_behaviour > 0.0 { 0.0 } else { origin_behaviour };
            (
                Decay::Power { exponent: -(nu + 1.0 + core.singularity_order) },
                sing,
            )
        }
    }
}

/// The shared forward/inverse computation. Integrates
/// `input(u) B_nu(2 sqrt(u x)) u^nu` over `(0, inf)` for each requested `x`,
/// choosing the evaluation path from the input's metadata:
///
/// * closed-form input with exponential/compact decay: adaptive dyadic march;
/// * closed-form input with a power tail (or any input at large `x` whose
///   tail oscillates): `u = w^2` substitution + half-period segments with
///   epsilon acceleration;
/// * quadrature-backed input with exponential decay: the frozen spectral
///   ladder (cheap, memo-friendly; see `ladder`).
fn transform_core(
    input: &Arc<ProfileCore>,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
    label: String,
    out_decay: Decay,
    out_sing: f64,
) -> ProfileCore {
    let kernel = Arc::clone(params.kernel());
    let nu = params.transform_order();
    let input = Arc::clone(input);
    let cfg = cfg.clone();
    let eval = move |x: f64| -> f64 {
        if x < 0.0 {
            return f64::NAN;
        }
        transform_point(&input, &kernel, nu, &cfg, x)
    };
    ProfileCore::new(label, out_decay, out_sing, true, Arc::new(eval))
}

fn transform_point(
    input: &Arc<ProfileCore>,
    kernel: &Arc<NormalizedBessel>,
    nu: f64,
    cfg: &QuadratureConfig,
    x: f64,
) -> f64 {
    let sigma = input.singularity_order;
    if input.numeric && matches!(input.decay, Decay::Exponential { .. }) {
        return crate::ladder::ladder_transform(input, kernel, nu, x, 0.03 * cfg.abs_tol);
    }
    let use_oscillatory = x > OSC_SWITCH
        && matches!(input.decay, Decay::Power { .. } | Decay::Compact { .. });
    let result = if use_oscillatory {
        // u = w^2: phase becomes linear (2 w sqrt(x)), half period known.
        let half_period = std::f64::consts::FRAC_PI_2 / x.sqrt();
        let quad_cfg = cfg
            .clone()
            .with_tail(TailHint::Oscillatory { half_period })
            .with_singularity(2.0 * sigma + 2.0 * nu + 1.0);
        let input = Arc::clone(input);
        let kernel = Arc::clone(kernel);
        integrate_semi_infinite(
            move |w: f64| {
                let u = w * w;
                2.0 * input.eval(u)
                    * kernel.eval(2.0 * w * x.sqrt())
                    * w.powf(2.0 * nu + 1.0)
            },
            &quad_cfg,
        )
    } else {
        if x <= OSC_SWITCH {
            // Near s = 0 the transform needs absolute integrability.
            if let Decay::Power { exponent } = input.decay {
                if exponent + nu >= -1.0 {
                    return f64::NAN;
                }
            }
        }
        let hint = match input.decay {
            Decay::Power { exponent } => TailHint::Power(-(exponent + nu)),
            _ => TailHint::Exponential,
        };
        let quad_cfg = cfg
            .clone()
            .with_tail(hint)
            .with_singularity(sigma + nu);
        let input = Arc::clone(input);
        let kernel = Arc::clone(kernel);
        integrate_semi_infinite(
            move |u: f64| {
                input.eval(u) * kernel.eval(2.0 * (u * x).sqrt()) * u.powf(nu)
            },
            &quad_cfg,
        )
    };
    result.unwrap_or(f64::NAN)
}

/// Forward transform of a radial profile. Results are cached per
/// (profile, tolerance) on the parameter object, so repeated applications
/// of operators to the same input share one spectrum.
pub fn hankel_apply(
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<SpectralProfile> {
    check_transformable(f.core(), params.transform_order())?;
    let key = (f.profile_id(), cfg.abs_tol.to_bits());
    if let Some(hit) = params.inner.forward_cache.get(&key) {
        return Ok(hit.clone());
    }
    let (decay, sing) = default_output_tags(f.core(), params.transform_order());
    let out = SpectralProfile::from_core(transform_core(
        f.core(),
        params,
        cfg,
        format!("T[{}]", f.label()),
        decay,
        sing,
    ));
    params.inner.forward_cache.insert(key, out.clone());
    Ok(out)
}

/// Inverse transform (the same integral: the transform is an involution).
pub fn hankel_inverse(
    fhat: &SpectralProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    check_transformable(fhat.core(), params.transform_order())?;
    let key = (fhat.profile_id(), cfg.abs_tol.to_bits());
    if let Some(hit) = params.inner.inverse_cache.get(&key) {
        return Ok(hit.clone());
    }
    let (decay, sing) = default_output_tags(fhat.core(), params.transform_order());
    let out = RadialProfile::from_core(transform_core(
        fhat.core(),
        params,
        cfg,
        format!("T^-1[{}]", fhat.label()),
        decay,
        sing,
    ));
    params.inner.inverse_cache.insert(key, out.clone());
    Ok(out)
}

/// Apply a spectral multiplier: `T^{-1}( m * T f )`. Output decay tags come
/// from the multiplier's declared origin behaviour: a spectral singularity
/// `s^{-a}` or a non-smooth power `s^k` at 0 imprints the physical tail
/// `r^{-(nu+1-a)}` resp. `r^{-(nu+1+k)}`; analytic bounded multipliers
/// preserve the input's decay class.
pub fn multiplier_apply(
    f: &RadialProfile,
    m: &SpectralMultiplier,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    let fhat = hankel_apply(f, params, cfg)?;
    apply_to_spectrum(&fhat, m, f.label(), f.decay(), params, cfg)
}

/// Apply a multiplier to an already-computed spectrum. This is the second
/// half of `multiplier_apply`; compositions enter here directly when they
/// know the spectrum's true decay better than the conservative default
/// output tags (re-tagging it with `with_decay` first).
pub fn multiplier_apply_to_spectrum(
    fhat: &SpectralProfile,
    m: &SpectralMultiplier,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    // Without the physical-side profile the analytic-multiplier fallback
    // class comes from the spectrum: an exponentially damped spectrum maps
    // to a smooth output (exponential class); anything else keeps the
    // conservative power tag derived from the product's origin behaviour.
    let fallback = match fhat.decay() {
        Decay::Exponential { .. } => Decay::Exponential { rate: 1.0 },
        _ => Decay::Power {
            exponent: -(params.transform_order() + 1.0 + fhat.singularity_order().max(0.0)),
        },
    };
    apply_to_spectrum(fhat, m, fhat.label(), fallback, params, cfg)
}

fn apply_to_spectrum(
    fhat: &SpectralProfile,
    m: &SpectralMultiplier,
    input_label: &str,
    fallback_decay: Decay,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<RadialProfile> {
    let nu = params.transform_order();
    let product_sing = m.singularity_order + fhat.singularity_order();
    if product_sing + nu <= -1.0 {
        return Err(Error::Precondition(format!(
            "multiplier '{}' is too singular at s=0 for order {nu}",
            m.label
        )));
    }
    let product_decay = if m.damping {
        Decay::Exponential { rate: 1.0 }
    } else {
        fhat.decay()
    };
    let product = SpectralProfile::from_core(ProfileCore {
        id: NEXT_PROFILE_ID.fetch_add(1, Ordering::Relaxed),
        label: format!("{} * {}", m.label, fhat.label()),
        decay: product_decay,
        singularity_order: product_sing,
        numeric: true,
        tail_series: None,
        eval_fn: {
            let mf = Arc::clone(&m.func);
            let fhat = fhat.clone();
            Arc::new(move |s: f64| mf(s) * fhat.eval(s))
        },
        cache: Arc::new(DashMap::new()),
    });
    let out_decay = if m.singularity_order < 0.0 {
        Decay::Power { exponent: -(nu + 1.0 + m.singularity_order) }
    } else if let Some(k) = m.kink_order {
        Decay::Power { exponent: -(nu + 1.0 + k) }
    } else {
        match fallback_decay {
            Decay::Power { exponent } => Decay::Power { exponent },
            _ => Decay::Exponential { rate: 1.0 },
        }
    };
    let core = transform_core(
        product.core(),
        params,
        cfg,
        format!("{}[{}]", m.label, input_label),
        out_decay,
        0.0,
    );
    Ok(RadialProfile::from_core(core))
}

/// Crate-internal: evaluate `T^{-1}[ d * T f ](x)` through the spectral
/// ladder, where `d` is an exponentially damping spectral factor. The
/// subordination formulas integrate such inverses over a continuously
/// varying damping parameter, where building a cached profile per parameter
/// value would be pure overhead.
pub(crate) fn damped_inverse_point(
    fhat: &SpectralProfile,
    label: &str,
    d: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    params: &FrameworkParams,
    x: f64,
) -> f64 {
    let fh = fhat.clone();
    let core = Arc::new(ProfileCore::new(
        format!("{label} * {}", fh.label()),
        Decay::Exponential { rate: 1.0 },
        fh.singularity_order(),
        true,
        Arc::new(move |s: f64| d(s) * fh.eval(s)),
    ));
    crate::ladder::ladder_transform(
        &core,
        params.kernel(),
        params.transform_order(),
        x,
        0.0,
    )
}

/// Total mass of a profile against the radial weight:
/// `int_0^inf f(u) u^nu du`. Uses the attached far-field series, when
/// present, to complete the tail analytically.
pub fn radial_mass(
    f: &RadialProfile,
    params: &FrameworkParams,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let nu = params.transform_order();
    let core = f.core();
    // Quadrature-backed profiles carry evaluation noise at ~1e-11 of their
    // own local scale (which can dwarf the mass for concentrated kernels);
    // chasing a mass tolerance below that floor fails spuriously in the
    // integrator's error budget.
    let cfg = if core.numeric {
        cfg.clone()
            .with_tolerance(cfg.abs_tol.max(1e-9), cfg.rel_tol.max(1e-8))
    } else {
        cfg.clone()
    };
    let cfg = &cfg;
    if core.singularity_order + nu <= -1.0 {
        return Err(Error::Precondition(format!(
            "profile '{}' is not integrable at the origin against u^{nu}",
            core.label
        )));
    }
    if let Some(tail) = &core.tail_series {
        // Integrate directly up to a dyadic boundary at/above valid_from,
        // then complete with the series. The dyadic boundary keeps the
        // truncation jump on a segment edge.
        let split = (2.0f64).powi(tail.valid_from.log2().ceil() as i32);
        let head_cfg = cfg
            .clone()
            .with_tail(TailHint::Exponential)
            .with_singularity(core.singularity_order + nu);
        let g = f.clone();
        let head = integrate_semi_infinite(
            move |u: f64| {
                if u <= split {
                    g.eval(u) * u.powf(nu)
                } else {
                    0.0
                }
            },
            &head_cfg,
        )?;
        return Ok(head + tail.weighted_tail_mass(split, nu)?);
    }
    let hint = match core.decay {
        Decay::Power { exponent } => {
            if exponent + nu >= -1.0 {
                return Err(Error::Precondition(format!(
                    "profile '{}' has no finite mass at order {nu}",
                    core.label
                )));
            }
            TailHint::Power(-(exponent + nu))
        }
        _ => TailHint::Exponential,
    };
    let quad_cfg = cfg
        .clone()
        .with_tail(hint)
        .with_singularity(core.singularity_order + nu);
    let g = f.clone();
    integrate_semi_infinite(move |u: f64| g.eval(u) * u.powf(nu), &quad_cfg)
}

/// Geometric grid with `points` nodes from `lo` to `hi` inclusive.
pub fn geometric_grid(points: usize, lo: f64, hi: f64) -> Vec<f64> {
    assert!(points >= 2 && lo > 0.0 && hi > lo);
    let ratio = (hi / lo).ln() / (points - 1) as f64;
    (0..points)
        .map(|i| lo * (ratio * i as f64).exp())
        .collect()
}

/// The default evaluation grid used by the command-line tools and the
/// verification suite: 200 geometric points on [1e-3, 20].
pub fn default_grid() -> Vec<f64> {
    geometric_grid(200, 1e-3, 20.0)
}
