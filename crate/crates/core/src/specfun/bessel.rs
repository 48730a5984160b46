//! The normalized oscillatory kernel of the radial transform:
//!
//! `B_nu(x) = (x/2)^{-nu} J_nu(x)`,
//!
//! which is entire in `x^2`, equals `1/Gamma(nu+1)` at the origin, and for
//! large `x` oscillates under the envelope `(x/2)^{-nu} sqrt(2/(pi x))`.
//!
//! Evaluation strategy:
//! * power series in double-double arithmetic up to a per-order crossover
//!   (the alternating series cancels to ~e^{2x} of its peak term, which a
//!   plain f64 sum cannot survive at x ~ 30);
//! * Hankel-type asymptotic expansion (amplitude/phase form, optimally
//!   truncated) beyond the crossover.
//!
//! The crossover is calibrated at construction by matching the two branches
//! on a probe set until they agree to well below the accuracy target, so the
//! switch is seamless for every order the constructor accepts.

use crate::error::{Error, Result};
use crate::specfun::gamma::reciprocal_gamma;

// ---------------------------------------------------------------------------
// Minimal double-double arithmetic (enough for the alternating series)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

fn quick_renorm(hi: f64, lo: f64) -> Dd {
    let s = hi + lo;
    Dd { hi: s, lo: (hi - s) + lo }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: f64::mul_add(a, b, -p) }
}

fn dd_add(a: Dd, b: Dd) -> Dd {
    let s = two_sum(a.hi, b.hi);
    quick_renorm(s.hi, s.lo + a.lo + b.lo)
}

fn dd_mul(a: Dd, b: Dd) -> Dd {
    let p = two_prod(a.hi, b.hi);
    quick_renorm(p.hi, p.lo + a.hi * b.lo + a.lo * b.hi)
}

fn dd_div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi / b.hi;
    // r = a - q1 * b
    let t = dd_mul(b, Dd::from(q1));
    let r = dd_add(a, Dd { hi: -t.hi, lo: -t.lo });
    let q2 = r.to_f64() / b.hi;
    quick_renorm(q1, q2)
}

// ---------------------------------------------------------------------------
// Normalized Bessel kernel
// ---------------------------------------------------------------------------

/// Calibration agreement required between the two branches, relative to the
/// oscillation envelope.
const BRANCH_MATCH_TOL: f64 = 1e-11;

#[derive(Debug, Clone)]
pub struct NormalizedBessel {
    nu: f64,
    inv_gamma_nu1: f64,
    /// `(nu/2 + 1/4) * pi`, subtracted from x to form the asymptotic phase.
    phase_shift: f64,
    four_nu_sq: f64,
    crossover: f64,
}

impl NormalizedBessel {
    /// Construct the kernel of order `nu > -1` and calibrate the
    /// series/asymptotic crossover. Fails for orders where the asymptotic
    /// branch cannot reach the accuracy target within the series' reach
    /// (far beyond the orders that arise from desk-scale parameters).
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() || nu <= -1.0 {
            return Err(Error::Domain(format!(
                "normalized Bessel order must be > -1, got {nu}"
            )));
        }
        let mut kernel = NormalizedBessel {
            nu,
            inv_gamma_nu1: reciprocal_gamma(nu + 1.0),
            phase_shift: (0.5 * nu + 0.25) * std::f64::consts::PI,
            four_nu_sq: 4.0 * nu * nu,
            crossover: 26.0,
        };
        let probes = [0.0, 0.37, 0.81, 1.23, 1.71];
        loop {
            let ok = probes.iter().all(|&d| {
                let x = kernel.crossover + d;
                let s = kernel.series(x);
                let a = kernel.asymptotic(x);
                (s - a).abs() <= BRANCH_MATCH_TOL * kernel.envelope(x).max(s.abs())
            });
            if ok {
                break;
            }
            kernel.crossover += 2.0;
            if kernel.crossover > 60.0 {
                return Err(Error::Domain(format!(
                    "cannot calibrate branch crossover for order {nu}"
                )));
            }
        }
        Ok(kernel)
    }

    pub fn order(&self) -> f64 {
        self.nu
    }

    /// Where evaluation switches from the power series to the asymptotic
    /// expansion.
    pub fn series_asymptotic_crossover(&self) -> f64 {
        self.crossover
    }

    /// Indicative amplitude scale of the kernel at `x`; useful for
    /// envelope-relative accuracy statements. Exact value at 0.
    pub fn envelope(&self, x: f64) -> f64 {
        if x <= 2.0 {
            self.inv_gamma_nu1.abs().max(1e-300)
        } else {
            (0.5 * x).powf(-self.nu)
                * (2.0 / (std::f64::consts::PI * x)).sqrt()
        }
    }

    /// Evaluate at `x >= 0`.
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0 && x.is_finite());
        if x < self.crossover {
            self.series(x)
        } else {
            self.asymptotic(x)
        }
    }

    /// Alternating power series in double-double arithmetic:
    /// sum_m (-x^2/4)^m / (m! Gamma(nu+m+1)).
    fn series(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.inv_gamma_nu1;
        }
        // q = -x^2/4, exactly split.
        let xx = two_prod(x, x);
        let q = Dd { hi: -0.25 * xx.hi, lo: -0.25 * xx.lo };
        let mut term = Dd::from(self.inv_gamma_nu1);
        let mut sum = term;
        let mut peak = term.hi.abs();
        for m in 0..400u32 {
            // term *= q / ((m+1)(nu+m+1)); the divisor is carried in
            // double-double so non-dyadic orders lose nothing.
            let m1 = (m + 1) as f64;
            let denom = dd_mul(Dd::from(m1), two_sum(self.nu, m1));
            term = dd_div(dd_mul(term, q), denom);
            sum = dd_add(sum, term);
            let mag = term.hi.abs();
            peak = peak.max(mag);
            if mag <= 1e-24 * peak && m >= 4 {
                break;
            }
        }
        sum.to_f64()
    }

    /// Hankel asymptotic expansion, optimally truncated. With
    /// t_k = a_k(nu) / x^k (a_k the standard coefficients),
    /// J_nu(x) ~ sqrt(2/(pi x)) [ cos(w) P - sin(w) Q ],
    /// P = t_0 - t_2 + ..., Q = t_1 - t_3 + ..., w = x - (nu/2 + 1/4) pi.
    fn asymptotic(&self, x: f64) -> f64 {
        let phase = x - self.phase_shift;
        let amp = (0.5 * x).powf(-self.nu)
            * (2.0 / (std::f64::consts::PI * x)).sqrt();
        let mut p = 0.0f64;
        let mut q = 0.0f64;
        let mut t = 1.0f64;
        let mut prev_mag = f64::INFINITY;
        for k in 0..60u32 {
            let mag = t.abs();
            if mag >= prev_mag || mag < 1e-20 {
                break; // optimal truncation: stop before terms grow
            }
            prev_mag = mag;
            let signed = if (k / 2) % 2 == 0 { t } else { -t };
            if k % 2 == 0 {
                p += signed;
            } else {
                q += signed;
            }
            let k2 = (2 * k + 1) as f64;
            t *= (self.four_nu_sq - k2 * k2) / (8.0 * x * (k + 1) as f64);
        }
        amp * (phase.cos() * p - phase.sin() * q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (order, x, reference) — high-precision external values.
    const REFERENCE: &[(f64, f64, f64)] = &[
        (0.0, 0.5, 0.938_469_807_240_812_9),
        (0.0, 5.0, -0.177_596_771_314_338_3),
        (0.0, 25.0, 0.096_266_783_275_958_12),
        (0.0, 31.0, 0.051_208_145_304_542_25),
        (0.0, 40.0, 0.007_366_890_584_237_29),
        (0.0, 100.0, 0.019_985_850_304_223_122),
        (0.0, 1000.0, 0.024_786_686_152_420_175),
        (0.5, 0.5, 1.081_947_579_869_056_2),
        (0.5, 5.0, -0.216_406_034_870_412_14),
        (0.5, 25.0, -0.005_973_718_301_558_342),
        (0.5, 31.0, -0.014_706_698_764_673_297),
        (0.5, 40.0, 0.021_019_254_185_339_815),
        (0.5, 100.0, -0.005_713_724_403_612_149),
        (0.5, 1000.0, 0.000_933_033_647_233_821_2),
        (1.0, 0.5, 0.969_073_830_699_495_5),
        (1.0, 5.0, -0.131_031_655_036_586_09),
        (1.0, 25.0, -0.010_028_019_966_423_192),
        (1.0, 31.0, -0.008_582_213_978_471_884),
        (1.0, 40.0, 0.006_301_915_901_879_25),
        (1.0, 100.0, -0.001_542_907_040_282_243_2),
        (1.0, 1000.0, 9.456_623_814_179_048e-6),
        (2.0, 0.5, 0.489_664_375_338_922_26),
        (2.0, 5.0, 0.007_450_418_604_440_354),
        (2.0, 25.0, -0.000_680_286_740_751_240_4),
        (2.0, 31.0, -0.000_248_867_260_283_097_33),
        (2.0, 40.0, -2.662_436_705_895_099e-6),
        (2.0, 100.0, -8.611_502_937_802_146e-6),
        (2.0, 1000.0, -9.910_891_811_442_398e-8),
        (3.0, 0.5, 0.164_078_719_653_583_62),
        (3.0, 5.0, 0.023_349_198_759_274_688),
        (3.0, 25.0, 5.547_165_750_349_255_4e-5),
        (3.0, 31.0, 3.365_027_870_096_020_6e-5),
        (3.0, 40.0, -1.576_810_193_822_760_1e-5),
        (3.0, 100.0, 6.102_736_137_626_555e-7),
        (3.0, 1000.0, -3.861_936_660_163_158_5e-11),
        (5.0, 0.5, 0.008_246_914_295_150_053),
        (5.0, 5.0, 0.002_674_079_192_270_541_6),
        (5.0, 25.0, -2.162_949_993_215_524_7e-7),
        (5.0, 31.0, -1.158_212_029_372_244_2e-7),
        (5.0, 40.0, 3.830_420_811_784_931e-8),
        (5.0, 100.0, -2.374_263_582_864_445_6e-10),
        (5.0, 1000.0, 1.608_130_222_474_619_4e-16),
    ];

    #[test]
    fn matches_reference_values_to_envelope_relative_accuracy() {
        let mut by_order: Vec<(f64, NormalizedBessel)> = Vec::new();
        for &(nu, x, expected) in REFERENCE {
            if by_order.last().map(|(o, _)| *o != nu).unwrap_or(true) {
                by_order.push((nu, NormalizedBessel::new(nu).unwrap()));
            }
            let kernel = &by_order.last().unwrap().1;
            let got = kernel.eval(x);
            let scale = expected.abs().max(kernel.envelope(x));
            assert!(
                (got - expected).abs() <= 5e-11 * scale,
                "order {nu}, x {x}: got {got:e}, want {expected:e}"
            );
        }
    }

    #[test]
    fn value_at_origin_is_reciprocal_gamma() {
        for nu in [0.0, 0.5, 1.0, 2.5, 7.0] {
            let kernel = NormalizedBessel::new(nu).unwrap();
            let expected = reciprocal_gamma(nu + 1.0);
            assert!((kernel.eval(0.0) - expected).abs() <= 1e-14 * expected.abs());
        }
    }

    #[test]
    fn branches_join_continuously() {
        // Branch mismatch at the switch point itself, relative to the
        // oscillation envelope.
        for nu in [0.0, 0.5, 2.0, 5.0] {
            let kernel = NormalizedBessel::new(nu).unwrap();
            let xc = kernel.series_asymptotic_crossover();
            let jump = (kernel.series(xc) - kernel.asymptotic(xc)).abs();
            assert!(
                jump <= 1e-9 * kernel.envelope(xc),
                "order {nu}: branch mismatch {jump:e} at crossover {xc}"
            );
        }
    }

    #[test]
    fn first_zero_of_order_zero_kernel() {
        let kernel = NormalizedBessel::new(0.0).unwrap();
        assert!(kernel.eval(2.404_825_557_695_772_8).abs() < 1e-12);
        // sign change around it
        assert!(kernel.eval(2.39) > 0.0 && kernel.eval(2.42) < 0.0);
    }

    #[test]
    fn rejects_orders_at_or_below_minus_one() {
        assert!(NormalizedBessel::new(-1.0).is_err());
        assert!(NormalizedBessel::new(-1.5).is_err());
        assert!(NormalizedBessel::new(f64::NAN).is_err());
    }

    #[test]
    fn non_dyadic_order_consistency_across_crossover() {
        // Orders that are not exactly representable stress the double-double
        // divisor handling; compare series vs asymptotic deep in the overlap.
        for nu in [1.0 / 3.0, 2.7182818, 4.1] {
            let kernel = NormalizedBessel::new(nu).unwrap();
            for x in [27.0, 30.0, 33.0] {
                let s = kernel.series(x);
                let a = kernel.asymptotic(x);
                assert!(
                    (s - a).abs() <= 1e-11 * kernel.envelope(x).max(s.abs()),
                    "order {nu}, x {x}: series {s:e} vs asymptotic {a:e}"
                );
            }
        }
    }
}
