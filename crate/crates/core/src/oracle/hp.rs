//! Si, Ci, T and U from their power series in big-integer fixed point.
//!
//! Every quantity is an integer scaled by `2^p`, with `p` grown with the
//! argument so that the `e^x`-sized intermediate terms of the alternating
//! series still leave well over 64 significant bits at the end.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest argument accepted.
pub const MAX_ARG: f64 = 400.0;

const EULER_GAMMA_DIGITS: &str =
    "5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";

/// Right shift rounding toward zero, so that series terms of either sign
/// reach exactly zero.
fn shr_trunc(v: BigInt, bits: u64) -> BigInt {
    if v.is_negative() {
        -((-v) >> bits)
    } else {
        v >> bits
    }
}

/// Fixed-point context with `bits` fractional bits.
#[derive(Debug, Clone, Copy)]
struct Fixed {
    bits: u32,
}

impl Fixed {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn from_f64(&self, x: f64) -> BigInt {
        let (mant, exp, sign) = num_traits::float::FloatCore::integer_decode(x);
        let m = BigInt::from(mant) * BigInt::from(sign);
        let shift = self.bits as i64 + exp as i64;
        if shift >= 0 {
            m << shift as u64
        } else {
            shr_trunc(m, (-shift) as u64)
        }
    }

    fn to_f64(&self, v: &BigInt) -> f64 {
        let keep = 80u32;
        if self.bits > keep {
            let shifted: BigInt = v >> (self.bits - keep) as u64;
            shifted.to_f64().unwrap_or(f64::NAN) * f64::powi(2.0, -(keep as i32))
        } else {
            v.to_f64().unwrap_or(f64::NAN) * f64::powi(2.0, -(self.bits as i32))
        }
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        shr_trunc(a * b, self.bits as u64)
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits as u64) / b
    }

    /// `atanh(1/n)·2^p` for integer `n ≥ 2`.
    fn atanh_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut power = self.one() / BigInt::from(n);
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        while !power.is_zero() {
            sum += &power / BigInt::from(k);
            power /= &n2;
            k += 2;
        }
        sum
    }

    /// `atan(1/n)·2^p`.
    fn atan_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut power = self.one() / BigInt::from(n);
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        let mut positive = true;
        while !power.is_zero() {
            let term = &power / BigInt::from(k);
            if positive {
                sum += term;
            } else {
                sum -= term;
            }
            positive = !positive;
            power /= &n2;
            k += 2;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        self.atan_inv(5) * 16 - self.atan_inv(239) * 4
    }

    fn ln2(&self) -> BigInt {
        self.atanh_inv(3) * 2
    }

    /// `atanh(u)` for a fixed-point `|u| < 1`.
    fn atanh(&self, u: &BigInt) -> BigInt {
        let u2 = self.mul(u, u);
        let mut power = u.clone();
        let mut sum = BigInt::zero();
        let mut k = 1u64;
        while !power.is_zero() {
            sum += &power / BigInt::from(k);
            power = self.mul(&power, &u2);
            k += 2;
        }
        sum
    }

    /// Natural log of a positive f64, via `x = m·2^e` with `m ∈ [1/2, 1)`.
    fn ln(&self, x: f64) -> BigInt {
        let (mant, exp, _) = num_traits::float::FloatCore::integer_decode(x);
        // x = mant·2^exp with mant < 2^53; renormalise to m ∈ [1/2, 1).
        let bits = 64 - mant.leading_zeros() as i64;
        let e = exp as i64 + bits;
        let m = {
            let raw = BigInt::from(mant);
            let shift = self.bits as i64 - bits;
            if shift >= 0 {
                raw << shift as u64
            } else {
                raw >> (-shift) as u64
            }
        };
        let one = self.one();
        let u = self.div(&(&m - &one), &(&m + &one));
        self.atanh(&u) * 2 + self.ln2() * BigInt::from(e)
    }

    fn gamma(&self) -> BigInt {
        let digits: BigInt = EULER_GAMMA_DIGITS.parse().expect("valid digit string");
        let ten = BigInt::from(10u32).pow(EULER_GAMMA_DIGITS.len() as u32);
        (digits << self.bits as u64) / ten
    }
}

/// High-precision values at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HpValues {
    pub si: f64,
    pub ci: f64,
    pub t: f64,
    pub u: f64,
}

/// `Si(x)`, `Ci(x)`, `T(x)`, `U(x)` for `0 < x ≤ MAX_ARG`.
pub fn evaluate(x: f64) -> Result<HpValues> {
    if !(x > 0.0) || x > MAX_ARG {
        return Err(Error::domain("hp", format!("argument must lie in (0, {MAX_ARG}], got {x}")));
    }
    // e^x-sized terms need ~1.45·x extra bits; small x need bits for ln x.
    let guard = (1.45 * x).ceil() as u32;
    let fx = Fixed { bits: 192 + guard };
    let xv = fx.from_f64(x);

    let mut term = fx.one(); // x^n / n!
    let mut sin = BigInt::zero();
    let mut cos = fx.one();
    let mut si = BigInt::zero();
    let mut ci_sum = BigInt::zero();
    let mut n = 1u64;
    loop {
        term = fx.mul(&term, &xv) / BigInt::from(n);
        if term.is_zero() && n as f64 > x {
            break;
        }
        let k = n / 2;
        let negative = k % 2 == 1;
        let by_n = &term / BigInt::from(n);
        let (trig, integral) = if n % 2 == 1 { (&mut sin, &mut si) } else { (&mut cos, &mut ci_sum) };
        if negative {
            *trig -= &term;
            *integral -= by_n;
        } else {
            *trig += &term;
            *integral += by_n;
        }
        n += 1;
        if n > 100_000 {
            return Err(Error::Convergence {
                what: "fixed-point series",
                iterations: n as usize,
                estimate: fx.to_f64(&term.abs()),
            });
        }
    }
    let ci = fx.gamma() + fx.ln(x) + ci_sum;
    let half_pi = fx.pi() >> 1u64;
    let si_shift = &si - &half_pi;
    let t = fx.mul(&sin, &ci) - fx.mul(&cos, &si_shift);
    let u = fx.mul(&cos, &ci) + fx.mul(&sin, &si_shift);
    Ok(HpValues {
        si: fx.to_f64(&si),
        ci: fx.to_f64(&ci),
        t: fx.to_f64(&t),
        u: fx.to_f64(&u),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{cosine_integral, sine_integral, t_and_u, Chi};

    #[test]
    fn constants() {
        let fx = Fixed { bits: 200 };
        assert!((fx.to_f64(&fx.pi()) - std::f64::consts::PI).abs() < 1e-16);
        assert!((fx.to_f64(&fx.ln2()) - std::f64::consts::LN_2).abs() < 1e-16);
        assert!((fx.to_f64(&fx.ln(10.0)) - std::f64::consts::LN_10).abs() < 1e-15);
        assert!((fx.to_f64(&fx.ln(1e-3)) + 3.0 * std::f64::consts::LN_10).abs() < 1e-14);
    }

    #[test]
    fn reference_values() {
        let v = evaluate(1.0).unwrap();
        assert!((v.si - 0.946_083_070_367_183_0).abs() < 1e-15);
        assert!((v.ci - 0.337_403_922_900_968_1).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_double_precision_kernels() {
        let mut x: f64 = 1e-3;
        while x < 300.0 {
            let hp = evaluate(x).unwrap();
            let (t, u) = t_and_u(Chi::new(x).unwrap());
            assert!((hp.t - t).abs() < 1e-14 * t.abs().max(1e-3), "T at {x}: {} vs {t}", hp.t);
            assert!((hp.u - u).abs() < 1e-14 * u.abs().max(1e-3), "U at {x}: {} vs {u}", hp.u);
            assert!((hp.si - sine_integral(x).unwrap()).abs() < 1e-14);
            assert!((hp.ci - cosine_integral(x).unwrap()).abs() < 1e-14 * hp.ci.abs().max(1.0));
            x *= 1.7;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(evaluate(0.0).is_err());
        assert!(evaluate(-1.0).is_err());
        assert!(evaluate(1e4).is_err());
    }
}
