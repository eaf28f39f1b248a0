//! Sine and cosine integrals and the auxiliary functions
//!
//! ```text
//! T(χ) = sin χ Ci(χ) − cos χ Si(χ) + (π/2) cos χ
//! U(χ) = ∂T/∂χ = cos χ Ci(χ) + sin χ Si(χ) − (π/2) sin χ
//! ```
//!
//! `T` and `−U` are the classical auxiliary functions `f` and `g`
//! (`f(x) = ∫₀^∞ sin t/(t+x) dt`, `g(x) = ∫₀^∞ cos t/(t+x) dt`). For
//! `x ≤ 8` everything is assembled from the power series of Si and Ci; above
//! that `f` and `g` come straight from the continued fraction of
//! `e^{ix} E₁(ix) = g(x) − i f(x)`, so `T ≈ 1/χ` never suffers from the
//! cancellation in `sin·Ci − cos·(Si − π/2)`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

/// Series / continued-fraction switchover point.
pub const SERIES_LIMIT: f64 = 8.0;

/// Dimensionless retardation parameter `χ = 2|ℰ_q| 𝒵`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Chi(f64);

impl Chi {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Chi(value))
        } else {
            Err(Error::domain("chi", format!("χ must be finite and > 0, got {value}")))
        }
    }

    /// `χ = 2 |gap| z`; the sign of the gap is irrelevant here.
    pub fn from_gap(gap: f64, z: f64) -> Result<Self> {
        if gap == 0.0 {
            return Err(Error::Degenerate {
                gap,
                threshold: 0.0,
            });
        }
        if !(z > 0.0) {
            return Err(Error::domain("chi", format!("distance must be > 0, got {z}")));
        }
        Chi::new(2.0 * gap.abs() * z)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Si(x) and Ci(x) from their power series (accurate for `0 < x ≤ 8`).
fn si_ci_series(x: f64) -> (f64, f64) {
    let x2 = x * x;
    // Si: Σ (−1)^k x^{2k+1} / ((2k+1)(2k+1)!)
    let mut term = x; // x^{2k+1}/(2k+1)!
    let mut si = x;
    let mut k = 0usize;
    loop {
        k += 1;
        let n = (2 * k) as f64;
        term *= -x2 / (n * (n + 1.0));
        let add = term / (n + 1.0);
        si += add;
        if add.abs() < 1e-18 * si.abs() {
            break;
        }
    }
    // Ci: γ + ln x + Σ_{k≥1} (−1)^k x^{2k} / (2k (2k)!)
    let mut term = 1.0; // x^{2k}/(2k)!
    let mut sum = 0.0;
    let mut k = 0usize;
    loop {
        k += 1;
        let n = (2 * k) as f64;
        term *= -x2 / ((n - 1.0) * n);
        let add = term / n;
        sum += add;
        if add.abs() < 1e-18 * (1.0 + sum.abs()) {
            break;
        }
    }
    (si, EULER_GAMMA + x.ln() + sum)
}

/// The auxiliary functions `(f(x), g(x))` from the continued fraction for
/// `e^{z} E₁(z)` at `z = ix` (modified Lentz). Converges quickly for `x ≳ 2`.
fn aux_fg_continued_fraction(x: f64) -> (f64, f64) {
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..10_000usize {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + c.inv() * a;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-17 {
            break;
        }
    }
    // h = e^{ix} E₁(ix) = g − i f
    (-h.im, h.re)
}

/// Auxiliary `f` and `g` at any positive argument.
fn aux_fg(x: f64) -> (f64, f64) {
    if x > SERIES_LIMIT {
        aux_fg_continued_fraction(x)
    } else {
        let (si, ci) = si_ci_series(x);
        let (s, c) = x.sin_cos();
        let si_shift = si - FRAC_PI_2;
        (ci * s - si_shift * c, -ci * c - si_shift * s)
    }
}

/// Sine integral `Si(x) = ∫₀^x sin t / t dt` for `x ≥ 0`.
pub fn sine_integral(x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain("sine_integral", format!("need finite x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x <= SERIES_LIMIT {
        return Ok(si_ci_series(x).0);
    }
    let (f, g) = aux_fg_continued_fraction(x);
    let (s, c) = x.sin_cos();
    Ok(FRAC_PI_2 - f * c - g * s)
}

/// Cosine integral `Ci(x) = −∫_x^∞ cos t / t dt` for `x > 0`.
pub fn cosine_integral(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain("cosine_integral", format!("need finite x > 0, got {x}")));
    }
    if x <= SERIES_LIMIT {
        return Ok(si_ci_series(x).1);
    }
    let (f, g) = aux_fg_continued_fraction(x);
    let (s, c) = x.sin_cos();
    Ok(f * s - g * c)
}

/// `T(χ) = sin χ Ci(χ) − cos χ Si(χ) + (π/2) cos χ`.
pub fn t_function(chi: Chi) -> f64 {
    aux_fg(chi.value()).0
}

/// `U(χ) = ∂T/∂χ = cos χ Ci(χ) + sin χ Si(χ) − (π/2) sin χ`.
pub fn u_function(chi: Chi) -> f64 {
    -aux_fg(chi.value()).1
}

/// `(T(χ), U(χ))` in one evaluation.
pub fn t_and_u(chi: Chi) -> (f64, f64) {
    let (f, g) = aux_fg(chi.value());
    (f, -g)
}

/// Leading terms of the large-χ expansions, `T ~ Σ (−1)^k (2k)!/χ^{2k+1}`
/// and `U ~ −Σ (−1)^k (2k+1)!/χ^{2k+2}`, as coefficient vectors in powers of
/// `w = 1/χ` (index = power). `terms` counts the retained `k`.
pub fn asymptotic_t_u_coefficients(terms: usize) -> (Vec<f64>, Vec<f64>) {
    let len = 2 * terms + 2;
    let mut t = vec![0.0; len];
    let mut u = vec![0.0; len];
    let mut fact = 1.0; // (2k)!
    for k in 0..terms {
        if k > 0 {
            fact *= ((2 * k - 1) * (2 * k)) as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        t[2 * k + 1] = sign * fact;
        u[2 * k + 2] = -sign * fact * (2 * k + 1) as f64;
    }
    (t, u)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(x: f64) -> Chi {
        Chi::new(x).unwrap()
    }

    #[test]
    fn si_at_zero_and_infinity() {
        assert_eq!(sine_integral(0.0).unwrap(), 0.0);
        assert!((sine_integral(1e6).unwrap() - FRAC_PI_2).abs() < 2e-6);
    }

    #[test]
    fn ci_limits() {
        assert!(cosine_integral(1e6).unwrap().abs() < 2e-6);
        let x = 1e-8;
        assert!((cosine_integral(x).unwrap() - x.ln() - EULER_GAMMA).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        assert!(sine_integral(-1.0).is_err());
        assert!(sine_integral(f64::NAN).is_err());
        assert!(cosine_integral(0.0).is_err());
        assert!(Chi::new(0.0).is_err());
        assert!(Chi::from_gap(0.0, 1.0).is_err());
    }

    #[test]
    fn switchover_is_continuous() {
        let below = SERIES_LIMIT * (1.0 - 1e-15);
        let (si_s, ci_s) = si_ci_series(below);
        let (f, g) = aux_fg_continued_fraction(below);
        let (s, c) = below.sin_cos();
        assert!((si_s - (FRAC_PI_2 - f * c - g * s)).abs() < 1e-13);
        assert!((ci_s - (f * s - g * c)).abs() < 1e-13);
    }

    #[test]
    fn t_small_and_large() {
        assert!((t_function(chi(1e-10)) - FRAC_PI_2).abs() < 1e-8);
        assert!((t_function(chi(1e3)) * 1e3 - 1.0).abs() < 1e-2);
    }

    #[test]
    fn u_small_chi_is_log_dominated() {
        let x = 1e-6;
        // U ≈ ln χ + γ − πχ/2
        assert!((u_function(chi(x)) - x.ln() - EULER_GAMMA + FRAC_PI_2 * x).abs() < 1e-10);
    }

    #[test]
    fn u_is_derivative_of_t() {
        let h = 1e-5;
        for x in [0.5, 5.0, 50.0] {
            let fd = (t_function(chi(x + h)) - t_function(chi(x - h))) / (2.0 * h);
            assert!((fd - u_function(chi(x))).abs() < 1e-6, "χ = {x}");
        }
    }

    #[test]
    fn t_from_u_identity() {
        for x in [0.3, 3.0, 30.0] {
            let h = x * 1e-4;
            let du = (u_function(chi(x + h)) - u_function(chi(x - h))) / (2.0 * h);
            let rhs = 1.0 / x - du;
            assert!((t_function(chi(x)) - rhs).abs() < 1e-8 * (1.0 + rhs.abs()), "χ = {x}");
        }
    }

    #[test]
    fn asymptotic_coefficients_match_at_large_chi() {
        let (tc, uc) = asymptotic_t_u_coefficients(6);
        let x: f64 = 200.0;
        let w = 1.0 / x;
        let eval = |c: &[f64]| c.iter().rev().fold(0.0, |acc, &a| acc * w + a);
        let (t, u) = t_and_u(chi(x));
        assert!(((eval(&tc) - t) / t).abs() < 1e-14);
        assert!(((eval(&uc) - u) / u).abs() < 1e-14);
    }
}
