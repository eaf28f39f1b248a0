//! Brute-force evaluation of the distance integrals
//!
//! ```text
//! I₁ = ∫₀^∞ dL cos(2L𝒵) ln|ℰ+L|          I₂ = ∫₀^∞ dL (L/ℰ)² cos(2L𝒵) ln|ℰ+L|
//! J₁ = ∫₀^∞ dL L sin(2L𝒵) ln|ℰ+L|        J₂ = ∫₀^∞ dL (L³/ℰ²) sin(2L𝒵) ln|ℰ+L|
//! ```
//!
//! (Abel-summed) as differences between two distances. Two independent
//! routes are provided:
//!
//! - [`Route::HalfPeriods`]: integrate between consecutive zeros of the trig
//!   factor, splitting at the log singularity `L = |ℰ|`, and sum the
//!   alternating partial sums with binomial (iterated-average, Euler) weights.
//! - [`Route::Contour`]: rotate `L → it` onto the imaginary axis, where the
//!   integrand decays like `e^{−2t𝒵}`. For ℰ < 0 the log is continued from
//!   above the cut, which leaves a finite `∫₀^{|ℰ|}` correction.
//!
//! The half-period route loses digits once the answer is many orders below
//! the size of the partial sums (positive gaps at large χ); the contour route
//! has no such cancellation.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_panels, integrate_to_infinity, Tolerance};

/// Which of the four distance integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Kernel {
    /// `cos(2L𝒵)`: I₁.
    Cos,
    /// `(L/ℰ)² cos(2L𝒵)`: I₂.
    L2Cos,
    /// `L sin(2L𝒵)`: J₁.
    LSin,
    /// `(L³/ℰ²) sin(2L𝒵)`: J₂.
    L3Sin,
}

impl Kernel {
    pub const ALL: [Kernel; 4] = [Kernel::Cos, Kernel::L2Cos, Kernel::LSin, Kernel::L3Sin];

    fn power(self) -> i32 {
        match self {
            Kernel::Cos => 0,
            Kernel::LSin => 1,
            Kernel::L2Cos => 2,
            Kernel::L3Sin => 3,
        }
    }

    fn is_sine(self) -> bool {
        matches!(self, Kernel::LSin | Kernel::L3Sin)
    }

    /// Constant prefactor (`1` or `1/ℰ²`).
    fn prefactor(self, gap: f64) -> f64 {
        match self {
            Kernel::Cos | Kernel::LSin => 1.0,
            Kernel::L2Cos | Kernel::L3Sin => 1.0 / (gap * gap),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Cos => "i1",
            Kernel::L2Cos => "i2",
            Kernel::LSin => "j1",
            Kernel::L3Sin => "j2",
        }
    }
}

/// Evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Route {
    HalfPeriods,
    Contour,
}

/// One integral: kernel, gap and an overall multiplier on the log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LIntegral {
    pub kernel: Kernel,
    pub gap: f64,
    /// Multiplies `ln|ℰ+L|`.
    pub amplitude: f64,
}

/// Number of partial sums entering the binomial average.
const EULER_TERMS: usize = 64;

fn tight() -> Tolerance {
    Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 20_000,
    }
}

impl LIntegral {
    pub fn new(kernel: Kernel, gap: f64) -> Result<Self> {
        if gap == 0.0 || !gap.is_finite() {
            return Err(Error::Degenerate { gap, threshold: 0.0 });
        }
        Ok(LIntegral {
            kernel,
            gap,
            amplitude: 1.0,
        })
    }

    /// `F(𝒵)` along one route. Each value is finite on its own; callers
    /// should still compare differences, as the closed forms are defined only
    /// up to a distance-independent constant.
    pub fn value(&self, z: f64, route: Route) -> Result<f64> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(Error::domain("oscillatory_L_integral", format!("distance must be > 0, got {z}")));
        }
        let raw = match route {
            Route::Contour => self.contour(z)?,
            Route::HalfPeriods => self.half_periods(z)?,
        };
        Ok(self.amplitude * self.kernel.prefactor(self.gap) * raw)
    }

    /// `F(𝒵_a) − F(𝒵_b)`.
    pub fn difference(&self, za: f64, zb: f64, route: Route) -> Result<f64> {
        if za == zb {
            return Err(Error::domain("oscillatory_L_integral", "the two distances must differ"));
        }
        Ok(self.value(za, route)? - self.value(zb, route)?)
    }

    fn trig(&self, x: f64) -> f64 {
        if self.kernel.is_sine() {
            x.sin()
        } else {
            x.cos()
        }
    }

    fn pick(&self, v: Complex64) -> f64 {
        if self.kernel.is_sine() {
            v.im
        } else {
            v.re
        }
    }

    fn contour(&self, z: f64) -> Result<f64> {
        let k = self.kernel.power();
        let gap = self.gap;
        let i = Complex64::i();
        let ik = i.powi(k);
        // i ∫₀^∞ (it)^k e^{−2tz} log(ℰ + it) dt, principal branch.
        let rotated = |t: f64| {
            let w = Complex64::new(gap, t);
            i * ik * t.powi(k) * (-2.0 * t * z).exp() * w.ln()
        };
        let scale = (k as f64 + 1.0) / (2.0 * z);
        let t_typ = 1.0 / (2.0 * z);
        let size = (1..=k).map(f64::from).product::<f64>() * t_typ.powi(k + 1)
            * (Complex64::new(gap, t_typ).ln().norm() + PI);
        let tol = Tolerance {
            abs: 1e-13 * size,
            ..tight()
        };
        let mut total = integrate_to_infinity(rotated, 0.0, scale, tol)?.value;
        if gap < 0.0 {
            // ln|ℰ+L| = log(L − a + i0) − iπ on 0 < L < a.
            let a = -gap;
            let osc = |l: f64| Complex64::from_polar(l.powi(k), 2.0 * l * z);
            let panels = (2.0 * a * z / PI).ceil() as usize + 2;
            let tol = Tolerance {
                abs: 1e-13 * a.powi(k + 1),
                ..tight()
            };
            let fin = integrate_panels(osc, 0.0, a, panels, tol)?.value;
            total -= i * PI * fin;
        }
        Ok(self.pick(total))
    }

    fn half_periods(&self, z: f64) -> Result<f64> {
        let k = self.kernel.power();
        let gap = self.gap;
        let f = |l: f64| l.powi(k) * self.trig(2.0 * l * z) * (gap + l).abs().ln();
        let step = PI / (2.0 * z);
        let offset = if self.kernel.is_sine() { 0.0 } else { 0.5 };
        let node = |j: usize| (j as f64 + offset) * step;
        let singular = if gap < 0.0 { Some(-gap) } else { None };

        let cell = |a: f64, b: f64| -> Result<f64> {
            match singular {
                Some(s) if s > a && s < b => {
                    Ok(integrate(f, a, s, tight())?.value + integrate(f, s, b, tight())?.value)
                }
                _ => Ok(integrate(f, a, b, tight())?.value),
            }
        };

        // First zero safely past the singularity.
        let mut j0 = 2;
        if let Some(s) = singular {
            j0 = j0.max((s / step).ceil() as usize + 2);
        }
        let mut sum = cell(0.0, node(0))?;
        for j in 0..j0 {
            sum += cell(node(j), node(j + 1))?;
        }
        let mut partial = Vec::with_capacity(EULER_TERMS + 2);
        partial.push(sum);
        for j in j0..j0 + EULER_TERMS + 1 {
            sum += cell(node(j), node(j + 1))?;
            partial.push(sum);
        }
        let a = binomial_average(&partial[..=EULER_TERMS]);
        let b = binomial_average(&partial[1..]);
        let spread = partial.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if (a - b).abs() > 1e-9 * spread.max(a.abs()) {
            return Err(Error::Convergence {
                what: "Euler averaging of half-period sums",
                iterations: partial.len(),
                estimate: (a - b).abs(),
            });
        }
        Ok(0.5 * (a + b))
    }
}

/// `2^{−N} Σ C(N, j) S_j`, i.e. N rounds of averaging neighbours.
fn binomial_average(s: &[f64]) -> f64 {
    let mut row = s.to_vec();
    while row.len() > 1 {
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    row[0]
}

/// Closed-form counterpart of a kernel from the retarded module.
pub fn closed_form(kernel: Kernel, gap: f64, z: f64) -> Result<f64> {
    use crate::retarded::{i1, i2, j1, j2, SignedGap};
    let g = SignedGap::new(gap)?;
    match kernel {
        Kernel::Cos => i1(g, z),
        Kernel::L2Cos => i2(g, z),
        Kernel::LSin => j1(g, z),
        Kernel::L3Sin => j2(g, z),
    }
}

/// `I₁`/`J₁`-type difference along both routes and from the closed form.
pub fn oscillatory_l_integral(kernel: Kernel, gap: f64, za: f64, zb: f64) -> Result<f64> {
    LIntegral::new(kernel, gap)?.difference(za, zb, Route::Contour)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn routes_agree_at_moderate_chi() {
        for kernel in Kernel::ALL {
            for gap in [0.7, -0.7] {
                let li = LIntegral::new(kernel, gap).unwrap();
                for chi in [0.5, 3.0, 12.0] {
                    let z = chi / (2.0 * gap.abs());
                    let c = li.value(z, Route::Contour).unwrap();
                    let h = li.value(z, Route::HalfPeriods).unwrap();
                    assert!(rel(h, c) < 1e-7, "{kernel:?} {gap} χ={chi}: {h} vs {c}");
                }
            }
        }
    }

    #[test]
    fn contour_matches_closed_form_differences() {
        for kernel in Kernel::ALL {
            for gap in [1.61e-7_f64, -1.61e-7, 1.0, -1.0] {
                for (ca, cb) in [(0.1, 0.37), (2.0, 5.5), (40.0, 300.0)] {
                    let za = ca / (2.0 * gap.abs());
                    let zb = cb / (2.0 * gap.abs());
                    let oracle = oscillatory_l_integral(kernel, gap, za, zb).unwrap_or_else(|e| panic!("{kernel:?} {gap} {ca} {cb}: {e}"));
                    let closed = closed_form(kernel, gap, za).unwrap() - closed_form(kernel, gap, zb).unwrap();
                    assert!(rel(oracle, closed) < 1e-7, "{kernel:?} ℰ={gap} χ=({ca},{cb}): {oracle} vs {closed}");
                }
            }
        }
    }

    #[test]
    fn linear_in_log_amplitude() {
        let mut li = LIntegral::new(Kernel::LSin, -0.3).unwrap();
        let one = li.difference(2.0, 7.0, Route::Contour).unwrap();
        li.amplitude = 2.0;
        let two = li.difference(2.0, 7.0, Route::Contour).unwrap();
        assert!(rel(two, 2.0 * one) < 1e-14);
    }

    #[test]
    fn equal_distances_rejected() {
        assert!(oscillatory_l_integral(Kernel::Cos, 1.0, 2.0, 2.0).is_err());
        assert!(LIntegral::new(Kernel::Cos, 0.0).is_err());
    }

    #[test]
    fn binomial_average_of_alternating_series() {
        // 1 − 1 + 1 − … Abel/Euler sum is 1/2
        let partial: Vec<f64> = (0..30).map(|j| if j % 2 == 0 { 1.0 } else { 0.0 }).collect();
        assert!((binomial_average(&partial) - 0.5).abs() < 1e-8);
    }
}
