//! Principal-value frequency integrals by symmetric excision and Richardson
//! extrapolation in the excision half-width.

use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Excision and cutoff settings for one principal-value integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvSetup {
    /// Pole location `ω₀ = −ℰ_q`, present only for negative gaps.
    pub pole: Option<f64>,
    /// Largest excision half-width; later widths halve it.
    pub excision: f64,
    /// Upper cutoff `Λ`.
    pub cutoff: f64,
    /// Number of Richardson levels.
    pub order: usize,
}

impl PvSetup {
    /// Default settings for `∫_L^Λ dω …/(ℰ_q + ω)` at distance `z`.
    pub fn for_gap(gap: f64, lower: f64, z: f64) -> Result<Self> {
        if !(lower >= 0.0) || !lower.is_finite() {
            return Err(Error::domain("pv_omega_integral", format!("lower limit must be ≥ 0, got {lower}")));
        }
        if !(z > 0.0) {
            return Err(Error::domain("pv_omega_integral", format!("distance must be > 0, got {z}")));
        }
        if gap == 0.0 || !gap.is_finite() {
            return Err(Error::Degenerate { gap, threshold: 0.0 });
        }
        let cutoff = 100.0 * gap.abs().max(1.0 / z).max(lower);
        let pole = -gap;
        if (pole - lower).abs() <= 1e-12 * gap.abs() {
            return Err(Error::domain(
                "pv_omega_integral",
                format!("pole {pole:e} coincides with the lower limit {lower:e}"),
            ));
        }
        let inside = pole > lower && pole < cutoff;
        let mut excision = 0.05 * gap.abs();
        if inside {
            excision = excision.min(0.25 * (pole - lower).min(cutoff - pole));
        }
        let setup = PvSetup {
            pole: inside.then_some(pole),
            excision,
            cutoff,
            order: 5,
        };
        setup.validate(lower, gap, z)?;
        Ok(setup)
    }

    fn validate(&self, lower: f64, gap: f64, z: f64) -> Result<()> {
        if let Some(p) = self.pole {
            if self.excision >= (p - lower).abs() {
                return Err(Error::domain("pv setup", "excision overlaps the lower limit"));
            }
        }
        if self.cutoff <= 10.0 * gap.abs().max(1.0 / z) {
            return Err(Error::domain("pv setup", "cutoff too small"));
        }
        Ok(())
    }
}

/// Result of a principal-value evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PvEstimate {
    pub value: f64,
    /// Difference between the last two Richardson diagonals.
    pub error: f64,
}

fn tol() -> Tolerance {
    Tolerance {
        abs: 1e-14,
        rel: 1e-12,
        max_intervals: 20_000,
    }
}

/// `PV ∫_a^b g(ω)/(ω − ω₀) dω` by excising `(ω₀−δ, ω₀+δ)` for
/// `δ = δ₀, δ₀/2, …` and extrapolating away the odd powers of δ.
pub fn principal_value<G: Fn(f64) -> f64>(
    g: G,
    pole: f64,
    a: f64,
    b: f64,
    excision: f64,
    order: usize,
) -> Result<PvEstimate> {
    let f = |w: f64| g(w) / (w - pole);
    if pole <= a || pole >= b {
        let v = integrate(f, a, b, tol())?;
        return Ok(PvEstimate {
            value: v.value,
            error: v.error,
        });
    }
    if excision <= 0.0 || excision >= (pole - a).min(b - pole) {
        return Err(Error::domain("principal_value", "excision width must fit inside the interval"));
    }
    let levels = order.max(1) + 1;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for k in 0..levels {
        let d = excision / f64::powi(2.0, k as i32);
        let left = integrate(f, a, pole - d, tol())?.value;
        let right = integrate(f, pole + d, b, tol())?.value;
        let mut row = vec![left + right];
        for j in 1..=k {
            let factor = f64::powi(2.0, 2 * j as i32 - 1);
            let prev = &table[k - 1];
            row.push((factor * row[j - 1] - prev[j - 1]) / (factor - 1.0));
        }
        table.push(row);
    }
    let last = &table[levels - 1];
    let prev = &table[levels - 2];
    let value = last[levels - 1];
    Ok(PvEstimate {
        value,
        error: (value - prev[levels - 2]).abs(),
    })
}

/// Closed form of `PV ∫_L^Λ ω^p/(ℰ + ω) dω` by polynomial division.
pub fn pv_omega_analytic(gap: f64, lower: f64, cutoff: f64, power: u32) -> f64 {
    antiderivative(gap, cutoff, power) - antiderivative(gap, lower, power)
}

fn antiderivative(gap: f64, w: f64, power: u32) -> f64 {
    let mut sum = 0.0;
    for j in 0..power {
        let e = power - j;
        sum += (-gap).powi(j as i32) * w.powi(e as i32) / e as f64;
    }
    sum + (-gap).powi(power as i32) * (gap + w).abs().ln()
}

/// `PV ∫_L^∞ dω ω^p/(ℰ_q + ω)` with the cutoff-dependent part removed:
/// the numerical integral up to `Λ` minus the analytic antiderivative at `Λ`.
/// For `p = 0` this is `−ln|ℰ_q + L|`.
pub fn pv_omega_integral(gap: f64, lower: f64, z: f64, power: u32) -> Result<PvEstimate> {
    if power > 4 {
        return Err(Error::domain("pv_omega_integral", format!("numerator power {power} > 4")));
    }
    let setup = PvSetup::for_gap(gap, lower, z)?;
    let g = |w: f64| w.powi(power as i32);
    let pole = -gap;
    let est = principal_value(g, pole, lower, setup.cutoff, setup.excision, setup.order)?;
    Ok(PvEstimate {
        value: est.value - antiderivative(gap, setup.cutoff, power),
        error: est.error,
    })
}
