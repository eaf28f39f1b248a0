use crate::error::{Error, Result};
use crate::quad::{integrate_to_infinity, Tolerance};

fn check_quantum_numbers(n: u32, l: u32) -> Result<()> {
    if n == 0 || l >= n {
        return Err(Error::domain("radial", format!("invalid (n, l) = ({n}, {l})")));
    }
    Ok(())
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Generalized Laguerre polynomial `L_k^{(α)}(x)` by upward recursion.
fn laguerre(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + alpha - x;
    for i in 1..k {
        let i = i as f64;
        let next = ((2.0 * i + 1.0 + alpha - x) * cur - (i + alpha) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Normalized hydrogen radial function `R_{nl}(r)` (Z = 1, atomic units).
pub fn radial_wavefunction(n: u32, l: u32, r: f64) -> Result<f64> {
    check_quantum_numbers(n, l)?;
    if !(r >= 0.0) {
        return Err(Error::domain("radial_wavefunction", format!("r must be ≥ 0, got {r}")));
    }
    Ok(radial_unchecked(n, l, r))
}

pub(crate) fn radial_unchecked(n: u32, l: u32, r: f64) -> f64 {
    let nf = n as f64;
    let rho = 2.0 * r / nf;
    let ln_norm =
        0.5 * (3.0 * (2.0 / nf).ln() + ln_factorial(n - l - 1) - (2.0 * nf).ln() - ln_factorial(n + l));
    ln_norm.exp() * (-r / nf).exp() * rho.powi(l as i32) * laguerre(n - l - 1, (2 * l + 1) as f64, rho)
}

/// `∫₀^∞ R_{n₁l₁}(r) r^k R_{n₂l₂}(r) r² dr`.
pub fn radial_integral(n1: u32, l1: u32, n2: u32, l2: u32, k: u32) -> Result<f64> {
    check_quantum_numbers(n1, l1)?;
    check_quantum_numbers(n2, l2)?;
    let decay = 1.0 / n1 as f64 + 1.0 / n2 as f64;
    let scale = (k + 2 + n1 + n2) as f64 / decay;
    let integrand = |r: f64| radial_unchecked(n1, l1, r) * radial_unchecked(n2, l2, r) * r.powi(k as i32 + 2);
    // magnitude scale for the absolute tolerance
    let abs_scale = integrate_to_infinity(|r: f64| integrand(r).abs(), 0.0, scale, Tolerance::new(0.0, 1e-6))?.value;
    let est = integrate_to_infinity(integrand, 0.0, scale, Tolerance::new(1e-13 * abs_scale, 1e-12))?;
    Ok(est.value)
}
