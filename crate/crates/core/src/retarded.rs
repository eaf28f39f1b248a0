//! Closed forms of the distance-dependent integrals `I₁, I₂, J₁, J₂` and the
//! channel sums for the energy shift `ΔE` and the parity-mixing element `ΔM`.
//!
//! Every integral splits into a smooth part built from `T`, `U` and powers
//! of `1/χ`, plus an oscillatory part present only for negative gaps:
//!
//! ```text
//! I₁/ℰ   = −T/χ                              + Θ π cos χ/χ
//! I₂/ℰ   = (χ + (2−χ²)T − 2χU)/χ³            − Θ π ∂²(cos χ/χ)
//! J₁/ℰ²  = ε(−T/χ² + U/χ)                    − Θ π (cos χ + χ sin χ)/χ²
//! J₂/ℰ²  = ε(4χ + 3(2−χ²)T + χ(χ²−6)U)/χ⁴    + Θ π ∂²((cos χ + χ sin χ)/χ²)
//! ```
//!
//! The smooth brackets cancel to relative order `χ⁻⁴` at large χ; above
//! [`HANDOFF_CHI`] they are evaluated from the asymptotic series instead.

use std::f64::consts::PI;
use std::sync::OnceLock;

use log::warn;

use crate::error::{Error, Result};
use crate::hydrogen::{MixingChannel, VirtualChannel, DEGENERATE_GAP};
use crate::specfun::{asymptotic_t_u_coefficients, t_and_u, Chi};

/// Above this χ the smooth brackets come from their large-χ series.
pub const HANDOFF_CHI: f64 = 1e4;

/// Beyond this χ results are pure asymptotics and a warning is logged.
pub const WARN_CHI: f64 = 1e8;

/// A nonzero virtual-state gap with its sign bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedGap {
    value: f64,
}

impl SignedGap {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::domain("gap", format!("gap must be finite, got {value}")));
        }
        if value.abs() < DEGENERATE_GAP {
            return Err(Error::Degenerate {
                gap: value,
                threshold: DEGENERATE_GAP,
            });
        }
        Ok(SignedGap { value })
    }

    pub fn value(self) -> f64 {
        self.value
    }

    /// `ε(ℰ) = ±1`
    pub fn epsilon(self) -> f64 {
        self.value.signum()
    }

    /// `Θ(−ℰ) ∈ {0, 1}`
    pub fn theta_neg(self) -> f64 {
        if self.value < 0.0 {
            1.0
        } else {
            0.0
        }
    }

    pub fn chi(self, z: f64) -> Result<Chi> {
        let chi = Chi::from_gap(self.value, z)?;
        if chi.value() > WARN_CHI {
            warn!("χ = {:e} is far in the asymptotic regime", chi.value());
        }
        Ok(chi)
    }
}

/// Smooth brackets, each a function of χ alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Smooth {
    /// `−T/χ`
    I1,
    /// `(χ + (2−χ²)T − 2χU)/χ³`
    I2,
    /// `−T/χ² + U/χ`
    J1,
    /// `(4χ + 3(2−χ²)T + χ(χ²−6)U)/χ⁴`
    J2,
    /// `−1/χ² + T/χ`, the `ΔE` bracket multiplying `d∥² − 2d_z²`
    EnergyPar,
    /// `2/χ³ − T/χ² + U/χ`, the `ΔM` bracket multiplying `𝒯₁`
    Mixing1,
}

const SERIES_TERMS: usize = 9;

impl Smooth {
    fn direct(self, x: f64) -> f64 {
        let (t, u) = t_and_u(Chi::new(x).expect("χ validated by caller"));
        let x2 = x * x;
        match self {
            Smooth::I1 => -t / x,
            Smooth::I2 => (x + (2.0 - x2) * t - 2.0 * x * u) / (x2 * x),
            Smooth::J1 => -t / x2 + u / x,
            Smooth::J2 => (4.0 * x + 3.0 * (2.0 - x2) * t + x * (x2 - 6.0) * u) / (x2 * x2),
            Smooth::EnergyPar => -1.0 / x2 + t / x,
            Smooth::Mixing1 => 2.0 / (x2 * x) - t / x2 + u / x,
        }
    }

    /// Terms `(coefficient, power of w, factor)` with factor 0 = 1, 1 = T, 2 = U.
    fn recipe(self) -> &'static [(f64, usize, u8)] {
        match self {
            Smooth::I1 => &[(-1.0, 1, 1)],
            Smooth::I2 => &[(1.0, 2, 0), (2.0, 3, 1), (-1.0, 1, 1), (-2.0, 2, 2)],
            Smooth::J1 => &[(-1.0, 2, 1), (1.0, 1, 2)],
            Smooth::J2 => &[(4.0, 3, 0), (6.0, 4, 1), (-3.0, 2, 1), (1.0, 1, 2), (-6.0, 3, 2)],
            Smooth::EnergyPar => &[(-1.0, 2, 0), (1.0, 1, 1)],
            Smooth::Mixing1 => &[(2.0, 3, 0), (-1.0, 2, 1), (1.0, 1, 2)],
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Coefficients in powers of `w = 1/χ`, with exact cancellations done
    /// before any evaluation.
    fn series(self) -> &'static [f64] {
        static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
        let table = TABLE.get_or_init(|| {
            let (tc, uc) = asymptotic_t_u_coefficients(SERIES_TERMS);
            let all = [
                Smooth::I1,
                Smooth::I2,
                Smooth::J1,
                Smooth::J2,
                Smooth::EnergyPar,
                Smooth::Mixing1,
            ];
            all.iter()
                .map(|s| {
                    let mut out = vec![0.0; tc.len() + 5];
                    for &(c, shift, factor) in s.recipe() {
                        match factor {
                            0 => out[shift] += c,
                            1 => tc.iter().enumerate().for_each(|(k, a)| out[k + shift] += c * a),
                            _ => uc.iter().enumerate().for_each(|(k, a)| out[k + shift] += c * a),
                        }
                    }
                    // drop orders beyond what the truncated T, U support
                    out.truncate(tc.len());
                    out
                })
                .collect()
        });
        &table[self.index()]
    }

    fn asymptotic(self, x: f64) -> f64 {
        let w = 1.0 / x;
        self.series().iter().rev().fold(0.0, |acc, c| acc * w + c)
    }

    fn eval(self, x: f64) -> f64 {
        if x > HANDOFF_CHI {
            self.asymptotic(x)
        } else {
            self.direct(x)
        }
    }
}

/// `∂²(cos χ/χ)/∂χ²`
fn d2_cos_over_chi(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    -c / x + 2.0 * s / (x * x) + 2.0 * c / (x * x * x)
}

/// `(cos χ + χ sin χ)/χ²`
fn cos_chi_sin_over_chi2(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    (c + x * s) / (x * x)
}

/// `∂²((cos χ + χ sin χ)/χ²)/∂χ²`
fn d2_cos_chi_sin_over_chi2(x: f64) -> f64 {
    let (s, c) = x.sin_cos();
    let x2 = x * x;
    -s / x - 3.0 * c / x2 + 6.0 * s / (x2 * x) + 6.0 * c / (x2 * x2)
}

/// `I₁/ℰ` at a given χ.
fn i1_reduced(gap: SignedGap, x: f64) -> f64 {
    Smooth::I1.eval(x) + gap.theta_neg() * PI * x.cos() / x
}

fn i2_reduced(gap: SignedGap, x: f64) -> f64 {
    Smooth::I2.eval(x) - gap.theta_neg() * PI * d2_cos_over_chi(x)
}

fn j1_reduced(gap: SignedGap, x: f64) -> f64 {
    gap.epsilon() * Smooth::J1.eval(x) - gap.theta_neg() * PI * cos_chi_sin_over_chi2(x)
}

fn j2_reduced(gap: SignedGap, x: f64) -> f64 {
    gap.epsilon() * Smooth::J2.eval(x) + gap.theta_neg() * PI * d2_cos_chi_sin_over_chi2(x)
}

/// `I₁ ≐ ∫₀^∞ dL cos(2L𝒵) ln|ℰ + L|` in closed form.
pub fn i1(gap: SignedGap, z: f64) -> Result<f64> {
    let x = gap.chi(z)?.value();
    Ok(gap.value() * i1_reduced(gap, x))
}

/// `I₂ = −∂²I₁/∂χ²`.
pub fn i2(gap: SignedGap, z: f64) -> Result<f64> {
    let x = gap.chi(z)?.value();
    Ok(gap.value() * i2_reduced(gap, x))
}

/// `J₁ ≐ ∫₀^∞ dL L sin(2L𝒵) ln|ℰ + L|` in closed form.
pub fn j1(gap: SignedGap, z: f64) -> Result<f64> {
    let x = gap.chi(z)?.value();
    Ok(gap.value().powi(2) * j1_reduced(gap, x))
}

/// `J₂ = −∂²J₁/∂χ²`.
pub fn j2(gap: SignedGap, z: f64) -> Result<f64> {
    let x = gap.chi(z)?.value();
    Ok(gap.value().powi(2) * j2_reduced(gap, x))
}

/// The four integrals written term by term in their long form, with the
/// `ε`, `1 − ε` and `2 sin²(χ/2)` pieces kept separate. Used to check the
/// reduced forms above.
pub mod literal {
    use super::*;

    fn parts(gap: SignedGap, z: f64) -> Result<(f64, f64, f64, f64, f64)> {
        let x = gap.chi(z)?.value();
        let (t, u) = t_and_u(Chi::new(x)?);
        Ok((x, gap.epsilon(), gap.theta_neg(), t, u))
    }

    /// `∂²(2 sin²(χ/2)/χ)` = `∂²((1 − cos χ)/χ)`
    fn d2_one_minus_cos_over_chi(x: f64) -> f64 {
        2.0 / (x * x * x) - d2_cos_over_chi(x)
    }

    /// `∂²((2 sin²(χ/2) − χ sin χ)/χ²)`
    fn d2_j_osc(x: f64) -> f64 {
        6.0 / x.powi(4) - d2_cos_chi_sin_over_chi2(x)
    }

    pub fn i1(gap: SignedGap, z: f64) -> Result<f64> {
        let (x, e, th, t, _) = parts(gap, z)?;
        let half_sin2 = 2.0 * (x / 2.0).sin().powi(2);
        Ok(gap.value() * (PI * (1.0 - e) / (2.0 * x) - t / x - PI * th * half_sin2 / x))
    }

    pub fn i2(gap: SignedGap, z: f64) -> Result<f64> {
        let (x, e, th, t, u) = parts(gap, z)?;
        let x3 = x * x * x;
        Ok(gap.value()
            * ((PI * (e - 1.0) + x) / x3 + (2.0 - x * x) / x3 * t - 2.0 / (x * x) * u
                + PI * th * d2_one_minus_cos_over_chi(x)))
    }

    pub fn j1(gap: SignedGap, z: f64) -> Result<f64> {
        let (x, e, th, t, u) = parts(gap, z)?;
        let x2 = x * x;
        let osc = (2.0 * (x / 2.0).sin().powi(2) - x * x.sin()) / x2;
        Ok(gap.value().powi(2) * (e * (PI / (2.0 * x2) - t / x2 + u / x) - PI / (2.0 * x2) + PI * th * osc))
    }

    pub fn j2(gap: SignedGap, z: f64) -> Result<f64> {
        let (x, e, th, t, u) = parts(gap, z)?;
        let x4 = x.powi(4);
        Ok(gap.value().powi(2)
            * (3.0 * PI / x4
                + e * ((4.0 * x - 3.0 * PI) / x4 + 3.0 * (2.0 - x * x) / x4 * t + (x * x - 6.0) / (x * x * x) * u)
                - PI * th * d2_j_osc(x)))
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("distance", format!("need finite 𝒵 > 0, got {z}")));
    }
    Ok(())
}

/// One channel's contribution to the energy shift.
pub fn energy_shift_channel(z: f64, ch: &VirtualChannel) -> Result<f64> {
    check_z(z)?;
    let gap = SignedGap::new(ch.gap)?;
    let x = gap.chi(z)?.value();
    let b = ch.d_par_sq - 2.0 * ch.d_z_sq;
    let a = ch.d_par_sq + 2.0 * ch.d_z_sq;
    let th = gap.theta_neg();
    let par = Smooth::EnergyPar.eval(x) - th * PI * x.cos() / x;
    let bracket = b * par - a * i2_reduced(gap, x);
    Ok(gap.value().powi(3) * bracket / (2.0 * PI))
}

/// Distance-dependent shift `ΔE(𝒵)` summed over virtual channels.
pub fn energy_shift(z: f64, channels: &[VirtualChannel]) -> Result<f64> {
    channels.iter().map(|c| energy_shift_channel(z, c)).sum()
}

/// One channel's contribution to the mixing element.
pub fn mixing_element_channel(z: f64, ch: &MixingChannel) -> Result<f64> {
    check_z(z)?;
    let gap = SignedGap::new(ch.gap)?;
    let x = gap.chi(z)?.value();
    let th = gap.theta_neg();
    let first = gap.epsilon() * Smooth::Mixing1.eval(x) - th * PI * cos_chi_sin_over_chi2(x);
    let bracket = ch.t1 * first - ch.t2 * j2_reduced(gap, x);
    Ok(gap.value().powi(4) * bracket / (4.0 * PI))
}

/// Retarded mixing element `ΔM(𝒵)` between opposite-parity states.
pub fn mixing_element(z: f64, channels: &[MixingChannel]) -> Result<f64> {
    channels.iter().map(|c| mixing_element_channel(z, c)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogen::{dipole_channels, AtomicConstants, LevelLabel};

    fn gap(v: f64) -> SignedGap {
        SignedGap::new(v).unwrap()
    }

    /// `f` as a function of χ at fixed gap.
    fn at_chi(f: fn(SignedGap, f64) -> Result<f64>, g: SignedGap, x: f64) -> f64 {
        f(g, x / (2.0 * g.value().abs())).unwrap()
    }

    fn second_derivative(f: fn(SignedGap, f64) -> Result<f64>, g: SignedGap, x: f64) -> f64 {
        let h = x * 1e-4;
        (at_chi(f, g, x + h) - 2.0 * at_chi(f, g, x) + at_chi(f, g, x - h)) / (h * h)
    }

    #[test]
    fn signed_gap_bookkeeping() {
        assert_eq!((gap(0.3).epsilon(), gap(0.3).theta_neg()), (1.0, 0.0));
        assert_eq!((gap(-0.3).epsilon(), gap(-0.3).theta_neg()), (-1.0, 1.0));
        assert!(SignedGap::new(0.0).is_err());
        assert!(SignedGap::new(f64::NAN).is_err());
    }

    #[test]
    fn second_derivative_relations() {
        for e in [0.7, -0.7] {
            for x in [0.5, 3.0, 20.0] {
                let g = gap(e);
                let fd = -second_derivative(i1, g, x);
                let exact = at_chi(i2, g, x);
                assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1e-3), "I: ℰ={e} χ={x}: {fd} vs {exact}");
                let fd = -second_derivative(j1, g, x);
                let exact = at_chi(j2, g, x);
                assert!((fd - exact).abs() < 1e-5 * exact.abs().max(1e-3), "J: ℰ={e} χ={x}: {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn reduced_forms_equal_long_forms() {
        for e in [0.2, -0.2, 1.5, -1.5] {
            for z in [0.01, 0.4, 3.0, 70.0, 900.0] {
                let g = gap(e);
                let pairs = [
                    (i1(g, z).unwrap(), literal::i1(g, z).unwrap()),
                    (i2(g, z).unwrap(), literal::i2(g, z).unwrap()),
                    (j1(g, z).unwrap(), literal::j1(g, z).unwrap()),
                    (j2(g, z).unwrap(), literal::j2(g, z).unwrap()),
                ];
                for (k, (a, b)) in pairs.iter().enumerate() {
                    let scale = a.abs().max(b.abs()).max(1e-300);
                    // the long forms carry large cancelling pieces at small χ
                    assert!((a - b).abs() < 1e-9 * scale.max(e * e), "#{k} ℰ={e} 𝒵={z}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn handoff_is_continuous() {
        for s in [
            Smooth::I1,
            Smooth::I2,
            Smooth::J1,
            Smooth::J2,
            Smooth::EnergyPar,
            Smooth::Mixing1,
        ] {
            let d = s.direct(HANDOFF_CHI);
            let a = s.asymptotic(HANDOFF_CHI);
            assert!(((d - a) / a).abs() < 1e-6, "{s:?}: {d} vs {a}");
        }
    }

    #[test]
    fn positive_gap_decay() {
        let g = gap(0.5);
        for x in [60.0, 200.0, 1e3] {
            let z = x / (2.0 * 0.5);
            assert!(i1(g, z).unwrap().abs() < 1.01 * 0.5 / (x * x));
            assert!(j1(g, z).unwrap().abs() < 0.25 * 10.0 / (x * x));
        }
    }

    #[test]
    fn no_spurious_pole_term_for_positive_gap() {
        // leading π ℰ(ε−1)/χ³ is absent, so I₂ ≈ ℰ π/χ³ from T(0) = π/2
        let g = gap(0.5);
        let x = 1e-3;
        let v = at_chi(i2, g, x) / 0.5;
        assert!(((v - PI / x.powi(3)) / v).abs() < 1e-2);
    }

    #[test]
    fn positive_gap_channels_reach_polarizability_tail() {
        let c = AtomicConstants::default();
        let ch = dipole_channels(LevelLabel::S12, 2, &c).unwrap();
        let pos: Vec<_> = ch.into_iter().filter(|c| c.gap > 0.0).collect();
        let p = crate::hydrogen::Polarizabilities::from_channels(&pos).unwrap();
        let z = 1e3 / (2.0 * pos[0].gap);
        let e = energy_shift(z, &pos).unwrap() * z.powi(4);
        let tail = -(2.0 * p.pi_par + p.pi_perp) / (8.0 * PI);
        assert!(((e - tail) / tail).abs() < 0.01, "{e} vs {tail}");
    }

    #[test]
    fn zero_channels_give_zero() {
        let zero = VirtualChannel {
            gap: -0.1,
            d_par_sq: 0.0,
            d_z_sq: 0.0,
            label: "zero".into(),
        };
        assert_eq!(energy_shift(12.0, &[zero]).unwrap(), 0.0);
        assert_eq!(energy_shift(12.0, &[]).unwrap(), 0.0);
        let zero = MixingChannel::new(0.1, 0.0, 0.0, "zero");
        assert_eq!(mixing_element(12.0, &[zero]).unwrap(), 0.0);
    }

    #[test]
    fn linear_in_matrix_elements() {
        let a = VirtualChannel {
            gap: -0.02,
            d_par_sq: 3.0,
            d_z_sq: 1.0,
            label: "a".into(),
        };
        let b = VirtualChannel {
            d_par_sq: 6.0,
            d_z_sq: 2.0,
            ..a.clone()
        };
        let ea = energy_shift(40.0, &[a.clone()]).unwrap();
        let eb = energy_shift(40.0, &[b]).unwrap();
        assert!((eb - 2.0 * ea).abs() < 1e-14 * eb.abs());
        let both = energy_shift(40.0, &[a.clone(), a]).unwrap();
        assert!((both - 2.0 * ea).abs() < 1e-14 * both.abs());
    }

    #[test]
    fn rejects_bad_input() {
        let ch = VirtualChannel {
            gap: 0.0,
            d_par_sq: 1.0,
            d_z_sq: 1.0,
            label: "flat".into(),
        };
        assert!(matches!(energy_shift(10.0, &[ch]), Err(Error::Degenerate { .. })));
        assert!(i1(gap(0.1), 0.0).is_err());
        assert!(i1(gap(0.1), -1.0).is_err());
    }
}
