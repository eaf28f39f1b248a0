//! Long-range (χ ≫ 1) tails of `ΔE` and `ΔM`, and the large-distance
//! behaviour of the 2P admixture coefficients of the 2S state.
//!
//! Negative-gap channels leave oscillating `cos(2ℰ𝒵)`, `sin(2ℰ𝒵)` terms
//! falling off as `1/𝒵 … 1/𝒵⁴`; every channel adds a non-oscillating
//! Casimir–Polder-like term (`1/𝒵⁴` for the energy, `1/𝒵⁵` for mixing).

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{AtomicConstants, MixingChannel, Polarizabilities, VirtualChannel};

/// Smallest `χ_min = 2 min|ℰ_q| 𝒵` accepted by the tail formulas.
pub const REGIME_CHI: f64 = 10.0;

/// Two tail coefficients have a literal form that does not follow from
/// expanding the closed forms: the `d_z² ℰ sin/𝒵²` term of `ΔE` (literal
/// weight 1, expansion gives 1/2) and the `C/16𝒵⁴` term of the
/// `r∥ · r∥z` group of `ΔM` (literal `3ℰ⁴`, expansion gives 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailConvention {
    /// The literal coefficients.
    Literal,
    /// Coefficients from the large-χ expansion of the closed forms.
    #[default]
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Oscillator {
    Cos,
    Sin,
    None,
}

impl fmt::Display for Oscillator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oscillator::Cos => "cos",
            Oscillator::Sin => "sin",
            Oscillator::None => "none",
        })
    }
}

/// `coefficient · osc(2ℰ𝒵) / 𝒵^power`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailTerm {
    pub power: i32,
    pub oscillator: Oscillator,
    /// Gap entering the oscillation; unused for [`Oscillator::None`].
    pub gap: f64,
    pub coefficient: f64,
    pub channel: String,
    /// Term whose coefficient depends on [`TailConvention`].
    pub flagged: bool,
}

impl TailTerm {
    pub fn value(&self, z: f64) -> f64 {
        let phase = 2.0 * self.gap * z;
        let osc = match self.oscillator {
            Oscillator::Cos => phase.cos(),
            Oscillator::Sin => phase.sin(),
            Oscillator::None => 1.0,
        };
        self.coefficient * osc / z.powi(self.power)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailBreakdown {
    pub z: f64,
    pub total: f64,
    pub terms: Vec<TailTerm>,
}

impl TailBreakdown {
    fn from_terms(z: f64, terms: Vec<TailTerm>) -> Self {
        let total = terms.iter().map(|t| t.value(z)).sum();
        TailBreakdown { z, total, terms }
    }

    /// Sum of the oscillating terms belonging to one channel.
    pub fn oscillating_for(&self, channel: &str) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.channel == channel && t.oscillator != Oscillator::None)
            .map(|t| t.value(self.z))
            .sum()
    }
}

fn check_regime<'a>(z: f64, gaps: impl Iterator<Item = &'a f64>) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("distance", format!("need finite 𝒵 > 0, got {z}")));
    }
    let min_gap = gaps.fold(f64::INFINITY, |m, g| m.min(g.abs()));
    if min_gap.is_finite() {
        let chi_min = 2.0 * min_gap * z;
        if chi_min <= REGIME_CHI {
            return Err(Error::OutOfRegime {
                detail: format!("χ_min = {chi_min:.3} ≤ {REGIME_CHI} at 𝒵 = {z}"),
            });
        }
    }
    Ok(())
}

fn term(power: i32, oscillator: Oscillator, gap: f64, coefficient: f64, channel: &str) -> TailTerm {
    TailTerm {
        power,
        oscillator,
        gap,
        coefficient,
        channel: channel.to_owned(),
        flagged: false,
    }
}

/// Oscillating terms of one negative-gap energy channel.
fn energy_channel_terms(ch: &VirtualChannel, convention: TailConvention) -> Vec<TailTerm> {
    if ch.gap >= 0.0 {
        return Vec::new();
    }
    let e = ch.gap;
    let (dp, dz) = (ch.d_par_sq, ch.d_z_sq);
    let sin_weight = match convention {
        TailConvention::Literal => 1.0,
        TailConvention::Consistent => 0.5,
    };
    let l = ch.label.as_str();
    vec![
        term(1, Oscillator::Cos, e, dp * e * e / 2.0, l),
        term(2, Oscillator::Sin, e, -dp * e / 4.0, l),
        term(3, Oscillator::Cos, e, -dp / 8.0, l),
        TailTerm {
            flagged: true,
            ..term(2, Oscillator::Sin, e, -dz * e * sin_weight, l)
        },
        term(3, Oscillator::Cos, e, -dz / 4.0, l),
    ]
}

/// Long-range `ΔE(𝒵)`: oscillating negative-gap terms plus
/// `−(2Π∥ + Π⊥)/(8π𝒵⁴)` from all channels.
pub fn energy_tail(z: f64, channels: &[VirtualChannel], convention: TailConvention) -> Result<TailBreakdown> {
    check_regime(z, channels.iter().map(|c| &c.gap))?;
    let mut terms: Vec<TailTerm> = channels
        .iter()
        .flat_map(|c| energy_channel_terms(c, convention))
        .collect();
    if !channels.is_empty() {
        let p = Polarizabilities::from_channels(channels)?;
        terms.push(term(
            4,
            Oscillator::None,
            0.0,
            -(2.0 * p.pi_par + p.pi_perp) / (8.0 * PI),
            "polarizability",
        ));
    }
    Ok(TailBreakdown::from_terms(z, terms))
}

/// Tail terms contributed by one mixing channel.
pub fn mixing_channel_terms(ch: &MixingChannel, convention: TailConvention) -> Vec<TailTerm> {
    let e = ch.gap;
    let (pr, pz) = (ch.p_rparz, ch.p_zq2);
    let l = ch.label.as_str();
    let mut out = Vec::new();
    if e < 0.0 {
        let c4 = match convention {
            TailConvention::Literal => 3.0 * e.powi(4),
            TailConvention::Consistent => 3.0,
        };
        out.extend([
            term(1, Oscillator::Sin, e, -pr * e.powi(3) / 4.0, l),
            term(2, Oscillator::Cos, e, -3.0 * pr * e * e / 8.0, l),
            term(3, Oscillator::Sin, e, 3.0 * pr * e / 8.0, l),
            TailTerm {
                flagged: true,
                ..term(4, Oscillator::Cos, e, pr * c4 / 16.0, l)
            },
            term(2, Oscillator::Cos, e, pz * e * e / 8.0, l),
            term(3, Oscillator::Sin, e, -3.0 * pz * e / 16.0, l),
            term(4, Oscillator::Cos, e, -3.0 * pz / 32.0, l),
        ]);
    }
    out.push(term(
        5,
        Oscillator::None,
        0.0,
        (-pz / 8.0 + 3.0 * pr / 8.0) / (PI * e),
        l,
    ));
    out
}

/// Long-range `ΔM(𝒵)` for the given mixing channels.
pub fn mixing_tail(z: f64, channels: &[MixingChannel], convention: TailConvention) -> Result<TailBreakdown> {
    check_regime(z, channels.iter().map(|c| &c.gap))?;
    let terms = channels
        .iter()
        .flat_map(|c| mixing_channel_terms(c, convention))
        .collect();
    Ok(TailBreakdown::from_terms(z, terms))
}

fn check_admixture_regime(z: f64, c: &AtomicConstants) -> Result<()> {
    let chi = 2.0 * c.lamb_shift * z;
    if !(chi > REGIME_CHI) {
        return Err(Error::OutOfRegime {
            detail: format!("admixture tails need 2ℒ𝒵 > {REGIME_CHI}, got {chi:.3}"),
        });
    }
    Ok(())
}

/// Long-range 2P₁/₂ admixture `3√3/(π ℒ ℱ 𝒵⁵)`.
pub fn admixture_tail_a12(z: f64, c: &AtomicConstants) -> Result<f64> {
    check_admixture_regime(z, c)?;
    Ok(3.0 * 3f64.sqrt() / (PI * c.lamb_shift * c.fine_structure * z.powi(5)))
}

/// Long-range 2P₃/₂ admixture `−√(3/2) · 3ℒ³ sin(2ℒ𝒵)/(ℱ𝒵)`.
pub fn admixture_tail_a32(z: f64, c: &AtomicConstants) -> Result<f64> {
    check_admixture_regime(z, c)?;
    let l = c.lamb_shift;
    Ok(-(1.5f64).sqrt() * 3.0 * l.powi(3) * (2.0 * l * z).sin() / (c.fine_structure * z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogen::{dipole_channels, mixing_channels, LevelLabel};
    use crate::retarded::{energy_shift_channel, mixing_element_channel};

    fn consts() -> AtomicConstants {
        AtomicConstants::default()
    }

    #[test]
    fn positive_gaps_leave_only_polarizability_term() {
        let ch = vec![VirtualChannel {
            gap: 0.375,
            d_par_sq: 1.1,
            d_z_sq: 0.55,
            label: "up".into(),
        }];
        let t = energy_tail(100.0, &ch, TailConvention::Consistent).unwrap();
        assert_eq!(t.terms.len(), 1);
        assert_eq!(t.terms[0].power, 4);
    }

    #[test]
    fn regime_gate() {
        let ch = dipole_channels(LevelLabel::S12, 2, &consts()).unwrap();
        let z = 5.0 / (2.0 * consts().lamb_shift);
        assert!(matches!(
            energy_tail(z, &ch, TailConvention::Consistent),
            Err(Error::OutOfRegime { .. })
        ));
        assert!(admixture_tail_a12(1.0, &consts()).is_err());
    }

    #[test]
    fn two_s_leading_oscillation() {
        let c = consts();
        let ch = dipole_channels(LevelLabel::S12, 2, &c).unwrap();
        let z = 300.0 / c.lamb_shift;
        let t = energy_tail(z, &ch, TailConvention::Consistent).unwrap();
        let lead: Vec<_> = t.terms.iter().filter(|t| t.power == 1).collect();
        assert_eq!(lead.len(), 1);
        // d∥² of the 2P₁/₂ channel is 6, giving 3ℒ² cos(2ℒ𝒵)/𝒵
        assert!((lead[0].coefficient - 3.0 * c.lamb_shift.powi(2)).abs() < 1e-9 * c.lamb_shift.powi(2));
    }

    #[test]
    fn energy_tail_matches_closed_form_per_channel() {
        for ch in [
            VirtualChannel {
                gap: -0.02,
                d_par_sq: 6.0,
                d_z_sq: 3.0,
                label: "a".into(),
            },
            VirtualChannel {
                gap: -0.3,
                d_par_sq: 1.0,
                d_z_sq: 4.0,
                label: "b".into(),
            },
            VirtualChannel {
                gap: 0.05,
                d_par_sq: 2.0,
                d_z_sq: 5.0,
                label: "c".into(),
            },
        ] {
            let mut prev = f64::INFINITY;
            for chi in [200.0, 800.0, 3200.0] {
                let z = chi / (2.0 * ch.gap.abs());
                let full = energy_shift_channel(z, &ch).unwrap();
                let tail = energy_tail(z, std::slice::from_ref(&ch), TailConvention::Consistent)
                    .unwrap()
                    .total;
                let rel = ((tail - full) / full).abs();
                assert!(rel < 0.01, "{ch:?} χ={chi}: {tail} vs {full}");
                // decreasing until rounding takes over
                assert!(rel < prev || rel < 1e-12, "χ={chi}: {rel:e} after {prev:e}");
                prev = rel;
            }
        }
    }

    #[test]
    fn mixing_tail_matches_closed_form_per_channel() {
        for ch in [
            MixingChannel::new(-0.02, 3.0, -2.0, "a"),
            MixingChannel::new(-0.4, -1.0, 5.0, "b"),
            MixingChannel::new(0.1, 2.0, 1.0, "c"),
        ] {
            let mut prev = f64::INFINITY;
            for chi in [200.0, 800.0, 3200.0] {
                let z = chi / (2.0 * ch.gap.abs());
                let full = mixing_element_channel(z, &ch).unwrap();
                let tail = mixing_tail(z, std::slice::from_ref(&ch), TailConvention::Consistent)
                    .unwrap()
                    .total;
                let rel = ((tail - full) / full).abs();
                assert!(rel < 0.01, "{ch:?} χ={chi}: {tail} vs {full}");
                // decreasing until rounding takes over
                assert!(rel < prev || rel < 1e-12, "χ={chi}: {rel:e} after {prev:e}");
                prev = rel;
            }
        }
    }

    #[test]
    fn conventions_differ_only_in_flagged_terms() {
        let ch = vec![MixingChannel::new(-0.02, 3.0, -2.0, "a")];
        let a = mixing_tail(900.0, &ch, TailConvention::Consistent).unwrap();
        let b = mixing_tail(900.0, &ch, TailConvention::Literal).unwrap();
        for (x, y) in a.terms.iter().zip(&b.terms) {
            if !x.flagged {
                assert_eq!(x, y);
            }
        }
        assert_eq!(a.terms.iter().filter(|t| t.flagged).count(), 1);
    }

    #[test]
    fn p12_virtual_state_cancels() {
        let c = consts();
        let m = LevelLabel::P12.orbital();
        let n = LevelLabel::S12.orbital();
        let ch = crate::hydrogen::mixing_channel(&m, &n, &m, &c).unwrap();
        let t = mixing_tail(100.0 / c.lamb_shift, &[ch], TailConvention::Consistent).unwrap();
        assert!(t.terms.iter().all(|t| t.coefficient == 0.0));
    }

    #[test]
    fn a12_scaling_and_a32_zeros() {
        let c = consts();
        let k = 3.0 * 3f64.sqrt() / (PI * c.lamb_shift * c.fine_structure);
        for z in [1e8, 3e8, 1e9] {
            let v = admixture_tail_a12(z, &c).unwrap() * z.powi(5);
            assert!(((v - k) / k).abs() < 1e-12);
        }
        let z = 40.0 * PI / (2.0 * c.lamb_shift);
        let scale = 3.0 * c.lamb_shift.powi(3) / (c.fine_structure * z);
        assert!(admixture_tail_a32(z, &c).unwrap().abs() < 1e-9 * scale);
    }

    #[test]
    fn nonoscillating_mixing_tail_from_fine_structure_channel() {
        let c = consts();
        let ch = mixing_channels(LevelLabel::P12, LevelLabel::S12, 2, &c).unwrap();
        let z = 200.0 / c.lamb_shift;
        let t = mixing_tail(z, &ch, TailConvention::Consistent).unwrap();
        assert!(t.terms.iter().any(|t| t.power == 5 && t.coefficient != 0.0));
        assert!(t.oscillating_for("2P1/2").abs() == 0.0);
    }
}
