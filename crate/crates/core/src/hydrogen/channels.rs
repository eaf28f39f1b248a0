//! Virtual-state tables: squared dipole moments for the energy shift and
//! dipole × quadrupole products for the parity-mixing element.

use num_complex::Complex64;
use serde::Serialize;

use super::angular::{spin_orbital_element, Operator};
use super::{AtomicConstants, Orbital};
use crate::error::{Error, Result};

/// Gaps smaller than this are treated as degenerate.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Products below this magnitude are angular zeros, not physics.
const NEGLIGIBLE: f64 = 1e-13;

/// One virtual level `q` seen from a reference state, μ_q summed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VirtualChannel {
    /// `ℰ_q = E_q − E_ref`
    pub gap: f64,
    /// `Σ_μq |⟨ref|x|q⟩|² + |⟨ref|y|q⟩|²`
    pub d_par_sq: f64,
    /// `Σ_μq |⟨ref|z|q⟩|²`
    pub d_z_sq: f64,
    pub label: String,
}

/// One virtual level in the mixing element `⟨m|…|n⟩`, μ_q summed and the
/// reversed operator ordering added.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixingChannel {
    /// `ℰ_q = E_q − E_n`
    pub gap: f64,
    /// `⟨m|z|q⟩⟨q|r∥²−2z²|n⟩ + ⟨m|r∥²−2z²|q⟩⟨q|z|n⟩`
    pub p_zq2: f64,
    /// `⟨m|r⃗∥|q⟩·⟨q|r⃗∥ z|n⟩ + ⟨m|r⃗∥ z|q⟩·⟨q|r⃗∥|n⟩`
    pub p_rparz: f64,
    pub t1: f64,
    pub t2: f64,
    pub label: String,
}

impl MixingChannel {
    pub fn new(gap: f64, p_zq2: f64, p_rparz: f64, label: impl Into<String>) -> Self {
        MixingChannel {
            gap,
            p_zq2,
            p_rparz,
            t1: p_zq2,
            t2: p_zq2 - 2.0 * p_rparz,
            label: label.into(),
        }
    }
}

fn check_n_max(n_max: u32) -> Result<()> {
    if n_max < 2 {
        return Err(Error::domain("n_max", format!("need n_max ≥ 2, got {n_max}")));
    }
    if n_max > 6 {
        return Err(Error::domain("n_max", format!("supported up to n_max = 6, got {n_max}")));
    }
    Ok(())
}

fn real(v: Complex64, what: &'static str) -> Result<f64> {
    if v.im.abs() > 1e-10 * (1.0 + v.re.abs()) {
        return Err(Error::domain(what, format!("expected a real product, got {v}")));
    }
    Ok(v.re)
}

/// Dipole-coupled virtual levels with `n ≤ n_max` for the given reference
/// sublevel.
pub fn dipole_channels(
    reference: impl Into<Orbital>,
    n_max: u32,
    constants: &AtomicConstants,
) -> Result<Vec<VirtualChannel>> {
    check_n_max(n_max)?;
    let reference = reference.into();
    let (x, y, z) = (Operator::x(), Operator::y(), Operator::z());
    let mut out = Vec::new();
    for level in Orbital::levels_up_to(n_max) {
        if level.same_level(&reference) || level.l.abs_diff(reference.l) != 1 {
            continue;
        }
        let (mut d_par, mut d_z) = (0.0, 0.0);
        for q in level.sublevels() {
            d_par += spin_orbital_element(&reference, &x, &q)?.norm_sqr()
                + spin_orbital_element(&reference, &y, &q)?.norm_sqr();
            d_z += spin_orbital_element(&reference, &z, &q)?.norm_sqr();
        }
        if d_par + d_z < NEGLIGIBLE {
            continue;
        }
        out.push(VirtualChannel {
            gap: constants.gap(&level, &reference),
            d_par_sq: d_par,
            d_z_sq: d_z,
            label: level.label(),
        });
    }
    Ok(out)
}

/// Dipole × quadrupole products for `⟨m|ΔM|n⟩`. The reference level `n`
/// itself is excluded from the virtual sum.
pub fn mixing_channels(
    m: impl Into<Orbital>,
    n: impl Into<Orbital>,
    n_max: u32,
    constants: &AtomicConstants,
) -> Result<Vec<MixingChannel>> {
    check_n_max(n_max)?;
    let (m, n) = (m.into(), n.into());
    if m.same_level(&n) && m.two_mu == n.two_mu {
        return Err(Error::domain("mixing_channels", "m and n must differ"));
    }
    if m.parity() == n.parity() {
        return Err(Error::domain(
            "mixing_channels",
            format!("{} and {} have the same parity", m.label(), n.label()),
        ));
    }
    let mut out = Vec::new();
    for level in Orbital::levels_up_to(n_max) {
        if level.same_level(&n) {
            continue;
        }
        let ch = mixing_channel(&m, &n, &level, constants)?;
        if ch.p_zq2.abs() < NEGLIGIBLE && ch.p_rparz.abs() < NEGLIGIBLE {
            continue;
        }
        out.push(ch);
    }
    Ok(out)
}

/// The mixing products through one virtual level (all its μ sublevels),
/// kept even when they vanish.
pub fn mixing_channel(m: &Orbital, n: &Orbital, level: &Orbital, constants: &AtomicConstants) -> Result<MixingChannel> {
    let z = Operator::z();
    let quad = Operator::quadrupole();
    let lateral = [(Operator::x(), Operator::xz()), (Operator::y(), Operator::yz())];
    let mut p_zq2 = Complex64::new(0.0, 0.0);
    let mut p_rparz = Complex64::new(0.0, 0.0);
    for q in level.sublevels() {
        p_zq2 += spin_orbital_element(m, &z, &q)? * spin_orbital_element(&q, &quad, n)?
            + spin_orbital_element(m, &quad, &q)? * spin_orbital_element(&q, &z, n)?;
        for (ri, riz) in &lateral {
            p_rparz += spin_orbital_element(m, ri, &q)? * spin_orbital_element(&q, riz, n)?
                + spin_orbital_element(m, riz, &q)? * spin_orbital_element(&q, ri, n)?;
        }
    }
    let (p_zq2, p_rparz) = (real(p_zq2, "p_zq2")?, real(p_rparz, "p_rparz")?);
    Ok(MixingChannel::new(constants.gap(level, n), p_zq2, p_rparz, level.label()))
}

/// Static longitudinal and transverse polarizabilities of a channel set,
/// with the dynamic `Π(ω)` available through [`Polarizabilities::pi_of_omega`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polarizabilities {
    /// `Σ d∥²/ℰ_q`
    pub pi_par: f64,
    /// `Σ 2 d_z²/ℰ_q`
    pub pi_perp: f64,
    #[serde(skip)]
    channels: Vec<VirtualChannel>,
}

impl Polarizabilities {
    pub fn from_channels(channels: &[VirtualChannel]) -> Result<Self> {
        let mut pi_par = 0.0;
        let mut pi_perp = 0.0;
        for c in channels {
            if c.gap.abs() < DEGENERATE_GAP {
                return Err(Error::Degenerate {
                    gap: c.gap,
                    threshold: DEGENERATE_GAP,
                });
            }
            pi_par += c.d_par_sq / c.gap;
            pi_perp += 2.0 * c.d_z_sq / c.gap;
        }
        Ok(Polarizabilities {
            pi_par,
            pi_perp,
            channels: channels.to_vec(),
        })
    }

    /// `(Π∥(ω), Π⊥(ω))` from `Σ ℰ_q/(ℰ_q² − ω²)`; errors within 1e-12 of a pole.
    pub fn pi_of_omega(&self, omega: f64) -> Result<(f64, f64)> {
        let (mut par, mut perp) = (0.0, 0.0);
        for c in &self.channels {
            let den = c.gap * c.gap - omega * omega;
            if den.abs() < DEGENERATE_GAP * c.gap.abs() {
                return Err(Error::Degenerate {
                    gap: c.gap.abs() - omega.abs(),
                    threshold: DEGENERATE_GAP,
                });
            }
            par += c.d_par_sq * c.gap / den;
            perp += 2.0 * c.d_z_sq * c.gap / den;
        }
        Ok((par, perp))
    }

    /// Orientation average `(2Π∥ + Π⊥)/3` at ω = 0.
    pub fn isotropic(&self) -> f64 {
        (2.0 * self.pi_par + self.pi_perp) / 3.0
    }
}

/// `Π∥`, `Π⊥` of a reference sublevel from its dipole channels up to `n_max`.
pub fn static_polarizabilities(
    reference: impl Into<Orbital>,
    n_max: u32,
    constants: &AtomicConstants,
) -> Result<Polarizabilities> {
    Polarizabilities::from_channels(&dipole_channels(reference, n_max, constants)?)
}
