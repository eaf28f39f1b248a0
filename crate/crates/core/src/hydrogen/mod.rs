//! Hydrogen in the n = 2 fine-structure manifold: constants, Schrödinger–Pauli
//! orbitals, dipole/quadrupole matrix elements, virtual-channel tables and
//! static polarizabilities.

mod angular;
mod channels;
mod radial;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use angular::{clebsch_gordan_half, spherical_harmonic, Operator};
pub use channels::{
    dipole_channels, mixing_channel, mixing_channels, static_polarizabilities, MixingChannel, Polarizabilities,
    VirtualChannel, DEGENERATE_GAP,
};
pub use radial::{radial_integral, radial_wavefunction};

/// Which energy is used for the 2S₁/₂–2P₃/₂ separation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GapConvention {
    /// 2P₃/₂ sits ℱ above 2S₁/₂ (and ℒ+ℱ above 2P₁/₂), so every admixture
    /// and retarded-gap formula uses the bare ℱ.
    #[default]
    Nominal,
    /// Measured level order: 2P₃/₂ sits ℱ above 2P₁/₂, i.e. ℱ−ℒ above 2S₁/₂.
    Physical,
}

impl FromStr for GapConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nominal" => Ok(GapConvention::Nominal),
            "physical" => Ok(GapConvention::Physical),
            other => Err(Error::Config(format!("unknown gap convention `{other}` (nominal|physical)"))),
        }
    }
}

/// Level separations, decay widths and the energy-to-frequency factor, all
/// in atomic units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomicConstants {
    /// 2S₁/₂ − 2P₁/₂ (Lamb shift) ℒ.
    pub lamb_shift: f64,
    /// 2P₃/₂ − 2P₁/₂ (fine structure) ℱ.
    pub fine_structure: f64,
    /// Two-photon width of 2S.
    pub gamma_2s: f64,
    /// One-photon width of 2P.
    pub gamma_2p: f64,
    /// MHz per Hartree.
    pub au_to_mhz: f64,
    pub convention: GapConvention,
}

impl Default for AtomicConstants {
    fn default() -> Self {
        AtomicConstants {
            lamb_shift: 1.61e-7,
            fine_structure: 1.66e-6,
            gamma_2s: 1.99e-16,
            gamma_2p: 1.51e-8,
            au_to_mhz: 6_579_683_920.502,
            convention: GapConvention::Nominal,
        }
    }
}

impl AtomicConstants {
    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.lamb_shift,
            self.fine_structure,
            self.gamma_2s,
            self.gamma_2p,
            self.au_to_mhz,
        ]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
        if !all_positive {
            return Err(Error::Config("all constants must be finite and positive".into()));
        }
        if self.fine_structure <= self.lamb_shift {
            return Err(Error::Config("fine structure must exceed the Lamb shift".into()));
        }
        Ok(())
    }

    /// Energy of an orbital on the common scale where 2P₁/₂ is zero.
    /// Levels outside n = 2 carry their Schrödinger energy.
    pub fn level_energy(&self, orbital: &Orbital) -> f64 {
        if orbital.n == 2 {
            match (orbital.l, orbital.two_j) {
                (0, 1) => self.lamb_shift,
                (1, 1) => 0.0,
                (1, 3) => match self.convention {
                    GapConvention::Nominal => self.lamb_shift + self.fine_structure,
                    GapConvention::Physical => self.fine_structure,
                },
                _ => unreachable!("n = 2 has no other levels"),
            }
        } else {
            0.125 - 0.5 / (orbital.n * orbital.n) as f64
        }
    }

    /// `ℰ_q = E_q − E_ref`.
    pub fn gap(&self, q: &Orbital, reference: &Orbital) -> f64 {
        self.level_energy(q) - self.level_energy(reference)
    }
}

/// The three coupled n = 2 states with magnetic projection μ = +1/2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LevelLabel {
    S12,
    P12,
    P32,
}

impl LevelLabel {
    pub const ALL: [LevelLabel; 3] = [LevelLabel::S12, LevelLabel::P12, LevelLabel::P32];

    pub fn orbital(self) -> Orbital {
        match self {
            LevelLabel::S12 => Orbital::new_unchecked(2, 0, 1, 1),
            LevelLabel::P12 => Orbital::new_unchecked(2, 1, 1, 1),
            LevelLabel::P32 => Orbital::new_unchecked(2, 1, 3, 1),
        }
    }

    /// Even (+1) or odd (−1) parity.
    pub fn parity(self) -> i32 {
        self.orbital().parity()
    }

    pub fn index(self) -> usize {
        match self {
            LevelLabel::S12 => 0,
            LevelLabel::P12 => 1,
            LevelLabel::P32 => 2,
        }
    }
}

impl fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LevelLabel::S12 => "2S12",
            LevelLabel::P12 => "2P12",
            LevelLabel::P32 => "2P32",
        };
        f.write_str(s)
    }
}

impl FromStr for LevelLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| !matches!(c, '_' | '/' | ' '))
            .collect::<String>()
            .to_ascii_uppercase();
        match norm.as_str() {
            "2S" | "2S12" | "S12" | "S" => Ok(LevelLabel::S12),
            "2P12" | "P12" => Ok(LevelLabel::P12),
            "2P32" | "P32" => Ok(LevelLabel::P32),
            _ => Err(Error::domain("level label", format!("unknown state `{s}` (2S, 2P12, 2P32)"))),
        }
    }
}

/// A hydrogen spin-orbital `|n l j μ⟩` (angular momenta stored doubled).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Orbital {
    pub n: u32,
    pub l: u32,
    pub two_j: u32,
    pub two_mu: i32,
}

impl Orbital {
    pub fn new(n: u32, l: u32, two_j: u32, two_mu: i32) -> Result<Self> {
        let valid_j = two_j == 2 * l + 1 || (l > 0 && two_j == 2 * l - 1);
        if n == 0 || l >= n || !valid_j || two_mu.unsigned_abs() > two_j || two_mu % 2 == 0 {
            return Err(Error::domain(
                "orbital",
                format!("invalid quantum numbers n={n} l={l} 2j={two_j} 2μ={two_mu}"),
            ));
        }
        Ok(Orbital { n, l, two_j, two_mu })
    }

    const fn new_unchecked(n: u32, l: u32, two_j: u32, two_mu: i32) -> Self {
        Orbital { n, l, two_j, two_mu }
    }

    pub fn parity(&self) -> i32 {
        if self.l % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Same `(n, l, j)` level, any μ.
    pub fn same_level(&self, other: &Orbital) -> bool {
        self.n == other.n && self.l == other.l && self.two_j == other.two_j
    }

    /// All μ sublevels of this orbital's level.
    pub fn sublevels(&self) -> impl Iterator<Item = Orbital> + '_ {
        let two_j = self.two_j as i32;
        (-two_j..=two_j)
            .step_by(2)
            .map(move |two_mu| Orbital { two_mu, ..*self })
    }

    /// One representative (μ = +1/2) per `(n, l, j)` level with `n ≤ n_max`.
    pub fn levels_up_to(n_max: u32) -> Vec<Orbital> {
        let mut out = Vec::new();
        for n in 1..=n_max {
            for l in 0..n {
                if l > 0 {
                    out.push(Orbital::new_unchecked(n, l, 2 * l - 1, 1));
                }
                out.push(Orbital::new_unchecked(n, l, 2 * l + 1, 1));
            }
        }
        out
    }

    pub fn label(&self) -> String {
        const L: [char; 7] = ['S', 'P', 'D', 'F', 'G', 'H', 'I'];
        let letter = L.get(self.l as usize).copied().unwrap_or('?');
        format!("{}{}{}/2", self.n, letter, self.two_j)
    }
}

impl From<LevelLabel> for Orbital {
    fn from(label: LevelLabel) -> Self {
        label.orbital()
    }
}

/// Matrix element `⟨a|O|b⟩` between spin-orbitals for a spin-independent
/// multiplicative operator.
pub fn matrix_element(a: &Orbital, op: &Operator, b: &Orbital) -> Result<num_complex::Complex64> {
    angular::spin_orbital_element(a, op, b)
}
