//! Angular algebra: spherical harmonics (Condon–Shortley phase), l ⊗ ½
//! coupling and matrix elements of homogeneous polynomial operators.
//!
//! Angular integrals are done on a Gauss–Legendre × uniform-φ product grid
//! that integrates every `Y*_{l'm'} · (polynomial of degree ≤ 6) · Y_{lm}`
//! with `l, l' ≤ LMAX` exactly.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use num_complex::Complex64;

use super::radial::radial_integral;
use super::Orbital;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

const LMAX: usize = 7;
const N_THETA: usize = 32;
const N_PHI: usize = 64;

/// A homogeneous, spin-independent multiplicative operator `r^k A(θ, φ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    /// `Σ c · x^a y^b z^c`, every monomial of the same total degree.
    Monomials { degree: u32, terms: Vec<(f64, [u32; 3])> },
    /// Solid Legendre polynomial `r^k P_k(cos θ)`.
    SolidLegendre(u32),
}

impl Operator {
    pub fn monomials(terms: Vec<(f64, [u32; 3])>) -> Self {
        let degree = terms.first().map(|(_, p)| p.iter().sum()).unwrap_or(0);
        debug_assert!(terms.iter().all(|(_, p)| p.iter().sum::<u32>() == degree));
        Operator::Monomials { degree, terms }
    }
    pub fn x() -> Self {
        Self::monomials(vec![(1.0, [1, 0, 0])])
    }
    pub fn y() -> Self {
        Self::monomials(vec![(1.0, [0, 1, 0])])
    }
    pub fn z() -> Self {
        Self::monomials(vec![(1.0, [0, 0, 1])])
    }
    /// `r∥² = x² + y²`
    pub fn r_par_sq() -> Self {
        Self::monomials(vec![(1.0, [2, 0, 0]), (1.0, [0, 2, 0])])
    }
    pub fn z_sq() -> Self {
        Self::monomials(vec![(1.0, [0, 0, 2])])
    }
    /// `r∥² − 2z²`
    pub fn quadrupole() -> Self {
        Self::monomials(vec![(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (-2.0, [0, 0, 2])])
    }
    /// `r∥² + 2z²`
    pub fn mirror_quadratic() -> Self {
        Self::monomials(vec![(1.0, [2, 0, 0]), (1.0, [0, 2, 0]), (2.0, [0, 0, 2])])
    }
    /// `z (r∥² + 2z²)`
    pub fn mirror_cubic() -> Self {
        Self::monomials(vec![(1.0, [2, 0, 1]), (1.0, [0, 2, 1]), (2.0, [0, 0, 3])])
    }
    pub fn xz() -> Self {
        Self::monomials(vec![(1.0, [1, 0, 1])])
    }
    pub fn yz() -> Self {
        Self::monomials(vec![(1.0, [0, 1, 1])])
    }
    pub fn z_pow(k: u32) -> Self {
        Self::monomials(vec![(1.0, [0, 0, k])])
    }
    pub fn zero() -> Self {
        Self::monomials(vec![(0.0, [0, 0, 0])])
    }

    pub fn degree(&self) -> u32 {
        match self {
            Operator::Monomials { degree, .. } => *degree,
            Operator::SolidLegendre(k) => *k,
        }
    }

    /// Angular factor `A(θ, φ)` such that the operator equals `r^k A`.
    pub fn angular(&self, cos_t: f64, sin_t: f64, phi: f64) -> f64 {
        match self {
            Operator::Monomials { terms, .. } => {
                let (sp, cp) = phi.sin_cos();
                let ux = sin_t * cp;
                let uy = sin_t * sp;
                terms
                    .iter()
                    .map(|(c, [a, b, d])| c * ux.powi(*a as i32) * uy.powi(*b as i32) * cos_t.powi(*d as i32))
                    .sum()
            }
            Operator::SolidLegendre(k) => legendre(*k, cos_t),
        }
    }

    /// Value at a Cartesian point (used by brute-force checks).
    pub fn at(&self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            Operator::Monomials { terms, .. } => terms
                .iter()
                .map(|(c, [a, b, d])| c * x.powi(*a as i32) * y.powi(*b as i32) * z.powi(*d as i32))
                .sum(),
            Operator::SolidLegendre(k) => {
                let r = (x * x + y * y + z * z).sqrt();
                if r == 0.0 {
                    return if *k == 0 { 1.0 } else { 0.0 };
                }
                r.powi(*k as i32) * legendre(*k, z / r)
            }
        }
    }
}

fn legendre(k: u32, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return 1.0;
    }
    for n in 2..=k {
        let n = n as f64;
        let p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Normalized associated Legendre `P̄_l^m(x)` for `m ≥ 0`, including the
/// Condon–Shortley phase, so that `Y_lm = P̄_l^m(cos θ) e^{imφ}`.
fn assoc_legendre_normalized(l: u32, m: u32, x: f64) -> f64 {
    if m > l {
        return 0.0;
    }
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (1.0 / (4.0 * PI)).sqrt();
    for i in 1..=m {
        let i = i as f64;
        pmm *= -s * ((2.0 * i + 1.0) / (2.0 * i)).sqrt();
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut pm1 = x * (2.0 * mf + 3.0).sqrt() * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pm2 = pmm;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0) * (lf - 1.0) - mf * mf) / (4.0 * (lf - 1.0) * (lf - 1.0) - 1.0)).sqrt();
        let p = a * (x * pm1 - b * pm2);
        pm2 = pm1;
        pm1 = p;
    }
    pm1
}

/// `Y_l^m(θ, φ)` with the Condon–Shortley phase.
pub fn spherical_harmonic(l: u32, m: i32, theta: f64, phi: f64) -> Complex64 {
    if m.unsigned_abs() > l {
        return Complex64::new(0.0, 0.0);
    }
    let p = assoc_legendre_normalized(l, m.unsigned_abs(), theta.cos());
    let y = Complex64::from_polar(p, m.unsigned_abs() as f64 * phi);
    if m >= 0 {
        y
    } else if m % 2 == 0 {
        y.conj()
    } else {
        -y.conj()
    }
}

/// `⟨l m_l, ½ m_s | j μ⟩` with `m_l = μ − m_s` (all projections doubled).
pub fn clebsch_gordan_half(l: u32, two_j: u32, two_mu: i32, two_ms: i32) -> f64 {
    let two_ml = two_mu - two_ms;
    if two_ml.unsigned_abs() > 2 * l || two_ms.abs() != 1 {
        return 0.0;
    }
    let lf = l as f64;
    let mu = two_mu as f64 / 2.0;
    let den = 2.0 * lf + 1.0;
    if two_j == 2 * l + 1 {
        if two_ms == 1 {
            ((lf + mu + 0.5) / den).sqrt()
        } else {
            ((lf - mu + 0.5) / den).sqrt()
        }
    } else if l > 0 && two_j == 2 * l - 1 {
        if two_ms == 1 {
            -((lf - mu + 0.5) / den).sqrt()
        } else {
            ((lf + mu + 0.5) / den).sqrt()
        }
    } else {
        0.0
    }
}

struct Grid {
    cos_t: Vec<f64>,
    sin_t: Vec<f64>,
    w_t: Vec<f64>,
    phi: Vec<f64>,
    /// ylm[l][l + m][i * N_PHI + j]
    ylm: Vec<Vec<Vec<Complex64>>>,
}

fn grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let (x, w) = gauss_legendre(N_THETA);
        let sin_t: Vec<f64> = x.iter().map(|c| (1.0 - c * c).sqrt()).collect();
        let phi: Vec<f64> = (0..N_PHI).map(|j| 2.0 * PI * j as f64 / N_PHI as f64).collect();
        let mut ylm = Vec::with_capacity(LMAX + 1);
        for l in 0..=LMAX as u32 {
            let mut per_m = Vec::with_capacity(2 * l as usize + 1);
            for m in -(l as i32)..=(l as i32) {
                let mut vals = Vec::with_capacity(N_THETA * N_PHI);
                for &c in &x {
                    let theta = c.acos();
                    for &p in &phi {
                        vals.push(spherical_harmonic(l, m, theta, p));
                    }
                }
                per_m.push(vals);
            }
            ylm.push(per_m);
        }
        Grid {
            cos_t: x,
            sin_t,
            w_t: w,
            phi,
            ylm,
        }
    })
}

/// `∫ Y*_{l₁m₁} A(θ,φ) Y_{l₂m₂} dΩ`.
pub(crate) fn angular_element(l1: u32, m1: i32, op: &Operator, l2: u32, m2: i32) -> Complex64 {
    if m1.unsigned_abs() > l1 || m2.unsigned_abs() > l2 {
        return Complex64::new(0.0, 0.0);
    }
    assert!(
        (l1 as usize) <= LMAX && (l2 as usize) <= LMAX && op.degree() <= 8,
        "angular grid supports l ≤ {LMAX} and operator degree ≤ 8"
    );
    let g = grid();
    let y1 = &g.ylm[l1 as usize][(l1 as i32 + m1) as usize];
    let y2 = &g.ylm[l2 as usize][(l2 as i32 + m2) as usize];
    let dphi = 2.0 * PI / N_PHI as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..N_THETA {
        let mut row = Complex64::new(0.0, 0.0);
        for j in 0..N_PHI {
            let k = i * N_PHI + j;
            let a = op.angular(g.cos_t[i], g.sin_t[i], g.phi[j]);
            if a != 0.0 {
                row += y1[k].conj() * y2[k] * a;
            }
        }
        acc += row * (g.w_t[i] * dphi);
    }
    acc
}

fn cached_radial(n1: u32, l1: u32, n2: u32, l2: u32, k: u32) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32, u32, u32, u32), f64>>> = OnceLock::new();
    let key = if (n1, l1) <= (n2, l2) {
        (n1, l1, n2, l2, k)
    } else {
        (n2, l2, n1, l1, k)
    };
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("radial cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = radial_integral(key.0, key.1, key.2, key.3, key.4)?;
    cache.lock().expect("radial cache poisoned").insert(key, v);
    Ok(v)
}

/// `⟨a|O|b⟩` for spin-orbitals built from Schrödinger–Pauli spinors.
pub(crate) fn spin_orbital_element(a: &Orbital, op: &Operator, b: &Orbital) -> Result<Complex64> {
    let mut ang = Complex64::new(0.0, 0.0);
    for two_ms in [1, -1] {
        let ca = clebsch_gordan_half(a.l, a.two_j, a.two_mu, two_ms);
        let cb = clebsch_gordan_half(b.l, b.two_j, b.two_mu, two_ms);
        if ca == 0.0 || cb == 0.0 {
            continue;
        }
        let ma = (a.two_mu - two_ms) / 2;
        let mb = (b.two_mu - two_ms) / 2;
        ang += angular_element(a.l, ma, op, b.l, mb) * (ca * cb);
    }
    if ang.norm() < 1e-14 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let radial = cached_radial(a.n, a.l, b.n, b.l, op.degree())?;
    if !radial.is_finite() {
        return Err(Error::Convergence {
            what: "radial integral",
            iterations: 0,
            estimate: f64::NAN,
        });
    }
    Ok(ang * radial)
}
