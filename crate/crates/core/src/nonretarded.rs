//! Nonretarded mirror-charge interaction of the n = 2 manifold with a
//! perfectly conducting wall at distance 𝒵 below the nucleus.
//!
//! The wall couples 2S₁/₂, 2P₁/₂ and 2P₃/₂ (μ = +1/2). The 3×3 problem is
//! diagonalized along a distance grid and the 𝒮₁/₂ branch is followed by
//! eigenvector overlap, giving the P admixtures and the quenched decay rate.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{clebsch_gordan_half, matrix_element, spherical_harmonic, AtomicConstants, LevelLabel, Operator};
use crate::quad::gauss_legendre;

/// Highest supported expansion order (terms through `𝒵^{-MAX_ORDER}`).
pub const MAX_ORDER: u32 = 9;

/// Expansion order used when none is requested below 𝒵 = 300.
pub const DEFAULT_ORDER_NEAR: u32 = 6;

/// Smallest distance accepted by the adiabatic scan.
pub const MIN_SCAN_Z: f64 = 20.0;

/// Overlaps closer than this make branch assignment ambiguous.
const TRACKING_AMBIGUITY: f64 = 1e-6;

/// Default expansion order for a given distance.
pub fn default_order(z: f64) -> u32 {
    if z < 300.0 {
        DEFAULT_ORDER_NEAR
    } else {
        4
    }
}

fn check_z(z: f64) -> Result<()> {
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::domain("distance", format!("need finite 𝒵 > 0, got {z}")));
    }
    Ok(())
}

/// Exact mirror-charge potential for the electron at `(x, y, z)` relative
/// to the nucleus, the wall being the plane `z = −𝒵`.
pub fn mirror_potential_exact(x: f64, y: f64, z: f64, wall: f64) -> Result<f64> {
    check_z(wall)?;
    if !(z > -wall) {
        return Err(Error::domain(
            "mirror_potential_exact",
            format!("electron at z = {z} is not above the wall at −{wall}"),
        ));
    }
    // ½(−1/(2(z+𝒵)) + 2/ρ − 1/(2𝒵)) regrouped so the O(1/𝒵) pieces cancel
    // analytically: [1/(2𝒵) − 1/(2(z+𝒵))] + [2/ρ − 1/𝒵].
    let s = x * x + y * y;
    let image = (s + (z + 2.0 * wall).powi(2)).sqrt();
    let self_part = z / (2.0 * wall * (z + wall));
    let image_part = -(s + z * z + 4.0 * z * wall) / (wall * image * (2.0 * wall + image));
    Ok(0.5 * (self_part + image_part))
}

/// Operators of the `𝒵^{-(k+1)}` term: `c_z z^k + c_p r^k P_k(cos θ)`.
fn multipole_term(k: u32) -> [(f64, Operator); 2] {
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    [
        (-0.25 * sign, Operator::z_pow(k)),
        (0.5 * sign / 2f64.powi(k as i32), Operator::SolidLegendre(k)),
    ]
}

/// `⟨i|V_k|j⟩` for every expansion index `k = 2..MAX_ORDER−1`.
fn multipole_coefficients() -> Result<&'static Vec<Matrix3<f64>>> {
    static TABLE: OnceLock<std::result::Result<Vec<Matrix3<f64>>, Error>> = OnceLock::new();
    TABLE
        .get_or_init(|| {
            let mut out = vec![Matrix3::zeros(); 2];
            for k in 2..MAX_ORDER {
                let mut m = Matrix3::zeros();
                for a in LevelLabel::ALL {
                    for b in LevelLabel::ALL {
                        let mut v = 0.0;
                        for (c, op) in multipole_term(k) {
                            v += c * matrix_element(&a.orbital(), &op, &b.orbital())?.re;
                        }
                        m[(a.index(), b.index())] = v;
                    }
                }
                out.push(m);
            }
            Ok(out)
        })
        .as_ref()
        .map_err(Clone::clone)
}

/// Free-space diagonal in the basis (2S₁/₂, 2P₁/₂, 2P₃/₂), measured from 2P₁/₂.
pub fn free_diagonal(c: &AtomicConstants) -> [f64; 3] {
    let mut d = [0.0; 3];
    for l in LevelLabel::ALL {
        d[l.index()] = c.level_energy(&l.orbital());
    }
    d
}

/// Wall interaction through `𝒵^{-order}` only (no free-space energies).
pub fn multipole_interaction(z: f64, order: u32) -> Result<Matrix3<f64>> {
    check_z(z)?;
    if !(3..=MAX_ORDER).contains(&order) {
        return Err(Error::domain(
            "multipole order",
            format!("order must be in 3..={MAX_ORDER}, got {order}"),
        ));
    }
    let table = multipole_coefficients()?;
    let mut m = Matrix3::zeros();
    for k in 2..order {
        m += table[k as usize] / z.powi(k as i32 + 1);
    }
    Ok(m)
}

/// Hamiltonian of the coupled n = 2 states: free-space diagonal plus the
/// multipole-expanded wall interaction.
pub fn multipole_matrix(z: f64, order: u32, c: &AtomicConstants) -> Result<Matrix3<f64>> {
    let mut m = multipole_interaction(z, order)?;
    for (i, d) in free_diagonal(c).iter().enumerate() {
        m[(i, i)] += d;
    }
    Ok(m)
}

/// `⟨i|V|j⟩` of the unexpanded potential by direct quadrature over the
/// half-space above the wall. Slow; meant for verification.
pub fn exact_interaction(z: f64) -> Result<Matrix3<f64>> {
    check_z(z)?;
    let (xt, wt) = gauss_legendre(64);
    let (xr, wr) = gauss_legendre(24);
    let r_max = 60.0_f64;
    let panels = 120;
    let h = r_max / panels as f64;
    let orbitals = LevelLabel::ALL.map(|l| l.orbital());
    let mut m = Matrix3::zeros();
    for (ct, w_t) in xt.iter().zip(&wt) {
        let theta = ct.acos();
        let st = theta.sin();
        // spin-summed angular products at φ = 0 (axial symmetry gives 2π)
        let mut ang = [[0.0; 3]; 3];
        for (i, a) in orbitals.iter().enumerate() {
            for (j, b) in orbitals.iter().enumerate() {
                for ms in [1, -1] {
                    let ca = clebsch_gordan_half(a.l, a.two_j, a.two_mu, ms);
                    let cb = clebsch_gordan_half(b.l, b.two_j, b.two_mu, ms);
                    if ca == 0.0 || cb == 0.0 {
                        continue;
                    }
                    let ma = (a.two_mu - ms) / 2;
                    let mb = (b.two_mu - ms) / 2;
                    if ma != mb {
                        continue;
                    }
                    let ya = spherical_harmonic(a.l, ma, theta, 0.0);
                    let yb = spherical_harmonic(b.l, mb, theta, 0.0);
                    ang[i][j] += ca * cb * (ya.conj() * yb).re;
                }
            }
        }
        for p in 0..panels {
            let lo = p as f64 * h;
            for (xg, wg) in xr.iter().zip(&wr) {
                let r = lo + 0.5 * h * (xg + 1.0);
                let zc = r * ct;
                if zc <= -z {
                    continue;
                }
                let v = mirror_potential_exact(r * st, 0.0, zc, z)?;
                let weight = w_t * wg * 0.5 * h * r * r * 2.0 * PI * v;
                let radial: Vec<f64> = orbitals
                    .iter()
                    .map(|o| crate::hydrogen::radial_wavefunction(o.n, o.l, r))
                    .collect::<Result<_>>()?;
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] += weight * ang[i][j] * radial[i] * radial[j];
                    }
                }
            }
        }
    }
    Ok(m)
}

/// One adiabatic eigenstate at a given distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoupledState {
    pub z: f64,
    /// `(a_S, a₁/₂, a₃/₂)`
    pub coefficients: [f64; 3],
    /// Energy on the scale where free 2P₁/₂ is zero.
    pub eigenvalue: f64,
    /// Eigenvalue minus the free-space energy of the branch's parent level.
    pub shift: f64,
    pub branch: LevelLabel,
}

impl CoupledState {
    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(|c| c * c).sum()
    }
    pub fn weights(&self) -> [f64; 3] {
        self.coefficients.map(|c| c * c)
    }
}

/// Eigen-decomposition of the coupled problem at each distance, branches
/// followed by maximal eigenvector overlap with the previous grid point.
/// Result rows are in grid order, entries in (𝒮₁/₂, 𝒫₁/₂, 𝒫₃/₂) order.
pub fn adiabatic_spectrum(
    grid: &[f64],
    order: Option<u32>,
    c: &AtomicConstants,
) -> Result<Vec<[CoupledState; 3]>> {
    check_grid(grid)?;
    let free = free_diagonal(c);
    let decomps: Vec<(Vector3<f64>, Matrix3<f64>)> = grid
        .par_iter()
        .map(|&z| {
            let h = multipole_matrix(z, order.unwrap_or_else(|| default_order(z)), c)?;
            let eig = SymmetricEigen::new(h);
            Ok((eig.eigenvalues, eig.eigenvectors))
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(grid.len());
    // columns of `prev` are the tracked branch vectors
    let mut prev: Option<Matrix3<f64>> = None;
    for (&z, (vals, vecs)) in grid.iter().zip(&decomps) {
        let assignment = match &prev {
            None => initial_assignment(vecs, z)?,
            Some(p) => follow(p, vecs, z)?,
        };
        let mut tracked = Matrix3::zeros();
        let mut row = [CoupledState {
            z,
            coefficients: [0.0; 3],
            eigenvalue: 0.0,
            shift: 0.0,
            branch: LevelLabel::S12,
        }; 3];
        for branch in LevelLabel::ALL {
            let b = branch.index();
            let col = assignment[b];
            let mut v: Vector3<f64> = vecs.column(col).into();
            let reference: f64 = match &prev {
                None => v[b],
                Some(p) => p.column(b).dot(&v),
            };
            if reference < 0.0 {
                v = -v;
            }
            tracked.set_column(b, &v);
            row[b] = CoupledState {
                z,
                coefficients: [v[0], v[1], v[2]],
                eigenvalue: vals[col],
                shift: vals[col] - free[b],
                branch,
            };
        }
        prev = Some(tracked);
        out.push(row);
    }
    Ok(out)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::domain("grid", "empty distance grid"));
    }
    if let Some(bad) = grid.iter().find(|z| !(z.is_finite() && **z > MIN_SCAN_Z)) {
        return Err(Error::domain("grid", format!("distances must exceed {MIN_SCAN_Z}, got {bad}")));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::domain("grid", "distance grid must be strictly monotone"));
    }
    Ok(())
}

/// Column index of each branch: the eigenvector with the largest weight on
/// the branch's own basis state.
fn initial_assignment(vecs: &Matrix3<f64>, z: f64) -> Result<[usize; 3]> {
    pick(|b, col| vecs[(b, col)].abs(), z)
}

fn follow(prev: &Matrix3<f64>, vecs: &Matrix3<f64>, z: f64) -> Result<[usize; 3]> {
    pick(|b, col| prev.column(b).dot(&vecs.column(col)).abs(), z)
}

fn pick(score: impl Fn(usize, usize) -> f64, z: f64) -> Result<[usize; 3]> {
    let mut out = [0usize; 3];
    for (b, slot) in out.iter_mut().enumerate() {
        let mut s: Vec<(f64, usize)> = (0..3).map(|col| (score(b, col), col)).collect();
        s.sort_by(|x, y| y.0.total_cmp(&x.0));
        if s[0].0 - s[1].0 < TRACKING_AMBIGUITY {
            return Err(Error::Tracking {
                z,
                first: s[0].0,
                second: s[1].0,
            });
        }
        *slot = s[0].1;
    }
    if out[0] == out[1] || out[0] == out[2] || out[1] == out[2] {
        return Err(Error::Tracking {
            z,
            first: score(0, out[0]),
            second: score(1, out[1]),
        });
    }
    Ok(out)
}

/// Window where the first-order admixture formulas hold: `ℒ^{-1/4} < 𝒵 < 1/ℒ`.
pub fn admixture_window(c: &AtomicConstants) -> (f64, f64) {
    (c.lamb_shift.powf(-0.25), 1.0 / c.lamb_shift)
}

fn check_window(z: f64, c: &AtomicConstants) -> Result<()> {
    check_z(z)?;
    let (lo, hi) = admixture_window(c);
    if !(z > lo && z < hi) {
        return Err(Error::OutOfRegime {
            detail: format!("𝒵 = {z} outside the admixture window ({lo:.1}, {hi:.3e})"),
        });
    }
    Ok(())
}

/// First-order coefficient triples `(a, b, c)` of the 𝒮₁/₂, 𝒫₁/₂ and 𝒫₃/₂
/// states in the basis (2S₁/₂, 2P₁/₂, 2P₃/₂).
pub fn asymptotic_admixtures(z: f64, c: &AtomicConstants) -> Result<[[f64; 3]; 3]> {
    check_window(z, c)?;
    let (l, f) = (c.lamb_shift, c.fine_structure);
    let z3 = z.powi(3);
    let z4 = z3 * z;
    let inv_2r2 = 1.0 / (2.0 * 2f64.sqrt());
    Ok([
        [1.0, 3f64.sqrt() / 2.0 * 15.0 / (l * z4), (1.5f64).sqrt() * 15.0 / (f * z4)],
        [-(0.75f64).sqrt() * 15.0 / (l * z4), 1.0, inv_2r2 / (f * z3)],
        [-(1.5f64).sqrt() * 15.0 / (f * z4), inv_2r2 / ((l + f) * z3), 1.0],
    ])
}

/// Total P admixture `Ξ = |a₁/₂|² + |a₃/₂|² = (675/2)(1/ℱ² + 1/(2ℒ²))/𝒵⁸`.
pub fn xi(z: f64, c: &AtomicConstants) -> Result<f64> {
    check_window(z, c)?;
    Ok(xi_prefactor(c) / z.powi(8))
}

/// `(675/2)(1/ℱ² + 1/(2ℒ²))`
pub fn xi_prefactor(c: &AtomicConstants) -> f64 {
    337.5 * (1.0 / c.fine_structure.powi(2) + 0.5 / c.lamb_shift.powi(2))
}

/// Quenched 2S width `Γ₂S + Γ₂P Ξ(𝒵)`.
pub fn gamma_eff(z: f64, c: &AtomicConstants) -> Result<f64> {
    Ok(c.gamma_2s + c.gamma_2p * xi(z, c)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayProfile {
    pub z: f64,
    pub xi: f64,
    pub gamma_eff: f64,
}

pub fn decay_profile(z: f64, c: &AtomicConstants) -> Result<DecayProfile> {
    Ok(DecayProfile {
        z,
        xi: xi(z, c)?,
        gamma_eff: gamma_eff(z, c)?,
    })
}

/// Bisection for a sign change of `f` on `[lo, hi]`, in `ln 𝒵`.
pub(crate) fn bisect_log(
    what: &str,
    f: impl Fn(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let (fa, fb) = (f(lo)?, f(hi)?);
    if fa == 0.0 {
        return Ok(lo);
    }
    if fb == 0.0 {
        return Ok(hi);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoRoot {
            what: what.to_owned(),
            lo,
            hi,
        });
    }
    let mut fa = fa;
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m.exp())?;
        if fm == 0.0 {
            return Ok(m.exp());
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
        if (b - a) < rel_tol {
            break;
        }
    }
    Ok((0.5 * (a + b)).exp())
}

/// Distance where `Γ_eff = 2 Γ₂S`.
pub fn doubling_distance(c: &AtomicConstants) -> Result<f64> {
    let (lo, hi) = admixture_window(c);
    let lo = lo * (1.0 + 1e-9);
    let hi = hi * (1.0 - 1e-9);
    bisect_log("doubling distance", |z| Ok(gamma_eff(z, c)? - 2.0 * c.gamma_2s), lo, hi, 1e-12)
}

/// What "wall interaction" is compared with ℒ and ℱ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Measure {
    /// `|V_SS|`, the wall shift of 2S₁/₂.
    DiagonalShift,
    /// `|V_SS − V_P½P½|`, the change of the 2S₁/₂–2P₁/₂ separation.
    DiagonalSplitting,
    /// `|V_SP½|`
    OffDiagonalP12,
    /// `|V_SP3/2|`
    OffDiagonalP32,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::DiagonalShift,
        Measure::DiagonalSplitting,
        Measure::OffDiagonalP12,
        Measure::OffDiagonalP32,
    ];

    pub fn evaluate(self, z: f64, order: u32) -> Result<f64> {
        let v = multipole_interaction(z, order)?;
        Ok(match self {
            Measure::DiagonalShift => v[(0, 0)].abs(),
            Measure::DiagonalSplitting => (v[(0, 0)] - v[(1, 1)]).abs(),
            Measure::OffDiagonalP12 => v[(0, 1)].abs(),
            Measure::OffDiagonalP32 => v[(0, 2)].abs(),
        })
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Measure::DiagonalShift => "diagonal-shift",
            Measure::DiagonalSplitting => "diagonal-splitting",
            Measure::OffDiagonalP12 => "off-diagonal-p12",
            Measure::OffDiagonalP32 => "off-diagonal-p32",
        })
    }
}

impl FromStr for Measure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::domain("measure", format!("unknown measure `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Commensurability {
    pub measure: Measure,
    pub order: u32,
    /// Distance where the measure equals ℒ.
    pub z_lamb: f64,
    /// Distance where the measure equals ℱ.
    pub z_fine: f64,
}

/// Distances at which the chosen interaction measure equals ℒ and ℱ.
pub fn commensurability_distances(measure: Measure, order: u32, c: &AtomicConstants) -> Result<Commensurability> {
    let (lo, hi) = (1.0, 1e5);
    let root = |target: f64| {
        bisect_log(
            &format!("{measure} = {target:e}"),
            |z| Ok(measure.evaluate(z, order)? - target),
            lo,
            hi,
            1e-12,
        )
    };
    Ok(Commensurability {
        measure,
        order,
        z_lamb: root(c.lamb_shift)?,
        z_fine: root(c.fine_structure)?,
    })
}
