//! Direct 3D quadrature with explicit Cartesian hydrogen spinors, used to
//! check operator products and the matrix-element machinery from outside.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{matrix_element, AtomicConstants, LevelLabel, Operator, Orbital};
use crate::quad::gauss_legendre;

/// Operator products `A·B` whose closure sums are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClosureOperator {
    /// `r∥² + 2z² = x·x + y·y + 2 z·z`.
    MirrorQuadratic,
    /// `3z(r∥² + 2z²) = z · 3(r∥² + 2z²)`.
    MirrorCubic,
}

/// Direct value, truncated closure sum and their gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosureCheck {
    pub direct: f64,
    pub partial: f64,
    pub gap: f64,
    pub n_max: u32,
}

/// Explicit spinor `(↑, ↓)` components of an n ≤ 2 state.
fn spinor(state: &Orbital, x: f64, y: f64, z: f64) -> [Complex64; 2] {
    let r = (x * x + y * y + z * z).sqrt();
    let e = (-r / state.n as f64).exp();
    let zero = Complex64::new(0.0, 0.0);
    let pi = std::f64::consts::PI;
    if state.n == 1 {
        let psi = Complex64::new(e / pi.sqrt(), 0.0);
        return if state.two_mu > 0 { [psi, zero] } else { [zero, psi] };
    }
    let n0 = 1.0 / (4.0 * (2.0 * pi).sqrt());
    let s = Complex64::new(n0 * (2.0 - r) * e, 0.0);
    let p0 = Complex64::new(n0 * z * e, 0.0);
    let np = e / (8.0 * pi.sqrt());
    let p_plus = -Complex64::new(x, y) * np;
    let p_minus = Complex64::new(x, -y) * np;
    let a = (1.0_f64 / 3.0).sqrt();
    let b = (2.0_f64 / 3.0).sqrt();
    match (state.l, state.two_j, state.two_mu) {
        (0, 1, 1) => [s, zero],
        (0, 1, -1) => [zero, s],
        (1, 1, 1) => [-p0 * a, p_plus * b],
        (1, 1, -1) => [-p_minus * b, p0 * a],
        (1, 3, 3) => [p_plus, zero],
        (1, 3, 1) => [p0 * b, p_plus * a],
        (1, 3, -1) => [p_minus * a, p0 * b],
        (1, 3, -3) => [zero, p_minus],
        _ => unreachable!("explicit spinors cover n ≤ 2 only"),
    }
}

struct Grid {
    points: Vec<[f64; 4]>,
}

fn grid() -> &'static Grid {
    static GRID: OnceLock<Grid> = OnceLock::new();
    GRID.get_or_init(|| {
        let (rx, rw) = gauss_legendre(16);
        let (cx, cw) = gauss_legendre(24);
        let n_phi = 24;
        let panels = 30;
        let r_max = 60.0;
        let h = r_max / panels as f64;
        let mut points = Vec::new();
        for p in 0..panels {
            for (xi, wi) in rx.iter().zip(&rw) {
                let r = h * (p as f64 + 0.5 * (xi + 1.0));
                let wr = 0.5 * h * wi * r * r;
                for (ct, wt) in cx.iter().zip(&cw) {
                    let st = (1.0 - ct * ct).sqrt();
                    for k in 0..n_phi {
                        let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
                        let w = wr * wt * 2.0 * std::f64::consts::PI / n_phi as f64;
                        points.push([r * st * phi.cos(), r * st * phi.sin(), r * ct, w]);
                    }
                }
            }
        }
        Grid { points }
    })
}

fn check_explicit(state: &Orbital) -> Result<()> {
    if state.n > 2 {
        return Err(Error::domain("closure oracle", format!("explicit spinors cover n ≤ 2, got {}", state.label())));
    }
    Ok(())
}

/// `⟨a|f(x,y,z)|b⟩` by direct 3D quadrature.
pub fn direct_element<F: Fn(f64, f64, f64) -> f64>(a: &Orbital, f: F, b: &Orbital) -> Result<Complex64> {
    check_explicit(a)?;
    check_explicit(b)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for &[x, y, z, w] in &grid().points {
        let sa = spinor(a, x, y, z);
        let sb = spinor(b, x, y, z);
        let overlap = sa[0].conj() * sb[0] + sa[1].conj() * sb[1];
        sum += overlap * (w * f(x, y, z));
    }
    Ok(sum)
}

fn quadratic(x: f64, y: f64, z: f64) -> f64 {
    x * x + y * y + 2.0 * z * z
}

/// Direct `⟨m|AB|n⟩` against the closure sum truncated to bound states with
/// principal quantum number up to `n_max`.
pub fn closure_expectation(op: Option<ClosureOperator>, m: LevelLabel, n: LevelLabel, n_max: u32) -> Result<ClosureCheck> {
    if !(1..=6).contains(&n_max) {
        return Err(Error::domain("closure_expectation", format!("n_max must be in 1..=6, got {n_max}")));
    }
    let Some(op) = op else {
        return Ok(ClosureCheck {
            direct: 0.0,
            partial: 0.0,
            gap: 0.0,
            n_max,
        });
    };
    let (mo, no) = (m.orbital(), n.orbital());
    let direct = match op {
        ClosureOperator::MirrorQuadratic => direct_element(&mo, quadratic, &no)?.re,
        ClosureOperator::MirrorCubic => direct_element(&mo, |x, y, z| 3.0 * z * quadratic(x, y, z), &no)?.re,
    };
    let mut partial = Complex64::new(0.0, 0.0);
    let three_quad = Operator::monomials(vec![(3.0, [2, 0, 0]), (3.0, [0, 2, 0]), (6.0, [0, 0, 2])]);
    for level in Orbital::levels_up_to(n_max) {
        for q in level.sublevels() {
            match op {
                ClosureOperator::MirrorQuadratic => {
                    for (w, a) in [(1.0, Operator::x()), (1.0, Operator::y()), (2.0, Operator::z())] {
                        partial += matrix_element(&mo, &a, &q)? * matrix_element(&q, &a, &no)? * w;
                    }
                }
                ClosureOperator::MirrorCubic => {
                    partial += matrix_element(&mo, &Operator::z(), &q)? * matrix_element(&q, &three_quad, &no)?;
                }
            }
        }
    }
    Ok(ClosureCheck {
        direct,
        partial: partial.re,
        gap: direct - partial.re,
        n_max,
    })
}

/// Products `p_zq2` and `p_rparz` through one n = 2 virtual level, summed
/// over its sublevels, with every element from explicit wavefunctions.
pub fn brute_force_mixing_products(m: LevelLabel, n: LevelLabel, level: LevelLabel) -> Result<(f64, f64)> {
    let (mo, no) = (m.orbital(), n.orbital());
    let quad = |x: f64, y: f64, z: f64| x * x + y * y - 2.0 * z * z;
    let mut pz = Complex64::new(0.0, 0.0);
    let mut pr = Complex64::new(0.0, 0.0);
    for q in level.orbital().sublevels() {
        let zq = |_: f64, _: f64, z: f64| z;
        pz += direct_element(&mo, zq, &q)? * direct_element(&q, quad, &no)?;
        pz += direct_element(&mo, quad, &q)? * direct_element(&q, zq, &no)?;
        let xs = |x: f64, _: f64, _: f64| x;
        let ys = |_: f64, y: f64, _: f64| y;
        let xz = |x: f64, _: f64, z: f64| x * z;
        let yz = |_: f64, y: f64, z: f64| y * z;
        pr += direct_element(&mo, xs, &q)? * direct_element(&q, xz, &no)?;
        pr += direct_element(&mo, xz, &q)? * direct_element(&q, xs, &no)?;
        pr += direct_element(&mo, ys, &q)? * direct_element(&q, yz, &no)?;
        pr += direct_element(&mo, yz, &q)? * direct_element(&q, ys, &no)?;
    }
    Ok((pz.re, pr.re))
}

/// `[(table p_zq2, brute p_zq2), (table p_rparz, brute p_rparz)]`.
pub fn compare_mixing_channel(
    m: LevelLabel,
    n: LevelLabel,
    level: LevelLabel,
    constants: &AtomicConstants,
) -> Result<[(f64, f64); 2]> {
    let table = crate::hydrogen::mixing_channel(&m.orbital(), &n.orbital(), &level.orbital(), constants)?;
    let brute = brute_force_mixing_products(m, n, level)?;
    Ok([(table.p_zq2, brute.0), (table.p_rparz, brute.1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_states_are_orthonormal() {
        let states: Vec<Orbital> = [LevelLabel::S12, LevelLabel::P12, LevelLabel::P32]
            .iter()
            .flat_map(|l| l.orbital().sublevels().collect::<Vec<_>>())
            .collect();
        for a in &states {
            for b in &states {
                let v = direct_element(a, |_, _, _| 1.0, b).unwrap();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((v - expect).norm() < 1e-12, "{} {}", a.label(), b.label());
            }
        }
    }

    #[test]
    fn explicit_dipole_matches_angular_algebra() {
        for a in LevelLabel::P32.orbital().sublevels().chain(LevelLabel::P12.orbital().sublevels()) {
            for b in LevelLabel::S12.orbital().sublevels() {
                for (op, f) in [
                    (Operator::x(), (|x: f64, _: f64, _: f64| x) as fn(f64, f64, f64) -> f64),
                    (Operator::y(), |_, y, _| y),
                    (Operator::z(), |_, _, z| z),
                ] {
                    let alg = matrix_element(&a, &op, &b).unwrap();
                    let brute = direct_element(&a, f, &b).unwrap();
                    assert!((alg - brute).norm() < 1e-10, "{} {}", a.label(), b.label());
                }
            }
        }
    }

    #[test]
    fn two_s_mirror_quadratic_is_56() {
        let c = closure_expectation(Some(ClosureOperator::MirrorQuadratic), LevelLabel::S12, LevelLabel::S12, 2).unwrap();
        assert!((c.direct - 56.0).abs() < 1e-8, "{}", c.direct);
        // n = 2 dipole strength 27 in (x², y², 2z²) weights gives 36
        assert!((c.partial - 36.0).abs() < 1e-9, "{}", c.partial);
    }

    #[test]
    fn closure_improves_with_n_max() {
        let mut last = f64::INFINITY;
        for n_max in 2..=6 {
            let c = closure_expectation(Some(ClosureOperator::MirrorQuadratic), LevelLabel::S12, LevelLabel::S12, n_max)
                .unwrap();
            assert!(c.gap.abs() < last);
            last = c.gap.abs();
        }
    }

    #[test]
    fn zero_operator() {
        let c = closure_expectation(None, LevelLabel::P12, LevelLabel::S12, 3).unwrap();
        assert_eq!(c.direct, 0.0);
        assert_eq!(c.partial, 0.0);
    }

    #[test]
    fn brute_force_products_match_table() {
        let c = AtomicConstants::default();
        for (m, n, q) in [
            (LevelLabel::P12, LevelLabel::S12, LevelLabel::P32),
            (LevelLabel::P32, LevelLabel::S12, LevelLabel::P12),
            (LevelLabel::P32, LevelLabel::S12, LevelLabel::P32),
        ] {
            for (table, brute) in compare_mixing_channel(m, n, q, &c).unwrap() {
                assert!((table - brute).abs() < 1e-8 * table.abs().max(1.0), "{m} {n} {q}: {table} vs {brute}");
            }
        }
    }
}
