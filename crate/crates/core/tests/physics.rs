//! Cross-module checks of the physics assembly against independent
//! evaluations (closure sums, 3D quadrature, analytic roots).

use qedwall::asymptotics::admixture_tail_a32;
use qedwall::hydrogen::{dipole_channels, mixing_channels, AtomicConstants, LevelLabel};
use qedwall::nonretarded::{
    adiabatic_spectrum, asymptotic_admixtures, commensurability_distances, xi, Measure,
};
use qedwall::oracle::{closure_expectation, ClosureOperator, Kernel, LIntegral, Route};
use qedwall::retarded::{energy_shift, i2, j1, mixing_element, SignedGap};

fn consts() -> AtomicConstants {
    AtomicConstants::default()
}

#[test]
fn mixing_static_limit_matches_direct_cubic_element() {
    let c = consts();
    let direct = closure_expectation(Some(ClosureOperator::MirrorCubic), LevelLabel::P12, LevelLabel::S12, 6)
        .unwrap()
        .direct
        / 32.0;
    let ch = mixing_channels(LevelLabel::P12, LevelLabel::S12, 6, &c).unwrap();
    // every channel, including n = 6, has χ < 1e-4 here
    let z = 1e-4;
    let summed = mixing_element(z, &ch).unwrap() * z.powi(4);
    assert!(((summed - direct) / direct).abs() < 0.02, "{summed} vs {direct}");

    // with more levels the sum approaches the direct value from below
    let mut prev = 0.0;
    for n in 2..=6 {
        let ch = mixing_channels(LevelLabel::P12, LevelLabel::S12, n, &c).unwrap();
        let v = mixing_element(z, &ch).unwrap() * z.powi(4);
        assert!(v > prev && v < direct, "n_max = {n}: {v}");
        prev = v;
    }
}

#[test]
fn two_s_shift_at_918_is_the_bound_state_partial_closure() {
    let c = consts();
    let z: f64 = 918.0;
    let mut values = Vec::new();
    for n in 2..=6 {
        let ch = dipole_channels(LevelLabel::S12, n, &c).unwrap();
        values.push(energy_shift(z, &ch).unwrap() * z.powi(3));
    }
    // n = 2: the 2P manifold carries strength 27 of the 2S dipole sum,
    // i.e. 36 of the 56 in ⟨r∥² + 2z²⟩, giving −36/16 in the static limit
    assert!((values[0] + 36.0 / 16.0).abs() < 1e-2, "{values:?}");
    for w in values.windows(2) {
        assert!(w[1] < w[0], "not approaching −3.5: {values:?}");
    }
    assert!(values[4] > -3.5);
}

#[test]
fn inverse_chi_squared_coefficient_sum() {
    // Σ ℰ_q (d∥² − 2 d_z²) is the difference of Thomas–Reiche–Kuhn sums and
    // vanishes over the complete spectrum
    let c = consts();
    for state in [LevelLabel::S12, LevelLabel::P12, LevelLabel::P32] {
        let sums: Vec<f64> = (2..=6)
            .map(|n| {
                dipole_channels(state, n, &c)
                    .unwrap()
                    .iter()
                    .map(|q| q.gap * (q.d_par_sq - 2.0 * q.d_z_sq))
                    .sum()
            })
            .collect();
        if state == LevelLabel::P32 {
            for w in sums.windows(2) {
                assert!(w[1].abs() < w[0].abs(), "{sums:?}");
            }
        } else {
            // j = 1/2 references are isotropic, so every channel cancels
            assert!(sums.iter().all(|s| s.abs() < 1e-12), "{state}: {sums:?}");
        }
    }
}

#[test]
fn admixture_numbers_at_918() {
    let c = consts();
    let z = 918.0;
    let a = asymptotic_admixtures(z, &c).unwrap();
    assert!((a[0][1] / 1.136e-4 - 1.0).abs() < 1e-3, "{}", a[0][1]);
    let grid: Vec<f64> = (0..120).map(|i| 5000.0 - i as f64 * (5000.0 - z) / 119.0).collect();
    let s = adiabatic_spectrum(&grid, None, &c).unwrap().last().unwrap()[0];
    let w = s.weights();
    let p = w[1] + w[2];
    assert!((p / 1.31e-8 - 1.0).abs() < 0.05, "{p:e}");
    assert!(((xi(z, &c).unwrap() - p) / p).abs() < 0.05);
}

#[test]
fn diagonal_shift_fine_structure_root_is_analytic() {
    let c = consts();
    let r = commensurability_distances(Measure::DiagonalShift, 3, &c).unwrap();
    let exact = (3.5 / c.fine_structure).cbrt();
    assert!((r.z_fine - exact).abs() < 1e-6 * exact, "{} vs {exact}", r.z_fine);
    let exact_l = (3.5 / c.lamb_shift).cbrt();
    assert!((r.z_lamb - exact_l).abs() < 1e-6 * exact_l);
}

#[test]
fn i2_spot_difference_far_from_the_wall() {
    let gap = -consts().lamb_shift;
    let (za, zb) = (1e6, 1.37e6);
    let g = SignedGap::new(gap).unwrap();
    let closed = i2(g, za).unwrap() - i2(g, zb).unwrap();
    let oracle = LIntegral::new(Kernel::L2Cos, gap)
        .unwrap()
        .difference(za, zb, Route::Contour)
        .unwrap();
    assert!(((closed - oracle) / oracle).abs() < 1e-7, "{closed} vs {oracle}");
}

#[test]
fn j1_positive_gap_decay_bound() {
    let gap = 0.01;
    let g = SignedGap::new(gap).unwrap();
    for chi in [50.0, 120.0, 700.0, 5e3] {
        let z = chi / (2.0 * gap);
        let v = j1(g, z).unwrap();
        assert!(v.abs() < gap * gap * 10.0 / (chi * chi), "χ = {chi}: {v}");
    }
}

#[test]
fn a32_tail_zero_crossings() {
    let c = consts();
    for k in [7, 20, 101] {
        let z = k as f64 * std::f64::consts::PI / (2.0 * c.lamb_shift);
        let near = admixture_tail_a32(z * (1.0 + 1e-3), &c).unwrap();
        let at = admixture_tail_a32(z, &c).unwrap();
        assert!(at.abs() < 1e-9 * near.abs(), "k = {k}");
    }
}
