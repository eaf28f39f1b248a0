use proptest::prelude::*;

use qedwall::config;
use qedwall::hydrogen::{AtomicConstants, GapConvention, MixingChannel, VirtualChannel};
use qedwall::nonretarded::{adiabatic_spectrum, multipole_matrix};
use qedwall::oracle::hp;
use qedwall::retarded::{energy_shift, mixing_element};
use qedwall::scan::grid;
use qedwall::specfun::{t_and_u, Chi};

fn gap() -> impl Strategy<Value = f64> {
    prop_oneof![(-0.5f64..-1e-6), (1e-6f64..0.5)]
}

fn virtual_channel() -> impl Strategy<Value = VirtualChannel> {
    (gap(), 0.0f64..50.0, 0.0f64..50.0).prop_map(|(gap, d_par_sq, d_z_sq)| VirtualChannel {
        gap,
        d_par_sq,
        d_z_sq,
        label: "q".into(),
    })
}

fn mixing_ch() -> impl Strategy<Value = MixingChannel> {
    (gap(), -50.0f64..50.0, -50.0f64..50.0).prop_map(|(g, pz, pr)| MixingChannel::new(g, pz, pr, "q"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn t_derivative_is_u(x in 1e-2f64..1e3) {
        let h = 1e-5 * x;
        let (tp, _) = t_and_u(Chi::new(x + h).unwrap());
        let (tm, _) = t_and_u(Chi::new(x - h).unwrap());
        let (t, u) = t_and_u(Chi::new(x).unwrap());
        prop_assert!(t > 0.0 && u < 0.0);
        let d = (tp - tm) / (2.0 * h);
        prop_assert!(((d - u) / u).abs() < 1e-6, "x = {}: {} vs {}", x, d, u);
    }

    #[test]
    fn fixed_point_oracle_agrees(x in 1e-3f64..200.0) {
        let v = hp::evaluate(x).unwrap();
        let (t, u) = t_and_u(Chi::new(x).unwrap());
        prop_assert!(((v.t - t) / t).abs() < 1e-12);
        prop_assert!(((v.u - u) / u).abs() < 1e-12);
    }

    #[test]
    fn energy_shift_is_additive(chs in prop::collection::vec(virtual_channel(), 2..6), z in 1.0f64..1e5) {
        let whole = energy_shift(z, &chs).unwrap();
        let split = chs.len() / 2;
        let parts = energy_shift(z, &chs[..split]).unwrap() + energy_shift(z, &chs[split..]).unwrap();
        let scale: f64 = chs.iter().map(|c| energy_shift(z, std::slice::from_ref(c)).unwrap().abs()).sum();
        prop_assert!((whole - parts).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn mixing_is_linear_in_products(ch in mixing_ch(), k in -4.0f64..4.0, z in 1.0f64..1e5) {
        let scaled = MixingChannel::new(ch.gap, k * ch.p_zq2, k * ch.p_rparz, "k");
        let a = mixing_element(z, &[scaled]).unwrap();
        let b = k * mixing_element(z, &[ch]).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300) + 1e-300);
    }

    #[test]
    fn grids_are_strictly_increasing(lo in 1.0f64..1e3, span in 1e-3f64..1e4, n in 2usize..200, log in any::<bool>()) {
        let g = grid(lo, lo + span, n, log).unwrap();
        prop_assert_eq!(g.len(), n);
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(g[0], lo);
        prop_assert!((g[n - 1] - (lo + span)).abs() <= 1e-12 * (lo + span));
    }

    #[test]
    fn config_round_trips(l in 1e-9f64..1e-5, f in 1e-8f64..1e-4, g2s in 1e-18f64..1e-12, g2p in 1e-10f64..1e-6, physical in any::<bool>()) {
        let c = AtomicConstants {
            lamb_shift: l,
            fine_structure: f,
            gamma_2s: g2s,
            gamma_2p: g2p,
            convention: if physical { GapConvention::Physical } else { GapConvention::Nominal },
            ..Default::default()
        };
        prop_assume!(c.validate().is_ok());
        let back = config::parse(&config::render(&c).join("\n"), AtomicConstants::default()).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn spectrum_is_orthonormal_and_keeps_trace(z in 50.0f64..5000.0) {
        let c = AtomicConstants::default();
        let row = adiabatic_spectrum(&[z], None, &c).unwrap()[0];
        let h = multipole_matrix(z, qedwall::nonretarded::default_order(z), &c).unwrap();
        let trace: f64 = row.iter().map(|s| s.eigenvalue).sum();
        prop_assert!((trace - h.trace()).abs() < 1e-12 * h.norm().max(1e-30));
        for (i, a) in row.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                let dot: f64 = a.coefficients.iter().zip(&b.coefficients).map(|(x, y)| x * y).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() < 1e-12);
            }
        }
    }
}
