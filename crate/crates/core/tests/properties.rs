//! Randomized invariants of the spectral operators, the jet algebra and the
//! certificate logic.

use gch_core::certificates::{sigma_default, validate_sigma};
use gch_core::spectral::SpectralWorkspace;
use gch_core::symbolic::forms::{wedge, OneForm};
use gch_core::symbolic::JetPoly;
use proptest::prelude::*;

/// Smooth periodic field from a handful of low Fourier modes.
fn field_from_modes(n: usize, modes: &[(usize, f64, f64)]) -> Vec<f64> {
    let l = 20.0;
    (0..n)
        .map(|i| {
            let x = -l + 2.0 * l * i as f64 / n as f64;
            modes
                .iter()
                .map(|&(j, a, b)| {
                    let k = std::f64::consts::PI * j as f64 / l;
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum()
        })
        .collect()
}

fn mode_strategy() -> impl Strategy<Value = Vec<(usize, f64, f64)>> {
    prop::collection::vec((0usize..12, -2.0f64..2.0, -2.0f64..2.0), 1..6)
}

/// Sparse random differential polynomial in v0..v3.
fn poly_strategy() -> impl Strategy<Value = JetPoly> {
    prop::collection::vec(((0usize..4, 1u32..3), -9i64..10), 1..5).prop_map(|terms| {
        let mut p = JetPoly::zero();
        for ((jet, e), c) in terms {
            if c != 0 {
                p = p + JetPoly::jet(jet).pow(e).scale_rat(c, 1);
            }
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn helmholtz_round_trips(modes in mode_strategy(), log2n in 8u32..12) {
        let n = 1usize << log2n;
        let ws = SpectralWorkspace::new(20.0, n).unwrap();
        let u = field_from_modes(n, &modes);
        let back = ws.helmholtz_invert(&ws.helmholtz_apply(&u).unwrap()).unwrap();
        let scale = u.iter().fold(1e-30f64, |a, &b| a.max(b.abs()));
        for (a, b) in u.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn wedge_is_antisymmetric(p in poly_strategy(), q in poly_strategy(),
                              r in poly_strategy(), s in poly_strategy()) {
        let a = OneForm { dchi: p, dtau: q };
        let b = OneForm { dchi: r, dtau: s };
        let ab = wedge(&a, &b);
        let ba = wedge(&b, &a);
        prop_assert!((&ab.coeff + &ba.coeff).is_zero());
        prop_assert!(wedge(&a, &a).is_zero());
    }

    #[test]
    fn euler_annihilates_total_derivatives(p in poly_strategy()) {
        let dp = p.total_x().unwrap();
        prop_assert!(dp.euler_op().unwrap().is_zero());
    }

    #[test]
    fn total_x_raises_jet_order_by_one(p in poly_strategy()) {
        if let Some(k) = p.max_jet_order() {
            let dp = p.total_x().unwrap();
            prop_assert_eq!(dp.max_jet_order(), Some(k + 1));
        }
    }

    #[test]
    fn sigma_validation_is_a_half_open_interval(k in 0.0f64..10.0, s in -1.0f64..2.0) {
        let max = sigma_default(k);
        let ok = validate_sigma(s, k).is_ok();
        prop_assert_eq!(ok, s > 0.0 && s <= max);
    }
}
