use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use qbs_core::beam_splitter::{bs_matrix, brute_force_distribution, output_distribution, BsParams, FockPair};
use qbs_core::cli::format_number;
use qbs_core::entanglement::{schmidt_spectrum, von_neumann_entropy};
use qbs_core::hom::{balanced_tbs_nearest, hom_curve_scaled, reflectance_moments, ScaledHom};
use qbs_core::waveguide::{averaged_schmidt_modes_scaled, reflectance_at, DetuningSpread};

fn pair() -> impl Strategy<Value = FockPair> {
    (0usize..=12, 0usize..=12).prop_map(|(a, b)| FockPair::new(a, b).unwrap())
}

fn phase() -> impl Strategy<Value = f64> {
    -PI..PI
}

proptest! {
    #[test]
    fn output_distribution_is_normalized(p in pair(), r in 0.0f64..=1.0, phi in phase()) {
        let d = output_distribution(p, &BsParams::new(r, phi).unwrap());
        prop_assert!((d.normalization() - 1.0).abs() < 1e-9);
        prop_assert!(d.probs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn splitter_matrix_is_unitary(r in 0.0f64..=1.0, phi in phase()) {
        let u = bs_matrix(&BsParams::new(r, phi).unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let dot: Complex64 = (0..2).map(|k| u[i][k] * u[j][k].conj()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((dot - want).norm() < 1e-14, "({i},{j}) = {dot}");
            }
        }
    }

    #[test]
    fn distribution_does_not_depend_on_phase(p in pair(), r in 0.0f64..=1.0, a in phase(), b in phase()) {
        let da = output_distribution(p, &BsParams::new(r, a).unwrap());
        let db = output_distribution(p, &BsParams::new(r, b).unwrap());
        for (x, y) in da.probs.iter().zip(&db.probs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn entropy_is_symmetric_under_r_to_t(p in pair(), r in 0.0f64..=1.0) {
        let a = schmidt_spectrum(p, &BsParams::with_reflectance(r).unwrap());
        let b = schmidt_spectrum(p, &BsParams::with_reflectance(1.0 - r).unwrap());
        prop_assert!((a.s_n - b.s_n).abs() < 1e-10, "{} vs {}", a.s_n, b.s_n);
        prop_assert!((a.k_param - b.k_param).abs() < 1e-8 * a.k_param);
    }

    #[test]
    fn entropy_is_bounded_by_dimension(p in pair(), r in 0.0f64..=1.0) {
        let s = schmidt_spectrum(p, &BsParams::with_reflectance(r).unwrap());
        prop_assert!(s.s_n >= 0.0);
        prop_assert!(s.s_n <= ((p.total() + 1) as f64).ln() + 1e-12);
        prop_assert!(s.k_param >= 1.0 - 1e-12 && s.k_param <= (p.total() + 1) as f64 + 1e-9);
    }

    #[test]
    fn closed_form_matches_operator_expansion(
        (a, b) in (0usize..=5, 0usize..=5),
        r in 0.0f64..=1.0,
        phi in phase(),
    ) {
        let p = FockPair::new(a, b).unwrap();
        let bs = BsParams::new(r, phi).unwrap();
        let fast = output_distribution(p, &bs);
        let slow = brute_force_distribution(p, &bs);
        for (x, y) in fast.probs.iter().zip(&slow.probs) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn reflectance_stays_under_envelope(eps in -20.0f64..20.0, t in 0.0f64..200.0) {
        let r = reflectance_at(eps, t);
        prop_assert!(r >= 0.0);
        prop_assert!(r <= 1.0 / (1.0 + eps * eps) + 1e-15);
    }

    #[test]
    fn averaged_modes_are_normalized(
        (a, b) in (0usize..=4, 0usize..=4),
        sigma in 1e-4f64..3.0,
        t in 0.0f64..30.0,
    ) {
        let p = FockPair::new(a, b).unwrap();
        let s = averaged_schmidt_modes_scaled(p, &DetuningSpread::identical(sigma), t).unwrap();
        prop_assert!((s.normalization() - 1.0).abs() < 1e-9);
        prop_assert!(s.s_n <= ((p.total() + 1) as f64).ln() + 1e-12);
    }

    #[test]
    fn narrow_band_reduces_to_monochromatic(
        (a, b) in (0usize..=3, 0usize..=3),
        t in 0.0f64..20.0,
    ) {
        let p = FockPair::new(a, b).unwrap();
        let avg = averaged_schmidt_modes_scaled(p, &DetuningSpread::identical(1e-6), t).unwrap();
        let mono = output_distribution(p, &BsParams::with_reflectance((t / 2.0).sin().powi(2)).unwrap());
        for (x, y) in avg.lambdas.iter().zip(&mono.probs) {
            prop_assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_delay_coincidence_is_reflectance_spread(g in 0.01f64..2.5, t in 0.0f64..20.0) {
        let (m1, m2) = reflectance_moments(g, t).unwrap();
        let p0 = ScaledHom::identical(g, t).coincidence(0.0).unwrap();
        prop_assert!((p0 - (1.0 - 4.0 * m1 + 4.0 * m2)).abs() < 1e-10, "{p0}");
    }

    #[test]
    fn coincidence_is_a_probability(
        g in 0.0f64..2.5,
        t in 0.0f64..20.0,
        b in 0.05f64..=1.0,
        det in -2.0f64..2.0,
        x in 0.0f64..60.0,
    ) {
        let h = ScaledHom { omega_g_over_omega: g, omega_tbs: t, b_param: b, detuning: det };
        let p = h.coincidence(x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p), "{p}");
    }

    #[test]
    fn formatted_numbers_keep_twelve_digits(x in prop::num::f64::NORMAL) {
        let back: f64 = format_number(x).parse().unwrap();
        prop_assert!((back - x).abs() <= 5e-12 * x.abs(), "{x} -> {}", format_number(x));
    }

    #[test]
    fn entropy_of_any_distribution_is_bounded(w in prop::collection::vec(0.0f64..1.0, 1..30)) {
        let total: f64 = w.iter().sum();
        prop_assume!(total > 0.0);
        let p: Vec<f64> = w.iter().map(|x| x / total).collect();
        let s = von_neumann_entropy(&p);
        prop_assert!(s >= 0.0 && s <= (p.len() as f64).ln() + 1e-12);
    }
}

#[test]
fn visibility_degrades_with_bandwidth() {
    let delays: Vec<f64> = (0..=60).map(|i| i as f64).collect();
    let mut last = f64::INFINITY;
    for g in [0.0, 0.25, 0.5, 1.0] {
        let t = balanced_tbs_nearest(g, 2.5 * PI, 40.0).unwrap().expect("balanced coupler exists");
        let v = hom_curve_scaled(&ScaledHom::identical(g, t), &delays).unwrap().visibility.unwrap();
        assert!(v <= last + 1e-12, "V({g}) = {v} exceeds {last}");
        assert!(v > 0.0 && v <= 1.0 + 1e-12);
        last = v;
    }
    assert!(last < 0.99);
}
