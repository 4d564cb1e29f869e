mod common;

use common::*;
use num_complex::Complex64;
use pls_precoding::channel::{
    draw_realization, path_loss_db, steering_vector, trial_rng, user_channel, ArrayGeometry, MultipathParams,
    NodePlacement,
};
use pls_precoding::metrics::{eve_sinr, secrecy_report};
use pls_precoding::numerics::{null_space_basis, pseudo_inverse, svd, CMatrix};
use pls_precoding::precoder::conventional::{conventional_precoders, default_beta, zf_data};
use pls_precoding::precoder::eveaware::{
    dominant_eve_direction, eveaware_precoders, eveaware_unnormalized, limited_eve_direction, direction_overlap,
};
use pls_precoding::precoder::socp::{
    assemble_socp, nonlinear_precoder, select_targets, solve_socp, SinrTargets, SocpStatus,
};
use pls_precoding::precoder::{normalize, LinearVariant, Scheme};
use pls_precoding::ScenarioConfig;
use proptest::prelude::*;

fn unitary_defect(q: &CMatrix) -> f64 {
    (q.adjoint() * q - CMatrix::identity(q.ncols(), q.ncols())).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn svd_is_unitary_and_reconstructs(seed in any::<u64>(), rows in 1usize..=32, cols in 1usize..=32) {
        let a = random_matrix(&mut rng(seed), rows, cols);
        let dec = svd(&a).unwrap();
        prop_assert!(unitary_defect(&dec.left_vectors) <= 1e-10);
        prop_assert!(unitary_defect(&dec.right_vectors) <= 1e-10);
        let mut back = CMatrix::zeros(rows, cols);
        for (l, &s) in dec.singular_values.iter().enumerate() {
            back += dec.left_vectors.column(l) * c(s) * dec.right_vectors.column(l).adjoint();
        }
        prop_assert!((back - &a).norm() <= 1e-10 * a.norm());
        let again = svd(&a).unwrap();
        prop_assert_eq!(dec.left_vectors, again.left_vectors);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pinv_satisfies_penrose(seed in any::<u64>(), rows in 1usize..=12, cols in 1usize..=12, inner in 1usize..=12) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, rows, inner) * random_matrix(&mut r, inner, cols);
        let p = pseudo_inverse(&a).unwrap();
        let ap = &a * &p;
        let pa = &p * &a;
        prop_assert!((&ap * &a - &a).norm() <= 1e-9 * a.norm());
        prop_assert!((&pa * &p - &p).norm() <= 1e-9 * p.norm());
        prop_assert!((ap.adjoint() - &ap).norm() <= 1e-9 * ap.norm());
        prop_assert!((pa.adjoint() - &pa).norm() <= 1e-9 * pa.norm());
    }

    #[test]
    fn null_space_dimension_and_orthonormality(seed in any::<u64>(), rows in 1usize..=10, n in 1usize..=16, rank_cap in 1usize..=10) {
        let mut r = rng(seed);
        let a = random_matrix(&mut r, rows, rank_cap) * random_matrix(&mut r, rank_cap, n);
        let rank = svd(&a).unwrap().rank;
        let basis = null_space_basis(&a).unwrap();
        prop_assert_eq!(basis.ncols() + rank, n);
        prop_assert!(unitary_defect(&basis) <= 1e-10);
        prop_assert!((&a * &basis).norm() <= 1e-10 * a.norm());
    }

    #[test]
    fn steering_vectors_are_unit_norm(n in 1usize..=64, spacing in 0.05f64..2.0, angle in -10.0f64..10.0) {
        let g = ArrayGeometry::new(n, spacing).unwrap();
        prop_assert!((steering_vector(&g, angle).norm() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn path_loss_increases_with_distance_and_carrier(d in 0.0f64..500.0, h in 1.0f64..300.0, f in 0.5f64..100.0, dd in 0.01f64..50.0, df in 0.01f64..10.0) {
        let base = path_loss_db(d, h, f).unwrap();
        prop_assert!(path_loss_db(d + dd, h, f).unwrap() > base);
        prop_assert!(path_loss_db(d, h + dd, f).unwrap() > base);
        prop_assert!(path_loss_db(d, h, f + df).unwrap() > base);
    }

    #[test]
    fn user_channel_is_linear_in_each_gain(seed in any::<u64>(), path in 0usize..5, s in -5.0f64..5.0) {
        let mut r = rng(seed);
        let g = ArrayGeometry::half_wavelength(16);
        let place = NodePlacement::new(40.0, 100.0);
        let gains: Vec<Complex64> = random_matrix(&mut r, 5, 1).iter().copied().collect();
        let angles: Vec<f64> = (0..5).map(|i| 0.5 + 0.1 * i as f64).collect();
        let mp = |gains: Vec<Complex64>| MultipathParams { gains, departure_angles: angles.clone(), arrival_angles: vec![] };
        let h = user_channel(&place, &mp(gains.clone()), &g, 28.0).unwrap();
        let mut zeroed = gains.clone();
        zeroed[path] = c(0.0);
        let h0 = user_channel(&place, &mp(zeroed.clone()), &g, 28.0).unwrap();
        let mut scaled = gains.clone();
        scaled[path] *= s;
        let hs = user_channel(&place, &mp(scaled), &g, 28.0).unwrap();
        // h(s * a_l) = h_without_l + s * (h - h_without_l)
        let expected = &h0 + (&h - &h0) * c(s);
        prop_assert!((hs - &expected).norm() <= 1e-12 * (1.0 + expected.norm()));
    }

    #[test]
    fn realization_is_bit_identical_per_stream(seed in any::<u64>(), trial in any::<u64>()) {
        let cfg = ScenarioConfig { seed, ..ScenarioConfig::default() };
        let a = draw_realization(&mut trial_rng(seed, trial), &cfg).unwrap();
        let b = draw_realization(&mut trial_rng(seed, trial), &cfg).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn zf_orthogonality_and_null_space_invisibility(seed in any::<u64>(), k in 1usize..=15) {
        let (real, rho) = scenario(16, 4, k, seed, 0);
        let h = &real.users;
        let set = conventional_precoders(h, LinearVariant::Zf, default_beta(k, rho), 0.6).unwrap();
        for u in 0..k {
            let hu = h.column(u);
            for j in (0..k).filter(|&j| j != u) {
                let wk = set.data.column(j);
                prop_assert!(hu.dotc(&wk).norm() <= 1e-8 * hu.norm() * wk.norm());
            }
            let an: f64 = set.an.column_iter().map(|v| hu.dotc(&v).norm_sqr()).sum();
            prop_assert!(an <= 1e-16 * hu.norm_squared());
        }
    }

    #[test]
    fn normalize_ignores_column_scaling(seed in any::<u64>(), phi in 0.0f64..=1.0, col in 0usize..3, s in 1e-6f64..1e6) {
        let mut r = rng(seed);
        let w = random_matrix(&mut r, 6, 3);
        let v = random_matrix(&mut r, 6, 2);
        let mut ws = w.clone();
        ws.column_mut(col).scale_mut(s);
        let a = normalize(&w, &v, phi, Scheme::ZfConv).unwrap();
        let b = normalize(&ws, &v, phi, Scheme::ZfConv).unwrap();
        prop_assert!((a.data - b.data).norm() <= 1e-12);
    }

    #[test]
    fn every_scheme_meets_the_power_split(seed in any::<u64>(), k in 1usize..=8, phi_step in 0usize..=10) {
        let phi = phi_step as f64 / 10.0;
        let (real, rho) = scenario(16, 4, k, seed, 1);
        let (h, he) = (&real.users, &real.eve);
        let beta = default_beta(k, rho);
        let full = dominant_eve_direction(he).unwrap();
        let limited = limited_eve_direction(&ArrayGeometry::half_wavelength(16), real.eve_los_angle);
        let sets = vec![
            conventional_precoders(h, LinearVariant::Zf, beta, phi).unwrap(),
            conventional_precoders(h, LinearVariant::Rzf, beta, phi).unwrap(),
            eveaware_precoders(h, &full, LinearVariant::Zf, beta, phi).unwrap(),
            eveaware_precoders(h, &full, LinearVariant::Rzf, beta, phi).unwrap(),
            eveaware_precoders(h, &limited, LinearVariant::Zf, beta, phi).unwrap(),
            eveaware_precoders(h, &limited, LinearVariant::Rzf, beta, phi).unwrap(),
            nonlinear_precoder(h, he, phi, rho).unwrap().precoders,
        ];
        for set in &sets {
            prop_assert!((set.data_power() - phi).abs() <= 1e-9, "{:?}", set.scheme);
            if set.an.ncols() > 0 {
                prop_assert!((set.an_power() - (1.0 - phi)).abs() <= 1e-9, "{:?}", set.scheme);
            }
            let report = secrecy_report(h, he, set, rho).unwrap();
            for &rate in &report.per_user_secrecy_rate {
                prop_assert!(rate.is_finite() && rate >= 0.0);
            }
        }
    }

    #[test]
    fn eve_aware_zf_hides_data_from_eve_and_an_from_users(seed in any::<u64>(), k in 1usize..=15) {
        let (real, rho) = scenario(16, 4, k, seed, 2);
        let h = &real.users;
        let dir = dominant_eve_direction(&real.eve).unwrap();
        let (w, _) = eveaware_unnormalized(h, &dir, LinearVariant::Zf, default_beta(k, rho)).unwrap();
        for u in 0..k {
            let wk = w.column(u);
            prop_assert!(dir.direction.dotc(&wk).norm() <= 1e-8 * wk.norm());
        }
        // interference the normalized AN column causes at each user
        let set = eveaware_precoders(h, &dir, LinearVariant::Zf, default_beta(k, rho), 0.5).unwrap();
        for u in 0..k {
            prop_assert!(h.column(u).dotc(&set.an.column(0)).norm() <= 1e-8);
        }
    }

    #[test]
    fn eve_sinr_never_grows_with_an(seed in any::<u64>(), s in 1.0f64..100.0) {
        let mut r = rng(seed);
        let he = random_matrix(&mut r, 8, 4);
        let mut set = normalize(&random_matrix(&mut r, 8, 3), &random_matrix(&mut r, 8, 2), 0.5, Scheme::RzfConv).unwrap();
        let before = eve_sinr(1, &he, &set, 50.0).unwrap();
        set.an.scale_mut(s);
        prop_assert!(eve_sinr(1, &he, &set, 50.0).unwrap() <= before * (1.0 + 1e-12));
    }
}

#[test]
fn single_path_limited_and_full_directions_coincide() {
    let cfg = ScenarioConfig { n_paths: 1, angle_spread_deg: 0.0, ..ScenarioConfig::default() };
    let bs = ArrayGeometry::half_wavelength(16);
    for trial in 0..50 {
        let real = draw_realization(&mut trial_rng(3, trial), &cfg).unwrap();
        let full = dominant_eve_direction(&real.eve).unwrap();
        let limited = limited_eve_direction(&bs, real.eve_los_angle);
        assert!(direction_overlap(&full.direction, &limited.direction) > 0.999);
    }
}

#[test]
fn socp_solutions_satisfy_constraints_and_relaxing_eve_never_costs_power() {
    for trial in 0..100 {
        let (real, rho) = scenario(16, 4, 4, 77, trial);
        let (h, he) = (&real.users, &real.eve);
        let sel = select_targets(h, he, 0.7, rho).unwrap();
        let sigma = rho.recip().sqrt();
        let tight = solve_socp(&assemble_socp(h, he, &sel.baseline.an, &sel.targets, sigma).unwrap());
        let relaxed_targets = SinrTargets {
            users: sel.targets.users.clone(),
            eve: sel.targets.eve.iter().map(|g| 10.0 * g).collect(),
        };
        let relaxed = solve_socp(&assemble_socp(h, he, &sel.baseline.an, &relaxed_targets, sigma).unwrap());
        assert_eq!(tight.status, SocpStatus::Optimal, "trial {trial}");
        assert_eq!(relaxed.status, SocpStatus::Optimal, "trial {trial}");
        assert!(
            relaxed.objective_value <= tight.objective_value * (1.0 + 1e-6),
            "trial {trial}: {} > {}",
            relaxed.objective_value,
            tight.objective_value
        );
        for k in 0..4 {
            let g = h.column(k).dotc(&tight.precoders.column(k));
            assert!(g.re >= 0.0 && g.im.abs() <= 1e-8 * g.norm(), "trial {trial}: gain {g}");
        }
    }
}

#[test]
fn zf_reduces_to_min_norm_when_overloaded() {
    let (real, _) = scenario(16, 4, 32, 5, 0);
    let w = zf_data(&real.users).unwrap();
    assert_eq!(w.shape(), (16, 32));
    assert!(w.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
}
