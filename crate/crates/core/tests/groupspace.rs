use std::f64::consts::PI;

use liouville_lab::groupspace::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_coords(rng: &mut impl Rng) -> GroupCoordinates {
    GroupCoordinates::new(
        rng.random_range(-PI..PI),
        rng.random_range(0.0..PI),
        rng.random_range(-PI..PI),
    )
}

fn random_euler(rng: &mut impl Rng) -> EulerAngles {
    EulerAngles::new(
        rng.random_range(-PI..PI),
        rng.random_range(0.0..PI),
        rng.random_range(-PI..PI),
    )
}

fn unitary(c: (f64, f64, f64)) -> UnitaryOperator {
    build_unitary(GroupCoordinates::new(c.0, c.1, c.2))
}

fn state(re0: f64, im0: f64, re1: f64, im1: f64) -> Option<QuantumState> {
    QuantumState::normalized([Complex64::new(re0, im0), Complex64::new(re1, im1)]).ok()
}

#[test]
fn random_round_trips_reproduce_the_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let u = build_unitary(random_coords(&mut rng));
        let back = build_unitary(decompose_unitary(&u).unwrap());
        assert!(u.frobenius_distance(&back) < 1e-9);
    }
}

#[test]
fn gimbal_points_round_trip() {
    for theta in [0.0, PI] {
        let u = build_unitary(GroupCoordinates::new(0.7, theta, 1.9));
        let c = decompose_unitary(&u).unwrap();
        assert!(c.is_gimbal());
        assert_eq!(c.omega, 0.0);
        assert!(u.frobenius_distance(&build_unitary(c)) < 1e-12);
    }
}

#[test]
fn haar_total_mass_is_four_pi_squared() {
    let m = su2_model_total_mass(1e-10);
    assert!((m / (4.0 * PI * PI) - 1.0).abs() < 1e-6, "{m}");
}

#[test]
fn so3_jacobians_match_the_sine_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    while checked < 100 {
        let (g, x) = (random_euler(&mut rng), random_euler(&mut rng));
        let image = compose_so3(&g, &x);
        if x.theta.sin() < 1e-2 || image.angles.theta.sin() < 1e-2 {
            continue;
        }
        let fd = so3_translation_jacobian(&g, &x, 1e-5).unwrap();
        let exact = so3_translation_jacobian_analytic(&g, &x);
        assert!((fd / exact - 1.0).abs() < 1e-4, "{fd} vs {exact}");
        checked += 1;
    }
}

#[test]
fn so3_composition_matches_matrix_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let (a, b) = (random_euler(&mut rng), random_euler(&mut rng));
        let product = matmul3(&a.rotation_matrix(), &b.rotation_matrix());
        let composed = compose_so3(&a, &b).angles.rotation_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert!((product[i][j] - composed[i][j]).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn jacobian_rejects_singular_points_and_bad_steps() {
    let g = EulerAngles::new(0.3, 1.0, 0.2);
    assert!(matches!(
        so3_translation_jacobian(&g, &EulerAngles::new(0.1, 0.0, 0.4), 1e-5),
        Err(GroupError::NearSingular { .. })
    ));
    assert!(matches!(
        so3_translation_jacobian(&g, &EulerAngles::new(0.1, 1.0, 0.4), 1e-2),
        Err(GroupError::InvalidStep { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_distance_is_bi_invariant(
        u in (-PI..PI, 0.0..PI, -PI..PI), v in (-PI..PI, 0.0..PI, -PI..PI), w in (-PI..PI, 0.0..PI, -PI..PI),
    ) {
        let (u, v, w) = (unitary(u), unitary(v), unitary(w));
        let d = group_distance(&u, &v).unwrap();
        prop_assert!((group_distance(&(w * u), &(w * v)).unwrap() - d).abs() < 1e-12);
        prop_assert!((group_distance(&(u * w), &(v * w)).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn state_distance_is_invariant(
        a in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        b in (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
        w in (-PI..PI, 0.0..PI, -PI..PI),
    ) {
        let (Some(a), Some(b)) = (state(a.0, a.1, a.2, a.3), state(b.0, b.1, b.2, b.3)) else {
            return Ok(());
        };
        let w = unitary(w);
        let d = state_distance(&a, &b).unwrap();
        prop_assert!((state_distance(&w.apply(&a), &w.apply(&b)).unwrap() - d).abs() < 1e-12);
    }

    #[test]
    fn decomposition_is_canonical(c in (-PI..PI, 0.0..PI, -PI..PI)) {
        let coords = decompose_unitary(&unitary(c)).unwrap();
        prop_assert!(coords.is_canonical());
    }
}
