use std::f64::consts::PI;

use liouville_lab::groupspace::*;
use liouville_lab::pumping::*;
use num_complex::Complex64;
use proptest::prelude::*;

/// Three-step amplitude written out term by term on the slice Θ = Φ, Ω = 0.
fn symbolic_p3_amplitude(phi: f64) -> Complex64 {
    let (s, c) = ((0.5 * phi).sin(), (0.5 * phi).cos());
    let e = |x: f64| Complex64::from_polar(1.0, x);
    e(phi) * c * (-s * c - e(2.0 * phi) * s * c) - e(phi) * s * (-s * s + e(-2.0 * phi) * c * c)
}

/// `(n_x² + n_y²)/2` for the rotation axis of U.
fn analytic_orbit_average(coords: GroupCoordinates) -> f64 {
    let (s, c) = ((0.5 * coords.theta).sin(), (0.5 * coords.theta).cos());
    s * s / (2.0 * (1.0 - c * c * coords.phi.cos().powi(2)))
}

fn incommensurate() -> GroupCoordinates {
    GroupCoordinates::new(0.7, 1.0, -0.3)
}

#[test]
fn identity_never_pumps() {
    let s = pumping_series(GroupCoordinates::identity(), 1000).unwrap();
    assert!(s.p_n.iter().all(|p| *p == 0.0));
    let r = compare_average_to_closed_form(GroupCoordinates::identity(), 10_000).unwrap();
    assert_eq!(r.tail, 0.0);
    assert!(r.converged);
}

#[test]
fn first_step_reads_off_the_matrix() {
    for theta in [0.1, 0.9, 2.5] {
        let s = pumping_series(GroupCoordinates::new(0.4, theta, 1.2), 1).unwrap();
        assert!((s.p_n[0] - (0.5 * theta).sin().powi(2)).abs() < 1e-15);
    }
}

#[test]
fn third_step_matches_symbolic_expansion() {
    for phi in [0.3, 1.0, 1.7, 2.9, -2.2] {
        let coords = GroupCoordinates::new(phi, phi, 0.0);
        let u = build_unitary(coords);
        let u3 = u * u * u;
        let amp = symbolic_p3_amplitude(phi);
        assert!((u3.entry(0, 1) - amp).norm() < 1e-12);
        let s = pumping_series(coords, 3).unwrap();
        assert!((s.p_n[2] - amp.norm_sqr()).abs() < 1e-12);
    }
}

#[test]
fn running_average_is_cesaro_mean() {
    let s = pumping_series(incommensurate(), 500).unwrap();
    let mut sum = 0.0;
    for (n, (p, r)) in s.p_n.iter().zip(&s.running_average).enumerate() {
        sum += p;
        assert!((r - sum / (n + 1) as f64).abs() < 1e-15);
    }
}

#[test]
fn time_average_matches_orbit_oracle() {
    let coords = incommensurate();
    let r = compare_average_to_closed_form(coords, 1_000_000).unwrap();
    assert!(r.converged);
    assert!((r.tail - r.half).abs() < 1e-3);
    assert!(
        (r.tail - r.orbit_average).abs() < 1e-3,
        "{} vs {}",
        r.tail,
        r.orbit_average
    );
    assert!((r.orbit_average - analytic_orbit_average(coords)).abs() < 1e-12);
}

#[test]
fn closed_form_is_reached_on_the_diagonal_slice() {
    for phi in [0.5, 1.3, 2.0, PI - 0.2] {
        let r =
            compare_average_to_closed_form(GroupCoordinates::new(phi, phi, 0.8), 200_000).unwrap();
        assert!(r.deviation.abs() < 1e-3, "Φ = {phi}: {}", r.deviation);
        assert!((r.orbit_average - r.p_g).abs() < 1e-12);
    }
}

#[test]
fn scan_runs_every_triple() {
    let params: Vec<_> = [0.4, 0.8, 1.6]
        .iter()
        .map(|&p| GroupCoordinates::new(p, p, 0.0))
        .collect();
    let rows = pumping_scan(&params, 20_000);
    assert_eq!(rows.len(), 3);
    for (row, c) in rows.iter().zip(&params) {
        assert_eq!(row.as_ref().unwrap().params, *c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn probabilities_are_bounded(phi in -PI..PI, theta in 0.0..PI, omega in -PI..PI) {
        let s = pumping_series(GroupCoordinates::new(phi, theta, omega), 300).unwrap();
        for (p, r) in s.p_n.iter().zip(&s.running_average) {
            prop_assert!((0.0..=1.0).contains(p));
            prop_assert!((0.0..=1.0).contains(r));
        }
    }

    #[test]
    fn closed_form_is_even_and_periodic(phi in -10.0..10.0f64) {
        prop_assume!(phi.abs() > 1e-3);
        let p = geometric_pumping_closed_form(phi);
        prop_assert!((p - geometric_pumping_closed_form(-phi)).abs() < 1e-12);
        prop_assert!((p - geometric_pumping_closed_form(phi + 2.0 * PI)).abs() < 1e-9);
    }

    #[test]
    fn oracle_matches_axis_formula(phi in -PI..PI, theta in 0.01..3.1f64, omega in -PI..PI) {
        let c = GroupCoordinates::new(phi, theta, omega);
        prop_assert!((orbit_average_oracle(c) - analytic_orbit_average(c)).abs() < 1e-12);
    }
}
