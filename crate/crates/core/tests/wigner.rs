use std::f64::consts::PI;

use liouville_lab::wigner::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn ground_state_peak_is_one_over_pi() {
    let w = wigner_transform(&WavefunctionGrid::harmonic_eigenstate(0, 1.0).unwrap()).unwrap();
    assert!((w.value_at(0.0, 0.0) - 1.0 / PI).abs() < 1e-3);
}

#[test]
fn first_excited_state_is_negative_at_origin() {
    let w = wigner_transform(&WavefunctionGrid::harmonic_eigenstate(1, 1.0).unwrap()).unwrap();
    assert!((w.value_at(0.0, 0.0) + 1.0 / PI).abs() < 1e-3);
}

#[test]
fn coherent_state_matches_analytic_gaussian() {
    // (1/πħ) exp(-(q-q0)²/ħ - (p-p0)²/ħ) for the unit oscillator
    let (q0, p0) = (1.5, -0.7);
    let w = wigner_transform(&WavefunctionGrid::coherent(q0, p0, 1.0).unwrap()).unwrap();
    let mut worst: f64 = 0.0;
    for iq in 0..w.n_q {
        for ip in 0..w.n_p {
            let (q, p) = (w.q(iq), w.p(ip));
            let exact = (-(q - q0).powi(2) - (p - p0).powi(2)).exp() / PI;
            worst = worst.max((w.at(iq, ip) - exact).abs());
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn marginals_reproduce_position_and_momentum_densities() {
    let psi = WavefunctionGrid::from_fn(-12.0, 12.0, 512, 1.0, |q| {
        // superposition with nontrivial phase structure
        let a = Complex64::from_polar((-(q - 1.0).powi(2)).exp(), 0.8 * q);
        let b = Complex64::from_polar(0.6 * (-(q + 1.5).powi(2) / 1.5).exp(), -0.3 * q);
        a + b
    })
    .unwrap();
    let w = wigner_transform(&psi).unwrap();

    let qm = w.q_marginal();
    for (j, v) in qm.iter().enumerate() {
        assert!((v - psi.values[j].norm_sqr()).abs() < 1e-6);
    }

    // direct quadrature of the momentum-space wavefunction
    let pm = w.p_marginal();
    for (ip, v) in pm.iter().enumerate() {
        let p = w.p(ip);
        let amp: Complex64 = psi
            .values
            .iter()
            .enumerate()
            .map(|(j, x)| x * Complex64::from_polar(1.0, -p * psi.q(j)))
            .sum::<Complex64>()
            * psi.dq
            / (2.0 * PI).sqrt();
        assert!((v - amp.norm_sqr()).abs() < 1e-6, "p = {p}");
    }
    assert!((w.total() - 1.0).abs() < 1e-8);
}

#[test]
fn coherent_state_returns_after_one_period() {
    let psi = WavefunctionGrid::coherent(2.0, 1.0, 1.0).unwrap();
    let steps = 6000;
    let out = schrodinger_evolve(
        &psi,
        &PotentialSpec::harmonic(1.0),
        2.0 * PI / steps as f64,
        steps,
    )
    .unwrap();
    let deficit = 1.0 - psi.fidelity(&out);
    assert!(deficit < 1e-6, "{deficit}");
    assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
}

#[test]
fn free_gaussian_spreads_analytically() {
    let sigma0: f64 = 1.0;
    let psi = WavefunctionGrid::gaussian(0.0, 0.0, sigma0, 1.0).unwrap();
    let t = 2.0;
    let out = schrodinger_evolve(&psi, &PotentialSpec::free(), 0.01, 200).unwrap();
    let expected = sigma0 * sigma0 + (t / (2.0 * sigma0)).powi(2);
    assert!(
        (out.position_variance() - expected).abs() < 1e-4,
        "{}",
        out.position_variance()
    );
}

#[test]
fn quadratic_potentials_have_no_quantum_terms() {
    let w = wigner_transform(&WavefunctionGrid::coherent(1.0, 0.5, 1.0).unwrap()).unwrap();
    let terms = moyal_terms(&w, &PotentialSpec::harmonic(1.0), 5).unwrap();
    assert_eq!(terms.len(), 3);
    assert!(sup(&terms[0].field) > 0.0);
    assert_eq!(sup(&terms[1].field), 0.0);
    assert_eq!(sup(&terms[2].field), 0.0);

    let terms = moyal_terms(&w, &PotentialSpec::quartic(1.0, 0.4), 5).unwrap();
    assert!(sup(&terms[1].field) > 1e-4);
    assert_eq!(sup(&terms[2].field), 0.0);
}

/// Central difference in time of ρ_W built from the split-step solver.
fn evolution_oracle(
    psi: &WavefunctionGrid,
    v: &PotentialSpec,
    delta: f64,
    substeps: usize,
) -> Vec<f64> {
    // back-propagate by running the solver on the conjugate state
    let conj = |g: &WavefunctionGrid| WavefunctionGrid {
        values: g.values.iter().map(|z| z.conj()).collect(),
        ..g.clone()
    };
    let fwd = schrodinger_evolve(psi, v, delta / substeps as f64, substeps).unwrap();
    let bwd = conj(&schrodinger_evolve(&conj(psi), v, delta / substeps as f64, substeps).unwrap());
    let wf = wigner_transform(&fwd).unwrap();
    let wb = wigner_transform(&bwd).unwrap();
    wf.values
        .iter()
        .zip(&wb.values)
        .map(|(a, b)| (a - b) / (2.0 * delta))
        .collect()
}

fn interior_relative_error(w: &WignerGrid, a: &[f64], b: &[f64]) -> f64 {
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for iq in w.n_q / 8..7 * w.n_q / 8 {
        for ip in w.n_p / 8..7 * w.n_p / 8 {
            let k = iq * w.n_p + ip;
            err = err.max((a[k] - b[k]).abs());
            scale = scale.max(b[k].abs());
        }
    }
    err / scale
}

#[test]
fn moyal_series_matches_evolution() {
    let psi = WavefunctionGrid::coherent(1.5, 0.5, 1.0).unwrap();
    for v in [
        PotentialSpec::quartic(1.0, 0.4),
        PotentialSpec::new(&[0.0, 0.0, 0.5, 0.0, 0.05, 0.0, 0.002]).unwrap(),
    ] {
        let w = wigner_transform(&psi).unwrap();
        let series = wigner_time_derivative(&w, &v);
        let oracle = evolution_oracle(&psi, &v, 1e-3, 200);
        let rel = interior_relative_error(&w, &series, &oracle);
        assert!(rel < 1e-3, "{v:?}: {rel}");

        // dropping the quantum terms is visibly worse for the anharmonic case
        let classical: Vec<f64> = {
            let mut c = transport_term(&w);
            let t1 = &moyal_terms(&w, &v, 1).unwrap()[0].field;
            c.iter_mut().zip(t1).for_each(|(x, y)| *x += y);
            c
        };
        let rel_classical = interior_relative_error(&w, &classical, &oracle);
        assert!(rel_classical > 10.0 * rel, "{rel_classical} vs {rel}");
    }
}

#[test]
fn compressibility_vanishes_for_free_and_harmonic() {
    let psi = WavefunctionGrid::coherent(2.0, 0.0, 1.0).unwrap();
    let r = wigner_compressibility(&psi, &PotentialSpec::harmonic(1.0), 1.0, 1e-3, 250).unwrap();
    assert!(r.max_metric < 1e-10);
    let r = wigner_compressibility(&psi, &PotentialSpec::free(), 1.0, 1e-2, 25).unwrap();
    assert!(r.max_metric < 1e-10);
    assert_eq!(r.rows.len(), 5);
}

#[test]
fn compressibility_is_finite_for_quartic() {
    let psi = WavefunctionGrid::coherent(2.0, 0.0, 1.0).unwrap();
    let r =
        wigner_compressibility(&psi, &PotentialSpec::quartic(1.0, 0.4), 0.5, 4e-5, 2500).unwrap();
    assert!(r.max_metric > 1e-3, "{}", r.max_metric);
    for row in &r.rows {
        assert!(row.lambda3_norm > 0.0);
        assert_eq!(row.lambda5_norm, 0.0);
    }
}

#[test]
fn third_order_term_scales_with_hbar_squared() {
    let w = wigner_transform(&WavefunctionGrid::coherent(1.0, 0.3, 1.0).unwrap()).unwrap();
    let v = PotentialSpec::quartic(1.0, 0.4);
    let n1 = field_norm(&w, &moyal_terms(&w, &v, 3).unwrap()[1].field);
    let w2 = w.with_hbar(2.0);
    let n2 = field_norm(&w2, &moyal_terms(&w2, &v, 3).unwrap()[1].field);
    assert!((n2 / n1 / 4.0 - 1.0).abs() < 0.05);
}

#[test]
fn normalization_survives_anharmonic_evolution() {
    let psi = WavefunctionGrid::coherent(1.0, 1.0, 1.0).unwrap();
    let v = PotentialSpec::quartic(1.0, 0.4);
    let mut state = psi;
    for _ in 0..4 {
        state = schrodinger_evolve(&state, &v, 4e-5, 2500).unwrap();
        let w = wigner_transform(&state).unwrap();
        assert!((w.total() - 1.0).abs() < 1e-8);
        for (j, m) in w.q_marginal().iter().enumerate() {
            assert!((m - state.values[j].norm_sqr()).abs() < 1e-6);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quantum_terms_vanish_iff_degree_at_most_two(
        coeffs in prop::collection::vec(-1.0..1.0f64, 7),
        degree in 0usize..=6,
    ) {
        let mut c = coeffs.clone();
        for v in c.iter_mut().skip(degree + 1) {
            *v = 0.0;
        }
        if c[degree].abs() < 1e-3 {
            c[degree] = 0.5;
        }
        let v = PotentialSpec::new(&c).unwrap();
        let w = wigner_transform(&WavefunctionGrid::coherent(0.5, 0.2, 1.0).unwrap()).unwrap();
        let terms = moyal_terms(&w, &v, 5).unwrap();
        let quantum = sup(&terms[1].field) + sup(&terms[2].field);
        if degree <= 2 {
            prop_assert_eq!(quantum, 0.0);
        } else {
            prop_assert!(quantum > 0.0);
        }
    }
}
