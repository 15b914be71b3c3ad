//! One function per experiment: parameters in, tables and a JSON summary out.

use std::f64::consts::PI;

use liouville_lab::classical::{
    pair_distance_series, transport_series, Ensemble, HamiltonianSpec, PhaseSpacePoint,
};
use liouville_lab::ergodic::{
    continuous_power, haar_histogram, iterate_orbit, metric_drift, non_invariant_control,
    orbit_angle_histogram, orbit_closure, OrbitClosure, MAX_ORBIT, MIN_SAMPLES,
};
use liouville_lab::groupspace::{
    build_unitary, compose_so3, so3_translation_jacobian, so3_translation_jacobian_analytic,
    state_distance, su2_model_total_mass, EulerAngles, GroupCoordinates, QuantumState,
    UnitaryOperator,
};
use liouville_lab::pumping::{
    compare_series, geometric_pumping_closed_form_flagged, pumping_series, PumpingError, MAX_STEPS,
    MIN_COMPARE_STEPS,
};
use liouville_lab::wigner::{
    wigner_compressibility, PotentialSpec, WavefunctionGrid, DEFAULT_Q_MAX, DEFAULT_Q_MIN,
    MIN_POINTS,
};
use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::config::{
    ClassicalParams, ErgodicParams, HaarCheckParams, MetricParams, PotentialKind, PumpingParams,
    SystemKind, WignerParams,
};
use crate::output::Table;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutput {
    pub tables: Vec<Table>,
    pub summary: Value,
    /// Numerical failure detected after the data was produced.
    pub failure: Option<String>,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn numerical<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numerical(e.to_string())
}

fn require(ok: bool, msg: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(config_err(msg))
    }
}

fn random_coords<R: Rng + ?Sized>(rng: &mut R) -> GroupCoordinates {
    GroupCoordinates::new(
        rng.random_range(-PI..PI),
        rng.random_range(0.0..PI),
        rng.random_range(-PI..PI),
    )
}

fn random_state<R: Rng + ?Sized>(rng: &mut R) -> QuantumState {
    build_unitary(random_coords(rng))
        .apply(&QuantumState::ground())
        .renormalize()
}

pub fn haar_check<R: Rng + ?Sized>(
    p: &HaarCheckParams,
    rng: &mut R,
) -> Result<ExperimentOutput, CliError> {
    require(p.samples > 0, "samples must be positive")?;
    require(
        (1e-6..=1e-3).contains(&p.step),
        "step must lie in [1e-6, 1e-3]",
    )?;
    require(
        (0.0..1.0).contains(&p.min_sin),
        "min_sin must lie in [0, 1)",
    )?;
    let mut table = Table::new(
        "haar_check",
        &[
            "sample_id",
            "theta",
            "theta_prime",
            "jacobian_fd",
            "jacobian_analytic",
            "rel_err",
        ],
    );
    let mut rejected = 0usize;
    let mut worst: f64 = 0.0;
    let draw = |rng: &mut R| {
        EulerAngles::new(
            rng.random_range(-PI..PI),
            rng.random_range(0.0..PI),
            rng.random_range(-PI..PI),
        )
    };
    while table.rows.len() < p.samples {
        let (g, x) = (draw(rng), draw(rng));
        let image = compose_so3(&g, &x).angles;
        if x.theta.sin() < p.min_sin || image.theta.sin() < p.min_sin {
            rejected += 1;
            continue;
        }
        let fd = so3_translation_jacobian(&g, &x, p.step).map_err(numerical)?;
        let exact = so3_translation_jacobian_analytic(&g, &x);
        let rel = (fd / exact - 1.0).abs();
        worst = worst.max(rel);
        table.push(vec![
            table.rows.len().into(),
            x.theta.into(),
            image.theta.into(),
            fd.into(),
            exact.into(),
            rel.into(),
        ]);
    }
    let mass = su2_model_total_mass(1e-10);
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "max_rel_err": worst,
            "within_1e-4": worst < 1e-4,
            "rejected_draws": rejected,
            "su2_total_mass": mass,
            "su2_total_mass_rel_err": mass / (4.0 * PI * PI) - 1.0,
        }),
        failure: None,
    })
}

fn hamiltonian(system: SystemKind, p: &ClassicalParams) -> Result<HamiltonianSpec, CliError> {
    let h = match system {
        SystemKind::Harmonic => HamiltonianSpec::Harmonic {
            mass: p.mass,
            omega: p.omega,
        },
        SystemKind::Quartic => HamiltonianSpec::Quartic {
            mass: p.mass,
            k2: p.k2,
            k4: p.k4,
        },
        SystemKind::Pendulum => HamiltonianSpec::Pendulum {
            mass: p.mass,
            length: p.length,
            gravity: p.gravity,
        },
        SystemKind::Damped => HamiltonianSpec::DampedControl {
            mass: p.mass,
            stiffness: p.stiffness,
            gamma: p.gamma,
        },
    };
    h.validate().map_err(|e| config_err(e.to_string()))?;
    Ok(h)
}

/// Classical pair (0, 1) and (0, 1.3) next to two states under `U^t`.
fn distance_table(
    h: &HamiltonianSpec,
    total_time: f64,
    dt: f64,
    stride: usize,
    u: &UnitaryOperator,
    states: (QuantumState, QuantumState),
) -> Result<(Table, f64), CliError> {
    let classical = pair_distance_series(
        h,
        &PhaseSpacePoint::new(0.0, 1.0),
        &PhaseSpacePoint::new(0.0, 1.3),
        total_time,
        dt,
        stride,
    )
    .map_err(|e| config_err(e.to_string()))?;
    let mut table = Table::new(
        "distance_series",
        &["t", "distance_classical", "distance_quantum"],
    );
    for (t, d) in &classical {
        let ut = continuous_power(u, *t);
        let dq = state_distance(&ut.apply(&states.0), &ut.apply(&states.1)).map_err(numerical)?;
        table.push(vec![(*t).into(), (*d).into(), dq.into()]);
    }
    let max = classical.iter().map(|x| x.1).fold(f64::MIN, f64::max);
    let min = classical.iter().map(|x| x.1).fold(f64::MAX, f64::min);
    Ok((table, max / min))
}

fn default_generator() -> UnitaryOperator {
    let m = MetricParams::DEFAULT;
    build_unitary(GroupCoordinates::new(m.phi, m.theta, m.omega))
}

pub fn classical<R: Rng + ?Sized>(
    p: &ClassicalParams,
    rng: &mut R,
) -> Result<ExperimentOutput, CliError> {
    require(p.t.is_finite() && p.t > 0.0, "t must be positive")?;
    require(p.dt.is_finite() && p.dt > 0.0, "dt must be positive")?;
    require(
        p.stride > 0 && p.ensemble > 0,
        "stride and ensemble must be positive",
    )?;
    let h = hamiltonian(p.system, p)?;
    let ensemble = Ensemble::gaussian(PhaseSpacePoint::new(0.0, 1.0), p.sigma, p.ensemble, rng)
        .map_err(|e| config_err(e.to_string()))?;
    let rows = transport_series(&ensemble, &h, p.t, p.dt, p.stride)
        .map_err(|e| config_err(e.to_string()))?;
    let mut jac = Table::new(
        "classical_jacobian",
        &["t", "det_jacobian", "density_residual"],
    );
    for r in &rows {
        jac.push(vec![
            r.t.into(),
            r.det_jacobian.into(),
            r.density_residual.into(),
        ]);
    }
    let states = (random_state(rng), random_state(rng));
    let (dist, ratio) = distance_table(&h, p.t, p.dt, p.stride, &default_generator(), states)?;
    let last = rows.last().expect("at least the t = 0 row");
    let max_dev = rows
        .iter()
        .map(|r| (r.det_jacobian - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(ExperimentOutput {
        tables: vec![jac, dist],
        summary: json!({
            "hamiltonian": h,
            "final_det_jacobian": last.det_jacobian,
            "final_density_residual": last.density_residual,
            "max_det_deviation": max_dev,
            "expected_det": if h.is_hamiltonian() { 1.0 } else { (-p.gamma * p.t).exp() },
            "classical_distance_ratio": ratio,
        }),
        failure: None,
    })
}

fn potential(p: &WignerParams) -> Result<PotentialSpec, CliError> {
    match p.potential {
        PotentialKind::Free => Ok(PotentialSpec::free()),
        PotentialKind::Harmonic => Ok(PotentialSpec::harmonic(p.k2)),
        PotentialKind::Quartic => Ok(PotentialSpec::quartic(p.k2, p.k4)),
        PotentialKind::Custom => {
            require(!p.coeffs.is_empty(), "custom potential needs coeffs")?;
            PotentialSpec::new(&p.coeffs).map_err(|e| config_err(e.to_string()))
        }
    }
}

pub fn wigner(p: &WignerParams) -> Result<ExperimentOutput, CliError> {
    require(
        p.points >= MIN_POINTS && p.points.is_power_of_two(),
        "points must be a power of two ≥ 128",
    )?;
    require(p.hbar.is_finite() && p.hbar > 0.0, "hbar must be positive")?;
    require(p.t.is_finite() && p.t >= 0.0, "t must be non-negative")?;
    require(
        p.dt.is_finite() && p.dt > 0.0 && p.stride > 0,
        "dt and stride must be positive",
    )?;
    let v = potential(p)?;
    let sigma = (0.5 * p.hbar).sqrt();
    let psi = WavefunctionGrid::from_fn(DEFAULT_Q_MIN, DEFAULT_Q_MAX, p.points, p.hbar, |q| {
        let env = (-(q - p.q0).powi(2) / (4.0 * sigma * sigma)).exp();
        Complex64::from_polar(env, p.p0 * q / p.hbar)
    })
    .map_err(numerical)?;
    let report = wigner_compressibility(&psi, &v, p.t, p.dt, p.stride).map_err(numerical)?;
    let mut table = Table::new(
        "wigner_compressibility",
        &[
            "t",
            "lambda1_norm",
            "lambda3_norm",
            "lambda5_norm",
            "metric",
        ],
    );
    for r in &report.rows {
        table.push(vec![
            r.t.into(),
            r.lambda1_norm.into(),
            r.lambda3_norm.into(),
            r.lambda5_norm.into(),
            r.metric.into(),
        ]);
    }
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "potential_coeffs": v.coeffs,
            "max_metric": report.max_metric,
            "rows": report.rows.len(),
        }),
        failure: None,
    })
}

/// 1000·{1, 2, 5}·10^k up to `n`, then `n`.
fn checkpoints(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut decade = MIN_SAMPLES;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = m * decade;
            if c >= n {
                break 'outer;
            }
            out.push(c);
        }
        decade *= 10;
    }
    out.push(n);
    out
}

pub fn ergodic(p: &ErgodicParams) -> Result<ExperimentOutput, CliError> {
    require(
        (MIN_SAMPLES..=MAX_ORBIT).contains(&p.n),
        "n must lie in [1000, 10^7]",
    )?;
    require((1..=200).contains(&p.bins), "bins must lie in [1, 200]")?;
    let u = build_unitary(GroupCoordinates::new(p.phi, p.theta, p.omega));
    let orbit = iterate_orbit(&u, p.n - 1).map_err(numerical)?;
    let hist = haar_histogram(&orbit, p.bins).map_err(numerical)?;
    let mut h = Table::new(
        "ergodic_hist",
        &[
            "bin_phi",
            "bin_theta",
            "bin_omega",
            "count",
            "haar_mass",
            "normalized_occupancy",
        ],
    );
    for i in 0..p.bins {
        for j in 0..p.bins {
            for k in 0..p.bins {
                let b = hist.bin(i, j, k);
                h.push(vec![
                    i.into(),
                    j.into(),
                    k.into(),
                    hist.counts[b].into(),
                    hist.haar_weights[b].into(),
                    hist.normalized_occupancy[b].into(),
                ]);
            }
        }
    }
    let mut f = Table::new(
        "ergodic_flatness",
        &["n", "flatness_haar", "flatness_control"],
    );
    for m in checkpoints(p.n) {
        let a = orbit_angle_histogram(&orbit[..m], p.bins).map_err(numerical)?;
        let c = non_invariant_control(&orbit[..m], p.bins).map_err(numerical)?;
        f.push(vec![m.into(), a.flatness.into(), c.naive_flatness.into()]);
    }
    let angle = orbit_angle_histogram(&orbit, p.bins).map_err(numerical)?;
    let control = non_invariant_control(&orbit, p.bins).map_err(numerical)?;
    let closure = match orbit_closure(&orbit) {
        OrbitClosure::Point(_) => "point",
        OrbitClosure::Cyclic(_) => "cyclic",
        OrbitClosure::Circle { .. } => "circle",
    };
    Ok(ExperimentOutput {
        tables: vec![h, f],
        summary: json!({
            "closure": closure,
            "period": hist.period,
            "samples": hist.samples,
            "achievable_bins": hist.achievable_bins(),
            "orphan_samples": hist.orphan_samples,
            "flatness_3d": hist.flatness,
            "flatness_angle": angle.flatness,
            "flatness_control_naive": control.naive_flatness,
            "flatness_control_corrected": control.corrected_flatness,
            "control_degenerate": control.degenerate,
            "unitarity_defect": orbit.last().map(|r| r.element.unitarity_defect()),
        }),
        failure: None,
    })
}

pub fn pumping(p: &PumpingParams) -> Result<ExperimentOutput, CliError> {
    require((1..=MAX_STEPS).contains(&p.n), "n must lie in [1, 10^7]")?;
    require(p.stride > 0, "stride must be positive")?;
    let coords = GroupCoordinates::new(p.phi, p.theta, p.omega);
    let series = pumping_series(coords, p.n).map_err(numerical)?;
    let (p_g, flagged) = geometric_pumping_closed_form_flagged(p.phi);
    let mut table = Table::new(
        "pumping",
        &["n", "p_n", "running_average", "p_G_closed_form"],
    );
    for n in 1..=p.n {
        if n == 1 || n % p.stride == 0 || n == p.n {
            table.push(vec![
                n.into(),
                series.p_n[n - 1].into(),
                series.running_average[n - 1].into(),
                p_g.into(),
            ]);
        }
    }
    let (comparison, failure) = if p.n >= MIN_COMPARE_STEPS {
        match compare_series(&series) {
            Ok(c) => (serde_json::to_value(c).ok(), None),
            Err(e @ PumpingError::NotConverged { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(numerical(e)),
        }
    } else {
        (None, None)
    };
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "final_average": series.final_average(),
            "p_G": p_g,
            "p_G_limit_substituted": flagged,
            "comparison": comparison,
        }),
        failure,
    })
}

pub fn metric<R: Rng + ?Sized>(
    p: &MetricParams,
    rng: &mut R,
) -> Result<ExperimentOutput, CliError> {
    require(
        p.steps > 0 && p.stride > 0,
        "steps and stride must be positive",
    )?;
    require(
        p.t.is_finite() && p.t > 0.0 && p.dt.is_finite() && p.dt > 0.0,
        "t and dt must be positive",
    )?;
    let u = build_unitary(GroupCoordinates::new(p.phi, p.theta, p.omega));
    let states = (random_state(rng), random_state(rng));
    let elements = (
        build_unitary(random_coords(rng)),
        build_unitary(random_coords(rng)),
    );
    let drift = metric_drift(&u, states, elements, p.steps).map_err(numerical)?;
    let h = hamiltonian(p.system, &ClassicalParams::DEFAULT)?;
    let (table, ratio) = distance_table(&h, p.t, p.dt, p.stride, &u, states)?;
    Ok(ExperimentOutput {
        tables: vec![table],
        summary: json!({
            "drift": drift,
            "within_1e-12": drift.state_max_deviation < 1e-12 && drift.group_max_deviation < 1e-12,
            "classical_distance_ratio": ratio,
        }),
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_ladder() {
        assert_eq!(checkpoints(1000), vec![1000]);
        assert_eq!(
            checkpoints(100_000),
            vec![1000, 2000, 5000, 10_000, 20_000, 50_000, 100_000]
        );
        assert_eq!(checkpoints(3000), vec![1000, 2000, 3000]);
    }
}
