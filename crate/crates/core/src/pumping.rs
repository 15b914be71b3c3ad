//! Upper-level occupancy `p_n = |⟨1|U^n|0⟩|²`, its Cesàro mean, and the
//! closed-form long-time limit.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupspace::{
    build_unitary, projective_angle, GroupCoordinates, QuantumState, UnitaryOperator,
};

pub const MAX_STEPS: usize = 10_000_000;
/// Shortest series accepted by [`compare_average_to_closed_form`].
pub const MIN_COMPARE_STEPS: usize = 10_000;
/// Tail oscillation regarded as converged.
pub const CONVERGED_TOL: f64 = 1e-3;
/// Tail oscillation above which the comparison is refused.
pub const NOT_CONVERGED_TOL: f64 = 1e-2;
/// Value of the closed form at its removable singularity Φ = 0.
pub const PHI_ZERO_LIMIT: f64 = 0.1;
const RENORMALIZE_EVERY: usize = 1024;
const ORBIT_NODES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PumpingError {
    #[error("series length {0} outside 1..=10^7")]
    InvalidLength(usize),
    #[error("comparison needs at least {MIN_COMPARE_STEPS} steps, got {0}")]
    TooShort(usize),
    #[error("running average oscillates by {oscillation:.3e} over the last decade")]
    NotConverged { oscillation: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumpingSeries {
    pub params: GroupCoordinates,
    /// `p_n` for `n = 1..=N`.
    pub p_n: Vec<f64>,
    pub running_average: Vec<f64>,
}

impl PumpingSeries {
    pub fn len(&self) -> usize {
        self.p_n.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_n.is_empty()
    }

    pub fn final_average(&self) -> f64 {
        self.running_average.last().copied().unwrap_or(0.0)
    }
}

pub fn pumping_series(
    coords: GroupCoordinates,
    steps: usize,
) -> Result<PumpingSeries, PumpingError> {
    if steps == 0 || steps > MAX_STEPS {
        return Err(PumpingError::InvalidLength(steps));
    }
    let u = build_unitary(coords);
    let mut state = QuantumState::ground();
    let mut p_n = Vec::with_capacity(steps);
    let mut running_average = Vec::with_capacity(steps);
    let mut sum = 0.0;
    for n in 1..=steps {
        state = u.apply(&state);
        if n % RENORMALIZE_EVERY == 0 {
            state = state.renormalize();
        }
        let p = state.amplitudes()[1].norm_sqr().clamp(0.0, 1.0);
        sum += p;
        p_n.push(p);
        running_average.push((sum / n as f64).clamp(0.0, 1.0));
    }
    Ok(PumpingSeries {
        params: coords,
        p_n,
        running_average,
    })
}

/// Closed form `sin²(Φ/2) / 2(1 − cos²(Φ/2) cos²Φ)`, with a flag set when
/// the limit value at Φ = 0 was substituted.
pub fn geometric_pumping_closed_form_flagged(phi: f64) -> (f64, bool) {
    let (s1, c1) = (0.5 * phi).sin_cos();
    // 1 − c1² cos²Φ = s1² + c1² sin²Φ, free of cancellation near Φ = 0
    let s2 = phi.sin();
    let den = 2.0 * (s1 * s1 + c1 * c1 * s2 * s2);
    if den == 0.0 {
        (PHI_ZERO_LIMIT, true)
    } else {
        (s1 * s1 / den, false)
    }
}

pub fn geometric_pumping_closed_form(phi: f64) -> f64 {
    geometric_pumping_closed_form_flagged(phi).0
}

/// Average of `|⟨1|g|0⟩|²` over the one-parameter subgroup through `U`,
/// by midpoint quadrature in the rotation angle. Equals the long-time
/// average whenever the rotation angle is incommensurate with 2π.
pub fn orbit_average_oracle(coords: GroupCoordinates) -> f64 {
    let u = build_unitary(coords);
    let (c, v) = u.pauli_components();
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 || projective_angle(&u) == 0.0 {
        return 0.0;
    }
    let sign = if c < 0.0 { -1.0 } else { 1.0 };
    let axis = [sign * v[0] / norm, sign * v[1] / norm, sign * v[2] / norm];
    let ground = QuantumState::ground();
    (0..ORBIT_NODES)
        .map(|j| {
            let beta = 2.0 * PI * (j as f64 + 0.5) / ORBIT_NODES as f64;
            UnitaryOperator::axis_rotation(axis, beta)
                .apply(&ground)
                .amplitudes()[1]
                .norm_sqr()
        })
        .sum::<f64>()
        / ORBIT_NODES as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PumpingComparison {
    pub params: GroupCoordinates,
    pub steps: usize,
    /// Running average at `N`.
    pub tail: f64,
    /// Running average at `N/2`.
    pub half: f64,
    /// max − min of the running average over `[N/10, N]`.
    pub oscillation: f64,
    pub converged: bool,
    pub orbit_average: f64,
    pub p_g: f64,
    pub p_g_limit_substituted: bool,
    /// `tail − p_G`; reported, not asserted.
    pub deviation: f64,
}

pub fn compare_series(series: &PumpingSeries) -> Result<PumpingComparison, PumpingError> {
    let n = series.len();
    if n < MIN_COMPARE_STEPS {
        return Err(PumpingError::TooShort(n));
    }
    let window = &series.running_average[n / 10 - 1..];
    let (lo, hi) = window
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        });
    let oscillation = hi - lo;
    if oscillation > NOT_CONVERGED_TOL {
        return Err(PumpingError::NotConverged { oscillation });
    }
    let tail = series.final_average();
    let (p_g, flagged) = geometric_pumping_closed_form_flagged(series.params.phi);
    Ok(PumpingComparison {
        params: series.params,
        steps: n,
        tail,
        half: series.running_average[n / 2 - 1],
        oscillation,
        converged: oscillation < CONVERGED_TOL,
        orbit_average: orbit_average_oracle(series.params),
        p_g,
        p_g_limit_substituted: flagged,
        deviation: tail - p_g,
    })
}

pub fn compare_average_to_closed_form(
    coords: GroupCoordinates,
    steps: usize,
) -> Result<PumpingComparison, PumpingError> {
    if steps < MIN_COMPARE_STEPS {
        return Err(PumpingError::TooShort(steps));
    }
    compare_series(&pumping_series(coords, steps)?)
}

/// Comparisons for many parameter triples, in parallel.
pub fn pumping_scan(
    params: &[GroupCoordinates],
    steps: usize,
) -> Vec<Result<PumpingComparison, PumpingError>> {
    params
        .par_iter()
        .map(|c| compare_average_to_closed_form(*c, steps))
        .collect()
}
