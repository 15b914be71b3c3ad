//! Orbits `U^n` on the projective two-level unitary group and their
//! occupancy statistics.
//!
//! The closure of `{U^n}` is a closed subgroup: a point, a finite cyclic
//! group, or a circle. Occupancy is compared against the Haar measure of
//! that closure, which is the invariant measure on the achievable region.
//! The non-invariant control pushes the same samples through `cos` and bins
//! them against flat weights.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupspace::{
    decompose_unitary, group_distance, projective_angle, state_distance, su2_model_box_mass,
    wrap_angle, GroupCoordinates, GroupError, QuantumState, UnitaryOperator, SU2_MODEL_THETA_MAX,
};

/// Products between polar re-projections of the running power.
pub const REUNITARIZE_EVERY: usize = 1024;
pub const DEFAULT_BINS: usize = 20;
/// Minimum orbit length for the histogram statistics.
pub const MIN_SAMPLES: usize = 1000;
/// Largest `n_max` accepted by [`iterate_orbit`].
pub const MAX_ORBIT: usize = 10_000_000;
/// Frobenius distance under which a power counts as a return to the start.
pub const PERIOD_TOL: f64 = 1e-9;
/// Quadrature nodes on a circular orbit closure.
pub const CIRCLE_NODES: usize = 1 << 20;
/// Θ above π/2 by more than this is folded back into `[0, π/2]`.
const FOLD_TOL: f64 = 1e-9;
/// Relative distance to a bin edge under which a value is snapped onto it.
const EDGE_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ErgodicError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("orbit has {got} samples, at least {need} required")]
    TooFewSamples { got: usize, need: usize },
    #[error("orbit length {0} exceeds the supported maximum")]
    OrbitTooLong(usize),
    #[error("bin count must be positive")]
    InvalidBins,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRecord {
    pub n: usize,
    pub element: UnitaryOperator,
    pub coords: GroupCoordinates,
    pub state: QuantumState,
}

impl OrbitRecord {
    fn from_element(n: usize, element: UnitaryOperator) -> Result<Self, GroupError> {
        Ok(Self {
            n,
            element,
            coords: decompose_unitary(&element)?,
            state: element.apply(&QuantumState::ground()).renormalize(),
        })
    }
}

/// Records for `U^0 … U^{n_max}`.
pub fn iterate_orbit(u: &UnitaryOperator, n_max: usize) -> Result<Vec<OrbitRecord>, ErgodicError> {
    if n_max > MAX_ORBIT {
        return Err(ErgodicError::OrbitTooLong(n_max));
    }
    UnitaryOperator::from_matrix(*u.matrix())?;
    let mut out = Vec::with_capacity(n_max + 1);
    let mut current = UnitaryOperator::identity();
    out.push(OrbitRecord::from_element(0, current)?);
    for n in 1..=n_max {
        current = current * *u;
        if n % REUNITARIZE_EVERY == 0 {
            current = current.reunitarize();
        }
        out.push(OrbitRecord::from_element(n, current)?);
    }
    Ok(out)
}

/// Left-translates every element of the orbit by `w`.
pub fn translate_orbit(
    orbit: &[OrbitRecord],
    w: &UnitaryOperator,
) -> Result<Vec<OrbitRecord>, ErgodicError> {
    UnitaryOperator::from_matrix(*w.matrix())?;
    orbit
        .iter()
        .map(|r| OrbitRecord::from_element(r.n, (*w * r.element).reunitarize()).map_err(Into::into))
        .collect()
}

/// Closed subgroup (left-translated by the first orbit element) reached by
/// the orbit.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitClosure {
    Point(UnitaryOperator),
    /// Exactly periodic orbit: the distinct elements of one period.
    Cyclic(Vec<UnitaryOperator>),
    /// `left · exp(-i β/2 n̂·σ)`, β ∈ [0, 4π). The coordinates tell `U`
    /// from `-U`, so the circle is traversed twice in rotation angle.
    Circle {
        left: UnitaryOperator,
        axis: [f64; 3],
    },
}

impl OrbitClosure {
    pub fn period(&self) -> Option<usize> {
        match self {
            OrbitClosure::Point(_) => Some(1),
            OrbitClosure::Cyclic(e) => Some(e.len()),
            OrbitClosure::Circle { .. } => None,
        }
    }
}

/// Generator `U = g₀† g₁`, the unit axis with non-negative scalar part, and
/// its rotation angle in `[0, π]`.
fn generator(orbit: &[OrbitRecord]) -> Option<(UnitaryOperator, [f64; 3], f64)> {
    let first = orbit.first()?;
    let second = orbit.get(1)?;
    let g = first.element.adjoint() * second.element;
    let (c, v) = g.pauli_components();
    let sign = if c < 0.0 { -1.0 } else { 1.0 };
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 {
        return Some((g, [0.0, 0.0, 1.0], 0.0));
    }
    let axis = [sign * v[0] / norm, sign * v[1] / norm, sign * v[2] / norm];
    Some((g, axis, projective_angle(&g)))
}

/// Identifies the closure from the orbit itself: the first return to the
/// starting element within [`PERIOD_TOL`] fixes a finite period.
pub fn orbit_closure(orbit: &[OrbitRecord]) -> OrbitClosure {
    let Some(first) = orbit.first() else {
        return OrbitClosure::Point(UnitaryOperator::identity());
    };
    let Some((_, axis, angle)) = generator(orbit) else {
        return OrbitClosure::Point(first.element);
    };
    let start = first.element;
    for (k, r) in orbit.iter().enumerate().skip(1) {
        if start.frobenius_distance(&r.element) < PERIOD_TOL {
            return match k {
                1 => OrbitClosure::Point(start),
                _ => OrbitClosure::Cyclic(orbit[..k].iter().map(|r| r.element).collect()),
            };
        }
    }
    if angle < PERIOD_TOL {
        // pure phase drift: invisible to the rotation angle
        return OrbitClosure::Point(start);
    }
    OrbitClosure::Circle { left: start, axis }
}

/// Signed rotation angle in `[0, 2π)` of `left† · element` about `axis`.
fn angle_along(left: &UnitaryOperator, axis: &[f64; 3], element: &UnitaryOperator) -> f64 {
    let (c, v) = (left.adjoint() * *element).pauli_components();
    let s = v[0] * axis[0] + v[1] * axis[1] + v[2] * axis[2];
    (2.0 * s.atan2(c)).rem_euclid(2.0 * PI)
}

/// Orbit angles β_n (the rotation angle of `U^n` on its one-parameter
/// subgroup, modulo 2π).
pub fn orbit_angles(orbit: &[OrbitRecord]) -> Vec<f64> {
    match (orbit.first(), generator(orbit)) {
        (Some(first), Some((_, axis, _))) => orbit
            .iter()
            .map(|r| angle_along(&first.element, &axis, &r.element))
            .collect(),
        _ => vec![0.0; orbit.len()],
    }
}

/// Bin index of `x` on `bins` cells of width `width` starting at `lo`;
/// values within [`EDGE_SNAP`] of an edge go to the upper cell.
fn bin_index(x: f64, lo: f64, width: f64, bins: usize, periodic: bool) -> usize {
    let t = (x - lo) / width;
    let r = t.round();
    let cell = if (t - r).abs() < EDGE_SNAP * r.abs().max(1.0) {
        r
    } else {
        t.floor()
    };
    if periodic {
        (cell as i64).rem_euclid(bins as i64) as usize
    } else {
        cell.clamp(0.0, (bins - 1) as f64) as usize
    }
}

/// Folds Θ ∈ (π/2, π] onto `[0, π/2)` with Ω shifted by π.
pub fn fold_coordinates(c: &GroupCoordinates) -> GroupCoordinates {
    if c.theta > SU2_MODEL_THETA_MAX + FOLD_TOL {
        GroupCoordinates::new(c.phi, PI - c.theta, wrap_angle(c.omega + PI))
    } else {
        *c
    }
}

/// `(i_phi, i_theta, i_omega)` of the folded coordinates.
pub fn coordinate_bin(c: &GroupCoordinates, bins: usize) -> (usize, usize, usize) {
    let f = fold_coordinates(c);
    let angle_width = 2.0 * PI / bins as f64;
    (
        bin_index(f.phi, -PI, angle_width, bins, true),
        bin_index(f.theta, 0.0, SU2_MODEL_THETA_MAX / bins as f64, bins, false),
        bin_index(f.omega, -PI, angle_width, bins, true),
    )
}

fn flat_index(b: (usize, usize, usize), bins: usize) -> usize {
    (b.0 * bins + b.1) * bins + b.2
}

/// Coefficient of variation of `values`; 0 for fewer than two values.
pub fn coefficient_of_variation(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Flatness of `(count/N) / mass` over bins with a positive count and mass.
fn normalized_flatness(counts: &[u64], masses: &[f64], samples: usize) -> (Vec<f64>, f64) {
    let normalized: Vec<f64> = counts
        .iter()
        .zip(masses)
        .map(|(&c, &m)| {
            if m > 0.0 {
                c as f64 / samples as f64 / m
            } else {
                0.0
            }
        })
        .collect();
    let achieved: Vec<f64> = counts
        .iter()
        .zip(masses)
        .zip(&normalized)
        .filter(|((&c, &m), _)| c > 0 && m > 0.0)
        .map(|(_, &o)| o)
        .collect();
    let flat = coefficient_of_variation(&achieved);
    (normalized, flat)
}

/// Closure Haar mass of each 3D bin.
fn closure_masses_3d(closure: &OrbitClosure, bins: usize) -> Result<Vec<f64>, GroupError> {
    let mut mass = vec![0.0; bins * bins * bins];
    let mut add = |u: &UnitaryOperator, w: f64| -> Result<(), GroupError> {
        let c = decompose_unitary(&u.reunitarize())?;
        mass[flat_index(coordinate_bin(&c, bins), bins)] += w;
        Ok(())
    };
    match closure {
        OrbitClosure::Point(u) => add(u, 1.0)?,
        OrbitClosure::Cyclic(elements) => {
            let w = 1.0 / elements.len() as f64;
            for e in elements {
                add(e, w)?;
            }
        }
        OrbitClosure::Circle { left, axis } => {
            let w = 1.0 / CIRCLE_NODES as f64;
            for j in 0..CIRCLE_NODES {
                let beta = 4.0 * PI * (j as f64 + 0.5) / CIRCLE_NODES as f64;
                add(&(*left * UnitaryOperator::axis_rotation(*axis, beta)), w)?;
            }
        }
    }
    Ok(mass)
}

/// Occupancy of the folded (Φ, Θ, Ω) box, Θ ∈ [0, π/2], normalized by the
/// Haar mass of the orbit closure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HaarHistogram {
    pub bins_per_axis: usize,
    pub samples: usize,
    /// Row-major `[i_phi][i_theta][i_omega]`.
    pub counts: Vec<u64>,
    /// Haar mass of the orbit closure in each bin (sums to 1).
    pub haar_weights: Vec<f64>,
    /// Mass of the ambient `sin 2Θ` density in each bin, normalized to 1.
    pub ambient_haar_mass: Vec<f64>,
    pub achievable_mask: Vec<bool>,
    pub normalized_occupancy: Vec<f64>,
    /// Coefficient of variation of the normalized occupancy over achievable bins.
    pub flatness: f64,
    /// Samples that landed in bins the closure quadrature gave zero mass.
    pub orphan_samples: u64,
    pub period: Option<usize>,
}

impl HaarHistogram {
    pub fn bin(&self, i_phi: usize, i_theta: usize, i_omega: usize) -> usize {
        flat_index((i_phi, i_theta, i_omega), self.bins_per_axis)
    }

    pub fn achievable_bins(&self) -> usize {
        self.achievable_mask.iter().filter(|m| **m).count()
    }
}

pub fn haar_histogram(orbit: &[OrbitRecord], bins: usize) -> Result<HaarHistogram, ErgodicError> {
    if bins == 0 {
        return Err(ErgodicError::InvalidBins);
    }
    if orbit.len() < MIN_SAMPLES {
        return Err(ErgodicError::TooFewSamples {
            got: orbit.len(),
            need: MIN_SAMPLES,
        });
    }
    let closure = orbit_closure(orbit);
    let haar_weights = closure_masses_3d(&closure, bins)?;
    let mut counts = vec![0u64; bins * bins * bins];
    for r in orbit {
        counts[flat_index(coordinate_bin(&r.coords, bins), bins)] += 1;
    }
    let (normalized_occupancy, flatness) = normalized_flatness(&counts, &haar_weights, orbit.len());
    let orphan_samples = counts
        .iter()
        .zip(&haar_weights)
        .filter(|(_, &m)| m == 0.0)
        .map(|(&c, _)| c)
        .sum();

    let angle_width = 2.0 * PI / bins as f64;
    let theta_width = SU2_MODEL_THETA_MAX / bins as f64;
    let total = su2_model_box_mass(0.0, SU2_MODEL_THETA_MAX, 2.0 * PI, 2.0 * PI);
    let theta_masses: Vec<f64> = (0..bins)
        .map(|i| {
            su2_model_box_mass(
                i as f64 * theta_width,
                (i + 1) as f64 * theta_width,
                angle_width,
                angle_width,
            ) / total
        })
        .collect();
    let ambient_haar_mass = (0..bins * bins * bins)
        .map(|k| theta_masses[(k / bins) % bins])
        .collect();

    Ok(HaarHistogram {
        bins_per_axis: bins,
        samples: orbit.len(),
        achievable_mask: counts.iter().map(|&c| c > 0).collect(),
        counts,
        haar_weights,
        ambient_haar_mass,
        normalized_occupancy,
        flatness,
        orphan_samples,
        period: closure.period(),
    })
}

/// One-dimensional histogram with its invariant weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleHistogram {
    pub bins: usize,
    pub samples: usize,
    pub counts: Vec<u64>,
    /// Invariant mass of each bin.
    pub masses: Vec<f64>,
    pub normalized_occupancy: Vec<f64>,
    pub flatness: f64,
    /// Fewer than [`MIN_SAMPLES`] samples.
    pub low_sample: bool,
}

impl AngleHistogram {
    pub fn achievable_bins(&self) -> usize {
        self.counts.iter().filter(|c| **c > 0).count()
    }
}

/// Masses of the closure's Haar measure pushed through `f` onto bins.
fn closure_masses_1d<F: Fn(f64) -> usize>(
    closure: &OrbitClosure,
    orbit: &[OrbitRecord],
    bins: usize,
    bin_of: F,
) -> Vec<f64> {
    let mut mass = vec![0.0; bins];
    match closure {
        OrbitClosure::Point(_) => mass[bin_of(0.0)] = 1.0,
        OrbitClosure::Cyclic(elements) => {
            let w = 1.0 / elements.len() as f64;
            for beta in orbit_angles(&orbit[..elements.len()]) {
                mass[bin_of(beta)] += w;
            }
        }
        OrbitClosure::Circle { .. } => unreachable!("circle masses are analytic"),
    }
    mass
}

/// Histogram of the orbit angle β_n ∈ [0, 2π).
pub fn orbit_angle_histogram(
    orbit: &[OrbitRecord],
    bins: usize,
) -> Result<AngleHistogram, ErgodicError> {
    if bins == 0 {
        return Err(ErgodicError::InvalidBins);
    }
    let width = 2.0 * PI / bins as f64;
    let bin_of = |beta: f64| bin_index(beta, 0.0, width, bins, true);
    let mut counts = vec![0u64; bins];
    for beta in orbit_angles(orbit) {
        counts[bin_of(beta)] += 1;
    }
    let closure = orbit_closure(orbit);
    let masses = match closure {
        OrbitClosure::Circle { .. } => vec![1.0 / bins as f64; bins],
        _ => closure_masses_1d(&closure, orbit, bins, bin_of),
    };
    let (normalized_occupancy, flatness) =
        normalized_flatness(&counts, &masses, orbit.len().max(1));
    Ok(AngleHistogram {
        bins,
        samples: orbit.len(),
        counts,
        masses,
        normalized_occupancy,
        flatness,
        low_sample: orbit.len() < MIN_SAMPLES,
    })
}

/// The orbit pushed through `x = cos β` and binned uniformly on [-1, 1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlHistogram {
    pub bins: usize,
    pub samples: usize,
    pub counts: Vec<u64>,
    /// Flatness against equal bin weights (the non-invariant measure).
    pub naive_flatness: f64,
    /// Flatness after dividing by the pushed-forward invariant mass.
    pub corrected_flatness: f64,
    pub invariant_masses: Vec<f64>,
    /// Single occupied bin (constant orbit).
    pub degenerate: bool,
}

pub fn non_invariant_control(
    orbit: &[OrbitRecord],
    bins: usize,
) -> Result<ControlHistogram, ErgodicError> {
    if bins == 0 {
        return Err(ErgodicError::InvalidBins);
    }
    let width = 2.0 / bins as f64;
    let bin_of = |beta: f64| bin_index(beta.cos(), -1.0, width, bins, false);
    let mut counts = vec![0u64; bins];
    for beta in orbit_angles(orbit) {
        counts[bin_of(beta)] += 1;
    }
    let samples = orbit.len().max(1);
    let flat = vec![1.0 / bins as f64; bins];
    let (_, naive_flatness) = normalized_flatness(&counts, &flat, samples);
    let closure = orbit_closure(orbit);
    let invariant_masses = match closure {
        // arcsine law of cos β for uniform β
        OrbitClosure::Circle { .. } => (0..bins)
            .map(|i| {
                let lo = (-1.0 + i as f64 * width).clamp(-1.0, 1.0);
                let hi = (-1.0 + (i + 1) as f64 * width).clamp(-1.0, 1.0);
                (hi.asin() - lo.asin()) / PI
            })
            .collect(),
        _ => closure_masses_1d(&closure, orbit, bins, bin_of),
    };
    let (_, corrected_flatness) = normalized_flatness(&counts, &invariant_masses, samples);
    let degenerate = counts.iter().filter(|c| **c > 0).count() <= 1;
    Ok(ControlHistogram {
        bins,
        samples: orbit.len(),
        counts,
        naive_flatness,
        corrected_flatness,
        invariant_masses,
        degenerate,
    })
}

/// `exp(-i t h)` for the principal generator `h` of `U = exp(-i h)` (up to
/// phase). `t = n` reproduces `U^n` on the projective group.
pub fn continuous_power(u: &UnitaryOperator, t: f64) -> UnitaryOperator {
    let (c, v) = u.pauli_components();
    let sign = if c < 0.0 { -1.0 } else { 1.0 };
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if norm == 0.0 {
        return UnitaryOperator::identity();
    }
    let axis = [sign * v[0] / norm, sign * v[1] / norm, sign * v[2] / norm];
    UnitaryOperator::axis_rotation(axis, t * projective_angle(u))
}

/// Largest deviation of the state and group distances from their initial
/// values along `n` applications of `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricDrift {
    pub steps: usize,
    pub state_distance: f64,
    pub group_distance: f64,
    pub state_max_deviation: f64,
    pub group_max_deviation: f64,
}

pub fn metric_drift(
    u: &UnitaryOperator,
    states: (QuantumState, QuantumState),
    elements: (UnitaryOperator, UnitaryOperator),
    steps: usize,
) -> Result<MetricDrift, ErgodicError> {
    UnitaryOperator::from_matrix(*u.matrix())?;
    let (mut a, mut b) = states;
    let (mut g, mut h) = elements;
    let d_state = state_distance(&a, &b)?;
    let d_group = group_distance(&g, &h)?;
    let (mut worst_state, mut worst_group): (f64, f64) = (0.0, 0.0);
    for n in 1..=steps {
        a = u.apply(&a);
        b = u.apply(&b);
        g = *u * g;
        h = *u * h;
        if n % REUNITARIZE_EVERY == 0 {
            a = a.renormalize();
            b = b.renormalize();
            g = g.reunitarize();
            h = h.reunitarize();
        }
        worst_state =
            worst_state.max((state_distance(&a.renormalize(), &b.renormalize())? - d_state).abs());
        worst_group = worst_group.max((group_distance(&g, &h)? - d_group).abs());
    }
    Ok(MetricDrift {
        steps,
        state_distance: d_state,
        group_distance: d_group,
        state_max_deviation: worst_state,
        group_max_deviation: worst_group,
    })
}
