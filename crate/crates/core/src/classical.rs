//! Classical phase-space testbed.
//!
//! Flows of one-degree-of-freedom Hamiltonians preserve `dp ∧ dq`, so a
//! density carried along trajectories keeps its value. The damped system is
//! the non-Hamiltonian control: its phase-space divergence is `-γ` and the
//! carried density grows like `e^{γt}`.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fd::{central_jacobian, det2};

/// Default integration step.
pub const DEFAULT_DT: f64 = 1e-3;
/// Default number of integration steps between output rows.
pub const DEFAULT_STRIDE: usize = 100;
/// Default finite-difference step for flow-map Jacobians.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassicalError {
    #[error("leapfrog requires a Hamiltonian system; the damped control is integrated with RK4")]
    NonHamiltonianSystem,
    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("ensemble weights must be non-negative and sum to 1 (sum = {0})")]
    BadWeights(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpacePoint {
    pub p: f64,
    pub q: f64,
}

impl PhaseSpacePoint {
    pub fn new(p: f64, q: f64) -> Self {
        Self { p, q }
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self.p - other.p).hypot(self.q - other.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HamiltonianSpec {
    /// `H = p²/2m + mω²q²/2`
    Harmonic { mass: f64, omega: f64 },
    /// `H = p²/2m + k2 q²/2 + k4 q⁴/4`
    Quartic { mass: f64, k2: f64, k4: f64 },
    /// `H = p²/(2 m l²) + m g l (1 - cos q)`
    Pendulum {
        mass: f64,
        length: f64,
        gravity: f64,
    },
    /// `ṗ = -k q - γ p`, `q̇ = p/m`; not Hamiltonian for γ > 0.
    DampedControl {
        mass: f64,
        stiffness: f64,
        gamma: f64,
    },
}

impl HamiltonianSpec {
    pub fn harmonic() -> Self {
        Self::Harmonic {
            mass: 1.0,
            omega: 1.0,
        }
    }

    pub fn quartic() -> Self {
        Self::Quartic {
            mass: 1.0,
            k2: 1.0,
            k4: 0.4,
        }
    }

    pub fn pendulum() -> Self {
        Self::Pendulum {
            mass: 1.0,
            length: 1.0,
            gravity: 1.0,
        }
    }

    pub fn damped() -> Self {
        Self::DampedControl {
            mass: 1.0,
            stiffness: 1.0,
            gamma: 0.5,
        }
    }

    pub fn validate(&self) -> Result<(), ClassicalError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        match *self {
            Self::Harmonic { mass, omega } => {
                if !ok(mass) || !ok(omega) {
                    return Err(ClassicalError::InvalidParameter(
                        "harmonic needs m > 0 and ω > 0",
                    ));
                }
            }
            Self::Quartic { mass, k2, k4 } => {
                if !ok(mass) || !k2.is_finite() || !k4.is_finite() {
                    return Err(ClassicalError::InvalidParameter(
                        "quartic needs m > 0 and finite k2, k4",
                    ));
                }
            }
            Self::Pendulum {
                mass,
                length,
                gravity,
            } => {
                if !ok(mass) || !ok(length) || !ok(gravity) {
                    return Err(ClassicalError::InvalidParameter(
                        "pendulum needs positive m, l, g",
                    ));
                }
            }
            Self::DampedControl {
                mass,
                stiffness,
                gamma,
            } => {
                if !ok(mass) || !stiffness.is_finite() || !(gamma.is_finite() && gamma >= 0.0) {
                    return Err(ClassicalError::InvalidParameter(
                        "damped control needs m > 0 and γ ≥ 0",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_hamiltonian(&self) -> bool {
        !matches!(self, Self::DampedControl { .. })
    }

    /// Effective inertia M in `q̇ = p / M`.
    fn inertia(&self) -> f64 {
        match *self {
            Self::Harmonic { mass, .. }
            | Self::Quartic { mass, .. }
            | Self::DampedControl { mass, .. } => mass,
            Self::Pendulum { mass, length, .. } => mass * length * length,
        }
    }

    /// Position-dependent part of `ṗ`.
    fn force(&self, q: f64) -> f64 {
        match *self {
            Self::Harmonic { mass, omega } => -mass * omega * omega * q,
            Self::Quartic { k2, k4, .. } => -k2 * q - k4 * q * q * q,
            Self::Pendulum {
                mass,
                length,
                gravity,
            } => -mass * gravity * length * q.sin(),
            Self::DampedControl { stiffness, .. } => -stiffness * q,
        }
    }

    /// Equations of motion `(ṗ, q̇)`.
    pub fn velocity(&self, x: &PhaseSpacePoint) -> (f64, f64) {
        let mut p_dot = self.force(x.q);
        if let Self::DampedControl { gamma, .. } = *self {
            p_dot -= gamma * x.p;
        }
        (p_dot, x.p / self.inertia())
    }

    /// Energy for the Hamiltonian kinds, `None` for the damped control.
    pub fn energy(&self, x: &PhaseSpacePoint) -> Option<f64> {
        let kinetic = x.p * x.p / (2.0 * self.inertia());
        let potential = match *self {
            Self::Harmonic { mass, omega } => 0.5 * mass * omega * omega * x.q * x.q,
            Self::Quartic { k2, k4, .. } => 0.5 * k2 * x.q * x.q + 0.25 * k4 * x.q.powi(4),
            Self::Pendulum {
                mass,
                length,
                gravity,
            } => mass * gravity * length * (1.0 - x.q.cos()),
            Self::DampedControl { .. } => return None,
        };
        Some(kinetic + potential)
    }
}

/// Exact flow of the harmonic oscillator,
/// `q(t) = q₀ cos ωt + (p₀/mω) sin ωt`, `p(t) = p₀ cos ωt - mωq₀ sin ωt`.
pub fn exact_harmonic_flow(x0: &PhaseSpacePoint, t: f64, mass: f64, omega: f64) -> PhaseSpacePoint {
    let (s, c) = (omega * t).sin_cos();
    PhaseSpacePoint {
        p: c * x0.p - mass * omega * s * x0.q,
        q: c * x0.q + s * x0.p / (mass * omega),
    }
}

/// One kick-drift-kick step.
pub fn leapfrog_step(
    x: &PhaseSpacePoint,
    dt: f64,
    h: &HamiltonianSpec,
) -> Result<PhaseSpacePoint, ClassicalError> {
    if !h.is_hamiltonian() {
        return Err(ClassicalError::NonHamiltonianSystem);
    }
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(ClassicalError::InvalidTimeStep(dt));
    }
    Ok(kick_drift_kick(x, dt, h))
}

fn kick_drift_kick(x: &PhaseSpacePoint, dt: f64, h: &HamiltonianSpec) -> PhaseSpacePoint {
    let p_half = x.p + 0.5 * dt * h.force(x.q);
    let q = x.q + dt * p_half / h.inertia();
    let p = p_half + 0.5 * dt * h.force(q);
    PhaseSpacePoint { p, q }
}

fn rk4_step(x: &PhaseSpacePoint, dt: f64, h: &HamiltonianSpec) -> PhaseSpacePoint {
    let shift = |x: &PhaseSpacePoint, k: (f64, f64), s: f64| PhaseSpacePoint {
        p: x.p + s * k.0,
        q: x.q + s * k.1,
    };
    let k1 = h.velocity(x);
    let k2 = h.velocity(&shift(x, k1, 0.5 * dt));
    let k3 = h.velocity(&shift(x, k2, 0.5 * dt));
    let k4 = h.velocity(&shift(x, k3, dt));
    PhaseSpacePoint {
        p: x.p + dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0),
        q: x.q + dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1),
    }
}

/// Single step of the integrator appropriate for `h`: leapfrog for the
/// Hamiltonian kinds, classical RK4 for the damped control.
pub fn step(x: &PhaseSpacePoint, dt: f64, h: &HamiltonianSpec) -> PhaseSpacePoint {
    if h.is_hamiltonian() {
        kick_drift_kick(x, dt, h)
    } else {
        rk4_step(x, dt, h)
    }
}

/// Number of equal steps of size at most `dt` covering `t`.
fn step_count(t: f64, dt: f64) -> Result<usize, ClassicalError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ClassicalError::InvalidTimeStep(dt));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(ClassicalError::InvalidParameter(
            "time must be finite and non-negative",
        ));
    }
    // tolerate t/dt landing a hair above an integer
    Ok((t / dt - 1e-9).ceil().max(0.0) as usize)
}

/// Time-`t` flow map, using steps of size at most `dt`.
pub fn evolve(
    h: &HamiltonianSpec,
    x0: &PhaseSpacePoint,
    t: f64,
    dt: f64,
) -> Result<PhaseSpacePoint, ClassicalError> {
    h.validate()?;
    let n = step_count(t, dt)?;
    if n == 0 {
        return Ok(*x0);
    }
    let h_step = t / n as f64;
    let mut x = *x0;
    for _ in 0..n {
        x = step(&x, h_step, h);
    }
    Ok(x)
}

/// `∂ṗ/∂p + ∂q̇/∂q` from the equations of motion.
pub fn divergence_field(h: &HamiltonianSpec, _x: &PhaseSpacePoint) -> f64 {
    match *h {
        // ∂ṗ/∂p = 0 and ∂q̇/∂q = 0 separately for separable H
        HamiltonianSpec::Harmonic { .. }
        | HamiltonianSpec::Quartic { .. }
        | HamiltonianSpec::Pendulum { .. } => 0.0,
        HamiltonianSpec::DampedControl { gamma, .. } => -gamma,
    }
}

/// Central-difference determinant of the time-`t` flow map at `x0`.
pub fn flow_jacobian(
    h: &HamiltonianSpec,
    x0: &PhaseSpacePoint,
    t: f64,
    dt: f64,
    fd_step: f64,
) -> Result<f64, ClassicalError> {
    h.validate()?;
    step_count(t, dt)?;
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(ClassicalError::InvalidParameter("fd_step must be positive"));
    }
    let map = |x: &[f64]| {
        let out = evolve(h, &PhaseSpacePoint::new(x[0], x[1]), t, dt).expect("validated above");
        vec![out.p, out.q]
    };
    Ok(det2(&central_jacobian(map, &[x0.p, x0.q], fd_step, &[])))
}

/// Weighted samples of an initial density ρ₀.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ensemble {
    points: Vec<PhaseSpacePoint>,
    weights: Vec<f64>,
}

impl Ensemble {
    pub fn new(points: Vec<PhaseSpacePoint>, weights: Vec<f64>) -> Result<Self, ClassicalError> {
        if points.is_empty() {
            return Err(ClassicalError::EmptyEnsemble);
        }
        if points.len() != weights.len() {
            return Err(ClassicalError::InvalidParameter("one weight per point"));
        }
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) || (sum - 1.0).abs() > 1e-12 {
            return Err(ClassicalError::BadWeights(sum));
        }
        Ok(Self { points, weights })
    }

    /// `n` points drawn from a Gaussian around `center`, weighted by the
    /// normalized Gaussian density at each point.
    pub fn gaussian<R: Rng + ?Sized>(
        center: PhaseSpacePoint,
        sigma: f64,
        n: usize,
        rng: &mut R,
    ) -> Result<Self, ClassicalError> {
        if n == 0 {
            return Err(ClassicalError::EmptyEnsemble);
        }
        let normal = Normal::new(0.0, sigma)
            .map_err(|_| ClassicalError::InvalidParameter("sigma must be positive"))?;
        let points: Vec<PhaseSpacePoint> = (0..n)
            .map(|_| {
                PhaseSpacePoint::new(center.p + normal.sample(rng), center.q + normal.sample(rng))
            })
            .collect();
        let raw: Vec<f64> = points
            .iter()
            .map(|x| {
                let r2 = (x.p - center.p).powi(2) + (x.q - center.q).powi(2);
                (-0.5 * r2 / (sigma * sigma)).exp()
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        // absorb the rounding residue so the weights sum to 1 exactly enough
        let residue = 1.0 - weights.iter().sum::<f64>();
        weights[0] += residue;
        Self::new(points, weights)
    }

    pub fn points(&self) -> &[PhaseSpacePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityProbe {
    pub initial: PhaseSpacePoint,
    pub current: PhaseSpacePoint,
    pub rho_initial: f64,
    pub rho_current: f64,
    pub det_jacobian: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub time: f64,
    pub probes: Vec<DensityProbe>,
    /// `max |ρ(x(t), t) - ρ₀(x₀)| / ρ₀(x₀)` over the probes.
    pub residual: f64,
}

/// Advects every ensemble point and carries its density with the flow-map
/// Jacobian, `ρ(x(t), t) = ρ₀(x₀) / |det J_t(x₀)|`.
pub fn transport_density(
    ensemble: &Ensemble,
    h: &HamiltonianSpec,
    t: f64,
    dt: f64,
) -> Result<DensityReport, ClassicalError> {
    transport_density_with_step(ensemble, h, t, dt, DEFAULT_FD_STEP)
}

pub fn transport_density_with_step(
    ensemble: &Ensemble,
    h: &HamiltonianSpec,
    t: f64,
    dt: f64,
    fd_step: f64,
) -> Result<DensityReport, ClassicalError> {
    if ensemble.is_empty() {
        return Err(ClassicalError::EmptyEnsemble);
    }
    h.validate()?;
    step_count(t, dt)?;
    let probes: Vec<DensityProbe> = ensemble
        .points
        .par_iter()
        .zip(ensemble.weights.par_iter())
        .map(|(x0, &rho0)| {
            let current = evolve(h, x0, t, dt)?;
            let det = flow_jacobian(h, x0, t, dt, fd_step)?;
            Ok(DensityProbe {
                initial: *x0,
                current,
                rho_initial: rho0,
                rho_current: rho0 / det.abs(),
                det_jacobian: det,
            })
        })
        .collect::<Result<_, ClassicalError>>()?;
    let residual = probes
        .iter()
        .filter(|p| p.rho_initial > 0.0)
        .map(|p| (p.rho_current - p.rho_initial).abs() / p.rho_initial)
        .fold(0.0, f64::max);
    Ok(DensityReport {
        time: t,
        probes,
        residual,
    })
}

/// Flow-map determinant at `x0` sampled every `stride` steps (and at the
/// final time), from four neighbouring trajectories advanced in lockstep.
pub fn jacobian_series(
    h: &HamiltonianSpec,
    x0: &PhaseSpacePoint,
    total_time: f64,
    dt: f64,
    stride: usize,
    fd_step: f64,
) -> Result<Vec<(f64, f64)>, ClassicalError> {
    h.validate()?;
    if stride == 0 {
        return Err(ClassicalError::InvalidParameter("stride must be positive"));
    }
    if !(fd_step.is_finite() && fd_step > 0.0) {
        return Err(ClassicalError::InvalidParameter("fd_step must be positive"));
    }
    let n = step_count(total_time, dt)?;
    let h_step = if n == 0 { 0.0 } else { total_time / n as f64 };
    let e = fd_step;
    let mut xs = [
        PhaseSpacePoint::new(x0.p + e, x0.q),
        PhaseSpacePoint::new(x0.p - e, x0.q),
        PhaseSpacePoint::new(x0.p, x0.q + e),
        PhaseSpacePoint::new(x0.p, x0.q - e),
    ];
    let det = |xs: &[PhaseSpacePoint; 4]| {
        let (a, b, c, d) = (xs[0], xs[1], xs[2], xs[3]);
        ((a.p - b.p) * (c.q - d.q) - (c.p - d.p) * (a.q - b.q)) / (4.0 * e * e)
    };
    let mut out = Vec::with_capacity(n / stride + 2);
    out.push((0.0, det(&xs)));
    for i in 1..=n {
        for x in xs.iter_mut() {
            *x = step(x, h_step, h);
        }
        if i % stride == 0 || i == n {
            out.push((i as f64 * h_step, det(&xs)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportRow {
    pub t: f64,
    /// Mean flow-map determinant over the ensemble.
    pub det_jacobian: f64,
    /// `max |ρ/ρ₀ − 1|` over the ensemble.
    pub density_residual: f64,
}

/// [`jacobian_series`] for every ensemble point, reduced to one row per
/// sampled time.
pub fn transport_series(
    ensemble: &Ensemble,
    h: &HamiltonianSpec,
    total_time: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<TransportRow>, ClassicalError> {
    if ensemble.is_empty() {
        return Err(ClassicalError::EmptyEnsemble);
    }
    let series: Vec<Vec<(f64, f64)>> = ensemble
        .points
        .par_iter()
        .map(|x| jacobian_series(h, x, total_time, dt, stride, DEFAULT_FD_STEP))
        .collect::<Result<_, _>>()?;
    let rows = series[0].len();
    Ok((0..rows)
        .map(|k| {
            let dets = series.iter().map(|s| s[k].1);
            TransportRow {
                t: series[0][k].0,
                det_jacobian: dets.clone().sum::<f64>() / series.len() as f64,
                density_residual: dets
                    .map(|d| (1.0 / d.abs() - 1.0).abs())
                    .fold(0.0, f64::max),
            }
        })
        .collect())
}

/// Model-free cross-check of density transport: for each probe index, the
/// squared ratio of its k-th nearest-neighbour radius before and after the
/// flow, which estimates `ρ(x(t), t) / ρ₀(x₀)` for an unweighted sample.
pub fn knn_density_ratio(
    initial: &[PhaseSpacePoint],
    advected: &[PhaseSpacePoint],
    probes: &[usize],
    k: usize,
) -> Result<Vec<f64>, ClassicalError> {
    if initial.len() != advected.len() || k == 0 || k >= initial.len() {
        return Err(ClassicalError::InvalidParameter(
            "k-NN needs matching clouds with more than k points",
        ));
    }
    let kth = |cloud: &[PhaseSpacePoint], i: usize| {
        let mut d: Vec<f64> = cloud
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, x)| x.distance(&cloud[i]))
            .collect();
        d.select_nth_unstable_by(k - 1, f64::total_cmp);
        d[k - 1]
    };
    Ok(probes
        .iter()
        .map(|&i| (kth(initial, i) / kth(advected, i)).powi(2))
        .collect())
}

/// Euclidean (p, q) distance between two trajectories, sampled every
/// `stride` steps from t = 0 to t = `total_time`.
pub fn pair_distance_series(
    h: &HamiltonianSpec,
    a: &PhaseSpacePoint,
    b: &PhaseSpacePoint,
    total_time: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<(f64, f64)>, ClassicalError> {
    h.validate()?;
    if !(total_time.is_finite() && total_time > 0.0) {
        return Err(ClassicalError::InvalidParameter(
            "total time must be positive",
        ));
    }
    if stride == 0 {
        return Err(ClassicalError::InvalidParameter("stride must be positive"));
    }
    let n = step_count(total_time, dt)?;
    let h_step = total_time / n as f64;
    let (mut xa, mut xb) = (*a, *b);
    let mut out = Vec::with_capacity(n / stride + 2);
    out.push((0.0, xa.distance(&xb)));
    for i in 1..=n {
        xa = step(&xa, h_step, h);
        xb = step(&xb, h_step, h);
        if i % stride == 0 || i == n {
            out.push((i as f64 * h_step, xa.distance(&xb)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exact_flow_identity_and_period() {
        let x0 = PhaseSpacePoint::new(0.3, -1.2);
        assert_eq!(exact_harmonic_flow(&x0, 0.0, 2.0, 1.5), x0);
        let back = exact_harmonic_flow(&x0, 2.0 * PI / 1.5, 2.0, 1.5);
        assert!(back.distance(&x0) < 1e-12);
    }

    #[test]
    fn leapfrog_zero_step_is_identity() {
        let x = PhaseSpacePoint::new(0.7, 0.1);
        assert_eq!(
            leapfrog_step(&x, 0.0, &HamiltonianSpec::quartic()).unwrap(),
            x
        );
    }

    #[test]
    fn leapfrog_refuses_damped_control() {
        let x = PhaseSpacePoint::new(0.0, 1.0);
        assert_eq!(
            leapfrog_step(&x, 1e-3, &HamiltonianSpec::damped()),
            Err(ClassicalError::NonHamiltonianSystem)
        );
        assert!(matches!(
            leapfrog_step(&x, -1.0, &HamiltonianSpec::harmonic()),
            Err(ClassicalError::InvalidTimeStep(_))
        ));
    }

    #[test]
    fn divergence_values() {
        let x = PhaseSpacePoint::new(1.3, -0.2);
        assert_eq!(divergence_field(&HamiltonianSpec::harmonic(), &x), 0.0);
        assert_eq!(divergence_field(&HamiltonianSpec::quartic(), &x), 0.0);
        assert_eq!(divergence_field(&HamiltonianSpec::damped(), &x), -0.5);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let bad = HamiltonianSpec::Harmonic {
            mass: 1.0,
            omega: 0.0,
        };
        assert!(bad.validate().is_err());
        let bad = HamiltonianSpec::DampedControl {
            mass: 1.0,
            stiffness: 1.0,
            gamma: -0.1,
        };
        assert!(evolve(&bad, &PhaseSpacePoint::new(0.0, 0.0), 1.0, 1e-3).is_err());
    }

    #[test]
    fn empty_ensemble_is_rejected() {
        assert_eq!(
            Ensemble::new(vec![], vec![]),
            Err(ClassicalError::EmptyEnsemble)
        );
        assert!(matches!(
            Ensemble::new(vec![PhaseSpacePoint::new(0.0, 0.0)], vec![0.5]),
            Err(ClassicalError::BadWeights(_))
        ));
    }

    #[test]
    fn series_starts_at_initial_distance() {
        let a = PhaseSpacePoint::new(0.0, 1.0);
        let b = PhaseSpacePoint::new(0.5, 1.0);
        let s = pair_distance_series(&HamiltonianSpec::quartic(), &a, &b, 1.0, 1e-3, 100).unwrap();
        assert_eq!(s[0], (0.0, 0.5));
        assert_eq!(s.len(), 11);
        assert!((s.last().unwrap().0 - 1.0).abs() < 1e-12);
    }
}
