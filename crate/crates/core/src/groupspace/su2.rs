//! Two-level unitaries in the (Φ, Θ, Ω) model coordinates.
//!
//! A group element is written
//!
//! ```text
//!     U = [ cos(Θ/2) e^{-iΦ}          -sin(Θ/2) e^{-i(Ω-Φ)} ]
//!         [ sin(Θ/2) e^{ i(Ω-Φ)}       cos(Θ/2) e^{ iΦ}     ]
//! ```
//!
//! which has unit determinant, so the box Φ ∈ [-π, π), Θ ∈ [0, π],
//! Ω ∈ [-π, π) covers SU(2) once. Comparisons between operators and
//! between states always quotient the global phase.

use std::f64::consts::PI;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GroupError;

/// Frobenius tolerance on `U†U - I` accepted as unitary input.
pub const UNITARY_TOL: f64 = 1e-10;
/// Tolerance on the squared norm of a state.
pub const NORM_TOL: f64 = 1e-12;
/// Distance of Θ from {0, π} below which Ω is a gauge and stored as 0.
pub const GIMBAL_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    let mut y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y >= PI {
        y -= 2.0 * PI;
    }
    y
}

/// Parameter triple locating an element of SU(2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupCoordinates {
    pub phi: f64,
    pub theta: f64,
    pub omega: f64,
}

impl GroupCoordinates {
    pub fn new(phi: f64, theta: f64, omega: f64) -> Self {
        Self { phi, theta, omega }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// True when Θ sits on the degenerate set where Ω carries no information.
    pub fn is_gimbal(&self) -> bool {
        self.theta < GIMBAL_TOL || PI - self.theta < GIMBAL_TOL
    }

    pub fn is_canonical(&self) -> bool {
        (-PI..PI).contains(&self.phi)
            && (0.0..=PI).contains(&self.theta)
            && (-PI..PI).contains(&self.omega)
            && (!self.is_gimbal() || self.omega == 0.0)
    }
}

/// 2×2 unitary matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitaryOperator {
    m: [[Complex64; 2]; 2],
}

impl UnitaryOperator {
    pub fn identity() -> Self {
        Self {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Wraps a matrix, rejecting it if `‖U†U - I‖_F > UNITARY_TOL`.
    pub fn from_matrix(m: [[Complex64; 2]; 2]) -> Result<Self, GroupError> {
        let u = Self { m };
        let defect = u.unitarity_defect();
        if !defect.is_finite() || defect > UNITARY_TOL {
            return Err(GroupError::NonUnitaryInput { defect });
        }
        Ok(u)
    }

    /// Wraps a matrix without checking unitarity.
    pub fn from_matrix_unchecked(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn matrix(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self {
            m: [
                [m[0][0].conj(), m[1][0].conj()],
                [m[0][1].conj(), m[1][1].conj()],
            ],
        }
    }

    pub fn det(&self) -> Complex64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.m[0][0] + self.m[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.m;
        Self {
            m: [[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]],
        }
    }

    /// Frobenius norm of `U†U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let g = self.adjoint() * *self;
        let mut acc = 0.0;
        for (i, row) in g.m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { ONE } else { ZERO };
                acc += (v - target).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Frobenius distance to another operator (no phase quotient).
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += (self.m[i][j] - other.m[i][j]).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Nearest unitary in the polar sense, by Newton iteration
    /// `X ← (X + X^{-†}) / 2`.
    pub fn reunitarize(&self) -> Self {
        let mut x = *self;
        for _ in 0..8 {
            let det = x.det();
            if det.norm() == 0.0 {
                break;
            }
            // inverse-adjoint of [[a, b], [c, d]] is [[d, -c], [-b, a]]^* / det^*
            let inv_det = det.conj().inv();
            let m = &x.m;
            let inv_adj = [
                [m[1][1].conj() * inv_det, -m[1][0].conj() * inv_det],
                [-m[0][1].conj() * inv_det, m[0][0].conj() * inv_det],
            ];
            let mut next = x;
            for (row, (xr, ar)) in next.m.iter_mut().zip(x.m.iter().zip(&inv_adj)) {
                for (e, (a, b)) in row.iter_mut().zip(xr.iter().zip(ar)) {
                    *e = 0.5 * (a + b);
                }
            }
            let change = next.frobenius_distance(&x);
            x = next;
            if change < 1e-17 {
                break;
            }
        }
        x
    }

    /// Copy with the global phase removed so that `det = 1`.
    ///
    /// The branch of `sqrt(det)` is the principal one, so an operator that
    /// already has unit determinant is returned unchanged.
    pub fn special_part(&self) -> Self {
        let det = self.det();
        let half = Complex64::from_polar(det.norm().sqrt(), 0.5 * det.arg());
        self.scale(half.inv())
    }

    /// Unit-quaternion form `(c, v)` with `U ∝ c·I - i v·σ`, projected onto
    /// SU(2) after removing the global phase.
    pub fn pauli_components(&self) -> (f64, [f64; 3]) {
        let s = self.special_part();
        let a = 0.5 * (s.m[0][0] + s.m[1][1].conj());
        let b = 0.5 * (s.m[1][0] - s.m[0][1].conj());
        (a.re, [-b.im, b.re, -a.im])
    }

    pub fn apply(&self, state: &QuantumState) -> QuantumState {
        let [x, y] = state.amplitudes;
        QuantumState {
            amplitudes: [
                self.m[0][0] * x + self.m[0][1] * y,
                self.m[1][0] * x + self.m[1][1] * y,
            ],
        }
    }

    /// `exp(-i β/2 n̂·σ)` for a unit axis `n̂`.
    pub fn axis_rotation(axis: [f64; 3], beta: f64) -> Self {
        let (s, c) = (0.5 * beta).sin_cos();
        let [nx, ny, nz] = axis;
        Self {
            m: [
                [Complex64::new(c, -s * nz), Complex64::new(-s * ny, -s * nx)],
                [Complex64::new(s * ny, -s * nx), Complex64::new(c, s * nz)],
            ],
        }
    }
}

impl Mul for UnitaryOperator {
    type Output = UnitaryOperator;

    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[ZERO; 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        UnitaryOperator { m }
    }
}

/// Normalized two-component state vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumState {
    amplitudes: [Complex64; 2],
}

impl QuantumState {
    /// Validates that the squared norm is 1 within `NORM_TOL`.
    pub fn new(amplitudes: [Complex64; 2]) -> Result<Self, GroupError> {
        let s = Self { amplitudes };
        s.check_normalized()?;
        Ok(s)
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: [Complex64; 2]) -> Result<Self, GroupError> {
        let n = (amplitudes[0].norm_sqr() + amplitudes[1].norm_sqr()).sqrt();
        if !(n.is_finite() && n > 0.0) {
            return Err(GroupError::NotNormalized { norm_sqr: n * n });
        }
        Ok(Self {
            amplitudes: [amplitudes[0] / n, amplitudes[1] / n],
        })
    }

    /// |0⟩ = (1, 0)ᵀ.
    pub fn ground() -> Self {
        Self {
            amplitudes: [ONE, ZERO],
        }
    }

    /// |1⟩ = (0, 1)ᵀ.
    pub fn excited() -> Self {
        Self {
            amplitudes: [ZERO, ONE],
        }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes[0].norm_sqr() + self.amplitudes[1].norm_sqr()
    }

    fn check_normalized(&self) -> Result<(), GroupError> {
        let norm_sqr = self.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(GroupError::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    pub fn renormalize(&self) -> Self {
        Self::normalized(self.amplitudes).unwrap_or(*self)
    }
}

/// Closed-form evolution operator in model coordinates.
pub fn build_unitary(coords: GroupCoordinates) -> UnitaryOperator {
    let GroupCoordinates { phi, theta, omega } = coords;
    let (s, c) = (0.5 * theta).sin_cos();
    UnitaryOperator {
        m: [
            [
                Complex64::from_polar(c, -phi),
                -Complex64::from_polar(s, -(omega - phi)),
            ],
            [
                Complex64::from_polar(s, omega - phi),
                Complex64::from_polar(c, phi),
            ],
        ],
    }
}

/// Inverse of [`build_unitary`] up to a global phase.
///
/// The phase is removed with the principal square root of the determinant,
/// so unit-determinant input is recovered exactly. On the gimbal set
/// (Θ within [`GIMBAL_TOL`] of 0 or π) Ω is reported as 0.
pub fn decompose_unitary(u: &UnitaryOperator) -> Result<GroupCoordinates, GroupError> {
    let defect = u.unitarity_defect();
    if !defect.is_finite() || defect > UNITARY_TOL {
        return Err(GroupError::NonUnitaryInput { defect });
    }
    let s = u.special_part();
    let a = 0.5 * (s.m[0][0] + s.m[1][1].conj());
    let b = 0.5 * (s.m[1][0] - s.m[0][1].conj());
    let theta = 2.0 * b.norm().atan2(a.norm());
    let (phi, omega) = if theta < GIMBAL_TOL {
        (-a.arg(), 0.0)
    } else if PI - theta < GIMBAL_TOL {
        (-b.arg(), 0.0)
    } else {
        let phi = -a.arg();
        (phi, b.arg() + phi)
    };
    Ok(GroupCoordinates {
        phi: wrap_angle(phi),
        theta,
        omega: if omega == 0.0 { 0.0 } else { wrap_angle(omega) },
    })
}

/// Bi-invariant distance on the projective group: the rotation angle of
/// `U†V` with the global phase quotiented out. Lies in `[0, π]`.
pub fn group_distance(u: &UnitaryOperator, v: &UnitaryOperator) -> Result<f64, GroupError> {
    for w in [u, v] {
        let defect = w.unitarity_defect();
        if !defect.is_finite() || defect > UNITARY_TOL {
            return Err(GroupError::NonUnitaryInput { defect });
        }
    }
    Ok(projective_angle(&(u.adjoint() * *v)))
}

/// Rotation angle in `[0, π]` of an operator on the projective group.
pub fn projective_angle(w: &UnitaryOperator) -> f64 {
    let (c, v) = w.pauli_components();
    let s = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    2.0 * s.atan2(c.abs())
}

/// Fubini–Study angle `arccos |⟨a|b⟩|`, in `[0, π/2]`.
pub fn state_distance(a: &QuantumState, b: &QuantumState) -> Result<f64, GroupError> {
    a.check_normalized()?;
    b.check_normalized()?;
    let [a0, a1] = a.amplitudes;
    let [b0, b1] = b.amplitudes;
    let overlap = (a0.conj() * b0 + a1.conj() * b1).norm();
    // |a|²|b|² - |⟨a|b⟩|² = |a0 b1 - a1 b0|² in two dimensions
    let wedge = (a0 * b1 - a1 * b0).norm();
    Ok(wedge.atan2(overlap).clamp(0.0, 0.5 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_coordinates_build_identity() {
        let u = build_unitary(GroupCoordinates::identity());
        assert_eq!(u, UnitaryOperator::identity());
    }

    #[test]
    fn fig_parameters_give_real_rotation() {
        let u = build_unitary(GroupCoordinates::new(0.0, PI / 4.0, 0.0));
        let (s, co) = (PI / 8.0).sin_cos();
        let expected = [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]];
        for (i, row) in expected.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                assert!((u.entry(i, j) - e).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn decompose_identity() {
        let g = decompose_unitary(&UnitaryOperator::identity()).unwrap();
        assert_eq!(g, GroupCoordinates::identity());
    }

    #[test]
    fn decompose_recovers_known_triple() {
        let g = decompose_unitary(&build_unitary(GroupCoordinates::new(0.3, 1.1, -2.0))).unwrap();
        assert!((g.phi - 0.3).abs() < 1e-10);
        assert!((g.theta - 1.1).abs() < 1e-10);
        assert!((g.omega + 2.0).abs() < 1e-10);
    }

    #[test]
    fn decompose_quotients_global_phase() {
        let coords = GroupCoordinates::new(-0.4, 2.0, 1.3);
        let u = build_unitary(coords).scale(Complex64::from_polar(1.0, 0.37));
        let g = decompose_unitary(&u).unwrap();
        let back = build_unitary(g);
        // equal up to a phase: |tr(U†V)| = 2
        assert!(((u.adjoint() * back).trace().norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gimbal_points_store_zero_omega() {
        for theta in [0.0, PI] {
            let g =
                decompose_unitary(&build_unitary(GroupCoordinates::new(0.7, theta, 2.5))).unwrap();
            assert_eq!(g.omega, 0.0);
            assert!(g.is_canonical());
            let back = build_unitary(g);
            let u = build_unitary(GroupCoordinates::new(0.7, theta, 2.5));
            assert!(u.frobenius_distance(&back) < 1e-12);
        }
    }

    #[test]
    fn decompose_rejects_non_unitary() {
        let m = [[c(2.0, 0.0), ZERO], [ZERO, ONE]];
        let u = UnitaryOperator::from_matrix_unchecked(m);
        assert!(matches!(
            decompose_unitary(&u),
            Err(GroupError::NonUnitaryInput { .. })
        ));
        assert!(UnitaryOperator::from_matrix(m).is_err());
    }

    #[test]
    fn distance_quotients_sign() {
        let minus = UnitaryOperator::identity().scale(c(-1.0, 0.0));
        assert_eq!(
            group_distance(&UnitaryOperator::identity(), &minus).unwrap(),
            0.0
        );
        let u = build_unitary(GroupCoordinates::new(0.2, 0.9, 0.1));
        assert_eq!(group_distance(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn distance_of_half_turn() {
        // σ_x rotation by π
        let x = UnitaryOperator::axis_rotation([1.0, 0.0, 0.0], PI);
        let d = group_distance(&UnitaryOperator::identity(), &x).unwrap();
        assert!((d - PI).abs() < 1e-15);
    }

    #[test]
    fn state_distance_basis() {
        let g = QuantumState::ground();
        let e = QuantumState::excited();
        assert_eq!(state_distance(&g, &g).unwrap(), 0.0);
        assert!((state_distance(&g, &e).unwrap() - 0.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn state_distance_rejects_unnormalized() {
        let bad = QuantumState::normalized([ONE, ZERO]).unwrap();
        let raw = QuantumState {
            amplitudes: [c(1.0, 0.0), c(0.1, 0.0)],
        };
        assert!(matches!(
            state_distance(&bad, &raw),
            Err(GroupError::NotNormalized { .. })
        ));
        assert!(QuantumState::new([c(1.0, 0.0), c(0.1, 0.0)]).is_err());
    }

    #[test]
    fn reunitarize_restores_drifted_matrix() {
        let u = build_unitary(GroupCoordinates::new(0.5, 1.0, -0.3));
        let drifted = u.scale(c(1.0 + 1e-7, 0.0));
        let fixed = drifted.reunitarize();
        assert!(fixed.unitarity_defect() < 1e-15);
        assert!(fixed.frobenius_distance(&u) < 1e-14);
    }

    #[test]
    fn axis_rotation_matches_pauli_components() {
        let axis = [0.6, 0.0, 0.8];
        let u = UnitaryOperator::axis_rotation(axis, 1.3);
        let (c0, v) = u.pauli_components();
        assert!((c0 - (0.65f64).cos()).abs() < 1e-15);
        for k in 0..3 {
            assert!((v[k] - axis[k] * (0.65f64).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), -PI);
        assert_eq!(wrap_angle(-PI), -PI);
        assert!((wrap_angle(3.0 * PI + 0.1) - (-PI + 0.1)).abs() < 1e-12);
        assert!((-PI..PI).contains(&wrap_angle(-1e-18)));
    }
}
