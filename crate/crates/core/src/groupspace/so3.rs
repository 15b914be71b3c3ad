//! SO(3) in z-x-z Euler angles, `R = Rz(φ) Rx(θ) Rz(ψ)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::su2::{wrap_angle, GIMBAL_TOL};
use super::GroupError;
use crate::fd::{central_jacobian, det3};

pub type Matrix3 = [[f64; 3]; 3];

/// Minimum |sin θ| accepted by the translation Jacobian.
pub const SINGULAR_SIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

/// Result of composing two rotations. `gimbal_degenerate` is set when the
/// product has θ within [`GIMBAL_TOL`] of 0 or π; ψ is then stored as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct So3Composition {
    pub angles: EulerAngles,
    pub gimbal_degenerate: bool,
}

fn rz(a: f64) -> Matrix3 {
    let (s, c) = a.sin_cos();
    [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]]
}

fn rx(a: f64) -> Matrix3 {
    let (s, c) = a.sin_cos();
    [[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]]
}

pub fn matmul3(a: &Matrix3, b: &Matrix3) -> Matrix3 {
    let mut out = [[0.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn is_canonical(&self) -> bool {
        (-PI..PI).contains(&self.phi)
            && (0.0..=PI).contains(&self.theta)
            && (-PI..PI).contains(&self.psi)
    }

    pub fn rotation_matrix(&self) -> Matrix3 {
        matmul3(&matmul3(&rz(self.phi), &rx(self.theta)), &rz(self.psi))
    }

    /// Extracts canonical angles from a rotation matrix.
    pub fn from_matrix(r: &Matrix3) -> So3Composition {
        let sin_theta = (r[2][0] * r[2][0] + r[2][1] * r[2][1]).sqrt();
        let theta = sin_theta.atan2(r[2][2]);
        let degenerate = theta < GIMBAL_TOL || PI - theta < GIMBAL_TOL;
        let (phi, psi) = if degenerate {
            // R = Rz(φ) Rx(θ) with ψ = 0
            (r[1][0].atan2(r[0][0]), 0.0)
        } else {
            (r[0][2].atan2(-r[1][2]), r[2][0].atan2(r[2][1]))
        };
        So3Composition {
            angles: EulerAngles {
                phi: wrap_angle(phi),
                theta,
                psi: wrap_angle(psi),
            },
            gimbal_degenerate: degenerate,
        }
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation_matrix();
        let t = [
            [r[0][0], r[1][0], r[2][0]],
            [r[0][1], r[1][1], r[2][1]],
            [r[0][2], r[1][2], r[2][2]],
        ];
        Self::from_matrix(&t).angles
    }
}

/// Angles of `R(a)·R(b)`.
pub fn compose_so3(a: &EulerAngles, b: &EulerAngles) -> So3Composition {
    EulerAngles::from_matrix(&matmul3(&a.rotation_matrix(), &b.rotation_matrix()))
}

/// Finite-difference determinant of the left translation
/// `(φ, θ, ψ) ↦ angles(fixed · R(φ, θ, ψ))` at `at`.
///
/// Invariance of the measure `sin θ dφ dθ dψ` makes this equal to
/// `sin θ / sin θ'`, where θ' is the polar angle of the translated point.
pub fn so3_translation_jacobian(
    fixed: &EulerAngles,
    at: &EulerAngles,
    step: f64,
) -> Result<f64, GroupError> {
    if !(1e-6..=1e-3).contains(&step) {
        return Err(GroupError::InvalidStep { step });
    }
    let moved = compose_so3(fixed, at).angles;
    let (s0, s1) = (at.theta.sin(), moved.theta.sin());
    if s0 <= SINGULAR_SIN || s1 <= SINGULAR_SIN {
        return Err(GroupError::NearSingular {
            sin_theta: s0,
            sin_theta_prime: s1,
        });
    }
    let fixed_m = fixed.rotation_matrix();
    let map = |x: &[f64]| {
        let r = EulerAngles::new(x[0], x[1], x[2]).rotation_matrix();
        let out = EulerAngles::from_matrix(&matmul3(&fixed_m, &r)).angles;
        vec![out.phi, out.theta, out.psi]
    };
    let j = central_jacobian(map, &[at.phi, at.theta, at.psi], step, &[true, false, true]);
    Ok(det3(&j))
}

/// `sin θ / sin θ'` for the translation above.
pub fn so3_translation_jacobian_analytic(fixed: &EulerAngles, at: &EulerAngles) -> f64 {
    let moved = compose_so3(fixed, at).angles;
    at.theta.sin() / moved.theta.sin()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_diff(a: &Matrix3, b: &Matrix3) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                m = m.max((a[i][j] - b[i][j]).abs());
            }
        }
        m
    }

    #[test]
    fn identity_is_left_neutral() {
        let b = EulerAngles::new(0.4, 1.2, -2.2);
        let out = compose_so3(&EulerAngles::identity(), &b);
        assert!(!out.gimbal_degenerate);
        assert!((out.angles.phi - b.phi).abs() < 1e-12);
        assert!((out.angles.theta - b.theta).abs() < 1e-12);
        assert!((out.angles.psi - b.psi).abs() < 1e-12);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let a = EulerAngles::new(-1.1, 0.8, 2.9);
        let out = compose_so3(&a, &a.inverse());
        assert!(out.gimbal_degenerate);
        let m = out.angles.rotation_matrix();
        assert!(max_diff(&m, &EulerAngles::identity().rotation_matrix()) < 1e-10);
    }

    #[test]
    fn degenerate_extraction_reproduces_matrix() {
        for theta in [0.0, PI] {
            let a = EulerAngles::new(0.3, theta, 1.1);
            let out = EulerAngles::from_matrix(&a.rotation_matrix());
            assert!(out.gimbal_degenerate);
            assert_eq!(out.angles.psi, 0.0);
            assert!(max_diff(&out.angles.rotation_matrix(), &a.rotation_matrix()) < 1e-12);
        }
    }

    #[test]
    fn identity_translation_has_unit_jacobian() {
        let at = EulerAngles::new(0.2, 1.0, -0.5);
        let d = so3_translation_jacobian(&EulerAngles::identity(), &at, 1e-5).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn z_rotation_preserves_theta() {
        let fixed = EulerAngles::new(0.9, 0.0, 0.0);
        let at = EulerAngles::new(-0.4, PI / 2.0, 0.7);
        let d = so3_translation_jacobian(&fixed, &at, 1e-5).unwrap();
        assert!((d - 1.0).abs() < 1e-6);
    }

    #[test]
    fn jacobian_rejects_pole_and_bad_step() {
        let at = EulerAngles::new(0.0, 1e-9, 0.0);
        assert!(matches!(
            so3_translation_jacobian(&EulerAngles::identity(), &at, 1e-5),
            Err(GroupError::NearSingular { .. })
        ));
        let at = EulerAngles::new(0.0, 1.0, 0.0);
        assert!(matches!(
            so3_translation_jacobian(&EulerAngles::identity(), &at, 1e-2),
            Err(GroupError::InvalidStep { .. })
        ));
    }
}
