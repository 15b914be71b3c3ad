//! Parameterizations, Haar densities and invariant metrics for SU(2) and SO(3).

mod measure;
mod so3;
mod su2;

use thiserror::Error;

pub use measure::{
    haar_density, su2_model_box_mass, su2_model_total_mass, MeasureField, SU2_MODEL_THETA_MAX,
};
pub use so3::{
    compose_so3, matmul3, so3_translation_jacobian, so3_translation_jacobian_analytic, EulerAngles,
    Matrix3, So3Composition, SINGULAR_SIN,
};
pub use su2::{
    build_unitary, decompose_unitary, group_distance, projective_angle, state_distance, wrap_angle,
    GroupCoordinates, QuantumState, UnitaryOperator, GIMBAL_TOL, NORM_TOL, UNITARY_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GroupError {
    #[error("operator is not unitary (‖U†U - I‖ = {defect:e})")]
    NonUnitaryInput { defect: f64 },
    #[error("state is not normalized (‖ψ‖² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("coordinates out of range: {reason}")]
    OutOfRange { reason: &'static str },
    #[error("Jacobian too close to a pole (sin θ = {sin_theta:e}, sin θ' = {sin_theta_prime:e})")]
    NearSingular {
        sin_theta: f64,
        sin_theta_prime: f64,
    },
    #[error("finite-difference step {step:e} outside [1e-6, 1e-3]")]
    InvalidStep { step: f64 },
}
