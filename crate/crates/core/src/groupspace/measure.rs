//! Measure densities on the coordinate spaces used in this crate.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GroupError;
use crate::quadrature::{adaptive_simpson, adaptive_simpson_3d};

/// Upper end of the Θ domain on which the model Haar density `sin 2Θ` is
/// non-negative. Histograms fold larger Θ back into `[0, π/2]`.
pub const SU2_MODEL_THETA_MAX: f64 = 0.5 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MeasureField {
    /// `sin(2Θ) dΦ dΘ dΩ` on (Φ, Θ, Ω), Θ ∈ [0, π/2].
    Su2Model,
    /// `sin(θ) dφ dθ dψ` on z-x-z Euler angles.
    So3,
    /// `dp ∧ dq`.
    Symplectic2d,
    /// Constant density in any number of coordinates.
    Uniform,
}

impl MeasureField {
    /// Density μ at `coords`.
    pub fn density(&self, coords: &[f64]) -> Result<f64, GroupError> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GroupError::OutOfRange {
                reason: "non-finite coordinate",
            });
        }
        match self {
            MeasureField::Su2Model => {
                let [phi, theta, omega] = three(coords)?;
                check_angle(phi)?;
                check_angle(omega)?;
                if !(0.0..=SU2_MODEL_THETA_MAX).contains(&theta) {
                    return Err(GroupError::OutOfRange {
                        reason: "Θ outside [0, π/2]",
                    });
                }
                Ok((2.0 * theta).sin().max(0.0))
            }
            MeasureField::So3 => {
                let [phi, theta, psi] = three(coords)?;
                check_angle(phi)?;
                check_angle(psi)?;
                if !(0.0..=PI).contains(&theta) {
                    return Err(GroupError::OutOfRange {
                        reason: "θ outside [0, π]",
                    });
                }
                Ok(theta.sin().max(0.0))
            }
            MeasureField::Symplectic2d => {
                if coords.len() != 2 {
                    return Err(GroupError::OutOfRange {
                        reason: "phase space takes (p, q)",
                    });
                }
                Ok(1.0)
            }
            MeasureField::Uniform => Ok(1.0),
        }
    }
}

fn three(coords: &[f64]) -> Result<[f64; 3], GroupError> {
    coords.try_into().map_err(|_| GroupError::OutOfRange {
        reason: "expected three coordinates",
    })
}

// Closed at +π so that quadrature can touch the box edge.
fn check_angle(a: f64) -> Result<(), GroupError> {
    if (-PI..=PI).contains(&a) {
        Ok(())
    } else {
        Err(GroupError::OutOfRange {
            reason: "angle outside [-π, π]",
        })
    }
}

/// Haar density of the given field at `coords`.
pub fn haar_density(field: MeasureField, coords: &[f64]) -> Result<f64, GroupError> {
    field.density(coords)
}

/// Total mass of the model Haar measure over the canonical box, by iterated
/// adaptive quadrature.
pub fn su2_model_total_mass(tol: f64) -> f64 {
    let f = |phi: f64, theta: f64, omega: f64| {
        MeasureField::Su2Model
            .density(&[phi, theta, omega])
            .unwrap_or(0.0)
    };
    adaptive_simpson_3d(&f, (-PI, PI), (0.0, SU2_MODEL_THETA_MAX), (-PI, PI), tol)
}

/// Model Haar mass of a (Φ, Θ, Ω) box. The density only depends on Θ, so the
/// Θ integral is done by quadrature and multiplied by the angular widths.
pub fn su2_model_box_mass(theta_lo: f64, theta_hi: f64, phi_width: f64, omega_width: f64) -> f64 {
    let lo = theta_lo.clamp(0.0, SU2_MODEL_THETA_MAX);
    let hi = theta_hi.clamp(0.0, SU2_MODEL_THETA_MAX);
    let theta_part = adaptive_simpson(&|t: f64| (2.0 * t).sin(), lo, hi, 1e-13);
    theta_part * phi_width * omega_width
}
