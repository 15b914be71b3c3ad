//! Wigner-function dynamics on a uniform grid (units with m = 1).

mod evolve;
mod grid;
mod moyal;
mod transform;

use thiserror::Error;

pub use evolve::{schrodinger_evolve, STABILITY_LIMIT};
pub use grid::{
    PotentialSpec, WavefunctionGrid, WignerGrid, DEFAULT_POINTS, DEFAULT_Q_MAX, DEFAULT_Q_MIN,
    MIN_POINTS, NORM_TOL,
};
pub use moyal::{
    compressibility_row, field_norm, moyal_coefficient, moyal_terms, transport_term,
    wigner_compressibility, wigner_time_derivative, CompressibilityReport, CompressibilityRow,
    MoyalTerm, MAX_ORDER,
};
pub use transform::wigner_transform;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WignerError {
    #[error("wavefunction is not normalized (Σ|ψ|² dq = {0})")]
    NotNormalized(f64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),
    #[error("invalid potential: {0}")]
    InvalidPotential(&'static str),
    #[error("split-step unstable: dt·max|V|/ħ = {dt:e}·{v_max:e} exceeds {limit}")]
    StabilityViolation { dt: f64, v_max: f64, limit: f64 },
    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),
    #[error("Moyal order must be 1, 3 or 5 (got {0})")]
    InvalidOrder(u32),
    #[error("Wigner transform left an imaginary residue of {0:e}")]
    ImaginaryResidue(f64),
}
