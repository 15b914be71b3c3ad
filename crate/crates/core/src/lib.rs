//! Desk-scale numerical checks of Liouville-type incompressibility.
//!
//! * [`classical`]: Hamiltonian flows on the (p, q) plane, where the
//!   symplectic measure is invariant and densities are transported unchanged.
//! * [`wigner`]: Wigner quasiprobability dynamics, whose odd-order Moyal
//!   corrections make the flow compressible for anharmonic potentials.
//! * [`groupspace`] and [`ergodic`]: unitary evolution viewed on the group
//!   parameter space with its Haar measure, where occupancy becomes flat
//!   over the achievable region and distances are preserved.
//! * [`pumping`]: the inter-level transition observable of a two-level
//!   drive and its time average.

pub mod classical;
pub mod ergodic;
pub mod fd;
pub mod groupspace;
pub mod pumping;
pub mod quadrature;
pub mod wigner;
