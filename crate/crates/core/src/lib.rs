//! Lewis-Riesenfeld invariant trajectories for cooling a charged mechanical
//! resonator with time-dependent bias gate voltages.
//!
//! The crate is layered bottom-up:
//!
//! * [`physical_system`] holds SI device parameters, the Coulomb coupling
//!   constant and unit conversion.
//! * [`invariant_design`] builds the inverse-engineered control function
//!   `f(t)` from the quintic Ermakov scale factor `b(t)`.
//! * [`integrate`] provides adaptive embedded Runge-Kutta integrators behind
//!   the [`integrate::Integrator`] trait, registered by name.
//! * [`gaussian_dynamics`] propagates second moments of the resonator state,
//!   with interchangeable [`gaussian_dynamics::Propagator`] strategies.
//! * [`thermometry`] converts states to phonon numbers and temperatures.
//! * [`robustness`] scales the control function and sweeps the result.
//!
//! Everything downstream of [`physical_system`] works in reduced units: time
//! in `1/ω_m`, squared frequencies in `ω_m²`, position in `sqrt(ħ/(m ω_m))`
//! and momentum in `sqrt(ħ m ω_m)`.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values are kept at the digits they were computed to.
#![cfg_attr(test, allow(clippy::excessive_precision))]

pub mod constants;
pub mod error;
pub mod gaussian_dynamics;
pub mod integrate;
pub mod invariant_design;
pub mod physical_system;
pub mod registry;
pub mod robustness;
pub mod thermometry;

pub use error::{Error, Result};
pub use gaussian_dynamics::{FrequencyProfile, GaussianState, Propagator, TransferMatrix};
pub use invariant_design::{ControlTrajectory, TrajectorySpec};
pub use physical_system::{DeviceInputs, PhysicalParams};
pub use registry::Registry;
