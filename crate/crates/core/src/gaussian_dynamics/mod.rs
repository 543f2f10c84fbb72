//! Exact Gaussian-state dynamics under `H(t) = p²/2 + ω²(t) x²/2`.
//!
//! A thermal state stays Gaussian with zero mean under quadratic dynamics,
//! so the covariance triple `(⟨x²⟩, ⟨p²⟩, ⟨xp+px⟩/2)` is the whole state.
//! Two interchangeable [`Propagator`]s advance it:
//!
//! * `transfer` integrates the classical equation `ẍ + ω²(t) x = 0` for two
//!   independent solutions and conjugates the covariance with the resulting
//!   2×2 symplectic matrix;
//! * `covariance` integrates the moment equations directly.
//!
//! They share no code beyond the [`FrequencyProfile`] they read, so each is
//! an oracle for the other. [`ermakov`] integrates the auxiliary Ermakov
//! equation forward for the design/forward closed loop.
//!
//! All quantities are in reduced units (`ħ = m = ω_m = 1`).

pub mod covariance;
pub mod ermakov;
pub mod transfer;

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::integrate::{builtin_integrators, Integrator};
use crate::invariant_design::{ControlTrajectory, ScaleFactor};
use crate::physical_system::PhysicalParams;
use crate::registry::{Named, Registry};
use crate::thermometry::thermal_occupation;

pub use covariance::CovariancePropagator;
pub use ermakov::{solve_ermakov_forward, ErmakovSample};
pub use transfer::{propagate_transfer, TransferMatrix, TransferPropagator};

/// Default per-step relative tolerance for propagation.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Signed squared frequency `ω²(t)` in units of ω_m².
pub trait FrequencyProfile: Sync {
    fn omega_sq(&self, t: f64) -> f64;
}

impl FrequencyProfile for ControlTrajectory {
    fn omega_sq(&self, t: f64) -> f64 {
        self.omega_sq_unchecked(t)
    }
}

impl<F> FrequencyProfile for F
where
    F: Fn(f64) -> f64 + Sync,
{
    fn omega_sq(&self, t: f64) -> f64 {
        self(t)
    }
}

/// Time-independent frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantFrequency(pub f64);

impl FrequencyProfile for ConstantFrequency {
    fn omega_sq(&self, _t: f64) -> f64 {
        self.0
    }
}

/// Zero-mean Gaussian state in reduced units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    /// ⟨x²⟩ in units of ħ/(m ω_m).
    pub xx: f64,
    /// ⟨p²⟩ in units of ħ m ω_m.
    pub pp: f64,
    /// ⟨xp + px⟩/2 in units of ħ.
    pub xp: f64,
    /// 1/ω_m units.
    pub time: f64,
}

impl GaussianState {
    /// Thermal state at `omega_sq` with occupation `n_bar`.
    pub fn thermal(omega_sq: f64, n_bar: f64, time: f64) -> Self {
        let omega = omega_sq.sqrt();
        let a = n_bar + 0.5;
        Self {
            xx: a / omega,
            pp: a * omega,
            xp: 0.0,
            time,
        }
    }

    pub fn ground(omega_sq: f64, time: f64) -> Self {
        Self::thermal(omega_sq, 0.0, time)
    }

    /// `xx·pp − xp²`, the covariance determinant. A pure state has ¼, and
    /// the value is conserved by any quadratic Hamiltonian.
    pub fn purity(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }

    /// Positivity plus the uncertainty bound `det Σ ≥ ¼`, up to round-off.
    pub fn is_physical(&self) -> bool {
        self.xx > 0.0 && self.pp > 0.0 && self.purity() >= 0.25 * (1.0 - 1e-9)
    }
}

/// Thermal state of the oscillator at `omega_sq` (ω_m² units) and
/// temperature `temperature` (K).
pub fn thermal_state(params: &PhysicalParams, omega_sq: f64, temperature: f64) -> Result<GaussianState> {
    if !(omega_sq > 0.0) {
        return Err(Error::domain(
            "omega_sq",
            format!("no thermal state exists for ω² = {omega_sq} ≤ 0"),
        ));
    }
    let n_bar = thermal_occupation(params.bare_frequency() * omega_sq.sqrt(), temperature)?;
    Ok(GaussianState::thermal(omega_sq, n_bar, 0.0))
}

/// `⟨I⟩` for the Lewis-Riesenfeld invariant
/// `I = ½[ω₀² x²/b² + (b p − ḃ x)²]` given `b`, `ḃ` at the state's time.
pub fn invariant_expectation(state: &GaussianState, sf: &ScaleFactor, omega0_sq: f64) -> f64 {
    let (b, bd) = (sf.b, sf.d1);
    0.5 * omega0_sq * state.xx / (b * b) + 0.5 * (b * b * state.pp - 2.0 * b * bd * state.xp + bd * bd * state.xx)
}

/// Strategy that advances a Gaussian state along a frequency profile.
pub trait Propagator: Named + Send + Sync {
    /// Integrator used when none is requested explicitly.
    fn default_integrator(&self) -> &'static str;

    /// States at each of `times`, which must be non-decreasing and not
    /// earlier than `state0.time`.
    fn propagate(
        &self,
        integrator: &dyn Integrator,
        profile: &dyn FrequencyProfile,
        state0: &GaussianState,
        times: &[f64],
        tol: f64,
    ) -> Result<Vec<GaussianState>>;
}

/// Registry holding `transfer` and `covariance`.
pub fn builtin_propagators() -> Registry<dyn Propagator> {
    let mut reg: Registry<dyn Propagator> = Registry::new("propagator");
    reg.register(Arc::new(TransferPropagator));
    reg.register(Arc::new(CovariancePropagator));
    reg
}

// Typical frequency at `t`, used to balance x against p in the scaled
// variables. Never below 1 so the bare-frequency end stays well scaled.
pub(crate) fn frequency_scale(profile: &dyn FrequencyProfile, t: f64) -> f64 {
    profile.omega_sq(t).abs().sqrt().max(1.0)
}

/// A propagator bound to an integrator and tolerance, resolved by name.
#[derive(Clone)]
pub struct Simulator {
    pub propagator: Arc<dyn Propagator>,
    pub integrator: Arc<dyn Integrator>,
    pub tol: f64,
}

impl std::fmt::Debug for Simulator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Simulator")
            .field("propagator", &self.propagator.name())
            .field("integrator", &self.integrator.name())
            .field("tol", &self.tol)
            .finish()
    }
}

impl Simulator {
    /// Looks up `propagator` and `integrator` (or the propagator's default).
    pub fn from_names(propagator: &str, integrator: Option<&str>, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::domain("tol", format!("must be positive, got {tol}")));
        }
        let propagator = builtin_propagators().get(propagator)?;
        let integrator = builtin_integrators().get(integrator.unwrap_or(propagator.default_integrator()))?;
        Ok(Self {
            propagator,
            integrator,
            tol,
        })
    }

    /// `transfer` with its default integrator.
    pub fn transfer(tol: f64) -> Self {
        Self::from_names("transfer", None, tol).expect("built-in propagator")
    }

    /// `covariance` with its default integrator.
    pub fn covariance(tol: f64) -> Self {
        Self::from_names("covariance", None, tol).expect("built-in propagator")
    }

    pub fn run(
        &self,
        profile: &dyn FrequencyProfile,
        state0: &GaussianState,
        times: &[f64],
    ) -> Result<Vec<GaussianState>> {
        self.propagator
            .propagate(self.integrator.as_ref(), profile, state0, times, self.tol)
    }

    /// State at `t1`.
    pub fn run_to(&self, profile: &dyn FrequencyProfile, state0: &GaussianState, t1: f64) -> Result<GaussianState> {
        Ok(self.run(profile, state0, &[t1])?[0])
    }
}
