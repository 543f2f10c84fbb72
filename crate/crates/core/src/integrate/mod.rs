//! Adaptive explicit Runge-Kutta integration.
//!
//! Integrators are strategies behind [`Integrator`] and are looked up by
//! name through [`builtin_integrators`]. The built-in set is a
//! Dormand-Prince 5(4) pair (`dopri5`) and a Fehlberg 7(8) pair (`rkf78`),
//! both driven by the same error-controlled stepper in [`embedded`].

pub mod embedded;
pub mod tableau;

use std::sync::Arc;

use thiserror::Error;

use crate::registry::{Named, Registry};

pub use embedded::EmbeddedRk;

/// First-order system `y' = F(t, y)`.
pub trait OdeSystem: Sync {
    fn dim(&self) -> usize;

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]);

    /// Called on every accepted step; `Some(reason)` aborts integration.
    fn check(&self, _t: f64, _y: &[f64]) -> Option<String> {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("step size underflow at t = {time} (h = {step:e})")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("step budget of {max_steps} exhausted at t = {time}")]
    TooManySteps { time: f64, max_steps: usize },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("integration stopped at t = {time}: {reason}")]
    Singular { time: f64, reason: String },

    #[error("invalid integration request: {0}")]
    InvalidRequest(String),
}

impl IntegrationError {
    /// Time reached before the failure, when known.
    pub fn time(&self) -> Option<f64> {
        match self {
            IntegrationError::StepSizeUnderflow { time, .. }
            | IntegrationError::TooManySteps { time, .. }
            | IntegrationError::NonFinite { time }
            | IntegrationError::Singular { time, .. } => Some(*time),
            IntegrationError::InvalidRequest(_) => None,
        }
    }
}

/// Mixed error tolerance: component `i` is scaled by
/// `atol + rtol · max(|yᵢ|, |ŷᵢ|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
}

impl Tolerance {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol }
    }

    /// Same relative and absolute tolerance.
    pub fn uniform(tol: f64) -> Self {
        Self { rtol: tol, atol: tol }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// States at the requested output times.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub stats: Stats,
}

impl Solution {
    pub fn last(&self) -> Option<&[f64]> {
        self.states.last().map(Vec::as_slice)
    }
}

pub trait Integrator: Named + Send + Sync {
    /// Order of the propagated solution.
    fn order(&self) -> u32;

    /// Integrates from `(t0, y0)` and returns the state at every time in
    /// `t_out`, which must be non-decreasing and not before `t0`.
    fn solve(
        &self,
        system: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_out: &[f64],
        tol: Tolerance,
    ) -> Result<Solution, IntegrationError>;
}

/// Registry holding `dopri5` and `rkf78`.
pub fn builtin_integrators() -> Registry<dyn Integrator> {
    let mut reg: Registry<dyn Integrator> = Registry::new("integrator");
    reg.register(Arc::new(EmbeddedRk::dopri5()));
    reg.register(Arc::new(EmbeddedRk::rkf78()));
    reg
}
