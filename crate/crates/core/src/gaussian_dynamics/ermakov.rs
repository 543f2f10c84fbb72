//! Forward integration of the Ermakov equation `b̈ + ω²(t) b = ω₀² / b³`.

use super::FrequencyProfile;
use crate::error::{Error, Result};
use crate::integrate::{EmbeddedRk, Integrator, OdeSystem, Tolerance};

/// `b` closer to zero than this is treated as the singularity.
pub const SINGULARITY_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErmakovSample {
    pub t: f64,
    pub b: f64,
    pub b_dot: f64,
}

struct Ermakov<'a> {
    profile: &'a dyn FrequencyProfile,
    omega0_sq: f64,
}

impl OdeSystem for Ermakov<'_> {
    fn dim(&self) -> usize {
        2
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let b = y[0];
        dydt[0] = y[1];
        dydt[1] = -self.profile.omega_sq(t) * b + self.omega0_sq / (b * b * b);
    }

    fn check(&self, _t: f64, y: &[f64]) -> Option<String> {
        (y[0] < SINGULARITY_THRESHOLD).then(|| format!("scale factor b = {:e} collapsed towards 0", y[0]))
    }
}

/// Integrates from `(t0, b0, ḃ0)` with invariant frequency `ω₀²` and returns
/// `b`, `ḃ` at each of `times`.
#[allow(clippy::too_many_arguments)]
pub fn solve_ermakov_forward_with(
    integrator: &dyn Integrator,
    profile: &dyn FrequencyProfile,
    b0: f64,
    bdot0: f64,
    omega0_sq: f64,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<ErmakovSample>> {
    if !(b0 > 0.0) {
        return Err(Error::domain("b0", format!("must be positive, got {b0}")));
    }
    let system = Ermakov { profile, omega0_sq };
    let sol = integrator.solve(&system, t0, &[b0, bdot0], times, Tolerance::uniform(tol))?;
    Ok(sol
        .states
        .iter()
        .zip(times)
        .map(|(y, &t)| ErmakovSample {
            t,
            b: y[0],
            b_dot: y[1],
        })
        .collect())
}

/// [`solve_ermakov_forward_with`] using the Fehlberg 7(8) integrator.
pub fn solve_ermakov_forward(
    profile: &dyn FrequencyProfile,
    b0: f64,
    bdot0: f64,
    omega0_sq: f64,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<ErmakovSample>> {
    solve_ermakov_forward_with(&EmbeddedRk::rkf78(), profile, b0, bdot0, omega0_sq, t0, times, tol)
}
