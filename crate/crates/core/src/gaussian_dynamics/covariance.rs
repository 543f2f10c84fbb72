//! Direct integration of the second-moment equations
//!
//! ```text
//! d⟨x²⟩/dt = 2 C,   dC/dt = ⟨p²⟩ − ω² ⟨x²⟩,   d⟨p²⟩/dt = −2 ω² C
//! ```
//!
//! with `C = ⟨xp+px⟩/2`. Positions are carried as `ω_s ⟨x²⟩` and momenta as
//! `⟨p²⟩/ω_s`, with `ω_s` the frequency scale at the start, so the three
//! variables begin at comparable magnitude.

use super::{frequency_scale, FrequencyProfile, GaussianState, Propagator};
use crate::error::Result;
use crate::integrate::{Integrator, OdeSystem, Tolerance};
use crate::registry::Named;

// Absolute tolerance relative to the initial moment scale.
const ATOL_FRACTION: f64 = 1e-6;

struct MomentEquations<'a> {
    profile: &'a dyn FrequencyProfile,
    ws: f64,
}

impl OdeSystem for MomentEquations<'_> {
    fn dim(&self) -> usize {
        3
    }

    // y = (ω_s xx, xp, pp/ω_s)
    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let w2 = self.profile.omega_sq(t);
        let ws = self.ws;
        dydt[0] = 2.0 * ws * y[1];
        dydt[1] = ws * y[2] - w2 * y[0] / ws;
        dydt[2] = -2.0 * w2 * y[1] / ws;
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct CovariancePropagator;

impl Named for CovariancePropagator {
    fn name(&self) -> &'static str {
        "covariance"
    }
}

impl Propagator for CovariancePropagator {
    fn default_integrator(&self) -> &'static str {
        "dopri5"
    }

    fn propagate(
        &self,
        integrator: &dyn Integrator,
        profile: &dyn FrequencyProfile,
        state0: &GaussianState,
        times: &[f64],
        tol: f64,
    ) -> Result<Vec<GaussianState>> {
        let ws = frequency_scale(profile, state0.time);
        let system = MomentEquations { profile, ws };
        let y0 = [state0.xx * ws, state0.xp, state0.pp / ws];
        let scale = state0.purity().max(0.0).sqrt().max(f64::MIN_POSITIVE);
        let sol = integrator.solve(
            &system,
            state0.time,
            &y0,
            times,
            Tolerance::new(tol, tol * ATOL_FRACTION * scale),
        )?;
        Ok(sol
            .states
            .iter()
            .zip(times)
            .map(|(y, &t)| GaussianState {
                xx: y[0] / ws,
                xp: y[1],
                pp: y[2] * ws,
                time: t,
            })
            .collect())
    }
}
