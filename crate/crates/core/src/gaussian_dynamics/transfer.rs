//! Propagation through the classical 2×2 transfer matrix.

use super::{frequency_scale, FrequencyProfile, GaussianState, Propagator};
use crate::error::{Error, Result};
use crate::integrate::{EmbeddedRk, Integrator, OdeSystem, Tolerance};
use crate::invariant_design::ControlTrajectory;
use crate::registry::Named;

/// Linear map of phase-space coordinates `(x, p)` from one time to another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub [[f64; 2]; 2]);

impl TransferMatrix {
    pub const IDENTITY: Self = Self([[1.0, 0.0], [0.0, 1.0]]);

    /// Equals 1 for any Hamiltonian flow.
    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `self · rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut out = [[0.0; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(out)
    }

    /// `Σ ↦ M Σ Mᵀ`, stamped with `time`.
    pub fn apply(&self, state: &GaussianState, time: f64) -> GaussianState {
        let m = &self.0;
        let (sxx, sxp, spp) = (state.xx, state.xp, state.pp);
        let xx = m[0][0] * m[0][0] * sxx + 2.0 * m[0][0] * m[0][1] * sxp + m[0][1] * m[0][1] * spp;
        let pp = m[1][0] * m[1][0] * sxx + 2.0 * m[1][0] * m[1][1] * sxp + m[1][1] * m[1][1] * spp;
        let xp = m[0][0] * m[1][0] * sxx + (m[0][0] * m[1][1] + m[0][1] * m[1][0]) * sxp + m[0][1] * m[1][1] * spp;
        GaussianState { xx, pp, xp, time }
    }

    /// Largest absolute entry difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().fold(0.0, |acc: f64, v| acc.max(v.abs()))
    }
}

// Two classical solutions side by side: (x₁, p₁, x₂, p₂).
struct ClassicalPair<'a> {
    profile: &'a dyn FrequencyProfile,
}

impl OdeSystem for ClassicalPair<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, t: f64, y: &[f64], dydt: &mut [f64]) {
        let w2 = self.profile.omega_sq(t);
        dydt[0] = y[1];
        dydt[1] = -w2 * y[0];
        dydt[2] = y[3];
        dydt[3] = -w2 * y[2];
    }
}

/// Transfer matrices from `t0` to each of `times`.
///
/// The second basis solution starts at `(0, ω_s)` with `ω_s` the frequency
/// scale at `t0`, so both columns have comparable amplitude; the result is
/// rescaled before returning.
pub fn transfer_matrices(
    integrator: &dyn Integrator,
    profile: &dyn FrequencyProfile,
    t0: f64,
    times: &[f64],
    tol: f64,
) -> Result<Vec<TransferMatrix>> {
    let ws = frequency_scale(profile, t0);
    let system = ClassicalPair { profile };
    let sol = integrator.solve(&system, t0, &[1.0, 0.0, 0.0, ws], times, Tolerance::uniform(tol))?;
    Ok(sol
        .states
        .iter()
        .map(|y| TransferMatrix([[y[0], y[2] / ws], [y[1], y[3] / ws]]))
        .collect())
}

#[derive(Debug, Clone, Copy, Default)]
pub struct TransferPropagator;

impl Named for TransferPropagator {
    fn name(&self) -> &'static str {
        "transfer"
    }
}

impl Propagator for TransferPropagator {
    fn default_integrator(&self) -> &'static str {
        "rkf78"
    }

    fn propagate(
        &self,
        integrator: &dyn Integrator,
        profile: &dyn FrequencyProfile,
        state0: &GaussianState,
        times: &[f64],
        tol: f64,
    ) -> Result<Vec<GaussianState>> {
        let matrices = transfer_matrices(integrator, profile, state0.time, times, tol)?;
        Ok(matrices.iter().zip(times).map(|(m, &t)| m.apply(state0, t)).collect())
    }
}

/// Propagates `state0` from `t0` to `t1` along `traj` and returns the final
/// state with the transfer matrix used.
pub fn propagate_transfer(
    traj: &ControlTrajectory,
    state0: &GaussianState,
    t0: f64,
    t1: f64,
    tol: f64,
) -> Result<(GaussianState, TransferMatrix)> {
    let tf = traj.t_final();
    if !(0.0 <= t0 && t0 < t1 && t1 <= tf) {
        return Err(Error::domain(
            "t0, t1",
            format!("need 0 ≤ t0 < t1 ≤ {tf}, got t0 = {t0}, t1 = {t1}"),
        ));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tol", format!("must be positive, got {tol}")));
    }
    let m = transfer_matrices(&EmbeddedRk::rkf78(), traj, t0, &[t1], tol)?[0];
    Ok((m.apply(state0, t1), m))
}
