//! Sensitivity of the cooling ramp to a global error in the control voltage.
//!
//! Each cell of a `(t_f, ε)` grid designs the nominal ramp, replaces `f(t)`
//! with `(1 + ε) f(t)`, propagates the thermal start and records the end
//! state's occupation at the bare frequency. Cells are independent and run
//! in parallel; results come back in input order.

use rayon::prelude::*;

use crate::error::Result;
use crate::gaussian_dynamics::{solve_ermakov_forward, thermal_state, Simulator};
use crate::invariant_design::{uniform_times, ControlTrajectory};
use crate::physical_system::PhysicalParams;
use crate::thermometry::{effective_temperature, occupation_from_state, state_frequency};

/// `(1 + ε) f(t)`. Boundary metadata stays nominal; `f(t_f) = 0` survives.
pub fn perturb_trajectory(traj: &ControlTrajectory, epsilon: f64) -> ControlTrajectory {
    traj.scaled(1.0 + epsilon)
}

/// Which frequency defines the thermal state at the start of the ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitialState {
    /// Thermal at the designed ω₀, whatever the perturbation.
    #[default]
    Nominal,
    /// Thermal at the perturbed start frequency `1 + (1 + ε) η`.
    Perturbed,
}

impl InitialState {
    pub fn name(self) -> &'static str {
        match self {
            InitialState::Nominal => "nominal",
            InitialState::Perturbed => "perturbed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "nominal" => Some(InitialState::Nominal),
            "perturbed" => Some(InitialState::Perturbed),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub initial_state: InitialState,
    pub simulator: Simulator,
    /// Uniform output grid the propagation passes through; the cell reads
    /// the last sample. Matching a simulation's grid makes the ε = 0 cell
    /// bit-identical to that simulation's end point.
    pub samples: usize,
}

impl SweepOptions {
    pub fn new(initial_state: InitialState, simulator: Simulator) -> Self {
        Self {
            initial_state,
            simulator,
            samples: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Ok,
    Failed(String),
}

impl CellStatus {
    pub fn is_ok(&self) -> bool {
        matches!(self, CellStatus::Ok)
    }

    pub fn label(&self) -> String {
        match self {
            CellStatus::Ok => "ok".to_string(),
            CellStatus::Failed(msg) => format!("error: {msg}"),
        }
    }
}

/// One `(t_f, ε)` cell. Numeric fields are NaN when the cell failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub epsilon: f64,
    /// 1/ω_m units.
    pub t_final: f64,
    /// Occupation at t_f referenced to ω_m.
    pub n_bar_final: f64,
    /// Kelvin, referenced to ω_m.
    pub t_eff_final: f64,
    /// `sqrt(pp/xx)` of the end state, ω_m units (negative if pp/xx < 0).
    pub state_omega_final: f64,
    /// b(t_f) from the forward Ermakov solve under the perturbed profile.
    pub ermakov_b_final: f64,
    /// `ω_init / b(t_f)²`, ω_m units.
    pub ermakov_omega_final: f64,
    /// Occupation of the start state at its own frequency.
    pub n_bar_initial: f64,
    pub status: CellStatus,
}

impl SweepResult {
    fn failed(epsilon: f64, t_final: f64, msg: String) -> Self {
        Self {
            epsilon,
            t_final,
            n_bar_final: f64::NAN,
            t_eff_final: f64::NAN,
            state_omega_final: f64::NAN,
            ermakov_b_final: f64::NAN,
            ermakov_omega_final: f64::NAN,
            n_bar_initial: f64::NAN,
            status: CellStatus::Failed(msg),
        }
    }
}

/// Evaluates one cell.
pub fn run_cell(params: &PhysicalParams, t_final: f64, epsilon: f64, options: &SweepOptions) -> SweepResult {
    match try_cell(params, t_final, epsilon, options) {
        Ok(result) => result,
        Err(err) => SweepResult::failed(epsilon, t_final, err.to_string()),
    }
}

fn try_cell(params: &PhysicalParams, t_final: f64, epsilon: f64, options: &SweepOptions) -> Result<SweepResult> {
    let nominal = ControlTrajectory::design(params, t_final)?;
    let traj = perturb_trajectory(&nominal, epsilon);
    let init_omega_sq = match options.initial_state {
        InitialState::Nominal => nominal.spec.omega0_sq,
        InitialState::Perturbed => traj.effective_frequency_sq(0.0)?,
    };
    let state0 = thermal_state(params, init_omega_sq, params.bath_temperature())?;
    let times = uniform_times(t_final, options.samples.max(2));
    let end = *options
        .simulator
        .run(&traj, &state0, &times)?
        .last()
        .expect("grid has at least two samples");

    let n_bar_final = occupation_from_state(&end, 1.0)?;
    let t_eff_final = effective_temperature(params.bare_frequency(), n_bar_final)?;
    let w2 = state_frequency(&end);
    let state_omega_final = w2.signum() * w2.abs().sqrt();

    let ermakov = solve_ermakov_forward(&traj, 1.0, 0.0, init_omega_sq, 0.0, &[t_final], options.simulator.tol)?;
    let b_final = ermakov[0].b;

    Ok(SweepResult {
        epsilon,
        t_final,
        n_bar_final,
        t_eff_final,
        state_omega_final,
        ermakov_b_final: b_final,
        ermakov_omega_final: init_omega_sq.sqrt() / (b_final * b_final),
        n_bar_initial: occupation_from_state(&state0, init_omega_sq)?,
        status: CellStatus::Ok,
    })
}

/// Evaluates every `(t_f, ε)` pair, `t_f`-major, in parallel.
pub fn run_sweep(
    params: &PhysicalParams,
    t_final_list: &[f64],
    epsilon_list: &[f64],
    options: &SweepOptions,
) -> Vec<SweepResult> {
    let cells: Vec<(f64, f64)> = t_final_list
        .iter()
        .flat_map(|&tf| epsilon_list.iter().map(move |&eps| (tf, eps)))
        .collect();
    cells
        .par_iter()
        .map(|&(tf, eps)| run_cell(params, tf, eps, options))
        .collect()
}
