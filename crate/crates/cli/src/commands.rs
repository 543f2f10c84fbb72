//! Subcommands. Each computes its tables (per-t_f work in parallel), then
//! writes them one after another so the file set is deterministic.

use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use lr_cooling::gaussian_dynamics::{thermal_state, FrequencyProfile, GaussianState, Simulator};
use lr_cooling::invariant_design::{uniform_times, ControlTrajectory};
use lr_cooling::robustness::{run_sweep, SweepOptions, SweepResult};
use lr_cooling::thermometry::{effective_temperature, occupation_from_state};
use lr_cooling::PhysicalParams;

use crate::config::{ConfigError, RunConfig};
use crate::output::{tf_label, write_file, Cell, Table};
use crate::report::{hard_checks, sweep_targets, Check, CoolingReport, FinalOccupation};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(#[from] lr_cooling::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{} check(s) failed: {}", .0.len(), .0.join(", "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    /// 1 for configuration and I/O problems, 2 for numeric failures, 3 for
    /// failed reference checks.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numeric(_) => 2,
            CliError::ChecksFailed(_) => 3,
        }
    }
}

/// A validated configuration with its parameters and simulator resolved.
#[derive(Debug, Clone)]
pub struct Context {
    pub config: RunConfig,
    pub params: PhysicalParams,
    pub simulator: Simulator,
}

impl Context {
    pub fn new(config: RunConfig) -> Result<Self, CliError> {
        config.validate()?;
        let params = PhysicalParams::new(&config.device).map_err(as_config_error)?;
        let simulator = Simulator::from_names(&config.propagator, config.integrator.as_deref(), config.tolerance)
            .map_err(as_config_error)?;
        Ok(Self {
            config,
            params,
            simulator,
        })
    }

    fn out_dir(&self) -> &Path {
        &self.config.out_dir
    }

    fn file_name(&self, stem: &str) -> String {
        format!("{stem}.{}", self.config.format.name())
    }

    fn write(&self, relative: &str, table: &Table) -> Result<Written, CliError> {
        self.write_text(relative, &table.render(self.config.format, self.config.precision))
    }

    fn write_text(&self, relative: &str, contents: &str) -> Result<Written, CliError> {
        let path = write_file(self.out_dir(), relative, contents).map_err(|source| CliError::Io {
            path: self.out_dir().join(relative),
            source,
        })?;
        Ok(Written {
            relative: relative.to_string(),
            path,
            sha256: hex::encode(Sha256::digest(contents.as_bytes())),
        })
    }

    fn analyze(&self) -> Result<CoolingReport, CliError> {
        Ok(CoolingReport::analyze(
            &self.config,
            &self.params,
            self.simulator.integrator.name(),
        )?)
    }
}

fn as_config_error(err: lr_cooling::Error) -> ConfigError {
    let field = match &err {
        lr_cooling::Error::Domain { field, .. } => Some(field.to_string()),
        lr_cooling::Error::UnknownStrategy { kind, .. } => Some(kind.to_string()),
        _ => None,
    };
    ConfigError {
        line: None,
        field,
        message: err.to_string(),
    }
}

/// A file produced by a subcommand.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Written {
    /// Path below the output directory, `/`-separated.
    pub relative: String,
    #[serde(skip)]
    pub path: PathBuf,
    pub sha256: String,
}

pub fn cmd_params(ctx: &Context) -> Result<CoolingReport, CliError> {
    ctx.analyze()
}

/// Closed-form series `f`, `ω_eff` and `b` for one ramp.
pub fn design_tables(traj: &ControlTrajectory, samples: usize) -> [Table; 3] {
    let mut f = Table::new(&["t_omega_m", "value"]);
    let mut omega = Table::new(&["t_omega_m", "value"]);
    let mut b = Table::new(&["t_omega_m", "value"]);
    for s in traj.sample(samples) {
        f.push(vec![s.t.into(), s.f.into()]);
        let w = if s.omega_eff_sq >= 0.0 {
            s.omega_eff_sq.sqrt()
        } else {
            f64::NAN
        };
        omega.push(vec![s.t.into(), w.into()]);
        b.push(vec![s.t.into(), s.b.into()]);
    }
    let negative: Vec<String> = lr_cooling::invariant_design::validate_trajectory(traj, samples)
        .negative_windows
        .iter()
        .map(|(a, b)| format!("omega_eff^2 < 0 for t in [{a}, {b}]"))
        .collect();
    omega.notes = negative;
    [f, omega, b]
}

pub fn cmd_design(ctx: &Context) -> Result<Vec<Written>, CliError> {
    let tables = ctx
        .config
        .t_final
        .par_iter()
        .map(|&tf| {
            Ok((
                tf,
                design_tables(&ControlTrajectory::design(&ctx.params, tf)?, ctx.config.samples),
            ))
        })
        .collect::<Result<Vec<_>, lr_cooling::Error>>()?;
    let mut written = Vec::new();
    for (tf, [f, omega, b]) in &tables {
        let dir = format!("design/{}", tf_label(*tf));
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("f_t")), f)?);
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("omega_eff_t")), omega)?);
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("b_t")), b)?);
    }
    Ok(written)
}

/// Propagated states on `times`. On an integration failure the states up to
/// the failure are recomputed and returned along with the error.
pub fn simulate_series(
    simulator: &Simulator,
    profile: &dyn FrequencyProfile,
    state0: &GaussianState,
    times: &[f64],
) -> (Vec<GaussianState>, Option<lr_cooling::Error>) {
    match simulator.run(profile, state0, times) {
        Ok(states) => (states, None),
        Err(err) => {
            let reached = match &err {
                lr_cooling::Error::Integration(e) => e.time(),
                _ => None,
            };
            let partial = reached
                .map(|t_fail| times.iter().copied().take_while(|&t| t < t_fail).collect::<Vec<_>>())
                .filter(|prefix| !prefix.is_empty())
                .and_then(|prefix| simulator.run(profile, state0, &prefix).ok())
                .unwrap_or_default();
            (partial, Some(err))
        }
    }
}

/// Occupation, temperature and moment tables for a propagated series.
/// `omega_m` is the bare angular frequency in rad/s.
pub fn simulation_tables(profile: &dyn FrequencyProfile, states: &[GaussianState], omega_m: f64) -> [Table; 3] {
    let mut n_bar = Table::new(&["t_omega_m", "n_bar_inst", "n_bar_bare"]);
    let mut t_eff = Table::new(&["t_omega_m", "t_eff_inst_K", "t_eff_bare_K"]);
    let mut moments = Table::new(&["t_omega_m", "xx", "pp", "xp", "purity"]);
    for s in states {
        let w2 = profile.omega_sq(s.time);
        let (n_inst, t_inst) = if w2 > 0.0 {
            let n = occupation_from_state(s, w2).unwrap_or(f64::NAN);
            (n, effective_temperature(omega_m * w2.sqrt(), n).unwrap_or(f64::NAN))
        } else {
            (f64::NAN, f64::NAN)
        };
        let n_bare = occupation_from_state(s, 1.0).unwrap_or(f64::NAN);
        let t_bare = effective_temperature(omega_m, n_bare).unwrap_or(f64::NAN);
        n_bar.push(vec![s.time.into(), n_inst.into(), n_bare.into()]);
        t_eff.push(vec![s.time.into(), t_inst.into(), t_bare.into()]);
        moments.push(vec![
            s.time.into(),
            s.xx.into(),
            s.pp.into(),
            s.xp.into(),
            s.purity().into(),
        ]);
    }
    [n_bar, t_eff, moments]
}

/// One simulated ramp.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub t_final: f64,
    pub tables: [Table; 3],
    /// Present when the whole ramp was propagated.
    pub final_occupation: Option<FinalOccupation>,
    pub error: Option<String>,
}

pub fn simulate_ramp(ctx: &Context, t_final: f64) -> Result<SimulationRun, lr_cooling::Error> {
    let params = &ctx.params;
    let traj = ControlTrajectory::design(params, t_final)?;
    let state0 = thermal_state(params, traj.spec.omega0_sq, params.bath_temperature())?;
    let times = uniform_times(t_final, ctx.config.samples);
    let (states, error) = simulate_series(&ctx.simulator, &traj, &state0, &times);
    let mut tables = simulation_tables(&traj, &states, params.bare_frequency());
    let error = error.map(|e| e.to_string());
    if let Some(msg) = &error {
        for table in &mut tables {
            table.notes.push(format!("error: {msg}"));
        }
    }
    let final_occupation = match (&error, states.last()) {
        (None, Some(end)) => {
            let n_bar_final = occupation_from_state(end, 1.0)?;
            Some(FinalOccupation {
                t_final,
                n_bar_initial: occupation_from_state(&state0, traj.spec.omega0_sq)?,
                n_bar_final,
                t_eff_final_k: effective_temperature(params.bare_frequency(), n_bar_final)?,
            })
        }
        _ => None,
    };
    Ok(SimulationRun {
        t_final,
        tables,
        final_occupation,
        error,
    })
}

/// Writes every simulated ramp; failed ramps leave partial tables.
fn write_simulations(ctx: &Context) -> Result<(Vec<SimulationRun>, Vec<Written>), CliError> {
    let runs = ctx
        .config
        .t_final
        .par_iter()
        .map(|&tf| simulate_ramp(ctx, tf))
        .collect::<Result<Vec<_>, _>>()?;
    let mut written = Vec::new();
    for run in &runs {
        let dir = format!("simulate/{}", tf_label(run.t_final));
        let [n_bar, t_eff, moments] = &run.tables;
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("n_bar_t")), n_bar)?);
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("t_eff_t")), t_eff)?);
        written.push(ctx.write(&format!("{dir}/{}", ctx.file_name("moments_t")), moments)?);
    }
    Ok((runs, written))
}

fn simulation_failures(runs: &[SimulationRun]) -> Vec<String> {
    runs.iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("t_f = {}: {e}", r.t_final)))
        .collect()
}

pub fn cmd_simulate(ctx: &Context) -> Result<(Vec<SimulationRun>, Vec<Written>), CliError> {
    let (runs, written) = write_simulations(ctx)?;
    let failures = simulation_failures(&runs);
    if !failures.is_empty() {
        return Err(CliError::Numeric(lr_cooling::Error::Domain {
            field: "simulate",
            reason: failures.join("; "),
        }));
    }
    Ok((runs, written))
}

pub const SWEEP_COLUMNS: [&str; 11] = [
    "epsilon",
    "t_final",
    "n_bar_final",
    "t_eff_final_K",
    "state_omega_final",
    "ermakov_b_final",
    "status",
    "ermakov_omega_final",
    "n_bar_initial",
    "target_t_eff_K",
    "target_omega_final",
];

pub fn sweep_table(results: &[SweepResult]) -> Table {
    let mut table = Table::new(&SWEEP_COLUMNS);
    for r in results {
        let (target_t, target_w) = sweep_targets(r.epsilon);
        table.push(vec![
            r.epsilon.into(),
            r.t_final.into(),
            r.n_bar_final.into(),
            r.t_eff_final.into(),
            r.state_omega_final.into(),
            r.ermakov_b_final.into(),
            Cell::Text(r.status.label()),
            r.ermakov_omega_final.into(),
            r.n_bar_initial.into(),
            target_t.into(),
            target_w.into(),
        ]);
    }
    table
}

pub fn run_sweep_cells(ctx: &Context) -> Vec<SweepResult> {
    let mut options = SweepOptions::new(ctx.config.initial_state, ctx.simulator.clone());
    options.samples = ctx.config.samples;
    run_sweep(&ctx.params, &ctx.config.t_final, &ctx.config.epsilon, &options)
}

fn write_sweep(ctx: &Context) -> Result<(Vec<SweepResult>, Written), CliError> {
    let results = run_sweep_cells(ctx);
    let written = ctx.write(&ctx.file_name("sweep"), &sweep_table(&results))?;
    Ok((results, written))
}

pub fn cmd_sweep(ctx: &Context) -> Result<(Vec<SweepResult>, Written), CliError> {
    let (results, written) = write_sweep(ctx)?;
    let failures: Vec<String> = results
        .iter()
        .filter(|r| !r.status.is_ok())
        .map(|r| format!("t_f = {}, eps = {}: {}", r.t_final, r.epsilon, r.status.label()))
        .collect();
    if !failures.is_empty() {
        return Err(CliError::Numeric(lr_cooling::Error::Domain {
            field: "sweep",
            reason: failures.join("; "),
        }));
    }
    Ok((results, written))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub files: Vec<ManifestEntry>,
    pub checks: Vec<Check>,
    pub errors: Vec<String>,
    pub passed: bool,
}

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct ReproduceOutcome {
    pub report: CoolingReport,
    pub manifest: Manifest,
    pub manifest_path: PathBuf,
}

/// Design, simulation and sweep in one bundle, plus the effective config,
/// the report and a manifest of content hashes and check results.
pub fn cmd_reproduce(ctx: &Context) -> Result<ReproduceOutcome, CliError> {
    // The echoed config points at its own directory so the bundle does not
    // depend on where it was written.
    let echo = RunConfig {
        out_dir: PathBuf::from("."),
        ..ctx.config.clone()
    };
    let mut written = vec![ctx.write_text("config.conf", &echo.to_text())?];
    written.extend(cmd_design(ctx)?);
    let (runs, sim_files) = write_simulations(ctx)?;
    written.extend(sim_files);
    let (sweep, sweep_file) = write_sweep(ctx)?;
    written.push(sweep_file);

    let mut report = ctx.analyze()?;
    report.finals = runs.iter().filter_map(|r| r.final_occupation.clone()).collect();
    let report_text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    written.push(ctx.write_text("report.json", &report_text)?);

    let checks = hard_checks(&report, &sweep);
    let mut errors = simulation_failures(&runs);
    errors.extend(
        sweep
            .iter()
            .filter(|r| !r.status.is_ok())
            .map(|r| format!("sweep t_f = {}, eps = {}: {}", r.t_final, r.epsilon, r.status.label())),
    );
    let passed = errors.is_empty() && checks.iter().all(|c| c.passed);
    let mut files: Vec<ManifestEntry> = written
        .into_iter()
        .map(|w| ManifestEntry {
            path: w.relative,
            sha256: w.sha256,
        })
        .collect();
    files.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest {
        tool: "lrcool",
        version: env!("CARGO_PKG_VERSION"),
        files,
        checks,
        errors,
        passed,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let manifest_path = ctx.write_text(MANIFEST_NAME, &text)?.path;
    Ok(ReproduceOutcome {
        report,
        manifest,
        manifest_path,
    })
}

/// Names of the failed checks and errors, empty when the bundle passed.
pub fn failures(manifest: &Manifest) -> Vec<String> {
    manifest
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.clone())
        .chain(manifest.errors.iter().cloned())
        .collect()
}
