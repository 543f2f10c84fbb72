//! Run configuration: a flat, line-oriented `key = value [unit]` file.
//!
//! ```text
//! # comment
//! mass           = 40 pg
//! bare_frequency = 134 kHz
//! t_final        = 0.5, 1.0, 2.0
//! ```
//!
//! Blank lines and `#` comments are ignored, keys are unique, and every
//! physical value goes through [`parse_quantity`], so a bare number is SI.
//! Lists are comma separated. [`RunConfig::to_text`] writes a file that
//! parses back to an identical configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use lr_cooling::gaussian_dynamics::DEFAULT_TOLERANCE;
use lr_cooling::physical_system::units::{parse_quantity, Dimension};
use lr_cooling::robustness::InitialState;
use lr_cooling::DeviceInputs;

/// A configuration problem, located by line and key where possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, field: &str, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    fn field(field: &str, message: impl Into<String>) -> Self {
        Self {
            line: None,
            field: Some(field.to_string()),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(line), Some(field)) => write!(f, "line {line}, `{field}`: {}", self.message),
            (Some(line), None) => write!(f, "line {line}: {}", self.message),
            (None, Some(field)) => write!(f, "`{field}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn name(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

pub const MIN_PRECISION: usize = 6;
pub const MAX_PRECISION: usize = 17;
pub const MAX_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub device: DeviceInputs,
    /// Ramp durations, 1/ω_m units.
    pub t_final: Vec<f64>,
    /// Points per sampled series, end points included.
    pub samples: usize,
    pub tolerance: f64,
    pub epsilon: Vec<f64>,
    pub initial_state: InitialState,
    pub out_dir: PathBuf,
    pub format: OutputFormat,
    /// Significant digits in numeric output.
    pub precision: usize,
    pub propagator: String,
    /// `None` picks the propagator's default.
    pub integrator: Option<String>,
}

impl RunConfig {
    /// Reference device, ramp durations 0.5, 1 and 2 and a symmetric ±10%
    /// sweep.
    pub fn reference() -> Self {
        Self {
            device: DeviceInputs::reference(),
            t_final: vec![0.5, 1.0, 2.0],
            samples: 201,
            tolerance: DEFAULT_TOLERANCE,
            epsilon: vec![-0.1, 0.0, 0.1],
            initial_state: InitialState::Nominal,
            out_dir: PathBuf::from("out"),
            format: OutputFormat::Csv,
            precision: 10,
            propagator: "transfer".to_string(),
            integrator: None,
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|err| ConfigError {
            line: None,
            field: None,
            message: format!("cannot read {}: {err}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = Raw::default();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            }
            .trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line_no),
                    field: None,
                    message: format!("expected `key = value`, got `{content}`"),
                });
            };
            raw.set(line_no, key.trim(), value.trim())?;
        }
        raw.finish()
    }

    /// Checks the invariants that do not depend on a particular line.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.samples < 2 {
            return Err(ConfigError::field(
                "samples",
                format!("must be at least 2, got {}", self.samples),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance <= MAX_TOLERANCE) {
            return Err(ConfigError::field(
                "tolerance",
                format!("must lie in (0, {MAX_TOLERANCE:e}], got {:e}", self.tolerance),
            ));
        }
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&self.precision) {
            return Err(ConfigError::field(
                "precision",
                format!("must lie in [{MIN_PRECISION}, {MAX_PRECISION}], got {}", self.precision),
            ));
        }
        if self.t_final.is_empty() {
            return Err(ConfigError::field("t_final", "needs at least one value"));
        }
        if let Some(bad) = self.t_final.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(ConfigError::field(
                "t_final",
                format!("values must be positive, got {bad}"),
            ));
        }
        if let Some(bad) = self.epsilon.iter().find(|e| !(**e > -1.0 && e.is_finite())) {
            return Err(ConfigError::field(
                "epsilon",
                format!("values must exceed -1, got {bad}"),
            ));
        }
        let d = &self.device;
        if d.resonator_charge.is_none() && (d.charge_density.is_none() || d.charge_area.is_none()) {
            return Err(ConfigError::field(
                "resonator_charge",
                "set resonator_charge or both charge_density and charge_area",
            ));
        }
        Ok(())
    }

    /// Canonical text form, SI units throughout.
    pub fn to_text(&self) -> String {
        let d = &self.device;
        let mut out = String::new();
        let mut put = |key: &str, value: String| {
            out.push_str(&format!("{key:<17} = {value}\n"));
        };
        put("coulomb_k", format!("{:e} N m2/C2", d.coulomb_k));
        put("capacitance", format!("{:e} F", d.capacitance));
        put("voltage_amplitude", format!("{:e} V", d.voltage_amplitude));
        if let Some(v) = d.charge_density {
            put("charge_density", format!("{v:e} m^-2"));
        }
        if let Some(v) = d.charge_area {
            put("charge_area", format!("{v:e} m2"));
        }
        if let Some(v) = d.resonator_charge {
            put("resonator_charge", format!("{v:e} C"));
        }
        put("mass", format!("{:e} kg", d.mass));
        put("bare_frequency", format!("{:e} rad/s", d.bare_frequency));
        put("separation", format!("{:e} m", d.separation));
        put("temperature", format!("{:e} K", d.bath_temperature));
        put("t_final", join(&self.t_final));
        put("samples", self.samples.to_string());
        put("tolerance", format!("{:e}", self.tolerance));
        put("epsilon", join(&self.epsilon));
        put("initial_state", self.initial_state.name().to_string());
        put("out_dir", self.out_dir.display().to_string());
        put("format", self.format.name().to_string());
        put("precision", self.precision.to_string());
        put("propagator", self.propagator.clone());
        if let Some(name) = &self.integrator {
            put("integrator", name.clone());
        }
        out
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(", ")
}

// Values as they are read, before defaults fill the gaps.
#[derive(Default)]
struct Raw {
    seen: Vec<(String, usize)>,
    coulomb_k: Option<f64>,
    capacitance: Option<f64>,
    voltage_amplitude: Option<f64>,
    charge_density: Option<f64>,
    charge_area: Option<f64>,
    resonator_charge: Option<f64>,
    mass: Option<f64>,
    bare_frequency: Option<f64>,
    separation: Option<f64>,
    temperature: Option<f64>,
    t_final: Option<Vec<f64>>,
    samples: Option<usize>,
    tolerance: Option<f64>,
    epsilon: Option<Vec<f64>>,
    initial_state: Option<InitialState>,
    out_dir: Option<PathBuf>,
    format: Option<OutputFormat>,
    precision: Option<usize>,
    propagator: Option<String>,
    integrator: Option<String>,
}

const REQUIRED: [&str; 8] = [
    "coulomb_k",
    "capacitance",
    "voltage_amplitude",
    "mass",
    "bare_frequency",
    "separation",
    "temperature",
    "t_final",
];

impl Raw {
    fn set(&mut self, line: usize, key: &str, value: &str) -> Result<(), ConfigError> {
        if let Some((_, first)) = self.seen.iter().find(|(k, _)| k == key) {
            return Err(ConfigError::at(line, key, format!("already set on line {first}")));
        }
        let quantity = |dim| parse_quantity(value, dim).map_err(|err| ConfigError::at(line, key, err.to_string()));
        match key {
            "coulomb_k" => self.coulomb_k = Some(quantity(Dimension::CoulombConstant)?),
            "capacitance" => self.capacitance = Some(quantity(Dimension::Capacitance)?),
            "voltage_amplitude" => self.voltage_amplitude = Some(quantity(Dimension::Voltage)?),
            "charge_density" => self.charge_density = Some(quantity(Dimension::ChargeDensity)?),
            "charge_area" => self.charge_area = Some(quantity(Dimension::Area)?),
            "resonator_charge" => self.resonator_charge = Some(quantity(Dimension::Charge)?),
            "mass" => self.mass = Some(quantity(Dimension::Mass)?),
            "bare_frequency" => self.bare_frequency = Some(quantity(Dimension::AngularFrequency)?),
            "separation" => self.separation = Some(quantity(Dimension::Length)?),
            "temperature" => self.temperature = Some(quantity(Dimension::Temperature)?),
            "t_final" => self.t_final = Some(number_list(line, key, value)?),
            "epsilon" => self.epsilon = Some(number_list(line, key, value)?),
            "samples" => self.samples = Some(integer(line, key, value)?),
            "precision" => self.precision = Some(integer(line, key, value)?),
            "tolerance" => self.tolerance = Some(number(line, key, value)?),
            "initial_state" => {
                let parsed = InitialState::parse(value).ok_or_else(|| {
                    ConfigError::at(line, key, format!("expected nominal or perturbed, got `{value}`"))
                })?;
                self.initial_state = Some(parsed);
            }
            "format" => {
                let parsed = OutputFormat::parse(value)
                    .ok_or_else(|| ConfigError::at(line, key, format!("expected csv or json, got `{value}`")))?;
                self.format = Some(parsed);
            }
            "out_dir" => self.out_dir = Some(PathBuf::from(non_empty(line, key, value)?)),
            "propagator" => self.propagator = Some(non_empty(line, key, value)?),
            "integrator" => self.integrator = Some(non_empty(line, key, value)?),
            _ => return Err(ConfigError::at(line, key, "unknown key")),
        }
        self.seen.push((key.to_string(), line));
        Ok(())
    }

    fn line_of(&self, key: &str) -> Option<usize> {
        self.seen.iter().find(|(k, _)| k == key).map(|(_, line)| *line)
    }

    fn finish(self) -> Result<RunConfig, ConfigError> {
        for key in REQUIRED {
            if self.line_of(key).is_none() {
                return Err(ConfigError::field(key, "missing"));
            }
        }
        let defaults = RunConfig::reference();
        let seen = self.seen.clone();
        let config = RunConfig {
            device: DeviceInputs {
                coulomb_k: self.coulomb_k.unwrap(),
                capacitance: self.capacitance.unwrap(),
                voltage_amplitude: self.voltage_amplitude.unwrap(),
                charge_density: self.charge_density,
                charge_area: self.charge_area,
                resonator_charge: self.resonator_charge,
                mass: self.mass.unwrap(),
                bare_frequency: self.bare_frequency.unwrap(),
                separation: self.separation.unwrap(),
                bath_temperature: self.temperature.unwrap(),
            },
            t_final: self.t_final.unwrap(),
            samples: self.samples.unwrap_or(defaults.samples),
            tolerance: self.tolerance.unwrap_or(defaults.tolerance),
            epsilon: self.epsilon.unwrap_or(defaults.epsilon),
            initial_state: self.initial_state.unwrap_or_default(),
            out_dir: self.out_dir.unwrap_or(defaults.out_dir),
            format: self.format.unwrap_or_default(),
            precision: self.precision.unwrap_or(defaults.precision),
            propagator: self.propagator.unwrap_or(defaults.propagator),
            integrator: self.integrator,
        };
        config.validate().map_err(|mut err| {
            if let Some(field) = &err.field {
                err.line = seen.iter().find(|(k, _)| k == field).map(|(_, line)| *line);
            }
            err
        })?;
        Ok(config)
    }
}

fn number(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| ConfigError::at(line, key, format!("`{value}` is not a finite number")))
}

fn integer(line: usize, key: &str, value: &str) -> Result<usize, ConfigError> {
    value
        .parse()
        .map_err(|_| ConfigError::at(line, key, format!("`{value}` is not a non-negative integer")))
}

fn number_list(line: usize, key: &str, value: &str) -> Result<Vec<f64>, ConfigError> {
    if value.is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|item| number(line, key, item.trim())).collect()
}

fn non_empty(line: usize, key: &str, value: &str) -> Result<String, ConfigError> {
    if value.is_empty() {
        Err(ConfigError::at(line, key, "must not be empty"))
    } else {
        Ok(value.to_string())
    }
}
