//! Device parameters, Coulomb coupling and the electrostatic potential of a
//! charged resonator centred between two identical biased electrodes.
//!
//! This is the only SI layer in the crate. [`PhysicalParams`] caches the
//! dimensionless coupling `η = 4 k C₀ U₀ Q / (m ω_m² d³)` that the reduced-unit
//! layers consume.

pub mod units;

use crate::constants::ELEMENTARY_CHARGE;
use crate::error::{Error, Result};

/// Raw device description, SI units.
///
/// The resonator charge is either derived from `charge_density ×
/// charge_area × |e|` or given directly; a direct value wins.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceInputs {
    pub coulomb_k: f64,
    pub capacitance: f64,
    pub voltage_amplitude: f64,
    pub charge_density: Option<f64>,
    pub charge_area: Option<f64>,
    pub resonator_charge: Option<f64>,
    pub mass: f64,
    pub bare_frequency: f64,
    pub separation: f64,
    pub bath_temperature: f64,
}

impl DeviceInputs {
    /// Reference device, coupling η ≈ 1.25e7
    /// (s = 0.08 μm², C₀ = 27.5 nF).
    pub fn reference() -> Self {
        Self {
            coulomb_k: 8.988e9,
            capacitance: 27.5e-9,
            voltage_amplitude: 7.00,
            charge_density: Some(1.25e13 * 1e4),
            charge_area: Some(0.08e-12),
            resonator_charge: None,
            mass: 40e-15,
            bare_frequency: 2.0 * std::f64::consts::PI * 134e3,
            separation: 3.15e-6,
            bath_temperature: 20e-3,
        }
    }

    /// Reference device with half the charge area (s = 0.04 μm², C₀ = 27.52 nF).
    pub fn small_area_variant() -> Self {
        Self {
            capacitance: 27.52e-9,
            charge_area: Some(0.04e-12),
            ..Self::reference()
        }
    }

    /// Charge derived from density and area, if both are present.
    pub fn derived_charge(&self) -> Option<f64> {
        match (self.charge_density, self.charge_area) {
            (Some(sigma), Some(area)) => Some(ELEMENTARY_CHARGE * sigma * area),
            _ => None,
        }
    }

    /// Effective resonator charge: direct value if given, else derived.
    pub fn charge(&self) -> Result<f64> {
        self.resonator_charge.or_else(|| self.derived_charge()).ok_or_else(|| {
            Error::domain(
                "resonator_charge",
                "set resonator_charge or both charge_density and charge_area",
            )
        })
    }

    /// Human-readable notes about inconsistent but accepted inputs.
    pub fn consistency_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let (Some(direct), Some(derived)) = (self.resonator_charge, self.derived_charge()) {
            let scale = direct.abs().max(derived.abs());
            if scale > 0.0 && (direct - derived).abs() > 1e-9 * scale {
                out.push(format!(
                    "resonator_charge = {direct:e} C overrides the value {derived:e} C \
                     derived from charge_density × charge_area"
                ));
            }
        }
        out
    }
}

/// Coupling constant `4 k C₀ U₀ Q / (m ω_m² d³)`.
pub fn compute_eta(inputs: &DeviceInputs) -> Result<f64> {
    positive("mass", inputs.mass)?;
    positive("bare_frequency", inputs.bare_frequency)?;
    positive("separation", inputs.separation)?;
    let charge = inputs.charge()?;
    Ok(
        4.0 * inputs.coulomb_k * inputs.capacitance * inputs.voltage_amplitude * charge
            / (inputs.mass * inputs.bare_frequency.powi(2) * inputs.separation.powi(3)),
    )
}

fn positive(field: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            field,
            format!("must be positive and finite, got {value}"),
        ))
    }
}

/// Validated, immutable device parameters with the cached coupling η.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalParams {
    coulomb_k: f64,
    capacitance: f64,
    voltage_amplitude: f64,
    resonator_charge: f64,
    mass: f64,
    bare_frequency: f64,
    separation: f64,
    bath_temperature: f64,
    eta: f64,
}

impl PhysicalParams {
    pub fn new(inputs: &DeviceInputs) -> Result<Self> {
        positive("capacitance", inputs.capacitance)?;
        positive("bath_temperature", inputs.bath_temperature)?;
        if !inputs.coulomb_k.is_finite() || inputs.coulomb_k <= 0.0 {
            return Err(Error::domain("coulomb_k", "must be positive and finite"));
        }
        if !inputs.voltage_amplitude.is_finite() {
            return Err(Error::domain("voltage_amplitude", "must be finite"));
        }
        for warning in inputs.consistency_warnings() {
            log::warn!("{warning}");
        }
        let eta = compute_eta(inputs)?;
        Ok(Self {
            coulomb_k: inputs.coulomb_k,
            capacitance: inputs.capacitance,
            voltage_amplitude: inputs.voltage_amplitude,
            resonator_charge: inputs.charge()?,
            mass: inputs.mass,
            bare_frequency: inputs.bare_frequency,
            separation: inputs.separation,
            bath_temperature: inputs.bath_temperature,
            eta,
        })
    }

    pub fn reference() -> Self {
        Self::new(&DeviceInputs::reference()).expect("reference parameters are valid")
    }

    pub fn coulomb_k(&self) -> f64 {
        self.coulomb_k
    }
    pub fn capacitance(&self) -> f64 {
        self.capacitance
    }
    pub fn voltage_amplitude(&self) -> f64 {
        self.voltage_amplitude
    }
    pub fn resonator_charge(&self) -> f64 {
        self.resonator_charge
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    /// Bare angular frequency ω_m, rad/s.
    pub fn bare_frequency(&self) -> f64 {
        self.bare_frequency
    }
    pub fn separation(&self) -> f64 {
        self.separation
    }
    pub fn bath_temperature(&self) -> f64 {
        self.bath_temperature
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }

    // Energy scale k C₀ U₀ Q_MR shared by both potential forms.
    fn coulomb_scale(&self) -> f64 {
        self.coulomb_k * self.capacitance * self.voltage_amplitude * self.resonator_charge
    }

    /// Full two-electrode Coulomb energy at displacement `x` for control `f`.
    pub fn coulomb_potential_exact(&self, f: f64, x: f64) -> Result<f64> {
        let d = self.separation;
        if x.abs() >= d {
            return Err(Error::domain(
                "x",
                format!("|x| = {:e} m reaches the electrode at d = {d:e} m", x.abs()),
            ));
        }
        Ok(self.coulomb_scale() * f * (1.0 / (d + x) + 1.0 / (d - x)))
    }

    /// Harmonic part `2 k C₀ U₀ Q f x² / d³`; the constant offset is dropped.
    pub fn coulomb_potential_quadratic(&self, f: f64, x: f64) -> f64 {
        2.0 * self.coulomb_scale() * f * x * x / self.separation.powi(3)
    }

    /// Constant offset `2 k C₀ U₀ Q f / d` dropped by the quadratic form.
    pub fn coulomb_potential_offset(&self, f: f64) -> f64 {
        2.0 * self.coulomb_scale() * f / self.separation
    }

    /// Signed `ω_eff² = ω_m² (1 + η f)` in rad²/s²; negative means unstable.
    pub fn effective_frequency_sq(&self, f: f64) -> f64 {
        self.bare_frequency.powi(2) * reduced_frequency_sq(self.eta, f)
    }
}

/// `ω_eff² / ω_m² = 1 + η f`.
pub fn reduced_frequency_sq(eta: f64, f: f64) -> f64 {
    1.0 + eta * f
}
