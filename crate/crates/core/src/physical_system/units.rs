//! Unit-suffixed quantity parsing.
//!
//! Every conversion from laboratory units (pg, μm, nF, cm⁻², kHz, mK, ...)
//! to SI happens here. A bare number is taken to be SI already.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Mass,
    Length,
    Area,
    Capacitance,
    Voltage,
    /// Stored in rad/s; `Hz`-family suffixes are multiplied by 2π.
    AngularFrequency,
    Temperature,
    /// Stored in 1/m².
    ChargeDensity,
    Charge,
    /// Coulomb constant k = 1/(4πε₀), N·m²/C².
    CoulombConstant,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Dimension::Mass => "mass",
            Dimension::Length => "length",
            Dimension::Area => "area",
            Dimension::Capacitance => "capacitance",
            Dimension::Voltage => "voltage",
            Dimension::AngularFrequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::ChargeDensity => "charge density",
            Dimension::Charge => "charge",
            Dimension::CoulombConstant => "coulomb constant",
        };
        f.write_str(s)
    }
}

/// Multiplier taking a value in `unit` to SI for `dim`, or `None` if the
/// unit is not recognised for that dimension.
pub fn si_factor(dim: Dimension, unit: &str) -> Option<f64> {
    let unit = normalize(unit);
    let factor = match dim {
        Dimension::Mass => match unit.as_str() {
            "kg" => 1.0,
            "g" => 1e-3,
            "mg" => 1e-6,
            "ug" => 1e-9,
            "ng" => 1e-12,
            "pg" => 1e-15,
            "fg" => 1e-18,
            _ => return None,
        },
        Dimension::Length => match unit.as_str() {
            "m" => 1.0,
            "cm" => 1e-2,
            "mm" => 1e-3,
            "um" => 1e-6,
            "nm" => 1e-9,
            "pm" => 1e-12,
            _ => return None,
        },
        Dimension::Area => match unit.as_str() {
            "m2" => 1.0,
            "cm2" => 1e-4,
            "mm2" => 1e-6,
            "um2" => 1e-12,
            "nm2" => 1e-18,
            _ => return None,
        },
        Dimension::Capacitance => match unit.as_str() {
            "f" => 1.0,
            "mf" => 1e-3,
            "uf" => 1e-6,
            "nf" => 1e-9,
            "pf" => 1e-12,
            _ => return None,
        },
        Dimension::Voltage => match unit.as_str() {
            "v" => 1.0,
            "mv" => 1e-3,
            "kv" => 1e3,
            _ => return None,
        },
        Dimension::AngularFrequency => match unit.as_str() {
            "rad/s" => 1.0,
            "hz" => 2.0 * PI,
            "khz" => 2.0 * PI * 1e3,
            "mhz" => 2.0 * PI * 1e6,
            "ghz" => 2.0 * PI * 1e9,
            _ => return None,
        },
        Dimension::Temperature => match unit.as_str() {
            "k" => 1.0,
            "mk" => 1e-3,
            "uk" => 1e-6,
            "nk" => 1e-9,
            _ => return None,
        },
        Dimension::ChargeDensity => match unit.as_str() {
            "m^-2" | "/m2" | "1/m2" => 1.0,
            "cm^-2" | "/cm2" | "1/cm2" => 1e4,
            "um^-2" | "/um2" | "1/um2" => 1e12,
            _ => return None,
        },
        Dimension::Charge => match unit.as_str() {
            "c" => 1.0,
            "e" => crate::constants::ELEMENTARY_CHARGE,
            _ => return None,
        },
        Dimension::CoulombConstant => match unit.as_str() {
            "nm2/c2" | "n*m2/c2" | "n.m2/c2" => 1.0,
            _ => return None,
        },
    };
    Some(factor)
}

// Lower-cases, drops whitespace and maps micro signs to `u`.
fn normalize(unit: &str) -> String {
    unit.chars()
        .filter(|c| !c.is_whitespace() && *c != '·')
        .map(|c| match c {
            'µ' | 'μ' => 'u',
            '²' => '2',
            '⁻' => '-',
            c => c.to_ascii_lowercase(),
        })
        .collect::<String>()
        .replace("^2", "2")
}

/// Parses `"<number> [unit]"` into an SI value of dimension `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let text = text.trim();
    let (number, unit) = match text.find(char::is_whitespace) {
        Some(idx) => (&text[..idx], text[idx..].trim()),
        None => (text, ""),
    };
    let value: f64 = number
        .parse()
        .map_err(|_| Error::Unit(format!("`{number}` is not a number")))?;
    if !value.is_finite() {
        return Err(Error::Unit(format!("`{number}` is not finite")));
    }
    if unit.is_empty() {
        return Ok(value);
    }
    si_factor(dim, unit)
        .map(|factor| value * factor)
        .ok_or_else(|| Error::Unit(format!("`{unit}` is not a {dim} unit")))
}
