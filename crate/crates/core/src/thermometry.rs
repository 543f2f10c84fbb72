//! Phonon numbers and effective temperatures.
//!
//! `n̄ = 1/(exp(ħω/k_BT) − 1)` for thermal states; for general Gaussian
//! states the occupation is read off the energy, `n̄ = E/(ħω_ref) − ½`, which
//! coincides with the Bose value on thermal states. The effective
//! temperature inverts the Bose formula at a chosen reference frequency.

use crate::constants::{BOLTZMANN, HBAR};
use crate::error::{Error, Result};
use crate::gaussian_dynamics::GaussianState;
use crate::physical_system::PhysicalParams;

/// Bose occupation at angular frequency `omega` (rad/s) and temperature `t` (K).
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::domain("omega", format!("must be positive, got {omega}")));
    }
    if !(temperature > 0.0) {
        return Err(Error::domain(
            "temperature",
            format!("must be positive, got {temperature}"),
        ));
    }
    Ok(1.0 / (HBAR * omega / (BOLTZMANN * temperature)).exp_m1())
}

/// Temperature at which a thermal state at `omega` has occupation `n_bar`.
///
/// `n_bar = 0` maps to 0 K.
pub fn effective_temperature(omega: f64, n_bar: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::domain("omega", format!("must be positive, got {omega}")));
    }
    if n_bar < 0.0 || n_bar.is_nan() {
        return Err(Error::domain("n_bar", format!("must be non-negative, got {n_bar}")));
    }
    if n_bar == 0.0 {
        return Ok(0.0);
    }
    Ok(HBAR * omega / (BOLTZMANN * (1.0 / n_bar).ln_1p()))
}

/// Energy-based occupation of `state` relative to a reference frequency,
/// both in reduced units. Round-off below zero is clamped.
pub fn occupation_from_state(state: &GaussianState, ref_omega_sq: f64) -> Result<f64> {
    if !(ref_omega_sq > 0.0) {
        return Err(Error::domain(
            "ref_omega_sq",
            format!("reference frequency must be real and positive, got ω² = {ref_omega_sq}"),
        ));
    }
    let omega = ref_omega_sq.sqrt();
    let energy = 0.5 * (state.pp + ref_omega_sq * state.xx);
    let n_bar = energy / omega - 0.5;
    if n_bar < 0.0 {
        if n_bar < -1e-9 {
            log::warn!("occupation {n_bar:e} is below zero beyond round-off; clamping to 0");
        }
        return Ok(0.0);
    }
    Ok(n_bar)
}

/// `pp/xx` in units of ω_m²: the frequency whose thermal states share the
/// position/momentum spread ratio of `state`.
pub fn state_frequency(state: &GaussianState) -> f64 {
    state.pp / state.xx
}

/// Snapshot of one state's thermometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermometryRecord {
    /// 1/ω_m units.
    pub time: f64,
    /// ω_m² units.
    pub ref_omega_sq: f64,
    pub n_bar: f64,
    /// Kelvin.
    pub t_eff: f64,
    /// ω_m² units.
    pub state_omega_sq: f64,
}

impl ThermometryRecord {
    pub fn new(params: &PhysicalParams, state: &GaussianState, ref_omega_sq: f64) -> Result<Self> {
        let n_bar = occupation_from_state(state, ref_omega_sq)?;
        let omega = params.bare_frequency() * ref_omega_sq.sqrt();
        Ok(Self {
            time: state.time,
            ref_omega_sq,
            n_bar,
            t_eff: effective_temperature(omega, n_bar)?,
            state_omega_sq: state_frequency(state),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian_dynamics::thermal_state;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn omega_m() -> f64 {
        PhysicalParams::reference().bare_frequency()
    }

    // Bare and ramped-up occupations at 20 mK from a 50-digit evaluation.
    const N_BARE: f64 = 3_109.443_181_436_754;
    const N_RAMPED: f64 = 0.472_024_410_937_883_76;
    const OMEGA0_RATIO: f64 = 3_537.134_837_014_020_3;

    #[test]
    fn step_one_occupations() {
        let n_o = thermal_occupation(omega_m(), 0.02).unwrap();
        assert_relative_eq!(n_o, N_BARE, max_relative = 1e-12);
        assert!((n_o - 3100.0).abs() / 3100.0 < 0.01);

        let n_i = thermal_occupation(OMEGA0_RATIO * omega_m(), 0.02).unwrap();
        assert_relative_eq!(n_i, N_RAMPED, max_relative = 1e-12);
        assert!((n_i - 0.47).abs() < 0.01);
    }

    #[test]
    fn occupation_of_one_at_ln2() {
        let t = 1.0;
        let omega = std::f64::consts::LN_2 * BOLTZMANN * t / HBAR;
        assert_relative_eq!(thermal_occupation(omega, t).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn occupation_domain() {
        assert!(thermal_occupation(0.0, 1.0).is_err());
        assert!(thermal_occupation(-1.0, 1.0).is_err());
        assert!(thermal_occupation(1.0, 0.0).is_err());
    }

    #[test]
    fn effective_temperature_examples() {
        let t_final = effective_temperature(omega_m(), 0.472).unwrap();
        assert_relative_eq!(t_final, 5.654_119_262_258_83e-6, max_relative = 1e-10);
        assert!((t_final - 6e-6).abs() / 6e-6 < 0.15);

        let t_ramped = effective_temperature(OMEGA0_RATIO * omega_m(), N_RAMPED).unwrap();
        assert_relative_eq!(t_ramped, 0.02, max_relative = 1e-12);

        assert_eq!(effective_temperature(omega_m(), 0.0).unwrap(), 0.0);
        assert!(effective_temperature(omega_m(), -0.1).is_err());
        assert!(effective_temperature(0.0, 0.5).is_err());
    }

    #[test]
    fn state_round_trip() {
        let params = PhysicalParams::reference();
        for (w2, temp) in [(1.0, 0.02), (1.25e7, 0.02), (4.0, 1e-5)] {
            let state = thermal_state(&params, w2, temp).unwrap();
            let expected = thermal_occupation(params.bare_frequency() * f64::sqrt(w2), temp).unwrap();
            assert_relative_eq!(
                occupation_from_state(&state, w2).unwrap(),
                expected,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn ground_state_has_zero_occupation() {
        let ground = GaussianState::ground(9.0, 0.0);
        assert_eq!(occupation_from_state(&ground, 9.0).unwrap(), 0.0);
        assert!(occupation_from_state(&ground, 0.0).is_err());
        assert!(occupation_from_state(&ground, -1.0).is_err());
    }

    #[test]
    fn state_frequency_examples() {
        let params = PhysicalParams::reference();
        let state = thermal_state(&params, 7.0, 0.01).unwrap();
        assert_relative_eq!(state_frequency(&state), 7.0, max_relative = 1e-14);

        let squeezed = GaussianState {
            xx: state.xx * 4.0,
            pp: state.pp / 4.0,
            ..state
        };
        assert_relative_eq!(state_frequency(&squeezed), 7.0 / 16.0, max_relative = 1e-14);
    }

    #[test]
    fn high_temperature_limit() {
        let omega = omega_m();
        let ratio = HBAR * omega / (BOLTZMANN * 0.02);
        assert!((ratio - 3.2e-4).abs() < 0.1e-4);
        let n = thermal_occupation(omega, 0.02).unwrap();
        assert!((n - 1.0 / ratio).abs() / n < ratio);
    }

    #[test]
    fn monotone_on_grids() {
        let omegas: Vec<f64> = (1..50).map(|i| omega_m() * i as f64 * 37.0).collect();
        for pair in omegas.windows(2) {
            assert!(thermal_occupation(pair[1], 0.02).unwrap() < thermal_occupation(pair[0], 0.02).unwrap());
        }
        let temps: Vec<f64> = (1..50).map(|i| 1e-5 * i as f64 * 3.0).collect();
        for pair in temps.windows(2) {
            assert!(thermal_occupation(omega_m(), pair[1]).unwrap() > thermal_occupation(omega_m(), pair[0]).unwrap());
        }
    }

    #[test]
    fn state_frequency_minimises_occupation() {
        let state = GaussianState {
            xx: 0.3,
            pp: 5.0,
            xp: 0.0,
            time: 0.0,
        };
        let best = occupation_from_state(&state, state_frequency(&state)).unwrap();
        for i in 1..200 {
            let w2 = i as f64 * 0.25;
            assert!(occupation_from_state(&state, w2).unwrap() >= best - 1e-15);
        }
    }

    #[test]
    fn record_collects_fields() {
        let params = PhysicalParams::reference();
        let state = thermal_state(&params, 1.0, 0.02).unwrap();
        let rec = ThermometryRecord::new(&params, &state, 1.0).unwrap();
        assert_relative_eq!(rec.n_bar, N_BARE, max_relative = 1e-10);
        assert_relative_eq!(rec.t_eff, 0.02, max_relative = 1e-10);
        assert_relative_eq!(rec.state_omega_sq, 1.0, max_relative = 1e-14);
    }

    proptest! {
        #[test]
        fn temperature_inverts_occupation(log_w in 3.0f64..12.0, log_t in -7.0f64..1.0) {
            let omega = 10f64.powf(log_w);
            let temp = 10f64.powf(log_t);
            let n = thermal_occupation(omega, temp).unwrap();
            prop_assume!(n > 1e-250);
            let back = effective_temperature(omega, n).unwrap();
            prop_assert!((back - temp).abs() <= 1e-12 * temp);
        }
    }
}
