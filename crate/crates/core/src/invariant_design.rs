//! Inverse engineering of the Step-II control function.
//!
//! The auxiliary scale factor `b(t)` of the Lewis-Riesenfeld invariant obeys
//! the Ermakov equation `b̈ + ω²(t) b = ω₀² / b³`. Fixing `b` to the quintic
//! that satisfies `b = 1, ḃ = b̈ = 0` at `t = 0` and `b = χ, ḃ = b̈ = 0` at
//! `t = t_f` and solving the Ermakov equation for `ω²(t)` gives the control
//! function
//!
//! ```text
//! f(t) = (ω₀² − b³ b̈ − b⁴) / (η b⁴)        (reduced units, ω_m = 1)
//! ```
//!
//! Everything here is evaluated in closed form; sampled tables are for
//! output only.

use crate::error::{Error, Result};
use crate::physical_system::PhysicalParams;

/// Scale factor and its first two derivatives, either with respect to the
/// normalised time `s = t/t_f` or to physical (reduced) time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleFactor {
    pub b: f64,
    pub d1: f64,
    pub d2: f64,
}

/// Quintic `b(s) = 6(χ−1)s⁵ − 15(χ−1)s⁴ + 10(χ−1)s³ + 1` and its derivatives
/// in `s`.
pub fn b_polynomial(s: f64, chi: f64) -> Result<ScaleFactor> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain("s", format!("{s} is outside [0, 1]")));
    }
    Ok(quintic(s, chi))
}

#[inline]
fn quintic(s: f64, chi: f64) -> ScaleFactor {
    let a = chi - 1.0;
    let s2 = s * s;
    let s3 = s2 * s;
    ScaleFactor {
        b: 1.0 + a * s3 * (10.0 + s * (-15.0 + 6.0 * s)),
        d1: a * 30.0 * s2 * (1.0 + s * (-2.0 + s)),
        d2: a * 60.0 * s * (1.0 + s * (-3.0 + 2.0 * s)),
    }
}

/// Boundary data for one ramp: start and end frequencies and duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    /// ω₀² = ω_eff²(0), units of ω_m².
    pub omega0_sq: f64,
    /// ω_eff²(t_f), units of ω_m².
    pub omega_final_sq: f64,
    /// Ramp duration, units of 1/ω_m.
    pub t_final: f64,
    /// `b(t_f) = (ω₀ / ω_eff(t_f))^{1/2}`.
    pub chi: f64,
}

impl TrajectorySpec {
    pub fn new(omega0_sq: f64, omega_final_sq: f64, t_final: f64) -> Result<Self> {
        for (field, value) in [
            ("omega0_sq", omega0_sq),
            ("omega_final_sq", omega_final_sq),
            ("t_final", t_final),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::domain(field, format!("must be positive, got {value}")));
            }
        }
        Ok(Self {
            omega0_sq,
            omega_final_sq,
            t_final,
            chi: (omega0_sq / omega_final_sq).sqrt().sqrt(),
        })
    }

    /// Ramp from `f = 1` (ω₀² = 1 + η) back to the bare frequency.
    pub fn from_eta(eta: f64, t_final: f64) -> Result<Self> {
        if eta <= -1.0 || !eta.is_finite() {
            return Err(Error::domain(
                "eta",
                format!("1 + eta must be positive for a real initial frequency, got eta = {eta}"),
            ));
        }
        Self::new(1.0 + eta, 1.0, t_final)
    }
}

/// Step-II ramp for the device described by `params`.
pub fn make_spec(params: &PhysicalParams, t_final: f64) -> Result<TrajectorySpec> {
    TrajectorySpec::from_eta(params.eta(), t_final)
}

/// One row of a sampled trajectory table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    pub t: f64,
    pub b: f64,
    pub b_dot: f64,
    pub b_ddot: f64,
    pub f: f64,
    pub omega_eff_sq: f64,
}

/// Inverse-engineered control `f(t)`, optionally scaled by a global factor.
///
/// `scale` is 1 for the designed trajectory. A different value models a
/// multiplicative error `(1 + ε) f(t)`; the boundary metadata in `spec` is
/// kept as designed and no longer describes the actual dynamics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlTrajectory {
    pub spec: TrajectorySpec,
    pub eta: f64,
    scale: f64,
}

impl ControlTrajectory {
    pub fn new(spec: TrajectorySpec, eta: f64) -> Result<Self> {
        if eta == 0.0 {
            return Err(Error::ZeroCoupling);
        }
        if !eta.is_finite() {
            return Err(Error::domain("eta", "must be finite"));
        }
        Ok(Self { spec, eta, scale: 1.0 })
    }

    /// Designed Step-II trajectory for `params`.
    pub fn design(params: &PhysicalParams, t_final: f64) -> Result<Self> {
        Self::new(make_spec(params, t_final)?, params.eta())
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Copy with the control function multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            scale: self.scale * factor,
            ..*self
        }
    }

    /// True when the boundary conditions in `spec` no longer hold.
    pub fn is_perturbed(&self) -> bool {
        self.scale != 1.0
    }

    pub fn t_final(&self) -> f64 {
        self.spec.t_final
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if (0.0..=self.spec.t_final).contains(&t) {
            Ok(())
        } else {
            Err(Error::domain("t", format!("{t} is outside [0, {}]", self.spec.t_final)))
        }
    }

    /// `b`, `ḃ`, `b̈` with respect to reduced time at `t`.
    pub fn scale_factor(&self, t: f64) -> Result<ScaleFactor> {
        self.check_time(t)?;
        Ok(self.scale_factor_unchecked(t))
    }

    #[inline]
    fn scale_factor_unchecked(&self, t: f64) -> ScaleFactor {
        let tf = self.spec.t_final;
        let s = (t / tf).clamp(0.0, 1.0);
        let ds = quintic(s, self.spec.chi);
        ScaleFactor {
            b: ds.b,
            d1: ds.d1 / tf,
            d2: ds.d2 / (tf * tf),
        }
    }

    /// Designed control `f(t) = (ω₀² − b³ b̈ − b⁴) / (η b⁴)`, times `scale`.
    pub fn control_function(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.control_unchecked(t))
    }

    #[inline]
    fn control_unchecked(&self, t: f64) -> f64 {
        let sf = self.scale_factor_unchecked(t);
        let b3 = sf.b * sf.b * sf.b;
        let b4 = b3 * sf.b;
        let nominal = (self.spec.omega0_sq - b3 * sf.d2 - b4) / (self.eta * b4);
        self.scale * nominal
    }

    /// `ω_eff²(t) = 1 + η f(t)`, units of ω_m².
    pub fn effective_frequency_sq(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        Ok(self.omega_sq_unchecked(t))
    }

    #[inline]
    pub(crate) fn omega_sq_unchecked(&self, t: f64) -> f64 {
        1.0 + self.eta * self.control_unchecked(t)
    }

    /// `ω₀²/b⁴ − b̈/b`, the frequency read off the Ermakov equation for the
    /// designed `b`. Equals [`Self::effective_frequency_sq`] when unperturbed.
    pub fn ermakov_frequency_sq(&self, t: f64) -> Result<f64> {
        let sf = self.scale_factor(t)?;
        Ok(self.spec.omega0_sq / sf.b.powi(4) - sf.d2 / sf.b)
    }

    /// `n ≥ 2` uniformly spaced samples over `[0, t_f]`, both ends exact.
    pub fn sample(&self, n: usize) -> Vec<TrajectorySample> {
        uniform_times(self.spec.t_final, n)
            .into_iter()
            .map(|t| {
                let sf = self.scale_factor_unchecked(t);
                TrajectorySample {
                    t,
                    b: sf.b,
                    b_dot: sf.d1,
                    b_ddot: sf.d2,
                    f: self.control_unchecked(t),
                    omega_eff_sq: self.omega_sq_unchecked(t),
                }
            })
            .collect()
    }
}

/// `n` points from 0 to `t_final` inclusive; the last point is exactly `t_final`.
pub fn uniform_times(t_final: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let step = t_final / (n - 1) as f64;
    (0..n)
        .map(|i| if i == n - 1 { t_final } else { i as f64 * step })
        .collect()
}

/// Summary of a sampled trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub n_samples: usize,
    pub max_abs_f: f64,
    /// Largest |f| strictly inside (0, t_f).
    pub max_abs_f_interior: f64,
    /// Whether the voltage stays within ±U₀ at interior samples.
    pub interior_within_bound: bool,
    /// `[t_start, t_end]` sample windows where ω_eff² < 0.
    pub negative_windows: Vec<(f64, f64)>,
    pub min_omega_sq: f64,
    pub min_b: f64,
    /// |f(0) − 1|.
    pub start_residual: f64,
    /// |f(t_f)|.
    pub end_residual: f64,
}

/// Samples the trajectory and reports bounds, unstable windows and
/// boundary residuals. Never fails.
pub fn validate_trajectory(traj: &ControlTrajectory, n_samples: usize) -> ValidationReport {
    let samples = traj.sample(n_samples.max(2));
    let n = samples.len();
    let mut report = ValidationReport {
        n_samples: n,
        max_abs_f: 0.0,
        max_abs_f_interior: 0.0,
        interior_within_bound: true,
        negative_windows: Vec::new(),
        min_omega_sq: f64::INFINITY,
        min_b: f64::INFINITY,
        start_residual: (samples[0].f - 1.0).abs(),
        end_residual: samples[n - 1].f.abs(),
    };
    let mut open: Option<f64> = None;
    for (i, smp) in samples.iter().enumerate() {
        report.max_abs_f = report.max_abs_f.max(smp.f.abs());
        if i > 0 && i < n - 1 {
            report.max_abs_f_interior = report.max_abs_f_interior.max(smp.f.abs());
        }
        report.min_omega_sq = report.min_omega_sq.min(smp.omega_eff_sq);
        report.min_b = report.min_b.min(smp.b);
        match (smp.omega_eff_sq < 0.0, open) {
            (true, None) => open = Some(smp.t),
            (false, Some(start)) => {
                report.negative_windows.push((start, samples[i - 1].t));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        report.negative_windows.push((start, samples[n - 1].t));
    }
    report.interior_within_bound = report.max_abs_f_interior <= 1.0;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn reference(t_final: f64) -> ControlTrajectory {
        ControlTrajectory::design(&PhysicalParams::reference(), t_final).unwrap()
    }

    #[test]
    fn polynomial_boundaries() {
        for chi in [0.5, 1.0, 2.0, 59.47] {
            let b0 = b_polynomial(0.0, chi).unwrap();
            assert_eq!((b0.b, b0.d1, b0.d2), (1.0, 0.0, 0.0));
            let b1 = b_polynomial(1.0, chi).unwrap();
            assert_relative_eq!(b1.b, chi, max_relative = 1e-15);
            assert!(b1.d1.abs() < 1e-12 * chi && b1.d2.abs() < 1e-12 * chi);
        }
    }

    #[test]
    fn polynomial_midpoint() {
        for chi in [0.3, 2.0, 59.47] {
            let mid = b_polynomial(0.5, chi).unwrap();
            assert_relative_eq!(mid.b, (chi + 1.0) / 2.0, max_relative = 1e-15);
            assert_relative_eq!(mid.d2, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn polynomial_identity_when_chi_is_one() {
        for i in 0..=20 {
            let sf = b_polynomial(i as f64 / 20.0, 1.0).unwrap();
            assert_eq!((sf.b, sf.d1, sf.d2), (1.0, 0.0, 0.0));
        }
    }

    #[test]
    fn polynomial_domain() {
        assert!(b_polynomial(-1e-9, 2.0).is_err());
        assert!(b_polynomial(1.0 + 1e-9, 2.0).is_err());
    }

    #[test]
    fn polynomial_derivatives_match_finite_differences() {
        let chi = 7.3;
        let h = 1e-5;
        for s in [0.1, 0.37, 0.5, 0.81] {
            let c = b_polynomial(s, chi).unwrap();
            let p = b_polynomial(s + h, chi).unwrap();
            let m = b_polynomial(s - h, chi).unwrap();
            assert_relative_eq!(c.d1, (p.b - m.b) / (2.0 * h), epsilon = 1e-8, max_relative = 1e-8);
            assert_relative_eq!(c.d2, (p.d1 - m.d1) / (2.0 * h), epsilon = 1e-8, max_relative = 1e-8);
        }
    }

    #[test]
    fn spec_from_eta() {
        let spec = make_spec(&PhysicalParams::reference(), 1.0).unwrap();
        assert_relative_eq!(spec.chi, 59.473_816_398_596_96, max_relative = 1e-13);
        assert_eq!(TrajectorySpec::from_eta(0.0, 1.0).unwrap().chi, 1.0);
        assert_eq!(TrajectorySpec::from_eta(15.0, 1.0).unwrap().chi, 2.0);
        assert!(TrajectorySpec::from_eta(-1.0, 1.0).is_err());
        assert!(TrajectorySpec::from_eta(1.0, 0.0).is_err());
        assert!(TrajectorySpec::new(-4.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn chi_relation_holds() {
        for (w0, wf) in [(16.0, 1.0), (1.0 + 1.25e7, 1.0), (3.0, 7.0)] {
            let spec = TrajectorySpec::new(w0, wf, 1.0).unwrap();
            assert_relative_eq!(spec.chi.powi(4) * wf, w0, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_coupling_is_rejected() {
        let spec = TrajectorySpec::new(2.0, 1.0, 1.0).unwrap();
        assert_eq!(ControlTrajectory::new(spec, 0.0).unwrap_err(), Error::ZeroCoupling);
    }

    #[test]
    fn control_boundaries() {
        for tf in [0.5, 1.0, 2.0] {
            let traj = reference(tf);
            assert!((traj.control_function(0.0).unwrap() - 1.0).abs() < 1e-9);
            assert!(traj.control_function(tf).unwrap().abs() < 1e-9);
            assert_relative_eq!(
                traj.effective_frequency_sq(0.0).unwrap(),
                traj.spec.omega0_sq,
                max_relative = 1e-12
            );
            assert_relative_eq!(traj.effective_frequency_sq(tf).unwrap(), 1.0, max_relative = 1e-9);
            assert!(traj.control_function(tf * 1.01).is_err());
            assert!(traj.control_function(-0.1).is_err());
        }
    }

    #[test]
    fn control_golden_values() {
        // 50-digit evaluation of the closed form.
        let traj = reference(0.5);
        for (s, expected) in [
            (0.1, 0.197_194_962_363_917_405_12),
            (0.3, 7.213_156_134_633_723_4e-5),
            (0.5, 1.116_401_060_035_777_1e-6),
            (0.9, 1.372_199_906_286_075_5e-6),
        ] {
            let f = traj.control_function(s * 0.5).unwrap();
            assert_relative_eq!(f, expected, max_relative = 1e-9);
        }
        // The midpoint value is t_f independent since b̈(t_f/2) = 0.
        for tf in [1.0, 2.0] {
            assert_relative_eq!(
                reference(tf).control_function(tf / 2.0).unwrap(),
                1.116_401_060_035_777_1e-6,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn degenerate_chi_gives_constant_control() {
        let spec = TrajectorySpec::new(3.0, 3.0, 1.0).unwrap();
        let traj = ControlTrajectory::new(spec, 4.0).unwrap();
        for i in 0..=10 {
            let f = traj.control_function(i as f64 / 10.0).unwrap();
            assert_relative_eq!(f, (3.0 - 1.0) / 4.0, max_relative = 1e-15);
        }
        let report = validate_trajectory(&traj, 101);
        assert!(report.negative_windows.is_empty());
    }

    #[test]
    fn identity_trajectory_has_zero_interior_control() {
        // ω₀² = ω_f² = 1 gives χ = 1 and f ≡ 0.
        let spec = TrajectorySpec::new(1.0, 1.0, 1.0).unwrap();
        let traj = ControlTrajectory::new(spec, 5.0).unwrap();
        let report = validate_trajectory(&traj, 64);
        assert_eq!(report.max_abs_f_interior, 0.0);
        assert!(report.negative_windows.is_empty());
        assert!(report.interior_within_bound);
    }

    #[test]
    fn default_trajectories_validate() {
        for tf in [0.5, 1.0, 2.0] {
            let report = validate_trajectory(&reference(tf), 2001);
            assert!(report.start_residual < 1e-9, "{report:?}");
            assert!(report.end_residual < 1e-9, "{report:?}");
            assert!(report.negative_windows.is_empty(), "{report:?}");
            assert!(report.interior_within_bound);
            assert!(report.min_b >= 1.0);
        }
    }

    #[test]
    fn short_ramp_needs_imaginary_frequency() {
        // η = 15 (χ = 2), t_f = 0.5: the ramp is too fast for ω² to stay positive.
        let spec = TrajectorySpec::from_eta(15.0, 0.5).unwrap();
        let traj = ControlTrajectory::new(spec, 15.0).unwrap();
        assert_relative_eq!(
            traj.effective_frequency_sq(0.125).unwrap(),
            -9.599_763_369_113_346,
            max_relative = 1e-12
        );
        let report = validate_trajectory(&traj, 401);
        assert_eq!(report.negative_windows.len(), 1);
        let (start, end) = report.negative_windows[0];
        assert!(start < 0.125 && 0.125 < end);
        assert!(report.min_omega_sq < 0.0);
        // ω² ≈ −9.6 still needs only f ≈ −0.71.
        assert!(report.interior_within_bound);
    }

    #[test]
    fn both_frequency_forms_agree() {
        for tf in [0.5, 1.0, 2.0] {
            let traj = reference(tf);
            for i in 0..1000 {
                let t = tf * ((i as f64 * 0.618_033_988_75) % 1.0);
                let a = traj.effective_frequency_sq(t).unwrap();
                let b = traj.ermakov_frequency_sq(t).unwrap();
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "t={t}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ermakov_residual_vanishes() {
        for tf in [0.5, 1.0, 2.0] {
            let traj = reference(tf);
            let w0 = traj.spec.omega0_sq;
            for i in 1..1000 {
                let t = tf * ((i as f64 * 0.414_213_562_37) % 1.0);
                let sf = traj.scale_factor(t).unwrap();
                let w2 = traj.effective_frequency_sq(t).unwrap();
                let residual = sf.d2 + w2 * sf.b - w0 / sf.b.powi(3);
                assert!(residual.abs() < 1e-9 * w0, "t={t}: residual {residual}");
            }
        }
    }

    #[test]
    fn time_boundary_conditions() {
        for tf in [0.5, 1.0, 2.0] {
            let traj = reference(tf);
            let start = traj.scale_factor(0.0).unwrap();
            assert_eq!((start.b, start.d1, start.d2), (1.0, 0.0, 0.0));
            let end = traj.scale_factor(tf).unwrap();
            assert!((end.b - traj.spec.chi).abs() < 1e-12 * traj.spec.chi);
            assert!(end.d1.abs() < 1e-12 && end.d2.abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_hits_endpoints() {
        let traj = reference(1.0);
        let rows = traj.sample(11);
        assert_eq!(rows.len(), 11);
        assert_eq!(rows[0].t, 0.0);
        assert_eq!(rows[10].t, 1.0);
        assert_relative_eq!(rows[5].b, (traj.spec.chi + 1.0) / 2.0, max_relative = 1e-15);
    }

    proptest! {
        #[test]
        fn scale_factor_never_below_one(chi in 1.0f64..100.0, s in 0.0f64..=1.0) {
            prop_assert!(b_polynomial(s, chi).unwrap().b >= 1.0);
        }

        #[test]
        fn eta_enters_affinely(
            w0 in 2.0f64..1e4, eta1 in 1.0f64..1e3, eta2 in 1e3f64..1e7, frac in 0.0f64..=1.0,
        ) {
            // Same b-trajectory, two couplings: 1 + η f is unchanged.
            let spec = TrajectorySpec::new(w0, 1.0, 0.8).unwrap();
            let a = ControlTrajectory::new(spec, eta1).unwrap();
            let b = ControlTrajectory::new(spec, eta2).unwrap();
            let t = frac * 0.8;
            let wa = a.effective_frequency_sq(t).unwrap();
            let wb = b.effective_frequency_sq(t).unwrap();
            prop_assert!((wa - wb).abs() <= 1e-10 * wa.abs().max(1.0));
        }
    }
}
