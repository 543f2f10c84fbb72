//! Error-controlled stepper shared by all embedded pairs.

use super::tableau::{Tableau, DOPRI5, RKF78};
use super::{IntegrationError, Integrator, OdeSystem, Solution, Stats, Tolerance};
use crate::registry::Named;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

#[derive(Debug, Clone)]
pub struct EmbeddedRk {
    name: &'static str,
    tableau: &'static Tableau,
    pub max_steps: usize,
}

impl EmbeddedRk {
    pub fn new(name: &'static str, tableau: &'static Tableau) -> Self {
        Self {
            name,
            tableau,
            max_steps: 5_000_000,
        }
    }

    pub fn dopri5() -> Self {
        Self::new("dopri5", &DOPRI5)
    }

    pub fn rkf78() -> Self {
        Self::new("rkf78", &RKF78)
    }
}

impl Named for EmbeddedRk {
    fn name(&self) -> &'static str {
        self.name
    }
}

struct Workspace {
    k: Vec<Vec<f64>>,
    stage: Vec<f64>,
    y_new: Vec<f64>,
    err: Vec<f64>,
}

impl EmbeddedRk {
    // One trial step of size h; fills ws.y_new and returns the scaled RMS
    // error. ws.k[0] must already hold F(t, y).
    #[allow(clippy::needless_range_loop)]
    fn trial(&self, system: &dyn OdeSystem, t: f64, y: &[f64], h: f64, tol: Tolerance, ws: &mut Workspace) -> f64 {
        let tab = self.tableau;
        let n = y.len();
        for i in 1..tab.stages() {
            for j in 0..n {
                let mut acc = 0.0;
                for (m, a) in tab.a[i].iter().enumerate() {
                    if *a != 0.0 {
                        acc += a * ws.k[m][j];
                    }
                }
                ws.stage[j] = y[j] + h * acc;
            }
            system.rhs(t + tab.c[i] * h, &ws.stage, &mut ws.k[i]);
        }
        let mut sum = 0.0;
        for j in 0..n {
            let mut hi = 0.0;
            let mut lo = 0.0;
            for i in 0..tab.stages() {
                hi += tab.b[i] * ws.k[i][j];
                lo += tab.b_hat[i] * ws.k[i][j];
            }
            ws.y_new[j] = y[j] + h * hi;
            ws.err[j] = h * (hi - lo);
            let scale = tol.atol + tol.rtol * y[j].abs().max(ws.y_new[j].abs());
            let e = ws.err[j] / scale;
            sum += e * e;
        }
        (sum / n as f64).sqrt()
    }

    // Hairer-Nørsett-Wanner starting step heuristic.
    fn initial_step(&self, system: &dyn OdeSystem, t: f64, y: &[f64], f0: &[f64], span: f64, tol: Tolerance) -> f64 {
        let n = y.len();
        let scale: Vec<f64> = y.iter().map(|v| tol.atol + tol.rtol * v.abs()).collect();
        let rms =
            |v: &[f64]| -> f64 { (v.iter().zip(&scale).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n as f64).sqrt() };
        let d0 = rms(y);
        let d1 = rms(f0);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let h0 = h0.min(span);
        let y1: Vec<f64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![0.0; n];
        system.rhs(t + h0, &y1, &mut f1);
        let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = rms(&diff) / h0;
        let order = self.tableau.order_hat as f64 + 1.0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / order)
        };
        (100.0 * h0).min(h1).min(span)
    }
}

impl Integrator for EmbeddedRk {
    fn order(&self) -> u32 {
        self.tableau.order
    }

    fn solve(
        &self,
        system: &dyn OdeSystem,
        t0: f64,
        y0: &[f64],
        t_out: &[f64],
        tol: Tolerance,
    ) -> Result<Solution, IntegrationError> {
        let n = system.dim();
        if y0.len() != n {
            return Err(IntegrationError::InvalidRequest(format!(
                "initial state has {} components, system has {n}",
                y0.len()
            )));
        }
        if !(tol.rtol > 0.0) || !(tol.atol >= 0.0) {
            return Err(IntegrationError::InvalidRequest(format!(
                "tolerance must be positive: {tol:?}"
            )));
        }
        let mut prev = t0;
        for &t in t_out {
            if !(t >= prev) || !t.is_finite() {
                return Err(IntegrationError::InvalidRequest(format!(
                    "output times must be finite, non-decreasing and start at or after t0 = {t0}"
                )));
            }
            prev = t;
        }

        let stages = self.tableau.stages();
        let mut ws = Workspace {
            k: vec![vec![0.0; n]; stages],
            stage: vec![0.0; n],
            y_new: vec![0.0; n],
            err: vec![0.0; n],
        };
        let mut stats = Stats::default();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut states = Vec::with_capacity(t_out.len());
        let exponent = 1.0 / (self.tableau.order_hat as f64 + 1.0);

        system.rhs(t, &y, &mut ws.k[0]);
        stats.evaluations += 1;
        let span = t_out.last().map_or(0.0, |&t_end| t_end - t0);
        let mut h = if span > 0.0 {
            self.initial_step(system, t, &y, &ws.k[0], span, tol)
        } else {
            0.0
        };
        stats.evaluations += 1;

        for &target in t_out {
            let mut last_rejected = false;
            while t < target {
                if stats.accepted + stats.rejected >= self.max_steps {
                    return Err(IntegrationError::TooManySteps {
                        time: t,
                        max_steps: self.max_steps,
                    });
                }
                let remaining = target - t;
                let clipped = h >= remaining;
                let h_try = if clipped { remaining } else { h };
                if h_try < 16.0 * f64::EPSILON * t.abs().max(1.0) && !clipped {
                    return Err(IntegrationError::StepSizeUnderflow { time: t, step: h_try });
                }

                let err = self.trial(system, t, &y, h_try, tol, &mut ws);
                stats.evaluations += stages - 1;
                // Overflow inside the trial step counts as a maximal rejection.
                let err = if err.is_finite() { err } else { f64::MAX };

                let fac = if err == 0.0 {
                    FAC_MAX
                } else {
                    (SAFETY * err.powf(-exponent)).clamp(FAC_MIN, FAC_MAX)
                };

                if err <= 1.0 {
                    t = if clipped { target } else { t + h_try };
                    std::mem::swap(&mut y, &mut ws.y_new);
                    if y.iter().any(|v| !v.is_finite()) {
                        return Err(IntegrationError::NonFinite { time: t });
                    }
                    if let Some(reason) = system.check(t, &y) {
                        return Err(IntegrationError::Singular { time: t, reason });
                    }
                    system.rhs(t, &y, &mut ws.k[0]);
                    stats.evaluations += 1;
                    stats.accepted += 1;
                    // A clipped step says nothing about the natural step size.
                    let grown = if last_rejected { fac.min(1.0) } else { fac };
                    if !clipped || h_try * grown > h {
                        h = h_try * grown;
                    }
                    last_rejected = false;
                } else {
                    stats.rejected += 1;
                    h = h_try * fac.min(1.0);
                    last_rejected = true;
                    if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                        return Err(IntegrationError::StepSizeUnderflow { time: t, step: h });
                    }
                }
            }
            states.push(y.clone());
        }

        Ok(Solution {
            times: t_out.to_vec(),
            states,
            stats,
        })
    }
}
