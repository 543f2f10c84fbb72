use lr_cooling::gaussian_dynamics::transfer::transfer_matrices;
use lr_cooling::gaussian_dynamics::{
    invariant_expectation, propagate_transfer, solve_ermakov_forward, thermal_state, GaussianState, Simulator,
    DEFAULT_TOLERANCE,
};
use lr_cooling::integrate::EmbeddedRk;
use lr_cooling::invariant_design::{uniform_times, validate_trajectory, TrajectorySpec};
use lr_cooling::robustness::perturb_trajectory;
use lr_cooling::thermometry::occupation_from_state;
use lr_cooling::{ControlTrajectory, PhysicalParams};
use proptest::prelude::*;

const T_FINALS: [f64; 3] = [0.5, 1.0, 2.0];

fn reference_start(t_final: f64) -> (PhysicalParams, ControlTrajectory, GaussianState) {
    let params = PhysicalParams::reference();
    let traj = ControlTrajectory::design(&params, t_final).unwrap();
    let state = thermal_state(&params, traj.spec.omega0_sq, params.bath_temperature()).unwrap();
    (params, traj, state)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn occupation_survives_the_ramp() {
    for tf in T_FINALS {
        let (_, traj, state0) = reference_start(tf);
        let (end, m) = propagate_transfer(&traj, &state0, 0.0, tf, DEFAULT_TOLERANCE).unwrap();
        let n_initial = occupation_from_state(&state0, traj.spec.omega0_sq).unwrap();
        let n_final = occupation_from_state(&end, 1.0).unwrap();
        assert!(
            (n_final - n_initial).abs() < 1e-3,
            "t_f = {tf}: {n_initial} -> {n_final}"
        );
        assert!((n_final - 0.472).abs() < 0.01);
        assert!((m.det() - 1.0).abs() < 1e-9, "det = {}", m.det());
    }
}

#[test]
fn occupation_is_constant_against_instantaneous_frequency() {
    let (_, traj, state0) = reference_start(1.0);
    let times = uniform_times(1.0, 101);
    let states = Simulator::transfer(DEFAULT_TOLERANCE)
        .run(&traj, &state0, &times)
        .unwrap();
    let n0 = occupation_from_state(&state0, traj.spec.omega0_sq).unwrap();
    for s in &states {
        let w2 = traj.effective_frequency_sq(s.time).unwrap();
        let n = occupation_from_state(s, w2).unwrap();
        // Mid-ramp the state is squeezed relative to H(t), so the occupation
        // against ω_eff(t) only bounds n0 from above; it is exact at the ends.
        assert!(n >= n0 - 1e-7 && n.is_finite(), "t = {}: {n} < {n0}", s.time);
    }
    let last = states.last().unwrap();
    assert!((occupation_from_state(last, 1.0).unwrap() - n0).abs() < 1e-6);
}

#[test]
fn propagators_agree_on_default_ramps() {
    for tf in T_FINALS {
        let (_, traj, state0) = reference_start(tf);
        let times = uniform_times(tf, 21);
        let a = Simulator::transfer(DEFAULT_TOLERANCE)
            .run(&traj, &state0, &times)
            .unwrap();
        let b = Simulator::covariance(DEFAULT_TOLERANCE)
            .run(&traj, &state0, &times)
            .unwrap();
        for (x, y) in a.iter().zip(&b) {
            let scale = (x.xx * x.pp).sqrt();
            assert!(
                rel(y.xx, x.xx) < 1e-6,
                "t_f = {tf}, t = {}: xx {} vs {}",
                x.time,
                x.xx,
                y.xx
            );
            assert!(
                rel(y.pp, x.pp) < 1e-6,
                "t_f = {tf}, t = {}: pp {} vs {}",
                x.time,
                x.pp,
                y.pp
            );
            assert!(
                (y.xp - x.xp).abs() / scale < 1e-6,
                "t_f = {tf}: xp {} vs {}",
                x.xp,
                y.xp
            );
        }
    }
}

#[test]
fn purity_is_conserved_by_both_propagators() {
    for tf in T_FINALS {
        let (_, traj, state0) = reference_start(tf);
        let p0 = state0.purity();
        let times = uniform_times(tf, 201);
        for sim in [
            Simulator::transfer(DEFAULT_TOLERANCE),
            Simulator::covariance(DEFAULT_TOLERANCE),
        ] {
            for s in sim.run(&traj, &state0, &times).unwrap() {
                assert!(
                    rel(s.purity(), p0) < 1e-8,
                    "{:?} t_f = {tf}, t = {}: {}",
                    sim,
                    s.time,
                    rel(s.purity(), p0)
                );
            }
        }
    }
}

#[test]
fn lewis_riesenfeld_invariant_is_constant() {
    for tf in T_FINALS {
        let (_, traj, state0) = reference_start(tf);
        let w0 = traj.spec.omega0_sq;
        let times = uniform_times(tf, 201);
        let i0 = invariant_expectation(&state0, &traj.scale_factor(0.0).unwrap(), w0);
        for s in Simulator::transfer(DEFAULT_TOLERANCE)
            .run(&traj, &state0, &times)
            .unwrap()
        {
            let sf = traj.scale_factor(s.time).unwrap();
            let i = invariant_expectation(&s, &sf, w0);
            assert!(rel(i, i0) < 1e-6, "t_f = {tf}, t = {}: {i} vs {i0}", s.time);
        }
    }
}

#[test]
fn transfer_matrices_compose() {
    let (_, traj, _) = reference_start(1.0);
    let rk = EmbeddedRk::rkf78();
    for (t0, t1, t2) in [(0.0, 0.3, 1.0), (0.1, 0.55, 0.9), (0.0, 0.999, 1.0)] {
        let m01 = transfer_matrices(&rk, &traj, t0, &[t1], 1e-12).unwrap()[0];
        let m12 = transfer_matrices(&rk, &traj, t1, &[t2], 1e-12).unwrap()[0];
        let m02 = transfer_matrices(&rk, &traj, t0, &[t2], 1e-12).unwrap()[0];
        let composed = m12.compose(&m01);
        let err = composed.max_abs_diff(&m02) / m02.max_abs();
        assert!(err < 1e-8, "({t0}, {t1}, {t2}): {err}");
    }
}

#[test]
fn forward_ermakov_recovers_the_quintic() {
    for tf in T_FINALS {
        let (_, traj, _) = reference_start(tf);
        let times = uniform_times(tf, 401);
        let samples = solve_ermakov_forward(&traj, 1.0, 0.0, traj.spec.omega0_sq, 0.0, &times, 1e-12).unwrap();
        for s in &samples {
            let designed = traj.scale_factor(s.t).unwrap();
            assert!(
                rel(s.b, designed.b) < 1e-6,
                "t_f = {tf}, t = {}: {} vs {}",
                s.t,
                s.b,
                designed.b
            );
        }
        let end = samples.last().unwrap();
        assert!(rel(end.b, traj.spec.chi) < 1e-6);
    }
}

#[test]
fn perturbed_ramp_misses_the_boundary() {
    let (_, traj, _) = reference_start(1.0);
    let bumped = perturb_trajectory(&traj, 0.1);
    let w_init = bumped.effective_frequency_sq(0.0).unwrap();
    let end = solve_ermakov_forward(&bumped, 1.0, 0.0, w_init, 0.0, &[1.0], 1e-12).unwrap()[0];
    assert!(rel(end.b, traj.spec.chi) > 1e-3, "b(t_f) = {}", end.b);
}

#[test]
fn imaginary_frequency_windows_are_integrated() {
    // η = 15, t_f = 0.5 dips to ω² ≈ −9.6; the invariant still holds exactly.
    let spec = TrajectorySpec::from_eta(15.0, 0.5).unwrap();
    let traj = ControlTrajectory::new(spec, 15.0).unwrap();
    assert!(!validate_trajectory(&traj, 201).negative_windows.is_empty());
    let state0 = GaussianState::thermal(16.0, 1.3, 0.0);
    let times = uniform_times(0.5, 11);
    let a = Simulator::transfer(1e-11).run(&traj, &state0, &times).unwrap();
    let b = Simulator::covariance(1e-11).run(&traj, &state0, &times).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!(rel(y.xx, x.xx) < 1e-6 && rel(y.pp, x.pp) < 1e-6);
        assert!(rel(x.purity(), state0.purity()) < 1e-8);
    }
    let end = a.last().unwrap();
    assert!((occupation_from_state(end, 1.0).unwrap() - 1.3).abs() < 1e-6);
}

// Random ramps: moderate coupling, short durations, arbitrary end frequency.
fn arb_trajectory() -> impl Strategy<Value = ControlTrajectory> {
    (2.0f64..400.0, 0.3f64..3.0, 0.2f64..1.5, 1.0f64..50.0)
        .prop_map(|(w0, wf, tf, eta)| ControlTrajectory::new(TrajectorySpec::new(w0, wf, tf).unwrap(), eta).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_ramps_agree_and_conserve(traj in arb_trajectory(), eps in -0.2f64..0.2, n in 0.0f64..5.0) {
        let traj = perturb_trajectory(&traj, eps);
        let tf = traj.t_final();
        let w_start = traj.effective_frequency_sq(0.0).unwrap();
        prop_assume!(w_start > 0.0);
        let state0 = GaussianState::thermal(w_start, n, 0.0);
        let times = uniform_times(tf, 6);
        let a = Simulator::transfer(1e-11).run(&traj, &state0, &times).unwrap();
        let b = Simulator::covariance(1e-11).run(&traj, &state0, &times).unwrap();
        for (x, y) in a.iter().zip(&b) {
            let scale = (x.xx * x.pp).sqrt();
            prop_assert!(rel(y.xx, x.xx) < 1e-6, "xx {} vs {}", x.xx, y.xx);
            prop_assert!(rel(y.pp, x.pp) < 1e-6, "pp {} vs {}", x.pp, y.pp);
            prop_assert!((y.xp - x.xp).abs() / scale < 1e-6);
            prop_assert!(rel(x.purity(), state0.purity()) < 1e-8);
            prop_assert!(rel(y.purity(), state0.purity()) < 1e-8);
        }
    }

    #[test]
    fn transfer_determinant_is_one(traj in arb_trajectory(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let tf = traj.t_final();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assume!(hi - lo > 1e-3);
        let m = transfer_matrices(&EmbeddedRk::rkf78(), &traj, lo * tf, &[hi * tf], 1e-10).unwrap()[0];
        prop_assert!((m.det() - 1.0).abs() < 1e-9, "det = {}", m.det());
    }
}
