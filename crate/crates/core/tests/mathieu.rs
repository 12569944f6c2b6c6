use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use tdcss::hamiltonian::to_algebraic;
use tdcss::mathieu::{
    frames, fundamental_solutions, mathieu_parameters, phase_trajectory, transition_snapshot, DrivenOscillatorConfig,
    MathieuParameters,
};
use tdcss::motion::{closed_form, evolve, InitialConditions, IntegratorSettings};
use tdcss::observables::uniform_grid;
use tdcss::states::DEFAULT_TAIL_TOLERANCE;

fn params(a: f64, q: f64) -> MathieuParameters {
    MathieuParameters {
        a,
        q,
        nu_hint: a.max(0.0).sqrt(),
    }
}

fn tight() -> IntegratorSettings {
    IntegratorSettings {
        rtol: 1e-12,
        atol: 1e-14,
        ..Default::default()
    }
}

fn unperturbed() -> DrivenOscillatorConfig {
    DrivenOscillatorConfig {
        eta0: 0.0,
        ..DrivenOscillatorConfig::fig1()
    }
}

#[test]
fn parameter_map() {
    let p = mathieu_parameters(&DrivenOscillatorConfig::fig1());
    assert!((p.a - 0.04).abs() < 1e-15 && (p.q - 1.0).abs() < 1e-15);
    assert_eq!(mathieu_parameters(&unperturbed()).q, 0.0);
    let flat = DrivenOscillatorConfig {
        epsilon0: 0.0,
        ..DrivenOscillatorConfig::fig1()
    };
    assert_eq!(mathieu_parameters(&flat).a, 0.0);
}

#[test]
fn free_fundamental_solutions() {
    let tau = uniform_grid(0.0, 20.0, 81);
    let s = fundamental_solutions(&params(0.0, 0.0), &tau, &tight()).unwrap();
    for i in 0..tau.len() {
        assert!((s.yc[i] - 1.0).abs() < 1e-12);
        assert!((s.ys[i] - tau[i]).abs() < 1e-10);
    }
    let a = 0.04f64;
    let s = fundamental_solutions(&params(a, 0.0), &tau, &tight()).unwrap();
    let k = a.sqrt();
    for i in 0..tau.len() {
        assert!((s.yc[i] - (k * tau[i]).cos()).abs() < 1e-10);
        assert!((s.ys[i] - (k * tau[i]).sin() / k).abs() < 1e-10);
    }
}

#[test]
fn small_q_first_order_series() {
    // Yc = cos kτ + q·Y₁ + O(q²), where Y₁'' + k²Y₁ = 2cos2τ cos kτ and Y₁(0) = Y₁'(0) = 0
    let (a, q) = (0.3f64, 1e-3);
    let k = a.sqrt();
    let (d_plus, d_minus) = (-4.0 - 4.0 * k, -4.0 + 4.0 * k);
    let y1 = |t: f64| {
        ((2.0 + k) * t).cos() / d_plus + ((2.0 - k) * t).cos() / d_minus - (1.0 / d_plus + 1.0 / d_minus) * (k * t).cos()
    };
    let tau = uniform_grid(0.0, 10.0, 41);
    let s = fundamental_solutions(&params(a, q), &tau, &tight()).unwrap();
    for (i, &t) in tau.iter().enumerate() {
        let zeroth = (k * t).cos();
        assert!((s.yc[i] - zeroth - q * y1(t)).abs() < 2e-5, "tau={t}");
    }
    // the correction is resolved: the zeroth order alone is visibly worse somewhere
    let worst = tau
        .iter()
        .enumerate()
        .map(|(i, &t)| (s.yc[i] - (k * t).cos()).abs())
        .fold(0.0, f64::max);
    assert!(worst > 1e-4);
}

#[test]
fn fig1_wronskian_and_unitarity() {
    let cfg = DrivenOscillatorConfig::fig1();
    let tau = uniform_grid(0.0, 20.0, 201);
    let s = fundamental_solutions(&mathieu_parameters(&cfg), &tau, &IntegratorSettings::default()).unwrap();
    let w_drift = (0..tau.len()).map(|i| (s.wronskian(i) - 1.0).abs()).fold(0.0, f64::max);
    assert!(w_drift < 1e-9, "{w_drift}");
    let fr = frames(&cfg, &tau, &IntegratorSettings::default()).unwrap();
    let u_drift = fr.iter().map(|f| (f.invariant() - 1.0).abs()).fold(0.0, f64::max);
    assert!(u_drift < 1e-8, "{u_drift}");
}

#[test]
fn q_zero_matches_closed_form() {
    let cfg = unperturbed();
    let units = cfg.units().unwrap();
    let alg = to_algebraic(&cfg.to_schedule().unwrap().physical_at(0.0).unwrap(), &units).unwrap();
    let r = 1.2f64;
    let init = InitialConditions::new(
        C64::from_polar(r.cosh(), 0.3),
        C64::from_polar(r.sinh(), -0.8),
        C64::new(0.5, 0.2),
    )
    .unwrap();
    let cfg = DrivenOscillatorConfig { init, ..cfg };
    let tau = uniform_grid(0.0, 20.0, 41);
    for fr in frames(&cfg, &tau, &tight()).unwrap() {
        let cf = closed_form(&alg, &init, fr.t, &units).unwrap();
        assert!((fr.f - cf.f).norm() < 1e-8, "t={}", fr.t);
        assert!((fr.g - cf.g).norm() < 1e-8);
        assert!((fr.varphi - cf.varphi).norm() < 1e-8);
        assert!((fr.arg_f - cf.arg_f).abs() < 1e-8);
    }
}

#[test]
fn q_zero_orbit_closes() {
    let cfg = unperturbed();
    let omega_eps = (cfg.epsilon0 / cfg.m0).sqrt();
    let tau_period = cfg.tau_of_t(2.0 * PI / omega_eps);
    let traj = phase_trajectory(&cfg, &[0.0, 0.5 * tau_period, tau_period], &tight()).unwrap();
    let (start, half, end) = (traj[0], traj[1], traj[2]);
    assert!((end.1 - start.1).abs() < 1e-6 && (end.2 - start.2).abs() < 1e-6);
    // and the orbit is not trivially a point
    assert!((half.2 + start.2).abs() < 1e-6);
}

#[test]
fn fig1_initial_phase_point() {
    let traj = phase_trajectory(&DrivenOscillatorConfig::fig1(), &[0.0], &tight()).unwrap();
    assert_eq!(traj[0].1, 0.0);
    assert!((traj[0].2 - 20f64.sqrt()).abs() < 1e-14);
}

#[test]
fn undisplaced_trajectory_stays_at_origin() {
    let cfg = DrivenOscillatorConfig {
        init: InitialConditions::VACUUM,
        ..DrivenOscillatorConfig::fig1()
    };
    for (_, x, p) in phase_trajectory(&cfg, &uniform_grid(0.0, 20.0, 11), &tight()).unwrap() {
        assert_eq!((x, p), (0.0, 0.0));
    }
}

#[test]
fn pipelines_agree_on_fig1() {
    // tolerances of configs/fig1.toml
    let cfg = DrivenOscillatorConfig::fig1();
    let tau = uniform_grid(0.0, 20.0, 101);
    let t: Vec<f64> = tau.iter().map(|&x| cfg.t_of_tau(x)).collect();
    let a = frames(&cfg, &tau, &tight()).unwrap();
    let b = evolve(&cfg.to_schedule().unwrap(), &cfg.init, &t, &tight()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x.f - y.f).norm() < 1e-7, "t={}", x.t);
        assert!((x.g - y.g).norm() < 1e-7);
        assert!((x.varphi - y.varphi).norm() < 1e-7);
        assert!((x.arg_f - y.arg_f).abs() < 1e-7);
        assert!((x.phase_phi - y.phase_phi).abs() < 1e-7);
        assert!((x.phase_vartheta - y.phase_vartheta).abs() < 1e-7);
    }
}

#[test]
fn snapshot_at_start_is_poisson() {
    let p = transition_snapshot(
        &DrivenOscillatorConfig::fig1(),
        0.0,
        DEFAULT_TAIL_TOLERANCE,
        4096,
        &tight(),
    )
    .unwrap();
    let mut poisson = (-1f64).exp();
    for (n, pn) in p.iter().enumerate() {
        assert!((pn - poisson).abs() < 1e-12);
        poisson /= (n + 1) as f64;
    }
}

#[test]
fn tau_grid_must_start_at_zero() {
    assert!(matches!(
        frames(&DrivenOscillatorConfig::fig1(), &[1.0, 2.0], &tight()),
        Err(tdcss::Error::Domain(_))
    ));
}

#[test]
fn invalid_config_is_rejected() {
    let bad = DrivenOscillatorConfig::new(0.0, 1.0, 50.0, 10.0, 1.0, InitialConditions::VACUUM);
    assert!(matches!(bad, Err(tdcss::Error::Domain(_))));
}
