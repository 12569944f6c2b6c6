use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use tdcss::hamiltonian::{
    AlgebraicCoefficients, AlgebraicSchedule, CoefficientSchedule, ComplexFunction, PhysicalSchedule, TimeFunction,
    UnitContext,
};
use tdcss::motion::{evolve, from_initial_width, InitialConditions, IntegratorSettings, MotionFrame};
use tdcss::observables::{
    default_grid, deviations, fock_wavefunctions, hamilton_residual, means, mean_energy, psi_at, records,
    uncertainty, uniform_grid, wavefunction,
};
use tdcss::states::fock_coefficients;

fn frame(r: f64, a: f64, b: f64, varphi: C64) -> MotionFrame {
    MotionFrame::new(0.0, C64::from_polar(r.cosh(), a), C64::from_polar(r.sinh(), b), varphi)
}

fn arb_units() -> impl Strategy<Value = UnitContext> {
    (0.3f64..3.0, 0.3f64..3.0).prop_map(|(h, l)| UnitContext::new(h, l).unwrap())
}

fn arb_frame(max_r: f64) -> impl Strategy<Value = MotionFrame> {
    (0.0..max_r, -3.1f64..3.1, -3.1f64..3.1, -1.5f64..1.5, -1.5f64..1.5)
        .prop_map(|(r, a, b, x, y)| frame(r, a, b, C64::new(x, y)))
}

/// Trapezoid rule on a uniform grid.
fn trapz(x: &[f64], y: &[f64]) -> f64 {
    let h = x[1] - x[0];
    h * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[y.len() - 1]))
}

/// `⟨H⟩/ħ` from the Fock coefficients, using `a|n⟩ = √n |n−1⟩`.
fn fock_energy(c: &[C64], alg: &AlgebraicCoefficients) -> f64 {
    let at = |n: usize| c.get(n).copied().unwrap_or_default();
    let (mut a, mut a2, mut n_op) = (C64::default(), C64::default(), 0.0);
    for n in 1..c.len() {
        let s = (n as f64).sqrt();
        a += at(n - 1).conj() * s * at(n);
        n_op += n as f64 * at(n).norm_sqr();
        if n >= 2 {
            a2 += at(n - 2).conj() * (s * ((n - 1) as f64).sqrt()) * at(n);
        }
    }
    // ⟨a†²⟩ = ⟨a²⟩*, ⟨a†⟩ = ⟨a⟩*
    (0.5 * (alg.alpha.conj() * a2 + alg.alpha * a2.conj()) + alg.gamma.conj() * a + alg.gamma * a.conj()).re
        + alg.beta * n_op
        + alg.delta
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn heisenberg_identity_and_bound(fr in arb_frame(1.5), units in arb_units()) {
        let (sx, sp, _) = deviations(&fr, &units);
        let (heis, sr) = uncertainty(&fr, &units);
        let h = units.hbar();
        let rhs = 0.5 * h * (1.0 + 4.0 * (fr.f * fr.g.conj()).im.powi(2)).sqrt();
        prop_assert!((sx * sp - rhs).abs() < 1e-12 * rhs.max(1.0));
        prop_assert!(heis >= 0.5 * h - 1e-12);
        prop_assert!(sr >= 0.25 * h * h - 1e-12);
    }

    #[test]
    fn density_moments_match_means(fr in arb_frame(1.2), units in arb_units()) {
        let grid = default_grid(&fr, &units);
        let w = wavefunction(&fr, &grid, &units).unwrap();
        prop_assert!((trapz(&w.x, &w.rho) - 1.0).abs() < 1e-8);
        let (mean, var) = w.moments();
        let (xbar, _) = means(&fr, &units);
        let (sx, _, _) = deviations(&fr, &units);
        prop_assert!((mean - xbar).abs() < 1e-6 * sx.max(1.0));
        prop_assert!((var - sx * sx).abs() < 1e-6 * (sx * sx).max(1.0));
        for (psi, rho) in w.psi.iter().zip(&w.rho) {
            prop_assert!((psi.norm_sqr() - rho).abs() <= 1e-12 * rho.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn gaussian_matches_fock_series(fr in arb_frame(1.0986), phase in -3.0f64..3.0, units in arb_units()) {
        // |ζ| = tanh r ≤ 0.8; the Gaussian form carries ϑ, the series carries ϕ
        let fr = MotionFrame { phase_phi: phase, phase_vartheta: -units.hbar() * phase, ..fr };
        let c = fock_coefficients(&fr, 1e-22, 4096).unwrap().coefficients;
        let (xbar, _) = means(&fr, &units);
        let (sx, _, _) = deviations(&fr, &units);
        for x in uniform_grid(xbar - 5.0 * sx, xbar + 5.0 * sx, 41) {
            let basis = fock_wavefunctions(c.len() - 1, x, &units);
            let series: C64 = c.iter().zip(&basis).map(|(cn, bn)| cn * bn).sum();
            let gauss = psi_at(&fr, x, &units);
            prop_assert!((series - gauss).norm() < 1e-8 / units.l().sqrt(), "x={} {} vs {}", x, series, gauss);
        }
    }

    #[test]
    fn mean_energy_matches_fock_matrix(
        fr in arb_frame(0.3),
        ar in -2.0f64..2.0, ai in -2.0f64..2.0, beta in -2.0f64..2.0,
        gr in -2.0f64..2.0, gi in -2.0f64..2.0, delta in -1.0f64..1.0,
    ) {
        let fr = MotionFrame { varphi: fr.varphi * 0.5, ..fr };
        let alg = AlgebraicCoefficients { alpha: C64::new(ar, ai), beta, gamma: C64::new(gr, gi), delta };
        let units = UnitContext::new(0.7, 1.3).unwrap();
        let mut c = fock_coefficients(&fr, 1e-20, 4096).unwrap().coefficients;
        c.resize(64, C64::default());
        let oracle = units.hbar() * fock_energy(&c, &alg);
        prop_assert!((mean_energy(&fr, &alg, &units) - oracle).abs() < 1e-8);
    }

    #[test]
    fn minimal_uncertainty_is_preserved(
        sigma in 0.1f64..0.7, theta in -3.0f64..3.0,
        k1 in -2.0f64..2.0, w in 0.5f64..4.0, om in -0.5f64..0.5, force in -1.0f64..1.0,
    ) {
        let units = UnitContext::default();
        let init = from_initial_width(sigma, theta, &units).unwrap().with_varphi(C64::new(0.4, -0.2));
        let mut sched = PhysicalSchedule::oscillator(1.0, TimeFunction::Harmonic { c0: 1.5, c1: k1, omega: w });
        sched.omega = TimeFunction::Constant(om);
        sched.force = TimeFunction::Constant(force);
        let sched = CoefficientSchedule::physical(sched, units);
        let grid = uniform_grid(0.0, 3.0, 31);
        let frames = evolve(&sched, &init, &grid, &IntegratorSettings::default()).unwrap();
        for r in records(&frames, &sched).unwrap() {
            prop_assert!((r.sr_invariant - 0.25).abs() < 1e-8 * 0.25);
        }
    }
}

#[test]
fn fock_states_are_orthonormal() {
    let units = UnitContext::new(1.0, 0.8).unwrap();
    let x = uniform_grid(-12.0, 12.0, 4001);
    let basis: Vec<Vec<f64>> = x.iter().map(|&xi| fock_wavefunctions(12, xi, &units)).collect();
    for m in 0..=12 {
        for n in 0..=12 {
            let y: Vec<f64> = basis.iter().map(|b| b[m] * b[n]).collect();
            let expect = if m == n { 1.0 } else { 0.0 };
            assert!((trapz(&x, &y) - expect).abs() < 1e-8, "m={m} n={n}");
        }
    }
}

#[test]
fn fock_ground_state_value() {
    let b = fock_wavefunctions(1, 0.0, &UnitContext::default());
    assert!((b[0] - PI.powf(-0.25)).abs() < 1e-15);
    assert_eq!(b[1], 0.0);
}

#[test]
fn vacuum_density_is_ground_state() {
    let units = UnitContext::new(1.0, 1.7).unwrap();
    let fr = InitialConditions::VACUUM.frame();
    let x = uniform_grid(-10.0, 10.0, 2001);
    let w = wavefunction(&fr, &x, &units).unwrap();
    let (mean, var) = w.moments();
    assert!(mean.abs() < 1e-12);
    assert!((var.sqrt() - 1.7 / 2f64.sqrt()).abs() < 1e-8);
    for (xi, psi) in x.iter().zip(&w.psi) {
        let g = fock_wavefunctions(0, *xi, &units)[0];
        assert!((psi - g).norm() < 1e-14);
    }
}

#[test]
fn wavefunction_rejects_non_finite_positions() {
    let fr = InitialConditions::VACUUM.frame();
    assert!(wavefunction(&fr, &[0.0, f64::NAN], &UnitContext::default()).is_err());
}

fn oscillator() -> CoefficientSchedule {
    CoefficientSchedule::physical(PhysicalSchedule::oscillator(1.3, 0.8), UnitContext::new(1.0, 0.9).unwrap())
}

fn residual_at(h: f64, init: &InitialConditions) -> (f64, f64) {
    let sched = oscillator();
    let n = (5.0 / h).round() as usize;
    let grid = uniform_grid(0.0, 5.0, n + 1);
    let s = IntegratorSettings {
        rtol: 1e-13,
        atol: 1e-15,
        ..Default::default()
    };
    let frames = evolve(&sched, init, &grid, &s).unwrap();
    hamilton_residual(&records(&frames, &sched).unwrap(), &sched).unwrap()
}

#[test]
fn hamilton_residual_is_second_order() {
    let init = InitialConditions::VACUUM.with_varphi(C64::new(0.7, -1.1));
    let (cx, cp) = residual_at(2e-2, &init);
    let (fx, fp) = residual_at(1e-2, &init);
    assert!(cx / fx >= 3.5 && cp / fp >= 3.5, "{cx}/{fx}, {cp}/{fp}");
    let (x, p) = residual_at(1e-3, &init);
    assert!(x < 1e-5 && p < 1e-5);
}

#[test]
fn undisplaced_trajectory_has_zero_residual() {
    let (x, p) = residual_at(1e-2, &from_initial_width(0.3, 0.4, &UnitContext::new(1.0, 0.9).unwrap()).unwrap());
    assert_eq!((x, p), (0.0, 0.0));
}

#[test]
fn hamilton_residual_needs_three_uniform_samples() {
    let sched = oscillator();
    let s = IntegratorSettings::default();
    let init = InitialConditions::VACUUM;
    let two = records(&evolve(&sched, &init, &[0.0, 1.0], &s).unwrap(), &sched).unwrap();
    assert!(matches!(hamilton_residual(&two, &sched), Err(tdcss::Error::Domain(_))));
    let ragged = records(&evolve(&sched, &init, &[0.0, 1.0, 3.0], &s).unwrap(), &sched).unwrap();
    assert!(matches!(hamilton_residual(&ragged, &sched), Err(tdcss::Error::Domain(_))));
}

#[test]
fn energy_examples() {
    let units = UnitContext::default();
    let ground = AlgebraicCoefficients {
        alpha: C64::default(),
        beta: 2.0,
        gamma: C64::default(),
        delta: 1.0,
    };
    assert!((mean_energy(&InitialConditions::VACUUM.frame(), &ground, &units) - 1.0).abs() < 1e-15);
    let sq = frame(1.0, 0.0, PI, C64::default());
    let beta_only = AlgebraicCoefficients {
        beta: 1.0,
        delta: 0.0,
        ..ground
    };
    assert!((mean_energy(&sq, &beta_only, &units) - 1f64.sinh().powi(2)).abs() < 1e-12);
}

#[test]
fn algebraic_schedule_records_carry_energy() {
    let alg = AlgebraicSchedule {
        alpha: ComplexFunction::new(0.3, 0.0),
        beta: ComplexFunction::real(1.0),
        gamma: ComplexFunction::zero(),
        delta: ComplexFunction::real(0.5),
    };
    let sched = CoefficientSchedule::algebraic(alg, UnitContext::default());
    let frames = evolve(&sched, &InitialConditions::VACUUM, &[0.0, 1.0, 2.0], &IntegratorSettings::default()).unwrap();
    let recs = records(&frames, &sched).unwrap();
    // ⟨H⟩ is conserved for a time-independent Hamiltonian
    for r in &recs {
        assert!((r.mean_energy - recs[0].mean_energy).abs() < 1e-9);
    }
}
