//! The parametrically driven oscillator `p²/2m₀ + (ε₀ − η₀ cos ω₀t) x²/2`.
//!
//! With `τ = ω₀t/2` and `l² = ħ/(m₀ω₀)`, `Y = f − g` obeys the Mathieu
//! equation `Y'' + (a − 2q cos 2τ) Y = 0` and `f + g = −(i/2) Y'`. Frames are
//! assembled from the fundamental solutions `Yc`, `Ys` (unit initial data),
//! independently of the generic integrator in [`crate::motion`].

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{CoefficientSchedule, PhysicalSchedule, TimeFunction, UnitContext};
use crate::motion::{wrap_angle, InitialConditions, IntegratorSettings, MotionFrame};
use crate::observables::means;
use crate::ode::integrate;
use crate::states::{photon_statistics, transition_probabilities, PhotonStatistics};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrivenOscillatorConfig {
    pub m0: f64,
    pub epsilon0: f64,
    pub eta0: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub init: InitialConditions,
}

impl DrivenOscillatorConfig {
    pub fn new(m0: f64, epsilon0: f64, eta0: f64, omega0: f64, hbar: f64, init: InitialConditions) -> Result<Self> {
        let cfg = Self {
            m0,
            epsilon0,
            eta0,
            omega0,
            hbar,
            init,
        };
        cfg.check()?;
        Ok(cfg)
    }

    /// `ħ = m₀ = ε₀ = 1`, `ω₀ = 10`, `η₀ = 50`, starting from the coherent
    /// state `f₀ = 1`, `g₀ = 0`, `φ₀ = −i`.
    pub fn fig1() -> Self {
        Self {
            m0: 1.0,
            epsilon0: 1.0,
            eta0: 50.0,
            omega0: 10.0,
            hbar: 1.0,
            init: InitialConditions::VACUUM.with_varphi(C64::new(0.0, -1.0)),
        }
    }

    fn check(&self) -> Result<()> {
        let finite = [self.m0, self.epsilon0, self.eta0, self.omega0, self.hbar]
            .iter()
            .all(|v| v.is_finite());
        if !finite || !(self.m0 > 0.0) || !(self.omega0 > 0.0) || !(self.hbar > 0.0) {
            return Err(Error::Domain(
                "driven oscillator needs finite parameters with m0 > 0, omega0 > 0, hbar > 0".into(),
            ));
        }
        Ok(())
    }

    /// `l = √(ħ/(m₀ω₀))`.
    pub fn l(&self) -> f64 {
        (self.hbar / (self.m0 * self.omega0)).sqrt()
    }

    pub fn units(&self) -> Result<UnitContext> {
        self.check()?;
        UnitContext::new(self.hbar, self.l())
    }

    pub fn t_of_tau(&self, tau: f64) -> f64 {
        2.0 * tau / self.omega0
    }

    pub fn tau_of_t(&self, t: f64) -> f64 {
        0.5 * self.omega0 * t
    }

    /// The same Hamiltonian as a physical schedule, `k(t) = ε₀ − η₀ cos ω₀t`.
    pub fn to_schedule(&self) -> Result<CoefficientSchedule> {
        let stiffness = TimeFunction::Harmonic {
            c0: self.epsilon0,
            c1: -self.eta0,
            omega: self.omega0,
        };
        Ok(CoefficientSchedule::physical(
            PhysicalSchedule::oscillator(self.m0, stiffness),
            self.units()?,
        ))
    }
}

/// `a = 4ε₀/(m₀ω₀²)`, `q = 2η₀/(m₀ω₀²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuParameters {
    pub a: f64,
    pub q: f64,
    /// `√a`, the characteristic exponent of the undriven limit.
    pub nu_hint: f64,
}

pub fn mathieu_parameters(cfg: &DrivenOscillatorConfig) -> MathieuParameters {
    let scale = cfg.m0 * cfg.omega0 * cfg.omega0;
    let a = 4.0 * cfg.epsilon0 / scale;
    MathieuParameters {
        a,
        q: 2.0 * cfg.eta0 / scale,
        nu_hint: a.max(0.0).sqrt(),
    }
}

/// `Yc`, `Ys` and their derivatives sampled on a τ grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSolutions {
    pub tau: Vec<f64>,
    pub yc: Vec<f64>,
    pub dyc: Vec<f64>,
    pub ys: Vec<f64>,
    pub dys: Vec<f64>,
}

impl FundamentalSolutions {
    pub fn wronskian(&self, i: usize) -> f64 {
        self.yc[i] * self.dys[i] - self.dyc[i] * self.ys[i]
    }
}

fn check_tau_grid(tau_grid: &[f64]) -> Result<()> {
    match tau_grid.first() {
        Some(&t0) if t0 != 0.0 => Err(Error::Domain(format!("tau grid must start at 0, got {t0}"))),
        _ if tau_grid.iter().any(|t| !t.is_finite()) => Err(Error::Domain("tau grid must be finite".into())),
        _ => Ok(()),
    }
}

/// Integrates `(Yc, Yc', Ys, Ys')`; Wronskian drift is held to the drift
/// threshold with one retry at tighter tolerance.
fn solve(params: &MathieuParameters, grid: &[f64], settings: &IntegratorSettings) -> Result<Vec<[f64; 4]>> {
    let attempt = |s: &IntegratorSettings| -> Result<std::result::Result<Vec<[f64; 4]>, (f64, f64)>> {
        let ctl = s.step_control()?;
        let (a, q) = (params.a, params.q);
        let rhs = |tau: f64, y: &[f64; 4], dy: &mut [f64; 4]| -> Result<()> {
            let w = a - 2.0 * q * (2.0 * tau).cos();
            *dy = [y[1], -w * y[0], y[3], -w * y[2]];
            Ok(())
        };
        let mut breach = None;
        let observe = |tau: f64, y: &[f64; 4]| -> Result<()> {
            let drift = (y[0] * y[3] - y[1] * y[2] - 1.0).abs();
            if drift > s.drift_threshold {
                breach = Some((tau, drift));
                return Err(Error::Numerical {
                    t: tau,
                    reason: "wronskian drift".into(),
                });
            }
            Ok(())
        };
        match integrate(rhs, 0.0, [1.0, 0.0, 0.0, 1.0], grid, &ctl, observe) {
            Ok(v) => Ok(Ok(v)),
            Err(e) => breach.map(Err).ok_or(e),
        }
    };
    match attempt(settings)? {
        Ok(v) => Ok(v),
        Err(_) => match attempt(&settings.tightened())? {
            Ok(v) => Ok(v),
            Err((tau, drift)) => Err(Error::Numerical {
                t: tau,
                reason: format!(
                    "Wronskian drifted by {drift:e}, above threshold {:e} (tau = {tau})",
                    settings.drift_threshold
                ),
            }),
        },
    }
}

pub fn fundamental_solutions(
    params: &MathieuParameters,
    tau_grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<FundamentalSolutions> {
    check_tau_grid(tau_grid)?;
    let states = solve(params, tau_grid, settings)?;
    Ok(FundamentalSolutions {
        tau: tau_grid.to_vec(),
        yc: states.iter().map(|s| s[0]).collect(),
        dyc: states.iter().map(|s| s[1]).collect(),
        ys: states.iter().map(|s| s[2]).collect(),
        dys: states.iter().map(|s| s[3]).collect(),
    })
}

/// Upper bound on `|d arg f / dτ|`, from `|d arg f/dt| ≤ |β| + |α|`.
fn arg_rate_bound(cfg: &DrivenOscillatorConfig) -> f64 {
    let s_max = (cfg.epsilon0.abs() + cfg.eta0.abs()) / (2.0 * cfg.m0 * cfg.omega0);
    let w = 0.5 * cfg.omega0;
    2.0 * (s_max + w) * 2.0 / cfg.omega0
}

/// Motion frames at physical times `2τ/ω₀`.
///
/// `f` is sampled densely enough between grid points (steps of at most half
/// a radian in `arg f`) to carry its argument continuously.
pub fn frames(cfg: &DrivenOscillatorConfig, tau_grid: &[f64], settings: &IntegratorSettings) -> Result<Vec<MotionFrame>> {
    cfg.check()?;
    check_tau_grid(tau_grid)?;
    if tau_grid.is_empty() {
        return Ok(Vec::new());
    }
    let max_gap = 0.5 / arg_rate_bound(cfg);
    let mut dense = vec![0.0];
    let mut picks = vec![0];
    for w in tau_grid.windows(2) {
        let gap = w[1] - w[0];
        let pieces = ((gap.abs() / max_gap).ceil() as usize).max(1);
        for k in 1..=pieces {
            dense.push(if k == pieces {
                w[1]
            } else {
                w[0] + gap * k as f64 / pieces as f64
            });
        }
        picks.push(dense.len() - 1);
    }
    let states = solve(&mathieu_parameters(cfg), &dense, settings)?;

    let (f0, g0, varphi0) = (cfg.init.f0(), cfg.init.g0(), cfg.init.varphi0());
    let y0 = f0 - g0;
    let dy0 = C64::new(0.0, 2.0) * (f0 + g0);
    let mut arg = f0.arg();
    let mut last = f0;
    let mut all = Vec::with_capacity(dense.len());
    for (tau, s) in dense.iter().zip(&states) {
        let y = y0 * s[0] + dy0 * s[2];
        let dy = y0 * s[1] + dy0 * s[3];
        let x = C64::new(0.0, -0.5) * dy;
        let f = 0.5 * (x + y);
        let g = 0.5 * (x - y);
        arg += wrap_angle(f.arg() - last.arg());
        last = f;
        all.push(MotionFrame {
            t: cfg.t_of_tau(*tau),
            f,
            g,
            varphi: varphi0,
            phase_phi: 0.0,
            phase_vartheta: 0.0,
            arg_f: arg,
        });
    }
    Ok(picks.into_iter().map(|i| all[i]).collect())
}

/// `(t, x̄, p̄)` along the trajectory.
pub fn phase_trajectory(
    cfg: &DrivenOscillatorConfig,
    tau_grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<Vec<(f64, f64, f64)>> {
    let units = cfg.units()?;
    Ok(frames(cfg, tau_grid, settings)?
        .iter()
        .map(|fr| {
            let (x, p) = means(fr, &units);
            (fr.t, x, p)
        })
        .collect())
}

pub fn frame_at(cfg: &DrivenOscillatorConfig, tau: f64, settings: &IntegratorSettings) -> Result<MotionFrame> {
    let grid = if tau == 0.0 { vec![0.0] } else { vec![0.0, tau] };
    Ok(*frames(cfg, &grid, settings)?.last().expect("grid is non-empty"))
}

/// `Pₙ` of the state at `τ`.
pub fn transition_snapshot(
    cfg: &DrivenOscillatorConfig,
    tau: f64,
    tail_tolerance: f64,
    n_max: usize,
    settings: &IntegratorSettings,
) -> Result<Vec<f64>> {
    transition_probabilities(&frame_at(cfg, tau, settings)?, tail_tolerance, n_max)
}

/// Streaming counterpart of [`transition_snapshot`] for expansions too long
/// to store.
pub fn snapshot_statistics(
    cfg: &DrivenOscillatorConfig,
    tau: f64,
    tail_tolerance: f64,
    n_max: usize,
    keep: usize,
    settings: &IntegratorSettings,
) -> Result<PhotonStatistics> {
    photon_statistics(&frame_at(cfg, tau, settings)?, tail_tolerance, n_max, keep)
}
