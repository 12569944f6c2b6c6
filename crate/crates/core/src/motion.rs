//! Integrals of motion `A = f a + g a† + φ` of a quadratic Hamiltonian.
//!
//! The coefficients obey
//!
//! ```text
//! i ḟ = α* g − β f,   i ġ = β g − α f,   i φ̇ = γ* g − γ f
//! ```
//!
//! which conserve `|f|² − |g|²`. Alongside `(f, g, φ)` the integrator carries
//! the phase `ϕ = ½∫(β − 2δ)`, the x-representation phase
//! `ϑ = ∫(E + (V p̄ + F x̄)/2)`, and a continuous (unwrapped) argument of `f`
//! that fixes the square-root branch of `f^{-1/2}` along a trajectory.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{validate, AlgebraicCoefficients, CoefficientSchedule, UnitContext};
use crate::ode::{integrate, StepControl};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// State of the integral-of-motion construction at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotionFrame {
    pub t: f64,
    pub f: C64,
    pub g: C64,
    pub varphi: C64,
    /// `ϕ = ½∫₀ᵗ (β − 2δ) dτ`
    pub phase_phi: f64,
    /// `ϑ = ∫₀ᵗ (E + (V p̄ + F x̄)/2) dτ`, in units of action.
    pub phase_vartheta: f64,
    /// Continuous argument of `f`; equals `arg f` modulo 2π.
    pub arg_f: f64,
}

impl MotionFrame {
    /// A frame with zero accumulated phases and the principal argument of `f`.
    pub fn new(t: f64, f: C64, g: C64, varphi: C64) -> Self {
        Self {
            t,
            f,
            g,
            varphi,
            phase_phi: 0.0,
            phase_vartheta: 0.0,
            arg_f: f.arg(),
        }
    }

    /// `|f|² − |g|²`, evaluated without squaring large moduli.
    pub fn invariant(&self) -> f64 {
        let (a, b) = (self.f.norm(), self.g.norm());
        (a - b) * (a + b)
    }

    /// `f^{-1/2}` on the branch selected by `arg_f`.
    pub fn inv_sqrt_f(&self) -> C64 {
        C64::from_polar(self.f.norm().powf(-0.5), -0.5 * self.arg_f)
    }
}

/// Initial data `(f0, g0, φ0)` with `|f0|² − |g0|² = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialConditions {
    f0: C64,
    g0: C64,
    varphi0: C64,
}

impl InitialConditions {
    pub const VACUUM: InitialConditions = InitialConditions {
        f0: C64 { re: 1.0, im: 0.0 },
        g0: C64 { re: 0.0, im: 0.0 },
        varphi0: C64 { re: 0.0, im: 0.0 },
    };

    pub fn new(f0: C64, g0: C64, varphi0: C64) -> Result<Self> {
        let (a, b) = (f0.norm(), g0.norm());
        let inv = (a - b) * (a + b);
        if !((inv - 1.0).abs() <= 1e-12) || !varphi0.is_finite() {
            return Err(Error::Domain(format!(
                "initial data must satisfy |f0|^2 - |g0|^2 = 1 (got {inv})"
            )));
        }
        Ok(Self { f0, g0, varphi0 })
    }

    pub fn with_varphi(self, varphi0: C64) -> Self {
        Self { varphi0, ..self }
    }

    pub fn f0(&self) -> C64 {
        self.f0
    }

    pub fn g0(&self) -> C64 {
        self.g0
    }

    pub fn varphi0(&self) -> C64 {
        self.varphi0
    }

    pub fn frame(&self) -> MotionFrame {
        MotionFrame::new(0.0, self.f0, self.g0, self.varphi0)
    }
}

/// Tolerances for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    /// Largest tolerated change of `|f|² − |g|²` from its initial value.
    pub drift_threshold: f64,
}

impl Default for IntegratorSettings {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            drift_threshold: 1e-8,
        }
    }
}

impl IntegratorSettings {
    pub(crate) fn step_control(&self) -> Result<StepControl> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.drift_threshold > 0.0) {
            return Err(Error::Domain("integrator tolerances must be positive".into()));
        }
        Ok(StepControl {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step,
            ..StepControl::default()
        })
    }

    pub(crate) fn tightened(&self) -> Self {
        Self {
            rtol: (self.rtol * 1e-2).max(1e-15),
            atol: (self.atol * 1e-2).max(1e-300),
            ..*self
        }
    }
}

/// `u = g φ* − f* φ`, the mean of the annihilation operator.
pub fn u_of(frame: &MotionFrame) -> C64 {
    frame.g * frame.varphi.conj() - frame.f.conj() * frame.varphi
}

/// Integrates the motion-integral coefficients over `grid` (which must start
/// at 0) and returns one frame per grid time.
///
/// A breach of the drift threshold triggers one rerun at 100× tighter
/// tolerances before the run is reported as a numerical failure.
pub fn evolve(
    schedule: &CoefficientSchedule,
    init: &InitialConditions,
    grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<Vec<MotionFrame>> {
    evolve_from(schedule, init.f0, init.g0, init.varphi0, grid, settings)
}

/// As [`evolve`], but accepts any initial `(f0, g0, φ0)`. Drift is measured
/// against the initial value of `|f|² − |g|²`, whatever it is.
///
/// The `(f, g, φ)` flow is linear in the initial data, which this entry point
/// exposes directly; the results only describe a physical state when
/// `|f0|² − |g0|² = 1`.
pub fn evolve_from(
    schedule: &CoefficientSchedule,
    f0: C64,
    g0: C64,
    varphi0: C64,
    grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<Vec<MotionFrame>> {
    let Some(&first) = grid.first() else {
        return Ok(Vec::new());
    };
    if first != 0.0 {
        return Err(Error::Domain(format!("time grid must start at 0, got {first}")));
    }
    let t_max = grid.iter().copied().fold(0.0, f64::max);
    let samples = validation_samples(t_max, settings.max_step);
    validate(schedule, (0.0, t_max), samples).map_err(Error::InvalidSchedule)?;

    match run(schedule, [f0, g0, varphi0], grid, settings)? {
        Ok(frames) => Ok(frames),
        Err(_) => match run(schedule, [f0, g0, varphi0], grid, &settings.tightened())? {
            Ok(frames) => Ok(frames),
            Err((t, drift)) => Err(Error::Numerical {
                t,
                reason: format!(
                    "|f|^2 - |g|^2 drifted by {drift:e}, above threshold {:e}",
                    settings.drift_threshold
                ),
            }),
        },
    }
}

fn validation_samples(t_max: f64, max_step: f64) -> usize {
    let by_step = if max_step.is_finite() && max_step > 0.0 {
        (t_max / max_step).ceil() as usize + 1
    } else {
        0
    };
    by_step.clamp(1025, 1 << 20)
}

const STATE: usize = 9;

fn pack(f: C64, g: C64, varphi: C64, phi: f64, vartheta: f64, arg: f64) -> [f64; STATE] {
    [f.re, f.im, g.re, g.im, varphi.re, varphi.im, phi, vartheta, arg]
}

fn unpack(t: f64, y: &[f64; STATE]) -> MotionFrame {
    MotionFrame {
        t,
        f: C64::new(y[0], y[1]),
        g: C64::new(y[2], y[3]),
        varphi: C64::new(y[4], y[5]),
        phase_phi: y[6],
        phase_vartheta: y[7],
        arg_f: y[8],
    }
}

/// Derivatives of `(f, g, φ, ϕ, ϑ, arg f)`.
fn rates(alg: &AlgebraicCoefficients, hbar: f64, frame: &MotionFrame) -> [f64; STATE] {
    let AlgebraicCoefficients {
        alpha,
        beta,
        gamma,
        delta,
    } = *alg;
    let MotionFrame { f, g, .. } = *frame;
    let df = -I * (alpha.conj() * g - beta * f);
    let dg = -I * (beta * g - alpha * f);
    let dvarphi = -I * (gamma.conj() * g - gamma * f);
    let dphi = 0.5 * (beta - 2.0 * delta);
    let u = u_of(frame);
    let dvartheta = hbar * ((delta - 0.5 * beta) + (gamma.conj() * u).re);
    let darg = beta - (alpha.conj() * g / f).re;
    pack(df, dg, dvarphi, dphi, dvartheta, darg)
}

type RunOutcome = std::result::Result<Vec<MotionFrame>, (f64, f64)>;

fn run(
    schedule: &CoefficientSchedule,
    init: [C64; 3],
    grid: &[f64],
    settings: &IntegratorSettings,
) -> Result<RunOutcome> {
    let ctl = settings.step_control()?;
    let hbar = schedule.units.hbar();
    let [f0, g0, varphi0] = init;
    let start = MotionFrame::new(0.0, f0, g0, varphi0);
    let reference = start.invariant();
    let mut breach: Option<(f64, f64)> = None;

    let rhs = |t: f64, y: &[f64; STATE], dy: &mut [f64; STATE]| -> Result<()> {
        let alg = schedule.algebraic_at(t)?;
        *dy = rates(&alg, hbar, &unpack(t, y));
        Ok(())
    };
    let observe = |t: f64, y: &[f64; STATE]| -> Result<()> {
        let drift = (unpack(t, y).invariant() - reference).abs();
        if drift > settings.drift_threshold {
            breach = Some((t, drift));
            return Err(Error::Numerical {
                t,
                reason: "drift".into(),
            });
        }
        Ok(())
    };
    let y0 = pack(f0, g0, varphi0, 0.0, 0.0, start.arg_f);
    match integrate(rhs, 0.0, y0, grid, &ctl, observe) {
        Ok(states) => Ok(Ok(grid.iter().zip(&states).map(|(&t, y)| unpack(t, y)).collect())),
        Err(e) => match breach {
            Some(b) => Ok(Err(b)),
            None => Err(e),
        },
    }
}

/// `cos(Θt)`, `sin(Θt)/Θ` and `(1 − cos(Θt))/Θ²` as entire functions of
/// `Θ² = β² − |α|²`; only real square roots of `|Θ²|` are taken.
#[derive(Debug, Clone, Copy)]
struct Trig {
    c: f64,
    s: f64,
    d: f64,
}

fn entire_trig(theta2: f64, t: f64) -> Trig {
    if theta2.abs() < 1e-24 {
        let z = theta2 * t * t;
        // 6-term Taylor series in −Θ²t²
        let mut c = 0.0;
        let mut s = 0.0;
        let mut d = 0.0;
        let mut term = 1.0;
        for k in 0..6 {
            let n = 2 * k;
            let fact_n = (1..=n).map(|i| i as f64).product::<f64>();
            c += term / fact_n;
            s += term / (fact_n * (n + 1) as f64);
            d += term / (fact_n * ((n + 1) * (n + 2)) as f64);
            term *= -z;
        }
        Trig {
            c,
            s: s * t,
            d: d * t * t,
        }
    } else if theta2 > 0.0 {
        let w = theta2.sqrt();
        let half = (0.5 * w * t).sin();
        Trig {
            c: (w * t).cos(),
            s: (w * t).sin() / w,
            d: 2.0 * half * half / theta2,
        }
    } else {
        let k = (-theta2).sqrt();
        let half = (0.5 * k * t).sinh();
        Trig {
            c: (k * t).cosh(),
            s: (k * t).sinh() / k,
            d: 2.0 * half * half / k.powi(2),
        }
    }
}

fn closed_form_state(alg: &AlgebraicCoefficients, f0: C64, g0: C64, varphi0: C64, t: f64) -> (C64, C64, C64) {
    let AlgebraicCoefficients { alpha, beta, gamma, .. } = *alg;
    let theta2 = beta * beta - alpha.norm_sqr();
    let Trig { c, s, d } = entire_trig(theta2, t);
    let f = f0 * c + I * (beta * f0 - alpha.conj() * g0) * s;
    let g = g0 * c + I * (alpha * f0 - beta * g0) * s;
    let varphi = I * (gamma * f0 - gamma.conj() * g0) * s
        - ((gamma * beta - gamma.conj() * alpha) * f0 + (gamma.conj() * beta - gamma * alpha.conj()) * g0) * d
        + varphi0;
    (f, g, varphi)
}

// 8-point Gauss–Legendre nodes and weights on [-1, 1]
const GL_NODES: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL_WEIGHTS: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Composite Gauss–Legendre quadrature of a vector-valued integrand.
fn quadrature<const M: usize>(t: f64, panels: usize, mut integrand: impl FnMut(f64) -> [f64; M]) -> [f64; M] {
    let mut acc = [0.0; M];
    let width = t / panels as f64;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * width;
        let half = 0.5 * width;
        for (x, w) in GL_NODES.iter().zip(GL_WEIGHTS) {
            for tau in [mid - half * x, mid + half * x] {
                let v = integrand(tau);
                for i in 0..M {
                    acc[i] += w * half * v[i];
                }
            }
        }
    }
    acc
}

/// Closed-form solution for time-independent coefficients.
///
/// `phase_vartheta` and the continuous argument of `f` have no compact
/// closed form; they are integrated by composite Gauss–Legendre quadrature
/// over the exact trajectory.
pub fn closed_form(
    alg: &AlgebraicCoefficients,
    init: &InitialConditions,
    t: f64,
    units: &UnitContext,
) -> Result<MotionFrame> {
    closed_form_from(alg, init.f0, init.g0, init.varphi0, t, units)
}

pub(crate) fn closed_form_from(
    alg: &AlgebraicCoefficients,
    f0: C64,
    g0: C64,
    varphi0: C64,
    t: f64,
    units: &UnitContext,
) -> Result<MotionFrame> {
    let (f, g, varphi) = closed_form_state(alg, f0, g0, varphi0, t);
    if !(f.is_finite() && g.is_finite() && varphi.is_finite()) {
        return Err(Error::Numerical {
            t,
            reason: "closed form overflowed".into(),
        });
    }
    let hbar = units.hbar();
    let phase_phi = 0.5 * (alg.beta - 2.0 * alg.delta) * t;

    let theta2 = alg.beta * alg.beta - alg.alpha.norm_sqr();
    let rate = 1.0 + alg.beta.abs() + alg.alpha.norm() + theta2.abs().sqrt() + alg.gamma.norm();
    let panels = ((t.abs() * rate / 0.5).ceil() as usize).clamp(1, 1 << 22);
    let [vartheta, winding] = quadrature(t, panels, |tau| {
        let (f, g, varphi) = closed_form_state(alg, f0, g0, varphi0, tau);
        let frame = MotionFrame::new(tau, f, g, varphi);
        let r = rates(alg, hbar, &frame);
        [r[7], r[8]]
    });
    let approx_arg = f0.arg() + winding;
    let arg_f = f.arg() + TAU * ((approx_arg - f.arg()) / TAU).round();

    Ok(MotionFrame {
        t,
        f,
        g,
        varphi,
        phase_phi,
        phase_vartheta: vartheta,
        arg_f,
    })
}

/// Minimum-uncertainty initial data with position spread `sigma_x0` and a
/// common phase `theta` of `f0` and `g0`. Requires `l ≥ √2 σ_x0`.
pub fn from_initial_width(sigma_x0: f64, theta: f64, units: &UnitContext) -> Result<InitialConditions> {
    let l = units.l();
    if !(sigma_x0 > 0.0 && sigma_x0.is_finite()) {
        return Err(Error::Domain(format!("sigma_x0 must be positive, got {sigma_x0}")));
    }
    if l < SQRT_2 * sigma_x0 {
        return Err(Error::Domain(format!(
            "sigma_x0 = {sigma_x0} exceeds l/sqrt(2) = {}; the width construction assumes l >= sqrt(2) sigma_x0",
            l / SQRT_2
        )));
    }
    let scale = sigma_x0 / (l * SQRT_2);
    let ratio = l * l / (2.0 * sigma_x0 * sigma_x0);
    let phase = C64::from_polar(1.0, theta);
    Ok(InitialConditions {
        f0: phase * (scale * (ratio + 1.0)),
        g0: phase * (scale * (ratio - 1.0)),
        varphi0: C64::new(0.0, 0.0),
    })
}

/// Wraps an angle difference into `(-π, π]`.
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}
