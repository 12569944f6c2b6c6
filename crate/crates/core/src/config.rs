//! TOML run configuration for the command-line tool.
//!
//! ```toml
//! [hamiltonian]
//! parameterization = "physical"   # or "algebraic"
//! hbar = 1.0
//! l = 1.0
//! mass = 1.0
//! stiffness = { kind = "harmonic", c0 = 1.0, c1 = -50.0, omega = 10.0 }
//!
//! [initial]
//! sigma_x0 = 0.5
//! xbar0 = 1.0
//!
//! [integration]
//! t_end = 10.0
//! samples = 201
//!
//! [output]
//! tail_tolerance = 1e-10
//! ```
//!
//! Alternatively `[hamiltonian] preset = "mathieu"` with `m0`, `epsilon0`,
//! `eta0`, `omega0`, `hbar`, `varphi0_re`, `varphi0_im`.

use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Deserialize;
use thiserror::Error;

use crate::hamiltonian::{
    AlgebraicSchedule, CoefficientSchedule, ComplexFunction, PhysicalSchedule, TimeFunction, UnitContext,
};
use crate::mathieu::{self, DrivenOscillatorConfig};
use crate::motion::{evolve, from_initial_width, InitialConditions, IntegratorSettings, MotionFrame};
use crate::observables::{varphi_from_means, DEFAULT_GRID_POINTS, DEFAULT_GRID_SIGMAS};
use crate::states::{DEFAULT_N_MAX, DEFAULT_TAIL_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Error)]
#[error("configuration error: {0}")]
pub struct ConfigError(pub String);

fn bad<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    hamiltonian: Option<RawHamiltonian>,
    initial: Option<RawInitial>,
    integration: Option<RawIntegration>,
    output: Option<RawOutput>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    preset: Option<String>,
    parameterization: Option<String>,
    hbar: Option<f64>,
    l: Option<f64>,
    mass: Option<RealSpec>,
    stiffness: Option<RealSpec>,
    omega: Option<RealSpec>,
    force: Option<RealSpec>,
    velocity: Option<RealSpec>,
    energy: Option<RealSpec>,
    alpha: Option<ComplexSpec>,
    beta: Option<ComplexSpec>,
    gamma: Option<ComplexSpec>,
    delta: Option<ComplexSpec>,
    m0: Option<f64>,
    epsilon0: Option<f64>,
    eta0: Option<f64>,
    omega0: Option<f64>,
    varphi0_re: Option<f64>,
    varphi0_im: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RealSpec {
    Number(f64),
    Function(FunctionSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FunctionSpec {
    Constant { value: f64 },
    Harmonic { c0: f64, c1: f64, omega: f64 },
    Polynomial { coefficients: Vec<f64> },
    Table { points: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum ComplexSpec {
    Real(RealSpec),
    Parts(ComplexParts),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexParts {
    re: Option<RealSpec>,
    im: Option<RealSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInitial {
    f0_re: Option<f64>,
    f0_im: Option<f64>,
    g0_re: Option<f64>,
    g0_im: Option<f64>,
    varphi0_re: Option<f64>,
    varphi0_im: Option<f64>,
    sigma_x0: Option<f64>,
    theta: Option<f64>,
    xbar0: Option<f64>,
    pbar0: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegration {
    t_end: Option<f64>,
    tau_end: Option<f64>,
    samples: Option<usize>,
    times: Option<Vec<f64>>,
    rtol: Option<f64>,
    atol: Option<f64>,
    max_step: Option<f64>,
    drift_threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    path: Option<PathBuf>,
    tail_tolerance: Option<f64>,
    n_max: Option<usize>,
    rows: Option<usize>,
    density_points: Option<usize>,
    density_sigmas: Option<f64>,
}

/// The Hamiltonian being simulated.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Schedule(CoefficientSchedule),
    Mathieu(DrivenOscillatorConfig),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputSettings {
    pub path: Option<PathBuf>,
    pub tail_tolerance: f64,
    pub n_max: usize,
    /// Upper limit on rows written by the `fock` command.
    pub rows: Option<usize>,
    pub density_points: usize,
    pub density_sigmas: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub init: InitialConditions,
    /// Output times of `evolve`, starting at 0.
    pub grid: Option<Vec<f64>>,
    pub settings: IntegratorSettings,
    pub output: OutputSettings,
}

const DEFAULT_SAMPLES: usize = 101;

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        let Some(ham) = raw.hamiltonian else {
            return bad("missing [hamiltonian] section");
        };
        let initial = raw.initial.unwrap_or_default();

        let (model, units, preset_varphi) = match ham.preset.as_deref() {
            Some("mathieu") => {
                let (cfg, varphi) = mathieu_preset(&ham)?;
                let units = cfg.units().map_err(|e| ConfigError(e.to_string()))?;
                (Model::Mathieu(cfg), units, Some(varphi))
            }
            Some(other) => return bad(format!("unknown preset `{other}` (expected `mathieu`)")),
            None => {
                let units = UnitContext::new(ham.hbar.unwrap_or(1.0), ham.l.unwrap_or(1.0))
                    .map_err(|e| ConfigError(e.to_string()))?;
                (Model::Schedule(explicit_schedule(&ham, units)?), units, None)
            }
        };

        let init = initial_conditions(&initial, &units, preset_varphi)?;
        let model = match model {
            Model::Mathieu(cfg) => Model::Mathieu(DrivenOscillatorConfig { init, ..cfg }),
            m => m,
        };
        let integration = raw.integration.unwrap_or_default();
        let settings = integrator_settings(&integration)?;
        let grid = time_grid(&integration, &model)?;
        let output = output_settings(raw.output.unwrap_or_default())?;
        Ok(RunConfig {
            model,
            init,
            grid,
            settings,
            output,
        })
    }

    pub fn units(&self) -> UnitContext {
        match &self.model {
            Model::Schedule(s) => s.units,
            Model::Mathieu(cfg) => cfg.units().expect("validated at load"),
        }
    }

    pub fn schedule(&self) -> CoefficientSchedule {
        match &self.model {
            Model::Schedule(s) => s.clone(),
            Model::Mathieu(cfg) => cfg.to_schedule().expect("validated at load"),
        }
    }

    pub fn mathieu(&self) -> Option<&DrivenOscillatorConfig> {
        match &self.model {
            Model::Mathieu(cfg) => Some(cfg),
            Model::Schedule(_) => None,
        }
    }

    /// Frames at the given nondecreasing, nonnegative physical times.
    pub fn frames_at(&self, times: &[f64], settings: &IntegratorSettings) -> crate::Result<Vec<MotionFrame>> {
        if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] < w[0]) {
            return Err(crate::Error::Domain(
                "times must be finite, nonnegative and nondecreasing".into(),
            ));
        }
        let prepend = times.first().is_some_and(|&t| t != 0.0);
        let mut grid = Vec::with_capacity(times.len() + 1);
        if prepend {
            grid.push(0.0);
        }
        grid.extend_from_slice(times);
        let mut frames = match &self.model {
            Model::Schedule(s) => evolve(s, &self.init, &grid, settings)?,
            Model::Mathieu(cfg) => {
                let taus: Vec<f64> = grid.iter().map(|&t| cfg.tau_of_t(t)).collect();
                let mut frames = mathieu::frames(cfg, &taus, settings)?;
                for (fr, &t) in frames.iter_mut().zip(&grid) {
                    fr.t = t;
                }
                frames
            }
        };
        if prepend {
            frames.remove(0);
        }
        Ok(frames)
    }
}

fn mathieu_preset(ham: &RawHamiltonian) -> Result<(DrivenOscillatorConfig, C64), ConfigError> {
    let explicit = [
        ("parameterization", ham.parameterization.is_some()),
        ("l", ham.l.is_some()),
        ("mass", ham.mass.is_some()),
        ("stiffness", ham.stiffness.is_some()),
        ("omega", ham.omega.is_some()),
        ("force", ham.force.is_some()),
        ("velocity", ham.velocity.is_some()),
        ("energy", ham.energy.is_some()),
        ("alpha", ham.alpha.is_some()),
        ("beta", ham.beta.is_some()),
        ("gamma", ham.gamma.is_some()),
        ("delta", ham.delta.is_some()),
    ];
    if let Some((key, _)) = explicit.iter().find(|(_, set)| *set) {
        return bad(format!("hamiltonian.{key} cannot be combined with a preset"));
    }
    let fig1 = DrivenOscillatorConfig::fig1();
    let cfg = DrivenOscillatorConfig::new(
        ham.m0.unwrap_or(fig1.m0),
        ham.epsilon0.unwrap_or(fig1.epsilon0),
        ham.eta0.unwrap_or(fig1.eta0),
        ham.omega0.unwrap_or(fig1.omega0),
        ham.hbar.unwrap_or(fig1.hbar),
        fig1.init,
    )
    .map_err(|e| ConfigError(e.to_string()))?;
    let varphi = C64::new(
        ham.varphi0_re.unwrap_or(fig1.init.varphi0().re),
        ham.varphi0_im.unwrap_or(fig1.init.varphi0().im),
    );
    Ok((cfg, varphi))
}

fn time_function(key: &str, spec: &RealSpec) -> Result<TimeFunction, ConfigError> {
    Ok(match spec {
        RealSpec::Number(v) => TimeFunction::Constant(*v),
        RealSpec::Function(FunctionSpec::Constant { value }) => TimeFunction::Constant(*value),
        RealSpec::Function(FunctionSpec::Harmonic { c0, c1, omega }) => TimeFunction::Harmonic {
            c0: *c0,
            c1: *c1,
            omega: *omega,
        },
        RealSpec::Function(FunctionSpec::Polynomial { coefficients }) => {
            TimeFunction::Polynomial(coefficients.clone())
        }
        RealSpec::Function(FunctionSpec::Table { points }) => {
            TimeFunction::table(points.iter().map(|p| (p[0], p[1])).collect())
                .map_err(|e| ConfigError(format!("hamiltonian.{key}: {e}")))?
        }
    })
}

fn complex_function(key: &str, spec: &ComplexSpec) -> Result<ComplexFunction, ConfigError> {
    match spec {
        ComplexSpec::Real(r) => Ok(ComplexFunction::real(time_function(key, r)?)),
        ComplexSpec::Parts(ComplexParts { re, im }) => {
            let part = |p: &Option<RealSpec>| match p {
                Some(s) => time_function(key, s),
                None => Ok(TimeFunction::ZERO),
            };
            Ok(ComplexFunction::new(part(re)?, part(im)?))
        }
    }
}

fn explicit_schedule(ham: &RawHamiltonian, units: UnitContext) -> Result<CoefficientSchedule, ConfigError> {
    let preset_keys = [
        ("m0", ham.m0.is_some()),
        ("epsilon0", ham.epsilon0.is_some()),
        ("eta0", ham.eta0.is_some()),
        ("omega0", ham.omega0.is_some()),
        ("varphi0_re", ham.varphi0_re.is_some()),
        ("varphi0_im", ham.varphi0_im.is_some()),
    ];
    if let Some((key, _)) = preset_keys.iter().find(|(_, set)| *set) {
        return bad(format!("hamiltonian.{key} is only meaningful with preset = \"mathieu\""));
    }
    let physical_set = [&ham.mass, &ham.stiffness, &ham.omega, &ham.force, &ham.velocity, &ham.energy]
        .iter()
        .any(|s| s.is_some());
    let algebraic_set = [&ham.alpha, &ham.beta, &ham.gamma, &ham.delta].iter().any(|s| s.is_some());
    let form = match ham.parameterization.as_deref() {
        Some(p) => p,
        None if algebraic_set && !physical_set => "algebraic",
        None => "physical",
    };
    let real_or_zero = |key: &str, s: &Option<RealSpec>| match s {
        Some(spec) => time_function(key, spec),
        None => Ok(TimeFunction::ZERO),
    };
    let complex_or_zero = |key: &str, s: &Option<ComplexSpec>| match s {
        Some(spec) => complex_function(key, spec),
        None => Ok(ComplexFunction::zero()),
    };
    match form {
        "physical" => {
            if algebraic_set {
                return bad("algebraic coefficients (alpha, beta, gamma, delta) given with a physical parameterization");
            }
            let Some(mass) = &ham.mass else {
                return bad("hamiltonian.mass is required for the physical parameterization");
            };
            let Some(stiffness) = &ham.stiffness else {
                return bad("hamiltonian.stiffness is required for the physical parameterization");
            };
            let schedule = PhysicalSchedule {
                mass: time_function("mass", mass)?,
                stiffness: time_function("stiffness", stiffness)?,
                omega: real_or_zero("omega", &ham.omega)?,
                force: real_or_zero("force", &ham.force)?,
                velocity: real_or_zero("velocity", &ham.velocity)?,
                energy: real_or_zero("energy", &ham.energy)?,
            };
            Ok(CoefficientSchedule::physical(schedule, units))
        }
        "algebraic" => {
            if physical_set {
                return bad("physical coefficients given with an algebraic parameterization");
            }
            let Some(beta) = &ham.beta else {
                return bad("hamiltonian.beta is required for the algebraic parameterization");
            };
            let schedule = AlgebraicSchedule {
                alpha: complex_or_zero("alpha", &ham.alpha)?,
                beta: complex_function("beta", beta)?,
                gamma: complex_or_zero("gamma", &ham.gamma)?,
                delta: complex_or_zero("delta", &ham.delta)?,
            };
            Ok(CoefficientSchedule::algebraic(schedule, units))
        }
        other => bad(format!(
            "unknown parameterization `{other}` (expected `physical` or `algebraic`)"
        )),
    }
}

fn initial_conditions(
    raw: &RawInitial,
    units: &UnitContext,
    preset_varphi: Option<C64>,
) -> Result<InitialConditions, ConfigError> {
    let explicit = raw.f0_re.is_some() || raw.f0_im.is_some() || raw.g0_re.is_some() || raw.g0_im.is_some();
    let width = raw.sigma_x0.is_some();
    if explicit && width {
        return bad("[initial] must use either f0/g0 or sigma_x0, not both");
    }
    if raw.theta.is_some() && !width {
        return bad("initial.theta requires initial.sigma_x0");
    }
    let coefficients = if let Some(sigma) = raw.sigma_x0 {
        from_initial_width(sigma, raw.theta.unwrap_or(0.0), units).map_err(|e| ConfigError(e.to_string()))?
    } else {
        let f0 = C64::new(raw.f0_re.unwrap_or(1.0), raw.f0_im.unwrap_or(0.0));
        let g0 = C64::new(raw.g0_re.unwrap_or(0.0), raw.g0_im.unwrap_or(0.0));
        InitialConditions::new(f0, g0, C64::new(0.0, 0.0)).map_err(|e| ConfigError(e.to_string()))?
    };
    let by_value = raw.varphi0_re.is_some() || raw.varphi0_im.is_some();
    let by_means = raw.xbar0.is_some() || raw.pbar0.is_some();
    if by_value && by_means {
        return bad("[initial] must use either varphi0 or xbar0/pbar0, not both");
    }
    if preset_varphi.is_some() && (by_value || by_means) {
        return bad("the mathieu preset sets varphi0 in [hamiltonian]; remove it from [initial]");
    }
    let varphi = if by_means {
        varphi_from_means(
            raw.xbar0.unwrap_or(0.0),
            raw.pbar0.unwrap_or(0.0),
            coefficients.f0(),
            coefficients.g0(),
            units,
        )
    } else if let Some(v) = preset_varphi {
        v
    } else {
        C64::new(raw.varphi0_re.unwrap_or(0.0), raw.varphi0_im.unwrap_or(0.0))
    };
    if !varphi.is_finite() {
        return bad("initial displacement must be finite");
    }
    Ok(coefficients.with_varphi(varphi))
}

fn integrator_settings(raw: &RawIntegration) -> Result<IntegratorSettings, ConfigError> {
    let d = IntegratorSettings::default();
    let s = IntegratorSettings {
        rtol: raw.rtol.unwrap_or(d.rtol),
        atol: raw.atol.unwrap_or(d.atol),
        max_step: raw.max_step.unwrap_or(d.max_step),
        drift_threshold: raw.drift_threshold.unwrap_or(d.drift_threshold),
    };
    if !(s.rtol > 0.0 && s.atol > 0.0 && s.max_step > 0.0 && s.drift_threshold > 0.0) {
        return bad("integration tolerances, max_step and drift_threshold must be positive");
    }
    Ok(s)
}

fn time_grid(raw: &RawIntegration, model: &Model) -> Result<Option<Vec<f64>>, ConfigError> {
    let chosen = [raw.t_end.is_some(), raw.tau_end.is_some(), raw.times.is_some()]
        .iter()
        .filter(|&&b| b)
        .count();
    if chosen > 1 {
        return bad("[integration] takes exactly one of t_end, tau_end, times");
    }
    if raw.samples.is_some() && raw.times.is_some() {
        return bad("integration.samples cannot be combined with integration.times");
    }
    let samples = raw.samples.unwrap_or(DEFAULT_SAMPLES);
    let end = match (raw.t_end, raw.tau_end, model) {
        (Some(t), _, _) => Some(t),
        (_, Some(tau), Model::Mathieu(cfg)) => Some(cfg.t_of_tau(tau)),
        (_, Some(_), Model::Schedule(_)) => return bad("integration.tau_end requires preset = \"mathieu\""),
        _ => None,
    };
    if let Some(end) = end {
        if !(end.is_finite() && end >= 0.0) {
            return bad("integration end time must be finite and nonnegative");
        }
        if samples < 2 {
            return bad("integration.samples must be at least 2");
        }
        return Ok(Some(
            (0..samples)
                .map(|i| if i + 1 == samples { end } else { end * i as f64 / (samples - 1) as f64 })
                .collect(),
        ));
    }
    match &raw.times {
        Some(times) => {
            if times.first() != Some(&0.0) {
                return bad("integration.times must start at 0");
            }
            if times.windows(2).any(|w| !(w[1] >= w[0])) || times.iter().any(|t| !t.is_finite()) {
                return bad("integration.times must be finite and nondecreasing");
            }
            Ok(Some(times.clone()))
        }
        None => Ok(None),
    }
}

fn output_settings(raw: RawOutput) -> Result<OutputSettings, ConfigError> {
    let out = OutputSettings {
        path: raw.path,
        tail_tolerance: raw.tail_tolerance.unwrap_or(DEFAULT_TAIL_TOLERANCE),
        n_max: raw.n_max.unwrap_or(DEFAULT_N_MAX),
        rows: raw.rows,
        density_points: raw.density_points.unwrap_or(DEFAULT_GRID_POINTS),
        density_sigmas: raw.density_sigmas.unwrap_or(DEFAULT_GRID_SIGMAS),
    };
    if !(out.tail_tolerance > 0.0 && out.tail_tolerance.is_finite()) {
        return bad("output.tail_tolerance must be positive");
    }
    if out.density_points < 2 || !(out.density_sigmas > 0.0) {
        return bad("output.density_points must be at least 2 and density_sigmas positive");
    }
    Ok(out)
}
