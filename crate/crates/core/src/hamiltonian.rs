//! Time-dependent quadratic Hamiltonians.
//!
//! A single-mode quadratic Hamiltonian is carried either through its
//! ladder-operator coefficients
//!
//! ```text
//! H = ħ/2 (α* a² + α a†²) + ħβ a†a + ħγ* a + ħγ a† + ħδ
//! ```
//!
//! or through its position/momentum coefficients
//!
//! ```text
//! H = p²/2m + k x²/2 + Ω (xp + px)/2 + F x + V p + E
//! ```
//!
//! with `a = (x/l + i l p/ħ)/√2`. Both are related one-to-one for a finite,
//! nonzero mass.

use std::f64::consts::SQRT_2;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Ladder-operator coefficients (all in units of angular frequency).
///
/// `beta` and `delta` are real by construction, which is the hermiticity
/// condition of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraicCoefficients {
    pub alpha: C64,
    pub beta: f64,
    pub gamma: C64,
    pub delta: f64,
}

/// Position/momentum coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalCoefficients {
    pub mass: f64,
    pub stiffness: f64,
    pub omega: f64,
    pub force: f64,
    pub velocity: f64,
    pub energy: f64,
}

/// Reduced Planck constant and the reference length of the ladder operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitContext {
    hbar: f64,
    l: f64,
}

impl UnitContext {
    pub fn new(hbar: f64, l: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::Domain(format!("length l must be positive, got {l}")));
        }
        Ok(Self { hbar, l })
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn l(&self) -> f64 {
        self.l
    }
}

impl Default for UnitContext {
    fn default() -> Self {
        Self { hbar: 1.0, l: 1.0 }
    }
}

/// Maps position/momentum coefficients onto ladder-operator coefficients.
pub fn to_algebraic(phys: &PhysicalCoefficients, units: &UnitContext) -> Result<AlgebraicCoefficients> {
    let PhysicalCoefficients {
        mass,
        stiffness,
        omega,
        force,
        velocity,
        energy,
    } = *phys;
    if mass == 0.0 || !mass.is_finite() {
        return Err(Error::Domain(format!("mass must be finite and nonzero, got {mass}")));
    }
    let (hbar, l) = (units.hbar, units.l);
    let l2 = l * l;
    // β = s + w, α = s − w + iΩ with s = l²k/2ħ, w = ħ/(2l²m)
    let s = l2 * stiffness / (2.0 * hbar);
    let w = hbar / (2.0 * l2 * mass);
    let beta = s + w;
    let alpha = C64::new(s - w, omega);
    let gamma = C64::new(force, hbar * velocity / l2) * (l / (hbar * SQRT_2));
    let delta = energy / hbar + 0.5 * beta;
    Ok(AlgebraicCoefficients {
        alpha,
        beta,
        gamma,
        delta,
    })
}

/// Maps ladder-operator coefficients onto position/momentum coefficients.
pub fn to_physical(alg: &AlgebraicCoefficients, units: &UnitContext) -> Result<PhysicalCoefficients> {
    let (hbar, l) = (units.hbar, units.l);
    let l2 = l * l;
    let inv_mass_scaled = alg.beta - alg.alpha.re;
    if inv_mass_scaled == 0.0 {
        return Err(Error::Domain(
            "Re(beta - alpha) = 0 corresponds to an infinite mass".into(),
        ));
    }
    Ok(PhysicalCoefficients {
        mass: hbar / (l2 * inv_mass_scaled),
        stiffness: hbar / l2 * (alg.beta + alg.alpha.re),
        omega: alg.alpha.im,
        force: SQRT_2 * hbar / l * alg.gamma.re,
        velocity: SQRT_2 * l * alg.gamma.im,
        energy: hbar * (alg.delta - 0.5 * alg.beta),
    })
}

/// Time dependence of a single real coefficient.
#[derive(Debug, Clone, PartialEq)]
pub enum TimeFunction {
    Constant(f64),
    /// `c0 + c1 cos(omega t)`
    Harmonic { c0: f64, c1: f64, omega: f64 },
    /// Coefficients in ascending powers of `t`.
    Polynomial(Vec<f64>),
    /// Piecewise-linear interpolation of `(t, value)` samples with strictly
    /// increasing `t`. Undefined outside the sampled range.
    Table(Vec<(f64, f64)>),
}

impl TimeFunction {
    pub const ZERO: TimeFunction = TimeFunction::Constant(0.0);

    /// Builds a table, rejecting empty or non-increasing sample times.
    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("table needs at least one sample".into()));
        }
        if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::Domain("table times must be strictly increasing".into()));
        }
        Ok(TimeFunction::Table(points))
    }

    /// Value at `t`, or `None` when `t` lies outside a table's range.
    pub fn eval(&self, t: f64) -> Option<f64> {
        match self {
            TimeFunction::Constant(c) => Some(*c),
            TimeFunction::Harmonic { c0, c1, omega } => Some(c0 + c1 * (omega * t).cos()),
            TimeFunction::Polynomial(coeffs) => Some(coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)),
            TimeFunction::Table(points) => interpolate(points, t),
        }
    }

    /// Closed interval on which the function is defined, if bounded.
    pub fn coverage(&self) -> Option<(f64, f64)> {
        match self {
            TimeFunction::Table(points) => match (points.first(), points.last()) {
                (Some(a), Some(b)) => Some((a.0, b.0)),
                _ => Some((f64::NAN, f64::NAN)),
            },
            _ => None,
        }
    }

    fn is_sorted_table(&self) -> bool {
        match self {
            TimeFunction::Table(points) => {
                !points.is_empty() && points.windows(2).all(|w| w[1].0 > w[0].0)
            }
            _ => true,
        }
    }

    fn breakpoints(&self) -> &[(f64, f64)] {
        match self {
            TimeFunction::Table(points) => points,
            _ => &[],
        }
    }
}

impl From<f64> for TimeFunction {
    fn from(c: f64) -> Self {
        TimeFunction::Constant(c)
    }
}

fn interpolate(points: &[(f64, f64)], t: f64) -> Option<f64> {
    let first = points.first()?;
    let last = points.last()?;
    if !(t >= first.0 && t <= last.0) {
        return None;
    }
    if points.len() == 1 {
        return Some(first.1);
    }
    // index of the first sample strictly after t
    let hi = points.partition_point(|p| p.0 <= t).min(points.len() - 1);
    let (t0, v0) = points[hi - 1];
    let (t1, v1) = points[hi];
    if t == t1 {
        return Some(v1);
    }
    Some(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

/// A complex coefficient given by its real and imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFunction {
    pub re: TimeFunction,
    pub im: TimeFunction,
}

impl ComplexFunction {
    pub fn real(re: impl Into<TimeFunction>) -> Self {
        Self {
            re: re.into(),
            im: TimeFunction::ZERO,
        }
    }

    pub fn new(re: impl Into<TimeFunction>, im: impl Into<TimeFunction>) -> Self {
        Self {
            re: re.into(),
            im: im.into(),
        }
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicSchedule {
    pub alpha: ComplexFunction,
    /// Must be real; an imaginary part is accepted only so that validation
    /// can report it.
    pub beta: ComplexFunction,
    pub gamma: ComplexFunction,
    /// Must be real, as `beta`.
    pub delta: ComplexFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalSchedule {
    pub mass: TimeFunction,
    pub stiffness: TimeFunction,
    pub omega: TimeFunction,
    pub force: TimeFunction,
    pub velocity: TimeFunction,
    pub energy: TimeFunction,
}

impl PhysicalSchedule {
    /// Oscillator `p²/2m + k(t) x²/2` with no other terms.
    pub fn oscillator(mass: impl Into<TimeFunction>, stiffness: impl Into<TimeFunction>) -> Self {
        Self {
            mass: mass.into(),
            stiffness: stiffness.into(),
            omega: TimeFunction::ZERO,
            force: TimeFunction::ZERO,
            velocity: TimeFunction::ZERO,
            energy: TimeFunction::ZERO,
        }
    }
}

/// The authoritative parameterization of a schedule.
#[derive(Debug, Clone, PartialEq)]
pub enum ScheduleForm {
    Algebraic(AlgebraicSchedule),
    Physical(PhysicalSchedule),
}

/// Time-dependent Hamiltonian coefficients together with their units.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSchedule {
    pub form: ScheduleForm,
    pub units: UnitContext,
}

impl CoefficientSchedule {
    pub fn algebraic(schedule: AlgebraicSchedule, units: UnitContext) -> Self {
        Self {
            form: ScheduleForm::Algebraic(schedule),
            units,
        }
    }

    pub fn physical(schedule: PhysicalSchedule, units: UnitContext) -> Self {
        Self {
            form: ScheduleForm::Physical(schedule),
            units,
        }
    }

    /// Time-independent ladder-operator coefficients.
    pub fn constant(alg: AlgebraicCoefficients, units: UnitContext) -> Self {
        Self::algebraic(
            AlgebraicSchedule {
                alpha: ComplexFunction::new(alg.alpha.re, alg.alpha.im),
                beta: ComplexFunction::real(alg.beta),
                gamma: ComplexFunction::new(alg.gamma.re, alg.gamma.im),
                delta: ComplexFunction::real(alg.delta),
            },
            units,
        )
    }

    /// Ladder-operator coefficients at `t`.
    pub fn algebraic_at(&self, t: f64) -> Result<AlgebraicCoefficients> {
        match &self.form {
            ScheduleForm::Algebraic(s) => {
                let alpha = eval_complex("alpha", &s.alpha, t)?;
                let beta = eval_complex("beta", &s.beta, t)?;
                let gamma = eval_complex("gamma", &s.gamma, t)?;
                let delta = eval_complex("delta", &s.delta, t)?;
                for (name, v) in [("beta", beta), ("delta", delta)] {
                    if v.im != 0.0 {
                        return Err(Error::Evaluation {
                            coefficient: name.into(),
                            t,
                            reason: format!("imaginary part {} violates hermiticity", v.im),
                        });
                    }
                }
                Ok(AlgebraicCoefficients {
                    alpha,
                    beta: beta.re,
                    gamma,
                    delta: delta.re,
                })
            }
            ScheduleForm::Physical(_) => {
                let phys = self.physical_at(t)?;
                to_algebraic(&phys, &self.units).map_err(|e| Error::Evaluation {
                    coefficient: "mass".into(),
                    t,
                    reason: e.to_string(),
                })
            }
        }
    }

    /// Position/momentum coefficients at `t`.
    pub fn physical_at(&self, t: f64) -> Result<PhysicalCoefficients> {
        match &self.form {
            ScheduleForm::Physical(s) => Ok(PhysicalCoefficients {
                mass: eval_real("mass", &s.mass, t)?,
                stiffness: eval_real("stiffness", &s.stiffness, t)?,
                omega: eval_real("omega", &s.omega, t)?,
                force: eval_real("force", &s.force, t)?,
                velocity: eval_real("velocity", &s.velocity, t)?,
                energy: eval_real("energy", &s.energy, t)?,
            }),
            ScheduleForm::Algebraic(_) => {
                let alg = self.algebraic_at(t)?;
                to_physical(&alg, &self.units).map_err(|e| Error::Evaluation {
                    coefficient: "beta - alpha".into(),
                    t,
                    reason: e.to_string(),
                })
            }
        }
    }

    fn named_functions(&self) -> Vec<(String, &TimeFunction)> {
        match &self.form {
            ScheduleForm::Algebraic(s) => [("alpha", &s.alpha), ("beta", &s.beta), ("gamma", &s.gamma), ("delta", &s.delta)]
                .into_iter()
                .flat_map(|(name, c)| [(format!("{name}.re"), &c.re), (format!("{name}.im"), &c.im)])
                .collect(),
            ScheduleForm::Physical(s) => vec![
                ("mass".to_string(), &s.mass),
                ("stiffness".to_string(), &s.stiffness),
                ("omega".to_string(), &s.omega),
                ("force".to_string(), &s.force),
                ("velocity".to_string(), &s.velocity),
                ("energy".to_string(), &s.energy),
            ],
        }
    }
}

fn eval_real(name: &str, f: &TimeFunction, t: f64) -> Result<f64> {
    match f.eval(t) {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => Err(Error::Evaluation {
            coefficient: name.into(),
            t,
            reason: format!("non-finite value {v}"),
        }),
        None => Err(Error::Evaluation {
            coefficient: name.into(),
            t,
            reason: "time outside tabulated range".into(),
        }),
    }
}

fn eval_complex(name: &str, f: &ComplexFunction, t: f64) -> Result<C64> {
    Ok(C64::new(
        eval_real(&format!("{name}.re"), &f.re, t)?,
        eval_real(&format!("{name}.im"), &f.im, t)?,
    ))
}

/// The condition a schedule violates.
#[derive(Debug, Clone, PartialEq)]
pub enum Condition {
    /// `beta` or `delta` has a nonzero imaginary part.
    Hermiticity { imaginary: f64 },
    /// A table does not cover the requested horizon.
    Coverage { start: f64, end: f64 },
    /// Table times are empty or not strictly increasing.
    UnsortedTable,
    /// Mass is zero, making the Hamiltonian singular.
    ZeroMass,
    NonFinite,
}

/// One validation finding: which coefficient, when, and what.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub coefficient: String,
    pub t: f64,
    pub condition: Condition,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.condition {
            Condition::Hermiticity { imaginary } => write!(
                f,
                "{} has imaginary part {imaginary:e} at t = {} (must be real)",
                self.coefficient, self.t
            ),
            Condition::Coverage { start, end } => write!(
                f,
                "{} table covers [{start}, {end}] but is needed at t = {}",
                self.coefficient, self.t
            ),
            Condition::UnsortedTable => write!(
                f,
                "{} table times must be non-empty and strictly increasing",
                self.coefficient
            ),
            Condition::ZeroMass => write!(f, "{} vanishes at t = {}", self.coefficient, self.t),
            Condition::NonFinite => write!(f, "{} is not finite at t = {}", self.coefficient, self.t),
        }
    }
}

/// Checks hermiticity, table coverage, and domain conditions on `samples`
/// uniformly spaced times in `horizon` plus every table breakpoint inside it.
///
/// Each coefficient reports at most one diagnostic per condition, at the
/// first offending time.
pub fn validate(
    schedule: &CoefficientSchedule,
    horizon: (f64, f64),
    samples: usize,
) -> std::result::Result<(), Vec<Diagnostic>> {
    let (t0, t1) = horizon;
    let mut diags: Vec<Diagnostic> = Vec::new();
    let mut push = |d: Diagnostic| {
        if !diags
            .iter()
            .any(|o| o.coefficient == d.coefficient && std::mem::discriminant(&o.condition) == std::mem::discriminant(&d.condition))
        {
            diags.push(d);
        }
    };

    let functions = schedule.named_functions();
    let mut times: Vec<f64> = sample_times(t0, t1, samples);
    for (name, func) in &functions {
        if !func.is_sorted_table() {
            push(Diagnostic {
                coefficient: name.clone(),
                t: t0,
                condition: Condition::UnsortedTable,
            });
            continue;
        }
        if let Some((start, end)) = func.coverage() {
            for t in [t0, t1] {
                if !(t >= start && t <= end) {
                    push(Diagnostic {
                        coefficient: name.clone(),
                        t,
                        condition: Condition::Coverage { start, end },
                    });
                }
            }
        }
        times.extend(func.breakpoints().iter().map(|p| p.0).filter(|&t| t >= t0 && t <= t1));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();

    for &t in &times {
        for (name, func) in &functions {
            match func.eval(t) {
                // coverage already reported
                None => {}
                Some(v) if !v.is_finite() => push(Diagnostic {
                    coefficient: name.clone(),
                    t,
                    condition: Condition::NonFinite,
                }),
                Some(v) => {
                    let hermitian_part = name == "beta.im" || name == "delta.im";
                    if hermitian_part && v != 0.0 {
                        push(Diagnostic {
                            coefficient: name.trim_end_matches(".im").to_string(),
                            t,
                            condition: Condition::Hermiticity { imaginary: v },
                        });
                    }
                    if name == "mass" && v == 0.0 {
                        push(Diagnostic {
                            coefficient: name.clone(),
                            t,
                            condition: Condition::ZeroMass,
                        });
                    }
                }
            }
        }
    }

    if diags.is_empty() {
        Ok(())
    } else {
        Err(diags)
    }
}

fn sample_times(t0: f64, t1: f64, samples: usize) -> Vec<f64> {
    match samples {
        0 => vec![],
        1 => vec![t0],
        n => (0..n)
            .map(|i| if i == n - 1 { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn free_particle() -> PhysicalCoefficients {
        PhysicalCoefficients {
            mass: 1.0,
            stiffness: 0.0,
            omega: 0.0,
            force: 0.0,
            velocity: 0.0,
            energy: 0.0,
        }
    }

    #[test]
    fn unit_mass_maps_to_half_frequencies() {
        let alg = to_algebraic(&free_particle(), &UnitContext::default()).unwrap();
        assert_eq!(alg.beta, 0.5);
        assert_eq!(alg.alpha, C64::new(-0.5, 0.0));
        assert_eq!(alg.gamma, C64::new(0.0, 0.0));
        assert_eq!(alg.delta, 0.25);
    }

    #[test]
    fn driven_oscillator_at_t0() {
        let units = UnitContext::new(1.0, 0.1f64.sqrt()).unwrap();
        let phys = PhysicalCoefficients {
            stiffness: 1.0 - 50.0,
            ..free_particle()
        };
        let alg = to_algebraic(&phys, &units).unwrap();
        assert_relative_eq!(alg.beta, 2.55, max_relative = 1e-14);
        assert_relative_eq!(alg.alpha.re, -7.45, max_relative = 1e-14);
        assert_eq!(alg.alpha.im, 0.0);
        assert_eq!(alg.gamma, C64::new(0.0, 0.0));
        assert_relative_eq!(alg.beta - alg.alpha.re, 10.0, max_relative = 1e-14);
    }

    #[test]
    fn inverse_of_unit_mass() {
        let alg = AlgebraicCoefficients {
            alpha: C64::new(-0.5, 0.0),
            beta: 0.5,
            gamma: C64::new(0.0, 0.0),
            delta: 0.25,
        };
        let phys = to_physical(&alg, &UnitContext::default()).unwrap();
        assert_eq!(phys, free_particle());
    }

    #[test]
    fn imaginary_alpha_is_omega() {
        let alg = AlgebraicCoefficients {
            alpha: C64::new(-0.5, 0.7),
            beta: 0.5,
            gamma: C64::new(0.0, 0.0),
            delta: 0.0,
        };
        assert_eq!(to_physical(&alg, &UnitContext::default()).unwrap().omega, 0.7);
    }

    #[test]
    fn zero_mass_and_infinite_mass_are_rejected() {
        let phys = PhysicalCoefficients {
            mass: 0.0,
            ..free_particle()
        };
        assert!(matches!(to_algebraic(&phys, &UnitContext::default()), Err(Error::Domain(_))));
        let alg = AlgebraicCoefficients {
            alpha: C64::new(1.0, 0.3),
            beta: 1.0,
            gamma: C64::new(0.0, 0.0),
            delta: 0.0,
        };
        assert!(matches!(to_physical(&alg, &UnitContext::default()), Err(Error::Domain(_))));
    }

    #[test]
    fn units_reject_nonpositive() {
        assert!(UnitContext::new(0.0, 1.0).is_err());
        assert!(UnitContext::new(1.0, -1.0).is_err());
    }

    #[test]
    fn table_interpolates_linearly_without_extrapolation() {
        let f = TimeFunction::table(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 2.0)]).unwrap();
        assert_eq!(f.eval(0.0), Some(1.0));
        assert_eq!(f.eval(0.5), Some(2.0));
        assert_eq!(f.eval(1.0), Some(3.0));
        assert_eq!(f.eval(1.5), Some(2.5));
        assert_eq!(f.eval(2.0), Some(2.0));
        assert_eq!(f.eval(2.0001), None);
        assert_eq!(f.eval(-0.1), None);
        assert!(TimeFunction::table(vec![(0.0, 1.0), (0.0, 2.0)]).is_err());
    }

    #[test]
    fn polynomial_and_harmonic() {
        let p = TimeFunction::Polynomial(vec![1.0, -2.0, 0.5]);
        assert_eq!(p.eval(2.0), Some(1.0 - 4.0 + 2.0));
        let h = TimeFunction::Harmonic {
            c0: 1.0,
            c1: -50.0,
            omega: 10.0,
        };
        assert_eq!(h.eval(0.0), Some(-49.0));
    }

    fn real_beta_schedule(beta_im: f64) -> CoefficientSchedule {
        CoefficientSchedule::algebraic(
            AlgebraicSchedule {
                alpha: ComplexFunction::zero(),
                beta: ComplexFunction::new(1.0, beta_im),
                gamma: ComplexFunction::zero(),
                delta: ComplexFunction::zero(),
            },
            UnitContext::default(),
        )
    }

    #[test]
    fn validate_accepts_real_beta() {
        assert!(validate(&real_beta_schedule(0.0), (0.0, 1.0), 64).is_ok());
    }

    #[test]
    fn validate_flags_imaginary_beta() {
        let diags = validate(&real_beta_schedule(1e-3), (0.0, 1.0), 64).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].coefficient, "beta");
        assert_eq!(diags[0].t, 0.0);
        assert_eq!(diags[0].condition, Condition::Hermiticity { imaginary: 1e-3 });
    }

    #[test]
    fn validate_flags_short_table() {
        let mut phys = PhysicalSchedule::oscillator(1.0, 1.0);
        phys.stiffness = TimeFunction::table(vec![(0.0, 1.0), (0.5, 2.0)]).unwrap();
        let schedule = CoefficientSchedule::physical(phys, UnitContext::default());
        let diags = validate(&schedule, (0.0, 1.0), 16).unwrap_err();
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].coefficient, "stiffness");
        assert_eq!(diags[0].t, 1.0);
        assert_eq!(diags[0].condition, Condition::Coverage { start: 0.0, end: 0.5 });
    }

    #[test]
    fn validate_flags_vanishing_mass() {
        let phys = PhysicalSchedule::oscillator(TimeFunction::Polynomial(vec![1.0, -1.0]), 1.0);
        let schedule = CoefficientSchedule::physical(phys, UnitContext::default());
        let diags = validate(&schedule, (0.0, 2.0), 3).unwrap_err();
        assert_eq!(diags[0].condition, Condition::ZeroMass);
        assert_eq!(diags[0].t, 1.0);
    }

    #[test]
    fn physical_schedule_evaluates_through_the_map() {
        let units = UnitContext::new(1.0, 0.1f64.sqrt()).unwrap();
        let phys = PhysicalSchedule::oscillator(
            1.0,
            TimeFunction::Harmonic {
                c0: 1.0,
                c1: -50.0,
                omega: 10.0,
            },
        );
        let schedule = CoefficientSchedule::physical(phys, units);
        for t in [0.0, 0.3, 1.7] {
            let alg = schedule.algebraic_at(t).unwrap();
            assert_relative_eq!(alg.beta - alg.alpha.re, 10.0, max_relative = 1e-13);
            assert_eq!(alg.gamma, C64::new(0.0, 0.0));
        }
        let err = real_beta_schedule(0.5).algebraic_at(0.0).unwrap_err();
        assert!(matches!(err, Error::Evaluation { .. }));
    }
}
