//! Means, spreads, uncertainty products, energy and the x-representation of a
//! coherent squeezed state.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hamiltonian::{AlgebraicCoefficients, CoefficientSchedule, UnitContext};
use crate::motion::{u_of, MotionFrame};

/// Default number of samples for [`default_grid`].
pub const DEFAULT_GRID_POINTS: usize = 1025;
/// Default half-width of [`default_grid`] in units of `σ_x`.
pub const DEFAULT_GRID_SIGMAS: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservableRecord {
    pub t: f64,
    pub xbar: f64,
    pub pbar: f64,
    pub sigma_x: f64,
    pub sigma_p: f64,
    pub sigma_xp: f64,
    pub heisenberg: f64,
    pub sr_invariant: f64,
    pub mean_energy: f64,
}

/// `x̄ = √2 l Re u`, `p̄ = √2 (ħ/l) Im u`.
pub fn means(frame: &MotionFrame, units: &UnitContext) -> (f64, f64) {
    let u = u_of(frame);
    (SQRT_2 * units.l() * u.re, SQRT_2 * units.hbar() / units.l() * u.im)
}

/// The `φ` that places the state with coefficients `(f, g)` at `(x̄, p̄)`.
pub fn varphi_from_means(xbar: f64, pbar: f64, f: C64, g: C64, units: &UnitContext) -> C64 {
    let (hbar, l) = (units.hbar(), units.l());
    -((f + g) * (xbar / l) + C64::new(0.0, l * pbar / hbar) * (f - g)) / SQRT_2
}

/// `(σ_x, σ_p, σ_xp)`.
pub fn deviations(frame: &MotionFrame, units: &UnitContext) -> (f64, f64, f64) {
    let (hbar, l) = (units.hbar(), units.l());
    let MotionFrame { f, g, .. } = *frame;
    (
        l / SQRT_2 * (f - g).norm(),
        hbar / (l * SQRT_2) * (f + g).norm(),
        hbar * (f * g.conj()).im,
    )
}

/// `(σ_x σ_p, σ_x² σ_p² − σ_xp²)`.
///
/// The Schrödinger–Robertson invariant equals `(ħ²/4)(|f|² − |g|²)²`
/// identically; that form is used because the direct difference cancels
/// catastrophically once `|f|` grows large.
pub fn uncertainty(frame: &MotionFrame, units: &UnitContext) -> (f64, f64) {
    let (sx, sp, _) = deviations(frame, units);
    let inv = frame.invariant();
    let hbar = units.hbar();
    (sx * sp, 0.25 * hbar * hbar * inv * inv)
}

/// `⟨H⟩ = ħ Re[2γ*u + α*u² − α f g* + β(|g|² + |u|²) + δ]`.
pub fn mean_energy(frame: &MotionFrame, alg: &AlgebraicCoefficients, units: &UnitContext) -> f64 {
    let u = u_of(frame);
    let MotionFrame { f, g, .. } = *frame;
    let AlgebraicCoefficients {
        alpha,
        beta,
        gamma,
        delta,
    } = *alg;
    let inner = 2.0 * gamma.conj() * u + alpha.conj() * u * u - alpha * f * g.conj()
        + beta * (g.norm_sqr() + u.norm_sqr())
        + delta;
    units.hbar() * inner.re
}

pub fn record(frame: &MotionFrame, alg: &AlgebraicCoefficients, units: &UnitContext) -> ObservableRecord {
    let (xbar, pbar) = means(frame, units);
    let (sigma_x, sigma_p, sigma_xp) = deviations(frame, units);
    let (heisenberg, sr_invariant) = uncertainty(frame, units);
    ObservableRecord {
        t: frame.t,
        xbar,
        pbar,
        sigma_x,
        sigma_p,
        sigma_xp,
        heisenberg,
        sr_invariant,
        mean_energy: mean_energy(frame, alg, units),
    }
}

/// Records along a trajectory, evaluating the schedule at each frame time.
pub fn records(frames: &[MotionFrame], schedule: &CoefficientSchedule) -> Result<Vec<ObservableRecord>> {
    frames
        .iter()
        .map(|fr| Ok(record(fr, &schedule.algebraic_at(fr.t)?, &schedule.units)))
        .collect()
}

/// Position-space samples of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct WavefunctionGrid {
    pub x: Vec<f64>,
    pub psi: Vec<C64>,
    pub rho: Vec<f64>,
}

impl WavefunctionGrid {
    /// Trapezoidal `∫ρ dx`.
    pub fn norm(&self) -> f64 {
        trapezoid(&self.x, |i| self.rho[i])
    }

    /// Trapezoidal mean and variance of `ρ`.
    pub fn moments(&self) -> (f64, f64) {
        let norm = self.norm();
        let mean = trapezoid(&self.x, |i| self.x[i] * self.rho[i]) / norm;
        let var = trapezoid(&self.x, |i| (self.x[i] - mean).powi(2) * self.rho[i]) / norm;
        (mean, var)
    }
}

fn trapezoid(x: &[f64], y: impl Fn(usize) -> f64) -> f64 {
    (1..x.len()).map(|i| 0.5 * (x[i] - x[i - 1]) * (y(i) + y(i - 1))).sum()
}

/// `n` evenly spaced points on `[a, b]`.
pub fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// [`DEFAULT_GRID_POINTS`] points spanning `x̄ ± 8σ_x`.
pub fn default_grid(frame: &MotionFrame, units: &UnitContext) -> Vec<f64> {
    let (xbar, _) = means(frame, units);
    let (sx, _, _) = deviations(frame, units);
    let half = DEFAULT_GRID_SIGMAS * sx;
    uniform_grid(xbar - half, xbar + half, DEFAULT_GRID_POINTS)
}

/// `Ψ(x)` of the state:
///
/// ```text
/// (l√π)^{-1/2} (f − g)^{-1/2} exp[−((f+g)/(f−g))(x−x̄)²/(2l²) + i p̄(2x−x̄)/(2ħ) − iϑ/ħ]
/// ```
///
/// with `(f − g)^{-1/2} = f^{-1/2} (1 − ζ)^{-1/2}`, the first factor on the
/// frame's branch and the second principal (`Re(1 − ζ) > 0`).
pub fn psi_at(frame: &MotionFrame, x: f64, units: &UnitContext) -> C64 {
    let (hbar, l) = (units.hbar(), units.l());
    let MotionFrame { f, g, .. } = *frame;
    let (xbar, pbar) = means(frame, units);
    let prefactor = (l * PI.sqrt()).powf(-0.5) * frame.inv_sqrt_f() / (C64::new(1.0, 0.0) - g / f).sqrt();
    let dx = x - xbar;
    let exponent = -(f + g) / (f - g) * (dx * dx / (2.0 * l * l))
        + C64::new(0.0, pbar * (2.0 * x - xbar) / (2.0 * hbar) - frame.phase_vartheta / hbar);
    prefactor * exponent.exp()
}

pub fn wavefunction(frame: &MotionFrame, grid: &[f64], units: &UnitContext) -> Result<WavefunctionGrid> {
    if let Some(bad) = grid.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("wavefunction grid contains {bad}")));
    }
    let psi: Vec<C64> = grid.iter().map(|&x| psi_at(frame, x, units)).collect();
    Ok(WavefunctionGrid {
        x: grid.to_vec(),
        rho: psi.iter().map(|p| p.norm_sqr()).collect(),
        psi,
    })
}

/// `Ψ₀ … Ψ_n` at `x`, with `Ψ_n(x) = hₙ(x/l)/√l` and `hₙ` the orthonormal
/// Hermite functions.
///
/// These are the number states of `a = (x/l + i l p/ħ)/√2`, the operator
/// behind [`means`]. The extra `(−1)ⁿ` of the textbook form belongs to the
/// parity-flipped basis and would mirror the displacement of a Fock series.
pub fn fock_wavefunctions(n: usize, x: f64, units: &UnitContext) -> Vec<f64> {
    let l = units.l();
    let y = x / l;
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25) * (-0.5 * y * y).exp();
    for k in 0..=n {
        out.push(cur / l.sqrt());
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * y * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    out
}

pub fn fock_wavefunction(n: usize, x: f64, units: &UnitContext) -> f64 {
    fock_wavefunctions(n, x, units)[n]
}

/// Largest central-difference residuals of Hamilton's equations
/// `dx̄/dt = p̄/m + Ωx̄ + V`, `dp̄/dt = −kx̄ − Ωp̄ − F` over the interior of a
/// uniformly spaced trajectory.
pub fn hamilton_residual(trajectory: &[ObservableRecord], schedule: &CoefficientSchedule) -> Result<(f64, f64)> {
    if trajectory.len() < 3 {
        return Err(Error::Domain(format!(
            "Hamilton residual needs at least 3 samples, got {}",
            trajectory.len()
        )));
    }
    let h = trajectory[1].t - trajectory[0].t;
    let uniform = trajectory
        .windows(2)
        .all(|w| ((w[1].t - w[0].t) - h).abs() <= 1e-9 * h.abs().max(f64::MIN_POSITIVE));
    if !(h > 0.0) || !uniform {
        return Err(Error::Domain("Hamilton residual needs a uniformly increasing time grid".into()));
    }
    let mut rx: f64 = 0.0;
    let mut rp: f64 = 0.0;
    for w in trajectory.windows(3) {
        let (a, mid, b) = (&w[0], &w[1], &w[2]);
        let phys = schedule.physical_at(mid.t)?;
        let dx = (b.xbar - a.xbar) / (2.0 * h);
        let dp = (b.pbar - a.pbar) / (2.0 * h);
        rx = rx.max((dx - (mid.pbar / phys.mass + phys.omega * mid.xbar + phys.velocity)).abs());
        rp = rp.max((dp + phys.stiffness * mid.xbar + phys.omega * mid.pbar + phys.force).abs());
    }
    Ok((rx, rp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{AlgebraicCoefficients, CoefficientSchedule};
    use crate::motion::{evolve, InitialConditions, IntegratorSettings};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn frame(f: C64, g: C64, varphi: C64) -> MotionFrame {
        MotionFrame::new(0.0, f, g, varphi)
    }

    #[test]
    fn means_examples() {
        let units = UnitContext::default();
        assert_eq!(means(&frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), &units), (0.0, 0.0));
        let fig1 = UnitContext::new(1.0, 0.1f64.sqrt()).unwrap();
        let (x, p) = means(&frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)), &fig1);
        assert_eq!(x, 0.0);
        assert_abs_diff_eq!(p, 20f64.sqrt(), epsilon = 1e-14);
        let phi = varphi_from_means(SQRT_2, 0.0, c(1.0, 0.0), c(0.0, 0.0), &units);
        assert_abs_diff_eq!((phi - c(-1.0, 0.0)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn means_round_trip() {
        let units = UnitContext::new(0.6, 1.7).unwrap();
        let s = 1.24f64.sqrt();
        let (f, g) = (c(1.3, 0.4) / s, c(0.5, -0.6) / s);
        let phi = varphi_from_means(0.8, -2.1, f, g, &units);
        let (x, p) = means(&frame(f, g, phi), &units);
        assert_abs_diff_eq!(x, 0.8, epsilon = 1e-12);
        assert_abs_diff_eq!(p, -2.1, epsilon = 1e-12);
    }

    #[test]
    fn deviation_examples() {
        let units = UnitContext::default();
        let (sx, sp, sxp) = deviations(&frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), &units);
        assert_abs_diff_eq!(sx, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sp, 1.0 / SQRT_2, epsilon = 1e-15);
        assert_eq!(sxp, 0.0);
        let sq = frame(c(1.0f64.cosh(), 0.0), c(-1.0f64.sinh(), 0.0), c(0.0, 0.0));
        let (sx, sp, sxp) = deviations(&sq, &units);
        assert_abs_diff_eq!(sx, 1.0f64.exp() / SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(sp, (-1.0f64).exp() / SQRT_2, epsilon = 1e-15);
        assert_eq!(sxp, 0.0);
    }

    #[test]
    fn uncertainty_examples() {
        let units = UnitContext::new(2.0, 1.0).unwrap();
        let (h, sr) = uncertainty(&frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), &units);
        assert_abs_diff_eq!(h, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sr, 1.0, epsilon = 1e-15);
        let tilted = frame(C64::from_polar(SQRT_2, PI / 4.0), c(1.0, 0.0), c(0.0, 0.0));
        let (h, _) = uncertainty(&tilted, &units);
        assert_abs_diff_eq!(h, 5f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn energy_examples() {
        let units = UnitContext::default();
        let vac = frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let osc = AlgebraicCoefficients {
            alpha: c(0.0, 0.0),
            beta: 3.0,
            gamma: c(0.0, 0.0),
            delta: 1.5,
        };
        assert_abs_diff_eq!(mean_energy(&vac, &osc, &units), 1.5, epsilon = 1e-15);
        let sq = frame(c(1.0f64.cosh(), 0.0), c(-1.0f64.sinh(), 0.0), c(0.0, 0.0));
        let number = AlgebraicCoefficients {
            alpha: c(0.0, 0.0),
            beta: 1.0,
            gamma: c(0.0, 0.0),
            delta: 0.0,
        };
        assert_abs_diff_eq!(mean_energy(&sq, &number, &units), 1.0f64.sinh().powi(2), epsilon = 1e-14);
        assert_abs_diff_eq!(mean_energy(&sq, &number, &units), 1.381_098, epsilon = 1e-6);
    }

    #[test]
    fn ground_state_wavefunction() {
        let units = UnitContext::new(1.0, 0.8).unwrap();
        let vac = frame(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        for x in [-1.0f64, 0.0, 0.3, 2.0] {
            let expected = (0.8 * PI.sqrt()).powf(-0.5) * (-x * x / (2.0 * 0.64)).exp();
            let psi = psi_at(&vac, x, &units);
            assert_abs_diff_eq!(psi.re, expected, epsilon = 1e-15);
            assert_abs_diff_eq!(psi.im, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(fock_wavefunction(0, x, &units), expected, epsilon = 1e-15);
        }
        let w = wavefunction(&vac, &default_grid(&vac, &units), &units).unwrap();
        assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-12);
        assert!(wavefunction(&vac, &[0.0, f64::NAN], &units).is_err());
    }

    #[test]
    fn fock_wavefunction_examples() {
        let units = UnitContext::default();
        assert_abs_diff_eq!(fock_wavefunction(0, 0.0, &units), 0.751_125_544_464_942_5, epsilon = 1e-15);
        assert_eq!(fock_wavefunction(1, 0.0, &units), 0.0);
    }

    #[test]
    fn hamilton_residual_needs_three_samples() {
        let schedule = CoefficientSchedule::constant(
            AlgebraicCoefficients {
                alpha: c(0.0, 0.0),
                beta: 1.0,
                gamma: c(0.0, 0.0),
                delta: 0.5,
            },
            UnitContext::default(),
        );
        let frames = evolve(&schedule, &InitialConditions::VACUUM, &[0.0, 0.1], &IntegratorSettings::default()).unwrap();
        let recs = records(&frames, &schedule).unwrap();
        assert!(matches!(hamilton_residual(&recs, &schedule), Err(Error::Domain(_))));
    }
}
