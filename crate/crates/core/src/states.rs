//! Coherent squeezed states built from a [`MotionFrame`]: nonunitary
//! parameters, normalization, Fock-basis expansion and overlaps.
//!
//! With `ξ = φ/f`, `ζ = g/f` the state is
//! `|Ψ⟩ = Φ Σ (−1)ⁿ Bₙ/√n! |n⟩` where `Bₙ₊₁ = ξ Bₙ − n ζ Bₙ₋₁`.
//! Coefficients are produced directly by the normalized recurrence
//! `cₙ₊₁ = −(ξ cₙ + √n ζ cₙ₋₁)/√(n+1)`, which never forms `n!` or a complex
//! square root.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::motion::MotionFrame;

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_N_MAX: usize = 4096;

/// Number of trailing pair-energy ratios inspected before certifying a tail.
const WINDOW: usize = 16;

/// Displacement `ξ = φ/f` and squeeze `ζ = g/f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeDisplace {
    pub xi: C64,
    pub zeta: C64,
}

pub fn parameters(frame: &MotionFrame) -> SqueezeDisplace {
    SqueezeDisplace {
        xi: frame.varphi / frame.f,
        zeta: frame.g / frame.f,
    }
}

/// `Φ = f^{-1/2} exp(g* φ²/(2f) − |φ|²/2 + iϕ)`, with `f^{-1/2}` on the
/// branch carried by the frame.
pub fn normalization(frame: &MotionFrame) -> C64 {
    let MotionFrame { f, g, varphi, .. } = *frame;
    let exponent = g.conj() * varphi * varphi / (2.0 * f) - 0.5 * varphi.norm_sqr()
        + C64::new(0.0, frame.phase_phi);
    frame.inv_sqrt_f() * exponent.exp()
}

/// `⟨E|E⟩` for the unnormalized `|E⟩ = Σ (−1)ⁿ Bₙ/√n! |n⟩`:
/// `(1 − |ζ|²)^{-1/2} exp[(|ξ|² − Re(ξ²ζ*))/(1 − |ζ|²)]`.
fn generating_norm(p: &SqueezeDisplace) -> f64 {
    let z = p.zeta.norm();
    let gap = (1.0 - z) * (1.0 + z);
    gap.powf(-0.5) * ((p.xi.norm_sqr() - (p.xi * p.xi * p.zeta.conj()).re) / gap).exp()
}

/// `Φ` rescaled to modulus `⟨E|E⟩^{-1/2}`.
///
/// When `|f|² − |g|² = 1` this is `Φ` itself. For strongly squeezed frames
/// the invariant is only resolved to about `|f|²·10⁻¹⁶` in floating point,
/// and this form keeps the expansion normalized to rounding regardless.
fn state_prefactor(frame: &MotionFrame) -> C64 {
    let phi = normalization(frame);
    phi / phi.norm() * generating_norm(&parameters(frame)).powf(-0.5)
}

/// Coherent state `f = 1, g = 0, φ = ξ`.
pub fn coherent_frame(xi: C64) -> MotionFrame {
    MotionFrame::new(0.0, C64::new(1.0, 0.0), C64::new(0.0, 0.0), xi)
}

/// Squeezed vacuum with `ζ = −e^{iθ} tanh r`.
pub fn squeezed_vacuum_frame(r: f64, theta: f64) -> MotionFrame {
    MotionFrame::new(
        0.0,
        C64::new(r.cosh(), 0.0),
        -C64::from_polar(r.sinh(), theta),
        C64::new(0.0, 0.0),
    )
}

/// Truncated Fock expansion `c_0..=c_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution {
    pub coefficients: Vec<C64>,
    pub truncation: usize,
    /// Upper estimate of `Σ_{n>N} |cₙ|²`.
    pub tail_bound: f64,
}

impl FockDistribution {
    pub fn probabilities(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.norm_sqr()).collect()
    }

    pub fn total(&self) -> f64 {
        let mut sum = NeumaierSum::default();
        for c in &self.coefficients {
            sum.add(c.norm_sqr());
        }
        sum.value()
    }
}

/// Aggregates of the photon-number distribution computed without storing it.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonStatistics {
    pub total: f64,
    pub tail_bound: f64,
    pub truncation: usize,
    pub argmax: usize,
    pub max_probability: f64,
    pub mean_number: f64,
    /// The first few `Pₙ`, as many as requested.
    pub head: Vec<f64>,
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

struct Truncation {
    last: usize,
    tail: f64,
}

/// Runs the coefficient recurrence, passing each `(n, cₙ)` to `sink` until
/// the tail is certified below `tol`.
///
/// Certification works on pair energies `e_k = P_{2k} + P_{2k+1}`, which
/// decay geometrically with ratio tending to `|ζ|²` even when the odd or even
/// terms vanish. Once the last [`WINDOW`] ratios are monotone, the tail is
/// bounded by `e_k ρ/(1 − ρ)` with `ρ` the larger of the window maximum and
/// `|ζ|²`.
fn expand(frame: &MotionFrame, tol: f64, n_max: usize, mut sink: impl FnMut(usize, C64)) -> Result<Truncation> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tail tolerance must be positive, got {tol}")));
    }
    let SqueezeDisplace { xi, zeta } = parameters(frame);
    let zeta2 = zeta.norm_sqr();
    let phi = state_prefactor(frame);
    if !phi.is_finite() || phi == C64::new(0.0, 0.0) {
        return Err(Error::Numerical {
            t: frame.t,
            reason: format!("normalization factor is not representable ({phi})"),
        });
    }

    let mut prev = C64::new(0.0, 0.0);
    let mut cur = phi;
    let mut last_nonzero = 0;
    let mut energies: Vec<f64> = Vec::with_capacity(WINDOW + 1);
    let mut pair = 0.0;
    let mut achieved = f64::INFINITY;

    for n in 0..=n_max {
        sink(n, cur);
        if cur != C64::new(0.0, 0.0) {
            last_nonzero = n;
        }
        pair += cur.norm_sqr();
        // Two consecutive exact zeros keep the recurrence at zero forever.
        if n > 0 && cur == C64::new(0.0, 0.0) && prev == C64::new(0.0, 0.0) {
            return Ok(Truncation {
                last: last_nonzero,
                tail: 0.0,
            });
        }
        if n % 2 == 1 {
            if energies.len() == WINDOW + 1 {
                energies.remove(0);
            }
            energies.push(pair);
            pair = 0.0;
            if energies.len() == WINDOW + 1 && energies.iter().all(|&e| e > 0.0) {
                let mut ratios = [0.0; WINDOW];
                for (r, w) in ratios.iter_mut().zip(energies.windows(2)) {
                    *r = w[1] / w[0];
                }
                let rising = ratios.windows(2).all(|w| w[1] >= w[0]);
                let falling = ratios.windows(2).all(|w| w[1] <= w[0]);
                if rising || falling {
                    let rho = ratios.iter().copied().fold(zeta2, f64::max);
                    if rho < 1.0 {
                        let tail = energies[WINDOW] * rho / (1.0 - rho);
                        achieved = tail;
                        if tail < tol {
                            return Ok(Truncation { last: n, tail });
                        }
                    }
                }
            }
        }
        let nf = n as f64;
        let next = -(xi * cur + nf.sqrt() * zeta * prev) / (nf + 1.0).sqrt();
        prev = cur;
        cur = next;
    }
    Err(Error::Convergence {
        zeta_abs: zeta2.sqrt(),
        achieved_tail: achieved,
        n_max,
    })
}

/// Fock coefficients `c_0..=c_N` with `N ≤ n_max` chosen so the certified
/// tail is below `tail_tolerance`. Trailing exact zeros are dropped.
pub fn fock_coefficients(frame: &MotionFrame, tail_tolerance: f64, n_max: usize) -> Result<FockDistribution> {
    let mut coefficients = Vec::new();
    let trunc = expand(frame, tail_tolerance, n_max, |_, c| coefficients.push(c))?;
    let keep = if trunc.tail == 0.0 {
        trunc.last + 1
    } else {
        coefficients.len()
    };
    coefficients.truncate(keep);
    Ok(FockDistribution {
        truncation: coefficients.len() - 1,
        coefficients,
        tail_bound: trunc.tail,
    })
}

/// `Pₙ = |cₙ|²` for `n = 0..=N`.
pub fn transition_probabilities(frame: &MotionFrame, tail_tolerance: f64, n_max: usize) -> Result<Vec<f64>> {
    Ok(fock_coefficients(frame, tail_tolerance, n_max)?.probabilities())
}

/// Sum, peak and mean of `Pₙ` streamed over the certified expansion; keeps
/// only the first `keep` probabilities. Suited to strongly squeezed states
/// whose expansions run to millions of terms.
pub fn photon_statistics(frame: &MotionFrame, tail_tolerance: f64, n_max: usize, keep: usize) -> Result<PhotonStatistics> {
    let mut total = NeumaierSum::default();
    let mut mean = NeumaierSum::default();
    let mut head = Vec::with_capacity(keep.min(1 << 16));
    let mut argmax = 0;
    let mut max_probability = f64::NEG_INFINITY;
    let trunc = expand(frame, tail_tolerance, n_max, |n, c| {
        let p = c.norm_sqr();
        total.add(p);
        mean.add(n as f64 * p);
        if p > max_probability {
            max_probability = p;
            argmax = n;
        }
        if n < keep {
            head.push(p);
        }
    })?;
    let truncation = trunc.last;
    head.truncate(truncation + 1);
    Ok(PhotonStatistics {
        total: total.value(),
        tail_bound: trunc.tail,
        truncation,
        argmax,
        max_probability,
        mean_number: mean.value(),
        head,
    })
}

/// `⟨Ψ₁|Ψ₂⟩` in closed form:
///
/// ```text
/// Φ₁* Φ₂ (1 − ζ₁*ζ₂)^{-1/2} exp[(ξ₁*ξ₂ − ½ξ₁*²ζ₂ − ½ξ₂²ζ₁*)/(1 − ζ₁*ζ₂)]
/// ```
///
/// `Re(1 − ζ₁*ζ₂) > 0`, so the principal root there is continuous; the only
/// branch dependence is through `f^{-1/2}`, which each frame carries. The
/// `Φ` factors use the same modulus as [`fock_coefficients`].
pub fn overlap(frame1: &MotionFrame, frame2: &MotionFrame) -> C64 {
    let p1 = parameters(frame1);
    let p2 = parameters(frame2);
    let one = C64::new(1.0, 0.0);
    let denom = one - p1.zeta.conj() * p2.zeta;
    let xi1c = p1.xi.conj();
    let exponent = (xi1c * p2.xi - 0.5 * xi1c * xi1c * p2.zeta - 0.5 * p2.xi * p2.xi * p1.zeta.conj()) / denom;
    state_prefactor(frame1).conj() * state_prefactor(frame2) / denom.sqrt() * exponent.exp()
}
