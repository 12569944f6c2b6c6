use thiserror::Error;

use crate::hamiltonian::Diagnostic;

/// Errors produced by the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain of the requested operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A coefficient schedule failed validation.
    #[error("invalid schedule: {}", format_diagnostics(.0))]
    InvalidSchedule(Vec<Diagnostic>),

    /// A schedule was evaluated outside the range it defines.
    #[error("schedule evaluation failed for `{coefficient}` at t = {t}: {reason}")]
    Evaluation {
        coefficient: String,
        t: f64,
        reason: String,
    },

    /// The integrator could not keep the solution within tolerance.
    #[error("numerical failure at t = {t}: {reason}")]
    Numerical { t: f64, reason: String },

    /// The Fock expansion tail could not be certified below the tolerance.
    #[error(
        "Fock tail not certified within n_max = {n_max} (|zeta| = {zeta_abs}, achieved tail = {achieved_tail:e})"
    )]
    Convergence {
        zeta_abs: f64,
        achieved_tail: f64,
        n_max: usize,
    },
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
