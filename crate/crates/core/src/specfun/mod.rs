//! Special functions for complex parameters: gamma, Bessel `J` of complex
//! order, and Mathieu Floquet solutions.

pub mod bessel;
pub mod gamma;
pub mod mathieu;

pub use bessel::{bessel_j, bessel_j_on_sheet, bessel_j_prime, bessel_sheet_shift};
pub use gamma::{complex_gamma, reciprocal_gamma};
pub use mathieu::{
    mathieu_coeffs, mathieu_coeffs_for_strip, mathieu_nu, CoeffTable, FloquetBasis,
    FloquetExponent, FloquetSign, Normalization,
};

use crate::oracle::IntegratorError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecFunError {
    #[error("gamma function has a pole at {0}")]
    GammaPole(i64),
    #[error("Bessel series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },
    #[error("J_kappa is singular at the origin for Re kappa < 0")]
    BesselSingularAtOrigin,
    #[error("Floquet exponent {re}{im:+}i is too close to an integer")]
    DegenerateExponent { re: f64, im: f64 },
    #[error("recurrence has no null vector for the given exponent (residual {residual:e})")]
    NoNullVector { residual: f64 },
    #[error("exponent polishing moved |nu| = {estimate} by {drift:e}")]
    ExponentDrift { estimate: f64, drift: f64 },
    #[error("coefficient tail did not decay within r_max = {r_max}")]
    TruncationExhausted { r_max: usize },
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}
