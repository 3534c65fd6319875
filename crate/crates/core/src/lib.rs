//! Exact scattering for a PT-symmetric optical lattice `W0 (cos²x + i V0 sin 2x)`
//! confined to `[0, nπ]` inside a uniform background `W0`.
//!
//! The numerical core is generic over the real scalar ([`Real`]: `f32` or
//! `f64`); the aliases at the crate root fix it to `f64`, which is what all
//! quoted tolerances refer to.

pub mod linalg;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod scattering;
pub mod singularity;
pub mod specfun;

pub use model::{Regime, SIGN_CONVENTION};
pub use oracle::Side;
pub use scalar::Real;

/// Double-precision complex scalar.
pub type Complex64 = num_complex::Complex<f64>;
pub type PotentialSpec = model::PotentialSpec<f64>;
pub type MathieuMap = model::MathieuMap<f64>;
pub type BesselMap = model::BesselMap<f64>;
pub type CoeffTable = specfun::CoeffTable<f64>;
pub type FloquetBasis = specfun::FloquetBasis<f64>;
pub type IntegratorConfig = oracle::IntegratorConfig<f64>;
pub type InteriorBasis = scattering::InteriorBasis<f64>;
pub type ScatteringResult = scattering::ScatteringResult<f64>;
pub type SingularityCandidate = singularity::SingularityCandidate<f64>;
