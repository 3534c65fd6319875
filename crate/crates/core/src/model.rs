//! The confined lattice potential and the coordinate maps that reduce the
//! interior Schrödinger equation to Mathieu or Bessel form.
//!
//! Throughout, the wave equation is `−ψ'' + V(x) ψ = E ψ` on the whole line,
//! with `V(x) = W0 (cos²x + i V0 sin 2x)` for `0 < x < L = nπ` and `V = W0`
//! outside. Exterior states are plane waves with `k = √(E − W0)`.
//!
//! Under this convention the interior equation becomes
//!
//! * `V0 < 1/2`: Mathieu with `y = x − iδ`, `δ = ½ artanh(2V0)`,
//!   `a = E − W0/2`, `q = (W0/4)√(1 − 4V0²)`;
//! * `V0 > 1/2`: Mathieu with `ȳ = π/4 − x + iδ`, `δ = ½ artanh(1/(2V0))`,
//!   `a = E − W0/2`, `q = i(W0/4)√(4V0² − 1)`;
//! * `V0 = 1/2`: Bessel of order `κ = √(E − W0/2)` in `ξ = √(W0/2) e^{ix}`.

use num_complex::Complex;

use crate::scalar::{distance_to_integer, im, lit, re, Real};

/// Half-width of the band around `V0 = 1/2` routed to the Bessel path.
pub const CRITICAL_BAND: f64 = 1e-9;

/// Distance to an integer below which Floquet exponents and Bessel orders
/// are treated as degenerate.
pub const NEAR_INTEGER: f64 = 1e-6;

/// Human-readable statement of the sign convention, attached to outputs.
pub const SIGN_CONVENTION: &str =
    "-psi'' + V(x) psi = E psi; k = sqrt(E - W0); a = E - W0/2; kappa = sqrt(E - W0/2)";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid potential parameter `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("energy {energy} does not exceed the background W0 = {w0}; exterior is evanescent")]
    Evanescent { energy: f64, w0: f64 },
    #[error("operation requires the {expected:?} regime, got {actual:?}")]
    RegimeMismatch { expected: Regime, actual: Regime },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    SubCritical,
    Critical,
    SuperCritical,
}

impl Regime {
    pub fn classify<T: Real>(v0: T) -> Self {
        let half = lit::<T>(0.5);
        let band = lit::<T>(CRITICAL_BAND);
        if (v0 - half).abs() <= band {
            Regime::Critical
        } else if v0 < half {
            Regime::SubCritical
        } else {
            Regime::SuperCritical
        }
    }
}

/// Physical configuration of the confined lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec<T> {
    w0: T,
    v0: T,
    n_cells: u32,
}

impl<T: Real> PotentialSpec<T> {
    pub fn new(w0: T, v0: T, n_cells: u32) -> Result<Self, ModelError> {
        if !(w0 > T::zero()) || !w0.is_finite() {
            return Err(ModelError::InvalidSpec {
                field: "w0",
                reason: format!("must be positive and finite, got {w0}"),
            });
        }
        if !(v0 >= T::zero()) || !v0.is_finite() {
            return Err(ModelError::InvalidSpec {
                field: "v0",
                reason: format!("must be non-negative and finite, got {v0}"),
            });
        }
        if n_cells == 0 {
            return Err(ModelError::InvalidSpec {
                field: "cells",
                reason: "at least one cell is required".into(),
            });
        }
        Ok(Self { w0, v0, n_cells })
    }

    pub fn w0(&self) -> T {
        self.w0
    }

    pub fn v0(&self) -> T {
        self.v0
    }

    pub fn n_cells(&self) -> u32 {
        self.n_cells
    }

    /// Same lattice with a different non-Hermitian strength.
    pub fn with_v0(&self, v0: T) -> Result<Self, ModelError> {
        Self::new(self.w0, v0, self.n_cells)
    }

    /// `L = nπ`
    pub fn length(&self) -> T {
        T::from_u32(self.n_cells).expect("cell count representable") * T::PI()
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.v0)
    }

    pub fn contains(&self, x: T) -> bool {
        x > T::zero() && x < self.length()
    }

    /// `W0 (cos²x + i V0 sin 2x)` without the confinement.
    pub fn lattice_value(&self, x: T) -> Complex<T> {
        let c = x.cos();
        Complex::new(self.w0 * c * c, self.w0 * self.v0 * (x + x).sin())
    }

    /// `V(x)` on the whole line.
    pub fn potential_value(&self, x: T) -> Complex<T> {
        if self.contains(x) {
            self.lattice_value(x)
        } else {
            re(self.w0)
        }
    }

    /// Interior value written in the regime-specific form
    /// `(W0/2)(1 + U1)`, `(W0/2)(1 + e^{2ix})` or `(W0/2)(1 + iU2)`.
    pub fn rewritten_value(&self, x: T) -> Complex<T> {
        let half_w0 = self.w0 * lit(0.5);
        let one = T::one();
        let two = lit::<T>(2.0);
        let four_v0_sq = lit::<T>(4.0) * self.v0 * self.v0;
        let shape = match self.regime() {
            Regime::SubCritical => {
                let arg = Complex::new(two * x, -(two * self.v0).atanh());
                re((one - four_v0_sq).sqrt()) * arg.cos()
            }
            Regime::Critical => im(two * x).exp(),
            Regime::SuperCritical => {
                let arg = Complex::new(two * x, -(one / (two * self.v0)).atanh());
                im((four_v0_sq - one).sqrt()) * arg.sin()
            }
        };
        (shape + one) * half_w0
    }

    /// Exterior wavenumber `k = √(E − W0)`.
    pub fn exterior_wavenumber(&self, energy: T) -> Result<T, ModelError> {
        if !(energy > self.w0) {
            return Err(ModelError::Evanescent {
                energy: energy.to_f64().unwrap_or(f64::NAN),
                w0: self.w0.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok((energy - self.w0).sqrt())
    }

    pub fn map_to_mathieu(&self, energy: T) -> Result<MathieuMap<T>, ModelError> {
        let two = lit::<T>(2.0);
        let quarter_w0 = self.w0 / lit(4.0);
        let a = re(energy - self.w0 / two);
        let four_v0_sq = lit::<T>(4.0) * self.v0 * self.v0;
        match self.regime() {
            Regime::SubCritical => Ok(MathieuMap {
                a,
                q: re(quarter_w0 * (T::one() - four_v0_sq).sqrt()),
                delta: (two * self.v0).atanh() / two,
                pre_rotation: T::zero(),
            }),
            Regime::SuperCritical => Ok(MathieuMap {
                a,
                q: im(quarter_w0 * (four_v0_sq - T::one()).sqrt()),
                delta: (T::one() / (two * self.v0)).atanh() / two,
                pre_rotation: T::FRAC_PI_4(),
            }),
            actual => Err(ModelError::RegimeMismatch {
                expected: Regime::SubCritical,
                actual,
            }),
        }
    }

    pub fn map_to_bessel(&self, energy: T) -> Result<BesselMap<T>, ModelError> {
        match self.regime() {
            Regime::Critical => {}
            actual => {
                return Err(ModelError::RegimeMismatch {
                    expected: Regime::Critical,
                    actual,
                })
            }
        }
        let kappa = re(energy - self.w0 / lit(2.0)).sqrt();
        let near = lit::<T>(NEAR_INTEGER);
        Ok(BesselMap {
            kappa,
            prefactor: (self.w0 / lit(2.0)).sqrt(),
            near_integer: distance_to_integer(kappa) < near,
            transparency_case: distance_to_integer(kappa / T::PI()) < near,
        })
    }
}

/// Parameters of the Mathieu reduction in either non-critical regime.
///
/// The Mathieu variable is `y(x) = orientation·x + offset`; for the
/// sub-critical map `y = x − iδ`, for the super-critical one
/// `ȳ = π/4 − (x − iδ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MathieuMap<T> {
    pub a: Complex<T>,
    pub q: Complex<T>,
    pub delta: T,
    pub pre_rotation: T,
}

impl<T: Real> MathieuMap<T> {
    /// `dy/dx`, either `+1` or `−1`.
    pub fn orientation(&self) -> T {
        if self.pre_rotation == T::zero() {
            T::one()
        } else {
            -T::one()
        }
    }

    pub fn y_of_x(&self, x: T) -> Complex<T> {
        let shifted = Complex::new(x, -self.delta);
        if self.pre_rotation == T::zero() {
            shifted
        } else {
            re(self.pre_rotation) - shifted
        }
    }
}

/// Parameters of the Bessel reduction at the critical point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselMap<T> {
    pub kappa: Complex<T>,
    /// `ξ(x) = prefactor · e^{ix}`
    pub prefactor: T,
    pub near_integer: bool,
    /// `κ` is an integer multiple of π.
    pub transparency_case: bool,
}

impl<T: Real> BesselMap<T> {
    pub fn xi(&self, x: T) -> Complex<T> {
        Complex::from_polar(self.prefactor, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    type C = Complex<f64>;

    #[test]
    fn potential_examples() {
        let s = PotentialSpec::new(4.0, 0.5, 1).unwrap();
        assert!((s.rewritten_value(0.0) - C::new(4.0, 0.0)).norm() < 1e-15);
        let s = PotentialSpec::new(4.0, 0.3, 1).unwrap();
        assert!((s.potential_value(FRAC_PI_4) - C::new(2.0, 1.2)).norm() < 1e-14);
        assert_eq!(s.potential_value(-1.0), C::new(4.0, 0.0));
        assert_eq!(s.potential_value(PI + 0.1), C::new(4.0, 0.0));
    }

    #[test]
    fn invalid_specs() {
        assert!(matches!(
            PotentialSpec::new(0.0, 0.3, 1),
            Err(ModelError::InvalidSpec { field: "w0", .. })
        ));
        assert!(matches!(
            PotentialSpec::new(4.0, -0.1, 1),
            Err(ModelError::InvalidSpec { field: "v0", .. })
        ));
        assert!(matches!(
            PotentialSpec::new(4.0, 0.3, 0),
            Err(ModelError::InvalidSpec { field: "cells", .. })
        ));
    }

    #[test]
    fn regime_examples() {
        assert_eq!(Regime::classify(0.3), Regime::SubCritical);
        assert_eq!(Regime::classify(0.5), Regime::Critical);
        assert_eq!(Regime::classify(0.5 + 5e-10), Regime::Critical);
        assert_eq!(Regime::classify(0.5 + 2e-9), Regime::SuperCritical);
        assert_eq!(Regime::classify(0.8), Regime::SuperCritical);
    }

    #[test]
    fn wavenumber() {
        let s = PotentialSpec::new(4.0, 0.3, 1).unwrap();
        assert_eq!(s.exterior_wavenumber(5.0).unwrap(), 1.0);
        assert_eq!(s.exterior_wavenumber(8.0).unwrap(), 2.0);
        assert!(matches!(s.exterior_wavenumber(4.0), Err(ModelError::Evanescent { .. })));
    }

    #[test]
    fn mathieu_map_examples() {
        let m = PotentialSpec::new(4.0, 0.3, 1).unwrap().map_to_mathieu(5.0).unwrap();
        assert_eq!(m.a, C::new(3.0, 0.0));
        assert!((m.q - C::new(0.8, 0.0)).norm() < 1e-15);
        assert!((m.delta - 0.5 * 0.6f64.atanh()).abs() < 1e-15);
        assert_eq!(m.orientation(), 1.0);

        let m = PotentialSpec::new(4.0, 0.8, 1).unwrap().map_to_mathieu(5.0).unwrap();
        assert_eq!(m.a, C::new(3.0, 0.0));
        assert!((m.q - C::new(0.0, 1.56f64.sqrt())).norm() < 1e-15);
        assert_eq!(m.pre_rotation, FRAC_PI_4);
        assert_eq!(m.orientation(), -1.0);

        let crit = PotentialSpec::new(4.0, 0.5, 1).unwrap();
        assert!(crit.map_to_mathieu(5.0).is_err());
    }

    #[test]
    fn q_vanishes_continuously_at_threshold() {
        let mut last = f64::INFINITY;
        for v0 in [0.49, 0.499, 0.4999, 0.49999] {
            let q = PotentialSpec::new(4.0, v0, 1).unwrap().map_to_mathieu(5.0).unwrap().q.re;
            assert!(q > 0.0 && q < last);
            last = q;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn bessel_map_examples() {
        let s = PotentialSpec::new(4.0, 0.5, 1).unwrap();
        let b = s.map_to_bessel(5.0).unwrap();
        assert!((b.kappa.re - 3f64.sqrt()).abs() < 1e-15);
        assert!(!b.near_integer && !b.transparency_case);
        let b = s.map_to_bessel(2.0 + PI * PI).unwrap();
        assert!((b.kappa.re - PI).abs() < 1e-14);
        assert!(!b.near_integer && b.transparency_case);
        let b = s.map_to_bessel(3.0).unwrap();
        assert!(b.near_integer);
        assert!((b.xi(0.0).norm() - 2f64.sqrt()).abs() < 1e-15);
        assert!(PotentialSpec::new(4.0, 0.3, 1).unwrap().map_to_bessel(5.0).is_err());
    }

    #[test]
    fn mathieu_variable() {
        let m = PotentialSpec::new(4.0, 0.3, 1).unwrap().map_to_mathieu(5.0).unwrap();
        assert_eq!(m.y_of_x(1.0), C::new(1.0, -m.delta));
        let m = PotentialSpec::new(4.0, 0.8, 1).unwrap().map_to_mathieu(5.0).unwrap();
        assert!((m.y_of_x(1.0) - C::new(FRAC_PI_4 - 1.0, m.delta)).norm() < 1e-15);
    }
}
