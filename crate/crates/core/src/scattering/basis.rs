//! Pairs of independent interior solutions on `[0, L]`.

use num_complex::Complex;

use crate::model::{BesselMap, MathieuMap, PotentialSpec, Regime};
use crate::oracle::{integrate_ivp, integrate_through, interior_coefficient, IntegratorConfig};
use crate::scalar::{im, lit, re, tol, Real};
use crate::scattering::ScatterError;
use crate::specfun::{bessel_j, bessel_j_prime, bessel_sheet_shift, FloquetBasis, FloquetSign, Normalization, SpecFunError};

/// Below this normalised Wronskian the analytic pair is replaced by the
/// numerical one.
pub const MIN_PAIR_CONDITION: f64 = 1e-5;

/// `(ψ, dψ/dx)` for each of the two basis solutions.
pub type PairValues<T> = [[Complex<T>; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    FloquetPair,
    BesselPair,
    NumericFallback,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::FloquetPair => "floquet",
            Provenance::BesselPair => "bessel",
            Provenance::NumericFallback => "numeric",
        }
    }
}

/// Why the analytic pair was not used.
#[derive(Debug, Clone, PartialEq)]
pub enum FallbackReason {
    NearIntegerOrder,
    SpecialFunction(SpecFunError),
    PoorConditioning(f64),
}

#[derive(Debug, Clone)]
enum Kind<T> {
    Floquet {
        basis: FloquetBasis<T>,
        map: MathieuMap<T>,
    },
    Bessel {
        map: BesselMap<T>,
    },
    Numeric {
        spec: PotentialSpec<T>,
        energy: T,
        config: IntegratorConfig<T>,
    },
}

/// Two independent interior solutions with their `x`-derivatives.
#[derive(Debug, Clone)]
pub struct InteriorBasis<T> {
    kind: Kind<T>,
    length: T,
    condition: T,
    fallback: Option<FallbackReason>,
}

/// Integrator settings for the numerical pair.
pub fn fallback_config<T: Real>() -> IntegratorConfig<T> {
    IntegratorConfig::with_tolerances(tol(1e-12, 64.0), tol(1e-14, 64.0))
}

/// Builds the regime-appropriate interior pair at energy `energy`.
pub fn build_basis<T: Real>(spec: &PotentialSpec<T>, energy: T) -> Result<InteriorBasis<T>, ScatterError> {
    spec.exterior_wavenumber(energy)?;
    let length = spec.length();
    let analytic = match spec.regime() {
        Regime::SubCritical | Regime::SuperCritical => {
            let map = spec.map_to_mathieu(energy)?;
            match FloquetBasis::new(map.a, map.q, map.delta) {
                Ok(basis) => Ok(Kind::Floquet { basis, map }),
                Err(SpecFunError::DegenerateExponent { .. }) => Err(FallbackReason::NearIntegerOrder),
                Err(SpecFunError::Integrator(e)) => return Err(e.into()),
                Err(e) => Err(FallbackReason::SpecialFunction(e)),
            }
        }
        Regime::Critical => {
            let map = spec.map_to_bessel(energy)?;
            if map.near_integer {
                Err(FallbackReason::NearIntegerOrder)
            } else {
                Ok(Kind::Bessel { map })
            }
        }
    };
    if let Ok(kind) = analytic {
        let mut candidate = InteriorBasis {
            kind,
            length,
            condition: T::zero(),
            fallback: None,
        };
        match candidate.pair_condition() {
            Ok(cond) if cond >= lit(MIN_PAIR_CONDITION) => {
                candidate.condition = cond;
                return Ok(candidate);
            }
            Ok(cond) => {
                return numeric_basis(spec, energy, FallbackReason::PoorConditioning(cond.to_f64().unwrap_or(0.0)));
            }
            Err(ScatterError::SpecFun(e)) => {
                return numeric_basis(spec, energy, FallbackReason::SpecialFunction(e));
            }
            Err(e) => return Err(e),
        }
    }
    numeric_basis(spec, energy, analytic.err().expect("fallback reason"))
}

/// The numerical pair: solutions with `(1, 0)` and `(0, 1)` data at `x = 0`.
pub fn numeric_basis<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    reason: FallbackReason,
) -> Result<InteriorBasis<T>, ScatterError> {
    let mut basis = InteriorBasis {
        kind: Kind::Numeric {
            spec: *spec,
            energy,
            config: fallback_config(),
        },
        length: spec.length(),
        condition: T::zero(),
        fallback: Some(reason),
    };
    basis.condition = basis.pair_condition()?;
    Ok(basis)
}

impl<T: Real> InteriorBasis<T> {
    pub fn provenance(&self) -> Provenance {
        match self.kind {
            Kind::Floquet { .. } => Provenance::FloquetPair,
            Kind::Bessel { .. } => Provenance::BesselPair,
            Kind::Numeric { .. } => Provenance::NumericFallback,
        }
    }

    /// `|W| / max(|u1 u2'|, |u2 u1'|)` at the worse of the two boundaries.
    pub fn condition(&self) -> T {
        self.condition
    }

    pub fn fallback_reason(&self) -> Option<&FallbackReason> {
        self.fallback.as_ref()
    }

    /// Coefficient-table normalisation for the Floquet pair.
    pub fn normalization(&self) -> Option<Normalization> {
        match &self.kind {
            Kind::Floquet { basis, .. } => Some(basis.table.normalization),
            _ => None,
        }
    }

    pub fn floquet(&self) -> Option<&FloquetBasis<T>> {
        match &self.kind {
            Kind::Floquet { basis, .. } => Some(basis),
            _ => None,
        }
    }

    pub fn mathieu_map(&self) -> Option<&MathieuMap<T>> {
        match &self.kind {
            Kind::Floquet { map, .. } => Some(map),
            _ => None,
        }
    }

    pub fn bessel_map(&self) -> Option<&BesselMap<T>> {
        match &self.kind {
            Kind::Bessel { map } => Some(map),
            _ => None,
        }
    }

    pub fn length(&self) -> T {
        self.length
    }

    fn pair_condition(&self) -> Result<T, ScatterError> {
        let vals = self.sample(&[T::zero(), self.length])?;
        let mut worst = T::infinity();
        for v in vals {
            let w = wronskian_of(&v);
            let scale = (v[0][0] * v[1][1]).norm().max((v[1][0] * v[0][1]).norm());
            if !(scale > T::zero()) || !scale.is_finite() || !w.norm().is_finite() {
                return Ok(T::zero());
            }
            worst = worst.min(w.norm() / scale);
        }
        Ok(worst)
    }

    /// Values and `x`-derivatives of both solutions at `x ∈ [0, L]`.
    pub fn eval(&self, x: T) -> Result<PairValues<T>, ScatterError> {
        match &self.kind {
            Kind::Floquet { basis, map } => Ok(eval_floquet(basis, map, x)),
            Kind::Bessel { map } => eval_bessel(map, x),
            Kind::Numeric { spec, energy, config } => {
                let coef = interior_coefficient(spec, *energy);
                let zero = re(T::zero());
                let one = re(T::one());
                let u1 = integrate_ivp(&coef, T::zero(), x, [one, zero], config)?.state;
                let u2 = integrate_ivp(&coef, T::zero(), x, [zero, one], config)?.state;
                Ok([u1, u2])
            }
        }
    }

    /// [`eval`](Self::eval) at many points; the numerical pair integrates
    /// through them in one sweep.
    pub fn sample(&self, xs: &[T]) -> Result<Vec<PairValues<T>>, ScatterError> {
        match &self.kind {
            Kind::Numeric { spec, energy, config } => {
                let coef = interior_coefficient(spec, *energy);
                let mut order: Vec<usize> = (0..xs.len()).collect();
                order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).expect("finite sample points"));
                let sorted: Vec<T> = order.iter().map(|&i| xs[i]).collect();
                let zero = re(T::zero());
                let one = re(T::one());
                let u1 = integrate_through(&coef, T::zero(), &sorted, [one, zero], config)?;
                let u2 = integrate_through(&coef, T::zero(), &sorted, [zero, one], config)?;
                let mut out = vec![[[zero; 2]; 2]; xs.len()];
                for (pos, &slot) in order.iter().enumerate() {
                    out[slot] = [u1[pos].state, u2[pos].state];
                }
                Ok(out)
            }
            _ => xs.iter().map(|&x| self.eval(x)).collect(),
        }
    }

    /// `u1 u2' − u2 u1'` at `x`.
    pub fn wronskian(&self, x: T) -> Result<Complex<T>, ScatterError> {
        Ok(wronskian_of(&self.eval(x)?))
    }
}

pub fn wronskian_of<T: Real>(v: &PairValues<T>) -> Complex<T> {
    v[0][0] * v[1][1] - v[1][0] * v[0][1]
}

fn eval_floquet<T: Real>(basis: &FloquetBasis<T>, map: &MathieuMap<T>, x: T) -> PairValues<T> {
    let y = map.y_of_x(x);
    let s = map.orientation();
    let (f1, d1) = basis.eval_continued(FloquetSign::Plus, y);
    let (f2, d2) = basis.eval_continued(FloquetSign::Minus, y);
    [[f1, d1 * s], [f2, d2 * s]]
}

/// `J_{±κ}(ξ(x))` continued along `ξ = α e^{ix}`: the phase is reduced to
/// `[−π/2, π/2]` and the remaining `m` half-turns are applied as sheet
/// shifts.
fn eval_bessel<T: Real>(map: &BesselMap<T>, x: T) -> Result<PairValues<T>, ScatterError> {
    let m = (x / T::PI()).round();
    let sheet = m.to_i64().expect("sheet index fits i64");
    let xi = map.xi(x - m * T::PI());
    let mut out = [[re(T::zero()); 2]; 2];
    for (slot, order) in [map.kappa, -map.kappa].into_iter().enumerate() {
        let j = bessel_j(order, xi)?;
        let jp = bessel_j_prime(order, xi)?;
        // dψ/dx = iξ J'(ξ); ξ J'(ξ) carries the same sheet factor as J
        let value = bessel_sheet_shift(order, j, sheet);
        let deriv = bessel_sheet_shift(order, im(T::one()) * xi * jp, sheet);
        out[slot] = [value, deriv];
    }
    Ok(out)
}
