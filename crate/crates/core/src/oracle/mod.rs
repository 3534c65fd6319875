//! Direct numerical integration of the wave equation, used as ground truth
//! for the special-function route and as the source of Floquet monodromy.

pub mod integrator;

use num_complex::Complex;

pub use integrator::{
    integrate_ivp, integrate_through, IntegratorConfig, IntegratorError, IvpSolution, State,
};

use crate::model::{ModelError, PotentialSpec};
use crate::scalar::{im, lit, re, tol, Real};

/// Incidence side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

/// One-period (π) transfer matrix of `ψ'' + (a − 2q cos 2y) ψ = 0`.
///
/// Column `j` holds `(ψ, ψ')` at `y = π` for the solution starting from the
/// `j`-th unit vector at `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalMatrix<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> FundamentalMatrix<T> {
    pub fn trace(&self) -> Complex<T> {
        self.m[0][0] + self.m[1][1]
    }

    pub fn determinant(&self) -> Complex<T> {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// Both eigenvalues, roots of `λ² − tr λ + det = 0`.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let tr = self.trace();
        let disc = (tr * tr - self.determinant() * lit::<T>(4.0)).sqrt();
        let two = lit::<T>(2.0);
        [(tr + disc) / two, (tr - disc) / two]
    }
}

/// Tolerances used for monodromy; tighter than the scattering oracle since
/// the Floquet exponent feeds the analytic route.
pub fn monodromy_config<T: Real>() -> IntegratorConfig<T> {
    IntegratorConfig::with_tolerances(tol(1e-13, 64.0), tol(1e-15, 64.0))
}

pub fn monodromy<T: Real>(
    a: Complex<T>,
    q: Complex<T>,
    config: &IntegratorConfig<T>,
) -> Result<FundamentalMatrix<T>, IntegratorError> {
    let two = lit::<T>(2.0);
    let coef = move |y: T| q * ((y + y).cos() * two) - a;
    let zero = re(T::zero());
    let one = re(T::one());
    let c0 = integrate_ivp(coef, T::zero(), T::PI(), [one, zero], config)?.state;
    let c1 = integrate_ivp(coef, T::zero(), T::PI(), [zero, one], config)?.state;
    Ok(FundamentalMatrix {
        m: [[c0[0], c1[0]], [c0[1], c1[1]]],
    })
}

/// `ψ'' = (V(x) − E) ψ` inside the cell.
pub fn interior_coefficient<T: Real>(spec: &PotentialSpec<T>, energy: T) -> impl Fn(T) -> Complex<T> + '_ {
    move |x| spec.lattice_value(x) - energy
}

/// Transmission and reflection amplitudes from direct integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleAmplitudes<T> {
    pub t: Complex<T>,
    pub r: Complex<T>,
    pub error_estimate: T,
}

/// Amplitudes for incidence from `side`, by integrating from the transmitted
/// side towards the incident one with purely outgoing data.
///
/// Left incidence: `e^{ikx} + R e^{−ikx}` for `x < 0`, `T e^{ikx}` for `x > L`.
/// Right incidence: `e^{−ik(x−L)} + R e^{ik(x−L)}` for `x > L`,
/// `T e^{−ik(x−L)}` for `x < 0`.
pub fn oracle_scatter<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    side: Side,
    config: &IntegratorConfig<T>,
) -> Result<OracleAmplitudes<T>, OracleError> {
    let k = spec.exterior_wavenumber(energy)?;
    let ik = im(k);
    let length = spec.length();
    let coef = interior_coefficient(spec, energy);
    let half = lit::<T>(0.5);
    match side {
        Side::Left => {
            let out = (ik * length).exp();
            let sol = integrate_ivp(&coef, length, T::zero(), [out, ik * out], config)?;
            let [psi, dpsi] = sol.state;
            let incoming = (psi + dpsi / ik) * half;
            let reflected = (psi - dpsi / ik) * half;
            Ok(OracleAmplitudes {
                t: incoming.inv(),
                r: reflected / incoming,
                error_estimate: sol.error_estimate / incoming.norm(),
            })
        }
        Side::Right => {
            let sol = integrate_ivp(&coef, T::zero(), length, [re(T::one()), -ik], config)?;
            let [psi, dpsi] = sol.state;
            // amplitudes of e^{∓ik(x−L)} at x = L; the transmitted wave is e^{−ikL} e^{−ik(x−L)}
            let incoming = (psi - dpsi / ik) * half;
            let reflected = (psi + dpsi / ik) * half;
            Ok(OracleAmplitudes {
                t: (-ik * length).exp() / incoming,
                r: reflected / incoming,
                error_estimate: sol.error_estimate / incoming.norm(),
            })
        }
    }
}

/// Interior field from direct integration, normalised to unit incident
/// amplitude, at sorted points of `[0, L]`.
pub fn oracle_field<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    side: Side,
    xs: &[T],
    config: &IntegratorConfig<T>,
) -> Result<Vec<Complex<T>>, OracleError> {
    let amps = oracle_scatter(spec, energy, side, config)?;
    let k = spec.exterior_wavenumber(energy)?;
    let ik = im(k);
    let length = spec.length();
    let coef = interior_coefficient(spec, energy);
    let (start, init) = match side {
        Side::Left => {
            let out = amps.t * (ik * length).exp();
            (length, [out, ik * out])
        }
        Side::Right => {
            let at_zero = amps.t * (ik * length).exp();
            (T::zero(), [at_zero, -ik * at_zero])
        }
    };
    let mut order: Vec<usize> = (0..xs.len()).collect();
    // integrate away from the starting boundary
    order.sort_by(|&i, &j| {
        let di = (xs[i] - start).abs();
        let dj = (xs[j] - start).abs();
        di.partial_cmp(&dj).expect("finite sample points")
    });
    let sorted: Vec<T> = order.iter().map(|&i| xs[i]).collect();
    let states = integrate_through(&coef, start, &sorted, init, config)?;
    let mut out = vec![re(T::zero()); xs.len()];
    for (slot, sol) in order.into_iter().zip(states) {
        out[slot] = sol.state[0];
    }
    Ok(out)
}
