//! Boundary matching against exterior plane waves.
//!
//! Left incidence: `e^{ikx} + R_L e^{−ikx}` for `x < 0`, `T e^{ikx}` for `x > L`.
//! Right incidence: `e^{−ik(x−L)} + R_R e^{ik(x−L)}` for `x > L`,
//! `T e^{−ik(x−L)}` for `x < 0`, so both reflections are referred to the
//! interface they are measured at.

pub mod basis;
pub mod invisibility;
pub mod sweep;

use num_complex::Complex;

pub use basis::{build_basis, numeric_basis, FallbackReason, InteriorBasis, PairValues, Provenance};
pub use invisibility::{
    invisibility_check, transparency_check, InvisibilityError, InvisibilityReport, InvisibilityRow,
    TransparencyReport, TransparencyRow, Violation,
};
pub use sweep::{spectrum_sweep, wavefield, FieldPoint};

use crate::linalg::solve_dense;
use crate::model::{ModelError, PotentialSpec};
use crate::oracle::{IntegratorError, Side};
use crate::scalar::{im, lit, re, Real};
use crate::specfun::{Normalization, SpecFunError};

/// Normalised outgoing determinant below which the matching system is
/// reported singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatterError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Integrator(#[from] IntegratorError),
}

/// Basis values at both interfaces together with the exterior wavenumber.
#[derive(Debug, Clone, Copy)]
pub struct Boundary<T> {
    pub k: T,
    pub length: T,
    pub at_zero: PairValues<T>,
    pub at_end: PairValues<T>,
}

type Mat2<T> = [[Complex<T>; 2]; 2];

fn mul2<T: Real>(a: &Mat2<T>, b: &Mat2<T>) -> Mat2<T> {
    let mut out = [[re(T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn inv2<T: Real>(a: &Mat2<T>) -> Mat2<T> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]]
}

/// `[[u1, u2], [u1', u2']]`
fn fundamental<T: Real>(v: &PairValues<T>) -> Mat2<T> {
    [[v[0][0], v[1][0]], [v[0][1], v[1][1]]]
}

impl<T: Real> Boundary<T> {
    pub fn new(spec: &PotentialSpec<T>, energy: T, basis: &InteriorBasis<T>) -> Result<Self, ScatterError> {
        let k = spec.exterior_wavenumber(energy)?;
        let length = spec.length();
        let vals = basis.sample(&[T::zero(), length])?;
        Ok(Self {
            k,
            length,
            at_zero: vals[0],
            at_end: vals[1],
        })
    }

    /// Maps plane-wave amplitudes `(A, B)` of `A e^{ikx} + B e^{−ikx}` at
    /// `x = 0` to those at `x = L`; unimodular.
    pub fn amplitude_transfer(&self) -> Mat2<T> {
        let p = mul2(&fundamental(&self.at_end), &inv2(&fundamental(&self.at_zero)));
        let ik = im(self.k);
        let one = re(T::one());
        let s0 = [[one, one], [ik, -ik]];
        let e = (ik * self.length).exp();
        let s_l = [[e, e.inv()], [ik * e, -ik * e.inv()]];
        mul2(&inv2(&s_l), &mul2(&p, &s0))
    }

    /// Determinant of the outgoing-only conditions, written in amplitude
    /// coordinates and divided by its row norms. Lies in `[0, 1]` in
    /// magnitude and vanishes exactly at poles of `T` and `R`.
    pub fn outgoing_determinant(&self) -> Complex<T> {
        let m = self.amplitude_transfer();
        let row = (m[1][0].norm_sqr() + m[1][1].norm_sqr()).sqrt();
        m[1][1] / row
    }

    /// The 4×4 continuity system in unknowns `(R, A1, A2, T)`.
    pub fn system(&self, side: Side) -> (Vec<Vec<Complex<T>>>, Vec<Complex<T>>) {
        let ik = im(self.k);
        let zero = re(T::zero());
        let one = re(T::one());
        let e = (ik * self.length).exp();
        let [u1_0, u2_0] = self.at_zero;
        let [u1_l, u2_l] = self.at_end;
        match side {
            Side::Left => (
                vec![
                    vec![-one, u1_0[0], u2_0[0], zero],
                    vec![ik, u1_0[1], u2_0[1], zero],
                    vec![zero, u1_l[0], u2_l[0], -e],
                    vec![zero, u1_l[1], u2_l[1], -ik * e],
                ],
                vec![one, ik, zero, zero],
            ),
            Side::Right => (
                vec![
                    vec![zero, u1_0[0], u2_0[0], -e],
                    vec![zero, u1_0[1], u2_0[1], ik * e],
                    vec![-one, u1_l[0], u2_l[0], zero],
                    vec![-ik, u1_l[1], u2_l[1], zero],
                ],
                vec![zero, zero, one, -ik],
            ),
        }
    }
}

/// Amplitudes for one incidence side.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideSolution<T> {
    pub side: Side,
    pub t: Complex<T>,
    pub r: Complex<T>,
    /// Interior coefficients of `u1`, `u2`.
    pub a1: Complex<T>,
    pub a2: Complex<T>,
    /// Smallest pivot of the column-equilibrated system.
    pub pivot_ratio: T,
    /// Normalised outgoing determinant at this energy.
    pub determinant: Complex<T>,
    pub singular: bool,
}

pub(crate) fn solve_with<T: Real>(boundary: &Boundary<T>, side: Side) -> SideSolution<T> {
    let (a, b) = boundary.system(side);
    let determinant = boundary.outgoing_determinant();
    let nan = Complex::new(T::nan(), T::nan());
    let near_pole = !(determinant.norm() >= lit(SINGULAR_THRESHOLD));
    match solve_dense(a, b) {
        Some(sol) => SideSolution {
            side,
            r: sol.x[0],
            a1: sol.x[1],
            a2: sol.x[2],
            t: sol.x[3],
            pivot_ratio: sol.pivot_ratio,
            determinant,
            singular: near_pole,
        },
        None => SideSolution {
            side,
            t: nan,
            r: nan,
            a1: nan,
            a2: nan,
            pivot_ratio: T::zero(),
            determinant,
            singular: true,
        },
    }
}

/// Solves the matching problem for one incidence side.
pub fn solve_scattering<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    side: Side,
) -> Result<SideSolution<T>, ScatterError> {
    let basis = build_basis(spec, energy)?;
    let boundary = Boundary::new(spec, energy, &basis)?;
    Ok(solve_with(&boundary, side))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringResult<T> {
    pub energy: T,
    pub k: T,
    /// Transmission from left incidence.
    pub t: Complex<T>,
    /// Transmission from right incidence; equals `t` up to round-off.
    pub t_right: Complex<T>,
    pub r_left: Complex<T>,
    pub r_right: Complex<T>,
    /// `| ||T|² − 1| − |R_L||R_R| |`
    pub unitarity_residual: T,
    pub provenance: Provenance,
    pub normalization: Option<Normalization>,
    pub basis_condition: T,
    pub pivot_ratio: T,
    pub determinant: Complex<T>,
    pub singular: bool,
}

impl<T: Real> ScatteringResult<T> {
    pub fn t2(&self) -> T {
        self.t.norm_sqr()
    }

    pub fn rl2(&self) -> T {
        self.r_left.norm_sqr()
    }

    pub fn rr2(&self) -> T {
        self.r_right.norm_sqr()
    }
}

pub fn unitarity_residual<T: Real>(t: Complex<T>, r_left: Complex<T>, r_right: Complex<T>) -> T {
    ((t.norm_sqr() - T::one()).abs() - r_left.norm() * r_right.norm()).abs()
}

/// Both incidences on a shared interior basis.
pub fn scatter<T: Real>(spec: &PotentialSpec<T>, energy: T) -> Result<ScatteringResult<T>, ScatterError> {
    let basis = build_basis(spec, energy)?;
    let boundary = Boundary::new(spec, energy, &basis)?;
    let left = solve_with(&boundary, Side::Left);
    let right = solve_with(&boundary, Side::Right);
    Ok(ScatteringResult {
        energy,
        k: boundary.k,
        t: left.t,
        t_right: right.t,
        r_left: left.r,
        r_right: right.r,
        unitarity_residual: unitarity_residual(left.t, left.r, right.r),
        provenance: basis.provenance(),
        normalization: basis.normalization(),
        basis_condition: basis.condition(),
        pivot_ratio: left.pivot_ratio.min(right.pivot_ratio),
        determinant: left.determinant,
        singular: left.singular || right.singular,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_scatter, IntegratorConfig};

    fn spec(v0: f64, n: u32) -> PotentialSpec<f64> {
        PotentialSpec::new(4.0, v0, n).unwrap()
    }

    fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn hermitian_cell() {
        let r = scatter(&spec(0.0, 1), 5.0).unwrap();
        assert!((r.t2() + r.rl2() - 1.0).abs() < 1e-10);
        assert!((r.r_left - r.r_right).norm() < 1e-10);
    }

    #[test]
    fn transfer_route_agrees_with_linear_solve() {
        for (v0, e) in [(0.3, 5.0), (0.8, 6.2), (0.5, 5.6)] {
            let s = spec(v0, 2);
            let b = build_basis(&s, e).unwrap();
            let bd = Boundary::new(&s, e, &b).unwrap();
            let m = bd.amplitude_transfer();
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            assert!((det - 1.0).norm() < 1e-9);
            let r = scatter(&s, e).unwrap();
            assert!(rel(m[1][1].inv(), r.t) < 1e-9);
            assert!(rel(-m[1][0] / m[1][1], r.r_left) < 1e-9);
            let shift = Complex::new(0.0, 2.0 * r.k * s.length()).exp();
            assert!(rel(m[0][1] / m[1][1] * shift, r.r_right) < 1e-9);
        }
    }

    #[test]
    fn matches_oracle_many_cells() {
        let s = spec(0.3, 9);
        let r = scatter(&s, 5.0).unwrap();
        let cfg = IntegratorConfig::default();
        let l = oracle_scatter(&s, 5.0, Side::Left, &cfg).unwrap();
        let rr = oracle_scatter(&s, 5.0, Side::Right, &cfg).unwrap();
        assert!(rel(r.t, l.t) < 1e-6);
        assert!(rel(r.r_left, l.r) < 1e-6);
        assert!(rel(r.r_right, rr.r) < 1e-6);
    }

    #[test]
    fn transmission_side_independent() {
        for v0 in [0.3, 0.5, 0.8] {
            let r = scatter(&spec(v0, 3), 7.3).unwrap();
            assert!((r.t - r.t_right).norm() < 1e-9 * (1.0 + r.t.norm()));
        }
    }

    #[test]
    fn interior_coefficients_reproduce_boundary_values() {
        let s = spec(0.8, 1);
        let sol = solve_scattering(&s, 6.0, Side::Left).unwrap();
        let b = build_basis(&s, 6.0).unwrap();
        let v = b.eval(0.0).unwrap();
        let psi = sol.a1 * v[0][0] + sol.a2 * v[1][0];
        assert!((psi - (sol.r + 1.0)).norm() < 1e-10);
        assert!(!sol.singular);
    }

    #[test]
    fn evanescent_energy_rejected() {
        assert!(matches!(
            scatter(&spec(0.3, 1), 3.5),
            Err(ScatterError::Model(ModelError::Evanescent { .. }))
        ));
    }

    #[test]
    fn unitarity_residual_formula() {
        let t = Complex::new(1.2f64, 0.0);
        assert!((unitarity_residual(t, Complex::new(0.4, 0.0), Complex::new(1.1, 0.0)) - 0.0).abs() < 1e-12);
    }
}
