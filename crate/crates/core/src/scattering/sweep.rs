use num_complex::Complex;
use rayon::prelude::*;

use crate::model::PotentialSpec;
use crate::oracle::Side;
use crate::scalar::{im, Real};
use crate::scattering::{build_basis, scatter, solve_with, Boundary, ScatterError, ScatteringResult};

/// Scatters at every grid energy; results come back in grid order and a
/// failing point does not stop the sweep.
pub fn spectrum_sweep<T: Real>(
    spec: &PotentialSpec<T>,
    energies: &[T],
) -> Vec<Result<ScatteringResult<T>, ScatterError>> {
    energies.par_iter().map(|&e| scatter(spec, e)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldPoint<T> {
    pub x: T,
    pub psi: Complex<T>,
    pub dpsi: Complex<T>,
}

/// Scattering state for incidence from `side`, sampled at `xs`.
pub fn wavefield<T: Real>(
    spec: &PotentialSpec<T>,
    energy: T,
    side: Side,
    xs: &[T],
) -> Result<Vec<FieldPoint<T>>, ScatterError> {
    let basis = build_basis(spec, energy)?;
    let boundary = Boundary::new(spec, energy, &basis)?;
    let sol = solve_with(&boundary, side);
    let ik = im(boundary.k);
    let length = spec.length();

    let inside: Vec<T> = xs.iter().copied().filter(|&x| x >= T::zero() && x <= length).collect();
    let mut interior = basis.sample(&inside)?.into_iter();

    let wave = |amp: Complex<T>, sign: T, x: T| {
        let v = amp * (ik * sign * x).exp();
        (v, ik * sign * v)
    };
    let one = Complex::new(T::one(), T::zero());
    let pos = T::one();
    let neg = -T::one();
    Ok(xs
        .iter()
        .map(|&x| {
            let (psi, dpsi) = if x < T::zero() {
                let (a, b) = match side {
                    Side::Left => (wave(one, pos, x), wave(sol.r, neg, x)),
                    Side::Right => (wave(sol.t, neg, x - length), (Complex::default(), Complex::default())),
                };
                (a.0 + b.0, a.1 + b.1)
            } else if x > length {
                let (a, b) = match side {
                    Side::Left => (wave(sol.t, pos, x), (Complex::default(), Complex::default())),
                    Side::Right => (wave(one, neg, x - length), wave(sol.r, pos, x - length)),
                };
                (a.0 + b.0, a.1 + b.1)
            } else {
                let v = interior.next().expect("one interior sample per interior point");
                (sol.a1 * v[0][0] + sol.a2 * v[1][0], sol.a1 * v[0][1] + sol.a2 * v[1][1])
            };
            FieldPoint { x, psi, dpsi }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_field, IntegratorConfig};
    use std::f64::consts::PI;

    #[test]
    fn sweep_keeps_grid_order_and_failures() {
        let spec = PotentialSpec::new(4.0, 0.3, 1).unwrap();
        let grid = [5.0, 3.0, 6.0];
        let out = spectrum_sweep(&spec, &grid);
        assert_eq!(out.len(), 3);
        assert!(out[1].is_err());
        assert_eq!(out[0].as_ref().unwrap().energy, 5.0);
        assert_eq!(out[2].as_ref().unwrap().energy, 6.0);
    }

    #[test]
    fn field_continuous_at_interfaces() {
        for (v0, n, e) in [(0.3, 9, 5.0), (0.5, 4, 5.6), (0.8, 1, 6.0)] {
            let spec = PotentialSpec::new(4.0, v0, n).unwrap();
            let l = spec.length();
            for side in [Side::Left, Side::Right] {
                let h = 1e-12;
                let f = wavefield(&spec, e, side, &[-h, 0.0, l, l + h]).unwrap();
                assert!((f[0].psi - f[1].psi).norm() < 1e-8);
                assert!((f[0].dpsi - f[1].dpsi).norm() < 1e-8);
                assert!((f[2].psi - f[3].psi).norm() < 1e-8);
                assert!((f[2].dpsi - f[3].dpsi).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn interior_field_matches_oracle() {
        let spec = PotentialSpec::new(4.0, 0.3, 9).unwrap();
        let xs: Vec<f64> = (0..=90).map(|i| 9.0 * PI * i as f64 / 90.0).collect();
        let field = wavefield(&spec, 5.0, Side::Left, &xs).unwrap();
        let oracle = oracle_field(&spec, 5.0, Side::Left, &xs, &IntegratorConfig::default()).unwrap();
        let sup = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (f, o) in field.iter().zip(&oracle) {
            assert!((f.psi - o).norm() < 1e-6 * sup);
        }
    }

    #[test]
    fn right_incidence_field_matches_oracle() {
        let spec = PotentialSpec::new(4.0, 0.8, 2).unwrap();
        let xs: Vec<f64> = (0..=40).map(|i| 2.0 * PI * i as f64 / 40.0).collect();
        let field = wavefield(&spec, 6.7, Side::Right, &xs).unwrap();
        let oracle = oracle_field(&spec, 6.7, Side::Right, &xs, &IntegratorConfig::default()).unwrap();
        let sup = oracle.iter().map(|z| z.norm()).fold(0.0, f64::max);
        for (f, o) in field.iter().zip(&oracle) {
            assert!((f.psi - o).norm() < 1e-6 * sup);
        }
    }
}
