//! Complex gamma function.
//!
//! Lanczos approximation with `g = 607/128` and 15 coefficients, valid for
//! `Re z >= 1/2`; the left half plane goes through the reflection formula.

use num_complex::Complex;

use crate::scalar::{lit, re, Real};
use crate::specfun::SpecFunError;

const LANCZOS_G: f64 = 607.0 / 128.0;

const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

/// `sin(πz)` with the real part reduced exactly before multiplying by π.
pub fn sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let two = lit::<T>(2.0);
    let shift = (z.re / two).round() * two;
    let reduced = Complex::new(z.re - shift, z.im);
    (reduced * T::PI()).sin()
}

/// Returns `Some(n)` when `z` is exactly the non-positive integer `n`.
fn non_positive_integer<T: Real>(z: Complex<T>) -> Option<i64> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.round() {
        z.re.to_i64()
    } else {
        None
    }
}

/// `ln Γ(z)` on the principal branch of the Lanczos sum, for `Re z >= 1/2`.
fn ln_gamma_right<T: Real>(z: Complex<T>) -> Complex<T> {
    let half = lit::<T>(0.5);
    let g = lit::<T>(LANCZOS_G);
    let mut series = re(lit::<T>(LANCZOS_COEFFS[0]));
    for (j, &c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series = series + re(lit::<T>(c)) / (z + re(lit::<T>(j as f64)));
    }
    let t = z + re(g + half);
    let sqrt_two_pi = (lit::<T>(2.0) * T::PI()).sqrt();
    (z + re(half)) * t.ln() - t + (series * sqrt_two_pi / z).ln()
}

/// Γ(z) for complex `z`.
///
/// Relative accuracy is about `1e-13` in `f64` for `|z| <= 50`.
pub fn complex_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>, SpecFunError> {
    if let Some(n) = non_positive_integer(z) {
        return Err(SpecFunError::GammaPole(n));
    }
    Ok(gamma_unchecked(z))
}

fn gamma_unchecked<T: Real>(z: Complex<T>) -> Complex<T> {
    if z.re < lit(0.5) {
        let one_minus = re(T::one()) - z;
        re(T::PI()) / (sin_pi(z) * ln_gamma_right(one_minus).exp())
    } else {
        ln_gamma_right(z).exp()
    }
}

/// `1/Γ(z)`, entire; exactly zero at the poles of Γ.
pub fn reciprocal_gamma<T: Real>(z: Complex<T>) -> Complex<T> {
    if non_positive_integer(z).is_some() {
        return Complex::new(T::zero(), T::zero());
    }
    if z.re < lit(0.5) {
        let one_minus = re(T::one()) - z;
        sin_pi(z) * ln_gamma_right(one_minus).exp() / re(T::PI())
    } else {
        (-ln_gamma_right(z)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type C = Complex<f64>;

    fn rel(a: C, b: C) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn factorial_values() {
        let g = complex_gamma(C::new(5.0, 0.0)).unwrap();
        assert_relative_eq!(g.re, 24.0, max_relative = 1e-13);
        assert!(g.im.abs() < 1e-12);
        let g = complex_gamma(C::new(11.0, 0.0)).unwrap();
        assert_relative_eq!(g.re, 3_628_800.0, max_relative = 1e-13);
    }

    #[test]
    fn half_integer() {
        let g = complex_gamma(C::new(0.5, 0.0)).unwrap();
        assert_relative_eq!(g.re, std::f64::consts::PI.sqrt(), max_relative = 1e-14);
        let g = complex_gamma(C::new(-0.5, 0.0)).unwrap();
        assert_relative_eq!(g.re, -2.0 * std::f64::consts::PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn poles_are_errors() {
        assert_eq!(complex_gamma(C::new(0.0, 0.0)), Err(SpecFunError::GammaPole(0)));
        assert_eq!(complex_gamma(C::new(-3.0, 0.0)), Err(SpecFunError::GammaPole(-3)));
        assert!(complex_gamma(C::new(-3.0, 1e-300)).is_ok());
        assert_eq!(reciprocal_gamma(C::new(-7.0, 0.0)), C::new(0.0, 0.0));
    }

    // Reference values from a 40-digit evaluation.
    #[test]
    fn complex_reference_values() {
        let cases = [
            (C::new(0.5, 3.0), C::new(0.021_445_670_552_430_646, 0.006_865_364_837_261_678)),
            (C::new(0.0, 1.0), C::new(-0.154_949_828_301_810_685, -0.498_015_668_118_356_043)),
            (C::new(-2.5, 0.7), C::new(-0.159_818_716_362_932_930, -0.157_566_549_081_515_284)),
            (C::new(12.3, -7.1), C::new(6_547_558.487_606_879_6, 8_889_553.658_536_158_1)),
        ];
        for (z, want) in cases {
            let got = complex_gamma(z).unwrap();
            assert!(rel(got, want) < 1e-13, "z={z} got={got} want={want}");
        }
    }

    #[test]
    fn recurrence_crosses_reflection_boundary() {
        for &(x, y) in &[(0.3, 0.2), (-0.4, 1.5), (0.49, -2.0), (-3.7, 0.1)] {
            let z = C::new(x, y);
            let lhs = complex_gamma(z + 1.0).unwrap();
            let rhs = z * complex_gamma(z).unwrap();
            assert!(rel(lhs, rhs) < 1e-13, "z={z}");
        }
    }

    #[test]
    fn reciprocal_matches_inverse() {
        let z = C::new(-1.3, 0.4);
        let prod = reciprocal_gamma(z) * complex_gamma(z).unwrap();
        assert!((prod - 1.0).norm() < 1e-14);
    }

    #[test]
    fn single_precision() {
        let g = complex_gamma(Complex::<f32>::new(4.0, 0.0)).unwrap();
        assert!((g.re - 6.0).abs() < 1e-4);
    }
}
