//! Bessel functions of the first kind for complex order and argument.
//!
//! Ascending power series only; intended for moderate `|ξ|` (up to about 30,
//! with accuracy degrading as cancellation grows). Values off the principal
//! sheet are reached with [`bessel_sheet_shift`].

use num_complex::Complex;

use crate::scalar::{eps, from_usize, im, lit, re, Real};
use crate::specfun::gamma::reciprocal_gamma;
use crate::specfun::SpecFunError;

/// Upper bound on series terms before giving up.
pub const MAX_SERIES_TERMS: usize = 1000;

fn negative_integer_order<T: Real>(kappa: Complex<T>) -> Option<i64> {
    if kappa.im == T::zero() && kappa.re < T::zero() && kappa.re == kappa.re.round() {
        kappa.re.to_i64()
    } else {
        None
    }
}

/// Sums `Σ_m (−1)^m (ξ/2)^{2m+κ} / (m! Γ(m+κ+1))` given `log_half = ln(ξ/2)`
/// on whichever sheet the caller wants.
fn series_from_log<T: Real>(
    kappa: Complex<T>,
    log_half: Complex<T>,
) -> Result<Complex<T>, SpecFunError> {
    if let Some(n) = negative_integer_order(kappa) {
        // J_{-n} = (-1)^n J_n
        let value = series_from_log(re(from_i64_abs::<T>(n)), log_half)?;
        return Ok(if n % 2 == 0 { value } else { -value });
    }
    let half_sq = (log_half * lit::<T>(2.0)).exp();
    let mut term = (kappa * log_half).exp() * reciprocal_gamma(kappa + T::one());
    let mut sum = term;
    // The terms can grow until m ~ |ξ|/2 before they start to decay.
    let peak = half_sq.norm().sqrt();
    for m in 1..MAX_SERIES_TERMS {
        let mf = from_usize::<T>(m);
        term = -term * half_sq / (re(mf) * (kappa + mf));
        sum = sum + term;
        if mf > peak && term.norm() <= eps::<T>() * sum.norm() {
            return Ok(sum);
        }
        if term.norm() == T::zero() {
            return Ok(sum);
        }
    }
    Err(SpecFunError::SeriesNonConvergence {
        terms: MAX_SERIES_TERMS,
    })
}

fn from_i64_abs<T: Real>(n: i64) -> T {
    T::from_i64(n.abs()).expect("order representable")
}

/// `J_κ(ξ)` on the principal branch of `ξ^κ`.
pub fn bessel_j<T: Real>(kappa: Complex<T>, xi: Complex<T>) -> Result<Complex<T>, SpecFunError> {
    if xi.norm() == T::zero() {
        return bessel_at_origin(kappa);
    }
    series_from_log(kappa, (xi / lit::<T>(2.0)).ln())
}

/// `J_κ` evaluated at `ξ·e^{imπ}` directly, i.e. with the logarithm of the
/// argument moved `m` sheets away from the principal one.
pub fn bessel_j_on_sheet<T: Real>(
    kappa: Complex<T>,
    xi: Complex<T>,
    sheet: i64,
) -> Result<Complex<T>, SpecFunError> {
    if xi.norm() == T::zero() {
        return bessel_at_origin(kappa);
    }
    let turn = T::from_i64(sheet).expect("sheet index representable") * T::PI();
    series_from_log(kappa, (xi / lit::<T>(2.0)).ln() + im(turn))
}

fn bessel_at_origin<T: Real>(kappa: Complex<T>) -> Result<Complex<T>, SpecFunError> {
    if kappa.norm() == T::zero() {
        Ok(re(T::one()))
    } else if kappa.re > T::zero() || negative_integer_order(kappa).is_some() {
        Ok(re(T::zero()))
    } else {
        Err(SpecFunError::BesselSingularAtOrigin)
    }
}

/// `dJ_κ/dξ = (J_{κ−1} − J_{κ+1}) / 2`.
pub fn bessel_j_prime<T: Real>(
    kappa: Complex<T>,
    xi: Complex<T>,
) -> Result<Complex<T>, SpecFunError> {
    let lower = bessel_j(kappa - T::one(), xi)?;
    let upper = bessel_j(kappa + T::one(), xi)?;
    Ok((lower - upper) / lit::<T>(2.0))
}

/// Continues a principal-sheet value of `J_κ` onto sheet `n_sheets` via
/// `J_κ(ξ e^{inπ}) = e^{inκπ} J_κ(ξ)`.
pub fn bessel_sheet_shift<T: Real>(
    kappa: Complex<T>,
    value_on_sheet0: Complex<T>,
    n_sheets: i64,
) -> Complex<T> {
    if n_sheets == 0 {
        return value_on_sheet0;
    }
    let n = T::from_i64(n_sheets).expect("sheet index representable");
    value_on_sheet0 * (Complex::<T>::i() * kappa * (n * T::PI())).exp()
}
