//! Adaptive Dormand–Prince 5(4) integration of `ψ'' = f(x) ψ` with complex
//! coefficient field and complex state.

use num_complex::Complex;

use crate::scalar::{lit, tol, Real};

/// `(ψ, ψ')`
pub type State<T> = [Complex<T>; 2];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for IntegratorConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: tol(1e-10, 64.0),
            abs_tol: tol(1e-12, 64.0),
            max_steps: 1_000_000,
        }
    }
}

impl<T: Real> IntegratorConfig<T> {
    pub fn with_tolerances(rel_tol: T, abs_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    /// Same config with both tolerances multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            max_steps: self.max_steps,
        }
    }

    fn validate(&self) -> Result<(), IntegratorError> {
        if !(self.rel_tol > T::zero() && self.abs_tol > T::zero()) {
            return Err(IntegratorError::InvalidTolerance);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum IntegratorError {
    #[error("integration exceeded {0} steps")]
    StepLimit(usize),
    #[error("step size underflow at x = {0}")]
    StepUnderflow(f64),
    #[error("tolerances must be positive")]
    InvalidTolerance,
    #[error("non-finite state at x = {0}")]
    NonFinite(f64),
}

/// End state of an integration together with the accumulated local error
/// estimate (in the same units as the state).
#[derive(Debug, Clone, Copy)]
pub struct IvpSolution<T> {
    pub state: State<T>,
    pub error_estimate: T,
    pub steps: usize,
}

// Dormand–Prince tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[inline]
fn rhs<T: Real, F: Fn(T) -> Complex<T>>(coef: &F, x: T, y: &State<T>) -> State<T> {
    [y[1], coef(x) * y[0]]
}

#[inline]
fn axpy<T: Real>(y: &State<T>, terms: &[(f64, &State<T>)], h: T) -> State<T> {
    let mut out = *y;
    for &(a, k) in terms {
        let s = h * lit::<T>(a);
        out[0] = out[0] + k[0] * s;
        out[1] = out[1] + k[1] * s;
    }
    out
}

struct Stepper<T> {
    h: T,
    first_stage: Option<State<T>>,
}

/// Integrates `ψ'' = coef(x) ψ` from `x_from` to `x_to` (either direction).
pub fn integrate_ivp<T, F>(
    coef: F,
    x_from: T,
    x_to: T,
    initial: State<T>,
    config: &IntegratorConfig<T>,
) -> Result<IvpSolution<T>, IntegratorError>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    let mut out = integrate_through(coef, x_from, &[x_to], initial, config)?;
    Ok(out.pop().expect("one output point"))
}

/// Integrates through the monotone sequence `points` (all on the same side of
/// `x_from`), returning the state at each point.
pub fn integrate_through<T, F>(
    coef: F,
    x_from: T,
    points: &[T],
    initial: State<T>,
    config: &IntegratorConfig<T>,
) -> Result<Vec<IvpSolution<T>>, IntegratorError>
where
    T: Real,
    F: Fn(T) -> Complex<T>,
{
    config.validate()?;
    let mut out = Vec::with_capacity(points.len());
    let mut x = x_from;
    let mut y = initial;
    let mut err_acc = T::zero();
    let mut steps = 0usize;
    let span = points
        .iter()
        .fold(T::zero(), |acc, &p| acc.max((p - x_from).abs()));
    let mut stepper = Stepper {
        h: (span / lit(64.0)).min(lit(0.05)).max(T::epsilon()),
        first_stage: None,
    };
    for &target in points {
        while x != target {
            let dir = if target > x { T::one() } else { -T::one() };
            let remaining = (target - x).abs();
            let (last, h_try) = if stepper.h >= remaining {
                (true, remaining)
            } else {
                (false, stepper.h)
            };
            let h = dir * h_try;
            let k1 = stepper
                .first_stage
                .take()
                .unwrap_or_else(|| rhs(&coef, x, &y));
            let k2 = rhs(&coef, x + h * lit(C2), &axpy(&y, &[(A21, &k1)], h));
            let k3 = rhs(&coef, x + h * lit(C3), &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = rhs(
                &coef,
                x + h * lit(C4),
                &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
            );
            let k5 = rhs(
                &coef,
                x + h * lit(C5),
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = rhs(
                &coef,
                x + h,
                &axpy(
                    &y,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    h,
                ),
            );
            let y_new = axpy(
                &y,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
                h,
            );
            let x_new = if last { target } else { x + h };
            let k7 = rhs(&coef, x_new, &y_new);
            let err_vec = axpy(
                &[Complex::new(T::zero(), T::zero()); 2],
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                h,
            );
            let mut ratio = T::zero();
            let mut abs_err = T::zero();
            for i in 0..2 {
                let scale =
                    config.abs_tol + config.rel_tol * y[i].norm().max(y_new[i].norm());
                ratio = ratio.max(err_vec[i].norm() / scale);
                abs_err = abs_err.max(err_vec[i].norm());
            }
            steps += 1;
            if steps > config.max_steps {
                return Err(IntegratorError::StepLimit(config.max_steps));
            }
            if !ratio.is_finite() {
                return Err(IntegratorError::NonFinite(x.to_f64().unwrap_or(f64::NAN)));
            }
            let factor = if ratio == T::zero() {
                lit(5.0)
            } else {
                (lit::<T>(0.9) * ratio.powf(lit(-0.2))).min(lit(5.0)).max(lit(0.2))
            };
            if ratio <= T::one() {
                x = x_new;
                y = y_new;
                err_acc = err_acc + abs_err;
                stepper.first_stage = Some(k7);
                // a clamped final step should not shrink the working step size
                stepper.h = if last {
                    stepper.h.max(h_try * factor)
                } else {
                    h_try * factor
                };
            } else {
                stepper.first_stage = Some(k1);
                stepper.h = h_try * factor;
                if stepper.h < T::epsilon() * x.abs().max(T::one()) * lit(16.0) {
                    return Err(IntegratorError::StepUnderflow(x.to_f64().unwrap_or(f64::NAN)));
                }
            }
        }
        out.push(IvpSolution {
            state: y,
            error_estimate: err_acc,
            steps,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn free_propagation() {
        let (w0, e) = (4.0, 5.0);
        let k = (e - w0 as f64).sqrt();
        let ik = C::new(0.0, k);
        let cfg = IntegratorConfig::default();
        let sol = integrate_ivp(|_| C::new(w0 - e, 0.0), 0.0, 1.0, [C::new(1.0, 0.0), ik], &cfg)
            .unwrap();
        let want = (ik * 1.0).exp();
        assert!((sol.state[0] - want).norm() < 1e-10);
        assert!((sol.state[1] - ik * want).norm() < 1e-10);
    }

    #[test]
    fn backward_matches_forward_inverse() {
        let coef = |x: f64| C::new(x.cos(), 0.3 * x.sin()) - 3.0;
        let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
        let init = [C::new(1.0, 0.0), C::new(0.0, 0.5)];
        let fwd = integrate_ivp(coef, 0.0, 2.5, init, &cfg).unwrap();
        let back = integrate_ivp(coef, 2.5, 0.0, fwd.state, &cfg).unwrap();
        assert!((back.state[0] - init[0]).norm() < 1e-9);
        assert!((back.state[1] - init[1]).norm() < 1e-9);
    }

    #[test]
    fn halving_tolerance_within_error_estimate() {
        let coef = |x: f64| C::new(4.0 * (x.cos().powi(2)) - 5.0, 1.2 * (2.0 * x).sin());
        let init = [C::new(1.0, 0.0), C::new(0.0, 1.0)];
        let cfg = IntegratorConfig::default();
        let a = integrate_ivp(coef, 0.0, 3.0 * std::f64::consts::PI, init, &cfg).unwrap();
        let b = integrate_ivp(coef, 0.0, 3.0 * std::f64::consts::PI, init, &cfg.scaled(0.5))
            .unwrap();
        let diff = (a.state[0] - b.state[0]).norm().max((a.state[1] - b.state[1]).norm());
        assert!(diff < a.error_estimate, "diff {diff} estimate {}", a.error_estimate);
    }

    #[test]
    fn through_points_matches_single_calls() {
        let coef = |x: f64| C::new(x.sin() - 2.0, 0.1);
        let init = [C::new(1.0, 0.0), C::new(0.0, 0.0)];
        let cfg = IntegratorConfig::with_tolerances(1e-12, 1e-14);
        let pts = [0.5, 1.0, 2.0];
        let many = integrate_through(coef, 0.0, &pts, init, &cfg).unwrap();
        for (p, s) in pts.iter().zip(&many) {
            let one = integrate_ivp(coef, 0.0, *p, init, &cfg).unwrap();
            assert!((one.state[0] - s.state[0]).norm() < 1e-10);
        }
    }

    #[test]
    fn step_limit_reported() {
        let cfg = IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            max_steps: 5,
        };
        let r = integrate_ivp(|_| C::new(-400.0, 0.0), 0.0, 10.0, [C::new(1.0, 0.0), C::new(0.0, 0.0)], &cfg);
        assert!(matches!(r, Err(IntegratorError::StepLimit(5))));
    }

    #[test]
    fn rejects_bad_tolerance() {
        let cfg = IntegratorConfig::with_tolerances(0.0, 1e-12);
        let r = integrate_ivp(|_| C::new(1.0, 0.0), 0.0, 1.0, [C::new(1.0, 0.0); 2], &cfg);
        assert_eq!(r.unwrap_err(), IntegratorError::InvalidTolerance);
    }
}
