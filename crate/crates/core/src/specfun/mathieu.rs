//! Floquet solutions of the Mathieu equation `w'' + (a − 2q cos 2y) w = 0`
//! for complex `a` and `q`.
//!
//! The characteristic exponent comes from the one-period monodromy matrix.
//! The Fourier coefficients `c_{ν,2r}` of
//! `Me_ν(y) = e^{iνy} Σ_r c_{ν,2r} e^{2iry}` are the null vector of the
//! truncated three-term recurrence
//! `q c_{2r−2} + ((2r+ν)² − a) c_{2r} + q c_{2r+2} = 0`.

use num_complex::Complex;

use crate::linalg::TridiagonalLu;
use crate::model::NEAR_INTEGER;
use crate::oracle::{monodromy, monodromy_config};
use crate::scalar::{distance_to_integer, from_i64, im, lit, re, tol, Real};
use crate::specfun::SpecFunError;

pub const INITIAL_TRUNCATION: usize = 16;
pub const MAX_TRUNCATION: usize = 256;

/// Tail coefficients must fall below this fraction of the largest one.
pub const TAIL_TOLERANCE: f64 = 1e-14;

/// Below this `|Σ c²| / max|c|²` the squares normalisation is abandoned.
pub const SELF_ORTHOGONAL_THRESHOLD: f64 = 1e-8;

/// Floquet exponent with the branch fixed to `Re ν ∈ [0, 1]` for real `ν`
/// and `Im ν ≥ 0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloquetExponent<T> {
    pub nu: Complex<T>,
    /// `ν` lies within [`NEAR_INTEGER`] of an integer; the two Floquet
    /// solutions are then (nearly) dependent.
    pub near_integer: bool,
    /// `cos νπ`
    pub half_trace: Complex<T>,
}

/// Characteristic exponent from the monodromy trace, `cos νπ = tr / 2`.
pub fn mathieu_nu<T: Real>(a: Complex<T>, q: Complex<T>) -> Result<FloquetExponent<T>, SpecFunError> {
    let fm = monodromy(a, q, &monodromy_config())?;
    let half_trace = fm.trace() / lit::<T>(2.0);
    // principal acos puts Re ν in [0, 1]; on the gap edges pick Im ν ≥ 0
    let mut nu = half_trace.acos() / T::PI();
    let edge = lit::<T>(1e-9);
    if nu.im < T::zero() {
        if nu.re < edge {
            nu = -nu;
        } else if nu.re > T::one() - edge {
            nu = re(lit::<T>(2.0)) - nu;
        }
    }
    Ok(FloquetExponent {
        nu,
        near_integer: distance_to_integer(nu) < lit(NEAR_INTEGER),
        half_trace,
    })
}

/// How the coefficient table was normalised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    /// `Σ_r c_{ν,2r}² = 1` (complex squares)
    SumOfSquares,
    /// `Σ c²` nearly vanished; the largest coefficient is set to 1 instead.
    MaxCoefficient,
}

/// Fourier coefficients `c_{ν,2r}` for `r ∈ [−R, R]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable<T> {
    pub nu: Complex<T>,
    pub a: Complex<T>,
    pub q: Complex<T>,
    r_max: usize,
    coeffs: Vec<Complex<T>>,
    pub normalization: Normalization,
}

impl<T: Real> CoeffTable<T> {
    pub fn r_max(&self) -> usize {
        self.r_max
    }

    /// `c_{ν,2r}`, zero outside the table.
    pub fn coeff(&self, r: i64) -> Complex<T> {
        let idx = r + self.r_max as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            re(T::zero())
        } else {
            self.coeffs[idx as usize]
        }
    }

    /// `(r, c_{ν,2r})` pairs in increasing `r`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        let r_max = self.r_max as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, &c)| (i as i64 - r_max, c))
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// Largest recurrence residual over the interior rows, relative to
    /// `max |c|`.
    pub fn recurrence_residual(&self) -> T {
        let r_max = self.r_max as i64;
        let mut worst = T::zero();
        for r in (-r_max + 1)..r_max {
            let res = self.q * self.coeff(r - 1)
                + diag(self.nu, self.a, r) * self.coeff(r)
                + self.q * self.coeff(r + 1);
            worst = worst.max(res.norm());
        }
        worst / self.max_abs()
    }

    /// `max(|c_{−R}|, |c_R|) / max |c|`
    pub fn tail_ratio(&self) -> T {
        let r = self.r_max as i64;
        self.coeff(r).norm().max(self.coeff(-r).norm()) / self.max_abs()
    }

    /// `Σ_r c_{ν,2r}²`
    pub fn sum_of_squares(&self) -> Complex<T> {
        self.coeffs.iter().fold(re(T::zero()), |s, &c| s + c * c)
    }
}

#[inline]
fn diag<T: Real>(nu: Complex<T>, a: Complex<T>, r: i64) -> Complex<T> {
    let m = nu + from_i64::<T>(2 * r);
    m * m - a
}

/// Coefficients for `(a, q)` with exponent `nu`, accurate for evaluation on
/// the real line.
pub fn mathieu_coeffs<T: Real>(
    a: Complex<T>,
    q: Complex<T>,
    nu: Complex<T>,
) -> Result<CoeffTable<T>, SpecFunError> {
    mathieu_coeffs_for_strip(a, q, nu, T::zero())
}

/// Coefficients accurate for evaluation at `|Im y| ≤ strip`: the truncation
/// criterion weights `c_{ν,2r}` by `e^{2|r|·strip}`.
///
/// `nu` is taken as an estimate and polished so the recurrence closes to
/// rounding level; the polished exponent is stored in the table.
pub fn mathieu_coeffs_for_strip<T: Real>(
    a: Complex<T>,
    q: Complex<T>,
    nu: Complex<T>,
    strip: T,
) -> Result<CoeffTable<T>, SpecFunError> {
    if distance_to_integer(nu) < lit(NEAR_INTEGER) {
        return Err(SpecFunError::DegenerateExponent {
            re: nu.re.to_f64().unwrap_or(f64::NAN),
            im: nu.im.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut r_max = INITIAL_TRUNCATION;
    loop {
        let (nu_polished, coeffs) = null_vector(a, q, nu, r_max)?;
        let mut table = CoeffTable {
            nu: nu_polished,
            a,
            q,
            r_max,
            coeffs,
            normalization: Normalization::SumOfSquares,
        };
        if weighted_tail_ok(&table, strip) {
            normalize(&mut table);
            let residual = table.recurrence_residual();
            if residual > tol(1e-10, 1e3) {
                return Err(SpecFunError::NoNullVector {
                    residual: residual.to_f64().unwrap_or(f64::NAN),
                });
            }
            return Ok(table);
        }
        if r_max >= MAX_TRUNCATION {
            return Err(SpecFunError::TruncationExhausted { r_max });
        }
        r_max *= 2;
    }
}

fn weighted_tail_ok<T: Real>(table: &CoeffTable<T>, strip: T) -> bool {
    let two = lit::<T>(2.0);
    let weight = |r: i64| (two * strip * from_i64::<T>(r.abs())).exp();
    let peak = table
        .iter()
        .fold(T::zero(), |m, (r, c)| m.max(c.norm() * weight(r)));
    let r = table.r_max as i64;
    let tail = table.coeff(r).norm().max(table.coeff(-r).norm()) * weight(r);
    tail.is_finite() && peak.is_finite() && tail < tol::<T>(TAIL_TOLERANCE, 16.0) * peak
}

fn normalize<T: Real>(table: &mut CoeffTable<T>) {
    let max = table.max_abs();
    let s = table.sum_of_squares();
    if s.norm() < lit::<T>(SELF_ORTHOGONAL_THRESHOLD) * max * max {
        let pivot = table
            .coeffs
            .iter()
            .copied()
            .fold(re(T::zero()), |best, c| if c.norm() > best.norm() { c } else { best });
        for c in table.coeffs.iter_mut() {
            *c = *c / pivot;
        }
        table.normalization = Normalization::MaxCoefficient;
    } else {
        let root = s.sqrt();
        for c in table.coeffs.iter_mut() {
            *c = *c / root;
        }
        table.normalization = Normalization::SumOfSquares;
    }
}

/// Index of the dominant coefficient, located by inverse iteration on the
/// truncated matrix.
fn dominant_index<T: Real>(a: Complex<T>, q: Complex<T>, nu: Complex<T>, r_max: usize) -> usize {
    let n = 2 * r_max + 1;
    let r_of = |i: usize| i as i64 - r_max as i64;
    let d: Vec<Complex<T>> = (0..n).map(|i| diag(nu, a, r_of(i))).collect();
    let scale = d.iter().fold(q.norm(), |m, x| m.max(x.norm()));
    let lu = TridiagonalLu::factor(vec![q; n - 1], d, vec![q; n - 1], scale * T::epsilon());
    let mut x = vec![re(T::one()); n];
    for _ in 0..3 {
        lu.solve_in_place(&mut x);
        let m = x.iter().fold(T::zero(), |m, c| m.max(c.norm()));
        if !(m.is_finite() && m > T::zero()) {
            break;
        }
        for c in x.iter_mut() {
            *c = *c / m;
        }
    }
    x.iter()
        .enumerate()
        .fold((r_max, -T::one()), |best, (i, c)| {
            if c.norm() > best.1 {
                (i, c.norm())
            } else {
                best
            }
        })
        .0
}

/// Continued-fraction sweep from both ends of the truncated recurrence down
/// to the pivot index `p`. Returns the unnormalised vector (`c_p = 1`) and the
/// residual of the pivot row, which vanishes when `nu` is consistent.
fn sweep<T: Real>(
    a: Complex<T>,
    q: Complex<T>,
    nu: Complex<T>,
    r_max: usize,
    p: usize,
) -> (Vec<Complex<T>>, Complex<T>) {
    let n = 2 * r_max + 1;
    let r_of = |i: usize| i as i64 - r_max as i64;
    let zero = re(T::zero());
    // up[i] = c_i / c_{i-1} for i > p
    let mut up = vec![zero; n];
    let mut next = zero;
    for i in (p + 1..n).rev() {
        let ratio = -q / (diag(nu, a, r_of(i)) + q * next);
        up[i] = ratio;
        next = ratio;
    }
    // down[i] = c_i / c_{i+1} for i < p
    let mut down = vec![zero; n];
    let mut prev = zero;
    for i in 0..p {
        let ratio = -q / (diag(nu, a, r_of(i)) + q * prev);
        down[i] = ratio;
        prev = ratio;
    }
    let mut c = vec![zero; n];
    c[p] = re(T::one());
    for i in p + 1..n {
        c[i] = up[i] * c[i - 1];
    }
    for i in (0..p).rev() {
        c[i] = down[i] * c[i + 1];
    }
    let upper = if p + 1 < n { up[p + 1] } else { zero };
    let lower = if p > 0 { down[p - 1] } else { zero };
    let residual = diag(nu, a, r_of(p)) + q * (upper + lower);
    (c, residual)
}

fn null_vector<T: Real>(
    a: Complex<T>,
    q: Complex<T>,
    nu0: Complex<T>,
    r_max: usize,
) -> Result<(Complex<T>, Vec<Complex<T>>), SpecFunError> {
    let p = dominant_index(a, q, nu0, r_max);
    let mut nu = nu0;
    let scale = T::one() + nu0.norm();
    for _ in 0..12 {
        let (_, f) = sweep(a, q, nu, r_max, p);
        let h = lit::<T>(1e-6) * scale;
        let (_, fp) = sweep(a, q, nu + h, r_max, p);
        let (_, fm) = sweep(a, q, nu - h, r_max, p);
        let slope = (fp - fm) / (h * lit(2.0));
        if slope.norm() == T::zero() || !slope.norm().is_finite() {
            break;
        }
        let step = f / slope;
        nu = nu - step;
        if step.norm() <= tol::<T>(1e-15, 4.0) * scale {
            break;
        }
    }
    if (nu - nu0).norm() > lit::<T>(1e-4) * scale || !nu.norm().is_finite() {
        return Err(SpecFunError::ExponentDrift {
            estimate: nu0.norm().to_f64().unwrap_or(f64::NAN),
            drift: (nu - nu0).norm().to_f64().unwrap_or(f64::NAN),
        });
    }
    let (c, _) = sweep(a, q, nu, r_max, p);
    Ok((nu, c))
}

/// Which of the pair `F_ν(y)`, `F_ν(−y)` to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FloquetSign {
    Plus,
    Minus,
}

/// A Floquet pair `F_ν(±y)` ready for evaluation on the strip
/// `|Im y| ≤ delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloquetBasis<T> {
    pub table: CoeffTable<T>,
    pub delta: T,
    /// Exponent as returned by the monodromy before polishing.
    pub monodromy_nu: Complex<T>,
}

impl<T: Real> FloquetBasis<T> {
    pub fn new(a: Complex<T>, q: Complex<T>, delta: T) -> Result<Self, SpecFunError> {
        let exponent = mathieu_nu(a, q)?;
        if exponent.near_integer {
            return Err(SpecFunError::DegenerateExponent {
                re: exponent.nu.re.to_f64().unwrap_or(f64::NAN),
                im: exponent.nu.im.to_f64().unwrap_or(f64::NAN),
            });
        }
        let table = mathieu_coeffs_for_strip(a, q, exponent.nu, delta.abs())?;
        Ok(Self {
            table,
            delta: delta.abs(),
            monodromy_nu: exponent.nu,
        })
    }

    pub fn nu(&self) -> Complex<T> {
        self.table.nu
    }

    pub fn period(&self) -> T {
        T::PI()
    }

    /// `F_ν(y)` and `dF_ν/dy` by direct summation.
    fn eval_plus(&self, y: Complex<T>) -> (Complex<T>, Complex<T>) {
        let z = (im(lit::<T>(2.0)) * y).exp();
        let w = z.inv();
        let nu = self.table.nu;
        let r_max = self.table.r_max as i64;
        let two = lit::<T>(2.0);
        // Horner in z for r ≥ 0 and in 1/z for r < 0
        let mut pos = re(T::zero());
        let mut pos_d = re(T::zero());
        for r in (0..=r_max).rev() {
            let c = self.table.coeff(r);
            pos = pos * z + c;
            pos_d = pos_d * z + c * (nu + from_i64::<T>(r) * two);
        }
        let mut neg = re(T::zero());
        let mut neg_d = re(T::zero());
        for r in (1..=r_max).rev() {
            let c = self.table.coeff(-r);
            neg = (neg + c) * w;
            neg_d = (neg_d + c * (nu - from_i64::<T>(r) * two)) * w;
        }
        let phase = (Complex::<T>::i() * nu * y).exp();
        (phase * (pos + neg), Complex::<T>::i() * phase * (pos_d + neg_d))
    }

    /// Value and `y`-derivative of `F_ν(y)` (`Plus`) or of `y ↦ F_ν(−y)`
    /// (`Minus`).
    pub fn eval(&self, sign: FloquetSign, y: Complex<T>) -> (Complex<T>, Complex<T>) {
        match sign {
            FloquetSign::Plus => self.eval_plus(y),
            FloquetSign::Minus => {
                let (v, d) = self.eval_plus(-y);
                (v, -d)
            }
        }
    }

    pub fn me(&self, sign: FloquetSign, y: Complex<T>) -> Complex<T> {
        self.eval(sign, y).0
    }

    pub fn me_prime(&self, sign: FloquetSign, y: Complex<T>) -> Complex<T> {
        self.eval(sign, y).1
    }

    /// Same as [`eval`](Self::eval), but reduces `Re y` into `[0, π)` first
    /// and continues with `F_ν(±y + mπ) = e^{±imνπ} F_ν(±y)`.
    pub fn eval_continued(&self, sign: FloquetSign, y: Complex<T>) -> (Complex<T>, Complex<T>) {
        let m = (y.re / T::PI()).floor();
        let reduced = y - re(m * T::PI());
        let (v, d) = self.eval(sign, reduced);
        let s = match sign {
            FloquetSign::Plus => T::one(),
            FloquetSign::Minus => -T::one(),
        };
        let factor = (Complex::<T>::i() * self.table.nu * (s * m * T::PI())).exp();
        (v * factor, d * factor)
    }

    /// `W = F_ν(y)·d/dy[F_ν(−y)] − F_ν(−y)·F_ν'(y)`, constant in `y`.
    pub fn wronskian(&self, y: Complex<T>) -> Complex<T> {
        let (u1, d1) = self.eval(FloquetSign::Plus, y);
        let (u2, d2) = self.eval(FloquetSign::Minus, y);
        u1 * d2 - u2 * d1
    }
}
