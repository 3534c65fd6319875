//! Small dense and tridiagonal complex solvers.

use num_complex::Complex;

use crate::scalar::{re, Real};

/// LU factorisation of a complex tridiagonal matrix with partial pivoting
/// (row interchanges introduce a second superdiagonal).
#[derive(Debug, Clone)]
pub struct TridiagonalLu<T> {
    dl: Vec<Complex<T>>,
    d: Vec<Complex<T>>,
    du: Vec<Complex<T>>,
    du2: Vec<Complex<T>>,
    swapped: Vec<bool>,
}

impl<T: Real> TridiagonalLu<T> {
    /// Factors the matrix with sub-diagonal `dl`, diagonal `d` and
    /// super-diagonal `du`. Exactly zero pivots are replaced by `tiny`, which
    /// makes the factorisation usable for inverse iteration on singular
    /// matrices.
    pub fn factor(
        mut dl: Vec<Complex<T>>,
        mut d: Vec<Complex<T>>,
        mut du: Vec<Complex<T>>,
        tiny: T,
    ) -> Self {
        let n = d.len();
        assert!(n >= 1 && dl.len() + 1 == n && du.len() + 1 == n);
        let mut du2 = vec![re(T::zero()); n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() == T::zero() {
                    d[i] = re(tiny);
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] = d[i + 1] - fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1].norm() == T::zero() {
            d[n - 1] = re(tiny);
        }
        Self {
            dl,
            d,
            du,
            du2,
            swapped,
        }
    }

    pub fn solve_in_place(&self, b: &mut [Complex<T>]) {
        let n = self.d.len();
        assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.dl[i] * b[i];
            } else {
                b[i + 1] = b[i + 1] - self.dl[i] * b[i];
            }
        }
        b[n - 1] = b[n - 1] / self.d[n - 1];
        if n >= 2 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

/// Outcome of a dense solve: the solution and the smallest pivot magnitude
/// relative to the largest entry of the column-equilibrated matrix.
#[derive(Debug, Clone)]
pub struct DenseSolution<T> {
    pub x: Vec<Complex<T>>,
    pub pivot_ratio: T,
}

/// Gaussian elimination with partial pivoting on an `n×n` row-major matrix,
/// after scaling every column to unit max-norm.
pub fn solve_dense<T: Real>(
    mut a: Vec<Vec<Complex<T>>>,
    mut b: Vec<Complex<T>>,
) -> Option<DenseSolution<T>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|row| row.len() == n));
    let mut col_scale = vec![T::one(); n];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let m = a.iter().fold(T::zero(), |acc, row| acc.max(row[j].norm()));
        if m > T::zero() {
            *scale = m;
            for row in a.iter_mut() {
                row[j] = row[j] / m;
            }
        }
    }
    let mut min_pivot = T::infinity();
    for col in 0..n {
        let (pivot_row, pivot_mag) = (col..n)
            .map(|r| (r, a[r][col].norm()))
            .fold((col, -T::one()), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_mag == T::zero() || !pivot_mag.is_finite() {
            return None;
        }
        min_pivot = min_pivot.min(pivot_mag);
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f.norm() == T::zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c];
                a[r][c] = a[r][c] - f * v;
            }
            let v = b[col];
            b[r] = b[r] - f * v;
        }
    }
    let mut x = vec![re(T::zero()); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s = s - a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    for (xi, s) in x.iter_mut().zip(&col_scale) {
        *xi = *xi / *s;
    }
    Some(DenseSolution {
        x,
        pivot_ratio: min_pivot,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn tri_mul(dl: &[C], d: &[C], du: &[C], x: &[C]) -> Vec<C> {
        let n = d.len();
        (0..n)
            .map(|i| {
                let mut s = d[i] * x[i];
                if i > 0 {
                    s += dl[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += du[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn tridiagonal_solve_with_pivoting() {
        let dl = vec![c(5.0, 1.0), c(-2.0, 0.0), c(0.5, 3.0), c(7.0, 0.0)];
        let d = vec![c(0.1, 0.0), c(1.0, 1.0), c(0.0, 0.2), c(3.0, -1.0), c(1.0, 0.0)];
        let du = vec![c(1.0, 0.0), c(2.0, -1.0), c(-4.0, 0.0), c(0.3, 0.3)];
        let want = vec![c(1.0, 2.0), c(-1.0, 0.5), c(0.3, 0.0), c(2.0, -2.0), c(0.0, 1.0)];
        let mut b = tri_mul(&dl, &d, &du, &want);
        let lu = TridiagonalLu::factor(dl, d, du, 1e-300);
        lu.solve_in_place(&mut b);
        for (x, w) in b.iter().zip(&want) {
            assert!((x - w).norm() < 1e-13);
        }
    }

    #[test]
    fn dense_solve_badly_scaled_columns() {
        let a = vec![
            vec![c(1e12, 0.0), c(1e-12, 1e-12), c(1.0, 0.0)],
            vec![c(2e12, 1e12), c(3e-12, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 1e12), c(-1e-12, 0.0), c(2.0, 0.0)],
        ];
        let want = vec![c(1e-12, 0.0), c(2e12, -1e12), c(0.5, 0.5)];
        let b: Vec<C> = a
            .iter()
            .map(|row| row.iter().zip(&want).map(|(x, y)| x * y).sum())
            .collect();
        let sol = solve_dense(a, b).unwrap();
        for (x, w) in sol.x.iter().zip(&want) {
            assert!((x - w).norm() < 1e-12 * w.norm());
        }
        assert!(sol.pivot_ratio > 1e-3);
    }

    #[test]
    fn dense_singular_detected() {
        let a = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        let sol = solve_dense(a, vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(sol.map_or(true, |s| s.pivot_ratio < 1e-15));
    }
}
