//! Spectral singularities: real `(V0, E)` where the outgoing-only matching
//! determinant vanishes.

use num_complex::Complex;
use rayon::prelude::*;

use crate::model::{ModelError, PotentialSpec};
use crate::scalar::{from_usize, lit, Real};
use crate::scattering::{build_basis, Boundary, ScatterError};

/// Grid minima below this normalised `|D|` become candidates.
pub const CANDIDATE_THRESHOLD: f64 = 1e-2;
/// Refined candidates satisfy normalised `|D|` below this.
pub const REFINED_THRESHOLD: f64 = 1e-8;
pub const STEP_TOLERANCE: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 50;
pub const DEFAULT_GRID: usize = 200;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SingularityError {
    #[error("invalid scan window `{field}`: {reason}")]
    InvalidWindow { field: &'static str, reason: String },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularityCandidate<T> {
    pub v0: T,
    pub e: T,
    /// Normalised `|D|` at `(v0, e)`.
    pub det_magnitude: T,
    pub refined: bool,
    pub l_cells: u32,
    pub w0: T,
}

impl<T: Real> SingularityCandidate<T> {
    pub fn spec(&self) -> Result<PotentialSpec<T>, ModelError> {
        PotentialSpec::new(self.w0, self.v0, self.l_cells)
    }
}

/// Normalised determinant of the outgoing-only matching conditions.
pub fn matching_determinant<T: Real>(spec: &PotentialSpec<T>, energy: T) -> Result<Complex<T>, ScatterError> {
    let basis = build_basis(spec, energy)?;
    Ok(Boundary::new(spec, energy, &basis)?.outgoing_determinant())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanWindow<T> {
    pub v0_min: T,
    pub v0_max: T,
    pub e_min: T,
    pub e_max: T,
    pub grid: usize,
}

impl<T: Real> ScanWindow<T> {
    pub fn new(v0: (T, T), e: (T, T), grid: usize) -> Self {
        Self {
            v0_min: v0.0,
            v0_max: v0.1,
            e_min: e.0,
            e_max: e.1,
            grid,
        }
    }

    fn validate(&self, w0: T) -> Result<(), SingularityError> {
        let bad = |field, reason: &str| {
            Err(SingularityError::InvalidWindow {
                field,
                reason: reason.to_string(),
            })
        };
        if self.grid < 3 {
            return bad("grid", "needs at least 3 points per axis");
        }
        if !(self.v0_min >= T::zero()) || !(self.v0_max > self.v0_min) {
            return bad("v0", "needs 0 <= v0min < v0max");
        }
        if !(self.e_min > w0) || !(self.e_max > self.e_min) {
            return bad("e", "needs w0 < emin < emax");
        }
        Ok(())
    }

    fn v0_at(&self, i: usize) -> T {
        self.v0_min + (self.v0_max - self.v0_min) * from_usize::<T>(i) / from_usize::<T>(self.grid - 1)
    }

    fn e_at(&self, j: usize) -> T {
        self.e_min + (self.e_max - self.e_min) * from_usize::<T>(j) / from_usize::<T>(self.grid - 1)
    }
}

/// Normalised `|D|` on the `grid × grid` window, indexed `[v0][e]`.
/// Points where the determinant cannot be evaluated hold NaN.
pub fn determinant_grid<T: Real>(w0: T, n_cells: u32, window: &ScanWindow<T>) -> Result<Vec<Vec<T>>, SingularityError> {
    window.validate(w0)?;
    PotentialSpec::new(w0, window.v0_min, n_cells)?;
    Ok((0..window.grid)
        .into_par_iter()
        .map(|i| {
            let spec = PotentialSpec::new(w0, window.v0_at(i), n_cells).expect("validated window");
            (0..window.grid)
                .map(|j| {
                    matching_determinant(&spec, window.e_at(j))
                        .map(|d| d.norm())
                        .unwrap_or_else(|_| T::nan())
                })
                .collect()
        })
        .collect())
}

/// Strict local minima of `|D|` below [`CANDIDATE_THRESHOLD`], unrefined,
/// ordered by `(v0, e)`.
pub fn ss_scan<T: Real>(
    w0: T,
    n_cells: u32,
    window: &ScanWindow<T>,
) -> Result<Vec<SingularityCandidate<T>>, SingularityError> {
    let grid = determinant_grid(w0, n_cells, window)?;
    Ok(local_minima(&grid, w0, n_cells, window, lit(CANDIDATE_THRESHOLD)))
}

fn local_minima<T: Real>(
    grid: &[Vec<T>],
    w0: T,
    n_cells: u32,
    window: &ScanWindow<T>,
    threshold: T,
) -> Vec<SingularityCandidate<T>> {
    let g = window.grid;
    let mut out = Vec::new();
    for i in 0..g {
        for j in 0..g {
            let d = grid[i][j];
            if !(d < threshold) {
                continue;
            }
            let mut is_min = true;
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                        continue;
                    }
                    let other = grid[ni as usize][nj as usize];
                    if !(d < other) && !other.is_nan() {
                        is_min = false;
                    }
                }
            }
            if is_min {
                out.push(SingularityCandidate {
                    v0: window.v0_at(i),
                    e: window.e_at(j),
                    det_magnitude: d,
                    refined: false,
                    l_cells: n_cells,
                    w0,
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum RefineFailure {
    IterationLimit,
    /// Line search could not reduce `|D|`.
    Stalled,
    /// Iterate left the admissible region (`v0 < 0` or `E <= W0`).
    LeftDomain,
    SingularJacobian,
    Evaluation(ScatterError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T> {
    pub candidate: SingularityCandidate<T>,
    pub iterations: usize,
    pub last_step: T,
    pub failure: Option<RefineFailure>,
}

fn det_at<T: Real>(c: &SingularityCandidate<T>, v0: T, e: T) -> Result<Complex<T>, RefineFailure> {
    if !(v0 >= T::zero()) || !(e > c.w0) {
        return Err(RefineFailure::LeftDomain);
    }
    let spec = PotentialSpec::new(c.w0, v0, c.l_cells).map_err(|_| RefineFailure::LeftDomain)?;
    matching_determinant(&spec, e).map_err(RefineFailure::Evaluation)
}

/// Damped Newton on `(Re D, Im D) = 0` in `(v0, e)` with a forward-difference
/// Jacobian.
pub fn ss_refine<T: Real>(candidate: &SingularityCandidate<T>) -> Refinement<T> {
    let mut v0 = candidate.v0;
    let mut e = candidate.e;
    let mut last_step = T::infinity();
    let unrefined = |v0: T, e: T, d: T, it, step, failure| Refinement {
        candidate: SingularityCandidate {
            v0,
            e,
            det_magnitude: d,
            refined: false,
            ..*candidate
        },
        iterations: it,
        last_step: step,
        failure: Some(failure),
    };
    let mut d = match det_at(candidate, v0, e) {
        Ok(d) => d,
        Err(f) => return unrefined(v0, e, candidate.det_magnitude, 0, last_step, f),
    };
    for it in 1..=MAX_NEWTON_ITERATIONS {
        if d.norm() < lit(REFINED_THRESHOLD) && last_step < lit(STEP_TOLERANCE) {
            return Refinement {
                candidate: SingularityCandidate {
                    v0,
                    e,
                    det_magnitude: d.norm(),
                    refined: true,
                    ..*candidate
                },
                iterations: it - 1,
                last_step,
                failure: None,
            };
        }
        let hv = lit::<T>(1e-7) * (T::one() + v0.abs());
        let he = lit::<T>(1e-7) * (T::one() + e.abs());
        let dv = match det_at(candidate, v0 + hv, e) {
            Ok(x) => (x - d) / hv,
            Err(f) => return unrefined(v0, e, d.norm(), it, last_step, f),
        };
        let de = match det_at(candidate, v0, e + he) {
            Ok(x) => (x - d) / he,
            Err(f) => return unrefined(v0, e, d.norm(), it, last_step, f),
        };
        // [dv.re de.re; dv.im de.im] [sv; se] = −[d.re; d.im]
        let jac = dv.re * de.im - de.re * dv.im;
        if jac == T::zero() || !jac.is_finite() {
            return unrefined(v0, e, d.norm(), it, last_step, RefineFailure::SingularJacobian);
        }
        let sv = -(de.im * d.re - de.re * d.im) / jac;
        let se = -(-dv.im * d.re + dv.re * d.im) / jac;
        let mut lambda = T::one();
        let mut accepted = None;
        for _ in 0..30 {
            let (nv, ne) = (v0 + lambda * sv, e + lambda * se);
            match det_at(candidate, nv, ne) {
                Ok(nd) if nd.norm() < d.norm() => {
                    accepted = Some((nv, ne, nd));
                    break;
                }
                Ok(_) | Err(RefineFailure::LeftDomain) => lambda = lambda * lit(0.5),
                Err(f) => return unrefined(v0, e, d.norm(), it, last_step, f),
            }
        }
        match accepted {
            Some((nv, ne, nd)) => {
                last_step = ((nv - v0).powi(2) + (ne - e).powi(2)).sqrt();
                v0 = nv;
                e = ne;
                d = nd;
            }
            None => {
                // |D| already at its noise floor: a full step that is tiny counts as converged
                let full = (sv * sv + se * se).sqrt();
                if d.norm() < lit(REFINED_THRESHOLD) && full < lit(STEP_TOLERANCE) {
                    last_step = full;
                    continue;
                }
                return unrefined(v0, e, d.norm(), it, full, RefineFailure::Stalled);
            }
        }
    }
    if d.norm() < lit(REFINED_THRESHOLD) && last_step < lit(STEP_TOLERANCE) {
        return Refinement {
            candidate: SingularityCandidate {
                v0,
                e,
                det_magnitude: d.norm(),
                refined: true,
                ..*candidate
            },
            iterations: MAX_NEWTON_ITERATIONS,
            last_step,
            failure: None,
        };
    }
    unrefined(v0, e, d.norm(), MAX_NEWTON_ITERATIONS, last_step, RefineFailure::IterationLimit)
}

/// Grid minima up to this `|D|` seed a refinement in [`ss_search`]; the
/// valleys are often narrower than the grid spacing.
pub const SEED_THRESHOLD: f64 = 0.1;

/// Points closer than this in both coordinates are the same zero.
pub const DUPLICATE_DISTANCE: f64 = 1e-6;

/// Scan, then refine every grid minimum below [`SEED_THRESHOLD`].
///
/// Returns the distinct refined zeros together with the unrefined grid
/// candidates below [`CANDIDATE_THRESHOLD`] whose refinement failed, ordered
/// by `(v0, e)`.
pub fn ss_search<T: Real>(
    w0: T,
    n_cells: u32,
    window: &ScanWindow<T>,
) -> Result<Vec<Refinement<T>>, SingularityError> {
    let grid = determinant_grid(w0, n_cells, window)?;
    let seeds = local_minima(&grid, w0, n_cells, window, lit(SEED_THRESHOLD));
    let refined: Vec<Refinement<T>> = seeds.par_iter().map(ss_refine).collect();
    let mut out: Vec<Refinement<T>> = Vec::new();
    let close = lit::<T>(DUPLICATE_DISTANCE);
    for (seed, r) in seeds.iter().zip(refined) {
        if r.candidate.refined {
            let dup = out.iter().any(|o| {
                o.candidate.refined
                    && (o.candidate.v0 - r.candidate.v0).abs() < close
                    && (o.candidate.e - r.candidate.e).abs() < close
            });
            if !dup {
                out.push(r);
            }
        } else if seed.det_magnitude < lit(CANDIDATE_THRESHOLD) {
            out.push(Refinement {
                candidate: *seed,
                ..r
            });
        }
    }
    out.sort_by(|a, b| {
        (a.candidate.v0, a.candidate.e)
            .partial_cmp(&(b.candidate.v0, b.candidate.e))
            .expect("finite candidates")
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_determinant_bounded_away_from_zero() {
        for n in [1, 3] {
            let spec = PotentialSpec::new(4.0, 0.0, n).unwrap();
            for i in 0..40 {
                let e = 4.1 + i as f64 * 0.9;
                // Hermitian: |D| = 1/√(1 + |R|²) ≥ 1/√2
                assert!(matching_determinant(&spec, e).unwrap().norm() > 0.7);
            }
        }
    }

    #[test]
    fn window_validation_names_field() {
        let w = ScanWindow::new((1.0, 0.5), (5.0, 6.0), 10);
        assert!(matches!(ss_scan(4.0, 1, &w), Err(SingularityError::InvalidWindow { field: "v0", .. })));
        let w = ScanWindow::new((0.6, 1.0), (3.0, 6.0), 10);
        assert!(matches!(ss_scan(4.0, 1, &w), Err(SingularityError::InvalidWindow { field: "e", .. })));
    }

    #[test]
    fn far_seed_reports_failure() {
        let c = SingularityCandidate {
            v0: 0.2,
            e: 20.0,
            det_magnitude: 1.0,
            refined: false,
            l_cells: 1,
            w0: 4.0,
        };
        let r = ss_refine(&c);
        assert!(!r.candidate.refined);
        assert!(r.failure.is_some());
    }

    #[test]
    fn refines_supercritical_zero() {
        let w = ScanWindow::new((2.6, 3.1), (9.5, 11.5), 21);
        let found = ss_search(4.0, 1, &w).unwrap();
        let refined: Vec<_> = found.iter().filter(|r| r.candidate.refined).collect();
        assert!(!refined.is_empty(), "{found:?}");
        for r in refined {
            assert!(r.candidate.det_magnitude < REFINED_THRESHOLD);
        }
    }
}
