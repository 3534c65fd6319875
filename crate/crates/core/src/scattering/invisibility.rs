//! Reflectionless-side and transparency checks on the critical lattice.

use rayon::prelude::*;

use crate::model::{PotentialSpec, Regime};
use crate::scalar::{from_usize, lit, Real};
use crate::scattering::{scatter, ScatterError};

pub const RIGHT_REFLECTION_BOUND: f64 = 1e-10;
pub const TRANSMISSION_BOUND: f64 = 1e-10;
pub const LEFT_REFLECTION_FLOOR: f64 = 1e-6;
/// Fraction of energies that must show finite left reflection.
pub const LEFT_REFLECTION_QUORUM: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InvisibilityError {
    #[error("invisibility check needs the critical lattice (v0 = 0.5), got {0:?}")]
    NotCritical(Regime),
    #[error("invisibility check needs an even number of cells, got {0}")]
    OddCells(u32),
    #[error("transparency check needs an odd number of cells, got {0}")]
    EvenCells(u32),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation<T> {
    pub energy: T,
    pub quantity: &'static str,
    pub value: T,
    pub bound: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvisibilityRow<T> {
    pub energy: T,
    pub t2: T,
    pub rl2: T,
    pub rr2: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvisibilityReport<T> {
    pub rows: Vec<InvisibilityRow<T>>,
    pub violations: Vec<Violation<T>>,
    pub finite_left: usize,
    pub passed: bool,
}

fn require_critical<T: Real>(spec: &PotentialSpec<T>) -> Result<(), InvisibilityError> {
    match spec.regime() {
        Regime::Critical => Ok(()),
        other => Err(InvisibilityError::NotCritical(other)),
    }
}

/// Checks `|R_R|² ≈ 0`, `|T|² ≈ 1` and finite `|R_L|²` on an even critical
/// lattice.
pub fn invisibility_check<T: Real>(
    spec: &PotentialSpec<T>,
    energies: &[T],
) -> Result<InvisibilityReport<T>, InvisibilityError> {
    require_critical(spec)?;
    if spec.n_cells() % 2 == 1 {
        return Err(InvisibilityError::OddCells(spec.n_cells()));
    }
    let results: Result<Vec<_>, _> = energies.par_iter().map(|&e| scatter(spec, e)).collect();
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut finite_left = 0;
    for r in results? {
        let row = InvisibilityRow {
            energy: r.energy,
            t2: r.t2(),
            rl2: r.rl2(),
            rr2: r.rr2(),
        };
        let rr_bound = lit(RIGHT_REFLECTION_BOUND);
        let t_bound = lit(TRANSMISSION_BOUND);
        if !(row.rr2 < rr_bound) {
            violations.push(Violation {
                energy: row.energy,
                quantity: "RR2",
                value: row.rr2,
                bound: rr_bound,
            });
        }
        let t_dev = (row.t2 - T::one()).abs();
        if !(t_dev < t_bound) {
            violations.push(Violation {
                energy: row.energy,
                quantity: "|T2-1|",
                value: t_dev,
                bound: t_bound,
            });
        }
        if row.rl2 > lit(LEFT_REFLECTION_FLOOR) {
            finite_left += 1;
        }
        rows.push(row);
    }
    let quorum = from_usize::<T>(rows.len()) * lit(LEFT_REFLECTION_QUORUM);
    let passed = violations.is_empty() && from_usize::<T>(finite_left) >= quorum;
    Ok(InvisibilityReport {
        rows,
        violations,
        finite_left,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransparencyRow<T> {
    pub m: u32,
    pub energy: T,
    pub reflection_product: T,
    pub transmission_deviation: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransparencyReport<T> {
    pub rows: Vec<TransparencyRow<T>>,
    pub passed: bool,
}

/// Energies `E = W0/2 + m²π²` where `κ = mπ`.
pub fn transparency_energy<T: Real>(w0: T, m: u32) -> T {
    let mpi = from_usize::<T>(m as usize) * T::PI();
    w0 / lit(2.0) + mpi * mpi
}

/// Checks `|R_R R_L| ≈ 0` and `|T| ≈ 1` at `κ = mπ` on an odd critical
/// lattice.
pub fn transparency_check<T: Real>(
    spec: &PotentialSpec<T>,
    orders: &[u32],
) -> Result<TransparencyReport<T>, InvisibilityError> {
    require_critical(spec)?;
    if spec.n_cells() % 2 == 0 {
        return Err(InvisibilityError::EvenCells(spec.n_cells()));
    }
    let mut rows = Vec::new();
    let mut passed = true;
    for &m in orders {
        let energy = transparency_energy(spec.w0(), m);
        let r = scatter(spec, energy)?;
        let row = TransparencyRow {
            m,
            energy,
            reflection_product: (r.r_left * r.r_right).norm(),
            transmission_deviation: (r.t.norm() - T::one()).abs(),
        };
        passed &= row.reflection_product < lit(RIGHT_REFLECTION_BOUND)
            && row.transmission_deviation < lit(TRANSMISSION_BOUND);
        rows.push(row);
    }
    Ok(TransparencyReport { rows, passed })
}
