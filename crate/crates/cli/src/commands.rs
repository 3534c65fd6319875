use ptscatter_core::scattering::{
    invisibility_check, scatter, spectrum_sweep, wavefield, InvisibilityError, Provenance, ScatterError,
};
use ptscatter_core::singularity::{ss_search, ScanWindow, SingularityError, CANDIDATE_THRESHOLD};
use ptscatter_core::PotentialSpec;
use serde_json::json;

use crate::config::{linspace, CommandKind, ConfigError, RunConfig};
use crate::output::{Cell, Document, RunMetadata, Table};

pub const SPECTRUM_COLUMNS: &[&str] = &["E", "k", "T2", "RL2", "RR2", "residual", "flag"];
pub const WAVEFIELD_COLUMNS: &[&str] = &["x", "re_psi", "im_psi", "abs2"];
pub const POTENTIAL_COLUMNS: &[&str] = &["x", "re_v", "im_v"];

/// Scaled unitarity residual allowed at non-singular points.
pub const UNITARITY_BOUND: f64 = 1e-8;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) | RunError::Io(_) => 1,
        }
    }
}

impl From<ScatterError> for RunError {
    fn from(e: ScatterError) -> Self {
        RunError::Numeric(e.to_string())
    }
}

pub struct Outcome {
    pub document: Document,
    pub metadata: RunMetadata,
    /// Numeric problems that still let a document be written.
    pub failure: Option<RunError>,
}

fn spec(cfg: &RunConfig, v0: f64) -> Result<PotentialSpec, RunError> {
    PotentialSpec::new(cfg.w0, v0, cfg.cells).map_err(|e| {
        RunError::Config(ConfigError {
            field: "v0",
            reason: e.to_string(),
        })
    })
}

fn sample_xs(cfg: &RunConfig, s: &PotentialSpec) -> Vec<f64> {
    linspace(-std::f64::consts::PI, s.length() + std::f64::consts::PI, cfg.steps)
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, RunError> {
    match cfg.command {
        CommandKind::Spectrum => spectrum(cfg),
        CommandKind::Wavefield => field(cfg),
        CommandKind::Potential => potential(cfg),
        CommandKind::SsScan => ss(cfg),
        CommandKind::Invisibility => invisibility(cfg),
        CommandKind::Unitarity => unitarity(cfg),
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = spec(cfg, cfg.v0())?;
    let energies = cfg.energies();
    let mut meta = RunMetadata::new(cfg.command.name());
    let mut rows = Vec::with_capacity(energies.len());
    let mut failures = 0;
    for (&e, r) in energies.iter().zip(spectrum_sweep(&s, &energies)) {
        match r {
            Ok(r) => {
                meta.record(&r);
                let flag = if r.singular {
                    "singular"
                } else if r.provenance == Provenance::NumericFallback {
                    "fallback"
                } else {
                    "ok"
                };
                rows.push(vec![
                    Cell::Num(e),
                    Cell::Num(r.k),
                    Cell::Num(r.t2()),
                    Cell::Num(r.rl2()),
                    Cell::Num(r.rr2()),
                    Cell::Num(r.unitarity_residual),
                    Cell::Text(flag),
                ]);
            }
            Err(_) => {
                meta.record_failure();
                failures += 1;
                let mut row = vec![Cell::Num(e)];
                row.extend(std::iter::repeat(Cell::Num(f64::NAN)).take(5));
                row.push(Cell::Text("error"));
                rows.push(row);
            }
        }
    }
    Ok(Outcome {
        document: Document::Table(Table {
            columns: SPECTRUM_COLUMNS,
            rows,
        }),
        metadata: meta,
        failure: (failures > 0).then(|| RunError::Numeric(format!("{failures} energies failed"))),
    })
}

fn field(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = spec(cfg, cfg.v0())?;
    let mut meta = RunMetadata::new(cfg.command.name());
    meta.record(&scatter(&s, cfg.emin)?);
    let points = wavefield(&s, cfg.emin, cfg.side, &sample_xs(cfg, &s))?;
    let rows = points
        .iter()
        .map(|p| vec![Cell::Num(p.x), Cell::Num(p.psi.re), Cell::Num(p.psi.im), Cell::Num(p.psi.norm_sqr())])
        .collect();
    Ok(Outcome {
        document: Document::Table(Table {
            columns: WAVEFIELD_COLUMNS,
            rows,
        }),
        metadata: meta,
        failure: None,
    })
}

fn potential(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = spec(cfg, cfg.v0())?;
    let rows = sample_xs(cfg, &s)
        .into_iter()
        .map(|x| {
            let v = s.potential_value(x);
            vec![Cell::Num(x), Cell::Num(v.re), Cell::Num(v.im)]
        })
        .collect();
    Ok(Outcome {
        document: Document::Table(Table {
            columns: POTENTIAL_COLUMNS,
            rows,
        }),
        metadata: RunMetadata::new(cfg.command.name()),
        failure: None,
    })
}

fn ss(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let window = ScanWindow::new((cfg.v0min, cfg.v0max), (cfg.emin, cfg.emax), cfg.grid);
    let found = ss_search(cfg.w0, cfg.cells, &window).map_err(|e| match e {
        SingularityError::InvalidWindow { field, reason } => RunError::Config(ConfigError {
            field: match field {
                "e" => "emin",
                "v0" => "v0min",
                other => other,
            },
            reason,
        }),
        other => RunError::Numeric(other.to_string()),
    })?;
    let mut meta = RunMetadata::new(cfg.command.name());
    let mut candidates = Vec::with_capacity(found.len());
    for r in &found {
        let c = &r.candidate;
        match c.spec().map_err(ScatterError::from).and_then(|s| scatter(&s, c.e)) {
            Ok(res) => meta.record(&res),
            Err(_) => meta.record_failure(),
        }
        candidates.push(json!({
            "v0": c.v0,
            "e": c.e,
            "absD": c.det_magnitude,
            "refined": c.refined,
        }));
    }
    let report = json!({
        "w0": cfg.w0,
        "cells": cfg.cells,
        "window": {
            "v0min": cfg.v0min,
            "v0max": cfg.v0max,
            "emin": cfg.emin,
            "emax": cfg.emax,
            "grid": cfg.grid,
            "threshold": CANDIDATE_THRESHOLD,
        },
        "candidates": candidates,
    });
    Ok(Outcome {
        document: Document::Report(report),
        metadata: meta,
        failure: None,
    })
}

fn invisibility(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = spec(cfg, cfg.v0())?;
    let energies = cfg.energies();
    let report = invisibility_check(&s, &energies).map_err(|e| match e {
        InvisibilityError::NotCritical(_) => RunError::Config(ConfigError {
            field: "v0",
            reason: e.to_string(),
        }),
        InvisibilityError::OddCells(_) | InvisibilityError::EvenCells(_) => RunError::Config(ConfigError {
            field: "cells",
            reason: e.to_string(),
        }),
        InvisibilityError::Scatter(e) => e.into(),
    })?;
    let mut meta = RunMetadata::new(cfg.command.name());
    for &e in &energies {
        meta.record(&scatter(&s, e)?);
    }
    let rows: Vec<_> = report
        .rows
        .iter()
        .map(|r| json!({"E": r.energy, "T2": r.t2, "RL2": r.rl2, "RR2": r.rr2}))
        .collect();
    let violations: Vec<_> = report
        .violations
        .iter()
        .map(|v| json!({"E": v.energy, "quantity": v.quantity, "value": v.value, "bound": v.bound}))
        .collect();
    let value = json!({
        "w0": cfg.w0,
        "v0": cfg.v0(),
        "cells": cfg.cells,
        "rows": rows,
        "violations": violations,
        "finite_left": report.finite_left,
        "passed": report.passed,
    });
    Ok(Outcome {
        document: Document::Report(value),
        metadata: meta,
        failure: None,
    })
}

fn unitarity(cfg: &RunConfig) -> Result<Outcome, RunError> {
    let s = spec(cfg, cfg.v0())?;
    let energies = cfg.energies();
    let mut meta = RunMetadata::new(cfg.command.name());
    let mut rows = Vec::with_capacity(energies.len());
    let mut worst: f64 = 0.0;
    let mut passed = true;
    let mut failures = 0;
    for (&e, r) in energies.iter().zip(spectrum_sweep(&s, &energies)) {
        let r = match r {
            Ok(r) => r,
            Err(_) => {
                meta.record_failure();
                failures += 1;
                continue;
            }
        };
        meta.record(&r);
        let scaled = r.unitarity_residual / (1.0 + r.t2());
        let ok = r.singular || scaled < UNITARITY_BOUND;
        if !r.singular {
            worst = worst.max(scaled);
        }
        passed &= ok;
        rows.push(json!({
            "E": e,
            "T2": r.t2(),
            "RL2": r.rl2(),
            "RR2": r.rr2(),
            "residual": r.unitarity_residual,
            "scaled": scaled,
            "singular": r.singular,
            "passed": ok,
        }));
    }
    let value = json!({
        "w0": cfg.w0,
        "v0": cfg.v0(),
        "cells": cfg.cells,
        "bound": UNITARITY_BOUND,
        "max_scaled_residual": worst,
        "rows": rows,
        "passed": passed && failures == 0,
    });
    Ok(Outcome {
        document: Document::Report(value),
        metadata: meta,
        failure: (failures > 0).then(|| RunError::Numeric(format!("{failures} energies failed"))),
    })
}
