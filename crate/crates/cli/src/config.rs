use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use ptscatter_core::singularity::DEFAULT_GRID;
use ptscatter_core::Side;
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CommandKind {
    /// |T|², |R_L|², |R_R|² over an energy grid (CSV)
    Spectrum,
    /// Scattering state at E = emin over [-π, L + π] (CSV)
    Wavefield,
    /// Spectral-singularity search over a (v0, E) window (JSON)
    SsScan,
    /// Reflectionless-side check on the critical lattice (JSON)
    Invisibility,
    /// Generalized unitarity residuals over an energy grid (JSON)
    Unitarity,
    /// Potential samples over [-π, L + π] (CSV)
    Potential,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Spectrum => "spectrum",
            CommandKind::Wavefield => "wavefield",
            CommandKind::SsScan => "ss-scan",
            CommandKind::Invisibility => "invisibility",
            CommandKind::Unitarity => "unitarity",
            CommandKind::Potential => "potential",
        }
    }

    fn tabular(self) -> bool {
        matches!(self, CommandKind::Spectrum | CommandKind::Wavefield | CommandKind::Potential)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub const DEFAULT_EMIN_OFFSET: f64 = 0.05;
pub const DEFAULT_EMAX: f64 = 40.0;
pub const DEFAULT_STEPS: usize = 400;
pub const DEFAULT_V0MIN: f64 = 0.6;
pub const DEFAULT_V0MAX: f64 = 1.6;

/// Exact scattering for the confined PT-symmetric lattice
/// W0 (cos²x + i V0 sin 2x) on [0, nπ] in a uniform background W0.
///
/// Flags override values from --config. Exit codes: 0 success, 1 numeric
/// failure, 2 invalid configuration.
#[derive(Debug, Parser)]
#[command(name = "ptscatter", version, allow_negative_numbers = true)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: CommandKind,
    /// Background level and lattice strength W0 (required)
    #[arg(long)]
    pub w0: Option<f64>,
    /// Gain/loss ratio V0 (required except for ss-scan)
    #[arg(long)]
    pub v0: Option<f64>,
    /// Number of cells n; L = nπ (required)
    #[arg(long)]
    pub cells: Option<u32>,
    /// Lowest energy; wavefield energy [default: w0 + 0.05]
    #[arg(long)]
    pub emin: Option<f64>,
    /// Highest energy [default: 40]
    #[arg(long)]
    pub emax: Option<f64>,
    /// Energy or x samples [default: 400]
    #[arg(long)]
    pub steps: Option<usize>,
    /// Incidence side for wavefield [default: left]
    #[arg(long, value_enum)]
    pub side: Option<SideArg>,
    /// Lower v0 of the ss-scan window [default: 0.6]
    #[arg(long)]
    pub v0min: Option<f64>,
    /// Upper v0 of the ss-scan window [default: 1.6]
    #[arg(long)]
    pub v0max: Option<f64>,
    /// Points per axis of the ss-scan grid [default: 200]
    #[arg(long)]
    pub grid: Option<usize>,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format [default: csv for tables, json for reports]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// TOML file with any of the flag names as keys
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    w0: Option<f64>,
    v0: Option<f64>,
    cells: Option<u32>,
    emin: Option<f64>,
    emax: Option<f64>,
    steps: Option<usize>,
    side: Option<SideArg>,
    v0min: Option<f64>,
    v0max: Option<f64>,
    grid: Option<usize>,
    out: Option<PathBuf>,
    format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid configuration `{field}`: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

fn invalid<T>(field: &'static str, reason: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError {
        field,
        reason: reason.into(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub w0: f64,
    pub v0: Option<f64>,
    pub cells: u32,
    pub emin: f64,
    pub emax: f64,
    pub steps: usize,
    pub side: Side,
    pub v0min: f64,
    pub v0max: f64,
    pub grid: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
}

fn read_file(path: &Path) -> Result<FileConfig, ConfigError> {
    let text = std::fs::read_to_string(path).or_else(|e| invalid("config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).or_else(|e| invalid("config", e.to_string()))
}

fn finite(field: &'static str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        invalid(field, "must be finite")
    }
}

impl RunConfig {
    pub fn resolve(cli: Cli) -> Result<Self, ConfigError> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => FileConfig::default(),
        };
        let command = cli.command;
        let w0 = match cli.w0.or(file.w0) {
            Some(w0) => finite("w0", w0)?,
            None => return invalid("w0", "is required"),
        };
        if w0 <= 0.0 {
            return invalid("w0", "must be positive");
        }
        let v0 = cli.v0.or(file.v0).map(|v| finite("v0", v)).transpose()?;
        match v0 {
            Some(v) if v < 0.0 => return invalid("v0", "must be non-negative"),
            None if command != CommandKind::SsScan => return invalid("v0", "is required"),
            _ => {}
        }
        let cells = match cli.cells.or(file.cells) {
            Some(0) => return invalid("cells", "must be at least 1"),
            Some(n) => n,
            None => return invalid("cells", "is required"),
        };
        let emin = finite("emin", cli.emin.or(file.emin).unwrap_or(w0 + DEFAULT_EMIN_OFFSET))?;
        if emin <= w0 {
            return invalid("emin", format!("must exceed w0 = {w0}"));
        }
        let emax = finite("emax", cli.emax.or(file.emax).unwrap_or(DEFAULT_EMAX))?;
        let needs_range = !matches!(command, CommandKind::Wavefield | CommandKind::Potential);
        if needs_range && emax <= emin {
            return invalid("emax", "must exceed emin");
        }
        let steps = cli.steps.or(file.steps).unwrap_or(DEFAULT_STEPS);
        if steps < 2 {
            return invalid("steps", "must be at least 2");
        }
        let side = match cli.side.or(file.side).unwrap_or(SideArg::Left) {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        };
        let v0min = finite("v0min", cli.v0min.or(file.v0min).unwrap_or(DEFAULT_V0MIN))?;
        let v0max = finite("v0max", cli.v0max.or(file.v0max).unwrap_or(DEFAULT_V0MAX))?;
        let grid = cli.grid.or(file.grid).unwrap_or(DEFAULT_GRID);
        if command == CommandKind::SsScan {
            if v0min < 0.0 {
                return invalid("v0min", "must be non-negative");
            }
            if v0max <= v0min {
                return invalid("v0max", "must exceed v0min");
            }
            if grid < 3 {
                return invalid("grid", "must be at least 3");
            }
        }
        let format = cli
            .format
            .or(file.format)
            .unwrap_or(if command.tabular() { Format::Csv } else { Format::Json });
        if !command.tabular() && format == Format::Csv {
            return invalid("format", format!("{} writes JSON only", command.name()));
        }
        Ok(Self {
            command,
            w0,
            v0,
            cells,
            emin,
            emax,
            steps,
            side,
            v0min,
            v0max,
            grid,
            out: cli.out.or(file.out),
            format,
        })
    }

    /// `v0`, validated as present for every command but `ss-scan`.
    pub fn v0(&self) -> f64 {
        self.v0.expect("v0 validated for this command")
    }

    pub fn energies(&self) -> Vec<f64> {
        linspace(self.emin, self.emax, self.steps)
    }
}

pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + (hi - lo) * i as f64 / (count - 1) as f64 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut full = vec!["ptscatter"];
        full.extend_from_slice(args);
        RunConfig::resolve(Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(&["spectrum", "--w0", "4", "--v0", "0.3", "--cells", "1"]).unwrap();
        assert_eq!(c.emin, 4.05);
        assert_eq!(c.emax, DEFAULT_EMAX);
        assert_eq!(c.steps, DEFAULT_STEPS);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.side, Side::Left);
    }

    #[test]
    fn errors_name_the_field() {
        let e = parse(&["spectrum", "--w0", "4", "--v0", "0.3", "--cells", "1", "--emin", "4"]).unwrap_err();
        assert_eq!(e.field, "emin");
        let e = parse(&["spectrum", "--w0", "4", "--cells", "1"]).unwrap_err();
        assert_eq!(e.field, "v0");
        let e = parse(&["spectrum", "--w0", "4", "--v0", "0.3", "--cells", "0"]).unwrap_err();
        assert_eq!(e.field, "cells");
        let e = parse(&["unitarity", "--w0", "4", "--v0", "0.3", "--cells", "1", "--format", "csv"]).unwrap_err();
        assert_eq!(e.field, "format");
        let e = parse(&["ss-scan", "--w0", "4", "--cells", "1", "--v0min", "2", "--v0max", "1"]).unwrap_err();
        assert_eq!(e.field, "v0max");
    }

    #[test]
    fn ss_scan_does_not_need_v0() {
        let c = parse(&["ss-scan", "--w0", "4", "--cells", "1"]).unwrap();
        assert_eq!(c.grid, DEFAULT_GRID);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("ptscatter-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.toml");
        std::fs::write(&path, "w0 = 4.0\nv0 = 0.8\ncells = 3\nsteps = 7\n").unwrap();
        let c = parse(&["spectrum", "--config", path.to_str().unwrap(), "--cells", "2"]).unwrap();
        assert_eq!((c.w0, c.v0, c.cells, c.steps), (4.0, Some(0.8), 2, 7));
        std::fs::write(&path, "w0 = 4.0\nbogus = 1\n").unwrap();
        let e = parse(&["spectrum", "--config", path.to_str().unwrap()]).unwrap_err();
        assert_eq!(e.field, "config");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn linspace_hits_both_ends() {
        let g = linspace(4.05, 40.0, 2000);
        assert_eq!(g[0], 4.05);
        assert_eq!(g[1999], 40.0);
    }
}
