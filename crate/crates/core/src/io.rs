//! File formats shared with the command-line runner: grid-function CSV,
//! report CSVs, and the JSON experiment configuration.
//!
//! Floats are written with Rust's shortest round-trip formatting, so an
//! exported grid function re-imports with bit-identical values and repeated
//! runs produce byte-identical artifacts.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::approx::ConvergenceRow;
use crate::densities::{ComponentShape, CsumFamily, CsumShape, ShapeKind, TabulatedShape};
use crate::error::{Error, Result};
use crate::estimate::{OptimizeResult, SearchConfig, SweepRow};
use crate::grid::{Grid, GridFunction};
use crate::rearrange::Rearranged;

/// Write a grid function as `x,value` rows.
pub fn write_grid_csv(path: &Path, f: &GridFunction) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,value")?;
    for (x, v) in f.grid().points().zip(f.values()) {
        writeln!(w, "{x},{v}")?;
    }
    Ok(())
}

/// Read a grid function from `x,value` rows, validating uniform spacing.
pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for record in rdr.records() {
        let record = record?;
        if record.len() != 2 {
            return Err(Error::Config(format!(
                "{}: expected 2 columns, got {}",
                path.display(),
                record.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{}: bad number '{s}'", path.display())))
        };
        xs.push(parse(&record[0])?);
        values.push(parse(&record[1])?);
    }
    if xs.len() < 2 {
        return Err(Error::Config(format!(
            "{}: a grid needs at least 2 samples",
            path.display()
        )));
    }
    let n = xs.len();
    let grid = Grid::new(xs[0], xs[n - 1], n)?;
    for (i, &x) in xs.iter().enumerate() {
        let expected = grid.x(i);
        if (x - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::Config(format!(
                "{}: abscissae are not uniformly spaced at row {i} ({x} vs {expected})",
                path.display()
            )));
        }
    }
    GridFunction::new(grid, values)
}

/// Write a rearrangement as `x,m` rows at abscissae `0, delta, 2 delta, ...`.
pub fn write_rearranged_csv(path: &Path, m: &Rearranged) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "x,m")?;
    for (j, v) in m.values().iter().enumerate() {
        let x = j as f64 * m.delta();
        writeln!(w, "{x},{v}")?;
    }
    Ok(())
}

/// Write extremality sweep rows. The `csum` column records whether the family
/// satisfied the hypotheses, so exploratory (non-CSUM) sweeps are
/// distinguishable in the artifact.
pub fn write_theorem_csv(path: &Path, rows: &[SweepRow], family_is_csum: bool) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "alpha,component,perturbation,v_median,v_candidate,gap,verdict,csum")?;
    for row in rows {
        let r = &row.report;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.alpha,
            row.component,
            row.perturbation,
            r.v_median,
            r.v_candidate,
            r.gap,
            r.verdict,
            family_is_csum
        )?;
    }
    Ok(())
}

/// Write `(risk, alpha, value)` rows; the alpha column is empty for risks
/// without an order parameter.
pub fn write_risks_csv(path: &Path, rows: &[(String, Option<f64>, f64)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "risk,alpha,value")?;
    for (risk, alpha, value) in rows {
        match alpha {
            Some(a) => writeln!(w, "{risk},{a},{value}")?,
            None => writeln!(w, "{risk},,{value}")?,
        }
    }
    Ok(())
}

pub fn write_convergence_csv(path: &Path, rows: &[ConvergenceRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "n,l1_gap,v_alpha_fn,v_alpha_p,domination_violation,pass")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.n, r.l1_gap, r.v_alpha_fn, r.v_alpha_p, r.domination_violation, r.pass
        )?;
    }
    Ok(())
}

/// Write the improving trace of a shift search followed by the final row.
pub fn write_optimize_csv(path: &Path, result: &OptimizeResult) -> Result<()> {
    let k = result.best_shifts.len();
    let mut w = BufWriter::new(File::create(path)?);
    let mut header = String::from("step,value");
    for i in 0..k {
        header.push_str(&format!(",shift_{i}"));
    }
    writeln!(w, "{header}")?;
    for (step, (shifts, value)) in result.trace.iter().enumerate() {
        let mut line = format!("{step},{value}");
        for s in shifts.shifts() {
            line.push_str(&format!(",{s}"));
        }
        writeln!(w, "{line}")?;
    }
    let mut line = format!("best,{}", result.best_value);
    for s in result.best_shifts.shifts() {
        line.push_str(&format!(",{s}"));
    }
    writeln!(w, "{line}")?;
    Ok(())
}

// ---------------------------------------------------------------------------
// JSON configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Deserialize)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ComponentConfig {
    pub weight: f64,
    pub kind: String,
    #[serde(default)]
    pub location: Option<f64>,
    #[serde(default)]
    pub scale: Option<f64>,
    /// Grid-function CSV for `kind = "tabulated"`, resolved relative to the
    /// configuration file.
    #[serde(default)]
    pub values_file: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct FamilyConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub s_max: Option<f64>,
    pub components: Vec<ComponentConfig>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct PerturbationsConfig {
    #[serde(default = "default_mode")]
    pub mode: String,
    pub step: f64,
    pub half_width: f64,
}

fn default_mode() -> String {
    "per-component".into()
}

#[derive(Debug, Clone, Deserialize)]
pub struct SearchSection {
    pub step: f64,
    pub half_width: f64,
    #[serde(default)]
    pub restarts: u32,
    #[serde(default = "default_max_iters")]
    pub max_iters: u32,
}

fn default_max_iters() -> u32 {
    100
}

impl SearchSection {
    pub fn to_search_config(&self) -> SearchConfig {
        SearchConfig {
            step: self.step,
            half_width: self.half_width,
            restarts: self.restarts,
            max_iters: self.max_iters,
        }
    }
}

/// The experiment configuration consumed by the runner.
#[derive(Debug, Clone, Deserialize)]
pub struct ExperimentConfig {
    pub family: FamilyConfig,
    #[serde(default)]
    pub alphas: Vec<f64>,
    #[serde(default)]
    pub risk: Option<String>,
    #[serde(default)]
    pub perturbations: Option<PerturbationsConfig>,
    #[serde(default)]
    pub search: Option<SearchSection>,
    #[serde(default)]
    pub n_list: Option<Vec<u32>>,
    #[serde(default)]
    pub l1_threshold: Option<f64>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Load and parse an experiment configuration. JSON syntax errors surface
/// with their line/column positions.
pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(Error::from)
}

/// Build a family from its configuration section. Tabulated components load
/// their samples from `values_file` (relative paths resolve against
/// `base_dir`) and must live on the family grid.
pub fn build_family(cfg: &FamilyConfig, base_dir: &Path) -> Result<CsumFamily> {
    let grid = Grid::new(cfg.grid.x_min, cfg.grid.x_max, cfg.grid.n)?;
    let mut components = Vec::with_capacity(cfg.components.len());
    for (i, c) in cfg.components.iter().enumerate() {
        let shape = match c.kind.to_ascii_lowercase().as_str() {
            "gaussian" | "laplace" | "uniform" | "triangular" => {
                let location = c.location.ok_or_else(|| {
                    Error::Config(format!("component {i}: '{}' needs a location", c.kind))
                })?;
                let scale = c.scale.ok_or_else(|| {
                    Error::Config(format!("component {i}: '{}' needs a scale", c.kind))
                })?;
                let kind = match c.kind.to_ascii_lowercase().as_str() {
                    "gaussian" => ShapeKind::Gaussian,
                    "laplace" => ShapeKind::Laplace,
                    "uniform" => ShapeKind::Uniform,
                    _ => ShapeKind::Triangular,
                };
                ComponentShape::Analytic(CsumShape::new(kind, location, scale)?)
            }
            "tabulated" => {
                let file = c.values_file.as_ref().ok_or_else(|| {
                    Error::Config(format!("component {i}: tabulated needs values_file"))
                })?;
                let mut path = PathBuf::from(file);
                if path.is_relative() {
                    path = base_dir.join(path);
                }
                let f = read_grid_csv(&path)?;
                if !grids_match(f.grid(), grid) {
                    return Err(Error::Config(format!(
                        "component {i}: {} is sampled on a different grid than the family",
                        path.display()
                    )));
                }
                let f = GridFunction::new(grid, f.values().to_vec())?;
                ComponentShape::Tabulated(TabulatedShape::new(f, c.location)?)
            }
            other => {
                return Err(Error::Config(format!(
                    "component {i}: unknown kind '{other}'"
                )))
            }
        };
        components.push((c.weight, shape));
    }
    CsumFamily::new(grid, components, cfg.s_max)
}

fn grids_match(a: Grid, b: Grid) -> bool {
    a.len() == b.len()
        && (a.x_min() - b.x_min()).abs() <= 1e-9 * a.x_min().abs().max(1.0)
        && (a.x_max() - b.x_max()).abs() <= 1e-9 * a.x_max().abs().max(1.0)
}
