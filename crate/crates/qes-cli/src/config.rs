//! Run configuration: the JSON schema consumed by every subcommand, the
//! command-line flag overlay, and resolution into exact model parameters.
//!
//! Schema (all blocks optional unless a subcommand needs them):
//!
//! ```json
//! {
//!   "model":  { "family": "I", "A": "1", "B": "3/2", "m": 0.02 },
//!   "rows":   "auto",                  // or ["1.1", "1.2"]
//!   "grid":   { "n": 2001, "epsilon": 0.001, "domain": [0.1, 3.5] },
//!   "output": { "format": "csv", "path": "out.csv", "precision": 15 }
//! }
//! ```
//!
//! `A` and `B` are exact rational strings (`"p/q"`, `q ≠ 0`, or an integer);
//! decimal strings are snapped to the nearest rational within `1e-9` of the
//! value, with a warning.  The configuration round-trips: parsing a document
//! and serializing it back yields the same value.

use num_rational::Rational64;
use qes_core::error::{QesError, Result};
use qes_core::model::{Family, RowId};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Largest denominator considered when snapping a decimal input to a
/// rational.
const SNAP_DENOM_CAP: i64 = 1_000_000_000;

/// Relative tolerance of the decimal-to-rational snap.
const SNAP_TOL: f64 = 1e-9;

/// Whole run configuration.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// The potential model; required by every subcommand except `verify`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelBlock>,
    /// Sector selection: `"auto"` (all admissible sectors) or an explicit
    /// list of sector labels such as `["1.1", "2.2"]`.
    #[serde(default)]
    pub rows: RowsSpec,
    /// Sampling / discretization sizes.
    #[serde(default)]
    pub grid: GridBlock,
    /// Where and how results are written.
    #[serde(default)]
    pub output: OutputBlock,
}

/// The potential model: family, exact couplings, elliptic parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelBlock {
    /// `"I"`, `"II"` or `"III"`.
    pub family: String,
    /// Coupling `A` as a rational string.
    #[serde(rename = "A")]
    pub a: String,
    /// Coupling `B` as a rational string.
    #[serde(rename = "B")]
    pub b: String,
    /// Elliptic parameter `m = k²`, strictly inside `(0, 1)`.
    pub m: f64,
}

/// Sector selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RowsSpec {
    /// The keyword `"auto"`: use every admissible sector.
    Keyword(String),
    /// Explicit sector labels, e.g. `["1.1", "1.3"]`.
    List(Vec<String>),
}

impl Default for RowsSpec {
    fn default() -> Self {
        RowsSpec::Keyword("auto".into())
    }
}

/// Sampling / discretization sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridBlock {
    /// Number of grid points (wavefunction sampling, oracle matrix size).
    #[serde(default = "default_grid_n")]
    pub n: usize,
    /// Margin kept clear of potential or coordinate singularities; defaults
    /// to `10⁻³·K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Explicit sampling interval `[lo, hi]`, overriding the family default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<[f64; 2]>,
}

fn default_grid_n() -> usize {
    2001
}

impl Default for GridBlock {
    fn default() -> Self {
        GridBlock {
            n: default_grid_n(),
            epsilon: None,
            domain: None,
        }
    }
}

/// Output format of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    /// Comment-headed, plot-ready CSV.
    Csv,
    /// Pretty-printed JSON.
    Json,
}

impl FromStr for OutputFormat {
    type Err = QesError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(QesError::Constraint(format!(
                "unknown output format '{other}' (expected csv or json)"
            ))),
        }
    }
}

/// Where and how results are written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    /// `"csv"` (default) or `"json"`.
    #[serde(default = "default_format")]
    pub format: OutputFormat,
    /// Output file; stdout when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    /// Significant digits printed (1..=17), default 15.
    #[serde(default = "default_precision")]
    pub precision: usize,
}

fn default_format() -> OutputFormat {
    OutputFormat::Csv
}

fn default_precision() -> usize {
    15
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            format: default_format(),
            path: None,
            precision: default_precision(),
        }
    }
}

/// Command-line values layered on top of a configuration file.
#[derive(Debug, Clone, Default)]
pub struct FlagOverlay {
    pub family: Option<String>,
    pub a: Option<String>,
    pub b: Option<String>,
    pub m: Option<f64>,
    pub rows: Option<String>,
    pub grid_n: Option<usize>,
    pub epsilon: Option<f64>,
    pub out: Option<String>,
    pub format: Option<String>,
}

/// Load the configuration file (when given) and apply flag overrides; flags
/// win over file values.
///
/// # Errors
///
/// `Constraint` for unreadable or malformed configuration files, malformed
/// flag values, or a model block that is only partially specified.
pub fn build_config(path: Option<&str>, flags: &FlagOverlay) -> Result<RunConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                QesError::Constraint(format!("cannot read config file {p}: {e}"))
            })?;
            serde_json::from_str::<RunConfig>(&text)
                .map_err(|e| QesError::Constraint(format!("config file {p}: {e}")))?
        }
        None => RunConfig::default(),
    };

    // Model block: flags win field-by-field; if any field ends up set, all
    // four must be.
    let base = cfg.model.take();
    let family = flags
        .family
        .clone()
        .or_else(|| base.as_ref().map(|b| b.family.clone()));
    let a = flags.a.clone().or_else(|| base.as_ref().map(|b| b.a.clone()));
    let b = flags.b.clone().or_else(|| base.as_ref().map(|b| b.b.clone()));
    let m = flags.m.or(base.as_ref().map(|b| b.m));
    cfg.model = match (family, a, b, m) {
        (None, None, None, None) => None,
        (Some(family), Some(a), Some(b), Some(m)) => Some(ModelBlock { family, a, b, m }),
        (family, a, b, m) => {
            let mut missing = Vec::new();
            if family.is_none() {
                missing.push("family (-f)");
            }
            if a.is_none() {
                missing.push("A (-A)");
            }
            if b.is_none() {
                missing.push("B (-B)");
            }
            if m.is_none() {
                missing.push("m (-m)");
            }
            return Err(QesError::Constraint(format!(
                "model underspecified: missing {}",
                missing.join(", ")
            )));
        }
    };

    if let Some(rows) = &flags.rows {
        let trimmed = rows.trim();
        cfg.rows = if trimmed.eq_ignore_ascii_case("auto") {
            RowsSpec::Keyword("auto".into())
        } else {
            RowsSpec::List(
                trimmed
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            )
        };
    }
    if let Some(n) = flags.grid_n {
        cfg.grid.n = n;
    }
    if let Some(eps) = flags.epsilon {
        cfg.grid.epsilon = Some(eps);
    }
    if let Some(out) = &flags.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(fmt) = &flags.format {
        cfg.output.format = fmt.parse()?;
    }
    Ok(cfg)
}

/// Exact model parameters resolved from the configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedModel {
    pub family: Family,
    pub a: Rational64,
    pub b: Rational64,
    pub m: f64,
    /// Notes emitted while interpreting the inputs (decimal snaps).
    pub warnings: Vec<String>,
}

/// Resolve the model block into exact parameters.
///
/// # Errors
///
/// `Constraint` when the block is absent or a field does not parse.
pub fn resolve_model(cfg: &RunConfig) -> Result<ResolvedModel> {
    let block = cfg.model.as_ref().ok_or_else(|| {
        QesError::Constraint(
            "no model given: pass -f, -A, -B and -m, or a --config file with a model block"
                .into(),
        )
    })?;
    let family: Family = block.family.parse()?;
    let mut warnings = Vec::new();
    let a = parse_rational("A", &block.a, &mut warnings)?;
    let b = parse_rational("B", &block.b, &mut warnings)?;
    if !block.m.is_finite() {
        return Err(QesError::Constraint(format!(
            "m must be a finite number, got {}",
            block.m
        )));
    }
    Ok(ResolvedModel {
        family,
        a,
        b,
        m: block.m,
        warnings,
    })
}

/// Resolve the sector selection: `None` means every admissible sector.
///
/// # Errors
///
/// `Constraint` for unknown keywords, unknown sector labels, or an explicit
/// empty list.
pub fn resolve_rows(cfg: &RunConfig) -> Result<Option<Vec<RowId>>> {
    match &cfg.rows {
        RowsSpec::Keyword(word) if word.eq_ignore_ascii_case("auto") => Ok(None),
        RowsSpec::Keyword(word) => Err(QesError::Constraint(format!(
            "unknown rows keyword '{word}' (expected \"auto\" or a list of sector labels)"
        ))),
        RowsSpec::List(labels) => {
            if labels.is_empty() {
                return Err(QesError::Constraint(
                    "rows list is empty; use \"auto\" to select every admissible sector".into(),
                ));
            }
            let mut ids = Vec::with_capacity(labels.len());
            for label in labels {
                let id: RowId = label.parse()?;
                if !ids.contains(&id) {
                    ids.push(id);
                }
            }
            Ok(Some(ids))
        }
    }
}

/// Validate the printing precision.
///
/// # Errors
///
/// `Constraint` outside `1..=17`.
pub fn resolve_precision(cfg: &RunConfig) -> Result<usize> {
    let p = cfg.output.precision;
    if (1..=17).contains(&p) {
        Ok(p)
    } else {
        Err(QesError::Constraint(format!(
            "output precision must lie in 1..=17 significant digits, got {p}"
        )))
    }
}

/// Parse a rational string: `"p/q"` or an integer exactly; a decimal snaps
/// to the nearest rational within `1e-9` relative, recording a warning.
fn parse_rational(field: &str, text: &str, warnings: &mut Vec<String>) -> Result<Rational64> {
    let t = text.trim();
    if t.is_empty() {
        return Err(QesError::Constraint(format!("{field} is empty")));
    }
    if let Some((p, q)) = t.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| {
            QesError::Constraint(format!("{field}={t}: numerator is not an integer"))
        })?;
        let q: i64 = q.trim().parse().map_err(|_| {
            QesError::Constraint(format!("{field}={t}: denominator is not an integer"))
        })?;
        if q == 0 {
            return Err(QesError::Constraint(format!(
                "{field}={t}: denominator must be non-zero"
            )));
        }
        return Ok(Rational64::new(p, q));
    }
    if let Ok(i) = t.parse::<i64>() {
        return Ok(Rational64::from_integer(i));
    }
    let x: f64 = t.parse().map_err(|_| {
        QesError::Constraint(format!(
            "{field}={t}: expected a rational like 3/2, an integer, or a decimal"
        ))
    })?;
    if !x.is_finite() {
        return Err(QesError::Constraint(format!(
            "{field}={t}: value must be finite"
        )));
    }
    let r = snap_to_rational(x).ok_or_else(|| {
        QesError::Constraint(format!(
            "{field}={t}: no rational with denominator <= {SNAP_DENOM_CAP} lies within \
             {SNAP_TOL} of the value"
        ))
    })?;
    warnings.push(format!(
        "{field}={t} snapped to the exact rational {r} (within {SNAP_TOL:e} relative)"
    ));
    Ok(r)
}

/// Best rational approximation by continued fractions, accepted when within
/// `1e-9` relative of the input.
fn snap_to_rational(x: f64) -> Option<Rational64> {
    let tol = SNAP_TOL * x.abs().max(1.0);
    let (mut p0, mut q0) = (1i64, 0i64);
    let (mut p1, mut q1) = (x.floor() as i64, 1i64);
    let mut frac = x - x.floor();
    for _ in 0..64 {
        if (p1 as f64 / q1 as f64 - x).abs() <= tol {
            return Some(Rational64::new(p1, q1));
        }
        if frac.abs() < f64::EPSILON {
            break;
        }
        let inv = 1.0 / frac;
        let step = inv.floor();
        frac = inv - step;
        let step = step as i64;
        let p2 = step.checked_mul(p1)?.checked_add(p0)?;
        let q2 = step.checked_mul(q1)?.checked_add(q0)?;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if q1 > SNAP_DENOM_CAP {
            break;
        }
    }
    ((p1 as f64 / q1 as f64 - x).abs() <= tol).then(|| Rational64::new(p1, q1))
}
