//! Run reports and their JSON, CSV and plot-data forms.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{ConfigEcho, Mode, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};

/// Pass/fail of one enabled check, named after what produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationSummary {
    pub function: String,
    pub m: usize,
    /// `max |g - r| / max |g|` over `Σ`.
    pub max_rel_error: f64,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PencilSummary {
    pub mode: String,
    pub dim: usize,
    pub n: usize,
    pub k: usize,
    pub state_sizes: Vec<usize>,
    /// Column rank of each term after trimming (`n` when untrimmed).
    pub term_ranks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermMinimality {
    pub irreducible: bool,
    pub common_root: Option<Complex64>,
    pub coefficient_condition: bool,
    pub coefficient_witness: Option<Complex64>,
    pub state_eigenvalues: Vec<Complex64>,
}

/// Outcome of the sufficient minimality conditions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalitySummary {
    pub check: String,
    pub certified_minimal: bool,
    /// Why the conditions could not be evaluated, if so.
    pub not_applicable: Option<String>,
    pub disjoint_states: Option<bool>,
    pub disjoint_witness: Option<(usize, usize, Complex64)>,
    pub terms: Vec<TermMinimality>,
}

/// Outcome of the exact linearization oracle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizationSummary {
    pub check: String,
    pub field: String,
    pub region: String,
    pub is_linearization: bool,
    pub rank_condition: Option<bool>,
    pub pole_match: Option<bool>,
    pub zero_match: Option<bool>,
    pub witness: Option<String>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointMultiplicities {
    pub point: String,
    pub multiplicities: Vec<usize>,
}

/// Poles and zeros of the exact matrix in the region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureSummary {
    pub check: String,
    pub poles: Vec<PointMultiplicities>,
    pub zeros: Vec<PointMultiplicities>,
    /// Factors whose roots are outside the field.
    pub unresolved: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionSummary {
    pub check: String,
    pub passed: bool,
    pub grade: Option<i64>,
    pub reason: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenpairRow {
    pub value: Complex64,
    pub classification: String,
    /// Against the rational approximation `R`; absent at poles.
    pub residual: Option<f64>,
    /// Against the original nonlinear matrix when its functions are known.
    pub residual_nonlinear: Option<f64>,
    pub vector: Vec<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub mode: Mode,
    pub config: ConfigEcho,
    pub approximation: Vec<ApproximationSummary>,
    pub pencil: Option<PencilSummary>,
    pub minimality: Option<MinimalitySummary>,
    pub finite_condition: Option<ConditionSummary>,
    pub linearization: Option<LinearizationSummary>,
    pub infinity: Option<ConditionSummary>,
    pub linearization_at_infinity: Option<LinearizationSummary>,
    pub structure: Option<StructureSummary>,
    pub eigenpairs: Vec<EigenpairRow>,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunReport {
    pub fn new(config: ConfigEcho) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            mode: config.mode,
            config,
            approximation: Vec::new(),
            pencil: None,
            minimality: None,
            finite_condition: None,
            linearization: None,
            infinity: None,
            linearization_at_infinity: None,
            structure: None,
            eigenpairs: Vec::new(),
            checks: Vec::new(),
            passed: true,
            timings_ms: None,
        }
    }

    pub fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.passed &= passed;
        self.checks.push(CheckOutcome { name: name.into(), passed, detail: detail.into() });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// `re,im,residual,classification`, one row per eigenpair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("re,im,residual,classification\n");
        for p in &self.eigenpairs {
            let res = p.residual.map(|r| format!("{r:e}")).unwrap_or_default();
            writeln!(out, "{:e},{:e},{},{}", p.value.re, p.value.im, res, p.classification).unwrap();
        }
        out
    }
}

/// One sample of `Σ` with the approximation error of one function.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotRow {
    pub function: String,
    pub point: Complex64,
    pub abs_error: f64,
    pub rel_error: f64,
}

pub fn plot_csv(rows: &[PlotRow]) -> String {
    let mut out = String::from("function,re,im,abs_error,rel_error\n");
    for r in rows {
        writeln!(out, "{},{:e},{:e},{:e},{:e}", csv_field(&r.function), r.point.re, r.point.im, r.abs_error, r.rel_error).unwrap();
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}
