//! Pipeline configuration: a JSON document with the problem inline or by
//! path, and command-line overrides on top.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ratlin::eigsolve::TargetRegion;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::problem::Problem;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Mode {
    VerifyLinearization,
    SolveRep,
    SolveNlep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PencilKind {
    Full,
    Trimmed,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Monomial,
    Chebyshev,
    Custom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AaaConfig {
    pub tol: f64,
    pub max_m: usize,
    pub set_valued: bool,
}

impl Default for AaaConfig {
    fn default() -> Self {
        AaaConfig { tol: 1e-13, max_m: 50, set_valued: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearizationConfig {
    pub kind: PencilKind,
    pub basis: BasisName,
    pub low_rank_tol: f64,
    /// Run the exact linearization oracle on the rationalized pencil.
    pub exact_check: bool,
    /// Treat an uncertified sufficient-minimality report as a failure.
    pub require_certificate: bool,
    /// Tolerance for point comparisons in the minimality conditions.
    pub minimality_tol: f64,
}

impl Default for LinearizationConfig {
    fn default() -> Self {
        LinearizationConfig {
            kind: PencilKind::Trimmed,
            basis: BasisName::Monomial,
            low_rank_tol: 1e-12,
            exact_check: false,
            require_certificate: false,
            minimality_tol: 1e-8,
        }
    }
}

/// Sample set `Σ` for the rational approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Sampling {
    /// `count` equispaced points on the boundary circle.
    Disc { center: Complex64, radius: f64, count: usize },
    /// `count` uniform points inside the disc, drawn with the run seed.
    RandomDisc { center: Complex64, radius: f64, count: usize },
    /// `count` equispaced points from `a` to `b`, endpoints included.
    Segment { a: Complex64, b: Complex64, count: usize },
    Points { points: Vec<Complex64> },
}

impl Sampling {
    pub fn points(&self, seed: u64) -> CliResult<Vec<Complex64>> {
        let pts = match self {
            Sampling::Disc { center, radius, count } => (0..*count)
                .map(|j| center + Complex64::from_polar(*radius, std::f64::consts::TAU * j as f64 / *count as f64))
                .collect(),
            Sampling::RandomDisc { center, radius, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..*count)
                    .map(|_| {
                        let r = radius * rng.gen::<f64>().sqrt();
                        center + Complex64::from_polar(r, std::f64::consts::TAU * rng.gen::<f64>())
                    })
                    .collect()
            }
            Sampling::Segment { a, b, count } => match count {
                0 => Vec::new(),
                1 => vec![*a],
                _ => (0..*count).map(|j| a + (b - a) * (j as f64 / (*count - 1) as f64)).collect(),
            },
            Sampling::Points { points } => points.clone(),
        };
        if pts.is_empty() {
            return Err(CliError::Config("sampling set is empty".into()));
        }
        Ok(pts)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
    /// CSV of `Σ` samples against approximation error.
    pub plot: Option<PathBuf>,
    pub timings: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { format: Format::Json, path: None, plot: None, timings: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProblemSource {
    Path(PathBuf),
    Inline(Box<Problem>),
}

/// The document passed with `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    pub mode: Mode,
    pub problem: ProblemSource,
    #[serde(default)]
    pub aaa: AaaConfig,
    #[serde(default)]
    pub linearization: LinearizationConfig,
    /// Overrides the sampling set of the problem.
    #[serde(default)]
    pub sampling: Option<Sampling>,
    #[serde(default = "all_region")]
    pub target: TargetRegion,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

fn all_region() -> TargetRegion {
    TargetRegion::All
}

fn default_residual_tol() -> f64 {
    1e-8
}

/// Resolved configuration with the problem loaded.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub problem: Problem,
    pub problem_ref: String,
    pub aaa: AaaConfig,
    pub linearization: LinearizationConfig,
    pub sampling: Option<Sampling>,
    pub target: TargetRegion,
    pub residual_tol: f64,
    pub output: OutputConfig,
    pub seed: u64,
}

/// Command-line values that replace file values when present.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub mode: Option<Mode>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub pencil: Option<PencilKind>,
    pub plot: Option<PathBuf>,
    pub timings: bool,
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.to_path_buf(), source })
}

impl PipelineConfig {
    pub fn load(path: &Path, overrides: &Overrides) -> CliResult<Self> {
        let file: ConfigFile = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::resolve(file, base, overrides)
    }

    /// Paths in `file` are relative to `base`.
    pub fn resolve(file: ConfigFile, base: &Path, overrides: &Overrides) -> CliResult<Self> {
        if file.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("unsupported schema_version {}", file.schema_version)));
        }
        let (problem, problem_ref) = match file.problem {
            ProblemSource::Path(p) => {
                let full = base.join(&p);
                let problem: Problem = read_json(&full)?;
                (problem, p.display().to_string())
            }
            ProblemSource::Inline(p) => {
                let name = p.name.clone();
                (*p, name)
            }
        };
        if problem.schema_version != SCHEMA_VERSION {
            return Err(CliError::Problem(format!("unsupported schema_version {}", problem.schema_version)));
        }
        let mut cfg = PipelineConfig {
            mode: file.mode,
            problem,
            problem_ref,
            aaa: file.aaa,
            linearization: file.linearization,
            sampling: file.sampling,
            target: file.target,
            residual_tol: file.residual_tol,
            output: file.output,
            seed: file.seed,
        };
        if let Some(m) = overrides.mode {
            cfg.mode = m;
        }
        if let Some(p) = &overrides.out {
            cfg.output.path = Some(p.clone());
        }
        if let Some(f) = overrides.format {
            cfg.output.format = f;
        }
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        if let Some(t) = overrides.tol {
            cfg.aaa.tol = t;
        }
        if let Some(k) = overrides.pencil {
            cfg.linearization.kind = k;
        }
        if let Some(p) = &overrides.plot {
            cfg.output.plot = Some(p.clone());
        }
        cfg.output.timings |= overrides.timings;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: &str| Err(CliError::Config(m.into()));
        if !(self.aaa.tol > 0.0) {
            return bad("aaa.tol must be positive");
        }
        if self.aaa.max_m < 1 {
            return bad("aaa.max_m must be at least 1");
        }
        if !(self.residual_tol > 0.0) {
            return bad("residual_tol must be positive");
        }
        if !(self.linearization.low_rank_tol > 0.0) || !(self.linearization.minimality_tol > 0.0) {
            return bad("linearization tolerances must be positive");
        }
        Ok(())
    }

    /// `Σ` from the config, falling back to the problem.
    pub fn sampling(&self) -> Option<&Sampling> {
        self.sampling.as_ref().or(self.problem.sampling.as_ref())
    }

    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            mode: self.mode,
            problem: self.problem_ref.clone(),
            aaa: self.aaa.clone(),
            linearization: self.linearization.clone(),
            sampling: self.sampling().cloned(),
            target: self.target.clone(),
            residual_tol: self.residual_tol,
            seed: self.seed,
        }
    }
}

/// The effective configuration as it appears in a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub problem: String,
    pub aaa: AaaConfig,
    pub linearization: LinearizationConfig,
    pub sampling: Option<Sampling>,
    pub target: TargetRegion,
    pub residual_tol: f64,
    pub seed: u64,
}
