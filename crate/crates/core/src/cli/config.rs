use crate::asymptotics::{PadeConvention, RoughCoefficient};
use crate::graphflow::GraphModel;
use crate::kernels::IsotropicKernel;
use crate::montecarlo::{Modulation, TraitModel, ZoomSpec};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

/// Output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A run configuration, tagged by `command`. Unknown fields are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum RunConfig {
    Rho(RhoConfig),
    Sweep(SweepConfig),
    Mc(McConfig),
    Hhd(HhdConfig),
    Paths(PathsConfig),
}

impl RunConfig {
    pub fn command(&self) -> &'static str {
        match self {
            RunConfig::Rho(_) => "rho",
            RunConfig::Sweep(_) => "sweep",
            RunConfig::Mc(_) => "mc",
            RunConfig::Hhd(_) => "hhd",
            RunConfig::Paths(_) => "paths",
        }
    }

    pub(crate) fn common(&self) -> (&Option<u64>, &Option<PathBuf>, &Option<Format>) {
        match self {
            RunConfig::Rho(c) => (&c.seed, &c.out, &c.format),
            RunConfig::Sweep(c) => (&c.seed, &c.out, &c.format),
            RunConfig::Mc(c) => (&c.seed, &c.out, &c.format),
            RunConfig::Hhd(c) => (&c.seed, &c.out, &c.format),
            RunConfig::Paths(c) => (&c.seed, &c.out, &c.format),
        }
    }
}

/// A list of values, or an evenly spaced range.
///
/// `{"logspace": {"start": -4, "stop": 2, "num": 61}}` spans `10^start` to
/// `10^stop`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged, deny_unknown_fields)]
pub enum Grid {
    Values(Vec<f64>),
    Log { logspace: Range },
    Lin { linspace: Range },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub num: usize,
}

impl Grid {
    pub fn values(&self) -> Result<Vec<f64>, String> {
        let lin = |r: &Range| -> Result<Vec<f64>, String> {
            if r.num == 0 || !r.start.is_finite() || !r.stop.is_finite() {
                return Err(format!("invalid range {r:?}"));
            }
            if r.num == 1 {
                return Ok(vec![r.start]);
            }
            let step = (r.stop - r.start) / (r.num - 1) as f64;
            Ok((0..r.num).map(|i| r.start + step * i as f64).collect())
        };
        let v = match self {
            Grid::Values(v) => v.clone(),
            Grid::Lin { linspace } => lin(linspace)?,
            Grid::Log { logspace } => lin(logspace)?.into_iter().map(|e| 10f64.powf(e)).collect(),
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        Ok(v)
    }
}

/// Routes available to `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoMethod {
    /// The most accurate deterministic route for the model.
    Model,
    /// Nested quadrature over the trait distance (Gaussian traits only).
    Chi2Quadrature,
    MonteCarlo,
}

fn default_rho_methods() -> Vec<RhoMethod> {
    vec![RhoMethod::Model]
}

fn default_replicates() -> usize {
    100_000
}

/// `rho` and `sigma2` for one kernel and trait model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoConfig {
    pub kernel: IsotropicKernel,
    pub traits: TraitModel,
    pub dim: usize,
    #[serde(default = "default_rho_methods")]
    pub methods: Vec<RhoMethod>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Kernel family of a sweep; the kernel has unit length scale so that the
/// trait scale equals the roughness `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    SquaredExponential,
    Matern,
}

/// Routes available to `sweep`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMethod {
    ClosedForm,
    Quadrature,
    Chi2Quadrature,
    LowerBound,
    Pade,
    LimitSmooth,
    LimitRough,
    MonteCarlo,
}

/// Grid of `(r, [r2], nu, T)` points evaluated by several routes.
///
/// With `r2`, each point has roughness coefficients `(r, r2)` and `T = 2`
/// (squared exponential only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub r: Grid,
    pub r2: Option<Grid>,
    pub nu: Option<Grid>,
    #[serde(default = "default_dims")]
    pub dim: Vec<usize>,
    pub methods: Vec<SweepMethod>,
    #[serde(default = "default_sweep_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub pade_convention: PadeConvention,
    #[serde(default)]
    pub rough_coefficient: RoughCoefficient,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn default_dims() -> Vec<usize> {
    vec![2]
}

fn default_sweep_replicates() -> usize {
    10_000
}

/// Monte Carlo estimate of `rho` and `sigma2` against the deterministic route.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    pub kernel: IsotropicKernel,
    pub traits: TraitModel,
    pub dim: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub modulation: Modulation,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Decomposition of a given flow, of one sampled flow, or (with
/// `replicates`) an ensemble comparison against the expected norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HhdConfig {
    pub input: Option<PathBuf>,
    pub graph: Option<GraphModel>,
    pub kernel: Option<IsotropicKernel>,
    pub traits: Option<TraitModel>,
    pub dim: Option<usize>,
    pub replicates: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Matérn sample paths at nested zoom levels; `out` is a directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathsConfig {
    pub nu: Vec<f64>,
    #[serde(default = "default_l")]
    pub l: f64,
    pub zoom: ZoomSpec,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn default_l() -> f64 {
    1.0
}
