//! Experiment configuration: one JSON document covering every subcommand,
//! resolved from a preset, an optional config file and `--set` overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use symlie::integrators::NewtonConfig;
use symlie::io::ModelKind;
use symlie::learn::{Region, TgSampling, TrainConfig};
use symlie::{Retraction, RigidBodyParams};

use crate::error::{CliError, CliResult};

/// Experiment kinds, one per subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Simulate,
    GenerateData,
    Train,
    Evaluate,
    Geometrize,
    ErrorScaling,
    OrderStudy,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::GenerateData => "generate-data",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Geometrize => "geometrize",
            Command::ErrorScaling => "error-scaling",
            Command::OrderStudy => "order-study",
        }
    }
}

/// A one-step map: `series-K`, `euler` or `rk45`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Integrator {
    /// Truncated Hamilton–Jacobi series of the given order.
    Series(usize),
    /// Forward Euler on the reduced equations.
    Euler,
    /// Adaptive Dormand–Prince at the configured tolerances.
    Rk45,
}

impl fmt::Display for Integrator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Integrator::Series(k) => write!(f, "series-{k}"),
            Integrator::Euler => f.write_str("euler"),
            Integrator::Rk45 => f.write_str("rk45"),
        }
    }
}

impl FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "euler" => Ok(Integrator::Euler),
            "rk45" => Ok(Integrator::Rk45),
            _ => s
                .strip_prefix("series-")
                .and_then(|k| k.parse().ok())
                .map(Integrator::Series)
                .ok_or_else(|| format!("unknown integrator '{s}' (expected series-K, euler or rk45)")),
        }
    }
}

impl TryFrom<String> for Integrator {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Integrator> for String {
    fn from(i: Integrator) -> String {
        i.to_string()
    }
}

/// Phase space of an experiment: the full `T*SO(3)` or the reduced `so(3)*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Tg,
    Lp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub space: Space,
    pub integrators: Vec<Integrator>,
    pub mu0: [f64; 3],
    /// Cayley coordinates of the initial rotation.
    pub g0: [f64; 3],
    pub dt: f64,
    pub steps: usize,
    /// Tolerances of the `rk45` integrator.
    pub rtol: f64,
    pub atol: f64,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        SimulateConfig {
            space: Space::Tg,
            integrators: vec![Integrator::Series(7)],
            mu0: [1.0, 0.5, 0.75],
            g0: [0.0; 3],
            dt: 0.1,
            steps: 1000,
            rtol: 1e-3,
            atol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub space: Space,
    pub generator: Integrator,
    pub n: usize,
    pub dt: f64,
    pub seed: u64,
    /// Sampling boxes for `T*SO(3)` data.
    pub sampling: TgSampling,
    /// Sampling box for `so(3)*` data.
    pub region: Region,
    /// Per-entry noise variance added to the training set.
    pub sigma2: f64,
    pub noise_seed: u64,
    pub test_n: usize,
    pub test_seed: u64,
    /// Tolerances when the generator is `rk45`.
    pub rtol: f64,
    pub atol: f64,
    /// Existing datasets to use instead of generating new ones.
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            space: Space::Tg,
            generator: Integrator::Series(7),
            n: 500,
            dt: 0.1,
            seed: 0,
            sampling: TgSampling::default(),
            region: Region::cube(-2.0, 2.0),
            sigma2: 0.0,
            noise_seed: 1,
            test_n: 100,
            test_seed: 9999,
            rtol: 1e-10,
            atol: 1e-12,
            train_path: None,
            test_path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub hidden: Vec<usize>,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: ModelKind::Symmetric,
            hidden: vec![500, 500],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridRow {
    pub dt: f64,
    pub n: usize,
}

/// A table of training runs: every row × seed × model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub rows: Vec<GridRow>,
    pub models: Vec<ModelKind>,
    pub seeds: Vec<u64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            rows: vec![],
            models: vec![ModelKind::Symmetric],
            seeds: vec![0],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub checkpoint: Option<PathBuf>,
    pub dataset: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrizeConfig {
    /// Initial momentum of the comparison trajectories.
    pub mu0: [f64; 3],
    pub steps: usize,
}

impl Default for GeometrizeConfig {
    fn default() -> Self {
        GeometrizeConfig {
            mu0: [2.0, 0.5, 1.0],
            steps: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ErrorScalingConfig {
    pub pairs: usize,
    pub epsilons: Vec<f64>,
    pub seed: u64,
}

impl Default for ErrorScalingConfig {
    fn default() -> Self {
        ErrorScalingConfig {
            pairs: 20,
            epsilons: vec![0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrderStudyConfig {
    pub integrators: Vec<Integrator>,
    pub dts: Vec<f64>,
    pub horizon: f64,
    pub mu0: [f64; 3],
    pub reference_rtol: f64,
    pub reference_atol: f64,
}

impl Default for OrderStudyConfig {
    fn default() -> Self {
        OrderStudyConfig {
            integrators: vec![Integrator::Series(3), Integrator::Series(5), Integrator::Series(7)],
            dts: vec![0.5, 0.25, 0.125, 0.0625],
            horizon: 10.0,
            mu0: [1.0, 0.5, 0.75],
            reference_rtol: 1e-13,
            reference_atol: 1e-15,
        }
    }
}

/// The complete, serializable description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Option<Command>,
    pub name: Option<String>,
    pub inertia: [f64; 3],
    pub retraction: Retraction,
    pub newton: NewtonConfig,
    pub simulate: SimulateConfig,
    pub data: DataConfig,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub grid: Option<GridConfig>,
    pub evaluate: EvaluateConfig,
    pub geometrize: GeometrizeConfig,
    pub error_scaling: ErrorScalingConfig,
    pub order_study: OrderStudyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: None,
            name: None,
            inertia: RigidBodyParams::default().inertia,
            retraction: Retraction::Cayley,
            newton: NewtonConfig::default(),
            simulate: SimulateConfig::default(),
            data: DataConfig::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            grid: None,
            evaluate: EvaluateConfig::default(),
            geometrize: GeometrizeConfig::default(),
            error_scaling: ErrorScalingConfig::default(),
            order_study: OrderStudyConfig::default(),
        }
    }
}

fn config_err(field: &str, msg: impl fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

fn positive(field: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(config_err(field, format!("must be positive, got {x}")))
    }
}

fn check_series(field: &str, i: &Integrator) -> CliResult<()> {
    if let Integrator::Series(k) = i {
        if *k == 0 || *k > symlie::hj_series::MAX_ORDER {
            return Err(config_err(field, format!("series order must be in 1..={}, got {k}", symlie::hj_series::MAX_ORDER)));
        }
    }
    Ok(())
}

fn check_region(field: &str, r: &Region) -> CliResult<()> {
    r.validate().map_err(|e| config_err(field, e))
}

impl ExperimentConfig {
    /// Checks the sections used by `command`; messages name the offending field.
    pub fn validate(&self, command: Command) -> CliResult<()> {
        RigidBodyParams::new(self.inertia).map_err(|e| config_err("inertia", e))?;
        self.newton.validate().map_err(|e| config_err("newton", e))?;
        match command {
            Command::Simulate => {
                let s = &self.simulate;
                if s.steps > 0 {
                    positive("simulate.dt", s.dt)?;
                }
                if s.integrators.is_empty() {
                    return Err(config_err("simulate.integrators", "at least one integrator is required"));
                }
                for i in &s.integrators {
                    check_series("simulate.integrators", i)?;
                    if s.space == Space::Tg && *i == Integrator::Euler {
                        return Err(config_err("simulate.integrators", "euler is only available with space \"lp\""));
                    }
                }
                positive("simulate.rtol", s.rtol)?;
                positive("simulate.atol", s.atol)?;
            }
            Command::GenerateData | Command::ErrorScaling => self.validate_data(self.data.space, true)?,
            Command::Train => {
                if let Some(grid) = &self.grid {
                    if grid.rows.is_empty() || grid.models.is_empty() || grid.seeds.is_empty() {
                        return Err(config_err("grid", "rows, models and seeds must be non-empty"));
                    }
                    for row in &grid.rows {
                        positive("grid.rows.dt", row.dt)?;
                    }
                    for m in &grid.models {
                        self.validate_data(space_of(*m), false)?;
                    }
                } else {
                    self.validate_data(space_of(self.model.kind), true)?;
                }
                self.validate_model()?;
            }
            Command::Evaluate => {
                if self.evaluate.checkpoint.is_none() {
                    return Err(config_err("evaluate.checkpoint", "a checkpoint path is required"));
                }
                if self.evaluate.dataset.is_none() {
                    return Err(config_err("evaluate.dataset", "a dataset path is required"));
                }
            }
            Command::Geometrize => {
                if self.data.space != Space::Lp {
                    return Err(config_err("data.space", "geometrization works on so(3)* data; set it to \"lp\""));
                }
                self.validate_data(Space::Lp, true)?;
                self.validate_model()?;
                if self.data.n == 0 {
                    return Err(config_err("data.n", "geometrization needs at least one sample"));
                }
            }
            Command::OrderStudy => {
                let o = &self.order_study;
                if o.dts.len() < 3 {
                    return Err(config_err("order_study.dts", "at least three step sizes are required"));
                }
                positive("order_study.horizon", o.horizon)?;
                for &dt in &o.dts {
                    positive("order_study.dts", dt)?;
                    let n = o.horizon / dt;
                    if (n - n.round()).abs() > 1e-9 * n {
                        return Err(config_err("order_study.dts", format!("horizon {} is not a multiple of {dt}", o.horizon)));
                    }
                }
                for i in &o.integrators {
                    check_series("order_study.integrators", i)?;
                    if *i == Integrator::Rk45 {
                        return Err(config_err("order_study.integrators", "rk45 has no fixed step size"));
                    }
                }
            }
        }
        if command == Command::ErrorScaling {
            if self.data.space != Space::Tg {
                return Err(config_err("data.space", "the error-scaling experiment uses T*SO(3) pairs; set it to \"tg\""));
            }
            let e = &self.error_scaling;
            if e.pairs == 0 {
                return Err(config_err("error_scaling.pairs", "must be at least 1"));
            }
            if e.epsilons.iter().filter(|x| **x > 0.0).count() < 3 || e.epsilons.iter().any(|x| !(*x >= 0.0)) {
                return Err(config_err("error_scaling.epsilons", "need at least three positive, non-negative values"));
            }
        }
        Ok(())
    }

    fn validate_data(&self, space: Space, check_dt: bool) -> CliResult<()> {
        let d = &self.data;
        if check_dt {
            positive("data.dt", d.dt)?;
        }
        check_series("data.generator", &d.generator)?;
        if space == Space::Tg && d.generator == Integrator::Euler {
            return Err(config_err("data.generator", "euler is only available for so(3)* data"));
        }
        match space {
            Space::Tg => {
                check_region("data.sampling.chart", &d.sampling.chart)?;
                check_region("data.sampling.momentum", &d.sampling.momentum)?;
            }
            Space::Lp => {
                check_region("data.region", &d.region)?;
                if d.sigma2 > 0.0 {
                    return Err(config_err("data.sigma2", "noise injection is only supported for T*SO(3) data"));
                }
            }
        }
        if !(d.sigma2 >= 0.0) {
            return Err(config_err("data.sigma2", format!("must be non-negative, got {}", d.sigma2)));
        }
        positive("data.rtol", d.rtol)?;
        positive("data.atol", d.atol)
    }

    fn validate_model(&self) -> CliResult<()> {
        if self.model.hidden.is_empty() || self.model.hidden.contains(&0) {
            return Err(config_err("model.hidden", format!("widths must be positive, got {:?}", self.model.hidden)));
        }
        positive("train.optimizer.lr", self.train.optimizer.lr)?;
        if self.train.steps == 0 {
            return Err(config_err("train.steps", "must be at least 1"));
        }
        if self.train.batch_size.is_some() {
            return Err(config_err("train.batch_size", "only full-batch training is supported; leave it null"));
        }
        Ok(())
    }
}

/// Space of the data a model family trains on.
pub fn space_of(kind: ModelKind) -> Space {
    match kind {
        ModelKind::Poisson => Space::Lp,
        ModelKind::Symmetric | ModelKind::NonSymmetric => Space::Tg,
    }
}

/// Recursively merges `patch` into `base`; objects merge key by key, any
/// other value replaces.
pub fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

/// Applies one `key.path=value` override. The value is parsed as JSON when
/// possible and taken as a string otherwise.
pub fn apply_override(doc: &mut Value, spec: &str) -> CliResult<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{spec}' must look like key.path=value")))?;
    if path.is_empty() {
        return Err(CliError::Config(format!("override '{spec}' has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for key in path.split('.') {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        node = node.as_object_mut().unwrap().entry(key.to_string()).or_insert(Value::Null);
    }
    *node = value;
    Ok(())
}

/// Deserializes a config document, reporting the path of any bad field.
pub fn from_value(doc: Value) -> CliResult<ExperimentConfig> {
    serde_path_to_error::deserialize(doc).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config(format!("{path}: {}", e.into_inner()))
    })
}

/// Parses a config file's text, reporting line and column of syntax errors.
pub fn parse_file(text: &str, origin: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("{origin}: line {} column {}: {e}", e.line(), e.column())))
}
