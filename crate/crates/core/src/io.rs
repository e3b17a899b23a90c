//! Versioned on-disk formats: CSV trajectories and datasets with JSON
//! metadata sidecars, and JSON model checkpoints.
//!
//! Every CSV starts with a `# schema=<name> version=<major>.<minor>` line
//! followed by a header row. Readers reject other schemas and other major
//! versions. Floats are written in shortest round-trip form, so reading a
//! file back reproduces the values bit for bit.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrators::{Trajectory, TrajectoryMetadata};
use crate::learn::{
    NonSymmetricModel, PairDataset, PoissonDataset, PoissonModel, Provenance, ScalarNet, SymmetricModel, TgDataset, TrainConfig,
};
use crate::lie_so3::{Momentum, Retraction, Rotation, Vec3};
use crate::phase_space::{j_left, PhasePoint, ReducedHamiltonian};

pub const CSV_VERSION: &str = "1.0";
pub const CHECKPOINT_VERSION: &str = "1.0";

pub const SCHEMA_TRAJECTORY_TG: &str = "trajectory-tg";
pub const SCHEMA_TRAJECTORY_LP: &str = "trajectory-lp";
pub const SCHEMA_DATASET_TG: &str = "dataset-tg";
pub const SCHEMA_DATASET_LP: &str = "dataset-lp";

fn major(version: &str) -> &str {
    version.split('.').next().unwrap_or(version)
}

fn check_version(kind: &str, found: &str, expected: &str) -> Result<()> {
    if major(found) != major(expected) {
        return Err(Error::Version {
            kind: kind.to_string(),
            found: found.to_string(),
            expected: expected.to_string(),
        });
    }
    Ok(())
}

/// Writes `bytes` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Path of the JSON sidecar next to a CSV file.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("meta.json")
}

/// Writes a versioned numeric CSV.
pub fn write_table(path: &Path, schema: &str, header: &[String], rows: &[Vec<f64>]) -> Result<()> {
    let text: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|x| fmt_f64(*x)).collect()).collect();
    write_text_table(path, schema, header, &text)
}

/// Writes a versioned CSV whose cells are already formatted; used for
/// report tables that mix labels and numbers.
pub fn write_text_table(path: &Path, schema: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut buf = Vec::new();
    writeln!(buf, "# schema={schema} version={CSV_VERSION}")?;
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(header)?;
        for row in rows {
            if row.len() != header.len() {
                return Err(Error::InvalidInput(format!("row has {} fields, header {}", row.len(), header.len())));
            }
            w.write_record(row)?;
        }
        w.flush()?;
    }
    write_atomic(path, &buf)
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

/// Reads a versioned numeric CSV, checking the schema and major version.
pub fn read_table(path: &Path, schema: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let file = fs::File::open(path)?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let (found_schema, found_version) = parse_schema_line(&first)
        .ok_or_else(|| Error::Version { kind: "csv".into(), found: first.trim().to_string(), expected: format!("{schema} {CSV_VERSION}") })?;
    if found_schema != schema {
        return Err(Error::InvalidInput(format!("expected schema '{schema}', found '{found_schema}'")));
    }
    check_version(schema, &found_version, CSV_VERSION)?;
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::InvalidInput(format!("bad number '{s}': {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

fn parse_schema_line(line: &str) -> Option<(String, String)> {
    let rest = line.trim().strip_prefix('#')?.trim();
    let mut schema = None;
    let mut version = None;
    for part in rest.split_whitespace() {
        if let Some(s) = part.strip_prefix("schema=") {
            schema = Some(s.to_string());
        } else if let Some(v) = part.strip_prefix("version=") {
            version = Some(v.to_string());
        }
    }
    Some((schema?, version?))
}

fn names(prefix: &str, base: &[&str]) -> Vec<String> {
    base.iter().map(|b| format!("{prefix}{b}")).collect()
}

const G_NAMES: [&str; 9] = ["g11", "g12", "g13", "g21", "g22", "g23", "g31", "g32", "g33"];
const MU_NAMES: [&str; 3] = ["mu1", "mu2", "mu3"];

fn check_header(found: &[String], expected: &[String]) -> Result<()> {
    if found != expected {
        return Err(Error::InvalidInput(format!("unexpected CSV columns {found:?}")));
    }
    Ok(())
}

/// Sidecar for trajectory files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySidecar {
    pub schema: String,
    pub version: String,
    pub metadata: TrajectoryMetadata,
}

fn tg_traj_header() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(names("", &G_NAMES));
    h.extend(names("", &MU_NAMES));
    h.extend(["H", "casimir", "jl1", "jl2", "jl3"].map(String::from));
    h
}

fn lp_traj_header() -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(names("", &MU_NAMES));
    h.extend(["H", "casimir"].map(String::from));
    h
}

fn write_sidecar_for(path: &Path, schema: &str, metadata: &TrajectoryMetadata) -> Result<()> {
    write_json(
        &sidecar_path(path),
        &TrajectorySidecar {
            schema: schema.to_string(),
            version: CSV_VERSION.to_string(),
            metadata: metadata.clone(),
        },
    )
}

fn read_sidecar_for(path: &Path, schema: &str) -> Result<TrajectoryMetadata> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(TrajectoryMetadata::default());
    }
    let s: TrajectorySidecar = read_json(&side)?;
    check_version(schema, &s.version, CSV_VERSION)?;
    Ok(s.metadata)
}

/// Columns: `t, g11…g33, mu1…mu3, H, casimir, jl1…jl3`.
pub fn write_tg_trajectory(path: &Path, traj: &Trajectory<PhasePoint>, h: &ReducedHamiltonian) -> Result<()> {
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, z)| {
            let mut r = vec![*t];
            r.extend_from_slice(&z.embedding());
            r.push(h.value(&z.mu));
            r.push(z.mu.norm());
            r.extend_from_slice(j_left(z).as_slice());
            r
        })
        .collect();
    write_table(path, SCHEMA_TRAJECTORY_TG, &tg_traj_header(), &rows)?;
    write_sidecar_for(path, SCHEMA_TRAJECTORY_TG, &traj.metadata)
}

pub fn read_tg_trajectory(path: &Path) -> Result<Trajectory<PhasePoint>> {
    let (header, rows) = read_table(path, SCHEMA_TRAJECTORY_TG)?;
    check_header(&header, &tg_traj_header())?;
    let times = rows.iter().map(|r| r[0]).collect();
    let states = rows
        .iter()
        .map(|r| PhasePoint::new(Rotation::from_row_major_unchecked(&r[1..10]), Vec3::new(r[10], r[11], r[12])))
        .collect();
    Ok(Trajectory { times, states, metadata: read_sidecar_for(path, SCHEMA_TRAJECTORY_TG)? })
}

/// Columns: `t, mu1…mu3, H, casimir`.
pub fn write_lp_trajectory(path: &Path, traj: &Trajectory<Momentum>, h: &ReducedHamiltonian) -> Result<()> {
    let rows: Vec<Vec<f64>> = traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(t, m)| vec![*t, m[0], m[1], m[2], h.value(m), m.norm()])
        .collect();
    write_table(path, SCHEMA_TRAJECTORY_LP, &lp_traj_header(), &rows)?;
    write_sidecar_for(path, SCHEMA_TRAJECTORY_LP, &traj.metadata)
}

pub fn read_lp_trajectory(path: &Path) -> Result<Trajectory<Momentum>> {
    let (header, rows) = read_table(path, SCHEMA_TRAJECTORY_LP)?;
    check_header(&header, &lp_traj_header())?;
    let times = rows.iter().map(|r| r[0]).collect();
    let states = rows.iter().map(|r| Vec3::new(r[1], r[2], r[3])).collect();
    Ok(Trajectory { times, states, metadata: read_sidecar_for(path, SCHEMA_TRAJECTORY_LP)? })
}

/// Sidecar for dataset files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSidecar {
    pub schema: String,
    pub version: String,
    pub dt: f64,
    pub n: usize,
    pub provenance: Provenance,
}

fn tg_data_header() -> Vec<String> {
    let mut h = names("in_", &G_NAMES);
    h.extend(names("in_", &MU_NAMES));
    h.extend(names("out_", &G_NAMES));
    h.extend(names("out_", &MU_NAMES));
    h
}

fn lp_data_header() -> Vec<String> {
    let mut h = names("in_", &MU_NAMES);
    h.extend(names("out_", &MU_NAMES));
    h
}

fn write_dataset_sidecar<S>(path: &Path, schema: &str, d: &PairDataset<S>) -> Result<()> {
    write_json(
        &sidecar_path(path),
        &DatasetSidecar {
            schema: schema.into(),
            version: CSV_VERSION.into(),
            dt: d.dt,
            n: d.len(),
            provenance: d.provenance.clone(),
        },
    )
}

fn read_dataset_sidecar(path: &Path, schema: &str) -> Result<DatasetSidecar> {
    let s: DatasetSidecar = read_json(&sidecar_path(path))?;
    check_version(schema, &s.version, CSV_VERSION)?;
    Ok(s)
}

pub fn write_tg_dataset(path: &Path, d: &TgDataset) -> Result<()> {
    let rows: Vec<Vec<f64>> = d
        .inputs
        .iter()
        .zip(&d.outputs)
        .map(|(a, b)| {
            let mut r = a.embedding().to_vec();
            r.extend_from_slice(&b.embedding());
            r
        })
        .collect();
    write_table(path, SCHEMA_DATASET_TG, &tg_data_header(), &rows)?;
    write_dataset_sidecar(path, SCHEMA_DATASET_TG, d)
}

pub fn read_tg_dataset(path: &Path) -> Result<TgDataset> {
    let (header, rows) = read_table(path, SCHEMA_DATASET_TG)?;
    check_header(&header, &tg_data_header())?;
    let side = read_dataset_sidecar(path, SCHEMA_DATASET_TG)?;
    let point = |r: &[f64]| PhasePoint::new(Rotation::from_row_major_unchecked(&r[..9]), Vec3::new(r[9], r[10], r[11]));
    let inputs = rows.iter().map(|r| point(&r[..12])).collect();
    let outputs = rows.iter().map(|r| point(&r[12..])).collect();
    PairDataset::new(inputs, outputs, side.dt, side.provenance)
}

pub fn write_poisson_dataset(path: &Path, d: &PoissonDataset) -> Result<()> {
    let rows: Vec<Vec<f64>> = d
        .inputs
        .iter()
        .zip(&d.outputs)
        .map(|(a, b)| vec![a[0], a[1], a[2], b[0], b[1], b[2]])
        .collect();
    write_table(path, SCHEMA_DATASET_LP, &lp_data_header(), &rows)?;
    write_dataset_sidecar(path, SCHEMA_DATASET_LP, d)
}

pub fn read_poisson_dataset(path: &Path) -> Result<PoissonDataset> {
    let (header, rows) = read_table(path, SCHEMA_DATASET_LP)?;
    check_header(&header, &lp_data_header())?;
    let side = read_dataset_sidecar(path, SCHEMA_DATASET_LP)?;
    let inputs = rows.iter().map(|r| Vec3::new(r[0], r[1], r[2])).collect();
    let outputs = rows.iter().map(|r| Vec3::new(r[3], r[4], r[5])).collect();
    PairDataset::new(inputs, outputs, side.dt, side.provenance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Symmetric,
    NonSymmetric,
    Poisson,
}

/// A trained model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Symmetric(SymmetricModel),
    NonSymmetric(NonSymmetricModel),
    Poisson(PoissonModel),
}

impl Model {
    pub fn kind(&self) -> ModelKind {
        match self {
            Model::Symmetric(_) => ModelKind::Symmetric,
            Model::NonSymmetric(_) => ModelKind::NonSymmetric,
            Model::Poisson(_) => ModelKind::Poisson,
        }
    }

    pub fn net(&self) -> &ScalarNet {
        match self {
            Model::Symmetric(m) => &m.net,
            Model::NonSymmetric(m) => &m.net,
            Model::Poisson(m) => &m.net,
        }
    }

    fn retraction(&self) -> Option<Retraction> {
        match self {
            Model::Symmetric(m) => Some(m.retraction),
            Model::NonSymmetric(_) => None,
            Model::Poisson(m) => Some(m.retraction),
        }
    }
}

/// JSON model checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: String,
    pub kind: ModelKind,
    pub architecture: Vec<usize>,
    pub activation: crate::learn::Activation,
    pub seed: u64,
    pub retraction: Option<Retraction>,
    /// Step size of the data the model was trained on.
    pub dt: Option<f64>,
    pub params: Vec<f64>,
    pub training: Option<TrainConfig>,
    pub metrics: BTreeMap<String, f64>,
}

impl Checkpoint {
    pub fn new(model: &Model, dt: Option<f64>, training: Option<TrainConfig>, metrics: BTreeMap<String, f64>) -> Self {
        let net = model.net();
        Checkpoint {
            format_version: CHECKPOINT_VERSION.into(),
            kind: model.kind(),
            architecture: net.widths().to_vec(),
            activation: net.activation(),
            seed: net.seed(),
            retraction: model.retraction(),
            dt,
            params: net.params().to_vec(),
            training,
            metrics,
        }
    }

    pub fn model(&self) -> Result<Model> {
        let net = ScalarNet::from_parts(self.architecture.clone(), self.activation, self.seed, self.params.clone())?;
        let retraction = self.retraction.unwrap_or_default();
        Ok(match self.kind {
            ModelKind::Symmetric => Model::Symmetric(SymmetricModel { net, retraction }),
            ModelKind::NonSymmetric => Model::NonSymmetric(NonSymmetricModel { net }),
            ModelKind::Poisson => Model::Poisson(PoissonModel { net, retraction }),
        })
    }
}

pub fn save_checkpoint(path: &Path, ckpt: &Checkpoint) -> Result<()> {
    write_json(path, ckpt)
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    let value: serde_json::Value = read_json(path)?;
    let found = value
        .get("format_version")
        .and_then(|v| v.as_str())
        .unwrap_or("missing")
        .to_string();
    check_version("checkpoint", &found, CHECKPOINT_VERSION)?;
    Ok(serde_json::from_value(value)?)
}
