//! Datasets, run configuration and results persistence.
//!
//! File formats:
//! * SMILES lists: one record per line, `#` comments and blank lines
//!   skipped, anything after the first whitespace treated as a name and
//!   ignored, duplicates dropped keeping the first occurrence.
//! * Objective tables: CSV with a header, a case-insensitive `smiles`
//!   column and one column per objective; rows with non-finite values are
//!   kept as unevaluable markers.
//! * Run configs: JSON mirroring [`BoRunConfig`] plus dataset paths and an
//!   output directory; unknown keys are rejected.
//! * Results: `iterations.jsonl`, `summary.csv` and `pareto.csv` under the
//!   run's output directory. CSV floats carry 13 significant digits.

use crate::acquisition::{geometric_mean, AcquisitionConfig};
use crate::bo::{
    csv_oracle, similarity_oracle, BoError, BoRunConfig, BoRunResult, CandidatePool,
    IterationRecord, Oracle, StackedOracle,
};
use crate::fingerprint::FingerprintConfig;
use crate::gp::GpHyperparams;
use crate::kernels::KernelKind;
use crate::pareto::{ObjectiveVector, ParetoFront, ReferencePointConfig};
use crate::rng::substream;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path} contains no records")]
    EmptyFile { path: String },
    #[error("missing column: {0}")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate smiles {0:?} with conflicting values")]
    DuplicateSmiles(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn io_err(path: &Path, source: std::io::Error) -> IoError {
    IoError::Io { path: path.display().to_string(), source }
}

/// Read a SMILES list file. Order is preserved; duplicate molecules keep
/// their first occurrence and are counted in a warning.
pub fn load_smiles_file(path: &Path) -> Result<Vec<String>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let mut duplicates = 0usize;
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let smiles = trimmed.split_whitespace().next().unwrap();
        if seen.insert(smiles.to_string()) {
            out.push(smiles.to_string());
        } else {
            duplicates += 1;
        }
    }
    if duplicates > 0 {
        log::warn!("{}: dropped {duplicates} duplicate molecules", path.display());
    }
    if out.is_empty() {
        return Err(IoError::EmptyFile { path: path.display().to_string() });
    }
    Ok(out)
}

/// Header names of every non-smiles column in an objectives CSV, in file
/// order.
pub fn csv_objective_columns(path: &Path) -> Result<Vec<String>, IoError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                io_err(path, std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()))
            }
            _ => IoError::Csv(e),
        })?;
    let columns: Vec<String> = reader
        .headers()?
        .iter()
        .filter(|h| !h.eq_ignore_ascii_case("smiles"))
        .map(str::to_string)
        .collect();
    if columns.is_empty() {
        return Err(IoError::MissingColumn("no objective columns in header".into()));
    }
    Ok(columns)
}

/// Read an objectives CSV into a map from SMILES to objective vector.
/// Rows with any non-finite value map to `None` (unevaluable). Duplicate
/// SMILES are allowed only when their values agree exactly.
pub fn load_objectives_csv(
    path: &Path,
    columns: &[String],
) -> Result<BTreeMap<String, Option<ObjectiveVector>>, IoError> {
    if columns.is_empty() {
        return Err(IoError::MissingColumn("no objective columns requested".into()));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.kind() {
            csv::ErrorKind::Io(_) => {
                io_err(path, std::io::Error::new(std::io::ErrorKind::NotFound, e.to_string()))
            }
            _ => IoError::Csv(e),
        })?;
    let headers = reader.headers()?.clone();
    let smiles_idx = headers
        .iter()
        .position(|h| h.eq_ignore_ascii_case("smiles"))
        .ok_or_else(|| IoError::MissingColumn("smiles".into()))?;
    let column_idx: Vec<usize> = columns
        .iter()
        .map(|col| {
            headers
                .iter()
                .position(|h| h == col)
                .ok_or_else(|| IoError::MissingColumn(col.clone()))
        })
        .collect::<Result<_, _>>()?;

    let mut out: BTreeMap<String, Option<ObjectiveVector>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        let smiles = record
            .get(smiles_idx)
            .ok_or(IoError::Parse { line, message: "missing smiles field".into() })?
            .to_string();
        let mut values = Vec::with_capacity(column_idx.len());
        for (&idx, name) in column_idx.iter().zip(columns) {
            let field = record
                .get(idx)
                .ok_or_else(|| IoError::Parse { line, message: format!("missing field {name}") })?;
            let value: f64 = field.parse().map_err(|_| IoError::Parse {
                line,
                message: format!("cannot parse {field:?} in column {name} as a number"),
            })?;
            values.push(value);
        }
        let parsed = if values.iter().all(|v| v.is_finite()) {
            Some(ObjectiveVector::new(values).expect("finite, non-empty objective vector"))
        } else {
            None
        };
        match out.get(&smiles) {
            None => {
                out.insert(smiles, parsed);
            }
            Some(existing) if *existing == parsed => {}
            Some(_) => return Err(IoError::DuplicateSmiles(smiles)),
        }
    }
    if out.is_empty() {
        return Err(IoError::EmptyFile { path: path.display().to_string() });
    }
    Ok(out)
}

/// Which oracle evaluates chosen molecules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OracleSpec {
    /// Precomputed objective table, looked up by exact SMILES string.
    Csv { path: PathBuf, columns: Vec<String> },
    /// One fingerprint-similarity objective per reference molecule.
    Similarity { references: Vec<String> },
}

impl OracleSpec {
    pub fn dim(&self) -> usize {
        match self {
            OracleSpec::Csv { columns, .. } => columns.len(),
            OracleSpec::Similarity { references } => references.len(),
        }
    }
}

/// Reference-point settings as written in config files; the floor defaults
/// to a practically unbounded -1e9 per objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceSpec {
    #[serde(default)]
    pub r_floor: Option<Vec<f64>>,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
}

impl Default for ReferenceSpec {
    fn default() -> Self {
        ReferenceSpec { r_floor: None, scale: default_scale(), epsilon: default_epsilon() }
    }
}

fn default_scale() -> f64 {
    0.1
}

fn default_epsilon() -> f64 {
    1e-6
}

fn default_n_known() -> usize {
    10
}

fn default_n_iter() -> usize {
    20
}

fn default_kernel() -> KernelKind {
    KernelKind::MinMaxCount
}

/// JSON run configuration. Unknown keys are rejected so typos fail fast.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// Free-form description; JSON has no comments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    /// Pool of candidate molecules, one SMILES per line.
    pub smiles_file: PathBuf,
    /// Explicit known molecules; when absent, `n_known` evaluable
    /// molecules are drawn from the pool with the run's seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_smiles_file: Option<PathBuf>,
    #[serde(default = "default_n_known")]
    pub n_known: usize,
    pub oracle: OracleSpec,
    #[serde(default = "default_n_iter")]
    pub n_iter: usize,
    /// One entry per objective, or a single entry broadcast to all
    /// objectives; defaults to mean 0, amplitude 1, noise 1e-4.
    #[serde(default)]
    pub gp_hyperparams: Vec<GpHyperparams>,
    pub acquisition: AcquisitionConfig,
    #[serde(default)]
    pub reference: ReferenceSpec,
    #[serde(default)]
    pub fingerprint: FingerprintConfig,
    #[serde(default = "default_kernel")]
    pub kernel: KernelKind,
    pub seed: u64,
    pub output_dir: PathBuf,
}

/// Everything needed to execute a configured run.
pub struct PreparedRun {
    pub pool: CandidatePool,
    pub oracle: Box<dyn Oracle>,
    pub config: BoRunConfig,
    pub output_dir: PathBuf,
}

pub fn load_run_config(path: &Path) -> Result<RunConfigFile, IoError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text)
        .map_err(|source| IoError::Json { path: path.display().to_string(), source })
}

impl RunConfigFile {
    /// Resolve datasets and build the pool, the oracle and the run config.
    /// `seed_override` takes precedence over the file's seed.
    pub fn prepare(&self, seed_override: Option<u64>) -> Result<PreparedRun, BoError> {
        let seed = seed_override.unwrap_or(self.seed);
        let dim = self.oracle.dim();
        if dim == 0 {
            return Err(IoError::Config("oracle must define at least one objective".into()).into());
        }
        let oracle: Box<dyn Oracle> = match &self.oracle {
            OracleSpec::Csv { path, columns } => Box::new(csv_oracle(path, columns)?),
            OracleSpec::Similarity { references } => {
                let parts = references
                    .iter()
                    .map(|reference| {
                        similarity_oracle(reference, self.kernel, self.fingerprint)
                            .map(|o| Box::new(o) as Box<dyn Oracle>)
                            .map_err(|e| {
                                IoError::Config(format!(
                                    "similarity reference {reference:?} does not parse: {e}"
                                ))
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Box::new(StackedOracle::new(parts))
            }
        };

        let hyperparams = match self.gp_hyperparams.len() {
            0 => vec![GpHyperparams::default(); dim],
            1 => vec![self.gp_hyperparams[0]; dim],
            n if n == dim => self.gp_hyperparams.clone(),
            n => {
                return Err(IoError::Config(format!(
                    "gp_hyperparams has {n} entries for {dim} objectives"
                ))
                .into())
            }
        };
        let r_floor = match &self.reference.r_floor {
            Some(floor) if floor.len() == dim => floor.clone(),
            Some(floor) => {
                return Err(IoError::Config(format!(
                    "r_floor has {} entries for {dim} objectives",
                    floor.len()
                ))
                .into())
            }
            None => vec![-1e9; dim],
        };
        let config = BoRunConfig {
            n_iter: self.n_iter,
            hyperparams,
            acquisition: self.acquisition,
            reference: ReferencePointConfig {
                r_floor,
                scale: self.reference.scale,
                epsilon: self.reference.epsilon,
            },
            fingerprint: self.fingerprint,
            kernel: self.kernel,
            seed,
        };

        let pool_smiles = load_smiles_file(&self.smiles_file)?;
        let pool = match &self.known_smiles_file {
            Some(path) => {
                let known_smiles = load_smiles_file(path)?;
                let known = known_smiles
                    .iter()
                    .map(|smiles| {
                        oracle
                            .evaluate(smiles)
                            .map(|y| (smiles.clone(), y))
                            .ok_or_else(|| {
                                IoError::Config(format!("known molecule {smiles:?} is not evaluable"))
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let known_set: HashSet<&String> = known_smiles.iter().collect();
                let query: Vec<String> =
                    pool_smiles.into_iter().filter(|s| !known_set.contains(s)).collect();
                CandidatePool::new(known, query)?
            }
            None => draw_known_pool(&pool_smiles, oracle.as_ref(), self.n_known, seed)?,
        };

        Ok(PreparedRun { pool, oracle, config, output_dir: self.output_dir.clone() })
    }
}

/// Draw `n_known` evaluable molecules from the pool with a seeded
/// permutation; everything else becomes the query pool in file order.
fn draw_known_pool(
    pool_smiles: &[String],
    oracle: &dyn Oracle,
    n_known: usize,
    seed: u64,
) -> Result<CandidatePool, BoError> {
    if n_known == 0 {
        return Err(IoError::Config("n_known must be at least 1".into()).into());
    }
    let mut rng = substream(seed, "known-selection");
    let mut order: Vec<usize> = (0..pool_smiles.len()).collect();
    for i in 0..order.len().saturating_sub(1) {
        let j = rng.random_range(i..order.len());
        order.swap(i, j);
    }
    let mut known = Vec::with_capacity(n_known);
    let mut chosen: HashSet<usize> = HashSet::new();
    for &idx in &order {
        if known.len() == n_known {
            break;
        }
        if let Some(y) = oracle.evaluate(&pool_smiles[idx]) {
            known.push((pool_smiles[idx].clone(), y));
            chosen.insert(idx);
        }
    }
    if known.len() < n_known {
        return Err(IoError::Config(format!(
            "only {} of the requested {n_known} known molecules are evaluable",
            known.len()
        ))
        .into());
    }
    let query: Vec<String> = pool_smiles
        .iter()
        .enumerate()
        .filter(|(i, _)| !chosen.contains(i))
        .map(|(_, s)| s.clone())
        .collect();
    CandidatePool::new(known, query)
}

/// 13 significant digits, locale-free; round-trips f64 exactly enough for
/// reproduction work.
fn fmt_float(v: f64) -> String {
    format!("{v:.12e}")
}

/// Write `iterations.jsonl`, `summary.csv` and `pareto.csv` for a finished
/// run. Output is byte-deterministic for identical results.
pub fn write_results_bundle(dir: &Path, result: &BoRunResult) -> Result<(), IoError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    write_iterations_jsonl(&dir.join("iterations.jsonl"), &result.records)?;
    let dim = result.final_front.dim().unwrap_or(0);
    write_summary_csv(&dir.join("summary.csv"), &result.records, dim)?;
    write_pareto_csv(&dir.join("pareto.csv"), &result.final_front)?;
    Ok(())
}

pub fn write_iterations_jsonl(path: &Path, records: &[IterationRecord]) -> Result<(), IoError> {
    let mut out = String::new();
    for record in records {
        out.push_str(
            &serde_json::to_string(record)
                .map_err(|source| IoError::Json { path: path.display().to_string(), source })?,
        );
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| io_err(path, e))
}

pub fn write_summary_csv(
    path: &Path,
    records: &[IterationRecord],
    dim: usize,
) -> Result<(), IoError> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut header = String::from("iteration,chosen_smiles,acquisition");
    for k in 1..=dim {
        header.push_str(&format!(",f_{k}"));
    }
    header.push_str(",gmean,hv_fixed_ref");
    writeln!(file, "{header}").map_err(|e| io_err(path, e))?;
    for record in records {
        let gmean = geometric_mean(&record.observed).unwrap_or(f64::NAN);
        let mut row = format!(
            "{},{},{}",
            record.iteration,
            record.chosen_smiles,
            fmt_float(record.acquisition_value)
        );
        for v in record.observed.iter() {
            row.push(',');
            row.push_str(&fmt_float(*v));
        }
        row.push(',');
        row.push_str(&fmt_float(gmean));
        row.push(',');
        row.push_str(&fmt_float(record.hv_fixed_ref));
        writeln!(file, "{row}").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

pub fn write_pareto_csv(path: &Path, front: &ParetoFront) -> Result<(), IoError> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let dim = front.dim().unwrap_or(0);
    let header: Vec<String> = (1..=dim).map(|k| format!("f_{k}")).collect();
    writeln!(file, "{}", header.join(",")).map_err(|e| io_err(path, e))?;
    for point in front.points() {
        let row: Vec<String> = point.iter().map(|v| fmt_float(*v)).collect();
        writeln!(file, "{}", row.join(",")).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Read a headerless (or single-header) points CSV: one objective vector
/// per line, comma-separated. `#` comments and blank lines are skipped; a
/// first line that does not parse as numbers is treated as a header.
pub fn load_points_csv(path: &Path) -> Result<Vec<ObjectiveVector>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut out = Vec::new();
    let mut first_data_line = true;
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed: Result<Vec<f64>, _> =
            trimmed.split(',').map(|f| f.trim().parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                out.push(ObjectiveVector::new(values).map_err(|e| IoError::Parse {
                    line: lineno + 1,
                    message: e.to_string(),
                })?);
                first_data_line = false;
            }
            Err(err) if first_data_line => {
                // header row
                log::debug!("skipping header line {:?} ({err})", trimmed);
                first_data_line = false;
            }
            Err(err) => {
                return Err(IoError::Parse { line: lineno + 1, message: err.to_string() })
            }
        }
    }
    if out.is_empty() {
        return Err(IoError::EmptyFile { path: path.display().to_string() });
    }
    Ok(out)
}
