//! Command-line surface: fingerprinting, hypervolume computation, GP
//! prediction, configured optimization runs and an engine benchmark.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

#![forbid(unsafe_code)]

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use gpmobo::bo::{self, BoError};
use gpmobo::fingerprint::{morgan_count_fingerprint, FingerprintConfig, FingerprintRecord};
use gpmobo::gp::{GpError, GpHyperparams, MultiObjectiveGp};
use gpmobo::io::{self, IoError};
use gpmobo::kernels::KernelKind;
use gpmobo::pareto::{hv_hso, hv_sweep, pareto_filter, ObjectiveVector, ParetoError};
use gpmobo::rng::substream;
use gpmobo::smiles::parse_smiles;
use rand::Rng;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
    /// Stdout went away (e.g. piped into `head`); stop without noise.
    ClosedPipe,
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Numeric(_) => EXIT_NUMERIC,
            CliError::ClosedPipe => EXIT_OK,
        }
    }

    fn message(&self) -> Option<&str> {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numeric(m) => Some(m),
            CliError::ClosedPipe => None,
        }
    }
}

/// Write one line to stdout, treating a closed pipe as a quiet stop.
fn emit(text: std::fmt::Arguments<'_>) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match out.write_fmt(text).and_then(|()| out.write_all(b"\n")) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Err(CliError::ClosedPipe),
        Err(e) => Err(CliError::Data(e.to_string())),
    }
}

macro_rules! emit {
    ($($arg:tt)*) => {
        emit(format_args!($($arg)*))
    };
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<GpError> for CliError {
    fn from(e: GpError) -> Self {
        match e {
            GpError::NotPositiveDefinite { .. } => CliError::Numeric(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

impl From<ParetoError> for CliError {
    fn from(e: ParetoError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<BoError> for CliError {
    fn from(e: BoError) -> Self {
        match e {
            BoError::Gp(inner) => inner.into(),
            BoError::Acquisition(inner) => CliError::Numeric(inner.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "gpmobo",
    version,
    about = "Multi-objective Bayesian optimization over molecules"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum HvEngine {
    Sweep,
    Hso,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Minmax,
    Tanimoto,
}

impl From<KernelArg> for KernelKind {
    fn from(k: KernelArg) -> KernelKind {
        match k {
            KernelArg::Minmax => KernelKind::MinMaxCount,
            KernelArg::Tanimoto => KernelKind::TanimotoBinary,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fingerprint a SMILES file into JSON lines
    Fp {
        /// SMILES list, one molecule per line
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        radius: u32,
        /// Fold width; 0 keeps full dimensionality
        #[arg(long, default_value_t = 0)]
        fold: u64,
        /// Write to a file instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Hypervolume of a points CSV at a reference point
    Hv {
        /// CSV of objective vectors, one per line (optional header)
        points: PathBuf,
        /// Reference point, comma-separated: --ref 0,0
        #[arg(long = "ref")]
        reference: String,
        #[arg(long, value_enum, default_value_t = HvEngine::Sweep)]
        engine: HvEngine,
    },
    /// GP posterior means and variances for query molecules
    GpPredict {
        /// Training CSV with a smiles column and objective columns
        #[arg(long)]
        train: PathBuf,
        /// Query SMILES list
        #[arg(long)]
        query: PathBuf,
        /// Objective columns (comma-separated); default: all non-smiles
        #[arg(long)]
        columns: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        mean: f64,
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 1e-4)]
        noise: f64,
        #[arg(long, value_enum, default_value_t = KernelArg::Minmax)]
        kernel: KernelArg,
        #[arg(long, default_value_t = 2)]
        radius: u32,
        #[arg(long, default_value_t = 0)]
        fold: u64,
    },
    /// Execute a configured optimization run and write its results bundle
    BoRun {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config seed (and the KERNMOBO_SEED variable)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Time the hypervolume engines on random fronts
    Bench {
        #[arg(long, default_value_t = 5)]
        repeats: u32,
    },
}

/// Entry point shared by the binary and the tests.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not usage errors
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            if let Some(message) = err.message() {
                eprintln!("error: {message}");
            }
            err.exit_code()
        }
    }
}

fn run_command(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fp { input, radius, fold, output } => cmd_fp(&input, radius, fold, output),
        Command::Hv { points, reference, engine } => cmd_hv(&points, &reference, engine),
        Command::GpPredict {
            train,
            query,
            columns,
            mean,
            amplitude,
            noise,
            kernel,
            radius,
            fold,
        } => {
            let hyper = GpHyperparams { mean, amplitude, noise };
            let config = FingerprintConfig { radius, fold_dim: fold };
            cmd_gp_predict(&train, &query, columns.as_deref(), hyper, kernel.into(), config)
        }
        Command::BoRun { config, seed } => cmd_bo_run(&config, seed),
        Command::Bench { repeats } => cmd_bench(repeats),
    }
}

fn cmd_fp(
    input: &Path,
    radius: u32,
    fold: u64,
    output: Option<PathBuf>,
) -> Result<(), CliError> {
    let smiles = io::load_smiles_file(input)?;
    let config = FingerprintConfig { radius, fold_dim: fold };
    let mut out = String::new();
    for s in &smiles {
        let mol = parse_smiles(s)
            .map_err(|e| CliError::Data(format!("cannot parse {s:?}: {e}")))?;
        let fp = morgan_count_fingerprint(&mol, &config)
            .map_err(|e| CliError::Data(format!("cannot fingerprint {s:?}: {e}")))?;
        let record = FingerprintRecord::new(s, &fp);
        let line = serde_json::to_string(&record)
            .map_err(|e| CliError::Data(format!("serialization failed: {e}")))?;
        out.push_str(&line);
        out.push('\n');
    }
    match output {
        Some(path) => std::fs::write(&path, out)
            .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?,
        None => print!("{out}"),
    }
    Ok(())
}

fn parse_reference(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|f| {
            f.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("--ref: {f:?} is not a number")))
        })
        .collect()
}

fn cmd_hv(points: &Path, reference: &str, engine: HvEngine) -> Result<(), CliError> {
    let reference = parse_reference(reference)?;
    let raw = io::load_points_csv(points)?;
    let front = pareto_filter(&raw)?;
    let hv = match engine {
        HvEngine::Sweep => hv_sweep(&front, &reference)?,
        HvEngine::Hso => hv_hso(&front, &reference)?,
    };
    emit!("{hv:?}")?;
    Ok(())
}

fn cmd_gp_predict(
    train: &Path,
    query: &Path,
    columns: Option<&str>,
    hyper: GpHyperparams,
    kernel: KernelKind,
    config: FingerprintConfig,
) -> Result<(), CliError> {
    let columns: Vec<String> = match columns {
        Some(list) => list.split(',').map(|c| c.trim().to_string()).collect(),
        None => io::csv_objective_columns(train)?,
    };
    let table = io::load_objectives_csv(train, &columns)?;
    let mut train_smiles = Vec::new();
    let mut targets: Vec<Vec<f64>> = Vec::new();
    let mut skipped = 0usize;
    for (smiles, values) in &table {
        match values {
            Some(v) => {
                train_smiles.push(smiles.clone());
                targets.push(v.values().to_vec());
            }
            None => skipped += 1,
        }
    }
    if skipped > 0 {
        log::warn!("skipped {skipped} training rows with non-finite objectives");
    }
    let fingerprint = |s: &str| {
        let mol =
            parse_smiles(s).map_err(|e| CliError::Data(format!("cannot parse {s:?}: {e}")))?;
        morgan_count_fingerprint(&mol, &config)
            .map_err(|e| CliError::Data(format!("cannot fingerprint {s:?}: {e}")))
    };
    let train_fps = train_smiles
        .iter()
        .map(|s| fingerprint(s))
        .collect::<Result<Vec<_>, _>>()?;
    let query_smiles = io::load_smiles_file(query)?;
    let query_fps = query_smiles
        .iter()
        .map(|s| fingerprint(s))
        .collect::<Result<Vec<_>, _>>()?;

    let hypers = vec![hyper; columns.len()];
    let mogp = MultiObjectiveGp::fit(&train_fps, &targets, &hypers, kernel)?;
    let prediction = mogp.predict(&query_fps);

    let mut header = String::from("smiles");
    for column in &columns {
        write!(header, ",mean_{column},variance_{column}").unwrap();
    }
    emit!("{header}")?;
    for (i, smiles) in query_smiles.iter().enumerate() {
        let mut row = smiles.clone();
        for j in 0..columns.len() {
            write!(
                row,
                ",{:.12e},{:.12e}",
                prediction.means[i][j], prediction.variances[i][j]
            )
            .unwrap();
        }
        emit!("{row}")?;
    }
    Ok(())
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var("KERNMOBO_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Some)
            .map_err(|_| CliError::Data(format!("KERNMOBO_SEED={text:?} is not an integer"))),
        Err(_) => Ok(None),
    }
}

fn cmd_bo_run(config_path: &Path, seed_flag: Option<u64>) -> Result<(), CliError> {
    let config = io::load_run_config(config_path)?;
    // precedence: CLI flag, then environment, then config file
    let seed_override = match seed_flag {
        Some(s) => Some(s),
        None => env_seed()?,
    };
    let prepared = config.prepare(seed_override)?;
    let result = bo::run(&prepared.pool, prepared.oracle.as_ref(), &prepared.config)?;
    io::write_results_bundle(&prepared.output_dir, &result)?;
    let final_hv = result.records.last().map(|r| r.hv_fixed_ref).unwrap_or(0.0);
    emit!(
        "completed {} iterations (seed {}); final front size {}, fixed-reference hypervolume {:?}",
        result.records.len(),
        prepared.config.seed,
        result.final_front.len(),
        final_hv
    )?;
    emit!("results written to {}", prepared.output_dir.display())?;
    Ok(())
}

fn cmd_bench(repeats: u32) -> Result<(), CliError> {
    let repeats = repeats.max(1);
    emit!("{:>3} {:>6} {:>6} {:>12} {:>12}", "d", "points", "front", "hso", "sweep")?;
    for &(d, n) in &[(2usize, 50usize), (2, 200), (3, 50), (3, 100), (4, 30), (4, 60)] {
        let mut rng = substream(987, "bench-fronts");
        let points: Vec<ObjectiveVector> = (0..n)
            .map(|_| {
                ObjectiveVector::new((0..d).map(|_| 1.0 - rng.random::<f64>()).collect())
                    .expect("finite coordinates")
            })
            .collect();
        let front = pareto_filter(&points)?;
        let reference = vec![0.0; d];
        let time = |f: &dyn Fn() -> f64| {
            let mut best = f64::INFINITY;
            let mut value = 0.0;
            for _ in 0..repeats {
                let start = Instant::now();
                value = f();
                best = best.min(start.elapsed().as_secs_f64());
            }
            (value, best)
        };
        let (hso_value, hso_time) = time(&|| hv_hso(&front, &reference).unwrap());
        let (sweep_value, sweep_time) = time(&|| hv_sweep(&front, &reference).unwrap());
        if (hso_value - sweep_value).abs() > 1e-9 {
            return Err(CliError::Numeric(format!(
                "engine disagreement at d={d} n={n}: {hso_value} vs {sweep_value}"
            )));
        }
        emit!(
            "{:>3} {:>6} {:>6} {:>10.3}us {:>10.3}us",
            d,
            n,
            front.len(),
            hso_time * 1e6,
            sweep_time * 1e6
        )?;
    }
    Ok(())
}
