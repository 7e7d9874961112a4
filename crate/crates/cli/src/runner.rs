//! Loads a config, runs the experiment on a sized thread pool, and writes
//! tables plus a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;

use crate::config::{parse_config_with, ConfigErrors, ExperimentConfig, Overrides};
use crate::experiments::{self, Outcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Default output directory when neither flag nor config names one.
pub const OUT_ENV: &str = "MPSLAB_OUT";
pub const DEFAULT_OUT: &str = "results";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration:\n{0}")]
    Config(#[from] ConfigErrors),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] mpslab_core::Error),
    #[error("cannot build thread pool: {0}")]
    Pool(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use mpslab_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Pool(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_CONFIG,
            CliError::Core(e) => match e {
                E::InvalidInput(_) | E::ShapeMismatch(_) | E::Parse { .. } => EXIT_CONFIG,
                E::ResourceLimit { .. } => EXIT_RESOURCE,
                E::Numerical(_) | E::NotNormalized(_) | E::VanishingSuperposition => EXIT_NUMERICAL,
            },
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

#[derive(Debug)]
pub struct RunReport {
    pub config: ExperimentConfig,
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub outcome: Outcome,
    pub wall_seconds: f64,
    pub exit_code: i32,
}

/// Flag, then config, then environment, then `results`.
pub fn resolve_out_dir(flag: Option<&Path>, config: Option<&Path>, env: Option<&str>) -> PathBuf {
    flag.or(config)
        .map(Path::to_path_buf)
        .or_else(|| env.filter(|e| !e.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

pub fn load_config(path: &Path, opts: &RunOptions) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let overrides = Overrides {
        seed: opts.seed,
        threads: opts.threads,
    };
    Ok(parse_config_with(&text, &overrides)?)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn exit_code_for(outcome: &Outcome) -> i32 {
    if outcome.violations > 0 {
        EXIT_VIOLATION
    } else if outcome.skipped > 0 {
        EXIT_RESOURCE
    } else {
        EXIT_OK
    }
}

/// Runs a validated config and writes its outputs into `out_dir`.
pub fn run_config(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let outcome = pool.install(|| experiments::run(cfg))?;
    let seed = if cfg.experiment.is_stochastic() { cfg.seed } else { None };
    let mut files = Vec::new();
    for t in &outcome.tables {
        files.extend(t.write(out_dir, seed).map_err(io_err(out_dir))?);
    }
    let wall_seconds = start.elapsed().as_secs_f64();
    let exit_code = exit_code_for(&outcome);
    let manifest_path = out_dir.join(format!("{}.manifest.json", cfg.experiment));
    let names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = json!({
        "experiment": cfg.experiment.key(),
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "threads": pool.current_num_threads(),
        "wall_time_seconds": wall_seconds,
        "checks": outcome.checks,
        "violations": outcome.violations,
        "skipped": outcome.skipped,
        "exit_code": exit_code,
        "summary": outcome.summary,
        "notes": outcome.notes,
        "files": names,
        "config": cfg.to_json(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("serializable");
    std::fs::write(&manifest_path, text + "\n").map_err(io_err(&manifest_path))?;
    files.push(manifest_path);
    Ok(RunReport {
        config: cfg.clone(),
        out_dir: out_dir.to_path_buf(),
        files,
        outcome,
        wall_seconds,
        exit_code,
    })
}

/// `run <config>` end to end: load, resolve the output directory, run.
pub fn run_path(path: &Path, opts: &RunOptions) -> Result<RunReport, CliError> {
    let cfg = load_config(path, opts)?;
    let env = std::env::var(OUT_ENV).ok();
    let out = resolve_out_dir(opts.out.as_deref(), cfg.output_dir.as_deref(), env.as_deref());
    run_config(&cfg, &out)
}
