//! Scenario scheduling and result files.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{Pipeline, ScenarioConfig};
use crate::pipeline::{run_scenario, Row, ScenarioOutcome};
use crate::sweep::sweep_expand;
use crate::Error;

/// Environment variable that replaces the config's base seed.
pub const SEED_ENV: &str = "ATOMKERNEL_SEED";
/// Output directory when neither `--out` nor the config names one.
pub const DEFAULT_OUT: &str = "results";

/// Exit code of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit code of a config or scenario failure.
pub const EXIT_INVALID: i32 = 2;
/// Exit code of a failed `--assert`.
pub const EXIT_ASSERT: i32 = 3;

/// Subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Certificate construction and validation.
    Certify,
    /// Recovery.
    Recover,
    /// Concentration check.
    Stability,
    /// The config's own `pipeline` (recover when absent).
    Sweep,
}

impl Command {
    /// Pipeline run for a config.
    pub fn pipeline(self, cfg: &ScenarioConfig) -> Pipeline {
        match self {
            Self::Certify => Pipeline::Certify,
            Self::Recover => Pipeline::Recover,
            Self::Stability => Pipeline::Stability,
            Self::Sweep => cfg.pipeline.unwrap_or(Pipeline::Recover),
        }
    }
}

/// Run-wide options.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    /// Worker threads (at least one).
    pub jobs: usize,
    /// Exit 3 when a scenario check fails.
    pub assert: bool,
    /// Output directory override.
    pub out: Option<PathBuf>,
    /// Base seed override.
    pub seed_override: Option<u64>,
}

/// Outcome of a run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    /// Outcomes in scenario order.
    pub outcomes: Vec<ScenarioOutcome>,
    /// Directory the files went to.
    pub out_dir: PathBuf,
    /// Process exit code.
    pub exit_code: i32,
}

/// Seed override from [`SEED_ENV`], if set.
pub fn seed_from_env() -> Result<Option<u64>, Error> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| Error::Config {
            line: None,
            message: format!("{SEED_ENV}={v} is not an unsigned integer"),
        }),
        Err(_) => Ok(None),
    }
}

/// SHA-256 of the canonical JSON form of a config.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let bytes = serde_json::to_vec(cfg).unwrap_or_default();
    format!("{:x}", Sha256::digest(bytes))
}

/// Run scenarios on up to `jobs` threads; outcomes come back in input order.
pub fn run_scenarios(scenarios: &[ScenarioConfig], pipeline: Pipeline, jobs: usize) -> Vec<ScenarioOutcome> {
    let jobs = jobs.clamp(1, scenarios.len().max(1));
    if jobs == 1 {
        return scenarios.iter().enumerate().map(|(i, c)| run_scenario(i, c, pipeline)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ScenarioOutcome>>> = Mutex::new(vec![None; scenarios.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= scenarios.len() {
                    break;
                }
                let out = run_scenario(i, &scenarios[i], pipeline);
                slots.lock().expect("result slots poisoned")[i] = Some(out);
            });
        }
    });
    slots
        .into_inner()
        .expect("result slots poisoned")
        .into_iter()
        .map(|o| o.expect("every scenario ran"))
        .collect()
}

/// Exit code for a set of outcomes.
pub fn exit_code(outcomes: &[ScenarioOutcome], assert: bool) -> i32 {
    if outcomes.iter().any(|o| o.error.is_some()) {
        EXIT_INVALID
    } else if assert && outcomes.iter().any(|o| !o.passed()) {
        EXIT_ASSERT
    } else {
        EXIT_OK
    }
}

/// CSV text of a set of rows.
pub fn csv_bytes(rows: &[&Row]) -> Result<Vec<u8>, Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Error> {
    fs::write(path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn pretty(v: &Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).unwrap_or_default();
    b.push(b'\n');
    b
}

/// Write `results.json`, `results.csv` and `run-manifest.json` into `dir`.
pub fn write_outputs(
    dir: &Path,
    pipeline: Pipeline,
    cfg: &ScenarioConfig,
    scenarios: &[ScenarioConfig],
    outcomes: &[ScenarioOutcome],
    seed_override: Option<u64>,
) -> Result<(), Error> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let hash = config_hash(cfg);
    let results = json!({
        "pipeline": pipeline.name(),
        "config_hash": hash,
        "scenarios": outcomes.iter().map(|o| o.details.clone()).collect::<Vec<_>>(),
    });
    write(&dir.join("results.json"), &pretty(&results))?;
    let rows: Vec<&Row> = outcomes.iter().map(|o| &o.row).collect();
    write(&dir.join("results.csv"), &csv_bytes(&rows)?)?;
    let entries: Vec<Value> = scenarios
        .iter()
        .zip(outcomes)
        .enumerate()
        .map(|(i, (c, o))| {
            let row = csv_bytes(&[&o.row]).unwrap_or_default();
            json!({
                "scenario": i,
                "name": c.name,
                "seed": c.seed,
                "config": c,
                "config_hash": config_hash(c),
                "row_sha256": format!("{:x}", Sha256::digest(&row)),
            })
        })
        .collect();
    let manifest = json!({
        "tool": "atomkernel",
        "version": env!("CARGO_PKG_VERSION"),
        "core_version": atomkernel_core::VERSION,
        "pipeline": pipeline.name(),
        "config_hash": hash,
        "seed_override": seed_override,
        "scenarios": entries,
    });
    write(&dir.join("run-manifest.json"), &pretty(&manifest))
}

/// Expand, run and write a parsed config.
pub fn run_config(command: Command, mut cfg: ScenarioConfig, opts: &RunOptions) -> Result<RunSummary, Error> {
    if let Some(seed) = opts.seed_override {
        cfg.seed = seed;
    }
    let pipeline = command.pipeline(&cfg);
    let scenarios = sweep_expand(&cfg)?;
    let outcomes = run_scenarios(&scenarios, pipeline, opts.jobs);
    let out_dir = opts
        .out
        .clone()
        .or_else(|| cfg.output_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    write_outputs(&out_dir, pipeline, &cfg, &scenarios, &outcomes, opts.seed_override)?;
    let exit_code = exit_code(&outcomes, opts.assert);
    Ok(RunSummary {
        outcomes,
        out_dir,
        exit_code,
    })
}

/// Load a config file and run it.
pub fn run(command: Command, config: &Path, opts: &RunOptions) -> Result<RunSummary, Error> {
    run_config(command, ScenarioConfig::load(config)?, opts)
}
