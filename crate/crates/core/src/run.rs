//! Experiment runs: load or generate a trace, replay it through every
//! selected structure in both variants, and write the comparison reports.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cache::HierarchyConfig;
use crate::sim::{replay_alu, replay_cache, replay_regfile, AluConfig, RegFileConfig};
use crate::stats::{self, StructureReport};
use crate::workload::{self, Event, GenSpec, TraceError};

pub const REPORT_CSV: &str = "report.csv";
pub const REPORT_JSON: &str = "report.json";

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("trace error: {0}")]
    Trace(TraceError),
    #[error("model error: {0}")]
    Model(String),
    #[error("I/O error on {path}: {error}")]
    Io { path: PathBuf, error: std::io::Error },
}

// Messages already carry the inner error, so no `source` chain is exposed.
impl From<TraceError> for RunError {
    fn from(e: TraceError) -> Self {
        RunError::Trace(e)
    }
}

impl RunError {
    /// Process exit status for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io { .. } => 2,
            RunError::Trace(_) => 3,
            RunError::Model(_) => 4,
        }
    }

    fn io(path: &Path, error: std::io::Error) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            error,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructureSel {
    Alu,
    Regfile,
    Cache,
    All,
}

impl StructureSel {
    fn includes(self, other: StructureSel) -> bool {
        self == StructureSel::All || self == other
    }
}

impl FromStr for StructureSel {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        match s {
            "alu" => Ok(StructureSel::Alu),
            "regfile" => Ok(StructureSel::Regfile),
            "cache" => Ok(StructureSel::Cache),
            "all" => Ok(StructureSel::All),
            other => Err(RunError::Config(format!(
                "unknown structure `{other}` (expected alu, regfile, cache or all)"
            ))),
        }
    }
}

impl fmt::Display for StructureSel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StructureSel::Alu => "alu",
            StructureSel::Regfile => "regfile",
            StructureSel::Cache => "cache",
            StructureSel::All => "all",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceSource {
    File(PathBuf),
    Gen(GenSpec),
}

/// Everything a `simulate` run depends on. The JSON form (for `--config`)
/// has every field optional:
///
/// ```json
/// {"trace": "t.trace", "structure": "all", "alu": {"units": 3, "aware": "algorithm1"},
///  "regfile": {"ring": "gpr16", "rotation_period": 1000}, "hierarchy": {}, "out": "out", "seed": 7}
/// ```
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    pub trace: Option<PathBuf>,
    pub gen: Option<GenSpec>,
    pub structure: Option<StructureSel>,
    pub alu: Option<AluConfig>,
    pub regfile: Option<RegFileConfig>,
    pub hierarchy: Option<HierarchyConfig>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl RunConfigFile {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text).map_err(|e| RunError::Config(format!("run config: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trace: TraceSource,
    pub structure: StructureSel,
    pub alu: AluConfig,
    pub regfile: RegFileConfig,
    pub hierarchy: HierarchyConfig,
    pub out_dir: PathBuf,
    /// Overrides the generator seed when the trace is synthetic.
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn new(trace: TraceSource, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            trace,
            structure: StructureSel::All,
            alu: AluConfig::default(),
            regfile: RegFileConfig::default(),
            hierarchy: HierarchyConfig::default(),
            out_dir: out_dir.into(),
            seed: None,
        }
    }

    /// Sets the rotation trigger of the register file and of every cache level.
    pub fn set_rotation_period(&mut self, period: u64) {
        self.regfile.rotation_period = period;
        self.hierarchy = self.hierarchy.with_rotation_period(Some(period));
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.alu.units == 0 {
            return Err(RunError::Config("alu.units must be >= 1".into()));
        }
        if self.regfile.rotation_period == 0 {
            return Err(RunError::Config("regfile.rotation_period must be >= 1".into()));
        }
        self.hierarchy
            .validate()
            .map_err(|e| RunError::Config(e.to_string()))?;
        match &self.trace {
            TraceSource::File(p) if !p.is_file() => Err(RunError::Config(format!(
                "trace file {} does not exist",
                p.display()
            ))),
            TraceSource::Gen(spec) => spec.validate().map_err(|e| RunError::Config(e.to_string())),
            TraceSource::File(_) => Ok(()),
        }
    }

    pub fn load_events(&self) -> Result<Vec<Event>, RunError> {
        match &self.trace {
            TraceSource::File(path) => {
                let bytes = fs::read(path).map_err(|e| RunError::io(path, e))?;
                Ok(workload::parse_trace(&bytes)?)
            }
            TraceSource::Gen(spec) => {
                let mut spec = spec.clone();
                if let Some(seed) = self.seed {
                    spec.seed = seed;
                }
                workload::generate(&spec).map_err(|e| RunError::Config(e.to_string()))
            }
        }
    }
}

fn model<E: fmt::Display>(e: E) -> RunError {
    RunError::Model(e.to_string())
}

/// Replays `events` through the selected structures. Structures run on
/// separate threads; rows come back in the fixed order alu, regfile, caches.
pub fn compare(events: &[Event], cfg: &RunConfig) -> Result<Vec<StructureReport>, RunError> {
    let sel = cfg.structure;
    let (alu, regfile, cache) = thread::scope(|s| {
        let alu = sel.includes(StructureSel::Alu).then(|| {
            s.spawn(|| {
                let run = replay_alu(events, &cfg.alu).map_err(model)?;
                run.reports().map_err(model)
            })
        });
        let regfile = sel.includes(StructureSel::Regfile).then(|| {
            s.spawn(|| {
                let run = replay_regfile(events, &cfg.regfile).map_err(model)?;
                run.reports(cfg.regfile.ring).map_err(model)
            })
        });
        let cache = sel.includes(StructureSel::Cache).then(|| {
            s.spawn(|| {
                let run = replay_cache(events, &cfg.hierarchy).map_err(model)?;
                run.reports().map_err(model)
            })
        });
        let join = |h: Option<thread::ScopedJoinHandle<'_, Result<Vec<StructureReport>, RunError>>>| {
            h.map(|h| h.join().expect("replay thread panicked")).transpose()
        };
        (join(alu), join(regfile), join(cache))
    });
    let mut reports = Vec::new();
    for part in [alu?, regfile?, cache?].into_iter().flatten() {
        reports.extend(part);
    }
    Ok(reports)
}

/// Writes `report.csv` and `report.json` into `out_dir`, creating it if needed.
pub fn write_reports(out_dir: &Path, reports: &[StructureReport]) -> Result<(PathBuf, PathBuf), RunError> {
    fs::create_dir_all(out_dir).map_err(|e| RunError::io(out_dir, e))?;
    let csv_path = out_dir.join(REPORT_CSV);
    let mut csv_buf = Vec::new();
    stats::write_csv(&mut csv_buf, reports).map_err(model)?;
    fs::write(&csv_path, csv_buf).map_err(|e| RunError::io(&csv_path, e))?;
    let json_path = out_dir.join(REPORT_JSON);
    fs::write(&json_path, stats::to_json(reports)).map_err(|e| RunError::io(&json_path, e))?;
    Ok((csv_path, json_path))
}

/// Full `simulate` run: validate, load, compare, write.
pub fn simulate(cfg: &RunConfig) -> Result<Vec<StructureReport>, RunError> {
    cfg.validate()?;
    let events = cfg.load_events()?;
    let reports = compare(&events, cfg)?;
    write_reports(&cfg.out_dir, &reports)?;
    Ok(reports)
}
