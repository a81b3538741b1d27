//! Verification tasks: assemble both sides, compare coefficientwise, and
//! report.

mod cache;
mod checks;
mod lhs;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use cache::{geometry_hash, CacheRecord, CacheStats, ContributionCache, CACHE_FILE, CONVENTION_TAG};
pub use checks::{colored_counts, compare, exponent_vectors};
pub use lhs::{chart_series, lhs_orbifold, lhs_orbifold_from, lhs_toric, lhs_toric_from, Contributions, Engine, Source};

use crate::algebra::{modp, PrimeSample, RESAMPLE_CAP};
use crate::error::{Error, Result};
use crate::vertex::Geometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TaskKind {
    ToricIdentity,
    OrbifoldIdentity,
    DimensionReduction,
    Divisibility,
    PoleOrder,
    AxisCanonicity,
    ZrConsistency,
    Cpi,
    AltSign,
    PartitionCount,
}

impl TaskKind {
    pub const ALL: [TaskKind; 10] = [
        TaskKind::ToricIdentity,
        TaskKind::OrbifoldIdentity,
        TaskKind::DimensionReduction,
        TaskKind::Divisibility,
        TaskKind::PoleOrder,
        TaskKind::AxisCanonicity,
        TaskKind::ZrConsistency,
        TaskKind::Cpi,
        TaskKind::AltSign,
        TaskKind::PartitionCount,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::ToricIdentity => "toric-identity",
            TaskKind::OrbifoldIdentity => "orbifold-identity",
            TaskKind::DimensionReduction => "dimension-reduction",
            TaskKind::Divisibility => "divisibility",
            TaskKind::PoleOrder => "pole-order",
            TaskKind::AxisCanonicity => "axis-canonicity",
            TaskKind::ZrConsistency => "zr-consistency",
            TaskKind::Cpi => "cpi",
            TaskKind::AltSign => "alt-sign",
            TaskKind::PartitionCount => "partition-count",
        }
    }

    /// Whether the task needs `r`.
    pub fn needs_r(self) -> bool {
        matches!(
            self,
            TaskKind::OrbifoldIdentity
                | TaskKind::DimensionReduction
                | TaskKind::Divisibility
                | TaskKind::PoleOrder
                | TaskKind::ZrConsistency
                | TaskKind::Cpi
                | TaskKind::AltSign
        )
    }

    /// Tasks that substitute linear forms or read off valuations.
    pub fn exact_only(self) -> bool {
        matches!(self, TaskKind::DimensionReduction | TaskKind::Divisibility | TaskKind::PoleOrder)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TaskKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "toric" => return Ok(TaskKind::ToricIdentity),
            "orbifold" => return Ok(TaskKind::OrbifoldIdentity),
            _ => {}
        }
        TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown task `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModpConfig {
    pub prime: u64,
    pub trials: usize,
    pub seed: u64,
    /// Fixed point for every trial instead of seeded draws; no resampling.
    pub point: Option<[u64; 4]>,
}

impl ModpConfig {
    pub fn new(prime: u64, trials: usize, seed: u64) -> Self {
        ModpConfig { prime, trials, seed, point: None }
    }
}

impl Default for ModpConfig {
    fn default() -> Self {
        ModpConfig::new(modp::prime_below_2_62(0), 5, 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Exact,
    Modp(ModpConfig),
}

impl Mode {
    pub fn name(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Modp(_) => "modp",
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationTask {
    pub kind: TaskKind,
    pub geometry: Option<Geometry>,
    pub r: Option<u32>,
    pub cutoff: u32,
    pub mode: Mode,
    pub threads: usize,
    pub cache_dir: Option<PathBuf>,
}

impl VerificationTask {
    pub fn new(kind: TaskKind, cutoff: u32) -> Self {
        VerificationTask { kind, geometry: None, r: None, cutoff, mode: Mode::Exact, threads: 1, cache_dir: None }
    }

    pub fn toric(geometry: Geometry, cutoff: u32) -> Self {
        VerificationTask { geometry: Some(geometry), ..Self::new(TaskKind::ToricIdentity, cutoff) }
    }

    pub fn with_r(mut self, r: u32) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_cache(mut self, dir: PathBuf) -> Self {
        self.cache_dir = Some(dir);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.needs_r() {
            match self.r {
                None => return Err(Error::Config(format!("{} needs r", self.kind))),
                Some(0) => return Err(Error::Config("r must be at least 1".into())),
                Some(_) => {}
            }
        }
        if self.kind == TaskKind::ToricIdentity {
            match &self.geometry {
                Some(Geometry::Toric { .. }) => {}
                Some(Geometry::Orbifold { .. }) => {
                    return Err(Error::Config("toric identity needs a toric geometry".into()))
                }
                None => return Err(Error::Config("toric identity needs a geometry".into())),
            }
        }
        if let Mode::Modp(cfg) = &self.mode {
            if self.kind.exact_only() {
                return Err(Error::Config(format!("{} runs in exact mode only", self.kind)));
            }
            if cfg.trials == 0 {
                return Err(Error::Config("modp mode needs at least one trial".into()));
            }
            if !modp::is_prime(cfg.prime) {
                return Err(Error::Config(format!("{} is not prime", cfg.prime)));
            }
            let need = u64::from(self.cutoff.max(self.r.unwrap_or(1)));
            if cfg.prime <= need {
                return Err(Error::Config(format!("prime must exceed the cutoff and r, got {}", cfg.prime)));
            }
            if let Some(pt) = cfg.point {
                PrimeSample::new(cfg.prime, pt, cfg.seed)?;
            }
        }
        Ok(())
    }

    fn echo(&self) -> TaskEcho {
        let geometry = match (&self.geometry, self.kind) {
            (Some(g), TaskKind::ToricIdentity) => Some(g.name()),
            _ => None,
        };
        let charts = match (&self.geometry, self.kind) {
            (Some(g @ Geometry::Toric { .. }), TaskKind::ToricIdentity) => {
                Some(g.charts().iter().map(|c| c.describe()).collect())
            }
            _ => None,
        };
        TaskEcho {
            kind: self.kind,
            geometry,
            charts,
            r: if self.kind.needs_r() || self.kind == TaskKind::PartitionCount { self.r } else { None },
            cutoff: self.cutoff,
            mode: self.mode.name().to_string(),
        }
    }
}

/// What the report records about its task. Thread count and cache location
/// are left out so reports are comparable across runs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskEcho {
    pub kind: TaskKind,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub geometry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub charts: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u32>,
    pub cutoff: u32,
    pub mode: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRecord {
    pub exponents: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trial: Option<usize>,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorKind {
    Usage,
    Degenerate,
    Computation,
}

impl ErrorKind {
    pub fn of(e: &Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidPartition(_) => ErrorKind::Usage,
            Error::DegeneratePoint(_) => ErrorKind::Degenerate,
            _ => ErrorKind::Computation,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub task: TaskEcho,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error_kind: Option<ErrorKind>,
    pub coefficients: Vec<CoefficientRecord>,
    pub partitions_processed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prime: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sample_points: Option<Vec<[u64; 4]>>,
    /// Upper bound on the probability that a false identity passed.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub failure_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cache: Option<CacheStats>,
    /// Wall time per partition size; for the summary table only.
    #[serde(skip)]
    pub size_timings_ms: Vec<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &CoefficientRecord> {
        self.coefficients.iter().filter(|c| !c.equal)
    }

    /// Drop the fields that legitimately differ between identical runs:
    /// timing and cache statistics.
    pub fn without_volatile(&self) -> Report {
        Report { elapsed_ms: None, cache: None, size_timings_ms: Vec::new(), ..self.clone() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Modular evaluation data gathered while checking.
#[derive(Clone, Debug, Default)]
pub(crate) struct SampleInfo {
    pub points: Vec<[u64; 4]>,
    pub failure_bound: f64,
}

pub(crate) struct Outcome {
    pub records: Vec<CoefficientRecord>,
    pub partitions: u64,
    pub samples: Option<SampleInfo>,
}

/// Run `body` once per trial at a seeded point, redrawing when a
/// denominator vanishes (at most [`RESAMPLE_CAP`] draws per trial).
pub(crate) fn for_each_sample<T>(
    cfg: &ModpConfig,
    mut body: impl FnMut(usize, &PrimeSample) -> Result<T>,
) -> Result<Vec<(PrimeSample, T)>> {
    let mut out = Vec::with_capacity(cfg.trials);
    for trial in 0..cfg.trials {
        if let Some(pt) = cfg.point {
            let s = PrimeSample::new(cfg.prime, pt, cfg.seed)?;
            let v = body(trial, &s)?;
            out.push((s, v));
            continue;
        }
        let mut done = false;
        for attempt in 0..RESAMPLE_CAP {
            let s = PrimeSample::random(cfg.prime, cfg.seed, trial, attempt)?;
            match body(trial, &s) {
                Ok(v) => {
                    out.push((s, v));
                    done = true;
                    break;
                }
                Err(Error::DegeneratePoint(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        if !done {
            return Err(Error::DegeneratePoint(format!(
                "no nondegenerate point mod {} after {RESAMPLE_CAP} draws in trial {trial}",
                cfg.prime
            )));
        }
    }
    Ok(out)
}

/// Run a task with a fresh engine.
pub fn run(task: &VerificationTask) -> Report {
    let start = Instant::now();
    let engine = task.validate().and_then(|_| {
        let cache = match &task.cache_dir {
            Some(dir) => Some(ContributionCache::open(dir)?),
            None => None,
        };
        Engine::new(task.threads, cache)
    });
    match engine {
        Ok(mut engine) => run_with(&mut engine, task, start),
        Err(e) => error_report(task, e, start),
    }
}

/// Run a task on an existing engine, so several tasks share a cache.
pub fn run_with(engine: &mut Engine, task: &VerificationTask, start: Instant) -> Report {
    if let Err(e) = task.validate() {
        return error_report(task, e, start);
    }
    let before = engine.cache_stats();
    let timings_before = engine.size_timings_ms().to_vec();
    let outcome = checks::dispatch(engine, task);
    let mut report = match outcome {
        Ok(o) => {
            let status = if o.records.iter().all(|r| r.equal) { Status::Pass } else { Status::Fail };
            let mut rep = blank_report(task, status, start);
            rep.coefficients = o.records;
            rep.partitions_processed = o.partitions;
            if let (Some(s), Mode::Modp(cfg)) = (o.samples, &task.mode) {
                rep.sample_points = Some(s.points);
                rep.failure_bound = Some(s.failure_bound);
                rep.prime = Some(cfg.prime);
                rep.trials = Some(cfg.trials);
                rep.seed = Some(cfg.seed);
            }
            rep
        }
        Err(e) => error_report(task, e, start),
    };
    if let (Some(b), Some(a)) = (before, engine.cache_stats()) {
        report.cache = Some(CacheStats { hits: a.hits - b.hits, misses: a.misses - b.misses });
    }
    report.size_timings_ms = engine
        .size_timings_ms()
        .iter()
        .enumerate()
        .map(|(i, t)| t - timings_before.get(i).copied().unwrap_or(0.0))
        .collect();
    report.elapsed_ms = Some(start.elapsed().as_millis() as u64);
    report
}

fn blank_report(task: &VerificationTask, status: Status, start: Instant) -> Report {
    let (prime, trials, seed) = match &task.mode {
        Mode::Modp(cfg) => (Some(cfg.prime), Some(cfg.trials), Some(cfg.seed)),
        Mode::Exact => (None, None, None),
    };
    Report {
        task: task.echo(),
        status,
        error: None,
        error_kind: None,
        coefficients: Vec::new(),
        partitions_processed: 0,
        prime,
        trials,
        seed,
        sample_points: None,
        failure_bound: None,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
        cache: None,
        size_timings_ms: Vec::new(),
    }
}

fn error_report(task: &VerificationTask, e: Error, start: Instant) -> Report {
    let mut rep = blank_report(task, Status::Error, start);
    rep.error_kind = Some(ErrorKind::of(&e));
    rep.error = Some(e.to_string());
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_names_roundtrip() {
        for k in TaskKind::ALL {
            assert_eq!(k.name().parse::<TaskKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.name()));
        }
        assert_eq!("toric".parse::<TaskKind>().unwrap(), TaskKind::ToricIdentity);
        assert!("nope".parse::<TaskKind>().is_err());
    }

    #[test]
    fn validation_errors() {
        let t = VerificationTask::new(TaskKind::OrbifoldIdentity, 2);
        assert_eq!(run(&t).error_kind, Some(ErrorKind::Usage));
        let t = VerificationTask::new(TaskKind::OrbifoldIdentity, 2).with_r(0);
        assert_eq!(run(&t).status, Status::Error);
        let t = VerificationTask::new(TaskKind::Divisibility, 2)
            .with_r(2)
            .with_mode(Mode::Modp(ModpConfig::default()));
        assert!(run(&t).error.unwrap().contains("exact mode only"));
        let t = VerificationTask::new(TaskKind::OrbifoldIdentity, 2)
            .with_r(2)
            .with_mode(Mode::Modp(ModpConfig::new(modp::prime_below_2_62(0), 0, 1)));
        assert_eq!(run(&t).status, Status::Error);
    }

    #[test]
    fn resampling_gives_up_at_the_cap() {
        let cfg = ModpConfig::new(101, 1, 0);
        let mut calls = 0;
        let res = for_each_sample(&cfg, |_, _| -> Result<()> {
            calls += 1;
            Err(Error::DegeneratePoint("always".into()))
        });
        assert!(matches!(res, Err(Error::DegeneratePoint(_))));
        assert_eq!(calls, RESAMPLE_CAP);
    }
}
