//! `verify` options: command-line flags layered over an optional TOML file
//! whose keys are the flag names.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use dt4_core::algebra::modp;
use dt4_core::engine::{Mode, ModpConfig, TaskKind, VerificationTask};
use dt4_core::vertex::{Geometry, GeometrySpec};

pub const DEFAULT_TRIALS: usize = 5;

#[derive(Args, Debug, Clone, Default)]
pub struct VerifyArgs {
    /// toric | orbifold | dimension-reduction | divisibility | pole-order |
    /// axis-canonicity | zr-consistency | cpi | alt-sign | partition-count | suite
    pub kind: String,
    /// c4, a{k}xc2 or orbifold-zr
    #[arg(long)]
    pub geometry: Option<String>,
    /// JSON file describing a custom toric geometry
    #[arg(long)]
    pub charts: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<u32>,
    /// Truncation order (total degree in the q variables)
    #[arg(long)]
    pub order: Option<u32>,
    /// exact or modp
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub prime: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fixed sample point `s1,s2,s3,m` instead of seeded draws
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for the contribution cache
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Write the JSON report here
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// TOML file with defaults for any of these flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated task kinds for `suite`
    #[arg(long)]
    pub checks: Option<String>,
    /// Leave timing and cache statistics out of all output
    #[arg(long)]
    pub deterministic: bool,
}

#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    geometry: Option<String>,
    charts: Option<PathBuf>,
    r: Option<u32>,
    order: Option<u32>,
    mode: Option<String>,
    prime: Option<u64>,
    trials: Option<usize>,
    seed: Option<u64>,
    point: Option<String>,
    threads: Option<usize>,
    cache: Option<PathBuf>,
    report: Option<PathBuf>,
    checks: Option<Vec<String>>,
    deterministic: Option<bool>,
}

/// Everything `verify` needs, validated.
#[derive(Debug)]
pub struct Resolved {
    pub tasks: Vec<VerificationTask>,
    pub suite: bool,
    pub report: Option<PathBuf>,
    pub deterministic: bool,
}

fn parse_point(s: &str) -> Result<[u64; 4]> {
    let v: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("bad --point `{s}`"))?;
    v.try_into().map_err(|_| anyhow::anyhow!("--point needs four residues s1,s2,s3,m"))
}

fn load_charts(path: &Path) -> Result<Geometry> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let spec: GeometrySpec =
        serde_json::from_str(&text).with_context(|| format!("parsing chart file {}", path.display()))?;
    Ok(Geometry::try_from(&spec)?)
}

impl VerifyArgs {
    /// Fill unset flags from `--config`, then validate.
    pub fn resolve(mut self) -> Result<Resolved> {
        if let Some(path) = self.config.clone() {
            let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            let file: FileConfig = toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
            self.geometry = self.geometry.or(file.geometry);
            self.charts = self.charts.or(file.charts);
            self.r = self.r.or(file.r);
            self.order = self.order.or(file.order);
            self.mode = self.mode.or(file.mode);
            self.prime = self.prime.or(file.prime);
            self.trials = self.trials.or(file.trials);
            self.seed = self.seed.or(file.seed);
            self.point = self.point.or(file.point);
            self.threads = self.threads.or(file.threads);
            self.cache = self.cache.or(file.cache);
            self.report = self.report.or(file.report);
            self.checks = self.checks.or(file.checks.map(|c| c.join(",")));
            self.deterministic |= file.deterministic.unwrap_or(false);
        }

        let order = self.order.context("--order is required")?;
        let mode = match self.mode.as_deref().unwrap_or("exact") {
            "exact" => {
                if self.prime.is_some() || self.trials.is_some() || self.seed.is_some() || self.point.is_some() {
                    bail!("--prime, --trials, --seed and --point need --mode modp");
                }
                Mode::Exact
            }
            "modp" => {
                let mut cfg = ModpConfig::new(
                    self.prime.unwrap_or_else(|| modp::prime_below_2_62(0)),
                    self.trials.unwrap_or(DEFAULT_TRIALS),
                    self.seed.unwrap_or(0),
                );
                cfg.point = self.point.as_deref().map(parse_point).transpose()?;
                Mode::Modp(cfg)
            }
            other => bail!("unknown mode `{other}` (expected exact or modp)"),
        };
        let threads = match self.threads {
            Some(0) => bail!("--threads must be positive"),
            Some(t) => t,
            None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        };
        if self.geometry.is_some() && self.charts.is_some() {
            bail!("give either --geometry or --charts, not both");
        }
        let geometry = match (&self.geometry, &self.charts) {
            (_, Some(path)) => Some(load_charts(path)?),
            (Some(name), None) => Some(Geometry::from_name(name, self.r)?),
            (None, None) => None,
        };
        // an orbifold geometry supplies r when --r is missing
        let r = match (&geometry, self.r) {
            (Some(Geometry::Orbifold { r }), None) => Some(*r),
            (_, r) => r,
        };

        let suite = self.kind == "suite";
        let kinds: Vec<TaskKind> = if suite {
            let list = self.checks.as_deref().context("suite needs --checks")?;
            list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.parse()).collect::<dt4_core::Result<_>>()?
        } else {
            if self.checks.is_some() {
                bail!("--checks is only used by `verify suite`");
            }
            vec![self.kind.parse()?]
        };
        if kinds.is_empty() {
            bail!("suite needs at least one check");
        }

        let mut tasks = Vec::with_capacity(kinds.len());
        for kind in kinds {
            let mut task = VerificationTask::new(kind, order).with_mode(mode.clone()).with_threads(threads);
            task.r = r;
            if kind == TaskKind::ToricIdentity {
                task.geometry = Some(geometry.clone().unwrap_or_else(Geometry::c4));
            }
            if let Some(dir) = &self.cache {
                task.cache_dir = Some(dir.clone());
            }
            if kind == TaskKind::ToricIdentity && matches!(task.geometry, Some(Geometry::Orbifold { .. })) {
                bail!("verify toric needs a toric geometry, not {}", self.geometry.as_deref().unwrap_or("?"));
            }
            task.validate()?;
            tasks.push(task);
        }
        Ok(Resolved { tasks, suite, report: self.report, deterministic: self.deterministic })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(kind: &str) -> VerifyArgs {
        VerifyArgs { kind: kind.into(), order: Some(2), threads: Some(1), ..Default::default() }
    }

    #[test]
    fn defaults() {
        let r = args("toric").resolve().unwrap();
        assert_eq!(r.tasks[0].geometry, Some(Geometry::c4()));
        assert_eq!(r.tasks[0].mode, Mode::Exact);
    }

    #[test]
    fn rejections() {
        assert!(VerifyArgs { order: None, ..args("toric") }.resolve().is_err());
        assert!(VerifyArgs { r: Some(0), ..args("orbifold") }.resolve().is_err());
        assert!(VerifyArgs { prime: Some(7), ..args("toric") }.resolve().is_err());
        assert!(VerifyArgs { mode: Some("fast".into()), ..args("toric") }.resolve().is_err());
        assert!(args("suite").resolve().is_err());
        assert!(VerifyArgs { geometry: Some("orbifold-zr".into()), r: Some(2), ..args("toric") }.resolve().is_err());
    }

    #[test]
    fn config_file_fills_gaps() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "order = 3\nr = 2\nmode = \"modp\"\ntrials = 2\nchecks = [\"cpi\", \"alt-sign\"]\n").unwrap();
        let a = VerifyArgs { kind: "suite".into(), config: Some(path.clone()), order: Some(1), ..Default::default() };
        let r = a.resolve().unwrap();
        assert_eq!(r.tasks.len(), 2);
        assert_eq!(r.tasks[0].cutoff, 1, "flags win over the file");
        assert_eq!(r.tasks[1].r, Some(2));
        fs::write(&path, "ordr = 3\n").unwrap();
        assert!(VerifyArgs { config: Some(path), ..args("toric") }.resolve().is_err());
    }
}
