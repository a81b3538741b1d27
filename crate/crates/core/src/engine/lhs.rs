//! Left-hand sides: generating series summed over solid partitions.

use std::time::Instant;

use rayon::{ThreadPool, ThreadPoolBuilder};

use super::cache::{geometry_hash, CacheRecord, CacheStats, ContributionCache};
use crate::algebra::{Field, FormProduct};
use crate::error::{Error, Result};
use crate::partitions::{par_map_up_to, SolidPartition, DEFAULT_SPLIT_DEPTH};
use crate::series::{orbifold_vars, toric_vars, TruncatedSeries};
use crate::vertex::{contribution_factors, contribution_orbifold_factors, Chart, Geometry};

/// Which vertex produces the contributions.
#[derive(Clone, Debug, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Source {
    Chart(Chart),
    Orbifold(u32),
}

impl Source {
    pub fn describe(&self) -> String {
        match self {
            Source::Chart(c) => c.describe(),
            Source::Orbifold(r) => format!("orbifold[{r}]"),
        }
    }

    fn compute(&self, pi: &SolidPartition) -> Result<FormProduct> {
        match self {
            Source::Chart(c) => contribution_factors(pi, c),
            Source::Orbifold(r) => contribution_orbifold_factors(pi, *r),
        }
    }
}

/// Signed contributions of all partitions up to a size, in canonical order.
#[derive(Clone, Debug)]
pub struct Contributions {
    pub source: Source,
    pub items: Vec<(SolidPartition, FormProduct)>,
}

/// Thread pool plus optional persistent cache.
pub struct Engine {
    pool: ThreadPool,
    threads: usize,
    cache: Option<ContributionCache>,
    stats: CacheStats,
    /// Wall time spent per partition size, accumulated over calls.
    size_ms: Vec<f64>,
}

impl Engine {
    pub fn new(threads: usize, cache: Option<ContributionCache>) -> Result<Self> {
        let threads = threads.max(1);
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Engine { pool, threads, cache, stats: CacheStats::default(), size_ms: Vec::new() })
    }

    pub fn single_threaded() -> Self {
        Self::new(1, None).expect("one-thread pool")
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn cache_stats(&self) -> Option<CacheStats> {
        self.cache.as_ref().map(|_| self.stats)
    }

    pub fn size_timings_ms(&self) -> &[f64] {
        &self.size_ms
    }

    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    pub fn contributions(&mut self, source: &Source, cutoff: u32) -> Result<Contributions> {
        let key = geometry_hash(&source.describe());
        let cache = self.cache.as_ref();
        let computed: Vec<(SolidPartition, Result<FormProduct>, bool, f64)> = self.pool.install(|| {
            par_map_up_to(cutoff as usize, DEFAULT_SPLIT_DEPTH, |pi| {
                let start = Instant::now();
                let name = pi.to_string();
                if let Some(hit) = cache.and_then(|c| c.get(&key, &name)) {
                    return (pi.clone(), Ok(hit.clone()), true, start.elapsed().as_secs_f64() * 1e3);
                }
                let v = source.compute(pi);
                (pi.clone(), v, false, start.elapsed().as_secs_f64() * 1e3)
            })
        });
        let mut items = Vec::with_capacity(computed.len());
        let mut fresh = Vec::new();
        for (pi, value, hit, ms) in computed {
            let value = value?;
            if self.size_ms.len() <= pi.size() {
                self.size_ms.resize(pi.size() + 1, 0.0);
            }
            self.size_ms[pi.size()] += ms;
            if self.cache.is_some() {
                if hit {
                    self.stats.hits += 1;
                } else {
                    self.stats.misses += 1;
                    fresh.push(CacheRecord::new(&pi.to_string(), &key, &value));
                }
            }
            items.push((pi, value));
        }
        if let Some(cache) = self.cache.as_mut() {
            cache.extend(fresh)?;
        }
        Ok(Contributions { source: source.clone(), items })
    }

    /// Contributions for each chart of a toric geometry.
    pub fn toric_contributions(&mut self, geom: &Geometry, cutoff: u32) -> Result<Vec<Contributions>> {
        match geom {
            Geometry::Toric { charts, .. } => {
                charts.iter().map(|c| self.contributions(&Source::Chart(c.clone()), cutoff)).collect()
            }
            Geometry::Orbifold { .. } => Err(Error::Config("toric identity needs a toric geometry".into())),
        }
    }
}

/// `sum_pi c_pi q^|pi|` for one chart.
pub fn chart_series<F: Field>(contribs: &Contributions, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let mut s = TruncatedSeries::zero(toric_vars(), cutoff);
    for (pi, c) in &contribs.items {
        s.add_term(vec![pi.size() as u32], &f.lift_product(c)?, f);
    }
    Ok(s)
}

/// Product over charts of the single-chart series.
pub fn lhs_toric_from<F: Field>(charts: &[Contributions], cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let mut out = TruncatedSeries::one(toric_vars(), cutoff, f);
    for c in charts {
        out = out.mul(&chart_series(c, cutoff, f)?, f);
    }
    Ok(out)
}

/// `sum_pi c_pi q_0^{|pi|_0} ... q_{r-1}^{|pi|_{r-1}}`.
pub fn lhs_orbifold_from<F: Field>(contribs: &Contributions, r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let mut s = TruncatedSeries::zero(orbifold_vars(r), cutoff);
    for (pi, c) in &contribs.items {
        s.add_term(pi.color_vector(r), &f.lift_product(c)?, f);
    }
    Ok(s)
}

pub fn lhs_toric<F: Field>(geom: &Geometry, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    let mut engine = Engine::single_threaded();
    let charts = engine.toric_contributions(geom, cutoff)?;
    lhs_toric_from(&charts, cutoff, f)
}

pub fn lhs_orbifold<F: Field>(r: u32, cutoff: u32, f: &F) -> Result<TruncatedSeries<F::Elem>> {
    if r == 0 {
        return Err(Error::Config("r must be at least 1".into()));
    }
    let mut engine = Engine::single_threaded();
    let c = engine.contributions(&Source::Orbifold(r), cutoff)?;
    lhs_orbifold_from(&c, r, cutoff, f)
}
