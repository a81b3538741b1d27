//! The individual verification tasks.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::lhs::{lhs_orbifold_from, lhs_toric_from, Contributions, Engine, Source};
use super::{for_each_sample, CoefficientRecord, Mode, ModpConfig, Outcome, SampleInfo, TaskKind, VerificationTask};
use crate::algebra::{ExactRF, FactoredRational, Field, FormProduct, LinearForm};
use crate::error::{Error, Result};
use crate::partitions::{brute_force, count_up_to, enumerate_up_to, SolidPartition};
use crate::series::{
    exponent_a_series_printed, exponent_orbifold_tilde, exponent_toric, rhs_orbifold,
    rhs_orbifold_3d, rhs_toric, TruncatedSeries,
};
use crate::vertex::{
    alt_sign_sides, axis_contribution, reduced_constant_term, v_tilde, v_tilde_zr, zr_fix, Chart, Geometry,
};

pub(crate) fn dispatch(engine: &mut Engine, task: &VerificationTask) -> Result<Outcome> {
    let n = task.cutoff;
    let r = task.r.unwrap_or(1);
    match task.kind {
        TaskKind::ToricIdentity => {
            let geom = task.geometry.as_ref().ok_or_else(|| Error::Config("missing geometry".into()))?;
            toric_identity(engine, geom, n, &task.mode)
        }
        TaskKind::OrbifoldIdentity => orbifold_identity(engine, r, n, &task.mode),
        TaskKind::DimensionReduction => dimension_reduction(engine, r, n),
        TaskKind::Divisibility => divisibility(engine, r, n),
        TaskKind::PoleOrder => pole_order(engine, r, n),
        TaskKind::AxisCanonicity => axis_canonicity(engine, n, &task.mode),
        TaskKind::ZrConsistency => zr_consistency(engine, r, n),
        TaskKind::Cpi => cpi(engine, r, n),
        TaskKind::AltSign => alt_sign(engine, r, n, &task.mode),
        TaskKind::PartitionCount => partition_count(n),
    }
}

/// All exponent vectors in `nvars` variables of total degree `<= cutoff`,
/// ordered by degree then lexicographically.
pub fn exponent_vectors(nvars: usize, cutoff: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=budget {
            prefix.push(k);
            rec(prefix, left - 1, budget - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), nvars, cutoff, &mut out);
    out.sort_by(|a, b| a.iter().sum::<u32>().cmp(&b.iter().sum::<u32>()).then_with(|| a.cmp(b)));
    out
}

/// One record per exponent vector up to the common cutoff.
pub fn compare<F: Field>(
    lhs: &TruncatedSeries<F::Elem>,
    rhs: &TruncatedSeries<F::Elem>,
    f: &F,
    trial: Option<usize>,
) -> Vec<CoefficientRecord> {
    assert_eq!(lhs.vars(), rhs.vars(), "compared series must share variables");
    let cutoff = lhs.cutoff().min(rhs.cutoff());
    let zero = f.zero();
    exponent_vectors(lhs.nvars(), cutoff)
        .into_iter()
        .map(|e| {
            let a = lhs.coeff(&e).unwrap_or(&zero);
            let b = rhs.coeff(&e).unwrap_or(&zero);
            CoefficientRecord {
                exponents: e,
                label: None,
                trial,
                lhs: f.render(a),
                rhs: f.render(b),
                equal: f.is_zero(&f.sub(a, b)),
            }
        })
        .collect()
}

fn product_degree(p: &FormProduct) -> u64 {
    p.factors().map(|(_, k)| k.unsigned_abs()).sum()
}

fn rational_degree(x: &FactoredRational) -> u64 {
    u64::from(x.numerator().total_degree().unwrap_or(0)) + u64::from(x.den_degree())
}

/// Schwartz-Zippel bound for a series identity. After clearing
/// denominators, each coefficient difference is a polynomial of degree at
/// most the summed degrees of all contributions plus `cutoff` times the
/// degrees of the closed-form exponents; a union bound covers the
/// coefficients, and independent trials multiply.
fn series_failure_bound(cfg: &ModpConfig, contribs: &[&Contributions], exponents: &[FactoredRational], cutoff: u32, ncoeffs: usize) -> f64 {
    let lhs: u64 = contribs.iter().flat_map(|c| c.items.iter()).map(|(_, p)| product_degree(p)).sum();
    let rhs: u64 = u64::from(cutoff) * exponents.iter().map(rational_degree).sum::<u64>();
    trial_bound(cfg, (lhs + rhs) as f64 * ncoeffs as f64)
}

fn trial_bound(cfg: &ModpConfig, degree: f64) -> f64 {
    // points avoid zero, so they range over p - 1 values
    let per_trial = (degree / (cfg.prime - 1) as f64).min(1.0);
    if cfg.point.is_some() {
        // a repeated fixed point is one trial, however often it is used
        per_trial
    } else {
        per_trial.powi(cfg.trials as i32)
    }
}

fn processed(contribs: &[&Contributions]) -> u64 {
    contribs.iter().map(|c| c.items.len() as u64).sum()
}

fn toric_identity(engine: &mut Engine, geom: &Geometry, cutoff: u32, mode: &Mode) -> Result<Outcome> {
    let charts = engine.toric_contributions(geom, cutoff)?;
    let refs: Vec<&Contributions> = charts.iter().collect();
    match mode {
        Mode::Exact => {
            let lhs = lhs_toric_from(&charts, cutoff, &ExactRF)?;
            let rhs = rhs_toric(geom, cutoff, &ExactRF)?;
            Ok(Outcome { records: compare(&lhs, &rhs, &ExactRF, None), partitions: processed(&refs), samples: None })
        }
        Mode::Modp(cfg) => {
            let runs = for_each_sample(cfg, |trial, s| {
                let lhs = lhs_toric_from(&charts, cutoff, s)?;
                let rhs = rhs_toric(geom, cutoff, s)?;
                Ok(compare(&lhs, &rhs, s, Some(trial)))
            })?;
            let bound = series_failure_bound(cfg, &refs, &[exponent_toric(geom)?], cutoff, cutoff as usize + 1);
            Ok(collect_runs(runs, processed(&refs), bound))
        }
    }
}

fn collect_runs(runs: Vec<(crate::algebra::PrimeSample, Vec<CoefficientRecord>)>, partitions: u64, bound: f64) -> Outcome {
    let points = runs.iter().map(|(s, _)| s.point).collect();
    let records = runs.into_iter().flat_map(|(_, r)| r).collect();
    Outcome { records, partitions, samples: Some(SampleInfo { points, failure_bound: bound }) }
}

fn orbifold_identity(engine: &mut Engine, r: u32, cutoff: u32, mode: &Mode) -> Result<Outcome> {
    let contribs = engine.contributions(&Source::Orbifold(r), cutoff)?;
    let n = contribs.items.len() as u64;
    match mode {
        Mode::Exact => {
            let lhs = lhs_orbifold_from(&contribs, r, cutoff, &ExactRF)?;
            let rhs = rhs_orbifold(r, cutoff, &ExactRF)?;
            Ok(Outcome { records: compare(&lhs, &rhs, &ExactRF, None), partitions: n, samples: None })
        }
        Mode::Modp(cfg) => {
            let runs = for_each_sample(cfg, |trial, s| {
                let lhs = lhs_orbifold_from(&contribs, r, cutoff, s)?;
                let rhs = rhs_orbifold(r, cutoff, s)?;
                Ok(compare(&lhs, &rhs, s, Some(trial)))
            })?;
            let ncoeffs = exponent_vectors(r as usize, cutoff).len();
            let exps = [exponent_a_series_printed(r), exponent_orbifold_tilde()];
            let bound = series_failure_bound(cfg, &[&contribs], &exps, cutoff, ncoeffs);
            Ok(collect_runs(runs, n, bound))
        }
    }
}

fn exact_lhs_orbifold(engine: &mut Engine, r: u32, cutoff: u32) -> Result<(TruncatedSeries<FactoredRational>, u64)> {
    let contribs = engine.contributions(&Source::Orbifold(r), cutoff)?;
    Ok((lhs_orbifold_from(&contribs, r, cutoff, &ExactRF)?, contribs.items.len() as u64))
}

/// `m := -s1-s2-s3` on the left against the three-dimensional closed form.
fn dimension_reduction(engine: &mut Engine, r: u32, cutoff: u32) -> Result<Outcome> {
    let (lhs, n) = exact_lhs_orbifold(engine, r, cutoff)?;
    let s4 = LinearForm::s(4);
    let mut reduced = TruncatedSeries::zero(lhs.vars().to_vec(), cutoff);
    for (e, c) in lhs.terms() {
        reduced.add_term(e.clone(), &c.substitute_m(&s4)?, &ExactRF);
    }
    let rhs = rhs_orbifold_3d(r, cutoff, &ExactRF)?;
    Ok(Outcome { records: compare(&reduced, &rhs, &ExactRF, None), partitions: n, samples: None })
}

fn fmt_val(v: Option<i64>) -> String {
    v.map_or("none".into(), |v| v.to_string())
}

/// Every nonconstant coefficient has `m`-valuation exactly 1 and
/// `(s1+s2)`-valuation at least 1. Vanishing coefficients carry no
/// valuation and are skipped.
fn divisibility(engine: &mut Engine, r: u32, cutoff: u32) -> Result<Outcome> {
    let (lhs, n) = exact_lhs_orbifold(engine, r, cutoff)?;
    let m = LinearForm::m();
    let s12 = &LinearForm::s(1) + &LinearForm::s(2);
    let records = lhs
        .terms()
        .filter(|(e, _)| e.iter().any(|&x| x > 0))
        .map(|(e, c)| {
            let vm = c.valuation(&m);
            let vs = c.valuation(&s12);
            CoefficientRecord {
                exponents: e.clone(),
                label: None,
                trial: None,
                lhs: format!("v_m={}, v_s1+s2={}", fmt_val(vm), fmt_val(vs)),
                rhs: "v_m=1, v_s1+s2>=1".into(),
                equal: vm == Some(1) && vs.is_some_and(|v| v >= 1),
            }
        })
        .collect();
    Ok(Outcome { records, partitions: n, samples: None })
}

/// Every coefficient of the logarithm has at most a simple pole along `s3`.
fn pole_order(engine: &mut Engine, r: u32, cutoff: u32) -> Result<Outcome> {
    let (lhs, n) = exact_lhs_orbifold(engine, r, cutoff)?;
    let log = lhs.log(&ExactRF)?;
    let s3 = LinearForm::s(3);
    let records = log
        .terms()
        .map(|(e, c)| {
            let v = c.valuation(&s3);
            CoefficientRecord {
                exponents: e.clone(),
                label: None,
                trial: None,
                lhs: format!("v_s3={}", fmt_val(v)),
                rhs: "v_s3>=-1".into(),
                equal: v.is_some_and(|v| v >= -1),
            }
        })
        .collect();
    Ok(Outcome { records, partitions: n, samples: None })
}

/// Nonempty partitions up to `cutoff` boxes.
fn nonempty(cutoff: u32) -> Vec<SolidPartition> {
    enumerate_up_to(cutoff as usize).into_iter().filter(|p| !p.is_empty()).collect()
}

/// A labelled pair of products that should agree.
struct Pair {
    label: String,
    exponents: Vec<u32>,
    lhs: FormProduct,
    rhs: FormProduct,
}

fn compare_pairs(pairs: &[Pair], mode: &Mode) -> Result<(Vec<CoefficientRecord>, Option<SampleInfo>)> {
    match mode {
        Mode::Exact => {
            let records = pairs
                .iter()
                .map(|p| {
                    let a = p.lhs.to_rational();
                    let b = p.rhs.to_rational();
                    CoefficientRecord {
                        exponents: p.exponents.clone(),
                        label: Some(p.label.clone()),
                        trial: None,
                        lhs: a.to_string(),
                        rhs: b.to_string(),
                        equal: a == b,
                    }
                })
                .collect();
            Ok((records, None))
        }
        Mode::Modp(cfg) => {
            let runs = for_each_sample(cfg, |trial, s| {
                pairs
                    .iter()
                    .map(|p| {
                        let a = s.lift_product(&p.lhs)?;
                        let b = s.lift_product(&p.rhs)?;
                        Ok(CoefficientRecord {
                            exponents: p.exponents.clone(),
                            label: Some(p.label.clone()),
                            trial: Some(trial),
                            lhs: a.to_string(),
                            rhs: b.to_string(),
                            equal: a == b,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let degree: u64 = pairs.iter().map(|p| product_degree(&p.lhs) + product_degree(&p.rhs)).max().unwrap_or(0);
            let bound = trial_bound(cfg, degree as f64 * pairs.len() as f64);
            let out = collect_runs(runs, 0, bound);
            Ok((out.records, out.samples))
        }
    }
}

/// `(-1)^{mu^i} e(-v~^i)` agrees with the axis-4 value for `i = 1, 2, 3`.
fn axis_canonicity(engine: &mut Engine, cutoff: u32, mode: &Mode) -> Result<Outcome> {
    let parts = nonempty(cutoff);
    let values: Vec<Result<[FormProduct; 4]>> = engine.install(|| {
        parts
            .par_iter()
            .map(|pi| {
                Ok([
                    axis_contribution(pi, 1)?,
                    axis_contribution(pi, 2)?,
                    axis_contribution(pi, 3)?,
                    axis_contribution(pi, 4)?,
                ])
            })
            .collect()
    });
    let mut pairs = Vec::new();
    for (pi, v) in parts.iter().zip(values) {
        let v = v?;
        for axis in 1..=3 {
            pairs.push(Pair {
                label: format!("{pi} axis {axis}"),
                exponents: vec![pi.size() as u32],
                lhs: v[3].clone(),
                rhs: v[axis - 1].clone(),
            });
        }
    }
    let (records, samples) = compare_pairs(&pairs, mode)?;
    Ok(Outcome { records, partitions: parts.len() as u64, samples })
}

/// `(-1)^mu e(-(v - y bar Z0))` against `(-1)^{|pi|_0 + mu} e(-(v - y^{-1} Z0))`.
fn alt_sign(engine: &mut Engine, r: u32, cutoff: u32, mode: &Mode) -> Result<Outcome> {
    let parts = nonempty(cutoff);
    let sides: Vec<Result<(FormProduct, FormProduct)>> =
        engine.install(|| parts.par_iter().map(|pi| alt_sign_sides(pi, r)).collect());
    let mut pairs = Vec::new();
    for (pi, s) in parts.iter().zip(sides) {
        let (lhs, rhs) = s?;
        pairs.push(Pair { label: pi.to_string(), exponents: pi.color_vector(r), lhs, rhs });
    }
    let (records, samples) = compare_pairs(&pairs, mode)?;
    Ok(Outcome { records, partitions: parts.len() as u64, samples })
}

/// `zr_fix(v~) = v~^{Z_r}` as classes.
fn zr_consistency(engine: &mut Engine, r: u32, cutoff: u32) -> Result<Outcome> {
    let parts = nonempty(cutoff);
    let chart = Chart::standard();
    let records: Vec<Result<CoefficientRecord>> = engine.install(|| {
        parts
            .par_iter()
            .map(|pi| {
                let a = zr_fix(&v_tilde(pi, &chart)?, r);
                let b = v_tilde_zr(pi, r)?;
                Ok(CoefficientRecord {
                    exponents: pi.color_vector(r),
                    label: Some(pi.to_string()),
                    trial: None,
                    lhs: a.to_string(),
                    rhs: b.to_string(),
                    equal: a == b,
                })
            })
            .collect()
    });
    let records = records.into_iter().collect::<Result<_>>()?;
    Ok(Outcome { records, partitions: parts.len() as u64, samples: None })
}

/// `C^pi` equals the constant term of the reduced orbifold vertex and
/// satisfies `C^pi <= -a_00 < 0`.
fn cpi(engine: &mut Engine, r: u32, cutoff: u32) -> Result<Outcome> {
    let parts = nonempty(cutoff);
    let records: Vec<Result<CoefficientRecord>> = engine.install(|| {
        parts
            .par_iter()
            .map(|pi| {
                let c = pi.c_stat();
                let ct = reduced_constant_term(&v_tilde_zr(pi, r)?);
                let a00 = pi.a_stats().get(&(0, 0)).copied().unwrap_or(0) as i64;
                Ok(CoefficientRecord {
                    exponents: pi.color_vector(r),
                    label: Some(pi.to_string()),
                    trial: None,
                    lhs: format!("C={c}"),
                    rhs: format!("constant term={ct}, -a00={}", -a00),
                    equal: c == ct && c <= -a00 && a00 > 0,
                })
            })
            .collect()
    });
    let records = records.into_iter().collect::<Result<_>>()?;
    Ok(Outcome { records, partitions: parts.len() as u64, samples: None })
}

/// Counts from the canonical enumerator against the brute-force oracle.
fn partition_count(cutoff: u32) -> Result<Outcome> {
    let counts = count_up_to(cutoff as usize);
    let oracle = brute_force(cutoff as usize);
    let records = counts
        .iter()
        .zip(&oracle)
        .enumerate()
        .map(|(n, (c, o))| CoefficientRecord {
            exponents: vec![n as u32],
            label: None,
            trial: None,
            lhs: c.to_string(),
            rhs: o.len().to_string(),
            equal: *c == o.len() as u64,
        })
        .collect();
    Ok(Outcome { records, partitions: counts.iter().sum(), samples: None })
}

/// Colored counts `#{pi : |pi| <= max, color vector = R}`.
pub fn colored_counts(max: usize, r: u32) -> BTreeMap<Vec<u32>, u64> {
    let mut out = BTreeMap::new();
    for p in enumerate_up_to(max) {
        *out.entry(p.color_vector(r)).or_insert(0) += 1;
    }
    out
}
