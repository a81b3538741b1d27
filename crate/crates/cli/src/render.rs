use std::fmt::Write;

use dt4_core::algebra::Field;
use dt4_core::engine::{Report, Status};
use dt4_core::series::TruncatedSeries;

fn exps(e: &[u32]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(","))
}

/// Human summary: one row per record, then a status line.
pub fn summary(rep: &Report, deterministic: bool) -> String {
    let mut out = String::new();
    let t = &rep.task;
    let _ = write!(out, "task: {}", t.kind);
    if let Some(g) = &t.geometry {
        let _ = write!(out, "  geometry={g}");
    }
    if let Some(r) = t.r {
        let _ = write!(out, "  r={r}");
    }
    let _ = writeln!(out, "  order={}  mode={}", t.cutoff, t.mode);

    if !rep.coefficients.is_empty() {
        let label_w = rep.coefficients.iter().filter_map(|c| c.label.as_ref()).map(|l| l.len()).max().unwrap_or(0);
        let exp_w = rep.coefficients.iter().map(|c| exps(&c.exponents).len()).max().unwrap_or(0).max(9);
        let mut header = format!("{:<exp_w$}", "exponents");
        if label_w > 0 {
            let _ = write!(header, "  {:<label_w$}", "partition");
        }
        if rep.trials.is_some() {
            header.push_str("  trial");
        }
        header.push_str("  equal");
        if !deterministic {
            header.push_str("  ms");
        }
        let _ = writeln!(out, "{}", header.trim_end());
        for c in &rep.coefficients {
            let mut row = format!("{:<exp_w$}", exps(&c.exponents));
            if label_w > 0 {
                let _ = write!(row, "  {:<label_w$}", c.label.as_deref().unwrap_or(""));
            }
            if rep.trials.is_some() {
                let _ = write!(row, "  {:<5}", c.trial.map_or(String::new(), |t| t.to_string()));
            }
            let _ = write!(row, "  {:<5}", if c.equal { "yes" } else { "NO" });
            if !deterministic {
                let deg = c.exponents.iter().sum::<u32>() as usize;
                match rep.size_timings_ms.get(deg) {
                    Some(ms) if c.label.is_none() => {
                        let _ = write!(row, "  {ms:.1}");
                    }
                    _ => row.push_str("  -"),
                }
            }
            let _ = writeln!(out, "{}", row.trim_end());
        }
    }

    if let (Some(p), Some(trials), Some(seed)) = (rep.prime, rep.trials, rep.seed) {
        let _ = write!(out, "prime={p}  trials={trials}  seed={seed}");
        if let Some(b) = rep.failure_bound {
            let _ = write!(out, "  failure bound={b:.3e}");
        }
        out.push('\n');
    }
    let status = match rep.status {
        Status::Pass => "pass",
        Status::Fail => "FAIL",
        Status::Error => "ERROR",
    };
    let mismatches = rep.mismatches().count();
    let _ = write!(
        out,
        "status: {status} ({} records, {mismatches} mismatches, {} partitions",
        rep.coefficients.len(),
        rep.partitions_processed
    );
    if !deterministic {
        if let Some(ms) = rep.elapsed_ms {
            let _ = write!(out, ", {ms} ms");
        }
        if let Some(c) = rep.cache {
            let _ = write!(out, ", cache {} hits / {} misses", c.hits, c.misses);
        }
    }
    out.push_str(")\n");
    if let Some(e) = &rep.error {
        let _ = writeln!(out, "error: {e}");
    }
    out
}

/// One line per stored coefficient: `[exponents] value`.
pub fn series_lines<F: Field>(s: &TruncatedSeries<F::Elem>, f: &F) -> String {
    let mut out = String::new();
    for (e, c) in s.terms() {
        let _ = writeln!(out, "{} {}", exps(e), f.render(c));
    }
    out
}
