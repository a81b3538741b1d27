//! Acceptance criteria A1–A9. Runs without the libtest harness so that each
//! criterion prints exactly one pass/fail line.

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use dt4_core::algebra::modp::{add_mod, inv_mod, mul_mod, prime_below_2_62, sub_mod};
use dt4_core::algebra::{specialize, ExactRF, FactoredRational, PrimeSample};
use dt4_core::engine::{
    lhs_orbifold, lhs_toric, run, ContributionCache, Mode, ModpConfig, Report, Status, TaskKind,
    VerificationTask,
};
use dt4_core::partitions::{brute_force, count_up_to, enumerate};
use dt4_core::series::{exponent_a_series_printed, exponent_toric, rhs_orbifold, rhs_toric, TruncatedSeries};
use dt4_core::vertex::Geometry;

type Oracle = fn(&[u64; 4], u64) -> u64;

fn sample(i: usize) -> PrimeSample {
    PrimeSample::random(prime_below_2_62(0), 0xacce97 + i as u64, i, 0).unwrap()
}

/// Compare an exact value with a hand-written formula at several points.
fn agrees(x: &FactoredRational, oracle: Oracle) -> bool {
    (0..6).all(|i| {
        let s = sample(i);
        specialize(x, &s).unwrap() == oracle(&s.point, s.p)
    })
}

fn div(a: u64, b: u64, p: u64) -> u64 {
    mul_mod(a, inv_mod(b, p).expect("nonzero denominator"), p)
}

fn s4(x: &[u64; 4], p: u64) -> u64 {
    sub_mod(0, add_mod(add_mod(x[0], x[1], p), x[2], p), p)
}

/// m(s1+s2)(s1+s3)(s2+s3) / (s1 s2 s3 s4)
fn c4_order_one(x: &[u64; 4], p: u64) -> u64 {
    let [s1, s2, s3, m] = *x;
    let num = [add_mod(s1, s2, p), add_mod(s1, s3, p), add_mod(s2, s3, p)].iter().fold(m, |a, b| mul_mod(a, *b, p));
    let den = mul_mod(mul_mod(mul_mod(s1, s2, p), s3, p), s4(x, p), p);
    div(num, den, p)
}

/// m(s1+s2) / (s3 s4)
fn orbifold_q0(x: &[u64; 4], p: u64) -> u64 {
    let [s1, s2, s3, m] = *x;
    div(mul_mod(m, add_mod(s1, s2, p), p), mul_mod(s3, s4(x, p), p), p)
}

fn coeff(s: &TruncatedSeries<FactoredRational>, e: &[u32]) -> FactoredRational {
    s.coeff(e).cloned().unwrap_or_else(FactoredRational::zero)
}

fn assert_pass(rep: &Report) {
    assert_eq!(rep.status, Status::Pass, "{}", rep.to_json());
    assert!(!rep.coefficients.is_empty());
}

fn modp(trials: usize, seed: u64) -> Mode {
    Mode::Modp(ModpConfig::new(prime_below_2_62(0), trials, seed))
}

fn threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn a1() {
    let rep = run(&VerificationTask::toric(Geometry::c4(), 4).with_threads(threads()));
    assert_pass(&rep);
    assert_eq!(rep.coefficients.len(), 5);
    assert_eq!(rep.partitions_processed - 1, 41, "nonempty partitions up to 4 boxes");
    let lhs = lhs_toric(&Geometry::c4(), 1, &ExactRF).unwrap();
    let rhs = rhs_toric(&Geometry::c4(), 1, &ExactRF).unwrap();
    assert!(agrees(&coeff(&lhs, &[1]), c4_order_one));
    assert!(agrees(&coeff(&rhs, &[1]), c4_order_one));
}

fn a2() {
    let t = Instant::now();
    for r in 2..=4 {
        let geom = Geometry::a_series(r);
        let sum = exponent_toric(&geom).unwrap();
        assert_eq!(sum, exponent_a_series_printed(r), "r = {r}");
        // -(m/s4)(r(s1+s2)/s3 + (s1+s2)(s1+s2+s3)/(r s1 s2)) evaluated directly
        let oracle = |x: &[u64; 4], p: u64, r: u64| {
            let [s1, s2, s3, m] = *x;
            let a = div(mul_mod(r, add_mod(s1, s2, p), p), s3, p);
            let b = div(
                mul_mod(add_mod(s1, s2, p), add_mod(add_mod(s1, s2, p), s3, p), p),
                mul_mod(r, mul_mod(s1, s2, p), p),
                p,
            );
            sub_mod(0, mul_mod(div(m, s4(x, p), p), add_mod(a, b, p), p), p)
        };
        for i in 0..4 {
            let s = sample(i);
            assert_eq!(specialize(&sum, &s).unwrap(), oracle(&s.point, s.p, u64::from(r)));
        }
    }
    assert!(t.elapsed().as_secs_f64() < 1.0, "symbolic part took {:?}", t.elapsed());
    for r in [2, 3] {
        assert_pass(&run(&VerificationTask::toric(Geometry::a_series(r), 3).with_threads(threads())));
    }
}

fn a3() {
    let orb = |r: u32, cutoff: u32, mode: Mode| {
        VerificationTask::new(TaskKind::OrbifoldIdentity, cutoff).with_r(r).with_mode(mode).with_threads(threads())
    };
    assert_pass(&run(&orb(2, 3, Mode::Exact)));
    let rep = run(&orb(2, 4, modp(5, 1)));
    assert_pass(&rep);
    assert!(rep.sample_points.as_ref().unwrap().len() >= 5);
    assert!(rep.prime.unwrap() > 1 << 61);
    assert_pass(&run(&orb(3, 3, modp(5, 2))));
    let lhs = lhs_orbifold(2, 1, &ExactRF).unwrap();
    let rhs = rhs_orbifold(2, 1, &ExactRF).unwrap();
    assert!(agrees(&coeff(&lhs, &[1, 0]), orbifold_q0));
    assert!(agrees(&coeff(&rhs, &[1, 0]), orbifold_q0));
}

fn exact_r2(kind: TaskKind) {
    assert_pass(&run(&VerificationTask::new(kind, 3).with_r(2).with_threads(threads())));
}

fn a7() {
    let task = |kind: TaskKind, cutoff: u32| VerificationTask::new(kind, cutoff).with_threads(threads());
    assert_pass(&run(&task(TaskKind::AxisCanonicity, 4)));
    for r in 2..=4 {
        assert_pass(&run(&task(TaskKind::ZrConsistency, 5).with_r(r)));
    }
    for r in [2, 3] {
        assert_pass(&run(&task(TaskKind::AltSign, 4).with_r(r)));
        assert_pass(&run(&task(TaskKind::Cpi, 5).with_r(r)));
    }
}

fn a8() {
    assert_eq!(count_up_to(6)[1..], [1, 4, 10, 26, 59, 140]);
    let oracle = brute_force(6);
    for (n, expected) in oracle.iter().enumerate() {
        let got: std::collections::BTreeSet<_> = enumerate(n).into_iter().collect();
        assert_eq!(&got, expected, "size {n}");
    }
    assert_pass(&run(&VerificationTask::new(TaskKind::PartitionCount, 6)));
}

fn a9() {
    // reports agree across thread counts
    let tasks = [
        VerificationTask::toric(Geometry::c4(), 3),
        VerificationTask::new(TaskKind::OrbifoldIdentity, 3).with_r(2),
        VerificationTask::new(TaskKind::OrbifoldIdentity, 3).with_r(2).with_mode(modp(3, 7)),
    ];
    for task in &tasks {
        let json: Vec<String> =
            [1, 2, 8].iter().map(|&t| run(&task.clone().with_threads(t)).without_volatile().to_json()).collect();
        assert!(json.windows(2).all(|w| w[0] == w[1]), "{}", task.kind);
    }

    // exact coefficients specialize to the modular ones
    let exact = lhs_orbifold(2, 3, &ExactRF).unwrap();
    for i in 0..3 {
        let s = sample(i);
        let reduced = lhs_orbifold(2, 3, &s).unwrap();
        for (e, c) in exact.terms() {
            assert_eq!(specialize(c, &s).unwrap(), reduced.coeff(e).copied().unwrap_or(0), "{e:?}");
        }
    }
    let both = |mode: Mode| run(&VerificationTask::new(TaskKind::OrbifoldIdentity, 2).with_r(2).with_mode(mode));
    assert_pass(&both(Mode::Exact));
    assert_pass(&both(modp(5, 3)));

    // r = 1 is C^4
    let orb = lhs_orbifold(1, 4, &ExactRF).unwrap();
    let toric = lhs_toric(&Geometry::c4(), 4, &ExactRF).unwrap();
    for d in 0..=4 {
        assert_eq!(coeff(&orb, &[d]), coeff(&toric, &[d]), "degree {d}");
    }
    assert_eq!(coeff(&rhs_orbifold(1, 4, &ExactRF).unwrap(), &[4]), coeff(&toric, &[4]));

    // a warm cache gives the same report from stored contributions
    let dir = tempfile::tempdir().unwrap();
    let cached = VerificationTask::toric(Geometry::c4(), 3).with_cache(dir.path().to_path_buf());
    let cold = run(&cached);
    let warm = run(&cached);
    assert_pass(&warm);
    assert_eq!(cold.without_volatile(), warm.without_volatile());
    let stats = warm.cache.unwrap();
    assert!(stats.hits > 0 && stats.misses == 0, "{stats:?}");
    assert_eq!(ContributionCache::open(dir.path()).unwrap().len() as u64, stats.hits);
}

fn main() -> ExitCode {
    let criteria: [(&str, &str, fn()); 9] = [
        ("A1", "C^4 identity to order 4, exact", a1),
        ("A2", "A_{r-1} x C^2 exponent and identity to order 3", a2),
        ("A3", "orbifold refined MacMahon identity", a3),
        ("A4", "dimension reduction, r = 2, order 3", || exact_r2(TaskKind::DimensionReduction)),
        ("A5", "divisibility by m and s1+s2, r = 2, order 3", || exact_r2(TaskKind::Divisibility)),
        ("A6", "simple pole in s3 of the log, r = 2, order 3", || exact_r2(TaskKind::PoleOrder)),
        ("A7", "sign rule and vertex consistency suites", a7),
        ("A8", "enumeration against brute force", a8),
        ("A9", "determinism, exact/modular agreement, r = 1, cache", a9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, what, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|x| x == id) {
            continue;
        }
        let t = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("{id} pass  {what} ({secs:.1}s)"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("{id} FAIL  {what} ({secs:.1}s): {msg}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
