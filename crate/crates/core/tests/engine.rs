use dt4_core::algebra::modp::prime_below_2_62;
use dt4_core::algebra::{ExactRF, FactoredRational};
use dt4_core::engine::{lhs_orbifold, lhs_toric, run, Mode, ModpConfig, Status, TaskKind, VerificationTask};
use dt4_core::series::{orbifold_vars, rhs_orbifold};
use dt4_core::vertex::Geometry;

#[test]
fn cutoff_zero_is_one() {
    let s = lhs_orbifold(3, 0, &ExactRF).unwrap();
    assert_eq!(s.num_terms(), 1);
    assert_eq!(s.coeff(&[0, 0, 0]), Some(&FactoredRational::one()));
    assert_eq!(lhs_toric(&Geometry::c4(), 0, &ExactRF).unwrap().coeff(&[0]), Some(&FactoredRational::one()));
}

#[test]
fn lone_nonzero_color_has_no_partitions() {
    // every nonempty partition has a box of color 0
    let s = lhs_orbifold(2, 2, &ExactRF).unwrap();
    assert!(s.coeff(&[0, 1]).is_none_or(|c| c.is_zero()));
    assert!(s.coeff(&[0, 2]).is_none_or(|c| c.is_zero()));
    let r = rhs_orbifold(2, 2, &ExactRF).unwrap();
    assert!(r.coeff(&[0, 1]).is_none_or(|c| c.is_zero()));
    assert_eq!(s.vars(), orbifold_vars(2).as_slice());
}

#[test]
fn exact_pass_implies_modp_pass() {
    let base = VerificationTask::new(TaskKind::OrbifoldIdentity, 2).with_r(2).with_threads(2);
    let exact = run(&base);
    assert_eq!(exact.status, Status::Pass);
    for seed in 0..3 {
        let modp = run(&base.clone().with_mode(Mode::Modp(ModpConfig::new(prime_below_2_62(2), 2, seed))));
        assert_eq!(modp.status, Status::Pass, "seed {seed}");
        assert!(modp.failure_bound.unwrap() < 1e-30);
    }
}

#[test]
fn invalid_tasks_report_errors() {
    let rep = run(&VerificationTask::new(TaskKind::OrbifoldIdentity, 2));
    assert_eq!(rep.status, Status::Error);
    let rep = run(&VerificationTask::new(TaskKind::Divisibility, 2).with_r(2).with_mode(Mode::Modp(ModpConfig::new(
        prime_below_2_62(0),
        1,
        0,
    ))));
    assert_eq!(rep.status, Status::Error);
    let rep = run(&VerificationTask::toric(Geometry::orbifold(2), 1));
    assert_eq!(rep.status, Status::Error);
}

#[test]
fn report_json_roundtrips() {
    let rep = run(&VerificationTask::toric(Geometry::a_series(2), 2));
    assert_eq!(rep.status, Status::Pass);
    let back: dt4_core::engine::Report = serde_json::from_str(&rep.to_json()).unwrap();
    assert_eq!(back.without_volatile(), rep.without_volatile());
}
