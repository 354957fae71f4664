use super::*;
use crate::families;
use crate::enumerate::BlockCatalog;
use crate::relation::Shape;

fn value(relation: &Relation, eps: &Epsilon, kind: BoundKind, mode: PprtMode) -> Rational {
    let report = compute_bound(relation, eps, kind, mode, &Caps::default()).unwrap();
    let v = report.optimal().expect("feasible");
    assert!(v.duality_checked);
    let verdict = verify_dual_certificate(relation, eps, &v.certificate, &Caps::default()).unwrap();
    assert!(verdict.accepted, "{:?}", verdict.violations);
    assert_eq!(verdict.value, v.value);
    v.value.clone()
}

#[test]
fn xor_prt_shape_and_value() {
    let xor = families::xor1().unwrap();
    let program = build_prt(&xor, &Epsilon::zero(), &Caps::default()).unwrap();
    assert_eq!(program.lp.var_count(), 18);
    assert_eq!(program.lp.row_count(), 8);
    assert_eq!(value(&xor, &Epsilon::zero(), BoundKind::Prt, PprtMode::Reduced), Rational::from(4));
    assert_eq!(value(&xor, &Epsilon::zero(), BoundKind::Pprt, PprtMode::Reduced), Rational::from(4));
}

#[test]
fn and_and_constant_at_zero_error() {
    let and = families::and1().unwrap();
    for kind in [BoundKind::Prt, BoundKind::Pprt] {
        assert_eq!(value(&and, &Epsilon::zero(), kind, PprtMode::Reduced), Rational::from(3));
    }
    let c = families::constant_cc(3, 2).unwrap();
    assert_eq!(value(&c, &Epsilon::frac(1, 4), BoundKind::Prt, PprtMode::Reduced), Rational::one());
    let q = families::constant_query(3).unwrap();
    assert_eq!(value(&q, &Epsilon::frac(1, 4), BoundKind::Pprt, PprtMode::Reduced), Rational::one());
}

#[test]
fn query_parity_needs_full_assignments() {
    // Every block must be a single point, weight 2^n each.
    let p = families::parity(2).unwrap();
    assert_eq!(value(&p, &Epsilon::zero(), BoundKind::Prt, PprtMode::Reduced), Rational::from(16));
    let d = families::dictator(2).unwrap();
    assert_eq!(value(&d, &Epsilon::zero(), BoundKind::Pprt, PprtMode::Reduced), Rational::from(4));
}

#[test]
fn error_lowers_xor() {
    // Scaling the exact partition by 1 − ε and putting the rest on one
    // wrongly labeled full rectangle is optimal for XOR.
    let xor = families::xor1().unwrap();
    let eps = Epsilon::frac(1, 4);
    let prt = value(&xor, &eps, BoundKind::Prt, PprtMode::Reduced);
    let pprt = value(&xor, &eps, BoundKind::Pprt, PprtMode::Reduced);
    assert!(prt <= pprt);
    assert!(pprt < Rational::from(4));
    assert!(prt >= Rational::one());
}

#[test]
fn direct_matches_reduced() {
    let eps = Epsilon::frac(1, 8);
    let relations = [
        families::xor1().unwrap(),
        families::and1().unwrap(),
        families::slack_diagonal(2).unwrap(),
        families::random_relation(Shape::Cc { x_size: 2, y_size: 2 }, 3, 2, 7).unwrap(),
        families::majority(2).unwrap(),
    ];
    for r in &relations {
        let reduced = value(r, &eps, BoundKind::Pprt, PprtMode::Reduced);
        let direct = value(r, &eps, BoundKind::Pprt, PprtMode::Direct);
        assert_eq!(reduced, direct);
    }
}

#[test]
fn empty_accept_set_is_infeasible() {
    let r = Relation::new(Shape::Cc { x_size: 1, y_size: 2 }, vec!["a".into()], vec![vec![0], vec![]]).unwrap();
    let report = compute_bound(&r, &Epsilon::frac(1, 8), BoundKind::Prt, PprtMode::Reduced, &Caps::default()).unwrap();
    match report.result {
        BoundResult::Infeasible { reason } => assert!(reason.contains("(0,1)"), "{reason}"),
        other => panic!("expected infeasible, got {other:?}"),
    }
}

#[test]
fn tampered_certificates_are_rejected() {
    let xor = families::xor1().unwrap();
    let eps = Epsilon::frac(1, 8);
    for kind in [BoundKind::Prt, BoundKind::Pprt] {
        let report = compute_bound(&xor, &eps, kind, PprtMode::Reduced, &Caps::default()).unwrap();
        let mut cert = report.optimal().unwrap().certificate.clone();
        cert.phi[0] += Rational::one();
        let verdict = verify_dual_certificate(&xor, &eps, &cert, &Caps::default()).unwrap();
        assert!(!verdict.accepted);
        assert!(verdict.violations.iter().any(|v| v.starts_with("block ")));
    }
    let report = compute_bound(&xor, &eps, BoundKind::Pprt, PprtMode::Reduced, &Caps::default()).unwrap();
    let mut cert = report.optimal().unwrap().certificate.clone();
    *cert.lambda.as_mut().unwrap() += Rational::one();
    let verdict = verify_dual_certificate(&xor, &eps, &cert, &Caps::default()).unwrap();
    assert!(verdict.violations.iter().any(|v| v.starts_with("partition ")));
    assert!(verify_dual_certificate(&xor, &Epsilon::frac(1, 4), &cert, &Caps::default()).is_err());
}

#[test]
fn separation_finds_cheapest_partition() {
    let shape = Shape::Cc { x_size: 2, y_size: 2 };
    let catalog = BlockCatalog::new(shape, &Caps::default()).unwrap();
    // Singletons cost 1, everything else 10: best is four singletons.
    let v: Vec<Rational> = catalog
        .blocks()
        .iter()
        .flat_map(|b| {
            let w = if b.input_mask(shape).count_ones() == 1 { 1 } else { 10 };
            [Rational::from(w), Rational::from(w + 1)]
        })
        .collect();
    let (min, p) = min_weight_partition(&catalog, 2, &v).unwrap();
    assert_eq!(min, Rational::from(4));
    assert_eq!(p.block_count(), 4);
    assert!(p.blocks.iter().all(|b| b.z == 0));
}

#[test]
fn epsilon_parsing() {
    assert_eq!("1/8".parse::<Epsilon>().unwrap(), Epsilon::frac(1, 8));
    assert!("1".parse::<Epsilon>().is_err());
    assert!("-1/8".parse::<Epsilon>().is_err());
    assert!("0.1".parse::<Epsilon>().is_err());
}

#[test]
fn pprt_respects_caps() {
    let r = families::equality(4).unwrap();
    let err = compute_bound(&r, &Epsilon::frac(1, 8), BoundKind::Pprt, PprtMode::Reduced, &Caps::default()).unwrap_err();
    assert!(matches!(err, Error::CapExceeded { .. }));
}

#[test]
fn separation_with_constant_weights() {
    let shape = Shape::Cc { x_size: 2, y_size: 3 };
    let catalog = BlockCatalog::new(shape, &Caps::default()).unwrap();
    let fill = |x: i64| vec![Rational::from(x); catalog.len() * 2];
    assert_eq!(min_weight_partition(&catalog, 2, &fill(0)).unwrap().0, Rational::zero());
    let (min, p) = min_weight_partition(&catalog, 2, &fill(1)).unwrap();
    assert_eq!(min, Rational::one());
    assert_eq!(p.block_count(), 1);
    let (min, p) = min_weight_partition(&catalog, 2, &fill(-1)).unwrap();
    assert_eq!(min, Rational::from(-6));
    assert_eq!(p.block_count(), 6);
}

fn zero_certificate(relation: &Relation, kind: BoundKind) -> DualCertificate {
    let inputs = relation.input_count();
    let blocks = partition_catalog(relation, &Caps::default()).unwrap().len() * relation.output_count();
    DualCertificate {
        kind,
        side: relation.side(),
        eps: Epsilon::zero(),
        mu: vec![Rational::zero(); inputs],
        phi: vec![Rational::zero(); inputs],
        v: (kind == BoundKind::Pprt).then(|| vec![Rational::zero(); blocks]),
        lambda: (kind == BoundKind::Pprt).then(Rational::zero),
    }
}

#[test]
fn zero_certificate_is_accepted_with_value_zero() {
    for r in [families::xor1().unwrap(), families::parity(2).unwrap()] {
        for kind in [BoundKind::Prt, BoundKind::Pprt] {
            let verdict = verify_dual_certificate(&r, &Epsilon::zero(), &zero_certificate(&r, kind), &Caps::default()).unwrap();
            assert!(verdict.accepted);
            assert_eq!(verdict.value, Rational::zero());
        }
    }
}

#[test]
fn single_phi_on_constant_relation() {
    let r = families::constant_cc(2, 2).unwrap();
    let mut cert = zero_certificate(&r, BoundKind::Pprt);
    cert.phi[3] = Rational::one();
    let verdict = verify_dual_certificate(&r, &Epsilon::zero(), &cert, &Caps::default()).unwrap();
    assert!(verdict.accepted, "{:?}", verdict.violations);
    assert_eq!(verdict.value, Rational::one());
}

#[test]
fn raised_v_names_the_block() {
    let r = families::and1().unwrap();
    let eps = Epsilon::frac(1, 8);
    let report = compute_bound(&r, &eps, BoundKind::Pprt, PprtMode::Reduced, &Caps::default()).unwrap();
    let mut cert = report.optimal().unwrap().certificate.clone();
    let catalog = partition_catalog(&r, &Caps::default()).unwrap();
    // Reduced certificates are tight on every block, so any raise breaks one.
    cert.v.as_mut().unwrap()[2 * 2 + 1] += Rational::one();
    let verdict = verify_dual_certificate(&r, &eps, &cert, &Caps::default()).unwrap();
    assert!(!verdict.accepted);
    let key = LabeledBlock { z: 1, block: catalog.block(2) }.key(r.shape());
    assert!(verdict.violations.iter().any(|v| v.starts_with(&format!("block {key}:"))), "{:?}", verdict.violations);
}
