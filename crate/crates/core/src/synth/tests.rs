use super::*;
use crate::families;
use crate::relation::{Block, LabeledBlock, Rectangle};

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

fn full_grid(z: usize) -> LabeledPartition {
    let shape = Shape::Cc { x_size: 2, y_size: 2 };
    LabeledPartition::new(shape, vec![LabeledBlock { z, block: Block::Rect(Rectangle::new(3, 3)) }]).unwrap()
}

#[test]
fn cheap_support_is_untouched() {
    let probs = [r(3, 4), r(1, 4)];
    let costs = [Rational::from(2), Rational::from(4)];
    let value = r(5, 2);
    let cut = truncation_cut(&probs, &costs, &value, &Epsilon::frac(1, 4), Side::Cc).unwrap();
    assert_eq!(cut.threshold, Some(Rational::from(10)));
    assert_eq!(cut.keep, [true, true]);
    assert!(cut.delta.is_zero());
    assert_eq!(cut.scale, Rational::one());
}

#[test]
fn heavy_tail_is_dropped() {
    let probs = [r(99, 100), r(1, 100)];
    let costs = [Rational::from(2), Rational::from(1000)];
    let value = r(1198, 100);
    let cut = truncation_cut(&probs, &costs, &value, &Epsilon::frac(1, 4), Side::Cc).unwrap();
    assert_eq!(cut.threshold, Some(r(4792, 100)));
    assert_eq!(cut.keep, [true, false]);
    assert_eq!(cut.delta, r(1, 100));
    assert_eq!(&probs[0] * &cut.scale, Rational::one());
}

#[test]
fn cc_threshold_is_inclusive_query_is_strict() {
    let probs = [r(1, 2), r(1, 2)];
    let costs = [Rational::from(2), Rational::from(4)];
    let value = Rational::from(1);
    let eps = Epsilon::frac(1, 4);
    assert_eq!(truncation_cut(&probs, &costs, &value, &eps, Side::Cc).unwrap().keep, [true, false]);
    assert_eq!(truncation_cut(&probs, &costs, &value, &eps, Side::Query).unwrap().keep, [true, true]);
    let all = truncation_cut(&[Rational::one()], &[Rational::from(9)], &value, &eps, Side::Cc);
    assert!(matches!(all, Err(Error::AllMassDropped)));
}

#[test]
fn xor_exact_witness_is_correct_everywhere() {
    let xor = families::xor1().unwrap();
    let report = run_synth(&xor, &Epsilon::zero(), &Caps::default()).unwrap();
    assert_eq!(report.value(), &Rational::from(4));
    assert!(report.evaluation.worst_error.is_zero());
    assert!(report.evaluation.cost <= 4);
    assert_eq!(report.budget, None);
}

#[test]
fn constant_mixture_errs_half_the_time() {
    let xor = families::xor1().unwrap();
    let p = assemble_randomized(vec![(r(1, 2), full_grid(0)), (r(1, 2), full_grid(1))], xor.shape()).unwrap();
    let e = evaluate_protocol(&p, &xor).unwrap();
    assert_eq!(e.worst_error, r(1, 2));
    assert_eq!(e.cost, 0);
    assert!(e.correctness.iter().all(|c| *c == r(1, 2)));
}

#[test]
fn assembly_rejects_bad_distributions() {
    let shape = Shape::Cc { x_size: 2, y_size: 2 };
    assert!(assemble_randomized(vec![(r(1, 2), full_grid(0))], shape).is_err());
    assert!(assemble_randomized(vec![(Rational::zero(), full_grid(0)), (Rational::one(), full_grid(1))], shape).is_err());
}

#[test]
fn side_mismatch_is_reported() {
    let p = assemble_randomized(vec![(Rational::one(), full_grid(0))], Shape::Cc { x_size: 2, y_size: 2 }).unwrap();
    let q = families::parity(2).unwrap();
    assert!(matches!(evaluate_protocol(&p, &q), Err(Error::SideMismatch { .. })));
}

#[test]
fn pipeline_keeps_its_guarantees() {
    let relations = [
        families::equality(3).unwrap(),
        families::greater_than(3).unwrap(),
        families::slack_diagonal(3).unwrap(),
        families::parity(3).unwrap(),
        families::majority(3).unwrap(),
        families::or(2).unwrap(),
    ];
    for rel in &relations {
        for eps in [Epsilon::frac(1, 8), Epsilon::frac(1, 4)] {
            let s = run_synth(rel, &eps, &Caps::default()).unwrap();
            assert!(s.delta_within_eps(), "delta {} at eps {eps}", s.truncation.delta);
            assert!(s.error_within_twice_eps(), "error {} at eps {eps}", s.evaluation.worst_error);
            assert!(s.within_budget());
            s.protocol.validate().unwrap();
        }
    }
}

#[test]
fn sampling_is_seeded_and_follows_the_support() {
    let xor = families::xor1().unwrap();
    let p = assemble_randomized(vec![(r(1, 4), full_grid(0)), (r(3, 4), full_grid(1))], xor.shape()).unwrap();
    let a = p.sample_indices(7, 4000);
    assert_eq!(a, p.sample_indices(7, 4000));
    let ones = a.iter().filter(|&&k| k == 1).count();
    assert!((2800..3200).contains(&ones), "{ones}");
    assert_eq!(p.run(0, 7), p.support[a[0]].tree.eval(xor.shape(), 0));
}

#[test]
fn infeasible_relations_are_refused() {
    let rel = crate::relation::Relation::new(Shape::Query { n: 1 }, vec!["a".into()], vec![vec![0], vec![]]).unwrap();
    assert!(matches!(run_synth(&rel, &Epsilon::frac(1, 8), &Caps::default()), Err(Error::Infeasible(_))));
}
