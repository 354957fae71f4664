//! Property tests over seeded random relations.

use pbl_core::bounds::{compute_bound, verify_dual_certificate, BoundKind, Epsilon, PprtMode};
use pbl_core::families::random_relation;
use pbl_core::oracles::{det_cc, det_query};
use pbl_core::synth::{evaluate_protocol, run_synth};
use pbl_core::{Caps, Rational, Relation, Shape};
use proptest::prelude::*;

fn value(r: &Relation, eps: &Epsilon, kind: BoundKind) -> Rational {
    compute_bound(r, eps, kind, PprtMode::Reduced, &Caps::default()).unwrap().value().cloned().unwrap()
}

fn small_shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Cc { x_size: 2, y_size: 2 }),
        Just(Shape::Cc { x_size: 2, y_size: 3 }),
        Just(Shape::Cc { x_size: 3, y_size: 2 }),
        Just(Shape::Cc { x_size: 1, y_size: 4 }),
        Just(Shape::Query { n: 1 }),
        Just(Shape::Query { n: 2 }),
    ]
}

fn eps_pair() -> impl Strategy<Value = (Epsilon, Epsilon)> {
    (0i64..6, 0i64..6).prop_map(|(a, b)| {
        let (lo, hi) = (a.min(b), a.max(b));
        (Epsilon::frac(lo, 12), Epsilon::frac(hi, 12))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bounds_shrink_as_error_grows(shape in small_shape(), outputs in 2usize..4, seed in any::<u64>(), (lo, hi) in eps_pair()) {
        let r = random_relation(shape, outputs, 3, seed).unwrap();
        for kind in [BoundKind::Prt, BoundKind::Pprt] {
            prop_assert!(value(&r, &hi, kind) <= value(&r, &lo, kind));
        }
    }

    #[test]
    fn pprt_dominates_prt_and_is_at_least_one(shape in small_shape(), seed in any::<u64>(), (eps, _) in eps_pair()) {
        let r = random_relation(shape, 2, 3, seed).unwrap();
        let prt = value(&r, &eps, BoundKind::Prt);
        let pprt = value(&r, &eps, BoundKind::Pprt);
        prop_assert!(prt <= pprt);
        prop_assert!(pprt >= Rational::one());
    }

    #[test]
    fn extracted_certificates_verify_exactly(shape in small_shape(), seed in any::<u64>(), (eps, _) in eps_pair(), direct in any::<bool>()) {
        let r = random_relation(shape, 2, 2, seed).unwrap();
        let caps = Caps::default();
        let mode = if direct { PprtMode::Direct } else { PprtMode::Reduced };
        for kind in [BoundKind::Prt, BoundKind::Pprt] {
            let report = compute_bound(&r, &eps, kind, mode, &caps).unwrap();
            let v = report.optimal().unwrap();
            prop_assert!(v.duality_checked);
            let verdict = verify_dual_certificate(&r, &eps, &v.certificate, &caps).unwrap();
            prop_assert!(verdict.accepted);
            prop_assert_eq!(&verdict.value, &v.value);
        }
    }

    #[test]
    fn deterministic_complexity_sandwiches_pprt(shape in small_shape(), seed in any::<u64>(), (eps, _) in eps_pair()) {
        let r = random_relation(shape, 3, 2, seed).unwrap();
        let caps = Caps::default();
        let pprt = value(&r, &eps, BoundKind::Pprt);
        match shape {
            Shape::Cc { .. } => {
                let d = det_cc(&r, &caps).unwrap();
                prop_assert!(pprt <= Rational::pow2(d.value as i64));
                let p = d.witness.to_partition(shape).unwrap();
                prop_assert!(p.block_count() <= 1 << d.value);
            }
            Shape::Query { .. } => {
                let d = det_query(&r, &caps).unwrap();
                prop_assert!(pprt <= Rational::pow2(2 * d.value as i64));
            }
        }
    }

    #[test]
    fn synthesized_protocols_meet_their_guarantees(shape in small_shape(), seed in any::<u64>(), k in 1i64..4) {
        let r = random_relation(shape, 2, 3, seed).unwrap();
        let eps = Epsilon::frac(k, 8);
        let report = run_synth(&r, &eps, &Caps::default()).unwrap();
        prop_assert!(report.delta_within_eps());
        prop_assert!(report.error_within_twice_eps());
        prop_assert!(report.within_budget());
        prop_assert_eq!(evaluate_protocol(&report.protocol, &r).unwrap(), report.evaluation);
    }

    #[test]
    fn relation_documents_round_trip(shape in small_shape(), outputs in 1usize..4, seed in any::<u64>()) {
        let r = random_relation(shape, outputs, 2, seed).unwrap();
        let back = Relation::from_json_str(&r.to_json().to_string()).unwrap();
        prop_assert_eq!(back, r);
    }
}
