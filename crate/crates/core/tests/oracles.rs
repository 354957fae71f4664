//! Oracle cross-checks over every 2x2 relation with two outputs.

use pbl_core::bounds::{compute_bound, BoundKind, Epsilon, PprtMode};
use pbl_core::oracles::{crosscheck_pprt, det_cc};
use pbl_core::suite::relation_2x2;
use pbl_core::{Caps, Rational};

#[test]
fn crosscheck_every_2x2_relation() {
    let caps = Caps::default();
    for code in 0..=255u8 {
        let r = relation_2x2(code).unwrap();
        for eps in [Epsilon::zero(), Epsilon::frac(1, 8)] {
            let c = crosscheck_pprt(&r, &eps, &caps).unwrap();
            assert!(c.pass(), "relation {code:#04x} at {eps}: {:?}", c.discrepancies);
            assert_eq!(c.reduced.is_none(), !r.empty_inputs().is_empty());
        }
    }
}

#[test]
fn deterministic_protocols_bound_pprt_from_above() {
    let caps = Caps::default();
    for code in 0..=255u8 {
        let r = relation_2x2(code).unwrap();
        if !r.empty_inputs().is_empty() {
            assert!(det_cc(&r, &caps).is_err());
            continue;
        }
        let d = det_cc(&r, &caps).unwrap();
        let p = d.witness.to_partition(r.shape()).unwrap();
        assert!(p.block_count() <= 1 << d.value);
        for i in 0..r.input_count() {
            assert!(r.accepts(i, p.block_at(r.shape(), i).unwrap().z));
        }
        for eps in [Epsilon::zero(), Epsilon::frac(1, 8), Epsilon::frac(1, 4)] {
            let v = compute_bound(&r, &eps, BoundKind::Pprt, PprtMode::Reduced, &caps).unwrap();
            assert!(*v.value().unwrap() <= Rational::pow2(d.value as i64), "relation {code:#04x}");
        }
    }
}
