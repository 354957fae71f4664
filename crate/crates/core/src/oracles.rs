//! Brute-force references, independent of the LP code: deterministic
//! communication and query complexity with optimal witnesses, and the
//! cheapest everywhere-correct labeled partition.

use std::collections::HashMap;

use crate::bounds::{compute_bound, BoundKind, Epsilon, PprtMode};
use crate::caps::Caps;
use crate::enumerate::BlockCatalog;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relation::{Assignment, LabeledBlock, LabeledPartition, Relation, Shape};
use crate::synth::{DecisionTree, ProtocolTree, Speaker, Tree};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Measure {
    /// Deterministic communication complexity.
    Dcc,
    /// Deterministic query complexity.
    Dq,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Dcc => "dcc",
            Measure::Dq => "dq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityValue {
    pub measure: Measure,
    pub value: usize,
    /// An everywhere-correct tree of depth `value`.
    pub witness: Tree,
}

fn lowest(mask: u64) -> usize {
    mask.trailing_zeros() as usize
}

struct DetCc<'a> {
    relation: &'a Relation,
    x_size: usize,
    y_size: usize,
    /// (rows, cols) -> (depth, split): split is `None` for a leaf, else the
    /// speaker and the part of their set sent as 0.
    memo: HashMap<(u32, u32), (usize, Option<(Speaker, u32)>)>,
}

impl DetCc<'_> {
    fn common(&self, rows: u32, cols: u32) -> u64 {
        let mut m = u64::MAX;
        for x in (0..self.x_size).filter(|x| rows >> x & 1 == 1) {
            for y in (0..self.y_size).filter(|y| cols >> y & 1 == 1) {
                m &= self.relation.accept_mask(x * self.y_size + y);
            }
        }
        m
    }

    fn solve(&mut self, rows: u32, cols: u32) -> usize {
        if let Some(&(d, _)) = self.memo.get(&(rows, cols)) {
            return d;
        }
        let mut best = (usize::MAX, None);
        if self.common(rows, cols) != 0 {
            best = (0, None);
        } else {
            for (speaker, set) in [(Speaker::Alice, rows), (Speaker::Bob, cols)] {
                // Parts containing the lowest element, so each split is seen once.
                let low = set & set.wrapping_neg();
                let rest = set & !low;
                let mut sub = rest;
                loop {
                    let part = sub | low;
                    if part != set {
                        let other = set & !part;
                        let (a, b) = match speaker {
                            Speaker::Alice => (self.solve(part, cols), self.solve(other, cols)),
                            Speaker::Bob => (self.solve(rows, part), self.solve(rows, other)),
                        };
                        let d = 1 + a.max(b);
                        if d < best.0 {
                            best = (d, Some((speaker, part)));
                        }
                    }
                    if sub == 0 {
                        break;
                    }
                    sub = (sub - 1) & rest;
                }
            }
        }
        self.memo.insert((rows, cols), best);
        best.0
    }

    fn tree(&mut self, rows: u32, cols: u32) -> ProtocolTree {
        self.solve(rows, cols);
        match self.memo[&(rows, cols)].1 {
            None => ProtocolTree::Leaf { out: lowest(self.common(rows, cols)) },
            Some((speaker, part)) => {
                let (set, size) = match speaker {
                    Speaker::Alice => (rows, self.x_size),
                    Speaker::Bob => (cols, self.y_size),
                };
                let other = set & !part;
                let send = (0..size).map(|i| (other >> i & 1) as u8).collect();
                let (on0, on1) = match speaker {
                    Speaker::Alice => (self.tree(part, cols), self.tree(other, cols)),
                    Speaker::Bob => (self.tree(rows, part), self.tree(rows, other)),
                };
                ProtocolTree::Node { speaker, send, on0: Box::new(on0), on1: Box::new(on1) }
            }
        }
    }
}

fn require_total(relation: &Relation) -> Result<()> {
    match relation.empty_inputs().first() {
        Some(&i) => Err(Error::Infeasible(format!(
            "no output is acceptable at input {}, so no correct protocol exists",
            relation.shape().input_name(i)
        ))),
        None => Ok(()),
    }
}

/// Deterministic communication complexity by recursion over subrectangles.
pub fn det_cc(relation: &Relation, caps: &Caps) -> Result<ComplexityValue> {
    let Shape::Cc { x_size, y_size } = relation.shape() else {
        return Err(Error::SideMismatch { expected: "cc", found: "query" });
    };
    caps.check("grid side for the deterministic oracle", x_size.max(y_size) as u128, caps.det_cc_side as u128)?;
    require_total(relation)?;
    let mut oracle = DetCc { relation, x_size, y_size, memo: HashMap::new() };
    let (rows, cols) = ((1u32 << x_size) - 1, (1u32 << y_size) - 1);
    let value = oracle.solve(rows, cols);
    let witness = Tree::Cc(oracle.tree(rows, cols));
    Ok(ComplexityValue { measure: Measure::Dcc, value, witness })
}

struct DetQuery<'a> {
    relation: &'a Relation,
    n: usize,
    /// Assignment -> (outputs accepted everywhere on it, depth, best variable).
    memo: HashMap<Assignment, (u64, usize, Option<usize>)>,
}

impl DetQuery<'_> {
    fn solve(&mut self, a: Assignment) -> (u64, usize) {
        if let Some(&(c, d, _)) = self.memo.get(&a) {
            return (c, d);
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| a.get(i).is_none()).collect();
        let entry = if free.is_empty() {
            (self.relation.accept_mask(a.values as usize), 0, None)
        } else {
            let mut common = None;
            let mut best = (usize::MAX, None);
            for &i in &free {
                let (c0, d0) = self.solve(a.with(i, false));
                let (c1, d1) = self.solve(a.with(i, true));
                common.get_or_insert(c0 & c1);
                let d = 1 + d0.max(d1);
                if d < best.0 {
                    best = (d, Some(i));
                }
            }
            let common = common.expect("some free variable");
            if common != 0 {
                (common, 0, None)
            } else {
                (common, best.0, best.1)
            }
        };
        self.memo.insert(a, entry);
        (entry.0, entry.1)
    }

    fn tree(&mut self, a: Assignment) -> DecisionTree {
        self.solve(a);
        let (common, _, var) = self.memo[&a];
        match var {
            None => DecisionTree::Leaf { out: lowest(common) },
            Some(i) => DecisionTree::Query {
                var: i,
                on0: Box::new(self.tree(a.with(i, false))),
                on1: Box::new(self.tree(a.with(i, true))),
            },
        }
    }
}

/// Deterministic query complexity by recursion over partial assignments.
pub fn det_query(relation: &Relation, caps: &Caps) -> Result<ComplexityValue> {
    let Shape::Query { n } = relation.shape() else {
        return Err(Error::SideMismatch { expected: "query", found: "cc" });
    };
    caps.check("variable count for the deterministic oracle", n as u128, caps.det_query_n as u128)?;
    require_total(relation)?;
    let mut oracle = DetQuery { relation, n, memo: HashMap::new() };
    let (_, value) = oracle.solve(Assignment::EMPTY);
    let witness = Tree::Query(oracle.tree(Assignment::EMPTY));
    Ok(ComplexityValue { measure: Measure::Dq, value, witness })
}

/// Cheapest everywhere-correct labeled partition, costing `n_P` (cc) or
/// `Σ 2^|A|` (query). `None` when some input accepts nothing.
pub fn min_correct_partition(relation: &Relation, caps: &Caps) -> Result<Option<(Rational, LabeledPartition)>> {
    let catalog = BlockCatalog::new(relation.shape(), caps)?;
    if !relation.empty_inputs().is_empty() {
        return Ok(None);
    }
    let shape = relation.shape();
    // Per block, the lowest label accepted on all of it.
    let label: Vec<Option<usize>> = (0..catalog.len())
        .map(|b| {
            let mask = catalog.mask(b);
            let common = (0..shape.input_count())
                .filter(|i| mask >> i & 1 == 1)
                .fold(u64::MAX, |m, i| m & relation.accept_mask(i));
            (common != 0).then(|| lowest(common))
        })
        .collect();
    let mut memo: HashMap<u64, Option<(Rational, usize)>> = HashMap::new();
    fn go(
        catalog: &BlockCatalog,
        label: &[Option<usize>],
        uncovered: u64,
        memo: &mut HashMap<u64, Option<(Rational, usize)>>,
    ) -> Option<Rational> {
        if uncovered == 0 {
            return Some(Rational::zero());
        }
        if let Some(v) = memo.get(&uncovered) {
            return v.as_ref().map(|(c, _)| c.clone());
        }
        let mut best: Option<(Rational, usize)> = None;
        for &b in catalog.containing(lowest(uncovered)) {
            let m = catalog.mask(b);
            if label[b].is_none() || m & !uncovered != 0 {
                continue;
            }
            if let Some(rest) = go(catalog, label, uncovered & !m, memo) {
                let c = rest + catalog.block(b).weight();
                if best.as_ref().is_none_or(|(cur, _)| c < *cur) {
                    best = Some((c, b));
                }
            }
        }
        memo.insert(uncovered, best.clone());
        best.map(|(c, _)| c)
    }
    let full = shape.full_mask();
    let Some(cost) = go(&catalog, &label, full, &mut memo) else {
        return Ok(None);
    };
    let mut blocks = Vec::new();
    let mut uncovered = full;
    while uncovered != 0 {
        let b = memo[&uncovered].as_ref().expect("solved state").1;
        blocks.push(LabeledBlock { z: label[b].expect("monochromatic"), block: catalog.block(b) });
        uncovered &= !catalog.mask(b);
    }
    Ok(Some((cost, LabeledPartition::new(shape, blocks)?)))
}

#[derive(Debug, Clone)]
pub struct CrossCheck {
    pub reduced: Option<Rational>,
    pub direct: Option<Rational>,
    /// Exhaustive minimum, computed at `ε = 0` only.
    pub exhaustive: Option<Rational>,
    pub discrepancies: Vec<String>,
}

impl CrossCheck {
    pub fn pass(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Compares both pprt formulations and, at `ε = 0`, the exhaustive minimum.
pub fn crosscheck_pprt(relation: &Relation, eps: &Epsilon, caps: &Caps) -> Result<CrossCheck> {
    let reduced = compute_bound(relation, eps, BoundKind::Pprt, PprtMode::Reduced, caps)?.value().cloned();
    let direct = compute_bound(relation, eps, BoundKind::Pprt, PprtMode::Direct, caps)?.value().cloned();
    let mut discrepancies = Vec::new();
    let show = |v: &Option<Rational>| v.as_ref().map_or("infeasible".to_string(), |r| r.to_string());
    if reduced != direct {
        discrepancies.push(format!("reduced {} != direct {}", show(&reduced), show(&direct)));
    }
    let exhaustive = if eps.value().is_zero() {
        let e = min_correct_partition(relation, caps)?.map(|(c, _)| c);
        if e != reduced {
            discrepancies.push(format!("exhaustive {} != reduced {}", show(&e), show(&reduced)));
        }
        e
    } else {
        None
    };
    Ok(CrossCheck { reduced, direct, exhaustive, discrepancies })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families;

    fn check_witness(relation: &Relation, v: &ComplexityValue) {
        assert_eq!(v.witness.depth(), v.value);
        for i in 0..relation.input_count() {
            assert!(relation.accepts(i, v.witness.eval(relation.shape(), i)));
        }
    }

    #[test]
    fn det_cc_values() {
        let caps = Caps::default();
        for (r, want) in [
            (families::constant_cc(3, 3).unwrap(), 0),
            (families::and1().unwrap(), 2),
            (families::xor1().unwrap(), 2),
            (families::equality(4).unwrap(), 3),
            (families::slack_diagonal(3).unwrap(), 0),
        ] {
            let v = det_cc(&r, &caps).unwrap();
            assert_eq!(v.value, want);
            check_witness(&r, &v);
            let p = v.witness.to_partition(r.shape()).unwrap();
            assert!(p.block_count() <= 1 << v.value);
        }
    }

    #[test]
    fn det_query_values() {
        let caps = Caps::default();
        for (r, want) in [
            (families::constant_query(3).unwrap(), 0),
            (families::parity(2).unwrap(), 2),
            (families::or(2).unwrap(), 2),
            (families::dictator(4).unwrap(), 1),
            (families::majority(3).unwrap(), 3),
        ] {
            let v = det_query(&r, &caps).unwrap();
            assert_eq!(v.value, want);
            check_witness(&r, &v);
        }
    }

    #[test]
    fn oracle_caps_apply() {
        let r = families::equality(5).unwrap();
        assert!(matches!(det_cc(&r, &Caps::default()), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn cheapest_correct_partitions() {
        let caps = Caps::default();
        let min = |r: &Relation| min_correct_partition(r, &caps).unwrap().unwrap().0;
        assert_eq!(min(&families::xor1().unwrap()), Rational::from(4));
        assert_eq!(min(&families::and1().unwrap()), Rational::from(3));
        assert_eq!(min(&families::constant_cc(2, 3).unwrap()), Rational::one());
        assert_eq!(min(&families::parity(1).unwrap()), Rational::from(4));
        assert_eq!(min(&families::parity(2).unwrap()), Rational::from(16));
    }

    #[test]
    fn crosscheck_on_small_relations() {
        let caps = Caps::default();
        let c = crosscheck_pprt(&families::xor1().unwrap(), &Epsilon::zero(), &caps).unwrap();
        assert!(c.pass(), "{:?}", c.discrepancies);
        assert_eq!(c.reduced, Some(Rational::from(4)));
        let c = crosscheck_pprt(&families::constant_cc(2, 2).unwrap(), &Epsilon::zero(), &caps).unwrap();
        assert!(c.pass());
        assert_eq!(c.exhaustive, Some(Rational::one()));
    }
}
