//! Decision trees for subcube partitions.
//!
//! Keep the blocks consistent with the answers so far. While more than one
//! remains, take the first of them and query every variable it fixes that is
//! still unknown. Any two blocks of a partition disagree on some variable
//! they both fix, so each round either lands in its block or fixes a further
//! variable of the true block; with assignments of size at most `m` this
//! takes at most `m` rounds of at most `m` queries.

use crate::error::{Error, Result};
use crate::relation::{Assignment, Block, LabeledPartition, Shape};

use super::tree::DecisionTree;

/// `m²` for largest assignment size `m`.
pub fn query_budget(max_assignment: usize) -> usize {
    max_assignment * max_assignment
}

fn grow(blocks: &[(Assignment, usize)], known: Assignment, pending: &[usize]) -> Result<DecisionTree> {
    let mut live = blocks.iter().filter(|(a, _)| a.compatible(&known));
    let first = *live.next().ok_or_else(|| Error::PartitionInvariant("no block is consistent with the answers".into()))?;
    if live.next().is_none() {
        return Ok(DecisionTree::Leaf { out: first.1 });
    }
    let round: Vec<usize>;
    let pending = if pending.is_empty() {
        let unknown = first.0.support & !known.support;
        if unknown == 0 {
            return Err(Error::PartitionInvariant("overlapping blocks".into()));
        }
        round = (0..32).filter(|i| unknown >> i & 1 == 1).collect();
        &round[..]
    } else {
        pending
    };
    let var = pending[0];
    Ok(DecisionTree::Query {
        var,
        on0: Box::new(grow(blocks, known.with(var, false), &pending[1..])?),
        on1: Box::new(grow(blocks, known.with(var, true), &pending[1..])?),
    })
}

/// Decision tree computing the label of the block containing the input.
/// Fails with `BudgetExceeded` rather than exceed `m²` queries.
pub fn synth_query_tree(partition: &LabeledPartition, shape: Shape) -> Result<DecisionTree> {
    if !matches!(shape, Shape::Query { .. }) {
        return Err(Error::SideMismatch { expected: "query", found: "cc" });
    }
    partition.validate(shape)?;
    let blocks: Vec<(Assignment, usize)> = partition
        .blocks
        .iter()
        .map(|b| match b.block {
            Block::Assign(a) => (a, b.z),
            Block::Rect(_) => unreachable!("validated partition"),
        })
        .collect();
    let tree = grow(&blocks, Assignment::EMPTY, &[])?;
    let budget = query_budget(partition.max_assignment_size());
    let depth = tree.depth();
    if depth > budget {
        return Err(Error::BudgetExceeded { depth, budget });
    }
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::enumerate::BlockCatalog;
    use crate::relation::LabeledBlock;
    use crate::synth::tree::dtree_to_partition;

    #[test]
    fn empty_assignment_is_a_leaf() {
        let shape = Shape::Query { n: 2 };
        let p = LabeledPartition::new(shape, vec![LabeledBlock { z: 0, block: Block::Assign(Assignment::EMPTY) }]).unwrap();
        assert_eq!(synth_query_tree(&p, shape).unwrap(), DecisionTree::Leaf { out: 0 });
    }

    #[test]
    fn one_variable_takes_one_query() {
        let shape = Shape::Query { n: 1 };
        let p = LabeledPartition::new(
            shape,
            vec![
                LabeledBlock { z: 0, block: Block::Assign(Assignment::new(1, 0)) },
                LabeledBlock { z: 1, block: Block::Assign(Assignment::new(1, 1)) },
            ],
        )
        .unwrap();
        let t = synth_query_tree(&p, shape).unwrap();
        assert_eq!(t.depth(), 1);
        assert_eq!(t.eval(0), 0);
        assert_eq!(t.eval(1), 1);
    }

    #[test]
    fn every_partition_up_to_three_variables() {
        for n in 1..=3 {
            let shape = Shape::Query { n };
            let catalog = BlockCatalog::new(shape, &Caps::default()).unwrap();
            for blocks in catalog.partitions() {
                let labels: Vec<usize> = (0..blocks.len()).collect();
                let p = catalog.labeled(&blocks, &labels);
                let t = synth_query_tree(&p, shape).unwrap_or_else(|e| panic!("{e} on {p:?}"));
                assert!(t.depth() <= query_budget(p.max_assignment_size()));
                for x in 0..(1u32 << n) {
                    assert_eq!(t.eval(x), p.block_at(shape, x as usize).unwrap().z);
                }
                let back = dtree_to_partition(&t, shape).unwrap();
                assert_eq!(back.labels(shape).unwrap(), p.labels(shape).unwrap());
            }
        }
    }
}
