use std::fmt;

use crate::error::{Error, Result};
use crate::relation::{Assignment, Block, LabeledBlock, LabeledPartition, Rectangle, Shape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Speaker {
    Alice,
    Bob,
}

impl Speaker {
    pub fn other(self) -> Speaker {
        match self {
            Speaker::Alice => Speaker::Bob,
            Speaker::Bob => Speaker::Alice,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Speaker::Alice => "A",
            Speaker::Bob => "B",
        }
    }
}

impl fmt::Display for Speaker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Deterministic two-party protocol. At a node the speaker sends
/// `send[own input]` and play continues in `on0` or `on1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolTree {
    Leaf { out: usize },
    Node { speaker: Speaker, send: Vec<u8>, on0: Box<ProtocolTree>, on1: Box<ProtocolTree> },
}

impl ProtocolTree {
    pub fn depth(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 0,
            ProtocolTree::Node { on0, on1, .. } => 1 + on0.depth().max(on1.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolTree::Leaf { .. } => 1,
            ProtocolTree::Node { on0, on1, .. } => on0.leaf_count() + on1.leaf_count(),
        }
    }

    /// Checks every send map covers the speaker's whole input side.
    pub fn validate(&self, x_size: usize, y_size: usize) -> Result<()> {
        match self {
            ProtocolTree::Leaf { .. } => Ok(()),
            ProtocolTree::Node { speaker, send, on0, on1 } => {
                let want = match speaker {
                    Speaker::Alice => x_size,
                    Speaker::Bob => y_size,
                };
                if send.len() != want {
                    return Err(Error::MalformedTree(format!(
                        "{speaker} node sends over {} inputs, expected {want}",
                        send.len()
                    )));
                }
                if send.iter().any(|&b| b > 1) {
                    return Err(Error::MalformedTree("send map entries must be 0 or 1".into()));
                }
                on0.validate(x_size, y_size)?;
                on1.validate(x_size, y_size)
            }
        }
    }

    /// Leaf reached on `(x, y)`, as (output, leaf index in left-to-right order).
    fn walk(&self, x: usize, y: usize) -> (usize, usize) {
        let mut node = self;
        let mut index = 0;
        loop {
            match node {
                ProtocolTree::Leaf { out } => return (*out, index),
                ProtocolTree::Node { speaker, send, on0, on1 } => {
                    let bit = match speaker {
                        Speaker::Alice => send[x],
                        Speaker::Bob => send[y],
                    };
                    if bit == 0 {
                        node = on0;
                    } else {
                        index += on0.leaf_count();
                        node = on1;
                    }
                }
            }
        }
    }

    pub fn eval(&self, x: usize, y: usize) -> usize {
        self.walk(x, y).0
    }
}

/// Decision tree over `n` boolean variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecisionTree {
    Leaf { out: usize },
    Query { var: usize, on0: Box<DecisionTree>, on1: Box<DecisionTree> },
}

impl DecisionTree {
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Query { on0, on1, .. } => 1 + on0.depth().max(on1.depth()),
        }
    }

    pub fn eval(&self, input: u32) -> usize {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf { out } => return *out,
                DecisionTree::Query { var, on0, on1 } => {
                    node = if input >> var & 1 == 0 { on0 } else { on1 };
                }
            }
        }
    }

    /// Checks variables are in range and never repeated on a path.
    pub fn validate(&self, n: usize) -> Result<()> {
        self.validate_from(n, 0)
    }

    fn validate_from(&self, n: usize, seen: u32) -> Result<()> {
        match self {
            DecisionTree::Leaf { .. } => Ok(()),
            DecisionTree::Query { var, on0, on1 } => {
                if *var >= n {
                    return Err(Error::MalformedTree(format!("query of variable {var} with n = {n}")));
                }
                if seen >> var & 1 == 1 {
                    return Err(Error::MalformedTree(format!("variable {var} queried twice on one path")));
                }
                on0.validate_from(n, seen | 1 << var)?;
                on1.validate_from(n, seen | 1 << var)
            }
        }
    }
}

/// Partition induced by a protocol's leaves. The inputs reaching each leaf
/// are checked to form a rectangle; leaves no input reaches are skipped.
pub fn tree_to_partition(tree: &ProtocolTree, shape: Shape) -> Result<LabeledPartition> {
    let Shape::Cc { x_size, y_size } = shape else {
        return Err(Error::SideMismatch { expected: "query", found: "cc" });
    };
    tree.validate(x_size, y_size)?;
    let leaves = tree.leaf_count();
    let mut cells: Vec<Option<(usize, Vec<(usize, usize)>)>> = vec![None; leaves];
    for x in 0..x_size {
        for y in 0..y_size {
            let (out, leaf) = tree.walk(x, y);
            cells[leaf].get_or_insert_with(|| (out, Vec::new())).1.push((x, y));
        }
    }
    let mut blocks = Vec::new();
    for (out, members) in cells.into_iter().flatten() {
        let rows = members.iter().fold(0u32, |m, &(x, _)| m | 1 << x);
        let cols = members.iter().fold(0u32, |m, &(_, y)| m | 1 << y);
        if (rows.count_ones() * cols.count_ones()) as usize != members.len() {
            return Err(Error::MalformedTree(format!(
                "inputs reaching a leaf do not form a rectangle ({} cells over {} rows and {} columns)",
                members.len(),
                rows.count_ones(),
                cols.count_ones()
            )));
        }
        blocks.push(LabeledBlock { z: out, block: Block::Rect(Rectangle::new(rows, cols)) });
    }
    LabeledPartition::new(shape, blocks)
}

/// Partition induced by a decision tree: one assignment per leaf, read off
/// the root-to-leaf path.
pub fn dtree_to_partition(tree: &DecisionTree, shape: Shape) -> Result<LabeledPartition> {
    let Shape::Query { n } = shape else {
        return Err(Error::SideMismatch { expected: "cc", found: "query" });
    };
    tree.validate(n)?;
    let mut blocks = Vec::new();
    collect_paths(tree, Assignment::EMPTY, &mut blocks);
    LabeledPartition::new(shape, blocks)
}

fn collect_paths(tree: &DecisionTree, path: Assignment, out: &mut Vec<LabeledBlock>) {
    match tree {
        DecisionTree::Leaf { out: z } => out.push(LabeledBlock { z: *z, block: Block::Assign(path) }),
        DecisionTree::Query { var, on0, on1 } => {
            collect_paths(on0, path.with(*var, false), out);
            collect_paths(on1, path.with(*var, true), out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaf(out: usize) -> Box<ProtocolTree> {
        Box::new(ProtocolTree::Leaf { out })
    }

    #[test]
    fn depth_zero_is_one_block() {
        let shape = Shape::Cc { x_size: 2, y_size: 3 };
        let p = tree_to_partition(&ProtocolTree::Leaf { out: 1 }, shape).unwrap();
        assert_eq!(p.block_count(), 1);
        assert_eq!(p.blocks[0].z, 1);
        let q = dtree_to_partition(&DecisionTree::Leaf { out: 0 }, Shape::Query { n: 3 }).unwrap();
        assert_eq!(q.blocks[0].block, Block::Assign(Assignment::EMPTY));
    }

    #[test]
    fn row_bit_gives_row_blocks() {
        let shape = Shape::Cc { x_size: 2, y_size: 2 };
        let t = ProtocolTree::Node { speaker: Speaker::Alice, send: vec![0, 1], on0: leaf(0), on1: leaf(1) };
        let p = tree_to_partition(&t, shape).unwrap();
        assert_eq!(p.block_count(), 2);
        assert_eq!(p.blocks[0].block, Block::Rect(Rectangle::new(0b01, 0b11)));
        assert_eq!(p.blocks[1].block, Block::Rect(Rectangle::new(0b10, 0b11)));
    }

    #[test]
    fn malformed_send_maps_are_rejected() {
        let shape = Shape::Cc { x_size: 2, y_size: 2 };
        let t = ProtocolTree::Node { speaker: Speaker::Bob, send: vec![0, 1, 1], on0: leaf(0), on1: leaf(1) };
        assert!(matches!(tree_to_partition(&t, shape), Err(Error::MalformedTree(_))));
        let t = ProtocolTree::Node { speaker: Speaker::Bob, send: vec![0, 2], on0: leaf(0), on1: leaf(1) };
        assert!(tree_to_partition(&t, shape).is_err());
    }

    #[test]
    fn repeated_query_is_rejected() {
        let inner = DecisionTree::Query {
            var: 0,
            on0: Box::new(DecisionTree::Leaf { out: 0 }),
            on1: Box::new(DecisionTree::Leaf { out: 1 }),
        };
        let t = DecisionTree::Query { var: 0, on0: Box::new(inner.clone()), on1: Box::new(inner) };
        assert!(dtree_to_partition(&t, Shape::Query { n: 1 }).is_err());
    }

    #[test]
    fn decision_paths_become_assignments() {
        let t = DecisionTree::Query {
            var: 1,
            on0: Box::new(DecisionTree::Leaf { out: 0 }),
            on1: Box::new(DecisionTree::Query {
                var: 0,
                on0: Box::new(DecisionTree::Leaf { out: 1 }),
                on1: Box::new(DecisionTree::Leaf { out: 0 }),
            }),
        };
        let p = dtree_to_partition(&t, Shape::Query { n: 2 }).unwrap();
        let pats: Vec<String> = p.blocks.iter().map(|b| match b.block {
            Block::Assign(a) => a.pattern(2),
            Block::Rect(_) => unreachable!(),
        }).collect();
        assert_eq!(pats, ["*0", "01", "11"]);
        assert_eq!(t.eval(0b10), 1);
    }
}
