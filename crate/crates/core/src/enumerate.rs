//! Exhaustive enumerators.
//!
//! Canonical orders, which LP column order depends on:
//! - rectangles: row bitmask ascending, then column bitmask ascending;
//! - assignments: support bitmask ascending, then value bitmask ascending;
//! - partitions: depth-first over "cover the least uncovered input with each
//!   catalog block (in catalog order) that contains it and fits";
//! - labels: per partition, an odometer over `Z^{n_P}` with the first block
//!   most significant.

use std::collections::HashMap;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::relation::{Assignment, Block, LabeledBlock, LabeledPartition, Rectangle, Relation, Shape};

/// All `(2^a - 1)(2^b - 1)` rectangles of an `a × b` grid, canonically ordered.
pub fn enumerate_rectangles(x_size: usize, y_size: usize, caps: &Caps) -> Result<Vec<Rectangle>> {
    caps.check("grid side", x_size.max(y_size) as u128, caps.rect_side as u128)?;
    let mut out = Vec::with_capacity(((1usize << x_size) - 1) * ((1usize << y_size) - 1));
    for rows in 1..(1u32 << x_size) {
        for cols in 1..(1u32 << y_size) {
            out.push(Rectangle { rows, cols });
        }
    }
    Ok(out)
}

/// All `3^n` partial assignments, canonically ordered.
pub fn enumerate_assignments(n: usize, caps: &Caps) -> Result<Vec<Assignment>> {
    caps.check("assignment variable count", n as u128, caps.assign_n as u128)?;
    let mut out = Vec::with_capacity(3usize.pow(n as u32));
    for support in 0..(1u32 << n) {
        // values range over subsets of `support`, ascending
        let mut values = 0u32;
        loop {
            out.push(Assignment { support, values });
            if values == support {
                break;
            }
            values = (values.wrapping_sub(support)) & support;
        }
    }
    Ok(out)
}

/// Every block of an input space with its input bitmask and, per input, the
/// blocks containing it (in catalog order).
#[derive(Debug, Clone)]
pub struct BlockCatalog {
    shape: Shape,
    blocks: Vec<Block>,
    masks: Vec<u64>,
    by_input: Vec<Vec<usize>>,
}

impl BlockCatalog {
    pub fn new(shape: Shape, caps: &Caps) -> Result<Self> {
        let blocks: Vec<Block> = match shape {
            Shape::Cc { x_size, y_size } => enumerate_rectangles(x_size, y_size, caps)?
                .into_iter()
                .map(Block::Rect)
                .collect(),
            Shape::Query { n } => enumerate_assignments(n, caps)?.into_iter().map(Block::Assign).collect(),
        };
        if shape.input_count() > 64 {
            return Err(Error::CapExceeded {
                what: "input count",
                value: shape.input_count() as u128,
                limit: 64,
                large_available: false,
            });
        }
        let masks: Vec<u64> = blocks.iter().map(|b| b.input_mask(shape)).collect();
        let mut by_input = vec![Vec::new(); shape.input_count()];
        for (i, &m) in masks.iter().enumerate() {
            for (input, list) in by_input.iter_mut().enumerate() {
                if m >> input & 1 == 1 {
                    list.push(i);
                }
            }
        }
        Ok(BlockCatalog { shape, blocks, masks, by_input })
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block(&self, i: usize) -> Block {
        self.blocks[i]
    }

    pub fn mask(&self, i: usize) -> u64 {
        self.masks[i]
    }

    /// Catalog indices of blocks containing `input`.
    pub fn containing(&self, input: usize) -> &[usize] {
        &self.by_input[input]
    }

    pub fn index_of(&self, block: &Block) -> Option<usize> {
        // Catalog order is sorted, so binary search works.
        self.blocks.binary_search(block).ok()
    }

    /// Stream of unlabeled partitions, each a list of catalog indices in
    /// canonical (least-input) order.
    pub fn partitions(&self) -> PartitionIter<'_> {
        PartitionIter::new(self)
    }

    /// Number of partitions and of labeled partitions with `z_count` labels.
    pub fn count_partitions(&self, z_count: usize) -> (u128, u128) {
        let mut memo = HashMap::new();
        self.count_rec(self.shape.full_mask(), z_count as u128, &mut memo)
    }

    fn count_rec(&self, uncovered: u64, z: u128, memo: &mut HashMap<u64, (u128, u128)>) -> (u128, u128) {
        if uncovered == 0 {
            return (1, 1);
        }
        if let Some(&v) = memo.get(&uncovered) {
            return v;
        }
        let cell = uncovered.trailing_zeros() as usize;
        let mut total = (0u128, 0u128);
        for &b in &self.by_input[cell] {
            let m = self.masks[b];
            if m & !uncovered == 0 {
                let (c, l) = self.count_rec(uncovered & !m, z, memo);
                total.0 = total.0.saturating_add(c);
                total.1 = total.1.saturating_add(l.saturating_mul(z));
            }
        }
        memo.insert(uncovered, total);
        total
    }

    pub fn labeled(&self, blocks: &[usize], labels: &[usize]) -> LabeledPartition {
        LabeledPartition {
            blocks: blocks
                .iter()
                .zip(labels)
                .map(|(&b, &z)| LabeledBlock { z, block: self.blocks[b] })
                .collect(),
        }
    }
}

struct Frame {
    uncovered: u64,
    input: usize,
    pos: usize,
}

/// Depth-first canonical partition stream.
pub struct PartitionIter<'a> {
    catalog: &'a BlockCatalog,
    stack: Vec<Frame>,
    chosen: Vec<usize>,
}

impl<'a> PartitionIter<'a> {
    fn new(catalog: &'a BlockCatalog) -> Self {
        let full = catalog.shape.full_mask();
        PartitionIter {
            catalog,
            stack: vec![Frame { uncovered: full, input: full.trailing_zeros() as usize, pos: 0 }],
            chosen: Vec::new(),
        }
    }
}

impl Iterator for PartitionIter<'_> {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        while let Some(frame) = self.stack.last_mut() {
            let candidates = &self.catalog.by_input[frame.input];
            let mut found = None;
            while frame.pos < candidates.len() {
                let b = candidates[frame.pos];
                frame.pos += 1;
                if self.catalog.masks[b] & !frame.uncovered == 0 {
                    found = Some(b);
                    break;
                }
            }
            match found {
                None => {
                    self.stack.pop();
                    self.chosen.pop();
                }
                Some(b) => {
                    let rest = frame.uncovered & !self.catalog.masks[b];
                    self.chosen.push(b);
                    if rest == 0 {
                        let out = self.chosen.clone();
                        self.chosen.pop();
                        return Some(out);
                    }
                    self.stack.push(Frame { uncovered: rest, input: rest.trailing_zeros() as usize, pos: 0 });
                }
            }
        }
        None
    }
}

/// Every rectangle partition of an `x_size × y_size` grid (unlabeled).
pub fn enumerate_rectangle_partitions(
    x_size: usize,
    y_size: usize,
    caps: &Caps,
) -> Result<impl Iterator<Item = Vec<Rectangle>>> {
    caps.check("grid cells", (x_size * y_size) as u128, caps.cc_cells as u128)?;
    let catalog = BlockCatalog::new(Shape::Cc { x_size, y_size }, caps)?;
    Ok(OwnedPartitions::new(catalog).map(|(cat, p)| {
        p.iter()
            .map(|&b| match cat.block(b) {
                Block::Rect(r) => r,
                Block::Assign(_) => unreachable!(),
            })
            .collect()
    }))
}

/// Every partition of `{0,1}^n` into subcubes (unlabeled).
pub fn enumerate_subcube_partitions(n: usize, caps: &Caps) -> Result<impl Iterator<Item = Vec<Assignment>>> {
    caps.check("partition variable count", n as u128, caps.query_partition_n as u128)?;
    let catalog = BlockCatalog::new(Shape::Query { n }, caps)?;
    Ok(OwnedPartitions::new(catalog).map(|(cat, p)| {
        p.iter()
            .map(|&b| match cat.block(b) {
                Block::Assign(a) => a,
                Block::Rect(_) => unreachable!(),
            })
            .collect()
    }))
}

/// Partition stream that owns its catalog.
struct OwnedPartitions {
    catalog: std::rc::Rc<BlockCatalog>,
    stack: Vec<Frame>,
    chosen: Vec<usize>,
}

impl OwnedPartitions {
    fn new(catalog: BlockCatalog) -> Self {
        let full = catalog.shape.full_mask();
        OwnedPartitions {
            catalog: std::rc::Rc::new(catalog),
            stack: vec![Frame { uncovered: full, input: full.trailing_zeros() as usize, pos: 0 }],
            chosen: Vec::new(),
        }
    }
}

impl Iterator for OwnedPartitions {
    type Item = (std::rc::Rc<BlockCatalog>, Vec<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        let mut it = PartitionIter {
            catalog: &self.catalog,
            stack: std::mem::take(&mut self.stack),
            chosen: std::mem::take(&mut self.chosen),
        };
        let out = it.next();
        self.stack = it.stack;
        self.chosen = it.chosen;
        out.map(|p| (self.catalog.clone(), p))
    }
}

/// Checks the partition caps for a relation and builds its block catalog.
pub fn partition_catalog(relation: &Relation, caps: &Caps) -> Result<BlockCatalog> {
    match relation.shape() {
        Shape::Cc { x_size, y_size } => {
            caps.check("grid cells", (x_size * y_size) as u128, caps.cc_cells as u128)?
        }
        Shape::Query { n } => caps.check("partition variable count", n as u128, caps.query_partition_n as u128)?,
    }
    BlockCatalog::new(relation.shape(), caps)
}

/// Stream of every labeled partition of the relation's input space. The
/// labeled count is checked against `caps.labeled` before streaming.
pub fn enumerate_labeled_partitions<'a>(
    relation: &Relation,
    catalog: &'a BlockCatalog,
    caps: &Caps,
) -> Result<LabeledPartitions<'a>> {
    let (_, labeled) = catalog.count_partitions(relation.output_count());
    caps.check("labeled partitions", labeled, caps.labeled)?;
    Ok(LabeledPartitions {
        partitions: catalog.partitions(),
        catalog,
        z_count: relation.output_count(),
        current: None,
    })
}

pub struct LabeledPartitions<'a> {
    partitions: PartitionIter<'a>,
    catalog: &'a BlockCatalog,
    z_count: usize,
    current: Option<(Vec<usize>, Vec<usize>)>,
}

impl Iterator for LabeledPartitions<'_> {
    type Item = LabeledPartition;

    fn next(&mut self) -> Option<LabeledPartition> {
        loop {
            if let Some((blocks, labels)) = &mut self.current {
                let out = self.catalog.labeled(blocks, labels);
                // advance odometer, last block fastest
                let mut i = labels.len();
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    labels[i] += 1;
                    if labels[i] < self.z_count {
                        done = false;
                        break;
                    }
                    labels[i] = 0;
                }
                if done {
                    self.current = None;
                }
                return Some(out);
            }
            let blocks = self.partitions.next()?;
            let k = blocks.len();
            self.current = Some((blocks, vec![0; k]));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    /// Brute force: all set partitions of `0..cells`, kept when every block is
    /// one of the admissible masks.
    fn set_partition_count(cells: usize, admissible: &HashSet<u64>) -> usize {
        fn rec(remaining: u64, admissible: &HashSet<u64>) -> usize {
            if remaining == 0 {
                return 1;
            }
            let first = remaining & remaining.wrapping_neg();
            let others = remaining & !first;
            // all subsets of `others`, each combined with `first`
            let mut total = 0;
            let mut sub = others;
            loop {
                let block = sub | first;
                if admissible.contains(&block) {
                    total += rec(remaining & !block, admissible);
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & others;
            }
            total
        }
        rec((1u64 << cells) - 1, admissible)
    }

    fn rectangle_masks(a: usize, b: usize) -> HashSet<u64> {
        // products S × T written out cell by cell, independent of Rectangle
        let mut out = HashSet::new();
        for s in 1..(1u32 << a) {
            for t in 1..(1u32 << b) {
                let mut m = 0u64;
                for x in 0..a {
                    for y in 0..b {
                        if s >> x & 1 == 1 && t >> y & 1 == 1 {
                            m |= 1 << (x * b + y);
                        }
                    }
                }
                out.insert(m);
            }
        }
        out
    }

    fn subcube_masks(n: usize) -> HashSet<u64> {
        // a set of points is a subcube iff it is closed under the coordinate
        // agreement pattern of its min and max; check directly by definition
        let mut out = HashSet::new();
        for pattern in 0..3usize.pow(n as u32) {
            let mut digits = pattern;
            let mut m = 0u64;
            let mut fixed = vec![2usize; n];
            for f in fixed.iter_mut() {
                *f = digits % 3;
                digits /= 3;
            }
            for x in 0..(1usize << n) {
                if (0..n).all(|i| fixed[i] == 2 || fixed[i] == (x >> i & 1)) {
                    m |= 1 << x;
                }
            }
            out.insert(m);
        }
        out
    }

    #[test]
    fn rectangle_counts_match_closed_form() {
        let caps = Caps::default();
        for (a, b) in [(1, 1), (2, 2), (2, 3), (3, 3), (4, 4)] {
            let rects = enumerate_rectangles(a, b, &caps).unwrap();
            assert_eq!(rects.len(), ((1 << a) - 1) * ((1 << b) - 1));
            let mut sorted = rects.clone();
            sorted.sort();
            assert_eq!(rects, sorted, "canonical order is mask order");
        }
        assert!(enumerate_rectangles(5, 1, &caps).is_err());
    }

    #[test]
    fn assignment_counts_are_powers_of_three() {
        let caps = Caps::default();
        for n in 0..=4 {
            let a = enumerate_assignments(n, &caps).unwrap();
            assert_eq!(a.len(), 3usize.pow(n as u32));
            assert_eq!(a.iter().collect::<HashSet<_>>().len(), a.len());
        }
        assert_eq!(enumerate_assignments(0, &caps).unwrap(), vec![Assignment::EMPTY]);
        assert!(enumerate_assignments(7, &caps).is_err());
    }

    #[test]
    fn rectangle_partition_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_rectangle_partitions(1, 1, &caps).unwrap().count(), 1);
        assert_eq!(enumerate_rectangle_partitions(1, 2, &caps).unwrap().count(), 2);
        for (a, b) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let parts: Vec<_> = enumerate_rectangle_partitions(a, b, &caps).unwrap().collect();
            let expected = set_partition_count(a * b, &rectangle_masks(a, b));
            assert_eq!(parts.len(), expected, "{a}x{b}");
            let distinct: HashSet<Vec<Rectangle>> = parts.iter().cloned().collect();
            assert_eq!(distinct.len(), parts.len(), "no duplicates");
        }
        assert_eq!(enumerate_rectangle_partitions(2, 2, &caps).unwrap().count(), 8);
        assert!(enumerate_rectangle_partitions(2, 5, &caps).is_err());
    }

    #[test]
    fn subcube_partition_counts() {
        let caps = Caps::default();
        assert_eq!(enumerate_subcube_partitions(0, &caps).unwrap().count(), 1);
        assert_eq!(enumerate_subcube_partitions(1, &caps).unwrap().count(), 2);
        for n in 1..=3 {
            let parts: Vec<_> = enumerate_subcube_partitions(n, &caps).unwrap().collect();
            assert_eq!(parts.len(), set_partition_count(1 << n, &subcube_masks(n)), "n={n}");
            let distinct: HashSet<Vec<Assignment>> = parts.iter().cloned().collect();
            assert_eq!(distinct.len(), parts.len());
        }
        assert_eq!(enumerate_subcube_partitions(2, &caps).unwrap().count(), 8);
        assert!(enumerate_subcube_partitions(4, &caps).is_err());
    }

    #[test]
    fn every_partition_covers_each_input_once() {
        let caps = Caps::default();
        for shape in [Shape::Cc { x_size: 3, y_size: 3 }, Shape::Cc { x_size: 2, y_size: 3 }, Shape::Query { n: 3 }] {
            let cat = BlockCatalog::new(shape, &caps).unwrap();
            for p in cat.partitions() {
                let labels = vec![0; p.len()];
                let lp = cat.labeled(&p, &labels);
                lp.validate(shape).unwrap();
                let least: Vec<usize> = lp.blocks.iter().map(|b| b.block.least_input(shape)).collect();
                assert!(least.windows(2).all(|w| w[0] < w[1]), "canonical block order");
            }
        }
    }

    #[test]
    fn labeled_counts() {
        let caps = Caps::default();
        let xor = Relation::from_fn(Shape::Cc { x_size: 2, y_size: 2 }, 2, |i, z| (i / 2 ^ i % 2) == z).unwrap();
        let cat = partition_catalog(&xor, &caps).unwrap();
        let all: Vec<_> = enumerate_labeled_partitions(&xor, &cat, &caps).unwrap().collect();
        assert_eq!(all.len(), 58);
        assert_eq!(cat.count_partitions(2), (8, 58));
        assert_eq!(all.iter().collect::<HashSet<_>>().len(), 58);

        let one = Relation::from_fn(Shape::Cc { x_size: 1, y_size: 1 }, 3, |_, _| true).unwrap();
        let cat = partition_catalog(&one, &caps).unwrap();
        assert_eq!(enumerate_labeled_partitions(&one, &cat, &caps).unwrap().count(), 3);

        let q = Relation::from_fn(Shape::Query { n: 1 }, 2, |_, _| true).unwrap();
        let cat = partition_catalog(&q, &caps).unwrap();
        assert_eq!(enumerate_labeled_partitions(&q, &cat, &caps).unwrap().count(), 6);
        assert_eq!(BlockCatalog::new(Shape::Cc { x_size: 3, y_size: 3 }, &caps).unwrap().count_partitions(2), (763, 43898));
    }

    #[test]
    fn labeled_cap_is_checked_before_streaming() {
        let mut caps = Caps::default();
        caps.labeled = 57;
        let xor = Relation::from_fn(Shape::Cc { x_size: 2, y_size: 2 }, 2, |i, z| (i / 2 ^ i % 2) == z).unwrap();
        let cat = partition_catalog(&xor, &caps).unwrap();
        assert!(matches!(enumerate_labeled_partitions(&xor, &cat, &caps), Err(Error::CapExceeded { .. })));
    }
}
