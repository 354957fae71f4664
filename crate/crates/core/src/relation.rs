//! Relations, rectangles, assignments and labeled partitions.
//!
//! Inputs are addressed by a dense index. On the communication side input
//! `(x, y)` has index `x * y_size + y`; on the query side an input
//! `x ∈ {0,1}^n` is the integer whose bit `i` is the value of variable `i`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest side of a communication grid accepted at load time.
pub const MAX_SIDE: usize = 8;
/// Largest variable count accepted at load time.
pub const MAX_VARS: usize = 12;
/// Largest output alphabet.
pub const MAX_OUTPUTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Cc,
    Query,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Cc => "cc",
            Side::Query => "query",
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cc" => Ok(Side::Cc),
            "query" => Ok(Side::Query),
            other => Err(Error::malformed(format!("unknown side `{other}`"))),
        }
    }
}

/// The input space of a relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Shape {
    Cc { x_size: usize, y_size: usize },
    Query { n: usize },
}

impl Shape {
    pub fn side(self) -> Side {
        match self {
            Shape::Cc { .. } => Side::Cc,
            Shape::Query { .. } => Side::Query,
        }
    }

    pub fn input_count(self) -> usize {
        match self {
            Shape::Cc { x_size, y_size } => x_size * y_size,
            Shape::Query { n } => 1 << n,
        }
    }

    /// Bitmask of every input. Only meaningful for at most 64 inputs.
    pub fn full_mask(self) -> u64 {
        let count = self.input_count();
        debug_assert!(count <= 64);
        if count == 64 {
            u64::MAX
        } else {
            (1u64 << count) - 1
        }
    }

    /// Human-readable input name: `(x,y)` or a bitstring (variable 0 first).
    pub fn input_name(self, input: usize) -> String {
        match self {
            Shape::Cc { y_size, .. } => format!("({},{})", input / y_size, input % y_size),
            Shape::Query { n } => bitstring(input as u32, n),
        }
    }

    pub fn parse_input_name(self, name: &str) -> Result<usize> {
        let bad = || Error::IndexMismatch(format!("`{name}` is not an input of this relation"));
        match self {
            Shape::Cc { x_size, y_size } => {
                let inner = name
                    .trim()
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let (x, y) = inner.split_once(',').ok_or_else(bad)?;
                let x: usize = x.trim().parse().map_err(|_| bad())?;
                let y: usize = y.trim().parse().map_err(|_| bad())?;
                if x >= x_size || y >= y_size {
                    return Err(bad());
                }
                Ok(x * y_size + y)
            }
            Shape::Query { n } => parse_bitstring(name, n).map(|x| x as usize).ok_or_else(bad),
        }
    }
}

pub(crate) fn bitstring(x: u32, n: usize) -> String {
    (0..n).map(|i| if x >> i & 1 == 1 { '1' } else { '0' }).collect()
}

fn parse_bitstring(s: &str, n: usize) -> Option<u32> {
    if s.len() != n {
        return None;
    }
    let mut x = 0u32;
    for (i, c) in s.chars().enumerate() {
        match c {
            '0' => {}
            '1' => x |= 1 << i,
            _ => return None,
        }
    }
    Some(x)
}

/// A relation `f`: for every input, the set of acceptable outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    shape: Shape,
    outputs: Vec<String>,
    /// Per input, bitmask over output indices.
    accept: Vec<u64>,
}

impl Relation {
    /// Builds a validated relation. `accept[input]` lists accepted output indices.
    pub fn new(shape: Shape, outputs: Vec<String>, accept: Vec<Vec<usize>>) -> Result<Self> {
        match shape {
            Shape::Cc { x_size, y_size } => {
                if x_size == 0 || y_size == 0 {
                    return Err(Error::malformed("x_size and y_size must be at least 1"));
                }
                if x_size > MAX_SIDE || y_size > MAX_SIDE {
                    return Err(Error::malformed(format!("grid sides are limited to {MAX_SIDE}")));
                }
            }
            Shape::Query { n } => {
                if n == 0 {
                    return Err(Error::malformed("n must be at least 1"));
                }
                if n > MAX_VARS {
                    return Err(Error::malformed(format!("n is limited to {MAX_VARS}")));
                }
            }
        }
        if outputs.is_empty() {
            return Err(Error::malformed("relation needs at least one output label"));
        }
        if outputs.len() > MAX_OUTPUTS {
            return Err(Error::malformed(format!("at most {MAX_OUTPUTS} outputs are supported")));
        }
        if accept.len() != shape.input_count() {
            return Err(Error::malformed(format!(
                "expected accept sets for {} inputs, found {}",
                shape.input_count(),
                accept.len()
            )));
        }
        let mut masks = Vec::with_capacity(accept.len());
        for (input, set) in accept.iter().enumerate() {
            let mut mask = 0u64;
            for &z in set {
                if z >= outputs.len() {
                    return Err(Error::OutOfRangeOutput {
                        input: shape.input_name(input),
                        index: z,
                        count: outputs.len(),
                    });
                }
                if mask >> z & 1 == 1 {
                    return Err(Error::malformed(format!(
                        "duplicate accept entry {z} at input {}",
                        shape.input_name(input)
                    )));
                }
                mask |= 1 << z;
            }
            masks.push(mask);
        }
        Ok(Relation { shape, outputs, accept: masks })
    }

    /// Builds a relation from a predicate over `(input, output)`.
    pub fn from_fn(shape: Shape, outputs: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        let accept = (0..shape.input_count())
            .map(|i| (0..outputs).filter(|&z| f(i, z)).collect())
            .collect();
        Relation::new(shape, (0..outputs).map(|z| z.to_string()).collect(), accept)
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn side(&self) -> Side {
        self.shape.side()
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn input_count(&self) -> usize {
        self.accept.len()
    }

    pub fn accepts(&self, input: usize, z: usize) -> bool {
        self.accept[input] >> z & 1 == 1
    }

    /// Accepted outputs at `input` as a bitmask.
    pub fn accept_mask(&self, input: usize) -> u64 {
        self.accept[input]
    }

    pub fn accept_set(&self, input: usize) -> Vec<usize> {
        (0..self.outputs.len()).filter(|&z| self.accepts(input, z)).collect()
    }

    /// Inputs with no acceptable output.
    pub fn empty_inputs(&self) -> Vec<usize> {
        (0..self.accept.len()).filter(|&i| self.accept[i] == 0).collect()
    }

    /// Bitmask of inputs at which `z` is accepted (at most 64 inputs).
    pub fn correct_mask(&self, z: usize) -> u64 {
        let mut m = 0u64;
        for (i, &a) in self.accept.iter().enumerate() {
            if a >> z & 1 == 1 {
                m |= 1 << i;
            }
        }
        m
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: RelationDoc = serde_json::from_str(text)
            .map_err(|e| Error::malformed(format!("relation document: {e}")))?;
        doc.into_relation()
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Relation::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Value {
        match self.shape {
            Shape::Cc { x_size, y_size } => {
                let accept: Vec<Vec<Vec<usize>>> = (0..x_size)
                    .map(|x| (0..y_size).map(|y| self.accept_set(x * y_size + y)).collect())
                    .collect();
                json!({
                    "format_version": 1,
                    "kind": "cc",
                    "x_size": x_size,
                    "y_size": y_size,
                    "outputs": self.outputs,
                    "accept": accept,
                })
            }
            Shape::Query { n } => {
                let accept: BTreeMap<String, Vec<usize>> = (0..self.input_count())
                    .map(|x| (bitstring(x as u32, n), self.accept_set(x)))
                    .collect();
                json!({
                    "format_version": 1,
                    "kind": "query",
                    "n": n,
                    "outputs": self.outputs,
                    "accept": accept,
                })
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RelationDoc {
    Cc {
        #[serde(default)]
        format_version: Option<u32>,
        x_size: usize,
        y_size: usize,
        outputs: Vec<String>,
        accept: Vec<Vec<Vec<usize>>>,
    },
    Query {
        #[serde(default)]
        format_version: Option<u32>,
        n: usize,
        outputs: Vec<String>,
        accept: BTreeMap<String, Vec<usize>>,
    },
}

fn check_version(v: Option<u32>) -> Result<()> {
    match v {
        None | Some(1) => Ok(()),
        Some(v) => Err(Error::malformed(format!("unsupported format_version {v}"))),
    }
}

impl RelationDoc {
    fn into_relation(self) -> Result<Relation> {
        match self {
            RelationDoc::Cc { format_version, x_size, y_size, outputs, accept } => {
                check_version(format_version)?;
                if accept.len() != x_size || accept.iter().any(|row| row.len() != y_size) {
                    return Err(Error::malformed(format!(
                        "accept must be a {x_size}x{y_size} array of output lists"
                    )));
                }
                let flat = accept.into_iter().flatten().collect();
                Relation::new(Shape::Cc { x_size, y_size }, outputs, flat)
            }
            RelationDoc::Query { format_version, n, outputs, accept } => {
                check_version(format_version)?;
                if n == 0 || n > MAX_VARS {
                    return Err(Error::malformed(format!("n must be in 1..={MAX_VARS}")));
                }
                let mut flat: Vec<Option<Vec<usize>>> = vec![None; 1 << n];
                for (key, set) in accept {
                    let x = parse_bitstring(&key, n)
                        .ok_or_else(|| Error::malformed(format!("`{key}` is not a {n}-bit input")))?;
                    flat[x as usize] = Some(set);
                }
                let flat = flat
                    .into_iter()
                    .enumerate()
                    .map(|(x, s)| {
                        s.ok_or_else(|| {
                            Error::malformed(format!("missing accept set for input {}", bitstring(x as u32, n)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Relation::new(Shape::Query { n }, outputs, flat)
            }
        }
    }
}

/// A combinatorial rectangle `rows × cols`; both sets are bitmasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rectangle {
    pub rows: u32,
    pub cols: u32,
}

impl Rectangle {
    pub fn new(rows: u32, cols: u32) -> Self {
        assert!(rows != 0 && cols != 0, "rectangles are nonempty");
        Rectangle { rows, cols }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows >> x & 1 == 1 && self.cols >> y & 1 == 1
    }

    pub fn cell_mask(&self, y_size: usize) -> u64 {
        let mut m = 0u64;
        for x in bits(self.rows) {
            for y in bits(self.cols) {
                m |= 1 << (x * y_size + y);
            }
        }
        m
    }

    pub fn row_list(&self) -> Vec<usize> {
        bits(self.rows).collect()
    }

    pub fn col_list(&self) -> Vec<usize> {
        bits(self.cols).collect()
    }

    pub fn from_lists(rows: &[usize], cols: &[usize]) -> Result<Self> {
        let to_mask = |v: &[usize]| -> Result<u32> {
            let mut m = 0u32;
            for &i in v {
                if i >= 32 || m >> i & 1 == 1 {
                    return Err(Error::malformed(format!("bad rectangle index list {v:?}")));
                }
                m |= 1 << i;
            }
            Ok(m)
        };
        let (rows, cols) = (to_mask(rows)?, to_mask(cols)?);
        if rows == 0 || cols == 0 {
            return Err(Error::malformed("rectangle with an empty side"));
        }
        Ok(Rectangle { rows, cols })
    }

    /// `rows:cols` with comma-separated index lists, e.g. `0,1:1`.
    pub fn key(&self) -> String {
        let join = |v: Vec<usize>| v.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        format!("{}:{}", join(self.row_list()), join(self.col_list()))
    }
}

pub(crate) fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// A partial assignment of input bits: variables in `support` are fixed to the
/// corresponding bits of `values`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    pub support: u32,
    pub values: u32,
}

impl Assignment {
    pub const EMPTY: Assignment = Assignment { support: 0, values: 0 };

    pub fn new(support: u32, values: u32) -> Self {
        assert_eq!(values & !support, 0, "values outside the support");
        Assignment { support, values }
    }

    pub fn size(&self) -> usize {
        self.support.count_ones() as usize
    }

    pub fn contains(&self, x: u32) -> bool {
        x & self.support == self.values
    }

    pub fn get(&self, var: usize) -> Option<bool> {
        (self.support >> var & 1 == 1).then_some(self.values >> var & 1 == 1)
    }

    pub fn with(&self, var: usize, bit: bool) -> Self {
        Assignment {
            support: self.support | 1 << var,
            values: self.values | (bit as u32) << var,
        }
    }

    /// True when some input is consistent with both.
    pub fn compatible(&self, other: &Assignment) -> bool {
        let shared = self.support & other.support;
        self.values & shared == other.values & shared
    }

    /// Bitmask over the `2^n` inputs (requires `n <= 6`).
    pub fn point_mask(&self, n: usize) -> u64 {
        let mut m = 0u64;
        for x in 0..(1u32 << n) {
            if self.contains(x) {
                m |= 1 << x;
            }
        }
        m
    }

    /// Pattern string over `{0,1,*}`, variable 0 first.
    pub fn pattern(&self, n: usize) -> String {
        (0..n)
            .map(|i| match self.get(i) {
                None => '*',
                Some(false) => '0',
                Some(true) => '1',
            })
            .collect()
    }

    pub fn from_pattern(p: &str, n: usize) -> Result<Self> {
        if p.chars().count() != n {
            return Err(Error::malformed(format!("assignment `{p}` must have {n} characters")));
        }
        let mut a = Assignment::EMPTY;
        for (i, c) in p.chars().enumerate() {
            match c {
                '0' => a = a.with(i, false),
                '1' => a = a.with(i, true),
                '*' => {}
                _ => return Err(Error::malformed(format!("bad assignment character in `{p}`"))),
            }
        }
        Ok(a)
    }

    /// Weight `2^|A|` used by the query-side objectives.
    pub fn weight(&self) -> Rational {
        Rational::pow2(self.size() as i64)
    }
}

/// A block of a partition: a rectangle or an assignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Rect(Rectangle),
    Assign(Assignment),
}

impl Block {
    pub fn contains(&self, shape: Shape, input: usize) -> bool {
        match (self, shape) {
            (Block::Rect(r), Shape::Cc { y_size, .. }) => r.contains(input / y_size, input % y_size),
            (Block::Assign(a), Shape::Query { .. }) => a.contains(input as u32),
            _ => false,
        }
    }

    pub fn input_mask(&self, shape: Shape) -> u64 {
        match (self, shape) {
            (Block::Rect(r), Shape::Cc { y_size, .. }) => r.cell_mask(y_size),
            (Block::Assign(a), Shape::Query { n }) => a.point_mask(n),
            _ => 0,
        }
    }

    /// Objective weight: 1 for a rectangle, `2^|A|` for an assignment.
    pub fn weight(&self) -> Rational {
        match self {
            Block::Rect(_) => Rational::one(),
            Block::Assign(a) => a.weight(),
        }
    }

    pub fn key(&self, shape: Shape) -> String {
        match (self, shape) {
            (Block::Rect(r), _) => r.key(),
            (Block::Assign(a), Shape::Query { n }) => a.pattern(n),
            (Block::Assign(a), _) => format!("{:?}", a),
        }
    }

    /// Smallest input index contained in the block.
    pub fn least_input(&self, shape: Shape) -> usize {
        match (self, shape) {
            (Block::Rect(r), Shape::Cc { y_size, .. }) => {
                r.rows.trailing_zeros() as usize * y_size + r.cols.trailing_zeros() as usize
            }
            (Block::Assign(a), _) => a.values as usize,
            _ => usize::MAX,
        }
    }

    pub fn side(&self) -> Side {
        match self {
            Block::Rect(_) => Side::Cc,
            Block::Assign(_) => Side::Query,
        }
    }
}

/// An output label attached to a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabeledBlock {
    pub z: usize,
    pub block: Block,
}

impl LabeledBlock {
    /// `z:rows:cols` or `z:pattern`.
    pub fn key(&self, shape: Shape) -> String {
        format!("{}:{}", self.z, self.block.key(shape))
    }
}

/// A partition of the input space into labeled blocks, canonically ordered by
/// the least input of each block.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledPartition {
    pub blocks: Vec<LabeledBlock>,
}

impl LabeledPartition {
    pub fn new(shape: Shape, mut blocks: Vec<LabeledBlock>) -> Result<Self> {
        blocks.sort_by_key(|b| b.block.least_input(shape));
        let p = LabeledPartition { blocks };
        p.validate(shape)?;
        Ok(p)
    }

    /// Number of blocks, `n_P`.
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Largest assignment size (0 for rectangle partitions).
    pub fn max_assignment_size(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| match b.block {
                Block::Assign(a) => a.size(),
                Block::Rect(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// Objective contribution: `n_P` (cc) or `Σ 2^|A|` (query).
    pub fn cost(&self) -> Rational {
        self.blocks.iter().map(|b| b.block.weight()).sum()
    }

    /// Checks every input lies in exactly one block, and block sides match.
    pub fn validate(&self, shape: Shape) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::PartitionInvariant("partition has no blocks".into()));
        }
        for b in &self.blocks {
            if b.block.side() != shape.side() {
                return Err(Error::SideMismatch { expected: shape.side().name(), found: b.block.side().name() });
            }
            let in_range = match (b.block, shape) {
                (Block::Rect(r), Shape::Cc { x_size, y_size }) => {
                    r.rows >> x_size == 0 && r.cols >> y_size == 0 && r.rows != 0 && r.cols != 0
                }
                (Block::Assign(a), Shape::Query { n }) => a.support >> n == 0 && a.values & !a.support == 0,
                _ => false,
            };
            if !in_range {
                return Err(Error::PartitionInvariant(format!("block {} is outside the input space", b.block.key(shape))));
            }
        }
        for input in 0..shape.input_count() {
            let count = self.blocks.iter().filter(|b| b.block.contains(shape, input)).count();
            if count != 1 {
                return Err(Error::PartitionInvariant(format!(
                    "input {} lies in {count} blocks",
                    shape.input_name(input)
                )));
            }
        }
        Ok(())
    }

    /// The unique block containing `input`.
    pub fn block_at(&self, shape: Shape, input: usize) -> Result<&LabeledBlock> {
        let mut hits = self.blocks.iter().filter(|b| b.block.contains(shape, input));
        match (hits.next(), hits.next()) {
            (Some(b), None) => Ok(b),
            (None, _) => Err(Error::PartitionInvariant(format!(
                "no block contains input {}",
                shape.input_name(input)
            ))),
            (Some(_), Some(_)) => Err(Error::PartitionInvariant(format!(
                "blocks overlap at input {}",
                shape.input_name(input)
            ))),
        }
    }

    /// Label of the block containing each input.
    pub fn labels(&self, shape: Shape) -> Result<Vec<usize>> {
        (0..shape.input_count()).map(|i| self.block_at(shape, i).map(|b| b.z)).collect()
    }

    /// Inputs where the block label is accepted, as a bitmask.
    pub fn correct_mask(&self, relation: &Relation) -> u64 {
        let shape = relation.shape();
        let mut m = 0u64;
        for b in &self.blocks {
            m |= b.block.input_mask(shape) & relation.correct_mask(b.z);
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR_DOC: &str = r#"{"kind":"cc","x_size":2,"y_size":2,"outputs":["0","1"],"accept":[[[0],[1]],[[1],[0]]]}"#;
    const PARITY_DOC: &str = r#"{"kind":"query","n":2,"outputs":["0","1"],"accept":{"00":[0],"01":[1],"10":[1],"11":[0]}}"#;

    #[test]
    fn loads_xor() {
        let f = Relation::from_json_str(XOR_DOC).unwrap();
        assert_eq!(f.shape(), Shape::Cc { x_size: 2, y_size: 2 });
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(f.accept_set(x * 2 + y), vec![x ^ y]);
            }
        }
    }

    #[test]
    fn loads_query_parity_with_leftmost_variable_first() {
        let f = Relation::from_json_str(PARITY_DOC).unwrap();
        // "01" means x0 = 0, x1 = 1, i.e. integer 2.
        assert_eq!(f.accept_set(2), vec![1]);
        assert_eq!(f.accept_set(3), vec![0]);
        assert_eq!(Shape::Query { n: 2 }.input_name(2), "01");
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        let bad = XOR_DOC.replace("[[[0],[1]]", "[[[5],[1]]");
        assert!(matches!(Relation::from_json_str(&bad), Err(Error::OutOfRangeOutput { index: 5, .. })));
        let dup = XOR_DOC.replace("[[[0],[1]]", "[[[0,0],[1]]");
        assert!(matches!(Relation::from_json_str(&dup), Err(Error::Malformed(_))));
        let missing = PARITY_DOC.replace(r#","11":[0]"#, "");
        assert!(Relation::from_json_str(&missing).is_err());
        let empty_grid = r#"{"kind":"cc","x_size":0,"y_size":2,"outputs":["0"],"accept":[]}"#;
        assert!(Relation::from_json_str(empty_grid).is_err());
        assert!(Relation::from_json_str("{not json").is_err());
    }

    #[test]
    fn empty_accept_sets_are_allowed() {
        let doc = r#"{"kind":"cc","x_size":1,"y_size":2,"outputs":["a"],"accept":[[[],[0]]]}"#;
        let f = Relation::from_json_str(doc).unwrap();
        assert_eq!(f.empty_inputs(), vec![0]);
    }

    #[test]
    fn json_round_trip() {
        for doc in [XOR_DOC, PARITY_DOC] {
            let f = Relation::from_json_str(doc).unwrap();
            let again = Relation::from_json_str(&f.to_json().to_string()).unwrap();
            assert_eq!(f, again);
        }
    }

    #[test]
    fn block_at_finds_unique_block() {
        let shape = Shape::Cc { x_size: 2, y_size: 2 };
        let p = LabeledPartition::new(
            shape,
            vec![
                LabeledBlock { z: 1, block: Block::Rect(Rectangle::new(0b10, 0b11)) },
                LabeledBlock { z: 0, block: Block::Rect(Rectangle::new(0b01, 0b11)) },
            ],
        )
        .unwrap();
        // canonical order puts row 0 first
        assert_eq!(p.blocks[0].z, 0);
        let b = p.block_at(shape, 2).unwrap();
        assert_eq!(b.z, 1);
        assert_eq!(b.block, Block::Rect(Rectangle::new(0b10, 0b11)));

        let q = Shape::Query { n: 2 };
        let p = LabeledPartition::new(
            q,
            vec![
                LabeledBlock { z: 0, block: Block::Assign(Assignment::from_pattern("0*", 2).unwrap()) },
                LabeledBlock { z: 1, block: Block::Assign(Assignment::from_pattern("1*", 2).unwrap()) },
            ],
        )
        .unwrap();
        let input = q.parse_input_name("01").unwrap();
        assert_eq!(p.block_at(q, input).unwrap().block.key(q), "0*");
    }

    #[test]
    fn overlapping_blocks_are_rejected() {
        let shape = Shape::Cc { x_size: 1, y_size: 2 };
        let r = LabeledPartition::new(
            shape,
            vec![
                LabeledBlock { z: 0, block: Block::Rect(Rectangle::new(1, 0b11)) },
                LabeledBlock { z: 0, block: Block::Rect(Rectangle::new(1, 0b01)) },
            ],
        );
        assert!(matches!(r, Err(Error::PartitionInvariant(_))));
        let gap = LabeledPartition { blocks: vec![LabeledBlock { z: 0, block: Block::Rect(Rectangle::new(1, 1)) }] };
        assert!(gap.block_at(shape, 1).is_err());
    }
}
