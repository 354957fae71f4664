//! Protocols for rectangle partitions.
//!
//! The state is the pair of input sets still consistent with the transcript;
//! the live blocks are those meeting it. In a round one player names a live
//! block containing their input that shares rows (for Alice) or columns (for
//! Bob) with at most half of the live blocks, and play continues on the
//! inputs that would have named it. Two disjoint rectangles never share both
//! a row and a column, so the true block qualifies for at least one player;
//! if Alice has no such block she says so and Bob names one.
//!
//! Each round's messages get a prefix code built by repeatedly joining the
//! two shallowest subtrees, which minimizes the resulting depth. Both speaking
//! orders are tried at every state and the shallower kept.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::error::{Error, Result};
use crate::relation::{Block, LabeledPartition, Shape};

use super::tree::{ProtocolTree, Speaker};

/// `(⌈log₂ m⌉)²`.
pub fn cc_budget(blocks: usize) -> usize {
    let k = ceil_log2(blocks);
    k * k
}

pub(crate) fn ceil_log2(m: usize) -> usize {
    if m <= 1 {
        0
    } else {
        (usize::BITS - (m - 1).leading_zeros()) as usize
    }
}

#[derive(Clone, Copy)]
struct Rect {
    rows: u32,
    cols: u32,
    z: usize,
}

impl Rect {
    fn own(&self, s: Speaker) -> u32 {
        match s {
            Speaker::Alice => self.rows,
            Speaker::Bob => self.cols,
        }
    }
}

/// Input sets consistent with the transcript.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct State {
    xs: u32,
    ys: u32,
}

impl State {
    fn own(&self, s: Speaker) -> u32 {
        match s {
            Speaker::Alice => self.xs,
            Speaker::Bob => self.ys,
        }
    }

    fn with_own(self, s: Speaker, set: u32) -> State {
        match s {
            Speaker::Alice => State { xs: set, ..self },
            Speaker::Bob => State { ys: set, ..self },
        }
    }
}

/// One message of a round: the inputs sending it and where play continues.
enum Next {
    State(State),
    /// The first speaker found nothing; the other speaker's messages follow.
    Handoff(Vec<(u32, State)>),
}

struct Round {
    speaker: Speaker,
    messages: Vec<(u32, Next)>,
}

struct Synth {
    x_size: usize,
    y_size: usize,
    blocks: Vec<Rect>,
    memo: HashMap<State, (usize, Speaker)>,
}

impl Synth {
    fn live(&self, st: State) -> Vec<usize> {
        (0..self.blocks.len())
            .filter(|&b| self.blocks[b].rows & st.xs != 0 && self.blocks[b].cols & st.ys != 0)
            .collect()
    }

    /// Live blocks sharing a `side` input (within the state) with at most
    /// `⌈|L|/2⌉` live blocks.
    fn good(&self, live: &[usize], st: State, side: Speaker) -> Vec<usize> {
        let t = live.len().div_ceil(2);
        let own = st.own(side);
        live.iter()
            .copied()
            .filter(|&b| {
                let mine = self.blocks[b].own(side) & own;
                live.iter().filter(|&&o| self.blocks[o].own(side) & mine != 0).count() <= t
            })
            .collect()
    }

    /// Groups `inputs` of `side` by the first candidate block containing them.
    fn group(&self, inputs: u32, side: Speaker, candidates: &[usize]) -> (Vec<(usize, u32)>, u32) {
        let mut groups: Vec<(usize, u32)> = Vec::new();
        let mut none = 0u32;
        for i in bits(inputs) {
            match candidates.iter().find(|&&b| self.blocks[b].own(side) >> i & 1 == 1) {
                Some(&b) => match groups.iter_mut().find(|(g, _)| *g == b) {
                    Some((_, set)) => *set |= 1 << i,
                    None => groups.push((b, 1 << i)),
                },
                None => none |= 1 << i,
            }
        }
        (groups, none)
    }

    fn round(&self, st: State, first: Speaker) -> Result<Round> {
        let live = self.live(st);
        let second = first.other();
        let good = self.good(&live, st, first);
        let (groups, none) = self.group(st.own(first), first, &good);
        let mut messages: Vec<(u32, Next)> =
            groups.into_iter().map(|(_, set)| (set, Next::State(st.with_own(first, set)))).collect();
        if none != 0 {
            let rest = st.with_own(first, none);
            let good2: Vec<usize> = self
                .good(&live, st, second)
                .into_iter()
                .filter(|&b| self.blocks[b].own(first) & none != 0)
                .collect();
            let (groups2, none2) = self.group(st.own(second), second, &good2);
            if none2 != 0 {
                return Err(Error::PartitionInvariant("no player can name a qualifying block".into()));
            }
            let replies = groups2.into_iter().map(|(_, set)| (set, rest.with_own(second, set))).collect();
            messages.push((none, Next::Handoff(replies)));
        }
        Ok(Round { speaker: first, messages })
    }

    fn depth(&mut self, st: State) -> Result<usize> {
        if let Some(&(d, _)) = self.memo.get(&st) {
            return Ok(d);
        }
        if self.live(st).len() <= 1 {
            self.memo.insert(st, (0, Speaker::Alice));
            return Ok(0);
        }
        let mut best: Option<(usize, Speaker)> = None;
        for first in [Speaker::Alice, Speaker::Bob] {
            let round = self.round(st, first)?;
            let mut costs = Vec::with_capacity(round.messages.len());
            for (_, next) in &round.messages {
                costs.push(match next {
                    Next::State(s) => self.depth(*s)?,
                    Next::Handoff(replies) => {
                        let mut inner = Vec::with_capacity(replies.len());
                        for (_, s) in replies {
                            inner.push(self.depth(*s)?);
                        }
                        code_depth(&inner)
                    }
                });
            }
            let d = code_depth(&costs);
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, first));
            }
        }
        let best = best.expect("two speaking orders tried");
        self.memo.insert(st, best);
        Ok(best.0)
    }

    fn build(&mut self, st: State) -> Result<ProtocolTree> {
        self.depth(st)?;
        let live = self.live(st);
        if live.len() <= 1 {
            // A valid partition leaves exactly one block live here.
            let b = live.first().ok_or_else(|| Error::PartitionInvariant("no block covers a reachable input".into()))?;
            return Ok(ProtocolTree::Leaf { out: self.blocks[*b].z });
        }
        let first = self.memo[&st].1;
        let round = self.round(st, first)?;
        let mut subtrees = Vec::with_capacity(round.messages.len());
        for (set, next) in round.messages {
            let tree = match next {
                Next::State(s) => self.build(s)?,
                Next::Handoff(replies) => {
                    let mut inner = Vec::with_capacity(replies.len());
                    for (set2, s) in replies {
                        inner.push((set2, self.depth(s)?, self.build(s)?));
                    }
                    self.encode(round.speaker.other(), inner)
                }
            };
            subtrees.push((set, tree.depth(), tree));
        }
        Ok(self.encode(round.speaker, subtrees))
    }

    /// Joins message subtrees, shallowest pair first, into speaker nodes.
    fn encode(&self, speaker: Speaker, items: Vec<(u32, usize, ProtocolTree)>) -> ProtocolTree {
        let size = match speaker {
            Speaker::Alice => self.x_size,
            Speaker::Bob => self.y_size,
        };
        let mut pool: Vec<Option<(u32, ProtocolTree)>> = Vec::with_capacity(items.len() * 2);
        let mut heap = BinaryHeap::new();
        for (set, d, tree) in items {
            heap.push(Reverse((d, pool.len())));
            pool.push(Some((set, tree)));
        }
        while heap.len() > 1 {
            let Reverse((d0, i0)) = heap.pop().expect("two entries");
            let Reverse((d1, i1)) = heap.pop().expect("two entries");
            let (set0, t0) = pool[i0].take().expect("unused entry");
            let (set1, t1) = pool[i1].take().expect("unused entry");
            let send = (0..size).map(|i| (set1 >> i & 1) as u8).collect();
            let node = ProtocolTree::Node { speaker, send, on0: Box::new(t0), on1: Box::new(t1) };
            heap.push(Reverse((d0.max(d1) + 1, pool.len())));
            pool.push(Some((set0 | set1, node)));
        }
        let Reverse((_, i)) = heap.pop().expect("at least one message");
        pool[i].take().expect("unused entry").1
    }
}

/// Depth of the shallowest prefix code over subtrees of the given depths.
fn code_depth(depths: &[usize]) -> usize {
    let mut heap: BinaryHeap<Reverse<usize>> = depths.iter().map(|&d| Reverse(d)).collect();
    while heap.len() > 1 {
        let Reverse(a) = heap.pop().expect("two entries");
        let Reverse(b) = heap.pop().expect("two entries");
        heap.push(Reverse(a.max(b) + 1));
    }
    heap.pop().map_or(0, |Reverse(d)| d)
}

fn bits(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask >> i & 1 == 1)
}

/// Protocol computing the label of the block containing `(x, y)`. Fails
/// with `BudgetExceeded` rather than return a tree deeper than
/// `(⌈log₂ m⌉)²` for `m` blocks.
pub fn synth_cc_tree(partition: &LabeledPartition, shape: Shape) -> Result<ProtocolTree> {
    let Shape::Cc { x_size, y_size } = shape else {
        return Err(Error::SideMismatch { expected: "cc", found: "query" });
    };
    partition.validate(shape)?;
    let blocks = partition
        .blocks
        .iter()
        .map(|b| match b.block {
            Block::Rect(r) => Rect { rows: r.rows, cols: r.cols, z: b.z },
            Block::Assign(_) => unreachable!("validated partition"),
        })
        .collect();
    let mut synth = Synth { x_size, y_size, blocks, memo: HashMap::new() };
    let root = State { xs: (1u32 << x_size) - 1, ys: (1u32 << y_size) - 1 };
    let tree = synth.build(root)?;
    let budget = cc_budget(partition.block_count());
    let depth = tree.depth();
    if depth > budget {
        return Err(Error::BudgetExceeded { depth, budget });
    }
    Ok(tree)
}
