//! From LP solutions to protocols: per-partition trees, truncation of the
//! optimal distribution over partitions, assembly into a public-coin
//! protocol, and exact evaluation.

pub mod cc;
pub mod query;
pub mod tree;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{compute_bound, BoundKind, BoundReport, BoundResult, Epsilon, PprtMode};
use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relation::{LabeledPartition, Relation, Shape, Side};

pub use cc::{cc_budget, synth_cc_tree};
pub use query::{query_budget, synth_query_tree};
pub use tree::{dtree_to_partition, tree_to_partition, DecisionTree, ProtocolTree, Speaker};

/// A deterministic protocol of either side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Cc(ProtocolTree),
    Query(DecisionTree),
}

impl Tree {
    pub fn depth(&self) -> usize {
        match self {
            Tree::Cc(t) => t.depth(),
            Tree::Query(t) => t.depth(),
        }
    }

    /// Output on input index `input` of `shape`.
    pub fn eval(&self, shape: Shape, input: usize) -> usize {
        match (self, shape) {
            (Tree::Cc(t), Shape::Cc { y_size, .. }) => t.eval(input / y_size, input % y_size),
            (Tree::Query(t), Shape::Query { .. }) => t.eval(input as u32),
            _ => panic!("tree and shape sides differ"),
        }
    }

    pub fn side(&self) -> Side {
        match self {
            Tree::Cc(_) => Side::Cc,
            Tree::Query(_) => Side::Query,
        }
    }

    pub fn to_partition(&self, shape: Shape) -> Result<LabeledPartition> {
        match self {
            Tree::Cc(t) => tree_to_partition(t, shape),
            Tree::Query(t) => dtree_to_partition(t, shape),
        }
    }
}

/// Tree for one partition, on the partition's side.
pub fn synth_tree(partition: &LabeledPartition, shape: Shape) -> Result<Tree> {
    match shape {
        Shape::Cc { .. } => synth_cc_tree(partition, shape).map(Tree::Cc),
        Shape::Query { .. } => synth_query_tree(partition, shape).map(Tree::Query),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportEntry {
    pub prob: Rational,
    pub partition: LabeledPartition,
    pub tree: Tree,
}

/// A public-coin protocol: pick a support entry with its probability, then
/// run its tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomizedProtocol {
    pub shape: Shape,
    pub support: Vec<SupportEntry>,
}

impl RandomizedProtocol {
    pub fn side(&self) -> Side {
        self.shape.side()
    }

    /// Worst-case number of bits (cc) or queries (query).
    pub fn cost(&self) -> usize {
        self.support.iter().map(|e| e.tree.depth()).max().unwrap_or(0)
    }

    /// Probabilities positive and summing to 1; trees on the protocol's side.
    pub fn validate(&self) -> Result<()> {
        check_distribution(self.support.iter().map(|e| &e.prob))?;
        for e in &self.support {
            if e.tree.side() != self.side() {
                return Err(Error::SideMismatch { expected: self.side().name(), found: e.tree.side().name() });
            }
            e.partition.validate(self.shape)?;
        }
        Ok(())
    }

    /// Support indices drawn by inverse CDF over the support order.
    pub fn sample_indices(&self, seed: u64, count: usize) -> Vec<usize> {
        const SCALE: i64 = 1 << 62;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cumulative = Vec::with_capacity(self.support.len());
        let mut acc = Rational::zero();
        for e in &self.support {
            acc += &e.prob;
            cumulative.push(acc.clone());
        }
        (0..count)
            .map(|_| {
                let u = Rational::new(rng.random_range(0..SCALE), SCALE);
                cumulative.iter().position(|c| u < *c).unwrap_or(self.support.len() - 1)
            })
            .collect()
    }

    /// Output of one seeded run on `input`.
    pub fn run(&self, input: usize, seed: u64) -> usize {
        let k = self.sample_indices(seed, 1)[0];
        self.support[k].tree.eval(self.shape, input)
    }
}

fn check_distribution<'a>(probs: impl Iterator<Item = &'a Rational>) -> Result<()> {
    let mut total = Rational::zero();
    for p in probs {
        if !p.is_positive() {
            return Err(Error::malformed(format!("support probability {p} is not positive")));
        }
        total += p;
    }
    if total != Rational::one() {
        return Err(Error::malformed(format!("support probabilities sum to {total}, not 1")));
    }
    Ok(())
}

/// Result of dropping expensive partitions from a distribution.
#[derive(Debug, Clone)]
pub struct Truncation {
    /// `V/ε`, or `None` at `ε = 0` where nothing is dropped.
    pub threshold: Option<Rational>,
    /// Surviving partitions with probabilities rescaled by `1/(1 − δ)`.
    pub kept: Vec<(Rational, LabeledPartition)>,
    /// Dropped partitions with their original probabilities.
    pub dropped: Vec<(Rational, LabeledPartition)>,
    /// Total dropped probability.
    pub delta: Rational,
}

/// What truncation keeps, computed from probabilities and costs alone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    pub threshold: Option<Rational>,
    pub keep: Vec<bool>,
    pub delta: Rational,
    /// `1/(1 − δ)`.
    pub scale: Rational,
}

/// Cost compared against `V/ε`: the block count `n_P` for cc, the largest
/// block weight `2^|A|` for query.
pub fn truncation_cost(partition: &LabeledPartition) -> Rational {
    match partition.blocks.first().map(|b| b.block.side()) {
        Some(Side::Query) => Rational::pow2(partition.max_assignment_size() as i64),
        _ => Rational::from(partition.block_count()),
    }
}

/// Drops cc entries with cost `≥ V/ε` and query entries with cost `> V/ε`.
/// `value` is the distribution's expected cost `V`.
pub fn truncation_cut(probs: &[Rational], costs: &[Rational], value: &Rational, eps: &Epsilon, side: Side) -> Result<Cut> {
    if probs.len() != costs.len() {
        return Err(Error::IndexMismatch("one cost per probability".into()));
    }
    check_distribution(probs.iter())?;
    let threshold = (!eps.value().is_zero()).then(|| value / eps.value());
    let keep: Vec<bool> = costs
        .iter()
        .map(|c| match (&threshold, side) {
            (None, _) => true,
            (Some(t), Side::Cc) => c < t,
            (Some(t), Side::Query) => c <= t,
        })
        .collect();
    let delta: Rational = probs.iter().zip(&keep).filter(|(_, k)| !**k).map(|(p, _)| p).sum();
    if delta == Rational::one() {
        return Err(Error::AllMassDropped);
    }
    let scale = (Rational::one() - &delta).recip();
    Ok(Cut { threshold, keep, delta, scale })
}

/// Drops partitions over `V/ε` and rescales the rest.
pub fn truncate_distribution(
    support: &[(Rational, LabeledPartition)],
    value: &Rational,
    eps: &Epsilon,
    side: Side,
) -> Result<Truncation> {
    let probs: Vec<Rational> = support.iter().map(|(p, _)| p.clone()).collect();
    let costs: Vec<Rational> = support.iter().map(|(_, part)| truncation_cost(part)).collect();
    let cut = truncation_cut(&probs, &costs, value, eps, side)?;
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for ((p, part), keep) in support.iter().zip(&cut.keep) {
        if *keep {
            kept.push((p * &cut.scale, part.clone()));
        } else {
            dropped.push((p.clone(), part.clone()));
        }
    }
    Ok(Truncation { threshold: cut.threshold, kept, dropped, delta: cut.delta })
}

/// Truncation of an optimal pprt witness.
pub fn truncate_report(report: &BoundReport) -> Result<Truncation> {
    if report.kind != BoundKind::Pprt {
        return Err(Error::Unsupported("truncation needs a pprt report".into()));
    }
    let v = report
        .optimal()
        .ok_or_else(|| Error::Unsupported("truncation needs a feasible pprt report".into()))?;
    let support: Vec<(Rational, LabeledPartition)> = v.partition_weights.iter().map(|(p, a)| (a.clone(), p.clone())).collect();
    truncate_distribution(&support, &v.value, &report.eps, report.side)
}

/// Attaches a synthesized tree to every support partition.
pub fn assemble_randomized(support: Vec<(Rational, LabeledPartition)>, shape: Shape) -> Result<RandomizedProtocol> {
    check_distribution(support.iter().map(|(p, _)| p))?;
    let support = support
        .into_iter()
        .map(|(prob, partition)| {
            let tree = synth_tree(&partition, shape)?;
            Ok(SupportEntry { prob, partition, tree })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RandomizedProtocol { shape, support })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    /// Per input, the exact probability of an accepted output.
    pub correctness: Vec<Rational>,
    pub worst_error: Rational,
    pub cost: usize,
}

impl Evaluation {
    /// Input attaining the worst error (first in input order).
    pub fn worst_input(&self) -> usize {
        let min = self.correctness.iter().min().expect("at least one input");
        self.correctness.iter().position(|c| c == min).expect("min is present")
    }
}

pub fn evaluate_protocol(protocol: &RandomizedProtocol, relation: &Relation) -> Result<Evaluation> {
    if protocol.side() != relation.side() {
        return Err(Error::SideMismatch { expected: relation.side().name(), found: protocol.side().name() });
    }
    if protocol.shape != relation.shape() {
        return Err(Error::IndexMismatch("protocol and relation have different input spaces".into()));
    }
    let shape = relation.shape();
    let mut correctness = vec![Rational::zero(); relation.input_count()];
    for e in &protocol.support {
        for (input, c) in correctness.iter_mut().enumerate() {
            let z = e.tree.eval(shape, input);
            if z < relation.output_count() && relation.accepts(input, z) {
                *c += &e.prob;
            }
        }
    }
    let min = correctness.iter().min().cloned().unwrap_or_else(Rational::one);
    Ok(Evaluation { worst_error: Rational::one() - min, correctness, cost: protocol.cost() })
}

/// A protocol measured against a relation, with the lower-bound side of the
/// sandwich: `pprt` at the measured error never exceeds `2^cost` (cc) or
/// `2^(2·cost)` (query).
#[derive(Debug, Clone)]
pub struct ProtocolCheck {
    pub evaluation: Evaluation,
    /// `pprt` at the measured error, when that error is below 1.
    pub pprt_at_error: Option<Rational>,
    pub cost_bound: Rational,
}

impl ProtocolCheck {
    pub fn pass(&self) -> bool {
        self.pprt_at_error.as_ref().is_none_or(|v| *v <= self.cost_bound)
    }
}

pub fn check_protocol(protocol: &RandomizedProtocol, relation: &Relation, caps: &Caps) -> Result<ProtocolCheck> {
    let evaluation = evaluate_protocol(protocol, relation)?;
    let cost = evaluation.cost as i64;
    let cost_bound = match relation.side() {
        Side::Cc => Rational::pow2(cost),
        Side::Query => Rational::pow2(2 * cost),
    };
    let pprt_at_error = if evaluation.worst_error < Rational::one() {
        let eps = Epsilon::new(evaluation.worst_error.clone())?;
        compute_bound(relation, &eps, BoundKind::Pprt, PprtMode::Reduced, caps)?.value().cloned()
    } else {
        None
    };
    Ok(ProtocolCheck { evaluation, pprt_at_error, cost_bound })
}

/// Depth allowed for the truncated protocol: `(⌈log₂(V/ε)⌉ + 1)²` for cc and
/// `(⌊log₂(V/ε)⌋)²` for query. Surviving query partitions have every
/// `|A| ≤ ⌊log₂(V/ε)⌋`, so the floor keeps the check exact without leaving
/// the rationals. `None` at `ε = 0`.
pub fn theorem_budget(value: &Rational, eps: &Epsilon, side: Side) -> Option<usize> {
    if eps.value().is_zero() {
        return None;
    }
    let ratio = value / eps.value();
    let budget = match side {
        Side::Cc => {
            let k = ratio.ceil_log2().max(0) as usize + 1;
            k * k
        }
        Side::Query => {
            let k = ratio.floor_log2().max(0) as usize;
            k * k
        }
    };
    Some(budget)
}

/// The full pipeline: optimal pprt witness, truncation, per-partition
/// synthesis and exact evaluation.
#[derive(Debug, Clone)]
pub struct SynthReport {
    pub bound: BoundReport,
    pub truncation: Truncation,
    pub protocol: RandomizedProtocol,
    pub evaluation: Evaluation,
    pub budget: Option<usize>,
}

impl SynthReport {
    pub fn value(&self) -> &Rational {
        self.bound.value().expect("feasible report")
    }

    pub fn delta_within_eps(&self) -> bool {
        self.truncation.delta <= *self.bound.eps.value()
    }

    /// Worst-case error at most `2ε`.
    pub fn error_within_twice_eps(&self) -> bool {
        self.evaluation.worst_error <= Rational::from(2) * self.bound.eps.value()
    }

    pub fn within_budget(&self) -> bool {
        self.budget.is_none_or(|b| self.evaluation.cost <= b)
    }
}

pub fn run_synth(relation: &Relation, eps: &Epsilon, caps: &Caps) -> Result<SynthReport> {
    let bound = compute_bound(relation, eps, BoundKind::Pprt, PprtMode::Reduced, caps)?;
    let value = match &bound.result {
        BoundResult::Optimal(v) => v.value.clone(),
        BoundResult::Infeasible { reason } => return Err(Error::Infeasible(reason.clone())),
    };
    let truncation = truncate_report(&bound)?;
    let protocol = assemble_randomized(truncation.kept.clone(), relation.shape())?;
    let evaluation = evaluate_protocol(&protocol, relation)?;
    let budget = theorem_budget(&value, eps, relation.side());
    Ok(SynthReport { bound, truncation, protocol, evaluation, budget })
}

#[cfg(test)]
mod tests;
