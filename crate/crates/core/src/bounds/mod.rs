//! The partition bound (`prt`) and the public-coin partition bound (`pprt`).
//!
//! Both are minimization LPs over labeled blocks: per input, the weight on
//! correctly labeled blocks containing it is at least `1 − ε` and the total
//! weight on blocks containing it is exactly 1. The objective charges 1 per
//! unit of rectangle weight, `2^|A|` per unit of assignment weight. `pprt`
//! additionally forces block weights to be the marginals of a probability
//! distribution over labeled partitions.
//!
//! Two `pprt` formulations are built. The direct one keeps both block weights
//! `w` and partition weights `a`. The reduced one keeps only `a`: since every
//! partition covers each input exactly once and `Σ a = 1`, the per-input mass
//! equalities hold automatically and `w` is determined by `a`.

mod certificate;

use std::fmt;
use std::str::FromStr;

use crate::caps::Caps;
use crate::enumerate::{enumerate_labeled_partitions, partition_catalog, BlockCatalog};
use crate::error::{Error, Result};
use crate::lp::{check_duality, solve_lp, LpInstance, LpSolution, LpStatus, RowId, RowKind, Sense, VarId, VarKind};
use crate::rational::Rational;
use crate::relation::{LabeledBlock, LabeledPartition, Relation, Shape, Side};

pub use certificate::{min_weight_partition, verify_dual_certificate, CertVerdict, DualCertificate};

/// Error parameter, `0 ≤ ε < 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Epsilon(Rational);

impl Epsilon {
    pub fn new(value: Rational) -> Result<Self> {
        if value.is_negative() || value >= Rational::one() {
            return Err(Error::InvalidEpsilon(value.to_string()));
        }
        Ok(Epsilon(value))
    }

    pub fn zero() -> Self {
        Epsilon(Rational::zero())
    }

    /// Shorthand for tests and fixtures; panics when out of range.
    pub fn frac(n: i64, d: i64) -> Self {
        Epsilon::new(Rational::new(n, d)).expect("epsilon in [0, 1)")
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn one_minus(&self) -> Rational {
        Rational::one() - &self.0
    }
}

impl FromStr for Epsilon {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let r: Rational = s.parse().map_err(|e| Error::InvalidEpsilon(format!("`{s}` ({e})")))?;
        Epsilon::new(r)
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundKind {
    Prt,
    Pprt,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Prt => "prt",
            BoundKind::Pprt => "pprt",
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prt" => Ok(BoundKind::Prt),
            "pprt" => Ok(BoundKind::Pprt),
            other => Err(Error::malformed(format!("unknown bound kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PprtMode {
    #[default]
    Reduced,
    Direct,
}

impl PprtMode {
    pub fn name(self) -> &'static str {
        match self {
            PprtMode::Reduced => "reduced",
            PprtMode::Direct => "direct",
        }
    }
}

impl FromStr for PprtMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reduced" => Ok(PprtMode::Reduced),
            "direct" => Ok(PprtMode::Direct),
            other => Err(Error::malformed(format!("unknown pprt mode `{other}`"))),
        }
    }
}

fn row_name(kind: &str, shape: Shape, input: usize) -> String {
    match shape {
        Shape::Cc { .. } => format!("{kind}{}", shape.input_name(input)),
        Shape::Query { .. } => format!("{kind}[{}]", shape.input_name(input)),
    }
}

/// The `prt` LP with its column and row maps.
#[derive(Debug, Clone)]
pub struct PrtProgram {
    pub lp: LpInstance,
    pub catalog: BlockCatalog,
    pub z_count: usize,
    /// Per input.
    pub correct_rows: Vec<RowId>,
    /// Per input.
    pub mass_rows: Vec<RowId>,
}

impl PrtProgram {
    /// Column of `w_{z,B}`: blocks in catalog order, labels fastest.
    pub fn var(&self, block: usize, z: usize) -> VarId {
        VarId(block * self.z_count + z)
    }
}

/// Adds the per-block `w` columns and, per input, the correctness and mass
/// rows. Returns the two row lists.
fn add_block_program(lp: &mut LpInstance, relation: &Relation, eps: &Epsilon, catalog: &BlockCatalog) -> Result<(Vec<RowId>, Vec<RowId>)> {
    let shape = relation.shape();
    let z_count = relation.output_count();
    for (b, block) in catalog.blocks().iter().enumerate() {
        for z in 0..z_count {
            let id = format!("w[{}]", LabeledBlock { z, block: *block }.key(shape));
            let v = lp.add_var(id, VarKind::NonNegative, block.weight())?;
            debug_assert_eq!(v.0, b * z_count + z);
        }
    }
    let mut correct = Vec::with_capacity(relation.input_count());
    let mut mass = Vec::with_capacity(relation.input_count());
    for input in 0..relation.input_count() {
        let mut all = Vec::new();
        let mut good = Vec::new();
        for &b in catalog.containing(input) {
            for z in 0..z_count {
                let v = VarId(b * z_count + z);
                all.push((v, Rational::one()));
                if relation.accepts(input, z) {
                    good.push((v, Rational::one()));
                }
            }
        }
        correct.push(lp.add_constraint(row_name("correct", shape, input), good, RowKind::Ge, eps.one_minus())?);
        mass.push(lp.add_constraint(row_name("mass", shape, input), all, RowKind::Eq, Rational::one())?);
    }
    Ok((correct, mass))
}

pub fn build_prt(relation: &Relation, eps: &Epsilon, caps: &Caps) -> Result<PrtProgram> {
    let catalog = BlockCatalog::new(relation.shape(), caps)?;
    let mut lp = LpInstance::new(Sense::Minimize);
    let (correct_rows, mass_rows) = add_block_program(&mut lp, relation, eps, &catalog)?;
    Ok(PrtProgram { lp, catalog, z_count: relation.output_count(), correct_rows, mass_rows })
}

/// A `pprt` LP (either formulation) with its column and row maps.
#[derive(Debug, Clone)]
pub struct PprtProgram {
    pub lp: LpInstance,
    pub mode: PprtMode,
    pub catalog: BlockCatalog,
    pub z_count: usize,
    /// Labeled partitions in stream order; `partition_vars[k]` is `a_P` for
    /// `partitions[k]`.
    pub partitions: Vec<LabeledPartition>,
    pub partition_vars: Vec<VarId>,
    /// Per input.
    pub correct_rows: Vec<RowId>,
    /// Direct formulation only: per input.
    pub mass_rows: Vec<RowId>,
    /// Direct formulation only: per labeled block, catalog order, labels fastest.
    pub link_rows: Vec<RowId>,
    pub total_row: RowId,
}

fn stream_partitions(relation: &Relation, catalog: &BlockCatalog, caps: &Caps) -> Result<Vec<LabeledPartition>> {
    Ok(enumerate_labeled_partitions(relation, catalog, caps)?.collect())
}

pub fn build_pprt_reduced(relation: &Relation, eps: &Epsilon, caps: &Caps) -> Result<PprtProgram> {
    let catalog = partition_catalog(relation, caps)?;
    let partitions = stream_partitions(relation, &catalog, caps)?;
    let shape = relation.shape();
    let mut lp = LpInstance::new(Sense::Minimize);
    let mut partition_vars = Vec::with_capacity(partitions.len());
    let mut correct_at: Vec<Vec<VarId>> = vec![Vec::new(); relation.input_count()];
    for (k, p) in partitions.iter().enumerate() {
        let v = lp.add_var(format!("a[{k}]"), VarKind::NonNegative, p.cost())?;
        partition_vars.push(v);
        let mask = p.correct_mask(relation);
        for (input, list) in correct_at.iter_mut().enumerate() {
            if mask >> input & 1 == 1 {
                list.push(v);
            }
        }
    }
    let mut correct_rows = Vec::with_capacity(relation.input_count());
    for (input, vars) in correct_at.into_iter().enumerate() {
        let terms = vars.into_iter().map(|v| (v, Rational::one()));
        correct_rows.push(lp.add_constraint(row_name("correct", shape, input), terms, RowKind::Ge, eps.one_minus())?);
    }
    let total_row = lp.add_constraint(
        "total",
        partition_vars.iter().map(|&v| (v, Rational::one())),
        RowKind::Eq,
        Rational::one(),
    )?;
    Ok(PprtProgram {
        lp,
        mode: PprtMode::Reduced,
        catalog,
        z_count: relation.output_count(),
        partitions,
        partition_vars,
        correct_rows,
        mass_rows: Vec::new(),
        link_rows: Vec::new(),
        total_row,
    })
}

pub fn build_pprt_direct(relation: &Relation, eps: &Epsilon, caps: &Caps) -> Result<PprtProgram> {
    let catalog = partition_catalog(relation, caps)?;
    let (_, labeled) = catalog.count_partitions(relation.output_count());
    caps.check("labeled partitions (direct formulation)", labeled, caps.direct_labeled)?;
    let partitions = stream_partitions(relation, &catalog, caps)?;
    let z_count = relation.output_count();
    let shape = relation.shape();
    let mut lp = LpInstance::new(Sense::Minimize);
    let (correct_rows, mass_rows) = add_block_program(&mut lp, relation, eps, &catalog)?;

    let mut partition_vars = Vec::with_capacity(partitions.len());
    let mut members: Vec<Vec<VarId>> = vec![Vec::new(); catalog.len() * z_count];
    for (k, p) in partitions.iter().enumerate() {
        let v = lp.add_var(format!("a[{k}]"), VarKind::NonNegative, Rational::zero())?;
        partition_vars.push(v);
        for lb in &p.blocks {
            let b = catalog.index_of(&lb.block).expect("partition block in catalog");
            members[b * z_count + lb.z].push(v);
        }
    }
    let mut link_rows = Vec::with_capacity(members.len());
    for (col, vars) in members.into_iter().enumerate() {
        let (b, z) = (col / z_count, col % z_count);
        let id = format!("link[{}]", LabeledBlock { z, block: catalog.block(b) }.key(shape));
        let terms = std::iter::once((VarId(col), Rational::one())).chain(vars.into_iter().map(|v| (v, -Rational::one())));
        link_rows.push(lp.add_constraint(id, terms, RowKind::Eq, Rational::zero())?);
    }
    let total_row = lp.add_constraint(
        "total",
        partition_vars.iter().map(|&v| (v, Rational::one())),
        RowKind::Eq,
        Rational::one(),
    )?;
    Ok(PprtProgram {
        lp,
        mode: PprtMode::Direct,
        catalog,
        z_count,
        partitions,
        partition_vars,
        correct_rows,
        mass_rows,
        link_rows,
        total_row,
    })
}

/// An optimal bound value with its primal witness and dual certificate.
#[derive(Debug, Clone)]
pub struct BoundValue {
    pub value: Rational,
    /// Largest `k` with `2^k ≤ V`.
    pub log2_floor: i64,
    /// Smallest `k` with `V ≤ 2^k`.
    pub log2_ceil: i64,
    /// Nonzero block weights `w_{z,B}`.
    pub block_weights: Vec<(LabeledBlock, Rational)>,
    /// Nonzero partition weights `a_P` (pprt only).
    pub partition_weights: Vec<(LabeledPartition, Rational)>,
    pub certificate: DualCertificate,
    /// Solver output passed the exact primal/dual check.
    pub duality_checked: bool,
}

impl BoundValue {
    pub fn log2_approx(&self) -> f64 {
        self.value.to_f64().log2()
    }
}

#[derive(Debug, Clone)]
pub enum BoundResult {
    Optimal(Box<BoundValue>),
    Infeasible { reason: String },
}

#[derive(Debug, Clone)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub side: Side,
    pub shape: Shape,
    pub eps: Epsilon,
    pub mode: Option<PprtMode>,
    /// LP size as (variables, constraints).
    pub lp_size: (usize, usize),
    pub result: BoundResult,
}

impl BoundReport {
    pub fn value(&self) -> Option<&Rational> {
        match &self.result {
            BoundResult::Optimal(v) => Some(&v.value),
            BoundResult::Infeasible { .. } => None,
        }
    }

    pub fn optimal(&self) -> Option<&BoundValue> {
        match &self.result {
            BoundResult::Optimal(v) => Some(v),
            BoundResult::Infeasible { .. } => None,
        }
    }
}

fn infeasibility_reason(relation: &Relation) -> String {
    let empty = relation.empty_inputs();
    if empty.is_empty() {
        "the LP is infeasible".to_string()
    } else {
        let names: Vec<String> = empty.iter().map(|&i| relation.shape().input_name(i)).collect();
        format!("no output is acceptable at input(s) {} and 1 - eps > 0", names.join(", "))
    }
}

fn bound_value(
    value: Rational,
    block_weights: Vec<(LabeledBlock, Rational)>,
    partition_weights: Vec<(LabeledPartition, Rational)>,
    certificate: DualCertificate,
    duality_checked: bool,
) -> BoundValue {
    BoundValue {
        log2_floor: value.floor_log2(),
        log2_ceil: value.ceil_log2(),
        value,
        block_weights,
        partition_weights,
        certificate,
        duality_checked,
    }
}

fn prt_report(relation: &Relation, eps: &Epsilon, program: &PrtProgram, sol: &LpSolution) -> Result<BoundResult> {
    if sol.status != LpStatus::Optimal {
        return solver_failure(relation, sol);
    }
    let checked = check_duality(&program.lp, sol);
    let mut weights = Vec::new();
    for (b, block) in program.catalog.blocks().iter().enumerate() {
        for z in 0..program.z_count {
            let w = &sol.primal[program.var(b, z).0];
            if !w.is_zero() {
                weights.push((LabeledBlock { z, block: *block }, w.clone()));
            }
        }
    }
    let cert = DualCertificate {
        kind: BoundKind::Prt,
        side: relation.side(),
        eps: eps.clone(),
        mu: program.correct_rows.iter().map(|r| sol.duals[r.0].clone()).collect(),
        phi: program.mass_rows.iter().map(|r| sol.duals[r.0].clone()).collect(),
        v: None,
        lambda: None,
    };
    let value = sol.value.clone().expect("optimal value");
    Ok(BoundResult::Optimal(Box::new(bound_value(value, weights, Vec::new(), cert, checked))))
}

fn solver_failure(relation: &Relation, sol: &LpSolution) -> Result<BoundResult> {
    match sol.status {
        LpStatus::Infeasible => Ok(BoundResult::Infeasible { reason: infeasibility_reason(relation) }),
        // Objectives are nonnegative combinations of nonnegative variables.
        _ => Err(Error::Unsupported("bound LP reported unbounded".into())),
    }
}

fn pprt_report(relation: &Relation, eps: &Epsilon, program: &PprtProgram, sol: &LpSolution) -> Result<BoundResult> {
    if sol.status != LpStatus::Optimal {
        return solver_failure(relation, sol);
    }
    let checked = check_duality(&program.lp, sol);
    let z_count = program.z_count;
    let catalog = &program.catalog;
    let mut partition_weights = Vec::new();
    let mut w = vec![Rational::zero(); catalog.len() * z_count];
    for (p, v) in program.partitions.iter().zip(&program.partition_vars) {
        let a = &sol.primal[v.0];
        if a.is_zero() {
            continue;
        }
        for lb in &p.blocks {
            let b = catalog.index_of(&lb.block).expect("partition block in catalog");
            w[b * z_count + lb.z] += a;
        }
        partition_weights.push((p.clone(), a.clone()));
    }
    let block_weights = w
        .into_iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(col, x)| (LabeledBlock { z: col % z_count, block: catalog.block(col / z_count) }, x))
        .collect();

    let mu: Vec<Rational> = program.correct_rows.iter().map(|r| sol.duals[r.0].clone()).collect();
    let lambda = sol.duals[program.total_row.0].clone();
    let (phi, v) = match program.mode {
        PprtMode::Direct => (
            program.mass_rows.iter().map(|r| sol.duals[r.0].clone()).collect(),
            program.link_rows.iter().map(|r| sol.duals[r.0].clone()).collect(),
        ),
        PprtMode::Reduced => {
            // φ = 0 and v takes up each block's full slack, so every block
            // constraint is tight and Σ_{blocks of P} v is P's reduced-LP slack.
            let shape = relation.shape();
            let mut v = Vec::with_capacity(catalog.len() * z_count);
            for (b, block) in catalog.blocks().iter().enumerate() {
                let mask = catalog.mask(b);
                for z in 0..z_count {
                    let covered = mask & relation.correct_mask(z);
                    let used: Rational = (0..shape.input_count())
                        .filter(|i| covered >> i & 1 == 1)
                        .map(|i| &mu[i])
                        .sum();
                    v.push(block.weight() - used);
                }
            }
            (vec![Rational::zero(); relation.input_count()], v)
        }
    };
    let cert = DualCertificate {
        kind: BoundKind::Pprt,
        side: relation.side(),
        eps: eps.clone(),
        mu,
        phi,
        v: Some(v),
        lambda: Some(lambda),
    };
    let value = sol.value.clone().expect("optimal value");
    Ok(BoundResult::Optimal(Box::new(bound_value(value, block_weights, partition_weights, cert, checked))))
}

/// Builds, solves and certifies one bound.
pub fn compute_bound(relation: &Relation, eps: &Epsilon, kind: BoundKind, mode: PprtMode, caps: &Caps) -> Result<BoundReport> {
    let (lp_size, result, mode) = match kind {
        BoundKind::Prt => {
            let program = build_prt(relation, eps, caps)?;
            let sol = solve_lp(&program.lp);
            let size = (program.lp.var_count(), program.lp.row_count());
            (size, prt_report(relation, eps, &program, &sol)?, None)
        }
        BoundKind::Pprt => {
            let program = match mode {
                PprtMode::Reduced => build_pprt_reduced(relation, eps, caps)?,
                PprtMode::Direct => build_pprt_direct(relation, eps, caps)?,
            };
            let sol = solve_lp(&program.lp);
            let size = (program.lp.var_count(), program.lp.row_count());
            (size, pprt_report(relation, eps, &program, &sol)?, Some(mode))
        }
    };
    Ok(BoundReport {
        kind,
        side: relation.side(),
        shape: relation.shape(),
        eps: eps.clone(),
        mode,
        lp_size,
        result,
    })
}

#[cfg(test)]
mod tests;
