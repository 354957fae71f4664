use std::collections::HashMap;

use crate::caps::Caps;
use crate::enumerate::{partition_catalog, BlockCatalog};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relation::{LabeledBlock, LabeledPartition, Relation, Side};

use super::{BoundKind, Epsilon};

/// A feasible point of the dual LP. Its objective is a lower bound on the
/// corresponding primal optimum.
///
/// `mu` and `phi` are indexed by input. `v` is indexed by labeled block in
/// catalog order with labels fastest, and is present only for `pprt`, as is
/// `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualCertificate {
    pub kind: BoundKind,
    pub side: Side,
    pub eps: Epsilon,
    pub mu: Vec<Rational>,
    pub phi: Vec<Rational>,
    pub v: Option<Vec<Rational>>,
    pub lambda: Option<Rational>,
}

impl DualCertificate {
    /// `(1 − ε) Σ μ + Σ φ (+ λ)`.
    pub fn objective(&self) -> Rational {
        let mu: Rational = self.mu.iter().sum();
        let phi: Rational = self.phi.iter().sum();
        let mut total = self.eps.one_minus() * mu + phi;
        if let Some(l) = &self.lambda {
            total += l;
        }
        total
    }
}

#[derive(Debug, Clone)]
pub struct CertVerdict {
    pub accepted: bool,
    /// The certificate's objective; a valid lower bound when accepted.
    pub value: Rational,
    /// Human-readable descriptions of every violated constraint.
    pub violations: Vec<String>,
    /// `pprt` only: the labeled partition minimizing `Σ v` and that sum.
    pub separation: Option<(Rational, LabeledPartition)>,
}

/// Cheapest labeled partition under per-block weights `v` (labels fastest),
/// where a block costs the smallest `v` over its labels. Memoized over the
/// set of still-uncovered inputs, always branching on the lowest one.
pub fn min_weight_partition(catalog: &BlockCatalog, z_count: usize, v: &[Rational]) -> Result<(Rational, LabeledPartition)> {
    if z_count == 0 || v.len() != catalog.len() * z_count {
        return Err(Error::IndexMismatch(format!(
            "expected {} block weights, found {}",
            catalog.len() * z_count,
            v.len()
        )));
    }
    let best_label: Vec<usize> = (0..catalog.len())
        .map(|b| {
            let row = &v[b * z_count..(b + 1) * z_count];
            (0..z_count).min_by(|&i, &j| row[i].cmp(&row[j])).expect("z_count > 0")
        })
        .collect();
    let mut memo: HashMap<u64, (Rational, usize)> = HashMap::new();
    let full = catalog.shape().full_mask();
    let value = separate(catalog, z_count, v, &best_label, full, &mut memo);

    let mut blocks = Vec::new();
    let mut uncovered = full;
    while uncovered != 0 {
        let b = memo[&uncovered].1;
        blocks.push(LabeledBlock { z: best_label[b], block: catalog.block(b) });
        uncovered &= !catalog.mask(b);
    }
    Ok((value, LabeledPartition::new(catalog.shape(), blocks)?))
}

fn separate(
    catalog: &BlockCatalog,
    z_count: usize,
    v: &[Rational],
    best_label: &[usize],
    uncovered: u64,
    memo: &mut HashMap<u64, (Rational, usize)>,
) -> Rational {
    if uncovered == 0 {
        return Rational::zero();
    }
    if let Some((val, _)) = memo.get(&uncovered) {
        return val.clone();
    }
    let first = uncovered.trailing_zeros() as usize;
    let mut best: Option<(Rational, usize)> = None;
    for &b in catalog.containing(first) {
        let m = catalog.mask(b);
        if m & !uncovered != 0 {
            continue;
        }
        let rest = separate(catalog, z_count, v, best_label, uncovered & !m, memo);
        let total = rest + &v[b * z_count + best_label[b]];
        if best.as_ref().is_none_or(|(cur, _)| total < *cur) {
            best = Some((total, b));
        }
    }
    // Singleton blocks always fit, so some block was taken.
    let best = best.expect("a block covers the lowest uncovered input");
    memo.insert(uncovered, best.clone());
    best.0
}

fn sum_over(values: &[Rational], mask: u64) -> Rational {
    values
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, x)| x)
        .sum()
}

/// Checks that `cert` is feasible for the dual of the `cert.kind` LP of
/// `relation` at `eps`, exactly.
pub fn verify_dual_certificate(relation: &Relation, eps: &Epsilon, cert: &DualCertificate, caps: &Caps) -> Result<CertVerdict> {
    if cert.side != relation.side() {
        return Err(Error::SideMismatch { expected: relation.side().name(), found: cert.side.name() });
    }
    if cert.eps != *eps {
        return Err(Error::IndexMismatch(format!("certificate is for eps = {}, not {eps}", cert.eps)));
    }
    let inputs = relation.input_count();
    if cert.mu.len() != inputs || cert.phi.len() != inputs {
        return Err(Error::IndexMismatch(format!(
            "relation has {inputs} inputs; certificate has {} mu and {} phi entries",
            cert.mu.len(),
            cert.phi.len()
        )));
    }
    let pprt = match (cert.kind, &cert.v, &cert.lambda) {
        (BoundKind::Prt, None, None) => None,
        (BoundKind::Pprt, Some(v), Some(lambda)) => Some((v, lambda)),
        (BoundKind::Prt, _, _) => return Err(Error::malformed("prt certificate carries v or lambda")),
        (BoundKind::Pprt, _, _) => return Err(Error::malformed("pprt certificate needs both v and lambda")),
    };
    let catalog = match cert.kind {
        BoundKind::Prt => BlockCatalog::new(relation.shape(), caps)?,
        BoundKind::Pprt => partition_catalog(relation, caps)?,
    };
    let z_count = relation.output_count();
    if let Some((v, _)) = pprt {
        if v.len() != catalog.len() * z_count {
            return Err(Error::IndexMismatch(format!(
                "relation has {} labeled blocks; certificate has {} v entries",
                catalog.len() * z_count,
                v.len()
            )));
        }
    }

    let shape = relation.shape();
    let mut violations = Vec::new();
    for (i, m) in cert.mu.iter().enumerate() {
        if m.is_negative() {
            violations.push(format!("mu at {} is negative ({m})", shape.input_name(i)));
        }
    }
    let correct: Vec<u64> = (0..z_count).map(|z| relation.correct_mask(z)).collect();
    for (b, block) in catalog.blocks().iter().enumerate() {
        let mask = catalog.mask(b);
        let phi = sum_over(&cert.phi, mask);
        let cap = block.weight();
        for (z, &ok) in correct.iter().enumerate() {
            let mut lhs = sum_over(&cert.mu, mask & ok) + &phi;
            if let Some((v, _)) = pprt {
                lhs += &v[b * z_count + z];
            }
            if lhs > cap {
                violations.push(format!(
                    "block {}: dual load {lhs} exceeds {cap}",
                    LabeledBlock { z, block: *block }.key(shape)
                ));
            }
        }
    }
    let separation = match pprt {
        Some((v, lambda)) => {
            let (min, partition) = min_weight_partition(&catalog, z_count, v)?;
            if min < *lambda {
                let keys: Vec<String> = partition.blocks.iter().map(|b| b.key(shape)).collect();
                violations.push(format!(
                    "partition [{}]: sum of v is {min}, below lambda = {lambda}",
                    keys.join(" ")
                ));
            }
            Some((min, partition))
        }
        None => None,
    };
    Ok(CertVerdict { accepted: violations.is_empty(), value: cert.objective(), violations, separation })
}
