//! Exact rational linear programs.
//!
//! Dual multipliers follow one convention for both senses: the dual objective
//! is `Σ rhs_i · y_i`, and
//! - minimize: `≥` rows have `y ≥ 0`, `≤` rows `y ≤ 0`, and every
//!   nonnegative variable has reduced cost `c_j − Σ_i a_ij y_i ≥ 0`
//!   (`= 0` for free variables);
//! - maximize: the same with every inequality flipped.

mod simplex;

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub use simplex::{solve_lp, solve_lp_with, PivotRule, SolveStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    NonNegative,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

impl RowKind {
    fn symbol(self) -> &'static str {
        match self {
            RowKind::Le => "<=",
            RowKind::Eq => "=",
            RowKind::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone)]
pub struct Variable {
    pub id: String,
    pub kind: VarKind,
    pub cost: Rational,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub id: String,
    /// Sparse coefficient row, variable indices strictly increasing.
    pub coeffs: Vec<(usize, Rational)>,
    pub kind: RowKind,
    pub rhs: Rational,
}

#[derive(Debug, Clone)]
pub struct LpInstance {
    pub sense: Sense,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    ids: HashSet<String>,
}

impl LpInstance {
    pub fn new(sense: Sense) -> Self {
        LpInstance { sense, variables: Vec::new(), constraints: Vec::new(), ids: HashSet::new() }
    }

    fn claim(&mut self, id: &str) -> Result<()> {
        if !self.ids.insert(id.to_string()) {
            return Err(Error::malformed(format!("duplicate LP identifier `{id}`")));
        }
        Ok(())
    }

    pub fn add_var(&mut self, id: impl Into<String>, kind: VarKind, cost: Rational) -> Result<VarId> {
        let id = id.into();
        self.claim(&id)?;
        self.variables.push(Variable { id, kind, cost });
        Ok(VarId(self.variables.len() - 1))
    }

    /// Adds a row. Coefficients are merged per variable and zeros dropped.
    pub fn add_constraint(
        &mut self,
        id: impl Into<String>,
        coeffs: impl IntoIterator<Item = (VarId, Rational)>,
        kind: RowKind,
        rhs: Rational,
    ) -> Result<RowId> {
        let id = id.into();
        let mut row: Vec<(usize, Rational)> = coeffs.into_iter().map(|(v, c)| (v.0, c)).collect();
        if let Some(&(bad, _)) = row.iter().find(|(v, _)| *v >= self.variables.len()) {
            return Err(Error::IndexMismatch(format!("constraint `{id}` references unknown variable {bad}")));
        }
        self.claim(&id)?;
        row.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, Rational)> = Vec::with_capacity(row.len());
        for (v, c) in row {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        self.constraints.push(Constraint { id, coeffs: merged, kind, rhs });
        Ok(RowId(self.constraints.len() - 1))
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn row_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn var_index(&self, id: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.id == id)
    }

    pub fn objective(&self, x: &[Rational]) -> Rational {
        self.variables.iter().zip(x).map(|(v, xv)| &v.cost * xv).sum()
    }

    /// Human-readable dump with exact `p/q` coefficients.
    pub fn to_lp_text(&self) -> String {
        let mut out = String::new();
        let term = |c: &Rational, name: &str| format!("{c} {name}");
        let sense = match self.sense {
            Sense::Minimize => "minimize",
            Sense::Maximize => "maximize",
        };
        let obj: Vec<String> = self
            .variables
            .iter()
            .filter(|v| !v.cost.is_zero())
            .map(|v| term(&v.cost, &v.id))
            .collect();
        let _ = writeln!(out, "{sense}: {}", if obj.is_empty() { "0".into() } else { obj.join(" + ") });
        let _ = writeln!(out, "subject to");
        for c in &self.constraints {
            let lhs: Vec<String> = c.coeffs.iter().map(|(v, a)| term(a, &self.variables[*v].id)).collect();
            let lhs = if lhs.is_empty() { "0".into() } else { lhs.join(" + ") };
            let _ = writeln!(out, "  {}: {lhs} {} {}", c.id, c.kind.symbol(), c.rhs);
        }
        let free: Vec<&str> = self
            .variables
            .iter()
            .filter(|v| v.kind == VarKind::Free)
            .map(|v| v.id.as_str())
            .collect();
        if !free.is_empty() {
            let _ = writeln!(out, "free {}", free.join(" "));
        }
        out
    }

    fn row_activity(&self, row: &Constraint, x: &[Rational]) -> Rational {
        row.coeffs.iter().map(|(v, a)| a * &x[*v]).sum()
    }

    /// Column `j` of the constraint matrix as `(row, coefficient)` pairs.
    pub fn columns(&self) -> Vec<Vec<(usize, Rational)>> {
        let mut cols = vec![Vec::new(); self.variables.len()];
        for (i, row) in self.constraints.iter().enumerate() {
            for (v, a) in &row.coeffs {
                cols[*v].push((i, a.clone()));
            }
        }
        cols
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Certificate that the LP has no optimum.
#[derive(Debug, Clone, PartialEq)]
pub enum Farkas {
    /// Multipliers `y` (sign-constrained per row kind as for a minimization
    /// dual) with `Aᵀy ≤ 0` on nonnegative variables, `= 0` on free ones, and
    /// `rhsᵀy > 0`.
    Infeasible { y: Vec<Rational> },
    /// A feasible point and a ray of the recession cone improving the objective.
    Unbounded { point: Vec<Rational>, ray: Vec<Rational> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Present when optimal.
    pub value: Option<Rational>,
    pub primal: Vec<Rational>,
    pub duals: Vec<Rational>,
    pub farkas: Option<Farkas>,
}

/// One failed condition found by [`check_feasible`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub id: String,
    /// Signed amount by which the condition fails (`activity − rhs` for rows,
    /// the value itself for sign conditions).
    pub slack: Rational,
}

/// Lists every constraint or sign condition violated by `candidate`.
pub fn check_feasible(instance: &LpInstance, candidate: &[(String, Rational)]) -> Result<Vec<Violation>> {
    let mut x = vec![Rational::zero(); instance.var_count()];
    let index: std::collections::HashMap<&str, usize> =
        instance.variables.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
    for (id, value) in candidate {
        let &i = index
            .get(id.as_str())
            .ok_or_else(|| Error::IndexMismatch(format!("unknown variable `{id}`")))?;
        x[i] = value.clone();
    }
    Ok(violations(instance, &x))
}

/// [`check_feasible`] for a dense point.
pub fn violations(instance: &LpInstance, x: &[Rational]) -> Vec<Violation> {
    let mut out = Vec::new();
    for (v, xv) in instance.variables.iter().zip(x) {
        if v.kind == VarKind::NonNegative && xv.is_negative() {
            out.push(Violation { id: v.id.clone(), slack: xv.clone() });
        }
    }
    for row in &instance.constraints {
        let diff = instance.row_activity(row, x) - &row.rhs;
        let ok = match row.kind {
            RowKind::Le => !diff.is_positive(),
            RowKind::Eq => diff.is_zero(),
            RowKind::Ge => !diff.is_negative(),
        };
        if !ok {
            out.push(Violation { id: row.id.clone(), slack: diff });
        }
    }
    out
}

/// Sign condition on a dual multiplier for the instance's sense.
fn dual_sign_ok(sense: Sense, kind: RowKind, y: &Rational) -> bool {
    let (ge_sign_nonneg, le_sign_nonpos) = match sense {
        Sense::Minimize => (true, true),
        Sense::Maximize => (false, false),
    };
    match kind {
        RowKind::Eq => true,
        RowKind::Ge => {
            if ge_sign_nonneg {
                !y.is_negative()
            } else {
                !y.is_positive()
            }
        }
        RowKind::Le => {
            if le_sign_nonpos {
                !y.is_positive()
            } else {
                !y.is_negative()
            }
        }
    }
}

/// Reduced costs `c_j − Σ_i a_ij y_i`.
pub fn reduced_costs(instance: &LpInstance, y: &[Rational]) -> Vec<Rational> {
    let mut d: Vec<Rational> = instance.variables.iter().map(|v| v.cost.clone()).collect();
    for (row, yi) in instance.constraints.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (v, a) in &row.coeffs {
            d[*v] -= a * yi;
        }
    }
    d
}

/// Dual feasibility of `y` for the instance.
pub fn dual_feasible(instance: &LpInstance, y: &[Rational]) -> bool {
    if y.len() != instance.row_count() {
        return false;
    }
    if !instance
        .constraints
        .iter()
        .zip(y)
        .all(|(row, yi)| dual_sign_ok(instance.sense, row.kind, yi))
    {
        return false;
    }
    let d = reduced_costs(instance, y);
    instance.variables.iter().zip(&d).all(|(v, dj)| match (v.kind, instance.sense) {
        (VarKind::Free, _) => dj.is_zero(),
        (VarKind::NonNegative, Sense::Minimize) => !dj.is_negative(),
        (VarKind::NonNegative, Sense::Maximize) => !dj.is_positive(),
    })
}

pub fn dual_objective(instance: &LpInstance, y: &[Rational]) -> Rational {
    instance.constraints.iter().zip(y).map(|(row, yi)| &row.rhs * yi).sum()
}

/// True iff the solution is optimal, primal feasible, dual feasible, and the
/// two objectives agree exactly.
pub fn check_duality(instance: &LpInstance, solution: &LpSolution) -> bool {
    if solution.status != LpStatus::Optimal || solution.primal.len() != instance.var_count() {
        return false;
    }
    let Some(value) = &solution.value else { return false };
    violations(instance, &solution.primal).is_empty()
        && dual_feasible(instance, &solution.duals)
        && instance.objective(&solution.primal) == *value
        && dual_objective(instance, &solution.duals) == *value
}

/// Verifies a Farkas certificate against the instance.
pub fn check_farkas(instance: &LpInstance, farkas: &Farkas) -> bool {
    match farkas {
        Farkas::Infeasible { y } => {
            if y.len() != instance.row_count() {
                return false;
            }
            let signs_ok = instance
                .constraints
                .iter()
                .zip(y)
                .all(|(row, yi)| dual_sign_ok(Sense::Minimize, row.kind, yi));
            let mut aty = vec![Rational::zero(); instance.var_count()];
            for (row, yi) in instance.constraints.iter().zip(y) {
                for (v, a) in &row.coeffs {
                    aty[*v] += a * yi;
                }
            }
            let cols_ok = instance.variables.iter().zip(&aty).all(|(v, s)| match v.kind {
                VarKind::Free => s.is_zero(),
                VarKind::NonNegative => !s.is_positive(),
            });
            signs_ok && cols_ok && dual_objective(instance, y).is_positive()
        }
        Farkas::Unbounded { point, ray } => {
            if point.len() != instance.var_count() || ray.len() != instance.var_count() {
                return false;
            }
            if !violations(instance, point).is_empty() {
                return false;
            }
            let ray_signs = instance
                .variables
                .iter()
                .zip(ray)
                .all(|(v, r)| v.kind == VarKind::Free || !r.is_negative());
            let ray_rows = instance.constraints.iter().all(|row| {
                let act = instance.row_activity(row, ray);
                match row.kind {
                    RowKind::Le => !act.is_positive(),
                    RowKind::Eq => act.is_zero(),
                    RowKind::Ge => !act.is_negative(),
                }
            });
            let slope = instance.objective(ray);
            let improving = match instance.sense {
                Sense::Minimize => slope.is_negative(),
                Sense::Maximize => slope.is_positive(),
            };
            ray_signs && ray_rows && improving
        }
    }
}
