//! Two-phase revised simplex over exact rationals.
//!
//! Internally every row is scaled so its right-hand side is nonnegative, free
//! variables are split into a difference of two nonnegative columns, `≤` rows
//! get a slack and `≥` rows a surplus, and every `≥`/`=` row gets an
//! artificial column. Column order is structural (split pairs adjacent), then
//! slacks, then artificials; Bland's rule breaks every tie by that order.

use super::{Farkas, LpInstance, LpSolution, LpStatus, RowKind, Sense, VarKind};
use crate::rational::Rational;

/// Entering-variable rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Lowest-index improving column; lowest-index leaving row on ratio ties.
    #[default]
    Bland,
    /// Most negative reduced cost, switching to Bland's rule after every
    /// degenerate pivot until the objective moves again (so it cannot cycle).
    DantzigBlandFallback,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub phase1_pivots: usize,
    pub phase2_pivots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Plus(usize),
    Minus(usize),
    Slack,
    Artificial,
}

struct Standard {
    m: usize,
    cols: Vec<Vec<(usize, Rational)>>,
    kinds: Vec<ColKind>,
    cost: Vec<Rational>,
    b: Vec<Rational>,
    /// Original row for each standard row, and whether it was negated.
    row_of: Vec<usize>,
    negated: Vec<bool>,
}

enum Prep {
    Ready(Standard),
    /// An empty row that can never hold; carries its Farkas vector.
    Infeasible(Vec<Rational>),
}

fn standardize(lp: &LpInstance) -> Prep {
    let n_orig = lp.var_count();
    let mut row_of = Vec::new();
    let mut negated = Vec::new();
    let mut kinds_std = Vec::new();
    let mut b = Vec::new();
    for (i, row) in lp.constraints().iter().enumerate() {
        if row.coeffs.is_empty() {
            let holds = match row.kind {
                RowKind::Le => !row.rhs.is_negative(),
                RowKind::Eq => row.rhs.is_zero(),
                RowKind::Ge => !row.rhs.is_positive(),
            };
            if !holds {
                let mut y = vec![Rational::zero(); lp.row_count()];
                y[i] = if row.rhs.is_positive() { Rational::one() } else { -Rational::one() };
                return Prep::Infeasible(y);
            }
            continue;
        }
        let neg = row.rhs.is_negative();
        let kind = match (row.kind, neg) {
            (RowKind::Le, true) => RowKind::Ge,
            (RowKind::Ge, true) => RowKind::Le,
            (k, _) => k,
        };
        row_of.push(i);
        negated.push(neg);
        kinds_std.push(kind);
        b.push(if neg { -&row.rhs } else { row.rhs.clone() });
    }
    let m = row_of.len();
    let mut std_index = vec![usize::MAX; lp.row_count()];
    for (k, &i) in row_of.iter().enumerate() {
        std_index[i] = k;
    }

    let mut struct_cols: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n_orig];
    for (i, row) in lp.constraints().iter().enumerate() {
        let k = std_index[i];
        if k == usize::MAX {
            continue;
        }
        for (v, a) in &row.coeffs {
            struct_cols[*v].push((k, if negated[k] { -a } else { a.clone() }));
        }
    }

    let sign = |c: &Rational| if lp.sense == Sense::Maximize { -c } else { c.clone() };
    let mut cols = Vec::new();
    let mut kinds = Vec::new();
    let mut cost = Vec::new();
    for (j, (var, col)) in lp.variables().iter().zip(struct_cols).enumerate() {
        let c = sign(&var.cost);
        if var.kind == VarKind::Free {
            let minus: Vec<(usize, Rational)> = col.iter().map(|(r, a)| (*r, -a)).collect();
            cols.push(col);
            kinds.push(ColKind::Plus(j));
            cost.push(c.clone());
            cols.push(minus);
            kinds.push(ColKind::Minus(j));
            cost.push(-c);
        } else {
            cols.push(col);
            kinds.push(ColKind::Plus(j));
            cost.push(c);
        }
    }
    for (k, kind) in kinds_std.iter().enumerate() {
        match kind {
            RowKind::Le => {
                cols.push(vec![(k, Rational::one())]);
                kinds.push(ColKind::Slack);
                cost.push(Rational::zero());
            }
            RowKind::Ge => {
                cols.push(vec![(k, -Rational::one())]);
                kinds.push(ColKind::Slack);
                cost.push(Rational::zero());
            }
            RowKind::Eq => {}
        }
    }
    for (k, kind) in kinds_std.iter().enumerate() {
        if *kind != RowKind::Le {
            cols.push(vec![(k, Rational::one())]);
            kinds.push(ColKind::Artificial);
            cost.push(Rational::zero());
        }
    }
    Prep::Ready(Standard { m, cols, kinds, cost, b, row_of, negated })
}

struct Tableau<'a> {
    s: &'a Standard,
    binv: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    xb: Vec<Rational>,
    rule: PivotRule,
}

enum Step {
    Optimal,
    Unbounded(usize, Vec<Rational>),
    Pivoted { degenerate: bool },
}

impl<'a> Tableau<'a> {
    fn new(s: &'a Standard, rule: PivotRule) -> Self {
        let m = s.m;
        let mut basis = vec![usize::MAX; m];
        // slack of each `≤` row, else its artificial; both are +1 unit columns
        for (j, (col, kind)) in s.cols.iter().zip(&s.kinds).enumerate() {
            let unit_plus = col.len() == 1 && col[0].1 == Rational::one();
            if unit_plus && matches!(kind, ColKind::Slack | ColKind::Artificial) && basis[col[0].0] == usize::MAX {
                basis[col[0].0] = j;
            }
        }
        debug_assert!(basis.iter().all(|&j| j != usize::MAX));
        let mut is_basic = vec![false; s.cols.len()];
        for &j in &basis {
            is_basic[j] = true;
        }
        let binv = (0..m)
            .map(|i| (0..m).map(|k| if i == k { Rational::one() } else { Rational::zero() }).collect())
            .collect();
        Tableau { s, binv, basis, is_basic, xb: s.b.clone(), rule }
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let m = self.s.m;
        let mut y = vec![Rational::zero(); m];
        for (i, &j) in self.basis.iter().enumerate() {
            let cb = &cost[j];
            if cb.is_zero() {
                continue;
            }
            for (yk, bik) in y.iter_mut().zip(&self.binv[i]) {
                if !bik.is_zero() {
                    *yk += cb * bik;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[Rational], y: &[Rational]) -> Rational {
        let mut d = cost[j].clone();
        for (r, a) in &self.s.cols[j] {
            if !y[*r].is_zero() {
                d -= a * &y[*r];
            }
        }
        d
    }

    fn column(&self, j: usize) -> Vec<Rational> {
        let mut u = vec![Rational::zero(); self.s.m];
        for (r, a) in &self.s.cols[j] {
            for (ui, row) in u.iter_mut().zip(&self.binv) {
                if !row[*r].is_zero() {
                    *ui += &row[*r] * a;
                }
            }
        }
        u
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.xb).map(|(&j, x)| &cost[j] * x).sum()
    }

    fn pivot(&mut self, r: usize, q: usize, u: &[Rational]) {
        let piv = u[r].clone();
        let theta = &self.xb[r] / &piv;
        for k in 0..self.s.m {
            self.binv[r][k] = &self.binv[r][k] / &piv;
        }
        let pivot_row = self.binv[r].clone();
        for i in 0..self.s.m {
            if i == r || u[i].is_zero() {
                continue;
            }
            let f = &u[i];
            for (bik, prk) in self.binv[i].iter_mut().zip(&pivot_row) {
                if !prk.is_zero() {
                    *bik -= f * prk;
                }
            }
            self.xb[i] -= f * &theta;
        }
        self.xb[r] = theta;
        self.is_basic[self.basis[r]] = false;
        self.basis[r] = q;
        self.is_basic[q] = true;
    }

    fn step(&mut self, cost: &[Rational], use_bland: bool) -> Step {
        let y = self.duals(cost);
        let mut entering: Option<(usize, Rational)> = None;
        for j in 0..self.s.cols.len() {
            if self.is_basic[j] || self.s.kinds[j] == ColKind::Artificial {
                continue;
            }
            let d = self.reduced_cost(j, cost, &y);
            if !d.is_negative() {
                continue;
            }
            if use_bland {
                entering = Some((j, d));
                break;
            }
            if entering.as_ref().is_none_or(|(_, best)| d < *best) {
                entering = Some((j, d));
            }
        }
        let Some((q, _)) = entering else { return Step::Optimal };
        let u = self.column(q);
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..self.s.m {
            if !u[i].is_positive() {
                continue;
            }
            let ratio = &self.xb[i] / &u[i];
            let better = match &leave {
                None => true,
                Some((r, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*r]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        match leave {
            None => Step::Unbounded(q, u),
            Some((r, ratio)) => {
                self.pivot(r, q, &u);
                Step::Pivoted { degenerate: ratio.is_zero() }
            }
        }
    }

    /// Runs to optimality or unboundedness; returns pivots made.
    fn run(&mut self, cost: &[Rational]) -> (usize, Option<(usize, Vec<Rational>)>) {
        let mut pivots = 0;
        let mut bland = self.rule == PivotRule::Bland;
        loop {
            match self.step(cost, bland) {
                Step::Optimal => return (pivots, None),
                Step::Unbounded(q, u) => return (pivots, Some((q, u))),
                Step::Pivoted { degenerate } => {
                    pivots += 1;
                    if self.rule == PivotRule::DantzigBlandFallback {
                        bland = degenerate;
                    }
                }
            }
        }
    }

    /// Pivots basic artificials (all at level zero) out wherever some
    /// non-artificial column has a nonzero entry in their row.
    fn drive_out_artificials(&mut self) {
        for r in 0..self.s.m {
            if self.s.kinds[self.basis[r]] != ColKind::Artificial {
                continue;
            }
            let found = (0..self.s.cols.len()).find(|&j| {
                !self.is_basic[j]
                    && self.s.kinds[j] != ColKind::Artificial
                    && !self.s.cols[j]
                        .iter()
                        .map(|(k, a)| &self.binv[r][*k] * a)
                        .sum::<Rational>()
                        .is_zero()
            });
            if let Some(j) = found {
                let u = self.column(j);
                self.pivot(r, j, &u);
            }
        }
    }

    fn std_point(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.s.cols.len()];
        for (i, &j) in self.basis.iter().enumerate() {
            x[j] = self.xb[i].clone();
        }
        x
    }
}

fn to_original(lp: &LpInstance, s: &Standard, x_std: &[Rational]) -> Vec<Rational> {
    let mut x = vec![Rational::zero(); lp.var_count()];
    for (j, kind) in s.kinds.iter().enumerate() {
        match kind {
            ColKind::Plus(v) => x[*v] += &x_std[j],
            ColKind::Minus(v) => x[*v] -= &x_std[j],
            _ => {}
        }
    }
    x
}

fn duals_to_original(lp: &LpInstance, s: &Standard, y_std: &[Rational], flip: bool) -> Vec<Rational> {
    let mut y = vec![Rational::zero(); lp.row_count()];
    for (k, yk) in y_std.iter().enumerate() {
        let mut v = if s.negated[k] { -yk } else { yk.clone() };
        if flip {
            v = -v;
        }
        y[s.row_of[k]] = v;
    }
    y
}

/// Solves with the default pivot rule (Bland's).
pub fn solve_lp(lp: &LpInstance) -> LpSolution {
    solve_lp_with(lp, PivotRule::default()).0
}

pub fn solve_lp_with(lp: &LpInstance, rule: PivotRule) -> (LpSolution, SolveStats) {
    let mut stats = SolveStats::default();
    let s = match standardize(lp) {
        Prep::Infeasible(y) => {
            return (
                LpSolution {
                    status: LpStatus::Infeasible,
                    value: None,
                    primal: Vec::new(),
                    duals: Vec::new(),
                    farkas: Some(Farkas::Infeasible { y }),
                },
                stats,
            )
        }
        Prep::Ready(s) => s,
    };
    let mut t = Tableau::new(&s, rule);

    let phase1: Vec<Rational> = s
        .kinds
        .iter()
        .map(|k| if *k == ColKind::Artificial { Rational::one() } else { Rational::zero() })
        .collect();
    let (p1, _) = t.run(&phase1);
    stats.phase1_pivots = p1;
    if t.objective(&phase1).is_positive() {
        let y = t.duals(&phase1);
        return (
            LpSolution {
                status: LpStatus::Infeasible,
                value: None,
                primal: Vec::new(),
                duals: Vec::new(),
                farkas: Some(Farkas::Infeasible { y: duals_to_original(lp, &s, &y, false) }),
            },
            stats,
        );
    }
    t.drive_out_artificials();

    let (p2, unbounded) = t.run(&s.cost);
    stats.phase2_pivots = p2;
    let point = to_original(lp, &s, &t.std_point());
    if let Some((q, u)) = unbounded {
        let mut d = vec![Rational::zero(); s.cols.len()];
        d[q] = Rational::one();
        for (i, &j) in t.basis.iter().enumerate() {
            d[j] = -&u[i];
        }
        let ray = to_original(lp, &s, &d);
        return (
            LpSolution {
                status: LpStatus::Unbounded,
                value: None,
                primal: point.clone(),
                duals: Vec::new(),
                farkas: Some(Farkas::Unbounded { point, ray }),
            },
            stats,
        );
    }
    let y = t.duals(&s.cost);
    let duals = duals_to_original(lp, &s, &y, lp.sense == Sense::Maximize);
    let value = lp.objective(&point);
    (
        LpSolution { status: LpStatus::Optimal, value: Some(value), primal: point, duals, farkas: None },
        stats,
    )
}
