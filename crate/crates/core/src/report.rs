//! Text tables and canonical JSON for pipeline results.
//!
//! Exact quantities are always rationals; decimals appear only in text, with
//! six significant digits and marked approximate.

use std::fmt::Write;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::bounds::{BoundReport, BoundResult, CertVerdict, Epsilon};
use crate::error::{Error, Result};
use crate::io::{canonical, partition_to_json, rat, FORMAT_VERSION};
use crate::oracles::{ComplexityValue, CrossCheck};
use crate::rational::Rational;
use crate::relation::{Relation, Shape};
use crate::synth::{Evaluation, ProtocolCheck, RandomizedProtocol, SynthReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            other => Err(Error::malformed(format!("unknown format `{other}`"))),
        }
    }
}

struct Table(Vec<(String, String)>);

impl Table {
    fn new() -> Self {
        Table(Vec::new())
    }

    fn row(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.0.push((key.to_string(), value.to_string()));
        self
    }

    fn render(&self) -> String {
        let width = self.0.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
        let mut out = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(out, "{k:<width$}  {v}");
        }
        out
    }
}

fn approx(r: &Rational) -> String {
    format!("{} (approximate)", r.approx())
}

fn shape_name(shape: Shape) -> String {
    match shape {
        Shape::Cc { x_size, y_size } => format!("{x_size}x{y_size} grid"),
        Shape::Query { n } => format!("{n} variables"),
    }
}

fn shape_json(shape: Shape) -> Value {
    match shape {
        Shape::Cc { x_size, y_size } => json!({"x_size": x_size, "y_size": y_size}),
        Shape::Query { n } => json!({ "n": n }),
    }
}

fn eps_text(eps: &Epsilon) -> String {
    if eps.value().is_zero() {
        "0 (zero-error extension)".into()
    } else {
        format!("{eps} = {}", approx(eps.value()))
    }
}

pub fn bound_json(report: &BoundReport) -> Value {
    let mut doc = json!({
        "format_version": FORMAT_VERSION,
        "kind": report.kind.name(),
        "side": report.side.name(),
        "shape": shape_json(report.shape),
        "eps": report.eps.to_string(),
        "eps_zero_extension": report.eps.value().is_zero(),
        "mode": report.mode.map(|m| m.name()),
        "lp": {"variables": report.lp_size.0, "rows": report.lp_size.1},
    });
    match &report.result {
        BoundResult::Optimal(v) => {
            doc["status"] = json!("optimal");
            doc["value"] = rat(&v.value);
            doc["log2_bracket"] = json!([v.log2_floor, v.log2_ceil]);
            doc["duality_checked"] = json!(v.duality_checked);
            doc["certificate_value"] = rat(&v.certificate.objective());
            doc["block_weights"] = v
                .block_weights
                .iter()
                .map(|(b, w)| json!({"block": b.key(report.shape), "weight": rat(w)}))
                .collect();
            if report.mode.is_some() {
                doc["partition_weights"] = v
                    .partition_weights
                    .iter()
                    .map(|(p, w)| json!({"partition": partition_to_json(p, report.shape), "weight": rat(w)}))
                    .collect();
            }
        }
        BoundResult::Infeasible { reason } => {
            doc["status"] = json!("infeasible");
            doc["reason"] = json!(reason);
        }
    }
    doc
}

pub fn bound_text(report: &BoundReport) -> String {
    let mut t = Table::new();
    t.row("kind", report.kind.name())
        .row("side", report.side.name())
        .row("input space", shape_name(report.shape))
        .row("eps", eps_text(&report.eps));
    if let Some(m) = report.mode {
        t.row("formulation", m.name());
    }
    t.row("lp size", format!("{} variables, {} rows", report.lp_size.0, report.lp_size.1));
    match &report.result {
        BoundResult::Optimal(v) => {
            t.row("V (exact)", &v.value)
                .row("V", approx(&v.value))
                .row("log2 V bracket", format!("[{},{}]", v.log2_floor, v.log2_ceil))
                .row("log2 V", format!("{} (approximate)", crate::rational::format_sig(v.log2_approx(), 6)))
                .row("primal = dual", if v.duality_checked { "checked exactly" } else { "NOT checked" })
                .row("certified lower bound", v.certificate.objective());
            if report.mode.is_some() {
                t.row("support size", v.partition_weights.len());
            }
        }
        BoundResult::Infeasible { reason } => {
            t.row("status", "infeasible").row("reason", reason);
        }
    }
    t.render()
}

pub fn verdict_json(verdict: &CertVerdict, relation: &Relation) -> Value {
    let mut doc = json!({
        "format_version": FORMAT_VERSION,
        "accepted": verdict.accepted,
        "value": rat(&verdict.value),
        "violations": verdict.violations,
    });
    if let Some((min, p)) = &verdict.separation {
        doc["separation"] = json!({"sum": rat(min), "partition": partition_to_json(p, relation.shape())});
    }
    doc
}

pub fn verdict_text(verdict: &CertVerdict) -> String {
    let mut t = Table::new();
    t.row("certificate", if verdict.accepted { "accepted" } else { "REJECTED" })
        .row("value (exact)", &verdict.value)
        .row("value", approx(&verdict.value));
    if let Some((min, _)) = &verdict.separation {
        t.row("min partition sum of v", min);
    }
    let mut out = t.render();
    for v in &verdict.violations {
        let _ = writeln!(out, "violated: {v}");
    }
    out
}

fn protocol_summary(protocol: &RandomizedProtocol) -> Value {
    protocol
        .support
        .iter()
        .map(|e| {
            json!({
                "prob": rat(&e.prob),
                "blocks": e.partition.block_count(),
                "max_assignment": e.partition.max_assignment_size(),
                "depth": e.tree.depth(),
            })
        })
        .collect()
}

pub fn evaluation_json(evaluation: &Evaluation, relation: &Relation) -> Value {
    let shape = relation.shape();
    let correctness: serde_json::Map<String, Value> = evaluation
        .correctness
        .iter()
        .enumerate()
        .map(|(i, c)| (shape.input_name(i), rat(c)))
        .collect();
    json!({
        "correctness": correctness,
        "worst_error": rat(&evaluation.worst_error),
        "worst_input": shape.input_name(evaluation.worst_input()),
        "cost": evaluation.cost,
    })
}

fn evaluation_rows(t: &mut Table, evaluation: &Evaluation, relation: &Relation) {
    t.row("worst-case error (exact)", &evaluation.worst_error)
        .row("worst-case error", approx(&evaluation.worst_error))
        .row("worst input", relation.shape().input_name(evaluation.worst_input()))
        .row("cost", evaluation.cost);
}

pub fn synth_json(report: &SynthReport, relation: &Relation) -> Value {
    let tr = &report.truncation;
    json!({
        "format_version": FORMAT_VERSION,
        "bound": bound_json(&report.bound),
        "truncation": {
            "threshold": tr.threshold.as_ref().map(rat),
            "delta": rat(&tr.delta),
            "kept": tr.kept.len(),
            "dropped": tr.dropped.len(),
        },
        "support": protocol_summary(&report.protocol),
        "evaluation": evaluation_json(&report.evaluation, relation),
        "budget": report.budget,
        "checks": {
            "delta_within_eps": report.delta_within_eps(),
            "error_within_twice_eps": report.error_within_twice_eps(),
            "within_budget": report.within_budget(),
        },
    })
}

pub fn synth_text(report: &SynthReport, relation: &Relation) -> String {
    let tr = &report.truncation;
    let mut t = Table::new();
    t.row("side", report.bound.side.name())
        .row("input space", shape_name(report.bound.shape))
        .row("eps", eps_text(&report.bound.eps))
        .row("V = pprt (exact)", report.value())
        .row("V", approx(report.value()))
        .row("truncation threshold", tr.threshold.as_ref().map_or("none (eps = 0)".to_string(), |x| x.to_string()))
        .row("dropped mass delta", &tr.delta)
        .row("support kept / dropped", format!("{} / {}", tr.kept.len(), tr.dropped.len()));
    evaluation_rows(&mut t, &report.evaluation, relation);
    t.row("budget", report.budget.map_or("none (eps = 0)".to_string(), |b| b.to_string()))
        .row("delta <= eps", report.delta_within_eps())
        .row("error <= 2 eps", report.error_within_twice_eps())
        .row("cost <= budget", report.within_budget());
    let mut out = t.render();
    out.push_str("support:\n");
    for e in &report.protocol.support {
        let _ = writeln!(
            out,
            "  prob {:<12} blocks {:<3} depth {}",
            e.prob.to_string(),
            e.partition.block_count(),
            e.tree.depth()
        );
    }
    out
}

pub fn protocol_check_json(check: &ProtocolCheck, relation: &Relation) -> Value {
    json!({
        "format_version": FORMAT_VERSION,
        "evaluation": evaluation_json(&check.evaluation, relation),
        "pprt_at_error": check.pprt_at_error.as_ref().map(rat),
        "cost_bound": rat(&check.cost_bound),
        "pass": check.pass(),
    })
}

pub fn protocol_check_text(check: &ProtocolCheck, relation: &Relation) -> String {
    let mut t = Table::new();
    evaluation_rows(&mut t, &check.evaluation, relation);
    t.row(
        "pprt at measured error",
        check.pprt_at_error.as_ref().map_or("n/a (error is 1)".to_string(), |v| v.to_string()),
    )
    .row("cost bound", &check.cost_bound)
    .row("pprt <= cost bound", if check.pass() { "yes" } else { "NO" });
    t.render()
}

pub fn oracle_json(value: &ComplexityValue, cross: Option<&CrossCheck>) -> Value {
    let mut doc = json!({
        "format_version": FORMAT_VERSION,
        "measure": value.measure.name(),
        "value": value.value,
        "witness": crate::io::tree_to_json(&value.witness),
    });
    if let Some(c) = cross {
        doc["crosscheck"] = json!({
            "reduced": c.reduced.as_ref().map(rat),
            "direct": c.direct.as_ref().map(rat),
            "exhaustive": c.exhaustive.as_ref().map(rat),
            "pass": c.pass(),
            "discrepancies": c.discrepancies,
        });
    }
    doc
}

pub fn oracle_text(value: &ComplexityValue, cross: Option<&CrossCheck>) -> String {
    let mut t = Table::new();
    t.row("measure", value.measure.name()).row("value", value.value).row("witness depth", value.witness.depth());
    if let Some(c) = cross {
        let show = |v: &Option<Rational>| v.as_ref().map_or("-".to_string(), |r| r.to_string());
        t.row("pprt reduced", show(&c.reduced))
            .row("pprt direct", show(&c.direct))
            .row("exhaustive minimum", show(&c.exhaustive))
            .row("crosscheck", if c.pass() { "pass".to_string() } else { c.discrepancies.join("; ") });
    }
    t.render()
}

/// Renders `json` canonically or `text` as is.
pub fn emit(format: Format, text: impl FnOnce() -> String, json: impl FnOnce() -> Value) -> String {
    match format {
        Format::Text => text(),
        Format::Json => canonical(&json()),
    }
}
