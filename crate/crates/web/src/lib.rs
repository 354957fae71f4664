//! Browser bindings. Each export takes a relation (JSON text, or a built-in
//! family name such as `eq:3`) and returns a plain-text report.

use pbl_core::bounds::{compute_bound, BoundKind, Epsilon, PprtMode};
use pbl_core::oracles::{crosscheck_pprt, det_cc, det_query};
use pbl_core::report;
use pbl_core::synth::run_synth;
use pbl_core::{families, Caps, Relation, Side};
use wasm_bindgen::prelude::*;

fn relation(source: &str) -> Result<Relation, String> {
    let source = source.trim();
    if source.starts_with('{') {
        Relation::from_json_str(source).map_err(|e| e.to_string())
    } else {
        families::by_name(source).map_err(|e| e.to_string())
    }
}

fn eps(text: &str) -> Result<Epsilon, String> {
    text.trim().parse().map_err(|e: pbl_core::Error| e.to_string())
}

/// prt and pprt side by side, each with its certified lower bound.
pub fn bounds_report(source: &str, eps_text: &str) -> Result<String, String> {
    let r = relation(source)?;
    let e = eps(eps_text)?;
    let caps = Caps::default();
    let mut out = String::new();
    for kind in [BoundKind::Prt, BoundKind::Pprt] {
        let rep = compute_bound(&r, &e, kind, PprtMode::Reduced, &caps).map_err(|e| e.to_string())?;
        out.push_str(&report::bound_text(&rep));
        out.push('\n');
    }
    Ok(out)
}

/// The full synthesis pipeline; `seed` drives one sampled run per input.
pub fn synth_report(source: &str, eps_text: &str, seed: u64) -> Result<String, String> {
    let r = relation(source)?;
    let e = eps(eps_text)?;
    let rep = run_synth(&r, &e, &Caps::default()).map_err(|e| e.to_string())?;
    let mut out = report::synth_text(&rep, &r);
    let shape = r.shape();
    let runs: Vec<String> = (0..r.input_count())
        .map(|i| format!("{} -> {}", shape.input_name(i), r.outputs()[rep.protocol.run(i, seed.wrapping_add(i as u64))]))
        .collect();
    out.push_str(&format!("sampled run (seed {seed}): {}\n", runs.join(", ")));
    Ok(out)
}

/// Deterministic complexity, plus the zero-error pprt cross-check.
pub fn oracle_report(source: &str) -> Result<String, String> {
    let r = relation(source)?;
    let caps = Caps::default();
    let value = match r.side() {
        Side::Cc => det_cc(&r, &caps),
        Side::Query => det_query(&r, &caps),
    }
    .map_err(|e| e.to_string())?;
    let cross = crosscheck_pprt(&r, &Epsilon::zero(), &caps).ok();
    Ok(report::oracle_text(&value, cross.as_ref()))
}

/// Relation document for a family name, to prefill the editor.
pub fn family_json(name: &str) -> Result<String, String> {
    let r = families::by_name(name.trim()).map_err(|e| e.to_string())?;
    Ok(r.to_json().to_string())
}

#[wasm_bindgen]
pub fn bounds(source: &str, eps: &str) -> Result<String, JsValue> {
    bounds_report(source, eps).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn synthesize(source: &str, eps: &str, seed: u32) -> Result<String, JsValue> {
    synth_report(source, eps, seed.into()).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn deterministic(source: &str) -> Result<String, JsValue> {
    oracle_report(source).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn family(name: &str) -> Result<String, JsValue> {
    family_json(name).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_for_a_family_and_a_document() {
        let text = bounds_report("xor1", "0").unwrap();
        assert_eq!(text.matches("V (exact)").count(), 2);
        let doc = family_json("and1").unwrap();
        assert!(bounds_report(&doc, "1/8").unwrap().contains("kind"));
    }

    #[test]
    fn synthesis_reports_sampled_runs() {
        let text = synth_report("parity:2", "1/4", 9).unwrap();
        assert!(text.contains("sampled run (seed 9)"));
        for check in ["delta <= eps", "error <= 2 eps", "cost <= budget"] {
            let line = text.lines().find(|l| l.starts_with(check)).unwrap();
            assert!(line.ends_with("true"), "{line}");
        }
    }

    #[test]
    fn oracle_includes_crosscheck() {
        let text = oracle_report("and1").unwrap();
        assert!(text.contains("crosscheck"));
        assert!(text.contains("pass"));
    }

    #[test]
    fn bad_input_is_an_error_message() {
        assert!(bounds_report("{not json", "0").is_err());
        assert!(bounds_report("xor1", "1/0").is_err());
        assert!(synth_report("eq:4", "1/8", 0).unwrap_err().contains("cap exceeded"));
    }
}
