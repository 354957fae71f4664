//! JSON file formats for dual certificates and randomized protocols.
//!
//! Rationals are strings (`"p/q"`), inputs are named `(x,y)` or by bitstring,
//! labeled blocks by `z:rows:cols` or `z:pattern`. Every document carries
//! `"format_version": 1`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::bounds::{BoundKind, DualCertificate, Epsilon};
use crate::caps::Caps;
use crate::enumerate::{partition_catalog, BlockCatalog};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::relation::{Assignment, Block, LabeledBlock, LabeledPartition, Rectangle, Relation, Shape, Side};
use crate::synth::{DecisionTree, ProtocolTree, RandomizedProtocol, Speaker, SupportEntry, Tree};

pub const FORMAT_VERSION: u64 = 1;

pub fn rat(r: &Rational) -> Value {
    Value::String(r.to_string())
}

fn parse_rat(v: &Value, what: &str) -> Result<Rational> {
    match v {
        Value::String(s) => s.parse().map_err(|e| Error::malformed(format!("{what}: {e}"))),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked"))),
        _ => Err(Error::malformed(format!("{what}: expected a rational string"))),
    }
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| Error::malformed(format!("{what}: missing `{key}`")))
}

fn object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::malformed(format!("{what}: expected an object")))
}

fn str_field<'a>(obj: &'a Map<String, Value>, key: &str, what: &str) -> Result<&'a str> {
    field(obj, key, what)?
        .as_str()
        .ok_or_else(|| Error::malformed(format!("{what}: `{key}` must be a string")))
}

fn index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| Error::malformed(format!("{what}: expected a nonnegative integer")))
}

fn index_list(v: &Value, what: &str) -> Result<Vec<usize>> {
    v.as_array()
        .ok_or_else(|| Error::malformed(format!("{what}: expected an array")))?
        .iter()
        .map(|x| index(x, what))
        .collect()
}

fn check_version(obj: &Map<String, Value>) -> Result<()> {
    match obj.get("format_version") {
        None => Ok(()),
        Some(v) if v.as_u64() == Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(Error::malformed(format!("unsupported format_version {v}"))),
    }
}

fn parse_side(s: &str) -> Result<Side> {
    match s {
        "cc" => Ok(Side::Cc),
        "query" => Ok(Side::Query),
        other => Err(Error::malformed(format!("unknown side `{other}`"))),
    }
}

fn check_side(relation: &Relation, side: Side) -> Result<()> {
    if side != relation.side() {
        return Err(Error::SideMismatch { expected: relation.side().name(), found: side.name() });
    }
    Ok(())
}

fn parse_block_key(key: &str, shape: Shape) -> Result<LabeledBlock> {
    let bad = || Error::malformed(format!("`{key}` is not a labeled block key"));
    let (z, rest) = key.split_once(':').ok_or_else(bad)?;
    let z: usize = z.parse().map_err(|_| bad())?;
    let block = match shape {
        Shape::Cc { .. } => {
            let (rows, cols) = rest.split_once(':').ok_or_else(bad)?;
            let list = |s: &str| -> Result<Vec<usize>> {
                s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
            };
            Block::Rect(Rectangle::from_lists(&list(rows)?, &list(cols)?)?)
        }
        Shape::Query { n } => Block::Assign(Assignment::from_pattern(rest, n)?),
    };
    Ok(LabeledBlock { z, block })
}

fn certificate_catalog(relation: &Relation, kind: BoundKind, caps: &Caps) -> Result<BlockCatalog> {
    match kind {
        BoundKind::Prt => BlockCatalog::new(relation.shape(), caps),
        BoundKind::Pprt => partition_catalog(relation, caps),
    }
}

pub fn certificate_to_json(cert: &DualCertificate, relation: &Relation, caps: &Caps) -> Result<Value> {
    check_side(relation, cert.side)?;
    let shape = relation.shape();
    let per_input = |xs: &[Rational]| -> Value {
        let m: BTreeMap<String, Value> = xs.iter().enumerate().map(|(i, r)| (shape.input_name(i), rat(r))).collect();
        json!(m)
    };
    let mut doc = json!({
        "format_version": FORMAT_VERSION,
        "kind": cert.kind.name(),
        "side": cert.side.name(),
        "eps": cert.eps.to_string(),
        "mu": per_input(&cert.mu),
        "phi": per_input(&cert.phi),
    });
    if let (Some(v), Some(lambda)) = (&cert.v, &cert.lambda) {
        let catalog = certificate_catalog(relation, cert.kind, caps)?;
        let z_count = relation.output_count();
        if v.len() != catalog.len() * z_count {
            return Err(Error::IndexMismatch(format!("certificate has {} v entries for {} labeled blocks", v.len(), catalog.len() * z_count)));
        }
        let vm: BTreeMap<String, Value> = v
            .iter()
            .enumerate()
            .map(|(k, r)| (LabeledBlock { z: k % z_count, block: catalog.block(k / z_count) }.key(shape), rat(r)))
            .collect();
        doc["v"] = json!(vm);
        doc["lambda"] = rat(lambda);
    }
    Ok(doc)
}

/// Reads a certificate for `relation`. Entries left out are zero.
pub fn certificate_from_json(text: &str, relation: &Relation, caps: &Caps) -> Result<DualCertificate> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::malformed(format!("certificate: {e}")))?;
    let obj = object(&doc, "certificate")?;
    check_version(obj)?;
    let kind: BoundKind = str_field(obj, "kind", "certificate")?.parse()?;
    let side = parse_side(str_field(obj, "side", "certificate")?)?;
    check_side(relation, side)?;
    let eps: Epsilon = str_field(obj, "eps", "certificate")?.parse()?;
    let shape = relation.shape();
    let per_input = |key: &str| -> Result<Vec<Rational>> {
        let mut out = vec![Rational::zero(); relation.input_count()];
        if let Some(m) = obj.get(key) {
            for (name, val) in object(m, key)? {
                out[shape.parse_input_name(name)?] = parse_rat(val, &format!("{key} at {name}"))?;
            }
        }
        Ok(out)
    };
    let mu = per_input("mu")?;
    let phi = per_input("phi")?;
    let (v, lambda) = match kind {
        BoundKind::Prt => {
            if obj.contains_key("v") || obj.contains_key("lambda") {
                return Err(Error::malformed("prt certificate carries v or lambda"));
            }
            (None, None)
        }
        BoundKind::Pprt => {
            let catalog = certificate_catalog(relation, kind, caps)?;
            let z_count = relation.output_count();
            let mut v = vec![Rational::zero(); catalog.len() * z_count];
            if let Some(m) = obj.get("v") {
                for (key, val) in object(m, "v")? {
                    let lb = parse_block_key(key, shape)?;
                    let b = catalog
                        .index_of(&lb.block)
                        .ok_or_else(|| Error::IndexMismatch(format!("`{key}` is not a block of this relation")))?;
                    if lb.z >= z_count {
                        return Err(Error::IndexMismatch(format!("`{key}` names output {} of {z_count}", lb.z)));
                    }
                    v[b * z_count + lb.z] = parse_rat(val, &format!("v at {key}"))?;
                }
            }
            let lambda = parse_rat(field(obj, "lambda", "certificate")?, "lambda")?;
            (Some(v), Some(lambda))
        }
    };
    Ok(DualCertificate { kind, side, eps, mu, phi, v, lambda })
}

pub fn partition_to_json(p: &LabeledPartition, shape: Shape) -> Value {
    let blocks: Vec<Value> = p
        .blocks
        .iter()
        .map(|b| match (b.block, shape) {
            (Block::Rect(r), _) => json!({"z": b.z, "rows": r.row_list(), "cols": r.col_list()}),
            (Block::Assign(a), Shape::Query { n }) => json!({"z": b.z, "assignment": a.pattern(n)}),
            (Block::Assign(a), _) => json!({"z": b.z, "assignment": format!("{a:?}")}),
        })
        .collect();
    json!({ "blocks": blocks })
}

pub fn partition_from_json(v: &Value, shape: Shape) -> Result<LabeledPartition> {
    let obj = object(v, "partition")?;
    let blocks = field(obj, "blocks", "partition")?
        .as_array()
        .ok_or_else(|| Error::malformed("partition: `blocks` must be an array"))?;
    let mut out = Vec::with_capacity(blocks.len());
    for b in blocks {
        let bo = object(b, "block")?;
        let z = index(field(bo, "z", "block")?, "block label")?;
        let block = match shape {
            Shape::Cc { .. } => Block::Rect(Rectangle::from_lists(
                &index_list(field(bo, "rows", "block")?, "rows")?,
                &index_list(field(bo, "cols", "block")?, "cols")?,
            )?),
            Shape::Query { n } => Block::Assign(Assignment::from_pattern(str_field(bo, "assignment", "block")?, n)?),
        };
        out.push(LabeledBlock { z, block });
    }
    let p = LabeledPartition::new(shape, out)?;
    p.validate(shape)?;
    Ok(p)
}

pub fn tree_to_json(tree: &Tree) -> Value {
    match tree {
        Tree::Cc(t) => protocol_tree_json(t),
        Tree::Query(t) => decision_tree_json(t),
    }
}

fn protocol_tree_json(t: &ProtocolTree) -> Value {
    match t {
        ProtocolTree::Leaf { out } => json!({ "out": out }),
        ProtocolTree::Node { speaker, send, on0, on1 } => json!({
            "speaker": speaker.tag(),
            "send": send,
            "on0": protocol_tree_json(on0),
            "on1": protocol_tree_json(on1),
        }),
    }
}

fn decision_tree_json(t: &DecisionTree) -> Value {
    match t {
        DecisionTree::Leaf { out } => json!({ "out": out }),
        DecisionTree::Query { var, on0, on1 } => json!({
            "query": var,
            "on0": decision_tree_json(on0),
            "on1": decision_tree_json(on1),
        }),
    }
}

/// Reads a tree and checks it against `shape`.
pub fn tree_from_json(v: &Value, shape: Shape) -> Result<Tree> {
    match shape {
        Shape::Cc { x_size, y_size } => {
            let t = parse_protocol_tree(v)?;
            t.validate(x_size, y_size)?;
            Ok(Tree::Cc(t))
        }
        Shape::Query { n } => {
            let t = parse_decision_tree(v)?;
            t.validate(n)?;
            Ok(Tree::Query(t))
        }
    }
}

fn children(obj: &Map<String, Value>) -> Result<(&Value, &Value)> {
    Ok((field(obj, "on0", "tree node")?, field(obj, "on1", "tree node")?))
}

fn parse_protocol_tree(v: &Value) -> Result<ProtocolTree> {
    let obj = object(v, "tree node")?;
    if let Some(out) = obj.get("out") {
        return Ok(ProtocolTree::Leaf { out: index(out, "leaf output")? });
    }
    let speaker = match str_field(obj, "speaker", "tree node")? {
        "A" => Speaker::Alice,
        "B" => Speaker::Bob,
        other => return Err(Error::MalformedTree(format!("unknown speaker `{other}`"))),
    };
    let send = index_list(field(obj, "send", "tree node")?, "send map")?
        .into_iter()
        .map(|b| u8::try_from(b).map_err(|_| Error::MalformedTree("send map entries must be 0 or 1".into())))
        .collect::<Result<Vec<u8>>>()?;
    let (on0, on1) = children(obj)?;
    Ok(ProtocolTree::Node {
        speaker,
        send,
        on0: Box::new(parse_protocol_tree(on0)?),
        on1: Box::new(parse_protocol_tree(on1)?),
    })
}

fn parse_decision_tree(v: &Value) -> Result<DecisionTree> {
    let obj = object(v, "tree node")?;
    if let Some(out) = obj.get("out") {
        return Ok(DecisionTree::Leaf { out: index(out, "leaf output")? });
    }
    let var = index(field(obj, "query", "tree node")?, "queried variable")?;
    let (on0, on1) = children(obj)?;
    Ok(DecisionTree::Query {
        var,
        on0: Box::new(parse_decision_tree(on0)?),
        on1: Box::new(parse_decision_tree(on1)?),
    })
}

pub fn protocol_to_json(protocol: &RandomizedProtocol) -> Value {
    let support: Vec<Value> = protocol
        .support
        .iter()
        .map(|e| {
            json!({
                "prob": rat(&e.prob),
                "partition": partition_to_json(&e.partition, protocol.shape),
                "tree": tree_to_json(&e.tree),
            })
        })
        .collect();
    json!({
        "format_version": FORMAT_VERSION,
        "side": protocol.side().name(),
        "support": support,
    })
}

/// Reads a protocol over `relation`'s input space. Each support entry needs a
/// tree; its partition is optional and is otherwise read off the tree.
pub fn protocol_from_json(text: &str, relation: &Relation) -> Result<RandomizedProtocol> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::malformed(format!("protocol: {e}")))?;
    let obj = object(&doc, "protocol")?;
    check_version(obj)?;
    check_side(relation, parse_side(str_field(obj, "side", "protocol")?)?)?;
    let shape = relation.shape();
    let entries = field(obj, "support", "protocol")?
        .as_array()
        .ok_or_else(|| Error::malformed("protocol: `support` must be an array"))?;
    let mut support = Vec::with_capacity(entries.len());
    for e in entries {
        let eo = object(e, "support entry")?;
        let prob = parse_rat(field(eo, "prob", "support entry")?, "prob")?;
        let tree = tree_from_json(field(eo, "tree", "support entry")?, shape)?;
        let partition = match eo.get("partition") {
            Some(p) => partition_from_json(p, shape)?,
            None => tree.to_partition(shape)?,
        };
        support.push(SupportEntry { prob, partition, tree });
    }
    let protocol = RandomizedProtocol { shape, support };
    protocol.validate()?;
    Ok(protocol)
}

/// Canonical text for a JSON document: sorted keys, two-space indent.
pub fn canonical(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{compute_bound, verify_dual_certificate, PprtMode};
    use crate::families;
    use crate::synth::run_synth;

    #[test]
    fn certificate_round_trip() {
        let caps = Caps::default();
        for (r, kind) in [
            (families::xor1().unwrap(), BoundKind::Pprt),
            (families::and1().unwrap(), BoundKind::Prt),
            (families::parity(2).unwrap(), BoundKind::Pprt),
        ] {
            let eps = Epsilon::frac(1, 8);
            let report = compute_bound(&r, &eps, kind, PprtMode::Reduced, &caps).unwrap();
            let cert = &report.optimal().unwrap().certificate;
            let text = canonical(&certificate_to_json(cert, &r, &caps).unwrap());
            let back = certificate_from_json(&text, &r, &caps).unwrap();
            assert_eq!(&back, cert);
            let verdict = verify_dual_certificate(&r, &eps, &back, &caps).unwrap();
            assert!(verdict.accepted);
            assert_eq!(Some(&verdict.value), report.value());
        }
    }

    #[test]
    fn sparse_certificate_defaults_to_zero() {
        let r = families::constant_cc(2, 2).unwrap();
        let text = r#"{"kind":"pprt","side":"cc","eps":"0","phi":{"(1,0)":"1"},"lambda":"0"}"#;
        let cert = certificate_from_json(text, &r, &Caps::default()).unwrap();
        assert_eq!(cert.phi[2], Rational::one());
        assert_eq!(cert.objective(), Rational::one());
    }

    #[test]
    fn bad_certificates_are_malformed() {
        let r = families::xor1().unwrap();
        let caps = Caps::default();
        for text in [
            r#"{"kind":"pprt","side":"cc","eps":"0.5","lambda":"0"}"#,
            r#"{"kind":"pprt","side":"cc","eps":"0"}"#,
            r#"{"kind":"prt","side":"cc","eps":"0","mu":{"(2,0)":"1"}}"#,
            r#"{"kind":"pprt","side":"cc","eps":"0","lambda":"0","v":{"0:0,1:9":"1"}}"#,
            r#"{"kind":"prt","side":"cc","eps":"0","format_version":2}"#,
        ] {
            assert!(certificate_from_json(text, &r, &caps).is_err(), "{text}");
        }
        let wrong_side = r#"{"kind":"prt","side":"query","eps":"0"}"#;
        assert!(matches!(certificate_from_json(wrong_side, &r, &caps), Err(Error::SideMismatch { .. })));
    }

    #[test]
    fn protocol_round_trip() {
        let caps = Caps::default();
        for r in [families::greater_than(3).unwrap(), families::majority(3).unwrap()] {
            let report = run_synth(&r, &Epsilon::frac(1, 4), &caps).unwrap();
            let text = canonical(&protocol_to_json(&report.protocol));
            let back = protocol_from_json(&text, &r).unwrap();
            assert_eq!(back, report.protocol);
            assert_eq!(canonical(&protocol_to_json(&back)), text);
        }
    }

    #[test]
    fn protocol_partition_is_optional() {
        let r = families::xor1().unwrap();
        let text = r#"{"side":"cc","support":[{"prob":"1","tree":
            {"speaker":"A","send":[0,1],"on0":{"out":0},"on1":{"out":1}}}]}"#;
        let p = protocol_from_json(text, &r).unwrap();
        assert_eq!(p.support[0].partition.block_count(), 2);
        assert_eq!(p.cost(), 1);
    }

    #[test]
    fn bad_protocols_are_rejected() {
        let r = families::xor1().unwrap();
        for text in [
            r#"{"side":"cc","support":[{"prob":"1/2","tree":{"out":0}}]}"#,
            r#"{"side":"cc","support":[{"prob":"1","tree":{"speaker":"A","send":[0],"on0":{"out":0},"on1":{"out":1}}}]}"#,
            r#"{"side":"cc","support":[{"prob":"1","tree":{"speaker":"C","send":[0,1],"on0":{"out":0},"on1":{"out":1}}}]}"#,
            r#"{"side":"cc","support":[{"prob":"1","tree":{"out":0},"partition":{"blocks":[{"z":0,"rows":[0],"cols":[0,1]}]}}]}"#,
        ] {
            assert!(protocol_from_json(text, &r).is_err(), "{text}");
        }
    }
}
