//! JSON renderings of analyses, certificates, descriptors and reports.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use confsect_core::builders::{build, extend_to_full, IdentifyingFunction, Method, PartialIdentifyingFunction, Section};
use confsect_core::complex::{all_faces, ComplexStats, Skeleton};
use confsect_core::graph::{core_reduction, Graph};
use confsect_core::search::{predict, Certificate, Prediction, Reason, TraceEvent, Verdict};
use confsect_core::verify::{VerificationReport, ViolationKind};
use serde_json::{json, Map, Value};

use crate::io::{component_to_json, configuration_to_json, graph_from_json, graph_to_json, point_from_json, point_to_json};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn prediction_name(p: &Prediction) -> &'static str {
    match p {
        Prediction::Exists(_) => "exists",
        Prediction::NotExists(_) => "not_exists",
        Prediction::Unknown(_) => "unknown",
    }
}

/// The published result a prediction rests on.
pub fn cite(g: &Graph, n: usize, p: &Prediction) -> Option<&'static str> {
    let chi = g.euler_characteristic();
    match p {
        Prediction::Unknown(_) => None,
        _ if chi == 1 => Some("Theorem 3"),
        _ if chi == 0 => Some("Theorem 2"),
        Prediction::NotExists(_) => Some("Theorem 1"),
        Prediction::Exists(_) if n == 1 => Some("Section 3"),
        Prediction::Exists(_) => Some("Section 7"),
    }
}

pub fn analysis(g: &Graph, n: usize) -> Value {
    let p = predict(g, n);
    let reason = match &p {
        Prediction::Exists(r) | Prediction::NotExists(r) | Prediction::Unknown(r) => *r,
    };
    let mut out = Map::new();
    out.insert("chi".into(), json!(g.euler_characteristic()));
    out.insert("predict".into(), json!(prediction_name(&p)));
    out.insert("cite".into(), json!(cite(g, n, &p)));
    out.insert("reason".into(), json!(reason));
    out.insert("n".into(), json!(n));
    out.insert("class".into(), json!(g.classify_core().as_str()));
    out.insert(
        "core".into(),
        match core_reduction(g) {
            Ok(r) => graph_to_json(&r.core),
            Err(_) => Value::Null,
        },
    );
    out.insert("version".into(), json!(VERSION));
    Value::Object(out)
}

pub fn stats(n: usize, s: &ComplexStats) -> Value {
    json!({
        "n": n,
        "cells": s.cells_per_dim,
        "euler": s.euler,
        "dim": s.dim,
        "skeleton_components": s.component_count,
        "version": VERSION,
    })
}

fn reason_json(g: &Graph, sk: &Skeleton, r: &Reason) -> Value {
    match r {
        Reason::Edge(i) => json!({ "edge": sk.edges[*i].face.id(g) }),
        Reason::PairForce { class, witness } => json!({ "pair_force": { "class": class, "witness": sk.nodes[*witness].id(g) } }),
        Reason::PairExclude { class, witness } => {
            json!({ "pair_exclude": { "class": class, "witness": sk.nodes[*witness].id(g) } })
        }
    }
}

pub fn trace_json(g: &Graph, sk: &Skeleton, trace: &[TraceEvent]) -> Value {
    let face = |i: &usize| sk.nodes[*i].id(g);
    Value::Array(
        trace
            .iter()
            .map(|ev| match ev {
                TraceEvent::Decide { face: f, value } => json!({ "decide": { "face": face(f), "component": value } }),
                TraceEvent::Prune { face: f, value, reason } => {
                    json!({ "prune": { "face": face(f), "component": value, "reason": reason_json(g, sk, reason) } })
                }
                TraceEvent::Conflict { face: f } => json!({ "conflict": { "face": face(f) } }),
            })
            .collect(),
    )
}

pub struct SearchSettings {
    pub n: usize,
    pub pairs: bool,
    pub seed: Option<u64>,
    pub budget: u64,
}

pub fn certificate(g: &Graph, sk: &Skeleton, c: &Certificate, s: &SearchSettings) -> Value {
    let mut out = Map::new();
    let result = match &c.verdict {
        Verdict::Sat(_) => "sat",
        Verdict::Unsat(_) => "unsat",
        Verdict::Inconclusive => "inconclusive",
    };
    out.insert("result".into(), json!(result));
    match &c.verdict {
        Verdict::Sat(l) => {
            let labels: Map<String, Value> =
                sk.nodes.iter().zip(&l.labels).map(|(f, comp)| (f.id(g), component_to_json(g, comp))).collect();
            out.insert("labeling".into(), Value::Object(labels));
        }
        Verdict::Unsat(trace) => {
            out.insert("trace".into(), trace_json(g, sk, trace));
        }
        Verdict::Inconclusive => {}
    }
    out.insert("flags".into(), json!(c.flags.iter().map(|f| f.as_str()).collect::<Vec<_>>()));
    out.insert("steps".into(), json!(c.steps));
    out.insert("n".into(), json!(s.n));
    out.insert("pairs".into(), json!(s.pairs));
    out.insert("seed".into(), json!(s.seed));
    out.insert("budget".into(), json!(s.budget));
    out.insert("version".into(), json!(VERSION));
    Value::Object(out)
}

pub fn descriptor(g: &Graph, f: &IdentifyingFunction, w: Option<&str>) -> Value {
    let mut out = Map::new();
    out.insert("method".into(), json!(f.method().as_str()));
    out.insert("n".into(), json!(f.n));
    out.insert("w".into(), json!(w));
    out.insert("graph".into(), graph_to_json(g));
    if let Section::Extended(pf) = &f.kind {
        let values: Map<String, Value> = pf.values.iter().map(|(face, p)| (face.id(g), point_to_json(g, p))).collect();
        out.insert("values".into(), Value::Object(values));
    }
    out.insert("version".into(), json!(VERSION));
    Value::Object(out)
}

/// Rebuilds the function a descriptor names.
pub fn load_descriptor(v: &Value) -> Result<(Graph, IdentifyingFunction)> {
    let g = graph_from_json(v.get("graph").cloned().ok_or_else(|| anyhow!("descriptor has no graph"))?, false)?;
    let method = v.get("method").and_then(Value::as_str).ok_or_else(|| anyhow!("descriptor has no method"))?;
    let method = Method::parse(method).ok_or_else(|| anyhow!("unknown method `{method}`"))?;
    let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| anyhow!("descriptor has no n"))? as usize;
    let w = match v.get("w").and_then(Value::as_str) {
        Some(name) => Some(g.vertex_by_name(name).ok_or_else(|| anyhow!("unknown vertex `{name}`"))?),
        None => None,
    };
    if method != Method::Extended {
        let f = build(&g, n, method, w)?;
        return Ok((g, f));
    }
    let Some(table) = v.get("values").and_then(Value::as_object) else { bail!("extended descriptor has no values") };
    let faces = all_faces(&g, n)?.into_iter().next().unwrap_or_default();
    let by_id: BTreeMap<String, _> = faces.into_iter().map(|f| (f.id(&g), f)).collect();
    let mut values = BTreeMap::new();
    for (id, p) in table {
        let face = by_id.get(id).ok_or_else(|| anyhow!("unknown face `{id}`"))?.clone();
        values.insert(face, point_from_json(&g, p).with_context(|| format!("value of `{id}`"))?);
    }
    let f = extend_to_full(&g, PartialIdentifyingFunction { n, values })?;
    Ok((g, f))
}

pub fn verification(g: &Graph, r: &VerificationReport, seed: u64) -> Value {
    let shown: Vec<Value> = r
        .violations
        .iter()
        .take(10)
        .map(|v| {
            let kind = match &v.kind {
                ViolationKind::Collision(j) => format!("collides with token {}", j + 1),
                ViolationKind::Eval(e) => e.to_string(),
            };
            json!({ "config": configuration_to_json(g, &v.config), "kind": kind })
        })
        .collect();
    json!({
        "method": r.method.as_str(),
        "n": r.n,
        "seed": seed,
        "samples": r.samples,
        "violations": r.violations.len(),
        "violation_examples": shown,
        "continuity_pairs": r.continuity_pairs,
        "max_ratio": r.max_ratio,
        "envelope": r.envelope,
        "continuity_ok": r.continuity_ok(),
        "worst_pair": r.worst.as_ref().map(|(a, b)| json!([configuration_to_json(g, a), configuration_to_json(g, b)])),
        "transitions": r.transitions.as_ref().map(|t| json!({ "passed": t.passed, "failed": t.failed })),
        "passed": r.passed(),
        "version": VERSION,
    })
}
