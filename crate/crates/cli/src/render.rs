//! Report rendering: JSON with sorted keys, the CSV mirror for experiment
//! tables, a small SVG bar chart, and plain text. All output is
//! byte-deterministic: sorted keys, `p/q` rational strings, one trailing
//! newline.

use sepwidth_core::cloud::WCloud;
use sepwidth_core::graph::{Separation, VertexSet};
use sepwidth_core::harness::{AuditReport, ExperimentReport};
use sepwidth_core::rational::{format_rat, Rat};
use serde_json::{json, Map, Value};

pub fn ids(set: &VertexSet) -> Value {
    Value::Array(set.iter().map(|&v| json!(v)).collect())
}

pub fn rat(r: Rat) -> Value {
    Value::String(format_rat(r))
}

/// Witness document for a cloud outcome.
pub fn cloud_witness(cloud: &WCloud, s: Rat, eps: Rat) -> Value {
    let mut components = Map::new();
    for (w, comp) in cloud.components() {
        components.insert(w.to_string(), ids(comp));
    }
    json!({
        "kind": "cloud",
        "W": ids(cloud.terminals()),
        "components": Value::Object(components),
        "params": {"s": rat(s), "eps": rat(eps)},
    })
}

/// Witness document for a skewed-separation outcome.
pub fn separation_witness(sep: &Separation, w: &VertexSet, s: Rat, eps: Rat) -> Value {
    json!({
        "kind": "separation",
        "W": ids(w),
        "A": ids(&sep.a),
        "B": ids(&sep.b),
        "params": {"s": rat(s), "eps": rat(eps)},
    })
}

pub fn experiment_json(report: &ExperimentReport) -> Value {
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|r| {
            json!({
                "spec": r.spec,
                "n": r.n,
                "m": r.m,
                "sn": r.sn,
                "tw": r.tw,
                "tn": r.tn,
                "ratio": r.ratio.map(|x| rat(x)).unwrap_or(Value::Null),
                "note": r.note,
            })
        })
        .collect();
    json!({
        "rows": rows,
        "max_ratio": report.max_ratio.map(|x| rat(x)).unwrap_or(Value::Null),
        "violations": report.violations,
    })
}

pub fn experiment_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("spec,n,m,sn,tw,tn,ratio\n");
    let cell = |o: Option<usize>| o.map(|v| v.to_string()).unwrap_or_default();
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.spec,
            r.n,
            r.m,
            cell(r.sn),
            cell(r.tw),
            cell(r.tn),
            r.ratio.map(format_rat).unwrap_or_default(),
        ));
    }
    out
}

/// Bar chart of the tw/sn ratios. Bar widths are integer-scaled from the
/// exact rationals, so the output is deterministic.
pub fn experiment_svg(report: &ExperimentReport) -> String {
    let bar_h = 18i64;
    let gap = 6i64;
    let label_w = 220i64;
    let scale_w = 300i64;
    let rows: Vec<(&str, Option<Rat>)> = report
        .rows
        .iter()
        .map(|r| (r.spec.as_str(), r.ratio))
        .collect();
    let max = report.max_ratio.unwrap_or_else(|| Rat::new(1, 1));
    let height = (rows.len() as i64) * (bar_h + gap) + gap;
    let width = label_w + scale_w + 40;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\">\n"
    );
    for (i, (label, ratio)) in rows.iter().enumerate() {
        let y = gap + (i as i64) * (bar_h + gap);
        let (w, text) = match ratio {
            Some(r) => {
                // w = scale_w * r / max, all in integers.
                let num = r.numer() * max.denom() * scale_w;
                let den = r.denom() * max.numer();
                ((num / den).max(1), format_rat(*r))
            }
            None => (0, String::from("-")),
        };
        svg.push_str(&format!(
            "  <text x=\"4\" y=\"{ty}\" font-size=\"12\" font-family=\"monospace\">{label}</text>\n",
            ty = y + bar_h - 4
        ));
        if w > 0 {
            svg.push_str(&format!(
                "  <rect x=\"{label_w}\" y=\"{y}\" width=\"{w}\" height=\"{bar_h}\" fill=\"#4878a8\"/>\n"
            ));
        }
        svg.push_str(&format!(
            "  <text x=\"{tx}\" y=\"{ty}\" font-size=\"12\" font-family=\"monospace\">{text}</text>\n",
            tx = label_w + w + 6,
            ty = y + bar_h - 4
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn audit_json(report: &AuditReport) -> Value {
    let steps: Vec<Value> = report
        .steps
        .iter()
        .map(|s| {
            let mut values = Map::new();
            for (k, v) in &s.values {
                values.insert(k.clone(), Value::String(v.clone()));
            }
            json!({
                "name": s.name,
                "claim": s.claim,
                "values": Value::Object(values),
                "pass": s.pass,
            })
        })
        .collect();
    json!({"overall": report.overall, "steps": steps})
}

/// Plain-text rendering of any JSON document: `path = value` lines in key
/// order, which keeps the text format deterministic too.
pub fn text_of(value: &Value) -> String {
    fn walk(prefix: &str, v: &Value, out: &mut String) {
        match v {
            Value::Object(map) => {
                for (k, x) in map {
                    let p = if prefix.is_empty() {
                        k.clone()
                    } else {
                        format!("{prefix}.{k}")
                    };
                    walk(&p, x, out);
                }
            }
            Value::Array(items) => {
                let flat = items.iter().all(|x| !x.is_object() && !x.is_array());
                if flat {
                    let cells: Vec<String> = items.iter().map(render_scalar).collect();
                    out.push_str(&format!("{prefix} = [{}]\n", cells.join(", ")));
                } else {
                    for (i, x) in items.iter().enumerate() {
                        walk(&format!("{prefix}[{i}]"), x, out);
                    }
                }
            }
            _ => out.push_str(&format!("{prefix} = {}\n", render_scalar(v))),
        }
    }
    fn render_scalar(v: &Value) -> String {
        match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
    let mut out = String::new();
    walk("", value, &mut out);
    out
}

/// Canonical JSON bytes: pretty, sorted keys, trailing newline.
pub fn json_bytes(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}
