//! Presentation layer: decimal rendering, aligned text tables, DOT export,
//! and the machine-readable JSON report.
//!
//! Internal values stay exact; rounding to two decimal places
//! (half-away-from-zero) happens only here.

use serde_json::{json, Map, Value};

use crate::aggregate::UtilityFunction;
use crate::model::TransitionSystem;
use crate::properties::search::{Verdict, VerdictStatus};
use crate::properties::Witness;
use crate::scalar::Rational;

/// Rounds to two decimal places, ties away from zero.
pub fn round_half_away_2(r: &Rational) -> Rational {
    let scaled = r * Rational::from_integer(100);
    let (num, den) = (*scaled.numer(), *scaled.denom());
    let sign = if num < 0 { -1 } else { 1 };
    let rounded = (2 * num.abs() + den) / (2 * den);
    Rational::new(sign * rounded, 100)
}

/// Two-decimal rendering with trailing zeros trimmed, e.g. `-0.2`, `0.27`,
/// `-0.05`, `0`.
pub fn decimal2(r: &Rational) -> String {
    let rounded = round_half_away_2(r);
    let hundredths = (rounded * Rational::from_integer(100)).to_integer();
    let sign = if hundredths < 0 { "-" } else { "" };
    let (int, frac) = (hundredths.abs() / 100, hundredths.abs() % 100);
    if frac == 0 {
        format!("{sign}{int}")
    } else if frac % 10 == 0 {
        format!("{sign}{int}.{}", frac / 10)
    } else {
        format!("{sign}{int}.{frac:02}")
    }
}

/// Exact rendering, `numer/denom` or a plain integer.
pub fn rational_str(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Aligned plain-text table.
pub fn render_table(headers: &[String], rows: &[Vec<String>]) -> String {
    let ncols = headers.len();
    let width = |c: usize| {
        rows.iter()
            .map(|r| r[c].chars().count())
            .chain(std::iter::once(headers[c].chars().count()))
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..ncols).map(width).collect();
    let fmt_row = |cells: &[String]| {
        cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<w$}", c, w = widths[i]))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = String::new();
    out.push_str(&fmt_row(headers));
    out.push('\n');
    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (ncols - 1)));
    out.push('\n');
    for row in rows {
        out.push_str(&fmt_row(row));
        out.push('\n');
    }
    out
}

/// DOT rendering of a transition system: nodes carry the world id and its
/// utility, arcs their maximal-action label. With `shade_negative`,
/// negative-utility worlds are filled gray.
pub fn dot_graph(
    ts: &TransitionSystem,
    u: &UtilityFunction<Rational>,
    shade_negative: bool,
) -> String {
    let mut out = String::from("digraph transition_system {\n  rankdir=LR;\n");
    for world in ts.worlds() {
        let utility = u.get(&world.id).expect("utilities are total");
        let mut attrs = vec![format!("label=\"{}\\n{}\"", world.id, decimal2(utility))];
        if world.id == ts.initial() {
            attrs.push("penwidth=2".to_string());
        }
        if shade_negative && *utility < Rational::from_integer(0) {
            attrs.push("style=filled".to_string());
            attrs.push("fillcolor=gray".to_string());
        }
        out.push_str(&format!("  \"{}\" [{}];\n", world.id, attrs.join(", ")));
    }
    for (from, to, action) in ts.arcs() {
        out.push_str(&format!(
            "  \"{from}\" -> \"{to}\" [label=\"{}\"];\n",
            action.name
        ));
    }
    out.push_str("}\n");
    out
}

/// The machine-readable report: one `kind`, structured rows, and run
/// metadata. Serialization is deterministic, so identical runs produce
/// byte-identical reports.
#[derive(Debug, Clone)]
pub struct Report {
    pub kind: &'static str,
    pub metadata: Value,
    pub rows: Vec<Value>,
}

impl Report {
    pub fn new(kind: &'static str, metadata: Value, rows: Vec<Value>) -> Self {
        Report {
            kind,
            metadata,
            rows,
        }
    }

    pub fn to_json_string(&self) -> String {
        let mut root = Map::new();
        root.insert("kind".to_string(), json!(self.kind));
        root.insert("metadata".to_string(), self.metadata.clone());
        root.insert("rows".to_string(), Value::Array(self.rows.clone()));
        serde_json::to_string_pretty(&Value::Object(root)).expect("report serializes") + "\n"
    }
}

/// Base metadata attached to every report.
pub fn metadata(extra: Value) -> Value {
    let mut m = Map::new();
    m.insert("tool".to_string(), json!("worldseq"));
    m.insert("version".to_string(), json!(env!("CARGO_PKG_VERSION")));
    if let Value::Object(obj) = extra {
        m.extend(obj);
    }
    Value::Object(m)
}

pub fn rational_value(r: &Rational) -> Value {
    json!({ "exact": rational_str(r), "decimal": decimal2(r) })
}

pub fn witness_to_value(
    witness: &Witness<Rational>,
    property: crate::properties::PropertyId,
) -> Value {
    let bindings: Map<String, Value> = property
        .seq_names()
        .iter()
        .zip(&witness.seqs)
        .map(|(name, seq)| (name.to_string(), json!(seq.ids())))
        .chain(
            property
                .world_names()
                .iter()
                .zip(&witness.worlds)
                .map(|(name, w)| (name.to_string(), json!(w))),
        )
        .collect();
    let utilities: Map<String, Value> = witness
        .u
        .iter()
        .map(|(id, v)| (id.to_string(), rational_value(v)))
        .collect();
    let arcs: Vec<Value> = witness
        .system
        .arcs()
        .map(|(f, t, a)| json!([f, t, a.name]))
        .collect();
    json!({
        "bindings": bindings,
        "utilities": utilities,
        "system": {
            "worlds": witness.system.world_ids().collect::<Vec<_>>(),
            "arcs": arcs,
        },
    })
}

pub fn verdict_to_value(verdict: &Verdict<Rational>) -> Value {
    let (status, counterexample) = match &verdict.status {
        VerdictStatus::ConfirmedWithinBounds => ("confirmed_within_bounds", Value::Null),
        VerdictStatus::Refuted { witness, details } => {
            let mut cx = witness_to_value(witness, verdict.property);
            cx.as_object_mut()
                .expect("witness value is an object")
                .insert("details".to_string(), json!(details));
            ("refuted", cx)
        }
    };
    json!({
        "property": verdict.property.name(),
        "aggregator": verdict.aggregator.name(),
        "status": status,
        "published_claim": verdict.published_claim.map(|c| if c { "satisfied" } else { "violated" }),
        "discrepancy": verdict.discrepancy,
        "counterexample": counterexample,
        "bounds": serde_json::to_value(&verdict.bounds).expect("bounds serialize"),
    })
}

/// Cell mark mirroring the published layout: the computed verdict, with a
/// discrepancy warning naming the published claim where they disagree.
pub fn verdict_mark(verdict: &Verdict<Rational>) -> String {
    let computed = if verdict.is_refuted() { "✗" } else { "✓" };
    match verdict.published_claim {
        Some(true) if verdict.discrepancy => format!("{computed} ⚠(claimed: ✓)"),
        // No witness inside the bounds does not contradict a published
        // cross; note it without raising a discrepancy.
        Some(false) if !verdict.is_refuted() => format!("{computed} (claimed: ✗, outside bounds)"),
        Some(_) => computed.to_string(),
        None => format!("{computed} (no claim)"),
    }
}
