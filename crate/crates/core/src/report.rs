//! JSON and text renderings of a [`GrowthReport`].
//!
//! State names refer to the trimmed automaton; trees and contexts are
//! written in term syntax with the hole spelled `_HOLE`.

use std::fmt::Write;
use std::time::Duration;

use serde_json::{json, Value};

use crate::automaton::{Automaton, StateId};
use crate::growth::{GrowthReport, HeavyCycleEvidence, HeavyDetail, Verdict, Witness};
use crate::tree::{print_context, print_tree};

pub const FORMAT: &str = "wta-growth/1";

fn verdict_json(v: &Verdict) -> (Value, Value) {
    match v {
        Verdict::Empty => (json!("empty"), Value::Null),
        Verdict::Polynomial(k) => (json!("polynomial"), json!(k)),
        Verdict::Exponential => (json!("exponential"), Value::Null),
    }
}

fn heavy_json(a: &Automaton, ev: &HeavyCycleEvidence) -> Value {
    let name = |q: StateId| a.state_name(q).to_string();
    let detail = match &ev.detail {
        HeavyDetail::Scalar {
            transition,
            index,
            heavy_side,
            ..
        } => json!({ "transition": transition, "index": index, "heavy_side": heavy_side }),
        HeavyDetail::Center { off_diagonal, .. } => {
            json!({ "off_diagonal": [name(off_diagonal.0), name(off_diagonal.1)] })
        }
        HeavyDetail::SideDistinct {
            first,
            second,
            index,
            side,
        } => json!({ "first": first, "second": second, "index": index, "side": side }),
        HeavyDetail::SideAmbiguousChild {
            transition,
            index,
            side,
        } => json!({ "transition": transition, "index": index, "side": side }),
    };
    json!({ "kind": ev.kind.to_string(), "state": name(ev.state), "detail": detail })
}

fn witness_json(a: &Automaton, w: &Witness) -> Value {
    let al = a.alphabet();
    match w {
        Witness::Exponential(w) => json!({
            "kind": "exponential",
            "state": a.state_name(w.state),
            "context": print_context(&w.context, al),
            "tree": print_tree(&w.tree, al),
            "outer": print_context(&w.outer, al),
        }),
        Witness::Polynomial(w) => json!({
            "kind": "polynomial",
            "degree": w.pattern.degree(),
            "pattern": w.pattern.display(al).to_string(),
            "outer": print_context(&w.outer, al),
        }),
    }
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// The report as a JSON object. Timings are included only on request so
/// that repeated runs print identical bytes.
pub fn to_json(r: &GrowthReport, timing: bool) -> Value {
    let a = &r.trimmed;
    let (verdict, degree) = verdict_json(&r.verdict);
    let mut out = json!({
        "format": FORMAT,
        "verdict": verdict,
        "degree": degree,
        "trim": {
            "states_before": r.summary.states_before,
            "transitions_before": r.summary.transitions_before,
            "states_after": r.summary.states_after,
            "transitions_after": r.summary.transitions_after,
        },
        "heavy_cycle": r.heavy.as_ref().map(|ev| heavy_json(a, ev)),
        "barbells": r.barbells.as_ref().map(|b| {
            b.pairs
                .iter()
                .map(|&(p, q)| json!([a.state_name(p), a.state_name(q)]))
                .collect::<Vec<_>>()
        }),
        "degrees": r.degrees.as_ref().map(|d| {
            a.states()
                .map(|q| json!({ "state": a.state_name(q), "degree": d.of(q) }))
                .collect::<Vec<_>>()
        }),
        "iterations": r.degrees.as_ref().map(|d| d.iterations),
        "witness": r.witness.as_ref().map(|w| witness_json(a, w)),
        "witness_error": r.witness_error.as_ref().map(|e| e.to_string()),
    });
    if timing {
        out["timing_ms"] = json!({
            "trim": ms(r.timing.trim),
            "heavy": ms(r.timing.heavy),
            "barbells": ms(r.timing.barbells),
            "degrees": ms(r.timing.degrees),
            "witness": ms(r.timing.witness),
        });
    }
    out
}

/// A short human-readable summary.
pub fn to_text(r: &GrowthReport, timing: bool) -> String {
    let a = &r.trimmed;
    let al = a.alphabet();
    let mut s = String::new();
    let _ = writeln!(s, "verdict: {}", r.verdict);
    let _ = writeln!(
        s,
        "trim: {} states, {} transitions (from {}, {})",
        r.summary.states_after, r.summary.transitions_after, r.summary.states_before, r.summary.transitions_before
    );
    if let Some(ev) = &r.heavy {
        let _ = writeln!(s, "heavy cycle: {} at {}", ev.kind, a.state_name(ev.state));
    }
    if let Some(b) = &r.barbells {
        let pairs: Vec<String> = b
            .pairs
            .iter()
            .map(|&(p, q)| format!("{} => {}", a.state_name(p), a.state_name(q)))
            .collect();
        let _ = writeln!(
            s,
            "barbells: {}",
            if pairs.is_empty() {
                "none".into()
            } else {
                pairs.join(", ")
            }
        );
    }
    if let Some(d) = &r.degrees {
        let list: Vec<String> = a.states().map(|q| format!("{}={}", a.state_name(q), d.of(q))).collect();
        let _ = writeln!(s, "degrees: {} ({} iterations)", list.join(" "), d.iterations);
    }
    match &r.witness {
        Some(Witness::Exponential(w)) => {
            let _ = writeln!(
                s,
                "witness: state {} context {} tree {} outer {}",
                a.state_name(w.state),
                print_context(&w.context, al),
                print_tree(&w.tree, al),
                print_context(&w.outer, al)
            );
        }
        Some(Witness::Polynomial(w)) => {
            let _ = writeln!(
                s,
                "witness: pattern {} outer {}",
                w.pattern.display(al),
                print_context(&w.outer, al)
            );
        }
        None => {}
    }
    if let Some(e) = &r.witness_error {
        let _ = writeln!(s, "witness error: {e}");
    }
    if timing {
        let t = &r.timing;
        let _ = writeln!(
            s,
            "timing (ms): trim {:.3} heavy {:.3} barbells {:.3} degrees {:.3} witness {:.3}",
            ms(t.trim),
            ms(t.heavy),
            ms(t.barbells),
            ms(t.degrees),
            ms(t.witness)
        );
    }
    s
}
