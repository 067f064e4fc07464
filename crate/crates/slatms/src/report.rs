//! Text and JSON renderings of evaluations and solutions.

use std::fmt::Write as _;

use serde_json::{json, Value};
use slatms_core::evidence::{EnvStatus, EnvTerm, Side, StepRule, Warning};
use slatms_core::{Evaluation, Reasoner, SupportPair};
use slatms_core::atms::Support;

pub fn number(x: f64, precision: usize) -> String {
    let s = format!("{x:.precision$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|b| b == b'0' || b == b'.') => rest.to_string(),
        _ => s,
    }
}

pub fn pair(p: SupportPair, precision: usize) -> String {
    format!("[{}, {}]", number(p.lower(), precision), number(p.upper(), precision))
}

fn side(s: Side) -> &'static str {
    match s {
        Side::Positive => "for",
        Side::Negative => "against",
    }
}

fn status(s: EnvStatus) -> &'static str {
    match s {
        EnvStatus::Included => "included",
        EnvStatus::Hypothetical => "hypothetical",
        EnvStatus::OutsideKernel => "outside kernel",
        EnvStatus::Zero => "zero",
    }
}

fn rule(r: StepRule) -> &'static str {
    match r {
        StepRule::Start => "start",
        StepRule::Independent => "independent",
        StepRule::PartiallyIndependent => "partially independent",
    }
}

fn via(r: &Reasoner, t: &EnvTerm) -> String {
    match t.support {
        Some(Support::Justified(j)) => r.atms().justification(j).informant.clone(),
        Some(Support::Assumed(_)) => "assumed".into(),
        None => "conjunction".into(),
    }
}

fn members(r: &Reasoner, t: &EnvTerm, precision: usize) -> String {
    let db = r.atms();
    let parts: Vec<String> = t
        .members
        .iter()
        .map(|&a| {
            let asm = &db.assumptions()[a.index()];
            format!("{} ({})", asm.name, number(asm.mass, precision))
        })
        .collect();
    format!("{{{}}}", parts.join(", "))
}

/// The label, grouping and combination trace behind `ev`.
pub fn explain(r: &Reasoner, ev: &Evaluation, precision: usize) -> String {
    let mut s = String::new();
    let plan = &ev.plan;
    if plan.terms.is_empty() {
        s.push_str("  label: empty\n");
    }
    for (i, t) in plan.terms.iter().enumerate() {
        let _ = writeln!(
            s,
            "  env {i}: {} = {} {} via {} [{}]",
            members(r, t, precision),
            number(t.value, precision),
            side(t.side),
            via(r, t),
            status(t.status),
        );
    }
    for (gi, g) in plan.groups.iter().enumerate() {
        let terms: Vec<String> = g.terms.iter().map(|t| t.to_string()).collect();
        let _ = writeln!(
            s,
            "  group {gi}: envs {} for {} against {}",
            terms.join(" "),
            number(g.positive, precision),
            number(g.negative, precision),
        );
    }
    for step in &plan.steps {
        let _ = writeln!(
            s,
            "  step: group {} {} ({}) -> {}",
            step.group,
            pair(step.operand, precision),
            rule(step.rule),
            pair(step.result, precision),
        );
    }
    for w in &plan.warnings {
        let Warning::GroupClamped {
            group,
            positive,
            negative,
        } = w;
        let _ = writeln!(
            s,
            "  warning: group {group} masses for {} against {} exceed 1 and were clamped",
            number(*positive, precision),
            number(*negative, precision),
        );
    }
    s
}

fn label_json(r: &Reasoner, ev: &Evaluation) -> Value {
    let db = r.atms();
    ev.plan
        .terms
        .iter()
        .map(|t| {
            json!({
                "members": t.members.iter().map(|&a| {
                    let asm = &db.assumptions()[a.index()];
                    json!({"name": asm.name, "mass": asm.mass})
                }).collect::<Vec<_>>(),
                "side": side(t.side),
                "value": t.value,
                "status": status(t.status),
                "via": via(r, t),
            })
        })
        .collect()
}

fn trace_json(ev: &Evaluation) -> Value {
    ev.plan
        .steps
        .iter()
        .map(|s| {
            let g = &ev.plan.groups[s.group];
            json!({
                "group": s.group,
                "envs": g.terms,
                "for": g.positive,
                "against": g.negative,
                "rule": rule(s.rule),
                "operand": [s.operand.lower(), s.operand.upper()],
                "result": [s.result.lower(), s.result.upper()],
            })
        })
        .collect()
}

/// `{"lower", "upper", "label", "trace", "warnings"}`.
pub fn evaluation_json(r: &Reasoner, ev: &Evaluation) -> Value {
    let warnings: Vec<Value> = ev
        .plan
        .warnings
        .iter()
        .map(|w| {
            let Warning::GroupClamped {
                group,
                positive,
                negative,
            } = w;
            json!({"kind": "group clamped", "group": group, "for": positive, "against": negative})
        })
        .collect();
    json!({
        "lower": ev.pair.lower(),
        "upper": ev.pair.upper(),
        "label": label_json(r, ev),
        "trace": trace_json(ev),
        "approximated": ev.plan.approximated(),
        "warnings": warnings,
    })
}
