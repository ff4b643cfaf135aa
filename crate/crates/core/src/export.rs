//! Rendering of models, reports and recommendations.
//!
//! Two output languages: DOT for architecture diagrams (components as
//! boxes, nested functions as clusters, channels as labeled edges,
//! recommended patterns dark and dashed) and JSON for machine
//! consumption. Both renderers are pure and deterministic: keys are
//! sorted, node order is fixed, and identical inputs produce identical
//! bytes.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde_json::{json, Map, Value};

use crate::controllability::{
    ControllabilityReport, Justification, Status, UncontrolledReason,
};
use crate::ident::Identifier;
use crate::model::{PatternInstance, SystemModel};
use crate::parser::pattern_fact;
use crate::recommend::{RecommendationResult, Scenario};

/// Presentation switches for [`render_dot`].
#[derive(Debug, Clone, Copy)]
pub struct RenderOptions {
    /// Fill recommended pattern components dark gray and dash their
    /// channels, distinguishing them from the existing architecture.
    pub highlight_recommended: bool,
    /// Append the scenario's hazard verdicts as trailing comments.
    pub include_justifications: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            highlight_recommended: true,
            include_justifications: false,
        }
    }
}

fn node(id: &Identifier) -> String {
    format!("\"{id}\"")
}

fn cluster(out: &mut String, model: &SystemModel, cp: &Identifier, indent: usize) {
    let pad = "  ".repeat(indent);
    let children: Vec<&Identifier> = model
        .components
        .values()
        .filter(|c| c.parent.as_ref() == Some(cp))
        .map(|c| &c.id)
        .collect();
    if children.is_empty() {
        out.push_str(&format!("{pad}{};\n", node(cp)));
        return;
    }
    out.push_str(&format!("{pad}subgraph \"cluster_{cp}\" {{\n"));
    out.push_str(&format!("{pad}  label=\"{cp}\";\n"));
    out.push_str(&format!("{pad}  {};\n", node(cp)));
    for child in children {
        cluster(out, model, child, indent + 1);
    }
    out.push_str(&format!("{pad}}}\n"));
}

fn pattern_edges(p: &PatternInstance) -> Vec<(Identifier, Identifier, Identifier)> {
    match p {
        PatternInstance::SafetyMonitor(m) => {
            [(m.monitored.clone(), m.monitor.clone(), m.fail_safe.clone())].to_vec()
        }
        PatternInstance::Watchdog(w) => [
            (w.monitored.clone(), w.dog.clone(), w.liveness.clone()),
            (w.dog.clone(), w.monitored.clone(), w.fail_safe.clone()),
        ]
        .to_vec(),
        PatternInstance::Hdr(h) => [
            (h.primary.clone(), h.voter.clone(), h.voter_in1.clone()),
            (h.replica.clone(), h.voter.clone(), h.voter_in2.clone()),
            (h.voter.clone(), h.out_cp.clone(), h.voter_out.clone()),
        ]
        .to_vec(),
        PatternInstance::Tmr(t) => [
            (t.primary.clone(), t.voter.clone(), t.voter_in1.clone()),
            (t.replica1.clone(), t.voter.clone(), t.voter_in2.clone()),
            (t.replica2.clone(), t.voter.clone(), t.voter_in3.clone()),
            (t.voter.clone(), t.out_cp.clone(), t.voter_out.clone()),
        ]
        .to_vec(),
        PatternInstance::TwoProg(tp) => {
            [(tp.version1.clone(), tp.version2.clone(), tp.id.clone())].to_vec()
        }
    }
}

fn emit_pattern(out: &mut String, model: &SystemModel, p: &PatternInstance, dark: bool) {
    let style = if dark {
        " [style=filled, fillcolor=darkgray]"
    } else {
        " [style=filled, fillcolor=lightgray]"
    };
    // auxiliary components not already part of the architecture
    let mut aux: Vec<&Identifier> = p
        .component_refs()
        .into_iter()
        .filter(|c| !model.components.contains_key(c))
        .collect();
    aux.sort();
    aux.dedup();
    for a in aux {
        out.push_str(&format!("  {}{style};\n", node(a)));
    }
    let edge_style = if dark { ", style=dashed" } else { "" };
    for (from, to, label) in pattern_edges(p) {
        out.push_str(&format!(
            "  {} -> {} [label=\"{label}\"{edge_style}];\n",
            node(&from),
            node(&to)
        ));
    }
}

/// Renders the architecture (and optionally one recommended scenario)
/// as a DOT digraph.
pub fn render_dot(
    model: &SystemModel,
    scenario: Option<&Scenario>,
    options: &RenderOptions,
) -> String {
    let mut out = String::from("// generated by safpat\n");
    let empty = model.components.is_empty()
        && model.channels.is_empty()
        && model.patterns.is_empty()
        && scenario.map(|s| s.selected.is_empty()).unwrap_or(true);
    if empty {
        out.push_str("digraph safpat {}\n");
        return out;
    }
    out.push_str("digraph safpat {\n");
    out.push_str("  rankdir=LR;\n");
    out.push_str("  node [shape=box];\n");
    for cp in model.components.values() {
        if cp.parent.is_none() {
            cluster(&mut out, model, &cp.id, 1);
        }
    }
    for ch in model.channels.values() {
        out.push_str(&format!(
            "  {} -> {} [label=\"{}\"];\n",
            node(&ch.source),
            node(&ch.target),
            ch.id
        ));
    }
    for p in model.patterns.values() {
        emit_pattern(&mut out, model, p, false);
    }
    if let Some(s) = scenario {
        for c in &s.selected {
            emit_pattern(&mut out, model, &c.instance, options.highlight_recommended);
        }
    }
    out.push_str("}\n");
    if options.include_justifications {
        if let Some(s) = scenario {
            for (hz, v) in &s.report.verdicts {
                out.push_str(&format!("// {hz}: {}\n", verdict_comment(v)));
            }
        }
    }
    out
}

fn verdict_comment(v: &crate::controllability::Verdict) -> String {
    match &v.justification {
        Justification::ByPattern { pattern, rule } => {
            format!("controlled by {pattern} ({rule})")
        }
        Justification::ByAllChildren(_) => "controlled via sub-hazards".to_string(),
        Justification::Uncontrolled(r) => match r {
            UncontrolledReason::NoRuleFired => "uncontrolled".to_string(),
            UncontrolledReason::ChildUncontrolled(c) => {
                format!("uncontrolled (sub-hazard {c})")
            }
            UncontrolledReason::UnsupportedHazardType => {
                "uncontrolled (no rule for this hazard type)".to_string()
            }
        },
    }
}

fn justification_json(j: &Justification) -> Value {
    match j {
        Justification::ByPattern { pattern, rule } => json!({
            "type": "pattern",
            "pattern": pattern,
            "rule": rule,
        }),
        Justification::ByAllChildren(children) => json!({
            "type": "all-children",
            "children": children.iter().map(|c| c.as_str()).collect::<Vec<_>>(),
        }),
        Justification::Uncontrolled(reason) => match reason {
            UncontrolledReason::NoRuleFired => json!({
                "type": "uncontrolled",
                "reason": "no-rule-fired",
            }),
            UncontrolledReason::ChildUncontrolled(child) => json!({
                "type": "uncontrolled",
                "reason": "child-uncontrolled",
                "child": child.as_str(),
            }),
            UncontrolledReason::UnsupportedHazardType => json!({
                "type": "uncontrolled",
                "reason": "unsupported-hazard-type",
            }),
        },
    }
}

fn report_value(report: &ControllabilityReport) -> Value {
    let mut hazards = Map::new();
    for (hz, v) in &report.verdicts {
        hazards.insert(
            hz.as_str().to_string(),
            json!({
                "status": match v.status {
                    Status::Controlled => "controlled",
                    Status::Uncontrolled => "uncontrolled",
                },
                "justification": justification_json(&v.justification),
            }),
        );
    }
    json!({ "hazards": hazards })
}

/// Canonical JSON for a controllability report: a map from hazard id
/// to status and justification, keys sorted.
pub fn render_report_json(report: &ControllabilityReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_value(report))
        .expect("report serialization cannot fail");
    s.push('\n');
    s
}

fn scenario_value(s: &Scenario, complete: bool) -> Value {
    json!({
        "patterns": s.selected
            .iter()
            .map(|c| pattern_fact(&c.instance))
            .collect::<Vec<_>>(),
        "score": {
            "controlledCount": s.controlled_count,
            "severityWeight": s.severity_weight,
        },
        "complete": complete,
        "report": report_value(&s.report),
    })
}

/// Canonical JSON for a recommendation: the best scenarios with their
/// pattern facts in ground notation, scores and completeness flags.
pub fn render_recommendation_json(result: &RecommendationResult) -> String {
    let best: Vec<Value> = result
        .best
        .iter()
        .map(|s| scenario_value(s, result.complete.contains(s)))
        .collect();
    let mut budgets = Map::new();
    for (kind, n) in &result.budgets {
        budgets.insert(kind.as_str().to_string(), json!(n));
    }
    let value = json!({
        "budgets": budgets,
        "totalScenarios": result.total_scenarios,
        "completeCount": result.complete.len(),
        "best": best,
    });
    let mut s =
        serde_json::to_string_pretty(&value).expect("result serialization cannot fail");
    s.push('\n');
    s
}
