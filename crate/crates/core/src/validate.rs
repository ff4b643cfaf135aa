//! Model well-formedness checks and the diagnostic type shared with
//! the parser.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::ident::Identifier;
use crate::model::{ChannelSet, SystemModel};

/// A half-open byte range with 1-based line/column of its start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DiagSeverity {
    Warning,
    Error,
}

/// One finding about the input. `Error` diagnostics block analysis;
/// warnings do not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: DiagSeverity,
    pub code: &'static str,
    pub message: String,
    pub location: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn error(code: &'static str, message: String) -> Self {
        Diagnostic {
            severity: DiagSeverity::Error,
            code,
            message,
            location: None,
        }
    }

    pub fn warning(code: &'static str, message: String) -> Self {
        Diagnostic {
            severity: DiagSeverity::Warning,
            code,
            message,
            location: None,
        }
    }

    pub fn at(mut self, span: SourceSpan) -> Self {
        self.location = Some(span);
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == DiagSeverity::Error
    }
}

/// True for references that name a fresh (`nu`-prefixed) constant not
/// declared anywhere; such references belong to recommended patterns
/// and are exempt from declaration checks.
fn is_fresh(model: &SystemModel, declared: &BTreeSet<Identifier>, id: &Identifier) -> bool {
    let _ = model;
    id.has_fresh_prefix() && !declared.contains(id)
}

/// Checks every structural invariant of the model and returns one
/// `Error` per violation, sorted by code then message. An empty result
/// means the model is well-formed.
pub fn validate_model(model: &SystemModel) -> Vec<Diagnostic> {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let declared = model.declared_ids();
    let aux_components = model.pattern_aux_components();

    let component_ok = |id: &Identifier| {
        model.components.contains_key(id)
            || aux_components.contains(id)
            || is_fresh(model, &declared, id)
    };
    let channel_ok =
        |id: &Identifier| model.channels.contains_key(id) || is_fresh(model, &declared, id);

    // parent references and acyclicity of the subcp relation
    for cp in model.components.values() {
        if let Some(parent) = &cp.parent {
            if !model.components.contains_key(parent) {
                diags.push(Diagnostic::error(
                    "undeclared-component",
                    format!("component `{}` has undeclared parent `{parent}`", cp.id),
                ));
            }
        }
    }
    for cp in model.components.keys() {
        let mut seen = BTreeSet::new();
        let mut cur = cp;
        while let Some(parent) = model.components.get(cur).and_then(|c| c.parent.as_ref()) {
            if !seen.insert(parent.clone()) || parent == cp {
                diags.push(Diagnostic::error(
                    "cyclic-subcp",
                    format!("component nesting cycle through `{cp}`"),
                ));
                break;
            }
            if !model.components.contains_key(parent) {
                break;
            }
            cur = parent;
        }
    }

    // channel endpoints
    for ch in model.channels.values() {
        for (role, end) in [("source", &ch.source), ("target", &ch.target)] {
            if !component_ok(end) {
                diags.push(Diagnostic::error(
                    "undeclared-component",
                    format!("channel `{}` has undeclared {role} `{end}`", ch.id),
                ));
            }
        }
    }

    // flows: non-empty, duplicate-free, declared channels, contiguous
    for flow in model.flows.values() {
        if flow.path.is_empty() {
            diags.push(Diagnostic::error(
                "empty-flow",
                format!("flow `{}` has an empty path", flow.id),
            ));
            continue;
        }
        let mut seen = BTreeSet::new();
        for ch in &flow.path {
            if !seen.insert(ch.clone()) {
                diags.push(Diagnostic::error(
                    "duplicate-flow-channel",
                    format!("flow `{}` lists channel `{ch}` twice", flow.id),
                ));
            }
            if !model.channels.contains_key(ch) {
                diags.push(Diagnostic::error(
                    "undeclared-channel",
                    format!("flow `{}` references undeclared channel `{ch}`", flow.id),
                ));
            }
        }
        for pair in flow.path.windows(2) {
            let (Some(a), Some(b)) = (model.channels.get(&pair[0]), model.channels.get(&pair[1]))
            else {
                continue;
            };
            if a.target != b.source {
                diags.push(Diagnostic::error(
                    "flow-not-contiguous",
                    format!(
                        "flow `{}`: channel `{}` ends at `{}` but `{}` starts at `{}`",
                        flow.id, a.id, a.target, b.id, b.source
                    ),
                ));
            }
        }
    }

    // hazards reference declared components
    for hz in model.hazards.values() {
        if !model.components.contains_key(&hz.component) {
            diags.push(Diagnostic::error(
                "undeclared-component",
                format!("hazard `{}` is on undeclared component `{}`", hz.id, hz.component),
            ));
        }
    }

    // sub-hazard edges: declared endpoints, acyclic relation
    for edge in &model.sub_hazards {
        for hz in [&edge.child, &edge.parent] {
            if !model.hazards.contains_key(hz) {
                diags.push(Diagnostic::error(
                    "undeclared-hazard",
                    format!(
                        "sub-hazard edge `{}` -> `{}` references undeclared hazard `{hz}`",
                        edge.child, edge.parent
                    ),
                ));
            }
        }
    }
    if let Some(hz) = find_sub_hazard_cycle(model) {
        diags.push(Diagnostic::error(
            "cyclic-subhz",
            format!("sub-hazard refinement cycle through `{hz}`"),
        ));
    }

    // assumptions name declared hazards
    for hz in &model.assumptions {
        if !model.hazards.contains_key(hz) {
            diags.push(Diagnostic::error(
                "undeclared-hazard",
                format!("assumption references undeclared hazard `{hz}`"),
            ));
        }
    }

    // pattern references
    for pat in model.patterns.values() {
        for cp in pat.component_refs() {
            if !model.components.contains_key(cp) && !is_fresh(model, &declared, cp) {
                diags.push(Diagnostic::error(
                    "undeclared-component",
                    format!("pattern `{}` references undeclared component `{cp}`", pat.id()),
                ));
            }
        }
        for ch in pat.channel_refs() {
            if !channel_ok(ch) {
                diags.push(Diagnostic::error(
                    "undeclared-channel",
                    format!("pattern `{}` references undeclared channel `{ch}`", pat.id()),
                ));
            }
        }
        for set in pat.channel_sets() {
            for ch in set.explicit_members() {
                if !channel_ok(ch) {
                    diags.push(Diagnostic::error(
                        "undeclared-channel",
                        format!("pattern `{}` lists undeclared channel `{ch}`", pat.id()),
                    ));
                }
            }
        }
        if let crate::model::PatternInstance::SafetyMonitor(sm) = pat {
            if let ChannelSet::Explicit(inputs) = &sm.inputs {
                if inputs.contains(&sm.fail_safe) {
                    diags.push(Diagnostic::error(
                        "failsafe-in-inputs",
                        format!(
                            "safety monitor `{}` lists its fail-safe channel `{}` among its inputs",
                            sm.id, sm.fail_safe
                        ),
                    ));
                }
            }
        }
    }

    diags.sort_by(|a, b| (a.code, &a.message).cmp(&(b.code, &b.message)));
    diags.dedup();
    diags
}

fn find_sub_hazard_cycle(model: &SystemModel) -> Option<Identifier> {
    // DFS with colors over child -> parent edges
    let mut visiting: BTreeSet<Identifier> = BTreeSet::new();
    let mut done: BTreeSet<Identifier> = BTreeSet::new();

    fn visit(
        model: &SystemModel,
        node: &Identifier,
        visiting: &mut BTreeSet<Identifier>,
        done: &mut BTreeSet<Identifier>,
    ) -> Option<Identifier> {
        if done.contains(node) {
            return None;
        }
        if !visiting.insert(node.clone()) {
            return Some(node.clone());
        }
        for edge in model.sub_hazards.iter().filter(|e| &e.child == node) {
            if let Some(hit) = visit(model, &edge.parent, visiting, done) {
                return Some(hit);
            }
        }
        visiting.remove(node);
        done.insert(node.clone());
        None
    }

    let nodes: Vec<Identifier> = model
        .sub_hazards
        .iter()
        .map(|e| e.child.clone())
        .collect();
    for node in &nodes {
        if let Some(hit) = visit(model, node, &mut visiting, &mut done) {
            return Some(hit);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::id;
    use crate::model::fixtures::{acc_model, bms_model};
    use crate::model::{HazardType, PatternInstance, SafetyMonitor, Severity};
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn acc_and_bms_are_well_formed() {
        assert_eq!(validate_model(&acc_model()), vec![]);
        assert_eq!(validate_model(&bms_model()), vec![]);
    }

    #[test]
    fn empty_model_is_well_formed() {
        assert_eq!(validate_model(&SystemModel::default()), vec![]);
    }

    #[test]
    fn undeclared_channel_target_is_reported() {
        let mut m = SystemModel::default();
        m.add_component(id!("a"));
        m.add_channel(id!("x"), id!("a"), id!("b"));
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "undeclared-component");
        assert!(diags[0].is_error());
    }

    #[test]
    fn validation_is_idempotent() {
        let mut m = acc_model();
        m.add_channel(id!("bad"), id!("ds"), id!("ghost"));
        assert_eq!(validate_model(&m), validate_model(&m));
    }

    #[test]
    fn non_contiguous_flow_is_reported() {
        let mut m = acc_model();
        m.add_flow(id!("broken"), vec![id!("dsaccm"), id!("vsaccm")]);
        let diags = validate_model(&m);
        assert!(diags.iter().any(|d| d.code == "flow-not-contiguous"));
    }

    #[test]
    fn subcp_cycle_is_reported() {
        let mut m = SystemModel::default();
        m.add_component(id!("a"));
        m.add_component(id!("b"));
        m.components.get_mut(&id!("a")).unwrap().parent = Some(id!("b"));
        m.components.get_mut(&id!("b")).unwrap().parent = Some(id!("a"));
        let diags = validate_model(&m);
        assert!(diags.iter().any(|d| d.code == "cyclic-subcp"));
    }

    #[test]
    fn subhz_cycle_is_reported() {
        let mut m = acc_model();
        m.add_sub_hazard(id!("h1"), id!("h11"));
        let diags = validate_model(&m);
        assert!(diags.iter().any(|d| d.code == "cyclic-subhz"));
    }

    #[test]
    fn fresh_references_are_exempt() {
        let mut m = acc_model();
        m.add_pattern(PatternInstance::SafetyMonitor(SafetyMonitor {
            id: id!("nuSafMon1"),
            monitored: id!("accm"),
            inputs: ChannelSet::AllInputs,
            outputs: ChannelSet::AllOutputs,
            fail_safe: id!("nuSC1"),
            mon_inputs: ChannelSet::Fresh(id!("numin1")),
            mon_outputs: ChannelSet::Fresh(id!("numout1")),
            monitor: id!("numcp1"),
        }));
        assert_eq!(validate_model(&m), vec![]);
    }

    #[test]
    fn failsafe_among_inputs_is_reported() {
        let mut m = acc_model();
        m.add_channel(id!("fsch"), id!("acc"), id!("accm"));
        m.add_pattern(PatternInstance::SafetyMonitor(SafetyMonitor {
            id: id!("sm1"),
            monitored: id!("accm"),
            inputs: ChannelSet::Explicit(vec![id!("dsaccm"), id!("fsch")]),
            outputs: ChannelSet::AllOutputs,
            fail_safe: id!("fsch"),
            mon_inputs: ChannelSet::Fresh(id!("numin1")),
            mon_outputs: ChannelSet::Fresh(id!("numout1")),
            monitor: id!("acc"),
        }));
        let diags = validate_model(&m);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, "failsafe-in-inputs");
    }

    #[test]
    fn hazard_on_undeclared_component() {
        let mut m = SystemModel::default();
        m.add_hazard(
            id!("h"),
            id!("ghost"),
            HazardType::Err,
            Severity::Catastrophic,
        );
        let diags = validate_model(&m);
        assert_eq!(diags[0].code.to_string(), "undeclared-component");
    }
}
