//! Hazard controllability under closed-world semantics.
//!
//! Every hazard is uncontrolled unless a rule proves otherwise. Basic
//! hazards (no sub-hazards) are controlled only by a deployed pattern
//! whose rule fires; derived hazards are additionally controlled when
//! every direct sub-hazard is controlled. Evaluation walks the hazard
//! refinement DAG children-first and is a pure function of the model,
//! so reports are reproducible byte for byte.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::ident::Identifier;
use crate::model::{
    ChannelSet, Hazard, HazardType, Implementation, LookupError, PatternInstance, SystemModel,
};

/// Whether a hazard is refined into sub-hazards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HazardClass {
    Basic,
    Derived,
}

/// Verdict for one hazard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Controlled,
    Uncontrolled,
}

/// Why an uncontrolled hazard stays uncontrolled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UncontrolledReason {
    /// No pattern rule fires and the hazard has no sub-hazards.
    NoRuleFired,
    /// A derived hazard has at least this uncontrolled sub-hazard.
    ChildUncontrolled(Identifier),
    /// No rule exists for `late`/`early` hazards.
    UnsupportedHazardType,
}

/// Machine-checkable evidence attached to each verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// A pattern rule fired. `pattern` is the instance id, or the
    /// synthetic `assumption:<hazard>` for assumed hazards.
    ByPattern {
        pattern: String,
        rule: &'static str,
    },
    /// Derived hazard: every listed sub-hazard is controlled.
    ByAllChildren(Vec<Identifier>),
    Uncontrolled(UncontrolledReason),
}

/// Status plus its justification for one hazard.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub justification: Justification,
}

/// Total verdict map over the model's hazards.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ControllabilityReport {
    pub verdicts: BTreeMap<Identifier, Verdict>,
}

impl ControllabilityReport {
    pub fn is_controlled(&self, hz: &Identifier) -> bool {
        matches!(
            self.verdicts.get(hz),
            Some(Verdict {
                status: Status::Controlled,
                ..
            })
        )
    }

    pub fn all_controlled(&self) -> bool {
        self.verdicts
            .values()
            .all(|v| v.status == Status::Controlled)
    }

    pub fn controlled_count(&self) -> usize {
        self.verdicts
            .values()
            .filter(|v| v.status == Status::Controlled)
            .count()
    }

    pub fn uncontrolled(&self) -> impl Iterator<Item = &Identifier> {
        self.verdicts
            .iter()
            .filter(|(_, v)| v.status == Status::Uncontrolled)
            .map(|(h, _)| h)
    }
}

/// The hazard refinement relation contains a cycle, so no evaluation
/// order exists. Validation rejects such models up front; this guards
/// programmatically-built ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    CyclicSubHazards,
}

impl fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisError::CyclicSubHazards => {
                f.write_str("sub-hazard relation is cyclic; no evaluation order exists")
            }
        }
    }
}

/// Basic iff the hazard has no sub-hazards.
pub fn classify(model: &SystemModel, hz: &Identifier) -> Result<HazardClass, LookupError> {
    Ok(if model.hazard_children(hz)?.is_empty() {
        HazardClass::Basic
    } else {
        HazardClass::Derived
    })
}

/// Marks a hazard as controlled by engineering assumption (for example
/// a bus whose failures are handled by replacement). Subsequent
/// reports justify it with the synthetic pattern `assumption:<hz>`.
pub fn assume_controlled(
    mut model: SystemModel,
    hz: &Identifier,
) -> Result<SystemModel, LookupError> {
    if !model.hazards.contains_key(hz) {
        return Err(LookupError::UnknownHazard(hz.clone()));
    }
    model.assumptions.insert(hz.clone());
    Ok(model)
}

/// True when `set` accounts for every channel in `required`. Sentinels
/// always do; a fresh placeholder set names no channels at all.
fn covers(set: &ChannelSet, required: &BTreeSet<Identifier>) -> bool {
    match set {
        ChannelSet::AllInputs | ChannelSet::AllOutputs => true,
        ChannelSet::Explicit(chs) => required.iter().all(|c| chs.contains(c)),
        ChannelSet::Fresh(_) => required.is_empty(),
    }
}

fn required_inputs(
    model: &SystemModel,
    cp: &Identifier,
    fail_safe: Option<&Identifier>,
) -> BTreeSet<Identifier> {
    let mut chs = model.channels_into(cp).unwrap_or_default();
    if let Some(fs) = fail_safe {
        chs.remove(fs);
    }
    chs
}

const RULE_WATCHDOG: &str = "watchdog";
const RULE_SAFMON: &str = "safety-monitor";
const RULE_TWOPROG: &str = "two-version";
const RULE_REDUNDANCY_ERR: &str = "redundancy";
const RULE_PATH_REDUNDANCY: &str = "path-redundancy";
const RULE_ASSUMED: &str = "assumed";

/// A watchdog controls a `loss` hazard of the component it monitors.
pub fn watchdog_controls(model: &SystemModel, hazard: &Hazard) -> Option<Identifier> {
    if hazard.htype != HazardType::Loss {
        return None;
    }
    model
        .patterns
        .values()
        .find_map(|p| match p {
            PatternInstance::Watchdog(wd) if wd.monitored == hazard.component => {
                Some(wd.id.clone())
            }
            _ => None,
        })
}

/// A safety monitor controls an `err` hazard of the monitored
/// component provided it observes all of the component's traffic: all
/// input channels except its own fail-safe channel, and all output
/// channels. Full-coverage sentinels satisfy this trivially, and in
/// exploration mode the check is waived because recommended monitors
/// reference auxiliary channels that are not materialized.
pub fn safmon_controls(model: &SystemModel, hazard: &Hazard) -> Option<Identifier> {
    if hazard.htype != HazardType::Err {
        return None;
    }
    model.patterns.values().find_map(|p| {
        let PatternInstance::SafetyMonitor(sm) = p else {
            return None;
        };
        if sm.monitored != hazard.component {
            return None;
        }
        let ok = model.exploration_mode
            || (covers(
                &sm.inputs,
                &required_inputs(model, &sm.monitored, Some(&sm.fail_safe)),
            ) && covers(
                &sm.outputs,
                &model.channels_out_of(&sm.monitored).unwrap_or_default(),
            ));
        ok.then(|| sm.id.clone())
    })
}

/// Two-version programming controls an `err` hazard of a *software*
/// component when the second version sees all of its inputs.
pub fn twoprog_controls(model: &SystemModel, hazard: &Hazard) -> Option<Identifier> {
    if hazard.htype != HazardType::Err {
        return None;
    }
    let software = model
        .components
        .get(&hazard.component)
        .map(|c| c.impl_kind == Implementation::Software)
        .unwrap_or(false);
    if !software {
        return None;
    }
    model.patterns.values().find_map(|p| {
        let PatternInstance::TwoProg(tp) = p else {
            return None;
        };
        if tp.version1 != hazard.component {
            return None;
        }
        let ok = model.exploration_mode
            || covers(
                &tp.inputs,
                &required_inputs(model, &tp.version1, None),
            );
        ok.then(|| tp.id.clone())
    })
}

/// Modular redundancy controls an `err` hazard of a component whose
/// output feeds the pattern's voter: the voter can mask the erroneous
/// value. In exploration mode a TMR placed on the component itself
/// also qualifies, since its voter channels are fresh placeholders
/// rather than declared channels.
pub fn redundancy_controls_err(model: &SystemModel, hazard: &Hazard) -> Option<Identifier> {
    if hazard.htype != HazardType::Err {
        return None;
    }
    model.patterns.values().find_map(|p| {
        let (id, primary, voter, is_tmr) = match p {
            PatternInstance::Hdr(h) => (&h.id, &h.primary, &h.voter, false),
            PatternInstance::Tmr(t) => (&t.id, &t.primary, &t.voter, true),
            _ => return None,
        };
        let feeds_voter = model
            .channels
            .values()
            .any(|ch| ch.source == hazard.component && &ch.target == voter);
        let exploration_tmr =
            model.exploration_mode && is_tmr && primary == &hazard.component;
        (feeds_voter || exploration_tmr).then(|| id.clone())
    })
}

/// Duplex redundancy controls an `omission` hazard of a component CP
/// when some information flow routes around it: the primary sits
/// strictly before CP on the flow and the replica is CP itself or sits
/// after it, so the replicated path can still deliver the value.
pub fn redundancy_controls_omission(model: &SystemModel, hazard: &Hazard) -> Option<Identifier> {
    if hazard.htype != HazardType::Omission {
        return None;
    }
    model.patterns.values().find_map(|p| {
        let PatternInstance::Hdr(h) = p else {
            return None;
        };
        let bridges = model.flows.keys().any(|flow| {
            let pos = |cp: &Identifier| model.component_position(cp, flow).ok().flatten();
            let (Some(pos_cp), Some(pos_primary)) =
                (pos(&hazard.component), pos(&h.primary))
            else {
                return false;
            };
            if pos_primary >= pos_cp {
                return false;
            }
            h.replica == hazard.component
                || matches!(pos(&h.replica), Some(pos_replica) if pos_replica > pos_cp)
        });
        bridges.then(|| h.id.clone())
    })
}

fn pattern_justification(model: &SystemModel, hazard: &Hazard) -> Option<Justification> {
    let mut candidates: Vec<(Identifier, &'static str)> = Vec::new();
    if let Some(id) = watchdog_controls(model, hazard) {
        candidates.push((id, RULE_WATCHDOG));
    }
    if let Some(id) = safmon_controls(model, hazard) {
        candidates.push((id, RULE_SAFMON));
    }
    if let Some(id) = twoprog_controls(model, hazard) {
        candidates.push((id, RULE_TWOPROG));
    }
    if let Some(id) = redundancy_controls_err(model, hazard) {
        candidates.push((id, RULE_REDUNDANCY_ERR));
    }
    if let Some(id) = redundancy_controls_omission(model, hazard) {
        candidates.push((id, RULE_PATH_REDUNDANCY));
    }
    candidates.sort();
    candidates.into_iter().next().map(|(pattern, rule)| {
        Justification::ByPattern {
            pattern: String::from(pattern.as_str()),
            rule,
        }
    })
}

/// Children-first order over the refinement DAG.
fn evaluation_order(model: &SystemModel) -> Result<Vec<Identifier>, AnalysisError> {
    // count only edges between declared hazards
    let mut pending: BTreeMap<&Identifier, usize> = model
        .hazards
        .keys()
        .map(|h| {
            let n = model
                .sub_hazards
                .iter()
                .filter(|e| &e.parent == h && model.hazards.contains_key(&e.child))
                .count();
            (h, n)
        })
        .collect();
    let mut order = Vec::with_capacity(pending.len());
    while !pending.is_empty() {
        let Some(next) = pending
            .iter()
            .find(|(_, n)| **n == 0)
            .map(|(h, _)| (*h).clone())
        else {
            return Err(AnalysisError::CyclicSubHazards);
        };
        pending.remove(&next);
        for edge in model.sub_hazards.iter().filter(|e| e.child == next) {
            if let Some(n) = pending.get_mut(&edge.parent) {
                *n -= 1;
            }
        }
        order.push(next);
    }
    Ok(order)
}

/// Evaluates every hazard to a verdict. Pattern rules take precedence
/// in the justification; an assumption fires only when no rule does;
/// a derived hazard with neither is controlled exactly when all its
/// sub-hazards are. `late`/`early` hazards, for which no rule exists,
/// come back `UnsupportedHazardType`.
pub fn compute_controllability(
    model: &SystemModel,
) -> Result<ControllabilityReport, AnalysisError> {
    let mut report = ControllabilityReport::default();
    for hz_id in evaluation_order(model)? {
        let hazard = &model.hazards[&hz_id];
        let children: Vec<Identifier> = model
            .hazard_children(&hz_id)
            .unwrap_or_default()
            .into_iter()
            .filter(|c| model.hazards.contains_key(c))
            .collect();
        let justification = if let Some(by_pattern) = pattern_justification(model, hazard) {
            by_pattern
        } else if model.assumptions.contains(&hz_id) {
            Justification::ByPattern {
                pattern: format!("assumption:{hz_id}"),
                rule: RULE_ASSUMED,
            }
        } else if !children.is_empty() {
            match children.iter().find(|c| !report.is_controlled(c)) {
                None => Justification::ByAllChildren(children.clone()),
                Some(bad) => Justification::Uncontrolled(UncontrolledReason::ChildUncontrolled(
                    bad.clone(),
                )),
            }
        } else if matches!(hazard.htype, HazardType::Late | HazardType::Early) {
            Justification::Uncontrolled(UncontrolledReason::UnsupportedHazardType)
        } else {
            Justification::Uncontrolled(UncontrolledReason::NoRuleFired)
        };
        let status = match justification {
            Justification::Uncontrolled(_) => Status::Uncontrolled,
            _ => Status::Controlled,
        };
        report.verdicts.insert(
            hz_id,
            Verdict {
                status,
                justification,
            },
        );
    }
    Ok(report)
}
