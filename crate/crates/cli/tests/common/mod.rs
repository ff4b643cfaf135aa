//! Shared helpers for the acceptance suite: a seeded random-model
//! generator and independent oracles that re-derive controllability
//! and scenario ranking from first principles, without reusing the
//! engine's rule code.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use safpat_core::model::{Hdr, SafetyMonitor, Tmr, TwoProg, Watchdog};
use safpat_core::{
    compute_controllability, ChannelSet, ControllabilityReport, ExploreKind, Hazard, HazardType,
    Identifier, Implementation, PatternInstance, Severity, SystemModel,
};

pub fn ident(prefix: &str, k: usize) -> Identifier {
    Identifier::new(&format!("{prefix}{k}")).unwrap()
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

/// A small random architecture with hazards: parents point backwards,
/// flows are contiguous walks and sub-hazard edges follow the index
/// order, so every generated model passes validation.
pub fn random_model(rng: &mut ChaCha8Rng) -> SystemModel {
    let mut m = SystemModel::default();
    let n_comps = rng.gen_range(2..=5);
    for i in 0..n_comps {
        m.add_component(ident("c", i));
    }
    for i in 0..n_comps {
        if i > 0 && rng.gen_bool(0.3) {
            let p = rng.gen_range(0..i);
            m.components.get_mut(&ident("c", i)).unwrap().parent = Some(ident("c", p));
        }
        m.components.get_mut(&ident("c", i)).unwrap().impl_kind = match rng.gen_range(0..3) {
            0 => Implementation::Hardware,
            1 => Implementation::Software,
            _ => Implementation::Unspecified,
        };
    }
    let n_chans = rng.gen_range(0..=6);
    for k in 0..n_chans {
        let s = rng.gen_range(0..n_comps);
        let d = rng.gen_range(0..n_comps);
        m.add_channel(ident("ch", k), ident("c", s), ident("c", d));
    }
    let channel_ids: Vec<Identifier> = m.channels.keys().cloned().collect();
    for fi in 0..rng.gen_range(0..=2) {
        if channel_ids.is_empty() {
            break;
        }
        let mut path = vec![pick(rng, &channel_ids).clone()];
        for _ in 0..rng.gen_range(0..4) {
            let last_target = m.channels[path.last().unwrap()].target.clone();
            let extensions: Vec<Identifier> = m
                .channels
                .values()
                .filter(|c| c.source == last_target && !path.contains(&c.id))
                .map(|c| c.id.clone())
                .collect();
            if extensions.is_empty() {
                break;
            }
            path.push(pick(rng, &extensions).clone());
        }
        m.add_flow(ident("f", fi), path);
    }
    let types = [
        HazardType::Err,
        HazardType::Err,
        HazardType::Loss,
        HazardType::Omission,
        HazardType::Late,
        HazardType::Early,
    ];
    let sevs = [
        Severity::Minor,
        Severity::Major,
        Severity::Fatal,
        Severity::Catastrophic,
    ];
    let n_hz = rng.gen_range(1..=4);
    for i in 0..n_hz {
        m.add_hazard(
            ident("hz", i),
            ident("c", rng.gen_range(0..n_comps)),
            *pick(rng, &types),
            *pick(rng, &sevs),
        );
    }
    for child in 1..n_hz {
        if rng.gen_bool(0.35) {
            let parent = rng.gen_range(0..child);
            m.add_sub_hazard(ident("hz", child), ident("hz", parent));
        }
    }
    if n_hz > 0 && rng.gen_bool(0.2) {
        m.assumptions.insert(ident("hz", rng.gen_range(0..n_hz)));
    }
    m.exploration_mode = rng.gen_bool(0.3);
    for kind in ExploreKind::ALL {
        if rng.gen_bool(0.45) {
            m.explore.insert(kind, rng.gen_range(1..=2));
        }
    }
    m
}

fn random_channel_set(rng: &mut ChaCha8Rng, model: &SystemModel, k: usize, tag: &str) -> ChannelSet {
    match rng.gen_range(0..4) {
        0 => ChannelSet::AllInputs,
        1 => ChannelSet::AllOutputs,
        2 => ChannelSet::Fresh(Identifier::new(&format!("nu{tag}{k}")).unwrap()),
        _ => {
            let all: Vec<Identifier> = model.channels.keys().cloned().collect();
            let n = if all.is_empty() { 0 } else { rng.gen_range(0..=all.len()) };
            ChannelSet::Explicit(all.into_iter().take(n).collect())
        }
    }
}

fn random_component(rng: &mut ChaCha8Rng, model: &SystemModel, k: usize, tag: &str) -> Identifier {
    let comps: Vec<Identifier> = model.components.keys().cloned().collect();
    if comps.is_empty() || rng.gen_bool(0.4) {
        Identifier::new(&format!("nu{tag}{k}")).unwrap()
    } else {
        pick(rng, &comps).clone()
    }
}

fn random_channel(rng: &mut ChaCha8Rng, model: &SystemModel, k: usize, tag: &str) -> Identifier {
    let chans: Vec<Identifier> = model.channels.keys().cloned().collect();
    if chans.is_empty() || rng.gen_bool(0.4) {
        Identifier::new(&format!("nu{tag}{k}")).unwrap()
    } else {
        pick(rng, &chans).clone()
    }
}

/// A random, validation-clean pattern instance; `k` keeps its fresh
/// identifiers distinct from other generated instances.
pub fn random_pattern(rng: &mut ChaCha8Rng, model: &SystemModel, k: usize) -> PatternInstance {
    let comps: Vec<Identifier> = model.components.keys().cloned().collect();
    let anchor = pick(rng, &comps).clone();
    match rng.gen_range(0..5) {
        0 => PatternInstance::SafetyMonitor(SafetyMonitor {
            id: ident("nupsm", k),
            monitored: anchor,
            inputs: random_channel_set(rng, model, k, "smi"),
            outputs: random_channel_set(rng, model, k, "smo"),
            // fresh fail-safe channel: never collides with input lists
            fail_safe: ident("nusmfs", k),
            mon_inputs: ChannelSet::Fresh(ident("nusmmi", k)),
            mon_outputs: ChannelSet::Fresh(ident("nusmmo", k)),
            monitor: random_component(rng, model, k, "smcp"),
        }),
        1 => PatternInstance::Watchdog(Watchdog {
            id: ident("nupwd", k),
            monitored: anchor,
            fail_safe: ident("nuwdfs", k),
            liveness: ident("nuwdlv", k),
            dog: random_component(rng, model, k, "wdcp"),
        }),
        2 => PatternInstance::Hdr(Hdr {
            id: ident("nuphdr", k),
            primary: anchor,
            fault_channel: random_channel(rng, model, k, "hfc"),
            replica: random_component(rng, model, k, "hrep"),
            voter_in1: random_channel(rng, model, k, "hv1"),
            voter_in2: random_channel(rng, model, k, "hv2"),
            voter: random_component(rng, model, k, "hvt"),
            voter_out: random_channel(rng, model, k, "hvo"),
            out_cp: random_component(rng, model, k, "hout"),
        }),
        3 => PatternInstance::Tmr(Tmr {
            id: ident("nuptmr", k),
            primary: anchor,
            fault_channel: random_channel(rng, model, k, "tfc"),
            replica1: random_component(rng, model, k, "tr1"),
            replica2: random_component(rng, model, k, "tr2"),
            voter_in1: random_channel(rng, model, k, "tv1"),
            voter_in2: random_channel(rng, model, k, "tv2"),
            voter_in3: random_channel(rng, model, k, "tv3"),
            voter: random_component(rng, model, k, "tvt"),
            voter_out: random_channel(rng, model, k, "tvo"),
            out_cp: random_component(rng, model, k, "tout"),
        }),
        _ => PatternInstance::TwoProg(TwoProg {
            id: ident("nuptp", k),
            version1: anchor,
            inputs: random_channel_set(rng, model, k, "tpi"),
            outputs: random_channel_set(rng, model, k, "tpo"),
            version2: random_component(rng, model, k, "tpv2"),
            voters_in1: ChannelSet::Fresh(ident("nutpa", k)),
            voters_in2: ChannelSet::Fresh(ident("nutpb", k)),
            voters: ChannelSet::Fresh(ident("nutpc", k)),
            voter_outs: ChannelSet::Fresh(ident("nutpd", k)),
            out_cps: ChannelSet::Fresh(ident("nutpe", k)),
        }),
    }
}

// ------------------------------------------------------------------
// Independent rule oracle: a naive bottom-up fixpoint over the control
// rules, written from their textual definitions rather than reusing
// the engine.

/// Component visit order of a flow: source of the first channel, then
/// each channel's target.
fn flow_sequence(m: &SystemModel, flow: &Identifier) -> Vec<Identifier> {
    let mut seq = Vec::new();
    let Some(f) = m.flows.get(flow) else {
        return seq;
    };
    for (i, ch_id) in f.path.iter().enumerate() {
        if let Some(ch) = m.channels.get(ch_id) {
            if i == 0 {
                seq.push(ch.source.clone());
            }
            seq.push(ch.target.clone());
        }
    }
    seq
}

fn set_accounts_for(set: &ChannelSet, needed: &BTreeSet<Identifier>) -> bool {
    match set {
        ChannelSet::AllInputs | ChannelSet::AllOutputs => true,
        ChannelSet::Explicit(list) => needed.iter().all(|c| list.contains(c)),
        ChannelSet::Fresh(_) => needed.is_empty(),
    }
}

fn oracle_rule_fires(m: &SystemModel, hz: &Hazard) -> bool {
    let ins = |cp: &Identifier| -> BTreeSet<Identifier> {
        m.channels
            .values()
            .filter(|c| &c.target == cp)
            .map(|c| c.id.clone())
            .collect()
    };
    let outs = |cp: &Identifier| -> BTreeSet<Identifier> {
        m.channels
            .values()
            .filter(|c| &c.source == cp)
            .map(|c| c.id.clone())
            .collect()
    };
    for p in m.patterns.values() {
        match (p, hz.htype) {
            (PatternInstance::Watchdog(wd), HazardType::Loss) => {
                if wd.monitored == hz.component {
                    return true;
                }
            }
            (PatternInstance::SafetyMonitor(sm), HazardType::Err) => {
                if sm.monitored != hz.component {
                    continue;
                }
                if m.exploration_mode {
                    return true;
                }
                let mut needed_in = ins(&sm.monitored);
                needed_in.remove(&sm.fail_safe);
                if set_accounts_for(&sm.inputs, &needed_in)
                    && set_accounts_for(&sm.outputs, &outs(&sm.monitored))
                {
                    return true;
                }
            }
            (PatternInstance::TwoProg(tp), HazardType::Err) => {
                let sw = m
                    .components
                    .get(&hz.component)
                    .map(|c| c.impl_kind == Implementation::Software)
                    .unwrap_or(false);
                if !sw || tp.version1 != hz.component {
                    continue;
                }
                if m.exploration_mode || set_accounts_for(&tp.inputs, &ins(&tp.version1)) {
                    return true;
                }
            }
            (PatternInstance::Hdr(h), HazardType::Err) => {
                if m
                    .channels
                    .values()
                    .any(|c| c.source == hz.component && c.target == h.voter)
                {
                    return true;
                }
            }
            (PatternInstance::Tmr(t), HazardType::Err) => {
                if m
                    .channels
                    .values()
                    .any(|c| c.source == hz.component && c.target == t.voter)
                {
                    return true;
                }
                if m.exploration_mode && t.primary == hz.component {
                    return true;
                }
            }
            (PatternInstance::Hdr(h), HazardType::Omission) => {
                for flow in m.flows.keys() {
                    let seq = flow_sequence(m, flow);
                    let at = |cp: &Identifier| seq.iter().position(|c| c == cp);
                    let (Some(i_cp), Some(i_p)) = (at(&hz.component), at(&h.primary)) else {
                        continue;
                    };
                    if i_p < i_cp
                        && (h.replica == hz.component
                            || at(&h.replica).map(|r| r > i_cp).unwrap_or(false))
                    {
                        return true;
                    }
                }
            }
            _ => {}
        }
    }
    false
}

/// The set of controlled hazards according to a naive bottom-up
/// fixpoint: pattern rules, assumptions, and the derived-hazard rule
/// (all sub-hazards controlled), iterated to saturation.
pub fn oracle_controlled(m: &SystemModel) -> BTreeSet<Identifier> {
    let mut ctl: BTreeSet<Identifier> = BTreeSet::new();
    loop {
        let mut changed = false;
        for hz in m.hazards.values() {
            if ctl.contains(&hz.id) {
                continue;
            }
            let children: Vec<&Identifier> = m
                .sub_hazards
                .iter()
                .filter(|e| e.parent == hz.id && m.hazards.contains_key(&e.child))
                .map(|e| &e.child)
                .collect();
            let derived_ok = !children.is_empty() && children.iter().all(|c| ctl.contains(*c));
            if oracle_rule_fires(m, hz) || m.assumptions.contains(&hz.id) || derived_ok {
                ctl.insert(hz.id.clone());
                changed = true;
            }
        }
        if !changed {
            return ctl;
        }
    }
}

// ------------------------------------------------------------------
// Independent scenario oracle: bitmask subset enumeration, budget
// filter, evaluation and the documented ranking policy.

pub struct OracleScenario {
    pub facts: BTreeSet<String>,
    pub controlled: usize,
    pub weight: u32,
}

pub fn evaluate_selection(
    model: &SystemModel,
    instances: &[PatternInstance],
) -> (ControllabilityReport, usize, u32) {
    let mut m = model.clone();
    m.exploration_mode = true;
    for p in instances {
        m.add_pattern(p.clone());
    }
    let report = compute_controllability(&m).unwrap();
    let controlled = report.controlled_count();
    let weight = m
        .hazards
        .values()
        .filter(|hz| report.is_controlled(&hz.id))
        .map(|hz| hz.severity.rank())
        .sum();
    (report, controlled, weight)
}

/// Every budget-respecting subset of the candidates, scored.
pub fn oracle_enumerate(
    model: &SystemModel,
    candidates: &[safpat_core::Candidate],
) -> Vec<OracleScenario> {
    let n = candidates.len();
    assert!(n <= 16, "oracle enumeration limited to small candidate sets");
    let mut out = Vec::new();
    'subset: for mask in 0u32..(1 << n) {
        for kind in ExploreKind::ALL {
            let anchors: BTreeSet<&Identifier> = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| &candidates[i])
                .filter(|c| c.kind == kind)
                .filter_map(|c| c.anchor.first())
                .collect();
            let budget = model.explore.get(&kind).copied().unwrap_or(0);
            if anchors.len() as u32 > budget {
                continue 'subset;
            }
        }
        let instances: Vec<PatternInstance> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| candidates[i].instance.clone())
            .collect();
        let facts: BTreeSet<String> = instances
            .iter()
            .map(|p| safpat_core::parser::pattern_fact(p))
            .collect();
        let (_, controlled, weight) = evaluate_selection(model, &instances);
        out.push(OracleScenario {
            facts,
            controlled,
            weight,
        });
    }
    out
}

/// The documented best-architecture policy: most hazards controlled,
/// then highest severity weight, then fewest patterns, duplicates
/// removed. Returns the selections as sorted fact sets.
pub fn oracle_best(scenarios: &[OracleScenario]) -> Vec<&OracleScenario> {
    let max_controlled = scenarios.iter().map(|s| s.controlled).max().unwrap_or(0);
    let tier: Vec<&OracleScenario> = scenarios
        .iter()
        .filter(|s| s.controlled == max_controlled)
        .collect();
    let max_weight = tier.iter().map(|s| s.weight).max().unwrap_or(0);
    let tier: Vec<&OracleScenario> = tier
        .into_iter()
        .filter(|s| s.weight == max_weight)
        .collect();
    let min_size = tier.iter().map(|s| s.facts.len()).min().unwrap_or(0);
    let mut tier: Vec<&OracleScenario> = tier
        .into_iter()
        .filter(|s| s.facts.len() == min_size)
        .collect();
    tier.sort_by(|a, b| a.facts.cmp(&b.facts));
    tier.dedup_by(|a, b| a.facts == b.facts);
    tier
}
