//! Pattern-placement recommendation under `explore` budgets.
//!
//! Candidate placements are generated per pattern kind from the model's
//! hazards and topology, then every budget-respecting subset of the
//! candidates is evaluated with the controllability engine in
//! exploration mode. The result ranks scenarios by hazards controlled
//! and keeps the minimal best architectures, flagging those that
//! control every hazard as complete.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::controllability::{compute_controllability, AnalysisError, ControllabilityReport};
use crate::ident::Identifier;
use crate::model::{
    ChannelSet, ExploreKind, HazardType, Hdr, Implementation, PatternInstance, SafetyMonitor,
    SystemModel, Tmr, TwoProg, Watchdog,
};

/// One possible placement of one pattern instance. `anchor` is the
/// component (or component tuple) the generation rule bound; two
/// candidates of the same kind and anchor are the same placement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub kind: ExploreKind,
    pub anchor: Vec<Identifier>,
    pub instance: PatternInstance,
}

/// A selection of candidates together with its evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    pub selected: Vec<Candidate>,
    pub report: ControllabilityReport,
    pub controlled_count: usize,
    pub severity_weight: u32,
}

/// Ranked outcome of [`recommend`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RecommendationResult {
    /// Scenarios controlling the most hazards, minimal and distinct.
    pub best: Vec<Scenario>,
    /// The subset of `best` in which every hazard is controlled.
    pub complete: Vec<Scenario>,
    /// How many budget-respecting scenarios were evaluated.
    pub total_scenarios: usize,
    /// The effective per-kind budgets the search ran under.
    pub budgets: BTreeMap<ExploreKind, u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecommendError {
    /// The candidate set would require enumerating more than 2^cap
    /// subsets; lower the explore budgets or raise the cap.
    TooManyCandidates { found: usize, cap: usize },
    Analysis(AnalysisError),
}

impl fmt::Display for RecommendError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecommendError::TooManyCandidates { found, cap } => write!(
                f,
                "{found} candidate placements exceed the search cap of {cap}; \
                 lower the explore budgets or raise --hard-cap"
            ),
            RecommendError::Analysis(e) => write!(f, "{e}"),
        }
    }
}

impl From<AnalysisError> for RecommendError {
    fn from(e: AnalysisError) -> Self {
        RecommendError::Analysis(e)
    }
}

fn budget(model: &SystemModel, kind: ExploreKind) -> u32 {
    model.explore.get(&kind).copied().unwrap_or(0)
}

/// Picks `nu<stem><k>` names that do not collide with anything
/// declared in the model.
struct FreshIds {
    taken: BTreeSet<Identifier>,
}

impl FreshIds {
    fn new(model: &SystemModel) -> Self {
        FreshIds {
            taken: model.declared_ids(),
        }
    }

    fn free(&self, stem: &str, k: usize) -> bool {
        Identifier::new(&format!("{stem}{k}"))
            .map(|id| !self.taken.contains(&id))
            .unwrap_or(false)
    }

    /// Reserves `<stem>k` for every stem with the same k, so the ids
    /// of one candidate share a number.
    fn take(&mut self, stems: &[&str]) -> Vec<Identifier> {
        let mut k = 1;
        while !stems.iter().all(|s| self.free(s, k)) {
            k += 1;
        }
        stems
            .iter()
            .map(|s| {
                let id = Identifier::new(&format!("{s}{k}")).expect("fresh id shape");
                self.taken.insert(id.clone());
                id
            })
            .collect()
    }
}

/// Base-model verdicts used by the generation rules: a hazard warrants
/// a new pattern only while it is basic and still uncontrolled.
fn needs_control(model: &SystemModel, report: &ControllabilityReport, hz: &Identifier) -> bool {
    let basic = model
        .hazard_children(hz)
        .map(|c| c.is_empty())
        .unwrap_or(true);
    basic && !report.is_controlled(hz)
}

fn base_report(model: &SystemModel) -> ControllabilityReport {
    compute_controllability(model).unwrap_or_default()
}

/// Safety-monitor placements: one per component carrying an
/// uncontrolled basic `err` hazard.
pub fn gen_safmon_candidates(model: &SystemModel) -> Vec<Candidate> {
    if budget(model, ExploreKind::SafMon) == 0 {
        return Vec::new();
    }
    let report = base_report(model);
    let mut fresh = FreshIds::new(model);
    let mut anchors: BTreeSet<Identifier> = BTreeSet::new();
    for hz in model.hazards.values() {
        if hz.htype == HazardType::Err && needs_control(model, &report, &hz.id) {
            anchors.insert(hz.component.clone());
        }
    }
    anchors
        .into_iter()
        .map(|cp| {
            let ids = fresh.take(&["nuSafMon", "nuSC", "numin", "numout", "numcp"]);
            let [id, fail_safe, mon_in, mon_out, monitor]: [Identifier; 5] =
                ids.try_into().unwrap();
            Candidate {
                kind: ExploreKind::SafMon,
                anchor: [cp.clone()].to_vec(),
                instance: PatternInstance::SafetyMonitor(SafetyMonitor {
                    id,
                    monitored: cp,
                    inputs: ChannelSet::AllInputs,
                    outputs: ChannelSet::AllOutputs,
                    fail_safe,
                    mon_inputs: ChannelSet::Fresh(mon_in),
                    mon_outputs: ChannelSet::Fresh(mon_out),
                    monitor,
                }),
            }
        })
        .collect()
}

/// TMR placements: one per (non-software component with an `err`
/// hazard, output channel of that component).
pub fn gen_tmr_candidates(model: &SystemModel) -> Vec<Candidate> {
    if budget(model, ExploreKind::Tmr) == 0 {
        return Vec::new();
    }
    let mut fresh = FreshIds::new(model);
    let mut anchors: BTreeSet<(Identifier, Identifier)> = BTreeSet::new();
    for hz in model.hazards.values() {
        if hz.htype != HazardType::Err {
            continue;
        }
        let software = model
            .components
            .get(&hz.component)
            .map(|c| c.impl_kind == Implementation::Software)
            .unwrap_or(false);
        if software {
            continue;
        }
        for ch in model.channels_out_of(&hz.component).unwrap_or_default() {
            anchors.insert((hz.component.clone(), ch));
        }
    }
    anchors
        .into_iter()
        .map(|(cp, ch)| {
            let ids = fresh.take(&[
                "nuTMR", "nutcp2", "nutcp3", "nutvi1", "nutvi2", "nutvi3", "nutvt", "nutvo",
                "nutout",
            ]);
            let [id, replica1, replica2, vi1, vi2, vi3, voter, vout, out_cp]: [Identifier; 9] =
                ids.try_into().unwrap();
            Candidate {
                kind: ExploreKind::Tmr,
                anchor: [cp.clone(), ch.clone()].to_vec(),
                instance: PatternInstance::Tmr(Tmr {
                    id,
                    primary: cp,
                    fault_channel: ch,
                    replica1,
                    replica2,
                    voter_in1: vi1,
                    voter_in2: vi2,
                    voter_in3: vi3,
                    voter,
                    voter_out: vout,
                    out_cp,
                }),
            }
        })
        .collect()
}

/// Path-redundancy HDR placements for `omission` hazards. For a
/// hazard on CP, a placement (CP1, CP2, CPO) replicates the path from
/// CP1 (strictly before CP on some flow) through CP2 into CPO: the
/// primary's output channel CHOUT precedes CP2's input CHIN, CHOUT
/// precedes CP's output CH, and CHIN precedes CPO's input CH1 on the
/// same flow. One candidate per distinct (CP1, CP2, CPO) triple.
pub fn gen_hdr_candidates(model: &SystemModel) -> Vec<Candidate> {
    if budget(model, ExploreKind::Hdr) == 0 {
        return Vec::new();
    }
    let mut fresh = FreshIds::new(model);
    // triple -> fault channel CHOUT of the first binding found
    let mut triples: BTreeSet<(Identifier, Identifier, Identifier, Identifier)> = BTreeSet::new();
    for hz in model.hazards.values() {
        if hz.htype != HazardType::Omission {
            continue;
        }
        let cp = &hz.component;
        for flow in model.flows.values() {
            let idx = |ch: &Identifier| flow.path.iter().position(|c| c == ch);
            for ch in model.channels_out_of(cp).unwrap_or_default() {
                let Some(i_ch) = idx(&ch) else { continue };
                for chout in model.channels.values() {
                    let cp1 = &chout.source;
                    if cp1 == cp {
                        continue;
                    }
                    let Some(i_out) = idx(&chout.id) else { continue };
                    if i_out >= i_ch {
                        continue;
                    }
                    for chin in model.channels.values() {
                        let cp2 = &chin.target;
                        if cp1 == cp2 {
                            continue;
                        }
                        let Some(i_in) = idx(&chin.id) else { continue };
                        if i_out >= i_in {
                            continue;
                        }
                        for ch1 in model.channels.values() {
                            let cpo = &ch1.target;
                            if cp1 == cpo || cp2 == cpo {
                                continue;
                            }
                            let Some(i_1) = idx(&ch1.id) else { continue };
                            if i_in >= i_1 {
                                continue;
                            }
                            triples.insert((
                                cp1.clone(),
                                cp2.clone(),
                                cpo.clone(),
                                chout.id.clone(),
                            ));
                        }
                    }
                }
            }
        }
    }
    // keep one fault channel per triple (first in order)
    let mut seen: BTreeSet<(Identifier, Identifier, Identifier)> = BTreeSet::new();
    let mut out = Vec::new();
    for (cp1, cp2, cpo, chout) in triples {
        if !seen.insert((cp1.clone(), cp2.clone(), cpo.clone())) {
            continue;
        }
        let ids = fresh.take(&["nuHDR", "nuhvi1", "nuhvi2", "nuhvt", "nuhvo"]);
        let [id, vi1, vi2, voter, vout]: [Identifier; 5] = ids.try_into().unwrap();
        out.push(Candidate {
            kind: ExploreKind::Hdr,
            anchor: [cp1.clone(), cp2.clone(), cpo.clone()].to_vec(),
            instance: PatternInstance::Hdr(Hdr {
                id,
                primary: cp1,
                fault_channel: chout,
                replica: cp2,
                voter_in1: vi1,
                voter_in2: vi2,
                voter,
                voter_out: vout,
                out_cp: cpo,
            }),
        });
    }
    out
}

/// Watchdog placements: one per component carrying an uncontrolled
/// basic `loss` hazard.
pub fn gen_watchdog_candidates(model: &SystemModel) -> Vec<Candidate> {
    if budget(model, ExploreKind::Watchdog) == 0 {
        return Vec::new();
    }
    let report = base_report(model);
    let mut fresh = FreshIds::new(model);
    let mut anchors: BTreeSet<Identifier> = BTreeSet::new();
    for hz in model.hazards.values() {
        if hz.htype == HazardType::Loss && needs_control(model, &report, &hz.id) {
            anchors.insert(hz.component.clone());
        }
    }
    anchors
        .into_iter()
        .map(|cp| {
            let ids = fresh.take(&["nuWD", "nuscwd", "nulvwd", "nuwd"]);
            let [id, fail_safe, liveness, dog]: [Identifier; 4] = ids.try_into().unwrap();
            Candidate {
                kind: ExploreKind::Watchdog,
                anchor: [cp.clone()].to_vec(),
                instance: PatternInstance::Watchdog(Watchdog {
                    id,
                    monitored: cp,
                    fail_safe,
                    liveness,
                    dog,
                }),
            }
        })
        .collect()
}

/// Two-version-programming placements: one per software component with
/// an uncontrolled basic `err` hazard.
pub fn gen_twoprog_candidates(model: &SystemModel) -> Vec<Candidate> {
    if budget(model, ExploreKind::TwoProg) == 0 {
        return Vec::new();
    }
    let report = base_report(model);
    let mut fresh = FreshIds::new(model);
    let mut anchors: BTreeSet<Identifier> = BTreeSet::new();
    for hz in model.hazards.values() {
        let software = model
            .components
            .get(&hz.component)
            .map(|c| c.impl_kind == Implementation::Software)
            .unwrap_or(false);
        if software && hz.htype == HazardType::Err && needs_control(model, &report, &hz.id) {
            anchors.insert(hz.component.clone());
        }
    }
    anchors
        .into_iter()
        .map(|cp| {
            let ids = fresh.take(&[
                "nu2Prog", "nupv2", "nupvi1", "nupvi2", "nupvt", "nupvo", "nupout",
            ]);
            let [id, version2, vi1, vi2, voter, vout, out]: [Identifier; 7] =
                ids.try_into().unwrap();
            Candidate {
                kind: ExploreKind::TwoProg,
                anchor: [cp.clone()].to_vec(),
                instance: PatternInstance::TwoProg(TwoProg {
                    id,
                    version1: cp,
                    inputs: ChannelSet::AllInputs,
                    outputs: ChannelSet::AllOutputs,
                    version2,
                    voters_in1: ChannelSet::Fresh(vi1),
                    voters_in2: ChannelSet::Fresh(vi2),
                    voters: ChannelSet::Fresh(voter),
                    voter_outs: ChannelSet::Fresh(vout),
                    out_cps: ChannelSet::Fresh(out),
                }),
            }
        })
        .collect()
}

/// All candidate placements, grouped by kind in a fixed order.
pub fn generate_candidates(model: &SystemModel) -> Vec<Candidate> {
    let mut out = gen_safmon_candidates(model);
    out.extend(gen_watchdog_candidates(model));
    out.extend(gen_hdr_candidates(model));
    out.extend(gen_tmr_candidates(model));
    out.extend(gen_twoprog_candidates(model));
    out
}

fn evaluate(base: &SystemModel, selected: Vec<Candidate>) -> Result<Scenario, AnalysisError> {
    let mut model = base.clone();
    model.exploration_mode = true;
    for c in &selected {
        model.add_pattern(c.instance.clone());
    }
    let report = compute_controllability(&model)?;
    let controlled_count = report.controlled_count();
    let severity_weight = model
        .hazards
        .values()
        .filter(|hz| report.is_controlled(&hz.id))
        .map(|hz| hz.severity.rank())
        .sum();
    Ok(Scenario {
        selected,
        report,
        controlled_count,
        severity_weight,
    })
}

/// Enumerates every subset of `candidates` in which, per kind, the
/// number of distinct anchor components stays within the kind's
/// budget, and evaluates each in exploration mode. Subsets come out in
/// lexicographic candidate-index order; the empty selection is always
/// first.
pub fn enumerate_scenarios(
    model: &SystemModel,
    candidates: &[Candidate],
    hard_cap: usize,
) -> Result<Vec<Scenario>, RecommendError> {
    if candidates.len() > hard_cap {
        return Err(RecommendError::TooManyCandidates {
            found: candidates.len(),
            cap: hard_cap,
        });
    }
    let mut scenarios = Vec::new();
    let mut picked: Vec<usize> = Vec::new();
    enumerate_rec(model, candidates, 0, &mut picked, &mut scenarios)?;
    Ok(scenarios)
}

fn within_budget(model: &SystemModel, candidates: &[Candidate], picked: &[usize]) -> bool {
    for kind in ExploreKind::ALL {
        let anchors: BTreeSet<&Identifier> = picked
            .iter()
            .map(|&i| &candidates[i])
            .filter(|c| c.kind == kind)
            .filter_map(|c| c.anchor.first())
            .collect();
        if anchors.len() as u32 > budget(model, kind) {
            return false;
        }
    }
    true
}

fn enumerate_rec(
    model: &SystemModel,
    candidates: &[Candidate],
    next: usize,
    picked: &mut Vec<usize>,
    out: &mut Vec<Scenario>,
) -> Result<(), RecommendError> {
    if next == candidates.len() {
        let selected = picked.iter().map(|&i| candidates[i].clone()).collect();
        out.push(evaluate(model, selected)?);
        return Ok(());
    }
    enumerate_rec(model, candidates, next + 1, picked, out)?;
    picked.push(next);
    if within_budget(model, candidates, picked) {
        enumerate_rec(model, candidates, next + 1, picked, out)?;
    }
    picked.pop();
    Ok(())
}

/// Stable key for deduplication and ordering of scenarios.
fn selection_key(s: &Scenario) -> Vec<String> {
    s.selected
        .iter()
        .map(|c| crate::parser::pattern_fact(&c.instance))
        .collect()
}

/// Generates, enumerates and ranks. Best scenarios control the most
/// hazards (ties broken by total severity weight, then by using the
/// fewest patterns); equal-score strict supersets of a retained
/// scenario are dropped, mirroring subset-minimal model semantics.
pub fn recommend(model: &SystemModel, hard_cap: usize) -> Result<RecommendationResult, RecommendError> {
    let candidates = generate_candidates(model);
    let scenarios = enumerate_scenarios(model, &candidates, hard_cap)?;
    let total_scenarios = scenarios.len();

    let max_controlled = scenarios
        .iter()
        .map(|s| s.controlled_count)
        .max()
        .unwrap_or(0);
    let tier: Vec<&Scenario> = scenarios
        .iter()
        .filter(|s| s.controlled_count == max_controlled)
        .collect();
    let max_weight = tier.iter().map(|s| s.severity_weight).max().unwrap_or(0);
    let tier: Vec<&Scenario> = tier
        .into_iter()
        .filter(|s| s.severity_weight == max_weight)
        .collect();
    let min_size = tier.iter().map(|s| s.selected.len()).min().unwrap_or(0);
    let mut best: Vec<Scenario> = tier
        .into_iter()
        .filter(|s| s.selected.len() == min_size)
        .cloned()
        .collect();

    // equal size rules out strict supersets; dedup identical selections
    best.sort_by_key(selection_key);
    best.dedup_by_key(|s| selection_key(s));

    let complete: Vec<Scenario> = best
        .iter()
        .filter(|s| s.report.all_controlled())
        .cloned()
        .collect();
    Ok(RecommendationResult {
        best,
        complete,
        total_scenarios,
        budgets: model.explore.clone(),
    })
}
