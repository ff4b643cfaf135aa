//! Typed in-memory representation of a system model: architecture,
//! hazard analysis, deployed safety patterns and exploration budgets.
//!
//! A `SystemModel` is built either programmatically or by
//! [`crate::parser::parse_facts`], validated once with
//! [`crate::validate::validate_model`], and treated as immutable
//! afterwards. All operations here are pure reads.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::ident::Identifier;

/// How a component is implemented. Mirrors the `hw`/`sw` facts; a
/// component carries at most one of the two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Implementation {
    Hardware,
    Software,
    #[default]
    Unspecified,
}

/// A function of the system (`cp` fact), optionally nested below a
/// parent function (`subcp`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: Identifier,
    pub parent: Option<Identifier>,
    pub impl_kind: Implementation,
}

/// A unidirectional logical channel between two functions (`ch` fact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub id: Identifier,
    pub source: Identifier,
    pub target: Identifier,
}

/// An information flow: an ordered chain of channels (`if` fact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InformationFlow {
    pub id: Identifier,
    pub path: Vec<Identifier>,
}

/// Guideword classifying a hazard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum HazardType {
    Err,
    Loss,
    Omission,
    Late,
    Early,
}

impl HazardType {
    pub fn as_str(self) -> &'static str {
        match self {
            HazardType::Err => "err",
            HazardType::Loss => "loss",
            HazardType::Omission => "omission",
            HazardType::Late => "late",
            HazardType::Early => "early",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Some(match token {
            "err" => HazardType::Err,
            "loss" => HazardType::Loss,
            "omission" => HazardType::Omission,
            "late" => HazardType::Late,
            "early" => HazardType::Early,
            _ => return None,
        })
    }
}

/// Severity class of a hazard; totally ordered, `Minor` lowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Minor,
    Major,
    Fatal,
    Catastrophic,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Minor => "minor",
            Severity::Major => "major",
            Severity::Fatal => "fatal",
            Severity::Catastrophic => "cat",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Some(match token {
            "minor" => Severity::Minor,
            "major" => Severity::Major,
            "fatal" => Severity::Fatal,
            "cat" => Severity::Catastrophic,
            _ => return None,
        })
    }

    /// Numeric rank used as a ranking tie-breaker by the recommender.
    pub fn rank(self) -> u32 {
        match self {
            Severity::Minor => 1,
            Severity::Major => 2,
            Severity::Fatal => 3,
            Severity::Catastrophic => 4,
        }
    }
}

/// An identified failure mode of a function (`hz` fact).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hazard {
    pub id: Identifier,
    pub component: Identifier,
    pub htype: HazardType,
    pub severity: Severity,
}

/// `subHz(child, parent)`: the child hazard can cause the parent.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SubHazardEdge {
    pub child: Identifier,
    pub parent: Identifier,
}

/// A channel-list position of a pattern fact.
///
/// `AllInputs`/`AllOutputs` are the full-coverage sentinels used by
/// recommended patterns instead of spelling out every channel.
/// `Fresh` is a bare fresh (`nu`-prefixed) constant standing for a
/// channel list that is never inspected; membership in it is empty.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum ChannelSet {
    Explicit(Vec<Identifier>),
    AllInputs,
    AllOutputs,
    Fresh(Identifier),
}

impl ChannelSet {
    /// Full-coverage sentinels stand for "every relevant channel".
    pub fn is_full_coverage(&self) -> bool {
        matches!(self, ChannelSet::AllInputs | ChannelSet::AllOutputs)
    }

    /// Membership test matching `#member`; sentinels and fresh atoms
    /// have no members.
    pub fn contains(&self, ch: &Identifier) -> bool {
        match self {
            ChannelSet::Explicit(chs) => chs.contains(ch),
            _ => false,
        }
    }

    pub fn explicit_members(&self) -> &[Identifier] {
        match self {
            ChannelSet::Explicit(chs) => chs,
            _ => &[],
        }
    }
}

/// Safety monitor: observes the inputs and outputs of `monitored` and
/// raises a fail-safe signal on abnormal input-output relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyMonitor {
    pub id: Identifier,
    pub monitored: Identifier,
    pub inputs: ChannelSet,
    pub outputs: ChannelSet,
    pub fail_safe: Identifier,
    pub mon_inputs: ChannelSet,
    pub mon_outputs: ChannelSet,
    pub monitor: Identifier,
}

/// Watchdog: expects periodic liveness messages from `monitored`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Watchdog {
    pub id: Identifier,
    pub monitored: Identifier,
    pub fail_safe: Identifier,
    pub liveness: Identifier,
    pub dog: Identifier,
}

/// Heterogeneous duplex redundancy: `primary` and `replica` feed a
/// voter whose agreed output goes to `out_cp`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hdr {
    pub id: Identifier,
    pub primary: Identifier,
    pub fault_channel: Identifier,
    pub replica: Identifier,
    pub voter_in1: Identifier,
    pub voter_in2: Identifier,
    pub voter: Identifier,
    pub voter_out: Identifier,
    pub out_cp: Identifier,
}

/// Triple modular redundancy: three replicas voted against each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tmr {
    pub id: Identifier,
    pub primary: Identifier,
    pub fault_channel: Identifier,
    pub replica1: Identifier,
    pub replica2: Identifier,
    pub voter_in1: Identifier,
    pub voter_in2: Identifier,
    pub voter_in3: Identifier,
    pub voter: Identifier,
    pub voter_out: Identifier,
    pub out_cp: Identifier,
}

/// Two-version programming: a second software implementation of
/// `version1`, voted output by output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoProg {
    pub id: Identifier,
    pub version1: Identifier,
    pub inputs: ChannelSet,
    pub outputs: ChannelSet,
    pub version2: Identifier,
    pub voters_in1: ChannelSet,
    pub voters_in2: ChannelSet,
    pub voters: ChannelSet,
    pub voter_outs: ChannelSet,
    pub out_cps: ChannelSet,
}

/// A deployed (or recommended) safety pattern instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternInstance {
    SafetyMonitor(SafetyMonitor),
    Watchdog(Watchdog),
    Hdr(Hdr),
    Tmr(Tmr),
    TwoProg(TwoProg),
}

impl PatternInstance {
    pub fn id(&self) -> &Identifier {
        match self {
            PatternInstance::SafetyMonitor(p) => &p.id,
            PatternInstance::Watchdog(p) => &p.id,
            PatternInstance::Hdr(p) => &p.id,
            PatternInstance::Tmr(p) => &p.id,
            PatternInstance::TwoProg(p) => &p.id,
        }
    }

    pub fn kind(&self) -> ExploreKind {
        match self {
            PatternInstance::SafetyMonitor(_) => ExploreKind::SafMon,
            PatternInstance::Watchdog(_) => ExploreKind::Watchdog,
            PatternInstance::Hdr(_) => ExploreKind::Hdr,
            PatternInstance::Tmr(_) => ExploreKind::Tmr,
            PatternInstance::TwoProg(_) => ExploreKind::TwoProg,
        }
    }

    /// Every identifier used in a component position of the fact.
    pub fn component_refs(&self) -> Vec<&Identifier> {
        match self {
            PatternInstance::SafetyMonitor(p) => [&p.monitored, &p.monitor].to_vec(),
            PatternInstance::Watchdog(p) => [&p.monitored, &p.dog].to_vec(),
            PatternInstance::Hdr(p) => [&p.primary, &p.replica, &p.voter, &p.out_cp].to_vec(),
            PatternInstance::Tmr(p) => {
                [&p.primary, &p.replica1, &p.replica2, &p.voter, &p.out_cp].to_vec()
            }
            PatternInstance::TwoProg(p) => [&p.version1, &p.version2].to_vec(),
        }
    }

    /// Every identifier used in a plain channel position of the fact
    /// (channel-set positions are handled separately).
    pub fn channel_refs(&self) -> Vec<&Identifier> {
        match self {
            PatternInstance::SafetyMonitor(p) => [&p.fail_safe].to_vec(),
            PatternInstance::Watchdog(p) => [&p.fail_safe, &p.liveness].to_vec(),
            PatternInstance::Hdr(p) => {
                [&p.fault_channel, &p.voter_in1, &p.voter_in2, &p.voter_out].to_vec()
            }
            PatternInstance::Tmr(p) => [
                &p.fault_channel,
                &p.voter_in1,
                &p.voter_in2,
                &p.voter_in3,
                &p.voter_out,
            ]
            .to_vec(),
            PatternInstance::TwoProg(_) => Vec::new(),
        }
    }

    pub fn channel_sets(&self) -> Vec<&ChannelSet> {
        match self {
            PatternInstance::SafetyMonitor(p) => {
                [&p.inputs, &p.outputs, &p.mon_inputs, &p.mon_outputs].to_vec()
            }
            PatternInstance::Watchdog(_) | PatternInstance::Hdr(_) | PatternInstance::Tmr(_) => {
                Vec::new()
            }
            PatternInstance::TwoProg(p) => [
                &p.inputs,
                &p.outputs,
                &p.voters_in1,
                &p.voters_in2,
                &p.voters,
                &p.voter_outs,
                &p.out_cps,
            ]
            .to_vec(),
        }
    }
}

/// Pattern kinds addressable by `explore` directives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExploreKind {
    SafMon,
    Watchdog,
    Hdr,
    Tmr,
    TwoProg,
}

impl ExploreKind {
    pub const ALL: [ExploreKind; 5] = [
        ExploreKind::SafMon,
        ExploreKind::Watchdog,
        ExploreKind::Hdr,
        ExploreKind::Tmr,
        ExploreKind::TwoProg,
    ];

    /// The atom used in `explore(N, kind)` facts.
    pub fn as_str(self) -> &'static str {
        match self {
            ExploreKind::SafMon => "safMon",
            ExploreKind::Watchdog => "wd",
            ExploreKind::Hdr => "hdr",
            ExploreKind::Tmr => "tmr",
            ExploreKind::TwoProg => "2Prog",
        }
    }

    pub fn parse(token: &str) -> Option<Self> {
        Some(match token {
            "safMon" => ExploreKind::SafMon,
            "wd" | "watchDog" => ExploreKind::Watchdog,
            "hdr" => ExploreKind::Hdr,
            "tmr" => ExploreKind::Tmr,
            "2Prog" | "twoProg" => ExploreKind::TwoProg,
            _ => return None,
        })
    }
}

impl fmt::Display for ExploreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The complete fact base of one system under analysis.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SystemModel {
    pub components: BTreeMap<Identifier, Component>,
    pub channels: BTreeMap<Identifier, Channel>,
    pub flows: BTreeMap<Identifier, InformationFlow>,
    pub hazards: BTreeMap<Identifier, Hazard>,
    pub sub_hazards: BTreeSet<SubHazardEdge>,
    pub patterns: BTreeMap<Identifier, PatternInstance>,
    pub explore: BTreeMap<ExploreKind, u32>,
    /// The `isexploration` flag: relaxes channel-coverage checks for
    /// recommended patterns whose auxiliary channels are not
    /// materialized as `ch` facts.
    pub exploration_mode: bool,
    /// Hazards taken as controlled without a pattern (engineering
    /// assumptions, e.g. bus replacement strategies).
    pub assumptions: BTreeSet<Identifier>,
}

/// A read addressed an id that is not declared in the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LookupError {
    UnknownComponent(Identifier),
    UnknownFlow(Identifier),
    UnknownHazard(Identifier),
}

impl fmt::Display for LookupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LookupError::UnknownComponent(c) => write!(f, "unknown component `{c}`"),
            LookupError::UnknownFlow(x) => write!(f, "unknown flow `{x}`"),
            LookupError::UnknownHazard(h) => write!(f, "unknown hazard `{h}`"),
        }
    }
}

impl SystemModel {
    pub fn add_component(&mut self, id: Identifier) {
        self.components.entry(id.clone()).or_insert(Component {
            id,
            parent: None,
            impl_kind: Implementation::Unspecified,
        });
    }

    pub fn add_channel(&mut self, id: Identifier, source: Identifier, target: Identifier) {
        self.channels
            .insert(id.clone(), Channel { id, source, target });
    }

    pub fn add_hazard(
        &mut self,
        id: Identifier,
        component: Identifier,
        htype: HazardType,
        severity: Severity,
    ) {
        self.hazards.insert(
            id.clone(),
            Hazard {
                id,
                component,
                htype,
                severity,
            },
        );
    }

    pub fn add_flow(&mut self, id: Identifier, path: Vec<Identifier>) {
        self.flows.insert(id.clone(), InformationFlow { id, path });
    }

    pub fn add_sub_hazard(&mut self, child: Identifier, parent: Identifier) {
        self.sub_hazards.insert(SubHazardEdge { child, parent });
    }

    pub fn add_pattern(&mut self, pattern: PatternInstance) {
        self.patterns.insert(pattern.id().clone(), pattern);
    }

    /// Channels whose target is `cp`.
    pub fn channels_into(&self, cp: &Identifier) -> Result<BTreeSet<Identifier>, LookupError> {
        if !self.components.contains_key(cp) {
            return Err(LookupError::UnknownComponent(cp.clone()));
        }
        Ok(self
            .channels
            .values()
            .filter(|ch| &ch.target == cp)
            .map(|ch| ch.id.clone())
            .collect())
    }

    /// Channels whose source is `cp`.
    pub fn channels_out_of(&self, cp: &Identifier) -> Result<BTreeSet<Identifier>, LookupError> {
        if !self.components.contains_key(cp) {
            return Err(LookupError::UnknownComponent(cp.clone()));
        }
        Ok(self
            .channels
            .values()
            .filter(|ch| &ch.source == cp)
            .map(|ch| ch.id.clone())
            .collect())
    }

    /// True iff both channels occur in the flow's path and `ch1` comes
    /// strictly before `ch2`. Channels absent from the path are simply
    /// not ordered (false), not an error.
    pub fn before(
        &self,
        ch1: &Identifier,
        ch2: &Identifier,
        flow: &Identifier,
    ) -> Result<bool, LookupError> {
        let flow = self
            .flows
            .get(flow)
            .ok_or_else(|| LookupError::UnknownFlow(flow.clone()))?;
        let pos1 = flow.path.iter().position(|c| c == ch1);
        let pos2 = flow.path.iter().position(|c| c == ch2);
        Ok(match (pos1, pos2) {
            (Some(a), Some(b)) => a < b,
            _ => false,
        })
    }

    /// The component sequence a contiguous flow traverses: the source
    /// of the first channel, then the target of every channel in turn.
    pub fn flow_components(&self, flow: &Identifier) -> Result<Vec<Identifier>, LookupError> {
        let flow = self
            .flows
            .get(flow)
            .ok_or_else(|| LookupError::UnknownFlow(flow.clone()))?;
        let mut seq = Vec::with_capacity(flow.path.len() + 1);
        for (i, ch_id) in flow.path.iter().enumerate() {
            // validated flows only reference declared channels
            let Some(ch) = self.channels.get(ch_id) else {
                continue;
            };
            if i == 0 {
                seq.push(ch.source.clone());
            }
            seq.push(ch.target.clone());
        }
        Ok(seq)
    }

    /// 0-based position of `cp` in the flow's component sequence;
    /// first occurrence when the flow revisits a component.
    pub fn component_position(
        &self,
        cp: &Identifier,
        flow: &Identifier,
    ) -> Result<Option<usize>, LookupError> {
        Ok(self.flow_components(flow)?.iter().position(|c| c == cp))
    }

    /// Direct sub-hazards of `hz` per the refinement edges.
    pub fn hazard_children(&self, hz: &Identifier) -> Result<BTreeSet<Identifier>, LookupError> {
        if !self.hazards.contains_key(hz) {
            return Err(LookupError::UnknownHazard(hz.clone()));
        }
        Ok(self
            .sub_hazards
            .iter()
            .filter(|e| &e.parent == hz)
            .map(|e| e.child.clone())
            .collect())
    }

    /// Every identifier declared in some namespace of the model; used
    /// to keep generated fresh constants collision-free.
    pub fn declared_ids(&self) -> BTreeSet<Identifier> {
        let mut out: BTreeSet<Identifier> = BTreeSet::new();
        out.extend(self.components.keys().cloned());
        out.extend(self.channels.keys().cloned());
        out.extend(self.flows.keys().cloned());
        out.extend(self.hazards.keys().cloned());
        out.extend(self.patterns.keys().cloned());
        out
    }

    /// Components appearing in auxiliary positions of deployed
    /// patterns (monitors, voters, watchdog functions, replicas).
    pub fn pattern_aux_components(&self) -> BTreeSet<Identifier> {
        self.patterns
            .values()
            .flat_map(|p| p.component_refs().into_iter().cloned())
            .collect()
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::id;
    use alloc::vec;

    /// The adaptive-cruise-control running example.
    pub fn acc_model() -> SystemModel {
        let mut m = SystemModel::default();
        for c in ["acc", "accm", "ds", "vs", "bs", "ps"] {
            m.add_component(id!(c));
        }
        for (child, parent) in [("accm", "acc"), ("ds", "acc"), ("vs", "acc")] {
            m.components.get_mut(&id!(child)).unwrap().parent = Some(id!(parent));
        }
        m.components.get_mut(&id!("accm")).unwrap().impl_kind = Implementation::Software;
        for hwc in ["ds", "vs", "ps", "bs"] {
            m.components.get_mut(&id!(hwc)).unwrap().impl_kind = Implementation::Hardware;
        }
        m.add_channel(id!("dsaccm"), id!("ds"), id!("accm"));
        m.add_channel(id!("vsaccm"), id!("vs"), id!("accm"));
        m.add_channel(id!("accmbs"), id!("accm"), id!("bs"));
        m.add_channel(id!("accmps"), id!("accm"), id!("ps"));
        m.add_flow(id!("if1"), vec![id!("vsaccm"), id!("accmbs")]);
        m.add_flow(id!("if2"), vec![id!("dsaccm"), id!("accmbs")]);
        m.add_hazard(id!("h1"), id!("acc"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(id!("h2"), id!("acc"), HazardType::Loss, Severity::Catastrophic);
        m.add_hazard(id!("h11"), id!("ds"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(id!("h12"), id!("vs"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(id!("h13"), id!("accm"), HazardType::Err, Severity::Catastrophic);
        m.add_sub_hazard(id!("h11"), id!("h1"));
        m.add_sub_hazard(id!("h12"), id!("h1"));
        m.add_sub_hazard(id!("h13"), id!("h1"));
        m
    }

    /// The battery-management-system example: a ring
    /// bat -> bms -> can -> fw -> ci -> bat.
    pub fn bms_model() -> SystemModel {
        let mut m = SystemModel::default();
        for c in ["bat", "bms", "can", "fw", "ci"] {
            m.add_component(id!(c));
        }
        m.components.get_mut(&id!("bms")).unwrap().impl_kind = Implementation::Software;
        m.components.get_mut(&id!("fw")).unwrap().impl_kind = Implementation::Software;
        for hwc in ["bat", "can", "ci"] {
            m.components.get_mut(&id!(hwc)).unwrap().impl_kind = Implementation::Hardware;
        }
        m.add_channel(id!("batbms"), id!("bat"), id!("bms"));
        m.add_channel(id!("bmscan"), id!("bms"), id!("can"));
        m.add_channel(id!("canfw"), id!("can"), id!("fw"));
        m.add_channel(id!("fwci"), id!("fw"), id!("ci"));
        m.add_channel(id!("cibat"), id!("ci"), id!("bat"));
        m.add_flow(
            id!("ifb"),
            vec![
                id!("batbms"),
                id!("bmscan"),
                id!("canfw"),
                id!("fwci"),
                id!("cibat"),
            ],
        );
        m.add_hazard(id!("cierr"), id!("ci"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(id!("bmserr"), id!("bms"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(id!("canerr"), id!("can"), HazardType::Err, Severity::Catastrophic);
        m.add_hazard(
            id!("fwerr"),
            id!("fw"),
            HazardType::Omission,
            Severity::Catastrophic,
        );
        m.add_sub_hazard(id!("bmserr"), id!("cierr"));
        m.add_sub_hazard(id!("canerr"), id!("cierr"));
        m.add_sub_hazard(id!("fwerr"), id!("cierr"));
        m
    }
}
