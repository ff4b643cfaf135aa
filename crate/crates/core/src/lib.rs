//! Safety-pattern reasoning for embedded-system architectures.
//!
//! The crate takes a functional architecture (components, channels,
//! information flows), its hazard analysis (typed hazards and their
//! refinement into sub-hazards) and the safety patterns deployed on it,
//! all written in a small ground-fact language, and answers two
//! questions:
//!
//! 1. which hazards are controlled by the deployed patterns and which
//!    are not, under closed-world semantics (a hazard is uncontrolled
//!    unless some rule proves control), and
//! 2. which additional pattern placements, within per-kind budgets,
//!    control the most hazards.
//!
//! The crate is `no_std` (with `alloc`); file IO and the command-line
//! front end live in the companion `safpat-cli` crate.

#![no_std]

extern crate alloc;

pub mod controllability;
pub mod export;
pub mod ident;
pub mod model;
pub mod parser;
pub mod recommend;
pub mod validate;

pub use controllability::{
    assume_controlled, classify, compute_controllability, AnalysisError, ControllabilityReport,
    HazardClass, Justification, Status, UncontrolledReason, Verdict,
};
pub use export::{render_dot, render_recommendation_json, render_report_json, RenderOptions};
pub use ident::Identifier;
pub use model::{
    Channel, ChannelSet, Component, ExploreKind, Hazard, HazardType, Implementation,
    InformationFlow, LookupError, PatternInstance, Severity, SubHazardEdge, SystemModel,
};
pub use parser::{parse_facts, serialize, ParseOutcome};
pub use recommend::{
    enumerate_scenarios, generate_candidates, recommend, Candidate, RecommendError,
    RecommendationResult, Scenario,
};
pub use validate::{validate_model, DiagSeverity, Diagnostic, SourceSpan};
