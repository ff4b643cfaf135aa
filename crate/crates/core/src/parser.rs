//! Parser and serializer for the ground-fact model syntax.
//!
//! A model file is a sequence of facts `pred(arg, ..., arg).`; `%`
//! starts a line comment; whitespace is insignificant. Recognized
//! predicates:
//!
//! ```text
//! cp/1 subcp/2 ch/3 if/2 hw/1 sw/1 hz/4 subHz/2
//! safMon/8 watchDog/5 hdr/9 tmr/11 2Prog/10 (alias twoProg/10)
//! explore/2 isexploration/0
//! ```
//!
//! Unknown predicates produce a warning and are ignored. Analysis
//! output predicates (`ctl`, `nctl` and the `n`-prefixed choice atoms)
//! are rejected: they are results, not model statements. Parsing is
//! total: every input yields either a model or error diagnostics.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ident::Identifier;
use crate::model::{
    ChannelSet, ExploreKind, Hazard, HazardType, Hdr, InformationFlow, Implementation,
    PatternInstance, SafetyMonitor, Severity, SystemModel, Tmr, TwoProg, Watchdog,
};
use crate::validate::{validate_model, DiagSeverity, Diagnostic, SourceSpan};

/// One term of a fact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactTerm {
    Atom(String),
    Integer(i64),
    QuotedString(String),
    List(Vec<FactTerm>),
}

/// Result of [`parse_facts`]: the model is present iff no `Error`
/// diagnostic was produced; warnings may accompany a model.
#[derive(Debug, Clone)]
pub struct ParseOutcome {
    pub model: Option<SystemModel>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutcome {
    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(Diagnostic::is_error)
    }
}

// ---------------------------------------------------------------- lexer

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Atom(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
}

#[derive(Debug, Clone)]
struct SpannedTok {
    tok: Tok,
    span: SourceSpan,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> u8 {
        let b = self.src[self.pos];
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        b
    }

    fn span_from(&self, start: usize, line: u32, col: u32) -> SourceSpan {
        SourceSpan {
            start,
            end: self.pos,
            line,
            column: col,
        }
    }

    /// Tokenizes the whole input, pushing diagnostics for bad bytes.
    fn run(mut self, diags: &mut Vec<Diagnostic>) -> Vec<SpannedTok> {
        let mut out = Vec::new();
        while self.pos < self.src.len() {
            let (start, line, col) = (self.pos, self.line, self.col);
            let b = self.src[self.pos];
            match b {
                b' ' | b'\t' | b'\r' | b'\n' => {
                    self.bump();
                }
                b'%' => {
                    while self.pos < self.src.len() && self.src[self.pos] != b'\n' {
                        self.bump();
                    }
                }
                b'(' | b')' | b'[' | b']' | b',' | b'.' => {
                    self.bump();
                    let tok = match b {
                        b'(' => Tok::LParen,
                        b')' => Tok::RParen,
                        b'[' => Tok::LBracket,
                        b']' => Tok::RBracket,
                        b',' => Tok::Comma,
                        _ => Tok::Dot,
                    };
                    out.push(SpannedTok {
                        tok,
                        span: self.span_from(start, line, col),
                    });
                }
                b'"' => {
                    self.bump();
                    let mut text = String::new();
                    let mut closed = false;
                    while self.pos < self.src.len() {
                        let c = self.bump();
                        match c {
                            b'"' => {
                                closed = true;
                                break;
                            }
                            b'\\' if self.pos < self.src.len() => {
                                text.push(self.bump() as char);
                            }
                            _ => text.push(c as char),
                        }
                    }
                    let span = self.span_from(start, line, col);
                    if closed {
                        out.push(SpannedTok {
                            tok: Tok::Str(text),
                            span,
                        });
                    } else {
                        diags.push(
                            Diagnostic::error("syntax-error", "unterminated string".to_string())
                                .at(span),
                        );
                    }
                }
                _ if b.is_ascii_alphanumeric() || b == b'_' => {
                    while self.pos < self.src.len()
                        && (self.src[self.pos].is_ascii_alphanumeric()
                            || self.src[self.pos] == b'_')
                    {
                        self.bump();
                    }
                    let word = core::str::from_utf8(&self.src[start..self.pos])
                        .unwrap_or("")
                        .to_string();
                    let span = self.span_from(start, line, col);
                    if word.bytes().all(|c| c.is_ascii_digit()) {
                        match word.parse::<i64>() {
                            Ok(n) => out.push(SpannedTok {
                                tok: Tok::Int(n),
                                span,
                            }),
                            Err(_) => diags.push(
                                Diagnostic::error(
                                    "syntax-error",
                                    format!("integer literal `{word}` out of range"),
                                )
                                .at(span),
                            ),
                        }
                    } else if word.as_bytes()[0].is_ascii_uppercase() || word.starts_with('_') {
                        diags.push(
                            Diagnostic::error(
                                "syntax-error",
                                format!("variable `{word}` not allowed in ground facts"),
                            )
                            .at(span),
                        );
                    } else {
                        out.push(SpannedTok {
                            tok: Tok::Atom(word),
                            span,
                        });
                    }
                }
                _ => {
                    self.bump();
                    diags.push(
                        Diagnostic::error(
                            "syntax-error",
                            format!("unexpected byte 0x{b:02x}"),
                        )
                        .at(self.span_from(start, line, col)),
                    );
                }
            }
        }
        out
    }
}

// --------------------------------------------------------------- parser

struct RawFact {
    name: String,
    args: Vec<FactTerm>,
    span: SourceSpan,
}

struct Parser {
    toks: Vec<SpannedTok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&SpannedTok> {
        self.toks.get(self.pos)
    }

    fn skip_to_dot(&mut self) {
        while let Some(t) = self.peek() {
            let is_dot = t.tok == Tok::Dot;
            self.pos += 1;
            if is_dot {
                break;
            }
        }
    }

    fn parse_term(&mut self, diags: &mut Vec<Diagnostic>) -> Option<FactTerm> {
        let t = self.peek()?.clone();
        match t.tok {
            Tok::Atom(a) => {
                self.pos += 1;
                Some(FactTerm::Atom(a))
            }
            Tok::Int(n) => {
                self.pos += 1;
                Some(FactTerm::Integer(n))
            }
            Tok::Str(s) => {
                self.pos += 1;
                Some(FactTerm::QuotedString(s))
            }
            Tok::LBracket => {
                self.pos += 1;
                let mut items = Vec::new();
                if let Some(nt) = self.peek() {
                    if nt.tok == Tok::RBracket {
                        self.pos += 1;
                        return Some(FactTerm::List(items));
                    }
                }
                loop {
                    items.push(self.parse_term(diags)?);
                    match self.peek().map(|t| t.tok.clone()) {
                        Some(Tok::Comma) => self.pos += 1,
                        Some(Tok::RBracket) => {
                            self.pos += 1;
                            return Some(FactTerm::List(items));
                        }
                        _ => {
                            diags.push(
                                Diagnostic::error(
                                    "syntax-error",
                                    "expected `,` or `]` in list".to_string(),
                                )
                                .at(t.span),
                            );
                            return None;
                        }
                    }
                }
            }
            _ => {
                diags.push(
                    Diagnostic::error("syntax-error", "expected a term".to_string()).at(t.span),
                );
                None
            }
        }
    }

    /// Parses one `pred(args).` or `pred.`; on failure records a
    /// diagnostic and resynchronizes at the next `.`.
    fn parse_fact(&mut self, diags: &mut Vec<Diagnostic>) -> Option<RawFact> {
        let head = self.peek()?.clone();
        let Tok::Atom(name) = head.tok else {
            diags.push(
                Diagnostic::error("syntax-error", "expected a predicate name".to_string())
                    .at(head.span),
            );
            self.skip_to_dot();
            return None;
        };
        self.pos += 1;
        let mut args = Vec::new();
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Dot) => {
                self.pos += 1;
                return Some(RawFact {
                    name,
                    args,
                    span: head.span,
                });
            }
            Some(Tok::LParen) => {
                self.pos += 1;
            }
            _ => {
                diags.push(
                    Diagnostic::error("syntax-error", "expected `(` or `.` after predicate".to_string())
                        .at(head.span),
                );
                self.skip_to_dot();
                return None;
            }
        }
        loop {
            match self.parse_term(diags) {
                Some(term) => args.push(term),
                None => {
                    self.skip_to_dot();
                    return None;
                }
            }
            match self.peek().map(|t| t.tok.clone()) {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {
                    self.pos += 1;
                    break;
                }
                _ => {
                    diags.push(
                        Diagnostic::error(
                            "syntax-error",
                            "expected `,` or `)` in argument list".to_string(),
                        )
                        .at(head.span),
                    );
                    self.skip_to_dot();
                    return None;
                }
            }
        }
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Dot) => {
                self.pos += 1;
                Some(RawFact {
                    name,
                    args,
                    span: head.span,
                })
            }
            _ => {
                diags.push(
                    Diagnostic::error("syntax-error", "expected `.` after fact".to_string())
                        .at(head.span),
                );
                self.skip_to_dot();
                None
            }
        }
    }
}

// -------------------------------------------------- model construction

/// Predicates that only appear in analysis output.
const OUTPUT_ONLY: &[&str] = &[
    "ctl", "nctl", "nsafMon", "nwatchDog", "nhdr", "ntmr", "n2Prog", "ntwoProg",
];

struct Builder {
    model: SystemModel,
    diags: Vec<Diagnostic>,
}

impl Builder {
    fn err(&mut self, code: &'static str, message: String, span: SourceSpan) {
        self.diags.push(Diagnostic::error(code, message).at(span));
    }

    fn ident(&mut self, term: &FactTerm, span: SourceSpan) -> Option<Identifier> {
        match term {
            FactTerm::Atom(a) => match Identifier::new(a) {
                Ok(id) => Some(id),
                Err(e) => {
                    self.err("invalid-identifier", format!("`{a}`: {e}"), span);
                    None
                }
            },
            other => {
                self.err(
                    "invalid-identifier",
                    format!("expected an atom, got {other:?}"),
                    span,
                );
                None
            }
        }
    }

    fn channel_set(&mut self, term: &FactTerm, span: SourceSpan) -> Option<ChannelSet> {
        match term {
            FactTerm::Atom(a) if a == "allInputs" => Some(ChannelSet::AllInputs),
            FactTerm::Atom(a) if a == "allOutputs" => Some(ChannelSet::AllOutputs),
            FactTerm::Atom(a) if a.starts_with("nu") => {
                Some(ChannelSet::Fresh(self.ident(term, span)?))
            }
            FactTerm::Atom(a) => {
                self.err(
                    "bare-atom-in-list",
                    format!(
                        "`{a}` in a channel-list position: expected a list, \
                         `allInputs`/`allOutputs`, or a fresh `nu`-prefixed constant"
                    ),
                    span,
                );
                None
            }
            FactTerm::List(items) => {
                let mut out = Vec::with_capacity(items.len());
                for item in items {
                    out.push(self.ident(item, span)?);
                }
                Some(ChannelSet::Explicit(out))
            }
            other => {
                self.err(
                    "bare-atom-in-list",
                    format!("expected a channel list, got {other:?}"),
                    span,
                );
                None
            }
        }
    }

    fn add(&mut self, fact: &RawFact) {
        let span = fact.span;
        match (fact.name.as_str(), fact.args.len()) {
            ("cp", 1) => {
                if let Some(id) = self.ident(&fact.args[0], span) {
                    self.model.add_component(id);
                }
            }
            ("subcp", 2) => {
                let (Some(child), Some(parent)) = (
                    self.ident(&fact.args[0], span),
                    self.ident(&fact.args[1], span),
                ) else {
                    return;
                };
                match self.model.components.get_mut(&child) {
                    Some(cp) => match &cp.parent {
                        Some(existing) if existing != &parent => {
                            let existing = existing.clone();
                            self.err(
                                "conflicting-parent",
                                format!("component `{child}` already nested under `{existing}`"),
                                span,
                            );
                        }
                        _ => cp.parent = Some(parent),
                    },
                    None => self.err(
                        "undeclared-component",
                        format!("subcp references undeclared component `{child}`"),
                        span,
                    ),
                }
            }
            ("ch", 3) => {
                let (Some(id), Some(src), Some(dst)) = (
                    self.ident(&fact.args[0], span),
                    self.ident(&fact.args[1], span),
                    self.ident(&fact.args[2], span),
                ) else {
                    return;
                };
                if let Some(existing) = self.model.channels.get(&id) {
                    if existing.source != src || existing.target != dst {
                        self.err(
                            "duplicate-channel",
                            format!("channel `{id}` declared twice with different endpoints"),
                            span,
                        );
                    }
                    return;
                }
                self.model.add_channel(id, src, dst);
            }
            ("if", 2) => {
                let Some(id) = self.ident(&fact.args[0], span) else {
                    return;
                };
                let FactTerm::List(items) = &fact.args[1] else {
                    self.err(
                        "syntax-error",
                        format!("flow `{id}` path must be a channel list"),
                        span,
                    );
                    return;
                };
                let mut path = Vec::with_capacity(items.len());
                for item in items {
                    let Some(ch) = self.ident(item, span) else {
                        return;
                    };
                    path.push(ch);
                }
                if let Some(existing) = self.model.flows.get(&id) {
                    if existing.path != path {
                        self.err(
                            "duplicate-flow",
                            format!("flow `{id}` declared twice with different paths"),
                            span,
                        );
                    }
                    return;
                }
                self.model.add_flow(id, path);
            }
            (kind @ ("hw" | "sw"), 1) => {
                let Some(id) = self.ident(&fact.args[0], span) else {
                    return;
                };
                let target = if kind == "hw" {
                    Implementation::Hardware
                } else {
                    Implementation::Software
                };
                match self.model.components.get_mut(&id) {
                    Some(cp) => {
                        if cp.impl_kind != Implementation::Unspecified && cp.impl_kind != target {
                            self.err(
                                "hw-sw-conflict",
                                format!("component `{id}` declared both hardware and software"),
                                span,
                            );
                        } else {
                            cp.impl_kind = target;
                        }
                    }
                    None => self.err(
                        "undeclared-component",
                        format!("`{kind}` references undeclared component `{id}`"),
                        span,
                    ),
                }
            }
            ("hz", 4) => {
                let Some(id) = self.ident(&fact.args[0], span) else {
                    return;
                };
                let Some(cp) = self.ident(&fact.args[1], span) else {
                    return;
                };
                let htype = match &fact.args[2] {
                    FactTerm::Atom(a) => match HazardType::parse(a) {
                        Some(t) => t,
                        None => {
                            self.err(
                                "invalid-hazard-type",
                                format!("`{a}` is not a hazard type (err/loss/omission/late/early)"),
                                span,
                            );
                            return;
                        }
                    },
                    other => {
                        self.err(
                            "invalid-hazard-type",
                            format!("expected a hazard type atom, got {other:?}"),
                            span,
                        );
                        return;
                    }
                };
                let severity = match &fact.args[3] {
                    FactTerm::Atom(a) => match Severity::parse(a) {
                        Some(s) => s,
                        None => {
                            self.err(
                                "invalid-severity",
                                format!("`{a}` is not a severity (minor/major/fatal/cat)"),
                                span,
                            );
                            return;
                        }
                    },
                    other => {
                        self.err(
                            "invalid-severity",
                            format!("expected a severity atom, got {other:?}"),
                            span,
                        );
                        return;
                    }
                };
                let new = Hazard {
                    id: id.clone(),
                    component: cp,
                    htype,
                    severity,
                };
                if let Some(existing) = self.model.hazards.get(&id) {
                    if existing != &new {
                        self.err(
                            "duplicate-hazard",
                            format!("hazard `{id}` declared twice with different fields"),
                            span,
                        );
                    }
                    return;
                }
                self.model.hazards.insert(id, new);
            }
            ("subHz", 2) => {
                let (Some(child), Some(parent)) = (
                    self.ident(&fact.args[0], span),
                    self.ident(&fact.args[1], span),
                ) else {
                    return;
                };
                self.model.add_sub_hazard(child, parent);
            }
            ("safMon", 8) => {
                let Some(pat) = self.safmon(fact, span) else {
                    return;
                };
                self.insert_pattern(PatternInstance::SafetyMonitor(pat), span);
            }
            ("watchDog", 5) => {
                let ids: Option<Vec<Identifier>> = fact
                    .args
                    .iter()
                    .map(|t| self.ident(t, span))
                    .collect();
                let Some(ids) = ids else { return };
                let [id, monitored, fail_safe, liveness, dog]: [Identifier; 5] =
                    ids.try_into().unwrap();
                self.insert_pattern(
                    PatternInstance::Watchdog(Watchdog {
                        id,
                        monitored,
                        fail_safe,
                        liveness,
                        dog,
                    }),
                    span,
                );
            }
            ("hdr", 9) => {
                let ids: Option<Vec<Identifier>> = fact
                    .args
                    .iter()
                    .map(|t| self.ident(t, span))
                    .collect();
                let Some(ids) = ids else { return };
                let [id, primary, fault_channel, replica, voter_in1, voter_in2, voter, voter_out, out_cp]: [Identifier; 9] = ids.try_into().unwrap();
                self.insert_pattern(
                    PatternInstance::Hdr(Hdr {
                        id,
                        primary,
                        fault_channel,
                        replica,
                        voter_in1,
                        voter_in2,
                        voter,
                        voter_out,
                        out_cp,
                    }),
                    span,
                );
            }
            ("tmr", 11) => {
                let ids: Option<Vec<Identifier>> = fact
                    .args
                    .iter()
                    .map(|t| self.ident(t, span))
                    .collect();
                let Some(ids) = ids else { return };
                let [id, primary, fault_channel, replica1, replica2, voter_in1, voter_in2, voter_in3, voter, voter_out, out_cp]: [Identifier; 11] = ids.try_into().unwrap();
                self.insert_pattern(
                    PatternInstance::Tmr(Tmr {
                        id,
                        primary,
                        fault_channel,
                        replica1,
                        replica2,
                        voter_in1,
                        voter_in2,
                        voter_in3,
                        voter,
                        voter_out,
                        out_cp,
                    }),
                    span,
                );
            }
            ("2Prog" | "twoProg", 10) => {
                let Some(pat) = self.twoprog(fact, span) else {
                    return;
                };
                self.insert_pattern(PatternInstance::TwoProg(pat), span);
            }
            ("explore", 2) => {
                let budget = match &fact.args[0] {
                    FactTerm::Integer(n) if *n >= 0 => *n as u32,
                    other => {
                        self.err(
                            "invalid-budget",
                            format!("explore budget must be a non-negative integer, got {other:?}"),
                            span,
                        );
                        return;
                    }
                };
                let kind = match &fact.args[1] {
                    FactTerm::Atom(a) => match ExploreKind::parse(a) {
                        Some(k) => k,
                        None => {
                            self.err(
                                "invalid-explore-kind",
                                format!("`{a}` is not a pattern kind (safMon/wd/hdr/tmr/2Prog)"),
                                span,
                            );
                            return;
                        }
                    },
                    other => {
                        self.err(
                            "invalid-explore-kind",
                            format!("expected a pattern kind atom, got {other:?}"),
                            span,
                        );
                        return;
                    }
                };
                if let Some(old) = self.model.explore.insert(kind, budget) {
                    if old != budget {
                        self.diags.push(
                            Diagnostic::warning(
                                "explore-override",
                                format!("explore({old},{kind}) overridden by explore({budget},{kind})"),
                            )
                            .at(span),
                        );
                    }
                }
            }
            ("isexploration", 0) => {
                self.model.exploration_mode = true;
            }
            (name, arity) if OUTPUT_ONLY.contains(&name) => {
                self.err(
                    "output-fact",
                    format!("`{name}/{arity}` is an analysis result and not allowed in input"),
                    span,
                );
            }
            (
                name @ ("cp" | "subcp" | "ch" | "if" | "hw" | "sw" | "hz" | "subHz" | "safMon"
                | "watchDog" | "hdr" | "tmr" | "2Prog" | "twoProg" | "explore"
                | "isexploration"),
                arity,
            ) => {
                self.err(
                    "arity-mismatch",
                    format!("`{name}` used with {arity} argument(s)"),
                    span,
                );
            }
            (name, _) => {
                self.diags.push(
                    Diagnostic::warning(
                        "unknown-predicate",
                        format!("ignoring unknown predicate `{name}`"),
                    )
                    .at(span),
                );
            }
        }
    }

    fn safmon(&mut self, fact: &RawFact, span: SourceSpan) -> Option<SafetyMonitor> {
        Some(SafetyMonitor {
            id: self.ident(&fact.args[0], span)?,
            monitored: self.ident(&fact.args[1], span)?,
            inputs: self.channel_set(&fact.args[2], span)?,
            outputs: self.channel_set(&fact.args[3], span)?,
            fail_safe: self.ident(&fact.args[4], span)?,
            mon_inputs: self.channel_set(&fact.args[5], span)?,
            mon_outputs: self.channel_set(&fact.args[6], span)?,
            monitor: self.ident(&fact.args[7], span)?,
        })
    }

    fn twoprog(&mut self, fact: &RawFact, span: SourceSpan) -> Option<TwoProg> {
        Some(TwoProg {
            id: self.ident(&fact.args[0], span)?,
            version1: self.ident(&fact.args[1], span)?,
            inputs: self.channel_set(&fact.args[2], span)?,
            outputs: self.channel_set(&fact.args[3], span)?,
            version2: self.ident(&fact.args[4], span)?,
            voters_in1: self.channel_set(&fact.args[5], span)?,
            voters_in2: self.channel_set(&fact.args[6], span)?,
            voters: self.channel_set(&fact.args[7], span)?,
            voter_outs: self.channel_set(&fact.args[8], span)?,
            out_cps: self.channel_set(&fact.args[9], span)?,
        })
    }

    fn insert_pattern(&mut self, pattern: PatternInstance, span: SourceSpan) {
        let id = pattern.id().clone();
        if let Some(existing) = self.model.patterns.get(&id) {
            if existing != &pattern {
                self.err(
                    "duplicate-pattern",
                    format!("pattern id `{id}` declared twice"),
                    span,
                );
            }
            return;
        }
        self.model.patterns.insert(id, pattern);
    }
}

/// Parses a fact file into a validated model. Total: never panics on
/// any input; either `model` is present or at least one `Error`
/// diagnostic explains why not.
pub fn parse_facts(text: &str) -> ParseOutcome {
    let mut diags: Vec<Diagnostic> = Vec::new();
    let toks = Lexer::new(text).run(&mut diags);
    let mut parser = Parser { toks, pos: 0 };
    let mut facts: Vec<RawFact> = Vec::new();
    while parser.peek().is_some() {
        if let Some(fact) = parser.parse_fact(&mut diags) {
            facts.push(fact);
        }
    }

    let mut builder = Builder {
        model: SystemModel::default(),
        diags,
    };
    // declarations first so reference checks are order-insensitive
    let declaration_order = |name: &str| match name {
        "cp" => 0,
        "hw" | "sw" | "subcp" => 1,
        "ch" => 2,
        _ => 3,
    };
    let mut ordered: Vec<&RawFact> = facts.iter().collect();
    ordered.sort_by_key(|f| declaration_order(&f.name));
    for fact in ordered {
        builder.add(fact);
    }

    let Builder { model, mut diags } = builder;
    diags.extend(validate_model(&model));
    let model = if diags.iter().any(Diagnostic::is_error) {
        None
    } else {
        Some(model)
    };
    ParseOutcome {
        model,
        diagnostics: diags,
    }
}

// ----------------------------------------------------------- serializer

fn push_channel_set(out: &mut String, set: &ChannelSet) {
    match set {
        ChannelSet::Explicit(chs) => {
            out.push('[');
            for (i, ch) in chs.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(ch.as_str());
            }
            out.push(']');
        }
        ChannelSet::AllInputs => out.push_str("allInputs"),
        ChannelSet::AllOutputs => out.push_str("allOutputs"),
        ChannelSet::Fresh(id) => out.push_str(id.as_str()),
    }
}

fn fact_line(name: &str, args: &[&dyn core::fmt::Display]) -> String {
    let mut line = String::new();
    line.push_str(name);
    line.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            line.push(',');
        }
        line.push_str(&a.to_string());
    }
    line.push_str(").\n");
    line
}

/// Renders one pattern instance in ground-fact notation, without the
/// trailing period.
pub fn pattern_fact(pattern: &PatternInstance) -> String {
    let mut s = String::new();
    match pattern {
        PatternInstance::SafetyMonitor(p) => {
            s.push_str("safMon(");
            s.push_str(p.id.as_str());
            s.push(',');
            s.push_str(p.monitored.as_str());
            s.push(',');
            push_channel_set(&mut s, &p.inputs);
            s.push(',');
            push_channel_set(&mut s, &p.outputs);
            s.push(',');
            s.push_str(p.fail_safe.as_str());
            s.push(',');
            push_channel_set(&mut s, &p.mon_inputs);
            s.push(',');
            push_channel_set(&mut s, &p.mon_outputs);
            s.push(',');
            s.push_str(p.monitor.as_str());
            s.push(')');
        }
        PatternInstance::Watchdog(p) => {
            s = format!(
                "watchDog({},{},{},{},{})",
                p.id, p.monitored, p.fail_safe, p.liveness, p.dog
            );
        }
        PatternInstance::Hdr(p) => {
            s = format!(
                "hdr({},{},{},{},{},{},{},{},{})",
                p.id,
                p.primary,
                p.fault_channel,
                p.replica,
                p.voter_in1,
                p.voter_in2,
                p.voter,
                p.voter_out,
                p.out_cp
            );
        }
        PatternInstance::Tmr(p) => {
            s = format!(
                "tmr({},{},{},{},{},{},{},{},{},{},{})",
                p.id,
                p.primary,
                p.fault_channel,
                p.replica1,
                p.replica2,
                p.voter_in1,
                p.voter_in2,
                p.voter_in3,
                p.voter,
                p.voter_out,
                p.out_cp
            );
        }
        PatternInstance::TwoProg(p) => {
            s.push_str("2Prog(");
            s.push_str(p.id.as_str());
            s.push(',');
            s.push_str(p.version1.as_str());
            s.push(',');
            push_channel_set(&mut s, &p.inputs);
            s.push(',');
            push_channel_set(&mut s, &p.outputs);
            s.push(',');
            s.push_str(p.version2.as_str());
            s.push(',');
            push_channel_set(&mut s, &p.voters_in1);
            s.push(',');
            push_channel_set(&mut s, &p.voters_in2);
            s.push(',');
            push_channel_set(&mut s, &p.voters);
            s.push(',');
            push_channel_set(&mut s, &p.voter_outs);
            s.push(',');
            push_channel_set(&mut s, &p.out_cps);
            s.push(')');
        }
    }
    s
}

/// Canonical text form: one fact per line, grouped by predicate in
/// grammar order, entries sorted by id within each group. Parsing the
/// result reconstructs a structurally equal model.
pub fn serialize(model: &SystemModel) -> String {
    let mut out = String::new();
    for id in model.components.keys() {
        out.push_str(&fact_line("cp", &[id]));
    }
    for cp in model.components.values() {
        if let Some(parent) = &cp.parent {
            out.push_str(&fact_line("subcp", &[&cp.id, parent]));
        }
    }
    for ch in model.channels.values() {
        out.push_str(&fact_line("ch", &[&ch.id, &ch.source, &ch.target]));
    }
    for flow in model.flows.values() {
        let mut path = String::from("[");
        for (i, ch) in flow.path.iter().enumerate() {
            if i > 0 {
                path.push(',');
            }
            path.push_str(ch.as_str());
        }
        path.push(']');
        out.push_str(&fact_line("if", &[&flow.id, &path]));
    }
    for cp in model.components.values() {
        if cp.impl_kind == Implementation::Hardware {
            out.push_str(&fact_line("hw", &[&cp.id]));
        }
    }
    for cp in model.components.values() {
        if cp.impl_kind == Implementation::Software {
            out.push_str(&fact_line("sw", &[&cp.id]));
        }
    }
    for hz in model.hazards.values() {
        out.push_str(&fact_line(
            "hz",
            &[&hz.id, &hz.component, &hz.htype.as_str(), &hz.severity.as_str()],
        ));
    }
    for edge in &model.sub_hazards {
        out.push_str(&fact_line("subHz", &[&edge.child, &edge.parent]));
    }
    for kind in ExploreKind::ALL {
        for pat in model.patterns.values().filter(|p| p.kind() == kind) {
            out.push_str(&pattern_fact(pat));
            out.push_str(".\n");
        }
    }
    for (kind, budget) in &model.explore {
        out.push_str(&fact_line("explore", &[budget, &kind.as_str()]));
    }
    if model.exploration_mode {
        out.push_str("isexploration.\n");
    }
    out
}

/// Flow paths are `if(id,[...])` facts; this maps a flow back to its
/// term form for callers that need it.
pub fn flow_term(flow: &InformationFlow) -> FactTerm {
    FactTerm::List(
        flow.path
            .iter()
            .map(|c| FactTerm::Atom(c.as_str().to_string()))
            .collect(),
    )
}

/// Pretty-prints diagnostics, one per line, for terminal output.
pub fn format_diagnostics(diags: &[Diagnostic]) -> String {
    let mut out = String::new();
    for d in diags {
        let sev = match d.severity {
            DiagSeverity::Error => "error",
            DiagSeverity::Warning => "warning",
        };
        match &d.location {
            Some(span) => {
                out.push_str(&format!(
                    "{sev}[{}] at {}:{}: {}\n",
                    d.code, span.line, span.column, d.message
                ));
            }
            None => out.push_str(&format!("{sev}[{}]: {}\n", d.code, d.message)),
        }
    }
    out
}
