//! Command-line front end for the safpat engine.
//!
//! Four subcommands: `check` parses and validates a model file,
//! `analyze` reports hazard controllability, `recommend` searches for
//! budgeted pattern placements, and `export` renders DOT diagrams.
//! Exit codes are a stable contract: 0 success / all controlled,
//! 1 model error, 2 I/O error, 3 safety-incomplete, 4 search cap hit.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use safpat_core::{
    assume_controlled, compute_controllability, parse_facts, recommend, render_dot,
    render_recommendation_json, render_report_json, ControllabilityReport, ExploreKind,
    Identifier, Justification, RecommendError, RecommendationResult, RenderOptions, Scenario,
    Status, SystemModel, UncontrolledReason,
};

const EXIT_OK: u8 = 0;
const EXIT_MODEL: u8 = 1;
const EXIT_IO: u8 = 2;
const EXIT_INCOMPLETE: u8 = 3;
const EXIT_CAP: u8 = 4;

#[derive(Parser)]
#[command(name = "safpat", version, about = "Safety-pattern reasoning for embedded architectures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a model file
    Check {
        /// Model file (.sp fact syntax)
        input: PathBuf,
    },
    /// Report which hazards the deployed patterns control
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Search for pattern placements within the explore budgets
    Recommend {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Render the architecture (optionally with a recommended scenario)
    Export {
        input: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Render the k-th best scenario of a recommendation run
        #[arg(long, value_name = "K")]
        scenario: Option<usize>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Treat a hazard as already controlled (repeatable)
    #[arg(long = "assume-controlled", value_name = "HAZARD")]
    assume_controlled: Vec<String>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to a file instead of standard output
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Override a per-kind budget, e.g. --budget tmr=2 (repeatable; flags win over explore facts)
    #[arg(long = "budget", value_name = "KIND=N", value_parser = parse_budget)]
    budget: Vec<(ExploreKind, u32)>,
    /// Maximum candidate placements before the search refuses to enumerate
    #[arg(long = "hard-cap", value_name = "N", default_value_t = 24)]
    hard_cap: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

fn parse_budget(s: &str) -> Result<(ExploreKind, u32), String> {
    let (kind, n) = s
        .split_once('=')
        .ok_or_else(|| format!("`{s}`: expected KIND=N, e.g. tmr=2"))?;
    let kind = ExploreKind::parse(kind)
        .ok_or_else(|| format!("`{kind}` is not a pattern kind (safMon/wd/hdr/tmr/2Prog)"))?;
    let n: u32 = n
        .parse()
        .map_err(|_| format!("`{n}` is not a non-negative integer"))?;
    Ok((kind, n))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check { input } => cmd_check(&input),
        Command::Analyze { input, common } => cmd_analyze(&input, &common),
        Command::Recommend {
            input,
            common,
            search,
        } => cmd_recommend(&input, &common, &search),
        Command::Export {
            input,
            common,
            search,
            scenario,
        } => cmd_export(&input, &common, &search, scenario),
    };
    ExitCode::from(code)
}

fn read_input(path: &Path) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_IO
    })
}

/// Parses, validates and applies `--assume-controlled` flags; prints
/// diagnostics to stderr.
fn load_model(path: &Path, assume: &[String]) -> Result<SystemModel, u8> {
    let text = read_input(path)?;
    let outcome = parse_facts(&text);
    eprint!(
        "{}",
        safpat_core::parser::format_diagnostics(&outcome.diagnostics)
    );
    let Some(mut model) = outcome.model else {
        return Err(EXIT_MODEL);
    };
    for hz in assume {
        let id = Identifier::new(hz).map_err(|e| {
            eprintln!("error: --assume-controlled {hz}: {e}");
            EXIT_MODEL
        })?;
        model = assume_controlled(model, &id).map_err(|e| {
            eprintln!("error: --assume-controlled: {e}");
            EXIT_MODEL
        })?;
    }
    Ok(model)
}

fn apply_budgets(model: &mut SystemModel, search: &SearchArgs) {
    for (kind, n) in &search.budget {
        model.explore.insert(*kind, *n);
    }
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), u8> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            EXIT_IO
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_check(input: &Path) -> u8 {
    let text = match read_input(input) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let outcome = parse_facts(&text);
    print!(
        "{}",
        safpat_core::parser::format_diagnostics(&outcome.diagnostics)
    );
    match outcome.model {
        Some(model) => {
            println!(
                "ok: {} components, {} channels, {} hazards, {} patterns",
                model.components.len(),
                model.channels.len(),
                model.hazards.len(),
                model.patterns.len()
            );
            EXIT_OK
        }
        None => EXIT_MODEL,
    }
}

fn report_text(report: &ControllabilityReport) -> String {
    let mut out = String::new();
    for (hz, v) in &report.verdicts {
        let line = match (&v.status, &v.justification) {
            (Status::Controlled, Justification::ByPattern { pattern, rule }) => {
                format!("{hz}: controlled by {pattern} ({rule})")
            }
            (Status::Controlled, Justification::ByAllChildren(children)) => {
                let names: Vec<&str> = children.iter().map(|c| c.as_str()).collect();
                format!("{hz}: controlled via sub-hazards {}", names.join(", "))
            }
            (_, Justification::Uncontrolled(reason)) => match reason {
                UncontrolledReason::NoRuleFired => format!("{hz}: uncontrolled"),
                UncontrolledReason::ChildUncontrolled(c) => {
                    format!("{hz}: uncontrolled (sub-hazard {c} uncontrolled)")
                }
                UncontrolledReason::UnsupportedHazardType => {
                    format!("{hz}: uncontrolled (no rule for this hazard type)")
                }
            },
            _ => unreachable!("controlled verdicts carry a positive justification"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    let _ = writeln!(
        out,
        "controlled {}/{}",
        report.controlled_count(),
        report.verdicts.len()
    );
    out
}

fn cmd_analyze(input: &Path, common: &CommonArgs) -> u8 {
    let model = match load_model(input, &common.assume_controlled) {
        Ok(m) => m,
        Err(code) => return code,
    };
    let report = match compute_controllability(&model) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_MODEL;
        }
    };
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Json => render_report_json(&report),
        Format::Text | Format::Dot => report_text(&report),
    };
    if let Err(code) = emit(&common.output, &text) {
        return code;
    }
    if report.all_controlled() {
        EXIT_OK
    } else {
        EXIT_INCOMPLETE
    }
}

fn budgets_line(budgets: &BTreeMap<ExploreKind, u32>) -> String {
    let parts: Vec<String> = budgets
        .iter()
        .map(|(kind, n)| format!("{kind}={n}"))
        .collect();
    if parts.is_empty() {
        "budgets: none".to_string()
    } else {
        format!("budgets: {}", parts.join(" "))
    }
}

fn recommendation_text(result: &RecommendationResult) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", budgets_line(&result.budgets));
    let _ = writeln!(out, "scenarios evaluated: {}", result.total_scenarios);
    let _ = writeln!(
        out,
        "best architectures: {} ({} complete)",
        result.best.len(),
        result.complete.len()
    );
    for (i, s) in result.best.iter().enumerate() {
        let facts: Vec<String> = s
            .selected
            .iter()
            .map(|c| safpat_core::parser::pattern_fact(&c.instance))
            .collect();
        let tag = if result.complete.contains(s) {
            "complete"
        } else {
            "partial"
        };
        let _ = writeln!(
            out,
            "[{i}] ({tag}, controls {}, severity weight {})",
            s.controlled_count, s.severity_weight
        );
        for f in facts {
            let _ = writeln!(out, "    {f}.");
        }
    }
    out
}

fn run_recommend(
    input: &Path,
    common: &CommonArgs,
    search: &SearchArgs,
) -> Result<(SystemModel, RecommendationResult), u8> {
    let mut model = load_model(input, &common.assume_controlled)?;
    apply_budgets(&mut model, search);
    match recommend(&model, search.hard_cap) {
        Ok(result) => Ok((model, result)),
        Err(e @ RecommendError::TooManyCandidates { .. }) => {
            eprintln!("error: {e}");
            Err(EXIT_CAP)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Err(EXIT_MODEL)
        }
    }
}

fn cmd_recommend(input: &Path, common: &CommonArgs, search: &SearchArgs) -> u8 {
    let (_, result) = match run_recommend(input, common, search) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let text = match common.format.unwrap_or(Format::Text) {
        Format::Json => render_recommendation_json(&result),
        Format::Text | Format::Dot => recommendation_text(&result),
    };
    if let Err(code) = emit(&common.output, &text) {
        return code;
    }
    if result.complete.is_empty() {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    }
}

fn cmd_export(
    input: &Path,
    common: &CommonArgs,
    search: &SearchArgs,
    scenario: Option<usize>,
) -> u8 {
    let (model, picked): (SystemModel, Option<Scenario>) = match scenario {
        None => match load_model(input, &common.assume_controlled) {
            Ok(m) => (m, None),
            Err(code) => return code,
        },
        Some(k) => {
            let (model, result) = match run_recommend(input, common, search) {
                Ok(x) => x,
                Err(code) => return code,
            };
            let Some(s) = result.best.get(k) else {
                eprintln!(
                    "error: scenario index {k} out of range ({} best scenarios)",
                    result.best.len()
                );
                return EXIT_MODEL;
            };
            (model, Some(s.clone()))
        }
    };
    let options = RenderOptions::default();
    let text = match common.format.unwrap_or(Format::Dot) {
        Format::Dot | Format::Text => render_dot(&model, picked.as_ref(), &options),
        Format::Json => {
            let mut merged = model.clone();
            if let Some(s) = &picked {
                merged.exploration_mode = true;
                for c in &s.selected {
                    merged.add_pattern(c.instance.clone());
                }
            }
            match compute_controllability(&merged) {
                Ok(report) => render_report_json(&report),
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_MODEL;
                }
            }
        }
    };
    match emit(&common.output, &text) {
        Ok(()) => EXIT_OK,
        Err(code) => code,
    }
}
