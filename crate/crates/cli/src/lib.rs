//! The `picalc` command line.
//!
//! Exit codes: 0 equivalent or success, 1 inequivalent or a failing law,
//! 2 unknown, 3 usage or parse error.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use picalc::equivalence::{
    check_with, relate_with, struct_normal_form, ActionKind, ActionView, CheckConfig, CheckStats,
    EquivKind, Verdict,
};
use picalc::laws::laws_suite_with;
use picalc::parser::{parse_agent_with, parse_definitions, print_residual, Definitions};
use picalc::semantics::{
    early_input_names, EarlyAction, EarlyResidual, FreeAction, Residual, Semantics, Standard,
    Subject,
};
use picalc::syntax::free_names;
use picalc::weak::{
    weak_early_transitions, weak_input_transitions, weak_late_transitions, WeakResidual,
};
use picalc::{print_agent, Agent, Name, NameSet};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INEQUIVALENT: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "picalc", version, about = "Pi-calculus transitions and bisimulation checks")]
pub struct Cli {
    #[command(flatten)]
    pub opts: Options,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    /// Print the structured report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Load `NAME = agent;` abbreviations from a file.
    #[arg(long, global = true, value_name = "FILE")]
    pub defs: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_name = "N")]
    pub max_states: Option<usize>,
    #[arg(long, global = true, value_name = "N")]
    pub max_depth: Option<usize>,
    /// Extra names every input may receive, comma separated.
    #[arg(long, global = true, value_delimiter = ',', value_name = "NAMES")]
    pub extra_inputs: Vec<String>,
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Report wall-clock time.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse an agent and print it back.
    Parse { agent: String },
    /// List the transitions of an agent.
    Transitions {
        agent: String,
        #[arg(long, value_enum, default_value_t = System::Late)]
        system: System,
        /// Names bound output and input binders must avoid.
        #[arg(long, value_delimiter = ',')]
        avoid: Vec<String>,
        /// Names early inputs receive, besides the free names and one fresh
        /// name; for weak-late, the names to list input completions for.
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<String>,
    },
    /// Decide one equivalence.
    Check {
        left: String,
        right: String,
        #[arg(long, default_value = "strong-late", value_parser = parse_kind)]
        kind: EquivKind,
    },
    /// Structural normal form.
    Norm { agent: String },
    /// Every equivalence for one pair.
    Relate { left: String, right: String },
    /// Check the structural laws and the inclusions on random instances.
    Laws {
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 5)]
        size: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum System {
    Late,
    Early,
    WeakLate,
    WeakEarly,
}

fn parse_kind(s: &str) -> Result<EquivKind, String> {
    s.parse::<EquivKind>().map_err(|_| {
        let names: Vec<&str> = EquivKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind `{s}`; expected one of {}", names.join(", "))
    })
}

struct Failure(String);

#[derive(Serialize)]
struct Report {
    command: &'static str,
    inputs: Value,
    verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<picalc::equivalence::Witness>,
    #[serde(skip_serializing_if = "Value::is_null")]
    result: Value,
    stats: Stats,
}

#[derive(Serialize, Default)]
struct Stats {
    states: usize,
    pairs: usize,
    rounds: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

impl From<CheckStats> for Stats {
    fn from(s: CheckStats) -> Self {
        Stats {
            states: s.states,
            pairs: s.pairs,
            rounds: s.rounds,
            wall_ms: None,
        }
    }
}

/// Runs the command line with the reference semantics.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &Standard, out, err)
}

/// Runs the command line over the given transition system.
pub fn run_with<I, T>(args: I, sem: &dyn Semantics, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    match execute(&cli, sem, out) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli, sem: &dyn Semantics, out: &mut dyn Write) -> Result<u8, Failure> {
    let opts = &cli.opts;
    let defs = load_defs(opts)?;
    let cfg = config(opts)?;
    let agent = |src: &str| parse_agent_with(src, &defs).map_err(|e| Failure(e.render(src)));
    let started = opts.timing.then(Instant::now);
    let (mut report, text, code) = match &cli.command {
        Command::Parse { agent: src } => {
            let p = agent(src)?;
            let printed = print_agent(&p);
            let result = json!({ "agent": printed, "free_names": names_json(&free_names(&p)) });
            (plain("parse", json!({ "agent": src }), result), format!("{printed}\n"), EXIT_OK)
        }
        Command::Norm { agent: src } => {
            let p = agent(src)?;
            let nf = print_agent(&struct_normal_form(&p));
            (plain("norm", json!({ "agent": src }), json!({ "normal_form": nf })), format!("{nf}\n"), EXIT_OK)
        }
        Command::Transitions {
            agent: src,
            system,
            avoid,
            inputs,
        } => {
            let p = agent(src)?;
            let avoid = name_set(avoid)?;
            let inputs = name_set(inputs)?;
            let rows = transitions(sem, &p, *system, &avoid, &inputs, &cfg)?;
            let text: String = rows.iter().map(|(line, _)| format!("{line}\n")).collect();
            let inputs_json = json!({
                "agent": src,
                "system": system,
                "avoid": names_json(&avoid),
                "inputs": names_json(&inputs),
            });
            let result = json!({ "transitions": rows.into_iter().map(|(_, v)| v).collect::<Vec<_>>() });
            (plain("transitions", inputs_json, result), text, EXIT_OK)
        }
        Command::Check { left, right, kind } => {
            let (p, q) = (agent(left)?, agent(right)?);
            let (v, stats) = check_with(sem, &p, &q, *kind, &cfg);
            let inputs = json!({ "left": left, "right": right, "kind": kind.name() });
            let mut text = format!("{} {} {}: {}\n", print_agent(&p), kind.symbol(), print_agent(&q), v.label());
            match &v {
                Verdict::Inequivalent(w) => text.push_str(&format!("{w}\n")),
                Verdict::Unknown(r) => text.push_str(&format!("reason: {r}\n")),
                Verdict::Equivalent => {}
            }
            text.push_str(&format!("explored {} states, {} pairs, {} rounds\n", stats.states, stats.pairs, stats.rounds));
            let code = verdict_code(&v);
            (verdict_report("check", inputs, v, stats.into()), text, code)
        }
        Command::Relate { left, right } => {
            let (p, q) = (agent(left)?, agent(right)?);
            let rel = relate_with(sem, &p, &q, &cfg);
            let mut text = format!("{:<18} {:<4} {}\n", "structural", "≡", rel.structural.label());
            let mut rows = vec![json!({ "kind": "structural", "verdict": rel.structural.label() })];
            for (k, v) in &rel.kinds {
                text.push_str(&format!("{:<18} {:<4} {}\n", k.name(), k.symbol(), v.label()));
                rows.push(json!({ "kind": k.name(), "verdict": v.label() }));
            }
            let violations = rel.lattice_violations();
            for (s, w) in &violations {
                text.push_str(&format!("violated: {s} => {w}\n"));
            }
            let result = json!({ "table": rows, "lattice_violations": violations });
            let inputs = json!({ "left": left, "right": right });
            let code = if violations.is_empty() { EXIT_OK } else { EXIT_INEQUIVALENT };
            let mut r = plain("relate", inputs, result);
            if !violations.is_empty() {
                r.verdict = "fail";
            }
            (r, text, code)
        }
        Command::Laws { count, size } => {
            let report = laws_suite_with(sem, opts.seed, *count, *size, &cfg);
            let ok = report.passed();
            let inputs = json!({ "seed": opts.seed, "count": count, "size": size });
            let result = serde_json::to_value(&report).expect("laws report serializes");
            let mut r = plain("laws", inputs, result);
            let mut text = report.to_string();
            if !ok {
                r.verdict = "fail";
                text.push_str("some laws failed\n");
            }
            (r, text, if ok { EXIT_OK } else { EXIT_INEQUIVALENT })
        }
    };
    if let Some(t) = started {
        report.stats.wall_ms = Some(t.elapsed().as_secs_f64() * 1e3);
    }
    let rendered = if opts.json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    } else {
        let mut s = text;
        if let Some(ms) = report.stats.wall_ms {
            s.push_str(&format!("wall time {ms:.1} ms\n"));
        }
        s
    };
    out.write_all(rendered.as_bytes())
        .map_err(|e| Failure(format!("error: {e}")))?;
    Ok(code)
}

fn plain(command: &'static str, inputs: Value, result: Value) -> Report {
    Report {
        command,
        inputs,
        verdict: "ok",
        reason: None,
        witness: None,
        result,
        stats: Stats::default(),
    }
}

fn verdict_report(command: &'static str, inputs: Value, v: Verdict, stats: Stats) -> Report {
    let verdict = v.label();
    let (reason, witness) = match v {
        Verdict::Equivalent => (None, None),
        Verdict::Inequivalent(w) => (None, Some(w)),
        Verdict::Unknown(r) => (Some(r.to_string()), None),
    };
    Report {
        command,
        inputs,
        verdict,
        reason,
        witness,
        result: Value::Null,
        stats,
    }
}

fn verdict_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Equivalent => EXIT_OK,
        Verdict::Inequivalent(_) => EXIT_INEQUIVALENT,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    }
}

fn load_defs(opts: &Options) -> Result<Definitions, Failure> {
    let Some(path) = &opts.defs else {
        return Ok(Definitions::default());
    };
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure(format!("error: cannot read {}: {e}", path.display())))?;
    parse_definitions(&src).map_err(|e| Failure(format!("in {}:\n{}", path.display(), e.render(&src))))
}

fn config(opts: &Options) -> Result<CheckConfig, Failure> {
    let mut cfg = CheckConfig::default();
    if let Some(n) = opts.max_states {
        cfg.limits.max_states = n;
    }
    if let Some(n) = opts.max_depth {
        cfg.limits.max_depth = n;
    }
    cfg.extra_inputs = name_set(&opts.extra_inputs)?;
    Ok(cfg)
}

fn name_set(names: &[String]) -> Result<NameSet, Failure> {
    names
        .iter()
        .map(|n| {
            let n = n.trim();
            let ok = n.chars().next().is_some_and(|c| c.is_ascii_lowercase())
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
            if ok {
                Ok(Name::new(n))
            } else {
                Err(Failure(format!("error: `{n}` is not a name")))
            }
        })
        .collect()
}

fn names_json(names: &NameSet) -> Value {
    Value::from(names.iter().map(|n| n.to_string()).collect::<Vec<_>>())
}

fn action(kind: ActionKind, chan: Option<Name>, msg: Option<Name>, bind: Option<Name>, received: Option<Name>) -> ActionView {
    ActionView {
        kind,
        chan,
        msg,
        bind,
        received,
    }
}

fn free_view(act: FreeAction) -> ActionView {
    match act {
        FreeAction::Tau => ActionView::simple(ActionKind::Tau),
        FreeAction::Output(a, b) => action(ActionKind::Output, Some(a), Some(b), None, None),
    }
}

fn row(line: String, act: ActionView, derivative: Option<&Agent>, mid: Option<&Agent>) -> (String, Value) {
    let mut v = json!({ "text": line, "action": act });
    if let Some(d) = derivative {
        v["derivative"] = Value::from(print_agent(d));
    }
    if let Some(m) = mid {
        v["mid"] = Value::from(print_agent(m));
    }
    (line, v)
}

fn transitions(
    sem: &dyn Semantics,
    p: &Agent,
    system: System,
    avoid: &NameSet,
    inputs: &NameSet,
    cfg: &CheckConfig,
) -> Result<Vec<(String, Value)>, Failure> {
    let lim = cfg.limits;
    let limit = |e: picalc::weak::LimitExceeded| Failure(format!("error: exploration limit exceeded: {e}"));
    let mut rows = Vec::new();
    match system {
        System::Late => {
            for r in sem.late(p, avoid) {
                let line = print_residual(&r);
                rows.push(match &r {
                    Residual::Free(act, d) => row(line, free_view(*act), Some(d), None),
                    Residual::Bound(Subject::Input(a), x, d) => {
                        row(line, action(ActionKind::Input, Some(*a), None, Some(*x), None), Some(d), None)
                    }
                    Residual::Bound(Subject::BoundOutput(a), x, d) => {
                        row(line, action(ActionKind::BoundOutput, Some(*a), None, Some(*x), None), Some(d), None)
                    }
                });
            }
        }
        System::Early => {
            let names = early_input_names(p, avoid, inputs);
            for r in sem.early(p, avoid, &names) {
                rows.push(early_row(&r));
            }
        }
        System::WeakLate => {
            for r in weak_late_transitions(p, avoid, lim).map_err(limit)? {
                let line = print_residual(&r);
                rows.push(match &r {
                    WeakResidual::Free(act, d) => row(line, free_view(*act), Some(d), None),
                    WeakResidual::BoundOutput(a, x, d) => {
                        row(line, action(ActionKind::BoundOutput, Some(*a), None, Some(*x), None), Some(d), None)
                    }
                    WeakResidual::Input(a, x, mid) => {
                        row(line, action(ActionKind::Input, Some(*a), None, Some(*x), None), None, Some(mid))
                    }
                });
            }
            for &u in inputs {
                for t in weak_input_transitions(p, avoid, u, lim).map_err(limit)? {
                    let act = action(ActionKind::Input, Some(t.chan), None, Some(t.bind), Some(u));
                    rows.push(row(print_residual(&t), act, Some(&t.deriv), Some(&t.mid)));
                }
            }
        }
        System::WeakEarly => {
            for r in weak_early_transitions(p, avoid, inputs, lim).map_err(limit)? {
                rows.push(early_row(&r));
            }
        }
    }
    Ok(rows)
}

fn early_row(r: &EarlyResidual) -> (String, Value) {
    let line = print_residual(r);
    match r {
        EarlyResidual::Free(EarlyAction::Tau, d) => row(line, free_view(FreeAction::Tau), Some(d), None),
        EarlyResidual::Free(EarlyAction::Output(a, b), d) => {
            row(line, free_view(FreeAction::Output(*a, *b)), Some(d), None)
        }
        EarlyResidual::Free(EarlyAction::Input(a, u), d) => {
            row(line, action(ActionKind::Input, Some(*a), None, None, Some(*u)), Some(d), None)
        }
        EarlyResidual::Bound(a, x, d) => {
            row(line, action(ActionKind::BoundOutput, Some(*a), None, Some(*x), None), Some(d), None)
        }
    }
}
