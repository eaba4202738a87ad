use std::borrow::Cow;

use crate::nominal::{fresh_name, Name, NameSet, Nominal, Swap};
use crate::semantics::{EarlyAction, EarlyResidual, FreeAction, Residual, Subject};
use crate::syntax::Agent;
use crate::weak::{WeakInputTransition, WeakResidual};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Sum,
    Par,
    Unary,
}

fn level(p: &Agent) -> Level {
    match p {
        Agent::Sum(..) => Level::Sum,
        Agent::Par(..) => Level::Par,
        _ => Level::Unary,
    }
}

/// Renames binders drawn from the reserved canonical namespace to printable
/// names. Free reserved atoms are left alone.
pub fn printable(p: &Agent) -> Cow<'_, Agent> {
    let all = p.all_names();
    if !all.iter().any(|n| n.is_reserved()) {
        return Cow::Borrowed(p);
    }
    let mut avoid = all;
    Cow::Owned(rename_reserved(p, &mut avoid))
}

fn rename_binder(x: Name, body: &Agent, avoid: &mut NameSet) -> (Name, Agent) {
    if !x.is_reserved() {
        return (x, rename_reserved(body, avoid));
    }
    let z = fresh_name(avoid, Some(Name::new("x")));
    avoid.insert(z);
    (z, rename_reserved(&body.swap(Swap::new(x, z)), avoid))
}

fn rename_reserved(p: &Agent, avoid: &mut NameSet) -> Agent {
    use Agent::*;
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(rename_reserved(q, avoid)),
        Bang(q) => Agent::bang(rename_reserved(q, avoid)),
        Output(a, b, q) => Agent::output(*a, *b, rename_reserved(q, avoid)),
        Match(a, b, q) => Agent::matching(*a, *b, rename_reserved(q, avoid)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, rename_reserved(q, avoid)),
        Sum(l, r) => {
            let l = rename_reserved(l, avoid);
            Agent::sum(l, rename_reserved(r, avoid))
        }
        Par(l, r) => {
            let l = rename_reserved(l, avoid);
            Agent::par(l, rename_reserved(r, avoid))
        }
        Input(a, x, q) => {
            let (x, q) = rename_binder(*x, q, avoid);
            Agent::input(*a, x, q)
        }
        Res(x, q) => {
            let (x, q) = rename_binder(*x, q, avoid);
            Agent::res(x, q)
        }
    }
}

/// Minimal parentheses, except that `|` and `+` are never mixed bare.
pub fn print_agent(p: &Agent) -> String {
    let mut out = String::new();
    write_agent(&printable(p), &mut out);
    out
}

fn write_at(p: &Agent, parens: bool, out: &mut String) {
    if parens {
        out.push('(');
        write_agent(p, out);
        out.push(')');
    } else {
        write_agent(p, out);
    }
}

fn write_cont(p: &Agent, out: &mut String) {
    write_at(p, level(p) != Level::Unary, out);
}

fn write_agent(p: &Agent, out: &mut String) {
    use std::fmt::Write;
    use Agent::*;
    match p {
        Nil => out.push('0'),
        Tau(q) => {
            out.push_str("tau.");
            write_cont(q, out);
        }
        Input(a, x, q) => {
            let _ = write!(out, "{a}({x}).");
            write_cont(q, out);
        }
        Output(a, b, q) => {
            let _ = write!(out, "{a}!{b}.");
            write_cont(q, out);
        }
        Match(a, b, q) => {
            let _ = write!(out, "[{a}={b}]");
            write_cont(q, out);
        }
        Mismatch(a, b, q) => {
            let _ = write!(out, "[{a}!={b}]");
            write_cont(q, out);
        }
        Res(x, q) => {
            let _ = write!(out, "(^{x})");
            write_cont(q, out);
        }
        Bang(q) => {
            out.push('!');
            write_cont(q, out);
        }
        Sum(l, r) => {
            write_at(l, level(l) == Level::Par, out);
            out.push_str(" + ");
            write_at(r, level(r) != Level::Unary, out);
        }
        Par(l, r) => {
            write_at(l, level(l) == Level::Sum, out);
            out.push_str(" | ");
            write_at(r, level(r) != Level::Unary, out);
        }
    }
}

/// A residual of any of the transition systems, for rendering.
#[derive(Clone, Copy)]
pub enum AnyResidual<'a> {
    Late(&'a Residual),
    Early(&'a EarlyResidual),
    Weak(&'a WeakResidual),
    WeakInput(&'a WeakInputTransition),
}

impl<'a> From<&'a Residual> for AnyResidual<'a> {
    fn from(r: &'a Residual) -> Self {
        AnyResidual::Late(r)
    }
}

impl<'a> From<&'a EarlyResidual> for AnyResidual<'a> {
    fn from(r: &'a EarlyResidual) -> Self {
        AnyResidual::Early(r)
    }
}

impl<'a> From<&'a WeakResidual> for AnyResidual<'a> {
    fn from(r: &'a WeakResidual) -> Self {
        AnyResidual::Weak(r)
    }
}

impl<'a> From<&'a WeakInputTransition> for AnyResidual<'a> {
    fn from(r: &'a WeakInputTransition) -> Self {
        AnyResidual::WeakInput(r)
    }
}

/// The action binder `x` together with the agents it scopes over, made
/// printable.
fn printable_abstraction(x: Name, scoped: &[&Agent]) -> (Name, Vec<Agent>) {
    let mut avoid: NameSet = scoped.iter().flat_map(|p| p.all_names()).collect();
    let x2 = if x.is_reserved() {
        fresh_name(&avoid, Some(Name::new("x")))
    } else {
        x
    };
    avoid.insert(x2);
    let agents = scoped
        .iter()
        .map(|p| printable(&p.swap(Swap::new(x, x2))).into_owned())
        .collect();
    (x2, agents)
}

fn free_action(act: &FreeAction) -> String {
    match act {
        FreeAction::Tau => "tau".into(),
        FreeAction::Output(a, b) => format!("{a}!{b}"),
    }
}

pub fn print_residual<'a>(r: impl Into<AnyResidual<'a>>) -> String {
    match r.into() {
        AnyResidual::Late(Residual::Free(act, p)) => {
            format!("{} -> {}", free_action(act), print_agent(p))
        }
        AnyResidual::Late(Residual::Bound(subj, x, p)) => {
            let (x, ps) = printable_abstraction(*x, &[p]);
            let body = print_agent(&ps[0]);
            match subj {
                Subject::Input(a) => format!("{a}({x}) -> {body}"),
                Subject::BoundOutput(a) => format!("{a}!({x}) -> {body}"),
            }
        }
        AnyResidual::Early(EarlyResidual::Free(act, p)) => {
            let act = match act {
                EarlyAction::Tau => "tau".to_string(),
                EarlyAction::Output(a, b) => format!("{a}!{b}"),
                EarlyAction::Input(a, u) => format!("{a}?{u}"),
            };
            format!("{act} -> {}", print_agent(p))
        }
        AnyResidual::Early(EarlyResidual::Bound(a, x, p)) => {
            let (x, ps) = printable_abstraction(*x, &[p]);
            format!("{a}!({x}) -> {}", print_agent(&ps[0]))
        }
        AnyResidual::Weak(WeakResidual::Free(act, p)) => {
            format!("{} -> {}", free_action(act), print_agent(p))
        }
        AnyResidual::Weak(WeakResidual::BoundOutput(a, x, p)) => {
            let (x, ps) = printable_abstraction(*x, &[p]);
            format!("{a}!({x}) -> {}", print_agent(&ps[0]))
        }
        AnyResidual::Weak(WeakResidual::Input(a, x, mid)) => {
            let (x, ps) = printable_abstraction(*x, &[mid]);
            format!("{a}({x})@{}", print_agent(&ps[0]))
        }
        AnyResidual::WeakInput(t) => {
            // x is bound in the mid-point only; the completion has u in its place
            let (x, ps) = printable_abstraction(t.bind, &[&t.mid]);
            format!(
                "{}:{}({x})@{} -> {}",
                t.received,
                t.chan,
                print_agent(&ps[0]),
                print_agent(&t.deriv)
            )
        }
    }
}
