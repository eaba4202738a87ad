//! Strong labelled transitions, late and early.
//!
//! A transition is an agent paired with a residual: the action together with
//! the derivative. In a bound residual the action's binder scopes over the
//! derivative, so residuals are compared up to alpha like agents are.
//!
//! Both enumerators take an `avoid` set and return residuals whose action
//! binders are fresh for `avoid` and the agent's free names. Binders are
//! always freshly generated, never the source binder.

mod early;
mod late;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::nominal::{fresh_name, swap_name, Name, NameSet, Nominal, Swap};
use crate::syntax::{abstraction_eq, alpha_eq, canonicalize, canonicalize_under, free_names, Agent};

/// Subject of a bound action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Subject {
    Input(Name),
    BoundOutput(Name),
}

impl Subject {
    pub fn chan(self) -> Name {
        match self {
            Subject::Input(a) | Subject::BoundOutput(a) => a,
        }
    }
}

/// An action without binders.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FreeAction {
    Tau,
    Output(Name, Name),
}

impl FreeAction {
    pub fn names(self) -> NameSet {
        match self {
            FreeAction::Tau => NameSet::new(),
            FreeAction::Output(a, b) => NameSet::from([a, b]),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Residual {
    /// `a«x» ≺ P'` with `x` bound in `P'`.
    Bound(Subject, Name, Agent),
    /// `α ≺ P'`
    Free(FreeAction, Agent),
}

impl Residual {
    pub fn derivative(&self) -> &Agent {
        match self {
            Residual::Bound(_, _, p) | Residual::Free(_, p) => p,
        }
    }

    /// Action binder, if any.
    pub fn binder(&self) -> Option<Name> {
        match self {
            Residual::Bound(_, x, _) => Some(*x),
            Residual::Free(..) => None,
        }
    }

    /// Alpha-invariant key; its order is the canonical action order
    /// (tau, input, output, bound output, then names).
    pub fn key(&self) -> ResidualKey {
        match self {
            Residual::Free(FreeAction::Tau, p) => ResidualKey::Tau(canonicalize(p)),
            Residual::Bound(Subject::Input(a), x, p) => {
                ResidualKey::Input(*a, canonicalize_under(&[*x], p))
            }
            Residual::Free(FreeAction::Output(a, b), p) => {
                ResidualKey::Output(*a, *b, canonicalize(p))
            }
            Residual::Bound(Subject::BoundOutput(a), x, p) => {
                ResidualKey::BoundOutput(*a, canonicalize_under(&[*x], p))
            }
        }
    }

    /// Renames the action binder to `y`, which must be fresh for the residual.
    pub fn with_binder(&self, y: Name) -> Residual {
        match self {
            Residual::Bound(s, x, p) if *x != y => {
                Residual::Bound(*s, y, p.swap(Swap::new(*x, y)))
            }
            other => other.clone(),
        }
    }
}

impl std::fmt::Debug for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`", crate::parser::print_residual(self))
    }
}

impl std::fmt::Display for Residual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::parser::print_residual(self))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResidualKey {
    Tau(Agent),
    Input(Name, Agent),
    Output(Name, Name, Agent),
    BoundOutput(Name, Agent),
}

impl Nominal for Residual {
    fn swap(&self, s: Swap) -> Self {
        let sw = |n: &Name| swap_name(s, *n);
        match self {
            Residual::Bound(Subject::Input(a), x, p) => {
                Residual::Bound(Subject::Input(sw(a)), sw(x), p.swap(s))
            }
            Residual::Bound(Subject::BoundOutput(a), x, p) => {
                Residual::Bound(Subject::BoundOutput(sw(a)), sw(x), p.swap(s))
            }
            Residual::Free(FreeAction::Tau, p) => Residual::Free(FreeAction::Tau, p.swap(s)),
            Residual::Free(FreeAction::Output(a, b), p) => {
                Residual::Free(FreeAction::Output(sw(a), sw(b)), p.swap(s))
            }
        }
    }

    fn support(&self) -> NameSet {
        match self {
            Residual::Bound(subj, x, p) => {
                let mut names = free_names(p);
                names.remove(x);
                names.insert(subj.chan());
                names
            }
            Residual::Free(act, p) => {
                let mut names = free_names(p);
                names.extend(act.names());
                names
            }
        }
    }
}

pub fn residual_alpha_eq(r1: &Residual, r2: &Residual) -> bool {
    match (r1, r2) {
        (Residual::Free(a1, p1), Residual::Free(a2, p2)) => a1 == a2 && alpha_eq(p1, p2),
        (Residual::Bound(s1, x1, p1), Residual::Bound(s2, x2, p2)) => {
            s1 == s2 && abstraction_eq(*x1, p1, *x2, p2)
        }
        _ => false,
    }
}

/// Early action without binders: input carries the received name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EarlyAction {
    Tau,
    /// `a?u`: receive `u` on `a`
    Input(Name, Name),
    Output(Name, Name),
}

impl EarlyAction {
    pub fn names(self) -> NameSet {
        match self {
            EarlyAction::Tau => NameSet::new(),
            EarlyAction::Input(a, b) | EarlyAction::Output(a, b) => NameSet::from([a, b]),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum EarlyResidual {
    /// Bound output `a!(x) ≺ P'`.
    Bound(Name, Name, Agent),
    Free(EarlyAction, Agent),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EarlyResidualKey {
    Tau(Agent),
    Input(Name, Name, Agent),
    Output(Name, Name, Agent),
    BoundOutput(Name, Agent),
}

impl EarlyResidual {
    pub fn derivative(&self) -> &Agent {
        match self {
            EarlyResidual::Bound(_, _, p) | EarlyResidual::Free(_, p) => p,
        }
    }

    pub fn key(&self) -> EarlyResidualKey {
        match self {
            EarlyResidual::Free(EarlyAction::Tau, p) => EarlyResidualKey::Tau(canonicalize(p)),
            EarlyResidual::Free(EarlyAction::Input(a, u), p) => {
                EarlyResidualKey::Input(*a, *u, canonicalize(p))
            }
            EarlyResidual::Free(EarlyAction::Output(a, b), p) => {
                EarlyResidualKey::Output(*a, *b, canonicalize(p))
            }
            EarlyResidual::Bound(a, x, p) => {
                EarlyResidualKey::BoundOutput(*a, canonicalize_under(&[*x], p))
            }
        }
    }

    pub fn with_binder(&self, y: Name) -> EarlyResidual {
        match self {
            EarlyResidual::Bound(a, x, p) if *x != y => {
                EarlyResidual::Bound(*a, y, p.swap(Swap::new(*x, y)))
            }
            other => other.clone(),
        }
    }
}

impl std::fmt::Debug for EarlyResidual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`", crate::parser::print_residual(self))
    }
}

impl std::fmt::Display for EarlyResidual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&crate::parser::print_residual(self))
    }
}

impl Nominal for EarlyResidual {
    fn swap(&self, s: Swap) -> Self {
        let sw = |n: &Name| swap_name(s, *n);
        match self {
            EarlyResidual::Bound(a, x, p) => EarlyResidual::Bound(sw(a), sw(x), p.swap(s)),
            EarlyResidual::Free(act, p) => {
                let act = match act {
                    EarlyAction::Tau => EarlyAction::Tau,
                    EarlyAction::Input(a, u) => EarlyAction::Input(sw(a), sw(u)),
                    EarlyAction::Output(a, b) => EarlyAction::Output(sw(a), sw(b)),
                };
                EarlyResidual::Free(act, p.swap(s))
            }
        }
    }

    fn support(&self) -> NameSet {
        match self {
            EarlyResidual::Bound(a, x, p) => {
                let mut names = free_names(p);
                names.remove(x);
                names.insert(*a);
                names
            }
            EarlyResidual::Free(act, p) => {
                let mut names = free_names(p);
                names.extend(act.names());
                names
            }
        }
    }
}

pub fn early_residual_alpha_eq(r1: &EarlyResidual, r2: &EarlyResidual) -> bool {
    match (r1, r2) {
        (EarlyResidual::Free(a1, p1), EarlyResidual::Free(a2, p2)) => {
            a1 == a2 && alpha_eq(p1, p2)
        }
        (EarlyResidual::Bound(a1, x1, p1), EarlyResidual::Bound(a2, x2, p2)) => {
            a1 == a2 && abstraction_eq(*x1, p1, *x2, p2)
        }
        _ => false,
    }
}

/// A transition system over agents. [`Standard`] is the reference semantics;
/// other implementations exist to test the harnesses built on top.
pub trait Semantics: Sync {
    /// Late residuals of `p`, binders fresh for `avoid ∪ fn(p)`.
    fn late(&self, p: &Agent, avoid: &NameSet) -> Vec<Residual>;

    /// Early residuals of `p` with inputs instantiated over exactly
    /// `inputs ∪ fn(p)`.
    fn early(&self, p: &Agent, avoid: &NameSet, inputs: &NameSet) -> Vec<EarlyResidual>;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Standard;

impl Semantics for Standard {
    fn late(&self, p: &Agent, avoid: &NameSet) -> Vec<Residual> {
        late::transitions(p, avoid)
    }

    fn early(&self, p: &Agent, avoid: &NameSet, inputs: &NameSet) -> Vec<EarlyResidual> {
        early::transitions(p, avoid, inputs)
    }
}

/// The late transitions of `p`, deduplicated up to alpha and sorted in
/// canonical action order.
pub fn late_transitions(p: &Agent, avoid: &NameSet) -> Vec<Residual> {
    late::transitions(p, avoid)
}

/// The early transitions of `p`. Each input prefix receives every name in
/// `inputs ∪ fn(p)` plus one designated fresh name.
pub fn early_transitions(p: &Agent, avoid: &NameSet, inputs: &NameSet) -> Vec<EarlyResidual> {
    let instantiation = early_input_names(p, avoid, inputs);
    early::transitions(p, avoid, &instantiation)
}

/// `inputs ∪ fn(p) ∪ {w}` with `w` fresh for all of them and for `avoid`.
pub fn early_input_names(p: &Agent, avoid: &NameSet, inputs: &NameSet) -> NameSet {
    let mut names = inputs.clone();
    names.extend(free_names(p));
    let mut taken = names.clone();
    taken.extend(avoid.iter().copied());
    names.insert(fresh_name(&taken, Some(Name::new("w"))));
    names
}

pub(crate) fn dedup_late(rs: Vec<Residual>) -> Vec<Residual> {
    let mut by_key = BTreeMap::new();
    for r in rs {
        by_key.entry(r.key()).or_insert(r);
    }
    by_key.into_values().collect()
}

pub(crate) fn dedup_early(rs: Vec<EarlyResidual>) -> Vec<EarlyResidual> {
    let mut by_key = BTreeMap::new();
    for r in rs {
        by_key.entry(r.key()).or_insert(r);
    }
    by_key.into_values().collect()
}

/// A fresh action binder: never the source binder, never a reserved atom.
pub(crate) fn fresh_binder(ctx: &NameSet, source: Name) -> Name {
    let hint = if source.is_reserved() {
        Name::new("x")
    } else {
        source
    };
    let mut avoid = ctx.clone();
    avoid.insert(source);
    fresh_name(&avoid, Some(hint))
}
