//! Weak transitions: tau-chains around one strong step.
//!
//! The free functions here work on plain canonical agents. [`Explorer`] is
//! the memoizing variant used by the checkers; it can additionally collapse
//! states through a reduction function.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::rc::Rc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nominal::{fresh_name, Name, NameSet, Nominal, Swap};
use crate::semantics::{
    early_input_names, EarlyAction, EarlyResidual, FreeAction, Residual, Semantics, Standard,
    Subject,
};
use crate::syntax::{canonicalize, canonicalize_under, free_names, substitute, Agent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExploreLimits {
    pub max_states: usize,
    pub max_depth: usize,
    /// Largest agent, in syntax nodes, a state may grow to.
    #[serde(default = "default_max_size")]
    pub max_size: usize,
}

fn default_max_size() -> usize {
    ExploreLimits::default().max_size
}

impl Default for ExploreLimits {
    fn default() -> Self {
        ExploreLimits {
            max_states: 10_000,
            max_depth: 1_000,
            max_size: 80,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "limit", content = "bound", rename_all = "kebab-case")]
pub enum LimitExceeded {
    #[error("more than {0} states")]
    MaxStates(usize),
    #[error("deeper than {0} steps")]
    MaxDepth(usize),
    #[error("a state larger than {0} nodes")]
    MaxSize(usize),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum WeakResidual {
    Free(FreeAction, Agent),
    /// `a!(x)` with `x` bound in the derivative.
    BoundOutput(Name, Name, Agent),
    /// `a(x)` up to the mid-point, where `x` is bound. Completions for a
    /// received name come from [`weak_input_tail`].
    Input(Name, Name, Agent),
}

impl WeakResidual {
    fn key(&self) -> (u8, Name, Name, Agent) {
        let nobody = Name::new("_");
        match self {
            WeakResidual::Free(FreeAction::Tau, p) => (0, nobody, nobody, p.clone()),
            WeakResidual::Input(a, x, p) => (1, *a, nobody, canonicalize_under(&[*x], p)),
            WeakResidual::Free(FreeAction::Output(a, b), p) => (2, *a, *b, p.clone()),
            WeakResidual::BoundOutput(a, x, p) => (3, *a, nobody, canonicalize_under(&[*x], p)),
        }
    }
}

impl std::fmt::Debug for WeakResidual {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "`{}`", crate::parser::print_residual(self))
    }
}

/// `u:a(x)@mid ≺ deriv`: the mid-point is reached by a tau-chain and the
/// input, then `u` replaces `x` and another tau-chain leads to `deriv`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeakInputTransition {
    pub received: Name,
    pub chan: Name,
    pub bind: Name,
    pub mid: Agent,
    pub deriv: Agent,
}

/// Agents reachable by zero or more tau steps, canonical and sorted.
pub fn tau_closure(p: &Agent, lim: ExploreLimits) -> Result<Vec<Agent>, LimitExceeded> {
    let mut ex = Explorer::new(&Standard, lim);
    let s = ex.state(p);
    let c = ex.closure(s)?;
    let mut out: Vec<Agent> = c.iter().map(|&t| ex.agent(t).clone()).collect();
    out.sort();
    Ok(out)
}

pub fn weak_late_transitions(
    p: &Agent,
    avoid: &NameSet,
    lim: ExploreLimits,
) -> Result<Vec<WeakResidual>, LimitExceeded> {
    let mut ex = Explorer::new(&Standard, lim);
    let mut ctx = avoid.clone();
    ctx.extend(free_names(p));
    let mut out = BTreeMap::new();
    let start = ex.state(p);
    for &s in ex.closure(start)?.iter() {
        for r in ex.late(s).iter() {
            match r {
                Residual::Free(act, d) => {
                    let d = ex.state(d);
                    for &t in ex.closure(d)?.iter() {
                        let w = WeakResidual::Free(*act, ex.agent(t).clone());
                        out.entry(w.key()).or_insert(w);
                    }
                }
                Residual::Bound(Subject::BoundOutput(a), x, d) => {
                    let y = fresh_name(&ctx, Some(*x));
                    let d = ex.state(&d.swap(Swap::new(*x, y)));
                    for &t in ex.closure(d)?.iter() {
                        let w = WeakResidual::BoundOutput(*a, y, ex.agent(t).clone());
                        out.entry(w.key()).or_insert(w);
                    }
                }
                Residual::Bound(Subject::Input(a), x, d) => {
                    let y = fresh_name(&ctx, Some(*x));
                    let w = WeakResidual::Input(*a, y, d.swap(Swap::new(*x, y)));
                    out.entry(w.key()).or_insert(w);
                }
            }
        }
    }
    Ok(out.into_values().collect())
}

/// `tau_closure(mid{received/bind})`.
pub fn weak_input_tail(
    mid: &Agent,
    bind: Name,
    received: Name,
    lim: ExploreLimits,
) -> Result<Vec<Agent>, LimitExceeded> {
    tau_closure(&substitute(mid, received, bind), lim)
}

/// Every `u:a(x)@mid ≺ deriv` of `p` for the given received name.
pub fn weak_input_transitions(
    p: &Agent,
    avoid: &NameSet,
    received: Name,
    lim: ExploreLimits,
) -> Result<Vec<WeakInputTransition>, LimitExceeded> {
    let mut out = Vec::new();
    for w in weak_late_transitions(p, avoid, lim)? {
        if let WeakResidual::Input(chan, bind, mid) = w {
            for deriv in weak_input_tail(&mid, bind, received, lim)? {
                out.push(WeakInputTransition {
                    received,
                    chan,
                    bind,
                    mid: mid.clone(),
                    deriv,
                });
            }
        }
    }
    Ok(out)
}

/// `p ⇒α̂ q`; for tau the empty chain counts.
pub fn weak_hat_holds(
    p: &Agent,
    act: FreeAction,
    q: &Agent,
    lim: ExploreLimits,
) -> Result<bool, LimitExceeded> {
    let q = canonicalize(q);
    if act == FreeAction::Tau {
        return Ok(tau_closure(p, lim)?.contains(&q));
    }
    Ok(weak_late_transitions(p, &NameSet::new(), lim)?
        .iter()
        .any(|w| matches!(w, WeakResidual::Free(a, d) if *a == act && *d == q)))
}

pub fn weak_early_transitions(
    p: &Agent,
    avoid: &NameSet,
    inputs: &NameSet,
    lim: ExploreLimits,
) -> Result<Vec<EarlyResidual>, LimitExceeded> {
    let names = early_input_names(p, avoid, inputs);
    let mut ctx = avoid.clone();
    ctx.extend(names.iter().copied());
    let mut ex = Explorer::new(&Standard, lim);
    let mut out = BTreeMap::new();
    let start = ex.state(p);
    for &s in ex.closure(start)?.iter() {
        for r in ex.early(s, &names).iter() {
            match r {
                EarlyResidual::Free(act, d) => {
                    let d = ex.state(d);
                    for &t in ex.closure(d)?.iter() {
                        let e = EarlyResidual::Free(*act, ex.agent(t).clone());
                        out.entry(e.key()).or_insert(e);
                    }
                }
                EarlyResidual::Bound(a, x, d) => {
                    let y = fresh_name(&ctx, Some(*x));
                    let d = ex.state(&d.swap(Swap::new(*x, y)));
                    for &t in ex.closure(d)?.iter() {
                        let e = EarlyResidual::Bound(*a, y, ex.agent(t).clone());
                        out.entry(e.key()).or_insert(e);
                    }
                }
            }
        }
    }
    Ok(out.into_values().collect())
}

const CLOSURE_WORK: usize = 20;

/// Index of a state in an [`Explorer`].
pub type StateId = u32;

/// Memo tables for one exploration session. States are canonical agents,
/// optionally passed through a reduction first; the reduction must preserve
/// strong late bisimilarity.
pub struct Explorer<'s> {
    sem: &'s dyn Semantics,
    lim: ExploreLimits,
    reduce: Option<fn(&Agent) -> Agent>,
    /// Raw agents to their states.
    raw: HashMap<Agent, StateId>,
    ids: HashMap<Agent, StateId>,
    agents: Vec<Agent>,
    /// States visited by closure searches so far.
    work: usize,
    oversized: bool,
    late: HashMap<StateId, Rc<[Residual]>>,
    early: HashMap<(StateId, NameSet), Rc<[EarlyResidual]>>,
    closure: HashMap<StateId, Rc<[StateId]>>,
    weak: HashMap<WeakKey, Rc<[StateId]>>,
    subst: HashMap<(StateId, Name, Name), StateId>,
    late_targets: HashMap<StateId, Rc<[StateId]>>,
    early_targets: HashMap<(StateId, NameSet), Rc<[StateId]>>,
}

#[derive(PartialEq, Eq, Hash)]
enum WeakKey {
    Free(StateId, FreeAction),
    BoundOutput(StateId, Name, Name),
    Mids(StateId, Name, Name),
    Early(StateId, EarlyAction, NameSet),
}

impl<'s> Explorer<'s> {
    pub fn new(sem: &'s dyn Semantics, lim: ExploreLimits) -> Self {
        Explorer {
            sem,
            lim,
            reduce: None,
            raw: HashMap::new(),
            ids: HashMap::new(),
            agents: Vec::new(),
            work: 0,
            oversized: false,
            late: HashMap::new(),
            early: HashMap::new(),
            closure: HashMap::new(),
            weak: HashMap::new(),
            subst: HashMap::new(),
            late_targets: HashMap::new(),
            early_targets: HashMap::new(),
        }
    }

    pub fn with_reduction(mut self, reduce: fn(&Agent) -> Agent) -> Self {
        self.reduce = Some(reduce);
        self
    }

    pub fn limits(&self) -> ExploreLimits {
        self.lim
    }

    /// Number of distinct states seen so far.
    pub fn state_count(&self) -> usize {
        self.agents.len()
    }

    /// Fails once the session has met more distinct states than allowed.
    pub fn within_budget(&self) -> Result<(), LimitExceeded> {
        if self.oversized {
            return Err(LimitExceeded::MaxSize(self.lim.max_size));
        }
        if self.agents.len() > self.lim.max_states {
            return Err(LimitExceeded::MaxStates(self.lim.max_states));
        }
        Ok(())
    }

    pub fn state(&mut self, p: &Agent) -> StateId {
        if let Some(&s) = self.raw.get(p) {
            return s;
        }
        let s = match self.reduce {
            Some(f) => canonicalize(&f(p)),
            None => canonicalize(p),
        };
        let id = match self.ids.get(&s) {
            Some(&id) => id,
            None => {
                let id = self.agents.len() as StateId;
                self.oversized |= s.size() > self.lim.max_size;
                self.ids.insert(s.clone(), id);
                self.agents.push(s);
                id
            }
        };
        self.raw.insert(p.clone(), id);
        id
    }

    pub fn agent(&self, s: StateId) -> &Agent {
        &self.agents[s as usize]
    }

    /// The state `s{new/old}`.
    pub fn subst(&mut self, s: StateId, new: Name, old: Name) -> StateId {
        if let Some(&t) = self.subst.get(&(s, new, old)) {
            return t;
        }
        let p = substitute(self.agent(s), new, old);
        let t = self.state(&p);
        self.subst.insert((s, new, old), t);
        t
    }

    /// Late residuals of a state, binders fresh for its free names.
    pub fn late(&mut self, s: StateId) -> Rc<[Residual]> {
        if let Some(r) = self.late.get(&s) {
            return r.clone();
        }
        let r: Rc<[Residual]> = self.sem.late(self.agent(s), &NameSet::new()).into();
        self.late.insert(s, r.clone());
        r
    }

    /// Early residuals of a state with inputs instantiated over exactly
    /// `inputs`, which must contain the state's free names.
    pub fn early(&mut self, s: StateId, inputs: &NameSet) -> Rc<[EarlyResidual]> {
        let key = (s, inputs.clone());
        if let Some(r) = self.early.get(&key) {
            return r.clone();
        }
        let r: Rc<[EarlyResidual]> = self.sem.early(self.agent(s), inputs, inputs).into();
        self.early.insert(key, r.clone());
        r
    }

    /// States of the derivatives in [`Explorer::late`], in the same order
    /// and with the same binders.
    pub fn late_targets(&mut self, s: StateId) -> Rc<[StateId]> {
        if let Some(t) = self.late_targets.get(&s) {
            return t.clone();
        }
        let rs = self.late(s);
        let t: Rc<[StateId]> = rs
            .iter()
            .map(|r| match r {
                Residual::Free(_, d) | Residual::Bound(_, _, d) => self.state(d),
            })
            .collect::<Vec<_>>()
            .into();
        self.late_targets.insert(s, t.clone());
        t
    }

    /// States of the derivatives in [`Explorer::early`].
    pub fn early_targets(&mut self, s: StateId, inputs: &NameSet) -> Rc<[StateId]> {
        let key = (s, inputs.clone());
        if let Some(t) = self.early_targets.get(&key) {
            return t.clone();
        }
        let rs = self.early(s, inputs);
        let t: Rc<[StateId]> = rs
            .iter()
            .map(|r| match r {
                EarlyResidual::Free(_, d) | EarlyResidual::Bound(_, _, d) => self.state(d),
            })
            .collect::<Vec<_>>()
            .into();
        self.early_targets.insert(key, t.clone());
        t
    }

    /// `t` with its free `x` renamed to `y`, which must not occur free in it.
    pub fn rename(&mut self, t: StateId, x: Name, y: Name) -> StateId {
        self.subst(t, y, x)
    }

    /// States reachable from `s` by tau steps, `s` first.
    pub fn closure(&mut self, s: StateId) -> Result<Rc<[StateId]>, LimitExceeded> {
        if let Some(c) = self.closure.get(&s) {
            return Ok(c.clone());
        }
        self.within_budget()?;
        let mut seen = HashSet::from([s]);
        let mut order = vec![s];
        let mut queue = VecDeque::from([(s, 0usize)]);
        while let Some((t, depth)) = queue.pop_front() {
            let targets = self.late_targets(t);
            for (r, &d) in self.late(t).iter().zip(targets.iter()) {
                if let Residual::Free(FreeAction::Tau, _) = r {
                    if seen.contains(&d) {
                        continue;
                    }
                    if depth + 1 > self.lim.max_depth {
                        return Err(LimitExceeded::MaxDepth(self.lim.max_depth));
                    }
                    if seen.len() >= self.lim.max_states {
                        return Err(LimitExceeded::MaxStates(self.lim.max_states));
                    }
                    self.within_budget()?;
                    seen.insert(d);
                    order.push(d);
                    queue.push_back((d, depth + 1));
                }
            }
        }
        // tau-closures of growing replicated agents overlap heavily
        self.work += order.len();
        if self.work > CLOSURE_WORK * self.lim.max_states {
            return Err(LimitExceeded::MaxStates(self.lim.max_states));
        }
        let c: Rc<[StateId]> = order.into();
        self.closure.insert(s, c.clone());
        Ok(c)
    }

    fn weak_set(
        &mut self,
        key: WeakKey,
        pick: impl Fn(&mut Self, StateId) -> Vec<StateId>,
        close: bool,
    ) -> Result<Rc<[StateId]>, LimitExceeded> {
        if let Some(r) = self.weak.get(&key) {
            return Ok(r.clone());
        }
        let s = match key {
            WeakKey::Free(s, _)
            | WeakKey::BoundOutput(s, _, _)
            | WeakKey::Mids(s, _, _)
            | WeakKey::Early(s, _, _) => s,
        };
        let mut out = BTreeSet::new();
        for &s1 in self.closure(s)?.iter() {
            for d in pick(self, s1) {
                if close {
                    out.extend(self.closure(d)?.iter().copied());
                } else {
                    out.insert(d);
                }
            }
        }
        let r: Rc<[StateId]> = out.into_iter().collect::<Vec<_>>().into();
        self.weak.insert(key, r.clone());
        Ok(r)
    }

    /// States `t` with `s ⇒α t`; for tau at least one step is taken.
    pub fn weak_free(&mut self, s: StateId, act: FreeAction) -> Result<Rc<[StateId]>, LimitExceeded> {
        let pick = move |ex: &mut Self, s1: StateId| {
            let mut v = Vec::new();
            let targets = ex.late_targets(s1);
            for (r, &d) in ex.late(s1).iter().zip(targets.iter()) {
                if let Residual::Free(a, _) = r {
                    if *a == act {
                        v.push(d);
                    }
                }
            }
            v
        };
        self.weak_set(WeakKey::Free(s, act), pick, true)
    }

    /// States `t` with `s ⇒a!(y) t`; `y` must be fresh for `s`.
    pub fn weak_bound_output(
        &mut self,
        s: StateId,
        chan: Name,
        y: Name,
    ) -> Result<Rc<[StateId]>, LimitExceeded> {
        let pick = move |ex: &mut Self, s1: StateId| {
            let mut v = Vec::new();
            let targets = ex.late_targets(s1);
            for (r, &d) in ex.late(s1).iter().zip(targets.iter()) {
                if let Residual::Bound(Subject::BoundOutput(a), x, _) = r {
                    if *a == chan {
                        v.push(ex.rename(d, *x, y));
                    }
                }
            }
            v
        };
        self.weak_set(WeakKey::BoundOutput(s, chan, y), pick, true)
    }

    /// Mid-points `m` with `s ⇒τ̂ −a(y)→ m`; `y` must be fresh for `s` and
    /// occurs free in each `m`.
    pub fn weak_input_mids(
        &mut self,
        s: StateId,
        chan: Name,
        y: Name,
    ) -> Result<Rc<[StateId]>, LimitExceeded> {
        let pick = move |ex: &mut Self, s1: StateId| {
            let mut v = Vec::new();
            let targets = ex.late_targets(s1);
            for (r, &d) in ex.late(s1).iter().zip(targets.iter()) {
                if let Residual::Bound(Subject::Input(a), x, _) = r {
                    if *a == chan {
                        v.push(ex.rename(d, *x, y));
                    }
                }
            }
            v
        };
        self.weak_set(WeakKey::Mids(s, chan, y), pick, false)
    }

    /// States `t` with `s ⇒act t` in the early system.
    pub fn weak_early_free(
        &mut self,
        s: StateId,
        act: EarlyAction,
        inputs: &NameSet,
    ) -> Result<Rc<[StateId]>, LimitExceeded> {
        let names = inputs.clone();
        let pick = move |ex: &mut Self, s1: StateId| {
            let mut v = Vec::new();
            let targets = ex.early_targets(s1, &names);
            for (r, &d) in ex.early(s1, &names).iter().zip(targets.iter()) {
                if let EarlyResidual::Free(a, _) = r {
                    if *a == act {
                        v.push(d);
                    }
                }
            }
            v
        };
        self.weak_set(WeakKey::Early(s, act, inputs.clone()), pick, true)
    }
}
