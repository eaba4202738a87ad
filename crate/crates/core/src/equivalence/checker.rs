//! Greatest fixpoint over the pair graph.
//!
//! Each reachable pair gets a formula over other pairs saying what the
//! simulation clauses demand of it. Pairs whose formula fails are removed
//! round by round until nothing changes; the round in which a pair goes is
//! its rank, and ranks steer the witness towards a short play.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::nominal::{fresh_name, Name, NameSet};
use crate::parser::print_agent;
use crate::semantics::{EarlyAction, EarlyResidual, FreeAction, Residual, Semantics, Subject};
use crate::syntax::{free_names, Agent};
use crate::weak::{Explorer, LimitExceeded, StateId};

use super::structural::{prune, structural_reduce};
use super::{
    ActionKind, ActionView, CheckConfig, EquivKind, Side, StateReduction, Verdict,
    Witness, WitnessStep,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckStats {
    /// Distinct agent states met.
    pub states: usize,
    /// Pairs in the explored graph.
    pub pairs: usize,
    /// Refinement rounds until stable.
    pub rounds: usize,
}

impl CheckStats {
    pub(crate) fn add(&mut self, other: CheckStats) {
        self.states += other.states;
        self.pairs += other.pairs;
        self.rounds += other.rounds;
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum System {
    Late,
    Early,
}

#[derive(Clone, Copy)]
struct Discipline {
    system: System,
    weak: bool,
    /// Tau must be answered by at least one tau (the congruence clauses).
    nonempty_tau: bool,
}

#[derive(Clone, Debug)]
enum Formula {
    True,
    Pair(usize),
    /// Every labelled branch must hold.
    All(Vec<(WitnessStep, Formula)>),
    /// Some labelled branch must hold; empty means false.
    Any(Vec<(WitnessStep, Formula)>),
}

const ALIVE: usize = usize::MAX;

struct Graph<'s> {
    ex: Explorer<'s>,
    cfg: &'s CheckConfig,
    disc: Discipline,
    pairs: Vec<(StateId, StateId)>,
    depth: Vec<usize>,
    index: HashMap<(StateId, StateId), usize>,
    formulas: Vec<Formula>,
    queue: VecDeque<usize>,
}

pub(crate) fn check_base(
    sem: &dyn Semantics,
    p: &Agent,
    q: &Agent,
    kind: EquivKind,
    cfg: &CheckConfig,
) -> (Verdict, CheckStats) {
    let (system, weak, cong) = match kind {
        EquivKind::StrongLate => (System::Late, false, false),
        EquivKind::StrongEarly => (System::Early, false, false),
        EquivKind::WeakLate => (System::Late, true, false),
        EquivKind::WeakLateCong => (System::Late, true, true),
        EquivKind::WeakEarly => (System::Early, true, false),
        EquivKind::WeakEarlyCong => (System::Early, true, true),
        other => unreachable!("{other} is substitution-closed"),
    };
    let mut ex = Explorer::new(sem, cfg.limits);
    ex = match cfg.reduction {
        StateReduction::Alpha => ex,
        StateReduction::Prune => ex.with_reduction(prune),
        StateReduction::Structural => ex.with_reduction(structural_reduce),
    };
    let mut g = Graph {
        ex,
        cfg,
        disc: Discipline {
            system,
            weak,
            nonempty_tau: false,
        },
        pairs: Vec::new(),
        depth: Vec::new(),
        index: HashMap::new(),
        formulas: Vec::new(),
        queue: VecDeque::new(),
    };
    g.run(p, q, cong)
}

impl<'s> Graph<'s> {
    fn stats(&self, rounds: usize) -> CheckStats {
        CheckStats {
            states: self.ex.state_count(),
            pairs: self.pairs.len(),
            rounds,
        }
    }

    fn run(&mut self, p: &Agent, q: &Agent, cong: bool) -> (Verdict, CheckStats) {
        let l = self.ex.state(p);
        let r = self.ex.state(q);
        if l == r {
            return (Verdict::Equivalent, self.stats(0));
        }
        let root = match self.root(l, r, cong) {
            Ok(f) => f,
            Err(limit) => return (Verdict::Unknown(limit.into()), self.stats(0)),
        };
        // Unexpanded pairs keep the formula `True`, so a refutation of the
        // partial graph is a refutation of the whole one.
        let mut next_check = 16;
        let limit = loop {
            let Some(i) = self.queue.pop_front() else {
                break None;
            };
            let (a, b) = self.pairs[i];
            match self.formula(a, b, self.depth[i]) {
                Ok(f) => self.formulas[i] = f,
                Err(limit) => break Some(limit),
            }
            if self.pairs.len() >= next_check {
                next_check *= 2;
                let (rank, rounds) = self.refine();
                if !eval(&root, &rank, ALIVE) {
                    let w = self.witness(&root, &rank, (l, r));
                    return (Verdict::Inequivalent(w), self.stats(rounds));
                }
            }
        };
        let (rank, rounds) = self.refine();
        let stats = self.stats(rounds);
        if !eval(&root, &rank, ALIVE) {
            return (Verdict::Inequivalent(self.witness(&root, &rank, (l, r))), stats);
        }
        match limit {
            Some(limit) => (Verdict::Unknown(limit.into()), stats),
            None => (Verdict::Equivalent, stats),
        }
    }

    fn root(&mut self, l: StateId, r: StateId, cong: bool) -> Result<Formula, LimitExceeded> {
        if !cong {
            return Ok(Formula::Pair(self.intern(l, r, 0)?));
        }
        // the congruences are one clause deep, over the plain weak relation
        self.disc.nonempty_tau = true;
        let f = self.formula(l, r, 0);
        self.disc.nonempty_tau = false;
        f
    }

    fn intern(&mut self, l: StateId, r: StateId, depth: usize) -> Result<usize, LimitExceeded> {
        let key = (l, r);
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let lim = self.cfg.limits;
        self.ex.within_budget()?;
        if self.pairs.len() >= lim.max_states {
            return Err(LimitExceeded::MaxStates(lim.max_states));
        }
        if depth > lim.max_depth {
            return Err(LimitExceeded::MaxDepth(lim.max_depth));
        }
        let i = self.pairs.len();
        self.pairs.push(key);
        self.depth.push(depth);
        self.formulas.push(Formula::True);
        self.index.insert(key, i);
        self.queue.push_back(i);
        Ok(i)
    }

    /// Pair reached after the `mover` side went to `m` and the other to `o`.
    fn pair(&mut self, mover: Side, m: StateId, o: StateId, depth: usize) -> Result<Formula, LimitExceeded> {
        let (l, r) = match mover {
            Side::Left => (m, o),
            Side::Right => (o, m),
        };
        if l == r {
            return Ok(Formula::True);
        }
        Ok(Formula::Pair(self.intern(l, r, depth)?))
    }

    /// The mover went to `m`; some answer must land in a related pair.
    /// An answer reaching `m` itself settles it without exploring the rest.
    fn answer(
        &mut self,
        mover: Side,
        m: StateId,
        answers: Vec<(WitnessStep, StateId)>,
        depth: usize,
    ) -> Result<Formula, LimitExceeded> {
        if answers.iter().any(|(_, o)| *o == m) {
            return Ok(Formula::True);
        }
        let mut branches = Vec::with_capacity(answers.len());
        for (s, o) in answers {
            branches.push((s, self.pair(mover, m, o, depth)?));
        }
        Ok(Formula::Any(branches))
    }

    fn formula(&mut self, l: StateId, r: StateId, depth: usize) -> Result<Formula, LimitExceeded> {
        if l == r && !self.disc.nonempty_tau {
            return Ok(Formula::True);
        }
        let mut inputs = free_names(self.ex.agent(l));
        inputs.extend(free_names(self.ex.agent(r)));
        inputs.extend(self.cfg.extra_inputs.iter().copied());
        let w = fresh_name(&inputs, Some(Name::new("w")));
        inputs.insert(w);
        let mut challenges = self.challenges(Side::Left, l, r, &inputs, depth + 1)?;
        challenges.extend(self.challenges(Side::Right, r, l, &inputs, depth + 1)?);
        challenges.sort_by_key(|(a, _)| step_order(a));
        Ok(Formula::All(challenges))
    }

    fn challenges(
        &mut self,
        side: Side,
        mover: StateId,
        other: StateId,
        inputs: &NameSet,
        depth: usize,
    ) -> Result<Vec<(WitnessStep, Formula)>, LimitExceeded> {
        let mut out = Vec::new();
        match self.disc.system {
            System::Late => {
                let targets = self.ex.late_targets(mover);
                for (r, &t) in self.ex.late(mover).iter().zip(targets.iter()) {
                    out.push(self.late_challenge(side, r, t, other, inputs, depth)?);
                }
            }
            System::Early => {
                let targets = self.ex.early_targets(mover, inputs);
                for (r, &t) in self.ex.early(mover, inputs).iter().zip(targets.iter()) {
                    out.push(self.early_challenge(side, r, t, other, inputs, depth)?);
                }
            }
        }
        Ok(out)
    }

    fn late_challenge(
        &mut self,
        side: Side,
        r: &Residual,
        target: StateId,
        other: StateId,
        inputs: &NameSet,
        depth: usize,
    ) -> Result<(WitnessStep, Formula), LimitExceeded> {
        let resp = side.other();
        match r {
            Residual::Free(act, _) => {
                let m = target;
                let step = step(side, free_view(*act), false);
                let answers = self.free_answers(other, *act)?;
                let answers = answers.into_iter().map(|(v, o)| (step_of(resp, v), o)).collect();
                Ok((step, self.answer(side, m, answers, depth)?))
            }
            Residual::Bound(Subject::BoundOutput(a), x, _) => {
                let y = fresh_name(inputs, Some(*x));
                let m = self.ex.rename(target, *x, y);
                let view = bound_output_view(*a, y);
                let answers = self.bound_output_answers(other, *a, y)?;
                let answers = answers.into_iter().map(|o| (step_of(resp, view.clone()), o)).collect();
                Ok((step(side, view, false), self.answer(side, m, answers, depth)?))
            }
            Residual::Bound(Subject::Input(a), x, _) => {
                let y = fresh_name(inputs, Some(*x));
                let d = self.ex.rename(target, *x, y);
                let view = input_view(*a, Some(y), None);
                let mut branches = Vec::new();
                if self.disc.weak {
                    for &mid in self.ex.weak_input_mids(other, *a, y)?.iter() {
                        let mut per_name = Vec::new();
                        for &u in inputs {
                            let m = self.ex.subst(d, u, y);
                            let tail = self.ex.subst(mid, u, y);
                            let completions = self
                                .ex
                                .closure(tail)?
                                .iter()
                                .map(|&o| (step_of(resp, input_view(*a, Some(y), Some(u))), o))
                                .collect();
                            per_name.push((
                                step(side, input_view(*a, Some(y), Some(u)), false),
                                self.answer(side, m, completions, depth)?,
                            ));
                        }
                        branches.push((step_of(resp, view.clone()), all(per_name)));
                    }
                } else {
                    let targets = self.ex.late_targets(other);
                    for (o, &e) in self.ex.late(other).iter().zip(targets.iter()) {
                        let Residual::Bound(Subject::Input(b), z, _) = o else {
                            continue;
                        };
                        if b != a {
                            continue;
                        }
                        let e = self.ex.rename(e, *z, y);
                        let mut per_name = Vec::new();
                        for &u in inputs {
                            let m = self.ex.subst(d, u, y);
                            let o = self.ex.subst(e, u, y);
                            per_name.push((
                                step(side, input_view(*a, Some(y), Some(u)), false),
                                self.pair(side, m, o, depth)?,
                            ));
                        }
                        branches.push((step_of(resp, view.clone()), all(per_name)));
                    }
                }
                Ok((step(side, view, false), any(branches)))
            }
        }
    }

    fn early_challenge(
        &mut self,
        side: Side,
        r: &EarlyResidual,
        target: StateId,
        other: StateId,
        inputs: &NameSet,
        depth: usize,
    ) -> Result<(WitnessStep, Formula), LimitExceeded> {
        let resp = side.other();
        match r {
            EarlyResidual::Free(act, _) => {
                let m = target;
                let view = early_view(*act);
                let answers: Vec<(ActionView, StateId)> = match act {
                    EarlyAction::Tau => self.free_answers(other, FreeAction::Tau)?,
                    _ if self.disc.weak => self
                        .ex
                        .weak_early_free(other, *act, inputs)?
                        .iter()
                        .map(|&o| (view.clone(), o))
                        .collect(),
                    _ => {
                        let mut v = Vec::new();
                        let targets = self.ex.early_targets(other, inputs);
                        for (o, &e) in self.ex.early(other, inputs).iter().zip(targets.iter()) {
                            if let EarlyResidual::Free(b, _) = o {
                                if b == act {
                                    v.push((view.clone(), e));
                                }
                            }
                        }
                        v
                    }
                };
                let answers = answers.into_iter().map(|(v, o)| (step_of(resp, v), o)).collect();
                Ok((step(side, view, false), self.answer(side, m, answers, depth)?))
            }
            EarlyResidual::Bound(a, x, _) => {
                let y = fresh_name(inputs, Some(*x));
                let m = self.ex.rename(target, *x, y);
                let view = bound_output_view(*a, y);
                let answers = if self.disc.weak {
                    self.ex.weak_bound_output(other, *a, y)?.to_vec()
                } else {
                    let mut v = Vec::new();
                    let targets = self.ex.early_targets(other, inputs);
                    for (o, &e) in self.ex.early(other, inputs).iter().zip(targets.iter()) {
                        if let EarlyResidual::Bound(b, z, _) = o {
                            if b == a {
                                v.push(self.ex.rename(e, *z, y));
                            }
                        }
                    }
                    v
                };
                let answers = answers.into_iter().map(|o| (step_of(resp, view.clone()), o)).collect();
                Ok((step(side, view, false), self.answer(side, m, answers, depth)?))
            }
        }
    }

    /// Answers to a free late action, each with the action shown for it.
    fn free_answers(&mut self, other: StateId, act: FreeAction) -> Result<Vec<(ActionView, StateId)>, LimitExceeded> {
        let view = free_view(act);
        if !self.disc.weak {
            let mut v = Vec::new();
            let targets = self.ex.late_targets(other);
            for (o, &e) in self.ex.late(other).iter().zip(targets.iter()) {
                if let Residual::Free(b, _) = o {
                    if *b == act {
                        v.push((view.clone(), e));
                    }
                }
            }
            return Ok(v);
        }
        if act == FreeAction::Tau && !self.disc.nonempty_tau {
            let closure = self.ex.closure(other)?;
            return Ok(closure
                .iter()
                .map(|&o| {
                    let v = if o == other {
                        ActionView::simple(ActionKind::Idle)
                    } else {
                        view.clone()
                    };
                    (v, o)
                })
                .collect());
        }
        Ok(self
            .ex
            .weak_free(other, act)?
            .iter()
            .map(|&o| (view.clone(), o))
            .collect())
    }

    fn bound_output_answers(&mut self, other: StateId, a: Name, y: Name) -> Result<Vec<StateId>, LimitExceeded> {
        if self.disc.weak {
            return Ok(self.ex.weak_bound_output(other, a, y)?.to_vec());
        }
        let mut v = Vec::new();
        let targets = self.ex.late_targets(other);
        for (o, &e) in self.ex.late(other).iter().zip(targets.iter()) {
            if let Residual::Bound(Subject::BoundOutput(b), z, _) = o {
                if *b == a {
                    v.push(self.ex.rename(e, *z, y));
                }
            }
        }
        Ok(v)
    }

    /// Round-by-round removal. Returns each pair's rank (the round in which
    /// it was removed, or `ALIVE`) and the number of rounds.
    fn refine(&self) -> (Vec<usize>, usize) {
        let n = self.pairs.len();
        let mut rank = vec![ALIVE; n];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, f) in self.formulas.iter().enumerate() {
            let mut refs = Vec::new();
            pair_refs(f, &mut refs);
            refs.sort_unstable();
            refs.dedup();
            for j in refs {
                preds[j].push(i);
            }
        }
        let mut candidates: Vec<usize> = (0..n).collect();
        let mut round = 0;
        loop {
            round += 1;
            let removed: Vec<usize> = candidates
                .iter()
                .copied()
                .filter(|&i| rank[i] == ALIVE && !eval(&self.formulas[i], &rank, round))
                .collect();
            if removed.is_empty() {
                return (rank, round - 1);
            }
            for &i in &removed {
                rank[i] = round;
            }
            let mut next: Vec<usize> = removed.iter().flat_map(|&i| preds[i].iter().copied()).collect();
            next.sort_unstable();
            next.dedup();
            candidates = next;
        }
    }

    fn witness(&self, root: &Formula, rank: &[usize], start: (StateId, StateId)) -> Witness {
        let mut steps = Vec::new();
        let mut at = start;
        let mut f = root;
        let mut threshold = ALIVE;
        loop {
            match f {
                Formula::True => unreachable!("a failing formula has a failing branch"),
                Formula::Pair(j) => {
                    at = self.pairs[*j];
                    threshold = rank[*j];
                    f = &self.formulas[*j];
                }
                Formula::All(branches) => {
                    let (s, next) = branches
                        .iter()
                        .filter(|(_, g)| !eval(g, rank, threshold))
                        .min_by_key(|(_, g)| cost(g, rank, threshold))
                        .expect("a failing conjunction has a failing branch");
                    steps.push(s.clone());
                    f = next;
                }
                Formula::Any(branches) => {
                    let Some((s, next)) = branches
                        .iter()
                        .rev()
                        .max_by_key(|(_, g)| cost(g, rank, threshold))
                    else {
                        break;
                    };
                    steps.push(s.clone());
                    f = next;
                }
            }
        }
        Witness {
            steps,
            left: print_agent(self.ex.agent(at.0)),
            right: print_agent(self.ex.agent(at.1)),
            substitution: None,
        }
    }
}

fn all(branches: Vec<(WitnessStep, Formula)>) -> Formula {
    if branches.iter().all(|(_, f)| matches!(f, Formula::True)) {
        return Formula::True;
    }
    Formula::All(branches)
}

fn any(branches: Vec<(WitnessStep, Formula)>) -> Formula {
    if branches.iter().any(|(_, f)| matches!(f, Formula::True)) {
        return Formula::True;
    }
    Formula::Any(branches)
}

/// Truth of `f` when the pairs still present are those removed in round
/// `threshold` or later.
fn eval(f: &Formula, rank: &[usize], threshold: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::Pair(j) => rank[*j] >= threshold,
        Formula::All(bs) => bs.iter().all(|(_, g)| eval(g, rank, threshold)),
        Formula::Any(bs) => bs.iter().any(|(_, g)| eval(g, rank, threshold)),
    }
}

/// How many rounds a failing formula survives: the challenger picks the
/// quickest refutation and the defender the slowest.
fn cost(f: &Formula, rank: &[usize], threshold: usize) -> usize {
    match f {
        Formula::True => ALIVE,
        Formula::Pair(j) if rank[*j] >= threshold => ALIVE,
        Formula::Pair(j) => rank[*j],
        Formula::All(bs) => bs.iter().map(|(_, g)| cost(g, rank, threshold)).min().unwrap_or(ALIVE),
        Formula::Any(bs) => bs.iter().map(|(_, g)| cost(g, rank, threshold)).max().unwrap_or(0),
    }
}

fn pair_refs(f: &Formula, out: &mut Vec<usize>) {
    match f {
        Formula::True => {}
        Formula::Pair(j) => out.push(*j),
        Formula::All(bs) | Formula::Any(bs) => {
            for (_, g) in bs {
                pair_refs(g, out);
            }
        }
    }
}

fn step(side: Side, action: ActionView, response: bool) -> WitnessStep {
    WitnessStep {
        side,
        action,
        response,
    }
}

fn step_of(side: Side, action: ActionView) -> WitnessStep {
    step(side, action, true)
}

fn step_order(s: &WitnessStep) -> (u8, Option<Name>, Option<Name>, Option<Name>, Side) {
    let kind = match s.action.kind {
        ActionKind::Tau | ActionKind::Idle => 0,
        ActionKind::Input => 1,
        ActionKind::Output => 2,
        ActionKind::BoundOutput => 3,
    };
    (kind, s.action.chan, s.action.msg, s.action.received, s.side)
}

fn free_view(act: FreeAction) -> ActionView {
    match act {
        FreeAction::Tau => ActionView::simple(ActionKind::Tau),
        FreeAction::Output(a, b) => ActionView {
            chan: Some(a),
            msg: Some(b),
            ..ActionView::simple(ActionKind::Output)
        },
    }
}

fn early_view(act: EarlyAction) -> ActionView {
    match act {
        EarlyAction::Tau => free_view(FreeAction::Tau),
        EarlyAction::Output(a, b) => free_view(FreeAction::Output(a, b)),
        EarlyAction::Input(a, u) => input_view(a, None, Some(u)),
    }
}

fn input_view(a: Name, bind: Option<Name>, received: Option<Name>) -> ActionView {
    ActionView {
        chan: Some(a),
        bind,
        received,
        ..ActionView::simple(ActionKind::Input)
    }
}

fn bound_output_view(a: Name, x: Name) -> ActionView {
    ActionView {
        chan: Some(a),
        bind: Some(x),
        ..ActionView::simple(ActionKind::BoundOutput)
    }
}
