use crate::nominal::{Name, NameSet, Nominal, Swap};
use crate::syntax::{free_names, substitute, Agent};

use super::{dedup_early, fresh_binder, EarlyAction, EarlyResidual};

/// Inputs receive every name of `inputs ∪ fn(p)`, and of `fn` of any
/// enclosing parallel composition so that communications are found.
pub(super) fn transitions(p: &Agent, avoid: &NameSet, inputs: &NameSet) -> Vec<EarlyResidual> {
    let mut u = inputs.clone();
    u.extend(free_names(p));
    let mut ctx = avoid.clone();
    ctx.extend(u.iter().copied());
    dedup_early(derive(p, &ctx, &u))
        .into_iter()
        .filter(|r| match r {
            // received names picked up from a sibling stay internal
            EarlyResidual::Free(EarlyAction::Input(_, n), _) => u.contains(n),
            _ => true,
        })
        .collect()
}

// Invariant: ctx ⊇ fn(p) ∪ u. Emitted binders are outside ctx.
fn derive(p: &Agent, ctx: &NameSet, u: &NameSet) -> Vec<EarlyResidual> {
    match p {
        Agent::Nil => Vec::new(),
        Agent::Tau(q) => vec![EarlyResidual::Free(EarlyAction::Tau, (**q).clone())],
        Agent::Output(a, b, q) => {
            vec![EarlyResidual::Free(EarlyAction::Output(*a, *b), (**q).clone())]
        }
        Agent::Input(a, x, q) => u
            .iter()
            .map(|n| EarlyResidual::Free(EarlyAction::Input(*a, *n), substitute(q, *n, *x)))
            .collect(),
        Agent::Match(a, b, q) if a == b => derive(q, ctx, u),
        Agent::Mismatch(a, b, q) if a != b => derive(q, ctx, u),
        Agent::Match(..) | Agent::Mismatch(..) => Vec::new(),
        Agent::Sum(l, r) => {
            let mut out = derive(l, ctx, u);
            out.extend(derive(r, ctx, u));
            out
        }
        Agent::Par(l, r) => {
            let (ctx, u) = widen(p, ctx, u);
            let lt = derive(l, &ctx, &u);
            let rt = derive(r, &ctx, &u);
            let mut out = Vec::new();
            for t in &lt {
                out.push(map_deriv(t, |d| Agent::par(d.clone(), (**r).clone())));
            }
            for t in &rt {
                out.push(map_deriv(t, |d| Agent::par((**l).clone(), d.clone())));
            }
            out.extend(comm(&lt, &rt, Agent::par));
            out.extend(comm(&rt, &lt, |dr, dl| Agent::par(dl, dr)));
            out.extend(close(l, &rt, &ctx, Agent::par));
            out.extend(close(r, &lt, &ctx, |dr, dl| Agent::par(dl, dr)));
            out
        }
        Agent::Res(y, q) => {
            let mut taken = ctx.clone();
            taken.extend(u.iter().copied());
            let z = fresh_binder(&taken, *y);
            let body = q.swap(Swap::new(*y, z));
            let mut inner = ctx.clone();
            inner.insert(z);
            derive(&body, &inner, u)
                .into_iter()
                .filter_map(|t| restrict(z, t))
                .collect()
        }
        Agent::Bang(q) => {
            let (ctx, u) = widen(p, ctx, u);
            let t = derive(q, &ctx, &u);
            let bang = Agent::Bang(q.clone());
            let mut out: Vec<EarlyResidual> = t
                .iter()
                .map(|r| map_deriv(r, |d| Agent::par(d.clone(), bang.clone())))
                .collect();
            out.extend(comm(&t, &t, |d_in, d_out| {
                Agent::par(d_in, Agent::par(d_out, bang.clone()))
            }));
            out.extend(comm(&t, &t, |d_in, d_out| {
                Agent::par(d_out, Agent::par(d_in, bang.clone()))
            }));
            out.extend(close(q, &t, &ctx, |d_in, d_out| {
                Agent::par(d_in, Agent::par(d_out, bang.clone()))
            }));
            out.extend(close(q, &t, &ctx, |d_in, d_out| {
                Agent::par(d_out, Agent::par(d_in, bang.clone()))
            }));
            out
        }
    }
}

fn widen(p: &Agent, ctx: &NameSet, u: &NameSet) -> (NameSet, NameSet) {
    let fp = free_names(p);
    let mut u = u.clone();
    u.extend(fp.iter().copied());
    let mut ctx = ctx.clone();
    ctx.extend(fp);
    (ctx, u)
}

fn map_deriv(r: &EarlyResidual, f: impl Fn(&Agent) -> Agent) -> EarlyResidual {
    match r {
        EarlyResidual::Bound(a, x, d) => EarlyResidual::Bound(*a, *x, f(d)),
        EarlyResidual::Free(act, d) => EarlyResidual::Free(*act, f(d)),
    }
}

/// Free-output communication; `build(input_deriv, output_deriv)`.
fn comm(
    inputs: &[EarlyResidual],
    outputs: &[EarlyResidual],
    build: impl Fn(Agent, Agent) -> Agent,
) -> Vec<EarlyResidual> {
    let mut out = Vec::new();
    for i in inputs {
        let EarlyResidual::Free(EarlyAction::Input(a, b), d_in) = i else {
            continue;
        };
        for o in outputs {
            if let EarlyResidual::Free(EarlyAction::Output(c, e), d_out) = o {
                if c == a && e == b {
                    out.push(EarlyResidual::Free(
                        EarlyAction::Tau,
                        build(d_in.clone(), d_out.clone()),
                    ));
                }
            }
        }
    }
    out
}

/// Close: `receiver` takes the extruded name of each bound output in
/// `outputs`. The extruded name is fresh for the receiver, so its input is
/// derived afresh with that name as the only new instantiation.
fn close(
    receiver: &Agent,
    outputs: &[EarlyResidual],
    ctx: &NameSet,
    build: impl Fn(Agent, Agent) -> Agent,
) -> Vec<EarlyResidual> {
    let mut out = Vec::new();
    for o in outputs {
        let EarlyResidual::Bound(a, y, d_out) = o else {
            continue;
        };
        let mut ctx_y = ctx.clone();
        ctx_y.insert(*y);
        for i in derive(receiver, &ctx_y, &NameSet::from([*y])) {
            if let EarlyResidual::Free(EarlyAction::Input(c, n), d_in) = i {
                if c == *a && n == *y {
                    let d = Agent::res(*y, build(d_in, d_out.clone()));
                    out.push(EarlyResidual::Free(EarlyAction::Tau, d));
                }
            }
        }
    }
    out
}

fn restrict(z: Name, t: EarlyResidual) -> Option<EarlyResidual> {
    match t {
        EarlyResidual::Bound(a, x, d) => {
            (a != z).then(|| EarlyResidual::Bound(a, x, Agent::res(z, d)))
        }
        EarlyResidual::Free(EarlyAction::Output(a, b), d) => {
            if a == z {
                None
            } else if b == z {
                Some(EarlyResidual::Bound(a, z, d))
            } else {
                Some(EarlyResidual::Free(EarlyAction::Output(a, b), Agent::res(z, d)))
            }
        }
        EarlyResidual::Free(EarlyAction::Input(a, n), d) => (a != z && n != z)
            .then(|| EarlyResidual::Free(EarlyAction::Input(a, n), Agent::res(z, d))),
        EarlyResidual::Free(EarlyAction::Tau, d) => {
            Some(EarlyResidual::Free(EarlyAction::Tau, Agent::res(z, d)))
        }
    }
}
