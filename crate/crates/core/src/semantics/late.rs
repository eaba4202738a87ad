use crate::nominal::{Name, NameSet, Nominal, Swap};
use crate::syntax::{free_names, substitute, Agent};

use super::{dedup_late, fresh_binder, FreeAction, Residual, Subject};

pub(super) fn transitions(p: &Agent, avoid: &NameSet) -> Vec<Residual> {
    let mut ctx = avoid.clone();
    ctx.extend(free_names(p));
    dedup_late(derive(p, &ctx))
}

// Invariant: ctx ⊇ fn(p). Every binder emitted is outside ctx.
fn derive(p: &Agent, ctx: &NameSet) -> Vec<Residual> {
    match p {
        Agent::Nil => Vec::new(),
        Agent::Tau(q) => vec![Residual::Free(FreeAction::Tau, (**q).clone())],
        Agent::Output(a, b, q) => vec![Residual::Free(FreeAction::Output(*a, *b), (**q).clone())],
        Agent::Input(a, x, q) => {
            let y = fresh_binder(ctx, *x);
            vec![Residual::Bound(Subject::Input(*a), y, q.swap(Swap::new(*x, y)))]
        }
        Agent::Match(a, b, q) if a == b => derive(q, ctx),
        Agent::Mismatch(a, b, q) if a != b => derive(q, ctx),
        Agent::Match(..) | Agent::Mismatch(..) => Vec::new(),
        Agent::Sum(l, r) => {
            let mut out = derive(l, ctx);
            out.extend(derive(r, ctx));
            out
        }
        Agent::Par(l, r) => {
            let lt = derive(l, ctx);
            let rt = derive(r, ctx);
            let mut out = Vec::new();
            for t in &lt {
                out.push(map_deriv(t, |d| Agent::par(d.clone(), (**r).clone())));
            }
            for t in &rt {
                out.push(map_deriv(t, |d| Agent::par((**l).clone(), d.clone())));
            }
            out.extend(synchronise(&lt, &rt, Agent::par));
            out.extend(synchronise(&rt, &lt, |dr, dl| Agent::par(dl, dr)));
            out
        }
        Agent::Res(y, q) => {
            let z = fresh_binder(ctx, *y);
            let body = q.swap(Swap::new(*y, z));
            let mut inner = ctx.clone();
            inner.insert(z);
            derive(&body, &inner)
                .into_iter()
                .filter_map(|t| restrict(z, t))
                .collect()
        }
        Agent::Bang(q) => {
            let t = derive(q, ctx);
            let bang = Agent::Bang(q.clone());
            let mut out: Vec<Residual> = t
                .iter()
                .map(|r| map_deriv(r, |d| Agent::par(d.clone(), bang.clone())))
                .collect();
            out.extend(synchronise(&t, &t, |d_in, d_out| {
                Agent::par(d_in, Agent::par(d_out, bang.clone()))
            }));
            out.extend(synchronise(&t, &t, |d_in, d_out| {
                Agent::par(d_out, Agent::par(d_in, bang.clone()))
            }));
            out
        }
    }
}

fn map_deriv(r: &Residual, f: impl Fn(&Agent) -> Agent) -> Residual {
    match r {
        Residual::Bound(s, x, d) => Residual::Bound(*s, *x, f(d)),
        Residual::Free(a, d) => Residual::Free(*a, f(d)),
    }
}

/// Comm and Close with the input drawn from `inputs` and the output from
/// `outputs`; `build(input_deriv, output_deriv)` places the two derivatives.
fn synchronise(
    inputs: &[Residual],
    outputs: &[Residual],
    build: impl Fn(Agent, Agent) -> Agent,
) -> Vec<Residual> {
    let mut out = Vec::new();
    for i in inputs {
        let Residual::Bound(Subject::Input(a), x, d_in) = i else {
            continue;
        };
        for o in outputs {
            match o {
                Residual::Free(FreeAction::Output(c, b), d_out) if c == a => {
                    let d = build(substitute(d_in, *b, *x), d_out.clone());
                    out.push(Residual::Free(FreeAction::Tau, d));
                }
                Residual::Bound(Subject::BoundOutput(c), y, d_out) if c == a => {
                    let d = build(substitute(d_in, *y, *x), d_out.clone());
                    out.push(Residual::Free(FreeAction::Tau, Agent::res(*y, d)));
                }
                _ => {}
            }
        }
    }
    out
}

/// ResB, ResF and Open for a restriction on `z`, which is fresh for every
/// binder in `t`.
fn restrict(z: Name, t: Residual) -> Option<Residual> {
    match t {
        Residual::Bound(s, x, d) => {
            (s.chan() != z).then(|| Residual::Bound(s, x, Agent::res(z, d)))
        }
        Residual::Free(FreeAction::Output(a, b), d) => {
            if a == z {
                None
            } else if b == z {
                Some(Residual::Bound(Subject::BoundOutput(a), z, d))
            } else {
                Some(Residual::Free(FreeAction::Output(a, b), Agent::res(z, d)))
            }
        }
        Residual::Free(FreeAction::Tau, d) => Some(Residual::Free(FreeAction::Tau, Agent::res(z, d))),
    }
}
