//! Brute-force late transitions for replication-free agents, written
//! directly from the inference rules with its own substitution and its own
//! alpha-normal form. Shares nothing with the library beyond the `Agent`
//! type.

use std::collections::BTreeSet;

use picalc::syntax::Agent;
use picalc::Name;

#[derive(Clone, Debug)]
pub enum Act {
    Tau,
    Out(Name, Name),
    In(Name, Name),
    BoundOut(Name, Name),
}

/// Hands out names that occur nowhere in the agent under study.
pub struct Supply {
    taken: BTreeSet<String>,
    next: usize,
}

impl Supply {
    pub fn new(p: &Agent) -> Self {
        let mut taken = BTreeSet::new();
        names(p, &mut taken);
        Supply { taken, next: 0 }
    }

    fn fresh(&mut self) -> Name {
        loop {
            self.next += 1;
            let n = format!("v{}", self.next);
            if self.taken.insert(n.clone()) {
                return Name::new(&n);
            }
        }
    }
}

fn names(p: &Agent, out: &mut BTreeSet<String>) {
    use Agent::*;
    let mut add = |n: &Name| {
        out.insert(n.to_string());
    };
    match p {
        Nil => {}
        Tau(q) | Bang(q) => names(q, out),
        Input(a, b, q) | Output(a, b, q) | Match(a, b, q) | Mismatch(a, b, q) => {
            add(a);
            add(b);
            names(q, out);
        }
        Res(x, q) => {
            add(x);
            names(q, out);
        }
        Sum(l, r) | Par(l, r) => {
            names(l, out);
            names(r, out);
        }
    }
}

fn free(p: &Agent) -> BTreeSet<Name> {
    use Agent::*;
    match p {
        Nil => BTreeSet::new(),
        Tau(q) | Bang(q) => free(q),
        Output(a, b, q) | Match(a, b, q) | Mismatch(a, b, q) => {
            let mut s = free(q);
            s.insert(*a);
            s.insert(*b);
            s
        }
        Input(a, x, q) => {
            let mut s = free(q);
            s.remove(x);
            s.insert(*a);
            s
        }
        Res(x, q) => {
            let mut s = free(q);
            s.remove(x);
            s
        }
        Sum(l, r) | Par(l, r) => {
            let mut s = free(l);
            s.extend(free(r));
            s
        }
    }
}

/// `p{new/old}`, renaming binders out of the way of `new`.
fn subst(p: &Agent, new: Name, old: Name, sup: &mut Supply) -> Agent {
    use Agent::*;
    let f = |n: Name| if n == old { new } else { n };
    let b = |q: &Agent, sup: &mut Supply| Box::new(subst(q, new, old, sup));
    match p {
        Nil => Nil,
        Tau(q) => Tau(b(q, sup)),
        Bang(q) => Bang(b(q, sup)),
        Output(a, c, q) => Output(f(*a), f(*c), b(q, sup)),
        Match(a, c, q) => Match(f(*a), f(*c), b(q, sup)),
        Mismatch(a, c, q) => Mismatch(f(*a), f(*c), b(q, sup)),
        Sum(l, r) => Sum(b(l, sup), b(r, sup)),
        Par(l, r) => Par(b(l, sup), b(r, sup)),
        Input(a, x, q) => {
            let (x, q) = under(*x, q, new, old, sup);
            Input(f(*a), x, Box::new(q))
        }
        Res(x, q) => {
            let (x, q) = under(*x, q, new, old, sup);
            Res(x, Box::new(q))
        }
    }
}

fn under(x: Name, body: &Agent, new: Name, old: Name, sup: &mut Supply) -> (Name, Agent) {
    if x == old {
        return (x, body.clone());
    }
    if x == new {
        let y = sup.fresh();
        let body = subst(body, y, x, sup);
        return (y, subst(&body, new, old, sup));
    }
    (x, subst(body, new, old, sup))
}

/// Every late transition derivable from the rules, binders drawn from the
/// supply so that the side conditions on them always hold.
pub fn derive(p: &Agent, sup: &mut Supply) -> Vec<(Act, Agent)> {
    use Agent::*;
    match p {
        Nil => vec![],
        Tau(q) => vec![(Act::Tau, (**q).clone())],
        Output(a, b, q) => vec![(Act::Out(*a, *b), (**q).clone())],
        Input(a, x, q) => {
            let y = sup.fresh();
            vec![(Act::In(*a, y), subst(q, y, *x, sup))]
        }
        Match(a, b, q) if a == b => derive(q, sup),
        Mismatch(a, b, q) if a != b => derive(q, sup),
        Match(..) | Mismatch(..) => vec![],
        Sum(l, r) => {
            let mut out = derive(l, sup);
            out.extend(derive(r, sup));
            out
        }
        Par(l, r) => {
            let dl = derive(l, sup);
            let dr = derive(r, sup);
            let mut out = Vec::new();
            for (act, d) in &dl {
                out.push((act.clone(), Par(Box::new(d.clone()), r.clone())));
            }
            for (act, d) in &dr {
                out.push((act.clone(), Par(l.clone(), Box::new(d.clone()))));
            }
            for (one, two, left_inputs) in [(&dl, &dr, true), (&dr, &dl, false)] {
                for (i, pi) in one {
                    let Act::In(a, x) = i else { continue };
                    for (o, qo) in two {
                        let body = match o {
                            Act::Out(c, b) if c == a => {
                                let pi = subst(pi, *b, *x, sup);
                                pair(pi, qo.clone(), left_inputs)
                            }
                            Act::BoundOut(c, y) if c == a => {
                                let pi = subst(pi, *y, *x, sup);
                                Res(*y, Box::new(pair(pi, qo.clone(), left_inputs)))
                            }
                            _ => continue,
                        };
                        out.push((Act::Tau, body));
                    }
                }
            }
            out
        }
        Res(y, q) => {
            let mut out = Vec::new();
            for (act, d) in derive(q, sup) {
                match act {
                    Act::Tau => out.push((Act::Tau, Res(*y, Box::new(d)))),
                    Act::Out(a, b) if a != *y && b != *y => {
                        out.push((Act::Out(a, b), Res(*y, Box::new(d))))
                    }
                    Act::Out(a, b) if a != *y => {
                        let z = sup.fresh();
                        out.push((Act::BoundOut(a, z), subst(&d, z, b, sup)));
                    }
                    Act::In(a, x) | Act::BoundOut(a, x) if a != *y => {
                        let act = if matches!(act, Act::In(..)) {
                            Act::In(a, x)
                        } else {
                            Act::BoundOut(a, x)
                        };
                        out.push((act, Res(*y, Box::new(d))));
                    }
                    _ => {}
                }
            }
            out
        }
        Bang(_) => panic!("the oracle covers replication-free agents only"),
    }
}

fn pair(input_side: Agent, output_side: Agent, input_left: bool) -> Agent {
    if input_left {
        Agent::Par(Box::new(input_side), Box::new(output_side))
    } else {
        Agent::Par(Box::new(output_side), Box::new(input_side))
    }
}

/// De Bruijn rendering: bound names become their binder depth.
pub fn debruijn(p: &Agent, env: &mut Vec<Name>) -> String {
    use Agent::*;
    let n = |x: &Name, env: &Vec<Name>| match env.iter().rposition(|b| b == x) {
        Some(i) => format!("#{}", env.len() - 1 - i),
        None => x.to_string(),
    };
    match p {
        Nil => "0".into(),
        Tau(q) => format!("t.{}", debruijn(q, env)),
        Bang(q) => format!("!{}", debruijn(q, env)),
        Output(a, b, q) => format!("{}<{}>.{}", n(a, env), n(b, env), debruijn(q, env)),
        Match(a, b, q) => format!("[{}={}]{}", n(a, env), n(b, env), debruijn(q, env)),
        Mismatch(a, b, q) => format!("[{}~{}]{}", n(a, env), n(b, env), debruijn(q, env)),
        Sum(l, r) => format!("({} + {})", debruijn(l, env), debruijn(r, env)),
        Par(l, r) => format!("({} | {})", debruijn(l, env), debruijn(r, env)),
        Input(a, x, q) => {
            let a = n(a, env);
            env.push(*x);
            let body = debruijn(q, env);
            env.pop();
            format!("{a}().{body}")
        }
        Res(x, q) => {
            env.push(*x);
            let body = debruijn(q, env);
            env.pop();
            format!("new.{body}")
        }
    }
}

/// Alpha-invariant rendering of a residual.
pub fn key(act: &Act, d: &Agent) -> String {
    let bound = |kind: &str, a: &Name, x: &Name| {
        let mut env = vec![*x];
        format!("{kind} {a} . {}", debruijn(d, &mut env))
    };
    match act {
        Act::Tau => format!("tau . {}", debruijn(d, &mut vec![])),
        Act::Out(a, b) => format!("out {a} {b} . {}", debruijn(d, &mut vec![])),
        Act::In(a, x) => bound("in", a, x),
        Act::BoundOut(a, x) => bound("bout", a, x),
    }
}

/// The oracle's transition set of `p`.
pub fn late_keys(p: &Agent) -> BTreeSet<String> {
    let mut sup = Supply::new(p);
    derive(p, &mut sup).iter().map(|(a, d)| key(a, d)).collect()
}

/// The library's late transitions in the oracle's rendering.
pub fn library_keys(p: &Agent) -> BTreeSet<String> {
    use picalc::semantics::{late_transitions, FreeAction, Residual, Subject};
    late_transitions(p, &Default::default())
        .iter()
        .map(|r| match r {
            Residual::Free(FreeAction::Tau, d) => key(&Act::Tau, d),
            Residual::Free(FreeAction::Output(a, b), d) => key(&Act::Out(*a, *b), d),
            Residual::Bound(Subject::Input(a), x, d) => key(&Act::In(*a, *x), d),
            Residual::Bound(Subject::BoundOutput(a), x, d) => key(&Act::BoundOut(*a, *x), d),
        })
        .collect()
}

#[allow(dead_code)]
pub fn free_names(p: &Agent) -> BTreeSet<Name> {
    free(p)
}
