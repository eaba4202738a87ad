//! Normal forms for structural congruence.
//!
//! The normal form is computed in two passes over a copy of the agent whose
//! binders have been made pairwise distinct. The first pass reshapes it:
//! `|` and `+` are flattened with `0` units dropped, and restrictions are
//! pushed in as far as the scope laws allow. Binders shared by several
//! operands of a `|` or `+` stay together over that group. The second pass
//! fixes an order: operands are sorted and the binders of each restriction
//! chain are permuted to the least result. Binder names in the second pass
//! depend only on binding depth, so the order does not depend on the names
//! the input happened to use.

use std::collections::BTreeSet;

use crate::nominal::{fresh_name, Name, NameSet, Nominal, Swap};
use crate::syntax::{alpha_eq, canonicalize, free_names, Agent};

use super::{UnknownReason, Verdict};

/// Chains longer than this keep their order instead of being permuted.
const MAX_PERMUTED_CHAIN: usize = 6;

pub fn struct_normal_form(p: &Agent) -> Agent {
    let distinct = distinct_binders(p);
    canonicalize(&order(&reshape(&distinct), 0))
}

/// Decides `p ≡ q` when the normal forms agree, trying up to two unfoldings
/// `!R → R | !R` per side. Never answers inequivalent.
pub fn struct_cong(p: &Agent, q: &Agent) -> Verdict {
    let np = struct_normal_form(p);
    let nq = struct_normal_form(q);
    if np == nq {
        return Verdict::Equivalent;
    }
    let left = unfoldings(&np, 2);
    let right = unfoldings(&nq, 2);
    if left.iter().any(|l| right.contains(l)) {
        Verdict::Equivalent
    } else {
        Verdict::Unknown(UnknownReason::NormalizerIncomplete)
    }
}

/// Normal forms reachable with at most `budget` unfoldings.
fn unfoldings(p: &Agent, budget: usize) -> BTreeSet<Agent> {
    let mut all = BTreeSet::from([p.clone()]);
    let mut frontier = vec![p.clone()];
    for _ in 0..budget {
        let mut next = Vec::new();
        for q in &frontier {
            for r in unfold_once(q) {
                let r = struct_normal_form(&r);
                if all.insert(r.clone()) {
                    next.push(r);
                }
            }
        }
        frontier = next;
    }
    all
}

/// Every agent obtained by rewriting one occurrence of `!R` to `R | !R`.
fn unfold_once(p: &Agent) -> Vec<Agent> {
    use Agent::*;
    let wrap = |inner: Vec<Agent>, f: &dyn Fn(Agent) -> Agent| inner.into_iter().map(f).collect();
    match p {
        Nil => Vec::new(),
        Bang(q) => {
            let mut out = vec![Agent::par((**q).clone(), p.clone())];
            out.extend(unfold_once(q).into_iter().map(Agent::bang));
            out
        }
        Tau(q) => wrap(unfold_once(q), &Agent::tau),
        Input(a, x, q) => wrap(unfold_once(q), &|r| Agent::input(*a, *x, r)),
        Output(a, b, q) => wrap(unfold_once(q), &|r| Agent::output(*a, *b, r)),
        Match(a, b, q) => wrap(unfold_once(q), &|r| Agent::matching(*a, *b, r)),
        Mismatch(a, b, q) => wrap(unfold_once(q), &|r| Agent::mismatch(*a, *b, r)),
        Res(x, q) => wrap(unfold_once(q), &|r| Agent::res(*x, r)),
        Sum(l, r) => {
            let mut out: Vec<Agent> = wrap(unfold_once(l), &|n| Agent::sum(n, (**r).clone()));
            out.extend(unfold_once(r).into_iter().map(|n| Agent::sum((**l).clone(), n)));
            out
        }
        Par(l, r) => {
            let mut out: Vec<Agent> = wrap(unfold_once(l), &|n| Agent::par(n, (**r).clone()));
            out.extend(unfold_once(r).into_iter().map(|n| Agent::par((**l).clone(), n)));
            out
        }
    }
}

/// Renames every binder to a distinct fresh atom.
fn distinct_binders(p: &Agent) -> Agent {
    let mut avoid = p.all_names();
    rename_all(p, &mut avoid)
}

fn rename_all(p: &Agent, avoid: &mut NameSet) -> Agent {
    use Agent::*;
    let fresh = |avoid: &mut NameSet| {
        let z = fresh_name(avoid, Some(Name::new("#u")));
        avoid.insert(z);
        z
    };
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(rename_all(q, avoid)),
        Bang(q) => Agent::bang(rename_all(q, avoid)),
        Output(a, b, q) => Agent::output(*a, *b, rename_all(q, avoid)),
        Match(a, b, q) => Agent::matching(*a, *b, rename_all(q, avoid)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, rename_all(q, avoid)),
        Sum(l, r) => {
            let l = rename_all(l, avoid);
            Agent::sum(l, rename_all(r, avoid))
        }
        Par(l, r) => {
            let l = rename_all(l, avoid);
            Agent::par(l, rename_all(r, avoid))
        }
        Input(a, x, q) => {
            let z = fresh(avoid);
            Agent::input(*a, z, rename_all(&q.swap(Swap::new(*x, z)), avoid))
        }
        Res(x, q) => {
            let z = fresh(avoid);
            Agent::res(z, rename_all(&q.swap(Swap::new(*x, z)), avoid))
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Op {
    Sum,
    Par,
}

fn operands(op: Op, p: &Agent, out: &mut Vec<Agent>) {
    match (op, p) {
        (_, Agent::Nil) => {}
        (Op::Sum, Agent::Sum(l, r)) | (Op::Par, Agent::Par(l, r)) => {
            operands(op, l, out);
            operands(op, r, out);
        }
        _ => out.push(p.clone()),
    }
}

fn build(op: Op, ops: Vec<Agent>) -> Agent {
    let mut ops = ops.into_iter().filter(|p| *p != Agent::Nil);
    let Some(first) = ops.next() else {
        return Agent::Nil;
    };
    ops.fold(first, |acc, p| match op {
        Op::Sum => Agent::sum(acc, p),
        Op::Par => Agent::par(acc, p),
    })
}

fn chain(binders: &[Name], body: Agent) -> Agent {
    binders.iter().rev().fold(body, |acc, x| Agent::res(*x, acc))
}

fn split_chain(p: &Agent) -> (Vec<Name>, &Agent) {
    let mut binders = Vec::new();
    let mut body = p;
    while let Agent::Res(x, q) = body {
        binders.push(*x);
        body = q;
    }
    (binders, body)
}

/// First pass. Binders are distinct, so scopes can be moved without
/// renaming.
fn reshape(p: &Agent) -> Agent {
    use Agent::*;
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(reshape(q)),
        Bang(q) => Agent::bang(reshape(q)),
        Input(a, x, q) => Agent::input(*a, *x, reshape(q)),
        Output(a, b, q) => Agent::output(*a, *b, reshape(q)),
        Match(a, b, q) => Agent::matching(*a, *b, reshape(q)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, reshape(q)),
        Sum(..) | Par(..) => {
            let op = if matches!(p, Sum(..)) { Op::Sum } else { Op::Par };
            let mut raw = Vec::new();
            operands(op, p, &mut raw);
            let mut ops = Vec::new();
            for q in raw {
                operands(op, &reshape(&q), &mut ops);
            }
            build(op, ops)
        }
        Res(..) => {
            let (binders, body) = split_chain(p);
            restrict(binders, reshape(body))
        }
    }
}

/// `(ν binders)body` for a reshaped body, with the binders pushed in.
fn restrict(mut binders: Vec<Name>, body: Agent) -> Agent {
    let (inner, body) = split_chain(&body);
    binders.extend(inner);
    let body = body.clone();
    let fns = free_names(&body);
    binders.retain(|x| fns.contains(x));
    if binders.is_empty() {
        return body;
    }
    match &body {
        Agent::Sum(..) => restrict_group(Op::Sum, binders, &body),
        Agent::Par(..) => restrict_group(Op::Par, binders, &body),
        Agent::Match(u, v, q) | Agent::Mismatch(u, v, q) => {
            let (outer, inner): (Vec<Name>, Vec<Name>) =
                binders.into_iter().partition(|x| x == u || x == v);
            let q = restrict(inner, (**q).clone());
            let guarded = if matches!(body, Agent::Match(..)) {
                Agent::matching(*u, *v, q)
            } else {
                Agent::mismatch(*u, *v, q)
            };
            chain(&outer, guarded)
        }
        _ => chain(&binders, body),
    }
}

/// Operands of `op` are grouped by the binders they share; each group gets
/// its own restriction and operands using none of the binders stay outside.
fn restrict_group(op: Op, mut binders: Vec<Name>, body: &Agent) -> Agent {
    let mut raw = Vec::new();
    operands(op, body, &mut raw);
    let mut ops = Vec::new();
    for q in raw {
        let (inner, q) = split_chain(&q);
        binders.extend(inner);
        operands(op, q, &mut ops);
    }
    let fns: Vec<NameSet> = ops.iter().map(free_names).collect();

    // union-find over operand indices
    let mut parent: Vec<usize> = (0..ops.len()).collect();
    fn root(parent: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for x in &binders {
        let users: Vec<usize> = (0..ops.len()).filter(|&i| fns[i].contains(x)).collect();
        for w in users.windows(2) {
            let (a, b) = (root(&mut parent, w[0]), root(&mut parent, w[1]));
            parent[a] = b;
        }
    }

    let mut out = Vec::new();
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..ops.len() {
        if binders.iter().any(|x| fns[i].contains(x)) {
            let r = root(&mut parent, i);
            match groups.iter_mut().find(|(g, _)| *g == r) {
                Some((_, members)) => members.push(i),
                None => groups.push((r, vec![i])),
            }
        } else {
            out.push(ops[i].clone());
        }
    }
    for (_, members) in groups {
        let used: Vec<Name> = binders
            .iter()
            .copied()
            .filter(|x| members.iter().any(|&i| fns[i].contains(x)))
            .collect();
        if let [only] = members[..] {
            out.push(restrict(used, ops[only].clone()));
        } else {
            let group = build(op, members.iter().map(|&i| ops[i].clone()).collect());
            out.push(chain(&used, group));
        }
    }
    let mut flat = Vec::new();
    for q in out {
        operands(op, &q, &mut flat);
    }
    build(op, flat)
}

fn level_name(depth: usize) -> Name {
    Name::new(&format!("#n{depth}"))
}

/// Second pass: binders renamed by depth, operands sorted, chain order
/// chosen as the least candidate.
fn order(p: &Agent, depth: usize) -> Agent {
    use Agent::*;
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(order(q, depth)),
        Bang(q) => Agent::bang(order(q, depth)),
        Output(a, b, q) => Agent::output(*a, *b, order(q, depth)),
        Match(a, b, q) => Agent::matching(*a, *b, order(q, depth)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, order(q, depth)),
        Input(a, x, q) => {
            let y = level_name(depth);
            Agent::input(*a, y, order(&q.swap(Swap::new(*x, y)), depth + 1))
        }
        Sum(..) | Par(..) => {
            let op = if matches!(p, Sum(..)) { Op::Sum } else { Op::Par };
            let mut ops = Vec::new();
            operands(op, p, &mut ops);
            let mut ops: Vec<Agent> = ops.iter().map(|q| order(q, depth)).collect();
            ops.sort();
            build(op, ops)
        }
        Res(..) => {
            let (binders, body) = split_chain(p);
            let k = binders.len();
            let targets: Vec<Name> = (0..k).map(|i| level_name(depth + i)).collect();
            let candidate = |perm: &[Name]| {
                let mut body = body.clone();
                for (x, y) in perm.iter().zip(&targets) {
                    body = body.swap(Swap::new(*x, *y));
                }
                chain(&targets, order(&body, depth + k))
            };
            if k > MAX_PERMUTED_CHAIN {
                return candidate(&binders);
            }
            let mut best: Option<Agent> = None;
            for perm in permutations(&binders) {
                let c = candidate(&perm);
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
            best.unwrap_or(Nil)
        }
    }
}

fn permutations(xs: &[Name]) -> Vec<Vec<Name>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let x = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, x);
            out.push(tail);
        }
    }
    out
}

/// Cheap rewriting with `P | 0 = P`, `P + 0 = P` and `(νx)P = P` for
/// `x ♯ P`.
pub fn prune(p: &Agent) -> Agent {
    use Agent::*;
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(prune(q)),
        Bang(q) => Agent::bang(prune(q)),
        Input(a, x, q) => Agent::input(*a, *x, prune(q)),
        Output(a, b, q) => Agent::output(*a, *b, prune(q)),
        Match(a, b, q) => Agent::matching(*a, *b, prune(q)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, prune(q)),
        Sum(l, r) => match (prune(l), prune(r)) {
            (Nil, q) | (q, Nil) => q,
            (l, r) => Agent::sum(l, r),
        },
        Par(l, r) => match (prune(l), prune(r)) {
            (Nil, q) | (q, Nil) => q,
            (l, r) => Agent::par(l, r),
        },
        Res(x, q) => {
            let q = prune(q);
            if free_names(&q).contains(x) {
                Agent::res(*x, q)
            } else {
                q
            }
        }
    }
}

/// Normal form followed by absorbing `R | !R` into `!R` wherever both are
/// operands of the same `|`.
pub fn structural_reduce(p: &Agent) -> Agent {
    let n = struct_normal_form(p);
    let a = absorb(&n);
    if a == n {
        n
    } else {
        struct_normal_form(&a)
    }
}

fn absorb(p: &Agent) -> Agent {
    use Agent::*;
    match p {
        Nil => Nil,
        Tau(q) => Agent::tau(absorb(q)),
        Bang(q) => Agent::bang(absorb(q)),
        Input(a, x, q) => Agent::input(*a, *x, absorb(q)),
        Output(a, b, q) => Agent::output(*a, *b, absorb(q)),
        Match(a, b, q) => Agent::matching(*a, *b, absorb(q)),
        Mismatch(a, b, q) => Agent::mismatch(*a, *b, absorb(q)),
        Res(x, q) => Agent::res(*x, absorb(q)),
        Sum(l, r) => Agent::sum(absorb(l), absorb(r)),
        Par(..) => {
            let mut ops = Vec::new();
            operands(Op::Par, p, &mut ops);
            let ops: Vec<Agent> = ops.iter().map(absorb).collect();
            let replicated: Vec<&Agent> = ops
                .iter()
                .filter_map(|q| match q {
                    Bang(r) => Some(&**r),
                    _ => None,
                })
                .collect();
            let kept: Vec<Agent> = ops
                .iter()
                .filter(|q| !replicated.iter().any(|r| alpha_eq(q, r)))
                .cloned()
                .collect();
            build(Op::Par, kept)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_agent;

    fn p(src: &str) -> Agent {
        parse_agent(src).unwrap()
    }

    fn same_nf(a: &str, b: &str) -> bool {
        struct_normal_form(&p(a)) == struct_normal_form(&p(b))
    }

    #[test]
    fn units_and_empty_scopes() {
        assert_eq!(struct_normal_form(&p("(^x)0")), Agent::Nil);
        assert!(alpha_eq(&struct_normal_form(&p("0 | a!b.0")), &p("a!b.0")));
        assert!(same_nf("a!b.0 + 0", "a!b.0"));
    }

    #[test]
    fn scope_extension() {
        assert!(alpha_eq(
            &struct_normal_form(&p("(^x)(a!a.0 | x!b.0)")),
            &struct_normal_form(&p("a!a.0 | (^x)x!b.0"))
        ));
        assert!(same_nf("(^x)(a!a.0 + x!b.0)", "a!a.0 + (^x)x!b.0"));
        assert!(same_nf("(^x)[a=b]x!b.0", "[a=b](^x)x!b.0"));
        assert!(same_nf("(^x)[a!=b]x!b.0", "[a!=b](^x)x!b.0"));
        assert!(same_nf("(^x)(^y)x!y.0", "(^y)(^x)x!y.0"));
        assert!(same_nf("(^x)(^y)(x!y.0 | y!x.0)", "(^y)(^x)(y!x.0 | x!y.0)"));
        assert!(same_nf("(^x)((^y)x!y.0 | x(z).0)", "(^y)(^x)(x(z).0 | x!y.0)"));
        assert!(same_nf("(^x)(^y)(x!a.0 + y!a.0)", "(^x)x!a.0 + (^y)y!a.0"));
    }

    #[test]
    fn monoid_laws() {
        assert!(same_nf("(a!b.0 | b!a.0) | c!c.0", "a!b.0 | (b!a.0 | c!c.0)"));
        assert!(same_nf("a!b.0 | b!a.0", "b!a.0 | a!b.0"));
        assert!(same_nf("a!b.0 + b!a.0", "b!a.0 + a!b.0"));
        assert!(same_nf("a(x).(x!b.0 | c!c.0)", "a(y).(c!c.0 | y!b.0)"));
        assert!(!same_nf("a!b.0", "b!a.0"));
        assert!(!same_nf("(^x)(^y)x!y.0", "(^x)(^y)(x!y.0 | 0 | y!x.0)"));
    }

    #[test]
    fn binder_names_do_not_affect_order() {
        assert!(same_nf("c(q).(q!a.0 | d!d.0)", "c(e).(e!a.0 | d!d.0)"));
        assert!(same_nf(
            "(^p)(^q)a(z).(q!z.0 | p!z.0)",
            "(^x)(^y)a(z).(x!z.0 | y!z.0)"
        ));
    }

    #[test]
    fn congruence_verdicts() {
        assert_eq!(
            struct_cong(&p("(a!b.0 | b!a.0) | c!c.0"), &p("a!b.0 | (b!a.0 | c!c.0)")),
            Verdict::Equivalent
        );
        assert_eq!(struct_cong(&p("!tau.0"), &p("tau.0 | !tau.0")), Verdict::Equivalent);
        assert_eq!(
            struct_cong(&p("a!b.0"), &p("b!a.0")),
            Verdict::Unknown(UnknownReason::NormalizerIncomplete)
        );
    }

    #[test]
    fn reductions() {
        assert_eq!(prune(&p("(0 | (^x)a!b.0) + 0")), p("a!b.0"));
        assert!(alpha_eq(&structural_reduce(&p("tau.0 | !tau.0")), &p("!tau.0")));
    }
}
