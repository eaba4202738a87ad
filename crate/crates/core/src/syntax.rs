//! Agents of the monadic pi-calculus, kept in nominal style: binders carry
//! concrete names and equality up to alpha lives in [`alpha_eq`] and
//! [`canonicalize`].

use std::fmt;

use crate::nominal::{fresh_name, swap_name, Name, NameSet, Nominal, Swap};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Agent {
    Nil,
    Tau(Box<Agent>),
    /// `chan(bind).cont`; `bind` scopes over `cont`.
    Input(Name, Name, Box<Agent>),
    /// `chan!msg.cont`
    Output(Name, Name, Box<Agent>),
    Match(Name, Name, Box<Agent>),
    Mismatch(Name, Name, Box<Agent>),
    Sum(Box<Agent>, Box<Agent>),
    Par(Box<Agent>, Box<Agent>),
    /// `(^bind)cont`
    Res(Name, Box<Agent>),
    Bang(Box<Agent>),
}

use Agent::*;

impl Agent {
    pub fn nil() -> Agent {
        Nil
    }

    pub fn tau(cont: Agent) -> Agent {
        Tau(Box::new(cont))
    }

    pub fn input(chan: impl Into<Name>, bind: impl Into<Name>, cont: Agent) -> Agent {
        Input(chan.into(), bind.into(), Box::new(cont))
    }

    pub fn output(chan: impl Into<Name>, msg: impl Into<Name>, cont: Agent) -> Agent {
        Output(chan.into(), msg.into(), Box::new(cont))
    }

    pub fn matching(l: impl Into<Name>, r: impl Into<Name>, cont: Agent) -> Agent {
        Match(l.into(), r.into(), Box::new(cont))
    }

    pub fn mismatch(l: impl Into<Name>, r: impl Into<Name>, cont: Agent) -> Agent {
        Mismatch(l.into(), r.into(), Box::new(cont))
    }

    pub fn sum(l: Agent, r: Agent) -> Agent {
        Sum(Box::new(l), Box::new(r))
    }

    pub fn par(l: Agent, r: Agent) -> Agent {
        Par(Box::new(l), Box::new(r))
    }

    pub fn res(bind: impl Into<Name>, cont: Agent) -> Agent {
        Res(bind.into(), Box::new(cont))
    }

    pub fn bang(cont: Agent) -> Agent {
        Bang(Box::new(cont))
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Nil => 1,
            Tau(p) | Input(_, _, p) | Output(_, _, p) | Match(_, _, p) | Mismatch(_, _, p) => {
                1 + p.size()
            }
            Res(_, p) | Bang(p) => 1 + p.size(),
            Sum(p, q) | Par(p, q) => 1 + p.size() + q.size(),
        }
    }

    pub fn has_bang(&self) -> bool {
        match self {
            Nil => false,
            Bang(_) => true,
            Tau(p) | Input(_, _, p) | Output(_, _, p) | Match(_, _, p) | Mismatch(_, _, p) => {
                p.has_bang()
            }
            Res(_, p) => p.has_bang(),
            Sum(p, q) | Par(p, q) => p.has_bang() || q.has_bang(),
        }
    }

    /// Every name occurring anywhere, binding occurrences included.
    pub fn all_names(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_all(&mut out);
        out
    }

    fn collect_all(&self, out: &mut NameSet) {
        match self {
            Nil => {}
            Tau(p) | Bang(p) => p.collect_all(out),
            Input(a, b, p) | Output(a, b, p) | Match(a, b, p) | Mismatch(a, b, p) => {
                out.insert(*a);
                out.insert(*b);
                p.collect_all(out);
            }
            Res(x, p) => {
                out.insert(*x);
                p.collect_all(out);
            }
            Sum(p, q) | Par(p, q) => {
                p.collect_all(out);
                q.collect_all(out);
            }
        }
    }

    pub fn free_names(&self) -> NameSet {
        free_names(self)
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::print_agent(self))
    }
}

impl fmt::Debug for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{self}`")
    }
}

pub fn free_names(p: &Agent) -> NameSet {
    let mut out = NameSet::new();
    collect_free(p, &mut Vec::new(), &mut out);
    out
}

fn collect_free(p: &Agent, bound: &mut Vec<Name>, out: &mut NameSet) {
    let mut note = |n: &Name, bound: &Vec<Name>| {
        if !bound.contains(n) {
            out.insert(*n);
        }
    };
    match p {
        Nil => {}
        Tau(p) | Bang(p) => collect_free(p, bound, out),
        Output(a, b, p) | Match(a, b, p) | Mismatch(a, b, p) => {
            note(a, bound);
            note(b, bound);
            collect_free(p, bound, out);
        }
        Input(a, x, p) => {
            note(a, bound);
            bound.push(*x);
            collect_free(p, bound, out);
            bound.pop();
        }
        Res(x, p) => {
            bound.push(*x);
            collect_free(p, bound, out);
            bound.pop();
        }
        Sum(p, q) | Par(p, q) => {
            collect_free(p, bound, out);
            collect_free(q, bound, out);
        }
    }
}

impl Nominal for Agent {
    fn swap(&self, s: Swap) -> Self {
        let sw = |n: &Name| swap_name(s, *n);
        match self {
            Nil => Nil,
            Tau(p) => Tau(Box::new(p.swap(s))),
            Input(a, x, p) => Input(sw(a), sw(x), Box::new(p.swap(s))),
            Output(a, b, p) => Output(sw(a), sw(b), Box::new(p.swap(s))),
            Match(a, b, p) => Match(sw(a), sw(b), Box::new(p.swap(s))),
            Mismatch(a, b, p) => Mismatch(sw(a), sw(b), Box::new(p.swap(s))),
            Sum(p, q) => Sum(Box::new(p.swap(s)), Box::new(q.swap(s))),
            Par(p, q) => Par(Box::new(p.swap(s)), Box::new(q.swap(s))),
            Res(x, p) => Res(sw(x), Box::new(p.swap(s))),
            Bang(p) => Bang(Box::new(p.swap(s))),
        }
    }

    fn support(&self) -> NameSet {
        free_names(self)
    }
}

/// Alpha-equivalence, with each binder compared by
/// `(x = y ∧ T = U) ∨ (x ≠ y ∧ x ♯ U ∧ T = (x y)•U)`.
pub fn alpha_eq(p: &Agent, q: &Agent) -> bool {
    match (p, q) {
        (Nil, Nil) => true,
        (Tau(t), Tau(u)) | (Bang(t), Bang(u)) => alpha_eq(t, u),
        (Output(a, b, t), Output(c, d, u))
        | (Match(a, b, t), Match(c, d, u))
        | (Mismatch(a, b, t), Mismatch(c, d, u)) => a == c && b == d && alpha_eq(t, u),
        (Input(a, x, t), Input(b, y, u)) => a == b && abstraction_eq(*x, t, *y, u),
        (Res(x, t), Res(y, u)) => abstraction_eq(*x, t, *y, u),
        (Sum(p1, p2), Sum(q1, q2)) | (Par(p1, p2), Par(q1, q2)) => {
            alpha_eq(p1, q1) && alpha_eq(p2, q2)
        }
        _ => false,
    }
}

/// Equality of the abstractions `[x]t` and `[y]u`.
pub fn abstraction_eq(x: Name, t: &Agent, y: Name, u: &Agent) -> bool {
    if x == y {
        alpha_eq(t, u)
    } else {
        !free_names(u).contains(&x) && alpha_eq(t, &u.swap(Swap::new(x, y)))
    }
}

/// Representative of the alpha-class of `p`: binders renamed to reserved
/// atoms `#0, #1, …` in left-to-right preorder.
pub fn canonicalize(p: &Agent) -> Agent {
    canonicalize_under(&[], p)
}

/// Canonical form of `p` with `binders` treated as already bound, outermost
/// first. Used for residuals, whose action binder scopes into the derivative.
pub fn canonicalize_under(binders: &[Name], p: &Agent) -> Agent {
    let mut free_reserved = free_names(p)
        .into_iter()
        .filter(|n| !binders.contains(n) && n.is_reserved())
        .peekable();
    // reserved atoms that are free push the numbering past them
    let offset = if free_reserved.peek().is_some() {
        free_reserved
            .filter_map(|n| n.base()[1..].parse::<usize>().ok())
            .max()
            .map_or(0, |m| m + 1)
    } else {
        0
    };
    let mut canon = Canonicalizer {
        env: Vec::new(),
        next: offset,
    };
    for b in binders {
        let c = Name::canonical(canon.next);
        canon.next += 1;
        canon.env.push((*b, c));
    }
    canon.agent(p)
}

struct Canonicalizer {
    env: Vec<(Name, Name)>,
    next: usize,
}

impl Canonicalizer {
    fn name(&self, n: Name) -> Name {
        self.env
            .iter()
            .rev()
            .find(|(from, _)| *from == n)
            .map_or(n, |(_, to)| *to)
    }

    fn bind<R>(&mut self, x: Name, body: impl FnOnce(&mut Self) -> R) -> (Name, R) {
        let c = Name::canonical(self.next);
        self.next += 1;
        self.env.push((x, c));
        let out = body(self);
        self.env.pop();
        (c, out)
    }

    fn agent(&mut self, p: &Agent) -> Agent {
        match p {
            Nil => Nil,
            Tau(p) => Tau(Box::new(self.agent(p))),
            Bang(p) => Bang(Box::new(self.agent(p))),
            Output(a, b, p) => Output(self.name(*a), self.name(*b), Box::new(self.agent(p))),
            Match(a, b, p) => Match(self.name(*a), self.name(*b), Box::new(self.agent(p))),
            Mismatch(a, b, p) => Mismatch(self.name(*a), self.name(*b), Box::new(self.agent(p))),
            Input(a, x, p) => {
                let a = self.name(*a);
                let (c, body) = self.bind(*x, |s| s.agent(p));
                Input(a, c, Box::new(body))
            }
            Res(x, p) => {
                let (c, body) = self.bind(*x, |s| s.agent(p));
                Res(c, Box::new(body))
            }
            Sum(p, q) => {
                let p = self.agent(p);
                Sum(Box::new(p), Box::new(self.agent(q)))
            }
            Par(p, q) => {
                let p = self.agent(p);
                Par(Box::new(p), Box::new(self.agent(q)))
            }
        }
    }
}

/// `p{new/old}`: capture-avoiding replacement of the free occurrences of `old`.
pub fn substitute(p: &Agent, new: Name, old: Name) -> Agent {
    if new == old {
        return p.clone();
    }
    let s = |n: &Name| if *n == old { new } else { *n };
    match p {
        Nil => Nil,
        Tau(p) => Tau(Box::new(substitute(p, new, old))),
        Bang(p) => Bang(Box::new(substitute(p, new, old))),
        Output(a, b, p) => Output(s(a), s(b), Box::new(substitute(p, new, old))),
        Match(a, b, p) => Match(s(a), s(b), Box::new(substitute(p, new, old))),
        Mismatch(a, b, p) => Mismatch(s(a), s(b), Box::new(substitute(p, new, old))),
        Sum(p, q) => Sum(
            Box::new(substitute(p, new, old)),
            Box::new(substitute(q, new, old)),
        ),
        Par(p, q) => Par(
            Box::new(substitute(p, new, old)),
            Box::new(substitute(q, new, old)),
        ),
        Input(a, x, body) => {
            let (x, body) = subst_under(*x, body, new, old);
            Input(s(a), x, Box::new(body))
        }
        Res(x, body) => {
            let (x, body) = subst_under(*x, body, new, old);
            Res(x, Box::new(body))
        }
    }
}

fn subst_under(x: Name, body: &Agent, new: Name, old: Name) -> (Name, Agent) {
    if x == old {
        // `old` is not free below this binder
        return (x, body.clone());
    }
    if x == new {
        let mut avoid = free_names(body);
        avoid.insert(new);
        avoid.insert(old);
        let z = fresh_name(&avoid, Some(x));
        let renamed = body.swap(Swap::new(x, z));
        return (z, substitute(&renamed, new, old));
    }
    (x, substitute(body, new, old))
}

/// One step `{new/old}` of a substitution chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SubstPair {
    pub new: Name,
    pub old: Name,
}

/// Substitutions applied one after another, left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct SubstChain {
    pub pairs: Vec<SubstPair>,
}

impl SubstChain {
    pub fn new(pairs: impl IntoIterator<Item = (Name, Name)>) -> SubstChain {
        SubstChain {
            pairs: pairs
                .into_iter()
                .map(|(new, old)| SubstPair { new, old })
                .collect(),
        }
    }
}

impl fmt::Display for SubstChain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pairs.is_empty() {
            return f.write_str("{}");
        }
        for pair in &self.pairs {
            write!(f, "{{{}/{}}}", pair.new, pair.old)?;
        }
        Ok(())
    }
}

pub fn apply_chain(p: &Agent, chain: &SubstChain) -> Agent {
    chain
        .pairs
        .iter()
        .fold(p.clone(), |acc, pair| substitute(&acc, pair.new, pair.old))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_agent;

    fn p(src: &str) -> Agent {
        parse_agent(src).unwrap()
    }

    fn names(list: &[&str]) -> NameSet {
        list.iter().map(|s| Name::new(s)).collect()
    }

    #[test]
    fn free_names_examples() {
        assert_eq!(free_names(&p("0")), names(&[]));
        assert_eq!(free_names(&p("a(x).x!b.0")), names(&["a", "b"]));
        assert_eq!(free_names(&p("(^x)(x!y.0 | x(z).0)")), names(&["y"]));
        assert_eq!(free_names(&p("a(x).0 | x!x.0")), names(&["a", "x"]));
    }

    #[test]
    fn alpha_eq_examples() {
        assert!(alpha_eq(&p("a(x).0"), &p("a(y).0")));
        assert!(alpha_eq(&p("(^x)x!a.0"), &p("(^y)y!a.0")));
        assert!(!alpha_eq(&p("(^x)x!y.0"), &p("(^y)y!x.0")));
        assert!(!alpha_eq(&p("a(x).x!b.0"), &p("a(b).b!b.0")));
        assert!(alpha_eq(&p("(^x)(^y)x!y.0"), &p("(^y)(^x)y!x.0")));
    }

    #[test]
    fn canonicalize_examples() {
        assert_eq!(canonicalize(&Nil), Nil);
        assert_eq!(canonicalize(&p("a(x).0")), canonicalize(&p("a(y).0")));
        assert_ne!(
            canonicalize(&p("(^x)(^y)x!y.0")),
            canonicalize(&p("(^x)(^y)y!x.0"))
        );
        let c = canonicalize(&p("(^x)a(y).x!y.0"));
        assert!(alpha_eq(&c, &p("(^x)a(y).x!y.0")));
        assert_eq!(canonicalize(&c), c);
    }

    #[test]
    fn canonicalize_ignores_free_reserved_collisions() {
        let free = Name::canonical(0);
        let left = Agent::res("x", Agent::output("x", free, Nil));
        let right = Agent::res("x", Agent::output(free, "x", Nil));
        assert_ne!(canonicalize(&left), canonicalize(&right));
        assert!(free_names(&canonicalize(&left)).contains(&free));
    }

    #[test]
    fn substitute_examples() {
        let a = Name::new("a");
        let b = Name::new("b");
        let c = Name::new("c");
        let x = Name::new("x");
        assert_eq!(substitute(&p("x!x.0"), a, x), p("a!a.0"));
        assert_eq!(substitute(&p("a(x).x!b.0"), c, x), p("a(x).x!b.0"));
        let captured = substitute(&p("(^b)a!b.0"), b, a);
        assert_eq!(free_names(&captured), names(&["b"]));
        assert!(alpha_eq(&captured, &p("(^b')b!b'.0")));
        assert_eq!(substitute(&p("a!b.0"), a, a), p("a!b.0"));
    }

    #[test]
    fn chains_are_sequential() {
        let x = Name::new("x");
        let y = Name::new("y");
        let chain = SubstChain::new([(Name::new("a"), x), (Name::new("b"), y)]);
        assert_eq!(apply_chain(&p("x!y.0"), &chain), p("a!b.0"));
        let chain = SubstChain::new([(y, x), (Name::new("b"), y)]);
        assert_eq!(apply_chain(&p("x!y.0"), &chain), p("b!b.0"));
        assert_eq!(apply_chain(&p("x!y.0"), &SubstChain::default()), p("x!y.0"));
    }
}
