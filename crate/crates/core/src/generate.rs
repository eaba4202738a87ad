//! Seeded random agents for the law suite and the property tests.
//!
//! Node kinds are drawn with fixed weights: `0` 20%, prefixes 40%, `+` and
//! `|` 25%, restriction 10%, replication 5%. Replication never nests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::laws::Law;
use crate::nominal::{fresh_name, Name, NameSet, Permutation, Swap};
use crate::syntax::Agent;

#[derive(Clone, Debug)]
pub struct GenConfig {
    /// Names that may occur free.
    pub free: Vec<Name>,
    /// Names used for input and restriction binders.
    pub binders: Vec<Name>,
    pub replication: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            free: ["a", "b", "c"].map(Name::new).to_vec(),
            binders: ["x", "y", "z"].map(Name::new).to_vec(),
            replication: true,
        }
    }
}

pub struct Generator {
    rng: ChaCha8Rng,
    cfg: GenConfig,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator::with_config(seed, GenConfig::default())
    }

    pub fn with_config(seed: u64, cfg: GenConfig) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            cfg,
        }
    }

    pub fn config(&self) -> &GenConfig {
        &self.cfg
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// An agent of at most `size` constructors.
    pub fn agent(&mut self, size: usize) -> Agent {
        self.agent_in(size, &[])
    }

    pub fn agent_without_replication(&mut self, size: usize) -> Agent {
        self.gen(size.max(1), &mut Vec::new(), false)
    }

    /// An agent that may also use the names in `scope` as if bound above it.
    pub fn agent_in(&mut self, size: usize, scope: &[Name]) -> Agent {
        let replication = self.cfg.replication;
        self.gen(size.max(1), &mut scope.to_vec(), replication)
    }

    fn gen(&mut self, budget: usize, scope: &mut Vec<Name>, bang_ok: bool) -> Agent {
        if budget <= 1 {
            return Agent::Nil;
        }
        let roll = self.rng.gen_range(0..100);
        match roll {
            0..=19 => Agent::Nil,
            60..=84 if budget >= 3 => {
                let left = self.rng.gen_range(1..budget - 1);
                let l = self.gen(left, scope, bang_ok);
                let r = self.gen(budget - 1 - left, scope, bang_ok);
                if self.rng.gen_bool(0.5) {
                    Agent::sum(l, r)
                } else {
                    Agent::par(l, r)
                }
            }
            85..=94 => {
                let x = self.binder();
                scope.push(x);
                let body = self.gen(budget - 1, scope, bang_ok);
                scope.pop();
                Agent::res(x, body)
            }
            95..=99 if bang_ok => Agent::bang(self.gen(budget - 1, scope, false)),
            _ => self.prefix(budget, scope, bang_ok),
        }
    }

    fn prefix(&mut self, budget: usize, scope: &mut Vec<Name>, bang_ok: bool) -> Agent {
        let kind = self.rng.gen_range(0..10);
        if (2..5).contains(&kind) {
            let a = self.name(scope);
            let x = self.binder();
            scope.push(x);
            let body = self.gen(budget - 1, scope, bang_ok);
            scope.pop();
            return Agent::input(a, x, body);
        }
        let a = self.name(scope);
        let b = self.name(scope);
        let cont = self.gen(budget - 1, scope, bang_ok);
        match kind {
            0 | 1 => Agent::tau(cont),
            5..=7 => Agent::output(a, b, cont),
            8 => Agent::matching(a, b, cont),
            _ => Agent::mismatch(a, b, cont),
        }
    }

    /// A name in scope, bound names favoured.
    pub fn name(&mut self, scope: &[Name]) -> Name {
        if !scope.is_empty() && self.rng.gen_bool(0.5) {
            return *scope.choose(&mut self.rng).expect("nonempty");
        }
        *self.cfg.free.choose(&mut self.rng).expect("free names")
    }

    fn binder(&mut self) -> Name {
        *self.cfg.binders.choose(&mut self.rng).expect("binder names")
    }

    /// A binder name outside `avoid`.
    pub fn binder_avoiding(&mut self, avoid: &NameSet) -> Name {
        let choices: Vec<Name> = self
            .cfg
            .binders
            .iter()
            .copied()
            .filter(|n| !avoid.contains(n))
            .collect();
        match choices.choose(&mut self.rng) {
            Some(&n) => n,
            None => fresh_name(avoid, Some(Name::new("x"))),
        }
    }

    /// A random permutation of the free and binder names plus two outsiders.
    pub fn permutation(&mut self) -> Permutation {
        let mut names: Vec<Name> = self.cfg.free.clone();
        names.extend(self.cfg.binders.iter().copied());
        names.extend(["p", "q"].map(Name::new));
        let n = self.rng.gen_range(1..=4);
        Permutation::from_swaps((0..n).map(|_| {
            let a = *names.choose(&mut self.rng).expect("names");
            let b = *names.choose(&mut self.rng).expect("names");
            Swap::new(a, b)
        }))
    }

    /// Two agents that are often, but not always, related.
    pub fn related_pair(&mut self, size: usize) -> (Agent, Agent) {
        let p = self.agent(size);
        match self.rng.gen_range(0..7) {
            0 => {
                let law = *Law::ALL.choose(&mut self.rng).expect("laws");
                law.instance(self, size)
            }
            1 => (p.clone(), self.agent(size)),
            2 => (p.clone(), Agent::tau(p)),
            3 => (Agent::sum(Agent::tau(p.clone()), p.clone()), Agent::tau(p)),
            4 => {
                let a = self.name(&[]);
                let b = self.name(&[]);
                (
                    Agent::output(a, b, p.clone()),
                    Agent::output(a, b, Agent::tau(p)),
                )
            }
            5 => {
                let q = self.mutate(&p);
                (p, q)
            }
            _ => {
                let q = self.mutate(&p);
                (Agent::tau(p), q)
            }
        }
    }

    /// `p` with one subterm replaced by a small random agent or guarded by
    /// a tau.
    pub fn mutate(&mut self, p: &Agent) -> Agent {
        let target = self.rng.gen_range(0..p.size());
        let mut counter = 0;
        self.replace_at(p, target, &mut counter, &mut Vec::new())
    }

    fn replace_at(&mut self, p: &Agent, target: usize, counter: &mut usize, scope: &mut Vec<Name>) -> Agent {
        let here = *counter;
        *counter += 1;
        if here == target {
            return if self.rng.gen_bool(0.5) {
                Agent::tau(p.clone())
            } else {
                self.gen(3, &mut scope.clone(), false)
            };
        }
        use Agent::*;
        let mut go = |g: &mut Self, q: &Agent, bound: Option<Name>| {
            if let Some(x) = bound {
                scope.push(x);
            }
            let out = g.replace_at(q, target, counter, scope);
            if bound.is_some() {
                scope.pop();
            }
            Box::new(out)
        };
        match p {
            Nil => Nil,
            Tau(q) => Tau(go(self, q, None)),
            Output(a, b, q) => Output(*a, *b, go(self, q, None)),
            Match(a, b, q) => Match(*a, *b, go(self, q, None)),
            Mismatch(a, b, q) => Mismatch(*a, *b, go(self, q, None)),
            Input(a, x, q) => Input(*a, *x, go(self, q, Some(*x))),
            Res(x, q) => Res(*x, go(self, q, Some(*x))),
            Bang(q) => Bang(go(self, q, None)),
            Sum(l, r) => {
                let l = go(self, l, None);
                Sum(l, go(self, r, None))
            }
            Par(l, r) => {
                let l = go(self, l, None);
                Par(l, go(self, r, None))
            }
        }
    }

    /// A one-hole context applied to `p`.
    pub fn context(&mut self, p: Agent, size: usize) -> Agent {
        let a = self.name(&[]);
        let b = self.name(&[]);
        match self.rng.gen_range(0..7) {
            0 => Agent::tau(p),
            1 => Agent::output(a, b, p),
            2 => {
                let x = self.binder();
                Agent::input(a, x, p)
            }
            3 => Agent::par(p, self.agent(size)),
            4 => Agent::sum(self.agent(size), p),
            5 => {
                let x = self.binder();
                Agent::res(x, p)
            }
            _ => Agent::matching(a, a, p),
        }
    }
}
