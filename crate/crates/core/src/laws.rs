//! The structural congruence laws and the inclusions between the
//! equivalences, checked on seeded random instances.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::equivalence::{
    check_with, relate_with, struct_cong, CheckConfig, EquivKind, StateReduction, Verdict,
};
use crate::generate::Generator;
use crate::nominal::{fresh_name, Name, NameSet, Nominal, Swap};
use crate::parser::print_agent;
use crate::semantics::{Semantics, Standard};
use crate::syntax::{free_names, Agent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    Alpha,
    ParComm,
    ParAssoc,
    ParUnit,
    SumComm,
    SumAssoc,
    SumUnit,
    Unfold,
    ResNil,
    ResPar,
    ResSum,
    ResMatch,
    ResMismatch,
    ResRes,
}

impl Law {
    pub const ALL: [Law; 14] = [
        Law::Alpha,
        Law::ParComm,
        Law::ParAssoc,
        Law::ParUnit,
        Law::SumComm,
        Law::SumAssoc,
        Law::SumUnit,
        Law::Unfold,
        Law::ResNil,
        Law::ResPar,
        Law::ResSum,
        Law::ResMatch,
        Law::ResMismatch,
        Law::ResRes,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Alpha => "alpha",
            Law::ParComm => "par-comm",
            Law::ParAssoc => "par-assoc",
            Law::ParUnit => "par-unit",
            Law::SumComm => "sum-comm",
            Law::SumAssoc => "sum-assoc",
            Law::SumUnit => "sum-unit",
            Law::Unfold => "unfold",
            Law::ResNil => "res-nil",
            Law::ResPar => "res-par",
            Law::ResSum => "res-sum",
            Law::ResMatch => "res-match",
            Law::ResMismatch => "res-mismatch",
            Law::ResRes => "res-res",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Law::Alpha => "P ≡ P' for alpha-variants",
            Law::ParComm => "P | Q ≡ Q | P",
            Law::ParAssoc => "(P | Q) | R ≡ P | (Q | R)",
            Law::ParUnit => "P | 0 ≡ P",
            Law::SumComm => "P + Q ≡ Q + P",
            Law::SumAssoc => "(P + Q) + R ≡ P + (Q + R)",
            Law::SumUnit => "P + 0 ≡ P",
            Law::Unfold => "!P ≡ P | !P",
            Law::ResNil => "(^x)0 ≡ 0",
            Law::ResPar => "(^x)(P | Q) ≡ P | (^x)Q if x fresh for P",
            Law::ResSum => "(^x)(P + Q) ≡ P + (^x)Q if x fresh for P",
            Law::ResMatch => "(^x)[u=v]P ≡ [u=v](^x)P if x not in {u, v}",
            Law::ResMismatch => "(^x)[u!=v]P ≡ [u!=v](^x)P if x not in {u, v}",
            Law::ResRes => "(^x)(^y)P ≡ (^y)(^x)P",
        }
    }

    /// Both sides of the law over freshly generated sub-agents of at most
    /// `size` constructors, half the time inside a random context.
    pub fn instance(self, g: &mut Generator, size: usize) -> (Agent, Agent) {
        let (l, r) = self.bare_instance(g, size);
        if g.rng().gen_bool(0.5) {
            // the same context on both sides
            let saved = g.rng().clone();
            let l = g.context(l, size);
            *g.rng() = saved;
            let r = g.context(r, size);
            return (l, r);
        }
        (l, r)
    }

    fn bare_instance(self, g: &mut Generator, size: usize) -> (Agent, Agent) {
        use Agent as A;
        let p = g.agent(size);
        match self {
            Law::Alpha => {
                let q = alpha_variant(&p);
                (p, q)
            }
            Law::ParComm => {
                let q = g.agent(size);
                (A::par(p.clone(), q.clone()), A::par(q, p))
            }
            Law::ParAssoc => {
                let (q, r) = (g.agent(size), g.agent(size));
                (
                    A::par(A::par(p.clone(), q.clone()), r.clone()),
                    A::par(p, A::par(q, r)),
                )
            }
            Law::ParUnit => (A::par(p.clone(), A::Nil), p),
            Law::SumComm => {
                let q = g.agent(size);
                (A::sum(p.clone(), q.clone()), A::sum(q, p))
            }
            Law::SumAssoc => {
                let (q, r) = (g.agent(size), g.agent(size));
                (
                    A::sum(A::sum(p.clone(), q.clone()), r.clone()),
                    A::sum(p, A::sum(q, r)),
                )
            }
            Law::SumUnit => (A::sum(p.clone(), A::Nil), p),
            Law::Unfold => {
                let p = g.agent_without_replication(size);
                (A::bang(p.clone()), A::par(p.clone(), A::bang(p)))
            }
            Law::ResNil => {
                let x = g.binder_avoiding(&NameSet::new());
                (A::res(x, A::Nil), A::Nil)
            }
            Law::ResPar | Law::ResSum => {
                let x = g.binder_avoiding(&free_names(&p));
                let q = g.agent_in(size, &[x]);
                let op = if self == Law::ResPar { A::par } else { A::sum };
                (A::res(x, op(p.clone(), q.clone())), op(p, A::res(x, q)))
            }
            Law::ResMatch | Law::ResMismatch => {
                let u = g.name(&[]);
                let v = if g.rng().gen_bool(0.5) { u } else { g.name(&[]) };
                let x = g.binder_avoiding(&NameSet::from([u, v]));
                let body = g.agent_in(size, &[x]);
                let guard = if self == Law::ResMatch {
                    A::matching
                } else {
                    A::mismatch
                };
                (A::res(x, guard(u, v, body.clone())), guard(u, v, A::res(x, body)))
            }
            Law::ResRes => {
                let x = g.binder_avoiding(&NameSet::new());
                let y = g.binder_avoiding(&NameSet::from([x]));
                let body = g.agent_in(size, &[x, y]);
                (
                    A::res(x, A::res(y, body.clone())),
                    A::res(y, A::res(x, body)),
                )
            }
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `p` with every binder renamed to a name it does not yet use.
pub fn alpha_variant(p: &Agent) -> Agent {
    let mut used = p.all_names();
    rename(p, &mut used)
}

fn rename(p: &Agent, used: &mut NameSet) -> Agent {
    use Agent::*;
    let under = |x: Name, body: &Agent, used: &mut NameSet| {
        let z = fresh_name(used, Some(x));
        used.insert(z);
        (z, Box::new(rename(&body.swap(Swap::new(x, z)), used)))
    };
    match p {
        Nil => Nil,
        Tau(q) => Tau(Box::new(rename(q, used))),
        Output(a, b, q) => Output(*a, *b, Box::new(rename(q, used))),
        Match(a, b, q) => Match(*a, *b, Box::new(rename(q, used))),
        Mismatch(a, b, q) => Mismatch(*a, *b, Box::new(rename(q, used))),
        Bang(q) => Bang(Box::new(rename(q, used))),
        Sum(l, r) => Sum(Box::new(rename(l, used)), Box::new(rename(r, used))),
        Par(l, r) => Par(Box::new(rename(l, used)), Box::new(rename(r, used))),
        Input(a, x, q) => {
            let (z, body) = under(*x, q, used);
            Input(*a, z, body)
        }
        Res(x, q) => {
            let (z, body) = under(*x, q, used);
            Res(z, body)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub left: String,
    pub right: String,
    pub reason: String,
}

/// Outcome of one law or one inclusion over all its instances.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    pub statement: String,
    pub instances: usize,
    pub passed: usize,
    /// Instances where some check hit an exploration limit.
    pub unknown: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
}

impl Outcome {
    fn new(name: String, statement: String) -> Self {
        Outcome {
            name,
            statement,
            instances: 0,
            passed: 0,
            unknown: 0,
            failure: None,
        }
    }

    fn fail(&mut self, l: &Agent, r: &Agent, reason: String) {
        self.failure.get_or_insert_with(|| Failure {
            left: print_agent(l),
            right: print_agent(r),
            reason,
        });
    }

    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawsReport {
    pub seed: u64,
    pub count: usize,
    pub size: usize,
    pub laws: Vec<Outcome>,
    pub inclusions: Vec<Outcome>,
}

impl LawsReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().chain(&self.inclusions).all(Outcome::ok)
    }
}

impl fmt::Display for LawsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {} count {} size {}", self.seed, self.count, self.size)?;
        for o in self.laws.iter().chain(&self.inclusions) {
            let mark = if o.ok() { "pass" } else { "FAIL" };
            write!(
                f,
                "{mark} {:<14} {}/{} ({} unknown)  {}",
                o.name, o.passed, o.instances, o.unknown, o.statement
            )?;
            if let Some(fl) = &o.failure {
                write!(f, "\n     {}  vs  {}\n     {}", fl.left, fl.right, fl.reason.replace('\n', "\n     "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

pub fn laws_suite(seed: u64, count: usize, size: usize, cfg: &CheckConfig) -> LawsReport {
    laws_suite_with(&Standard, seed, count, size, cfg)
}

/// Each law is checked for structural congruence and strong late
/// bisimilarity. States are only pruned, not normalized, while checking
/// the laws, so the second check does not lean on the first.
pub fn laws_suite_with(
    sem: &dyn Semantics,
    seed: u64,
    count: usize,
    size: usize,
    cfg: &CheckConfig,
) -> LawsReport {
    let mut g = Generator::new(seed);
    let law_cfg = CheckConfig {
        reduction: StateReduction::Prune,
        ..cfg.clone()
    };
    let mut laws = Vec::new();
    for law in Law::ALL {
        let mut o = Outcome::new(law.name().to_string(), law.statement().to_string());
        for _ in 0..count {
            let (l, r) = law.instance(&mut g, size);
            o.instances += 1;
            let s = struct_cong(&l, &r);
            if !s.is_equivalent() {
                o.fail(&l, &r, format!("structural congruence: {}", describe(&s)));
                continue;
            }
            match check_with(sem, &l, &r, EquivKind::StrongLate, &law_cfg).0 {
                Verdict::Equivalent => o.passed += 1,
                Verdict::Unknown(_) => o.unknown += 1,
                v => o.fail(&l, &r, format!("strong late: {}", describe(&v))),
            }
        }
        laws.push(o);
    }
    let mut inclusions: Vec<Outcome> = Vec::new();
    for _ in 0..count {
        let (l, r) = g.related_pair(size);
        let rel = relate_with(sem, &l, &r, cfg);
        for (i, (strong, weak, vs, vw)) in rel.implications().into_iter().enumerate() {
            if inclusions.len() <= i {
                inclusions.push(Outcome::new(
                    format!("{strong} => {weak}"),
                    format!("P {strong} Q implies P {weak} Q"),
                ));
            }
            let o = &mut inclusions[i];
            if !vs.is_equivalent() {
                continue;
            }
            o.instances += 1;
            match vw {
                Verdict::Equivalent => o.passed += 1,
                Verdict::Unknown(_) => o.unknown += 1,
                v => o.fail(&l, &r, describe(v)),
            }
        }
    }
    LawsReport {
        seed,
        count,
        size,
        laws,
        inclusions,
    }
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::Equivalent => "equivalent".to_string(),
        Verdict::Inequivalent(w) => format!("inequivalent\n{w}"),
        Verdict::Unknown(r) => format!("unknown: {r}"),
    }
}
