mod common;

use picalc::equivalence::{
    check, hennessy_classify, relate, struct_cong, CheckConfig, EquivKind, StateReduction, Verdict,
};
use picalc::generate::Generator;
use picalc::laws::{alpha_variant, laws_suite, Law};
use picalc::nominal::apply_perm;
use picalc::{parse_agent, Agent, Name};
use proptest::prelude::*;
use rand::Rng;

fn cfg() -> CheckConfig {
    CheckConfig::default()
}

/// Agents around one base term, so that chains of related agents are common.
fn family(seed: u64) -> Vec<Agent> {
    let mut g = Generator::new(seed);
    let a = g.agent(4);
    let m = g.mutate(&a);
    vec![
        a.clone(),
        Agent::tau(a.clone()),
        Agent::par(a.clone(), Agent::Nil),
        Agent::sum(Agent::Nil, a.clone()),
        alpha_variant(&a),
        Agent::tau(Agent::tau(a.clone())),
        m,
    ]
}

fn pick3(seed: u64) -> (Agent, Agent, Agent) {
    let fam = family(seed);
    let mut g = Generator::new(seed.rotate_left(17));
    let rng = g.rng();
    let mut one = || fam[rng.gen_range(0..fam.len())].clone();
    (one(), one(), one())
}

/// Equivalent under `kind`, per a decided verdict.
fn holds(p: &Agent, q: &Agent, kind: EquivKind) -> Option<bool> {
    check(p, q, kind, &cfg()).decided()
}

const BASE_KINDS: [EquivKind; 6] = [
    EquivKind::StrongLate,
    EquivKind::StrongEarly,
    EquivKind::WeakLate,
    EquivKind::WeakLateCong,
    EquivKind::WeakEarly,
    EquivKind::WeakEarlyCong,
];

/// The operator contexts, with the same random operand for every `p`.
fn contexts(seed: u64, p: &Agent, with_sum: bool, with_bang: bool) -> Vec<Agent> {
    let r = Generator::new(seed).agent(3);
    let mut out = vec![
        Agent::tau(p.clone()),
        Agent::output("a", "b", p.clone()),
        Agent::matching("a", "a", p.clone()),
        Agent::mismatch("a", "b", p.clone()),
        Agent::par(p.clone(), r.clone()),
        Agent::res("a", p.clone()),
    ];
    if with_sum {
        out.push(Agent::sum(p.clone(), r));
    }
    if with_bang {
        out.push(Agent::bang(p.clone()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn verdicts_are_equivalence_relations(seed in any::<u64>()) {
        let (p, q, r) = pick3(seed);
        for kind in BASE_KINDS {
            prop_assert_eq!(holds(&p, &p, kind), Some(true));
            let pq = holds(&p, &q, kind);
            let qp = holds(&q, &p, kind);
            if let (Some(a), Some(b)) = (pq, qp) {
                prop_assert_eq!(a, b, "{} {} {}", kind, p, q);
            }
            if pq == Some(true) && holds(&q, &r, kind) == Some(true) {
                prop_assert_ne!(holds(&p, &r, kind), Some(false), "{} {} {} {}", kind, p, q, r);
            }
        }
    }

    #[test]
    fn verdicts_are_equivariant(seed in any::<u64>()) {
        let (p, q, _) = pick3(seed);
        let pi = common::permutation(seed);
        let (pp, pq) = (apply_perm(&pi, &p), apply_perm(&pi, &q));
        for kind in BASE_KINDS {
            let (a, b) = (holds(&p, &q, kind), holds(&pp, &pq, kind));
            if let (Some(a), Some(b)) = (a, b) {
                prop_assert_eq!(a, b, "{} {} {}", kind, p, q);
            }
        }
    }

    #[test]
    fn strong_late_is_preserved(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (p, q) = g.related_pair(4);
        prop_assume!(holds(&p, &q, EquivKind::StrongLate) == Some(true));
        let (cp, cq) = (contexts(seed, &p, true, true), contexts(seed, &q, true, true));
        for (a, b) in cp.iter().zip(&cq) {
            prop_assert_ne!(holds(a, b, EquivKind::StrongLate), Some(false), "{} vs {}", a, b);
        }
    }

    #[test]
    fn weak_relations_are_preserved(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (p, q) = g.related_pair(4);
        if holds(&p, &q, EquivKind::WeakLate) == Some(true) {
            let (cp, cq) = (contexts(seed, &p, false, true), contexts(seed, &q, false, true));
            for (a, b) in cp.iter().zip(&cq) {
                prop_assert_ne!(holds(a, b, EquivKind::WeakLate), Some(false), "{} vs {}", a, b);
            }
        }
        if holds(&p, &q, EquivKind::WeakLateCong) == Some(true) {
            let (cp, cq) = (contexts(seed, &p, true, true), contexts(seed, &q, true, true));
            for (a, b) in cp.iter().zip(&cq) {
                prop_assert_ne!(holds(a, b, EquivKind::WeakLateCong), Some(false), "{} vs {}", a, b);
            }
        }
    }

    #[test]
    fn restriction_chains(seed in any::<u64>(), len in 1usize..=3) {
        let mut g = Generator::new(seed);
        let (p, q) = g.related_pair(4);
        prop_assume!(holds(&p, &q, EquivKind::StrongLate) == Some(true));
        let chain: Vec<Name> = (0..len).map(|_| g.name(&[])).collect();
        let wrap = |a: &Agent| chain.iter().rev().fold(a.clone(), |acc, x| Agent::res(*x, acc));
        prop_assert_ne!(holds(&wrap(&p), &wrap(&q), EquivKind::StrongLate), Some(false));
    }

    #[test]
    fn hennessy_biconditional(seed in any::<u64>()) {
        let (p, q, _) = pick3(seed);
        prop_assert_ne!(hennessy_classify(&p, &q, &cfg()).holds(), Some(false), "{} vs {}", p, q);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn inclusion_lattice(seed in any::<u64>()) {
        let (p, q) = Generator::new(seed).related_pair(4);
        let rel = relate(&p, &q, &cfg());
        prop_assert!(rel.lattice_violations().is_empty(), "{} vs {}: {:?}", p, q, rel.lattice_violations());
    }

    #[test]
    fn structural_laws_are_bisimilarities(seed in any::<u64>()) {
        let cfg = CheckConfig { reduction: StateReduction::Prune, ..cfg() };
        let report = laws_suite(seed, 2, 4, &cfg);
        prop_assert!(report.passed(), "{}", report);
    }
}

#[test]
fn law_instances_are_congruent() {
    let mut g = Generator::new(5);
    for law in Law::ALL {
        for _ in 0..10 {
            let (l, r) = law.instance(&mut g, 5);
            assert_ne!(struct_cong(&l, &r).decided(), Some(false), "{law}: {l} vs {r}");
        }
    }
}

#[test]
fn input_prefix_breaks_plain_bisimilarity() {
    let p = parse_agent("[x=y]tau.0").unwrap();
    let q = Agent::Nil;
    let cfg = cfg();
    assert!(check(&p, &q, EquivKind::StrongLate, &cfg).is_equivalent());
    let (ip, iq) = (Agent::input("a", "x", p.clone()), Agent::input("a", "x", q.clone()));
    assert!(check(&ip, &iq, EquivKind::StrongLate, &cfg).is_inequivalent());
    assert!(check(&p, &q, EquivKind::StrongLateS, &cfg).is_inequivalent());
    let r = parse_agent("[x=y]tau.0 + [x=y]tau.0").unwrap();
    assert!(check(&p, &r, EquivKind::StrongLateS, &cfg).is_equivalent());
    let (ip, ir) = (Agent::input("a", "x", p), Agent::input("a", "x", r));
    assert!(check(&ip, &ir, EquivKind::StrongLateS, &cfg).is_equivalent());
}

#[test]
fn weak_bisimilarity_is_not_preserved_by_sum() {
    let (p, q) = (parse_agent("tau.0").unwrap(), Agent::Nil);
    let cfg = cfg();
    assert!(check(&p, &q, EquivKind::WeakLate, &cfg).is_equivalent());
    let r = parse_agent("a!b.0").unwrap();
    let v = check(&Agent::sum(p, r.clone()), &Agent::sum(q, r), EquivKind::WeakLate, &cfg);
    assert!(matches!(v, Verdict::Inequivalent(_)));
}
