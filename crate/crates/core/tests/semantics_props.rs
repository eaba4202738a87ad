mod common;

use std::collections::BTreeSet;

use picalc::nominal::{apply_perm, Nominal};
use picalc::semantics::{
    early_input_names, early_transitions, late_transitions, EarlyAction, EarlyResidual,
    FreeAction, Residual, Subject,
};
use picalc::syntax::{canonicalize, canonicalize_under, free_names, substitute};
use picalc::{Agent, Name, NameSet};
use proptest::prelude::*;

use common::oracle;

fn late_keys(p: &Agent, avoid: &NameSet) -> BTreeSet<String> {
    late_transitions(p, avoid).iter().map(|r| format!("{:?}", r.key())).collect()
}

fn early_keys(p: &Agent, avoid: &NameSet, inputs: &NameSet) -> BTreeSet<String> {
    early_transitions(p, avoid, inputs)
        .iter()
        .map(|r| format!("{:?}", r.key()))
        .collect()
}

fn avoid() -> NameSet {
    ["c", "y", "q"].map(Name::new).into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn late_matches_the_oracle(seed in any::<u64>()) {
        let p = common::finite_agent(seed, 6);
        prop_assert_eq!(oracle::library_keys(&p), oracle::late_keys(&p), "{}", p);
    }
}

proptest! {
    #[test]
    fn late_is_equivariant(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        let pi = common::permutation(seed);
        let moved: BTreeSet<String> = late_transitions(&p, &avoid())
            .iter()
            .map(|r| format!("{:?}", apply_perm(&pi, r).key()))
            .collect();
        prop_assert_eq!(late_keys(&apply_perm(&pi, &p), &apply_perm(&pi, &avoid())), moved);
    }

    #[test]
    fn early_is_equivariant(seed in any::<u64>()) {
        let p = common::agent(seed, 7);
        let pi = common::permutation(seed);
        let inputs: NameSet = [Name::new("d")].into();
        let names = early_input_names(&p, &avoid(), &inputs);
        let moved: BTreeSet<String> = early_transitions(&p, &avoid(), &names)
            .iter()
            .map(|r| format!("{:?}", apply_perm(&pi, r).key()))
            .collect();
        let image = early_keys(&apply_perm(&pi, &p), &apply_perm(&pi, &avoid()), &apply_perm(&pi, &names));
        prop_assert_eq!(image, moved);
    }

    #[test]
    fn bound_names_are_fresh(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        let mut ctx = avoid();
        ctx.extend(free_names(&p));
        for r in late_transitions(&p, &avoid()) {
            if let Some(x) = r.binder() {
                prop_assert!(!ctx.contains(&x), "{:?}", r);
            }
        }
        for r in early_transitions(&p, &avoid(), &NameSet::new()) {
            if let EarlyResidual::Bound(_, x, _) = r {
                prop_assert!(!ctx.contains(&x));
            }
        }
    }

    #[test]
    fn tau_and_outputs_agree_across_systems(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        let late: BTreeSet<String> = late_transitions(&p, &NameSet::new())
            .iter()
            .filter(|r| !matches!(r, Residual::Bound(Subject::Input(_), _, _)))
            .map(|r| match r {
                Residual::Free(act, d) => format!("{act:?} {:?}", canonicalize(d)),
                Residual::Bound(s, x, d) => format!("bo {} {:?}", s.chan(), canonicalize_under(&[*x], d)),
            })
            .collect();
        let early: BTreeSet<String> = early_transitions(&p, &NameSet::new(), &NameSet::new())
            .iter()
            .filter_map(|r| match r {
                EarlyResidual::Free(EarlyAction::Input(..), _) => None,
                EarlyResidual::Free(EarlyAction::Tau, d) => {
                    Some(format!("{:?} {:?}", FreeAction::Tau, canonicalize(d)))
                }
                EarlyResidual::Free(EarlyAction::Output(a, b), d) => {
                    Some(format!("{:?} {:?}", FreeAction::Output(*a, *b), canonicalize(d)))
                }
                EarlyResidual::Bound(a, x, d) => {
                    Some(format!("bo {a} {:?}", canonicalize_under(&[*x], d)))
                }
            })
            .collect();
        prop_assert_eq!(late, early);
    }

    #[test]
    fn inputs_agree_across_systems(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        let inputs: NameSet = [Name::new("d")].into();
        let names = early_input_names(&p, &NameSet::new(), &inputs);
        let mut from_late = BTreeSet::new();
        for r in late_transitions(&p, &NameSet::new()) {
            if let Residual::Bound(Subject::Input(a), x, d) = r {
                for &u in &names {
                    from_late.insert((a, u, canonicalize(&substitute(&d, u, x))));
                }
            }
        }
        let early: BTreeSet<_> = early_transitions(&p, &NameSet::new(), &inputs)
            .into_iter()
            .filter_map(|r| match r {
                EarlyResidual::Free(EarlyAction::Input(a, u), d) => Some((a, u, canonicalize(&d))),
                _ => None,
            })
            .collect();
        prop_assert_eq!(from_late, early);
    }

    #[test]
    fn residual_support_is_free_names(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        for r in late_transitions(&p, &NameSet::new()) {
            prop_assert!(r.support().is_subset(&free_names(&p)), "{:?}", r);
        }
    }
}

#[test]
fn oracle_sees_scope_extrusion() {
    let p = picalc::parse_agent("(^b)(a!b.0 | a(x).x!c.0) | (^d)a!d.0").unwrap();
    let keys = oracle::late_keys(&p);
    assert_eq!(keys.len(), 5, "{keys:?}");
    assert!(keys.iter().any(|k| k.starts_with("tau . new.")));
    assert!(keys.iter().any(|k| k.starts_with("bout a")));
    assert_eq!(keys, oracle::library_keys(&p));
}
