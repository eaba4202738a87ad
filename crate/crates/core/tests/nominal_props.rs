mod common;

use picalc::nominal::{apply_perm, fresh_name, is_fresh, swap_name, Permutation, Swap};
use picalc::syntax::alpha_eq;
use picalc::{Name, NameSet};
use proptest::prelude::*;

fn name() -> impl Strategy<Value = Name> {
    prop::sample::select(vec!["a", "b", "c", "x", "y", "z", "p", "q"]).prop_map(Name::new)
}

proptest! {
    #[test]
    fn swapping_twice_is_identity(seed in any::<u64>(), a in name(), b in name()) {
        let p = common::agent(seed, 8);
        let s = Permutation::from_swaps([Swap::new(a, b)]);
        prop_assert_eq!(apply_perm(&s, &apply_perm(&s, &p)), p);
    }

    #[test]
    fn swap_is_unordered(seed in any::<u64>(), a in name(), b in name()) {
        let p = common::agent(seed, 8);
        let ab = Permutation::from_swaps([Swap::new(a, b)]);
        let ba = Permutation::from_swaps([Swap::new(b, a)]);
        prop_assert_eq!(apply_perm(&ab, &p), apply_perm(&ba, &p));
    }

    #[test]
    fn fresh_names_are_not_moved(seed in any::<u64>()) {
        let p = common::agent(seed, 8);
        let pi = Permutation::from_swaps([
            Swap::new(Name::new("p"), Name::new("q")),
            Swap::new(Name::new("q"), Name::new("r")),
        ]);
        prop_assert!(pi.names().iter().all(|n| is_fresh(*n, &p)));
        prop_assert!(alpha_eq(&apply_perm(&pi, &p), &p));
    }

    #[test]
    fn freshness_is_equivariant(seed in any::<u64>(), a in name(), b in name(), c in name()) {
        let p = common::agent(seed, 8);
        let s = Swap::new(a, b);
        let moved = apply_perm(&Permutation::from_swaps([s]), &p);
        prop_assert_eq!(is_fresh(c, &p), is_fresh(swap_name(s, c), &moved));
    }

    #[test]
    fn fresh_name_is_fresh_and_deterministic(
        avoid in prop::collection::btree_set(name(), 0..8),
        hint in prop::option::of(name()),
    ) {
        let avoid: NameSet = avoid.into_iter().collect();
        let n = fresh_name(&avoid, hint);
        prop_assert!(!avoid.contains(&n));
        prop_assert_eq!(n, fresh_name(&avoid, hint));
    }
}
