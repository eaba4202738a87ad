//! Atoms, swappings and permutations.
//!
//! Every name is interned once per process. A [`Name`] is a dense integer key
//! into the interner; its printable form is a base string plus a number of
//! prime decorations (`a`, `a'`, `a''`). Names order by `(base, primes)`,
//! which is also the order fresh names are drawn in.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, LazyLock, RwLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Prefix of the reserved atoms used for canonical binders. No name produced
/// by the parser starts with it.
pub const RESERVED_PREFIX: char = '#';

#[derive(Default)]
struct Interner {
    ids: HashMap<(Arc<str>, u32), u32>,
    entries: Vec<(Arc<str>, u32)>,
}

static INTERNER: LazyLock<RwLock<Interner>> = LazyLock::new(Default::default);

/// An atom of the calculus.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Name(u32);

/// Finite set of names, iterated in canonical order.
pub type NameSet = BTreeSet<Name>;

impl Name {
    /// Interns `text`; trailing `'` characters become decorations.
    pub fn new(text: &str) -> Name {
        let base = text.trim_end_matches('\'');
        let primes = (text.len() - base.len()) as u32;
        Name::decorated(base, primes)
    }

    pub fn decorated(base: &str, primes: u32) -> Name {
        {
            let table = INTERNER.read().expect("name interner poisoned");
            if let Some(&id) = table.ids.get(&(Arc::from(base), primes)) {
                return Name(id);
            }
        }
        let mut table = INTERNER.write().expect("name interner poisoned");
        let key: Arc<str> = Arc::from(base);
        if let Some(&id) = table.ids.get(&(key.clone(), primes)) {
            return Name(id);
        }
        let id = table.entries.len() as u32;
        table.entries.push((key.clone(), primes));
        table.ids.insert((key, primes), id);
        Name(id)
    }

    /// The `index`-th reserved canonical atom, printed `#index`.
    pub fn canonical(index: usize) -> Name {
        Name::decorated(&format!("{RESERVED_PREFIX}{index}"), 0)
    }

    pub fn base(self) -> Arc<str> {
        INTERNER.read().expect("name interner poisoned").entries[self.0 as usize]
            .0
            .clone()
    }

    pub fn primes(self) -> u32 {
        INTERNER.read().expect("name interner poisoned").entries[self.0 as usize].1
    }

    /// True for the canonical binder namespace, which source text cannot spell.
    pub fn is_reserved(self) -> bool {
        self.base().starts_with(RESERVED_PREFIX)
    }

    /// Dense interner key.
    pub fn id(self) -> u32 {
        self.0
    }

    /// Same base, one more decoration.
    pub fn next_decoration(self) -> Name {
        let (base, primes) = self.parts();
        Name::decorated(&base, primes + 1)
    }

    fn parts(self) -> (Arc<str>, u32) {
        INTERNER.read().expect("name interner poisoned").entries[self.0 as usize].clone()
    }
}

impl Ord for Name {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.0 == other.0 {
            return Ordering::Equal;
        }
        let table = INTERNER.read().expect("name interner poisoned");
        let (a, pa) = &table.entries[self.0 as usize];
        let (b, pb) = &table.entries[other.0 as usize];
        a.cmp(b).then(pa.cmp(pb))
    }
}

impl PartialOrd for Name {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (base, primes) = self.parts();
        f.write_str(&base)?;
        for _ in 0..primes {
            f.write_str("'")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(text: &str) -> Self {
        Name::new(text)
    }
}

impl Serialize for Name {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Name {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ok(Name::new(&text))
    }
}

/// The transposition `(first second)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Swap {
    pub first: Name,
    pub second: Name,
}

impl Swap {
    pub fn new(first: Name, second: Name) -> Swap {
        Swap { first, second }
    }
}

pub fn swap_name(s: Swap, n: Name) -> Name {
    if n == s.first {
        s.second
    } else if n == s.second {
        s.first
    } else {
        n
    }
}

/// A finite sequence of swappings. The last swap acts first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Permutation {
    pub swaps: Vec<Swap>,
}

impl Permutation {
    pub fn identity() -> Permutation {
        Permutation::default()
    }

    pub fn from_swaps(swaps: impl IntoIterator<Item = Swap>) -> Permutation {
        Permutation {
            swaps: swaps.into_iter().collect(),
        }
    }

    /// Composition is concatenation: `self.then_after(q) • t = self • (q • t)`.
    pub fn then_after(&self, inner: &Permutation) -> Permutation {
        let mut swaps = self.swaps.clone();
        swaps.extend(inner.swaps.iter().copied());
        Permutation { swaps }
    }

    pub fn names(&self) -> NameSet {
        self.swaps
            .iter()
            .flat_map(|s| [s.first, s.second])
            .collect()
    }
}

pub fn invert(p: &Permutation) -> Permutation {
    Permutation {
        swaps: p.swaps.iter().rev().copied().collect(),
    }
}

/// Values whose names can be reached by a swapping.
///
/// `swap` must act on every occurrence, binding ones included, and `support`
/// is the set of names a permutation can change (free names for terms
/// identified up to alpha).
pub trait Nominal: Sized {
    fn swap(&self, s: Swap) -> Self;
    fn support(&self) -> NameSet;
}

pub fn apply_perm<T: Nominal + Clone>(p: &Permutation, t: &T) -> T {
    p.swaps.iter().rev().fold(t.clone(), |acc, s| acc.swap(*s))
}

pub fn is_fresh<T: Nominal>(a: Name, t: &T) -> bool {
    !t.support().contains(&a)
}

/// Deterministic fresh atom: the least decoration of `hint` outside `avoid`,
/// or of `a` when there is no hint.
pub fn fresh_name(avoid: &NameSet, hint: Option<Name>) -> Name {
    let mut candidate = hint.unwrap_or_else(|| Name::new("a"));
    while avoid.contains(&candidate) {
        candidate = candidate.next_decoration();
    }
    candidate
}

impl Nominal for Name {
    fn swap(&self, s: Swap) -> Self {
        swap_name(s, *self)
    }

    fn support(&self) -> NameSet {
        NameSet::from([*self])
    }
}

impl Nominal for NameSet {
    fn swap(&self, s: Swap) -> Self {
        self.iter().map(|n| swap_name(s, *n)).collect()
    }

    fn support(&self) -> NameSet {
        self.clone()
    }
}

impl<A: Nominal, B: Nominal> Nominal for (A, B) {
    fn swap(&self, s: Swap) -> Self {
        (self.0.swap(s), self.1.swap(s))
    }

    fn support(&self) -> NameSet {
        let mut names = self.0.support();
        names.extend(self.1.support());
        names
    }
}

impl<T: Nominal> Nominal for Vec<T> {
    fn swap(&self, s: Swap) -> Self {
        self.iter().map(|t| t.swap(s)).collect()
    }

    fn support(&self) -> NameSet {
        self.iter().flat_map(|t| t.support()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn swap_name_cases() {
        let s = Swap::new(n("a"), n("b"));
        assert_eq!(swap_name(s, n("a")), n("b"));
        assert_eq!(swap_name(s, n("b")), n("a"));
        assert_eq!(swap_name(s, n("c")), n("c"));
    }

    #[test]
    fn permutation_acts_last_swap_first() {
        let p = Permutation::from_swaps([Swap::new(n("a"), n("b")), Swap::new(n("b"), n("c"))]);
        // (b c) sends c to b, then (a b) sends b to a
        assert_eq!(apply_perm(&p, &n("c")), n("a"));
        assert_eq!(apply_perm(&Permutation::identity(), &n("c")), n("c"));
    }

    #[test]
    fn invert_reverses() {
        let ab = Swap::new(n("a"), n("b"));
        let cd = Swap::new(n("c"), n("d"));
        assert_eq!(invert(&Permutation::identity()), Permutation::identity());
        assert_eq!(invert(&Permutation::from_swaps([ab])), Permutation::from_swaps([ab]));
        assert_eq!(
            invert(&Permutation::from_swaps([ab, cd])),
            Permutation::from_swaps([cd, ab])
        );
        let p = Permutation::from_swaps([ab, Swap::new(n("b"), n("c"))]);
        for x in ["a", "b", "c", "d"] {
            assert_eq!(apply_perm(&invert(&p), &apply_perm(&p, &n(x))), n(x));
        }
    }

    #[test]
    fn fresh_name_decorates_hint() {
        let avoid = NameSet::from([n("a"), n("b")]);
        assert_eq!(fresh_name(&avoid, Some(n("a"))), n("a'"));
        let avoid = NameSet::from([n("a"), n("a'")]);
        assert_eq!(fresh_name(&avoid, Some(n("a"))), n("a''"));
        assert_eq!(fresh_name(&NameSet::new(), None), n("a"));
        assert_eq!(fresh_name(&NameSet::from([n("x")]), Some(n("y"))), n("y"));
    }

    #[test]
    fn order_is_base_then_primes() {
        assert!(n("a") < n("a'"));
        assert!(n("a''") < n("b"));
        assert!(n("b") < n("ba"));
        assert_eq!(n("a'").to_string(), "a'");
        assert_eq!(n("a'").base().as_ref(), "a");
        assert!(Name::canonical(3).is_reserved());
        assert!(!n("x").is_reserved());
    }

    #[test]
    fn freshness_on_sets() {
        let set = NameSet::from([n("a"), n("b")]);
        assert!(is_fresh(n("c"), &set));
        assert!(!is_fresh(n("a"), &set));
        let s = Swap::new(n("a"), n("c"));
        assert!(is_fresh(swap_name(s, n("c")), &set.swap(s)) == is_fresh(n("c"), &set));
    }
}
