//! Substitution closure.
//!
//! Every equivalence here is invariant under bijective renaming, so whether
//! `pσ` and `qσ` are related depends only on which names of `D = fn(p) ∪
//! fn(q)` the substitution identifies. Enumerating the partitions of `D`,
//! each realized by sending a block to its least member, covers every `σ`.

use crate::nominal::Name;
use crate::semantics::Semantics;
use crate::syntax::{apply_chain, free_names, Agent, SubstChain};

use super::checker::{check_base, CheckStats};
use super::{CheckConfig, EquivKind, UnknownReason, Verdict};

pub(crate) fn subst_closed_with(
    sem: &dyn Semantics,
    p: &Agent,
    q: &Agent,
    base: EquivKind,
    cfg: &CheckConfig,
) -> (Verdict, CheckStats) {
    let mut domain: Vec<Name> = free_names(p).into_iter().collect();
    domain.extend(free_names(q));
    domain.sort();
    domain.dedup();
    let mut stats = CheckStats::default();
    if domain.len() > cfg.max_subst_domain {
        let reason = UnknownReason::SubstDomainTooLarge {
            size: domain.len(),
            max: cfg.max_subst_domain,
        };
        return (Verdict::Unknown(reason), stats);
    }
    let mut unknown = None;
    for blocks in partitions(domain.len()) {
        let chain = SubstChain::new(
            blocks
                .iter()
                .enumerate()
                .filter(|&(i, &b)| b != i)
                .map(|(i, &b)| (domain[b], domain[i])),
        );
        let (v, s) = check_base(sem, &apply_chain(p, &chain), &apply_chain(q, &chain), base, cfg);
        stats.add(s);
        match v {
            Verdict::Equivalent => {}
            Verdict::Inequivalent(mut w) => {
                w.substitution = Some(chain);
                return (Verdict::Inequivalent(w), stats);
            }
            Verdict::Unknown(r) => {
                unknown.get_or_insert(r);
            }
        }
    }
    match unknown {
        Some(r) => (Verdict::Unknown(r), stats),
        None => (Verdict::Equivalent, stats),
    }
}

/// Set partitions of `0..n`, each as the least member of every element's
/// block. The discrete partition comes first.
fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(i: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        cur[i] = i;
        go(i + 1, cur, out);
        for r in 0..i {
            if cur[r] == r {
                cur[i] = r;
                go(i + 1, cur, out);
            }
        }
    }
    let mut out = Vec::new();
    go(0, &mut vec![0; n], &mut out);
    out
}
