//! Bisimulation equivalences, decided on the finite pair graph reachable
//! from the two agents.
//!
//! The universally quantified received name of late input is instantiated
//! over [`matching_names`]: the free names of the pair, any extra names from
//! the configuration, and one fresh representative. Substitution-closed
//! variants enumerate the ways of identifying free names with each other.

mod checker;
mod structural;
mod subst;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::nominal::{fresh_name, Name, NameSet};
use crate::semantics::{Semantics, Standard};
use crate::syntax::{free_names, Agent, SubstChain};
use crate::weak::{ExploreLimits, LimitExceeded};

pub use checker::CheckStats;
pub use structural::{prune, struct_cong, struct_normal_form, structural_reduce};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquivKind {
    StrongLate,
    StrongLateS,
    StrongEarly,
    StrongEarlyS,
    WeakLate,
    WeakLateCong,
    WeakLateCongS,
    WeakEarly,
    WeakEarlyCong,
    WeakEarlyCongS,
}

impl EquivKind {
    pub const ALL: [EquivKind; 10] = [
        EquivKind::StrongLate,
        EquivKind::StrongLateS,
        EquivKind::StrongEarly,
        EquivKind::StrongEarlyS,
        EquivKind::WeakLate,
        EquivKind::WeakLateCong,
        EquivKind::WeakLateCongS,
        EquivKind::WeakEarly,
        EquivKind::WeakEarlyCong,
        EquivKind::WeakEarlyCongS,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EquivKind::StrongLate => "strong-late",
            EquivKind::StrongLateS => "strong-late-s",
            EquivKind::StrongEarly => "strong-early",
            EquivKind::StrongEarlyS => "strong-early-s",
            EquivKind::WeakLate => "weak-late",
            EquivKind::WeakLateCong => "weak-late-cong",
            EquivKind::WeakLateCongS => "weak-late-cong-s",
            EquivKind::WeakEarly => "weak-early",
            EquivKind::WeakEarlyCong => "weak-early-cong",
            EquivKind::WeakEarlyCongS => "weak-early-cong-s",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            EquivKind::StrongLate => "~",
            EquivKind::StrongLateS => "~s",
            EquivKind::StrongEarly => "~e",
            EquivKind::StrongEarlyS => "~es",
            EquivKind::WeakLate => "≈",
            EquivKind::WeakLateCong => "≅",
            EquivKind::WeakLateCongS => "≅s",
            EquivKind::WeakEarly => "≈e",
            EquivKind::WeakEarlyCong => "≅e",
            EquivKind::WeakEarlyCongS => "≅es",
        }
    }

    /// The kind a substitution-closed kind closes over.
    pub fn closure_base(self) -> Option<EquivKind> {
        match self {
            EquivKind::StrongLateS => Some(EquivKind::StrongLate),
            EquivKind::StrongEarlyS => Some(EquivKind::StrongEarly),
            EquivKind::WeakLateCongS => Some(EquivKind::WeakLateCong),
            EquivKind::WeakEarlyCongS => Some(EquivKind::WeakEarlyCong),
            _ => None,
        }
    }
}

impl fmt::Display for EquivKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EquivKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EquivKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown equivalence `{s}`"))
    }
}

/// How states are identified during exploration. Every option is sound
/// because each rewrite used preserves strong late bisimilarity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateReduction {
    /// Alpha-equivalence only.
    Alpha,
    /// Drop `0` operands and unused restrictions.
    Prune,
    /// Structural normal form, plus `R | !R` absorbed into `!R`.
    #[default]
    Structural,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckConfig {
    pub limits: ExploreLimits,
    pub extra_inputs: NameSet,
    pub max_subst_domain: usize,
    pub reduction: StateReduction,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            limits: ExploreLimits::default(),
            extra_inputs: NameSet::new(),
            max_subst_domain: 4,
            reduction: StateReduction::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum UnknownReason {
    LimitExceeded { limit: LimitExceeded },
    SubstDomainTooLarge { size: usize, max: usize },
    NormalizerIncomplete,
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::LimitExceeded { limit } => write!(f, "exploration limit exceeded: {limit}"),
            UnknownReason::SubstDomainTooLarge { size, max } => {
                write!(f, "{size} free names exceed the substitution bound {max}")
            }
            UnknownReason::NormalizerIncomplete => {
                f.write_str("normal forms differ; structural congruence is not refuted")
            }
        }
    }
}

impl From<LimitExceeded> for UnknownReason {
    fn from(limit: LimitExceeded) -> Self {
        UnknownReason::LimitExceeded { limit }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Equivalent,
    Inequivalent(Witness),
    Unknown(UnknownReason),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent)
    }

    pub fn is_inequivalent(&self) -> bool {
        matches!(self, Verdict::Inequivalent(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Verdict::Unknown(_))
    }

    /// `Some(true)` for equivalent, `Some(false)` for inequivalent.
    pub fn decided(&self) -> Option<bool> {
        match self {
            Verdict::Equivalent => Some(true),
            Verdict::Inequivalent(_) => Some(false),
            Verdict::Unknown(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Equivalent => "equivalent",
            Verdict::Inequivalent(_) => "inequivalent",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "Left",
            Side::Right => "Right",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Tau,
    Input,
    Output,
    BoundOutput,
    /// The empty tau-chain, answering tau by staying put.
    Idle,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ActionView {
    pub kind: ActionKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chan: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub msg: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bind: Option<Name>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub received: Option<Name>,
}

impl ActionView {
    pub fn simple(kind: ActionKind) -> Self {
        ActionView {
            kind,
            chan: None,
            msg: None,
            bind: None,
            received: None,
        }
    }
}

impl fmt::Display for ActionView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = |o: &Option<Name>| o.map(|n| n.to_string()).unwrap_or_default();
        match self.kind {
            ActionKind::Tau => f.write_str("tau"),
            ActionKind::Idle => f.write_str("(stays put)"),
            ActionKind::Output => write!(f, "{}!{}", n(&self.chan), n(&self.msg)),
            ActionKind::BoundOutput => write!(f, "{}!({})", n(&self.chan), n(&self.bind)),
            ActionKind::Input => match (self.bind, self.received) {
                (Some(x), Some(u)) => write!(f, "{}({x}) receiving {u}", n(&self.chan)),
                (Some(x), None) => write!(f, "{}({x})", n(&self.chan)),
                (None, _) => write!(f, "{}?{}", n(&self.chan), n(&self.received)),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WitnessStep {
    pub side: Side,
    pub action: ActionView,
    /// Whether this step answers the previous challenge.
    pub response: bool,
}

/// A distinguishing play: challenges and the answers chosen for them,
/// ending with a challenge that has no answer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub steps: Vec<WitnessStep>,
    /// The pair reached when the unanswerable challenge is made.
    pub left: String,
    pub right: String,
    /// For substitution-closed kinds, the substitution applied first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<SubstChain>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = &self.substitution {
            writeln!(f, "under {s}")?;
        }
        for step in &self.steps {
            if step.response {
                writeln!(f, "  {} answers: {}", step.side, step.action)?;
            } else {
                writeln!(f, "{}: {}", step.side, step.action)?;
            }
        }
        if let Some(last) = self.steps.last() {
            writeln!(f, "  {} has no answer", last.side.other())?;
        }
        write!(f, "at {}  vs  {}", self.left, self.right)
    }
}

/// `fn(p) ∪ fn(q) ∪ extra ∪ {w}` with `w` fresh for the rest.
pub fn matching_names(p: &Agent, q: &Agent, cfg: &CheckConfig) -> NameSet {
    let mut names = free_names(p);
    names.extend(free_names(q));
    names.extend(cfg.extra_inputs.iter().copied());
    names.insert(fresh_name(&names, Some(Name::new("w"))));
    names
}

pub fn check(p: &Agent, q: &Agent, kind: EquivKind, cfg: &CheckConfig) -> Verdict {
    check_with(&Standard, p, q, kind, cfg).0
}

/// [`check`] over an arbitrary transition system, with statistics.
pub fn check_with(
    sem: &dyn Semantics,
    p: &Agent,
    q: &Agent,
    kind: EquivKind,
    cfg: &CheckConfig,
) -> (Verdict, CheckStats) {
    match kind.closure_base() {
        Some(base) => subst::subst_closed_with(sem, p, q, base, cfg),
        None => checker::check_base(sem, p, q, kind, cfg),
    }
}

/// Equivalence of `pσ` and `qσ` under `base` for every substitution `σ`.
pub fn subst_closed(p: &Agent, q: &Agent, base: EquivKind, cfg: &CheckConfig) -> Verdict {
    subst::subst_closed_with(&Standard, p, q, base, cfg).0
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hennessy {
    pub weak_bisim: Verdict,
    /// `τ.p ≅ q`, `p ≅ q`, `p ≅ τ.q`
    pub disjuncts: [Verdict; 3],
}

impl Hennessy {
    /// Whether both sides of the biconditional are decided and agree;
    /// `None` when some check was inconclusive in a way that matters.
    pub fn holds(&self) -> Option<bool> {
        let lhs = self.weak_bisim.decided()?;
        let ds: Vec<Option<bool>> = self.disjuncts.iter().map(Verdict::decided).collect();
        let rhs = if ds.contains(&Some(true)) {
            true
        } else if ds.iter().all(|d| *d == Some(false)) {
            false
        } else {
            return None;
        };
        Some(lhs == rhs)
    }
}

pub fn hennessy_classify(p: &Agent, q: &Agent, cfg: &CheckConfig) -> Hennessy {
    let cong = |a: &Agent, b: &Agent| check(a, b, EquivKind::WeakLateCong, cfg);
    Hennessy {
        weak_bisim: check(p, q, EquivKind::WeakLate, cfg),
        disjuncts: [
            cong(&Agent::tau(p.clone()), q),
            cong(p, q),
            cong(p, &Agent::tau(q.clone())),
        ],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub structural: Verdict,
    pub kinds: Vec<(EquivKind, Verdict)>,
}

impl Relation {
    pub fn get(&self, kind: EquivKind) -> &Verdict {
        &self
            .kinds
            .iter()
            .find(|(k, _)| *k == kind)
            .expect("every kind is present")
            .1
    }

    /// Every inclusion `stronger ⇒ weaker` as (stronger, weaker, their
    /// verdicts), structural congruence first.
    pub fn implications(&self) -> Vec<(&'static str, &'static str, &Verdict, &Verdict)> {
        let mut out = Vec::new();
        for weak in [EquivKind::StrongLate, EquivKind::StrongLateS] {
            out.push(("≡", weak.symbol(), &self.structural, self.get(weak)));
        }
        for (strong, weak) in INCLUSIONS {
            out.push((strong.symbol(), weak.symbol(), self.get(strong), self.get(weak)));
        }
        out
    }

    /// Inclusions that the table violates.
    pub fn lattice_violations(&self) -> Vec<(String, String)> {
        self.implications()
            .into_iter()
            .filter(|(_, _, s, w)| s.is_equivalent() && w.is_inequivalent())
            .map(|(s, w, _, _)| (s.to_string(), w.to_string()))
            .collect()
    }
}

/// Known inclusions between the kinds, stronger first.
pub const INCLUSIONS: [(EquivKind, EquivKind); 8] = [
    (EquivKind::StrongLate, EquivKind::WeakLateCong),
    (EquivKind::WeakLateCong, EquivKind::WeakLate),
    (EquivKind::StrongLate, EquivKind::StrongEarly),
    (EquivKind::StrongEarly, EquivKind::WeakEarlyCong),
    (EquivKind::WeakEarlyCong, EquivKind::WeakEarly),
    (EquivKind::StrongLateS, EquivKind::StrongLate),
    (EquivKind::StrongLateS, EquivKind::StrongEarlyS),
    (EquivKind::WeakLateCongS, EquivKind::WeakLateCong),
];

pub fn relate(p: &Agent, q: &Agent, cfg: &CheckConfig) -> Relation {
    relate_with(&Standard, p, q, cfg)
}

pub fn relate_with(sem: &dyn Semantics, p: &Agent, q: &Agent, cfg: &CheckConfig) -> Relation {
    Relation {
        structural: struct_cong(p, q),
        kinds: EquivKind::ALL
            .into_iter()
            .map(|k| (k, check_with(sem, p, q, k, cfg).0))
            .collect(),
    }
}
