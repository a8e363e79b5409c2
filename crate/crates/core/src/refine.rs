//! Refinement and safe refinement between TSRs, and refinement between
//! mixed transition systems.
//!
//! Convention: `check_refinement(abstract, concrete)` asks whether the
//! concrete system refines the abstract one, with relations oriented
//! `abstract state × concrete state`.
//!
//! Both relations of every system are functional per `(state, action)`, so
//! whenever a pair is related every successor pair a refinement has to
//! contain is determined. The checkers therefore explore the forced pairs
//! from the initial pair breadth-first and fail on the first pair violating
//! a local condition. The greatest-fixpoint versions are kept as oracles.

use std::borrow::Cow;
use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::is_deadlocked;
use crate::model::{ActionId, ActionTable, MixTs, StateId, Trace, Tsr};

pub type StatePair = (StateId, StateId);
pub type Relation = BTreeSet<StatePair>;

/// The refinement condition that failed at a pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationCode {
    /// The concrete state drops a response of the abstract state.
    ResponseNotGrown,
    /// A transition on a required response is not kept by the concrete state.
    MustNotPreserved,
    /// The concrete state has a transition the abstract state cannot match.
    MayNotReflected,
    /// The concrete state is deadlocked but the abstract state is not.
    DeadlockNotReflected,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationCode::ResponseNotGrown => "ResponseNotGrown",
            ViolationCode::MustNotPreserved => "MustNotPreserved",
            ViolationCode::MayNotReflected => "MayNotReflected",
            ViolationCode::DeadlockNotReflected => "DeadlockNotReflected",
        })
    }
}

/// A failing pair together with the shortest trace reaching it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trace: Trace,
    pub pair: StatePair,
    pub violation: ViolationCode,
    /// The action the violated condition talks about, if any.
    pub action: Option<ActionId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefinementReport {
    pub holds: bool,
    pub safe: bool,
    /// Present iff `holds`: the pairs forced from the initial pair.
    pub relation: Option<Relation>,
    /// Present iff not `holds`.
    pub counterexample: Option<Counterexample>,
    /// Alphabet the trace and action ids refer to.
    #[serde(skip)]
    pub alphabet: ActionTable,
}

/// How differing action tables are reconciled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AlphabetMode {
    /// Union the tables by name.
    #[default]
    Union,
    /// Require the same set of names.
    Strict,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RefineOptions {
    pub safe: bool,
    pub alphabet: AlphabetMode,
}

/// Why a given relation is not a refinement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RelationDefect {
    MissingInitialPair,
    UnknownState(StatePair),
    Violation { pair: StatePair, code: ViolationCode },
}

impl fmt::Display for RelationDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelationDefect::MissingInitialPair => f.write_str("initial states are not related"),
            RelationDefect::UnknownState((a, b)) => write!(f, "pair ({a}, {b}) names an unknown state"),
            RelationDefect::Violation { pair: (a, b), code } => write!(f, "{code} at pair ({a}, {b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RefineError {
    #[error("alphabets differ: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<String>, right: Vec<String> },
    #[error("not a refinement: {0}")]
    NotARefinement(RelationDefect),
}

fn mismatch(left: &ActionTable, right: &ActionTable) -> RefineError {
    RefineError::AlphabetMismatch {
        left: left.names().to_vec(),
        right: right.names().to_vec(),
    }
}

fn common_alphabet(left: &ActionTable, right: &ActionTable, mode: AlphabetMode) -> Result<ActionTable, RefineError> {
    if mode == AlphabetMode::Strict && !left.same_names(right) {
        return Err(mismatch(left, right));
    }
    Ok(left.union(right))
}

/// Re-indexes both systems over a shared alphabet; left names come first.
pub fn align_tsr<'a>(
    t1: &'a Tsr,
    t2: &'a Tsr,
    mode: AlphabetMode,
) -> Result<(Cow<'a, Tsr>, Cow<'a, Tsr>), RefineError> {
    if t1.actions() == t2.actions() {
        return Ok((Cow::Borrowed(t1), Cow::Borrowed(t2)));
    }
    let alphabet = common_alphabet(t1.actions(), t2.actions(), mode)?;
    let left = if *t1.actions() == alphabet {
        Cow::Borrowed(t1)
    } else {
        Cow::Owned(t1.with_alphabet(&alphabet))
    };
    Ok((left, Cow::Owned(t2.with_alphabet(&alphabet))))
}

pub fn align_mixts<'a>(
    m1: &'a MixTs,
    m2: &'a MixTs,
    mode: AlphabetMode,
) -> Result<(Cow<'a, MixTs>, Cow<'a, MixTs>), RefineError> {
    if m1.actions() == m2.actions() {
        return Ok((Cow::Borrowed(m1), Cow::Borrowed(m2)));
    }
    let alphabet = common_alphabet(m1.actions(), m2.actions(), mode)?;
    let left = if *m1.actions() == alphabet {
        Cow::Borrowed(m1)
    } else {
        Cow::Owned(m1.with_alphabet(&alphabet))
    };
    Ok((left, Cow::Owned(m2.with_alphabet(&alphabet))))
}

type Failure = (ViolationCode, Option<ActionId>);

/// Local conditions of a TSR refinement at one pair, checked in the order
/// response growth, must preservation, may reflection, deadlock reflection.
fn tsr_local_violation(t1: &Tsr, s1: StateId, t2: &Tsr, s2: StateId, safe: bool) -> Option<Failure> {
    let (r1, r2) = (t1.responses(s1), t2.responses(s2));
    if let Some(&a) = r1.iter().find(|a| !r2.contains(a)) {
        return Some((ViolationCode::ResponseNotGrown, Some(a)));
    }
    if let Some(&a) = r1
        .iter()
        .find(|&&a| t1.step(s1, a).is_some() && t2.step(s2, a).is_none())
    {
        return Some((ViolationCode::MustNotPreserved, Some(a)));
    }
    if let Some(&a) = t2.outgoing(s2).keys().find(|&&a| t1.step(s1, a).is_none()) {
        return Some((ViolationCode::MayNotReflected, Some(a)));
    }
    if safe && is_deadlocked(t2, s2) && !is_deadlocked(t1, s1) {
        return Some((ViolationCode::DeadlockNotReflected, None));
    }
    None
}

enum Exploration {
    Closed(Vec<StatePair>),
    Failed(Counterexample),
}

/// Breadth-first search over forced pairs. `successors` must yield pairs in
/// ascending action order so that the first failure found is reached by the
/// shortest, then lexicographically least, trace.
fn explore_pairs(
    root: StatePair,
    mut local: impl FnMut(StatePair) -> Option<Failure>,
    mut successors: impl FnMut(StatePair, &mut Vec<(ActionId, StatePair)>),
) -> Exploration {
    let mut index: HashMap<StatePair, usize> = HashMap::new();
    let mut pairs = vec![root];
    let mut parent: Vec<Option<(usize, ActionId)>> = vec![None];
    index.insert(root, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut buf = Vec::new();
    while let Some(i) = queue.pop_front() {
        let pair = pairs[i];
        if let Some((violation, action)) = local(pair) {
            let mut actions = Vec::new();
            let mut cur = i;
            while let Some((p, a)) = parent[cur] {
                actions.push(a);
                cur = p;
            }
            actions.reverse();
            return Exploration::Failed(Counterexample {
                trace: Trace::new(actions),
                pair,
                violation,
                action,
            });
        }
        buf.clear();
        successors(pair, &mut buf);
        for &(a, next) in &buf {
            if let Entry::Vacant(slot) = index.entry(next) {
                slot.insert(pairs.len());
                pairs.push(next);
                parent.push(Some((i, a)));
                queue.push_back(pairs.len() - 1);
            }
        }
    }
    Exploration::Closed(pairs)
}

fn report(exploration: Exploration, safe: bool, alphabet: ActionTable) -> RefinementReport {
    match exploration {
        Exploration::Closed(pairs) => RefinementReport {
            holds: true,
            safe,
            relation: Some(pairs.into_iter().collect()),
            counterexample: None,
            alphabet,
        },
        Exploration::Failed(cex) => RefinementReport {
            holds: false,
            safe,
            relation: None,
            counterexample: Some(cex),
            alphabet,
        },
    }
}

/// Does `concrete` refine `abstract_`? Alphabets are unioned by name.
pub fn check_refinement(abstract_: &Tsr, concrete: &Tsr) -> RefinementReport {
    check_refinement_with(abstract_, concrete, RefineOptions::default()).expect("union mode never fails")
}

/// Refinement that additionally reflects deadlocked states.
pub fn check_safe_refinement(abstract_: &Tsr, concrete: &Tsr) -> RefinementReport {
    let options = RefineOptions {
        safe: true,
        ..RefineOptions::default()
    };
    check_refinement_with(abstract_, concrete, options).expect("union mode never fails")
}

pub fn check_refinement_with(
    abstract_: &Tsr,
    concrete: &Tsr,
    options: RefineOptions,
) -> Result<RefinementReport, RefineError> {
    let (t1, t2) = align_tsr(abstract_, concrete, options.alphabet)?;
    let (t1, t2) = (t1.as_ref(), t2.as_ref());
    let exploration = explore_pairs(
        (t1.initial(), t2.initial()),
        |(s1, s2)| tsr_local_violation(t1, s1, t2, s2, options.safe),
        |(s1, s2), out| {
            // local checks passed, so every concrete move has an abstract match
            for (&a, &n2) in t2.outgoing(s2) {
                let n1 = t1.step(s1, a).expect("reflected move");
                out.push((a, (n1, n2)));
            }
        },
    );
    Ok(report(exploration, options.safe, t1.actions().clone()))
}

/// Dense boolean relation over `n1 × n2`.
struct PairMatrix {
    cols: usize,
    bits: Vec<bool>,
}

impl PairMatrix {
    fn full(rows: usize, cols: usize) -> Self {
        PairMatrix {
            cols,
            bits: vec![true; rows * cols],
        }
    }

    fn get(&self, (s1, s2): StatePair) -> bool {
        self.bits[s1.index() * self.cols + s2.index()]
    }

    fn clear(&mut self, (s1, s2): StatePair) {
        self.bits[s1.index() * self.cols + s2.index()] = false;
    }

    fn pairs(&self) -> Relation {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (StateId((i / self.cols) as u32), StateId((i % self.cols) as u32)))
            .collect()
    }
}

fn greatest_fixpoint(rows: usize, cols: usize, mut keep: impl FnMut(StatePair, &dyn Fn(StatePair) -> bool) -> bool) -> Relation {
    let mut rel = PairMatrix::full(rows, cols);
    loop {
        let mut changed = false;
        for i in 0..rows {
            for j in 0..cols {
                let pair = (StateId(i as u32), StateId(j as u32));
                if rel.get(pair) && !keep(pair, &|p| rel.get(p)) {
                    rel.clear(pair);
                    changed = true;
                }
            }
        }
        if !changed {
            return rel.pairs();
        }
    }
}

/// Whether `(s1, s2)` satisfies every refinement condition relative to `related`.
fn tsr_pair_ok(t1: &Tsr, t2: &Tsr, (s1, s2): StatePair, safe: bool, related: &dyn Fn(StatePair) -> bool) -> Result<(), ViolationCode> {
    if !t1.responses(s1).is_subset(t2.responses(s2)) {
        return Err(ViolationCode::ResponseNotGrown);
    }
    for &a in t1.responses(s1) {
        if let Some(n1) = t1.step(s1, a) {
            match t2.step(s2, a) {
                Some(n2) if related((n1, n2)) => {}
                _ => return Err(ViolationCode::MustNotPreserved),
            }
        }
    }
    for (&a, &n2) in t2.outgoing(s2) {
        match t1.step(s1, a) {
            Some(n1) if related((n1, n2)) => {}
            _ => return Err(ViolationCode::MayNotReflected),
        }
    }
    if safe && is_deadlocked(t2, s2) && !is_deadlocked(t1, s1) {
        return Err(ViolationCode::DeadlockNotReflected);
    }
    Ok(())
}

/// Largest relation over all of `S1 × S2` satisfying the refinement
/// conditions, computed by deleting violating pairs until nothing changes.
pub fn greatest_refinement_relation(abstract_: &Tsr, concrete: &Tsr, safe: bool) -> Relation {
    let (t1, t2) = align_tsr(abstract_, concrete, AlphabetMode::Union).expect("union mode never fails");
    let (t1, t2) = (t1.as_ref(), t2.as_ref());
    greatest_fixpoint(t1.states().len(), t2.states().len(), |pair, related| {
        tsr_pair_ok(t1, t2, pair, safe, related).is_ok()
    })
}

fn verify_with(
    initial: StatePair,
    sizes: (usize, usize),
    relation: &Relation,
    check: impl Fn(StatePair, &dyn Fn(StatePair) -> bool) -> Result<(), ViolationCode>,
) -> Result<(), RelationDefect> {
    if let Some(&bad) = relation
        .iter()
        .find(|(a, b)| a.index() >= sizes.0 || b.index() >= sizes.1)
    {
        return Err(RelationDefect::UnknownState(bad));
    }
    if !relation.contains(&initial) {
        return Err(RelationDefect::MissingInitialPair);
    }
    let related = |p: StatePair| relation.contains(&p);
    for &pair in relation {
        check(pair, &related).map_err(|code| RelationDefect::Violation { pair, code })?;
    }
    Ok(())
}

/// Checks that `relation` is a (safe) refinement between two TSRs sharing an alphabet.
pub fn verify_refinement_relation(t1: &Tsr, t2: &Tsr, relation: &Relation, safe: bool) -> Result<(), RefineError> {
    if t1.actions() != t2.actions() {
        return Err(mismatch(t1.actions(), t2.actions()));
    }
    verify_with(
        (t1.initial(), t2.initial()),
        (t1.states().len(), t2.states().len()),
        relation,
        |pair, related| tsr_pair_ok(t1, t2, pair, safe, related),
    )
    .map_err(RefineError::NotARefinement)
}

// Mixed systems. A pair (s1, s2) is related when
//   every must edge of s1 is matched by a must edge of s2 with related targets,
//   every must action of s1 that s1 may also take is a may edge of s2 with related targets,
//   every may edge of s2 is matched by a may edge of s1 with related targets.
// The middle clause mirrors the preservation condition on TSRs; without it
// a mixed refinement need not be a refinement of the MR images.

fn mixts_local_violation(m1: &MixTs, s1: StateId, m2: &MixTs, s2: StateId) -> Option<Failure> {
    if let Some(&a) = m1.must(s1).keys().find(|a| !m2.must(s2).contains_key(a)) {
        return Some((ViolationCode::ResponseNotGrown, Some(a)));
    }
    if let Some(&a) = m1
        .must(s1)
        .keys()
        .find(|a| m1.may(s1).contains_key(a) && !m2.may(s2).contains_key(a))
    {
        return Some((ViolationCode::MustNotPreserved, Some(a)));
    }
    if let Some(&a) = m2.may(s2).keys().find(|a| !m1.may(s1).contains_key(a)) {
        return Some((ViolationCode::MayNotReflected, Some(a)));
    }
    None
}

fn mixts_pair_ok(m1: &MixTs, m2: &MixTs, (s1, s2): StatePair, related: &dyn Fn(StatePair) -> bool) -> Result<(), ViolationCode> {
    for (&a, &n1) in m1.must(s1) {
        match m2.must_step(s2, a) {
            Some(n2) if related((n1, n2)) => {}
            _ => return Err(ViolationCode::ResponseNotGrown),
        }
        if let Some(n1) = m1.may_step(s1, a) {
            match m2.may_step(s2, a) {
                Some(n2) if related((n1, n2)) => {}
                _ => return Err(ViolationCode::MustNotPreserved),
            }
        }
    }
    for (&a, &n2) in m2.may(s2) {
        match m1.may_step(s1, a) {
            Some(n1) if related((n1, n2)) => {}
            _ => return Err(ViolationCode::MayNotReflected),
        }
    }
    Ok(())
}

/// Does `concrete` refine `abstract_` as mixed transition systems?
pub fn check_mixts_refinement(abstract_: &MixTs, concrete: &MixTs) -> RefinementReport {
    let (m1, m2) = align_mixts(abstract_, concrete, AlphabetMode::Union).expect("union mode never fails");
    let (m1, m2) = (m1.as_ref(), m2.as_ref());
    let exploration = explore_pairs(
        (m1.initial(), m2.initial()),
        |(s1, s2)| mixts_local_violation(m1, s1, m2, s2),
        |(s1, s2), out| {
            for a in m1.actions().ids() {
                if let (Some(n1), Some(n2)) = (m1.must_step(s1, a), m2.must_step(s2, a)) {
                    out.push((a, (n1, n2)));
                }
                if let Some(n2) = m2.may_step(s2, a) {
                    let n1 = m1.may_step(s1, a).expect("reflected move");
                    out.push((a, (n1, n2)));
                }
            }
        },
    );
    report(exploration, false, m1.actions().clone())
}

pub fn greatest_mixts_refinement_relation(abstract_: &MixTs, concrete: &MixTs) -> Relation {
    let (m1, m2) = align_mixts(abstract_, concrete, AlphabetMode::Union).expect("union mode never fails");
    let (m1, m2) = (m1.as_ref(), m2.as_ref());
    greatest_fixpoint(m1.states().len(), m2.states().len(), |pair, related| {
        mixts_pair_ok(m1, m2, pair, related).is_ok()
    })
}

/// Checks that `relation` is a refinement between two mixed systems sharing an alphabet.
pub fn verify_mixts_relation(m1: &MixTs, m2: &MixTs, relation: &Relation) -> Result<(), RefineError> {
    if m1.actions() != m2.actions() {
        return Err(mismatch(m1.actions(), m2.actions()));
    }
    verify_with(
        (m1.initial(), m2.initial()),
        (m1.states().len(), m2.states().len()),
        relation,
        |pair, related| mixts_pair_ok(m1, m2, pair, related),
    )
    .map_err(RefineError::NotARefinement)
}

/// Replays `trace` from the initial states; `None` if either run gets stuck.
pub fn replay_pair(t1: &Tsr, t2: &Tsr, trace: &Trace) -> Option<StatePair> {
    trace
        .actions
        .iter()
        .try_fold((t1.initial(), t2.initial()), |(s1, s2), &a| Some((t1.step(s1, a)?, t2.step(s2, a)?)))
}
