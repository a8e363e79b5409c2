//! Finite-trace language of a TSR.
//!
//! A TSR is read as a deterministic partial automaton whose accepting states
//! are those with an empty response set. Inclusion and equivalence run on the
//! synchronous product, with a rejecting sink completing the left side.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::model::{ActionId, ActionTable, StateId, Trace, Tsr};
use crate::refine::{align_tsr, AlphabetMode};

/// Largest number of words [`enumerate`] returns by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum LanguageError {
    #[error("action {0} is not in the alphabet")]
    UnknownAction(String),
    #[error("enumeration exceeds the cap of {cap} words")]
    ResourceLimit { cap: usize },
}

/// Outcome of a language question with its shortest witness.
///
/// For emptiness the witness is an accepted word; for inclusion and
/// equivalence it is a word separating the two languages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LanguageVerdict {
    pub holds: bool,
    pub witness: Option<Trace>,
    #[serde(skip)]
    pub alphabet: ActionTable,
}

/// Runs `w` from the initial state; `None` when a step is undefined.
pub fn run(t: &Tsr, w: &Trace) -> Result<Option<StateId>, LanguageError> {
    let mut s = t.initial();
    for &a in &w.actions {
        if !t.actions().contains(a) {
            return Err(LanguageError::UnknownAction(a.to_string()));
        }
        match t.step(s, a) {
            Some(next) => s = next,
            None => return Ok(None),
        }
    }
    Ok(Some(s))
}

pub fn accepts(t: &Tsr, w: &Trace) -> Result<bool, LanguageError> {
    Ok(run(t, w)?.is_some_and(|s| t.responses(s).is_empty()))
}

/// Membership for a word given by action names.
pub fn accepts_names<S: AsRef<str>>(t: &Tsr, word: &[S]) -> Result<bool, LanguageError> {
    let w = Trace::from_names(t.actions(), word).map_err(LanguageError::UnknownAction)?;
    accepts(t, &w)
}

/// Breadth-first search over a deterministic product. Successors are visited
/// in ascending action order, so the first target found is reached by the
/// shortest, then lexicographically least, word.
fn shortest_word<N: Copy + Eq + std::hash::Hash>(
    root: N,
    is_target: impl Fn(N) -> bool,
    successors: impl Fn(N, &mut Vec<(ActionId, N)>),
) -> Option<Trace> {
    let mut parent: HashMap<N, Option<(N, ActionId)>> = HashMap::new();
    parent.insert(root, None);
    let mut queue = VecDeque::from([root]);
    let mut buf = Vec::new();
    while let Some(node) = queue.pop_front() {
        if is_target(node) {
            let mut word = Vec::new();
            let mut cur = node;
            while let Some((prev, a)) = parent[&cur] {
                word.push(a);
                cur = prev;
            }
            word.reverse();
            return Some(Trace::new(word));
        }
        buf.clear();
        successors(node, &mut buf);
        for &(a, next) in &buf {
            if let Entry::Vacant(slot) = parent.entry(next) {
                slot.insert(Some((node, a)));
                queue.push_back(next);
            }
        }
    }
    None
}

/// Shortest accepted word, if any.
pub fn shortest_accepted(t: &Tsr) -> Option<Trace> {
    shortest_word(
        t.initial(),
        |s| t.responses(s).is_empty(),
        |s, out| out.extend(t.outgoing(s).iter().map(|(&a, &n)| (a, n))),
    )
}

/// Holds when no accepting state is reachable; otherwise the witness is the
/// shortest accepted word.
pub fn is_empty(t: &Tsr) -> LanguageVerdict {
    let witness = shortest_accepted(t);
    LanguageVerdict {
        holds: witness.is_none(),
        witness,
        alphabet: t.actions().clone(),
    }
}

/// Decides `L(concrete) ⊆ L(abstract_)`. The witness is the shortest word
/// accepted by `concrete` and rejected by `abstract_`.
pub fn includes(abstract_: &Tsr, concrete: &Tsr) -> LanguageVerdict {
    let (t1, t2) = align_tsr(abstract_, concrete, AlphabetMode::Union).expect("union mode never fails");
    let (t1, t2) = (t1.as_ref(), t2.as_ref());
    // None on the left is the rejecting sink
    let witness = shortest_word(
        (Some(t1.initial()), t2.initial()),
        |(s1, s2)| t2.responses(s2).is_empty() && s1.is_none_or(|s1| !t1.responses(s1).is_empty()),
        |(s1, s2), out| {
            for (&a, &n2) in t2.outgoing(s2) {
                out.push((a, (s1.and_then(|s1| t1.step(s1, a)), n2)));
            }
        },
    );
    LanguageVerdict {
        holds: witness.is_none(),
        witness,
        alphabet: t1.actions().clone(),
    }
}

/// Both inclusions; the witness separates the languages.
pub fn equivalent(t1: &Tsr, t2: &Tsr) -> LanguageVerdict {
    let forward = includes(t1, t2);
    if !forward.holds {
        return forward;
    }
    let backward = includes(t2, t1);
    if backward.holds {
        return forward;
    }
    // report over the alphabet ordered from t1
    let alphabet = forward.alphabet;
    let witness = backward.witness.map(|w| {
        Trace::new(
            w.actions
                .iter()
                .map(|&a| alphabet.get(backward.alphabet.name(a)).expect("shared alphabet"))
                .collect(),
        )
    });
    LanguageVerdict {
        holds: false,
        witness,
        alphabet,
    }
}

/// Accepted words of length at most `maxlen`, by length then action order.
pub fn enumerate(t: &Tsr, maxlen: usize) -> Result<Vec<Trace>, LanguageError> {
    enumerate_with_cap(t, maxlen, DEFAULT_ENUMERATION_CAP)
}

pub fn enumerate_with_cap(t: &Tsr, maxlen: usize, cap: usize) -> Result<Vec<Trace>, LanguageError> {
    let distance = distance_to_accepting(t);
    let mut words = Vec::new();
    let mut frontier: Vec<(Vec<ActionId>, StateId)> = Vec::new();
    if distance[t.initial().index()].is_some_and(|d| d <= maxlen) {
        frontier.push((Vec::new(), t.initial()));
    }
    for len in 0..=maxlen {
        let mut next = Vec::new();
        for (word, s) in frontier {
            if t.responses(s).is_empty() {
                if words.len() == cap {
                    return Err(LanguageError::ResourceLimit { cap });
                }
                words.push(Trace::new(word.clone()));
            }
            let remaining = maxlen - len;
            if remaining == 0 {
                continue;
            }
            for (&a, &n) in t.outgoing(s) {
                // only keep prefixes that still reach an accepting state in time
                if distance[n.index()].is_some_and(|d| d < remaining) {
                    let mut longer = word.clone();
                    longer.push(a);
                    next.push((longer, n));
                }
            }
        }
        frontier = next;
    }
    Ok(words)
}

/// Length of the shortest path from each state to an accepting state.
fn distance_to_accepting(t: &Tsr) -> Vec<Option<usize>> {
    let n = t.states().len();
    let mut predecessors: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for (s, _, d) in t.transitions() {
        predecessors[d.index()].push(s);
    }
    let mut distance = vec![None; n];
    let mut queue = VecDeque::new();
    for s in t.state_ids() {
        if t.responses(s).is_empty() {
            distance[s.index()] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        let d = distance[s.index()].expect("queued states have a distance");
        for &p in &predecessors[s.index()] {
            if distance[p.index()].is_none() {
                distance[p.index()] = Some(d + 1);
                queue.push_back(p);
            }
        }
    }
    distance
}
