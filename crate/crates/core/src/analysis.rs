//! Deadlock, acceptance and modality analyses on a single TSR.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::model::{reachable_states, StateId, Tsr};

/// Deadlocked states of a system, split by reachability.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeadlockReport {
    pub deadlocked: BTreeSet<StateId>,
    pub reachable_deadlocked: BTreeSet<StateId>,
    pub deadlock_free: bool,
}

/// A state is deadlocked when it has pending responses and no outgoing transition.
pub fn is_deadlocked(t: &Tsr, s: StateId) -> bool {
    !t.responses(s).is_empty() && !t.has_outgoing(s)
}

pub fn deadlock_states(t: &Tsr) -> DeadlockReport {
    let deadlocked: BTreeSet<StateId> = t.state_ids().filter(|&s| is_deadlocked(t, s)).collect();
    let reachable = reachable_states(t);
    let reachable_deadlocked: BTreeSet<StateId> = deadlocked.intersection(&reachable).copied().collect();
    DeadlockReport {
        deadlock_free: reachable_deadlocked.is_empty(),
        deadlocked,
        reachable_deadlocked,
    }
}

pub fn is_deadlock_free(t: &Tsr) -> bool {
    deadlock_states(t).deadlock_free
}

/// States with an empty response set.
pub fn accepting_states(t: &Tsr) -> BTreeSet<StateId> {
    t.state_ids().filter(|&s| t.responses(s).is_empty()).collect()
}

pub fn is_modal(t: &Tsr) -> bool {
    t.is_modal()
}

/// `true` unless `t` is modal and has a reachable deadlock.
pub fn check_modal_deadlock_lemma(t: &Tsr) -> bool {
    !t.is_modal() || is_deadlock_free(t)
}
