//! Conversions between TSRs and action-deterministic mixed systems.
//!
//! [`mr`] forgets the targets of must edges and keeps their actions as
//! response sets. [`rm`] rebuilds must edges: a response with a matching
//! transition becomes a must edge to the same target, any other response
//! gets a fresh sink state named `<state>__req_<action>`.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::model::{ActionId, ActionSet, Edges, MixTs, Modality, StateId, StateTable, Tsr};
use crate::refine::{align_mixts, verify_mixts_relation, verify_refinement_relation, AlphabetMode, Relation, RefineError};

/// Fresh sink states introduced for responses without a transition, keyed by
/// the `(state, action)` they answer.
pub type SinkMap = BTreeMap<(StateId, ActionId), StateId>;

pub fn mr(m: &MixTs) -> Tsr {
    let responses: Vec<ActionSet> = m.state_ids().map(|s| m.must(s).keys().copied().collect()).collect();
    let delta: Edges = m.state_ids().map(|s| m.may(s).clone()).collect();
    Tsr::from_parts(
        m.name().to_string(),
        m.actions().clone(),
        m.states().clone(),
        m.initial(),
        responses,
        delta,
    )
}

pub fn rm(t: &Tsr) -> MixTs {
    rm_with_sinks(t).0
}

fn sink_name(states: &StateTable, state: &str, action: &str) -> String {
    let base = format!("{state}__req_{action}");
    if states.get(&base).is_none() {
        return base;
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|candidate| states.get(candidate).is_none())
        .expect("unbounded suffixes")
}

/// [`rm`] together with the sinks it created. Sinks follow the original
/// states, ordered by `(state, action)`.
pub fn rm_with_sinks(t: &Tsr) -> (MixTs, SinkMap) {
    let mut states = t.states().clone();
    let mut sinks = SinkMap::new();
    for s in t.state_ids() {
        for &a in t.responses(s) {
            if t.step(s, a).is_none() {
                let name = sink_name(&states, t.state_name(s), t.actions().name(a));
                let id = states.insert(name).expect("fresh name");
                sinks.insert((s, a), id);
            }
        }
    }
    let n = states.len();
    let mut may: Edges = vec![BTreeMap::new(); n];
    let mut must: Edges = vec![BTreeMap::new(); n];
    for s in t.state_ids() {
        may[s.index()] = t.outgoing(s).clone();
        for &a in t.responses(s) {
            let target = t.step(s, a).unwrap_or_else(|| sinks[&(s, a)]);
            must[s.index()].insert(a, target);
        }
    }
    let m = MixTs::from_parts(t.name().to_string(), t.actions().clone(), states, t.initial(), may, must);
    (m, sinks)
}

/// Normal form in which must edges say nothing beyond their action:
/// a must edge that has a may counterpart points to the may target, and a
/// must-only edge points to a sink reserved for it. Existing reserved sinks
/// (non-initial, no outgoing edges, no other incoming edge) are kept;
/// other must-only edges get a fresh `<state>__req_<action>` sink. States
/// left unreachable are retained.
pub fn canonicalize(m: &MixTs) -> MixTs {
    let n = m.states().len();
    let mut incoming = vec![0usize; n];
    for modality in [Modality::May, Modality::Must] {
        for (_, _, t) in m.transitions(modality) {
            incoming[t.index()] += 1;
        }
    }
    let reserved = |t: StateId| {
        t != m.initial() && incoming[t.index()] == 1 && m.may(t).is_empty() && m.must(t).is_empty()
    };

    let mut states = m.states().clone();
    let mut must: Edges = vec![BTreeMap::new(); n];
    for (s, a, t) in m.transitions(Modality::Must) {
        let target = match m.may_step(s, a) {
            Some(u) => u,
            None if reserved(t) => t,
            None => {
                let name = sink_name(&states, m.state_name(s), m.actions().name(a));
                let id = states.insert(name).expect("fresh name");
                must.push(BTreeMap::new());
                id
            }
        };
        must[s.index()].insert(a, target);
    }
    let mut may: Edges = m.state_ids().map(|s| m.may(s).clone()).collect();
    may.resize(states.len(), BTreeMap::new());
    MixTs::from_parts(m.name().to_string(), m.actions().clone(), states, m.initial(), may, must)
}

/// State bijection between the reachable parts of two mixed systems
/// preserving every may and must edge, if one exists.
///
/// Both relations are functional, so the mapping is forced from the
/// initial pair and a single synchronized search decides it.
pub fn iso_check(m1: &MixTs, m2: &MixTs) -> Option<BTreeMap<StateId, StateId>> {
    let (m1, m2) = align_mixts(m1, m2, AlphabetMode::Union).expect("union mode never fails");
    let (m1, m2) = (m1.as_ref(), m2.as_ref());
    let mut forward: HashMap<StateId, StateId> = HashMap::new();
    let mut backward: HashMap<StateId, StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    forward.insert(m1.initial(), m2.initial());
    backward.insert(m2.initial(), m1.initial());
    queue.push_back((m1.initial(), m2.initial()));
    while let Some((u, v)) = queue.pop_front() {
        for modality in [Modality::May, Modality::Must] {
            let (e1, e2) = (m1.edges(modality, u), m2.edges(modality, v));
            if e1.len() != e2.len() {
                return None;
            }
            for (a, &t1) in e1 {
                let t2 = *e2.get(a)?;
                match (forward.get(&t1), backward.get(&t2)) {
                    (None, None) => {
                        forward.insert(t1, t2);
                        backward.insert(t2, t1);
                        queue.push_back((t1, t2));
                    }
                    (Some(&x), Some(&y)) if x == t2 && y == t1 => {}
                    _ => return None,
                }
            }
        }
    }
    Some(forward.into_iter().collect())
}

/// Maps a TSR refinement to a refinement between the [`rm`] images by
/// relating the sinks of related states on the same action.
pub fn lift_refinement_to_mixts(relation: &Relation, t1: &Tsr, t2: &Tsr) -> Result<Relation, RefineError> {
    verify_refinement_relation(t1, t2, relation, false)?;
    let (_, sinks1) = rm_with_sinks(t1);
    let (_, sinks2) = rm_with_sinks(t2);
    let mut lifted = relation.clone();
    for &(s1, s2) in relation {
        for (&(_, a), &k1) in sinks1.range((s1, ActionId(0))..=(s1, ActionId(u32::MAX))) {
            if let Some(&k2) = sinks2.get(&(s2, a)) {
                lifted.insert((k1, k2));
            }
        }
    }
    Ok(lifted)
}

/// A mixed refinement is, unchanged, a refinement between the [`mr`] images.
pub fn transfer_refinement_to_tsr(relation: &Relation, m1: &MixTs, m2: &MixTs) -> Result<Relation, RefineError> {
    verify_mixts_relation(m1, m2, relation)?;
    verify_refinement_relation(&mr(m1), &mr(m2), relation, false)?;
    Ok(relation.clone())
}
