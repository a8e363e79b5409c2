//! Seeded generators for random systems and refinement-preserving mutations.
//!
//! Everything here is a pure function of its seed and parameters, so a
//! failing property case can be replayed from the printed seed.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    reachable_states, ActionId, ActionSet, ActionTable, MixTs, MixTsBuilder, Modality, StateId, Tsr, TsrBuilder,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TsrParams {
    pub nstates: usize,
    pub nactions: usize,
    /// Probability that `delta(s, a)` is defined.
    pub density: f64,
    /// Probability that `a` is a response of `s`.
    pub response_rate: f64,
}

impl TsrParams {
    pub fn new(nstates: usize, nactions: usize, density: f64, response_rate: f64) -> Self {
        TsrParams {
            nstates,
            nactions,
            density,
            response_rate,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixTsParams {
    pub nstates: usize,
    pub nactions: usize,
    pub may_density: f64,
    pub must_density: f64,
    /// Probability that a must edge with a may counterpart shares its target.
    pub shared_target: f64,
}

/// How aggressively [`mutate_with`] changes a system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MutationParams {
    /// Probability of deleting a transition whose action is not a response.
    pub delete_rate: f64,
    /// Probability of adding each missing action to a response set.
    pub grow_rate: f64,
}

impl Default for MutationParams {
    fn default() -> Self {
        MutationParams {
            delete_rate: 0.3,
            grow_rate: 0.15,
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Actions `a0, a1, ...`.
pub fn alphabet(nactions: usize) -> ActionTable {
    ActionTable::from_names((0..nactions).map(|i| format!("a{i}"))).expect("distinct names")
}

fn state_names(nstates: usize) -> Vec<String> {
    (0..nstates).map(|i| format!("s{i}")).collect()
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateId {
    StateId(rng.gen_range(0..n) as u32)
}

fn generate_tsr(seed: u64, p: TsrParams, modal: bool) -> Tsr {
    assert!(p.nstates >= 1, "a system needs a state");
    let mut rng = rng(seed);
    let mut b = TsrBuilder::new(
        format!("random_{seed}"),
        alphabet(p.nactions),
        state_names(p.nstates),
        StateId(0),
    )
    .expect("generated names are distinct");
    for s in 0..p.nstates {
        let s = StateId(s as u32);
        let mut enabled = Vec::new();
        for a in 0..p.nactions {
            let a = ActionId(a as u32);
            if rng.gen_bool(p.density) {
                let t = random_state(&mut rng, p.nstates);
                b.transition(s, a, t).expect("fresh (state, action)");
                enabled.push(a);
            }
        }
        for a in 0..p.nactions {
            let a = ActionId(a as u32);
            let allowed = !modal || enabled.contains(&a);
            if rng.gen_bool(p.response_rate) && allowed {
                b.response(s, a).expect("declared");
            }
        }
    }
    b.build()
}

pub fn random_tsr(seed: u64, params: TsrParams) -> Tsr {
    generate_tsr(seed, params, false)
}

/// Like [`random_tsr`] with responses drawn only from enabled actions.
pub fn random_modal_tsr(seed: u64, params: TsrParams) -> Tsr {
    generate_tsr(seed, params, true)
}

pub fn random_mixts(seed: u64, p: MixTsParams) -> MixTs {
    assert!(p.nstates >= 1, "a system needs a state");
    let mut rng = rng(seed);
    let mut b = MixTsBuilder::new(
        format!("random_{seed}"),
        alphabet(p.nactions),
        state_names(p.nstates),
        StateId(0),
    )
    .expect("generated names are distinct");
    for s in 0..p.nstates {
        let s = StateId(s as u32);
        for a in 0..p.nactions {
            let a = ActionId(a as u32);
            let may_target = rng.gen_bool(p.may_density).then(|| random_state(&mut rng, p.nstates));
            if let Some(t) = may_target {
                b.edge(Modality::May, s, a, t).expect("fresh edge");
            }
            if rng.gen_bool(p.must_density) {
                let t = match may_target {
                    Some(t) if rng.gen_bool(p.shared_target) => t,
                    _ => random_state(&mut rng, p.nstates),
                };
                b.edge(Modality::Must, s, a, t).expect("fresh edge");
            }
        }
    }
    b.build()
}

fn rebuild(t: &Tsr, responses: Vec<ActionSet>, delta: Vec<BTreeMap<ActionId, StateId>>) -> Tsr {
    Tsr::from_parts(
        t.name().to_string(),
        t.actions().clone(),
        t.states().clone(),
        t.initial(),
        responses,
        delta,
    )
}

/// A system that `t` refines into under the identity relation, using the
/// default mutation rates.
pub fn mutate_to_refinement(t: &Tsr, seed: u64) -> Tsr {
    mutate_with(t, seed, MutationParams::default())
}

/// Deletes only transitions on non-response actions and only grows response
/// sets, so the identity relation stays a refinement.
pub fn mutate_with(t: &Tsr, seed: u64, params: MutationParams) -> Tsr {
    let mut rng = rng(seed);
    let mut responses = Vec::with_capacity(t.states().len());
    let mut delta = Vec::with_capacity(t.states().len());
    for s in t.state_ids() {
        let kept: BTreeMap<ActionId, StateId> = t
            .outgoing(s)
            .iter()
            .filter(|(a, _)| t.responses(s).contains(a) || !rng.gen_bool(params.delete_rate))
            .map(|(&a, &d)| (a, d))
            .collect();
        let mut grown = t.responses(s).clone();
        for a in t.actions().ids() {
            if !grown.contains(&a) && rng.gen_bool(params.grow_rate) {
                grown.insert(a);
            }
        }
        responses.push(grown);
        delta.push(kept);
    }
    rebuild(t, responses, delta)
}

/// A refinement of `t` under the identity relation that introduces a
/// reachable deadlock, or `None` when `t` offers no suitable state.
///
/// Picks a reachable state that is not deadlocked and either has
/// obligations none of which it can take (its transitions are deleted) or
/// is an accepting dead end (it gains an obligation).
pub fn mutate_to_unsafe_refinement(t: &Tsr, seed: u64) -> Option<Tsr> {
    let mut rng = rng(seed);
    let reachable = reachable_states(t);
    let candidates: Vec<StateId> = reachable
        .into_iter()
        .filter(|&s| {
            let responses = t.responses(s);
            let strandable = !responses.is_empty()
                && t.has_outgoing(s)
                && responses.iter().all(|a| t.step(s, *a).is_none());
            let dead_end = responses.is_empty() && !t.has_outgoing(s) && !t.actions().is_empty();
            strandable || dead_end
        })
        .collect();
    let &victim = candidates.choose(&mut rng)?;
    let mut responses: Vec<ActionSet> = t.state_ids().map(|s| t.responses(s).clone()).collect();
    let mut delta: Vec<BTreeMap<ActionId, StateId>> = t.state_ids().map(|s| t.outgoing(s).clone()).collect();
    if t.has_outgoing(victim) {
        delta[victim.index()].clear();
    } else {
        let a = ActionId(rng.gen_range(0..t.actions().len()) as u32);
        responses[victim.index()].insert(a);
    }
    Some(rebuild(t, responses, delta))
}

/// One arbitrary edit to `t`: add or retarget a transition, delete any
/// transition, or drop a response. The result may or may not refine `t`.
pub fn perturb(t: &Tsr, seed: u64) -> Tsr {
    let mut rng = rng(seed);
    let mut responses: Vec<ActionSet> = t.state_ids().map(|s| t.responses(s).clone()).collect();
    let mut delta: Vec<BTreeMap<ActionId, StateId>> = t.state_ids().map(|s| t.outgoing(s).clone()).collect();
    let n = t.states().len();
    if t.actions().is_empty() {
        return t.clone();
    }
    let s = random_state(&mut rng, n);
    let a = ActionId(rng.gen_range(0..t.actions().len()) as u32);
    match rng.gen_range(0..3) {
        0 => {
            delta[s.index()].insert(a, random_state(&mut rng, n));
        }
        1 => {
            delta[s.index()].remove(&a);
        }
        _ => {
            responses[s.index()].remove(&a);
        }
    }
    rebuild(t, responses, delta)
}

/// A mixed system that `m` refines into under the identity relation:
/// may edges without a must counterpart may be deleted, and must edges may
/// be added where none exist.
pub fn mutate_mixts_to_refinement(m: &MixTs, seed: u64) -> MixTs {
    let mut rng = rng(seed);
    let params = MutationParams::default();
    let n = m.states().len();
    let mut b = MixTsBuilder::new(m.name(), m.actions().clone(), m.states().names().to_vec(), m.initial())
        .expect("names of a valid system");
    for s in m.state_ids() {
        for (&a, &d) in m.may(s) {
            if m.must(s).contains_key(&a) || !rng.gen_bool(params.delete_rate) {
                b.edge(Modality::May, s, a, d).expect("fresh edge");
            }
        }
    }
    let kept_may = b.clone().build();
    for s in m.state_ids() {
        for a in m.actions().ids() {
            if let Some(d) = m.must_step(s, a) {
                b.edge(Modality::Must, s, a, d).expect("fresh edge");
            } else if rng.gen_bool(params.grow_rate) {
                let d = kept_may.may_step(s, a).unwrap_or_else(|| random_state(&mut rng, n));
                b.edge(Modality::Must, s, a, d).expect("fresh edge");
            }
        }
    }
    b.build()
}
