//! Interned identifiers and the two system types.
//!
//! A [`Tsr`] is an action-deterministic labelled transition system whose
//! states carry a set of pending response actions. A [`MixTs`] keeps two
//! independent action-deterministic relations, `may` and `must`. Both types
//! are immutable once built: construction goes through [`TsrBuilder`] and
//! [`MixTsBuilder`], which reject anything violating the structural
//! invariants.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::marker::PhantomData;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense index of a state in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StateId(pub u32);

/// Dense index of an action in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ActionId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for ActionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

#[doc(hidden)]
pub trait DenseId: Copy + Ord {
    fn from_index(index: usize) -> Self;
    fn to_index(self) -> usize;
}

impl DenseId for StateId {
    fn from_index(index: usize) -> Self {
        StateId(u32::try_from(index).expect("state index overflow"))
    }
    fn to_index(self) -> usize {
        self.index()
    }
}

impl DenseId for ActionId {
    fn from_index(index: usize) -> Self {
        ActionId(u32::try_from(index).expect("action index overflow"))
    }
    fn to_index(self) -> usize {
        self.index()
    }
}

/// Ordered list of distinct names with a reverse lookup.
///
/// Ids are `0..n` in insertion order.
#[derive(Clone, Debug)]
pub struct SymbolTable<I> {
    names: Vec<String>,
    lookup: HashMap<String, usize>,
    _id: PhantomData<I>,
}

pub type ActionTable = SymbolTable<ActionId>;
pub type StateTable = SymbolTable<StateId>;

impl<I> Default for SymbolTable<I> {
    fn default() -> Self {
        SymbolTable {
            names: Vec::new(),
            lookup: HashMap::new(),
            _id: PhantomData,
        }
    }
}

impl<I> PartialEq for SymbolTable<I> {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
    }
}

impl<I> Eq for SymbolTable<I> {}

impl<I: DenseId> SymbolTable<I> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a table, failing on the first repeated name.
    pub fn from_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self, String> {
        let mut table = Self::new();
        for name in names {
            let name = name.into();
            if table.insert(name.clone()).is_none() {
                return Err(name);
            }
        }
        Ok(table)
    }

    /// Appends `name`; returns `None` if it is already present.
    pub fn insert(&mut self, name: String) -> Option<I> {
        if self.lookup.contains_key(&name) {
            return None;
        }
        let index = self.names.len();
        self.lookup.insert(name.clone(), index);
        self.names.push(name);
        Some(I::from_index(index))
    }

    /// Returns the id of `name`, appending it when absent.
    pub fn intern(&mut self, name: &str) -> I {
        match self.get(name) {
            Some(id) => id,
            None => self.insert(name.to_string()).expect("absent name"),
        }
    }

    pub fn get(&self, name: &str) -> Option<I> {
        self.lookup.get(name).map(|&i| I::from_index(i))
    }

    pub fn name(&self, id: I) -> &str {
        &self.names[id.to_index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn contains(&self, id: I) -> bool {
        id.to_index() < self.names.len()
    }

    pub fn ids(&self) -> impl Iterator<Item = I> + '_ {
        (0..self.names.len()).map(I::from_index)
    }

    /// Names of `self` followed by the names of `other` not already present.
    pub fn union(&self, other: &Self) -> Self {
        let mut merged = self.clone();
        for name in &other.names {
            merged.intern(name);
        }
        merged
    }

    /// Same set of names, ignoring order.
    pub fn same_names(&self, other: &Self) -> bool {
        self.len() == other.len() && self.names.iter().all(|n| other.lookup.contains_key(n))
    }
}

pub type ActionSet = BTreeSet<ActionId>;

/// Structural errors raised while building a system.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate transition from state `{state}` on action `{action}`")]
    DuplicateTransition { state: String, action: String },
    #[error("undeclared {what} `{name}`")]
    UndeclaredName { what: &'static str, name: String },
    #[error("{what} `{name}` declared twice")]
    DuplicateName { what: &'static str, name: String },
    #[error("no initial state declared")]
    MissingInitial,
    #[error("initial state declared twice")]
    DuplicateInitial,
}

/// A finite sequence of actions.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Trace {
    pub actions: Vec<ActionId>,
}

impl Trace {
    pub fn new(actions: Vec<ActionId>) -> Self {
        Trace { actions }
    }

    pub fn empty() -> Self {
        Trace::default()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Resolves names against `alphabet`; returns the first unknown name on failure.
    pub fn from_names<S: AsRef<str>>(alphabet: &ActionTable, names: &[S]) -> Result<Self, String> {
        names
            .iter()
            .map(|n| alphabet.get(n.as_ref()).ok_or_else(|| n.as_ref().to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(Trace::new)
    }

    pub fn names<'a>(&self, alphabet: &'a ActionTable) -> Vec<&'a str> {
        self.actions.iter().map(|&a| alphabet.name(a)).collect()
    }

    /// Space-separated action names.
    pub fn render(&self, alphabet: &ActionTable) -> String {
        self.names(alphabet).join(" ")
    }
}

/// Per-state partial map from actions to successors.
pub(crate) type Edges = Vec<BTreeMap<ActionId, StateId>>;

/// Anything with an initial state and a successor relation.
pub trait TransitionGraph {
    fn initial(&self) -> StateId;
    fn state_count(&self) -> usize;
    /// Successors of `s` over every relation of the system, with labels.
    fn labelled_successors(&self, s: StateId) -> Vec<(ActionId, StateId)>;
}

/// States reachable from the initial state.
pub fn reachable_states<G: TransitionGraph + ?Sized>(system: &G) -> BTreeSet<StateId> {
    let mut seen = vec![false; system.state_count()];
    let mut queue = VecDeque::new();
    seen[system.initial().index()] = true;
    queue.push_back(system.initial());
    while let Some(s) = queue.pop_front() {
        for (_, t) in system.labelled_successors(s) {
            if !seen[t.index()] {
                seen[t.index()] = true;
                queue.push_back(t);
            }
        }
    }
    seen.iter()
        .enumerate()
        .filter(|(_, &r)| r)
        .map(|(i, _)| StateId::from_index(i))
        .collect()
}

/// Transition system with responses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tsr {
    name: String,
    actions: ActionTable,
    states: StateTable,
    initial: StateId,
    responses: Vec<ActionSet>,
    delta: Edges,
}

impl Tsr {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self) -> &ActionTable {
        &self.actions
    }

    pub fn states(&self) -> &StateTable {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states.ids()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        self.states.name(s)
    }

    /// The response set of `s`.
    pub fn responses(&self, s: StateId) -> &ActionSet {
        &self.responses[s.index()]
    }

    pub fn step(&self, s: StateId, a: ActionId) -> Option<StateId> {
        self.delta[s.index()].get(&a).copied()
    }

    /// Outgoing transitions of `s`, ordered by action.
    pub fn outgoing(&self, s: StateId) -> &BTreeMap<ActionId, StateId> {
        &self.delta[s.index()]
    }

    /// Actions labelling outgoing transitions of `s`.
    pub fn may_set(&self, s: StateId) -> ActionSet {
        self.delta[s.index()].keys().copied().collect()
    }

    pub fn has_outgoing(&self, s: StateId) -> bool {
        !self.delta[s.index()].is_empty()
    }

    /// All transitions as `(source, action, target)` in `(source, action)` order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, ActionId, StateId)> + '_ {
        self.delta.iter().enumerate().flat_map(|(s, out)| {
            out.iter()
                .map(move |(&a, &t)| (StateId::from_index(s), a, t))
        })
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().map(BTreeMap::len).sum()
    }

    /// Every response action has an outgoing transition in the same state.
    pub fn is_modal(&self) -> bool {
        self.state_ids()
            .all(|s| self.responses(s).iter().all(|a| self.delta[s.index()].contains_key(a)))
    }

    /// Re-indexes actions against `alphabet`, which must contain every name of `self`.
    pub fn with_alphabet(&self, alphabet: &ActionTable) -> Tsr {
        let map = remap_actions(&self.actions, alphabet);
        Tsr {
            name: self.name.clone(),
            actions: alphabet.clone(),
            states: self.states.clone(),
            initial: self.initial,
            responses: self
                .responses
                .iter()
                .map(|set| set.iter().map(|a| map[a.index()]).collect())
                .collect(),
            delta: remap_edges(&self.delta, &map),
        }
    }

    pub(crate) fn from_parts(
        name: String,
        actions: ActionTable,
        states: StateTable,
        initial: StateId,
        responses: Vec<ActionSet>,
        delta: Edges,
    ) -> Tsr {
        debug_assert_eq!(responses.len(), states.len());
        debug_assert_eq!(delta.len(), states.len());
        Tsr {
            name,
            actions,
            states,
            initial,
            responses,
            delta,
        }
    }
}

impl TransitionGraph for Tsr {
    fn initial(&self) -> StateId {
        self.initial
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn labelled_successors(&self, s: StateId) -> Vec<(ActionId, StateId)> {
        self.delta[s.index()].iter().map(|(&a, &t)| (a, t)).collect()
    }
}

/// Mixed transition system with action-deterministic `may` and `must` relations.
///
/// `must` is not required to be contained in `may`, and when both relations
/// have an edge for the same `(state, action)` their targets may differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixTs {
    name: String,
    actions: ActionTable,
    states: StateTable,
    initial: StateId,
    may: Edges,
    must: Edges,
}

/// Which relation of a [`MixTs`] an edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    May,
    Must,
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modality::May => "may",
            Modality::Must => "must",
        })
    }
}

impl MixTs {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn actions(&self) -> &ActionTable {
        &self.actions
    }

    pub fn states(&self) -> &StateTable {
        &self.states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> + '_ {
        self.states.ids()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        self.states.name(s)
    }

    pub fn may(&self, s: StateId) -> &BTreeMap<ActionId, StateId> {
        &self.may[s.index()]
    }

    pub fn must(&self, s: StateId) -> &BTreeMap<ActionId, StateId> {
        &self.must[s.index()]
    }

    pub fn edges(&self, modality: Modality, s: StateId) -> &BTreeMap<ActionId, StateId> {
        match modality {
            Modality::May => self.may(s),
            Modality::Must => self.must(s),
        }
    }

    pub fn may_step(&self, s: StateId, a: ActionId) -> Option<StateId> {
        self.may[s.index()].get(&a).copied()
    }

    pub fn must_step(&self, s: StateId, a: ActionId) -> Option<StateId> {
        self.must[s.index()].get(&a).copied()
    }

    /// All edges of one relation in `(source, action)` order.
    pub fn transitions(&self, modality: Modality) -> impl Iterator<Item = (StateId, ActionId, StateId)> + '_ {
        let edges = match modality {
            Modality::May => &self.may,
            Modality::Must => &self.must,
        };
        edges.iter().enumerate().flat_map(|(s, out)| {
            out.iter()
                .map(move |(&a, &t)| (StateId::from_index(s), a, t))
        })
    }

    /// Every must edge is also a may edge with the same target.
    pub fn must_within_may(&self) -> bool {
        self.transitions(Modality::Must)
            .all(|(s, a, t)| self.may_step(s, a) == Some(t))
    }

    pub fn with_alphabet(&self, alphabet: &ActionTable) -> MixTs {
        let map = remap_actions(&self.actions, alphabet);
        MixTs {
            name: self.name.clone(),
            actions: alphabet.clone(),
            states: self.states.clone(),
            initial: self.initial,
            may: remap_edges(&self.may, &map),
            must: remap_edges(&self.must, &map),
        }
    }

    pub(crate) fn from_parts(
        name: String,
        actions: ActionTable,
        states: StateTable,
        initial: StateId,
        may: Edges,
        must: Edges,
    ) -> MixTs {
        debug_assert_eq!(may.len(), states.len());
        debug_assert_eq!(must.len(), states.len());
        MixTs {
            name,
            actions,
            states,
            initial,
            may,
            must,
        }
    }
}

impl TransitionGraph for MixTs {
    fn initial(&self) -> StateId {
        self.initial
    }

    fn state_count(&self) -> usize {
        self.states.len()
    }

    fn labelled_successors(&self, s: StateId) -> Vec<(ActionId, StateId)> {
        self.may[s.index()]
            .iter()
            .chain(self.must[s.index()].iter())
            .map(|(&a, &t)| (a, t))
            .collect()
    }
}

fn remap_actions(from: &ActionTable, to: &ActionTable) -> Vec<ActionId> {
    from.names()
        .iter()
        .map(|n| to.get(n).unwrap_or_else(|| panic!("action `{n}` missing from target alphabet")))
        .collect()
}

fn remap_edges(edges: &Edges, map: &[ActionId]) -> Edges {
    edges
        .iter()
        .map(|out| out.iter().map(|(a, &t)| (map[a.index()], t)).collect())
        .collect()
}

fn insert_edge(
    edges: &mut Edges,
    actions: &ActionTable,
    states: &StateTable,
    s: StateId,
    a: ActionId,
    t: StateId,
) -> Result<(), ModelError> {
    check_state(states, s)?;
    check_state(states, t)?;
    check_action(actions, a)?;
    let out = &mut edges[s.index()];
    if out.contains_key(&a) {
        return Err(ModelError::DuplicateTransition {
            state: states.name(s).to_string(),
            action: actions.name(a).to_string(),
        });
    }
    out.insert(a, t);
    Ok(())
}

fn check_state(states: &StateTable, s: StateId) -> Result<(), ModelError> {
    if states.contains(s) {
        Ok(())
    } else {
        Err(ModelError::UndeclaredName {
            what: "state",
            name: s.to_string(),
        })
    }
}

fn check_action(actions: &ActionTable, a: ActionId) -> Result<(), ModelError> {
    if actions.contains(a) {
        Ok(())
    } else {
        Err(ModelError::UndeclaredName {
            what: "action",
            name: a.to_string(),
        })
    }
}

fn state_table(names: Vec<String>) -> Result<StateTable, ModelError> {
    StateTable::from_names(names).map_err(|name| ModelError::DuplicateName { what: "state", name })
}

/// Incremental construction of a [`Tsr`].
#[derive(Clone, Debug)]
pub struct TsrBuilder {
    name: String,
    actions: ActionTable,
    states: StateTable,
    initial: StateId,
    responses: Vec<ActionSet>,
    delta: Edges,
}

impl TsrBuilder {
    /// `states` must be non-empty and distinct; `initial` indexes into it.
    pub fn new(
        name: impl Into<String>,
        actions: ActionTable,
        states: Vec<String>,
        initial: StateId,
    ) -> Result<Self, ModelError> {
        let states = state_table(states)?;
        if !states.contains(initial) {
            return Err(ModelError::MissingInitial);
        }
        let n = states.len();
        Ok(TsrBuilder {
            name: name.into(),
            actions,
            states,
            initial,
            responses: vec![ActionSet::new(); n],
            delta: vec![BTreeMap::new(); n],
        })
    }

    pub fn actions(&self) -> &ActionTable {
        &self.actions
    }

    pub fn states(&self) -> &StateTable {
        &self.states
    }

    pub fn transition(&mut self, s: StateId, a: ActionId, t: StateId) -> Result<&mut Self, ModelError> {
        insert_edge(&mut self.delta, &self.actions, &self.states, s, a, t)?;
        Ok(self)
    }

    pub fn response(&mut self, s: StateId, a: ActionId) -> Result<&mut Self, ModelError> {
        check_state(&self.states, s)?;
        check_action(&self.actions, a)?;
        self.responses[s.index()].insert(a);
        Ok(self)
    }

    /// Name-based transition, convenient for hand-written systems.
    pub fn trans(&mut self, s: &str, a: &str, t: &str) -> Result<&mut Self, ModelError> {
        let (s, a, t) = (self.state(s)?, self.action(a)?, self.state(t)?);
        self.transition(s, a, t)
    }

    /// Name-based response.
    pub fn respond(&mut self, s: &str, a: &str) -> Result<&mut Self, ModelError> {
        let (s, a) = (self.state(s)?, self.action(a)?);
        self.response(s, a)
    }

    fn state(&self, name: &str) -> Result<StateId, ModelError> {
        self.states.get(name).ok_or_else(|| ModelError::UndeclaredName {
            what: "state",
            name: name.to_string(),
        })
    }

    fn action(&self, name: &str) -> Result<ActionId, ModelError> {
        self.actions.get(name).ok_or_else(|| ModelError::UndeclaredName {
            what: "action",
            name: name.to_string(),
        })
    }

    pub fn build(self) -> Tsr {
        Tsr::from_parts(
            self.name,
            self.actions,
            self.states,
            self.initial,
            self.responses,
            self.delta,
        )
    }
}

/// Incremental construction of a [`MixTs`].
#[derive(Clone, Debug)]
pub struct MixTsBuilder {
    name: String,
    actions: ActionTable,
    states: StateTable,
    initial: StateId,
    may: Edges,
    must: Edges,
}

impl MixTsBuilder {
    pub fn new(
        name: impl Into<String>,
        actions: ActionTable,
        states: Vec<String>,
        initial: StateId,
    ) -> Result<Self, ModelError> {
        let states = state_table(states)?;
        if !states.contains(initial) {
            return Err(ModelError::MissingInitial);
        }
        let n = states.len();
        Ok(MixTsBuilder {
            name: name.into(),
            actions,
            states,
            initial,
            may: vec![BTreeMap::new(); n],
            must: vec![BTreeMap::new(); n],
        })
    }

    pub fn actions(&self) -> &ActionTable {
        &self.actions
    }

    pub fn states(&self) -> &StateTable {
        &self.states
    }

    pub fn edge(&mut self, modality: Modality, s: StateId, a: ActionId, t: StateId) -> Result<&mut Self, ModelError> {
        let edges = match modality {
            Modality::May => &mut self.may,
            Modality::Must => &mut self.must,
        };
        insert_edge(edges, &self.actions, &self.states, s, a, t)?;
        Ok(self)
    }

    pub fn named_edge(&mut self, modality: Modality, s: &str, a: &str, t: &str) -> Result<&mut Self, ModelError> {
        let lookup_state = |n: &str| {
            self.states.get(n).ok_or_else(|| ModelError::UndeclaredName {
                what: "state",
                name: n.to_string(),
            })
        };
        let (s, t) = (lookup_state(s)?, lookup_state(t)?);
        let a = self.actions.get(a).ok_or_else(|| ModelError::UndeclaredName {
            what: "action",
            name: a.to_string(),
        })?;
        self.edge(modality, s, a, t)
    }

    pub fn build(self) -> MixTs {
        MixTs::from_parts(
            self.name,
            self.actions,
            self.states,
            self.initial,
            self.may,
            self.must,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn actions(names: &[&str]) -> ActionTable {
        ActionTable::from_names(names.iter().copied()).unwrap()
    }

    fn states(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn symbol_table_ids_follow_declaration_order() {
        let table = actions(&["x", "y", "z"]);
        assert_eq!(table.get("y"), Some(ActionId(1)));
        assert_eq!(table.name(ActionId(2)), "z");
        assert_eq!(ActionTable::from_names(["a", "a"]).unwrap_err(), "a");
    }

    #[test]
    fn union_keeps_left_order() {
        let u = actions(&["b", "a"]).union(&actions(&["c", "a"]));
        assert_eq!(u.names(), &["b", "a", "c"]);
    }

    #[test]
    fn single_state_system_is_valid() {
        let t = TsrBuilder::new("x", ActionTable::new(), states(&["s0"]), StateId(0))
            .unwrap()
            .build();
        assert_eq!(t.states().len(), 1);
        assert!(t.responses(StateId(0)).is_empty());
        assert!(t.may_set(StateId(0)).is_empty());
        assert_eq!(reachable_states(&t), [StateId(0)].into_iter().collect());
    }

    #[test]
    fn duplicate_transition_rejected() {
        let mut b = TsrBuilder::new("x", actions(&["a"]), states(&["s0", "s1", "s2"]), StateId(0)).unwrap();
        b.trans("s0", "a", "s1").unwrap();
        let err = b.trans("s0", "a", "s2").unwrap_err();
        assert_eq!(
            err,
            ModelError::DuplicateTransition {
                state: "s0".into(),
                action: "a".into()
            }
        );
    }

    #[test]
    fn duplicate_must_edge_rejected() {
        let mut b = MixTsBuilder::new("m", actions(&["a"]), states(&["s", "t1", "t2"]), StateId(0)).unwrap();
        b.named_edge(Modality::Must, "s", "a", "t1").unwrap();
        // may and must are independent relations
        b.named_edge(Modality::May, "s", "a", "t2").unwrap();
        assert!(matches!(
            b.named_edge(Modality::Must, "s", "a", "t2"),
            Err(ModelError::DuplicateTransition { .. })
        ));
    }

    #[test]
    fn undeclared_and_initial_errors() {
        let err = TsrBuilder::new("x", ActionTable::new(), states(&["s0"]), StateId(3)).unwrap_err();
        assert_eq!(err, ModelError::MissingInitial);
        let err = TsrBuilder::new("x", ActionTable::new(), states(&["s0", "s0"]), StateId(0)).unwrap_err();
        assert!(matches!(err, ModelError::DuplicateName { what: "state", .. }));
        let mut b = TsrBuilder::new("x", actions(&["a"]), states(&["s0"]), StateId(0)).unwrap();
        assert!(matches!(
            b.respond("s0", "b"),
            Err(ModelError::UndeclaredName { what: "action", .. })
        ));
    }

    #[test]
    fn with_alphabet_preserves_names() {
        let mut b = TsrBuilder::new("x", actions(&["a", "b"]), states(&["s0", "s1"]), StateId(0)).unwrap();
        b.trans("s0", "b", "s1").unwrap().respond("s0", "a").unwrap();
        let t = b.build();
        let wide = actions(&["c", "b", "a"]);
        let u = t.with_alphabet(&wide);
        assert_eq!(u.step(StateId(0), ActionId(1)), Some(StateId(1)));
        assert_eq!(u.responses(StateId(0)), &[ActionId(2)].into_iter().collect());
    }

    #[test]
    fn trace_names_roundtrip() {
        let table = actions(&["a", "b"]);
        let tr = Trace::from_names(&table, &["b", "a"]).unwrap();
        assert_eq!(tr.render(&table), "b a");
        assert_eq!(Trace::from_names(&table, &["q"]).unwrap_err(), "q");
    }
}
