//! Transition systems with responses (TSRs) and action-deterministic mixed
//! transition systems.
//!
//! A TSR is a labelled transition system, deterministic per action, whose
//! states carry a set of response actions that are still owed. A state with
//! no pending responses is accepting; a state with pending responses and no
//! transitions is deadlocked.
//!
//! The crate validates and converts between the two models, decides
//! (safe) refinement with shortest counterexamples, and answers
//! finite-trace language questions.

pub mod analysis;
pub mod convert;
pub mod language;
pub mod model;
pub mod refine;
pub mod testkit;
pub mod textio;

pub use analysis::{accepting_states, check_modal_deadlock_lemma, deadlock_states, DeadlockReport};
pub use convert::{canonicalize, iso_check, lift_refinement_to_mixts, mr, rm, transfer_refinement_to_tsr};
pub use language::{accepts, enumerate, equivalent, includes, is_empty, LanguageError, LanguageVerdict};
pub use model::{
    reachable_states, ActionId, ActionTable, MixTs, MixTsBuilder, ModelError, Modality, StateId, Trace, Tsr,
    TsrBuilder,
};
pub use refine::{
    check_mixts_refinement, check_refinement, check_refinement_with, check_safe_refinement,
    greatest_mixts_refinement_relation, greatest_refinement_relation, AlphabetMode, Counterexample, RefineError,
    RefineOptions, RefinementReport, Relation, ViolationCode,
};
pub use textio::{load, parse, serialize, validate_mixts, validate_tsr, System, SystemDoc, TextError};
