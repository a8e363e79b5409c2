//! Invariants checked over seeded random systems.

use std::collections::BTreeSet;

use proptest::prelude::*;

use tsr_core::analysis::{deadlock_states, is_deadlock_free};
use tsr_core::convert::{
    canonicalize, iso_check, lift_refinement_to_mixts, mr, rm, rm_with_sinks, transfer_refinement_to_tsr,
};
use tsr_core::language::{accepts, enumerate, includes};
use tsr_core::model::{reachable_states, ActionId, StateId, Trace, Tsr};
use tsr_core::refine::{
    check_mixts_refinement, check_refinement, check_safe_refinement, greatest_mixts_refinement_relation,
    greatest_refinement_relation, replay_pair, verify_mixts_relation, verify_refinement_relation, Relation,
    ViolationCode,
};
use tsr_core::testkit::{
    mutate_mixts_to_refinement, mutate_to_refinement, perturb, random_mixts, random_modal_tsr, random_tsr,
    MixTsParams, TsrParams,
};
use tsr_core::textio::{load_mixts, load_tsr, mixts_to_text, tsr_to_text};

fn small_tsr() -> impl Strategy<Value = Tsr> {
    (any::<u64>(), 1usize..=6, 1usize..=3, 0.2f64..0.9, 0.0f64..0.6)
        .prop_map(|(seed, n, k, d, r)| random_tsr(seed, TsrParams::new(n, k, d, r)))
}

fn mixts_params() -> impl Strategy<Value = MixTsParams> {
    (1usize..=8, 1usize..=3, 0.2f64..0.9, 0.0f64..0.7, 0.0f64..1.0).prop_map(|(nstates, nactions, may, must, shared)| {
        MixTsParams {
            nstates,
            nactions,
            may_density: may,
            must_density: must,
            shared_target: shared,
        }
    })
}

fn compose(r: &Relation, s: &Relation) -> Relation {
    r.iter()
        .flat_map(|&(a, b)| s.iter().filter(move |&&(c, _)| c == b).map(move |&(_, d)| (a, d)))
        .collect()
}

/// All words of length `len` over `k` actions.
fn words_of_length(k: usize, len: usize) -> Vec<Trace> {
    let mut words = vec![Vec::new()];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w: Vec<ActionId>| {
                (0..k).map(move |a| {
                    let mut w = w.clone();
                    w.push(ActionId(a as u32));
                    w
                })
            })
            .collect();
    }
    words.into_iter().map(Trace::new).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn delta_is_functional_and_may_set_agrees_with_scan(t in small_tsr()) {
        let mut seen = BTreeSet::new();
        for (s, a, _) in t.transitions() {
            prop_assert!(seen.insert((s, a)));
        }
        for s in t.state_ids() {
            let scanned: BTreeSet<ActionId> =
                t.transitions().filter(|&(src, _, _)| src == s).map(|(_, a, _)| a).collect();
            prop_assert_eq!(t.may_set(s), scanned);
        }
    }

    #[test]
    fn text_roundtrip_is_identity(t in small_tsr(), seed in any::<u64>(), p in mixts_params()) {
        prop_assert_eq!(load_tsr(&tsr_to_text(&t)).unwrap(), t);
        let m = random_mixts(seed, p);
        prop_assert_eq!(load_mixts(&mixts_to_text(&m)).unwrap(), m);
    }

    #[test]
    fn modal_systems_never_deadlock(seed in any::<u64>(), n in 1usize..=10, k in 1usize..=4) {
        let t = random_modal_tsr(seed, TsrParams::new(n, k, 0.4, 0.5));
        prop_assert!(deadlock_states(&t).deadlocked.is_empty());
    }

    #[test]
    fn deadlock_report_is_consistent(t in small_tsr()) {
        let report = deadlock_states(&t);
        let reachable = reachable_states(&t);
        let expected: BTreeSet<StateId> = report.deadlocked.intersection(&reachable).copied().collect();
        prop_assert_eq!(&report.reachable_deadlocked, &expected);
        prop_assert_eq!(report.deadlock_free, expected.is_empty());
    }

    #[test]
    fn rooted_check_matches_fixpoint_oracle(t in small_tsr(), seed in any::<u64>(), edits in 0usize..3, safe in any::<bool>()) {
        let mut concrete = mutate_to_refinement(&t, seed);
        for i in 0..edits {
            concrete = perturb(&concrete, seed.wrapping_add(i as u64));
        }
        let report = if safe { check_safe_refinement(&t, &concrete) } else { check_refinement(&t, &concrete) };
        let gfp = greatest_refinement_relation(&t, &concrete, safe);
        prop_assert_eq!(report.holds, gfp.contains(&(t.initial(), concrete.initial())));
        if let Some(rel) = &report.relation {
            prop_assert!(rel.is_subset(&gfp));
            verify_refinement_relation(&t, &concrete, rel, safe).unwrap();
        }
    }

    #[test]
    fn counterexamples_replay(t in small_tsr(), u in small_tsr()) {
        let report = check_safe_refinement(&t, &u);
        if let Some(cex) = report.counterexample {
            let (a, b) = (t.with_alphabet(&report.alphabet), u.with_alphabet(&report.alphabet));
            prop_assert_eq!(replay_pair(&a, &b, &cex.trace), Some(cex.pair));
            // the reported pair fails against any relation, in particular the full one
            let full: Relation = a.state_ids().flat_map(|x| b.state_ids().map(move |y| (x, y))).collect();
            let mut single = full.clone();
            single.retain(|&p| p == cex.pair || p == (a.initial(), b.initial()));
            prop_assert!(verify_refinement_relation(&a, &b, &single, true).is_err());
        } else {
            prop_assert!(report.holds);
        }
    }

    #[test]
    fn refinement_is_reflexive_and_transitive(t in small_tsr(), s1 in any::<u64>(), s2 in any::<u64>()) {
        prop_assert!(check_refinement(&t, &t).holds);
        let middle = mutate_to_refinement(&t, s1);
        let last = mutate_to_refinement(&middle, s2);
        let r12 = check_refinement(&t, &middle);
        let r23 = check_refinement(&middle, &last);
        prop_assert!(r12.holds && r23.holds);
        prop_assert!(check_refinement(&t, &last).holds);
        let composed = compose(r12.relation.as_ref().unwrap(), r23.relation.as_ref().unwrap());
        verify_refinement_relation(&t, &last, &composed, false).unwrap();
    }

    #[test]
    fn safe_refinement_preserves_deadlock_freedom(t in small_tsr(), seed in any::<u64>()) {
        let concrete = mutate_to_refinement(&t, seed);
        if check_safe_refinement(&t, &concrete).holds && is_deadlock_free(&t) {
            prop_assert!(is_deadlock_free(&concrete));
        }
    }

    #[test]
    fn successful_rooted_check_covers_concrete_reachable_states(t in small_tsr(), seed in any::<u64>()) {
        let concrete = mutate_to_refinement(&t, seed);
        let report = check_refinement(&t, &concrete);
        let covered: BTreeSet<StateId> = report.relation.unwrap().iter().map(|&(_, b)| b).collect();
        prop_assert_eq!(covered, reachable_states(&concrete));
    }

    #[test]
    fn membership_agrees_with_enumeration(t in small_tsr()) {
        let k = t.actions().len();
        let accepted: BTreeSet<Trace> = enumerate(&t, 5).unwrap().into_iter().collect();
        for len in 0..=5 {
            for w in words_of_length(k, len) {
                prop_assert_eq!(accepts(&t, &w).unwrap(), accepted.contains(&w));
            }
        }
    }

    #[test]
    fn inclusion_matches_bounded_enumeration(seed in any::<u64>(), n1 in 1usize..=3, n2 in 1usize..=3) {
        let t1 = random_tsr(seed, TsrParams::new(n1, 2, 0.6, 0.4));
        let t2 = random_tsr(seed ^ 0x9e37, TsrParams::new(n2, 2, 0.6, 0.4));
        // product has at most 9 pairs plus the sink column, so words of
        // length 12 exhaust every shortest counterexample
        let bound = (n1 + 1) * n2;
        let l1: BTreeSet<Trace> = enumerate(&t1, bound).unwrap().into_iter().collect();
        let l2: BTreeSet<Trace> = enumerate(&t2, bound).unwrap().into_iter().collect();
        let verdict = includes(&t1, &t2);
        prop_assert_eq!(verdict.holds, l2.is_subset(&l1));
        if let Some(w) = verdict.witness {
            prop_assert!(accepts(&t2, &w).unwrap() && !accepts(&t1, &w).unwrap());
            let shortest = l2.difference(&l1).min_by_key(|w| (w.len(), (*w).clone()));
            prop_assert_eq!(shortest, Some(&w));
        }
    }

    #[test]
    fn refinement_implies_inclusion(t in small_tsr(), u in small_tsr(), seed in any::<u64>()) {
        let concrete = mutate_to_refinement(&t, seed);
        prop_assert!(includes(&t, &concrete).holds);
        if check_refinement(&t, &u).holds {
            prop_assert!(includes(&t, &u).holds);
        }
    }

    #[test]
    fn mr_after_rm_restores_the_system(t in small_tsr()) {
        let (m, sinks) = rm_with_sinks(&t);
        let back = mr(&m);
        let n = t.states().len();
        prop_assert_eq!(back.states().len(), n + sinks.len());
        prop_assert_eq!(back.actions(), t.actions());
        prop_assert_eq!(back.initial(), t.initial());
        for s in t.state_ids() {
            prop_assert_eq!(back.responses(s), t.responses(s));
            prop_assert_eq!(back.outgoing(s), t.outgoing(s));
        }
        for &sink in sinks.values() {
            prop_assert!(sink.index() >= n && back.responses(sink).is_empty() && !back.has_outgoing(sink));
        }
        if sinks.is_empty() {
            prop_assert_eq!(back, t);
        }
    }

    #[test]
    fn rm_after_mr_is_canonical_form(seed in any::<u64>(), p in mixts_params()) {
        let m = random_mixts(seed, p);
        let canon = canonicalize(&m);
        prop_assert!(iso_check(&rm(&mr(&m)), &canon).is_some());
        prop_assert_eq!(canonicalize(&canon).clone(), canon);
    }

    #[test]
    fn modality_is_preserved_by_rm(t in small_tsr()) {
        prop_assert_eq!(t.is_modal(), rm(&t).must_within_may());
        prop_assert_eq!(canonicalize(&rm(&t)), rm(&t));
    }

    #[test]
    fn lifted_tsr_refinements_are_mixed_refinements(t in small_tsr(), seed in any::<u64>()) {
        let concrete = mutate_to_refinement(&t, seed);
        let rel = check_refinement(&t, &concrete).relation.unwrap();
        let lifted = lift_refinement_to_mixts(&rel, &t, &concrete).unwrap();
        prop_assert!(lifted.is_superset(&rel));
        verify_mixts_relation(&rm(&t), &rm(&concrete), &lifted).unwrap();
    }

    #[test]
    fn mixed_refinements_transfer_to_tsrs(seed in any::<u64>(), p in mixts_params()) {
        let m1 = random_mixts(seed, p);
        let m2 = mutate_mixts_to_refinement(&m1, seed);
        let report = check_mixts_refinement(&m1, &m2);
        prop_assert!(report.holds);
        let rel = report.relation.unwrap();
        let back = transfer_refinement_to_tsr(&rel, &m1, &m2).unwrap();
        verify_refinement_relation(&mr(&m1), &mr(&m2), &back, false).unwrap();
    }

    #[test]
    fn mixed_rooted_check_matches_fixpoint(seed in any::<u64>(), p in mixts_params(), other in any::<u64>()) {
        let m1 = random_mixts(seed, p);
        let m2 = if other % 2 == 0 { mutate_mixts_to_refinement(&m1, other) } else { random_mixts(other, p) };
        let report = check_mixts_refinement(&m1, &m2);
        let gfp = greatest_mixts_refinement_relation(&m1, &m2);
        prop_assert_eq!(report.holds, gfp.contains(&(m1.initial(), m2.initial())));
    }
}

#[test]
fn unsafe_pairs_report_deadlock_violation() {
    use tsr_core::testkit::mutate_to_unsafe_refinement;
    let mut found = 0;
    for seed in 0..300u64 {
        let t = random_tsr(seed, TsrParams::new(5, 2, 0.5, 0.4));
        if let Some(u) = mutate_to_unsafe_refinement(&t, seed) {
            let report = check_safe_refinement(&t, &u);
            assert_eq!(report.counterexample.unwrap().violation, ViolationCode::DeadlockNotReflected);
            found += 1;
        }
    }
    assert!(found > 0);
}
