//! Property-based invariants over randomly generated systems, utility
//! functions, and sequences.

use proptest::prelude::*;

use worldseq::aggregate::{
    sigma_blame_core, sigma_mean_core, sigma_occ_core, Aggregator, UtilityFunction,
};
use worldseq::model::{closure, occ, Action, ArcMode, Literal, TransitionSystem, World};
use worldseq::properties::search::{all_sequences, synthetic_system};
use worldseq::Rational;

/// A random universe: up to 5 worlds over up to 6 propositions, plus up to
/// 5 actions with random preconditions and effects.
fn arb_universe() -> impl Strategy<Value = (Vec<World>, Vec<Action>)> {
    let props = ["p1", "p2", "p3", "p4", "p5", "p6"];
    let world = proptest::collection::vec(any::<bool>(), props.len());
    let worlds = proptest::collection::vec(world, 1..=5).prop_map(move |rows| {
        rows.iter()
            .enumerate()
            .map(|(i, row)| {
                World::new(
                    format!("w{i}"),
                    props
                        .iter()
                        .zip(row)
                        .filter(|(_, on)| **on)
                        .map(|(p, _)| p.to_string()),
                )
            })
            .collect::<Vec<_>>()
    });
    let action = (
        proptest::collection::vec(any::<bool>(), props.len()),
        proptest::collection::vec(proptest::option::of(any::<bool>()), props.len()),
    );
    let actions = proptest::collection::vec(action, 0..=5).prop_map(move |rows| {
        rows.iter()
            .enumerate()
            .map(|(i, (pre, post))| {
                Action::new(
                    format!("a{i}"),
                    props
                        .iter()
                        .zip(pre)
                        .filter(|(_, on)| **on)
                        .map(|(p, _)| p.to_string()),
                    props.iter().zip(post).filter_map(|(p, sign)| {
                        sign.map(|s| {
                            if s {
                                Literal::pos(*p)
                            } else {
                                Literal::neg(*p)
                            }
                        })
                    }),
                )
            })
            .collect::<Vec<_>>()
    });
    (worlds, actions)
}

fn arb_utilities(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec((-100i64..=100).prop_map(|n| Rational::new(n, 100)), n)
}

proptest! {
    /// Closure is extensive, monotone, and idempotent.
    #[test]
    fn closure_is_a_kernel_operator((worlds, actions) in arb_universe(), split in any::<prop::sample::Index>()) {
        let k = split.index(worlds.len() + 1);
        let small: Vec<&World> = worlds[..k.min(1)].iter().collect();
        let seed: Vec<&World> = worlds[..k].iter().collect();

        let closed = closure(&seed, &actions, &worlds);
        // extensive: every seed world stays in its closure
        for w in &seed {
            prop_assert!(closed.contains(&w.id));
        }
        // monotone: a subset of the seed closes to a subset
        let closed_small = closure(&small, &actions, &worlds);
        prop_assert!(closed_small.is_subset(&closed));
        // idempotent: closing the closure adds nothing
        let reseeded: Vec<&World> = worlds.iter().filter(|w| closed.contains(&w.id)).collect();
        prop_assert_eq!(&closure(&reseeded, &actions, &worlds), &closed);
    }

    /// Derived arcs agree with `directly_accessible`, and every validated
    /// sequence concatenation preserves occurrence counts additively on the
    /// shared boundary-free part.
    #[test]
    fn occ_is_additive_over_concatenation(n in 1usize..=3, pick in any::<prop::sample::Index>()) {
        let ts = synthetic_system(n);
        let seqs = all_sequences(&ts, 4);
        let a = &seqs[pick.index(seqs.len())];
        let b = &seqs[pick.index(seqs.len() / 2 + 1)];
        let sa = ts.validate_sequence(a).unwrap();
        let sb = ts.validate_sequence(b).unwrap();
        if let Ok(joined) = ts.concat(&sa, &sb) {
            for id in ts.world_ids() {
                prop_assert_eq!(occ(id, &joined), occ(id, &sa) + occ(id, &sb));
            }
            // size counts transitions, and gluing adds the boundary arc
            prop_assert_eq!(joined.size(), sa.size() + sb.size() + 1);
        }
    }

    /// sigma_occ dominates sigma_blame, and both stay within [-1, 0] while
    /// sigma_mean stays within [-1, 1].
    #[test]
    fn dominance_and_range(n in 1usize..=3, us in arb_utilities(3), pick in any::<prop::sample::Index>()) {
        let ts = synthetic_system(n);
        let seqs = all_sequences(&ts, 4);
        let ids = &seqs[pick.index(seqs.len())];
        let u = |id: &String| us[ts.world_ids().position(|w| w == id).unwrap()];
        let blame = sigma_blame_core(ids, u);
        let occ_score = sigma_occ_core(ids, u);
        let mean = sigma_mean_core(ids, u);
        let zero = Rational::from_integer(0);
        let one = Rational::from_integer(1);
        prop_assert!(occ_score >= blame);
        prop_assert!(blame >= -one && blame <= zero);
        prop_assert!(occ_score >= -one && occ_score <= zero);
        prop_assert!(mean >= -one && mean <= one);
    }

    /// Deleting a world that a sequence never visits leaves every
    /// aggregator's score unchanged.
    #[test]
    fn independence_by_deletion(us in arb_utilities(3), pick in any::<prop::sample::Index>()) {
        let ts = synthetic_system(3);
        let seqs = all_sequences(&ts, 4);
        let ids = &seqs[pick.index(seqs.len())];
        let absent: Vec<&str> = ts.world_ids().filter(|w| !ids.contains(&w.to_string())).collect();
        prop_assume!(!absent.is_empty());
        let u = UtilityFunction::new(
            ts.world_ids().zip(us.iter()).map(|(w, v)| (w.to_string(), *v)),
        ).unwrap();
        let seq = ts.validate_sequence(ids).unwrap();
        let smaller = ts.without_world(absent[0]).unwrap();
        let seq_again = smaller.validate_sequence(ids).unwrap();
        let u_small = u.restrict_to(smaller.world_ids());
        for agg in Aggregator::ALL {
            prop_assert_eq!(
                agg.evaluate(&seq, &u).unwrap(),
                agg.evaluate(&seq_again, &u_small).unwrap()
            );
        }
    }

    /// Building in derived mode then validating any enumerated sequence
    /// round-trips: each step is an arc with a defined label.
    #[test]
    fn enumerated_sequences_validate((worlds, actions) in arb_universe()) {
        let initial = worlds[0].id.clone();
        let ts = TransitionSystem::build(worlds, actions, &initial, ArcMode::Derived, &[]).unwrap();
        for ids in all_sequences(&ts, 3) {
            let seq = ts.validate_sequence(&ids).unwrap();
            prop_assert_eq!(ts.action_trace(&seq).len(), seq.size());
            for pair in ids.windows(2) {
                prop_assert!(ts.has_arc(&pair[0], &pair[1]));
                prop_assert!(ts.label(&pair[0], &pair[1]).is_some());
            }
        }
    }
}
