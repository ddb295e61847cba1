mod common;

use common::*;
use drl_core::algebra::{prune_subsumed, Constraint};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn naive(cs: &[Constraint]) -> Vec<Constraint> {
    let mut sorted = cs.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut kept: Vec<Constraint> = Vec::new();
    for c in sorted {
        if kept.iter().any(|k| k.subsumes(&c)) {
            continue;
        }
        kept.retain(|k| !c.subsumes(k));
        kept.push(c);
    }
    kept.sort();
    kept
}

fn random_clauses(seed: u64) -> Vec<Constraint> {
    let mut rng = rng(seed);
    let d = rng.gen_range(1..=3);
    let n = rng.gen_range(1..=14);
    // small coefficient range so parallel disjuncts and subsumption are common
    (0..n)
        .filter_map(|_| {
            let k = rng.gen_range(1..=3);
            let ds: Vec<_> = (0..k)
                .map(|_| {
                    let v = rng.gen_range(0..d);
                    let s = if rng.gen_bool(0.5) { 1 } else { -1 };
                    ineq(&[(v, s)], rng.gen_range(-3..=3))
                })
                .collect();
            Constraint::build(ds)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn indexed_pruning_matches_pairwise(seed in any::<u64>()) {
        let cs = random_clauses(seed);
        prop_assert_eq!(prune_subsumed(cs.clone()), naive(&cs));
    }

    #[test]
    fn pruned_set_covers_and_is_an_antichain(seed in any::<u64>()) {
        let cs = random_clauses(seed);
        let kept = prune_subsumed(cs.clone());
        for c in &cs {
            prop_assert!(kept.iter().any(|k| k.subsumes(c)));
        }
        for (i, a) in kept.iter().enumerate() {
            for (j, b) in kept.iter().enumerate() {
                prop_assert!(i == j || !a.subsumes(b));
            }
        }
    }

    #[test]
    fn subsumption_is_entailment_on_points(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let a = random_constraint(&mut rng, 3, 2, None);
        let b = random_constraint(&mut rng, 3, 3, None);
        if a.subsumes(&b) {
            for _ in 0..50 {
                let p: Vec<Q> = (0..3).map(|_| qr(rng.gen_range(-60..=60), 4)).collect();
                prop_assert!(!holds(&a, &p) || holds(&b, &p));
            }
        }
    }

    #[test]
    fn build_is_canonical(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let ds: Vec<_> = (0..rng.gen_range(1..=5)).map(|_| random_ineq(&mut rng, 3, 6)).collect();
        let mut shuffled = ds.clone();
        shuffled.shuffle(&mut rng);
        let a = Constraint::build(ds.clone());
        prop_assert_eq!(&a, &Constraint::build(shuffled));
        if let Some(c) = &a {
            prop_assert_eq!(Some(c.clone()), Constraint::build(c.disjuncts().to_vec()));
        }
        for _ in 0..30 {
            let p: Vec<Q> = (0..3).map(|_| qr(rng.gen_range(-60..=60), 4)).collect();
            let any = ds.iter().any(|d| value(d, &p) >= q(0));
            // None means the clause is a tautology
            prop_assert_eq!(any, a.as_ref().is_none_or(|c| holds(c, &p)));
        }
    }
}
