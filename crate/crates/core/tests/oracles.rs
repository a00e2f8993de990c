//! Exhaustive cross-checks on small instances.

use liar_search::decoder::{
    consistent_scenarios, decode_generic, t_star, t_star_intersection, PartitionAssignment,
    TStarIntersection,
};
use liar_search::model::{answers_for, AnswerSequence, ElementSet, MultiFamily, Scenario, Verdict};
use liar_search::search::{enumerate_families, min_family_size, min_family_size_with, SearchOptions};
use liar_search::strategies::{
    multi_round_plan, optimal_one_lie_family, singleton_family_no_lie, two_round_plan, TruthfulOracle,
};
use liar_search::verifier::{check_coverage, check_partition_condition, solves, solves_flat};

#[test]
fn lie_free_singletons_decode_to_the_smallest_excellent() {
    for n in 0..=10 {
        let f = singleton_family_no_lie(n).unwrap();
        for bits in 0..1u128 << n {
            let t = ElementSet::from_bits(bits);
            let answers = answers_for(&f, &Scenario::truthful(t)).unwrap();
            let expected = t.min().map_or(Verdict::NoExcellent, Verdict::Found);
            assert_eq!(decode_generic(&f, &answers, 0).unwrap(), expected, "n={n} T={t}");
        }
    }
}

#[test]
fn optimal_family_passes_both_conditions() {
    for n in 1..=6 {
        let f = optimal_one_lie_family(n).unwrap();
        assert!(check_coverage(&f).covered);
        assert!((1..=n).all(|x| f.coverage_of(x) == 3));
        assert!(check_partition_condition(&f).unwrap().holds, "n = {n}");
        assert!(solves(&f, 1).unwrap().solves, "n = {n}");
    }
}

#[test]
fn t_star_is_the_one_lie_explanation_set() {
    // Putting the YES answers in F1 makes T* the sets explaining those
    // answers with at most one lie.
    for n in 1..=3 {
        let f = optimal_one_lie_family(n).unwrap();
        let m = f.len();
        for bits in 0..1u64 << m {
            let answers = AnswerSequence::from_bits(bits, m);
            if answers.count_yes() < 2 {
                continue;
            }
            let assignment = PartitionAssignment::from_answers(&answers);
            let members = t_star(&f, &assignment).unwrap();
            assert_eq!(members, consistent_scenarios(&f, &answers, 1).unwrap());
            let common = t_star_intersection(&f, &assignment).unwrap();
            match decode_generic(&f, &answers, 1).unwrap() {
                Verdict::Inconsistent => assert_eq!(common, TStarIntersection::EmptyFamily),
                Verdict::Found(x) => match common {
                    TStarIntersection::Intersection(s) => assert_eq!(s.min(), Some(x)),
                    other => panic!("{answers}: {other:?}"),
                },
                other => panic!("{answers}: unexpected {other:?} with two YES answers"),
            }
        }
    }
}

#[test]
fn pruning_never_changes_the_minimum() {
    for n in 1..=3 {
        let pruned = min_family_size(n, 2 * n + 1).unwrap();
        let unpruned = min_family_size_with(n, 2 * n + 1, SearchOptions { prune: false }).unwrap();
        assert_eq!(pruned.min_size, unpruned.min_size, "n = {n}");
        assert_eq!(pruned.witnesses, unpruned.witnesses, "n = {n}");
        assert_eq!(pruned.families_examined, unpruned.families_examined);
        assert!(pruned.fully_checked < unpruned.fully_checked);
    }
}

#[test]
fn search_witnesses_solve_without_pruning() {
    for n in 1..=4 {
        let report = min_family_size(n, 2 * n + 1).unwrap();
        assert!(!report.witnesses.is_empty());
        for w in &report.witnesses {
            assert_eq!(w.len(), 2 * n + 1);
            assert!(solves(w, 1).unwrap().solves);
        }
    }
}

#[test]
fn a_fourth_copy_never_changes_solvability() {
    // Multiplicities are capped at 3: raising any member from 3 to 4 copies
    // must not turn a non-solving family into a solving one, or vice versa.
    let mut compared = 0;
    for n in 1..=2 {
        for m in 3..=6 {
            for f in enumerate_families(n, m, false).unwrap() {
                for e in f.entries().iter().filter(|e| e.multiplicity == 3) {
                    let mut flat = f.flat();
                    flat.push(e.query);
                    assert_eq!(
                        solves_flat(n, &flat, 1).unwrap().solves,
                        solves(&f, 1).unwrap().solves,
                        "{f:?} plus {}",
                        e.query
                    );
                    compared += 1;
                }
            }
        }
    }
    assert!(compared > 0);
}

fn hidden_sets_for_rounds(n: usize) -> Vec<ElementSet> {
    if n <= 16 {
        return (0..1u128 << n).map(ElementSet::from_bits).collect();
    }
    // Runs depend on which block is the lowest YES, so sweep every
    // singleton, every suffix and every pair of adjacent elements.
    let mut sets = vec![ElementSet::EMPTY];
    for x in 1..=n {
        sets.push(ElementSet::singleton(x));
        sets.push(ElementSet::range(x, n));
        if x < n {
            sets.push(ElementSet::range(x, x + 1));
        }
    }
    sets
}

#[test]
fn round_plans_sweep() {
    for n in 1..=64 {
        let plan = two_round_plan(n).unwrap();
        assert!(plan.length() <= plan.length_bound());
        for t in hidden_sets_for_rounds(n) {
            let run = plan.run(&mut TruthfulOracle::new(t));
            assert!(run.verdict.is_correct_for(t), "n={n} T={t}");
        }
    }
    for n in 1..=27 {
        let plan = multi_round_plan(n, 3).unwrap();
        assert!(plan.length() <= plan.length_bound());
        for t in hidden_sets_for_rounds(n) {
            let run = plan.run(&mut TruthfulOracle::new(t));
            assert!(run.verdict.is_correct_for(t), "n={n} T={t}");
            assert!(run.questions <= plan.length());
        }
    }
}

#[test]
fn whole_set_thrice_fails_only_the_partition_condition() {
    for n in 2..=4 {
        let f = MultiFamily::new(n, [(ElementSet::full(n), 3)]).unwrap();
        assert!(check_coverage(&f).covered);
        assert!(!check_partition_condition(&f).unwrap().holds);
        assert!(!solves(&f, 1).unwrap().solves);
    }
}
