mod common;

use std::collections::BTreeMap;

use gpt_core::boxes::pr_state;
use gpt_core::protocols::{
    anf, bits_from_hex, bits_to_hex, detection_probability, detection_probability_by_branches,
    exact_mixture_forces_branches, memory_recall, memory_recall_probability, memory_store,
    no_superdense_search, no_teleportation_search, oblivious_transfer_audit, run_key_distribution,
    run_oblivious_transfer, run_van_dam, superdense_search, van_dam_exhaustive, EveStrategy,
    MeasurementStrategy, SharedBox, TruthTable, VanDamPlan, Verdict,
};
use gpt_core::rational::{int, rat, to_f64, Rational};
use gpt_core::space::is_member;
use gpt_core::GptError;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RUNS: usize = 100_000;
const TV_LIMIT: f64 = 0.02;

fn tv(counts: &BTreeMap<usize, usize>, exact: &[Rational], runs: usize) -> f64 {
    exact
        .iter()
        .enumerate()
        .map(|(i, p)| (*counts.get(&i).unwrap_or(&0) as f64 / runs as f64 - to_f64(p)).abs())
        .sum::<f64>()
        / 2.0
}

#[test]
fn teleportation_is_impossible() {
    let r = no_teleportation_search().unwrap();
    assert_eq!(r.alice_strategies, 16);
    assert_eq!(r.corrections_per_message, 64);
    assert_eq!(r.successful_strategies, 0);
    assert_eq!(r.verdict, Verdict::Fail);
    assert_eq!(r.known_state, Verdict::Success);
    assert_eq!(r.no_box, Verdict::Fail);
    assert!(!r.lemma.is_empty());
}

#[test]
fn mixture_lemma_on_constructed_mixtures() {
    let target = common::deterministic_gbit_states()[1].clone();
    let other = common::deterministic_gbit_states()[2].clone();
    // Exact mixture of copies of the target: every branch succeeds.
    assert!(exact_mixture_forces_branches(
        &target,
        &[(rat(1, 3), target.clone()), (rat(2, 3), target.clone())]
    ));
    // A mixture with a failing branch cannot hit the pure target.
    assert!(exact_mixture_forces_branches(
        &target,
        &[(rat(1, 2), target.clone()), (rat(1, 2), other.clone())]
    ));
    // Zero-weight failures are irrelevant.
    assert!(exact_mixture_forces_branches(
        &target,
        &[(int(1), target.clone()), (int(0), other)]
    ));
}

#[test]
fn superdense_coding_is_impossible() {
    let r = no_superdense_search().unwrap();
    assert_eq!(r.pr.encodings, 64);
    assert!(!r.pr.four_distinguishable);
    assert_eq!(r.pr.max_distinguishable, 2);
    assert_eq!(r.product.max_distinguishable, 2);
}

#[test]
fn two_encodings_are_distinguishable() {
    // Identity and an outcome flip of x1 on Alice's half.
    let pr = pr_state();
    let flipped = {
        let mut v = pr.entries.clone();
        let t = &pr.system;
        for x in 0..2 {
            for y in 0..2 {
                for b in 0..2 {
                    v[t.index(&[x, y], &[0, b])] = pr.get(&[x, y], &[1, b]).clone();
                    v[t.index(&[x, y], &[1, b])] = pr.get(&[x, y], &[0, b]).clone();
                }
            }
        }
        v
    };
    let a = MeasurementStrategy {
        first_system: 0,
        first_fiducial: 0,
        second_fiducial: [0, 0],
        outcome_map: [0, 1, 2, 3],
    };
    let d0 = a.distribution(&pr).unwrap();
    let d1 = a
        .distribution(&gpt_core::state::StateVector::new(pr.system.clone(), flipped).unwrap())
        .unwrap();
    // Parity of the two outcomes separates them.
    let parity = |d: &[Rational]| d[1].clone() + &d[2];
    assert_eq!(parity(&d0), int(0));
    assert_eq!(parity(&d1), int(1));
    assert_eq!(superdense_search(&pr).unwrap().max_distinguishable, 2);
}

#[test]
fn sixteen_canonical_strategies() {
    assert_eq!(MeasurementStrategy::all_bipartite().len(), 16);
}

#[test]
fn honest_key_distribution() {
    let t = run_key_distribution(10, 0.0, None, 1).unwrap();
    assert_eq!(t.verdict.alice_key.len(), 10);
    assert_eq!(t.verdict.alice_key, t.verdict.bob_key);
    assert_eq!(t.verdict.monogamy_bound, Some(int(0)));
    assert_eq!(t.verdict.detection_probability, int(0));
    let tested = run_key_distribution(50, 0.5, None, 2).unwrap();
    assert!(tested.verdict.keys_match);
    assert_eq!(tested.verdict.detected_pairs, 0);
}

#[test]
fn key_distribution_needs_pairs() {
    assert!(matches!(
        run_key_distribution(1, 0.5, None, 0),
        Err(GptError::InsufficientPairs { .. })
    ));
}

#[test]
fn intercept_detection_matches_branch_average() {
    for m in 0..2 {
        let eve = EveStrategy::intercept(m);
        assert_eq!(detection_probability(Some(&eve)).unwrap(), rat(1, 4));
        assert_eq!(detection_probability_by_branches(&eve).unwrap(), rat(1, 4));
    }
    for eve in EveStrategy::all() {
        let p = detection_probability(Some(&eve)).unwrap();
        assert_eq!(p, detection_probability_by_branches(&eve).unwrap(), "{eve}");
        assert!(p > Rational::zero(), "{eve} goes undetected");
    }
}

#[test]
fn eve_strategy_syntax() {
    let e: EveStrategy = "x2:10:0110".parse().unwrap();
    assert_eq!(e.measurement, 1);
    assert_eq!(e.outcome_map, [1, 0]);
    assert_eq!(e.resend, [[0, 1], [1, 0]]);
    assert_eq!(e.to_string(), "x2:10:0110");
    assert_eq!(
        "x1".parse::<EveStrategy>().unwrap(),
        EveStrategy::intercept(0)
    );
    assert!("x3".parse::<EveStrategy>().is_err());
    assert!("x1:1".parse::<EveStrategy>().is_err());
}

#[test]
fn oblivious_transfer() {
    let t = run_oblivious_transfer((1, 0), 0, 3).unwrap();
    assert_eq!(t.verdict.bob_output, 1);
    assert!(t.verdict.alice_view_independent);
    for b0 in 0..2 {
        for b1 in 0..2 {
            for c in 0..2 {
                assert!(
                    run_oblivious_transfer((b0, b1), c, 0)
                        .unwrap()
                        .verdict
                        .correct
                );
            }
        }
    }
    let audit = oblivious_transfer_audit().unwrap();
    assert_eq!(audit.strategies_checked, 8);
    assert!((audit.max_leakage_bits - 1.0).abs() < 1e-12);
    assert_eq!(audit.max_bits_revealed, 1);
    assert!(run_oblivious_transfer((2, 0), 0, 0).is_err());
}

#[test]
fn van_dam_examples() {
    let ip = TruthTable::inner_product(4).unwrap();
    let audit = van_dam_exhaustive(&ip, 4).unwrap();
    assert_eq!(audit.input_pairs, 256);
    assert!(audit.all_correct);
    assert_eq!(audit.bits_communicated, 1);
    assert_eq!(audit.boxes_per_run, 4);
    let zero = TruthTable::from_fn(3, |_, _| false).unwrap();
    let z = van_dam_exhaustive(&zero, 0).unwrap();
    assert!(z.all_correct);
    assert_eq!(z.boxes_per_run, 0);
    let and = TruthTable::from_fn(1, |x, y| x & y == 1).unwrap();
    let a = van_dam_exhaustive(&and, 0).unwrap();
    assert_eq!(a.input_pairs, 4);
    assert!(a.all_correct);
    assert_eq!(a.boxes_per_run, 1);
}

#[test]
fn van_dam_single_run() {
    let ip = TruthTable::inner_product(2).unwrap();
    let t = run_van_dam(&ip, 3, 1, 7).unwrap();
    assert!(t.verdict.correct);
    assert!(t.verdict.expected);
    assert_eq!(t.verdict.bits_communicated, 1);
    assert!(run_van_dam(&ip, 4, 0, 7).is_err());
    assert!(TruthTable::from_fn(9, |_, _| true).is_err());
}

#[test]
fn hex_tables() {
    // Bit i is the coefficient of 2^i: "1" sets only f(0, 0).
    let t = TruthTable::from_hex("1", 1).unwrap();
    assert_eq!(t.bits, vec![true, false, false, false]);
    let and = TruthTable::from_hex("8", 1).unwrap();
    assert!(and.get(1, 1) && !and.get(1, 0));
    assert_eq!(bits_to_hex(&bits_from_hex("a5", 8).unwrap()), "a5");
    assert!(bits_from_hex("1ff", 8).is_err());
    assert!(bits_from_hex("g", 8).is_err());
}

#[test]
fn memory_examples() {
    let one = memory_store(&[false, true], 1).unwrap();
    assert!(is_member(&one, &one.system).unwrap());
    assert_eq!(one.entries, vec![int(1), int(0), int(0), int(1)]);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let table: Vec<bool> = (0..8).map(|_| rng.gen()).collect();
    let s = memory_store(&table, 3).unwrap();
    s.check_no_signalling().unwrap();
    assert!(is_member(&s, &s.system).unwrap());
    for (i, &b) in table.iter().enumerate() {
        assert_eq!(memory_recall_probability(&s, i, b), int(1));
        assert_eq!(memory_recall(&s, i, rng.gen()).unwrap().verdict.recalled, b);
    }
    assert!(memory_store(&[true; 128], 7).is_err());
}

#[test]
fn memory_entries_follow_parity() {
    let table = [true, false, false, true];
    let s = memory_store(&table, 2).unwrap();
    let t = &s.system;
    for i in 0..t.dim() {
        let (xs, outs) = t.labels(i);
        // Gbit 0 carries the high address bit.
        let address = 2 * xs[0] + xs[1];
        let parity = (outs[0] ^ outs[1]) == 1;
        let want = if parity == table[address] {
            rat(1, 2)
        } else {
            int(0)
        };
        assert_eq!(s.entries[i], want);
    }
}

#[test]
fn boxes_are_used_once() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut b = SharedBox::new(pr_state()).unwrap();
    b.measure(0, 1, &mut rng).unwrap();
    assert!(matches!(
        b.measure(0, 0, &mut rng),
        Err(GptError::BoxReused(0))
    ));
    b.measure(1, 1, &mut rng).unwrap();
    assert!(b.unmeasured().is_empty());
    assert!(matches!(
        b.measure(1, 0, &mut rng),
        Err(GptError::BoxReused(1))
    ));
}

#[test]
fn transcripts_are_reproducible() {
    let eve = EveStrategy::intercept(0);
    let a = run_key_distribution(40, 0.5, Some(&eve), 99).unwrap();
    let b = run_key_distribution(40, 0.5, Some(&eve), 99).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
    let ip = TruthTable::inner_product(3).unwrap();
    assert_eq!(
        run_van_dam(&ip, 5, 6, 1).unwrap(),
        run_van_dam(&ip, 5, 6, 1).unwrap()
    );
    assert_eq!(
        run_oblivious_transfer((0, 1), 1, 4).unwrap(),
        run_oblivious_transfer((0, 1), 1, 4).unwrap()
    );
}

#[test]
fn pr_sampling_matches_exact_distribution() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let pr = pr_state();
    for (x, y) in [(0, 0), (1, 1)] {
        let mut counts = BTreeMap::new();
        for _ in 0..RUNS {
            let mut b = SharedBox::new(pr.clone()).unwrap();
            let a = b.measure(0, x, &mut rng).unwrap();
            let bb = b.measure(1, y, &mut rng).unwrap();
            *counts.entry(2 * a + bb).or_insert(0) += 1;
        }
        let exact: Vec<Rational> = (0..4)
            .map(|i| pr.get(&[x, y], &[i >> 1, i & 1]).clone())
            .collect();
        assert!(tv(&counts, &exact, RUNS) <= TV_LIMIT);
    }
}

#[test]
fn detection_sampling_matches_exact_rate() {
    let eve = EveStrategy::intercept(0);
    let t = run_key_distribution(RUNS, 1.0, Some(&eve), 5)
        .unwrap()
        .verdict;
    let mut counts = BTreeMap::new();
    counts.insert(1, t.detected_pairs);
    counts.insert(0, t.tested_pairs - t.detected_pairs);
    let p = t.detection_probability;
    assert_eq!(t.tested_pairs, RUNS);
    assert!(tv(&counts, &[int(1) - &p, p], RUNS) <= TV_LIMIT);
}

proptest! {
    #[test]
    fn van_dam_is_exact_for_random_functions(seed in 0u64..40, n in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bits: Vec<bool> = (0..1usize << (2 * n)).map(|_| rng.gen()).collect();
        let f = TruthTable::new(n, bits).unwrap();
        prop_assert!(van_dam_exhaustive(&f, seed).unwrap().all_correct);
        // The polynomial reproduces the table.
        let c = anf(&f.bits);
        for i in 0..f.bits.len() {
            let v = (0..c.len()).filter(|&m| c[m] && i & m == m).count() % 2 == 1;
            prop_assert_eq!(v, f.bits[i]);
        }
        let plan = VanDamPlan::new(&f);
        prop_assert!(plan.boxes.len() < 1 << n);
    }

    #[test]
    fn memory_recall_is_certain(seed in 0u64..30, n in 1usize..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table: Vec<bool> = (0..1usize << n).map(|_| rng.gen()).collect();
        let s = memory_store(&table, n).unwrap();
        prop_assert!(s.check_no_signalling().is_ok());
        for (i, &b) in table.iter().enumerate() {
            prop_assert_eq!(memory_recall(&s, i, seed).unwrap().verdict.recalled, b);
        }
    }
}
