mod oracle;

use omegalearn::automata::lasso::{accepts, enumerate};
use omegalearn::automata::ltl::{eval_ltl_lasso, parse_ltl};
use omegalearn::automata::{
    nbw_to_ldbw, parse_hoa, print_hoa, Acceptance, Automaton, AutomatonClass, Edge, Guard,
};
use omegalearn::corpus;
use omegalearn::random::{random_dbw, random_nbw};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fg_a() -> Automaton {
    Automaton::new(
        vec!["a".into()],
        vec!["u".into(), "v".into()],
        0,
        vec![
            Edge { src: 0, guard: Guard::True, dst: 0 },
            Edge { src: 0, guard: Guard::True, dst: 1 },
            Edge { src: 1, guard: Guard::Ap(0), dst: 1 },
        ],
        Acceptance::Buchi(vec![false, false, true]),
    )
    .unwrap()
}

#[test]
fn membership_oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let words = enumerate(2, 5);
    for _ in 0..20 {
        let a = random_nbw(&mut rng, 3, 2);
        for w in &words {
            assert_eq!(accepts(&a, w), oracle::buchi_member(&a, w), "{w:?}\n{}", print_hoa(&a));
        }
    }
}

#[test]
fn fg_a_ldbw_accepts_all_a_cycles() {
    let l = nbw_to_ldbw(&fg_a()).unwrap();
    let a = l.automaton();
    assert_eq!(a.classify().unwrap(), AutomatonClass::LimitDeterministic);
    let words = enumerate(1, 6);
    assert!(!words.is_empty());
    for w in &words {
        let expect = w.cycle.iter().all(|&l| l & 1 == 1);
        assert_eq!(oracle::buchi_member(a, w), expect, "{w:?}");
    }
}

#[test]
fn empty_language_stays_empty() {
    let a = Automaton::new(
        vec!["a".into()],
        vec!["q".into()],
        0,
        vec![Edge { src: 0, guard: Guard::True, dst: 0 }],
        Acceptance::Buchi(vec![false]),
    )
    .unwrap();
    let l = nbw_to_ldbw(&a).unwrap();
    assert!(enumerate(1, 6).iter().all(|w| !oracle::buchi_member(l.automaton(), w)));
}

#[test]
fn ldbw_preserves_language_of_random_automata() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let words = enumerate(2, 6);
    for k in 0..12 {
        let a = if k % 3 == 0 {
            random_dbw(&mut rng, 3, 2)
        } else {
            random_nbw(&mut rng, 3, 2)
        };
        let l = nbw_to_ldbw(&a).unwrap();
        l.check().unwrap();
        assert!(l.automaton().classify().unwrap() >= AutomatonClass::LimitDeterministic);
        for w in &words {
            assert_eq!(oracle::buchi_member(&a, w), oracle::buchi_member(l.automaton(), w), "automaton {k}, {w:?}");
        }
    }
}

#[test]
fn corpus_automata_match_their_formulas() {
    for e in &corpus::ENTRIES {
        let f = parse_ltl(e.ltl).unwrap();
        for a in [e.automaton(), e.rabin_automaton()] {
            let max_len = if a.ap().len() > 2 { 4 } else { 6 };
            for w in enumerate(a.ap().len(), max_len) {
                assert_eq!(accepts(&a, &w), eval_ltl_lasso(&f, a.ap(), &w), "{} on {w:?}", e.name);
            }
        }
    }
}

#[test]
fn corpus_automata_round_trip() {
    for e in &corpus::ENTRIES {
        for a in [e.automaton(), e.rabin_automaton()] {
            assert_eq!(parse_hoa(&print_hoa(&a)).unwrap(), a, "{}", e.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hoa_round_trip(seed in any::<u64>(), states in 1usize..5, num_ap in 0usize..3, det in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = if det { random_dbw(&mut rng, states, num_ap) } else { random_nbw(&mut rng, states, num_ap) };
        prop_assert_eq!(parse_hoa(&print_hoa(&a)).unwrap(), a.clone());
        let r = a.to_rabin();
        prop_assert_eq!(parse_hoa(&print_hoa(&r)).unwrap(), r);
    }

    #[test]
    fn ldbw_output_is_limit_deterministic(seed in any::<u64>(), states in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = nbw_to_ldbw(&random_nbw(&mut rng, states, 1)).unwrap();
        prop_assert!(l.check().is_ok());
        prop_assert!(l.automaton().classify().unwrap() >= AutomatonClass::LimitDeterministic);
    }
}
