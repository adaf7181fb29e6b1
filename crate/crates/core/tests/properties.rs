mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::random_stateless_dpda;
use pdakit::automaton::{classify, validate, Pda, PdaDescription, TransitionDescription};
use pdakit::format::{parse, serialize};
use pdakit::search::{canonical_form, enumerate_machines, search_acceptors, SearchBounds};
use pdakit::simulator::{
    accepts_exactly, enumerate_language, enumerate_language_with, EnumerationMethod, Word,
};

fn names(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

/// Any machine: up to 3 states, possibly nondeterministic, possibly with ε-rules.
fn random_pda(rng: &mut impl Rng) -> Pda {
    let states = names("p", rng.gen_range(1..=3));
    let stack = names("Y", rng.gen_range(1..=3));
    let inputs = ["a".to_owned(), "b".to_owned()];
    let pick = |rng: &mut ChaCha8Rng, xs: &[String]| xs[rng.gen_range(0..xs.len())].clone();
    let mut rng = ChaCha8Rng::seed_from_u64(rng.gen());
    let transitions = (0..rng.gen_range(0..8))
        .map(|_| TransitionDescription {
            state: pick(&mut rng, &states),
            top: pick(&mut rng, &stack),
            input: rng.gen_bool(0.7).then(|| pick(&mut rng, &inputs)),
            target: pick(&mut rng, &states),
            push: (0..rng.gen_range(0..=2)).map(|_| pick(&mut rng, &stack)).collect(),
        })
        .collect();
    let finals = states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    let d = PdaDescription {
        initial_state: states[0].clone(),
        initial_pushdown: vec![pick(&mut rng, &stack)],
        states,
        input_alphabet: inputs.to_vec(),
        pushdown_alphabet: stack,
        final_states: finals,
        transitions,
    };
    validate(&d).unwrap()
}

/// A realtime machine over `{a, b}` with `states` states and `symbols`
/// pushdown symbols, push strings of length `≤ 2`.
fn random_realtime(rng: &mut impl Rng, states: usize, symbols: usize) -> Pda {
    let q = if states == 1 { vec!["s".to_owned()] } else { names("q", states) };
    let gamma = names("X", symbols);
    let mut transitions = Vec::new();
    for state in &q {
        for top in &gamma {
            for a in ["a", "b"] {
                if rng.gen_bool(0.6) {
                    transitions.push(TransitionDescription {
                        state: state.clone(),
                        top: top.clone(),
                        input: Some(a.to_owned()),
                        target: q[rng.gen_range(0..states)].clone(),
                        push: (0..rng.gen_range(0..=2))
                            .map(|_| gamma[rng.gen_range(0..symbols)].clone())
                            .collect(),
                    });
                }
            }
        }
    }
    let mut finals: Vec<String> = q.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
    if finals.is_empty() {
        finals.push(q[0].clone());
    }
    let d = PdaDescription {
        states: q.clone(),
        input_alphabet: vec!["a".into(), "b".into()],
        initial_pushdown: (0..rng.gen_range(1..=3))
            .map(|_| gamma[rng.gen_range(0..symbols)].clone())
            .collect(),
        pushdown_alphabet: gamma,
        initial_state: q[0].clone(),
        final_states: finals,
        transitions,
    };
    validate(&d).unwrap()
}

/// Renames pushdown symbols and non-initial states by random permutations,
/// and shuffles the declaration order.
fn permuted(m: &Pda, rng: &mut impl Rng) -> Pda {
    let d = m.to_description();
    let mut symbol_order: Vec<usize> = (0..d.pushdown_alphabet.len()).collect();
    symbol_order.shuffle(rng);
    let mut state_order: Vec<usize> = (1..d.states.len()).collect();
    state_order.shuffle(rng);
    state_order.insert(0, 0);
    let sym = |name: &String| {
        let i = d.pushdown_alphabet.iter().position(|x| x == name).unwrap();
        format!("R{}", symbol_order[i])
    };
    let state = |name: &String| {
        let i = d.states.iter().position(|x| x == name).unwrap();
        format!("t{}", state_order[i])
    };
    let renamed = PdaDescription {
        states: {
            let mut s: Vec<String> = d.states.iter().map(state).collect();
            s[1..].shuffle(rng);
            s
        },
        input_alphabet: d.input_alphabet.clone(),
        pushdown_alphabet: {
            let mut g: Vec<String> = d.pushdown_alphabet.iter().map(sym).collect();
            g.shuffle(rng);
            g
        },
        initial_state: state(&d.initial_state),
        initial_pushdown: d.initial_pushdown.iter().map(sym).collect(),
        final_states: d.final_states.iter().map(state).collect(),
        transitions: d
            .transitions
            .iter()
            .map(|t| TransitionDescription {
                state: state(&t.state),
                top: sym(&t.top),
                input: t.input.clone(),
                target: state(&t.target),
                push: t.push.iter().map(sym).collect(),
            })
            .collect(),
    };
    validate(&renamed).unwrap()
}

fn machine_set(bounds: &SearchBounds) -> BTreeSet<String> {
    enumerate_machines(bounds).unwrap().map(|m| serialize(&m)).collect()
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn serialization_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        for m in [random_pda(&mut r), random_stateless_dpda(&mut r)] {
            let text = serialize(&m);
            let back = parse(&text).unwrap();
            prop_assert_eq!(&back, &m);
            prop_assert_eq!(serialize(&back), text);
        }
    }

    #[test]
    fn classification_is_consistent(seed in any::<u64>()) {
        let m = random_pda(&mut rng(seed));
        let r = classify(&m);
        prop_assert!(!r.realtime || r.deterministic);
        prop_assert_eq!(r.deterministic, r.violations.is_empty());
        prop_assert_eq!(r.stateless, m.states().len() == 1);
        prop_assert_eq!(r.realtime, r.deterministic && !m.has_epsilon_rules());
        prop_assert_eq!(
            r.non_input_symbol_count,
            m.pushdown_alphabet().len() as i64 - m.input_alphabet().len() as i64
        );
    }

    #[test]
    fn enumeration_methods_agree(seed in any::<u64>()) {
        let m = random_stateless_dpda(&mut rng(seed));
        let bfs = enumerate_language(&m, 7, common::RANDOM_BUDGET);
        let tested = enumerate_language_with(&m, 7, common::RANDOM_BUDGET, EnumerationMethod::StringTesting)
            .unwrap();
        prop_assert_eq!(bfs, tested);
    }

    #[test]
    fn enumeration_is_monotone_in_length(seed in any::<u64>(), bound in 0usize..6) {
        // Nondeterministic configuration sets grow fast; keep bound and budget small.
        let m = random_pda(&mut rng(seed));
        let short = enumerate_language(&m, bound, 4);
        let long = enumerate_language(&m, bound + 1, 4);
        let restrict = |s: &BTreeSet<Word>| -> BTreeSet<Word> {
            s.iter().filter(|w| w.len() <= bound).cloned().collect()
        };
        prop_assert_eq!(&short.strings, &restrict(&long.strings));
        prop_assert_eq!(&short.diverged, &restrict(&long.diverged));
    }

    #[test]
    fn lazy_search_matches_brute_force(seed in any::<u64>(), two_states in any::<bool>()) {
        let mut r = rng(seed);
        let bounds = if two_states {
            SearchBounds::stateless(1, 1, 1, 4).with_states(2)
        } else {
            SearchBounds::stateless(2, 1, 2, 4)
        };
        // Targets drawn from strings of length ≤ 3.
        let pool = ["", "a", "b", "aa", "ab", "ba", "bb", "aab", "aba", "abb", "baa", "bab", "bba", "bbb"];
        let target: BTreeSet<Word> = pool
            .iter()
            .filter(|_| r.gen_bool(0.2))
            .map(|s| Word::from_chars(s))
            .collect();
        let report = search_acceptors(&target, &bounds, None).unwrap();
        prop_assert_eq!(Some(report.candidates_examined), bounds.space_size());
        let brute: BTreeSet<String> = enumerate_machines(&bounds)
            .unwrap()
            .filter(|m| accepts_exactly(m, &target, bounds.length_bound, 0).unwrap().is_exact())
            .map(|m| serialize(&m))
            .collect();
        let found: BTreeSet<String> = report.accepting_machines.iter().map(serialize).collect();
        prop_assert_eq!(found.len(), report.accepting_machines.len());
        prop_assert_eq!(found, brute);
    }
}

#[test]
fn canonical_form_ignores_renaming() {
    let mut r = rng(7);
    for i in 0..1000 {
        let states = if i % 4 == 0 { r.gen_range(2..=3) } else { 1 };
        let symbols = r.gen_range(1..=3);
        let m = random_realtime(&mut r, states, symbols);
        let copy = permuted(&m, &mut r);
        let canonical = canonical_form(&m).unwrap();
        assert_eq!(canonical_form(&copy).as_ref(), Some(&canonical), "{}", serialize(&m));
        assert_eq!(canonical_form(&canonical).as_ref(), Some(&canonical));
        let lang = |x: &Pda| enumerate_language(x, 6, 0).strings;
        assert_eq!(lang(&canonical), lang(&m));
    }
}

#[test]
fn enlarging_bounds_never_removes_machines() {
    let base = SearchBounds::stateless(1, 1, 1, 4);
    let small = machine_set(&base);
    let larger = [
        base.with_gamma(2),
        SearchBounds { max_push_length: 2, ..base },
        SearchBounds { max_initial_length: 2, ..base },
        base.with_states(2),
        SearchBounds { length_bound: 6, ..base },
    ];
    for b in larger {
        let big = machine_set(&b);
        assert!(small.is_subset(&big), "{b}");
        assert!(big.len() > small.len() || b.length_bound != base.length_bound);
    }
}

#[test]
fn tiny_space_has_nine_machines() {
    let b = SearchBounds::stateless(1, 1, 1, 4);
    assert_eq!(enumerate_machines(&b).unwrap().count(), 9);
    assert_eq!(b.space_size(), Some(9));
    assert_eq!(SearchBounds::stateless(1, 2, 2, 4).space_size(), Some(32));
}


