#![allow(dead_code)]

use std::collections::BTreeSet;

use pdakit::automaton::{validate, Pda, PdaDescription};
use pdakit::simulator::Word;
use pdakit::witnesses::{build_example, build_mstate, build_stateless, build_unary};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Enough for every non-divergent ε-chain of the random machines below:
/// the pushdown stays under 4·3·3 symbols and a chain touches each at most
/// once per expansion level.
pub const RANDOM_BUDGET: usize = 2000;

/// A stateless deterministic machine over `{a, b}` with `|Γ| ≤ 4`, push
/// strings of length `≤ 3` and initial strings of length `≤ 3`. About a
/// quarter of the symbols carry an ε-rule.
pub fn random_stateless_dpda(rng: &mut impl Rng) -> Pda {
    let k = rng.gen_range(1..=4);
    let gamma: Vec<String> = (0..k).map(|i| format!("Z{i}")).collect();
    let refs: Vec<&str> = gamma.iter().map(String::as_str).collect();
    let push = |rng: &mut dyn rand::RngCore| -> Vec<&str> {
        let len = rng.gen_range(0..=3);
        (0..len).map(|_| refs[rng.gen_range(0..k)]).collect()
    };
    let alpha = {
        let len = rng.gen_range(1..=3);
        (0..len).map(|_| refs[rng.gen_range(0..k)]).collect::<Vec<_>>()
    };
    let mut d = PdaDescription::stateless(&["a", "b"], &refs, &alpha);
    for &x in &refs {
        if rng.gen_bool(0.25) {
            let p = push(rng);
            d.rule(x, None, &p);
        } else {
            for a in ["a", "b"] {
                if rng.gen_bool(0.75) {
                    let p = push(rng);
                    d.rule(x, Some(a), &p);
                }
            }
        }
    }
    validate(&d).expect("generated machine is well-formed")
}

pub fn random_corpus(count: usize, seed: u64) -> Vec<Pda> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_stateless_dpda(&mut rng)).collect()
}

/// Every witness machine at small parameters.
pub fn witness_corpus() -> Vec<Pda> {
    let mut out: Vec<Pda> = (2..=10).map(|n| build_stateless(n).unwrap()).collect();
    out.extend((0..=5).map(build_unary));
    for m in 1..=4 {
        for n in 2..=4 {
            out.push(build_mstate(m, n).unwrap());
            out.push(build_example(m, n).unwrap());
        }
    }
    out
}

/// `{bᵏa | 1 ≤ k ≤ max_k}`, built character by character.
pub fn b_run_then_a(max_k: usize) -> BTreeSet<Word> {
    (1..=max_k)
        .map(|k| {
            let mut s = String::new();
            for _ in 0..k {
                s.push('b');
            }
            s.push('a');
            Word::from_chars(&s)
        })
        .collect()
}
