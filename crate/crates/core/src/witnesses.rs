//! Witness languages and the automata that accept them.
//!
//! * `L_n = { bᵏa | 1 ≤ k ≤ n−1 }` needs exactly `n` pushdown symbols in a
//!   stateless deterministic machine.
//! * `L_{m,n} = { bᵏa | 1 ≤ k ≤ mn−1 }` needs `n` pushdown symbols in an
//!   `m`-state realtime machine.
//! * `{aᶜ}` needs only one.
//! * `K_n = L_{n+2}`, the witness for non-input pushdown symbols.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::{validate, Pda, PdaDescription, TransitionDescription};
use crate::simulator::Word;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad witness parameters: {0}")]
pub struct BadSpec(pub String);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessSpec {
    /// `L_n`, n ≥ 2.
    StatelessLn { n: usize },
    /// `L_{m,n}`, m ≥ 1, n ≥ 2.
    MStateLmn { m: usize, n: usize },
    /// The two-state, two-symbol machine for `L_{m,n}`.
    ExampleTwoState { m: usize, n: usize },
    /// `{aᶜ}`.
    UnaryL1 { c: usize },
    /// `K_n = L_{n+2}`, n ≥ 0.
    NonInputKn { n: usize },
}

impl WitnessSpec {
    pub fn check(&self) -> Result<(), BadSpec> {
        match *self {
            WitnessSpec::StatelessLn { n } if n < 2 => Err(BadSpec(format!(
                "L_n is defined here for n ≥ 2 (got {n}); use the unary family for n = 1"
            ))),
            WitnessSpec::MStateLmn { m, n } | WitnessSpec::ExampleTwoState { m, n }
                if m < 1 || n < 2 =>
            {
                Err(BadSpec(format!("L_(m,n) needs m ≥ 1 and n ≥ 2 (got m={m}, n={n})")))
            }
            _ => Ok(()),
        }
    }
}

fn b_run_then_a(max_k: usize) -> BTreeSet<Word> {
    (1..=max_k)
        .map(|k| Word::from_chars(&format!("{}a", "b".repeat(k))))
        .collect()
}

/// The reference language of a family, as a finite set.
pub fn witness_language(spec: WitnessSpec) -> Result<BTreeSet<Word>, BadSpec> {
    spec.check()?;
    Ok(match spec {
        WitnessSpec::StatelessLn { n } => b_run_then_a(n - 1),
        WitnessSpec::MStateLmn { m, n } | WitnessSpec::ExampleTwoState { m, n } => {
            b_run_then_a(m * n - 1)
        }
        WitnessSpec::UnaryL1 { c } => BTreeSet::from([Word::from_chars(&"a".repeat(c))]),
        WitnessSpec::NonInputKn { n } => b_run_then_a(n + 1),
    })
}

/// The accepting machine for a family.
pub fn build_witness(spec: WitnessSpec) -> Result<Pda, BadSpec> {
    spec.check()?;
    match spec {
        WitnessSpec::StatelessLn { n } => build_stateless(n),
        WitnessSpec::MStateLmn { m, n } => build_mstate(m, n),
        WitnessSpec::ExampleTwoState { m, n } => build_example(m, n),
        WitnessSpec::UnaryL1 { c } => Ok(build_unary(c)),
        WitnessSpec::NonInputKn { n } => build_stateless(n + 2),
    }
}

fn x(i: usize) -> String {
    format!("X{i}")
}

fn q(j: usize) -> String {
    format!("q{j}")
}

/// `M_n`: one state, `Γ = {X0..X(n−1)}`, `α = X0`,
/// `Xi --b--> X(i+1)` for `i ≤ n−2` and `Xi --a--> ε` for `i ≥ 1`.
pub fn build_stateless(n: usize) -> Result<Pda, BadSpec> {
    if n < 2 {
        return Err(BadSpec(format!(
            "the stateless witness needs n ≥ 2 (got {n}); use build_unary for n = 1"
        )));
    }
    let gamma: Vec<String> = (0..n).map(x).collect();
    let gamma_refs: Vec<&str> = gamma.iter().map(String::as_str).collect();
    let mut d = PdaDescription::stateless(&["a", "b"], &gamma_refs, &["X0"]);
    for i in 0..n - 1 {
        d.rule(&gamma[i], Some("b"), &[&gamma[i + 1]]);
    }
    for sym in &gamma[1..] {
        d.rule(sym, Some("a"), &[]);
    }
    Ok(validate(&d).expect("M_n is well-formed"))
}

/// One state, `Σ = Γ = {a}`, `α = aᶜ`, `a --a--> ε`.
///
/// For `c = 0` the initial string cannot be empty, so the machine is
/// `Γ = {E}`, `α = E`, `E --ε--> ε` instead.
pub fn build_unary(c: usize) -> Pda {
    let d = if c == 0 {
        let mut d = PdaDescription::stateless(&["a"], &["E"], &["E"]);
        d.rule("E", None, &[]);
        d
    } else {
        let alpha = vec!["a"; c];
        let mut d = PdaDescription::stateless(&["a"], &["a"], &alpha);
        d.rule("a", Some("a"), &[]);
        d
    };
    validate(&d).expect("unary machine is well-formed")
}

/// `M_{m,n}`: states `q0..q(m−1)`, `Γ = {X0..X(n−1)}`, `F = {q(m−1)}`. The
/// pair `(qj, Xi)` counts `j·n + i` b's.
pub fn build_mstate(m: usize, n: usize) -> Result<Pda, BadSpec> {
    if m < 1 || n < 2 {
        return Err(BadSpec(format!(
            "the m-state witness needs m ≥ 1 and n ≥ 2 (got m={m}, n={n})"
        )));
    }
    let mut transitions = Vec::new();
    let mut add = |from: usize, top: usize, input: &str, to: usize, push: Option<usize>| {
        transitions.push(TransitionDescription {
            state: q(from),
            top: x(top),
            input: Some(input.to_owned()),
            target: q(to),
            push: push.map(x).into_iter().collect(),
        });
    };
    for j in 0..m {
        for i in 0..n - 1 {
            add(j, i, "b", j, Some(i + 1));
        }
    }
    for j in 0..m - 1 {
        add(j, n - 1, "b", j + 1, Some(0));
    }
    for i in 1..n {
        add(0, i, "a", m - 1, None);
    }
    for j in 1..m {
        for i in 0..n {
            add(j, i, "a", m - 1, None);
        }
    }
    let d = PdaDescription {
        states: (0..m).map(q).collect(),
        input_alphabet: vec!["a".into(), "b".into()],
        pushdown_alphabet: (0..n).map(x).collect(),
        initial_state: q(0),
        initial_pushdown: vec![x(0)],
        final_states: vec![q(m - 1)],
        transitions,
    };
    Ok(validate(&d).expect("M_(m,n) is well-formed"))
}

/// Two states `f` (initial, final) and `q`, `Γ = {Z, B}`:
///
/// ```text
/// f Z b -> q B^(mn−1)
/// q B b -> q ε
/// q B a -> f ε
/// f B ε -> f ε
/// ```
pub fn build_example(m: usize, n: usize) -> Result<Pda, BadSpec> {
    if m < 1 || n < 1 || m * n < 2 {
        return Err(BadSpec(format!(
            "the two-state machine needs m, n ≥ 1 and mn ≥ 2 (got m={m}, n={n})"
        )));
    }
    let bs = vec!["B"; m * n - 1];
    let d = PdaDescription {
        states: vec!["f".into(), "q".into()],
        input_alphabet: vec!["a".into(), "b".into()],
        pushdown_alphabet: vec!["Z".into(), "B".into()],
        initial_state: "f".into(),
        initial_pushdown: vec!["Z".into()],
        final_states: vec!["f".into()],
        transitions: vec![
            TransitionDescription::new("f", "Z", Some("b"), "q", &bs),
            TransitionDescription::new("q", "B", Some("b"), "q", &[]),
            TransitionDescription::new("q", "B", Some("a"), "f", &[]),
            TransitionDescription::new("f", "B", None, "f", &[]),
        ],
    };
    Ok(validate(&d).expect("example machine is well-formed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::classify;
    use crate::simulator::{accepts_exactly, enumerate_language, run, words, Verdict};

    #[test]
    fn languages() {
        assert_eq!(witness_language(WitnessSpec::StatelessLn { n: 3 }).unwrap(), words(["ba", "bba"]));
        assert_eq!(
            witness_language(WitnessSpec::MStateLmn { m: 2, n: 2 }).unwrap(),
            words(["ba", "bba", "bbba"])
        );
        assert_eq!(witness_language(WitnessSpec::UnaryL1 { c: 0 }).unwrap(), words([""]));
        assert_eq!(witness_language(WitnessSpec::NonInputKn { n: 1 }).unwrap(), words(["ba", "bba"]));
        assert_eq!(witness_language(WitnessSpec::NonInputKn { n: 0 }).unwrap(), words(["ba"]));
    }

    #[test]
    fn bad_specs() {
        assert!(witness_language(WitnessSpec::StatelessLn { n: 1 }).is_err());
        assert!(witness_language(WitnessSpec::MStateLmn { m: 0, n: 2 }).is_err());
        assert!(witness_language(WitnessSpec::MStateLmn { m: 2, n: 1 }).is_err());
        assert!(build_stateless(1).is_err());
        assert!(build_mstate(1, 1).is_err());
        assert!(build_example(1, 1).is_err());
        assert!(build_example(2, 1).is_ok());
    }

    #[test]
    fn stateless_two() {
        let m = build_stateless(2).unwrap();
        assert_eq!(m.transition_count(), 2);
        let x0 = m.stack_id("X0").unwrap();
        let x1 = m.stack_id("X1").unwrap();
        let a = m.input_id("a").unwrap();
        let b = m.input_id("b").unwrap();
        let s = m.initial_state();
        assert_eq!(m.targets(s, x0, Some(b)).unwrap().first().unwrap().push, vec![x1]);
        assert!(m.targets(s, x1, Some(a)).unwrap().first().unwrap().push.is_empty());
    }

    #[test]
    fn stateless_transition_count() {
        for n in 2..8 {
            assert_eq!(build_stateless(n).unwrap().transition_count(), 2 * (n - 1));
        }
    }

    #[test]
    fn stateless_five_accepts_l5() {
        let m = build_stateless(5).unwrap();
        let l5 = witness_language(WitnessSpec::StatelessLn { n: 5 }).unwrap();
        assert!(accepts_exactly(&m, &l5, 10, 100).unwrap().is_exact());
    }

    #[test]
    fn unary_machines() {
        let m = build_unary(3);
        for bound in 3..7 {
            assert_eq!(enumerate_language(&m, bound, 100).strings, words(["aaa"]));
        }
        assert_eq!(enumerate_language(&build_unary(1), 4, 100).strings, words(["a"]));
        let zero = build_unary(0);
        assert_eq!(run(&zero, &Word::empty(), 10).unwrap().verdict, Verdict::Accepted);
        assert_eq!(enumerate_language(&zero, 4, 100).strings, words([""]));
        let report = classify(&zero);
        assert!(report.deterministic && !report.realtime);
    }

    #[test]
    fn mstate_one_matches_stateless_up_to_state_name() {
        let stateless = build_stateless(3).unwrap().to_description();
        let mut single = build_mstate(1, 3).unwrap().to_description();
        assert_eq!(single.final_states, vec!["q0".to_owned()]);
        let rename = |s: &mut String| *s = "s".to_owned();
        single.states.iter_mut().for_each(rename);
        rename(&mut single.initial_state);
        single.final_states.iter_mut().for_each(rename);
        for t in &mut single.transitions {
            rename(&mut t.state);
            rename(&mut t.target);
        }
        assert_eq!(validate(&single).unwrap(), validate(&stateless).unwrap());
    }

    #[test]
    fn mstate_two_two() {
        let m = build_mstate(2, 2).unwrap();
        let lang = witness_language(WitnessSpec::MStateLmn { m: 2, n: 2 }).unwrap();
        assert!(accepts_exactly(&m, &lang, 8, 100).unwrap().is_exact());
        let report = classify(&m);
        assert!(report.realtime && !report.stateless);
        assert_eq!(report.pushdown_alphabet_size, 2);
    }

    #[test]
    fn mstate_three_two_longest_word() {
        let sample = enumerate_language(&build_mstate(3, 2).unwrap(), 10, 100);
        assert_eq!(sample.strings.last().unwrap(), &Word::from_chars("bbbbba"));
    }

    #[test]
    fn example_machine() {
        let m = build_example(2, 2).unwrap();
        let lang = witness_language(WitnessSpec::MStateLmn { m: 2, n: 2 }).unwrap();
        assert!(accepts_exactly(&m, &lang, 8, 100).unwrap().is_exact());
        let report = classify(&m);
        assert!(report.deterministic && !report.realtime && !report.stateless);
        assert_eq!(report.pushdown_alphabet_size, 2);
        assert_eq!(enumerate_language(&build_example(1, 2).unwrap(), 6, 100).strings, words(["ba"]));
    }

    #[test]
    fn example_trace_on_bba() {
        let m = build_example(2, 2).unwrap();
        let out = run(&m, &"bba".into(), 100).unwrap();
        assert_eq!(out.verdict, Verdict::Accepted);
        let shown: Vec<String> = out.trace.iter().map(|c| c.render(&m)).collect();
        assert_eq!(
            shown,
            [
                "f | Z | bba",
                "q | B B B | ba",
                "q | B B | a",
                "f | B | eps",
                "f | eps | eps",
            ]
        );
        assert_eq!(out.epsilon_steps_used, 1);
    }

    #[test]
    fn noninput_alias() {
        for n in 0..4 {
            let m = build_witness(WitnessSpec::NonInputKn { n }).unwrap();
            assert_eq!(classify(&m).non_input_symbol_count, n as i64);
        }
    }
}
