//! ε-elimination for stateless deterministic pushdown automata without
//! growing the pushdown alphabet.
//!
//! Every ε-rule `X --ε--> σ` is removed by substituting `σ` for `X`
//! everywhere `X` can appear (right-hand sides and the initial pushdown
//! string). A symbol whose ε-rule reinstates itself can never leave the
//! pushdown, so it and every rule that pushes it are dropped instead.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automaton::{classify, validate, Pda, PdaDescription, TransitionDescription};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("machine has more than one state")]
    NotStateless,
    #[error("machine is not deterministic")]
    NotDeterministic,
    #[error("machine accepts exactly {{ε}}, which no realtime machine can accept")]
    EpsilonLanguage,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TransformLog {
    /// `(X, σ)` in elimination order, `σ` as it stood when `X` was removed.
    pub eliminated: Vec<(String, Vec<String>)>,
    /// Symbols that could never be popped, or that became unreachable.
    pub removed_dead: BTreeSet<String>,
    pub alphabet_before: usize,
    pub alphabet_after: usize,
}

impl TransformLog {
    pub fn summary(&self) -> String {
        let mut out = format!(
            "pushdown alphabet: {} -> {}\n",
            self.alphabet_before, self.alphabet_after
        );
        for (x, sigma) in &self.eliminated {
            let rhs = if sigma.is_empty() {
                crate::automaton::EPSILON_TOKEN.to_owned()
            } else {
                sigma.join(" ")
            };
            out.push_str(&format!("substituted {x} := {rhs}\n"));
        }
        if !self.removed_dead.is_empty() {
            let dead: Vec<&str> = self.removed_dead.iter().map(String::as_str).collect();
            out.push_str(&format!("removed: {}\n", dead.join(" ")));
        }
        out
    }
}

/// Rules of a stateless deterministic machine: `(top, input) -> push`.
type Rules = BTreeMap<(String, Option<String>), Vec<String>>;

pub fn to_realtime(m: &Pda) -> Result<(Pda, TransformLog), TransformError> {
    let report = classify(m);
    if !report.stateless {
        return Err(TransformError::NotStateless);
    }
    if !report.deterministic {
        return Err(TransformError::NotDeterministic);
    }

    let desc = m.to_description();
    let mut gamma: Vec<String> = desc.pushdown_alphabet.clone();
    let mut alpha: Vec<String> = desc.initial_pushdown.clone();
    let mut rules: Rules = desc
        .transitions
        .iter()
        .map(|t| ((t.top.clone(), t.input.clone()), t.push.clone()))
        .collect();
    let mut log = TransformLog {
        alphabet_before: gamma.len(),
        ..TransformLog::default()
    };

    // Lexicographically smallest symbol with an ε-rule first.
    while let Some(x) = rules
        .keys()
        .filter(|(_, input)| input.is_none())
        .map(|(top, _)| top.clone())
        .min()
    {
        let sigma = rules.remove(&(x.clone(), None)).unwrap_or_default();
        gamma.retain(|g| *g != x);
        if sigma.contains(&x) {
            log.removed_dead.insert(x.clone());
            if alpha.contains(&x) {
                log.alphabet_after = 1;
                return Ok((empty_language(&desc, &x), log));
            }
            rules.retain(|_, push| !push.contains(&x));
        } else {
            let substitute = |s: &mut Vec<String>| {
                if s.contains(&x) {
                    *s = s
                        .iter()
                        .flat_map(|y| if *y == x { sigma.clone() } else { vec![y.clone()] })
                        .collect();
                }
            };
            substitute(&mut alpha);
            rules.values_mut().for_each(substitute);
            log.eliminated.push((x.clone(), sigma.clone()));
            if alpha.is_empty() {
                return Err(TransformError::EpsilonLanguage);
            }
        }
    }

    // Drop symbols that no longer occur in any reachable pushdown.
    let mut reachable: BTreeSet<String> = alpha.iter().cloned().collect();
    let mut frontier: Vec<String> = reachable.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for ((_, _), push) in rules.range((x.clone(), None)..).take_while(|((t, _), _)| *t == x) {
            for y in push {
                if reachable.insert(y.clone()) {
                    frontier.push(y.clone());
                }
            }
        }
    }
    for g in gamma.iter().filter(|g| !reachable.contains(*g)) {
        log.removed_dead.insert(g.clone());
    }
    gamma.retain(|g| reachable.contains(g));
    rules.retain(|(top, _), _| reachable.contains(top));
    log.alphabet_after = gamma.len();

    let state = desc.initial_state.clone();
    let out = PdaDescription {
        pushdown_alphabet: gamma,
        initial_pushdown: alpha,
        transitions: rules
            .into_iter()
            .map(|((top, input), push)| TransitionDescription {
                state: state.clone(),
                top,
                input,
                target: state.clone(),
                push,
            })
            .collect(),
        ..desc
    };
    let realtime = validate(&out).expect("substitution keeps every reference inside Γ");
    Ok((realtime, log))
}

/// One symbol, no transitions: accepts nothing.
fn empty_language(desc: &PdaDescription, symbol: &str) -> Pda {
    let out = PdaDescription {
        pushdown_alphabet: vec![symbol.to_owned()],
        initial_pushdown: vec![symbol.to_owned()],
        transitions: Vec::new(),
        ..desc.clone()
    };
    validate(&out).expect("single-symbol machine is well-formed")
}
