//! The one-step relation, runs, bounded language enumeration and the
//! language-level checks built on top of it (prefix-freeness, bounded
//! equivalence against a reference set).
//!
//! Acceptance is by final state *and* empty pushdown. ε-runs are bounded by
//! a budget of consecutive ε-moves; exceeding it yields
//! [`Verdict::Diverged`], never [`Verdict::Rejected`].

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::automaton::{classify, InputSym, Pda, StackSym, StateId, TransitionTarget, EPSILON_TOKEN};

/// A string over an input alphabet, stored by symbol name so that words from
/// different machines compare meaningfully.
///
/// Ordered shortlex: shorter words first, then lexicographically by name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<String>);

impl Word {
    pub fn new(symbols: Vec<String>) -> Self {
        Word(symbols)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    /// One symbol per character: `Word::from_chars("bba")`.
    pub fn from_chars(s: &str) -> Self {
        Word(s.chars().map(String::from).collect())
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_proper_prefix_of(&self, other: &Word) -> bool {
        self.len() < other.len() && other.0[..self.len()] == self.0[..]
    }

    pub(crate) fn from_ids(m: &Pda, ids: &[InputSym]) -> Self {
        Word(ids.iter().map(|&a| m.input_name(a).to_owned()).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<&str> for Word {
    fn from(s: &str) -> Self {
        Word::from_chars(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            f.write_str(EPSILON_TOKEN)
        } else if self.0.iter().all(|s| s.chars().count() == 1) {
            f.write_str(&self.0.concat())
        } else {
            f.write_str(&self.0.join(" "))
        }
    }
}

/// Builds a word set from single-character-symbol strings.
pub fn words<'a>(items: impl IntoIterator<Item = &'a str>) -> BTreeSet<Word> {
    items.into_iter().map(Word::from_chars).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("machine is not deterministic; use configuration search instead")]
    NotDeterministic,
    #[error("`{0}` is not an input symbol of this machine")]
    UnknownInput(String),
    #[error("length bound {bound} is below the longest reference string ({longest})")]
    BoundTooSmall { bound: usize, longest: usize },
}

/// `(state, pushdown, remaining input)`, pushdown top rightmost.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: StateId,
    pub pushdown: Vec<StackSym>,
    pub remaining: Vec<InputSym>,
}

impl Configuration {
    pub fn initial(m: &Pda, input: Vec<InputSym>) -> Self {
        Configuration {
            state: m.initial_state(),
            pushdown: m.initial_pushdown().to_vec(),
            remaining: input,
        }
    }

    /// `state | stack | remaining`, stack bottom-to-top.
    pub fn render(&self, m: &Pda) -> String {
        let stack = if self.pushdown.is_empty() {
            EPSILON_TOKEN.to_owned()
        } else {
            self.pushdown
                .iter()
                .map(|&x| m.stack_name(x))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "{} | {} | {}",
            m.state_name(self.state),
            stack,
            Word::from_ids(m, &self.remaining)
        )
    }
}

fn replace_top(pushdown: &[StackSym], target: &TransitionTarget) -> Vec<StackSym> {
    let mut next = Vec::with_capacity(pushdown.len() + target.push.len());
    next.extend_from_slice(&pushdown[..pushdown.len() - 1]);
    next.extend_from_slice(&target.push);
    next
}

/// Every configuration reachable from `c` in exactly one move.
pub fn step(m: &Pda, c: &Configuration) -> Vec<Configuration> {
    let Some(&top) = c.pushdown.last() else {
        return Vec::new();
    };
    let mut out = BTreeSet::new();
    if let Some((&a, rest)) = c.remaining.split_first() {
        for t in m.targets(c.state, top, Some(a)).into_iter().flatten() {
            out.insert(Configuration {
                state: t.state,
                pushdown: replace_top(&c.pushdown, t),
                remaining: rest.to_vec(),
            });
        }
    }
    for t in m.targets(c.state, top, None).into_iter().flatten() {
        out.insert(Configuration {
            state: t.state,
            pushdown: replace_top(&c.pushdown, t),
            remaining: c.remaining.clone(),
        });
    }
    out.into_iter().collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accepted,
    Rejected,
    Diverged,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Accepted => "Accepted",
            Verdict::Rejected => "Rejected",
            Verdict::Diverged => "Diverged",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunOutcome {
    pub verdict: Verdict,
    pub trace: Vec<Configuration>,
    pub steps_used: usize,
    pub epsilon_steps_used: usize,
}

/// Default ε-budget: `10·|Γ|·max(1, longest push string)`.
pub fn default_epsilon_budget(m: &Pda) -> usize {
    10 * m.pushdown_alphabet().len() * m.max_push_len().max(1)
}

pub(crate) fn word_ids(m: &Pda, w: &Word) -> Result<Vec<InputSym>, SimError> {
    w.symbols()
        .iter()
        .map(|s| m.input_id(s).ok_or_else(|| SimError::UnknownInput(s.clone())))
        .collect()
}

/// Runs a deterministic machine on `w`, recording every configuration.
pub fn run(m: &Pda, w: &Word, budget: usize) -> Result<RunOutcome, SimError> {
    if !classify(m).deterministic {
        return Err(SimError::NotDeterministic);
    }
    let mut current = Configuration::initial(m, word_ids(m, w)?);
    let mut trace = vec![current.clone()];
    let (mut steps, mut eps_steps, mut streak) = (0, 0, 0);
    let verdict = loop {
        if current.pushdown.is_empty() {
            break if current.remaining.is_empty() && m.is_final(current.state) {
                Verdict::Accepted
            } else {
                Verdict::Rejected
            };
        }
        let mut next = step(m, &current);
        assert!(next.len() <= 1, "deterministic machine produced {} successors", next.len());
        let Some(next) = next.pop() else {
            break Verdict::Rejected;
        };
        if next.remaining.len() == current.remaining.len() {
            if streak == budget {
                break Verdict::Diverged;
            }
            streak += 1;
            eps_steps += 1;
        } else {
            streak = 0;
        }
        steps += 1;
        trace.push(next.clone());
        current = next;
    };
    Ok(RunOutcome {
        verdict,
        trace,
        steps_used: steps,
        epsilon_steps_used: eps_steps,
    })
}

/// Trace-free deterministic run used by string-testing enumeration.
fn verdict_of(m: &Pda, input: &[InputSym], budget: usize) -> Verdict {
    let mut state = m.initial_state();
    let mut stack = m.initial_pushdown().to_vec();
    let mut pos = 0;
    let mut streak = 0;
    while let Some(&top) = stack.last() {
        let consumed = input
            .get(pos)
            .and_then(|&a| m.targets(state, top, Some(a)))
            .and_then(|ts| ts.first());
        let target = match consumed {
            Some(t) => {
                pos += 1;
                streak = 0;
                t
            }
            None => match m.targets(state, top, None).and_then(|ts| ts.first()) {
                Some(t) => {
                    if streak == budget {
                        return Verdict::Diverged;
                    }
                    streak += 1;
                    t
                }
                None => return Verdict::Rejected,
            },
        };
        stack.pop();
        stack.extend_from_slice(&target.push);
        state = target.state;
    }
    if pos == input.len() && m.is_final(state) {
        Verdict::Accepted
    } else {
        Verdict::Rejected
    }
}

/// A bounded sample of a machine's language.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LanguageSample {
    pub strings: BTreeSet<Word>,
    pub length_bound: usize,
    /// Strings whose run exhausted the ε-budget without being accepted.
    pub diverged: BTreeSet<Word>,
}

impl LanguageSample {
    /// Accepted strings with diverged ones counted as rejected.
    pub fn accepted(&self) -> &BTreeSet<Word> {
        &self.strings
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EnumerationMethod {
    /// Breadth-first search over configurations along the input trie.
    ConfigurationSearch,
    /// One independent deterministic run per string. Deterministic machines only.
    StringTesting,
}

/// Every string over Σ of length at most `bound`, in shortlex order.
pub fn all_strings(m: &Pda, bound: usize) -> Vec<Vec<InputSym>> {
    let symbols: Vec<InputSym> = m.input_symbols().collect();
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..bound {
        level = level
            .iter()
            .flat_map(|w: &Vec<InputSym>| {
                symbols.iter().map(move |&a| {
                    let mut next = w.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

/// The strings of length at most `length_bound` accepted by `m`.
///
/// Works for nondeterministic machines too; diverged strings are reported,
/// never dropped.
pub fn enumerate_language(m: &Pda, length_bound: usize, budget: usize) -> LanguageSample {
    enumerate_by_configurations(m, length_bound, budget)
}

pub fn enumerate_language_with(
    m: &Pda,
    length_bound: usize,
    budget: usize,
    method: EnumerationMethod,
) -> Result<LanguageSample, SimError> {
    match method {
        EnumerationMethod::ConfigurationSearch => {
            Ok(enumerate_by_configurations(m, length_bound, budget))
        }
        EnumerationMethod::StringTesting => enumerate_by_strings(m, length_bound, budget),
    }
}

fn enumerate_by_strings(
    m: &Pda,
    length_bound: usize,
    budget: usize,
) -> Result<LanguageSample, SimError> {
    if !classify(m).deterministic {
        return Err(SimError::NotDeterministic);
    }
    let mut sample = LanguageSample {
        strings: BTreeSet::new(),
        length_bound,
        diverged: BTreeSet::new(),
    };
    for w in all_strings(m, length_bound) {
        match verdict_of(m, &w, budget) {
            Verdict::Accepted => {
                sample.strings.insert(Word::from_ids(m, &w));
            }
            Verdict::Diverged => {
                sample.diverged.insert(Word::from_ids(m, &w));
            }
            Verdict::Rejected => {}
        }
    }
    Ok(sample)
}

type Settled = (StateId, Vec<StackSym>);

/// ε-closure of `seeds`: every configuration reachable by at most `budget`
/// ε-moves. The flag is set when some configuration reached by exactly
/// `budget` ε-moves can still make one.
fn epsilon_closure(m: &Pda, seeds: Vec<Settled>, budget: usize) -> (HashSet<Settled>, bool) {
    let mut closure: HashSet<Settled> = seeds.iter().cloned().collect();
    // Configurations reachable by exactly `streak` ε-moves.
    let mut layer: HashSet<Settled> = seeds.into_iter().collect();
    let epsilon_moves = |(q, stack): &Settled| -> Vec<Settled> {
        stack
            .last()
            .and_then(|&top| m.targets(*q, top, None))
            .into_iter()
            .flatten()
            .map(|t| (t.state, replace_top(stack, t)))
            .collect()
    };
    for _ in 0..budget {
        layer = layer.iter().flat_map(epsilon_moves).collect();
        if layer.is_empty() {
            return (closure, false);
        }
        closure.extend(layer.iter().cloned());
    }
    let exhausted = layer.iter().any(|c| !epsilon_moves(c).is_empty());
    (closure, exhausted)
}

/// ε-closure for a deterministic machine: each seed follows one chain, and
/// only its last configuration can move on input or accept.
fn chain_closure(m: &Pda, seeds: Vec<Settled>, budget: usize) -> (HashSet<Settled>, bool) {
    let mut out = HashSet::with_capacity(seeds.len());
    let mut exhausted = false;
    for (mut q, mut stack) in seeds {
        let mut streak = 0;
        loop {
            let rule = stack
                .last()
                .and_then(|&top| m.targets(q, top, None))
                .and_then(|ts| ts.first());
            let Some(t) = rule else {
                out.insert((q, stack));
                break;
            };
            if streak == budget {
                exhausted = true;
                break;
            }
            stack.pop();
            stack.extend_from_slice(&t.push);
            q = t.state;
            streak += 1;
        }
    }
    (out, exhausted)
}

type Closure = fn(&Pda, Vec<Settled>, usize) -> (HashSet<Settled>, bool);

fn enumerate_by_configurations(m: &Pda, length_bound: usize, budget: usize) -> LanguageSample {
    let closure: Closure = if classify(m).deterministic {
        chain_closure
    } else {
        epsilon_closure
    };
    enumerate_with_closure(m, length_bound, budget, closure)
}

fn enumerate_with_closure(
    m: &Pda,
    length_bound: usize,
    budget: usize,
    closure: Closure,
) -> LanguageSample {
    let symbols: Vec<InputSym> = m.input_symbols().collect();
    let mut sample = LanguageSample {
        strings: BTreeSet::new(),
        length_bound,
        diverged: BTreeSet::new(),
    };
    let start = vec![(m.initial_state(), m.initial_pushdown().to_vec())];
    let (configs, exhausted) = closure(m, start, budget);
    let mut level = vec![(Vec::new(), configs, exhausted)];
    for depth in 0..=length_bound {
        let mut next_level = Vec::new();
        for (word, configs, tainted) in level {
            let accepted = configs
                .iter()
                .any(|(q, stack)| stack.is_empty() && m.is_final(*q));
            if accepted {
                sample.strings.insert(Word::from_ids(m, &word));
            } else if tainted {
                sample.diverged.insert(Word::from_ids(m, &word));
            }
            if depth == length_bound || (configs.is_empty() && !tainted) {
                continue;
            }
            for &a in &symbols {
                let seeds: Vec<Settled> = configs
                    .iter()
                    .filter_map(|(q, stack)| Some((*q, stack, *stack.last()?)))
                    .filter_map(|(q, stack, top)| Some((stack, m.targets(q, top, Some(a))?)))
                    .flat_map(|(stack, ts)| ts.iter().map(|t| (t.state, replace_top(stack, t))))
                    .collect();
                let (configs, exhausted) = closure(m, seeds, budget);
                let mut child = word.clone();
                child.push(a);
                next_level.push((child, configs, tainted || exhausted));
            }
        }
        level = next_level;
    }
    sample
}

/// Outcome of a prefix-freeness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixCheck {
    PrefixFree,
    /// `prefix` is a proper prefix of `word`; both are members.
    Violation { prefix: Word, word: Word },
}

impl PrefixCheck {
    pub fn is_prefix_free(&self) -> bool {
        matches!(self, PrefixCheck::PrefixFree)
    }
}

pub fn prefix_free(sample: &LanguageSample) -> PrefixCheck {
    prefix_free_set(&sample.strings)
}

pub fn prefix_free_set(strings: &BTreeSet<Word>) -> PrefixCheck {
    // Shortlex order visits every candidate prefix before its extensions.
    let members: HashSet<&[String]> = strings.iter().map(|w| w.symbols()).collect();
    for w in strings {
        for cut in 0..w.len() {
            if members.contains(&w.symbols()[..cut]) {
                return PrefixCheck::Violation {
                    prefix: Word::new(w.symbols()[..cut].to_vec()),
                    word: w.clone(),
                };
            }
        }
    }
    PrefixCheck::PrefixFree
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Discrepancy {
    /// In the reference set, not accepted by the machine.
    Missing,
    /// Accepted by the machine, not in the reference set.
    Unexpected,
    /// The run exhausted its ε-budget.
    Diverged,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundedMatch {
    Exact,
    Counterexample { word: Word, kind: Discrepancy },
}

impl BoundedMatch {
    pub fn is_exact(&self) -> bool {
        matches!(self, BoundedMatch::Exact)
    }
}

/// Compares `m`'s bounded language with `reference`; reports the shortlex
/// least string on which they differ.
pub fn accepts_exactly(
    m: &Pda,
    reference: &BTreeSet<Word>,
    length_bound: usize,
    budget: usize,
) -> Result<BoundedMatch, SimError> {
    accepts_exactly_with(m, reference, length_bound, budget, EnumerationMethod::ConfigurationSearch)
}

pub fn accepts_exactly_with(
    m: &Pda,
    reference: &BTreeSet<Word>,
    length_bound: usize,
    budget: usize,
    method: EnumerationMethod,
) -> Result<BoundedMatch, SimError> {
    let longest = reference.iter().map(Word::len).max().unwrap_or(0);
    if length_bound < longest {
        return Err(SimError::BoundTooSmall {
            bound: length_bound,
            longest,
        });
    }
    let sample = enumerate_language_with(m, length_bound, budget, method)?;
    let candidates = [
        sample.diverged.first().map(|w| (w, Discrepancy::Diverged)),
        reference.difference(&sample.strings).next().map(|w| (w, Discrepancy::Missing)),
        sample.strings.difference(reference).next().map(|w| (w, Discrepancy::Unexpected)),
    ];
    Ok(candidates
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.cmp(b.0))
        .map_or(BoundedMatch::Exact, |(w, kind)| BoundedMatch::Counterexample {
            word: w.clone(),
            kind,
        }))
}
