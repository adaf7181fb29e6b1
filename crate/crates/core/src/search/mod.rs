//! Exhaustive search over bounded spaces of realtime machines.
//!
//! Certificates produced here cover only the bounded model carried in
//! [`SearchBounds`]: push strings, initial strings and the enumeration
//! length are all capped. An empty certificate says no machine *in that
//! space* accepts the target up to `length_bound`; it is not a statement
//! about unbounded machines.
//!
//! The search assigns transitions lazily. A partial machine is evaluated on
//! every input string up to the length bound; evaluation stops at keys that
//! have not been chosen yet. If the decided part already accepts a string
//! outside the target (or rejects one inside it), the whole subtree of
//! completions is discarded at once. Otherwise the first undecided key met
//! in shortlex order is branched on. Keys never reached within the bound
//! stay free, and every completion of them is an acceptor.

mod space;

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::Pda;
use crate::format::serialize;
use crate::simulator::{accepts_exactly_with, BoundedMatch, EnumerationMethod, Word};
use crate::witnesses::{witness_language, WitnessSpec};

use space::{canonical_set, RawMachine, Rule, Shape, INPUTS};

/// Default ceiling on the predicted number of raw candidates for m-state
/// searches.
pub const DEFAULT_CEILING: u128 = 100_000_000;

/// Longest input the search evaluates.
pub const MAX_LENGTH_BOUND: usize = 62;

/// Families with more free completions than this are reported by a single
/// representative.
const EXPANSION_LIMIT: u128 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("bad search bounds: {0}")]
    BadBounds(String),
    #[error("search space has {} candidates, above the ceiling of {ceiling}", predicted.map_or("more than 2^128".to_owned(), |p| p.to_string()))]
    SpaceTooLarge { predicted: Option<u128>, ceiling: u128 },
    #[error("target string `{0}` is not over {{a, b}}")]
    TargetAlphabet(Word),
    #[error("acceptor failed re-verification: {0}")]
    Verification(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_pushdown_symbols: usize,
    pub max_push_length: usize,
    pub max_initial_length: usize,
    pub max_states: usize,
    pub length_bound: usize,
    /// Only used when re-verifying acceptors; the space itself has no ε-rules.
    pub epsilon_budget: usize,
}

impl SearchBounds {
    pub fn stateless(gamma: usize, push: usize, alpha: usize, length_bound: usize) -> Self {
        SearchBounds {
            max_pushdown_symbols: gamma,
            max_push_length: push,
            max_initial_length: alpha,
            max_states: 1,
            length_bound,
            epsilon_budget: 0,
        }
    }

    pub fn with_states(self, max_states: usize) -> Self {
        SearchBounds { max_states, ..self }
    }

    pub fn with_gamma(self, max_pushdown_symbols: usize) -> Self {
        SearchBounds {
            max_pushdown_symbols,
            ..self
        }
    }

    pub fn check(&self) -> Result<(), SearchError> {
        let fields = [
            ("max pushdown symbols", self.max_pushdown_symbols),
            ("max push length", self.max_push_length),
            ("max initial length", self.max_initial_length),
            ("max states", self.max_states),
            ("length bound", self.length_bound),
        ];
        if let Some((name, _)) = fields.iter().find(|(_, v)| *v == 0) {
            return Err(SearchError::BadBounds(format!("{name} must be at least 1")));
        }
        if self.length_bound > MAX_LENGTH_BOUND {
            return Err(SearchError::BadBounds(format!(
                "length bound above {MAX_LENGTH_BOUND}"
            )));
        }
        if self.max_states > 8 || self.max_pushdown_symbols > 8 {
            return Err(SearchError::BadBounds(
                "at most 8 states and 8 pushdown symbols".into(),
            ));
        }
        Ok(())
    }

    /// Raw candidates (before renaming) in the space, if it fits in `u128`.
    pub fn space_size(&self) -> Option<u128> {
        space::raw_size(self)
    }

    /// Renaming classes in the space, if the count fits in `u128`.
    pub fn orbit_count(&self) -> Option<u128> {
        space::orbit_count(self)
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "max-pushdown-symbols={} max-push-length={} max-initial-length={} max-states={} length-bound={} epsilon-budget={}",
            self.max_pushdown_symbols,
            self.max_push_length,
            self.max_initial_length,
            self.max_states,
            self.length_bound,
            self.epsilon_budget
        )
    }
}

/// Every machine in the bounded space, once per renaming class.
pub fn enumerate_machines(
    bounds: &SearchBounds,
) -> Result<impl Iterator<Item = Pda>, SearchError> {
    bounds.check()?;
    Ok(space::canonical_stream(bounds).map(|m| m.to_pda()))
}

/// The representative of `m`'s renaming class, or `None` if `m` is not a
/// realtime deterministic machine over `{a, b}` with at most 8 states and
/// 8 pushdown symbols.
pub fn canonical_form(m: &Pda) -> Option<Pda> {
    let raw = RawMachine::from_pda(m)?;
    if raw.symbols > 8 {
        return None;
    }
    let shape = Shape::new(raw.states as usize, raw.symbols as usize, 0, 1);
    Some(raw.canonical(&shape.group()).to_pda())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub target_language: BTreeSet<Word>,
    pub bounds: SearchBounds,
    /// Raw candidates covered, explicitly or inside a discarded subtree.
    pub candidates_examined: u128,
    /// Renaming classes in the space.
    pub candidates_after_symmetry: u128,
    /// Acceptors, one per renaming class, each re-verified.
    pub accepting_machines: Vec<Pda>,
    pub wall_notes: Vec<String>,
}

impl SearchReport {
    pub fn is_certificate_of_absence(&self) -> bool {
        self.accepting_machines.is_empty()
    }
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# search report")?;
        writeln!(
            f,
            "# covers only the bounded model below; not a statement about unbounded machines"
        )?;
        let target: Vec<String> = self.target_language.iter().map(Word::to_string).collect();
        writeln!(f, "target: {}", target.join(" "))?;
        writeln!(f, "bounds: {}", self.bounds)?;
        writeln!(f, "candidates-examined: {}", self.candidates_examined)?;
        writeln!(f, "candidates-after-symmetry: {}", self.candidates_after_symmetry)?;
        writeln!(f, "accepting-machines: {}", self.accepting_machines.len())?;
        for note in &self.wall_notes {
            writeln!(f, "note: {note}")?;
        }
        for (i, m) in self.accepting_machines.iter().enumerate() {
            writeln!(f, "--- machine {}", i + 1)?;
            f.write_str(&serialize(m))?;
        }
        Ok(())
    }
}

/// Target words as `1` followed by the input bits, `a = 0`, `b = 1`.
struct TargetIndex {
    words: HashSet<u64>,
    proper_prefixes: HashSet<u64>,
}

impl TargetIndex {
    fn new(target: &BTreeSet<Word>) -> Result<Self, SearchError> {
        let mut words = HashSet::new();
        let mut proper_prefixes = HashSet::new();
        for w in target {
            let mut code = 1u64;
            for s in w.symbols() {
                proper_prefixes.insert(code);
                let bit = INPUTS
                    .iter()
                    .position(|a| a == s)
                    .ok_or_else(|| SearchError::TargetAlphabet(w.clone()))?;
                code = code << 1 | bit as u64;
            }
            words.insert(code);
        }
        Ok(TargetIndex {
            words,
            proper_prefixes,
        })
    }

    /// Some target word is `code` or extends it.
    fn reaches(&self, code: u64) -> bool {
        self.words.contains(&code) || self.proper_prefixes.contains(&code)
    }
}

enum Eval {
    Violation,
    Need(usize),
    Consistent,
}

/// One independent slice of the space: a shape with fixed final set and
/// initial string.
struct Task<'a> {
    shape: &'a Shape,
    finals: u32,
    alpha: &'a [u8],
}

#[derive(Default)]
struct Tally {
    covered: u128,
    accepting_raw: u128,
    nodes: u64,
    acceptors: BTreeSet<RawMachine>,
    truncated_families: u64,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.covered += other.covered;
        self.accepting_raw += other.accepting_raw;
        self.nodes += other.nodes;
        self.acceptors.extend(other.acceptors);
        self.truncated_families += other.truncated_families;
        self
    }
}

struct Explorer<'a> {
    task: Task<'a>,
    target: &'a TargetIndex,
    length_bound: usize,
    choices: u128,
}

impl Explorer<'_> {
    fn evaluate(&self, slots: &[Option<u16>]) -> Eval {
        let shape = self.task.shape;
        let mut level: Vec<(u64, u8, Vec<u8>)> = vec![(1, 0, self.task.alpha.to_vec())];
        let mut need = None;
        for depth in 0..=self.length_bound {
            let mut next = Vec::new();
            for (code, state, stack) in level {
                let Some(&top) = stack.last() else {
                    let accepted = self.task.finals >> state & 1 == 1;
                    if accepted != self.target.words.contains(&code)
                        || self.target.proper_prefixes.contains(&code)
                    {
                        return Eval::Violation;
                    }
                    continue;
                };
                if self.target.words.contains(&code) {
                    return Eval::Violation;
                }
                if depth == self.length_bound {
                    continue;
                }
                for input in 0..INPUTS.len() {
                    let child = code << 1 | input as u64;
                    let key = shape.key(state as usize, top as usize, input);
                    match slots[key].map(|c| &shape.choices[c as usize]) {
                        None => {
                            need.get_or_insert(key);
                        }
                        Some(Rule::Undefined) => {
                            if self.target.reaches(child) {
                                return Eval::Violation;
                            }
                        }
                        Some(Rule::Move { target, push }) => {
                            let mut s = stack[..stack.len() - 1].to_vec();
                            s.extend_from_slice(push);
                            next.push((child, *target, s));
                        }
                    }
                }
            }
            level = next;
        }
        need.map_or(Eval::Consistent, Eval::Need)
    }

    fn free_completions(&self, undecided: usize) -> u128 {
        self.choices.saturating_pow(undecided as u32)
    }

    fn explore(&self, slots: &mut Vec<Option<u16>>, undecided: usize, tally: &mut Tally) {
        tally.nodes += 1;
        match self.evaluate(slots) {
            Eval::Violation => tally.covered += self.free_completions(undecided),
            Eval::Consistent => {
                let n = self.free_completions(undecided);
                tally.covered += n;
                tally.accepting_raw += n;
                self.record_family(slots, n, tally);
            }
            Eval::Need(key) => {
                for choice in 0..self.choices as u16 {
                    slots[key] = Some(choice);
                    self.explore(slots, undecided - 1, tally);
                }
                slots[key] = None;
            }
        }
    }

    /// Depth-first search that stops at the first acceptor.
    fn exists(&self, slots: &mut Vec<Option<u16>>) -> bool {
        match self.evaluate(slots) {
            Eval::Violation => false,
            Eval::Consistent => true,
            Eval::Need(key) => {
                let found = (0..self.choices as u16).any(|choice| {
                    slots[key] = Some(choice);
                    self.exists(slots)
                });
                slots[key] = None;
                found
            }
        }
    }

    fn machine(&self, slots: &[Option<u16>]) -> RawMachine {
        let shape = self.task.shape;
        RawMachine {
            states: shape.states as u8,
            symbols: shape.symbols as u8,
            alpha: self.task.alpha.to_vec(),
            finals: self.task.finals,
            rules: slots
                .iter()
                .map(|c| shape.choices[c.unwrap_or(0) as usize].clone())
                .collect(),
        }
    }

    fn record_family(&self, slots: &[Option<u16>], size: u128, tally: &mut Tally) {
        let group = self.task.shape.group();
        if size > EXPANSION_LIMIT {
            tally.truncated_families += 1;
            tally.acceptors.insert(self.machine(slots).canonical(&group));
            return;
        }
        let free: Vec<usize> = (0..slots.len()).filter(|&k| slots[k].is_none()).collect();
        let mut filled = slots.to_vec();
        let mut completions = Vec::with_capacity(size as usize);
        let mut counter = vec![0u16; free.len()];
        loop {
            for (&k, &c) in free.iter().zip(&counter) {
                filled[k] = Some(c);
            }
            completions.push(self.machine(&filled));
            let mut carry = true;
            for digit in counter.iter_mut() {
                *digit += 1;
                if u128::from(*digit) < self.choices {
                    carry = false;
                    break;
                }
                *digit = 0;
            }
            if carry {
                break;
            }
        }
        tally.acceptors.extend(canonical_set(completions, &group));
    }
}

fn tasks(shapes: &[Shape]) -> Vec<Task<'_>> {
    shapes
        .iter()
        .flat_map(|shape| {
            shape.finals.iter().flat_map(move |&finals| {
                shape.alphas.iter().map(move |alpha| Task {
                    shape,
                    finals,
                    alpha,
                })
            })
        })
        .collect()
}

fn check_target(target: &BTreeSet<Word>, bounds: &SearchBounds) -> Result<TargetIndex, SearchError> {
    let longest = target.iter().map(Word::len).max().unwrap_or(0);
    if bounds.length_bound < longest {
        return Err(SearchError::BadBounds(format!(
            "length bound {} is below the longest target string ({longest})",
            bounds.length_bound
        )));
    }
    TargetIndex::new(target)
}

/// Every machine in the bounded space whose language up to
/// `bounds.length_bound` is exactly `target`.
///
/// With a `ceiling`, refuses spaces predicted to hold more raw candidates.
pub fn search_acceptors(
    target: &BTreeSet<Word>,
    bounds: &SearchBounds,
    ceiling: Option<u128>,
) -> Result<SearchReport, SearchError> {
    bounds.check()?;
    let index = check_target(target, bounds)?;
    let predicted = bounds.space_size();
    if let Some(ceiling) = ceiling {
        if predicted.is_none_or(|p| p > ceiling) {
            return Err(SearchError::SpaceTooLarge { predicted, ceiling });
        }
    }
    let (Some(predicted), Some(orbits)) = (predicted, bounds.orbit_count()) else {
        return Err(SearchError::SpaceTooLarge {
            predicted,
            ceiling: u128::MAX,
        });
    };

    let shapes = space::shapes(bounds);
    let tally = tasks(&shapes)
        .into_par_iter()
        .map(|task| {
            let explorer = Explorer {
                choices: task.shape.choices.len() as u128,
                task,
                target: &index,
                length_bound: bounds.length_bound,
            };
            let keys = explorer.task.shape.key_count();
            let mut tally = Tally::default();
            explorer.explore(&mut vec![None; keys], keys, &mut tally);
            tally
        })
        .reduce(Tally::default, Tally::merge);

    if tally.covered != predicted {
        return Err(SearchError::Verification(format!(
            "search covered {} candidates but the space holds {predicted}",
            tally.covered
        )));
    }

    let accepting_machines: Vec<Pda> = tally.acceptors.iter().map(RawMachine::to_pda).collect();
    for m in &accepting_machines {
        let verdict = accepts_exactly_with(
            m,
            target,
            bounds.length_bound,
            bounds.epsilon_budget,
            EnumerationMethod::StringTesting,
        )
        .map_err(|e| SearchError::Verification(e.to_string()))?;
        if let BoundedMatch::Counterexample { word, kind } = verdict {
            return Err(SearchError::Verification(format!(
                "{kind:?} on `{word}` for\n{}",
                serialize(m)
            )));
        }
    }

    let mut wall_notes = vec![
        format!("search nodes: {}", tally.nodes),
        format!("accepting raw candidates: {}", tally.accepting_raw),
    ];
    if tally.truncated_families > 0 {
        wall_notes.push(format!(
            "{} acceptor families above {EXPANSION_LIMIT} completions reported by one representative",
            tally.truncated_families
        ));
    }
    Ok(SearchReport {
        target_language: target.clone(),
        bounds: *bounds,
        candidates_examined: tally.covered,
        candidates_after_symmetry: orbits,
        accepting_machines,
        wall_notes,
    })
}

/// Searches the stateless space with `n − 1` pushdown symbols for an
/// acceptor of `L_n`.
pub fn certify_lower_bound(n: usize, bounds: &SearchBounds) -> Result<SearchReport, SearchError> {
    if n < 2 {
        return Err(SearchError::BadBounds(format!("n must be at least 2 (got {n})")));
    }
    if bounds.max_states != 1 {
        return Err(SearchError::BadBounds("stateless search needs max states = 1".into()));
    }
    if bounds.max_pushdown_symbols != n - 1 {
        return Err(SearchError::BadBounds(format!(
            "max pushdown symbols must be n − 1 = {}",
            n - 1
        )));
    }
    if bounds.length_bound < n + 1 {
        return Err(SearchError::BadBounds(format!(
            "length bound must be at least n + 1 = {}",
            n + 1
        )));
    }
    let target = witness_language(WitnessSpec::StatelessLn { n })
        .map_err(|e| SearchError::BadBounds(e.to_string()))?;
    search_acceptors(&target, bounds, None)
}

/// Searches realtime machines with at most `m` states and `n − 1` pushdown
/// symbols for an acceptor of `L_{m,n}`.
pub fn certify_mstate_lower_bound(
    m: usize,
    n: usize,
    bounds: &SearchBounds,
    ceiling: u128,
) -> Result<SearchReport, SearchError> {
    if m < 1 || n < 2 {
        return Err(SearchError::BadBounds(format!(
            "need m ≥ 1 and n ≥ 2 (got m={m}, n={n})"
        )));
    }
    if bounds.max_states != m {
        return Err(SearchError::BadBounds(format!("max states must be m = {m}")));
    }
    if bounds.max_pushdown_symbols != n - 1 {
        return Err(SearchError::BadBounds(format!(
            "max pushdown symbols must be n − 1 = {}",
            n - 1
        )));
    }
    if bounds.length_bound < m * n + 1 {
        return Err(SearchError::BadBounds(format!(
            "length bound must be at least mn + 1 = {}",
            m * n + 1
        )));
    }
    let target = witness_language(WitnessSpec::MStateLmn { m, n })
        .map_err(|e| SearchError::BadBounds(e.to_string()))?;
    search_acceptors(&target, bounds, Some(ceiling))
}

/// Smallest `k ≤ bounds.max_pushdown_symbols` whose bounded space holds an
/// acceptor of `target`; `None` when no such `k` exists within bounds.
pub fn min_pushdown_alphabet(
    target: &BTreeSet<Word>,
    bounds: &SearchBounds,
) -> Result<Option<usize>, SearchError> {
    bounds.check()?;
    let index = check_target(target, bounds)?;
    for k in 1..=bounds.max_pushdown_symbols {
        // Spaces below k were already searched.
        let shapes: Vec<Shape> = (1..=bounds.max_states)
            .map(|q| Shape::new(q, k, bounds.max_push_length, bounds.max_initial_length))
            .collect();
        let found = tasks(&shapes).into_par_iter().any(|task| {
            let explorer = Explorer {
                choices: task.shape.choices.len() as u128,
                task,
                target: &index,
                length_bound: bounds.length_bound,
            };
            explorer.exists(&mut vec![None; explorer.task.shape.key_count()])
        });
        if found {
            return Ok(Some(k));
        }
    }
    Ok(None)
}
