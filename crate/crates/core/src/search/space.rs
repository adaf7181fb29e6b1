//! The bounded space of realtime machines over `{a, b}` and its quotient by
//! renaming.
//!
//! A machine in the space has `1..=max_states` states and
//! `1..=max_pushdown_symbols` pushdown symbols. Every key `(state, top,
//! input)` is either undefined or maps to one `(state, push)` with
//! `|push| ≤ max_push_length`; the initial string has length
//! `1..=max_initial_length`. One-state machines have their state final;
//! larger ones range over every nonempty final set.
//!
//! Two machines are the same up to renaming when a permutation of the
//! pushdown symbols and a permutation of the states fixing the initial
//! state maps one onto the other. The canonical representative of a class
//! is its least member under the derived ordering of [`RawMachine`].

use std::collections::BTreeSet;

use itertools::Itertools;

use crate::automaton::{validate, Pda, PdaDescription, TransitionDescription, STATELESS_STATE};

use super::SearchBounds;

pub(crate) const INPUTS: [&str; 2] = ["a", "b"];

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Rule {
    Undefined,
    Move { target: u8, push: Vec<u8> },
}

/// Compact machine: `rules[key(state, top, input)]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct RawMachine {
    pub states: u8,
    pub symbols: u8,
    pub alpha: Vec<u8>,
    pub finals: u32,
    pub rules: Vec<Rule>,
}

pub(crate) fn key(symbols: usize, state: usize, top: usize, input: usize) -> usize {
    (state * symbols + top) * INPUTS.len() + input
}

/// All strings over `0..symbols` with length in `lengths`, shortlex.
fn strings(symbols: usize, lengths: std::ops::RangeInclusive<usize>) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut level: Vec<Vec<u8>> = vec![Vec::new()];
    for len in 0..=*lengths.end() {
        if lengths.contains(&len) {
            out.extend(level.iter().cloned());
        }
        level = level
            .iter()
            .flat_map(|s| {
                (0..symbols as u8).map(move |x| {
                    let mut t = s.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

/// The sub-space with exactly `states` states and `symbols` pushdown symbols.
#[derive(Clone, Debug)]
pub(crate) struct Shape {
    pub states: usize,
    pub symbols: usize,
    /// Every value a key can take, `Rule::Undefined` first.
    pub choices: Vec<Rule>,
    pub alphas: Vec<Vec<u8>>,
    pub finals: Vec<u32>,
}

impl Shape {
    pub fn new(states: usize, symbols: usize, push_limit: usize, alpha_limit: usize) -> Self {
        let pushes = strings(symbols, 0..=push_limit);
        let mut choices = vec![Rule::Undefined];
        for target in 0..states as u8 {
            choices.extend(pushes.iter().map(|p| Rule::Move {
                target,
                push: p.clone(),
            }));
        }
        let finals = if states == 1 {
            vec![1]
        } else {
            (1..1u32 << states).collect()
        };
        Shape {
            states,
            symbols,
            choices,
            alphas: strings(symbols, 1..=alpha_limit),
            finals,
        }
    }

    pub fn key_count(&self) -> usize {
        self.states * self.symbols * INPUTS.len()
    }

    pub fn key(&self, state: usize, top: usize, input: usize) -> usize {
        key(self.symbols, state, top, input)
    }

    /// `(state permutation fixing 0, symbol permutation)` pairs.
    pub fn group(&self) -> Vec<(Vec<u8>, Vec<u8>)> {
        let state_perms: Vec<Vec<u8>> = (1..self.states as u8)
            .permutations(self.states - 1)
            .map(|rest| std::iter::once(0).chain(rest).collect())
            .collect();
        let symbol_perms: Vec<Vec<u8>> = (0..self.symbols as u8)
            .permutations(self.symbols)
            .collect();
        state_perms
            .iter()
            .cartesian_product(&symbol_perms)
            .map(|(s, x)| (s.clone(), x.clone()))
            .collect()
    }
}

pub(crate) fn shapes(bounds: &SearchBounds) -> Vec<Shape> {
    (1..=bounds.max_states)
        .flat_map(|q| {
            (1..=bounds.max_pushdown_symbols).map(move |k| {
                Shape::new(q, k, bounds.max_push_length, bounds.max_initial_length)
            })
        })
        .collect()
}

impl RawMachine {
    pub fn relabel(&self, state_perm: &[u8], symbol_perm: &[u8]) -> RawMachine {
        let symbols = self.symbols as usize;
        let mut rules = vec![Rule::Undefined; self.rules.len()];
        for q in 0..self.states as usize {
            for x in 0..symbols {
                for a in 0..INPUTS.len() {
                    let rule = match &self.rules[key(symbols, q, x, a)] {
                        Rule::Undefined => Rule::Undefined,
                        Rule::Move { target, push } => Rule::Move {
                            target: state_perm[*target as usize],
                            push: push.iter().map(|&y| symbol_perm[y as usize]).collect(),
                        },
                    };
                    let to = key(symbols, state_perm[q] as usize, symbol_perm[x] as usize, a);
                    rules[to] = rule;
                }
            }
        }
        let finals = (0..self.states as usize)
            .filter(|&q| self.finals >> q & 1 == 1)
            .fold(0, |acc, q| acc | 1 << state_perm[q]);
        RawMachine {
            states: self.states,
            symbols: self.symbols,
            alpha: self.alpha.iter().map(|&y| symbol_perm[y as usize]).collect(),
            finals,
            rules,
        }
    }

    pub fn canonical(&self, group: &[(Vec<u8>, Vec<u8>)]) -> RawMachine {
        group
            .iter()
            .map(|(s, x)| self.relabel(s, x))
            .min()
            .unwrap_or_else(|| self.clone())
    }

    pub fn to_pda(&self) -> Pda {
        let stateless = self.states == 1;
        let state_name = |q: usize| {
            if stateless {
                STATELESS_STATE.to_owned()
            } else {
                format!("q{q}")
            }
        };
        let sym = |x: &u8| format!("X{x}");
        let symbols = self.symbols as usize;
        let mut transitions = Vec::new();
        for q in 0..self.states as usize {
            for x in 0..symbols {
                for (a, input) in INPUTS.iter().enumerate() {
                    if let Rule::Move { target, push } = &self.rules[key(symbols, q, x, a)] {
                        transitions.push(TransitionDescription {
                            state: state_name(q),
                            top: sym(&(x as u8)),
                            input: Some((*input).to_owned()),
                            target: state_name(*target as usize),
                            push: push.iter().map(sym).collect(),
                        });
                    }
                }
            }
        }
        let d = PdaDescription {
            states: (0..self.states as usize).map(state_name).collect(),
            input_alphabet: INPUTS.iter().map(|s| s.to_string()).collect(),
            pushdown_alphabet: (0..self.symbols).map(|x| sym(&x)).collect(),
            initial_state: state_name(0),
            initial_pushdown: self.alpha.iter().map(sym).collect(),
            final_states: (0..self.states as usize)
                .filter(|&q| self.finals >> q & 1 == 1)
                .map(state_name)
                .collect(),
            transitions,
        };
        validate(&d).expect("machines in the search space are well-formed")
    }

    /// Inverse of [`RawMachine::to_pda`] for any realtime deterministic
    /// machine over `{a, b}` (symbols and states taken in declared order).
    pub fn from_pda(m: &Pda) -> Option<RawMachine> {
        if m.states().len() > 8 || m.pushdown_alphabet().len() > u8::MAX as usize {
            return None;
        }
        let inputs: Vec<_> = INPUTS.iter().map(|a| m.input_id(a)).collect::<Option<_>>()?;
        if m.input_alphabet().len() != INPUTS.len() {
            return None;
        }
        let symbols = m.pushdown_alphabet().len();
        let states = m.states().len();
        let mut rules = vec![Rule::Undefined; states * symbols * INPUTS.len()];
        for (k, targets) in m.transitions() {
            let input = inputs.iter().position(|&a| Some(a) == k.input)?;
            if targets.len() != 1 {
                return None;
            }
            let t = targets.first()?;
            rules[key(symbols, k.state.index(), k.top.index(), input)] = Rule::Move {
                target: t.state.index() as u8,
                push: t.push.iter().map(|x| x.index() as u8).collect(),
            };
        }
        if m.initial_state().index() != 0 {
            return None;
        }
        let finals = if states == 1 {
            1
        } else {
            m.final_states().iter().fold(0, |acc, q| acc | 1 << q.index())
        };
        Some(RawMachine {
            states: states as u8,
            symbols: symbols as u8,
            alpha: m.initial_pushdown().iter().map(|x| x.index() as u8).collect(),
            finals,
            rules,
        })
    }
}

/// Streams every raw machine of a shape (not canonicalized).
pub(crate) struct RawStream<'a> {
    shape: &'a Shape,
    finals: usize,
    alpha: usize,
    odometer: Vec<usize>,
    done: bool,
}

impl<'a> RawStream<'a> {
    pub fn new(shape: &'a Shape) -> Self {
        RawStream {
            shape,
            finals: 0,
            alpha: 0,
            odometer: vec![0; shape.key_count()],
            done: false,
        }
    }
}

impl Iterator for RawStream<'_> {
    type Item = RawMachine;

    fn next(&mut self) -> Option<RawMachine> {
        if self.done {
            return None;
        }
        let shape = self.shape;
        let machine = RawMachine {
            states: shape.states as u8,
            symbols: shape.symbols as u8,
            alpha: shape.alphas[self.alpha].clone(),
            finals: shape.finals[self.finals],
            rules: self.odometer.iter().map(|&c| shape.choices[c].clone()).collect(),
        };
        // Advance rules fastest, then the initial string, then the final set.
        let mut carry = true;
        for digit in self.odometer.iter_mut() {
            *digit += 1;
            if *digit < shape.choices.len() {
                carry = false;
                break;
            }
            *digit = 0;
        }
        if carry {
            self.alpha += 1;
            if self.alpha == shape.alphas.len() {
                self.alpha = 0;
                self.finals += 1;
                if self.finals == shape.finals.len() {
                    self.done = true;
                }
            }
        }
        Some(machine)
    }
}

/// Canonical machines of every shape within `bounds`.
pub(crate) fn canonical_stream(bounds: &SearchBounds) -> impl Iterator<Item = RawMachine> {
    shapes(bounds).into_iter().flat_map(|shape| {
        let group = shape.group();
        let members: Vec<RawMachine> = RawStream::new(&shape)
            .filter(|m| m.canonical(&group) == *m)
            .collect();
        members
    })
}

fn checked_pow(base: u128, exp: usize) -> Option<u128> {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base))
}

fn geometric(base: u128, lengths: std::ops::RangeInclusive<usize>) -> Option<u128> {
    lengths
        .map(|l| checked_pow(base, l))
        .try_fold(0u128, |acc, t| acc.checked_add(t?))
}

/// Number of raw machines within `bounds`; `None` if it exceeds `u128`.
pub(crate) fn raw_size(bounds: &SearchBounds) -> Option<u128> {
    let mut total = 0u128;
    for q in 1..=bounds.max_states {
        for k in 1..=bounds.max_pushdown_symbols {
            let k = k as u128;
            let choices = (q as u128)
                .checked_mul(geometric(k, 0..=bounds.max_push_length)?)?
                .checked_add(1)?;
            let rules = checked_pow(choices, 2 * q * k as usize)?;
            let alphas = geometric(k, 1..=bounds.max_initial_length)?;
            let finals = if q == 1 { 1 } else { (1u128 << q) - 1 };
            total = total.checked_add(rules.checked_mul(alphas)?.checked_mul(finals)?)?;
        }
    }
    Some(total)
}

/// Cycle length of every point under `perm`, and the number of cycles.
fn cycle_lengths(perm: &[u8]) -> (Vec<usize>, Vec<usize>) {
    let mut len_of = vec![0; perm.len()];
    let mut cycles = Vec::new();
    for start in 0..perm.len() {
        if len_of[start] != 0 {
            continue;
        }
        let mut members = vec![start];
        let mut i = perm[start] as usize;
        while i != start {
            members.push(i);
            i = perm[i] as usize;
        }
        for &m in &members {
            len_of[m] = members.len();
        }
        cycles.push(members.len());
    }
    (len_of, cycles)
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Number of renaming classes within `bounds`, by counting the machines each
/// renaming fixes and averaging over the group.
pub(crate) fn orbit_count(bounds: &SearchBounds) -> Option<u128> {
    let mut total = 0u128;
    for shape in shapes(bounds) {
        let group = shape.group();
        let mut fixed_sum = 0u128;
        for (sp, xp) in &group {
            let (state_len, state_cycles) = cycle_lengths(sp);
            let (sym_len, sym_cycles) = cycle_lengths(xp);
            let fixed_syms = sym_len.iter().filter(|&&l| l == 1).count() as u128;
            let alphas = geometric(fixed_syms, 1..=bounds.max_initial_length)?;
            let finals = if shape.states == 1 {
                1
            } else {
                (1u128 << state_cycles.len()) - 1
            };
            let mut rules = 1u128;
            for &a in &state_cycles {
                for &b in &sym_cycles {
                    let period = a * b / gcd(a, b);
                    let states_ok = state_len.iter().filter(|&&l| period.is_multiple_of(l)).count() as u128;
                    let syms_ok = sym_len.iter().filter(|&&l| period.is_multiple_of(l)).count() as u128;
                    let per_orbit = states_ok
                        .checked_mul(geometric(syms_ok, 0..=bounds.max_push_length)?)?
                        .checked_add(1)?;
                    rules = rules.checked_mul(checked_pow(per_orbit, gcd(a, b) * INPUTS.len())?)?;
                }
            }
            fixed_sum = fixed_sum.checked_add(alphas.checked_mul(finals)?.checked_mul(rules)?)?;
        }
        let order = group.len() as u128;
        debug_assert_eq!(fixed_sum % order, 0, "orbit counting must divide evenly");
        total = total.checked_add(fixed_sum / order)?;
    }
    Some(total)
}

/// Distinct renaming classes among `machines`.
pub(crate) fn canonical_set(
    machines: impl IntoIterator<Item = RawMachine>,
    group: &[(Vec<u8>, Vec<u8>)],
) -> BTreeSet<RawMachine> {
    machines.into_iter().map(|m| m.canonical(group)).collect()
}
