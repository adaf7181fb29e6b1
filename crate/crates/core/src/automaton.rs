//! The automaton data model: states, alphabets, the transition relation and
//! the classification predicates (deterministic, realtime, stateless,
//! pushdown-alphabet-limited).
//!
//! Pushdown strings are always written bottom-to-top, so the top of the
//! pushdown is the *last* element of a `Vec`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Token reserved for the empty string, both as "no input" and as an empty push.
pub const EPSILON_TOKEN: &str = "eps";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub(crate) u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackSym(pub(crate) u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InputSym(pub(crate) u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl StackSym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl InputSym {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Domain of the transition relation: `(state, top, input-or-ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionKey {
    pub state: StateId,
    pub top: StackSym,
    /// `None` is an ε-transition.
    pub input: Option<InputSym>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionTarget {
    pub state: StateId,
    /// Replacement for the top symbol, bottom-to-top.
    pub push: Vec<StackSym>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PdaError {
    #[error("the {0} is empty")]
    EmptyAlphabet(&'static str),
    #[error("unknown symbol `{symbol}` in {context}")]
    UnknownSymbol { symbol: String, context: String },
    #[error("unknown state `{state}` in {context}")]
    UnknownState { state: String, context: String },
    #[error("bad initial configuration: {0}")]
    BadInitial(String),
    #[error("final state `{0}` is not a declared state")]
    BadFinal(String),
    #[error("`{name}` is declared twice in the {set}")]
    DuplicateName { name: String, set: &'static str },
    #[error("`{0}` cannot be used as a name")]
    InvalidName(String),
}

/// One transition written with names, as found in a file or built by hand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransitionDescription {
    pub state: String,
    pub top: String,
    pub input: Option<String>,
    pub target: String,
    pub push: Vec<String>,
}

impl TransitionDescription {
    pub fn new(
        state: impl Into<String>,
        top: impl Into<String>,
        input: Option<&str>,
        target: impl Into<String>,
        push: &[&str],
    ) -> Self {
        TransitionDescription {
            state: state.into(),
            top: top.into(),
            input: input.map(str::to_owned),
            target: target.into(),
            push: push.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// An unchecked, name-based automaton description. [`validate`] turns it
/// into a [`Pda`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PdaDescription {
    pub states: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub pushdown_alphabet: Vec<String>,
    pub initial_state: String,
    pub initial_pushdown: Vec<String>,
    pub final_states: Vec<String>,
    pub transitions: Vec<TransitionDescription>,
}

impl PdaDescription {
    /// A one-state description whose state is named `s` and is final.
    pub fn stateless(input: &[&str], stack: &[&str], initial_pushdown: &[&str]) -> Self {
        PdaDescription {
            states: vec![STATELESS_STATE.to_owned()],
            input_alphabet: input.iter().map(|s| s.to_string()).collect(),
            pushdown_alphabet: stack.iter().map(|s| s.to_string()).collect(),
            initial_state: STATELESS_STATE.to_owned(),
            initial_pushdown: initial_pushdown.iter().map(|s| s.to_string()).collect(),
            final_states: vec![STATELESS_STATE.to_owned()],
            transitions: Vec::new(),
        }
    }

    /// Adds a stateless rule `top --input--> push`.
    pub fn rule(&mut self, top: &str, input: Option<&str>, push: &[&str]) -> &mut Self {
        let state = self.initial_state.clone();
        self.transitions.push(TransitionDescription::new(
            state.clone(),
            top,
            input,
            state,
            push,
        ));
        self
    }
}

/// Name of the implicit state of a stateless machine.
pub const STATELESS_STATE: &str = "s";

/// A validated pushdown automaton `(Q, Σ, Γ, δ, q0, α, F)`.
///
/// Immutable once built. Symbols are referred to by ids that index the
/// alphabets in their declared order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pda {
    states: Vec<String>,
    input_alphabet: Vec<String>,
    pushdown_alphabet: Vec<String>,
    transitions: BTreeMap<TransitionKey, BTreeSet<TransitionTarget>>,
    initial_state: StateId,
    initial_pushdown: Vec<StackSym>,
    final_states: BTreeSet<StateId>,
}

pub(crate) fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name != EPSILON_TOKEN
        && name != "->"
        && !name.contains('#')
        && name.chars().all(|c| !c.is_whitespace() && !c.is_control())
}

fn index_names<'a>(
    names: &'a [String],
    set: &'static str,
) -> Result<HashMap<&'a str, u32>, PdaError> {
    let mut map = HashMap::with_capacity(names.len());
    for (i, name) in names.iter().enumerate() {
        if !is_valid_name(name) {
            return Err(PdaError::InvalidName(name.clone()));
        }
        if map.insert(name.as_str(), i as u32).is_some() {
            return Err(PdaError::DuplicateName {
                name: name.clone(),
                set,
            });
        }
    }
    Ok(map)
}

/// Checks a description against every well-formedness invariant and builds
/// the automaton.
pub fn validate(raw: &PdaDescription) -> Result<Pda, PdaError> {
    if raw.states.is_empty() {
        return Err(PdaError::EmptyAlphabet("state set"));
    }
    if raw.input_alphabet.is_empty() {
        return Err(PdaError::EmptyAlphabet("input alphabet"));
    }
    if raw.pushdown_alphabet.is_empty() {
        return Err(PdaError::EmptyAlphabet("pushdown alphabet"));
    }
    let states = index_names(&raw.states, "state set")?;
    let inputs = index_names(&raw.input_alphabet, "input alphabet")?;
    let stack = index_names(&raw.pushdown_alphabet, "pushdown alphabet")?;

    let initial_state = states
        .get(raw.initial_state.as_str())
        .map(|&i| StateId(i))
        .ok_or_else(|| {
            PdaError::BadInitial(format!("`{}` is not a declared state", raw.initial_state))
        })?;
    if raw.initial_pushdown.is_empty() {
        return Err(PdaError::BadInitial(
            "the initial pushdown string is empty".into(),
        ));
    }
    let initial_pushdown = raw
        .initial_pushdown
        .iter()
        .map(|s| {
            stack.get(s.as_str()).map(|&i| StackSym(i)).ok_or_else(|| {
                PdaError::BadInitial(format!("`{s}` is not a pushdown symbol"))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let final_states = raw
        .final_states
        .iter()
        .map(|s| {
            states
                .get(s.as_str())
                .map(|&i| StateId(i))
                .ok_or_else(|| PdaError::BadFinal(s.clone()))
        })
        .collect::<Result<BTreeSet<_>, _>>()?;

    let mut transitions: BTreeMap<TransitionKey, BTreeSet<TransitionTarget>> = BTreeMap::new();
    for (n, t) in raw.transitions.iter().enumerate() {
        let context = format!("transition #{}", n + 1);
        let state_of = |name: &String| {
            states
                .get(name.as_str())
                .map(|&i| StateId(i))
                .ok_or_else(|| PdaError::UnknownState {
                    state: name.clone(),
                    context: context.clone(),
                })
        };
        let stack_of = |name: &String| {
            stack
                .get(name.as_str())
                .map(|&i| StackSym(i))
                .ok_or_else(|| PdaError::UnknownSymbol {
                    symbol: name.clone(),
                    context: context.clone(),
                })
        };
        let key = TransitionKey {
            state: state_of(&t.state)?,
            top: stack_of(&t.top)?,
            input: match &t.input {
                None => None,
                Some(a) => Some(inputs.get(a.as_str()).map(|&i| InputSym(i)).ok_or_else(
                    || PdaError::UnknownSymbol {
                        symbol: a.clone(),
                        context: context.clone(),
                    },
                )?),
            },
        };
        let target = TransitionTarget {
            state: state_of(&t.target)?,
            push: t.push.iter().map(stack_of).collect::<Result<_, _>>()?,
        };
        transitions.entry(key).or_default().insert(target);
    }

    Ok(Pda {
        states: raw.states.clone(),
        input_alphabet: raw.input_alphabet.clone(),
        pushdown_alphabet: raw.pushdown_alphabet.clone(),
        transitions,
        initial_state,
        initial_pushdown,
        final_states,
    })
}

impl Pda {
    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn input_alphabet(&self) -> &[String] {
        &self.input_alphabet
    }

    pub fn pushdown_alphabet(&self) -> &[String] {
        &self.pushdown_alphabet
    }

    pub fn initial_state(&self) -> StateId {
        self.initial_state
    }

    pub fn initial_pushdown(&self) -> &[StackSym] {
        &self.initial_pushdown
    }

    pub fn final_states(&self) -> &BTreeSet<StateId> {
        &self.final_states
    }

    pub fn is_stateless(&self) -> bool {
        self.states.len() == 1
    }

    /// Whether `q` counts as accepting. The sole state of a stateless
    /// machine always does, whatever its declared final set says.
    pub fn is_final(&self, q: StateId) -> bool {
        self.is_stateless() || self.final_states.contains(&q)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.index()]
    }

    pub fn stack_name(&self, x: StackSym) -> &str {
        &self.pushdown_alphabet[x.index()]
    }

    pub fn input_name(&self, a: InputSym) -> &str {
        &self.input_alphabet[a.index()]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn stack_id(&self, name: &str) -> Option<StackSym> {
        self.pushdown_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| StackSym(i as u32))
    }

    pub fn input_id(&self, name: &str) -> Option<InputSym> {
        self.input_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| InputSym(i as u32))
    }

    pub fn input_symbols(&self) -> impl Iterator<Item = InputSym> + '_ {
        (0..self.input_alphabet.len() as u32).map(InputSym)
    }

    pub fn transitions(
        &self,
    ) -> impl Iterator<Item = (&TransitionKey, &BTreeSet<TransitionTarget>)> + '_ {
        self.transitions.iter()
    }

    /// Targets of `δ(q, top, input)`, if any are defined.
    pub fn targets(
        &self,
        state: StateId,
        top: StackSym,
        input: Option<InputSym>,
    ) -> Option<&BTreeSet<TransitionTarget>> {
        self.transitions.get(&TransitionKey { state, top, input })
    }

    /// Number of `(key, target)` pairs in δ.
    pub fn transition_count(&self) -> usize {
        self.transitions.values().map(BTreeSet::len).sum()
    }

    pub fn max_push_len(&self) -> usize {
        self.transitions
            .values()
            .flatten()
            .map(|t| t.push.len())
            .max()
            .unwrap_or(0)
    }

    pub fn has_epsilon_rules(&self) -> bool {
        self.transitions.keys().any(|k| k.input.is_none())
    }

    /// The name-based description this machine was built from (up to
    /// duplicate transitions, which validation merges).
    pub fn to_description(&self) -> PdaDescription {
        let names = |xs: &[StackSym]| xs.iter().map(|&x| self.stack_name(x).to_owned()).collect();
        PdaDescription {
            states: self.states.clone(),
            input_alphabet: self.input_alphabet.clone(),
            pushdown_alphabet: self.pushdown_alphabet.clone(),
            initial_state: self.state_name(self.initial_state).to_owned(),
            initial_pushdown: names(&self.initial_pushdown),
            final_states: self
                .final_states
                .iter()
                .map(|&q| self.state_name(q).to_owned())
                .collect(),
            transitions: self
                .transitions
                .iter()
                .flat_map(|(k, ts)| {
                    ts.iter().map(move |t| TransitionDescription {
                        state: self.state_name(k.state).to_owned(),
                        top: self.stack_name(k.top).to_owned(),
                        input: k.input.map(|a| self.input_name(a).to_owned()),
                        target: self.state_name(t.state).to_owned(),
                        push: names(&t.push),
                    })
                })
                .collect(),
        }
    }

    pub(crate) fn describe_key(&self, key: &TransitionKey) -> String {
        let input = key.input.map_or(EPSILON_TOKEN, |a| self.input_name(a));
        format!(
            "δ({}, {}, {})",
            self.state_name(key.state),
            self.stack_name(key.top),
            input
        )
    }
}

/// Machine class membership and alphabet counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub deterministic: bool,
    pub realtime: bool,
    pub stateless: bool,
    pub state_count: usize,
    pub pushdown_alphabet_size: usize,
    /// `|Γ| − |Σ|`; negative when the input alphabet is the larger one.
    pub non_input_symbol_count: i64,
    /// Every determinism conflict found, each naming the keys involved.
    pub violations: Vec<String>,
}

pub fn classify(m: &Pda) -> ClassReport {
    let mut violations = Vec::new();
    for (key, targets) in m.transitions() {
        if targets.len() > 1 {
            violations.push(format!(
                "{} has {} targets",
                m.describe_key(key),
                targets.len()
            ));
        }
    }
    for (key, _) in m.transitions().filter(|(k, _)| k.input.is_none()) {
        for a in m.input_symbols() {
            if m.targets(key.state, key.top, Some(a)).is_some() {
                let input_key = TransitionKey {
                    input: Some(a),
                    ..*key
                };
                violations.push(format!(
                    "{} is defined together with {}",
                    m.describe_key(key),
                    m.describe_key(&input_key)
                ));
            }
        }
    }
    let deterministic = violations.is_empty();
    ClassReport {
        deterministic,
        realtime: deterministic && !m.has_epsilon_rules(),
        stateless: m.is_stateless(),
        state_count: m.states().len(),
        pushdown_alphabet_size: m.pushdown_alphabet().len(),
        non_input_symbol_count: m.pushdown_alphabet().len() as i64
            - m.input_alphabet().len() as i64,
        violations,
    }
}

/// `|Γ| ≤ n`.
pub fn is_n_limited(m: &Pda, n: usize) -> bool {
    m.pushdown_alphabet().len() <= n
}

impl fmt::Display for ClassReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "deterministic: {}", self.deterministic)?;
        writeln!(f, "realtime: {}", self.realtime)?;
        writeln!(f, "stateless: {}", self.stateless)?;
        writeln!(f, "states: {}", self.state_count)?;
        writeln!(f, "pushdown-alphabet-size: {}", self.pushdown_alphabet_size)?;
        writeln!(f, "non-input-symbols: {}", self.non_input_symbol_count)?;
        writeln!(f, "violations: {}", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  {v}")?;
        }
        Ok(())
    }
}
