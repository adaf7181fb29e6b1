//! The `.pda` text format.
//!
//! ```text
//! # comment
//! states: q0 q1          # omit for a stateless machine
//! input: a b
//! stack: X0 X1
//! initial: q0            # omit for a stateless machine
//! start-stack: X0 X0     # top is RIGHTMOST
//! final: q1              # omit for a stateless machine
//! trans: q0 X0 a -> q1 X1 X0
//! trans: q1 X1 eps -> q1 eps
//! ```
//!
//! Push strings are written bottom-to-top, so the last symbol ends up on
//! top. `eps` is ε both as an input and as the empty push string. In the
//! stateless shorthand a transition drops both states: `trans: X0 b -> X1`.
//!
//! [`serialize`] is canonical, and `parse(serialize(m)) == m`.

use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{
    validate, Pda, PdaDescription, PdaError, TransitionDescription, EPSILON_TOKEN,
    STATELESS_STATE,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error(transparent)]
    Invalid(#[from] PdaError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

#[derive(Default)]
struct Headers {
    states: Option<(usize, Vec<String>)>,
    input: Option<(usize, Vec<String>)>,
    stack: Option<(usize, Vec<String>)>,
    initial: Option<(usize, Vec<String>)>,
    start_stack: Option<(usize, Vec<String>)>,
    final_states: Option<(usize, Vec<String>)>,
}

fn tokens(h: Option<(usize, Vec<String>)>) -> Vec<String> {
    h.map(|(_, t)| t).unwrap_or_default()
}

struct RawTrans {
    line: usize,
    lhs: Vec<String>,
    rhs: Vec<String>,
}

pub fn parse(text: &str) -> Result<Pda, FormatError> {
    let mut headers = Headers::default();
    let mut trans = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| syntax(line_no, "expected `key: value`"))?;
        let tokens: Vec<String> = rest.split_whitespace().map(str::to_owned).collect();
        let slot = match key.trim() {
            "states" => &mut headers.states,
            "input" => &mut headers.input,
            "stack" => &mut headers.stack,
            "initial" => &mut headers.initial,
            "start-stack" => &mut headers.start_stack,
            "final" => &mut headers.final_states,
            "trans" => {
                let arrow = tokens
                    .iter()
                    .position(|t| t == "->")
                    .ok_or_else(|| syntax(line_no, "transition without `->`"))?;
                trans.push(RawTrans {
                    line: line_no,
                    lhs: tokens[..arrow].to_vec(),
                    rhs: tokens[arrow + 1..].to_vec(),
                });
                continue;
            }
            other => return Err(syntax(line_no, format!("unknown declaration `{other}`"))),
        };
        if slot.is_some() {
            return Err(syntax(line_no, format!("`{}` declared twice", key.trim())));
        }
        if tokens.iter().any(|t| t == EPSILON_TOKEN) {
            return Err(syntax(line_no, format!("`{EPSILON_TOKEN}` is reserved")));
        }
        *slot = Some((line_no, tokens));
    }

    let stateless = headers.states.is_none();
    let (states, initial_state, final_states) = if stateless {
        if let Some((line, _)) = headers.initial.as_ref().or(headers.final_states.as_ref()) {
            return Err(syntax(*line, "`initial` and `final` need a `states` declaration"));
        }
        let s = vec![STATELESS_STATE.to_owned()];
        (s.clone(), STATELESS_STATE.to_owned(), s)
    } else {
        let initial = match headers.initial {
            Some((_, ref q)) if q.len() == 1 => q[0].clone(),
            Some((line, _)) => return Err(syntax(line, "`initial` takes exactly one state")),
            None => {
                return Err(FormatError::Invalid(PdaError::BadInitial(
                    "no initial state declared".into(),
                )))
            }
        };
        (
            tokens(headers.states),
            initial,
            tokens(headers.final_states),
        )
    };

    let lhs_len = if stateless { 2 } else { 3 };
    let mut transitions = Vec::with_capacity(trans.len());
    for t in trans {
        if t.lhs.len() != lhs_len {
            return Err(syntax(
                t.line,
                format!("expected {lhs_len} tokens before `->`, found {}", t.lhs.len()),
            ));
        }
        let (target, push) = if stateless {
            (STATELESS_STATE.to_owned(), &t.rhs[..])
        } else {
            match t.rhs.split_first() {
                Some((p, push)) => (p.clone(), push),
                None => return Err(syntax(t.line, "missing target state")),
            }
        };
        let push = match push {
            [] => return Err(syntax(t.line, format!("empty push string must be written `{EPSILON_TOKEN}`"))),
            [e] if e == EPSILON_TOKEN => Vec::new(),
            symbols if symbols.iter().any(|s| s == EPSILON_TOKEN) => {
                return Err(syntax(t.line, format!("`{EPSILON_TOKEN}` cannot be mixed with symbols")))
            }
            symbols => symbols.to_vec(),
        };
        let (state, rest) = if stateless {
            (STATELESS_STATE.to_owned(), &t.lhs[..])
        } else {
            (t.lhs[0].clone(), &t.lhs[1..])
        };
        let input = (rest[1] != EPSILON_TOKEN).then(|| rest[1].clone());
        transitions.push(TransitionDescription {
            state,
            top: rest[0].clone(),
            input,
            target,
            push,
        });
    }

    let desc = PdaDescription {
        states,
        input_alphabet: tokens(headers.input),
        pushdown_alphabet: tokens(headers.stack),
        initial_state,
        initial_pushdown: tokens(headers.start_stack),
        final_states,
        transitions,
    };
    Ok(validate(&desc)?)
}

/// `(state, top, input, target, push)` by name.
type TransLine<'a> = (&'a str, &'a str, Option<&'a str>, &'a str, Vec<&'a str>);

/// Canonical text: fixed header order, transitions sorted by
/// `(state, top, input)` name with ε inputs first.
pub fn serialize(m: &Pda) -> String {
    let shorthand = m.states() == [STATELESS_STATE]
        && m.final_states().len() == 1;
    let mut out = String::new();
    let joined = |xs: Vec<&str>| xs.join(" ");
    let field = |out: &mut String, key: &str, value: String| {
        if value.is_empty() {
            writeln!(out, "{key}:").unwrap();
        } else {
            writeln!(out, "{key}: {value}").unwrap();
        }
    };
    if !shorthand {
        field(&mut out, "states", m.states().join(" "));
    }
    field(&mut out, "input", m.input_alphabet().join(" "));
    field(&mut out, "stack", m.pushdown_alphabet().join(" "));
    if !shorthand {
        field(&mut out, "initial", m.state_name(m.initial_state()).to_owned());
    }
    field(
        &mut out,
        "start-stack",
        joined(m.initial_pushdown().iter().map(|&x| m.stack_name(x)).collect()),
    );
    if !shorthand {
        field(
            &mut out,
            "final",
            joined(m.final_states().iter().map(|&q| m.state_name(q)).collect()),
        );
    }

    let mut lines: Vec<TransLine> = m
        .transitions()
        .flat_map(|(k, ts)| {
            ts.iter().map(move |t| {
                (
                    m.state_name(k.state),
                    m.stack_name(k.top),
                    k.input.map(|a| m.input_name(a)),
                    m.state_name(t.state),
                    t.push.iter().map(|&x| m.stack_name(x)).collect(),
                )
            })
        })
        .collect();
    lines.sort();
    for (state, top, input, target, push) in lines {
        let input = input.unwrap_or(EPSILON_TOKEN);
        let push = if push.is_empty() {
            EPSILON_TOKEN.to_owned()
        } else {
            push.join(" ")
        };
        if shorthand {
            writeln!(out, "trans: {top} {input} -> {push}").unwrap();
        } else {
            writeln!(out, "trans: {state} {top} {input} -> {target} {push}").unwrap();
        }
    }
    out
}
