//! Pushdown automata with limited pushdown alphabets.
//!
//! The pushdown top is the RIGHTMOST symbol of every string, and a machine
//! accepts by final state and empty pushdown together.

pub mod automaton;
pub mod format;
pub mod search;
pub mod simulator;
pub mod transforms;
pub mod witnesses;

pub use automaton::{classify, is_n_limited, validate, ClassReport, Pda, PdaDescription, PdaError};
pub use format::{parse, serialize, FormatError};
pub use search::{
    canonical_form, certify_lower_bound, certify_mstate_lower_bound, enumerate_machines,
    min_pushdown_alphabet, search_acceptors, SearchBounds, SearchError, SearchReport,
};
pub use simulator::{
    accepts_exactly, enumerate_language, prefix_free, run, LanguageSample, Verdict, Word,
};
pub use transforms::{to_realtime, TransformError, TransformLog};
pub use witnesses::{build_witness, witness_language, WitnessSpec};
