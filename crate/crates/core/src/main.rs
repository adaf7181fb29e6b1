use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use pdakit::automaton::{classify, Pda};
use pdakit::format::{parse, serialize};
use pdakit::search::{search_acceptors, SearchBounds, SearchError, DEFAULT_CEILING};
use pdakit::simulator::{default_epsilon_budget, enumerate_language, run, SimError, Verdict, Word};
use pdakit::transforms::to_realtime;
use pdakit::witnesses::{build_witness, witness_language, WitnessSpec};

const EXIT_INVALID: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_USAGE: u8 = 64;

const BUDGET_VAR: &str = "PDA_EPSILON_BUDGET";

/// Pushdown automata with limited pushdown alphabets.
///
/// Pushdown strings are written bottom-to-top: the top is the RIGHTMOST symbol.
#[derive(Parser)]
#[command(name = "pdakit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a machine file and print its classification.
    Validate { file: PathBuf },
    /// Print the classification of a machine.
    Classify { file: PathBuf },
    /// Run a deterministic machine on one input.
    Run {
        file: PathBuf,
        /// Input string; characters are symbols unless separated by spaces. `eps` is the empty input.
        #[arg(long, allow_hyphen_values = true)]
        input: String,
        /// Maximum consecutive ε-moves before a run counts as diverged.
        #[arg(long)]
        budget: Option<usize>,
        /// Print every configuration as `state | pushdown | remaining`.
        #[arg(long)]
        trace: bool,
    },
    /// List accepted strings up to a length, in shortlex order.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        max_len: usize,
        #[arg(long)]
        budget: Option<usize>,
    },
    /// Remove ε-rules from a stateless deterministic machine.
    Realtime {
        file: PathBuf,
        /// Write the machine here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print a witness machine or its language.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        /// Print the reference strings instead of the machine.
        #[arg(long)]
        language: bool,
    },
    /// Search a bounded space of realtime machines for acceptors of a witness language.
    Search {
        #[command(flatten)]
        family: TargetArgs,
        /// Maximum number of pushdown symbols.
        #[arg(long)]
        gamma: usize,
        /// Maximum push-string length.
        #[arg(long)]
        max_push: usize,
        /// Maximum initial pushdown length.
        #[arg(long)]
        max_alpha: usize,
        /// Length bound for language comparison.
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 1)]
        states: usize,
        /// Refuse spaces with more raw candidates. Defaults to 10^8 when --states is above 1.
        #[arg(long)]
        ceiling: Option<u128>,
        #[arg(long)]
        budget: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Stateless,
    Mstate,
    Example,
    Unary,
    Noninput,
}

#[derive(clap::Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(short)]
    m: Option<usize>,
    #[arg(short)]
    n: Option<usize>,
    #[arg(short)]
    c: Option<usize>,
}

#[derive(clap::Args)]
struct TargetArgs {
    #[arg(long = "target-family", value_enum)]
    family: Family,
    #[arg(short)]
    m: Option<usize>,
    #[arg(short)]
    n: Option<usize>,
    #[arg(short)]
    c: Option<usize>,
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl ToString) -> Failure {
    Failure {
        code,
        message: message.to_string(),
    }
}

fn spec(family: Family, m: Option<usize>, n: Option<usize>, c: Option<usize>) -> Result<WitnessSpec, Failure> {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| fail(EXIT_USAGE, format!("this family needs -{flag}")))
    };
    let spec = match family {
        Family::Stateless => WitnessSpec::StatelessLn { n: need(n, "n")? },
        Family::Mstate => WitnessSpec::MStateLmn {
            m: need(m, "m")?,
            n: need(n, "n")?,
        },
        Family::Example => WitnessSpec::ExampleTwoState {
            m: need(m, "m")?,
            n: need(n, "n")?,
        },
        Family::Unary => WitnessSpec::UnaryL1 { c: need(c, "c")? },
        Family::Noninput => WitnessSpec::NonInputKn { n: need(n, "n")? },
    };
    spec.check().map_err(|e| fail(EXIT_USAGE, e))?;
    Ok(spec)
}

fn load(path: &Path) -> Result<Pda, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", path.display())))
}

/// `--budget`, then the environment, then the machine's default.
fn budget(flag: Option<usize>, m: &Pda) -> Result<usize, Failure> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| fail(EXIT_USAGE, format!("{BUDGET_VAR}={v} is not a count"))),
        Err(_) => Ok(default_epsilon_budget(m)),
    }
}

fn input_word(s: &str) -> Word {
    if s == "eps" {
        Word::empty()
    } else if s.contains(char::is_whitespace) {
        Word::new(s.split_whitespace().map(str::to_owned).collect())
    } else {
        Word::from_chars(s)
    }
}

fn execute(command: Command) -> Result<u8, Failure> {
    match command {
        Command::Validate { file } | Command::Classify { file } => {
            print!("{}", classify(&load(&file)?));
            Ok(0)
        }
        Command::Run {
            file,
            input,
            budget: flag,
            trace,
        } => {
            let m = load(&file)?;
            let outcome = run(&m, &input_word(&input), budget(flag, &m)?).map_err(|e| match e {
                SimError::NotDeterministic => fail(EXIT_DOMAIN, e),
                _ => fail(EXIT_INVALID, e),
            })?;
            if trace {
                for c in &outcome.trace {
                    println!("{}", c.render(&m));
                }
            }
            println!("{}", outcome.verdict);
            Ok(if outcome.verdict == Verdict::Accepted { 0 } else { 1 })
        }
        Command::Enumerate {
            file,
            max_len,
            budget: flag,
        } => {
            let m = load(&file)?;
            let sample = enumerate_language(&m, max_len, budget(flag, &m)?);
            for w in &sample.strings {
                println!("{w}");
            }
            if !sample.diverged.is_empty() {
                println!("# diverged:");
                for w in &sample.diverged {
                    println!("{w}");
                }
            }
            Ok(0)
        }
        Command::Realtime { file, output } => {
            let m = load(&file)?;
            let (out, log) = to_realtime(&m).map_err(|e| fail(EXIT_DOMAIN, e))?;
            eprint!("{}", log.summary());
            let text = serialize(&out);
            match output {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| fail(EXIT_INVALID, format!("{}: {e}", path.display())))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Witness { family, language } => {
            let spec = spec(family.family, family.m, family.n, family.c)?;
            if language {
                for w in witness_language(spec).map_err(|e| fail(EXIT_USAGE, e))? {
                    println!("{w}");
                }
            } else {
                print!("{}", serialize(&build_witness(spec).map_err(|e| fail(EXIT_USAGE, e))?));
            }
            Ok(0)
        }
        Command::Search {
            family,
            gamma,
            max_push,
            max_alpha,
            max_len,
            states,
            ceiling,
            budget: flag,
        } => {
            let spec = spec(family.family, family.m, family.n, family.c)?;
            let target = witness_language(spec).map_err(|e| fail(EXIT_USAGE, e))?;
            let bounds = SearchBounds {
                max_pushdown_symbols: gamma,
                max_push_length: max_push,
                max_initial_length: max_alpha,
                max_states: states,
                length_bound: max_len,
                epsilon_budget: flag.unwrap_or(1),
            };
            let ceiling = ceiling.or((states > 1).then_some(DEFAULT_CEILING));
            let started = Instant::now();
            let report = search_acceptors(&target, &bounds, ceiling).map_err(|e| match e {
                SearchError::BadBounds(_) | SearchError::TargetAlphabet(_) => fail(EXIT_USAGE, e),
                _ => fail(EXIT_DOMAIN, e),
            })?;
            print!("{report}");
            eprintln!("elapsed: {:.3}s", started.elapsed().as_secs_f64());
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
