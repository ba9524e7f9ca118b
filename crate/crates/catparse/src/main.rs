//! Command-line surface for the incremental parser.
//!
//! Exit codes: 0 success (a reading was found, or the command completed),
//! 1 no reading (or an oracle/golden mismatch), 2 input or usage errors.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use catparse::category::Atom;
use catparse::engine::{
    self, feed, initial_state, parse, EngineError, ParseOptions, ParseResult, ScoredState,
    Strategy,
};
use catparse::lambda::canonical;
use catparse::lexicon::{load_lexicon_with_fuel, Lexicon};
use catparse::oracle::{cky_parse, Regime};
use catparse::stats::{self, parse_corpus, train, TransitionModel, DEFAULT_SMOOTHING};

const BUILTIN_LEXICON: &str = include_str!("../data/toy-english.lex");

#[derive(Parser)]
#[command(
    name = "catparse",
    about = "Word-by-word incremental categorial grammar parser",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Lexicon file; the bundled toy English lexicon when omitted.
    #[arg(long, global = true)]
    lexicon: Option<PathBuf>,

    /// Goal atom the parse must deliver.
    #[arg(long, global = true, default_value = "s")]
    goal: String,

    #[arg(long, global = true, value_enum, default_value = "exhaustive")]
    strategy: StrategyArg,

    /// Beam width; required by and only valid with --strategy beam.
    #[arg(long, global = true)]
    beam: Option<usize>,

    /// Transition model file used for scoring.
    #[arg(long, global = true)]
    model: Option<PathBuf>,

    /// Emit JSON instead of the pretty format.
    #[arg(long, global = true)]
    json: bool,

    /// Beta-reduction budget per normalization.
    #[arg(long, global = true, default_value_t = catparse::lambda::DEFAULT_FUEL)]
    fuel: usize,

    /// Merge states with identical expectations and semantics after each
    /// word (disables derivation counting).
    #[arg(long, global = true)]
    dedupe: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Beam,
    Serial,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a sentence and print its readings.
    Parse { sentence: String },
    /// Print the JSON-lines trace of every surviving state after every
    /// word.
    Steps {
        sentence: String,
        /// Compare the trace against a stored golden file.
        #[arg(long)]
        golden: Option<PathBuf>,
    },
    /// Explore a sentence word by word; `:undo`, `:reset`, `:quit`.
    Repl,
    /// Check engine readings against the brute-force oracle for every
    /// sentence of a corpus file.
    OracleCheck { corpus: PathBuf },
    /// Learn transition statistics from a corpus and write a model file.
    Train { corpus: PathBuf, out: PathBuf },
    /// Show scored successor transitions at each word of a sentence.
    Rank { sentence: String },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// Errors that terminate the CLI with exit code 2.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("lexicon: {0}")]
    Lexicon(#[from] catparse::lexicon::LexiconError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Oracle(#[from] catparse::oracle::OracleError),
    #[error(transparent)]
    Train(#[from] catparse::stats::TrainError),
    #[error("model: {0}")]
    Model(#[from] serde_json::Error),
    #[error("bad goal atom: {0}")]
    Goal(#[from] catparse::category::CategoryError),
}

struct Session {
    lexicon: Lexicon,
    goal: Atom,
    strategy: Strategy,
    model: Option<TransitionModel>,
    json: bool,
    fuel: usize,
    dedupe: bool,
}

impl Session {
    fn options(&self) -> ParseOptions<'_> {
        ParseOptions {
            goal: self.goal.clone(),
            strategy: self.strategy,
            max_states: None,
            model: self.model.as_ref(),
            dedupe: self.dedupe,
            fuel: self.fuel,
        }
    }
}

fn build_session(cli: &Cli) -> Result<Session, CliError> {
    let strategy = match (cli.strategy, cli.beam) {
        (StrategyArg::Beam, Some(width)) if width >= 1 => Strategy::Beam(width),
        (StrategyArg::Beam, Some(_)) => {
            return Err(CliError::Usage("beam width must be at least 1".into()))
        }
        (StrategyArg::Beam, None) => {
            return Err(CliError::Usage(
                "--strategy beam requires --beam N".into(),
            ))
        }
        (_, Some(_)) => {
            return Err(CliError::Usage(
                "--beam is only valid with --strategy beam".into(),
            ))
        }
        (StrategyArg::Exhaustive, None) => Strategy::Exhaustive,
        (StrategyArg::Serial, None) => Strategy::Serial {
            all_readings: false,
        },
    };

    let text = match &cli.lexicon {
        Some(path) => fs::read_to_string(path)?,
        None => BUILTIN_LEXICON.to_string(),
    };
    let lexicon = load_lexicon_with_fuel(&text, cli.fuel)?;
    let report = lexicon.validate();
    if !report.free_name_errors.is_empty() {
        return Err(CliError::Usage(format!(
            "lexicon is not usable:\n{report}"
        )));
    }
    for w in &report.arity_warnings {
        eprintln!("warning: {w}");
    }

    let model = match &cli.model {
        Some(path) => Some(TransitionModel::from_json(&fs::read_to_string(path)?)?),
        None => None,
    };

    Ok(Session {
        lexicon,
        goal: Atom::new(&cli.goal)?,
        strategy,
        model,
        json: cli.json,
        fuel: cli.fuel,
        dedupe: cli.dedupe,
    })
}

fn tokenize(sentence: &str) -> Result<Vec<&str>, CliError> {
    let tokens: Vec<&str> = sentence.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(CliError::Usage("empty sentence".into()));
    }
    Ok(tokens)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let session = build_session(&cli)?;
    match &cli.command {
        Command::Parse { sentence } => cmd_parse(&session, sentence),
        Command::Steps { sentence, golden } => cmd_steps(&session, sentence, golden.as_deref()),
        Command::Repl => cmd_repl(&session),
        Command::OracleCheck { corpus } => cmd_oracle_check(&session, corpus),
        Command::Train { corpus, out } => cmd_train(&session, corpus, out),
        Command::Rank { sentence } => cmd_rank(&session, sentence),
    }
}

/// Live-state count past which the exhaustive strategy stops being
/// interactive; growth is exponential in sentence length.
const LIVE_STATE_WARNING: usize = 100_000;

fn warn_live_counts(result: &ParseResult) {
    if let Some(max) = result.live_counts().iter().max() {
        if *max > LIVE_STATE_WARNING {
            eprintln!(
                "warning: live-state count reached {max}; consider --strategy beam"
            );
        }
    }
}

fn cmd_parse(session: &Session, sentence: &str) -> Result<ExitCode, CliError> {
    let tokens = tokenize(sentence)?;
    let result = parse(&tokens, &session.lexicon, &session.options())?;
    warn_live_counts(&result);
    if session.json {
        println!("{}", parse_report_json(&tokens, &result));
    } else {
        println!("tokens: {}", tokens.join(" "));
        println!(
            "live states per word: {}",
            result
                .live_counts()
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join(" ")
        );
        if result.readings.is_empty() {
            println!("no readings");
        }
        for (i, reading) in result.readings.iter().enumerate() {
            let n = reading.paths.len();
            println!(
                "reading {} ({} derivation{}): {}",
                i + 1,
                n,
                if n == 1 { "" } else { "s" },
                reading.sem
            );
        }
    }
    Ok(if result.readings.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn parse_report_json(tokens: &[&str], result: &ParseResult) -> serde_json::Value {
    serde_json::json!({
        "tokens": tokens,
        "live_counts": result.live_counts(),
        "readings": result
            .readings
            .iter()
            .map(|r| {
                serde_json::json!({
                    "sem": r.sem.to_string(),
                    "derivations": r.paths.len(),
                    "paths": r.paths,
                })
            })
            .collect::<Vec<_>>(),
        "failure_point": result.failure_point,
    })
}

fn cmd_steps(
    session: &Session,
    sentence: &str,
    golden: Option<&std::path::Path>,
) -> Result<ExitCode, CliError> {
    let tokens = tokenize(sentence)?;
    let result = parse(&tokens, &session.lexicon, &session.options())?;
    warn_live_counts(&result);
    let lines: Vec<String> = engine::trace_lines(&result)
        .iter()
        .map(|v| v.to_string())
        .collect();
    let trace = lines.join("\n") + "\n";
    print!("{trace}");
    if let Some(path) = golden {
        let want = fs::read_to_string(path)?;
        if want != trace {
            let got_lines: Vec<&str> = trace.lines().collect();
            let want_lines: Vec<&str> = want.lines().collect();
            let first_diff = got_lines
                .iter()
                .zip(&want_lines)
                .position(|(a, b)| a != b)
                .unwrap_or(got_lines.len().min(want_lines.len()));
            eprintln!(
                "golden mismatch at line {} ({} lines produced, {} expected)",
                first_diff + 1,
                got_lines.len(),
                want_lines.len()
            );
            return Ok(ExitCode::from(1));
        }
        eprintln!("golden trace matches");
    }
    Ok(if result.readings.is_empty() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_repl(session: &Session) -> Result<ExitCode, CliError> {
    let opts = session.options();
    let init = ScoredState {
        state: initial_state(session.goal.clone()),
        score: 0.0,
    };
    let mut stack: Vec<(String, Vec<ScoredState>)> = vec![(String::new(), vec![init])];
    let stdin = io::stdin();
    let mut out = io::stdout();

    println!(
        "goal: {} — one word per line; :undo, :reset, :quit",
        session.goal
    );
    print_live(&mut out, &stack.last().unwrap().1)?;
    for line in stdin.lock().lines() {
        let line = line?;
        let word = line.trim();
        match word {
            "" => continue,
            ":quit" => break,
            ":reset" => {
                stack.truncate(1);
                println!("reset");
            }
            ":undo" => {
                if stack.len() > 1 {
                    let (w, _) = stack.pop().unwrap();
                    println!("undid '{w}'");
                } else {
                    println!("nothing to undo");
                }
            }
            _ => {
                let position = stack.len();
                match feed(
                    &stack.last().unwrap().1,
                    word,
                    position,
                    &session.lexicon,
                    &opts,
                ) {
                    Ok(next) => {
                        if next.len() > LIVE_STATE_WARNING {
                            eprintln!("warning: live-state count reached {}", next.len());
                        }
                        stack.push((word.to_string(), next));
                    }
                    Err(e) => {
                        println!("{e} (state unchanged)");
                        continue;
                    }
                }
            }
        }
        print_live(&mut out, &stack.last().unwrap().1)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn print_live(out: &mut impl Write, states: &[ScoredState]) -> io::Result<()> {
    writeln!(out, "live states: {}", states.len())?;
    for (i, s) in states.iter().take(5).enumerate() {
        let expected: Vec<String> = s.state.expected.iter().map(|c| c.render()).collect();
        writeln!(
            out,
            "  #{} score={:.4} expected=[{}] sem={}",
            i + 1,
            s.score,
            expected.join(", "),
            s.state.sem
        )?;
    }
    if states.len() > 5 {
        writeln!(out, "  ... and {} more", states.len() - 5)?;
    }
    out.flush()
}

fn cmd_oracle_check(session: &Session, corpus: &PathBuf) -> Result<ExitCode, CliError> {
    let corpus = parse_corpus(&fs::read_to_string(corpus)?);
    let mut all_equal = true;
    for sentence in &corpus {
        let tokens: Vec<&str> = sentence.iter().map(String::as_str).collect();
        let engine_result = parse(
            &tokens,
            &session.lexicon,
            &ParseOptions {
                strategy: Strategy::Exhaustive,
                ..session.options()
            },
        )?;
        let oracle_readings = cky_parse(
            &tokens,
            &session.lexicon,
            &session.goal,
            Regime::Unrestricted,
            session.fuel,
        )?;

        let mut engine_keys: Vec<_> = engine_result
            .readings
            .iter()
            .map(|r| canonical(&r.sem))
            .collect();
        let mut oracle_keys: Vec<_> =
            oracle_readings.iter().map(|r| canonical(&r.sem)).collect();
        engine_keys.sort();
        oracle_keys.sort();
        let equal = engine_keys == oracle_keys;
        all_equal &= equal;

        let eta_near_miss = !equal
            && engine_result.readings.len() == oracle_readings.len()
            && engine_result.readings.iter().all(|er| {
                oracle_readings
                    .iter()
                    .any(|or| catparse::lambda::eta_alpha_eq(&er.sem, &or.sem))
            });

        let mut record = serde_json::json!({
            "tokens": tokens,
            "oracle_readings": oracle_readings.iter().map(|r| r.sem.to_string()).collect::<Vec<_>>(),
            "engine_readings": engine_result.readings.iter().map(|r| r.sem.to_string()).collect::<Vec<_>>(),
            "equal": equal,
            "oracle_derivations": oracle_readings.iter().map(|r| r.derivations).sum::<u64>(),
            "engine_paths": engine_result.path_count(),
        });
        if eta_near_miss {
            record["eta_near_miss"] = serde_json::Value::Bool(true);
        }
        println!("{record}");
    }
    Ok(if all_equal {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_train(session: &Session, corpus: &PathBuf, out: &PathBuf) -> Result<ExitCode, CliError> {
    let sentences = parse_corpus(&fs::read_to_string(corpus)?);
    let outcome = train(&sentences, &session.lexicon, &session.goal, DEFAULT_SMOOTHING)?;
    for w in &outcome.skipped {
        eprintln!("warning: {w}");
    }
    fs::write(out, outcome.model.to_json())?;
    if session.json {
        println!(
            "{}",
            serde_json::json!({
                "sentences_used": outcome.sentences_used,
                "skipped": outcome.skipped.len(),
                "contexts": outcome.model.contexts.len(),
                "model": out,
            })
        );
    } else {
        println!(
            "trained on {} sentence(s) ({} skipped), {} context(s) -> {}",
            outcome.sentences_used,
            outcome.skipped.len(),
            outcome.model.contexts.len(),
            out.display()
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_rank(session: &Session, sentence: &str) -> Result<ExitCode, CliError> {
    let tokens = tokenize(sentence)?;
    let opts = ParseOptions {
        strategy: Strategy::Exhaustive,
        ..session.options()
    };
    let mut live = vec![ScoredState {
        state: initial_state(session.goal.clone()),
        score: 0.0,
    }];
    for (i, word) in tokens.iter().enumerate() {
        let mut next = feed(&live, word, i + 1, &session.lexicon, &opts)?;
        stats::rank(&mut next);
        if session.json {
            for (r, s) in next.iter().enumerate() {
                let record = s.state.history.last().unwrap();
                println!(
                    "{}",
                    serde_json::json!({
                        "word_index": i + 1,
                        "word": word,
                        "rank": r + 1,
                        "rule": record.rule.as_str(),
                        "l1": record.l1_len,
                        "r1": record.r1_len,
                        "score": s.score,
                    })
                );
            }
        } else {
            println!("word {} '{}':", i + 1, word);
            for (r, s) in next.iter().enumerate() {
                let record = s.state.history.last().unwrap();
                println!(
                    "  rank {}: score={:.4} {} l1={} r1={} expected=[{}]",
                    r + 1,
                    s.score,
                    record.rule.as_str(),
                    record.l1_len,
                    record.r1_len,
                    s.state
                        .expected
                        .iter()
                        .map(|c| c.render())
                        .collect::<Vec<_>>()
                        .join(", ")
                );
            }
        }
        live = next;
    }
    Ok(ExitCode::SUCCESS)
}
