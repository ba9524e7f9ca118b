//! Word-by-word parsing.
//!
//! The engine keeps the set of live states per sentence prefix, expands
//! them through the transition rules on each word, and extracts readings
//! at the end: the beta-normal semantics of states that expect no more
//! arguments. Per-prefix snapshots are kept so partial interpretations can
//! be inspected at every point.
//!
//! Search strategies: exhaustive (all states), ranked beam (top `n` by
//! cumulative score), and serial (depth-first over score-ordered
//! successors with backtracking). With no model all scores are zero and
//! ranking reduces to the deterministic successor order, so `Beam(∞)` is
//! the exhaustive strategy.

use crate::category::{Atom, Category};
use crate::lambda::{abs, canonical, var, CanonTerm, LambdaTerm, NormalizeError, DEFAULT_FUEL};
use crate::lexicon::Lexicon;
use crate::rules::{successors, ParserState, TransitionRecord};
use crate::stats::TransitionModel;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// Keep every successor.
    Exhaustive,
    /// Keep the `n` highest-ranked states after each word.
    Beam(usize),
    /// Depth-first over the ranked successor list, backtracking on dead
    /// ends. Stops at the first reading unless `all_readings` is set.
    Serial { all_readings: bool },
}

#[derive(Clone, Debug)]
pub struct ParseOptions<'m> {
    pub goal: Atom,
    pub strategy: Strategy,
    /// Hard cap on live states after each word, applied after ranking.
    pub max_states: Option<usize>,
    pub model: Option<&'m TransitionModel>,
    /// Merge states with identical (expected, semantics) after each word.
    /// Off by default so that derivation counting stays meaningful.
    pub dedupe: bool,
    pub fuel: usize,
}

impl Default for ParseOptions<'_> {
    fn default() -> Self {
        ParseOptions {
            goal: Atom::new("s").unwrap(),
            strategy: Strategy::Exhaustive,
            max_states: None,
            model: None,
            dedupe: false,
            fuel: DEFAULT_FUEL,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScoredState {
    pub state: ParserState,
    /// Cumulative log-score of the path; 0 under the uniform model.
    pub score: f64,
}

/// One alpha-equivalence class of final semantics, with every accepting
/// transition path that produced it.
#[derive(Clone, Debug)]
pub struct Reading {
    pub sem: LambdaTerm,
    pub paths: Vec<Vec<TransitionRecord>>,
}

#[derive(Clone, Debug)]
pub struct ParseResult {
    /// `snapshots[k]` is the live set after `k` words; `snapshots[0]` is
    /// the initial state. For the serial strategy the lists hold every
    /// state visited at that depth, in exploration order.
    pub snapshots: Vec<Vec<ScoredState>>,
    pub readings: Vec<Reading>,
    /// Set to the final word index when the sentence ran out of words
    /// without any accepting state (a grammatical dead end at the end of
    /// the sentence). Mid-sentence failures are errors, not results.
    pub failure_point: Option<usize>,
}

impl ParseResult {
    /// Live-state count after each word.
    pub fn live_counts(&self) -> Vec<usize> {
        self.snapshots[1..].iter().map(Vec::len).collect()
    }

    /// Total number of accepting transition paths.
    pub fn path_count(&self) -> usize {
        self.readings.iter().map(|r| r.paths.len()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("unknown word '{word}' at position {position}")]
    UnknownWord { word: String, position: usize },
    #[error("no transitions possible at position {position}")]
    DeadEnd { position: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("beam width must be at least 1")]
    ZeroBeam,
    #[error("max_states must be at least 1")]
    ZeroMaxStates,
    #[error("semantics failed to normalize: {0}")]
    Normalize(#[from] NormalizeError),
}

/// The state before any word: one expected category (the bare goal atom)
/// and the identity semantics.
pub fn initial_state(goal: Atom) -> ParserState {
    ParserState {
        expected: vec![Category::atom(goal.clone())],
        goal,
        sem: abs("Q", var("Q")),
        history: Vec::new(),
    }
}

/// Expands every live state over every lexical entry for `word`, ranks
/// the union, and truncates it according to the strategy. `position` is
/// the 1-based index of the word, used in errors.
pub fn feed(
    states: &[ScoredState],
    word: &str,
    position: usize,
    lexicon: &Lexicon,
    opts: &ParseOptions,
) -> Result<Vec<ScoredState>, EngineError> {
    let entries = lexicon.entries(word).ok_or_else(|| EngineError::UnknownWord {
        word: word.to_string(),
        position,
    })?;

    let mut next = Vec::new();
    for scored in states {
        for (state, record) in successors(&scored.state, entries, opts.fuel)? {
            let step = transition_score(opts.model, &record);
            next.push(ScoredState {
                state,
                score: scored.score + step,
            });
        }
    }
    if next.is_empty() {
        return Err(EngineError::DeadEnd { position });
    }
    rank_states(&mut next);
    if opts.dedupe {
        dedupe_states(&mut next);
    }
    match opts.strategy {
        Strategy::Beam(width) => {
            if width == 0 {
                return Err(EngineError::ZeroBeam);
            }
            next.truncate(width);
        }
        Strategy::Exhaustive | Strategy::Serial { .. } => {}
    }
    if let Some(cap) = opts.max_states {
        next.truncate(cap);
    }
    Ok(next)
}

fn transition_score(model: Option<&TransitionModel>, record: &TransitionRecord) -> f64 {
    match model {
        Some(m) => m.score(&record.context, &record.outcome()),
        None => 0.0,
    }
}

/// Stable sort by descending score; ties keep the deterministic
/// generation order (source state first, then successor order).
fn rank_states(states: &mut [ScoredState]) {
    states.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap_or(std::cmp::Ordering::Equal));
}

fn dedupe_states(states: &mut Vec<ScoredState>) {
    let mut seen: std::collections::HashSet<(Vec<Category>, CanonTerm)> =
        std::collections::HashSet::new();
    states.retain(|s| seen.insert((s.state.expected.clone(), canonical(&s.state.sem))));
}

/// Parses a whole token sequence. Readings are deduplicated by alpha
/// equality with derivation multiplicity retained in `paths`.
pub fn parse(
    tokens: &[&str],
    lexicon: &Lexicon,
    opts: &ParseOptions,
) -> Result<ParseResult, EngineError> {
    if tokens.is_empty() {
        return Err(EngineError::EmptyInput);
    }
    if opts.max_states == Some(0) {
        return Err(EngineError::ZeroMaxStates);
    }
    if matches!(opts.strategy, Strategy::Beam(0)) {
        return Err(EngineError::ZeroBeam);
    }
    if let Strategy::Serial { all_readings } = opts.strategy {
        return parse_serial(tokens, lexicon, opts, all_readings);
    }

    let init = ScoredState {
        state: initial_state(opts.goal.clone()),
        score: 0.0,
    };
    let mut snapshots = vec![vec![init.clone()]];
    let mut live = vec![init];
    for (i, word) in tokens.iter().enumerate() {
        live = feed(&live, word, i + 1, lexicon, opts)?;
        snapshots.push(live.clone());
    }

    let readings = collect_readings(live.iter().map(|s| &s.state));
    let failure_point = readings.is_empty().then_some(tokens.len());
    Ok(ParseResult {
        snapshots,
        readings,
        failure_point,
    })
}

fn collect_readings<'a>(accepted: impl Iterator<Item = &'a ParserState>) -> Vec<Reading> {
    let mut readings: Vec<Reading> = Vec::new();
    let mut index: std::collections::HashMap<CanonTerm, usize> = std::collections::HashMap::new();
    for state in accepted {
        if !state.is_accepting() {
            continue;
        }
        let key = canonical(&state.sem);
        match index.get(&key) {
            Some(&i) => readings[i].paths.push(state.history.clone()),
            None => {
                index.insert(key, readings.len());
                readings.push(Reading {
                    sem: state.sem.clone(),
                    paths: vec![state.history.clone()],
                });
            }
        }
    }
    readings
}

fn parse_serial(
    tokens: &[&str],
    lexicon: &Lexicon,
    opts: &ParseOptions,
    all_readings: bool,
) -> Result<ParseResult, EngineError> {
    // Unknown words would otherwise surface at an exploration-dependent
    // moment; report the first one up front instead.
    for (i, word) in tokens.iter().enumerate() {
        if !lexicon.contains(word) {
            return Err(EngineError::UnknownWord {
                word: word.to_string(),
                position: i + 1,
            });
        }
    }

    let init = ScoredState {
        state: initial_state(opts.goal.clone()),
        score: 0.0,
    };
    let mut snapshots: Vec<Vec<ScoredState>> = vec![Vec::new(); tokens.len() + 1];
    snapshots[0].push(init.clone());
    let mut accepted: Vec<ParserState> = Vec::new();

    fn dfs(
        depth: usize,
        current: &ScoredState,
        tokens: &[&str],
        lexicon: &Lexicon,
        opts: &ParseOptions,
        snapshots: &mut Vec<Vec<ScoredState>>,
        accepted: &mut Vec<ParserState>,
        all_readings: bool,
    ) -> Result<bool, EngineError> {
        if depth == tokens.len() {
            if current.state.is_accepting() {
                accepted.push(current.state.clone());
                return Ok(!all_readings);
            }
            return Ok(false);
        }
        let entries = lexicon
            .entries(tokens[depth])
            .expect("tokens were checked against the lexicon");
        let mut ranked = Vec::new();
        for (state, record) in successors(&current.state, entries, opts.fuel)? {
            let step = transition_score(opts.model, &record);
            ranked.push(ScoredState {
                state,
                score: current.score + step,
            });
        }
        rank_states(&mut ranked);
        for next in ranked {
            snapshots[depth + 1].push(next.clone());
            if dfs(
                depth + 1,
                &next,
                tokens,
                lexicon,
                opts,
                snapshots,
                accepted,
                all_readings,
            )? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    dfs(
        0,
        &init,
        tokens,
        lexicon,
        opts,
        &mut snapshots,
        &mut accepted,
        all_readings,
    )?;

    let readings = collect_readings(accepted.iter());
    let failure_point = readings.is_empty().then_some(tokens.len());
    Ok(ParseResult {
        snapshots,
        readings,
        failure_point,
    })
}

/// The state's partial interpretation, already beta-normal.
pub fn partial_semantics(state: &ParserState) -> &LambdaTerm {
    &state.sem
}

/// Replays a recorded transition path from the initial state, returning
/// the state it leads to. Used to audit that beam survivors and reading
/// paths are genuine.
pub fn replay_path(
    path: &[TransitionRecord],
    lexicon: &Lexicon,
    goal: Atom,
    fuel: usize,
) -> Result<ParserState, String> {
    let mut state = initial_state(goal);
    for (i, record) in path.iter().enumerate() {
        let entries = lexicon
            .entries(&record.word)
            .ok_or_else(|| format!("step {i}: unknown word '{}'", record.word))?;
        let all = successors(&state, entries, fuel).map_err(|e| format!("step {i}: {e}"))?;
        state = all
            .into_iter()
            .find(|(_, r)| {
                r.entry_index == record.entry_index
                    && r.rule == record.rule
                    && r.l1_len == record.l1_len
                    && r.r1_len == record.r1_len
            })
            .map(|(s, _)| s)
            .ok_or_else(|| format!("step {i}: recorded transition not reproducible"))?;
    }
    Ok(state)
}

/// JSON-lines trace: one record per (word, surviving state) with the
/// transition that produced the state, the rendered expected list and
/// semantics, and the cumulative log-score.
pub fn trace_lines(result: &ParseResult) -> Vec<serde_json::Value> {
    let mut out = Vec::new();
    for (step, states) in result.snapshots.iter().enumerate().skip(1) {
        for scored in states {
            let record = scored
                .state
                .history
                .last()
                .expect("states after word k have k transitions");
            let expected: Vec<String> =
                scored.state.expected.iter().map(|c| c.render()).collect();
            out.push(serde_json::json!({
                "step": step,
                "word": record.word,
                "rule": record.rule.as_str(),
                "l1": record.l1_len,
                "r1": record.r1_len,
                "expected": expected,
                "sem": scored.state.sem.to_string(),
                "score": scored.score,
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{alpha_eq, parse_term};
    use crate::lexicon::load_lexicon;

    const TOY: &str = include_str!("../data/toy-english.lex");

    fn lex() -> Lexicon {
        load_lexicon(TOY).unwrap()
    }

    fn opts<'m>() -> ParseOptions<'m> {
        ParseOptions::default()
    }

    fn sems(states: &[ScoredState]) -> Vec<&LambdaTerm> {
        states.iter().map(|s| &s.state.sem).collect()
    }

    #[test]
    fn initial_state_expects_the_goal() {
        let s = initial_state(Atom::new("s").unwrap());
        assert_eq!(s.expected.len(), 1);
        assert_eq!(s.expected[0].render(), "s");
        assert!(alpha_eq(&s.sem, &parse_term("\\q.q").unwrap()));
        assert!(!s.is_accepting());

        let np_goal = initial_state(Atom::new("np").unwrap());
        assert_eq!(np_goal.expected[0].render(), "np");
    }

    #[test]
    fn feed_counts_match_the_choice_points() {
        let lex = lex();
        let init = ScoredState {
            state: initial_state(Atom::new("s").unwrap()),
            score: 0.0,
        };
        let after_john = feed(&[init], "john", 1, &lex, &opts()).unwrap();
        assert_eq!(after_john.len(), 1);
        let after_likes = feed(&after_john, "likes", 2, &lex, &opts()).unwrap();
        assert_eq!(after_likes.len(), 5);
    }

    #[test]
    fn unknown_words_are_errors() {
        let lex = lex();
        let init = ScoredState {
            state: initial_state(Atom::new("s").unwrap()),
            score: 0.0,
        };
        let err = feed(&[init], "xyzzy", 1, &lex, &opts()).unwrap_err();
        assert_eq!(
            err,
            EngineError::UnknownWord {
                word: "xyzzy".to_string(),
                position: 1
            }
        );
    }

    #[test]
    fn transitive_sentence_has_one_reading() {
        let result = parse(&["john", "likes", "sue"], &lex(), &opts()).unwrap();
        assert_eq!(result.readings.len(), 1);
        assert!(alpha_eq(
            &result.readings[0].sem,
            &parse_term("likes'(john',sue')").unwrap()
        ));
        assert_eq!(result.readings[0].paths.len(), 1);
        assert_eq!(result.live_counts(), [1, 5, 8]);
        assert!(result.failure_point.is_none());
    }

    #[test]
    fn prefix_semantics_after_mary_thinks_john() {
        let result = parse(&["mary", "thinks", "john"], &lex(), &opts()).unwrap();
        let last = result.snapshots.last().unwrap();
        let wanted = [
            "\\p. thinks'(mary', p(john'))",
            "\\p.\\q. q(thinks'(mary', p(john')))",
            "\\p.\\r. (r(\\x. thinks'(x, p(john'))))(mary')",
        ];
        for text in wanted {
            let target = parse_term(text).unwrap();
            assert!(
                sems(last).iter().any(|s| alpha_eq(s, &target)),
                "missing {text}"
            );
        }
        assert!(result.readings.is_empty());
    }

    #[test]
    fn subjectless_prefix_reaches_the_end_without_readings() {
        let result = parse(&["likes", "john"], &lex(), &opts()).unwrap();
        assert!(result.readings.is_empty());
        assert_eq!(result.failure_point, Some(2));
        assert_eq!(result.live_counts(), [2, 3]);
    }

    #[test]
    fn history_length_tracks_words_consumed() {
        let result = parse(&["john", "likes", "sue", "quickly"], &lex(), &opts()).unwrap();
        for (k, states) in result.snapshots.iter().enumerate() {
            for s in states {
                assert_eq!(s.state.history.len(), k);
            }
        }
    }

    #[test]
    fn partial_semantics_is_the_state_term() {
        let s = initial_state(Atom::new("s").unwrap());
        assert!(alpha_eq(partial_semantics(&s), &parse_term("\\q.q").unwrap()));
    }

    #[test]
    fn beam_infinite_equals_exhaustive() {
        let lex = lex();
        let sentence = ["john", "thinks", "mary", "likes", "sue"];
        let exhaustive = parse(&sentence, &lex, &opts()).unwrap();
        let beam = parse(
            &sentence,
            &lex,
            &ParseOptions {
                strategy: Strategy::Beam(usize::MAX),
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(exhaustive.snapshots.len(), beam.snapshots.len());
        for (a, b) in exhaustive.snapshots.iter().zip(&beam.snapshots) {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert_eq!(x.state, y.state);
            }
        }
    }

    #[test]
    fn beam_survivors_replay_within_the_exhaustive_set() {
        let lex = lex();
        let sentence = ["john", "thinks", "mary", "likes", "sue"];
        let exhaustive = parse(&sentence, &lex, &opts()).unwrap();
        let beam = parse(
            &sentence,
            &lex,
            &ParseOptions {
                strategy: Strategy::Beam(4),
                ..opts()
            },
        )
        .unwrap();
        for (k, states) in beam.snapshots.iter().enumerate() {
            for s in states {
                // the path must replay to an identical state
                let replayed = replay_path(
                    &s.state.history,
                    &lex,
                    Atom::new("s").unwrap(),
                    DEFAULT_FUEL,
                )
                .unwrap();
                assert_eq!(replayed, s.state);
                assert!(
                    exhaustive.snapshots[k]
                        .iter()
                        .any(|e| e.state == s.state),
                    "beam state at word {k} missing from exhaustive set"
                );
            }
        }
    }

    #[test]
    fn runs_are_deterministic() {
        let lex = lex();
        let sentence = ["john", "thinks", "mary", "likes", "sue", "quickly"];
        let a = parse(&sentence, &lex, &opts()).unwrap();
        let b = parse(&sentence, &lex, &opts()).unwrap();
        assert_eq!(a.live_counts(), b.live_counts());
        for (x, y) in a.snapshots.iter().flatten().zip(b.snapshots.iter().flatten()) {
            assert_eq!(x.state, y.state);
        }
    }

    #[test]
    fn reading_paths_replay_to_accepting_states() {
        let lex = lex();
        let result = parse(&["john", "likes", "sue", "quickly"], &lex, &opts()).unwrap();
        assert_eq!(result.readings.len(), 1);
        for reading in &result.readings {
            for path in &reading.paths {
                let state =
                    replay_path(path, &lex, Atom::new("s").unwrap(), DEFAULT_FUEL).unwrap();
                assert!(state.is_accepting());
                assert!(alpha_eq(&state.sem, &reading.sem));
            }
        }
    }

    #[test]
    fn serial_first_reading_matches_exhaustive() {
        let lex = lex();
        let sentence = ["john", "likes", "sue"];
        let exhaustive = parse(&sentence, &lex, &opts()).unwrap();
        let serial = parse(
            &sentence,
            &lex,
            &ParseOptions {
                strategy: Strategy::Serial {
                    all_readings: false,
                },
                ..opts()
            },
        )
        .unwrap();
        assert_eq!(serial.readings.len(), 1);
        assert!(alpha_eq(&serial.readings[0].sem, &exhaustive.readings[0].sem));
    }

    #[test]
    fn serial_all_matches_exhaustive_reading_set() {
        let lex = lex();
        let sentence = ["john", "likes", "sue", "quickly"];
        let exhaustive = parse(&sentence, &lex, &opts()).unwrap();
        let serial = parse(
            &sentence,
            &lex,
            &ParseOptions {
                strategy: Strategy::Serial { all_readings: true },
                ..opts()
            },
        )
        .unwrap();
        let mut a: Vec<CanonTerm> = exhaustive.readings.iter().map(|r| canonical(&r.sem)).collect();
        let mut b: Vec<CanonTerm> = serial.readings.iter().map(|r| canonical(&r.sem)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn dedupe_never_loses_readings() {
        let lex = lex();
        let sentence = ["john", "thinks", "mary", "likes", "sue"];
        let plain = parse(&sentence, &lex, &opts()).unwrap();
        let deduped = parse(
            &sentence,
            &lex,
            &ParseOptions {
                dedupe: true,
                ..opts()
            },
        )
        .unwrap();
        let a: std::collections::BTreeSet<CanonTerm> =
            plain.readings.iter().map(|r| canonical(&r.sem)).collect();
        let b: std::collections::BTreeSet<CanonTerm> =
            deduped.readings.iter().map(|r| canonical(&r.sem)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_input_is_a_usage_error() {
        assert_eq!(parse(&[], &lex(), &opts()).unwrap_err(), EngineError::EmptyInput);
    }

    /// With known words prediction always offers the (0,0) split, so a
    /// dead end needs the beam to strand only accepting states.
    #[test]
    fn narrow_beam_can_dead_end_mid_sentence() {
        let lex = lex();
        let result = parse(
            &["john", "likes", "sue", "quickly"],
            &lex,
            &ParseOptions {
                strategy: Strategy::Beam(1),
                ..opts()
            },
        );
        assert_eq!(result.unwrap_err(), EngineError::DeadEnd { position: 4 });
    }

    /// Application against an expected argument whose right list is
    /// non-empty and whose matching word exposes a functional prefix:
    /// stacked function-of-function modifiers exercise it end to end.
    #[test]
    fn stacked_functional_modifiers_match_the_oracle() {
        use crate::oracle::{cky_parse, Regime};
        let lex = lex();
        let tokens = ["the", "very", "very", "old", "car", "likes", "john"];
        let engine = parse(&tokens, &lex, &opts()).unwrap();
        let oracle = cky_parse(
            &tokens,
            &lex,
            &Atom::new("s").unwrap(),
            Regime::Unrestricted,
            DEFAULT_FUEL,
        )
        .unwrap();
        assert_eq!(engine.readings.len(), 1);
        assert_eq!(oracle.len(), 1);
        assert!(alpha_eq(&engine.readings[0].sem, &oracle[0].sem));
    }

    #[test]
    fn max_states_caps_the_live_set() {
        let lex = lex();
        let result = parse(
            &["john", "likes", "sue"],
            &lex,
            &ParseOptions {
                max_states: Some(3),
                ..opts()
            },
        )
        .unwrap();
        assert!(result.live_counts().iter().all(|&n| n <= 3));
    }

    #[test]
    fn trace_has_one_line_per_surviving_state() {
        let result = parse(&["john", "likes", "sue"], &lex(), &opts()).unwrap();
        let lines = trace_lines(&result);
        assert_eq!(lines.len(), 1 + 5 + 8);
        assert_eq!(lines[0]["step"], 1);
        assert_eq!(lines[0]["word"], "john");
        assert_eq!(lines[0]["rule"], "predict");
    }
}
