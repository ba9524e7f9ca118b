//! The two state transition rules.
//!
//! A parser state between words is a goal atom, an ordered list of
//! expected categories, and one lambda term. Both rules consume exactly
//! one word; there are no empty transitions.
//!
//! *Application* fires when the next word supplies the first expected
//! argument directly, possibly exposing the word's extra right arguments
//! as new expectations. *Prediction* fires when the word is an argument of
//! a functor that has not been seen yet: the first expected argument is
//! wrapped with a new predicted left argument, which also goes onto its
//! headed list to record that the argument is waiting for its head.
//!
//! Prediction is nondeterministic: the word's left list may share a prefix
//! with the expected argument's left and headed lists (`l1`), and any
//! prefix of the word's right list may be exposed as new expectations
//! (`r1`). Each split is a separate successor, and each has distinct
//! semantics, which is what keeps derivations from collapsing into
//! spurious ambiguity.

use serde::{Deserialize, Serialize};

use crate::category::{Atom, Category};
use crate::lambda::{
    abs, abs_many, app, app_many, beta_normalize, var, LambdaTerm, NormalizeError,
};

/// A lexical entry: surface form, lexical-well-formed category, semantics.
#[derive(Clone, Debug, PartialEq)]
pub struct LexEntry {
    pub form: String,
    pub cat: Category,
    pub sem: LambdaTerm,
}

/// Which transition rule produced a state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Apply,
    Predict,
}

impl RuleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleKind::Apply => "apply",
            RuleKind::Predict => "predict",
        }
    }
}

/// The conditioning signature of a transition: the word's category and the
/// first expected argument before the transition, both in canonical text
/// form. The rest of the expected list is deliberately omitted so that
/// statistics generalize over states.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConditioningContext {
    pub word_cat: String,
    pub expected_cat: String,
}

impl ConditioningContext {
    pub fn key(&self) -> String {
        format!("{} | {}", self.word_cat, self.expected_cat)
    }
}

/// The choice a transition made, independent of its context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionOutcome {
    pub rule: RuleKind,
    pub l1_len: usize,
    pub r1_len: usize,
}

impl TransitionOutcome {
    pub fn key(&self) -> String {
        format!("{}:{}:{}", self.rule.as_str(), self.l1_len, self.r1_len)
    }
}

/// One transition on a derivation path.
///
/// Serializes as `{"rule":..,"word":..,"entry":..,"l1":..,"r1":..}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionRecord {
    pub rule: RuleKind,
    pub word: String,
    #[serde(rename = "entry")]
    pub entry_index: usize,
    #[serde(rename = "l1")]
    pub l1_len: usize,
    #[serde(rename = "r1")]
    pub r1_len: usize,
    #[serde(skip)]
    pub context: ConditioningContext,
}

impl TransitionRecord {
    pub fn outcome(&self) -> TransitionOutcome {
        TransitionOutcome {
            rule: self.rule,
            l1_len: self.l1_len,
            r1_len: self.r1_len,
        }
    }
}

/// The parser's entire condition between words.
#[derive(Clone, Debug, PartialEq)]
pub struct ParserState {
    /// The atom the whole parse must deliver; fixed across transitions.
    pub goal: Atom,
    /// Expected categories, nearest first (the state category's right
    /// list; its left and headed lists are empty by construction).
    pub expected: Vec<Category>,
    /// The partial interpretation, in beta-normal form.
    pub sem: LambdaTerm,
    /// Transitions taken to reach this state, one per word consumed.
    pub history: Vec<TransitionRecord>,
}

impl ParserState {
    /// True when the state expects no more arguments: a whole-sentence
    /// state in this condition is a successful parse.
    pub fn is_accepting(&self) -> bool {
        self.expected.is_empty()
    }

    /// Checks every state invariant: expected arguments are
    /// state-argument-well-formed, the semantics is beta-normal and closed
    /// over constants, and applying it to one fresh constant per expected
    /// argument leaves no free variables.
    pub fn validate(&self, fuel: usize) -> Result<(), String> {
        for (i, cat) in self.expected.iter().enumerate() {
            if !cat.is_state_argument_wf() {
                return Err(format!(
                    "expected argument {i} ({cat}) is not state-argument-well-formed"
                ));
            }
        }
        if !self.sem.is_normal() {
            return Err(format!("semantics {} is not in beta-normal form", self.sem));
        }
        if let Some(v) = self.sem.free_vars().iter().next() {
            return Err(format!("semantics has free variable '{v}'"));
        }
        let probe = app_many(
            self.sem.clone(),
            (0..self.expected.len()).map(|i| crate::lambda::constant(format!("probe{i}'"))),
        );
        let (saturated, _) = beta_normalize(&probe, fuel)
            .map_err(|e| format!("semantics does not normalize when saturated: {e}"))?;
        if let Some(v) = saturated.free_vars().iter().next() {
            return Err(format!(
                "saturated semantics has free variable '{v}' (arity mismatch)"
            ));
        }
        Ok(())
    }
}


fn is_suffix(suffix: &[Category], list: &[Category]) -> bool {
    suffix.len() <= list.len() && list[list.len() - suffix.len()..] == *suffix
}

/// Fresh variable names `base0`, `base1`, ... avoiding the free variables
/// of the given terms. State and lexical semantics are closed over
/// constants, so the avoid set is normally empty.
fn fresh_vars(base: &str, count: usize, avoid: &[&LambdaTerm]) -> Vec<String> {
    let taken: std::collections::BTreeSet<String> = avoid
        .iter()
        .flat_map(|t| t.free_vars())
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut i = 0;
    while out.len() < count {
        let name = format!("{base}{i}");
        i += 1;
        if !taken.contains(&name) {
            out.push(name);
        }
    }
    out
}

/// The application rule. Fires when the word's category has the same head
/// and left list as the first expected argument and that argument's right
/// list is a suffix of the word's; the word's extra right arguments become
/// the new front of the expected list. The expected argument's headed list
/// is matched by nothing and discarded. At most one instantiation exists.
///
/// New semantics: `λr1. F(G(r1))` with one variable per exposed right
/// argument.
pub fn state_apply(
    state: &ParserState,
    entry: &LexEntry,
    entry_index: usize,
    fuel: usize,
) -> Result<Option<(ParserState, TransitionRecord)>, NormalizeError> {
    let Some(first) = state.expected.first() else {
        return Ok(None);
    };
    if entry.cat.head != first.head
        || entry.cat.left != first.left
        || !is_suffix(&first.right, &entry.cat.right)
    {
        return Ok(None);
    }
    let exposed = entry.cat.right.len() - first.right.len();
    let r1 = &entry.cat.right[..exposed];

    let vars = fresh_vars("v", exposed, &[&state.sem, &entry.sem]);
    let body = app(
        state.sem.clone(),
        app_many(entry.sem.clone(), vars.iter().map(var)),
    );
    let (sem, _) = beta_normalize(&abs_many(vars, body), fuel)?;

    let mut expected = Vec::with_capacity(exposed + state.expected.len() - 1);
    expected.extend_from_slice(r1);
    expected.extend_from_slice(&state.expected[1..]);

    let record = TransitionRecord {
        rule: RuleKind::Apply,
        word: entry.form.clone(),
        entry_index,
        l1_len: 0,
        r1_len: exposed,
        context: ConditioningContext {
            word_cat: entry.cat.render(),
            expected_cat: first.render(),
        },
    };
    let mut history = state.history.clone();
    history.push(record.clone());
    Ok(Some((
        ParserState {
            goal: state.goal.clone(),
            expected,
            sem,
            history,
        },
        record,
    )))
}

/// The prediction rule. The word is taken to be an argument of an unseen
/// functor. One successor per split `(l1, r1)` where the first `l1`
/// elements are simultaneously a prefix of the word's left list and of the
/// expected argument's left and headed lists, and `r1` is any prefix of
/// the word's right list. The word's remainder becomes a new left argument
/// of the expected argument and joins its headed list; the `r1` prefix is
/// exposed as new expectations. Results are ordered by `(l1, r1)`
/// ascending.
///
/// New semantics: `λr1. λh. F(λl1. h(λr. G r1 r l1))` with variable lists
/// sized to the split.
pub fn state_predict(
    state: &ParserState,
    entry: &LexEntry,
    entry_index: usize,
    fuel: usize,
) -> Result<Vec<(ParserState, TransitionRecord)>, NormalizeError> {
    let Some(first) = state.expected.first() else {
        return Ok(Vec::new());
    };
    let word = &entry.cat;

    let mut max_l1 = 0;
    while max_l1 < word.left.len()
        && max_l1 < first.left.len()
        && max_l1 < first.headed.len()
        && word.left[max_l1] == first.left[max_l1]
        && word.left[max_l1] == first.headed[max_l1]
    {
        max_l1 += 1;
    }

    let mut out = Vec::new();
    for l1 in 0..=max_l1 {
        for r1 in 0..=word.right.len() {
            let remainder = Category::new(
                word.head.clone(),
                word.left[l1..].to_vec(),
                word.right[r1..].to_vec(),
                Vec::new(),
            );
            let mut left = Vec::with_capacity(1 + first.left.len() - l1);
            left.push(remainder.clone());
            left.extend_from_slice(&first.left[l1..]);
            let mut headed = Vec::with_capacity(1 + first.headed.len() - l1);
            headed.push(remainder.clone());
            headed.extend_from_slice(&first.headed[l1..]);
            let wrapped = Category::new(first.head.clone(), left, first.right.clone(), headed);
            debug_assert!(wrapped.is_state_argument_wf());

            let mut expected = Vec::with_capacity(r1 + state.expected.len());
            expected.extend_from_slice(&word.right[..r1]);
            expected.push(wrapped);
            expected.extend_from_slice(&state.expected[1..]);

            let avoid = [&state.sem, &entry.sem];
            let us = fresh_vars("u", r1, &avoid);
            let ws = fresh_vars("w", l1, &avoid);
            let ts = fresh_vars("t", word.right.len() - r1, &avoid);
            let h = fresh_vars("h", 1, &avoid).remove(0);

            // G applied to the exposed right args, then the remaining
            // right args, then the shared left args.
            let g_applied = app_many(
                entry.sem.clone(),
                us.iter().chain(&ts).chain(&ws).map(var),
            );
            let inner = app(var(h.clone()), abs_many(ts.clone(), g_applied));
            let f_arg = abs_many(ws.clone(), inner);
            let body = abs(h, app(state.sem.clone(), f_arg));
            let (sem, _) = beta_normalize(&abs_many(us.clone(), body), fuel)?;

            let record = TransitionRecord {
                rule: RuleKind::Predict,
                word: entry.form.clone(),
                entry_index,
                l1_len: l1,
                r1_len: r1,
                context: ConditioningContext {
                    word_cat: word.render(),
                    expected_cat: first.render(),
                },
            };
            let mut history = state.history.clone();
            history.push(record.clone());
            out.push((
                ParserState {
                    goal: state.goal.clone(),
                    expected,
                    sem,
                    history,
                },
                record,
            ));
        }
    }
    Ok(out)
}

/// All successors of a state for the given lexical entries, in
/// deterministic order: for each entry in order, the application result
/// (if any) followed by the prediction results by ascending `(l1, r1)`.
pub fn successors(
    state: &ParserState,
    entries: &[LexEntry],
    fuel: usize,
) -> Result<Vec<(ParserState, TransitionRecord)>, NormalizeError> {
    let mut out = Vec::new();
    for (index, entry) in entries.iter().enumerate() {
        if let Some(result) = state_apply(state, entry, index, fuel)? {
            out.push(result);
        }
        out.extend(state_predict(state, entry, index, fuel)?);
    }
    Ok(out)
}
