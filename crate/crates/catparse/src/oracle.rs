//! Brute-force chart parser used as ground truth.
//!
//! This parser knows nothing about states, headed lists, or incremental
//! transitions: it combines adjacent spans bottom-up with the grammar's
//! two application rules only, over all bracketings. Its reading set is
//! what the incremental engine must reproduce.
//!
//! Left application comes in two regimes. The grammar rule as written
//! places no condition on the functor's right list; under that
//! unrestricted regime the semantics must hold the left argument until the
//! remaining right arguments are consumed, because lexical semantics
//! abstract over right arguments first. The right-first regime instead
//! requires the right list to be empty before left application fires,
//! which keeps semantics a pure fold. The two regimes derive the same
//! readings (associativity only multiplies derivations), and tests compare
//! them.

use std::collections::BTreeMap;

use crate::category::{Atom, Category};
use crate::lambda::{
    abs_many, app, app_many, beta_normalize, canonical, var, CanonTerm, LambdaTerm,
    NormalizeError,
};
use crate::lexicon::Lexicon;

/// Left-application discipline; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Left application only when the functor's right list is empty.
    RightFirst,
    /// Left application at any time, as the rule is written.
    Unrestricted,
}

/// A derived constituent: a span, a lexical-well-formed category, and
/// beta-normal semantics expecting the remaining right arguments first.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartItem {
    pub span: (usize, usize),
    pub cat: Category,
    pub sem: LambdaTerm,
}

/// Application to the right: the functor's first right argument is
/// consumed by the adjacent item. Returns `None` when the rule does not
/// apply.
pub fn apply_right(
    functor: &ChartItem,
    argument: &ChartItem,
    fuel: usize,
) -> Result<Option<ChartItem>, NormalizeError> {
    debug_assert_eq!(functor.span.1, argument.span.0);
    if functor.cat.right.first() != Some(&argument.cat) {
        return Ok(None);
    }
    let mut cat = functor.cat.clone();
    cat.right.remove(0);
    let (sem, _) = beta_normalize(&app(functor.sem.clone(), argument.sem.clone()), fuel)?;
    Ok(Some(ChartItem {
        span: (functor.span.0, argument.span.1),
        cat,
        sem,
    }))
}

/// Application to the left: the functor's first left argument is consumed
/// by the item before it. Under [`Regime::Unrestricted`] the argument's
/// value is reordered past the functor's remaining right arguments so the
/// right-arguments-first semantic convention is preserved.
pub fn apply_left(
    argument: &ChartItem,
    functor: &ChartItem,
    regime: Regime,
    fuel: usize,
) -> Result<Option<ChartItem>, NormalizeError> {
    debug_assert_eq!(argument.span.1, functor.span.0);
    if functor.cat.left.first() != Some(&argument.cat) {
        return Ok(None);
    }
    if regime == Regime::RightFirst && !functor.cat.right.is_empty() {
        return Ok(None);
    }
    let mut cat = functor.cat.clone();
    cat.left.remove(0);
    let pending = functor.cat.right.len();
    let vars: Vec<String> = (0..pending).map(|i| format!("v{i}")).collect();
    let body = app(
        app_many(functor.sem.clone(), vars.iter().map(var)),
        argument.sem.clone(),
    );
    let (sem, _) = beta_normalize(&abs_many(vars, body), fuel)?;
    Ok(Some(ChartItem {
        span: (argument.span.0, functor.span.1),
        cat,
        sem,
    }))
}

/// One alpha-class of goal semantics with its derivation count. Counts
/// may exceed one per reading: the grammar's spurious derivations
/// (alternative bracketings) do not produce distinct readings.
#[derive(Clone, Debug)]
pub struct OracleReading {
    pub sem: LambdaTerm,
    pub derivations: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("unknown word '{word}' at position {position}")]
    UnknownWord { word: String, position: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("semantics failed to normalize: {0}")]
    Normalize(#[from] NormalizeError),
}

type Cell = BTreeMap<(Category, CanonTerm), (LambdaTerm, u64)>;

fn add_item(cell: &mut Cell, cat: Category, sem: LambdaTerm, count: u64) {
    let key = (cat, canonical(&sem));
    cell.entry(key)
        .and_modify(|(_, c)| *c += count)
        .or_insert((sem, count));
}

/// Derives every item obtainable with the two application rules over all
/// split points, then reads off the semantics of goal-atom items covering
/// the whole input. The readings come back in canonical order.
pub fn cky_parse(
    tokens: &[&str],
    lexicon: &Lexicon,
    goal: &Atom,
    regime: Regime,
    fuel: usize,
) -> Result<Vec<OracleReading>, OracleError> {
    let n = tokens.len();
    if n == 0 {
        return Err(OracleError::EmptyInput);
    }
    let mut chart: BTreeMap<(usize, usize), Cell> = BTreeMap::new();
    for (i, word) in tokens.iter().enumerate() {
        let entries = lexicon
            .entries(word)
            .ok_or_else(|| OracleError::UnknownWord {
                word: word.to_string(),
                position: i + 1,
            })?;
        let cell = chart.entry((i, i + 1)).or_default();
        for entry in entries {
            let (sem, _) = beta_normalize(&entry.sem, fuel)?;
            add_item(cell, entry.cat.clone(), sem, 1);
        }
    }
    for len in 2..=n {
        for start in 0..=n - len {
            let end = start + len;
            let mut cell = Cell::new();
            for split in start + 1..end {
                let left_cell = chart.get(&(start, split)).cloned().unwrap_or_default();
                let right_cell = chart.get(&(split, end)).cloned().unwrap_or_default();
                for ((lcat, _), (lsem, lcount)) in &left_cell {
                    for ((rcat, _), (rsem, rcount)) in &right_cell {
                        let count = lcount * rcount;
                        let left_item = ChartItem {
                            span: (start, split),
                            cat: lcat.clone(),
                            sem: lsem.clone(),
                        };
                        let right_item = ChartItem {
                            span: (split, end),
                            cat: rcat.clone(),
                            sem: rsem.clone(),
                        };
                        if let Some(item) = apply_right(&left_item, &right_item, fuel)? {
                            add_item(&mut cell, item.cat, item.sem, count);
                        }
                        if let Some(item) = apply_left(&left_item, &right_item, regime, fuel)? {
                            add_item(&mut cell, item.cat, item.sem, count);
                        }
                    }
                }
            }
            if !cell.is_empty() {
                chart.insert((start, end), cell);
            }
        }
    }

    let goal_cat = Category::atom(goal.clone());
    let mut readings = Vec::new();
    if let Some(cell) = chart.get(&(0, n)) {
        for ((cat, _), (sem, count)) in cell {
            if *cat == goal_cat {
                readings.push(OracleReading {
                    sem: sem.clone(),
                    derivations: *count,
                });
            }
        }
    }
    Ok(readings)
}
