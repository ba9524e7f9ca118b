//! Lexicon files.
//!
//! One entry per line in the form `word : CATEGORY = LAMBDA`, where the
//! category is written in curried slash notation and flattened on load.
//! `#` starts a comment; blank lines are ignored. Entry order within a
//! word is file order, which fixes successor ordering downstream.
//!
//! Constants are names ending in a prime mark; any other free name in an
//! entry's semantics is reported by validation as an error.

use std::collections::BTreeSet;
use std::fmt;

use crate::category::{flatten, parse_slash, to_curried, Category};
use crate::lambda::{beta_normalize, parse_term, render_term, DEFAULT_FUEL};
use crate::rules::LexEntry;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum LexiconError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate entry for '{word}'")]
    Duplicate { line: usize, word: String },
}

/// An ordered multimap from word form to lexical entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lexicon {
    /// Words in first-appearance order, each with its entries in file
    /// order.
    words: Vec<(String, Vec<LexEntry>)>,
    /// Constant names used across all entry semantics.
    constants: BTreeSet<String>,
}

impl Lexicon {
    pub fn entries(&self, word: &str) -> Option<&[LexEntry]> {
        self.words
            .iter()
            .find(|(w, _)| w == word)
            .map(|(_, es)| es.as_slice())
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries(word).is_some()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(|(w, _)| w.as_str())
    }

    pub fn all_entries(&self) -> impl Iterator<Item = &LexEntry> {
        self.words.iter().flat_map(|(_, es)| es.iter())
    }

    pub fn constants(&self) -> &BTreeSet<String> {
        &self.constants
    }

    /// Re-serializes in the file format, one entry per line in load order.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for entry in self.all_entries() {
            let curried = to_curried(&entry.cat).expect("lexical categories have no headed lists");
            out.push_str(&format!(
                "{} : {} = {}\n",
                entry.form,
                curried.render(),
                render_term(&entry.sem)
            ));
        }
        out
    }

    /// Diagnostics that do not block loading, plus free-name errors that
    /// make an entry unusable.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        for entry in self.all_entries() {
            let needed = entry.cat.left.len() + entry.cat.right.len();
            let have = entry.sem.leading_abstractions();
            if have < needed {
                report.arity_warnings.push(format!(
                    "'{}': semantics has {have} leading abstraction(s) but the category {} takes {needed} argument(s)",
                    entry.form, entry.cat
                ));
            }
            for v in entry.sem.free_vars() {
                report.free_name_errors.push(format!(
                    "'{}': semantics has free non-constant name '{v}'",
                    entry.form
                ));
            }
            count_atoms(&entry.cat, &mut report.atom_usage);
        }
        report
    }
}

fn count_atoms(cat: &Category, usage: &mut std::collections::BTreeMap<String, usize>) {
    *usage.entry(cat.head.name().to_string()).or_insert(0) += 1;
    for c in cat.left.iter().chain(&cat.right).chain(&cat.headed) {
        count_atoms(c, usage);
    }
}

/// Findings from [`Lexicon::validate`]. `free_name_errors` are genuine
/// errors; arity warnings flag entries whose semantics cannot saturate
/// their category.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub arity_warnings: Vec<String>,
    pub free_name_errors: Vec<String>,
    pub atom_usage: std::collections::BTreeMap<String, usize>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.arity_warnings.is_empty() && self.free_name_errors.is_empty()
    }

    pub fn findings(&self) -> Vec<String> {
        self.free_name_errors
            .iter()
            .cloned()
            .chain(self.arity_warnings.iter().cloned())
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.free_name_errors {
            writeln!(f, "error: {e}")?;
        }
        for w in &self.arity_warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Parses a lexicon from file text. Categories are flattened, semantics
/// beta-normalized, and exact duplicate entries rejected.
pub fn load_lexicon(text: &str) -> Result<Lexicon, LexiconError> {
    load_lexicon_with_fuel(text, DEFAULT_FUEL)
}

pub fn load_lexicon_with_fuel(text: &str, fuel: usize) -> Result<Lexicon, LexiconError> {
    let mut lexicon = Lexicon::default();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.find('#') {
            Some(idx) => &raw_line[..idx],
            None => raw_line,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let entry = parse_entry(line, line_no, fuel)?;
        insert_entry(&mut lexicon, entry, line_no)?;
    }
    Ok(lexicon)
}

fn parse_entry(line: &str, line_no: usize, fuel: usize) -> Result<LexEntry, LexiconError> {
    let syntax = |message: String| LexiconError::Syntax {
        line: line_no,
        message,
    };

    let (word, rest) = line
        .split_once(':')
        .ok_or_else(|| syntax("expected 'word : CATEGORY = LAMBDA'".to_string()))?;
    let word = word.trim();
    if word.is_empty() || word.contains(char::is_whitespace) {
        return Err(syntax(format!("bad word form '{word}'")));
    }
    let (cat_text, sem_text) = rest
        .split_once('=')
        .ok_or_else(|| syntax("missing '=' before the semantics".to_string()))?;

    let slash = parse_slash(cat_text.trim()).map_err(|e| syntax(format!("category: {e}")))?;
    let cat = flatten(&slash);
    let sem = parse_term(sem_text.trim()).map_err(|e| syntax(format!("semantics: {e}")))?;
    let (sem, _) = beta_normalize(&sem, fuel).map_err(|e| syntax(format!("semantics: {e}")))?;

    Ok(LexEntry {
        form: word.to_string(),
        cat,
        sem,
    })
}

fn insert_entry(
    lexicon: &mut Lexicon,
    entry: LexEntry,
    line_no: usize,
) -> Result<(), LexiconError> {
    for c in entry.sem.constants() {
        lexicon.constants.insert(c);
    }
    match lexicon.words.iter_mut().find(|(w, _)| *w == entry.form) {
        Some((_, entries)) => {
            if entries
                .iter()
                .any(|e| e.cat == entry.cat && crate::lambda::alpha_eq(&e.sem, &entry.sem))
            {
                return Err(LexiconError::Duplicate {
                    line: line_no,
                    word: entry.form,
                });
            }
            entries.push(entry);
        }
        None => lexicon.words.push((entry.form.clone(), vec![entry])),
    }
    Ok(())
}

impl std::str::FromStr for Lexicon {
    type Err = LexiconError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        load_lexicon(s)
    }
}
