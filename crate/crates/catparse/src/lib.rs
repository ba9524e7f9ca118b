//! A fully word-by-word incremental parser for applicative categorial
//! grammar.
//!
//! The parser's state between words is a single pair: a list of expected
//! categories and one lambda term (the partial interpretation of the prefix
//! consumed so far). Each input word maps a state to successor states via
//! two transition rules, so a partial semantic representation is available
//! after every word, not just at constituent boundaries.
//!
//! Modules:
//!
//! - [`category`]: the recursive category model (head atom plus left,
//!   right, and headed argument lists), slash-notation parsing, and
//!   associativity flattening between the two notations.
//! - [`lambda`]: untyped lambda calculus with constants; capture-avoiding
//!   substitution, normal-order beta normalization, alpha equivalence.
//! - [`rules`]: the two transition rules (application and prediction) and
//!   successor enumeration for a (state, lexical entry) pair.
//! - [`engine`]: the word-by-word driver with exhaustive, beam, and serial
//!   search strategies, per-prefix snapshots, and reading extraction.
//! - [`lexicon`]: the `word : CATEGORY = LAMBDA` lexicon file format.
//! - [`oracle`]: an independent brute-force chart parser over the two
//!   grammar application rules, used as ground truth in tests.
//! - [`stats`]: transition statistics learned from a corpus, used to rank
//!   successors for beam and serial search.
//!
//! ```
//! use catparse::engine::{parse, ParseOptions};
//! use catparse::lexicon::Lexicon;
//!
//! let lex: Lexicon = "john : np = john'\n\
//!                     sue : np = sue'\n\
//!                     likes : (np\\s)/np = \\y.\\x. likes'(x,y)"
//!     .parse()
//!     .unwrap();
//! let result = parse(&["john", "likes", "sue"], &lex, &ParseOptions::default()).unwrap();
//! assert_eq!(result.readings.len(), 1);
//! assert_eq!(result.readings[0].sem.to_string(), "likes'(john',sue')");
//! ```

pub mod category;
pub mod engine;
pub mod lambda;
pub mod lexicon;
pub mod oracle;
pub mod rules;
pub mod stats;

pub use category::{Atom, Category, SlashExpr};
pub use engine::{parse, ParseOptions, ParseResult, Reading, Strategy};
pub use lambda::LambdaTerm;
pub use lexicon::Lexicon;
pub use rules::{LexEntry, ParserState, RuleKind, TransitionRecord};
pub use stats::TransitionModel;
