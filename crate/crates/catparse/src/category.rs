//! Syntactic categories.
//!
//! A [`Category`] is a head atom plus three ordered lists of argument
//! categories: arguments expected to the left, arguments expected to the
//! right, and the headed list (`h`), which tracks which left arguments are
//! already present in the input but still waiting for their head word.
//! Argument lists are nearest-argument-first.
//!
//! Curried slash notation (`(np\s)/np`) is the authoring format; it is
//! parsed into a [`SlashExpr`] and flattened into list form. Flattening
//! identifies all curried spellings of the same function, so
//! `np\((s/pp)/np)`, `(np\(s/pp))/np` and `((np\s)/pp)/np` all produce one
//! category.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A primitive syntactic type such as `s`, `np`, `n`, `pp`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Atom(String);

impl Atom {
    /// Characters that would collide with the notation for categories.
    const FORBIDDEN: &'static [char] =
        &['/', '\\', '{', '}', '[', ']', ',', ':', '(', ')'];

    pub fn new(name: &str) -> Result<Atom, CategoryError> {
        if name.is_empty() {
            return Err(CategoryError::new(0, "empty atom name"));
        }
        if let Some(bad) = name
            .chars()
            .find(|c| c.is_whitespace() || Atom::FORBIDDEN.contains(c))
        {
            return Err(CategoryError::new(
                name.find(bad).unwrap_or(0),
                format!("character '{bad}' not allowed in atom name"),
            ));
        }
        Ok(Atom(name.to_string()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Atom {
    type Err = CategoryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Atom::new(s)
    }
}

/// A recursive syntactic category.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Category {
    pub head: Atom,
    /// Arguments expected to the left, nearest first.
    pub left: Vec<Category>,
    /// Arguments expected to the right, nearest first.
    pub right: Vec<Category>,
    /// Left arguments whose fillers are present but whose head word is not.
    pub headed: Vec<Category>,
}

impl Category {
    pub fn atom(head: Atom) -> Category {
        Category {
            head,
            left: Vec::new(),
            right: Vec::new(),
            headed: Vec::new(),
        }
    }

    pub fn new(
        head: Atom,
        left: Vec<Category>,
        right: Vec<Category>,
        headed: Vec<Category>,
    ) -> Category {
        Category {
            head,
            left,
            right,
            headed,
        }
    }

    pub fn is_atomic(&self) -> bool {
        self.left.is_empty() && self.right.is_empty() && self.headed.is_empty()
    }

    /// Lexical well-formedness: the headed list is empty, recursively.
    pub fn is_lexical_wf(&self) -> bool {
        self.headed.is_empty()
            && self.left.iter().all(Category::is_lexical_wf)
            && self.right.iter().all(Category::is_lexical_wf)
    }

    /// State-argument well-formedness: the headed list is a structural
    /// prefix of the left list, and every nested category is
    /// lexical-well-formed.
    pub fn is_state_argument_wf(&self) -> bool {
        self.headed.len() <= self.left.len()
            && self.headed.iter().zip(&self.left).all(|(h, l)| h == l)
            && self.left.iter().all(Category::is_lexical_wf)
            && self.right.iter().all(Category::is_lexical_wf)
            && self.headed.iter().all(Category::is_lexical_wf)
    }

    /// Deterministic compact text form: `atom{l:[...],r:[...],h:[...]}`
    /// with empty lists omitted.
    pub fn render(&self) -> String {
        let mut out = self.head.0.clone();
        if !self.is_atomic() {
            let mut sections = Vec::new();
            for (tag, list) in [("l", &self.left), ("r", &self.right), ("h", &self.headed)] {
                if !list.is_empty() {
                    let inner: Vec<String> = list.iter().map(Category::render).collect();
                    sections.push(format!("{tag}:[{}]", inner.join(",")));
                }
            }
            out.push('{');
            out.push_str(&sections.join(","));
            out.push('}');
        }
        out
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for Category {
    type Err = CategoryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_category(s)
    }
}

/// Curried slash notation: an atom, `A/B` (argument `B` on the right,
/// result `A`), or `A\B` (argument `A` on the left, result `B`).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SlashExpr {
    Atom(Atom),
    /// `result/argument`
    Right(Box<SlashExpr>, Box<SlashExpr>),
    /// `argument\result`
    Left(Box<SlashExpr>, Box<SlashExpr>),
}

impl SlashExpr {
    pub fn render(&self) -> String {
        fn operand(e: &SlashExpr) -> String {
            match e {
                SlashExpr::Atom(a) => a.to_string(),
                _ => format!("({})", e.render()),
            }
        }
        match self {
            SlashExpr::Atom(a) => a.to_string(),
            SlashExpr::Right(res, arg) => format!("{}/{}", operand(res), operand(arg)),
            SlashExpr::Left(arg, res) => format!("{}\\{}", operand(arg), operand(res)),
        }
    }
}

impl fmt::Display for SlashExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl std::str::FromStr for SlashExpr {
    type Err = CategoryError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_slash(s)
    }
}

/// Syntax error in category or slash notation, with a byte position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("at position {position}: {message}")]
pub struct CategoryError {
    pub position: usize,
    pub message: String,
}

impl CategoryError {
    fn new(position: usize, message: impl Into<String>) -> CategoryError {
        CategoryError {
            position,
            message: message.into(),
        }
    }
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Scanner<'a> {
        Scanner { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_whitespace()) {
            self.bump();
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CategoryError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(CategoryError::new(
                self.pos,
                format!("expected '{c}'"),
            ))
        }
    }

    fn ident(&mut self, stop: &[char]) -> Result<Atom, CategoryError> {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || stop.contains(&c) {
                break;
            }
            self.bump();
        }
        if self.pos == start {
            return Err(CategoryError::new(start, "expected an atom name"));
        }
        Atom::new(&self.text[start..self.pos])
            .map_err(|e| CategoryError::new(start + e.position, e.message))
    }
}

/// Parses curried slash notation. Slashes are left-associative at equal
/// precedence, so `a\b/c` reads as `(a\b)/c`.
pub fn parse_slash(text: &str) -> Result<SlashExpr, CategoryError> {
    let mut s = Scanner::new(text);
    let expr = parse_slash_expr(&mut s)?;
    s.skip_ws();
    if s.pos != text.len() {
        return Err(CategoryError::new(s.pos, "unexpected trailing input"));
    }
    Ok(expr)
}

fn parse_slash_expr(s: &mut Scanner) -> Result<SlashExpr, CategoryError> {
    let mut cur = parse_slash_operand(s)?;
    loop {
        s.skip_ws();
        match s.peek() {
            Some('/') => {
                s.bump();
                let arg = parse_slash_operand(s)?;
                cur = SlashExpr::Right(Box::new(cur), Box::new(arg));
            }
            Some('\\') => {
                s.bump();
                let res = parse_slash_operand(s)?;
                cur = SlashExpr::Left(Box::new(cur), Box::new(res));
            }
            _ => return Ok(cur),
        }
    }
}

fn parse_slash_operand(s: &mut Scanner) -> Result<SlashExpr, CategoryError> {
    s.skip_ws();
    match s.peek() {
        Some('(') => {
            s.bump();
            let inner = parse_slash_expr(s)?;
            s.skip_ws();
            s.expect(')')?;
            Ok(inner)
        }
        Some('/') | Some('\\') | Some(')') | None => {
            Err(CategoryError::new(s.pos, "expected an operand"))
        }
        _ => Ok(SlashExpr::Atom(s.ident(&['/', '\\', '(', ')'])?)),
    }
}

/// Flattens a curried expression into list form. The output is
/// lexical-well-formed: headed lists are empty at every depth.
pub fn flatten(expr: &SlashExpr) -> Category {
    match expr {
        SlashExpr::Atom(a) => Category::atom(a.clone()),
        SlashExpr::Right(res, arg) => {
            let mut cat = flatten(res);
            cat.right.insert(0, flatten(arg));
            cat
        }
        SlashExpr::Left(arg, res) => {
            let mut cat = flatten(res);
            cat.left.insert(0, flatten(arg));
            cat
        }
    }
}

/// Converts a lexical-well-formed category to its canonical curried form:
/// left arguments wrapped innermost (`l:[a,b]` becomes `a\(b\head)`), then
/// right arguments wrapped outermost in reverse list order.
pub fn to_curried(cat: &Category) -> Result<SlashExpr, CategoryError> {
    if !cat.is_lexical_wf() {
        return Err(CategoryError::new(
            0,
            format!("category {cat} has a non-empty headed list"),
        ));
    }
    let mut expr = SlashExpr::Atom(cat.head.clone());
    for arg in cat.left.iter().rev() {
        expr = SlashExpr::Left(Box::new(to_curried(arg)?), Box::new(expr));
    }
    for arg in cat.right.iter().rev() {
        expr = SlashExpr::Right(Box::new(expr), Box::new(to_curried(arg)?));
    }
    Ok(expr)
}

/// Renders the compact text form; inverse of [`parse_category`].
pub fn render_category(cat: &Category) -> String {
    cat.render()
}

/// Parses the compact form `atom{l:[...],r:[...],h:[...]}`. Sections must
/// appear in `l`, `r`, `h` order, each at most once; empty lists are
/// normally omitted but an explicit `[]` is accepted.
pub fn parse_category(text: &str) -> Result<Category, CategoryError> {
    let mut s = Scanner::new(text);
    let cat = parse_category_inner(&mut s)?;
    s.skip_ws();
    if s.pos != text.len() {
        return Err(CategoryError::new(s.pos, "unexpected trailing input"));
    }
    Ok(cat)
}

fn parse_category_inner(s: &mut Scanner) -> Result<Category, CategoryError> {
    s.skip_ws();
    let head = s.ident(&['{', '}', '[', ']', ',', ':'])?;
    let mut cat = Category::atom(head);
    if s.eat('{') {
        let mut next_allowed = &["l", "r", "h"][..];
        loop {
            s.skip_ws();
            let tag_pos = s.pos;
            let tag = match s.bump() {
                Some('l') => "l",
                Some('r') => "r",
                Some('h') => "h",
                _ => return Err(CategoryError::new(tag_pos, "expected 'l', 'r', or 'h'")),
            };
            let idx = next_allowed
                .iter()
                .position(|t| *t == tag)
                .ok_or_else(|| {
                    CategoryError::new(tag_pos, format!("section '{tag}' out of order"))
                })?;
            next_allowed = &next_allowed[idx + 1..];
            s.expect(':')?;
            s.expect('[')?;
            let mut list = Vec::new();
            s.skip_ws();
            if !s.eat(']') {
                loop {
                    list.push(parse_category_inner(s)?);
                    s.skip_ws();
                    if s.eat(']') {
                        break;
                    }
                    s.expect(',')?;
                }
            }
            match tag {
                "l" => cat.left = list,
                "r" => cat.right = list,
                _ => cat.headed = list,
            }
            s.skip_ws();
            if s.eat('}') {
                break;
            }
            s.expect(',')?;
        }
    }
    Ok(cat)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cat(text: &str) -> Category {
        parse_category(text).unwrap()
    }

    #[test]
    fn parse_slash_single_atom() {
        assert_eq!(parse_slash("np").unwrap(), SlashExpr::Atom(Atom::new("np").unwrap()));
    }

    #[test]
    fn parse_slash_ditransitive() {
        let e = parse_slash("((np\\s)/pp)/np").unwrap();
        assert_eq!(e.render(), "((np\\s)/pp)/np");
    }

    #[test]
    fn parse_slash_functional_argument() {
        let e = parse_slash("(np\\s)/(np\\s)").unwrap();
        assert_eq!(e.render(), "(np\\s)/(np\\s)");
    }

    #[test]
    fn slashes_are_left_associative() {
        assert_eq!(parse_slash("a\\b/c").unwrap(), parse_slash("(a\\b)/c").unwrap());
        assert_eq!(parse_slash("a\\b\\c").unwrap(), parse_slash("(a\\b)\\c").unwrap());
    }

    #[test]
    fn parse_slash_rejects_unbalanced_parens() {
        let err = parse_slash("((np\\s)/pp").unwrap_err();
        assert_eq!(err.position, 10);
        let err = parse_slash("np\\s)").unwrap_err();
        assert!(err.message.contains("trailing"));
    }

    #[test]
    fn parse_slash_rejects_empty_operand() {
        assert!(parse_slash("a/").is_err());
        assert!(parse_slash("/b").is_err());
        assert!(parse_slash("()").is_err());
        assert!(parse_slash("").is_err());
    }

    #[test]
    fn flatten_identifies_all_three_curried_spellings() {
        let expected = cat("s{l:[np],r:[np,pp]}");
        for text in ["np\\((s/pp)/np)", "(np\\(s/pp))/np", "((np\\s)/pp)/np"] {
            assert_eq!(flatten(&parse_slash(text).unwrap()), expected, "{text}");
        }
    }

    #[test]
    fn flatten_adverb_keeps_functional_argument() {
        let got = flatten(&parse_slash("(np\\s)/(np\\s)").unwrap());
        assert_eq!(got, cat("s{l:[np],r:[s{l:[np]}]}"));
    }

    #[test]
    fn flatten_output_is_lexical_wf() {
        let got = flatten(&parse_slash("((n/n)/(n/n))/(s/np)").unwrap());
        assert!(got.is_lexical_wf());
    }

    #[test]
    fn to_curried_picks_the_vp_spelling() {
        let e = to_curried(&cat("s{l:[np],r:[np,pp]}")).unwrap();
        assert_eq!(e.render(), "((np\\s)/pp)/np");
    }

    #[test]
    fn to_curried_identity_on_atoms() {
        let e = to_curried(&cat("np")).unwrap();
        assert_eq!(e, SlashExpr::Atom(Atom::new("np").unwrap()));
    }

    #[test]
    fn to_curried_round_trips_adverb() {
        let c = cat("s{l:[np],r:[s{l:[np]}]}");
        let e = to_curried(&c).unwrap();
        assert_eq!(e.render(), "(np\\s)/(np\\s)");
        assert_eq!(flatten(&e), c);
    }

    #[test]
    fn to_curried_rejects_headed_lists() {
        assert!(to_curried(&cat("s{l:[np],h:[np]}")).is_err());
    }

    #[test]
    fn render_atom() {
        assert_eq!(cat("s").render(), "s");
    }

    #[test]
    fn render_parse_round_trips_state_arguments() {
        for text in [
            "s{l:[np],h:[np]}",
            "s{l:[s{l:[np]},np],h:[s{l:[np]},np]}",
            "s{l:[np],r:[np,pp]}",
            "n{r:[n]}",
        ] {
            let c = cat(text);
            assert_eq!(c.render(), text);
            assert_eq!(parse_category(&c.render()).unwrap(), c);
        }
    }

    #[test]
    fn parse_category_reports_positions() {
        let err = parse_category("s{l:[np]").unwrap_err();
        assert_eq!(err.position, 8);
        let err = parse_category("s{x:[np]}").unwrap_err();
        assert_eq!(err.position, 2);
        let err = parse_category("s{r:[np],l:[np]}").unwrap_err();
        assert!(err.message.contains("out of order"));
    }

    #[test]
    fn wellformedness_predicates() {
        assert!(cat("s{l:[np],r:[np,pp]}").is_lexical_wf());
        assert!(!cat("s{l:[np],h:[np]}").is_lexical_wf());
        assert!(cat("s{l:[np],h:[np]}").is_state_argument_wf());
        assert!(cat("s{l:[s{l:[np]},np],h:[s{l:[np]},np]}").is_state_argument_wf());
        // headed list not a prefix of the left list
        assert!(!cat("s{l:[np],h:[s]}").is_state_argument_wf());
        // nested category with its own headed list
        assert!(!cat("s{l:[s{l:[np],h:[np]}]}").is_state_argument_wf());
    }

    #[test]
    fn atom_rejects_notation_characters() {
        assert!(Atom::new("").is_err());
        assert!(Atom::new("n p").is_err());
        assert!(Atom::new("a/b").is_err());
        assert!(Atom::new("a,b").is_err());
        assert!(Atom::new("s'").is_ok());
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_atom() -> impl Strategy<Value = Atom> {
            prop_oneof![Just("s"), Just("np"), Just("n"), Just("pp")]
                .prop_map(|s| Atom::new(s).unwrap())
        }

        fn arb_lexical_category() -> impl Strategy<Value = Category> {
            let leaf = arb_atom().prop_map(Category::atom);
            leaf.prop_recursive(3, 12, 3, |inner| {
                (
                    arb_atom(),
                    prop::collection::vec(inner.clone(), 0..3),
                    prop::collection::vec(inner, 0..3),
                )
                    .prop_map(|(head, left, right)| Category::new(head, left, right, Vec::new()))
            })
        }

        fn arb_state_argument() -> impl Strategy<Value = Category> {
            (
                arb_atom(),
                prop::collection::vec(arb_lexical_category(), 0..3),
                prop::collection::vec(arb_lexical_category(), 0..3),
                0usize..4,
            )
                .prop_map(|(head, left, right, h)| {
                    let headed = left.iter().take(h.min(left.len())).cloned().collect();
                    Category::new(head, left, right, headed)
                })
        }

        proptest! {
            #[test]
            fn flatten_to_curried_round_trip(c in arb_lexical_category()) {
                let e = to_curried(&c).unwrap();
                prop_assert_eq!(flatten(&e), c);
            }

            #[test]
            fn flatten_never_produces_headed_lists(c in arb_lexical_category()) {
                let e = to_curried(&c).unwrap();
                prop_assert!(flatten(&e).is_lexical_wf());
            }

            #[test]
            fn text_format_round_trip(c in arb_state_argument()) {
                prop_assert_eq!(parse_category(&c.render()).unwrap(), c);
            }

            #[test]
            fn slash_text_round_trip(c in arb_lexical_category()) {
                let e = to_curried(&c).unwrap();
                prop_assert_eq!(parse_slash(&e.render()).unwrap(), e);
            }
        }
    }
}
