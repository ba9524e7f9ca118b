//! Untyped lambda calculus with constants.
//!
//! Semantic values are terms over variables, constants (names ending in a
//! prime mark, e.g. `likes'`), abstraction, and application. The module
//! provides capture-avoiding substitution, normal-order beta normalization
//! with a fuel bound, alpha equivalence via a canonical nameless form, and
//! a text syntax (`\x. body`, application by juxtaposition or `f(x,y)`
//! sugar).
//!
//! Terms are immutable. Fresh names during substitution are derived from
//! the binder being renamed (`y` becomes `y0`, `y1`, ...), so no global
//! counter is involved and operations are deterministic.

use std::collections::BTreeSet;
use std::fmt;

/// Default beta-reduction budget. Terms produced by the parser are
/// well-typed by construction and normalize in far fewer steps; running
/// out of fuel signals an ill-formed lexicon.
pub const DEFAULT_FUEL: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LambdaTerm {
    Var(String),
    Const(String),
    Abs(String, Box<LambdaTerm>),
    App(Box<LambdaTerm>, Box<LambdaTerm>),
}

pub fn var(name: impl Into<String>) -> LambdaTerm {
    LambdaTerm::Var(name.into())
}

pub fn constant(name: impl Into<String>) -> LambdaTerm {
    LambdaTerm::Const(name.into())
}

pub fn abs(name: impl Into<String>, body: LambdaTerm) -> LambdaTerm {
    LambdaTerm::Abs(name.into(), Box::new(body))
}

pub fn app(f: LambdaTerm, a: LambdaTerm) -> LambdaTerm {
    LambdaTerm::App(Box::new(f), Box::new(a))
}

/// Abstraction over a list of variables: `abs_many(["x","y"], b)` is
/// `\x.\y. b`.
pub fn abs_many<I, S>(names: I, body: LambdaTerm) -> LambdaTerm
where
    I: IntoIterator<Item = S>,
    I::IntoIter: DoubleEndedIterator,
    S: Into<String>,
{
    names
        .into_iter()
        .rev()
        .fold(body, |acc, name| abs(name, acc))
}

/// Application to a list of arguments: `app_many(f, [a,b])` is `(f a) b`.
pub fn app_many<I>(f: LambdaTerm, args: I) -> LambdaTerm
where
    I: IntoIterator<Item = LambdaTerm>,
{
    args.into_iter().fold(f, app)
}

impl LambdaTerm {
    /// Free variable names. Constants are not variables and never appear
    /// here.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(t: &LambdaTerm, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match t {
                LambdaTerm::Var(x) => {
                    if !bound.iter().any(|b| b == x) {
                        out.insert(x.clone());
                    }
                }
                LambdaTerm::Const(_) => {}
                LambdaTerm::Abs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
                LambdaTerm::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// All constant names, with multiplicity, in traversal order.
    pub fn constants(&self) -> Vec<String> {
        fn go(t: &LambdaTerm, out: &mut Vec<String>) {
            match t {
                LambdaTerm::Var(_) => {}
                LambdaTerm::Const(c) => out.push(c.clone()),
                LambdaTerm::Abs(_, b) => go(b, out),
                LambdaTerm::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Number of leading abstractions.
    pub fn leading_abstractions(&self) -> usize {
        let mut n = 0;
        let mut t = self;
        while let LambdaTerm::Abs(_, b) = t {
            n += 1;
            t = b;
        }
        n
    }

    /// True when the term contains no beta redex.
    pub fn is_normal(&self) -> bool {
        match self {
            LambdaTerm::Var(_) | LambdaTerm::Const(_) => true,
            LambdaTerm::Abs(_, b) => b.is_normal(),
            LambdaTerm::App(f, a) => {
                !matches!(**f, LambdaTerm::Abs(..)) && f.is_normal() && a.is_normal()
            }
        }
    }
}

/// Capture-avoiding substitution of `replacement` for free occurrences of
/// `name` in `term`. Binders are renamed with numeric suffixes when they
/// would capture a free variable of the replacement.
pub fn substitute(term: &LambdaTerm, name: &str, replacement: &LambdaTerm) -> LambdaTerm {
    match term {
        LambdaTerm::Var(x) => {
            if x == name {
                replacement.clone()
            } else {
                term.clone()
            }
        }
        LambdaTerm::Const(_) => term.clone(),
        LambdaTerm::App(f, a) => app(
            substitute(f, name, replacement),
            substitute(a, name, replacement),
        ),
        LambdaTerm::Abs(x, body) => {
            if x == name {
                term.clone()
            } else if body_mentions(body, name) && replacement_mentions(replacement, x) {
                let avoid: BTreeSet<String> = body
                    .free_vars()
                    .into_iter()
                    .chain(replacement.free_vars())
                    .chain([name.to_string()])
                    .collect();
                let fresh = fresh_name(x, &avoid);
                let renamed = substitute(body, x, &var(fresh.clone()));
                abs(fresh, substitute(&renamed, name, replacement))
            } else {
                abs(x.clone(), substitute(body, name, replacement))
            }
        }
    }
}

fn body_mentions(body: &LambdaTerm, name: &str) -> bool {
    body.free_vars().contains(name)
}

fn replacement_mentions(replacement: &LambdaTerm, binder: &str) -> bool {
    replacement.free_vars().contains(binder)
}

/// First name of the form `base0`, `base1`, ... not in `avoid`.
fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    for i in 0.. {
        let candidate = format!("{base}{i}");
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("beta reduction fuel exhausted after {0} steps")]
    FuelExhausted(usize),
}

/// Normal-order (leftmost-outermost) beta normalization. Returns the
/// normal form and the number of reduction steps used. Errors when more
/// than `fuel` contractions would be needed.
pub fn beta_normalize(
    term: &LambdaTerm,
    fuel: usize,
) -> Result<(LambdaTerm, usize), NormalizeError> {
    let mut remaining = fuel;
    let nf = normalize_inner(term.clone(), fuel, &mut remaining)?;
    Ok((nf, fuel - remaining))
}

fn spend(fuel: usize, remaining: &mut usize) -> Result<(), NormalizeError> {
    if *remaining == 0 {
        Err(NormalizeError::FuelExhausted(fuel))
    } else {
        *remaining -= 1;
        Ok(())
    }
}

fn normalize_inner(
    term: LambdaTerm,
    fuel: usize,
    remaining: &mut usize,
) -> Result<LambdaTerm, NormalizeError> {
    match term {
        LambdaTerm::Var(_) | LambdaTerm::Const(_) => Ok(term),
        LambdaTerm::Abs(x, b) => Ok(abs(x, normalize_inner(*b, fuel, remaining)?)),
        LambdaTerm::App(f, a) => {
            let head = whnf(*f, fuel, remaining)?;
            if let LambdaTerm::Abs(x, body) = head {
                spend(fuel, remaining)?;
                normalize_inner(substitute(&body, &x, &a), fuel, remaining)
            } else {
                Ok(app(
                    normalize_inner(head, fuel, remaining)?,
                    normalize_inner(*a, fuel, remaining)?,
                ))
            }
        }
    }
}

fn whnf(
    term: LambdaTerm,
    fuel: usize,
    remaining: &mut usize,
) -> Result<LambdaTerm, NormalizeError> {
    match term {
        LambdaTerm::App(f, a) => {
            let head = whnf(*f, fuel, remaining)?;
            if let LambdaTerm::Abs(x, body) = head {
                spend(fuel, remaining)?;
                whnf(substitute(&body, &x, &a), fuel, remaining)
            } else {
                Ok(app(head, *a))
            }
        }
        _ => Ok(term),
    }
}

/// Canonical nameless form: bound variables become indices counted from
/// the binder inward. Used for alpha equivalence, hashing, and
/// deduplication.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CanonTerm {
    Bound(usize),
    Free(String),
    Const(String),
    Abs(Box<CanonTerm>),
    App(Box<CanonTerm>, Box<CanonTerm>),
}

pub fn canonical(term: &LambdaTerm) -> CanonTerm {
    fn go(t: &LambdaTerm, binders: &mut Vec<String>) -> CanonTerm {
        match t {
            LambdaTerm::Var(x) => match binders.iter().rev().position(|b| b == x) {
                Some(i) => CanonTerm::Bound(i),
                None => CanonTerm::Free(x.clone()),
            },
            LambdaTerm::Const(c) => CanonTerm::Const(c.clone()),
            LambdaTerm::Abs(x, b) => {
                binders.push(x.clone());
                let body = go(b, binders);
                binders.pop();
                CanonTerm::Abs(Box::new(body))
            }
            LambdaTerm::App(f, a) => {
                CanonTerm::App(Box::new(go(f, binders)), Box::new(go(a, binders)))
            }
        }
    }
    go(term, &mut Vec::new())
}

/// True iff the terms are identical up to consistent renaming of bound
/// variables.
pub fn alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    canonical(a) == canonical(b)
}

/// Exhaustive eta reduction (`\x. f x` to `f` when `x` is not free in
/// `f`). Only used to diagnose near-miss comparisons; readings are never
/// eta-normalized silently.
pub fn eta_reduce(term: &LambdaTerm) -> LambdaTerm {
    match term {
        LambdaTerm::Var(_) | LambdaTerm::Const(_) => term.clone(),
        LambdaTerm::App(f, a) => app(eta_reduce(f), eta_reduce(a)),
        LambdaTerm::Abs(x, body) => {
            let body = eta_reduce(body);
            if let LambdaTerm::App(f, a) = &body {
                if matches!(&**a, LambdaTerm::Var(v) if v == x) && !f.free_vars().contains(x) {
                    return eta_reduce(f);
                }
            }
            abs(x.clone(), body)
        }
    }
}

/// True when the terms differ only by eta conversion (after full eta
/// reduction they are alpha-equal).
pub fn eta_alpha_eq(a: &LambdaTerm, b: &LambdaTerm) -> bool {
    alpha_eq(&eta_reduce(a), &eta_reduce(b))
}

/// Syntax error in the term language, with a byte position.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("at position {position}: {message}")]
pub struct TermParseError {
    pub position: usize,
    pub message: String,
}

impl TermParseError {
    fn new(position: usize, message: impl Into<String>) -> TermParseError {
        TermParseError {
            position,
            message: message.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Lambda,
    Dot,
    LParen,
    RParen,
    Comma,
    Ident(String),
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, TermParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(pos, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '\\' | 'λ' => {
                chars.next();
                out.push((Token::Lambda, pos));
            }
            '.' => {
                chars.next();
                out.push((Token::Dot, pos));
            }
            '(' => {
                chars.next();
                out.push((Token::LParen, pos));
            }
            ')' => {
                chars.next();
                out.push((Token::RParen, pos));
            }
            ',' => {
                chars.next();
                out.push((Token::Comma, pos));
            }
            c if c.is_alphanumeric() || c == '_' => {
                let mut name = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c.is_alphanumeric() || c == '_' {
                        name.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                while let Some(&(_, '\'')) = chars.peek() {
                    name.push('\'');
                    chars.next();
                }
                out.push((Token::Ident(name), pos));
            }
            _ => return Err(TermParseError::new(pos, format!("unexpected character '{c}'"))),
        }
    }
    Ok(out)
}

struct TermParser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end: usize,
}

impl TermParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Token, what: &str) -> Result<(), TermParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            Err(TermParseError::new(self.here(), format!("expected {what}")))
        }
    }

    /// An abstraction body extends maximally to the right; application by
    /// juxtaposition binds tighter.
    fn expr(&mut self) -> Result<LambdaTerm, TermParseError> {
        if self.peek() == Some(&Token::Lambda) {
            self.bump();
            let pos = self.here();
            let name = match self.bump() {
                Some(Token::Ident(n)) => n,
                _ => return Err(TermParseError::new(pos, "expected a variable after lambda")),
            };
            if name.ends_with('\'') {
                return Err(TermParseError::new(pos, "cannot bind a constant name"));
            }
            self.expect(Token::Dot, "'.' after lambda binder")?;
            let body = self.expr()?;
            return Ok(abs(name, body));
        }
        let mut cur = self.primary()?;
        while matches!(self.peek(), Some(Token::Ident(_)) | Some(Token::LParen)) {
            let arg = self.primary()?;
            cur = app(cur, arg);
        }
        Ok(cur)
    }

    fn primary(&mut self) -> Result<LambdaTerm, TermParseError> {
        let pos = self.here();
        let mut base = match self.bump() {
            Some(Token::Ident(name)) => {
                if name.ends_with('\'') {
                    constant(name)
                } else {
                    var(name)
                }
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "')'")?;
                inner
            }
            _ => return Err(TermParseError::new(pos, "expected a term")),
        };
        // `f(a,b)` sugar for ((f a) b)
        while self.peek() == Some(&Token::LParen) {
            self.bump();
            loop {
                let arg = self.expr()?;
                base = app(base, arg);
                match self.bump() {
                    Some(Token::Comma) => continue,
                    Some(Token::RParen) => break,
                    _ => {
                        return Err(TermParseError::new(
                            self.here(),
                            "expected ',' or ')' in argument list",
                        ))
                    }
                }
            }
        }
        Ok(base)
    }
}

/// Parses the term syntax. Names ending in a prime mark are constants,
/// everything else is a variable.
pub fn parse_term(text: &str) -> Result<LambdaTerm, TermParseError> {
    let tokens = tokenize(text)?;
    let mut p = TermParser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let term = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(TermParseError::new(p.here(), "unexpected trailing input"));
    }
    Ok(term)
}

/// Deterministic display form. Bound variables are renamed to `x`, `y`,
/// `z`, `x1`, ... in binder order (skipping any names that occur free),
/// abstraction prints as `λx.body`, and application spines print with the
/// `f(a,b)` sugar.
pub fn render_term(term: &LambdaTerm) -> String {
    let free = term.free_vars();
    let mut supply = NameSupply::new(free);
    let renamed = rename_for_display(term, &mut supply, &mut Vec::new());
    let mut out = String::new();
    write_term(&renamed, &mut out);
    out
}

struct NameSupply {
    taken: BTreeSet<String>,
    next: usize,
}

impl NameSupply {
    fn new(taken: BTreeSet<String>) -> NameSupply {
        NameSupply { taken, next: 0 }
    }

    fn fresh(&mut self) -> String {
        loop {
            let i = self.next;
            self.next += 1;
            let base = ["x", "y", "z"][i % 3];
            let name = if i < 3 {
                base.to_string()
            } else {
                format!("{base}{}", i / 3)
            };
            if !self.taken.contains(&name) {
                return name;
            }
        }
    }
}

fn rename_for_display(
    term: &LambdaTerm,
    supply: &mut NameSupply,
    env: &mut Vec<(String, String)>,
) -> LambdaTerm {
    match term {
        LambdaTerm::Var(x) => {
            let name = env
                .iter()
                .rev()
                .find(|(orig, _)| orig == x)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| x.clone());
            var(name)
        }
        LambdaTerm::Const(_) => term.clone(),
        LambdaTerm::Abs(x, b) => {
            let fresh = supply.fresh();
            env.push((x.clone(), fresh.clone()));
            let body = rename_for_display(b, supply, env);
            env.pop();
            abs(fresh, body)
        }
        LambdaTerm::App(f, a) => app(
            rename_for_display(f, supply, env),
            rename_for_display(a, supply, env),
        ),
    }
}

fn write_term(term: &LambdaTerm, out: &mut String) {
    match term {
        LambdaTerm::Var(x) | LambdaTerm::Const(x) => out.push_str(x),
        LambdaTerm::Abs(x, b) => {
            out.push('λ');
            out.push_str(x);
            out.push('.');
            write_term(b, out);
        }
        LambdaTerm::App(_, _) => {
            let mut head = term;
            let mut args = Vec::new();
            while let LambdaTerm::App(f, a) = head {
                args.push(a.as_ref());
                head = f;
            }
            args.reverse();
            match head {
                LambdaTerm::Abs(..) => {
                    out.push('(');
                    write_term(head, out);
                    out.push(')');
                }
                _ => write_term(head, out),
            }
            out.push('(');
            for (i, arg) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_term(arg, out);
            }
            out.push(')');
        }
    }
}

impl fmt::Display for LambdaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term(self))
    }
}

impl std::str::FromStr for LambdaTerm {
    type Err = TermParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}
