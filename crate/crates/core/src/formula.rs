//! Propositional formulas over atoms with `&`, `|`, `->` and connexive negation `~`.
//!
//! Concrete syntax (ASCII): `~` binds tightest, then `&`, then `|`, then `->`.
//! `->` associates to the right, `&` and `|` to the left. Atoms match
//! `[a-z][a-zA-Z0-9_]*`; a trailing `'` marks a primed atom, which only the
//! positive target language of the embedding may use.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A propositional variable, possibly from the primed copy of the atom set.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    name: Arc<str>,
    primed: bool,
}

impl Atom {
    /// Creates an unprimed atom. Panics if `name` is not a valid identifier.
    pub fn new(name: &str) -> Self {
        assert!(is_identifier(name), "invalid atom name {name:?}");
        Atom { name: Arc::from(name), primed: false }
    }

    /// Creates the primed twin `p'` of `p`.
    pub fn primed(name: &str) -> Self {
        assert!(is_identifier(name), "invalid atom name {name:?}");
        Atom { name: Arc::from(name), primed: true }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_primed(&self) -> bool {
        self.primed
    }

    /// The same name with the prime flag set.
    pub fn to_primed(&self) -> Self {
        Atom { name: self.name.clone(), primed: true }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if self.primed {
            f.write_str("'")?;
        }
        Ok(())
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Var(Atom),
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Imp(Arc<Formula>, Arc<Formula>),
}

impl Formula {
    pub fn var(name: &str) -> Self {
        Formula::Var(Atom::new(name))
    }

    pub fn primed_var(name: &str) -> Self {
        Formula::Var(Atom::primed(name))
    }

    pub fn neg(a: Formula) -> Self {
        Formula::Neg(Arc::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Arc::new(a), Arc::new(b))
    }

    /// Number of atom and connective nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Var(_) => 1,
            Formula::Neg(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Var(_))
    }

    /// `p` or `~p`.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Var(_) => true,
            Formula::Neg(a) => a.is_atom(),
            _ => false,
        }
    }

    /// Matches `~~a` and returns `a`.
    pub fn double_neg_body(&self) -> Option<&Formula> {
        match self {
            Formula::Neg(a) => match a.as_ref() {
                Formula::Neg(b) => Some(b),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn contains_neg(&self) -> bool {
        match self {
            Formula::Var(_) => false,
            Formula::Neg(_) => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_neg() || b.contains_neg()
            }
        }
    }

    pub fn has_primed_atom(&self) -> bool {
        match self {
            Formula::Var(a) => a.is_primed(),
            Formula::Neg(a) => a.has_primed_atom(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.has_primed_atom() || b.has_primed_atom()
            }
        }
    }

    /// Immediate subformulas, left to right.
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Var(_) => vec![],
            Formula::Neg(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
        }
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Var(a) => {
                out.insert(a.clone());
            }
            other => other.children().into_iter().for_each(|c| c.collect_atoms(out)),
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Neg(_) | Formula::Var(_) => 4,
        }
    }

    /// Rendering with `∼ ∧ ∨ →` and `p′`.
    pub fn to_unicode(&self) -> String {
        let mut s = String::new();
        self.render(&mut s, Glyphs::UNICODE);
        s
    }

    fn render(&self, out: &mut String, g: Glyphs) {
        fn child(out: &mut String, f: &Formula, parens: bool, g: Glyphs) {
            if parens {
                out.push('(');
                f.render(out, g);
                out.push(')');
            } else {
                f.render(out, g);
            }
        }
        match self {
            Formula::Var(a) => {
                out.push_str(a.name());
                if a.is_primed() {
                    out.push_str(g.prime);
                }
            }
            Formula::Neg(a) => {
                out.push_str(g.neg);
                child(out, a, a.precedence() < 4, g);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                let (prec, op) = match self {
                    Formula::And(..) => (3, g.and),
                    Formula::Or(..) => (2, g.or),
                    _ => (1, g.imp),
                };
                let right_assoc = prec == 1;
                let (left_parens, right_parens) = if right_assoc {
                    (a.precedence() <= prec, b.precedence() < prec)
                } else {
                    (a.precedence() < prec, b.precedence() <= prec)
                };
                child(out, a, left_parens, g);
                out.push_str(op);
                child(out, b, right_parens, g);
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Glyphs {
    neg: &'static str,
    and: &'static str,
    or: &'static str,
    imp: &'static str,
    prime: &'static str,
}

impl Glyphs {
    const ASCII: Glyphs = Glyphs { neg: "~", and: " & ", or: " | ", imp: " -> ", prime: "'" };
    const UNICODE: Glyphs = Glyphs { neg: "∼", and: " ∧ ", or: " ∨ ", imp: " → ", prime: "′" };
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.render(&mut s, Glyphs::ASCII);
        f.write_str(&s)
    }
}

impl std::str::FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Minimal-parenthesis ASCII rendering.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte {offset}: expected {}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
}

/// Parses a formula of the connexive language. Primed atoms are rejected.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, false).parse_all()
}

/// Parses a formula that may contain primed atoms (embedding target language).
pub fn parse_target(text: &str) -> Result<Formula, ParseError> {
    Parser::new(text, true).parse_all()
}

pub(crate) fn parse_with(text: &str, allow_primed: bool) -> Result<Formula, ParseError> {
    Parser::new(text, allow_primed).parse_all()
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    allow_primed: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, allow_primed: bool) -> Self {
        Parser { src: text.as_bytes(), pos: 0, allow_primed }
    }

    fn err(&self, expected: &[&'static str]) -> ParseError {
        ParseError { offset: self.pos, expected: expected.to_vec() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(tok.as_bytes()) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn parse_all(mut self) -> Result<Formula, ParseError> {
        let f = self.imp()?;
        self.skip_ws();
        if self.pos != self.src.len() {
            return Err(self.err(&["\"->\"", "\"|\"", "\"&\"", "end of input"]));
        }
        Ok(f)
    }

    fn imp(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.or()?;
        if self.eat("->") {
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.and()?;
        while self.eat("|") {
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.neg()?;
        while self.eat("&") {
            let rhs = self.neg()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> Result<Formula, ParseError> {
        if self.eat("~") {
            return Ok(Formula::neg(self.neg()?));
        }
        if self.eat("(") {
            let f = self.imp()?;
            if !self.eat(")") {
                return Err(self.err(&["\")\""]));
            }
            return Ok(f);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_lowercase() => self.pos += 1,
            _ => return Err(self.err(&["atom", "\"~\"", "\"(\""])),
        }
        while matches!(self.src.get(self.pos), Some(c) if c.is_ascii_alphanumeric() || *c == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.src.get(self.pos) == Some(&b'\'') {
            if !self.allow_primed {
                return Err(self.err(&["unprimed atom"]));
            }
            self.pos += 1;
            return Ok(Formula::primed_var(name));
        }
        Ok(Formula::var(name))
    }
}

/// The finite set of formulas that bounds backward proof search for a goal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaUniverse {
    members: BTreeSet<Formula>,
}

impl FormulaUniverse {
    pub fn members(&self) -> &BTreeSet<Formula> {
        &self.members
    }

    pub fn contains(&self, f: &Formula) -> bool {
        self.members.contains(f)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.members
            .iter()
            .filter_map(|f| match f {
                Formula::Var(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }

    /// Atoms `p` and negated atoms `~p` of the universe.
    pub fn literals(&self) -> Vec<Formula> {
        self.members.iter().filter(|f| f.is_literal()).cloned().collect()
    }
}

/// Closure of a set of seed formulas under immediate subformulas and a single
/// negation of every member not already of the form `~~a`.
pub fn closure_of<'a, I>(seeds: I) -> FormulaUniverse
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut members = BTreeSet::new();
    let mut work: Vec<Formula> = seeds.into_iter().cloned().collect();
    while let Some(f) = work.pop() {
        if members.contains(&f) {
            continue;
        }
        work.extend(f.children().into_iter().cloned());
        if f.double_neg_body().is_none() {
            work.push(Formula::neg(f.clone()));
        }
        members.insert(f);
    }
    FormulaUniverse { members }
}

/// Subformula closure without the negation step (positive languages).
pub fn subformula_closure_of<'a, I>(seeds: I) -> FormulaUniverse
where
    I: IntoIterator<Item = &'a Formula>,
{
    let mut members = BTreeSet::new();
    for s in seeds {
        members.extend(s.subformulas());
    }
    FormulaUniverse { members }
}

/// Closure of every formula of a sequent.
pub fn closure(s: &crate::sequent::Sequent) -> FormulaUniverse {
    closure_of(s.formulas())
}
