//! Parser for rational-coefficient polynomial and series literals.
//!
//! Grammar (whitespace is ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom (('^' | '**') integer)?
//! atom   := number | name | '(' expr ')'
//! number := digits ('.' digits)?
//! ```
//!
//! Numbers are read as exact rationals, so `3/7*x*q^5` has coefficient
//! exactly `3/7`. Division by a non-constant expression is allowed when the
//! divisor has a nonzero constant term; the quotient is then the truncated
//! power series and is marked inexact by the jet arithmetic.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};
use crate::scalar::{Scalar, Q};

/// Parses `text` into a jet on `space`, with `names[i]` bound to variable `i`.
pub fn parse_jet(text: &str, names: &[&str], space: &Arc<JetSpace>) -> Result<Jet<Q>> {
    if names.len() != space.nvars() {
        return Err(Error::Dimension(format!("{} variable names for a {}-variable jet space", names.len(), space.nvars())));
    }
    let bindings: Vec<(&str, Jet<Q>)> = names.iter().enumerate().map(|(i, &n)| (n, Jet::var(space, i))).collect();
    parse_jet_bound(text, &bindings, space)
}

/// Parses `text` with each name bound to an arbitrary jet on `space`, for
/// example `x ↦ c + x` to expand about the point `c`.
pub fn parse_jet_bound(text: &str, bindings: &[(&str, Jet<Q>)], space: &Arc<JetSpace>) -> Result<Jet<Q>> {
    if bindings.iter().any(|(_, j)| !same_space(j.space(), space)) {
        return Err(Error::ShapeMismatch("bound jets must live on the target space".into()));
    }
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0, bindings, space };
    let j = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(malformed(text, &format!("unexpected {}", p.tokens[p.pos])));
    }
    Ok(j)
}

/// Exact polynomial parse: rejects inputs whose value is not a polynomial
/// that fits in the space's order.
pub fn parse_polynomial(text: &str, names: &[&str], space: &Arc<JetSpace>) -> Result<Jet<Q>> {
    let j = parse_jet(text, names, space)?;
    if !j.is_exact() {
        return Err(Error::InvalidInput(format!(
            "'{text}' is not a polynomial of degree at most {}",
            space.order()
        )));
    }
    Ok(j)
}

fn same_space(a: &JetSpace, b: &JetSpace) -> bool {
    a.nvars() == b.nvars() && a.order() == b.order() && a.weights() == b.weights()
}

fn malformed(text: &str, why: &str) -> Error {
    Error::InvalidInput(format!("malformed expression '{text}': {why}"))
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Q),
    Name(String),
    Op(char),
    Pow,
    Open,
    Close,
}

impl std::fmt::Display for Token {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Token::Num(q) => write!(f, "number {q}"),
            Token::Name(n) => write!(f, "name '{n}'"),
            Token::Op(c) => write!(f, "'{c}'"),
            Token::Pow => write!(f, "'^'"),
            Token::Open => write!(f, "'('"),
            Token::Close => write!(f, "')'"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let lit: String = chars[start..i].iter().collect();
            out.push(Token::Num(parse_decimal(&lit).ok_or_else(|| malformed(text, &format!("bad number '{lit}'")))?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push(Token::Name(chars[start..i].iter().collect()));
        } else if c == '*' && chars.get(i + 1) == Some(&'*') {
            out.push(Token::Pow);
            i += 2;
        } else {
            out.push(match c {
                '+' | '-' | '*' | '/' => Token::Op(c),
                '^' => Token::Pow,
                '(' => Token::Open,
                ')' => Token::Close,
                _ => return Err(malformed(text, &format!("unexpected character '{c}'"))),
            });
            i += 1;
        }
    }
    if out.is_empty() {
        return Err(malformed(text, "empty expression"));
    }
    Ok(out)
}

fn parse_decimal(s: &str) -> Option<Q> {
    match s.split_once('.') {
        None => Q::parse(s),
        Some((a, b)) => {
            if b.contains('.') || (a.is_empty() && b.is_empty()) {
                return None;
            }
            let digits = format!("{a}{b}");
            let den = format!("1{}", "0".repeat(b.len()));
            Q::parse(&format!("{digits}/{den}"))
        }
    }
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    bindings: &'a [(&'a str, Jet<Q>)],
    space: &'a Arc<JetSpace>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn err(&self, why: &str) -> Error {
        Error::InvalidInput(format!("malformed expression: {why}"))
    }

    fn expr(&mut self) -> Result<Jet<Q>> {
        let mut acc = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == '+' { &acc + &rhs } else { &acc - &rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Jet<Q>> {
        let mut acc = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == '*' { &acc * &rhs } else { divide(&acc, &rhs)? };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Jet<Q>> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Jet<Q>> {
        let base = self.atom()?;
        if self.peek() != Some(&Token::Pow) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek().cloned() {
            Some(Token::Num(q)) if q.is_integer() && q.signum() >= 0 => {
                self.pos += 1;
                let k = u32::try_from(q.numer()).map_err(|_| self.err("exponent too large"))?;
                Ok(base.powi(k))
            }
            _ => Err(self.err("exponent must be a nonnegative integer literal")),
        }
    }

    fn atom(&mut self) -> Result<Jet<Q>> {
        let tok = self.peek().cloned().ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        match tok {
            Token::Num(q) => Ok(Jet::constant(self.space, q)),
            Token::Name(n) => match self.bindings.iter().find(|(m, _)| *m == n) {
                Some((_, j)) => Ok(j.clone()),
                None => {
                    let known: Vec<&str> = self.bindings.iter().map(|(m, _)| *m).collect();
                    Err(self.err(&format!("unknown variable '{n}' (expected one of {})", known.join(", "))))
                }
            },
            Token::Open => {
                let e = self.expr()?;
                if self.peek() != Some(&Token::Close) {
                    return Err(self.err("missing ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            t => Err(self.err(&format!("unexpected {t}"))),
        }
    }
}

fn divide(a: &Jet<Q>, b: &Jet<Q>) -> Result<Jet<Q>> {
    if b.is_exact() && b.max_degree().unwrap_or(0) == 0 {
        let c = b.constant_term();
        let r = c.recip().ok_or_else(|| Error::InvalidInput("division by zero".into()))?;
        return Ok(a.scale(&r));
    }
    let inv = b.invert().map_err(|_| Error::InvalidInput("divisor vanishes at the base point".into()))?;
    Ok(a * &inv)
}
