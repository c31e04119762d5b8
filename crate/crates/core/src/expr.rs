//! Scalar function expressions: parsing, evaluation, printing.
//!
//! The text grammar is
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := ('-'|'+')* atom ('^' signed-number)?
//! atom   := number | 'inf' | 'x' | fn '(' expr ')' | '(' expr ')'
//! fn     := 'abs'|'sign'|'sin'|'cos'|'exp'|'log'|'min'|'max'
//! full   := expr ('@' '{' number ':' value (',' number ':' value)* '}')?
//! ```
//!
//! `min`/`max` take two comma-separated arguments; override values may be
//! `inf`/`-inf`. Whitespace is insignificant and numbers are decimal
//! literals with optional exponent.
//!
//! Evaluation is pure and produces extended reals (`±inf` allowed, NaN
//! never). The override map is consulted before the expression tree, so
//! the representative value at a finitely many points is explicit.

use std::fmt;

use crate::ext::{self, DomainError};
use thiserror::Error;

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// The free variable `x`.
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    /// Power with a real literal exponent.
    Pow(Box<Expr>, f64),
    Abs(Box<Expr>),
    Sign(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    /// Piecewise selection over sorted cut points: piece `i` is active on
    /// `[cuts[i-1], cuts[i])`, the last piece on `[cuts.last(), +inf)`.
    /// Not part of the text grammar; built programmatically (bridges).
    Piecewise { cuts: Vec<f64>, pieces: Vec<Expr> },
}

impl Expr {
    /// Evaluate the bare tree at `t` (no overrides).
    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var => t,
            Expr::Add(a, b) => ext::xadd(a.eval(t)?, b.eval(t)?, t)?,
            Expr::Sub(a, b) => ext::xsub(a.eval(t)?, b.eval(t)?, t)?,
            Expr::Mul(a, b) => ext::xmul(a.eval(t)?, b.eval(t)?),
            Expr::Div(a, b) => ext::xdiv(a.eval(t)?, b.eval(t)?, t)?,
            Expr::Neg(a) => -a.eval(t)?,
            Expr::Pow(a, e) => ext::xpow(a.eval(t)?, *e, t)?,
            Expr::Abs(a) => a.eval(t)?.abs(),
            Expr::Sign(a) => ext::xsign(a.eval(t)?),
            Expr::Sin(a) => ext::xsin(a.eval(t)?, t)?,
            Expr::Cos(a) => ext::xcos(a.eval(t)?, t)?,
            Expr::Exp(a) => a.eval(t)?.exp(),
            Expr::Log(a) => ext::xlog(a.eval(t)?, t)?,
            Expr::Min(a, b) => a.eval(t)?.min(b.eval(t)?),
            Expr::Max(a, b) => a.eval(t)?.max(b.eval(t)?),
            Expr::Piecewise { cuts, pieces } => {
                let idx = cuts.partition_point(|&c| c <= t);
                pieces[idx].eval(t)?
            }
        };
        debug_assert!(!v.is_nan(), "NaN escaped evaluation at t={t}");
        Ok(v)
    }
}

// Precedence levels for printing: 1 additive, 2 multiplicative, 3 unary/power.
// A negative constant prints with a leading minus, so it carries the
// precedence of a negation (its parse would otherwise rebind under `^`).
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Const(c) if c.is_sign_negative() => 3,
        // the grammar allows one `^` per factor, so a power cannot be the
        // bare base of another power
        Expr::Pow(..) => 3,
        _ => 4,
    }
}

fn fmt_child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                if *c == f64::INFINITY {
                    write!(f, "inf")
                } else if *c == f64::NEG_INFINITY {
                    write!(f, "-inf")
                } else {
                    write!(f, "{c}")
                }
            }
            Expr::Var => write!(f, "x"),
            Expr::Add(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " + ")?;
                fmt_child(f, b, 2)
            }
            Expr::Sub(a, b) => {
                fmt_child(f, a, 1)?;
                write!(f, " - ")?;
                fmt_child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "*")?;
                fmt_child(f, b, 3)
            }
            Expr::Div(a, b) => {
                fmt_child(f, a, 2)?;
                write!(f, "/")?;
                fmt_child(f, b, 3)
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                fmt_child(f, a, 4)
            }
            Expr::Pow(a, e) => {
                fmt_child(f, a, 4)?;
                write!(f, "^{e}")
            }
            Expr::Abs(a) => write!(f, "abs({a})"),
            Expr::Sign(a) => write!(f, "sign({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Piecewise { cuts, pieces } => {
                write!(f, "piecewise[")?;
                for (i, p) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, " | x >= {}: ", cuts[i - 1])?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A parsed scalar function: expression tree plus explicit point-value
/// overrides. Evaluation at an override point returns the override value,
/// bypassing the expression.
#[derive(Debug, Clone, PartialEq)]
pub struct FuncExpr {
    pub root: Expr,
    /// Sorted by point, points pairwise distinct. Values are extended reals.
    overrides: Vec<(f64, f64)>,
}

impl FuncExpr {
    pub fn new(root: Expr) -> Self {
        FuncExpr {
            root,
            overrides: Vec::new(),
        }
    }

    /// Builds from a tree and unsorted override pairs; later duplicates of
    /// the same point are rejected by the parser, here last-one-wins.
    pub fn with_overrides(root: Expr, mut overrides: Vec<(f64, f64)>) -> Self {
        overrides.sort_by(|a, b| a.0.total_cmp(&b.0));
        overrides.dedup_by(|a, b| a.0 == b.0);
        FuncExpr { root, overrides }
    }

    pub fn constant(c: f64) -> Self {
        FuncExpr::new(Expr::Const(c))
    }

    pub fn overrides(&self) -> &[(f64, f64)] {
        &self.overrides
    }

    pub fn override_at(&self, t: f64) -> Option<f64> {
        self.overrides
            .binary_search_by(|probe| probe.0.total_cmp(&t))
            .ok()
            .map(|i| self.overrides[i].1)
    }

    /// Evaluate at `t`: the override map is consulted first.
    pub fn eval(&self, t: f64) -> Result<f64, DomainError> {
        if let Some(v) = self.override_at(t) {
            return Ok(v);
        }
        self.root.eval(t)
    }

    /// The pointwise product `self * other`, with overrides merged: at any
    /// point either factor overrides, the product value is the product of
    /// the factors' values there (under `0 * inf = 0`).
    pub fn product(&self, other: &FuncExpr) -> Result<FuncExpr, DomainError> {
        let mut pts: Vec<f64> = self
            .overrides
            .iter()
            .chain(other.overrides.iter())
            .map(|&(p, _)| p)
            .collect();
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        let mut merged = Vec::with_capacity(pts.len());
        for p in pts {
            merged.push((p, ext::xmul(self.eval(p)?, other.eval(p)?)));
        }
        Ok(FuncExpr {
            root: Expr::Mul(Box::new(self.root.clone()), Box::new(other.root.clone())),
            overrides: merged,
        })
    }
}

impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        if !self.overrides.is_empty() {
            write!(f, " @ {{")?;
            for (i, (p, v)) in self.overrides.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                if v.is_infinite() {
                    write!(f, "{p}: {}", if *v > 0.0 { "inf" } else { "-inf" })?;
                } else {
                    write!(f, "{p}: {v}")?;
                }
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    At,
    LBrace,
    RBrace,
    Colon,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\r' | '\n' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '@' => {
                toks.push((i, Tok::At));
                i += 1;
            }
            '{' => {
                toks.push((i, Tok::LBrace));
                i += 1;
            }
            '}' => {
                toks.push((i, Tok::RBrace));
                i += 1;
            }
            ':' => {
                toks.push((i, Tok::Colon));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit.parse().map_err(|_| ParseError::Syntax {
                    offset: start,
                    expected: "number".into(),
                })?;
                toks.push((start, Tok::Num(v)));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: format!("token, found `{c}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end_offset: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(o, _)| *o)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError::Syntax {
                offset: self.offset(),
                expected: format!("\"{what}\""),
            })
        }
    }

    fn parse_expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Add(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    lhs = Expr::Div(Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Expr, ParseError> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    negate = !negate;
                    self.pos += 1;
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let mut e = self.parse_atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let expo = self.parse_signed_number()?;
            e = Expr::Pow(Box::new(e), expo);
        }
        Ok(if negate { Expr::Neg(Box::new(e)) } else { e })
    }

    fn parse_signed_number(&mut self) -> Result<f64, ParseError> {
        let mut sign = 1.0;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    sign = -sign;
                    self.pos += 1;
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        match self.bump() {
            Some(Tok::Num(v)) => Ok(sign * v),
            Some(Tok::Ident(name)) if name == "inf" => Ok(sign * f64::INFINITY),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(ParseError::Syntax {
                    offset: self.offset(),
                    expected: "number".into(),
                })
            }
        }
    }

    fn parse_atom(&mut self) -> Result<Expr, ParseError> {
        let offset = self.offset();
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Const(v)),
            Some(Tok::LParen) => {
                let e = self.parse_expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => match name.as_str() {
                "x" => Ok(Expr::Var),
                "inf" => Ok(Expr::Const(f64::INFINITY)),
                "abs" | "sign" | "sin" | "cos" | "exp" | "log" => {
                    self.expect(Tok::LParen, "(")?;
                    let arg = Box::new(self.parse_expr()?);
                    self.expect(Tok::RParen, ")")?;
                    Ok(match name.as_str() {
                        "abs" => Expr::Abs(arg),
                        "sign" => Expr::Sign(arg),
                        "sin" => Expr::Sin(arg),
                        "cos" => Expr::Cos(arg),
                        "exp" => Expr::Exp(arg),
                        _ => Expr::Log(arg),
                    })
                }
                "min" | "max" => {
                    self.expect(Tok::LParen, "(")?;
                    let a = Box::new(self.parse_expr()?);
                    self.expect(Tok::Comma, ",")?;
                    let b = Box::new(self.parse_expr()?);
                    self.expect(Tok::RParen, ")")?;
                    Ok(if name == "min" {
                        Expr::Min(a, b)
                    } else {
                        Expr::Max(a, b)
                    })
                }
                _ => Err(ParseError::UnknownIdentifier { offset, name }),
            },
            _ => {
                self.pos = self.pos.saturating_sub(1);
                Err(ParseError::Syntax {
                    offset: self.offset(),
                    expected: "expression".into(),
                })
            }
        }
    }

    fn parse_override_value(&mut self) -> Result<f64, ParseError> {
        self.parse_signed_number()
    }

    fn parse_overrides(&mut self) -> Result<Vec<(f64, f64)>, ParseError> {
        self.expect(Tok::LBrace, "{")?;
        let mut out: Vec<(f64, f64)> = Vec::new();
        loop {
            let p_off = self.offset();
            let p = self.parse_signed_number()?;
            self.expect(Tok::Colon, ":")?;
            let v = self.parse_override_value()?;
            if out.iter().any(|&(q, _)| q == p) {
                return Err(ParseError::Syntax {
                    offset: p_off,
                    expected: "distinct override point".into(),
                });
            }
            out.push((p, v));
            match self.peek() {
                Some(Tok::Comma) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        self.expect(Tok::RBrace, "}")?;
        Ok(out)
    }
}

/// Parse expression text, including the optional `@ {p: v, ...}` override
/// clause.
pub fn parse_expr(text: &str) -> Result<FuncExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end_offset: text.len(),
    };
    let root = p.parse_expr()?;
    let overrides = if p.peek() == Some(&Tok::At) {
        p.pos += 1;
        p.parse_overrides()?
    } else {
        Vec::new()
    };
    if p.pos != toks.len() {
        return Err(ParseError::Syntax {
            offset: p.offset(),
            expected: "end of input".into(),
        });
    }
    Ok(FuncExpr::with_overrides(root, overrides))
}
