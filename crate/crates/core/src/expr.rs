//! Expression parser and evaluator for the surface syntax used by the CLI
//! and the JSON schema.
//!
//! Grammar:
//!
//! ```text
//! EXPR   := TERM (('+' | '-') TERM)*
//! TERM   := FACTOR ('*' FACTOR)*
//! FACTOR := RATIONAL | 'e(' ID ')' | ID | 'inv(' EXPR ')'
//!         | 'd(' EXPR ')' | 'dd(' ID ')' | '(' EXPR ')'
//! ```
//!
//! `inv` only wraps declared-invertible subexpressions. Printing uses the
//! canonical term order, so `parse . print` is the identity on canonical
//! output.

use crate::dd::{DoubleDerivation, Polyvector2};
use crate::element::Element;
use crate::forms::{self, Form};
use crate::presentation::{AlgebraError, LetterKind, Presentation};
use crate::Rat;
use num::{BigInt, One};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("subexpression is not declared invertible")]
    NotDeclaredInvertible,
    #[error("`dd` expects an arrow generator, got `{0}`")]
    NotAnArrow(String),
    #[error("cannot combine values of different kinds")]
    KindMismatch,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Ast {
    Rational(Rat),
    Idempotent(String),
    Generator(String),
    Inv(Box<Ast>),
    D(Box<Ast>),
    Dd(String),
    Mul(Vec<Ast>),
    /// Terms with a leading sign each.
    Sum(Vec<(bool, Ast)>),
}

// ---- lexer ----

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rat),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src: src.as_bytes(), pos: 0, line: 1, col: 1 }
    }

    fn error(&self, msg: impl Into<String>) -> ExprError {
        ExprError::Syntax { line: self.line, col: self.col, msg: msg.into() }
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.src.get(self.pos).copied();
        if let Some(c) = c {
            self.pos += 1;
            if c == b'\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        c
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn tokens(mut self) -> Result<Vec<(Tok, usize, usize)>, ExprError> {
        let mut out = Vec::new();
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    self.bump();
                }
                b'+' => {
                    self.bump();
                    out.push((Tok::Plus, line, col));
                }
                b'-' => {
                    self.bump();
                    out.push((Tok::Minus, line, col));
                }
                b'*' => {
                    self.bump();
                    out.push((Tok::Star, line, col));
                }
                b'(' => {
                    self.bump();
                    out.push((Tok::LParen, line, col));
                }
                b')' => {
                    self.bump();
                    out.push((Tok::RParen, line, col));
                }
                b'0'..=b'9' => {
                    let mut num = String::new();
                    while matches!(self.peek(), Some(b'0'..=b'9')) {
                        num.push(self.bump().unwrap() as char);
                    }
                    let mut den = String::new();
                    if self.peek() == Some(b'/') {
                        self.bump();
                        while matches!(self.peek(), Some(b'0'..=b'9')) {
                            den.push(self.bump().unwrap() as char);
                        }
                        if den.is_empty() {
                            return Err(self.error("expected denominator digits"));
                        }
                    }
                    let n = BigInt::from_str(&num).unwrap();
                    let d = if den.is_empty() {
                        BigInt::one()
                    } else {
                        BigInt::from_str(&den).unwrap()
                    };
                    if num::Zero::is_zero(&d) {
                        return Err(self.error("zero denominator"));
                    }
                    out.push((Tok::Num(Rat::new(n, d)), line, col));
                }
                c if c.is_ascii_alphabetic() || c == b'_' => {
                    let mut id = String::new();
                    while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_')
                    {
                        id.push(self.bump().unwrap() as char);
                    }
                    // A single trailing star belongs to the identifier
                    // (doubled-arrow names) unless the star is immediately
                    // followed by the start of another factor, in which case
                    // it is a multiplication.
                    if self.peek() == Some(b'*') {
                        let after = self.src.get(self.pos + 1).copied();
                        let is_product = matches!(
                            after,
                            Some(c2) if c2.is_ascii_alphanumeric() || c2 == b'_' || c2 == b'('
                        );
                        if !is_product {
                            self.bump();
                            id.push('*');
                        }
                    }
                    out.push((Tok::Ident(id), line, col));
                }
                _ => return Err(self.error(format!("unexpected character `{}`", c as char))),
            }
        }
        Ok(out)
    }
}

// ---- parser ----

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn error_at_index(&self, idx: usize, msg: impl Into<String>) -> ExprError {
        let (line, col) = self
            .toks
            .get(idx)
            .map(|(_, l, c)| (*l, *c))
            .unwrap_or_else(|| {
                self.toks.last().map(|(_, l, c)| (*l, *c + 1)).unwrap_or((1, 1))
            });
        ExprError::Syntax { line, col, msg: msg.into() }
    }

    fn error_at(&self, msg: impl Into<String>) -> ExprError {
        self.error_at_index(self.pos, msg)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.peek().cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_at(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Ast, ExprError> {
        let mut terms = vec![(false, self.term()?)];
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    terms.push((false, self.term()?));
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    terms.push((true, self.term()?));
                }
                _ => break,
            }
        }
        if terms.len() == 1 && !terms[0].0 {
            Ok(terms.pop().unwrap().1)
        } else {
            Ok(Ast::Sum(terms))
        }
    }

    fn term(&mut self) -> Result<Ast, ExprError> {
        let mut factors = vec![self.factor()?];
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            factors.push(self.factor()?);
        }
        if factors.len() == 1 {
            Ok(factors.pop().unwrap())
        } else {
            Ok(Ast::Mul(factors))
        }
    }

    fn factor(&mut self) -> Result<Ast, ExprError> {
        let start = self.pos;
        match self.bump() {
            Some(Tok::Num(r)) => Ok(Ast::Rational(r)),
            Some(Tok::Minus) => {
                // Negative rational literal.
                match self.bump() {
                    Some(Tok::Num(r)) => Ok(Ast::Rational(-r)),
                    _ => Err(self.error_at("expected a number after `-`")),
                }
            }
            Some(Tok::LParen) => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(id)) => {
                let call = self.peek() == Some(&Tok::LParen);
                match (id.as_str(), call) {
                    ("e", true) => {
                        self.pos += 1;
                        let v = match self.bump() {
                            Some(Tok::Ident(v)) => v,
                            Some(Tok::Num(n)) => n.to_string(),
                            _ => return Err(self.error_at("expected a vertex id")),
                        };
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Ast::Idempotent(v))
                    }
                    ("inv", true) => {
                        self.pos += 1;
                        let inner = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Ast::Inv(Box::new(inner)))
                    }
                    ("d", true) => {
                        self.pos += 1;
                        let inner = self.expr()?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Ast::D(Box::new(inner)))
                    }
                    ("dd", true) => {
                        self.pos += 1;
                        let g = match self.bump() {
                            Some(Tok::Ident(g)) => g,
                            _ => return Err(self.error_at("expected a generator id")),
                        };
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Ast::Dd(g))
                    }
                    _ => Ok(Ast::Generator(id)),
                }
            }
            _ => Err(self.error_at_index(start, "expected a factor")),
        }
    }
}

/// Parse an expression; generator names are validated during evaluation.
pub fn parse(text: &str) -> Result<Ast, ExprError> {
    let toks = Lexer::new(text).tokens()?;
    let mut parser = Parser { toks, pos: 0 };
    let ast = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(parser.error_at("trailing input"));
    }
    Ok(ast)
}

/// A parsed value: scalars and algebra elements, forms of any weight, double
/// derivations, or degree-2 polyvectors.
#[derive(Clone, Debug)]
pub enum Value {
    Elt(Element),
    Form(Form),
    Dd(DoubleDerivation),
    Poly(Polyvector2),
}

impl Value {
    pub fn into_element(self) -> Result<Element, ExprError> {
        match self {
            Value::Elt(e) => Ok(e),
            Value::Form(f) if f.weight == 0 => Ok(f.to_element()),
            _ => Err(ExprError::KindMismatch),
        }
    }

    pub fn into_form(self) -> Result<Form, ExprError> {
        match self {
            Value::Elt(e) => Ok(Form::from_element(&e)),
            Value::Form(f) => Ok(f),
            _ => Err(ExprError::KindMismatch),
        }
    }

    pub fn into_poly(self) -> Result<Polyvector2, ExprError> {
        match self {
            Value::Poly(p) => Ok(p),
            _ => Err(ExprError::KindMismatch),
        }
    }
}

fn value_mul(p: &Presentation, a: Value, b: Value) -> Result<Value, ExprError> {
    Ok(match (a, b) {
        (Value::Elt(x), Value::Elt(y)) => Value::Elt(p.mul(&x, &y)?),
        (Value::Elt(x), Value::Form(y)) => {
            Value::Form(forms::mul(p, &Form::from_element(&x), &y)?)
        }
        (Value::Form(x), Value::Elt(y)) => {
            Value::Form(forms::mul(p, &x, &Form::from_element(&y))?)
        }
        (Value::Form(x), Value::Form(y)) => Value::Form(forms::mul(p, &x, &y)?),
        (Value::Elt(x), Value::Dd(y)) => Value::Dd(y.sandwich(p, &x, &p.one())?),
        (Value::Dd(x), Value::Elt(y)) => Value::Dd(x.sandwich(p, &p.one(), &y)?),
        (Value::Dd(x), Value::Dd(y)) => Value::Poly(Polyvector2::from_product(p, &x, &y)?),
        (Value::Elt(x), Value::Poly(y)) => {
            let mut out = Polyvector2::zero();
            for (t, c) in &y.terms {
                for (w, cw) in &x.terms {
                    if let Some(w0) = p.concat(w, &t.words[0]) {
                        out.push(
                            p,
                            [w0, t.words[1].clone(), t.words[2].clone()],
                            t.deltas,
                            c * cw,
                        )?;
                    }
                }
            }
            Value::Poly(out)
        }
        (Value::Poly(x), Value::Elt(y)) => {
            let mut out = Polyvector2::zero();
            for (t, c) in &x.terms {
                for (w, cw) in &y.terms {
                    if let Some(w2) = p.concat(&t.words[2], w) {
                        out.push(
                            p,
                            [t.words[0].clone(), t.words[1].clone(), w2],
                            t.deltas,
                            c * cw,
                        )?;
                    }
                }
            }
            Value::Poly(out)
        }
        _ => return Err(ExprError::KindMismatch),
    })
}

fn value_add(a: Value, b: Value) -> Result<Value, ExprError> {
    Ok(match (a, b) {
        (Value::Elt(x), Value::Elt(y)) => Value::Elt(&x + &y),
        (Value::Form(x), Value::Form(y)) if x.weight == y.weight => Value::Form(x.add(&y)),
        (Value::Dd(x), Value::Dd(y)) => Value::Dd(x.add(&y)),
        (Value::Poly(x), Value::Poly(y)) => Value::Poly(x.add(&y)),
        _ => return Err(ExprError::KindMismatch),
    })
}

fn value_neg(a: Value) -> Value {
    match a {
        Value::Elt(x) => Value::Elt(x.scale(&-Rat::one())),
        Value::Form(x) => Value::Form(x.neg()),
        Value::Dd(x) => Value::Dd(x.scale(&-Rat::one())),
        Value::Poly(x) => Value::Poly(x.scale(&-Rat::one())),
    }
}

/// Evaluate an expression over a presentation.
pub fn eval(p: &Presentation, ast: &Ast) -> Result<Value, ExprError> {
    Ok(match ast {
        Ast::Rational(r) => Value::Elt(p.one().scale(r)),
        Ast::Idempotent(v) => {
            let idx = p
                .vertex_index(v)
                .map_err(|_| ExprError::UnknownVertex(v.clone()))?;
            Value::Elt(p.idempotent(idx))
        }
        Ast::Generator(id) => {
            let l = p
                .letter_index(id)
                .map_err(|_| ExprError::UnknownGenerator(id.clone()))?;
            Value::Elt(p.letter_elt(l))
        }
        Ast::Inv(inner) => {
            let e = eval(p, inner)?.into_element()?;
            let e = p.normalize(&e)?;
            Value::Elt(p.inverse_of(&e).map_err(|_| ExprError::NotDeclaredInvertible)?)
        }
        Ast::D(inner) => match eval(p, inner)? {
            Value::Elt(e) => Value::Form(forms::d_elt(p, &e)?),
            Value::Form(f) => Value::Form(forms::d(p, &f)?),
            _ => return Err(ExprError::KindMismatch),
        },
        Ast::Dd(id) => {
            let l = p
                .letter_index(id)
                .map_err(|_| ExprError::UnknownGenerator(id.clone()))?;
            if p.letter(l).kind != LetterKind::Arrow {
                return Err(ExprError::NotAnArrow(id.clone()));
            }
            Value::Dd(DoubleDerivation::basis(p, l))
        }
        Ast::Mul(factors) => {
            let mut acc = eval(p, &factors[0])?;
            for f in &factors[1..] {
                acc = value_mul(p, acc, eval(p, f)?)?;
            }
            acc
        }
        Ast::Sum(terms) => {
            let mut acc: Option<Value> = None;
            for (neg, t) in terms {
                let mut v = eval(p, t)?;
                if *neg {
                    v = value_neg(v);
                }
                acc = Some(match acc {
                    None => v,
                    Some(a) => value_add(a, v)?,
                });
            }
            acc.unwrap()
        }
    })
}

/// Parse and evaluate in one step.
pub fn parse_eval(p: &Presentation, text: &str) -> Result<Value, ExprError> {
    eval(p, &parse(text)?)
}
