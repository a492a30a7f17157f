//! Parser and canonical printer for coefficient expressions.
//!
//! Grammar (ASCII, `i` reserved for the imaginary unit):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' ('-')? integer)?
//! atom   := integer | 'i' | identifier | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus: `-c0^2` is `-(c0^2)`. Negative
//! exponents are permitted only when the base lowers to a nonzero scalar.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gauss::GaussianRational;
use crate::params::ParamSet;
use crate::poly::ParamPoly;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Integer(BigInt),
    ImaginaryUnit,
    Param(usize),
    Neg(Box<ExprAst>),
    Add(Box<ExprAst>, Box<ExprAst>),
    Sub(Box<ExprAst>, Box<ExprAst>),
    Mul(Box<ExprAst>, Box<ExprAst>),
    Div(Box<ExprAst>, Box<ExprAst>),
    Pow(Box<ExprAst>, i64),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {msg}")]
    Syntax { offset: usize, msg: String },
    #[error("unknown parameter `{name}` at byte {offset}")]
    UnknownParameter { offset: usize, name: String },
    #[error("division by zero in subexpression at byte {offset}")]
    DivisionByZero { offset: usize },
    #[error("negative power of zero in subexpression at byte {offset}")]
    ZeroToNegativePower { offset: usize },
}

struct Parser<'a> {
    text: &'a [u8],
    pos: usize,
    params: &'a ParamSet,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.text.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn err<T>(&self, msg: &str) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            offset: self.pos,
            msg: msg.to_string(),
        })
    }

    fn expr(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                b'+' => {
                    self.bump();
                    lhs = ExprAst::Add(Box::new(lhs), Box::new(self.term()?));
                }
                b'-' => {
                    self.bump();
                    lhs = ExprAst::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<ExprAst, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.peek() {
            match c {
                b'*' => {
                    self.bump();
                    lhs = ExprAst::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                b'/' => {
                    self.bump();
                    lhs = ExprAst::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<ExprAst, ExprError> {
        if self.peek() == Some(b'-') {
            self.bump();
            return Ok(ExprAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let neg = if self.peek() == Some(b'-') {
                self.bump();
                true
            } else {
                false
            };
            let digits = self.integer_literal()?;
            let e: i64 = digits
                .to_string()
                .parse()
                .map_err(|_| ExprError::Syntax {
                    offset: self.pos,
                    msg: "exponent out of range".to_string(),
                })?;
            return Ok(ExprAst::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.bump();
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(ExprAst::Integer(self.integer_literal()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.text.len()
                    && (self.text[self.pos].is_ascii_alphanumeric() || self.text[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
                if name == "i" {
                    return Ok(ExprAst::ImaginaryUnit);
                }
                match self.params.index_of(name) {
                    Some(idx) => Ok(ExprAst::Param(idx)),
                    None => Err(ExprError::UnknownParameter {
                        offset: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(_) => self.err("expected a number, parameter, `i`, or `(`"),
            None => self.err("unexpected end of input"),
        }
    }

    fn integer_literal(&mut self) -> Result<BigInt, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.text.len() && self.text[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        let s = std::str::from_utf8(&self.text[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }
}

/// Parse an expression over the given parameters.
pub fn parse_expr(text: &str, params: &ParamSet) -> Result<ExprAst, ExprError> {
    let mut p = Parser {
        text: text.as_bytes(),
        pos: 0,
        params,
    };
    let ast = p.expr()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(ast)
}

/// Lower an AST to an exact scalar.
pub fn lower(ast: &ExprAst, params: &ParamSet) -> Result<Scalar, ExprError> {
    match ast {
        ExprAst::Integer(n) => Ok(Scalar::from_gauss(
            params,
            GaussianRational::from_rational(num_rational::BigRational::from_integer(n.clone())),
        )),
        ExprAst::ImaginaryUnit => Ok(Scalar::i(params)),
        ExprAst::Param(idx) => Ok(Scalar::param(params, *idx)),
        ExprAst::Neg(inner) => Ok(lower(inner, params)?.neg()),
        ExprAst::Add(a, b) => Ok(lower(a, params)?.add(&lower(b, params)?)),
        ExprAst::Sub(a, b) => Ok(lower(a, params)?.sub(&lower(b, params)?)),
        ExprAst::Mul(a, b) => Ok(lower(a, params)?.mul(&lower(b, params)?)),
        ExprAst::Div(a, b) => {
            let den = lower(b, params)?;
            lower(a, params)?
                .div(&den)
                .map_err(|_| ExprError::DivisionByZero { offset: 0 })
        }
        ExprAst::Pow(base, e) => {
            let b = lower(base, params)?;
            b.pow(*e).map_err(|_| ExprError::ZeroToNegativePower { offset: 0 })
        }
    }
}

/// Parse and lower in one step.
pub fn parse_scalar(text: &str, params: &ParamSet) -> Result<Scalar, ExprError> {
    let ast = parse_expr(text, params)?;
    lower(&ast, params)
}

fn print_coefficient(c: &GaussianRational, has_monomial: bool, out: &mut String) {
    // leading sign is handled by the caller via `format_term`
    let needs_star = has_monomial;
    if c.im.is_zero() {
        if c.re.is_one() && needs_star {
            return; // bare monomial
        }
        out.push_str(&c.re.to_string());
        if needs_star {
            out.push('*');
        }
    } else if c.re.is_zero() {
        if c.im.is_one() {
            out.push('i');
        } else {
            out.push_str(&c.im.to_string());
            out.push_str("*i");
        }
        if needs_star {
            out.push('*');
        }
    } else {
        out.push('(');
        out.push_str(&c.re.to_string());
        if !c.im.is_negative() {
            out.push('+');
        }
        if c.im.is_one() {
            out.push_str("i");
        } else {
            out.push_str(&c.im.to_string());
            out.push_str("*i");
        }
        out.push(')');
        if needs_star {
            out.push('*');
        }
    }
}

/// Deterministic printing of a polynomial: terms in graded-lex descending
/// order, coefficients as `a/b`, `a/b*i`, or `(a/b+c/d*i)`.
pub fn print_poly(p: &ParamPoly) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let params = p.params();
    let mut out = String::new();
    let terms: Vec<_> = p.terms().collect();
    for (idx, (m, c)) in terms.iter().rev().enumerate() {
        // pull a leading minus out of purely-real or purely-imaginary coeffs
        let (coef, negative) = if c.im.is_zero() && c.re.is_negative() {
            (-*c, true)
        } else if c.re.is_zero() && c.im.is_negative() {
            (-*c, true)
        } else {
            ((*c).clone(), false)
        };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push('-');
        } else {
            out.push('+');
        }
        let mut mono = String::new();
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !mono.is_empty() {
                mono.push('*');
            }
            mono.push_str(params.name(v));
            if e > 1 {
                mono.push('^');
                mono.push_str(&e.to_string());
            }
        }
        if mono.is_empty() {
            // constant term: always print the coefficient itself
            let mut buf = String::new();
            print_coefficient(&coef, false, &mut buf);
            out.push_str(&buf);
        } else {
            let mut buf = String::new();
            print_coefficient(&coef, true, &mut buf);
            out.push_str(&buf);
            out.push_str(&mono);
        }
    }
    out
}

/// Deterministic canonical printing of a scalar; the output re-parses to an
/// equal scalar.
pub fn print_scalar(s: &Scalar) -> String {
    let num = print_poly(s.num());
    if s.is_polynomial() {
        return num;
    }
    format!("({})/({})", num, print_poly(s.den()))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_scalar(self))
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_poly(self))
    }
}
