//! Growth-function expressions over the single variable `n`.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' atom)?
//! atom   := integer | 'n' | 'max(' expr ',' expr ')' | 'min(' expr ',' expr ')'
//!         | 'log2(' expr ')' | '(' expr ')'
//! ```
//!
//! Subtraction saturates at zero and `log2` is the floor logarithm with
//! `log2(0) = 0`, so every intermediate value stays a natural number.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

/// Largest bit length any intermediate value may reach during evaluation.
pub const MAX_VALUE_BITS: u64 = 1 << 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(BigUint),
    Var,
    Add(Box<Expr>, Box<Expr>),
    /// Saturating subtraction `max(a - b, 0)`.
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Log2(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at byte offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("exponent {0} does not fit in 64 bits")]
    ExponentTooLarge(BigUint),
    #[error("intermediate value would exceed {MAX_VALUE_BITS} bits")]
    ValueTooLarge,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut parser = Parser { src: src.as_bytes(), pos: 0 };
        let expr = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(expr)
    }

    pub fn eval(&self, n: u64) -> Result<BigUint, ExprError> {
        Ok(match self {
            Expr::Num(v) => v.clone(),
            Expr::Var => BigUint::from(n),
            Expr::Add(a, b) => a.eval(n)? + b.eval(n)?,
            Expr::Sub(a, b) => {
                let (a, b) = (a.eval(n)?, b.eval(n)?);
                if a > b {
                    a - b
                } else {
                    BigUint::zero()
                }
            }
            Expr::Mul(a, b) => {
                let (a, b) = (a.eval(n)?, b.eval(n)?);
                if a.bits() + b.bits() > MAX_VALUE_BITS {
                    return Err(ExprError::ValueTooLarge);
                }
                a * b
            }
            Expr::Pow(a, b) => {
                let (base, exp) = (a.eval(n)?, b.eval(n)?);
                let exp_u64 = exp.to_u64().ok_or(ExprError::ExponentTooLarge(exp.clone()))?;
                if base.bits() > 1 && base.bits().saturating_mul(exp_u64) > MAX_VALUE_BITS {
                    return Err(ExprError::ValueTooLarge);
                }
                num_traits::pow::Pow::pow(base, exp_u64)
            }
            Expr::Max(a, b) => a.eval(n)?.max(b.eval(n)?),
            Expr::Min(a, b) => a.eval(n)?.min(b.eval(n)?),
            Expr::Log2(a) => {
                let v = a.eval(n)?;
                BigUint::from(v.bits().saturating_sub(1))
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }
}

/// Canonical printer: minimal parentheses, single spaces around binary
/// operators. `Expr::parse(&e.to_string()) == e` for every tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
            if e.precedence() < min_prec {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "n"),
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                child(f, a, 1)?;
                f.write_str(if matches!(self, Expr::Add(..)) { " + " } else { " - " })?;
                child(f, b, 2)
            }
            Expr::Mul(a, b) => {
                child(f, a, 2)?;
                f.write_str(" * ")?;
                child(f, b, 3)
            }
            Expr::Pow(a, b) => {
                child(f, a, 4)?;
                f.write_str(" ^ ")?;
                child(f, b, 4)
            }
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Log2(a) => write!(f, "log2({a})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError { offset: self.pos, message: message.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, byte: u8) -> Result<(), ParseError> {
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", byte as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.atom()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
                Ok(Expr::Num(digits.parse().expect("decimal digits")))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"n" => Ok(Expr::Var),
                    b"max" | b"min" => {
                        let is_max = &self.src[start..self.pos] == b"max";
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b',')?;
                        let b = self.expr()?;
                        self.expect(b')')?;
                        let (a, b) = (Box::new(a), Box::new(b));
                        Ok(if is_max { Expr::Max(a, b) } else { Expr::Min(a, b) })
                    }
                    b"log2" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Log2(Box::new(a)))
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error("unknown identifier"))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}
