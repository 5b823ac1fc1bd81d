//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' ['-'] digits]
//! atom   := number ['/' number] | symbol | '(' expr ')'
//! ```
//!
//! `/` exists only between numeric literals, giving rational constants like
//! `1/2`; dividing by anything else is a parse error. A negative exponent is
//! legal only when the base is a pure parameter monomial (a product of
//! numbers, `j2`, and `j3`), since only parameter powers are Laurent.

use core::fmt;

use alloc::vec::Vec;

use super::{Expr, Monomial, Symbol};
use crate::powi;

/// Parse failure: byte offset into the input plus the set of tokens that
/// would have been acceptable there.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<&'static str>,
}

impl ParseError {
    fn new(offset: usize, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset,
            expected: expected.to_vec(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: expected ", self.offset)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                f.write_str(if i + 1 == self.expected.len() { " or " } else { ", " })?;
            }
            f.write_str(e)?;
        }
        Ok(())
    }
}

impl core::error::Error for ParseError {}

pub(super) fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(ParseError::new(p.pos, &["'+'", "'-'", "'*'", "end of input"]));
    }
    Ok(e)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while matches!(self.bytes.get(self.pos), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => {
                self.pos += 1;
            }
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                acc = acc.mul(&self.factor()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        let caret = self.pos;
        self.pos += 1;
        self.skip_ws();
        let mut negative = false;
        if self.peek() == Some(b'-') {
            negative = true;
            self.pos += 1;
        }
        let digits_at = self.pos;
        let mut n: i64 = 0;
        let mut any = false;
        while let Some(c) = self.peek() {
            if !c.is_ascii_digit() {
                break;
            }
            any = true;
            n = n.saturating_mul(10).saturating_add((c - b'0') as i64);
            self.pos += 1;
        }
        if !any {
            return Err(ParseError::new(digits_at, &["integer exponent"]));
        }
        if n > i32::MAX as i64 {
            return Err(ParseError::new(digits_at, &["exponent in range"]));
        }
        if !negative {
            return Ok(base.powi(n as u32));
        }
        // Negative exponents are Laurent parameter powers only: the base
        // must normalize to a single monomial in j2/j3 with no symbols.
        let mut it = base.terms();
        let only = match (it.next(), it.next()) {
            (Some((m, c)), None) if m.is_param_only() => Some((m.clone(), c)),
            _ => None,
        };
        let Some((m, c)) = only else {
            return Err(ParseError::new(
                caret,
                &["nonnegative exponent (negative powers need a j2/j3 monomial base)"],
            ));
        };
        let k = n as i32;
        Ok(Expr::from_monomial(
            Monomial::param(m.p2 * -k, m.p3 * -k),
            powi(c, -k),
        ))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                self.skip_ws();
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    Ok(inner)
                } else {
                    Err(ParseError::new(self.pos, &["')'"]))
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.number()?;
                self.skip_ws();
                if self.peek() == Some(b'/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den_at = self.pos;
                    match self.peek() {
                        Some(c) if c.is_ascii_digit() => {
                            let den = self.number()?;
                            if den == 0.0 {
                                return Err(ParseError::new(den_at, &["nonzero denominator"]));
                            }
                            Ok(Expr::constant(num / den))
                        }
                        _ => Err(ParseError::new(den_at, &["number"])),
                    }
                } else {
                    Ok(Expr::constant(num))
                }
            }
            Some(c) if c.is_ascii_lowercase() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit())
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
                match name {
                    "j2" => Ok(Expr::parameter(1, 0)),
                    "j3" => Ok(Expr::parameter(0, 1)),
                    _ => match Symbol::from_name(name) {
                        Some(s) => Ok(Expr::symbol(s)),
                        None => Err(ParseError::new(
                            start,
                            &["symbol (m, gamma, x, y, z, vx, vy, vz, x0, y0, j2, j3)"],
                        )),
                    },
                }
            }
            _ => Err(ParseError::new(self.pos, &["number", "symbol", "'('"])),
        }
    }

    /// Unsigned numeric literal: digits, optional fraction, optional
    /// exponent part.
    fn number(&mut self) -> Result<f64, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.peek() == Some(b'.') {
            self.pos += 1;
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            let mut e = self.pos + 1;
            if matches!(self.bytes.get(e), Some(b'+') | Some(b'-')) {
                e += 1;
            }
            let d0 = e;
            while matches!(self.bytes.get(e), Some(c) if c.is_ascii_digit()) {
                e += 1;
            }
            if e > d0 {
                self.pos = e;
            }
        }
        let lit = core::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii");
        lit.parse()
            .map_err(|_| ParseError::new(start, &["number"]))
    }
}
