//! A small arithmetic expression reader for exact constants.
//!
//! Atoms: decimal literals, `i`, `s` (√d), `w` (ω = (1+i√d)/2) and `wb` (ω̄).
//! Operators: `+ - * /` and parentheses, usual precedence.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{parse_decimal, CQuad, ExactError, RQuad};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Op(u8),
}

fn err(input: &str, msg: &str) -> ExactError {
    ExactError::Parse { input: input.to_string(), msg: msg.to_string() }
}

fn lex(src: &str) -> Result<Vec<Tok>, ExactError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k];
        if c.is_ascii_whitespace() {
            k += 1;
        } else if c.is_ascii_digit() || c == b'.' {
            let start = k;
            while k < bytes.len() && (bytes[k].is_ascii_digit() || bytes[k] == b'.') {
                k += 1;
            }
            out.push(Tok::Num(src[start..k].to_string()));
        } else if c.is_ascii_alphabetic() {
            let start = k;
            while k < bytes.len() && bytes[k].is_ascii_alphanumeric() {
                k += 1;
            }
            out.push(Tok::Ident(src[start..k].to_string()));
        } else if b"+-*/()".contains(&c) {
            out.push(Tok::Op(c));
            k += 1;
        } else {
            return Err(err(src, "unexpected character"));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
    d: u32,
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<u8> {
        match self.toks.get(self.pos) {
            Some(Tok::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<CQuad, ExactError> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<CQuad, ExactError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if c == b'*' {
                acc * rhs
            } else {
                let inv = rhs.checked_inv().ok_or_else(|| err(self.src, "division by zero"))?;
                acc * inv
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<CQuad, ExactError> {
        match self.peek_op() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<CQuad, ExactError> {
        let d = self.d;
        let tok = self.toks.get(self.pos).cloned().ok_or_else(|| err(self.src, "unexpected end"))?;
        self.pos += 1;
        match tok {
            Tok::Num(s) => Ok(CQuad::from_real(RQuad::from_rational(parse_decimal(&s)?, d))),
            Tok::Ident(name) => match name.as_str() {
                "i" => Ok(CQuad::i(d)),
                "s" => Ok(CQuad::from_real(RQuad::sqrt_d(d))),
                "w" => Ok(CQuad::omega(d)),
                "wb" => Ok(CQuad::omega(d).conj()),
                _ => Err(err(self.src, "unknown symbol")),
            },
            Tok::Op(b'(') => {
                let v = self.expr()?;
                if self.peek_op() != Some(b')') {
                    return Err(err(self.src, "missing ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Tok::Op(_) => Err(err(self.src, "unexpected operator")),
        }
    }
}

/// Evaluate an expression to an exact complex value in `Q(√d, i)`.
pub fn parse_complex(src: &str, d: u32) -> Result<CQuad, ExactError> {
    let mut p = Parser { src, toks: lex(src)?, pos: 0, d };
    let v = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(err(src, "trailing input"));
    }
    Ok(v)
}

/// Evaluate an expression that must be real.
pub fn parse_real(src: &str, d: u32) -> Result<RQuad, ExactError> {
    let v = parse_complex(src, d)?;
    if !v.im.is_zero() {
        return Err(err(src, "expected a real value"));
    }
    Ok(v.re)
}
