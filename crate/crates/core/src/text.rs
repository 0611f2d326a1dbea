//! Position-tracking cursor shared by the element grammars.

use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    pub fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(alloc::format!("expected {c:?}"))
        }
    }

    /// Consumes `kw` if it is next (no word-boundary logic; callers pick
    /// unambiguous keywords).
    pub fn eat_str(&mut self, kw: &str) -> bool {
        if self.src[self.pos..].starts_with(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos == self.src.len()
    }

    pub fn expect_end(&mut self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("trailing input")
        }
    }

    /// An identifier `[A-Za-z_][A-Za-z0-9_]*`.
    pub fn ident(&mut self) -> Result<String> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return self.err("expected identifier"),
        }
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                self.bump();
            } else {
                break;
            }
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn digits(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return self.err("expected digits");
        }
        Ok(&self.src[start..self.pos])
    }

    /// A signed 64-bit integer.
    pub fn int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        let ds = self.digits()?;
        let mag: i64 = match ds.parse() {
            Ok(v) => v,
            Err(_) => return self.err("integer out of range"),
        };
        Ok(if neg { -mag } else { mag })
    }

    /// An unsigned integer for stage tags and similar small counters.
    pub fn uint(&mut self) -> Result<usize> {
        let ds = self.digits()?;
        match ds.parse() {
            Ok(v) => Ok(v),
            Err(_) => self.err("integer out of range"),
        }
    }

    /// A rational `p` or `p/q` with optional leading sign.
    pub fn rational(&mut self) -> Result<Rational> {
        let neg = self.eat('-');
        let numer = self.digits()?;
        let numer: BigInt = numer.parse().expect("digits parse as BigInt");
        let denom: BigInt = if self.eat('/') {
            let d: BigInt = self.digits()?.parse().expect("digits parse as BigInt");
            if d.is_zero() {
                return self.err("zero denominator");
            }
            d
        } else {
            BigInt::from(1)
        };
        let q = Rational::new(numer, denom);
        Ok(if neg { -q } else { q })
    }
}
