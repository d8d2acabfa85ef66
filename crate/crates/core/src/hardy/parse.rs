//! Parser for the `"a*t^c*log^b + ..."` text form.
//!
//! Grammar (whitespace ignored):
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor ('*' factor)*
//! factor := number | 't' ['^' signed] | 'log' ['^' signed]
//! ```

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::HardyMonomial;
use crate::{Error, Result};

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

fn err(position: usize, message: &str) -> Error {
    Error::Parse {
        position,
        message: message.to_string(),
    }
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        self.skip_ws();
        if self.src[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
            self.pos += 1;
        }
        let mut prev = 0u8;
        while let Some(&c) = self.src.get(self.pos) {
            let ok = c.is_ascii_digit()
                || c == b'.'
                || c == b'e'
                || c == b'E'
                || ((c == b'+' || c == b'-') && (prev == b'e' || prev == b'E'));
            if !ok {
                break;
            }
            prev = c;
            self.pos += 1;
        }
        let text = core::str::from_utf8(&self.src[start..self.pos]).map_err(|_| err(start, "invalid utf-8"))?;
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(start, "expected a number"))
    }

    fn exponent(&mut self) -> Result<f64> {
        if self.eat(b'^') {
            self.number()
        } else {
            Ok(1.0)
        }
    }

    fn term(&mut self, sign: f64) -> Result<(f64, f64, f64)> {
        let (mut coef, mut power, mut logpower) = (sign, 0.0, 0.0);
        loop {
            match self.peek() {
                Some(b't') => {
                    self.pos += 1;
                    power += self.exponent()?;
                }
                Some(b'l') => {
                    if !self.keyword("log") {
                        return Err(err(self.pos, "expected 'log'"));
                    }
                    logpower += self.exponent()?;
                }
                Some(c) if c.is_ascii_digit() || c == b'.' => coef *= self.number()?,
                _ => return Err(err(self.pos, "expected a number, 't' or 'log'")),
            }
            if !self.eat(b'*') {
                return Ok((coef, power, logpower));
            }
        }
    }
}

pub(super) fn parse_monomials(s: &str) -> Result<Vec<HardyMonomial>> {
    let mut p = Parser {
        src: s.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    let mut sign = if p.eat(b'-') {
        -1.0
    } else {
        p.eat(b'+');
        1.0
    };
    loop {
        let at = p.pos;
        let (coef, power, logpower) = p.term(sign)?;
        if coef != 0.0 {
            out.push(HardyMonomial::new(coef, power, logpower).map_err(|e| err(at, &e_msg(e)))?);
        }
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                sign = 1.0;
            }
            Some(b'-') => {
                p.pos += 1;
                sign = -1.0;
            }
            Some(_) => return Err(err(p.pos, "expected '+', '-' or end of input")),
        }
        // a unary sign may follow a binary one: "a + -b"
        if p.eat(b'-') {
            sign = -sign;
        } else {
            p.eat(b'+');
        }
    }
    if out.is_empty() {
        return Err(err(0, "no nonzero monomials"));
    }
    Ok(out)
}

fn e_msg(e: Error) -> String {
    alloc::format!("{e}")
}
