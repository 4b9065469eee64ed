//! Text syntax for exact coefficients: `p/q`, `p/q+r/s*sqrt(d)`, `sqrt(d)`, ...

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::QuadExt;
use crate::error::{Error, Result};

const FIELD: &str = "coefficient";

/// `n` or `n/d`, matching what [`parse_rational`] accepts.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_str(&mut self, word: &str) -> bool {
        if self.s[self.pos..].starts_with(word.as_bytes()) {
            self.pos += word.len();
            true
        } else {
            false
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::parse(FIELD, format!("{what} at offset {} in {:?}", self.pos, self.src))
    }

    fn digits(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("digit string"))
    }

    fn rational(&mut self) -> Result<BigRational> {
        let num = self.digits()?;
        if self.eat(b'/') {
            let neg = self.eat(b'-');
            let den = self.digits()?;
            if den.is_zero() {
                return Err(self.err("zero denominator"));
            }
            let den = if neg { -den } else { den };
            Ok(BigRational::new(num, den))
        } else {
            Ok(BigRational::from_integer(num))
        }
    }

    fn sqrt_factor(&mut self) -> Result<u64> {
        if !self.eat_str("sqrt(") {
            return Err(self.err("expected sqrt("));
        }
        let n = self.digits()?;
        if !self.eat(b')') {
            return Err(self.err("expected )"));
        }
        u64::try_from(n).map_err(|_| self.err("radicand too large"))
    }

    fn term(&mut self) -> Result<QuadExt> {
        if self.peek() == Some(b's') {
            let d = self.sqrt_factor()?;
            let rational_follows = self.s[self.pos..].starts_with(b"*")
                && matches!(self.s.get(self.pos + 1), Some(b'0'..=b'9'));
            let coef = if rational_follows {
                self.pos += 1;
                self.rational()?
            } else {
                BigRational::one()
            };
            return Ok(QuadExt::sqrt_times(coef, d));
        }
        let r = self.rational()?;
        // `*sqrt` belongs to this term; any other `*` is left for the caller
        if self.s[self.pos..].starts_with(b"*sqrt(") {
            self.pos += 1;
            let d = self.sqrt_factor()?;
            Ok(QuadExt::sqrt_times(r, d))
        } else {
            Ok(QuadExt::rational(r))
        }
    }

    /// Signed sum of terms; stops at the first byte that cannot continue it.
    fn quad(&mut self) -> Result<QuadExt> {
        let mut acc = QuadExt::zero();
        let mut first = true;
        loop {
            let neg = if self.eat(b'-') {
                true
            } else if self.eat(b'+') || first {
                false
            } else {
                break;
            };
            let t = if self.eat(b'(') {
                let inner = self.quad()?;
                if !self.eat(b')') {
                    return Err(self.err("expected )"));
                }
                inner
            } else {
                self.term()?
            };
            let t = if neg { -t } else { t };
            acc = acc.try_add(&t)?;
            first = false;
        }
        Ok(acc)
    }
}

fn strip_ws(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// Parses a quadratic-field coefficient. Whitespace is ignored.
pub(crate) fn parse_quad(src: &str) -> Result<QuadExt> {
    let cleaned = strip_ws(src);
    if cleaned.is_empty() {
        return Err(Error::parse(FIELD, "empty coefficient"));
    }
    let mut cur = Cursor {
        s: cleaned.as_bytes(),
        pos: 0,
        src,
    };
    let v = cur.quad()?;
    if cur.pos != cur.s.len() {
        return Err(cur.err("unexpected trailing input"));
    }
    Ok(v)
}

/// Parses `p`, `-p`, `p/q`.
pub fn parse_rational(src: &str) -> Result<BigRational> {
    let v = parse_quad(src)?;
    v.as_rational()
        .cloned()
        .ok_or_else(|| Error::parse(FIELD, format!("expected a rational number, got {src:?}")))
}

/// Reads one coefficient from the front of `s`, returning it and the byte length consumed.
pub(crate) fn parse_quad_prefix(s: &str) -> Result<(QuadExt, usize)> {
    let mut cur = Cursor {
        s: s.as_bytes(),
        pos: 0,
        src: s,
    };
    let v = if cur.eat(b'(') {
        let inner = cur.quad()?;
        if !cur.eat(b')') {
            return Err(cur.err("expected )"));
        }
        inner
    } else {
        cur.term()?
    };
    Ok((v, cur.pos))
}
