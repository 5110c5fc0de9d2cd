//! Scalar literal grammar:
//!
//! ```text
//! scalar   := sign? body
//! body     := integer | integer "/" integer | decimal | "sqrt(" integer ")"
//!           | "golden" | "e" | "pi"
//! decimal  := digits? "." digits? exponent? | digits exponent
//! exponent := ("e" | "E") sign? digits
//! ```
//!
//! Rational forms are exact. Named constants and non-square roots become
//! enclosures at the requested precision.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;

use super::guarded::Guarded;
use super::scalar::Scalar;
use crate::error::{Error, Result};

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
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

    fn digits(&mut self) -> &'a [u8] {
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.pos += 1;
        }
        &self.s[start..self.pos]
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn rest_is(&self, word: &str) -> bool {
        &self.s[self.pos..] == word.as_bytes()
    }
}

fn to_bigint(d: &[u8]) -> BigInt {
    if d.is_empty() {
        return BigInt::zero();
    }
    BigInt::parse_bytes(d, 10).expect("ascii digits")
}

pub fn parse_scalar(text: &str, bits: u32) -> Result<Scalar> {
    let trimmed = text.trim();
    let offset = text.len() - text.trim_start().len();
    let mut c = Cursor {
        s: trimmed.as_bytes(),
        pos: 0,
    };
    let result = parse_inner(&mut c, bits);
    result.map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos: pos + offset,
            msg,
        },
        other => other,
    })
}

fn parse_inner(c: &mut Cursor<'_>, bits: u32) -> Result<Scalar> {
    if c.s.is_empty() {
        return Err(c.err("empty input"));
    }
    let negative = if c.eat(b'-') {
        true
    } else {
        c.eat(b'+');
        false
    };
    let value = parse_body(c, bits)?;
    if c.pos != c.s.len() {
        return Err(c.err("unexpected trailing input"));
    }
    Ok(if negative { -value } else { value })
}

fn parse_body(c: &mut Cursor<'_>, bits: u32) -> Result<Scalar> {
    match c.peek() {
        Some(b'0'..=b'9') | Some(b'.') => parse_number(c),
        Some(b'a'..=b'z') => parse_named(c, bits),
        Some(_) => Err(c.err("expected a number or a named constant")),
        None => Err(c.err("expected a value after the sign")),
    }
}

fn parse_number(c: &mut Cursor<'_>) -> Result<Scalar> {
    let int_part = c.digits();
    if c.eat(b'/') {
        if int_part.is_empty() {
            return Err(c.err("missing numerator"));
        }
        let den_pos = c.pos;
        let den = c.digits();
        if den.is_empty() {
            return Err(c.err("missing denominator"));
        }
        let den = to_bigint(den);
        if den.is_zero() {
            let _ = den_pos;
            return Err(Error::ZeroDenominator);
        }
        return Ok(Scalar::Exact(BigRational::new(to_bigint(int_part), den)));
    }
    let mut frac: &[u8] = &[];
    if c.eat(b'.') {
        frac = c.digits();
        if int_part.is_empty() && frac.is_empty() {
            return Err(c.err("expected digits around the decimal point"));
        }
    } else if int_part.is_empty() {
        return Err(c.err("expected digits"));
    }
    let mut exp: i64 = 0;
    if matches!(c.peek(), Some(b'e') | Some(b'E')) {
        c.pos += 1;
        let neg = if c.eat(b'-') {
            true
        } else {
            c.eat(b'+');
            false
        };
        let d = c.digits();
        if d.is_empty() {
            return Err(c.err("expected exponent digits"));
        }
        let s = std::str::from_utf8(d).expect("ascii digits");
        let v: i64 = s
            .parse()
            .ok()
            .filter(|v: &i64| *v <= 100_000)
            .ok_or_else(|| c.err("exponent too large"))?;
        exp = if neg { -v } else { v };
    }
    let mut all = int_part.to_vec();
    all.extend_from_slice(frac);
    let mantissa = to_bigint(&all);
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10u8);
    let r = if scale >= 0 {
        BigRational::from_integer(mantissa * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(mantissa, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(Scalar::Exact(r))
}

fn parse_named(c: &mut Cursor<'_>, bits: u32) -> Result<Scalar> {
    if c.rest_is("golden") {
        c.pos = c.s.len();
        return Ok(Scalar::Guarded(Guarded::golden(bits)));
    }
    if c.rest_is("pi") {
        c.pos = c.s.len();
        return Ok(Scalar::Guarded(Guarded::pi(bits)));
    }
    if c.rest_is("e") {
        c.pos = c.s.len();
        return Ok(Scalar::Guarded(Guarded::e(bits)));
    }
    if c.s[c.pos..].starts_with(b"sqrt(") {
        c.pos += 5;
        let d = c.digits();
        if d.is_empty() {
            return Err(c.err("expected a nonnegative integer inside sqrt()"));
        }
        let k = BigUint::parse_bytes(d, 10).expect("ascii digits");
        if !c.eat(b')') {
            return Err(c.err("expected ')'"));
        }
        let root = k.sqrt();
        if &root * &root == k {
            return Ok(Scalar::Exact(BigRational::from_integer(BigInt::from(root))));
        }
        return Ok(Scalar::Guarded(Guarded::sqrt_int(&k, bits)));
    }
    Err(c.err("unknown constant (expected golden, e, pi or sqrt(k))"))
}

/// Reads a decimal or rational literal as an exact rational. Named constants
/// are rejected.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    match parse_scalar(text, 64)? {
        Scalar::Exact(r) => Ok(r),
        Scalar::Guarded(_) => Err(Error::Invalid(format!(
            "{text:?} is not a rational literal"
        ))),
    }
}

/// Shortest decimal that round-trips `x`, read back exactly.
pub fn rational_from_f64_decimal(x: f64) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Invalid(format!("non-finite value {x}")));
    }
    parse_rational(&format!("{x:e}"))
}
