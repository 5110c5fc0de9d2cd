//! Fixed-point interval arithmetic.
//!
//! A [`Guarded`] value is a closed interval `[lo, hi] * 2^-bits` with integer
//! endpoints. Every operation rounds the lower endpoint down and the upper
//! endpoint up, so the true value always stays inside.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `floor(x / 2^k)`.
pub(crate) fn floor_shr(x: &BigInt, k: u32) -> BigInt {
    // num-bigint's arithmetic shift rounds toward negative infinity.
    x >> k
}

/// `ceil(x / 2^k)`.
pub(crate) fn ceil_shr(x: &BigInt, k: u32) -> BigInt {
    -((-x) >> k)
}

fn pow2(k: u32) -> BigInt {
    BigInt::one() << k
}

#[derive(Clone)]
pub struct Guarded {
    lo: BigInt,
    hi: BigInt,
    bits: u32,
    tag: Option<Arc<str>>,
}

impl Guarded {
    /// Builds `[lo, hi] * 2^-bits`. Panics if `lo > hi`.
    pub fn from_units(lo: BigInt, hi: BigInt, bits: u32) -> Self {
        assert!(lo <= hi, "inverted interval");
        Guarded {
            lo,
            hi,
            bits,
            tag: None,
        }
    }

    pub fn with_tag(mut self, tag: &str) -> Self {
        self.tag = Some(Arc::from(tag));
        self
    }

    pub fn tag(&self) -> Option<&str> {
        self.tag.as_deref()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn lo_units(&self) -> &BigInt {
        &self.lo
    }

    pub fn hi_units(&self) -> &BigInt {
        &self.hi
    }

    /// Tightest enclosure of a rational at `bits` fractional bits.
    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let scaled = r.numer() << bits;
        let (q, rem) = scaled.div_mod_floor(r.denom());
        let hi = if rem.is_zero() { q.clone() } else { &q + 1 };
        Guarded::from_units(q, hi, bits)
    }

    pub fn from_integer(k: &BigInt, bits: u32) -> Self {
        let u = k << bits;
        Guarded::from_units(u.clone(), u, bits)
    }

    pub fn lo(&self) -> BigRational {
        BigRational::new(self.lo.clone(), pow2(self.bits))
    }

    pub fn hi(&self) -> BigRational {
        BigRational::new(self.hi.clone(), pow2(self.bits))
    }

    pub fn center(&self) -> BigRational {
        BigRational::new(&self.lo + &self.hi, pow2(self.bits + 1))
    }

    /// Half-width: an upper bound on `|value - center|`.
    pub fn radius(&self) -> BigRational {
        BigRational::new(&self.hi - &self.lo, pow2(self.bits + 1))
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn to_f64(&self) -> f64 {
        units_to_f64(&(&self.lo + &self.hi), self.bits + 1)
    }

    /// Re-expresses the interval with more fractional bits (exact).
    pub fn widen_bits(&self, bits: u32) -> Self {
        if bits <= self.bits {
            return self.clone();
        }
        let s = bits - self.bits;
        Guarded {
            lo: &self.lo << s,
            hi: &self.hi << s,
            bits,
            tag: self.tag.clone(),
        }
    }

    /// Outward rounding to fewer fractional bits.
    pub fn narrow_bits(&self, bits: u32) -> Self {
        if bits >= self.bits {
            return self.widen_bits(bits);
        }
        let s = self.bits - bits;
        Guarded::from_units(floor_shr(&self.lo, s), ceil_shr(&self.hi, s), bits)
    }

    fn aligned(a: &Guarded, b: &Guarded) -> (Guarded, Guarded) {
        let bits = a.bits.max(b.bits);
        (a.widen_bits(bits), b.widen_bits(bits))
    }

    pub fn add(&self, other: &Guarded) -> Guarded {
        let (a, b) = Self::aligned(self, other);
        Guarded::from_units(&a.lo + &b.lo, &a.hi + &b.hi, a.bits)
    }

    pub fn sub(&self, other: &Guarded) -> Guarded {
        let (a, b) = Self::aligned(self, other);
        Guarded::from_units(&a.lo - &b.hi, &a.hi - &b.lo, a.bits)
    }

    pub fn neg(&self) -> Guarded {
        Guarded::from_units(-&self.hi, -&self.lo, self.bits)
    }

    /// Exact scaling by an integer.
    pub fn mul_int(&self, k: &BigInt) -> Guarded {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if k.is_negative() {
            Guarded::from_units(b, a, self.bits)
        } else {
            Guarded::from_units(a, b, self.bits)
        }
    }

    pub fn mul_i64(&self, k: i64) -> Guarded {
        self.mul_int(&BigInt::from(k))
    }

    /// Adds an integer exactly.
    pub fn add_int(&self, k: &BigInt) -> Guarded {
        let u = k << self.bits;
        Guarded::from_units(&self.lo + &u, &self.hi + &u, self.bits)
    }

    pub fn mul(&self, other: &Guarded) -> Guarded {
        let (a, b) = Self::aligned(self, other);
        let products = [&a.lo * &b.lo, &a.lo * &b.hi, &a.hi * &b.lo, &a.hi * &b.hi];
        let min = products.iter().min().unwrap();
        let max = products.iter().max().unwrap();
        Guarded::from_units(floor_shr(min, a.bits), ceil_shr(max, a.bits), a.bits)
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Enclosure of `1/x`; `None` if the interval touches zero.
    pub fn recip(&self) -> Option<Guarded> {
        if self.contains_zero() {
            return None;
        }
        let num = pow2(2 * self.bits);
        // 1/x is decreasing on each half-line, so the endpoints swap.
        let lo = num.div_floor(&self.hi);
        let hi = {
            let (q, r) = num.div_mod_floor(&self.lo);
            if r.is_zero() {
                q
            } else {
                q + 1
            }
        };
        Some(Guarded::from_units(lo, hi, self.bits))
    }

    pub fn div(&self, other: &Guarded) -> Option<Guarded> {
        let (a, b) = Self::aligned(self, other);
        b.recip().map(|r| a.mul(&r))
    }

    pub fn abs(&self) -> Guarded {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            self.neg()
        } else {
            let top = (-&self.lo).max(self.hi.clone());
            Guarded::from_units(BigInt::zero(), top, self.bits)
        }
    }

    /// Enclosure of `max(x, y)` without deciding which operand is larger.
    pub fn max_enclosure(&self, other: &Guarded) -> Guarded {
        let (a, b) = Self::aligned(self, other);
        Guarded::from_units(a.lo.max(b.lo), a.hi.max(b.hi), a.bits)
    }

    pub fn min_enclosure(&self, other: &Guarded) -> Guarded {
        let (a, b) = Self::aligned(self, other);
        Guarded::from_units(a.lo.min(b.lo), a.hi.min(b.hi), a.bits)
    }

    /// Enclosure of the distance to the nearest integer.
    ///
    /// `x -> ||x||` is 1-Lipschitz and piecewise linear, so the exact range
    /// over `[lo, hi]` is obtained from the endpoints plus any integers or
    /// half-integers inside.
    pub fn dist_to_int(&self) -> Guarded {
        let one = pow2(self.bits);
        let half = pow2(self.bits) >> 1u32;
        let d = |x: &BigInt| -> BigInt {
            let r = x.mod_floor(&one);
            let s = &one - &r;
            r.min(s)
        };
        if &self.hi - &self.lo >= one {
            return Guarded::from_units(BigInt::zero(), half, self.bits);
        }
        let dl = d(&self.lo);
        let dh = d(&self.hi);
        let first_int = self.lo.div_ceil(&one) * &one;
        let has_int = first_int <= self.hi;
        let shifted = &self.lo - &half;
        let first_half = shifted.div_ceil(&one) * &one + &half;
        let has_half = first_half <= self.hi;
        let lo = if has_int { BigInt::zero() } else { dl.clone().min(dh.clone()) };
        let hi = if has_half { half } else { dl.max(dh) };
        Guarded::from_units(lo, hi, self.bits)
    }

    /// Nearest integer to the center (round half up). Ambiguous when the
    /// interval straddles a half-integer; callers that care check the
    /// remainder instead.
    pub fn round_center(&self) -> BigInt {
        let sum = &self.lo + &self.hi;
        let half = pow2(self.bits);
        floor_shr(&(sum + half), self.bits + 1)
    }

    /// Certified ordering, `None` when the enclosures overlap.
    pub fn certified_cmp(&self, other: &Guarded) -> Option<Ordering> {
        let (a, b) = Self::aligned(self, other);
        if a.hi < b.lo {
            Some(Ordering::Less)
        } else if a.lo > b.hi {
            Some(Ordering::Greater)
        } else if a.is_point() && b.is_point() && a.lo == b.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Compares `a.hi` against `b.lo` at a common scale without copying
    /// when the scales already agree.
    fn cmp_hi_lo(a: &Guarded, b: &Guarded) -> Ordering {
        match a.bits.cmp(&b.bits) {
            Ordering::Equal => a.hi.cmp(&b.lo),
            Ordering::Less => (&a.hi << (b.bits - a.bits)).cmp(&b.lo),
            Ordering::Greater => a.hi.cmp(&(&b.lo << (a.bits - b.bits))),
        }
    }

    /// Every point of `self` is below every point of `other`.
    pub fn certainly_lt(&self, other: &Guarded) -> bool {
        Self::cmp_hi_lo(self, other) == Ordering::Less
    }

    /// Every point of `self` is at least every point of `other`.
    pub fn certainly_ge(&self, other: &Guarded) -> bool {
        Self::cmp_hi_lo(other, self) != Ordering::Greater
    }

    /// Same endpoints after alignment. For values produced by the same chain
    /// of exact integer operations this indicates an exact tie.
    pub fn same_enclosure(&self, other: &Guarded) -> bool {
        let (a, b) = Self::aligned(self, other);
        a.lo == b.lo && a.hi == b.hi
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        self.lo() <= *r && *r <= self.hi()
    }

    /// `other` is contained in `self`.
    pub fn contains(&self, other: &Guarded) -> bool {
        let (a, b) = Self::aligned(self, other);
        a.lo <= b.lo && b.hi <= a.hi
    }

    /// Decimal rendering of the center with `digits` fractional digits.
    pub fn center_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.center(), digits)
    }

    // ---- constants -------------------------------------------------------

    /// `sqrt(k)` for a non-negative integer.
    pub fn sqrt_int(k: &BigUint, bits: u32) -> Guarded {
        let scaled: BigUint = k << (2 * bits);
        let root = scaled.sqrt();
        let exact = &root * &root == scaled;
        let lo = BigInt::from_biguint(Sign::Plus, root);
        let hi = if exact { lo.clone() } else { &lo + 1 };
        Guarded::from_units(lo, hi, bits).with_tag(&format!("sqrt({k})"))
    }

    /// The golden section `(sqrt(5) - 1) / 2`.
    pub fn golden(bits: u32) -> Guarded {
        let s = Guarded::sqrt_int(&BigUint::from(5u32), bits);
        let one = pow2(bits);
        let two = BigInt::from(2);
        let lo = (&s.lo - &one).div_floor(&two);
        let hi = (&s.hi - &one).div_ceil(&two);
        Guarded::from_units(lo, hi, bits).with_tag("golden")
    }

    pub fn e(bits: u32) -> Guarded {
        const GUARD: u32 = 32;
        let w = bits + GUARD;
        let mut term = pow2(w);
        let mut sum = term.clone();
        let mut k: u64 = 0;
        loop {
            k += 1;
            term = term.div_floor(&BigInt::from(k));
            if term.is_zero() {
                break;
            }
            sum += &term;
        }
        // Each floored term is short by at most 2 units and the tail after
        // the first zero term is below 6 units.
        let slack = BigInt::from(2 * k + 6);
        let hi = &sum + slack;
        Guarded::from_units(floor_shr(&sum, GUARD), ceil_shr(&hi, GUARD), bits).with_tag("e")
    }

    pub fn pi(bits: u32) -> Guarded {
        const GUARD: u32 = 32;
        let w = bits + GUARD;
        let a = arctan_inv(5, w);
        let b = arctan_inv(239, w);
        let pi = a.mul_i64(16).sub(&b.mul_i64(4));
        pi.narrow_bits(bits).with_tag("pi")
    }
}

/// Enclosure of `arctan(1/x)` at `w` fractional bits.
fn arctan_inv(x: u64, w: u32) -> Guarded {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = pow2(w).div_floor(&x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = power.div_floor(&BigInt::from(2 * k + 1));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power = power.div_floor(&x2);
        k += 1;
    }
    // At most 3 units of error per term, plus an alternating tail below 2.
    let slack = BigInt::from(3 * k + 2);
    Guarded::from_units(&sum - &slack, &sum + &slack, w)
}

/// `x * 2^-k` as f64 without overflowing intermediate conversions.
fn units_to_f64(x: &BigInt, k: u32) -> f64 {
    let bits = x.bits();
    if bits <= 900 {
        return x.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(k as i32));
    }
    let drop = (bits - 900) as u32;
    let y = floor_shr(x, drop);
    y.to_f64().unwrap_or(f64::NAN) * 2f64.powi(drop as i32 - k as i32)
}

/// Rounds `r` to `digits` decimal places (half away from zero).
pub(crate) fn rational_to_decimal(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r * BigRational::from_integer(scale.clone());
    let neg = scaled.is_negative();
    let a = scaled.abs();
    let rounded = (a + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer();
    let (int_part, frac_part) = rounded.div_rem(&scale);
    let mut s = String::new();
    if neg && !rounded.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        let f = frac_part.to_string();
        s.push('.');
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

impl PartialEq for Guarded {
    fn eq(&self, other: &Self) -> bool {
        self.same_enclosure(other)
    }
}

impl fmt::Debug for Guarded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Guarded({} ± {:.3e}, {} bits",
            self.center_decimal(20),
            self.radius().to_f64().unwrap_or(f64::NAN),
            self.bits
        )?;
        if let Some(t) = &self.tag {
            write!(f, ", {t}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for Guarded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.center_decimal(20))
    }
}
