use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::guarded::{rational_to_decimal, Guarded};
use crate::error::{Error, Result};

/// A real number: either an exact rational or a guarded interval enclosure.
///
/// Mixed operations promote the rational operand to an enclosure at the
/// guarded operand's precision. Comparisons that cannot be certified return
/// [`Error::PrecisionExhausted`].
#[derive(Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Guarded(Guarded),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn from_int(k: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(k)))
    }

    pub fn from_bigint(k: BigInt) -> Self {
        Scalar::Exact(BigRational::from_integer(k))
    }

    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Scalar::Exact(BigRational::new(BigInt::from(p), BigInt::from(q))))
    }

    /// Exact dyadic value of a finite float.
    pub fn from_f64_exact(x: f64) -> Result<Self> {
        BigRational::from_float(x)
            .map(Scalar::Exact)
            .ok_or_else(|| Error::Invalid(format!("non-finite value {x}")))
    }

    /// Enclosure of a value known only as a float `center` with relative
    /// error at most `rel`. Fractional bits grow with the magnitude of
    /// `1/center` so tiny values keep their relative accuracy.
    pub fn enclose_f64(center: f64, rel: f64, min_bits: u32) -> Result<Self> {
        let c = BigRational::from_float(center)
            .ok_or_else(|| Error::Invalid(format!("non-finite value {center}")))?;
        let e = BigRational::from_float(rel.abs())
            .ok_or_else(|| Error::Invalid(format!("non-finite error bound {rel}")))?;
        let w = c.abs() * e;
        let scale = if center == 0.0 { 0 } else { (-center.abs().log2()).max(0.0).ceil() as u32 };
        let bits = min_bits.max(64 + scale);
        let lo = Guarded::from_rational(&(&c - &w), bits);
        let hi = Guarded::from_rational(&(&c + &w), bits);
        Ok(Scalar::Guarded(Guarded::from_units(
            lo.lo_units().clone(),
            hi.hi_units().clone(),
            bits,
        )))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Guarded(_) => None,
        }
    }

    pub fn as_guarded(&self) -> Option<&Guarded> {
        match self {
            Scalar::Guarded(g) => Some(g),
            Scalar::Exact(_) => None,
        }
    }

    /// Fractional bits of the enclosure, `None` for exact values.
    pub fn bits(&self) -> Option<u32> {
        self.as_guarded().map(Guarded::bits)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Guarded(g) => g.to_f64(),
        }
    }

    /// Lower end of the enclosure (the value itself when exact).
    pub fn lower(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Guarded(g) => g.lo(),
        }
    }

    pub fn upper(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Guarded(g) => g.hi(),
        }
    }

    pub fn center(&self) -> BigRational {
        match self {
            Scalar::Exact(r) => r.clone(),
            Scalar::Guarded(g) => g.center(),
        }
    }

    pub fn radius(&self) -> BigRational {
        match self {
            Scalar::Exact(_) => BigRational::zero(),
            Scalar::Guarded(g) => g.radius(),
        }
    }

    fn pair(a: &Scalar, b: &Scalar) -> (Guarded, Guarded) {
        match (a, b) {
            (Scalar::Guarded(x), Scalar::Guarded(y)) => (x.clone(), y.clone()),
            (Scalar::Guarded(x), Scalar::Exact(r)) => (x.clone(), Guarded::from_rational(r, x.bits())),
            (Scalar::Exact(r), Scalar::Guarded(y)) => (Guarded::from_rational(r, y.bits()), y.clone()),
            (Scalar::Exact(_), Scalar::Exact(_)) => unreachable!("both exact"),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Guarded(g) => Scalar::Guarded(g.abs()),
        }
    }

    pub fn mul_int(&self, k: i64) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r * BigInt::from(k)),
            Scalar::Guarded(g) => Scalar::Guarded(g.mul_i64(k)),
        }
    }

    pub fn add_int(&self, k: &BigInt) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r + k),
            Scalar::Guarded(g) => Scalar::Guarded(g.add_int(k)),
        }
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                if b.is_zero() {
                    Err(Error::ZeroDenominator)
                } else {
                    Ok(Scalar::Exact(a / b))
                }
            }
            _ => {
                let (a, b) = Scalar::pair(self, other);
                a.div(&b)
                    .map(Scalar::Guarded)
                    .ok_or_else(|| Error::precision("divisor enclosure contains zero"))
            }
        }
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Distance to the nearest integer.
    pub fn dist_to_int(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => {
                let frac = r - r.floor();
                let other = BigRational::one() - &frac;
                Scalar::Exact(if frac <= other { frac } else { other })
            }
            Scalar::Guarded(g) => Scalar::Guarded(g.dist_to_int()),
        }
    }

    /// Nearest integer, rounding half up. For enclosures the choice is made
    /// from the center and is only meaningful when the remainder is below 1/2.
    pub fn nearest_int(&self) -> BigInt {
        match self {
            Scalar::Exact(r) => (r + BigRational::new(BigInt::one(), BigInt::from(2))).floor().to_integer(),
            Scalar::Guarded(g) => g.round_center(),
        }
    }

    pub fn max_enclosure(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.max(b).clone()),
            _ => {
                let (a, b) = Scalar::pair(self, other);
                Scalar::Guarded(a.max_enclosure(&b))
            }
        }
    }

    pub fn min_enclosure(&self, other: &Scalar) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a.min(b).clone()),
            _ => {
                let (a, b) = Scalar::pair(self, other);
                Scalar::Guarded(a.min_enclosure(&b))
            }
        }
    }

    /// Certified comparison; `None` when the enclosures overlap.
    pub fn try_cmp(&self, other: &Scalar) -> Option<Ordering> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            _ => {
                let (a, b) = Scalar::pair(self, other);
                a.certified_cmp(&b)
            }
        }
    }

    /// `upper(self) < lower(other)`.
    pub fn certainly_lt(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a < b,
            (Scalar::Guarded(a), Scalar::Guarded(b)) => a.certainly_lt(b),
            _ => self.upper() < other.lower(),
        }
    }

    /// `lower(self) >= upper(other)`.
    pub fn certainly_ge(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a >= b,
            (Scalar::Guarded(a), Scalar::Guarded(b)) => a.certainly_ge(b),
            _ => self.lower() >= other.upper(),
        }
    }

    pub fn cmp_certified(&self, other: &Scalar) -> Result<Ordering> {
        self.try_cmp(other).ok_or_else(|| {
            Error::precision(format!("cannot order {self} and {other} within the guard radius"))
        })
    }

    /// Certified `self <= other`. Overlapping enclosures are an error unless
    /// `self`'s upper end already sits below `other`'s lower end.
    pub fn le_certified(&self, other: &Scalar) -> Result<bool> {
        if self.upper() <= other.lower() {
            return Ok(true);
        }
        if self.lower() > other.upper() {
            return Ok(false);
        }
        Err(Error::precision(format!(
            "cannot decide {self} <= {other} within the guard radius"
        )))
    }

    /// Exact equality for rationals, identical endpoints for enclosures.
    pub fn same_as(&self, other: &Scalar) -> bool {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => a == b,
            (Scalar::Guarded(a), Scalar::Guarded(b)) => a.same_enclosure(b),
            _ => false,
        }
    }

    pub fn is_certainly_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Guarded(g) => g.is_point() && g.lo_units().is_zero(),
        }
    }

    pub fn is_certainly_positive(&self) -> bool {
        self.lower() > BigRational::zero()
    }

    /// `other`'s enclosure lies inside `self`'s.
    pub fn encloses(&self, other: &Scalar) -> bool {
        self.lower() <= other.lower() && other.upper() <= self.upper()
    }

    pub fn contains_value(&self, r: &BigRational) -> bool {
        self.lower() <= *r && *r <= self.upper()
    }

    /// Decimal rendering: exact rationals as `p/q`, enclosures by center.
    pub fn to_decimal(&self, digits: usize) -> String {
        rational_to_decimal(&self.center(), digits)
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(x) = r.to_f64() {
        if x.is_finite() && (x != 0.0 || r.is_zero()) {
            return x;
        }
    }
    // Large or tiny operands: scale through the bit lengths.
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = nb - db;
    let scaled = if shift > 0 {
        BigRational::new(r.numer().clone(), r.denom() << (shift as u64))
    } else {
        BigRational::new(r.numer() << ((-shift) as u64), r.denom().clone())
    };
    scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Guarded(g) => write!(f, "{g}"),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "Exact({r})"),
            Scalar::Guarded(g) => write!(f, "{g:?}"),
        }
    }
}

impl From<i64> for Scalar {
    fn from(k: i64) -> Self {
        Scalar::from_int(k)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Guarded> for Scalar {
    fn from(g: Guarded) -> Self {
        Scalar::Guarded(g)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a + b),
            (Scalar::Guarded(g), Scalar::Exact(r)) | (Scalar::Exact(r), Scalar::Guarded(g))
                if r.is_integer() =>
            {
                Scalar::Guarded(g.add_int(r.numer()))
            }
            _ => {
                let (a, b) = Scalar::pair(self, rhs);
                Scalar::Guarded(a.add(&b))
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a - b),
            (Scalar::Guarded(g), Scalar::Exact(r)) if r.is_integer() => {
                Scalar::Guarded(g.add_int(&-r.numer()))
            }
            _ => {
                let (a, b) = Scalar::pair(self, rhs);
                Scalar::Guarded(a.sub(&b))
            }
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(a * b),
            (Scalar::Guarded(g), Scalar::Exact(r)) | (Scalar::Exact(r), Scalar::Guarded(g))
                if r.is_integer() =>
            {
                Scalar::Guarded(g.mul_int(r.numer()))
            }
            _ => {
                let (a, b) = Scalar::pair(self, rhs);
                Scalar::Guarded(a.mul(&b))
            }
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(-a),
            Scalar::Guarded(g) => Scalar::Guarded(g.neg()),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_reduce() {
        let s = Scalar::ratio(2, 6).unwrap();
        assert_eq!(s.as_rational().unwrap(), &BigRational::new(1.into(), 3.into()));
        let s = Scalar::ratio(3, -6).unwrap();
        let r = s.as_rational().unwrap();
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.numer(), &BigInt::from(-1));
        assert_eq!(Scalar::ratio(1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn mixed_arithmetic_promotes() {
        let g = Scalar::Guarded(Guarded::golden(128));
        let h = &g + &Scalar::ratio(1, 2).unwrap();
        assert!(!h.is_exact());
        assert!((h.to_f64() - 1.118_033_988_749_895).abs() < 1e-15);
        let z = &g - &g;
        assert!(z.contains_value(&BigRational::zero()));
    }

    #[test]
    fn certified_comparison_refuses_overlap() {
        let g = Scalar::Guarded(Guarded::golden(64));
        let h = Scalar::Guarded(Guarded::golden(64).add_int(&BigInt::zero()));
        assert!(g.try_cmp(&h).is_none());
        assert!(g.cmp_certified(&h).is_err());
        assert_eq!(g.try_cmp(&Scalar::ratio(1, 2).unwrap()), Some(Ordering::Greater));
        assert!(g.same_as(&h));
    }

    #[test]
    fn exact_dist_and_rounding() {
        let s = Scalar::ratio(-7, 3).unwrap();
        assert_eq!(s.dist_to_int(), Scalar::ratio(1, 3).unwrap());
        assert_eq!(s.nearest_int(), BigInt::from(-2));
        assert_eq!(Scalar::ratio(3, 2).unwrap().nearest_int(), BigInt::from(2));
        assert_eq!(Scalar::ratio(3, 2).unwrap().dist_to_int(), Scalar::ratio(1, 2).unwrap());
    }

    #[test]
    fn division() {
        let a = Scalar::from_int(2);
        let b = Scalar::ratio(1, 23).unwrap();
        assert_eq!(a.checked_div(&b).unwrap(), Scalar::from_int(46));
        assert_eq!(a.checked_div(&Scalar::zero()), Err(Error::ZeroDenominator));
        let g = Scalar::Guarded(Guarded::golden(128));
        let q = a.checked_div(&g).unwrap();
        assert!((q.to_f64() - 2.0 / 0.618_033_988_749_894_9).abs() < 1e-14);
    }

    #[test]
    fn big_rational_to_f64() {
        let huge = BigRational::new(BigInt::from(10u32).pow(400), BigInt::from(10u32).pow(399) * 3);
        assert!((rational_to_f64(&huge) - 10.0 / 3.0).abs() < 1e-12);
    }
}
