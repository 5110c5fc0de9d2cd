//! Approximating functions `F(T) = c * f(K T)`.
//!
//! The base `f` is a member of the power-log family `T^-a (log T)^-b`, a
//! monotone table, the dual `1/F^-1(1/T)` of another function, or the
//! Kurzweil-type construction built from `f` and a slowly decaying `lambda`.

mod conditions;
mod literal;
mod series;
mod tilde;

pub use conditions::{check_finite_exponent, check_lambdatech, check_technical, ConditionParams};
pub use literal::parse_function;
pub use series::{kg_series_verdict, partial_sum_diagnostic, SeriesKind, SeriesVerdict};
pub use tilde::{kurzweil_tilde_g, tilde_asymptotic, tilde_partial_sums};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numerics::scalar::rational_to_f64;
use crate::numerics::{Scalar, DEFAULT_BITS};

/// Default relative tolerance for bisection.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `T^-a (log T)^-b`. `a = 0` is admitted (with `b > 0`) for the slowly
    /// decaying weights `lambda`.
    PowerLog { a: BigRational, b: BigRational },
    /// Strictly decreasing samples, interpolated linearly in log-log
    /// coordinates.
    Table { t: Vec<f64>, v: Vec<f64> },
    /// `1 / f^-1(1/T)`.
    Dual(Box<ApproxFunction>),
    /// `lambda^(n/m)(H(T)) / H(T)` with `H` the inverse of `lambda/f`.
    TildeG {
        f: Box<ApproxFunction>,
        lambda: Box<ApproxFunction>,
        n: u32,
        m: u32,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxFunction {
    pub family: Family,
    /// Outer scale: multiplies the value.
    pub c: BigRational,
    /// Inner scale: multiplies the argument.
    pub k: BigRational,
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl ApproxFunction {
    pub fn power_log(a: BigRational, b: BigRational) -> Result<Self> {
        if a.is_negative() || (a.is_zero() && !b.is_positive()) {
            return Err(Error::Invalid(format!(
                "power_log({a}, {b}) is not decreasing: need a > 0, or a = 0 with b > 0"
            )));
        }
        Ok(ApproxFunction {
            family: Family::PowerLog { a, b },
            c: BigRational::one(),
            k: BigRational::one(),
        })
    }

    /// `power_log` from small rationals, for tests and fixed choices.
    pub fn power_log_ratio(a: (i64, i64), b: (i64, i64)) -> Result<Self> {
        Self::power_log(rat(a.0, a.1), rat(b.0, b.1))
    }

    /// `f_k(T) = T^-k`.
    pub fn f_k(k: i64) -> Self {
        Self::power_log(BigRational::from_integer(k.into()), BigRational::zero())
            .expect("positive exponent")
    }

    pub fn f1() -> Self {
        Self::f_k(1)
    }

    pub fn table(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.len() != v.len() || t.len() < 2 {
            return Err(Error::Invalid("table needs at least two (T, value) pairs".into()));
        }
        for w in t.windows(2) {
            if !(w[0] > 0.0 && w[1] > w[0]) {
                return Err(Error::Invalid("table arguments must be positive and increasing".into()));
            }
        }
        for w in v.windows(2) {
            if !(w[1] > 0.0 && w[1] < w[0]) {
                return Err(Error::Invalid("table values must be positive and strictly decreasing".into()));
            }
        }
        Ok(ApproxFunction {
            family: Family::Table { t, v },
            c: BigRational::one(),
            k: BigRational::one(),
        })
    }

    pub fn with_scales(mut self, c: BigRational, k: BigRational) -> Result<Self> {
        if !c.is_positive() || !k.is_positive() {
            return Err(Error::Invalid("scales c and K must be positive".into()));
        }
        self.c = c;
        self.k = k;
        Ok(self)
    }

    pub fn scaled(self, c: BigRational) -> Result<Self> {
        let k = self.k.clone();
        let c = &self.c * c;
        self.with_scales(c, k)
    }

    pub fn power_log_params(&self) -> Option<(&BigRational, &BigRational)> {
        match &self.family {
            Family::PowerLog { a, b } => Some((a, b)),
            _ => None,
        }
    }

    fn c_f64(&self) -> f64 {
        rational_to_f64(&self.c)
    }

    fn k_f64(&self) -> f64 {
        rational_to_f64(&self.k)
    }

    /// Left end of the domain of the base function (before the inner scale),
    /// and whether it is included.
    fn base_domain(&self) -> (f64, bool) {
        match &self.family {
            Family::PowerLog { a, b } => {
                if b.is_positive() {
                    (1.0, false)
                } else if b.is_negative() {
                    // Decreasing once log T >= |b|/a.
                    let r = rational_to_f64(&(-b / a));
                    (r.exp(), true)
                } else {
                    (0.0, false)
                }
            }
            Family::Table { t, .. } => (t[0], true),
            Family::Dual(f) => {
                let hi = f.range_hi();
                (if hi.is_infinite() { 0.0 } else { 1.0 / hi }, false)
            }
            Family::TildeG { f, lambda, .. } => {
                let x0 = tilde::inner_lo(f, lambda);
                let v = tilde::ratio_f64(f, lambda, x0);
                (if v.is_finite() { v } else { 0.0 }, false)
            }
        }
    }

    /// Domain `[T_lo, inf)`; the end point is excluded when the flag is false.
    pub fn domain(&self) -> (f64, bool) {
        let (lo, closed) = self.base_domain();
        (lo / self.k_f64(), closed)
    }

    pub fn domain_lo(&self) -> f64 {
        self.domain().0
    }

    /// Right end of the domain; infinite except for tables.
    pub fn domain_hi(&self) -> f64 {
        match &self.family {
            Family::Table { t, .. } => t[t.len() - 1] / self.k_f64(),
            _ => f64::INFINITY,
        }
    }

    /// Supremum of the values.
    pub fn range_hi(&self) -> f64 {
        let (lo, closed) = self.domain();
        if closed {
            return self.eval_f64_unchecked(lo);
        }
        match &self.family {
            Family::Dual(f) => {
                let (flo, _) = f.domain();
                if flo > 0.0 {
                    1.0 / flo
                } else {
                    f64::INFINITY
                }
            }
            Family::TildeG { .. } => {
                // Limit at the left end of the domain.
                let v = self.eval_f64_unchecked(lo * (1.0 + 1e-9) + 1e-300);
                if v.is_finite() {
                    v
                } else {
                    f64::INFINITY
                }
            }
            _ => f64::INFINITY,
        }
    }

    pub fn in_domain(&self, t: f64) -> bool {
        let (lo, closed) = self.domain();
        t.is_finite() && (t > lo || (closed && t == lo)) && t <= self.domain_hi()
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if self.in_domain(t) {
            Ok(())
        } else {
            let (lo, closed) = self.domain();
            Err(Error::Domain(format!(
                "T = {t} is outside the domain {}{lo}, {})",
                if closed { "[" } else { "(" },
                self.domain_hi()
            )))
        }
    }

    /// Float evaluation; the argument must be in the domain.
    pub fn eval_f64(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(self.eval_f64_unchecked(t))
    }

    fn eval_f64_unchecked(&self, t: f64) -> f64 {
        let x = self.k_f64() * t;
        let base = match &self.family {
            Family::PowerLog { a, b } => {
                let a = rational_to_f64(a);
                let b = rational_to_f64(b);
                let mut l = -a * x.ln();
                if b != 0.0 {
                    l -= b * x.ln().ln();
                }
                l.exp()
            }
            Family::Table { t, v } => table_interp(t, v, x),
            Family::Dual(f) => match invert_with(f, 1.0 / x, DEFAULT_TOL) {
                Ok(s) => 1.0 / s,
                Err(_) => f64::NAN,
            },
            Family::TildeG { f, lambda, n, m } => match tilde::h_inverse(f, lambda, x) {
                Ok(h) => lambda.eval_f64_unchecked(h).powf(*n as f64 / *m as f64) / h,
                Err(_) => f64::NAN,
            },
        };
        self.c_f64() * base
    }

    /// Relative error bound of [`eval_f64`] at `t`.
    fn rel_error(&self, t: f64) -> f64 {
        let x = self.k_f64() * t;
        match &self.family {
            Family::PowerLog { a, b } => {
                let a = rational_to_f64(a).abs();
                let b = rational_to_f64(b).abs();
                let lx = x.ln().abs();
                1e-14 * (8.0 + a * lx + b * lx.ln().abs().max(1.0)) + 1e-14 * (a + b)
            }
            Family::Table { .. } => 1e-13,
            Family::Dual(_) => 8.0 * DEFAULT_TOL,
            Family::TildeG { .. } => 64.0 * DEFAULT_TOL,
        }
    }

    /// Enclosure of `F(T)`.
    ///
    /// Pure integer powers at rational arguments are exact; everything else
    /// goes through a float kernel with a conservative relative radius.
    pub fn eval(&self, t: &Scalar) -> Result<Scalar> {
        let tf = t.to_f64();
        if let (Family::PowerLog { a, b }, Scalar::Exact(tr)) = (&self.family, t) {
            if b.is_zero() && a.is_integer() {
                if !tr.is_positive() {
                    return Err(Error::Domain(format!("T = {tr} must be positive")));
                }
                let e = a.to_integer().to_i32().ok_or_else(|| Error::Unsupported("huge exponent".into()))?;
                let x = &self.k * tr;
                return Ok(Scalar::Exact(&self.c * num_traits::pow::Pow::pow(&x, -e)));
            }
        }
        let v = self.eval_f64(tf)?;
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonConvergence(format!("evaluation at T = {tf} gave {v}")));
        }
        // The argument's own width shifts the value by at most its relative
        // width times the local log-log slope; slopes here stay below 64.
        let arg_rel = if t.is_exact() || tf == 0.0 {
            0.0
        } else {
            rational_to_f64(&t.radius()) / tf.abs()
        };
        let rel = self.rel_error(tf) + 64.0 * arg_rel + 4.0 * f64::EPSILON;
        Scalar::enclose_f64(v, rel, DEFAULT_BITS)
    }

    pub fn eval_at(&self, t: f64) -> Result<Scalar> {
        let ts = crate::numerics::parse::rational_from_f64_decimal(t)?;
        self.eval(&Scalar::Exact(ts))
    }

    /// Closed-form inverse where one exists.
    fn closed_inverse(&self, y: f64) -> Option<f64> {
        match &self.family {
            Family::PowerLog { a, b } if b.is_zero() && a.is_positive() => {
                let a = rational_to_f64(a);
                Some((y / self.c_f64()).powf(-1.0 / a) / self.k_f64())
            }
            _ => None,
        }
    }
}

fn table_interp(t: &[f64], v: &[f64], x: f64) -> f64 {
    let i = match t.iter().position(|&ti| ti >= x) {
        Some(0) => return v[0],
        Some(i) => i,
        None => return f64::NAN,
    };
    let (lx0, lx1) = (t[i - 1].ln(), t[i].ln());
    let (ly0, ly1) = (v[i - 1].ln(), v[i].ln());
    let s = (x.ln() - lx0) / (lx1 - lx0);
    (ly0 + s * (ly1 - ly0)).exp()
}

pub fn eval(f: &ApproxFunction, t: &Scalar) -> Result<Scalar> {
    f.eval(t)
}

pub fn invert(f: &ApproxFunction, y: f64) -> Result<f64> {
    invert_with(f, y, DEFAULT_TOL)
}

/// Monotone bisection for `F(T) = y`, to relative tolerance `tol` in `T`.
pub fn invert_with(f: &ApproxFunction, y: f64, tol: f64) -> Result<f64> {
    if !(y.is_finite() && y > 0.0) {
        return Err(Error::OutOfRange(format!("y = {y} must be positive and finite")));
    }
    let range_hi = f.range_hi();
    if y > range_hi {
        return Err(Error::OutOfRange(format!(
            "y = {y} exceeds the supremum {range_hi} of the function"
        )));
    }
    if let Some(t) = f.closed_inverse(y) {
        return Ok(t);
    }
    let (dlo, closed) = f.domain();
    let dhi = f.domain_hi();
    let ev = |t: f64| f.eval_f64_unchecked(t);
    if closed && ev(dlo) == y {
        return Ok(dlo);
    }
    // Bracket: F(lo) >= y >= F(hi).
    let start = if dhi.is_finite() {
        (dlo * dhi).sqrt().max(dlo)
    } else if dlo > 0.0 {
        dlo * 2.0
    } else {
        1.0
    };
    let (mut lo, mut hi);
    if ev(start) >= y {
        lo = start;
        hi = start;
        let mut k = 0;
        while ev(hi) >= y {
            if hi >= dhi {
                return Err(Error::OutOfRange(format!("y = {y} is below the table range")));
            }
            lo = hi;
            hi = (hi * 2.0).min(dhi);
            k += 1;
            if k > 2100 || !hi.is_finite() {
                return Err(Error::OutOfRange(format!("no solution of F(T) = {y} below 1e300")));
            }
        }
    } else {
        hi = start;
        lo = start;
        let mut k = 0;
        while !(ev(lo) >= y) {
            hi = lo;
            lo = dlo + (lo - dlo) / 2.0;
            k += 1;
            if k > 1100 || lo <= dlo {
                if closed && ev(dlo) >= y {
                    lo = dlo;
                    break;
                }
                return Err(Error::OutOfRange(format!("y = {y} is not attained near the domain end")));
            }
        }
    }
    for _ in 0..4000 {
        if hi - lo <= tol * lo.abs().max(f64::MIN_POSITIVE) {
            let t = 0.5 * (lo + hi);
            return Ok(t);
        }
        let mid = if lo > 0.0 && hi / lo > 4.0 {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = ev(mid);
        if v.is_nan() {
            return Err(Error::NonConvergence(format!("evaluation failed at T = {mid}")));
        }
        if v >= y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let _ = (ev(lo) >= y) && (ev(hi) <= y);
    Err(Error::NonConvergence(format!(
        "bisection for y = {y} stalled in [{lo}, {hi}]; is the function monotone?"
    )))
}

/// Exact `r^e` for rational `e`, when the root is rational.
fn rational_pow(r: &BigRational, e: &BigRational) -> Option<BigRational> {
    let p = e.numer().to_i32()?;
    let q = e.denom().to_u32()?;
    let root = |x: &BigInt| -> Option<BigInt> {
        let s = x.nth_root(q);
        if num_traits::pow::Pow::pow(&s, q) == *x {
            Some(s)
        } else {
            None
        }
    };
    let base = BigRational::new(root(r.numer())?, root(r.denom())?);
    Some(num_traits::pow::Pow::pow(&base, p))
}

/// The dual `g(T) = 1 / F^-1(1/T)`.
///
/// Pure powers have a closed-form dual when the scales allow it; otherwise
/// the dual is evaluated by bisection.
pub fn dual(f: &ApproxFunction) -> ApproxFunction {
    if let Family::PowerLog { a, b } = &f.family {
        if b.is_zero() && a.is_positive() {
            // F = c (K T)^-a  gives  g = K c^(-1/a) T^(-1/a).
            let inv = a.recip();
            if let Some(cp) = rational_pow(&f.c, &-&inv) {
                return ApproxFunction {
                    family: Family::PowerLog {
                        a: inv,
                        b: BigRational::zero(),
                    },
                    c: &f.k * cp,
                    k: BigRational::one(),
                };
            }
        }
    }
    ApproxFunction {
        family: Family::Dual(Box::new(f.clone())),
        c: BigRational::one(),
        k: BigRational::one(),
    }
}

/// Closed asymptotic form of the dual of a power-log function:
/// `K a^(-b/a) (cT)^(-1/a) (log cT)^(b/a)`.
pub fn dual_asymptotic(f: &ApproxFunction, t: f64) -> Result<f64> {
    let (a, b) = match &f.family {
        Family::PowerLog { a, b } if a.is_positive() => (rational_to_f64(a), rational_to_f64(b)),
        _ => {
            return Err(Error::Unsupported(
                "closed dual form exists only for power_log with a > 0".into(),
            ))
        }
    };
    let ct = f.c_f64() * t;
    if b != 0.0 && ct <= 1.0 {
        return Err(Error::Domain(format!("asymptotic form needs c T > 1, got {ct}")));
    }
    let mut l = -(b / a) * a.ln() - ct.ln() / a;
    if b != 0.0 {
        l += (b / a) * ct.ln().ln();
    }
    Ok(f.k_f64() * l.exp())
}
