//! `g~(T) = lambda^(n/m)(H(T)) / H(T)`, where `H` inverts `lambda/f`.

use num_rational::BigRational;
use num_traits::{One, Signed};

use super::{dual_asymptotic, ApproxFunction, Family, DEFAULT_TOL};
use crate::best_approx::BestApproxSequence;
use crate::error::{Error, Result};
use crate::numerics::scalar::rational_to_f64;

/// Left end of the region where `lambda/f` is increasing.
pub(super) fn inner_lo(f: &ApproxFunction, lambda: &ApproxFunction) -> f64 {
    let mut lo = f.domain_lo().max(lambda.domain_lo());
    // For two unscaled power-log functions the ratio is
    // x^d (log x)^e, increasing once log x > -e/d.
    if let (Family::PowerLog { a: af, b: bf }, Family::PowerLog { a: al, b: bl }) = (&f.family, &lambda.family) {
        if f.k.is_one() && lambda.k.is_one() {
            let d = rational_to_f64(&(af - al));
            let e = rational_to_f64(&(bf - bl));
            if d > 0.0 && e < 0.0 {
                lo = lo.max((-e / d).exp());
            }
        }
    }
    lo
}

pub(super) fn ratio_f64(f: &ApproxFunction, lambda: &ApproxFunction, x: f64) -> f64 {
    lambda.eval_f64_unchecked(x) / f.eval_f64_unchecked(x)
}

/// `H(T)`: the `x >= inner_lo` with `lambda(x)/f(x) = T`.
pub(super) fn h_inverse(f: &ApproxFunction, lambda: &ApproxFunction, t: f64) -> Result<f64> {
    let x0 = inner_lo(f, lambda);
    let r = |x: f64| ratio_f64(f, lambda, x);
    let mut lo = if x0 > 0.0 { x0 } else { f64::MIN_POSITIVE };
    if r(lo) > t {
        return Err(Error::OutOfRange(format!("T = {t} is below the range of lambda/f")));
    }
    let mut hi = lo.max(1.0) * 2.0;
    let mut k = 0;
    while r(hi) < t {
        lo = hi;
        hi *= 2.0;
        k += 1;
        if k > 2000 || !hi.is_finite() {
            return Err(Error::OutOfRange(format!("lambda/f does not reach T = {t}")));
        }
    }
    for _ in 0..4000 {
        if hi - lo <= DEFAULT_TOL * 0.01 * lo {
            return Ok(0.5 * (lo + hi));
        }
        let mid = if lo > 0.0 && hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if r(mid) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NonConvergence(format!("H({t}) did not converge")))
}

/// Builds `g~` after checking on a log-spaced grid that `lambda/f` is
/// strictly increasing.
pub fn kurzweil_tilde_g(
    f: &ApproxFunction,
    lambda: &ApproxFunction,
    n: u32,
    m: u32,
) -> Result<ApproxFunction> {
    if n == 0 || m == 0 {
        return Err(Error::Invalid("n and m must be positive".into()));
    }
    let x0 = inner_lo(f, lambda);
    let top = f.domain_hi().min(lambda.domain_hi());
    let start = if x0 > 0.0 { x0 } else { 1e-6 };
    let end = if top.is_finite() { top } else { start.max(1.0) * 1e12 };
    let steps = 400;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..=steps {
        let s = i as f64 / steps as f64;
        let x = if i == 0 {
            start * (1.0 + 1e-9)
        } else {
            (start.ln() + s * (end.ln() - start.ln())).exp().min(end)
        };
        let v = ratio_f64(f, lambda, x);
        if !(v > prev) {
            return Err(Error::Precondition(format!(
                "lambda/f is not strictly increasing near x = {x}"
            )));
        }
        prev = v;
    }
    Ok(ApproxFunction {
        family: Family::TildeG {
            f: Box::new(f.clone()),
            lambda: Box::new(lambda.clone()),
            n,
            m,
        },
        c: BigRational::one(),
        k: BigRational::one(),
    })
}

/// Asymptotic comparison form `(log T)^-((m+n) beta / (m a)) g_a(T)` for
/// `lambda = (log T)^-beta` and power-log `f`.
pub fn tilde_asymptotic(
    f: &ApproxFunction,
    lambda: &ApproxFunction,
    n: u32,
    m: u32,
    t: f64,
) -> Result<f64> {
    let beta = match &lambda.family {
        Family::PowerLog { a, b } if !a.is_positive() => rational_to_f64(b),
        _ => return Err(Error::Unsupported("lambda must be a pure log power (log T)^-beta".into())),
    };
    let a = match &f.family {
        Family::PowerLog { a, .. } => rational_to_f64(a),
        _ => return Err(Error::Unsupported("f must be power_log".into())),
    };
    let e = (m + n) as f64 * beta / (m as f64 * a);
    Ok(t.ln().powf(-e) * dual_asymptotic(f, t)?)
}

/// Partial sums of `lambda^(1/m)(Y_nu^n)` over the norms of a sequence.
/// Records whose argument falls outside the domain of `lambda` are skipped.
pub fn tilde_partial_sums(
    seq: &BestApproxSequence,
    lambda: &ApproxFunction,
    n: u32,
    m: u32,
) -> Result<Vec<(usize, u64, f64)>> {
    let mut out = Vec::new();
    let mut acc = 0.0;
    for (i, rec) in seq.records.iter().enumerate() {
        let y = (rec.norm as f64).powi(n as i32);
        if !lambda.in_domain(y) {
            continue;
        }
        acc += lambda.eval_f64(y)?.powf(1.0 / m as f64);
        out.push((i + 1, rec.norm, acc));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn log_power(b: i64) -> ApproxFunction {
        ApproxFunction::power_log_ratio((0, 1), (b, 1)).unwrap()
    }

    #[test]
    fn f1_with_log_square() {
        let f = ApproxFunction::f1();
        let lam = log_power(2);
        let g = kurzweil_tilde_g(&f, &lam, 1, 1).unwrap();
        assert!((inner_lo(&f, &lam) - 2f64.exp()).abs() < 1e-12);
        // g~ = 1/(T (log H)^4) with H/(log H)^2 = T.
        let t = 1e4;
        let h = h_inverse(&f, &lam, t).unwrap();
        assert!((h / h.ln().powi(2) / t - 1.0).abs() < 1e-12);
        let v = g.eval_f64(t).unwrap();
        assert!((v * t * h.ln().powi(4) - 1.0).abs() < 1e-10);
        // The asymptotic form is approached only logarithmically.
        let mut last = 0.0;
        for t in [1e4, 1e8, 1e16, 1e32, 1e64] {
            let q = g.eval_f64(t).unwrap() / tilde_asymptotic(&f, &lam, 1, 1, t).unwrap();
            assert!(q > last && q < 1.0, "{t}: {q}");
            last = q;
        }
    }

    #[test]
    fn non_monotone_ratio_is_rejected() {
        // lambda/f = (1/T) / table that is flat-then-steep in log-log terms.
        let f = ApproxFunction::table(vec![1.0, 10.0, 100.0], vec![1.0, 0.01, 0.009]).unwrap();
        let lam = ApproxFunction::f1();
        assert!(matches!(kurzweil_tilde_g(&f, &lam, 1, 1), Err(Error::Precondition(_))));
    }
}
