//! Convergence of `sum f(k)` and `sum 1/(j^2 g(j))` for the power-log family.
//!
//! Both reduce to a Bertrand series `sum k^-a (log k)^-b`, which converges
//! iff `a > 1`, or `a = 1` and `b > 1`. The partial-sum diagnostic only
//! illustrates the verdict; finite sums cannot decide convergence.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{ApproxFunction, Family};
use crate::error::{Error, Result};
use crate::numerics::scalar::rational_to_f64;
use crate::report::{CurvePoint, ExperimentReport, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesKind {
    /// `sum_k f(k)`
    KhintchineGroshev,
    /// `sum_j 1/(j^2 g(j))`
    KleinbockWadleigh,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Converges,
    Diverges,
}

/// Power-log exponents `(a, b)` with `F ≍ T^-a (log T)^-b`.
fn asymptotic_exponents(f: &ApproxFunction) -> Result<(BigRational, BigRational)> {
    match &f.family {
        Family::PowerLog { a, b } => Ok((a.clone(), b.clone())),
        // The dual of T^-a (log T)^-b is ≍ T^(-1/a) (log T)^(b/a).
        Family::Dual(inner) => {
            let (a, b) = asymptotic_exponents(inner)?;
            if !a.is_positive() {
                return Err(Error::Unsupported("dual of a function with a = 0".into()));
            }
            Ok((a.recip(), -(&b / &a)))
        }
        Family::Table { .. } => Err(Error::Unsupported(
            "table functions carry no asymptotics; partial sums cannot decide convergence".into(),
        )),
        Family::TildeG { .. } => Err(Error::Unsupported(
            "series verdicts are defined for the power-log family only".into(),
        )),
    }
}

/// Bertrand exponents of the series terms.
fn term_exponents(f: &ApproxFunction, which: SeriesKind) -> Result<(BigRational, BigRational)> {
    let (a, b) = asymptotic_exponents(f)?;
    Ok(match which {
        SeriesKind::KhintchineGroshev => (a, b),
        // 1/(j^2 j^-a (log j)^-b) = j^-(2-a) (log j)^b
        SeriesKind::KleinbockWadleigh => (BigRational::from_integer(2.into()) - a, -b),
    })
}

fn bertrand(a: &BigRational, b: &BigRational) -> SeriesVerdict {
    let one = BigRational::one();
    if *a > one || (*a == one && *b > one) {
        SeriesVerdict::Converges
    } else {
        SeriesVerdict::Diverges
    }
}

pub fn kg_series_verdict(f: &ApproxFunction, which: SeriesKind) -> Result<SeriesVerdict> {
    let (a, b) = term_exponents(f, which)?;
    Ok(bertrand(&a, &b))
}

/// Sums of the series terms over decades `[10^j, 10^(j+1))` up to `n_max`,
/// compared with the boundary series `sum 1/(k log k)`. A convergent series
/// must eventually shrink its decade increments faster than the boundary
/// series does.
pub fn partial_sum_diagnostic(
    f: &ApproxFunction,
    which: SeriesKind,
    n_max: u64,
) -> Result<ExperimentReport> {
    let verdict = kg_series_verdict(f, which)?;
    let (a, b) = term_exponents(f, which)?;
    if n_max < 1000 {
        return Err(Error::Invalid("n_max must be at least 1000".into()));
    }
    let af = rational_to_f64(&a);
    let bf = rational_to_f64(&b);
    let term = |k: f64| {
        let l = k.ln();
        let mut e = -af * l;
        if !b.is_zero() {
            e -= bf * l.ln();
        }
        e.exp()
    };
    let boundary = |k: f64| 1.0 / (k * k.ln());
    let decades = (n_max as f64).log10().floor() as u32;
    let mut inc = Vec::new();
    let mut inc_b = Vec::new();
    let mut partial = 0.0;
    let mut curve = Vec::new();
    let mut lo: u64 = 10;
    for j in 1..decades {
        let hi = 10u64.pow(j + 1);
        let (mut s, mut sb) = (0.0f64, 0.0f64);
        for k in lo..hi {
            let kf = k as f64;
            s += term(kf);
            sb += boundary(kf);
        }
        partial += s;
        inc.push(s);
        inc_b.push(sb);
        curve.push(CurvePoint {
            parameter: hi as f64,
            estimate: partial,
            stderr: 0.0,
            n_samples: hi - 10,
            seed: 0,
        });
        lo = hi;
    }
    let last = inc.len() - 1;
    let ratio = inc[last] / inc[last - 1];
    let ratio_b = inc_b[last] / inc_b[last - 1];
    let consistent = match verdict {
        SeriesVerdict::Converges => ratio < ratio_b,
        SeriesVerdict::Diverges => ratio >= ratio_b * (1.0 - 1e-9),
    };
    let mut r = ExperimentReport::new(
        "kg_series_partial_sums",
        if consistent { Status::Pass } else { Status::Fail },
        format!(
            "verdict {verdict:?}; last decade increment ratio {ratio:.6} vs boundary {ratio_b:.6}"
        ),
    )
    .metric("series", which)
    .metric("verdict", verdict)
    .metric("term_a", af)
    .metric("term_b", bf)
    .metric("increment_ratio", ratio)
    .metric("boundary_ratio", ratio_b)
    .metric("consistent", consistent)
    .caveat("partial sums illustrate the symbolic verdict; they do not prove it")
    .caveat("terms are those of the reduced form k^-a (log k)^-b; constant factors do not affect the ratios");
    r.curve = curve;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(a: (i64, i64), b: (i64, i64)) -> ApproxFunction {
        ApproxFunction::power_log_ratio(a, b).unwrap()
    }

    #[test]
    fn bertrand_examples() {
        let kg = SeriesKind::KhintchineGroshev;
        assert_eq!(kg_series_verdict(&pl((1, 1), (3, 2)), kg).unwrap(), SeriesVerdict::Converges);
        assert_eq!(kg_series_verdict(&pl((1, 1), (1, 2)), kg).unwrap(), SeriesVerdict::Diverges);
        assert_eq!(kg_series_verdict(&pl((2, 1), (0, 1)), kg).unwrap(), SeriesVerdict::Converges);
        assert_eq!(kg_series_verdict(&pl((1, 1), (1, 1)), kg).unwrap(), SeriesVerdict::Diverges);
    }

    #[test]
    fn kleinbock_wadleigh_reduction() {
        let kw = SeriesKind::KleinbockWadleigh;
        // g = f1: sum 1/j diverges.
        assert_eq!(kg_series_verdict(&ApproxFunction::f1(), kw).unwrap(), SeriesVerdict::Diverges);
        // g = T^-1 (log T)^2: sum 1/(j (log j)^2) converges.
        assert_eq!(kg_series_verdict(&pl((1, 1), (-2, 1)), kw).unwrap(), SeriesVerdict::Converges);
        assert_eq!(kg_series_verdict(&pl((1, 2), (0, 1)), kw).unwrap(), SeriesVerdict::Converges);
        // f = power_log(1, 2) has g ≍ T^-1 (log T)^2, so the terms are
        // 1/(j (log j)^2).
        let g = super::super::dual(&pl((1, 1), (2, 1)));
        assert_eq!(kg_series_verdict(&g, kw).unwrap(), SeriesVerdict::Converges);
        let g = super::super::dual(&pl((1, 1), (1, 2)));
        assert_eq!(kg_series_verdict(&g, kw).unwrap(), SeriesVerdict::Diverges);
    }

    #[test]
    fn tables_are_unsupported() {
        let t = ApproxFunction::table(vec![1.0, 2.0], vec![1.0, 0.5]).unwrap();
        assert!(matches!(
            kg_series_verdict(&t, SeriesKind::KhintchineGroshev),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn diagnostic_direction() {
        let r = partial_sum_diagnostic(&pl((1, 1), (3, 2)), SeriesKind::KhintchineGroshev, 100_000).unwrap();
        assert!(r.passed(), "{}", r.summary);
        let r = partial_sum_diagnostic(&pl((1, 1), (1, 2)), SeriesKind::KhintchineGroshev, 100_000).unwrap();
        assert!(r.passed(), "{}", r.summary);
    }
}
