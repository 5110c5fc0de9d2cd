use serde::Serialize;
use serde_json::json;

use super::{int_root_floor, BestApproxSequence};
use crate::approx_functions::ApproxFunction;
use crate::error::{Error, Result};
use crate::numerics::Scalar;
use crate::report::{scalar_json, ExperimentReport, Status};
use crate::transference::growth_constants;

/// Outcome of the growth scan over a best-approximation sequence.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthCheck {
    pub a: usize,
    pub b: usize,
    /// Number of indices `nu` with `nu + A` in range.
    pub checked_norms: usize,
    /// Number of indices `nu` with `nu + B` in range.
    pub checked_remainders: usize,
    /// 1-based `nu` with `P_(nu+A) < 2 P_nu`.
    pub norm_violations: Vec<usize>,
    /// 1-based `nu` with `r_(nu+B) > r_nu / 2`.
    pub remainder_violations: Vec<usize>,
}

impl GrowthCheck {
    pub fn ok(&self) -> bool {
        self.norm_violations.is_empty() && self.remainder_violations.is_empty()
    }
}

/// Checks `P_(nu+A) >= 2 P_nu` and `r_(nu+B) <= r_nu / 2` at every index
/// where both sides are available. Sequences shorter than the lags are
/// checked vacuously.
pub fn growth_violations(seq: &BestApproxSequence) -> Result<GrowthCheck> {
    let (a, b) = growth_constants(seq.n(), seq.m());
    let (a, b) = (a as usize, b as usize);
    let recs = &seq.records;
    let mut out = GrowthCheck {
        a,
        b,
        checked_norms: 0,
        checked_remainders: 0,
        norm_violations: Vec::new(),
        remainder_violations: Vec::new(),
    };
    for i in 0..recs.len() {
        if i + a < recs.len() {
            out.checked_norms += 1;
            if recs[i + a].norm < 2 * recs[i].norm {
                out.norm_violations.push(i + 1);
            }
        }
        if i + b < recs.len() {
            out.checked_remainders += 1;
            let half = &recs[i].r * &Scalar::ratio(1, 2).expect("nonzero");
            if !recs[i + b].r.le_certified(&half)? {
                out.remainder_violations.push(i + 1);
            }
        }
    }
    Ok(out)
}

pub fn check_growth_props(seq: &BestApproxSequence) -> Result<ExperimentReport> {
    if let Some(w) = &seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    let g = growth_violations(seq)?;
    if seq.len() <= g.a {
        return Err(Error::TooShort {
            needed: g.a + 1,
            have: seq.len(),
        });
    }
    let status = if g.ok() { Status::Pass } else { Status::Fail };
    let summary = format!(
        "A = {}, B = {}: {} norm and {} remainder violations over {} and {} indices",
        g.a,
        g.b,
        g.norm_violations.len(),
        g.remainder_violations.len(),
        g.checked_norms,
        g.checked_remainders
    );
    let mut r = ExperimentReport::new("check_growth_props", status, summary)
        .metric("A", g.a)
        .metric("B", g.b)
        .metric("records", seq.len())
        .metric("t_max", seq.t_max)
        .metric("checked_norms", g.checked_norms)
        .metric("checked_remainders", g.checked_remainders);
    for &nu in &g.norm_violations {
        r.violations.push(json!({"kind": "norm_doubling", "nu": nu}));
    }
    for &nu in &g.remainder_violations {
        r.violations.push(json!({"kind": "remainder_halving", "nu": nu}));
    }
    Ok(r)
}

/// Finite-range surrogates of the Diophantine exponents.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Exponents {
    /// `min` over the tail of `-log r_nu / log P_(nu+1)`.
    pub omega_hat: f64,
    /// `max` over the tail of `-log r_nu / log P_nu`.
    pub omega: f64,
    /// 0-based index of the first tail record.
    pub tail_start: usize,
}

/// Exponent estimators from `(norm, remainder)` records; the first
/// `discard` fraction of records is ignored.
pub(crate) fn exponents_from(norms: &[u64], values: &[f64], discard: f64) -> Result<Exponents> {
    if norms.len() < 5 {
        return Err(Error::TooShort {
            needed: 5,
            have: norms.len(),
        });
    }
    if !(0.0..1.0).contains(&discard) {
        return Err(Error::Invalid(format!("tail discard fraction {discard} must lie in [0, 1)")));
    }
    let mut start = (discard * norms.len() as f64).floor() as usize;
    // log P_nu vanishes at P = 1.
    while start < norms.len() && norms[start] <= 1 {
        start += 1;
    }
    if start + 1 >= norms.len() {
        return Err(Error::TooShort {
            needed: start + 2,
            have: norms.len(),
        });
    }
    let mut omega = f64::NEG_INFINITY;
    let mut omega_hat = f64::INFINITY;
    for i in start..norms.len() {
        let lr = -values[i].ln();
        omega = omega.max(lr / (norms[i] as f64).ln());
        if i + 1 < norms.len() {
            omega_hat = omega_hat.min(lr / (norms[i + 1] as f64).ln());
        }
    }
    Ok(Exponents {
        omega_hat,
        omega,
        tail_start: start,
    })
}

pub fn estimate_exponents(seq: &BestApproxSequence) -> Result<Exponents> {
    estimate_exponents_with(seq, 0.2)
}

pub fn estimate_exponents_with(seq: &BestApproxSequence, discard: f64) -> Result<Exponents> {
    if let Some(w) = &seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    let norms = seq.norms();
    let values: Vec<f64> = seq.records.iter().map(|r| r.r.to_f64()).collect();
    exponents_from(&norms, &values, discard)
}

/// Dirichlet and approximability checks against `f` on integer `T` in
/// `[t_lo, t_hi]`, with the normalizations `||.||^n <= f(T)`, `|q|^m <= T`.
pub fn classify(
    seq: &BestApproxSequence,
    f: &ApproxFunction,
    t_lo: u64,
    t_hi: u64,
) -> Result<ExperimentReport> {
    let (n, m) = (seq.n() as u32, seq.m() as u32);
    if t_lo < 1 || t_hi < t_lo {
        return Err(Error::Invalid(format!("bad T range [{t_lo}, {t_hi}]")));
    }
    if int_root_floor(t_hi, m) > seq.t_max {
        return Err(Error::OutOfRange(format!(
            "T = {t_hi} needs |q| up to {}, but the sequence is certified to {}",
            int_root_floor(t_hi, m),
            seq.t_max
        )));
    }
    let mut first_fail: Option<u64> = None;
    let mut fails = 0u64;
    for t in t_lo..=t_hi {
        let fv = f.eval(&Scalar::from_int(t as i64))?;
        let root = int_root_floor(t, m);
        let holds = if root == 0 {
            false
        } else {
            seq.psi_int(root)?.pow(n).le_certified(&fv)?
        };
        if !holds {
            fails += 1;
            first_fail.get_or_insert(t);
        }
    }
    let mut approx = 0usize;
    let mut approx_checked = 0usize;
    for rec in &seq.records {
        let Some(pm) = rec.norm.checked_pow(m) else { continue };
        let arg = Scalar::from_int(pm as i64);
        if !f.in_domain(pm as f64) {
            continue;
        }
        approx_checked += 1;
        if rec.r.pow(n).le_certified(&f.eval(&arg)?)? {
            approx += 1;
        }
    }
    let holds = fails == 0;
    let mut r = ExperimentReport::new(
        "classify",
        Status::Diagnostic,
        if holds {
            format!("Dirichlet system solvable at every integer T in [{t_lo}, {t_hi}]")
        } else {
            format!("Dirichlet system fails at {fails} values of T; first at T = {}", first_fail.unwrap_or(0))
        },
    )
    .metric("dirichlet_holds", holds)
    .metric("first_failing_T", first_fail)
    .metric("failing_count", fails)
    .metric("approximable_records", approx)
    .metric("records_checked", approx_checked)
    .metric("t_max", seq.t_max)
    .caveat("finite range only: says nothing about T beyond the range");
    if let Some(w) = &seq.trivially_singular_witness {
        r = r.metric("trivially_singular_witness", w).caveat("trivially singular: remainder 0 from |q| = |witness| on");
    }
    if let Some(last) = seq.records.last() {
        r = r.metric("last_remainder", scalar_json(&last.r));
    }
    Ok(r)
}
