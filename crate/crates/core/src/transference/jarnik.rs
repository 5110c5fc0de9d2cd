//! Finite-range check of Jarník's uniform transference.
//!
//! With `rho` inverse to `t -> 1/psi(t)`, the hypothesis
//! `psi_(Theta^T)(Y) >= psi(Y)` at `Y = rho(t/kappa)` gives
//! `psi_(Theta,eta)(t) rho(t/kappa) <= kappa`.

use serde::Serialize;
use serde_json::json;

use super::kappa_rational;
use crate::approx_functions::{invert, ApproxFunction};
use crate::best_approx::{compute_best_approx_with, compute_inhom_with, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::numerics::scalar::rational_to_f64;
use crate::numerics::{MatrixNM, Scalar, VectorN};
use crate::report::{ExperimentReport, Status};

/// Which form of the hypothesis is checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JarnikCase {
    /// Hypothesis on every `Y` of the induced range; conclusion at every `t`.
    AllLarge,
    /// Hypothesis only at sampled `Y` (the jump points of `psi_(Theta^T)`);
    /// conclusion at the matching `t = kappa/psi(Y)`. A finite stand-in for
    /// "an unbounded set of t".
    SampledUnbounded,
}

/// Upper end of `x` as an `f64` that is not below `x`.
fn upper_f64(x: &Scalar) -> f64 {
    let u = rational_to_f64(&x.upper());
    u + u.abs() * 4.0 * f64::EPSILON
}

pub fn jarnik_uniform_check(
    theta: &MatrixNM,
    eta: &VectorN,
    psi_bound: &ApproxFunction,
    t_lo: f64,
    t_hi: f64,
    case: JarnikCase,
) -> Result<ExperimentReport> {
    let (n, m) = (theta.n(), theta.m());
    if eta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: eta.dim() });
    }
    if !(t_lo >= 1.0 && t_hi >= t_lo && t_hi.is_finite()) {
        return Err(Error::Invalid(format!("bad t range [{t_lo}, {t_hi}]")));
    }
    let kap_q = kappa_rational(n, m);
    let kap = rational_to_f64(&kap_q);
    let limit = kap * (1.0 + 1e-9);
    let rho = |s: f64| invert(psi_bound, 1.0 / s);
    let y_lo = rho(t_lo / kap)?;
    let y_hi = rho(t_hi / kap)?;
    // Slightly past y_hi so a float just below an integer still covers it.
    let y_cover = y_hi * (1.0 + 1e-9);
    let y_max = y_cover.floor().max(1.0) as u64;
    let tr = compute_best_approx_with(&theta.transpose(), y_max, DEFAULT_BUDGET)?;
    let t_max = t_hi.floor() as u64;
    let inh = compute_inhom_with(theta, eta, t_max, DEFAULT_BUDGET)?;

    let mut r = ExperimentReport::new("jarnik_uniform_check", Status::Pass, "")
        .metric("case", case)
        .metric("kappa", kap_q.to_string())
        .metric("t_range", [t_lo, t_hi])
        .metric("hypothesis_Y_range", [y_lo, y_hi]);
    if y_lo < 1.0 {
        r = r.caveat("the hypothesis is vacuous for Y < 1, where no nonzero y exists");
    }

    // Hypothesis checkpoints: where psi_bound is largest on each step.
    let mut checkpoints: Vec<(f64, Scalar, Scalar)> = Vec::new();
    let ts_zero = tr
        .trivially_singular_witness
        .as_ref()
        .map(|w| crate::numerics::int_sup_norm(w) as f64);
    if y_lo >= 1.0 {
        let here = tr.psi(y_lo.min(tr.t_max as f64))?;
        checkpoints.push((y_lo, here, Scalar::enclose_f64(kap / t_lo, 1e-12, 64)?));
    }
    for rec in &tr.records {
        let p = rec.norm as f64;
        if p > y_lo && p <= y_cover {
            checkpoints.push((p, rec.r.clone(), psi_bound.eval_at(p)?));
        }
    }
    if let Some(z) = ts_zero {
        if z <= y_cover {
            checkpoints.push((z.max(y_lo), Scalar::zero(), psi_bound.eval_at(z.max(y_lo))?));
        }
    }
    let mut hyp_fail: Option<f64> = None;
    let mut holding: Vec<(f64, f64)> = Vec::new();
    for (y, val, bound) in &checkpoints {
        let ok = bound.le_certified(val)?;
        if ok {
            holding.push((*y, bound.to_f64()));
        } else if hyp_fail.is_none() {
            hyp_fail = Some(*y);
        }
    }
    r = r.metric("hypothesis_checkpoints", checkpoints.len());

    let value_at = |t: f64| inh.psi(t);
    let mut points: Vec<(f64, f64, &'static str)> = Vec::new();
    match case {
        JarnikCase::AllLarge => {
            if let Some(y) = hyp_fail {
                let t = kap / psi_bound.eval_f64(y)?;
                r.status = Status::HypothesisFailed;
                r.summary = format!(
                    "hypothesis fails at Y = {y} (t = {t:.6}); no verdict on the conclusion"
                );
                return Ok(r.metric("hypothesis_fails_at_Y", y).metric("hypothesis_fails_at_t", t));
            }
            // The sup over a step [Q_nu, Q_(nu+1)) is the left limit at its
            // right end, since rho increases.
            let jumps = inh.jump_norms();
            points.push((t_lo, upper_f64(&value_at(t_lo)?) * rho(t_lo / kap)?, "start"));
            let mut prev = value_at(t_lo)?;
            for &qn in &jumps {
                let t = qn as f64;
                if t <= t_lo || t > t_hi {
                    continue;
                }
                let rt = rho(t / kap)?;
                points.push((t, upper_f64(&prev) * rt, "left_limit"));
                let v = value_at(t)?;
                points.push((t, upper_f64(&v) * rt, "jump"));
                prev = v;
            }
            points.push((t_hi, upper_f64(&prev) * rho(t_hi / kap)?, "end"));
        }
        JarnikCase::SampledUnbounded => {
            if holding.is_empty() {
                r.status = Status::HypothesisFailed;
                r.summary = "hypothesis holds at no sampled Y; no verdict".into();
                return Ok(r);
            }
            for &(y, psi_y) in &holding {
                let t = (kap / psi_y).min(t_hi);
                if t < 1.0 {
                    continue;
                }
                points.push((t, upper_f64(&value_at(t)?) * y, "sampled"));
            }
            r = r
                .metric("sampled_hypothesis_holds", holding.len())
                .caveat("sampled-unbounded surrogate: finitely many Y stand in for an unbounded set");
        }
    }
    let mut max = 0.0f64;
    let mut arg = t_lo;
    for &(t, v, kind) in &points {
        if v > max {
            max = v;
            arg = t;
        }
        if v > limit {
            r.violations.push(json!({"t": t, "value": v, "point": kind}));
        }
    }
    r.status = if r.violations.is_empty() { Status::Pass } else { Status::Fail };
    r.summary = format!(
        "max psi_eta(t) rho(t/kappa) = {max:.6} at t = {arg} over {} points; kappa = {kap}",
        points.len()
    );
    Ok(r.metric("max_product", max)
        .metric("argmax_t", arg)
        .metric("points_checked", points.len())
        .metric("slack", 1e-9)
        .caveat("rho comes from monotone bisection; the kappa side carries a 1e-9 relative slack"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_scalar;
    use num_rational::BigRational;

    fn bound(c: (i64, i64)) -> ApproxFunction {
        ApproxFunction::f1()
            .scaled(BigRational::new(c.0.into(), c.1.into()))
            .unwrap()
    }

    #[test]
    fn golden_half() {
        let th = MatrixNM::scalar(parse_scalar("golden", 256).unwrap());
        let eta = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        let r = jarnik_uniform_check(&th, &eta, &bound((1, 20)), 10.0, 1000.0, JarnikCase::AllLarge).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.get_f64("max_product").unwrap() <= 2.0);
        let r = jarnik_uniform_check(&th, &VectorN::zeros(1), &bound((1, 20)), 10.0, 1000.0, JarnikCase::AllLarge).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        let r = jarnik_uniform_check(&th, &eta, &bound((1, 20)), 10.0, 1000.0, JarnikCase::SampledUnbounded).unwrap();
        assert!(r.passed(), "{}", r.to_json());
    }

    #[test]
    fn falsified_hypothesis() {
        let th = MatrixNM::scalar(parse_scalar("golden", 256).unwrap());
        let eta = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        let r = jarnik_uniform_check(&th, &eta, &bound((2, 1)), 10.0, 1000.0, JarnikCase::AllLarge).unwrap();
        assert_eq!(r.status, Status::HypothesisFailed);
        assert!(r.summary.contains("hypothesis fails at"));
    }
}
