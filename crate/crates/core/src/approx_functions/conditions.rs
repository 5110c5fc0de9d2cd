//! Grid certificates for the regularity conditions on approximating
//! functions. Each check states what holds on the sampled grid and nothing
//! more.

use num_rational::BigRational;
use serde_json::json;

use super::ApproxFunction;
use crate::error::{Error, Result};
use crate::numerics::{Scalar, DEFAULT_BITS};
use crate::report::{ExperimentReport, Status};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionParams {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl ConditionParams {
    pub fn new(gamma: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(gamma > 0.0 && alpha > 0.0 && beta > 0.0) {
            return Err(Error::Invalid("gamma, alpha and beta must be positive".into()));
        }
        Ok(ConditionParams { gamma, alpha, beta })
    }
}

fn exact(x: f64) -> Result<Scalar> {
    Scalar::from_f64_exact(x)
}

/// `x^e` as an enclosure; exact when `x` is a float and `e` an integer.
fn pow_scalar(x: f64, e: f64) -> Result<Scalar> {
    if e.fract() == 0.0 && e.abs() < 64.0 {
        let base = BigRational::from_float(x).ok_or_else(|| Error::Invalid("non-finite base".into()))?;
        let k = e as i32;
        return Ok(Scalar::Exact(num_traits::pow::Pow::pow(&base, k)));
    }
    let v = x.powf(e);
    Scalar::enclose_f64(v, 1e-14 * (4.0 + (e * x.ln()).abs()), DEFAULT_BITS)
}

#[derive(Default)]
struct Tally {
    holds: usize,
    fails: Vec<serde_json::Value>,
    undecided: usize,
}

impl Tally {
    fn record(&mut self, lhs: &Scalar, rhs: &Scalar, point: serde_json::Value) {
        match lhs.le_certified(rhs) {
            Ok(true) => self.holds += 1,
            Ok(false) => self.fails.push(point),
            Err(_) => self.undecided += 1,
        }
    }

    fn finish(self, name: &str, what: &str) -> ExperimentReport {
        let status = if !self.fails.is_empty() {
            Status::Fail
        } else if self.undecided > 0 {
            Status::Diagnostic
        } else {
            Status::Pass
        };
        let summary = match status {
            Status::Pass => format!("{what} holds at all {} grid points", self.holds),
            Status::Fail => format!("{what} fails at {} grid points", self.fails.len()),
            _ => format!(
                "{what}: no failure, but {} points are undecided at the guard precision",
                self.undecided
            ),
        };
        let mut r = ExperimentReport::new(name, status, summary)
            .metric("holds", self.holds)
            .metric("fails", self.fails.len())
            .metric("undecided", self.undecided)
            .caveat("grid certificate only; no claim between or beyond grid points");
        r.violations = self.fails;
        r
    }
}

/// `f(CT) <= C^-gamma f(T)` on the grid. Also reports the largest gamma the
/// grid admits.
pub fn check_technical(
    f: &ApproxFunction,
    params: &ConditionParams,
    c_grid: &[f64],
    t_grid: &[f64],
) -> Result<ExperimentReport> {
    let mut tally = Tally::default();
    let mut gamma_max = f64::INFINITY;
    for &c in c_grid {
        if !(c > 1.0) {
            return Err(Error::Domain(format!("C = {c} must exceed 1")));
        }
        for &t in t_grid {
            let ct = c * t;
            let lhs = f.eval(&exact(ct)?)?;
            let ft = f.eval(&exact(t)?)?;
            let rhs = &pow_scalar(c, -params.gamma)? * &ft;
            tally.record(&lhs, &rhs, json!({"C": c, "T": t}));
            let g = (ft.to_f64() / lhs.to_f64()).ln() / c.ln();
            gamma_max = gamma_max.min(g);
        }
    }
    Ok(tally
        .finish("check_technical", &format!("f(CT) <= C^-{} f(T)", params.gamma))
        .metric("gamma", params.gamma)
        .metric("gamma_max_on_grid", gamma_max))
}

/// `lambda(T^delta) >= delta^-alpha lambda(T)` for `delta` in `(0, 1)`.
pub fn check_lambdatech(
    lambda: &ApproxFunction,
    params: &ConditionParams,
    delta_grid: &[f64],
    t_grid: &[f64],
) -> Result<ExperimentReport> {
    let mut tally = Tally::default();
    let mut alpha_max = f64::INFINITY;
    for &d in delta_grid {
        if !(d > 0.0 && d < 1.0) {
            return Err(Error::Domain(format!("delta = {d} must lie in (0, 1)")));
        }
        for &t in t_grid {
            let td = t.powf(d);
            let lhs = lambda.eval(&Scalar::enclose_f64(td, 4.0 * f64::EPSILON, DEFAULT_BITS)?)?;
            let lt = lambda.eval(&exact(t)?)?;
            let rhs = &pow_scalar(d, -params.alpha)? * &lt;
            tally.record(&rhs, &lhs, json!({"delta": d, "T": t}));
            alpha_max = alpha_max.min((lhs.to_f64() / lt.to_f64()).ln() / (1.0 / d).ln());
        }
    }
    Ok(tally
        .finish("check_lambdatech", &format!("lambda(T^delta) >= delta^-{} lambda(T)", params.alpha))
        .metric("alpha", params.alpha)
        .metric("alpha_max_on_grid", alpha_max))
}

/// `f(T) >= T^-beta` on the grid.
pub fn check_finite_exponent(
    f: &ApproxFunction,
    params: &ConditionParams,
    t_grid: &[f64],
) -> Result<ExperimentReport> {
    let mut tally = Tally::default();
    let mut beta_min: f64 = 0.0;
    for &t in t_grid {
        let ft = f.eval(&exact(t)?)?;
        let bound = pow_scalar(t, -params.beta)?;
        tally.record(&bound, &ft, json!({"T": t}));
        if t > 1.0 {
            beta_min = beta_min.max(-ft.to_f64().ln() / t.ln());
        }
    }
    Ok(tally
        .finish("check_finite_exponent", &format!("f(T) >= T^-{}", params.beta))
        .metric("beta", params.beta)
        .metric("beta_min_on_grid", beta_min))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pl(a: i64, b: i64) -> ApproxFunction {
        ApproxFunction::power_log_ratio((a, 1), (b, 1)).unwrap()
    }

    fn grids() -> (Vec<f64>, Vec<f64>) {
        (vec![1.5, 2.0, 4.0, 10.0], vec![3.0, 10.0, 100.0, 1e4])
    }

    #[test]
    fn f1_holds_with_equality() {
        let (c, t) = grids();
        let p = ConditionParams::new(1.0, 1.0, 1.0).unwrap();
        let r = check_technical(&ApproxFunction::f1(), &p, &c, &t).unwrap();
        assert!(r.passed(), "{}", r.summary);
        assert!((r.get_f64("gamma_max_on_grid").unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_square_holds() {
        let (c, t) = grids();
        let p = ConditionParams::new(2.0, 1.0, 1.0).unwrap();
        assert!(check_technical(&pl(2, 0), &p, &c, &t).unwrap().passed());
    }

    #[test]
    fn growing_log_fails() {
        let (c, t) = grids();
        let p = ConditionParams::new(1.0, 1.0, 1.0).unwrap();
        let r = check_technical(&pl(1, -1), &p, &c, &t).unwrap();
        assert_eq!(r.status, Status::Fail);
        assert!(r.get_f64("gamma_max_on_grid").unwrap() < 1.0);
    }

    #[test]
    fn lambda_and_exponent() {
        let lam = ApproxFunction::power_log_ratio((0, 1), (2, 1)).unwrap();
        let p = ConditionParams::new(1.0, 1.5, 2.0).unwrap();
        let r = check_lambdatech(&lam, &p, &[0.25, 0.5, 0.9], &[10.0, 1e3, 1e6]).unwrap();
        assert!(r.passed(), "{}", r.summary);
        assert!((r.get_f64("alpha_max_on_grid").unwrap() - 2.0).abs() < 1e-9);
        let r = check_finite_exponent(&pl(1, 1), &p, &[3.0, 10.0, 1e3]).unwrap();
        assert!(r.passed());
        let strict = ConditionParams::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(check_finite_exponent(&pl(1, 1), &strict, &[3.0, 10.0]).unwrap().status, Status::Fail);
    }
}
