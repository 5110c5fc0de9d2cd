//! Transference between `Theta` and `Theta^T` with explicit constants.
//!
//! The central tool is Cassels' lemma: if `||Theta^T y|| >= kappa/Q` for all
//! `0 < |y| <= Y`, then every shift `eta` has some `|q| <= Q` with
//! `||Theta q - eta|| <= kappa/Y`. [`cassels_solve`] verifies the hypothesis
//! by full enumeration and then finds the promised `q`.

mod jarnik;

pub use jarnik::{jarnik_uniform_check, JarnikCase};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;
use serde_json::Value;

use crate::best_approx::shells::check_budget;
use crate::best_approx::{
    compute_best_approx_with, compute_inhom_with, estimate_exponents, exponents_from,
    BestApproxSequence, Exponents, DEFAULT_BUDGET,
};
use crate::error::{Error, Result};
use crate::numerics::{dist_to_int, int_sup_norm, MatrixNM, Scalar, VectorN};
use crate::report::{scalar_json, ExperimentReport, Status};

/// `kappa = 2^(1-m-n) ((m+n)!)^2`.
pub fn kappa(n: usize, m: usize) -> Scalar {
    Scalar::Exact(kappa_rational(n, m))
}

pub fn kappa_rational(n: usize, m: usize) -> BigRational {
    let s = n + m;
    let fact: BigInt = (1..=s as u64).map(BigInt::from).product();
    let num = &fact * &fact * BigInt::from(2);
    BigRational::new(num, BigInt::one() << s)
}

/// Lags `(A, B)` with `A = 3^(n+m) - 1` and `B = 2^(m-1) (2^(2n) - 2^n)`.
pub fn growth_constants(n: usize, m: usize) -> (u64, u64) {
    let a = 3u64.pow((n + m) as u32) - 1;
    let b = (1u64 << (m - 1)) * ((1u64 << (2 * n)) - (1u64 << n));
    (a, b)
}

/// One line of the hypothesis audit: a best approximation `y` of `Theta^T`
/// and its remainder. Every `0 < |y'| <= Y` has remainder at least the last
/// logged one.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisEntry {
    pub y: Vec<i64>,
    #[serde(serialize_with = "ser_scalar")]
    pub dist: Scalar,
}

fn ser_scalar<S: serde::Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    scalar_json(x).serialize(s)
}

fn ser_rational<S: serde::Serializer>(x: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    x.to_string().serialize(s)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransferenceCertificate {
    #[serde(rename = "Y", serialize_with = "ser_rational")]
    pub y_bound: BigRational,
    #[serde(rename = "Q", serialize_with = "ser_rational")]
    pub q_bound: BigRational,
    #[serde(serialize_with = "ser_rational")]
    pub kappa: BigRational,
    /// `kappa / Q`
    #[serde(serialize_with = "ser_rational")]
    pub hypothesis_bound: BigRational,
    pub hypothesis_log: Vec<HypothesisEntry>,
    pub witness_q: Vec<i64>,
    #[serde(serialize_with = "ser_scalar")]
    pub achieved: Scalar,
    /// `kappa / Y`
    #[serde(serialize_with = "ser_rational")]
    pub conclusion_bound: BigRational,
}

impl TransferenceCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("certificate serializes")
    }
}

fn floor_u64(x: &BigRational) -> Result<u64> {
    x.floor()
        .to_integer()
        .to_u64()
        .ok_or_else(|| Error::Invalid(format!("bound {x} out of range")))
}

/// Best approximations of `Theta^T` up to `floor(Y)`, or `None` when that is 0.
fn transpose_sequence(theta: &MatrixNM, y: &BigRational, budget: u128) -> Result<Option<BestApproxSequence>> {
    let yf = floor_u64(y)?;
    if yf == 0 {
        return Ok(None);
    }
    compute_best_approx_with(&theta.transpose(), yf, budget).map(Some)
}

/// Smallest `Q` for which the lemma's hypothesis at `Y` can be certified:
/// `kappa` over the lower end of `psi_(Theta^T)(Y)`.
pub fn minimal_admissible_q(theta: &MatrixNM, y: &BigRational) -> Result<BigRational> {
    let seq = transpose_sequence(theta, y, DEFAULT_BUDGET)?
        .ok_or_else(|| Error::Invalid("Y must be at least 1 for a nonvacuous hypothesis".into()))?;
    if let Some(w) = seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w });
    }
    let r = seq.records.last().expect("norm 1 is always a record").r.lower();
    if !r.is_positive() {
        return Err(Error::precision("psi of the transpose is not certified positive"));
    }
    Ok(kappa_rational(theta.n(), theta.m()) / r)
}

pub fn cassels_solve(theta: &MatrixNM, eta: &VectorN, y: &BigRational, q: &BigRational) -> Result<TransferenceCertificate> {
    cassels_solve_with(theta, eta, y, q, DEFAULT_BUDGET)
}

pub fn cassels_solve_with(
    theta: &MatrixNM,
    eta: &VectorN,
    y: &BigRational,
    q: &BigRational,
    budget: u128,
) -> Result<TransferenceCertificate> {
    let (n, m) = (theta.n(), theta.m());
    if eta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: eta.dim() });
    }
    if !y.is_positive() || !q.is_positive() {
        return Err(Error::Invalid("Y and Q must be positive".into()));
    }
    let kap = kappa_rational(n, m);
    let hyp_bound = &kap / q;
    let concl_bound = &kap / y;
    let yf = floor_u64(y)?;
    let qf = floor_u64(q)?;
    check_budget(n, yf, budget)?;
    check_budget(m, qf, budget)?;

    let hyp = Scalar::Exact(hyp_bound.clone());
    let mut log = Vec::new();
    if let Some(seq) = transpose_sequence(theta, y, budget)? {
        if let Some(w) = &seq.trivially_singular_witness {
            return Err(Error::HypothesisViolated {
                y: w.clone(),
                dist: "0".into(),
                bound: hyp_bound.to_string(),
            });
        }
        for rec in &seq.records {
            log.push(HypothesisEntry { y: rec.p.clone(), dist: rec.r.clone() });
        }
        // The last record is the global minimum over 0 < |y| <= Y.
        let last = seq.records.last().expect("norm 1 is always a record");
        if !hyp.le_certified(&last.r)? {
            return Err(Error::HypothesisViolated {
                y: last.p.clone(),
                dist: last.r.to_decimal(12),
                bound: hyp_bound.to_string(),
            });
        }
    }

    let bound = Scalar::Exact(concl_bound.clone());
    let zero_q = vec![0i64; m];
    let zero_value = dist_to_int(eta);
    let mut found: Option<(Vec<i64>, Scalar)> = None;
    if qf >= 1 {
        // The first record under the bound has the smallest norm among all
        // admissible q.
        let inh = compute_inhom_with(theta, eta, qf, budget)?;
        for rec in &inh.records {
            if rec.value.le_certified(&bound)? {
                found = Some((rec.q.clone(), rec.value.clone()));
                break;
            }
        }
        if found.is_none() {
            if let Some(w) = &inh.trivially_singular_witness {
                found = Some((w.clone(), Scalar::zero()));
            }
        }
    }
    if found.is_none() && !eta.is_zero() && zero_value.le_certified(&bound)? {
        found = Some((zero_q, zero_value));
    }
    let (witness_q, achieved) = found.ok_or_else(|| {
        if eta.is_zero() {
            Error::Precondition(format!(
                "no nonzero q with |q| <= {qf} reaches {concl_bound}; only q = 0 does"
            ))
        } else {
            Error::InternalContradiction(format!(
                "hypothesis verified but no |q| <= {qf} reaches {concl_bound}"
            ))
        }
    })?;
    debug_assert!(int_sup_norm(&witness_q) <= qf);
    Ok(TransferenceCertificate {
        y_bound: y.clone(),
        q_bound: q.clone(),
        kappa: kap,
        hypothesis_bound: hyp_bound,
        hypothesis_log: log,
        witness_q,
        achieved,
        conclusion_bound: concl_bound,
    })
}

/// Which first term enters the scalar-product bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundVariant {
    /// `m |q| ||Theta^T y||`: holds for every `q`, `y`.
    PerVector,
    /// `m |q| psi_(Theta^T)(|y|)`: the form used along best approximations
    /// `y`, where it coincides with the per-vector term.
    BestApprox,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarBound {
    /// `||eta . y||`
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub holds: bool,
}

/// `||eta . y|| <= m |q| ||Theta^T y|| + n |y| ||Theta q - eta||`.
pub fn scalar_bound_check(
    theta: &MatrixNM,
    eta: &VectorN,
    q: &[i64],
    y: &[i64],
    variant: BoundVariant,
) -> Result<ScalarBound> {
    let (n, m) = (theta.n(), theta.m());
    if eta.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: eta.dim() });
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: y.len() });
    }
    if q.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: q.len() });
    }
    if y.iter().all(|&v| v == 0) {
        return Err(Error::Invalid("y must be nonzero".into()));
    }
    let lhs = eta.dot_ints(y)?.dist_to_int();
    let ty = dist_to_int(&theta.transpose().mul_ints(y)?);
    let first = match variant {
        BoundVariant::PerVector => ty,
        BoundVariant::BestApprox => {
            let seq = compute_best_approx_with(&theta.transpose(), int_sup_norm(y), DEFAULT_BUDGET)?;
            seq.psi_int(int_sup_norm(y))?
        }
    };
    let qn = int_sup_norm(q) as i64;
    let yn = int_sup_norm(y) as i64;
    let inh = dist_to_int(&theta.mul_ints(q)?.sub(eta)?);
    let rhs = &first.mul_int(m as i64 * qn) + &inh.mul_int(n as i64 * yn);
    let holds = lhs.le_certified(&rhs)?;
    Ok(ScalarBound { lhs, rhs, holds })
}

/// Estimates of `omega(Theta, eta)`, `omega_hat(Theta, eta)` and the
/// exponents of `Theta^T`, with the two transference residuals.
pub fn exponent_inequalities(theta: &MatrixNM, eta: &VectorN, t_max: u64) -> Result<ExperimentReport> {
    exponent_inequalities_with(theta, eta, t_max, -0.1)
}

pub fn exponent_inequalities_with(
    theta: &MatrixNM,
    eta: &VectorN,
    t_max: u64,
    tolerance: f64,
) -> Result<ExperimentReport> {
    let tr = compute_best_approx_with(&theta.transpose(), t_max, DEFAULT_BUDGET)?;
    let e_tr: Exponents = estimate_exponents(&tr)?;
    let inh = compute_inhom_with(theta, eta, t_max, DEFAULT_BUDGET)?;
    if let Some(w) = &inh.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    let norms: Vec<u64> = inh.records.iter().map(|r| r.norm).collect();
    let values: Vec<f64> = inh.records.iter().map(|r| r.value.to_f64()).collect();
    let e_in = exponents_from(&norms, &values, 0.2)?;
    let r1 = e_in.omega - 1.0 / e_tr.omega_hat;
    let r2 = e_in.omega_hat - 1.0 / e_tr.omega;
    let ok = r1 >= tolerance && r2 >= tolerance;
    Ok(ExperimentReport::new(
        "exponent_inequalities",
        if ok { Status::Pass } else { Status::Fail },
        format!("residuals {r1:.4} and {r2:.4} against tolerance {tolerance}"),
    )
    .metric("omega_eta", e_in.omega)
    .metric("omega_hat_eta", e_in.omega_hat)
    .metric("omega_transpose", e_tr.omega)
    .metric("omega_hat_transpose", e_tr.omega_hat)
    .metric("residual_omega", r1)
    .metric("residual_omega_hat", r2)
    .metric("tolerance", tolerance)
    .metric("t_max", t_max)
    .metric("inhomogeneous_records", inh.records.len())
    .metric("transpose_records", tr.records.len())
    .caveat("finite-range estimators; the inequalities are statements about limits")
    .caveat("the tolerance absorbs truncation bias of order 1/log t_max"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_scalar;

    fn golden() -> MatrixNM {
        MatrixNM::scalar(parse_scalar("golden", 256).unwrap())
    }

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn constants() {
        assert_eq!(kappa(1, 1), Scalar::from_int(2));
        assert_eq!(kappa(2, 1), Scalar::from_int(9));
        assert_eq!(kappa(1, 2), Scalar::from_int(9));
        assert_eq!(kappa(2, 2), Scalar::from_int(72));
        assert_eq!(growth_constants(1, 1), (8, 2));
        assert_eq!(growth_constants(2, 1), (26, 12));
        assert_eq!(growth_constants(1, 2), (26, 4));
        assert_eq!(growth_constants(2, 2), (80, 24));
    }

    #[test]
    fn cassels_golden() {
        let eta = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        let c = cassels_solve(&golden(), &eta, &rat(5, 1), &rat(23, 1)).unwrap();
        assert_eq!(c.witness_q, vec![1]);
        assert!((c.achieved.to_f64() - 0.1180339887).abs() < 1e-9);
        assert_eq!(c.hypothesis_log.len(), 4);
        let v = c.to_value();
        assert_eq!(v["conclusion_bound"], "2/5");
        assert_eq!(v["hypothesis_log"][3]["y"][0], 5);
    }

    #[test]
    fn cassels_violation() {
        let eta = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        match cassels_solve(&golden(), &eta, &rat(5, 1), &rat(10, 1)) {
            Err(Error::HypothesisViolated { y, .. }) => assert_eq!(y, vec![5]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn cassels_homogeneous_needs_nonzero() {
        let eta = VectorN::zeros(1);
        let q = minimal_admissible_q(&golden(), &rat(8, 1)).unwrap();
        let c = cassels_solve(&golden(), &eta, &rat(8, 1), &q).unwrap();
        assert!(c.witness_q.iter().any(|&x| x != 0));
        assert!(c.achieved.le_certified(&Scalar::ratio(2, 8).unwrap()).unwrap());
    }

    #[test]
    fn scalar_bound_example() {
        let eta = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        let b = scalar_bound_check(&golden(), &eta, &[1], &[5], BoundVariant::BestApprox).unwrap();
        assert_eq!(b.lhs, Scalar::ratio(1, 2).unwrap());
        assert!((b.rhs.to_f64() - 0.680340).abs() < 1e-6);
        assert!(b.holds);
        let z = scalar_bound_check(&golden(), &VectorN::zeros(1), &[0], &[3], BoundVariant::PerVector).unwrap();
        assert!(z.lhs.is_certainly_zero());
        assert!(z.holds);
    }

    #[test]
    fn exponents_golden() {
        let eta = VectorN::new(vec![parse_scalar("e", 256).unwrap().checked_div(&Scalar::from_int(10)).unwrap()]).unwrap();
        let r = exponent_inequalities(&golden(), &eta, 10_000).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(matches!(
            exponent_inequalities(&MatrixNM::scalar(Scalar::ratio(1, 3).unwrap()), &eta, 100),
            Err(Error::TriviallySingular { .. })
        ));
    }
}
