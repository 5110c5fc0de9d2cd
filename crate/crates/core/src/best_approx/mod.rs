//! Best approximations and irrationality measure functions.
//!
//! `psi_Theta(t)` is the minimum of `||Theta q||` over `0 < |q| <= t`; the
//! records where it strictly drops are the best approximations. Everything
//! here is computed by exhaustive enumeration over sup-norm shells, so the
//! output is a certificate on `[1, t_max]` and nothing beyond.

mod analysis;
mod io;
pub mod shells;

pub use analysis::{
    check_growth_props, classify, estimate_exponents, estimate_exponents_with, growth_violations,
    Exponents, GrowthCheck,
};
pub(crate) use analysis::exponents_from;
pub use io::{sequence_csv, RecordDoc, SequenceDoc};


use crate::error::{Error, Result};
use crate::numerics::{int_sup_norm, MatrixNM, Scalar, VectorN};
use shells::{check_budget, scan, ShellOrder, Target};

/// Enumeration points allowed when no budget is given.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// One best approximation `p` with its nearest lattice vector `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct BestApproxRecord {
    pub p: Vec<i64>,
    pub a: Vec<i64>,
    /// `|p|`
    pub norm: u64,
    /// `||Theta p|| = |Theta p - a|`
    pub r: Scalar,
}

#[derive(Clone, Debug)]
pub struct BestApproxSequence {
    pub matrix: MatrixNM,
    pub records: Vec<BestApproxRecord>,
    pub t_max: u64,
    /// Some `q` with `Theta q` in `Z^n`; the sequence stops below `|q|`.
    pub trivially_singular_witness: Option<Vec<i64>>,
}

/// Best inhomogeneous approximations of `eta` by `Theta q`, `q != 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct InhomRecord {
    pub q: Vec<i64>,
    pub norm: u64,
    pub value: Scalar,
}

#[derive(Clone, Debug)]
pub struct InhomApproxSequence {
    pub matrix: MatrixNM,
    pub eta: VectorN,
    pub records: Vec<InhomRecord>,
    pub t_max: u64,
    /// Some `q != 0` with `Theta q - eta` in `Z^n`.
    pub trivially_singular_witness: Option<Vec<i64>>,
}

fn validate_t_max(t_max: u64) -> Result<()> {
    if t_max == 0 {
        return Err(Error::Invalid("t_max must be at least 1".into()));
    }
    if t_max > i64::MAX as u64 / 4 {
        return Err(Error::Invalid("t_max too large".into()));
    }
    Ok(())
}

pub fn compute_best_approx(theta: &MatrixNM, t_max: u64) -> Result<BestApproxSequence> {
    compute_best_approx_with(theta, t_max, DEFAULT_BUDGET)
}

pub fn compute_best_approx_with(
    theta: &MatrixNM,
    t_max: u64,
    budget: u128,
) -> Result<BestApproxSequence> {
    validate_t_max(t_max)?;
    check_budget(theta.m(), t_max, budget)?;
    let target = Target { theta, eta: None };
    let sc = scan(target, t_max, ShellOrder::Representatives)?;
    let records = sc
        .records
        .into_iter()
        .map(|h| {
            let a = h.image.nearest_ints()?;
            Ok(BestApproxRecord {
                p: h.q,
                a,
                norm: h.norm,
                r: h.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BestApproxSequence {
        matrix: theta.clone(),
        records,
        t_max,
        trivially_singular_witness: sc.zero_hit,
    })
}

pub fn compute_inhom(theta: &MatrixNM, eta: &VectorN, t_max: u64) -> Result<InhomApproxSequence> {
    compute_inhom_with(theta, eta, t_max, DEFAULT_BUDGET)
}

pub fn compute_inhom_with(
    theta: &MatrixNM,
    eta: &VectorN,
    t_max: u64,
    budget: u128,
) -> Result<InhomApproxSequence> {
    validate_t_max(t_max)?;
    if eta.dim() != theta.n() {
        return Err(Error::DimensionMismatch {
            expected: theta.n(),
            found: eta.dim(),
        });
    }
    check_budget(theta.m(), t_max, budget)?;
    let homogeneous = eta.is_zero();
    let target = Target {
        theta,
        eta: if homogeneous { None } else { Some(eta) },
    };
    // With eta = 0 the antipode carries no new information.
    let order = if homogeneous {
        ShellOrder::Representatives
    } else {
        ShellOrder::Full
    };
    let sc = scan(target, t_max, order)?;
    Ok(InhomApproxSequence {
        matrix: theta.clone(),
        eta: eta.clone(),
        records: sc
            .records
            .into_iter()
            .map(|h| InhomRecord {
                q: h.q,
                norm: h.norm,
                value: h.value,
            })
            .collect(),
        t_max,
        trivially_singular_witness: sc.zero_hit,
    })
}

/// Step-function lookup shared by both sequence kinds: the value of the last
/// record with norm `<= t`, zero past a witness.
fn step_value<'a>(
    norms_values: impl DoubleEndedIterator<Item = (u64, &'a Scalar)>,
    witness: Option<&[i64]>,
    t_max: u64,
    t: f64,
) -> Result<Scalar> {
    if !(t >= 1.0) || t > t_max as f64 {
        return Err(Error::OutOfRange(format!(
            "t = {t} is outside the certified range [1, {t_max}]"
        )));
    }
    let ti = t.floor() as u64;
    if let Some(w) = witness {
        if int_sup_norm(w) <= ti {
            return Ok(Scalar::zero());
        }
    }
    norms_values
        .rev()
        .find(|(n, _)| *n <= ti)
        .map(|(_, v)| v.clone())
        .ok_or_else(|| Error::InternalContradiction("no record at norm 1".into()))
}

impl BestApproxSequence {
    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn m(&self) -> usize {
        self.matrix.m()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_trivially_singular(&self) -> bool {
        self.trivially_singular_witness.is_some()
    }

    pub fn norms(&self) -> Vec<u64> {
        self.records.iter().map(|r| r.norm).collect()
    }

    /// `psi_Theta(t)` for `1 <= t <= t_max`.
    pub fn psi(&self, t: f64) -> Result<Scalar> {
        step_value(
            self.records.iter().map(|r| (r.norm, &r.r)),
            self.trivially_singular_witness.as_deref(),
            self.t_max,
            t,
        )
    }

    /// Value at exact integer argument; avoids float rounding for large `t`.
    pub fn psi_int(&self, t: u64) -> Result<Scalar> {
        self.psi(t as f64)
    }

    /// Norms at which `psi` jumps, within `[lo, hi]`.
    pub fn jumps_in(&self, lo: u64, hi: u64) -> Vec<u64> {
        self.records
            .iter()
            .map(|r| r.norm)
            .filter(|&p| p >= lo && p <= hi)
            .collect()
    }
}

pub fn psi(seq: &BestApproxSequence, t: f64) -> Result<Scalar> {
    seq.psi(t)
}

impl InhomApproxSequence {
    pub fn psi(&self, t: f64) -> Result<Scalar> {
        if self.records.is_empty() && self.trivially_singular_witness.is_none() {
            return Err(Error::InternalContradiction("empty inhomogeneous sequence".into()));
        }
        step_value(
            self.records.iter().map(|r| (r.norm, &r.value)),
            self.trivially_singular_witness.as_deref(),
            self.t_max,
            t,
        )
    }

    pub fn is_trivially_singular(&self) -> bool {
        self.trivially_singular_witness.is_some()
    }

    /// Best `q` with `0 < |q| <= t` and its value.
    pub fn best_up_to(&self, t: u64) -> Option<(Vec<i64>, Scalar)> {
        if let Some(w) = &self.trivially_singular_witness {
            if int_sup_norm(w) <= t {
                return Some((w.clone(), Scalar::zero()));
            }
        }
        self.records
            .iter()
            .rev()
            .find(|r| r.norm <= t)
            .map(|r| (r.q.clone(), r.value.clone()))
    }

    /// Jump points: norms of records and of the witness.
    pub fn jump_norms(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self.records.iter().map(|r| r.norm).collect();
        if let Some(w) = &self.trivially_singular_witness {
            v.push(int_sup_norm(w));
        }
        v
    }
}

/// Integer `floor(x^(1/k))` for `x >= 0`.
pub(crate) fn int_root_floor(x: u64, k: u32) -> u64 {
    if k == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / k as f64).round() as u64;
    while r > 0 && r.checked_pow(k).is_none_or(|v| v > x) {
        r -= 1;
    }
    while (r + 1).checked_pow(k).is_some_and(|v| v <= x) {
        r += 1;
    }
    r
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{dist_to_int, parse_scalar, sup_norm};

    fn golden() -> MatrixNM {
        MatrixNM::scalar(parse_scalar("golden", 256).unwrap())
    }

    fn close(x: &Scalar, v: f64) -> bool {
        (x.to_f64() - v).abs() < 5e-6
    }

    #[test]
    fn golden_thirteen() {
        let seq = compute_best_approx(&golden(), 13).unwrap();
        assert_eq!(seq.norms(), vec![1, 2, 3, 5, 8, 13]);
        let want = [0.38197, 0.23607, 0.14590, 0.09017, 0.05573, 0.03444];
        for (rec, w) in seq.records.iter().zip(want) {
            assert!(close(&rec.r, w), "{} vs {w}", rec.r);
        }
        assert!(seq.trivially_singular_witness.is_none());
    }

    #[test]
    fn records_are_consistent() {
        let seq = compute_best_approx(&golden(), 500).unwrap();
        for rec in &seq.records {
            let img = seq.matrix.mul_ints(&rec.p).unwrap();
            assert!(rec.r.same_as(&dist_to_int(&img)));
            assert!(rec.r.same_as(&sup_norm(&img.sub_ints(&rec.a).unwrap())));
            assert!(rec.p[0] > 0);
        }
    }

    #[test]
    fn trivially_singular() {
        let third = MatrixNM::scalar(Scalar::ratio(1, 3).unwrap());
        let seq = compute_best_approx(&third, 10).unwrap();
        assert_eq!(seq.trivially_singular_witness, Some(vec![3]));
        assert_eq!(seq.norms(), vec![1]);
        assert_eq!(seq.psi(2.0).unwrap(), Scalar::ratio(1, 3).unwrap());
        assert_eq!(seq.psi(3.0).unwrap(), Scalar::zero());

        let row = MatrixNM::from_rows(vec![vec![
            Scalar::ratio(1, 2).unwrap(),
            Scalar::ratio(1, 3).unwrap(),
        ]])
        .unwrap();
        let seq = compute_best_approx(&row, 5).unwrap();
        assert_eq!(seq.trivially_singular_witness, Some(vec![2, 0]));
    }

    #[test]
    fn psi_lookup() {
        let seq = compute_best_approx(&golden(), 13).unwrap();
        assert!(close(&seq.psi(4.0).unwrap(), 0.14590));
        assert!(close(&seq.psi(5.0).unwrap(), 0.09017));
        assert!(close(&seq.psi(1.0).unwrap(), 0.38197));
        assert!(close(&seq.psi(4.99).unwrap(), 0.14590));
        assert!(matches!(seq.psi(0.5), Err(Error::OutOfRange(_))));
        assert!(matches!(seq.psi(14.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn inhomogeneous() {
        let g = golden();
        let zero = VectorN::zeros(1);
        let hom = compute_best_approx(&g, 50).unwrap();
        let inh = compute_inhom(&g, &zero, 50).unwrap();
        assert_eq!(hom.records.len(), inh.records.len());
        for (a, b) in hom.records.iter().zip(&inh.records) {
            assert_eq!(a.p, b.q);
            assert!(a.r.same_as(&b.value));
        }

        let half = VectorN::new(vec![Scalar::ratio(1, 2).unwrap()]).unwrap();
        let m = MatrixNM::scalar(Scalar::ratio(1, 2).unwrap());
        let s = compute_inhom(&m, &half, 4).unwrap();
        assert_eq!(s.trivially_singular_witness, Some(vec![1]));
        assert!(s.records.is_empty());
        assert_eq!(s.psi(1.0).unwrap(), Scalar::zero());

        let s = compute_inhom(&g, &half, 13).unwrap();
        assert_eq!(s.records[0].norm, 1);
        assert_eq!(s.records[0].q, vec![1]);
        assert!(close(&s.records[0].value, 0.11803));
        for w in s.records.windows(2) {
            assert!(w[0].norm < w[1].norm);
            assert!(w[1].value.upper() < w[0].value.lower());
        }
    }

    #[test]
    fn budget_and_validation() {
        assert!(matches!(compute_best_approx(&golden(), 0), Err(Error::Invalid(_))));
        assert!(matches!(
            compute_best_approx_with(&golden(), 1000, 1000),
            Err(Error::Budget { needed: 2001, budget: 1000 })
        ));
    }

    #[test]
    fn low_precision_is_reported() {
        // sqrt(2) - sqrt(2) can never be certified zero.
        let r2 = parse_scalar("sqrt(2)", 64).unwrap();
        let m = MatrixNM::from_rows(vec![vec![r2.clone(), r2]]).unwrap();
        assert!(matches!(compute_best_approx(&m, 3), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn roots() {
        assert_eq!(int_root_floor(100, 2), 10);
        assert_eq!(int_root_floor(99, 2), 9);
        assert_eq!(int_root_floor(27, 3), 3);
        assert_eq!(int_root_floor(7, 1), 7);
        assert_eq!(int_root_floor(0, 2), 0);
    }
}
