//! The projection-measure lemma and the Chung-Erdős lower bound.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{binomial_se, dot, norm2, sample_stream, SampleConfig};
use crate::error::{Error, Result};
use crate::numerics::VectorN;
use crate::report::{CurvePoint, ExperimentReport, Status};

fn dist_to_int_f64(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Monte Carlo estimate of the share of `eta` in the sampling box with
/// `||eta . u|| <= sigma`, against the limit value `2 sigma`.
///
/// Passes when the estimate is within 3 binomial standard errors (computed
/// at `p = 2 sigma`) of `2 sigma`.
pub fn projection_measure_check(cfg: &SampleConfig, u: &VectorN, sigma: f64) -> Result<ExperimentReport> {
    let sampler = cfg.sampler()?;
    if u.dim() != sampler.dim() {
        return Err(Error::DimensionMismatch { expected: sampler.dim(), found: u.dim() });
    }
    if !(sigma > 0.0 && sigma <= 0.5) {
        return Err(Error::Invalid(format!("sigma = {sigma} must lie in (0, 1/2]")));
    }
    let uf = u.to_f64();
    let coeffs: Vec<f64> = sampler.basis.iter().map(|b| dot(b, &uf)).collect();
    let proj = norm2(&coeffs);
    if !(proj > 1e-12 * norm2(&uf).max(f64::MIN_POSITIVE)) {
        return Err(Error::Precondition("u is orthogonal to the sampling subspace".into()));
    }
    let hits: u64 = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let eta = sampler.sample_f64(&mut sample_stream(cfg.seed, i));
            u64::from(dist_to_int_f64(dot(&eta, &uf)) <= sigma)
        })
        .sum();
    let n = cfg.count;
    let est = hits as f64 / n as f64;
    let target = (2.0 * sigma).min(1.0);
    let se = binomial_se(target, n);
    let z = if se > 0.0 { (est - target) / se } else if est == target { 0.0 } else { f64::INFINITY };
    let scale = cfg.radius * proj;
    let status = if z.abs() <= 3.0 { Status::Pass } else { Status::Fail };
    let mut r = ExperimentReport::new(
        "projection_measure_check",
        status,
        format!("estimate {est:.5} vs 2 sigma = {target} ({z:+.2} s.e.), M |pr_L u| = {scale:.1}"),
    )
    .metric("sigma", sigma)
    .metric("estimate", est)
    .metric("expected", target)
    .metric("stderr", se)
    .metric("z", z)
    .metric("hits", hits)
    .metric("samples", n)
    .metric("seed", cfg.seed)
    .metric("projection_norm", proj)
    .metric("M_times_projection", scale);
    if scale < 500.0 {
        r = r.caveat("M |pr_L u| < 500: the correction term of the lemma may be visible");
    }
    r.curve.push(CurvePoint { parameter: sigma, estimate: est, stderr: se, n_samples: n, seed: cfg.seed });
    Ok(r)
}

fn check_probability_inputs(single: usize, pair: &[Vec<f64>]) -> Result<()> {
    if pair.len() != single || pair.iter().any(|row| row.len() != single) {
        return Err(Error::Invalid("pair grid must be square and match the single list".into()));
    }
    Ok(())
}

/// `max_N (sum_(k<=N) mu_k)^2 / sum_(k,s<=N) mu(E_k and E_s)`.
pub fn chung_erdos_bound(mu_single: &[f64], mu_pair: &[Vec<f64>]) -> Result<f64> {
    check_probability_inputs(mu_single.len(), mu_pair)?;
    let n = mu_single.len();
    for (k, &m) in mu_single.iter().enumerate() {
        if !(0.0..=1.0).contains(&m) {
            return Err(Error::Invalid(format!("mu_{} = {m} is not a probability", k + 1)));
        }
        if mu_pair[k][k] != m {
            return Err(Error::Invalid(format!("diagonal entry {} differs from mu_{}", k + 1, k + 1)));
        }
        for s in 0..n {
            let v = mu_pair[k][s];
            if !(0.0..=1.0).contains(&v) || v != mu_pair[s][k] {
                return Err(Error::Invalid(format!("pair entry ({}, {}) is inconsistent", k + 1, s + 1)));
            }
        }
    }
    let (mut first, mut second, mut best) = (0.0f64, 0.0f64, 0.0f64);
    for k in 0..n {
        first += mu_single[k];
        second += mu_pair[k][k] + 2.0 * (0..k).map(|s| mu_pair[k][s]).sum::<f64>();
        if second > 0.0 {
            best = best.max(first * first / second);
        }
    }
    Ok(best)
}

/// Rational version of [`chung_erdos_bound`].
pub fn chung_erdos_bound_exact(mu_single: &[BigRational], mu_pair: &[Vec<BigRational>]) -> Result<BigRational> {
    let n = mu_single.len();
    if mu_pair.len() != n || mu_pair.iter().any(|row| row.len() != n) {
        return Err(Error::Invalid("pair grid must be square and match the single list".into()));
    }
    for k in 0..n {
        if mu_pair[k][k] != mu_single[k] {
            return Err(Error::Invalid(format!("diagonal entry {} differs from mu_{}", k + 1, k + 1)));
        }
        if (0..n).any(|s| mu_pair[k][s] != mu_pair[s][k] || mu_pair[k][s].is_negative()) {
            return Err(Error::Invalid(format!("row {} of the pair grid is inconsistent", k + 1)));
        }
    }
    let mut first = BigRational::zero();
    let mut second = BigRational::zero();
    let mut best = BigRational::zero();
    for k in 0..n {
        first += &mu_single[k];
        second += &mu_pair[k][k];
        for s in 0..k {
            second += &mu_pair[k][s] * BigRational::from_integer(2.into());
        }
        if second.is_positive() {
            let q = &first * &first / &second;
            if q > best {
                best = q;
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric_lab::Subspace;
    use crate::numerics::Scalar;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn two_events() {
        let b = chung_erdos_bound_exact(&[r(1, 2), r(1, 2)], &[vec![r(1, 2), r(1, 4)], vec![r(1, 4), r(1, 2)]]).unwrap();
        assert_eq!(b, r(2, 3));
        let f = chung_erdos_bound(&[0.5, 0.5], &[vec![0.5, 0.25], vec![0.25, 0.5]]).unwrap();
        assert_eq!(f, 2.0 / 3.0);
        assert_eq!(chung_erdos_bound(&[0.3], &[vec![0.3]]).unwrap(), 0.3);
        assert!(chung_erdos_bound(&[0.3], &[vec![0.2]]).is_err());
    }

    #[test]
    fn disjoint_events_sum() {
        let mu = [0.1, 0.2, 0.3];
        let mut pair = vec![vec![0.0; 3]; 3];
        for k in 0..3 {
            pair[k][k] = mu[k];
        }
        assert!((chung_erdos_bound(&mu, &pair).unwrap() - 0.6).abs() < 1e-15);
    }

    fn line_config(seed: u64, count: u64, m: f64) -> SampleConfig {
        SampleConfig::on_subspace(seed, count, m, Subspace { anchor: vec![0.1, 0.2], basis: vec![vec![1.0, 1.0]] })
    }

    #[test]
    fn projection_small() {
        // u = (100, 100) has projection 100 sqrt 2 on the diagonal.
        let u = VectorN::from_ints(&[100, 100]).unwrap();
        let r = projection_measure_check(&line_config(3, 20_000, 10.0), &u, 0.1).unwrap();
        assert!(r.passed(), "{}", r.summary);
        let r = projection_measure_check(&line_config(3, 1000, 10.0), &u, 0.5).unwrap();
        assert_eq!(r.get_f64("estimate"), Some(1.0));
        let orth = VectorN::new(vec![Scalar::from_int(1), Scalar::from_int(-1)]).unwrap();
        assert!(matches!(projection_measure_check(&line_config(3, 10, 10.0), &orth, 0.1), Err(Error::Precondition(_))));
    }
}
