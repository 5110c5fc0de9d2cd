//! Finite-range surrogates of the inhomogeneous Dirichlet and
//! approximability sets.

use rayon::prelude::*;

use super::{binomial_se, sample_stream, SampleConfig};
use crate::approx_functions::ApproxFunction;
use crate::best_approx::shells::{check_budget, shell, ShellOrder, Target};
use crate::best_approx::{compute_inhom_with, int_root_floor};
use crate::error::{Error, Result};
use crate::numerics::{MatrixNM, Scalar};
use crate::report::{CurvePoint, ExperimentReport, Status};

fn check_dims(theta: &MatrixNM, cfg: &SampleConfig) -> Result<()> {
    if cfg.dim() != theta.n() {
        return Err(Error::DimensionMismatch { expected: theta.n(), found: cfg.dim() });
    }
    Ok(())
}

/// Default plotting checkpoints: roughly 12 per decade on a log scale,
/// always containing both ends.
fn checkpoints(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = vec![lo];
    let mut x = lo as f64;
    loop {
        x *= 10f64.powf(1.0 / 12.0);
        let k = x.round() as u64;
        if k >= hi {
            break;
        }
        if k > *out.last().expect("nonempty") {
            out.push(k);
        }
    }
    if hi > lo {
        out.push(hi);
    }
    out
}

/// Fraction of sampled `eta` for which `||Theta q - eta||^n <= g(T)` has a
/// solution `0 < |q|^m <= T` for every integer `T` in `[T_lo, T']`, as a
/// curve in `T'` up to `T_hi`. Monotone by construction: each sample
/// contributes up to its first failing `T`.
pub fn measure_estimate_uniform(
    theta: &MatrixNM,
    g: &ApproxFunction,
    t_lo: u64,
    t_hi: u64,
    cfg: &SampleConfig,
) -> Result<ExperimentReport> {
    measure_estimate_uniform_at(theta, g, t_lo, &checkpoints(t_lo, t_hi), cfg)
}

/// [`measure_estimate_uniform`] with explicit curve checkpoints; the last
/// one is `T_hi`.
pub fn measure_estimate_uniform_at(
    theta: &MatrixNM,
    g: &ApproxFunction,
    t_lo: u64,
    t_his: &[u64],
    cfg: &SampleConfig,
) -> Result<ExperimentReport> {
    check_dims(theta, cfg)?;
    let sampler = cfg.sampler()?;
    let t_hi = *t_his.iter().max().ok_or_else(|| Error::Invalid("no checkpoints".into()))?;
    if t_lo == 0 || t_his.iter().any(|&t| t < t_lo) {
        return Err(Error::Invalid(format!("need 1 <= T_lo <= every checkpoint, got T_lo = {t_lo}")));
    }
    let (n, m) = (theta.n() as u32, theta.m() as u32);
    let q_max = int_root_floor(t_hi, m);
    check_budget(theta.m(), q_max, cfg.budget)?;
    // Thresholds do not depend on the sample.
    let thresholds: Vec<Scalar> = (t_lo..=t_hi)
        .map(|t| g.eval(&Scalar::from_int(t as i64)))
        .collect::<Result<_>>()?;

    let first_fail: Vec<Result<Option<u64>>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let eta = sampler.sample_exact(&mut sample_stream(cfg.seed, i))?;
            let inh = compute_inhom_with(theta, &eta, q_max, cfg.budget)?;
            for (k, t) in (t_lo..=t_hi).enumerate() {
                let v = inh.psi(int_root_floor(t, m).max(1) as f64)?.pow(n);
                if int_root_floor(t, m) == 0 || !v.le_certified(&thresholds[k])? {
                    return Ok(Some(t));
                }
            }
            Ok(None)
        })
        .collect();
    let first_fail = first_fail.into_iter().collect::<Result<Vec<_>>>()?;

    let mut pts: Vec<u64> = t_his.to_vec();
    pts.sort_unstable();
    pts.dedup();
    let curve: Vec<CurvePoint> = pts
        .iter()
        .map(|&th| {
            let ok = first_fail.iter().filter(|f| f.is_none_or(|t| t > th)).count();
            let p = ok as f64 / cfg.count as f64;
            CurvePoint { parameter: th as f64, estimate: p, stderr: binomial_se(p, cfg.count), n_samples: cfg.count, seed: cfg.seed }
        })
        .collect();
    let last = curve.last().expect("nonempty").estimate;
    let monotone = curve.windows(2).all(|w| w[1].estimate <= w[0].estimate);
    let strictly = curve.windows(2).all(|w| w[1].estimate < w[0].estimate);
    let mut r = ExperimentReport::new(
        "measure_estimate_uniform",
        Status::Diagnostic,
        format!("uniformly solvable on [{t_lo}, {t_hi}] for a fraction {last:.4} of {} samples", cfg.count),
    )
    .metric("T_lo", t_lo)
    .metric("T_hi", t_hi)
    .metric("samples", cfg.count)
    .metric("seed", cfg.seed)
    .metric("fraction", last)
    .metric("monotone_nonincreasing", monotone)
    .metric("strictly_decreasing", strictly)
    .caveat("finite-range fraction; not a measure statement");
    r.curve = curve;
    Ok(r)
}

/// Fraction of sampled `eta` with at least `k_min` distinct `q`,
/// `0 < |q|^m <= T`, solving `||Theta q - eta||^n <= g(|q|^m)`, as a curve in
/// `T` up to `T_hi`. Curves are non-decreasing.
pub fn measure_estimate_asymptotic(
    theta: &MatrixNM,
    g: &ApproxFunction,
    t_hi: u64,
    k_min: u64,
    cfg: &SampleConfig,
) -> Result<ExperimentReport> {
    check_dims(theta, cfg)?;
    let sampler = cfg.sampler()?;
    if t_hi == 0 {
        return Err(Error::Invalid("T_hi must be positive".into()));
    }
    let (n, m) = (theta.n() as u32, theta.m() as u32);
    let q_max = int_root_floor(t_hi, m);
    check_budget(theta.m(), q_max, cfg.budget)?;
    let thresholds: Vec<Scalar> = (1..=q_max)
        .map(|s| g.eval(&Scalar::from_int(s.pow(m) as i64)))
        .collect::<Result<_>>()?;

    // For each sample, the norm at which the k_min-th solution appears.
    let reach: Vec<Result<Option<u64>>> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            if k_min == 0 {
                return Ok(Some(0));
            }
            let eta = sampler.sample_exact(&mut sample_stream(cfg.seed, i))?;
            let target = Target { theta, eta: Some(&eta) };
            let mut found = 0u64;
            for s in 1..=q_max {
                for q in shell(theta.m(), s as i64, ShellOrder::Full) {
                    let v = target.value(&q)?.pow(n);
                    if v.le_certified(&thresholds[s as usize - 1])? {
                        found += 1;
                        if found == k_min {
                            return Ok(Some(s));
                        }
                    }
                }
            }
            Ok(None)
        })
        .collect();
    let reach = reach.into_iter().collect::<Result<Vec<_>>>()?;

    let curve: Vec<CurvePoint> = checkpoints(1, t_hi)
        .into_iter()
        .map(|t| {
            let s_max = int_root_floor(t, m);
            let ok = reach.iter().filter(|r| r.is_some_and(|s| s <= s_max)).count();
            let p = ok as f64 / cfg.count as f64;
            CurvePoint { parameter: t as f64, estimate: p, stderr: binomial_se(p, cfg.count), n_samples: cfg.count, seed: cfg.seed }
        })
        .collect();
    let last = curve.last().expect("nonempty").estimate;
    let mut r = ExperimentReport::new(
        "measure_estimate_asymptotic",
        Status::Diagnostic,
        format!("{last:.4} of {} samples have >= {k_min} solutions with |q|^m <= {t_hi}", cfg.count),
    )
    .metric("T_hi", t_hi)
    .metric("k_min", k_min)
    .metric("samples", cfg.count)
    .metric("seed", cfg.seed)
    .metric("fraction", last)
    .caveat("k_min solutions up to T_hi stand in for infinitely many");
    r.curve = curve;
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::parse_scalar;
    use num_rational::BigRational;

    fn golden() -> MatrixNM {
        MatrixNM::scalar(parse_scalar("golden", 256).unwrap())
    }

    fn scaled_f1(num: i64, den: i64) -> ApproxFunction {
        ApproxFunction::f1().scaled(BigRational::new(num.into(), den.into())).unwrap()
    }

    #[test]
    fn checkpoint_grid() {
        let c = checkpoints(5, 50);
        assert_eq!(c[0], 5);
        assert_eq!(*c.last().unwrap(), 50);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(checkpoints(7, 7), vec![7]);
    }

    #[test]
    fn uniform_full_for_f1() {
        let r = measure_estimate_uniform(&golden(), &ApproxFunction::f1(), 5, 50, &SampleConfig::torus(1, 7, 200)).unwrap();
        assert_eq!(r.get_f64("fraction"), Some(1.0));
    }

    #[test]
    fn uniform_curve_decreases() {
        let r = measure_estimate_uniform_at(&golden(), &scaled_f1(1, 100), 10, &[20, 50, 100], &SampleConfig::torus(1, 7, 3000)).unwrap();
        assert_eq!(r.get("monotone_nonincreasing").unwrap(), true);
        assert!(r.curve[0].estimate > 0.0);
        assert!(r.curve[0].estimate > r.curve[2].estimate, "{:?}", r.curve);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(measure_estimate_uniform(&golden(), &ApproxFunction::f1(), 5, 50, &SampleConfig::torus(1, 7, 0)).is_err());
    }

    #[test]
    fn asymptotic_vacuous_and_trend() {
        let g = golden();
        let r = measure_estimate_asymptotic(&g, &ApproxFunction::f1(), 100, 0, &SampleConfig::torus(1, 1, 50)).unwrap();
        assert_eq!(r.get_f64("fraction"), Some(1.0));
        let r = measure_estimate_asymptotic(&g, &ApproxFunction::f1(), 1000, 3, &SampleConfig::torus(1, 1, 200)).unwrap();
        let c = &r.curve;
        assert!(c.windows(2).all(|w| w[0].estimate <= w[1].estimate));
        assert!(c.last().unwrap().estimate > 0.9, "{c:?}");
    }
}
