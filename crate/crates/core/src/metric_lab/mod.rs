//! Monte Carlo and combinatorial probes of the metric statements.
//!
//! Zero and full measure are asymptotic claims. Everything here reports
//! finite-range fractions and trends with their standard errors, never a
//! measure verdict.

mod boxes;
mod directions;
mod measure;
mod projection;

pub use boxes::boxes_experiment;
pub use directions::{angle, asymptotic_directions, exceptional_test, Direction, DirectionSet, DEFAULT_TOL};
pub use measure::{measure_estimate_asymptotic, measure_estimate_uniform, measure_estimate_uniform_at};
pub use projection::{chung_erdos_bound, chung_erdos_bound_exact, projection_measure_check};

use rand::Rng;
use serde::Serialize;

use crate::best_approx::DEFAULT_BUDGET;
use crate::error::{Error, Result};
use crate::numerics::{Scalar, VectorN};
use crate::rng;

/// An affine subspace `anchor + span(basis)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subspace {
    pub anchor: Vec<f64>,
    pub basis: Vec<Vec<f64>>,
}

/// Where and how many shifts to sample.
///
/// Without a subspace, `eta` is uniform in the cube of half-side `radius`
/// around `center`. With one, the coefficients along the orthonormalized
/// basis are uniform in `[-radius, radius]` and `center` is ignored.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleConfig {
    pub seed: u64,
    pub count: u64,
    pub center: Vec<f64>,
    pub radius: f64,
    pub subspace: Option<Subspace>,
    /// Per-sample enumeration budget in lattice points.
    pub budget: u128,
}

impl SampleConfig {
    /// Uniform on the unit cube `[0, 1)^n`.
    pub fn torus(n: usize, seed: u64, count: u64) -> Self {
        SampleConfig {
            seed,
            count,
            center: vec![0.5; n],
            radius: 0.5,
            subspace: None,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn on_subspace(seed: u64, count: u64, radius: f64, subspace: Subspace) -> Self {
        let n = subspace.anchor.len();
        SampleConfig {
            seed,
            count,
            center: vec![0.0; n],
            radius,
            subspace: Some(subspace),
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn dim(&self) -> usize {
        match &self.subspace {
            Some(s) => s.anchor.len(),
            None => self.center.len(),
        }
    }

    pub(crate) fn sampler(&self) -> Result<Sampler> {
        if self.count == 0 {
            return Err(Error::Invalid("sample count must be at least 1".into()));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::Invalid(format!("box radius {} must be positive", self.radius)));
        }
        let n = self.dim();
        if n == 0 {
            return Err(Error::Invalid("sampling dimension must be positive".into()));
        }
        let (anchor, basis) = match &self.subspace {
            None => (self.center.clone(), identity(n)),
            Some(s) => {
                if s.basis.is_empty() {
                    return Err(Error::Invalid("subspace needs at least one basis vector".into()));
                }
                if let Some(b) = s.basis.iter().find(|b| b.len() != n) {
                    return Err(Error::DimensionMismatch { expected: n, found: b.len() });
                }
                (s.anchor.clone(), gram_schmidt(&s.basis)?)
            }
        };
        if anchor.iter().chain(basis.iter().flatten()).any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite sampling geometry".into()));
        }
        Ok(Sampler { anchor, basis, radius: self.radius })
    }
}

fn identity(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalizes in the given order (modified Gram-Schmidt, run twice for
/// stability). Fails on a numerically dependent family.
pub fn gram_schmidt(basis: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(basis.len());
    for (k, b) in basis.iter().enumerate() {
        let scale = norm2(b);
        let mut v = b.clone();
        for _ in 0..2 {
            for e in &out {
                let c = dot(&v, e);
                v.iter_mut().zip(e).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = norm2(&v);
        if !(len > 1e-10 * scale) {
            return Err(Error::Invalid(format!("basis vector {} is linearly dependent on the previous ones", k + 1)));
        }
        v.iter_mut().for_each(|x| *x /= len);
        out.push(v);
    }
    Ok(out)
}

/// Sampling geometry after validation.
#[derive(Clone, Debug)]
pub(crate) struct Sampler {
    pub anchor: Vec<f64>,
    /// Orthonormal rows.
    pub basis: Vec<Vec<f64>>,
    pub radius: f64,
}

impl Sampler {
    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    /// Coefficients along the basis, each `radius * (2u - 1)` with `u` a
    /// 53-bit dyadic, so every coordinate is an exactly representable float
    /// sum.
    fn coefficients<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        (0..self.basis.len())
            .map(|_| {
                let u = rng.random_range(0..(1u64 << 53)) as f64 / (1u64 << 53) as f64;
                self.radius * (2.0 * u - 1.0)
            })
            .collect()
    }

    pub fn sample_f64<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let c = self.coefficients(rng);
        let mut x = self.anchor.clone();
        for (ci, b) in c.iter().zip(&self.basis) {
            x.iter_mut().zip(b).for_each(|(xi, bi)| *xi += ci * bi);
        }
        x
    }

    /// The float sample taken as an exact rational shift.
    pub fn sample_exact<R: Rng>(&self, rng: &mut R) -> Result<VectorN> {
        let x = self.sample_f64(rng);
        VectorN::new(x.into_iter().map(Scalar::from_f64_exact).collect::<Result<Vec<_>>>()?)
    }
}

/// Sample `i` of a run always comes from stream `i`.
pub(crate) fn sample_stream(seed: u64, i: u64) -> rand_chacha::ChaCha8Rng {
    rng::stream(seed, i)
}

/// Binomial standard error of a fraction.
pub(crate) fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_orthonormal() {
        let b = gram_schmidt(&[vec![1.0, 1.0, 0.0], vec![1.0, 0.0, 1.0]]).unwrap();
        assert!((norm2(&b[0]) - 1.0).abs() < 1e-15);
        assert!((norm2(&b[1]) - 1.0).abs() < 1e-15);
        assert!(dot(&b[0], &b[1]).abs() < 1e-15);
        assert!(gram_schmidt(&[vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }

    #[test]
    fn torus_samples_in_cube() {
        let s = SampleConfig::torus(2, 1, 10).sampler().unwrap();
        for i in 0..100 {
            let x = s.sample_f64(&mut sample_stream(5, i));
            assert!(x.iter().all(|&v| (0.0..1.0).contains(&v)), "{x:?}");
        }
        let mut c = SampleConfig::torus(1, 1, 0);
        assert!(c.sampler().is_err());
        c.count = 1;
        assert!(c.sampler().is_ok());
    }

    #[test]
    fn subspace_samples_stay_on_it() {
        let sub = Subspace { anchor: vec![0.3, 0.1], basis: vec![vec![2.0, 0.0]] };
        let s = SampleConfig::on_subspace(0, 1, 4.0, sub).sampler().unwrap();
        for i in 0..50 {
            let x = s.sample_f64(&mut sample_stream(2, i));
            assert_eq!(x[1], 0.1);
            assert!((x[0] - 0.3).abs() <= 4.0);
        }
    }
}
