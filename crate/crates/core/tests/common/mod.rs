//! Random inputs shared by the integration suites.
#![allow(dead_code)]

use dioph_core::numerics::{parse_scalar, MatrixNM, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

const PRIMES: [i64; 10] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29];

/// Half exact rationals with denominators near 1e9, half guarded
/// `k sqrt(p) / d` with a small `d`. Each prime is used once, so the guarded
/// entries are linearly independent over the rationals.
pub fn random_theta<R: Rng>(rng: &mut R, n: usize, m: usize) -> MatrixNM {
    let mut primes = PRIMES.to_vec();
    let entries = (0..n * m)
        .map(|_| {
            if rng.random_bool(0.5) {
                let den: i64 = rng.random_range(500_000_000..2_000_000_000);
                Scalar::Exact(BigRational::new(BigInt::from(rng.random_range(1..den)), BigInt::from(den)))
            } else {
                let p = primes.swap_remove(rng.random_range(0..primes.len()));
                let root = parse_scalar(&format!("sqrt({p})"), 192).unwrap();
                let k = rng.random_range(1..50);
                let d = rng.random_range(1..50);
                root.mul_int(k).checked_div(&Scalar::from_int(d)).unwrap()
            }
        })
        .collect();
    MatrixNM::new(n, m, entries).unwrap()
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn golden() -> MatrixNM {
    MatrixNM::scalar(parse_scalar("golden", 256).unwrap())
}

pub fn dist(r: &BigRational) -> BigRational {
    let f = r - r.floor();
    let g = BigRational::one() - &f;
    f.min(g)
}

/// Every integer vector of sup norm `s`, in any order.
pub fn all_of_norm(m: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-s..=s).map(move |x| {
                    let mut w = v.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().map(|x| x.abs()).max() == Some(s));
    out
}

/// `(norm, value)` of each strict new minimum, and the first norm with an
/// exact zero.
pub fn oracle(rows: &[Vec<BigRational>], t: u64) -> (Vec<(u64, BigRational)>, Option<u64>) {
    let m = rows[0].len();
    let mut best: Option<BigRational> = None;
    let mut out = Vec::new();
    for s in 1..=t {
        let mut shell_min: Option<BigRational> = None;
        for q in all_of_norm(m, s as i64) {
            let v = rows
                .iter()
                .map(|row| {
                    let x: BigRational = row
                        .iter()
                        .zip(&q)
                        .map(|(a, &k)| a * BigRational::from_integer(k.into()))
                        .fold(BigRational::zero(), |acc, y| acc + y);
                    dist(&x)
                })
                .max()
                .expect("n >= 1");
            if shell_min.as_ref().is_none_or(|b| v < *b) {
                shell_min = Some(v);
            }
        }
        let v = shell_min.expect("nonempty shell");
        if v.is_zero() {
            return (out, Some(s));
        }
        if best.as_ref().is_none_or(|b| v < *b) {
            best = Some(v.clone());
            out.push((s, v));
        }
    }
    (out, None)
}

pub fn random_rational_rows<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<Vec<BigRational>> {
    // Mostly large denominators, which behave like irrationals at this
    // range; a few small ones to exercise ties and trivial singularity.
    let den: i64 = if rng.random_bool(0.2) { rng.random_range(2..60) } else { rng.random_range(100_000..10_000_000) };
    (0..n)
        .map(|_| (0..m).map(|_| BigRational::new(BigInt::from(rng.random_range(0..den)), BigInt::from(den))).collect())
        .collect()
}

/// Largest `Y` tried per shape; keeps the minimal `Q` enumerable.
pub fn cassels_y_range(n: usize, m: usize) -> u64 {
    match (n, m) {
        (1, 1) => 60,
        (2, 1) => 6,
        (1, 2) => 4,
        _ => 2,
    }
}
