//! Shell enumeration and the running-minimum scan shared by every
//! sequence computation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{dist_to_int, MatrixNM, Scalar, VectorN};

/// Which integer vectors a shell contains, and in what order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellOrder {
    /// One representative per antipodal pair (first nonzero coordinate
    /// positive), lexicographic.
    Representatives,
    /// Every vector: each representative followed by its antipode.
    Full,
}

/// All `q` with `|q| = s`, in the given order.
pub fn shell(m: usize, s: i64, order: ShellOrder) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(m);
    fill(m, s, false, &mut cur, &mut out);
    let reps = out.into_iter().filter(|q| first_nonzero_positive(q));
    match order {
        ShellOrder::Representatives => reps.collect(),
        ShellOrder::Full => reps
            .flat_map(|q| {
                let neg: Vec<i64> = q.iter().map(|x| -x).collect();
                [q, neg]
            })
            .collect(),
    }
}

fn fill(m: usize, s: i64, hit: bool, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    if cur.len() == m {
        if hit {
            out.push(cur.clone());
        }
        return;
    }
    if cur.len() + 1 == m && !hit {
        // Only the faces are left.
        for x in [-s, s] {
            cur.push(x);
            out.push(cur.clone());
            cur.pop();
        }
        return;
    }
    for x in -s..=s {
        cur.push(x);
        fill(m, s, hit || x.abs() == s, cur, out);
        cur.pop();
    }
}

fn first_nonzero_positive(q: &[i64]) -> bool {
    q.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0)
}

/// The map `q -> Theta q - eta` whose distance to the lattice is minimized.
#[derive(Clone, Copy)]
pub struct Target<'a> {
    pub theta: &'a MatrixNM,
    pub eta: Option<&'a VectorN>,
}

impl<'a> Target<'a> {
    pub fn image(&self, q: &[i64]) -> Result<VectorN> {
        let v = self.theta.mul_ints(q)?;
        match self.eta {
            Some(e) => v.sub(e),
            None => Ok(v),
        }
    }

    pub fn value(&self, q: &[i64]) -> Result<Scalar> {
        Ok(dist_to_int(&self.image(q)?))
    }
}

/// Minimum of the target over one shell.
#[derive(Clone, Debug)]
pub struct ShellMin {
    pub norm: u64,
    /// Encloses the true minimum.
    pub value: Scalar,
    /// `None` when the minimizer cannot be certified at this precision.
    pub argmin: Option<Vec<i64>>,
}

/// Float shadow of a target, used to discard vectors that cannot be the
/// shell minimum before any interval arithmetic is done.
struct FloatTarget {
    n: usize,
    m: usize,
    theta: Vec<f64>,
    /// Per-entry absolute error of `theta`, including the enclosure radius.
    theta_err: Vec<f64>,
    eta: Vec<f64>,
    eta_err: Vec<f64>,
}

fn float_of(x: &Scalar) -> (f64, f64) {
    let v = x.to_f64();
    let rad = crate::numerics::scalar::rational_to_f64(&x.radius());
    (v, 2.0 * f64::EPSILON * v.abs() + 2.0 * rad + f64::MIN_POSITIVE)
}

impl FloatTarget {
    fn new(target: &Target<'_>) -> Option<Self> {
        let (n, m) = (target.theta.n(), target.theta.m());
        let (theta, theta_err): (Vec<f64>, Vec<f64>) = target.theta.entries().iter().map(float_of).unzip();
        let (eta, eta_err): (Vec<f64>, Vec<f64>) = match target.eta {
            Some(e) => e.entries().iter().map(float_of).unzip(),
            None => (vec![0.0; n], vec![0.0; n]),
        };
        let finite = theta.iter().chain(&theta_err).chain(&eta).chain(&eta_err).all(|x| x.is_finite());
        finite.then_some(FloatTarget { n, m, theta, theta_err, eta, eta_err })
    }

    /// `(value, bound)` with `|value - ||Theta q - eta||| <= bound`, or `None`
    /// when the magnitudes leave no usable float precision.
    fn value(&self, q: &[i64]) -> Option<(f64, f64)> {
        let mut val = 0.0f64;
        let mut err = 0.0f64;
        for i in 0..self.n {
            let row = &self.theta[i * self.m..(i + 1) * self.m];
            let row_err = &self.theta_err[i * self.m..(i + 1) * self.m];
            let mut x = -self.eta[i];
            let mut mag = self.eta[i].abs();
            let mut e = self.eta_err[i];
            for j in 0..self.m {
                let qj = q[j] as f64;
                x += row[j] * qj;
                mag += (row[j] * qj).abs();
                e += row_err[j] * qj.abs();
            }
            if mag > 1e12 {
                return None;
            }
            // Rounding of m products, m sums and the reduction.
            e += 4.0 * (self.m as f64 + 2.0) * f64::EPSILON * (mag + 1.0);
            val = val.max((x - x.round()).abs());
            err = err.max(e);
        }
        Some((val, err))
    }
}

pub fn shell_min(target: Target<'_>, s: u64, order: ShellOrder) -> Result<ShellMin> {
    let vectors = shell(target.theta.m(), s as i64, order);
    let float = FloatTarget::new(&target);
    let approx: Option<Vec<(f64, f64)>> = float
        .as_ref()
        .and_then(|f| vectors.iter().map(|q| f.value(q)).collect());
    let mut cands: Vec<(Vec<i64>, Scalar)> = Vec::new();
    match approx {
        Some(approx) => {
            // Anything whose float lower bound exceeds the smallest float
            // upper bound is certainly not minimal.
            let cut = approx.iter().map(|(v, e)| v + e).fold(f64::INFINITY, f64::min);
            for (q, (v, e)) in vectors.into_iter().zip(approx) {
                if v - e <= cut {
                    let val = target.value(&q)?;
                    push_candidate(&mut cands, q, val);
                }
            }
        }
        None => {
            for q in vectors {
                let v = target.value(&q)?;
                push_candidate(&mut cands, q, v);
            }
        }
    }
    Ok(finish(s, cands))
}

/// Adds `(q, v)` to the set of possible minimizers. Earlier entries win
/// exact ties.
fn push_candidate(cands: &mut Vec<(Vec<i64>, Scalar)>, q: Vec<i64>, v: Scalar) {
    // An earlier candidate that `v` cannot strictly beat keeps priority.
    if cands
        .iter()
        .any(|(_, c)| v.certainly_ge(c) || c.same_as(&v))
    {
        return;
    }
    cands.retain(|(_, c)| !v.certainly_lt(c));
    cands.push((q, v));
}

fn finish(s: u64, mut cands: Vec<(Vec<i64>, Scalar)>) -> ShellMin {
    if cands.len() == 1 {
        let (q, v) = cands.pop().expect("one candidate");
        return ShellMin {
            norm: s,
            value: v,
            argmin: Some(q),
        };
    }
    let value = cands
        .iter()
        .map(|(_, v)| v.clone())
        .reduce(|a, b| a.min_enclosure(&b))
        .unwrap_or_else(Scalar::zero);
    ShellMin {
        norm: s,
        value,
        argmin: None,
    }
}

/// A new record found by [`scan`].
#[derive(Clone, Debug)]
pub struct Hit {
    pub q: Vec<i64>,
    pub norm: u64,
    pub value: Scalar,
    pub image: VectorN,
}

#[derive(Clone, Debug)]
pub struct Scan {
    pub records: Vec<Hit>,
    /// First `q` (in scan order) whose value is exactly zero.
    pub zero_hit: Option<Vec<i64>>,
}

/// Number of lattice points in the box `|q| <= t`.
pub fn box_points(m: usize, t: u64) -> u128 {
    let side = 2 * t as u128 + 1;
    let mut acc: u128 = 1;
    for _ in 0..m {
        acc = acc.saturating_mul(side);
    }
    acc
}

pub fn check_budget(m: usize, t: u64, budget: u128) -> Result<()> {
    let needed = box_points(m, t);
    if needed > budget {
        return Err(Error::Budget { needed, budget });
    }
    Ok(())
}

/// Running minimum over shells `1..=t_max`. Shells are evaluated in parallel
/// batches; the merge is sequential in shell order, so the output does not
/// depend on the schedule.
pub fn scan(target: Target<'_>, t_max: u64, order: ShellOrder) -> Result<Scan> {
    let m = target.theta.m();
    let mut records: Vec<Hit> = Vec::new();
    let mut best: Option<Scalar> = None;
    let per_shell = |s: u64| 2 * m as u64 * (2 * s + 1).pow(m as u32 - 1);
    let mut s = 1u64;
    while s <= t_max {
        // Aim for a few thousand points per batch.
        let mut end = s;
        let mut pts = 0u64;
        while end <= t_max && (pts < 4096 || end == s) {
            pts += per_shell(end);
            end += 1;
        }
        let mins: Vec<Result<ShellMin>> = (s..end)
            .into_par_iter()
            .map(|k| shell_min(target, k, order))
            .collect();
        for sm in mins {
            let sm = sm?;
            let is_record = match &best {
                None => true,
                Some(b) => {
                    if sm.value.certainly_lt(b) {
                        true
                    } else if sm.value.certainly_ge(b) || sm.value.same_as(b) {
                        false
                    } else {
                        return Err(Error::precision(format!(
                            "shell {} minimum {} overlaps the current record {}",
                            sm.norm, sm.value, b
                        )));
                    }
                }
            };
            if !is_record {
                continue;
            }
            let q = sm.argmin.clone().ok_or_else(|| {
                Error::precision(format!(
                    "two vectors of norm {} give indistinguishable remainders near {}",
                    sm.norm, sm.value
                ))
            })?;
            let image = target.image(&q)?;
            if !sm.value.is_certainly_zero() && !sm.value.is_certainly_positive() {
                return Err(Error::precision(format!(
                    "remainder of {q:?} cannot be separated from 0"
                )));
            }
            if sm.value.is_certainly_zero() {
                return Ok(Scan {
                    records,
                    zero_hit: Some(q),
                });
            }
            best = Some(sm.value.clone());
            records.push(Hit {
                q,
                norm: sm.norm,
                value: sm.value,
                image,
            });
        }
        s = end;
    }
    Ok(Scan {
        records,
        zero_hit: None,
    })
}
