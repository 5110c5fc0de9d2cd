//! Asymptotic directions of best approximation vectors and the
//! exceptional-point scan.

use serde::Serialize;
use serde_json::json;

use super::norm2;
use crate::best_approx::BestApproxSequence;
use crate::error::{Error, Result};
use crate::numerics::VectorN;
use crate::report::{ExperimentReport, Status};

pub const DEFAULT_TOL: f64 = 0.05;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Direction {
    /// Unit vector (Euclidean norm).
    pub vector: Vec<f64>,
    pub count: u64,
}

/// Cluster representatives of `{+-y_nu / |y_nu|}` over the tail of a
/// sequence. Closed under `v -> -v`, with equal counts on antipodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DirectionSet {
    pub dim: usize,
    pub tolerance: f64,
    pub tail_records: usize,
    pub directions: Vec<Direction>,
}

/// Angle between unit vectors, stable near 0 and pi.
pub fn angle(a: &[f64], b: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
    2.0 * norm2(&diff).atan2(norm2(&sum))
}

fn unit(p: &[i64]) -> Vec<f64> {
    let v: Vec<f64> = p.iter().map(|&x| x as f64).collect();
    let l = norm2(&v);
    v.into_iter().map(|x| x / l).collect()
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

/// `tail_fraction` is the share of records, counted from the end, that
/// enter the clustering. Each record joins the first cluster within `tol`
/// of its representative; its antipode joins the antipodal cluster.
pub fn asymptotic_directions(seq: &BestApproxSequence, tail_fraction: f64, tol: f64) -> Result<DirectionSet> {
    if let Some(w) = &seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) || !(tol >= 0.0) {
        return Err(Error::Invalid("tail fraction must be in (0, 1] and tolerance nonnegative".into()));
    }
    let len = seq.len();
    let tail = ((len as f64) * tail_fraction).floor() as usize;
    if tail < 10 {
        return Err(Error::TooShort { needed: (10.0 / tail_fraction).ceil() as usize, have: len });
    }
    // (representative, count, index of the antipodal cluster)
    let mut clusters: Vec<(Vec<f64>, u64, usize)> = Vec::new();
    for rec in &seq.records[len - tail..] {
        let v = unit(&rec.p);
        if let Some(c) = clusters.iter().position(|(rep, _, _)| angle(rep, &v) <= tol) {
            clusters[c].1 += 1;
            let partner = clusters[c].2;
            clusters[partner].1 += 1;
            continue;
        }
        let k = clusters.len();
        if angle(&v, &neg(&v)) <= tol {
            clusters.push((v, 2, k));
        } else {
            let w = neg(&v);
            clusters.push((v, 1, k + 1));
            clusters.push((w, 1, k));
        }
    }
    Ok(DirectionSet {
        dim: seq.m(),
        tolerance: tol,
        tail_records: tail,
        directions: clusters
            .into_iter()
            .map(|(vector, count, _)| Direction { vector, count })
            .collect(),
    })
}

/// Counts `nu` with `angle(+-y_nu, v) < delta / |y_nu|^xi`, where `|.|` is the
/// sup norm. A count that keeps growing with the range marks a candidate
/// exceptional point.
pub fn exceptional_test(v: &VectorN, seq: &BestApproxSequence, xi: f64, delta: f64) -> Result<ExperimentReport> {
    if v.dim() != seq.m() {
        return Err(Error::DimensionMismatch { expected: seq.m(), found: v.dim() });
    }
    if !(xi > 0.0 && delta > 0.0) {
        return Err(Error::Invalid("xi and delta must be positive".into()));
    }
    let vf = v.to_f64();
    let l = norm2(&vf);
    if !(l > 0.0) {
        return Err(Error::Invalid("v must be nonzero".into()));
    }
    let vu: Vec<f64> = vf.iter().map(|x| x / l).collect();
    let mut hits = Vec::new();
    let mut closest = f64::INFINITY;
    for (i, rec) in seq.records.iter().enumerate() {
        let u = unit(&rec.p);
        let a = angle(&u, &vu).min(angle(&neg(&u), &vu));
        let thr = delta / (rec.norm as f64).powf(xi);
        closest = closest.min(a / thr);
        if a < thr {
            hits.push(json!({"nu": i + 1, "P": rec.norm, "angle": a, "threshold": thr}));
        }
    }
    let half = seq.len() / 2;
    let late = hits
        .iter()
        .filter(|h| h["nu"].as_u64().is_some_and(|nu| nu as usize > half))
        .count();
    let candidate = late > 0 && late * 2 >= hits.len().max(1);
    let mut r = ExperimentReport::new(
        "exceptional_test",
        Status::Diagnostic,
        format!("{} of {} records inside the angular threshold ({late} in the second half)", hits.len(), seq.len()),
    )
    .metric("count", hits.len())
    .metric("count_second_half", late)
    .metric("candidate_exceptional", candidate)
    .metric("xi", xi)
    .metric("delta", delta)
    .metric("min_angle_over_threshold", closest)
    .metric("records", seq.len())
    .caveat("finite range: growth of the count only suggests infinitely many hits");
    r.violations = Vec::new();
    r.metrics.insert("hits".into(), serde_json::Value::Array(hits));
    Ok(r)
}
