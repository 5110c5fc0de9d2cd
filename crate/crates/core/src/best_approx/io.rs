use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use super::BestApproxSequence;
use crate::numerics::scalar::rational_to_f64;
use crate::numerics::Scalar;
use crate::report::scalar_json;

#[derive(Clone, Debug, Serialize)]
pub struct RecordDoc {
    pub nu: usize,
    pub p: Vec<i64>,
    pub a: Vec<i64>,
    #[serde(rename = "P")]
    pub norm: u64,
    pub r: Value,
}

/// Serializable view of a sequence.
#[derive(Clone, Debug, Serialize)]
pub struct SequenceDoc {
    pub n: usize,
    pub m: usize,
    pub matrix: Vec<Vec<String>>,
    pub t_max: u64,
    pub trivially_singular: bool,
    pub trivially_singular_witness: Option<Vec<i64>>,
    pub records: Vec<RecordDoc>,
}

impl SequenceDoc {
    pub fn new(seq: &BestApproxSequence) -> Self {
        let mat = &seq.matrix;
        SequenceDoc {
            n: mat.n(),
            m: mat.m(),
            matrix: (0..mat.n())
                .map(|i| (0..mat.m()).map(|j| mat.get(i, j).to_decimal(30)).collect())
                .collect(),
            t_max: seq.t_max,
            trivially_singular: seq.is_trivially_singular(),
            trivially_singular_witness: seq.trivially_singular_witness.clone(),
            records: seq
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| RecordDoc {
                    nu: i + 1,
                    p: r.p.clone(),
                    a: r.a.clone(),
                    norm: r.norm,
                    r: scalar_json(&r.r),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sequence serializes")
    }
}

/// CSV with columns `nu,P,r_num,r_den_or_float,p1..pm,a1..an`.
///
/// Exact remainders fill `r_num/r_den_or_float` with numerator and
/// denominator. Guarded ones put `-` in `r_num` and a 40-digit center in the
/// second column; the `#` header line states the guard radius bound.
pub fn sequence_csv(seq: &BestApproxSequence) -> String {
    let (n, m) = (seq.n(), seq.m());
    let max_rad = seq
        .records
        .iter()
        .filter(|r| !r.r.is_exact())
        .map(|r| rational_to_f64(&r.r.radius()))
        .fold(0.0f64, f64::max);
    let mut out = format!(
        "# exact rationals as num/den; guarded values as 40-digit centers, radius <= {max_rad:e}; t_max = {}\n",
        seq.t_max
    );
    out.push_str("nu,P,r_num,r_den_or_float");
    for j in 1..=m {
        let _ = write!(out, ",p{j}");
    }
    for i in 1..=n {
        let _ = write!(out, ",a{i}");
    }
    out.push('\n');
    for (i, r) in seq.records.iter().enumerate() {
        let _ = write!(out, "{},{},", i + 1, r.norm);
        match &r.r {
            Scalar::Exact(q) => {
                let _ = write!(out, "{},{}", q.numer(), q.denom());
            }
            Scalar::Guarded(g) => {
                let _ = write!(out, "-,{}", g.center_decimal(40));
            }
        }
        for v in r.p.iter().chain(r.a.iter()) {
            let _ = write!(out, ",{v}");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::best_approx::compute_best_approx;
    use crate::numerics::{parse_scalar, MatrixNM};

    #[test]
    fn csv_for_golden() {
        let m = MatrixNM::scalar(parse_scalar("golden", 256).unwrap());
        let seq = compute_best_approx(&m, 1000).unwrap();
        let csv = sequence_csv(&seq);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "nu,P,r_num,r_den_or_float,p1,a1");
        assert_eq!(lines.len(), 2 + 15);
        assert!(lines[2].starts_with("1,1,-,0.381966"));
        assert!(lines.last().unwrap().starts_with("15,987,"));
    }

    #[test]
    fn csv_and_json_exact() {
        let m = MatrixNM::scalar(Scalar::ratio(2, 7).unwrap());
        let seq = compute_best_approx(&m, 10).unwrap();
        let csv = sequence_csv(&seq);
        assert!(csv.lines().nth(2).unwrap().starts_with("1,1,2,7,1,0"));
        let doc = SequenceDoc::new(&seq);
        assert!(doc.trivially_singular);
        let v: Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(v["records"][0]["P"], 1);
        assert_eq!(v["records"][0]["r"]["exact"], "2/7");
    }
}
