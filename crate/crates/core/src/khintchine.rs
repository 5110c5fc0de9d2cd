//! Khintchine's shift construction `eta = sum_k (Theta p_(nu_k) - a_(nu_k))`.
//!
//! Summing remainders of sparse best approximations produces a shift whose
//! uniform inhomogeneous quality is controlled by `psi_Theta` along the chosen
//! indices: with `y_l = p_(nu_1) + ... + p_(nu_l)`,
//! `|y_l| <= 2A P_(nu_l)` and `||Theta y_l - eta|| <= 2B psi_Theta(P_(nu_(l+1)))`.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::approx_functions::ApproxFunction;
use crate::best_approx::{compute_inhom_with, BestApproxSequence, InhomApproxSequence, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::numerics::{dist_to_int, int_sup_norm, MatrixNM, Scalar, VectorN};
use crate::report::{scalar_json, ExperimentReport, Status};
use crate::rng;
use crate::transference::growth_constants;

#[derive(Clone, Debug)]
pub struct EtaConstruction {
    pub base_sequence: BestApproxSequence,
    /// 1-based record indices `nu_1 < nu_2 < ...`.
    pub indices: Vec<usize>,
    pub gap: usize,
    /// `y_l = p_(nu_1) + ... + p_(nu_l)`.
    pub y_partials: Vec<Vec<i64>>,
    /// Truncated sum, not reduced mod 1.
    pub eta: VectorN,
    pub depth: usize,
    /// Bound on the sup norm of the omitted terms, `2B psi(P_(nu_depth + 1))`.
    pub tail_bound: Scalar,
}

/// One exact check of a construction invariant.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantCheck {
    pub l: usize,
    pub kind: &'static str,
    pub lhs: Value,
    pub rhs: Value,
    pub holds: bool,
}

fn record(seq: &BestApproxSequence, nu: usize) -> &crate::best_approx::BestApproxRecord {
    &seq.records[nu - 1]
}

/// Picks `depth` indices, smallest `psi(P_nu)/phi(2A P_nu)` first, keeping
/// every pair at least `gap` apart. Only indices with a successor record
/// qualify, since the tail bound needs `P_(nu+1)`.
pub fn construct_eta(
    seq: &BestApproxSequence,
    phi: &ApproxFunction,
    depth: usize,
    gap: Option<usize>,
) -> Result<EtaConstruction> {
    if let Some(w) = &seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    if depth == 0 {
        return Err(Error::Invalid("depth must be at least 1".into()));
    }
    let (a, b) = growth_constants(seq.n(), seq.m());
    let gap = gap.unwrap_or(2 * b as usize).max(1);
    let usable = seq.len().saturating_sub(1);
    let needed = (depth - 1) * gap + 2;
    if usable < depth {
        return Err(Error::TooShort { needed, have: seq.len() });
    }
    let mut ranked = Vec::with_capacity(usable);
    for nu in 1..=usable {
        let rec = record(seq, nu);
        let arg = 2.0 * a as f64 * rec.norm as f64;
        let ratio = rec.r.to_f64() / phi.eval_f64(arg)?;
        ranked.push((ratio, nu));
    }
    ranked.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut picked: Vec<usize> = Vec::with_capacity(depth);
    for &(_, nu) in &ranked {
        if picked.iter().all(|&p| p.abs_diff(nu) >= gap) {
            picked.push(nu);
            if picked.len() == depth {
                break;
            }
        }
    }
    if picked.len() < depth {
        return Err(Error::TooShort { needed, have: seq.len() });
    }
    picked.sort_unstable();
    build(seq, picked, gap)
}

/// Construction from explicitly chosen indices.
pub fn construct_eta_from_indices(seq: &BestApproxSequence, indices: &[usize]) -> Result<EtaConstruction> {
    if let Some(w) = &seq.trivially_singular_witness {
        return Err(Error::TriviallySingular { witness: w.clone() });
    }
    if indices.is_empty() || indices.windows(2).any(|w| w[0] >= w[1]) || indices[0] == 0 {
        return Err(Error::Invalid("indices must be positive and strictly increasing".into()));
    }
    let last = *indices.last().expect("nonempty");
    if last + 1 > seq.len() {
        return Err(Error::TooShort { needed: last + 1, have: seq.len() });
    }
    let gap = indices.windows(2).map(|w| w[1] - w[0]).min().unwrap_or(1);
    build(seq, indices.to_vec(), gap)
}

fn build(seq: &BestApproxSequence, indices: Vec<usize>, gap: usize) -> Result<EtaConstruction> {
    let (n, m) = (seq.n(), seq.m());
    let (_, b) = growth_constants(n, m);
    let mut y = vec![0i64; m];
    let mut eta = VectorN::zeros(n);
    let mut y_partials = Vec::with_capacity(indices.len());
    for &nu in &indices {
        let rec = record(seq, nu);
        for (yi, pi) in y.iter_mut().zip(&rec.p) {
            *yi = yi
                .checked_add(*pi)
                .ok_or_else(|| Error::Invalid("partial sum overflows 64 bits".into()))?;
        }
        let xi = seq.matrix.mul_ints(&rec.p)?.sub_ints(&rec.a)?;
        eta = eta.add(&xi)?;
        y_partials.push(y.clone());
    }
    let last = *indices.last().expect("nonempty");
    let tail_bound = record(seq, last + 1).r.mul_int(2 * b as i64);
    Ok(EtaConstruction {
        base_sequence: seq.clone(),
        depth: indices.len(),
        indices,
        gap,
        y_partials,
        eta,
        tail_bound,
    })
}

impl EtaConstruction {
    pub fn matrix(&self) -> &MatrixNM {
        &self.base_sequence.matrix
    }

    /// `eta` reduced into `[0, 1)^n` for reporting.
    pub fn eta_reduced(&self) -> VectorN {
        self.eta.reduce_mod_one()
    }

    /// Exact checks of `|y_l| <= 2A P_(nu_l)` for every `l` and of
    /// `||Theta y_l - eta|| <= 2B psi(P_(nu_(l+1))) + tail_bound` for `l < depth`.
    pub fn invariant_checks(&self) -> Result<Vec<InvariantCheck>> {
        let seq = &self.base_sequence;
        let (a, b) = growth_constants(seq.n(), seq.m());
        let mut out = Vec::new();
        for (l, y) in self.y_partials.iter().enumerate() {
            let p = record(seq, self.indices[l]).norm;
            let lhs = int_sup_norm(y);
            let rhs = 2 * a * p;
            out.push(InvariantCheck {
                l: l + 1,
                kind: "partial_sum_norm",
                lhs: json!(lhs),
                rhs: json!(rhs),
                holds: lhs <= rhs,
            });
        }
        for l in 0..self.depth.saturating_sub(1) {
            let y = &self.y_partials[l];
            let lhs = dist_to_int(&self.matrix().mul_ints(y)?.sub(&self.eta)?);
            let next = record(seq, self.indices[l + 1]).r.mul_int(2 * b as i64);
            let rhs = &next + &self.tail_bound;
            let holds = lhs.le_certified(&rhs)?;
            out.push(InvariantCheck {
                l: l + 1,
                kind: "shift_distance",
                lhs: scalar_json(&lhs),
                rhs: scalar_json(&rhs),
                holds,
            });
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<Value> {
        let checks = self.invariant_checks()?;
        let all = checks.iter().all(|c| c.holds);
        let seq = &self.base_sequence;
        Ok(json!({
            "indices": self.indices,
            "gap": self.gap,
            "depth": self.depth,
            "norms": self.indices.iter().map(|&nu| record(seq, nu).norm).collect::<Vec<_>>(),
            "p": self.indices.iter().map(|&nu| record(seq, nu).p.clone()).collect::<Vec<_>>(),
            "a": self.indices.iter().map(|&nu| record(seq, nu).a.clone()).collect::<Vec<_>>(),
            "y_partials": self.y_partials,
            "eta": self.eta.entries().iter().map(scalar_json).collect::<Vec<_>>(),
            "eta_reduced": self.eta_reduced().entries().iter().map(scalar_json).collect::<Vec<_>>(),
            "tail_bound": scalar_json(&self.tail_bound),
            "invariants": checks,
            "invariants_status": if all { "pass" } else { "fail" },
        }))
    }

    /// Norm range where the construction controls `psi_(Theta,eta)`: from
    /// `|y_1|` up to below `|y_depth|`, and only while the tail stays under 1%
    /// of `psi_Theta`.
    pub fn control_zone(&self) -> (u64, u64) {
        let lo = int_sup_norm(&self.y_partials[0]).max(1);
        let mut hi = int_sup_norm(self.y_partials.last().expect("depth >= 1")).saturating_sub(1);
        let slack = self.tail_bound.mul_int(100);
        if let Some(rec) = self
            .base_sequence
            .records
            .iter()
            .find(|rec| rec.r.upper() < slack.lower())
        {
            hi = hi.min(rec.norm.saturating_sub(1));
        }
        (lo, hi.max(lo))
    }
}

/// Largest `psi_(Theta,eta)(t)/phi(t)` over `[t_lo, t_hi]`: the sup on each
/// step is the left limit at its right end.
fn sup_ratio(inh: &InhomApproxSequence, phi: &ApproxFunction, t_lo: u64, t_hi: u64) -> Result<(f64, u64)> {
    let mut best = (0.0f64, t_lo);
    let mut prev = inh.psi(t_lo as f64)?;
    let mut consider = |v: &Scalar, t: u64| -> Result<()> {
        let x = v.to_f64() / phi.eval_f64(t as f64)?;
        if x > best.0 {
            best = (x, t);
        }
        Ok(())
    };
    consider(&prev, t_lo)?;
    for q in inh.jump_norms() {
        if q <= t_lo || q > t_hi {
            continue;
        }
        consider(&prev, q)?;
        prev = inh.psi(q as f64)?;
    }
    consider(&prev, t_hi)?;
    Ok(best)
}

/// Smallest `psi_Theta(t)/phi(2A t)` over `[t_lo, t_hi]`; attained at the
/// left end of a step.
fn inf_ratio(seq: &BestApproxSequence, phi: &ApproxFunction, two_a: f64, t_lo: u64, t_hi: u64) -> Result<(f64, u64)> {
    let mut best = (f64::INFINITY, t_lo);
    let mut consider = |t: u64| -> Result<()> {
        let x = seq.psi(t as f64)?.to_f64() / phi.eval_f64(two_a * t as f64)?;
        if x < best.0 {
            best = (x, t);
        }
        Ok(())
    };
    consider(t_lo)?;
    for p in seq.jumps_in(t_lo + 1, t_hi) {
        consider(p)?;
    }
    Ok(best)
}

/// Finite-range check of `limsup psi_(Theta,eta)/phi <= 2B liminf psi_Theta(t)/phi(2A t)`
/// for the constructed shift.
pub fn verify_construction(
    construction: &EtaConstruction,
    phi: &ApproxFunction,
    t_lo: u64,
    t_hi: u64,
) -> Result<ExperimentReport> {
    verify_shift(&construction.base_sequence, &construction.eta, Some(&construction.tail_bound), phi, t_lo, t_hi)
        .map(|r| {
            let (zl, zh) = construction.control_zone();
            let inside = t_lo >= zl && t_hi <= zh;
            let mut r = r.metric("control_zone", [zl, zh]).metric("inside_control_zone", inside);
            if !inside {
                r = r.caveat("range leaves the control zone; the ratio is not covered by the construction");
            }
            r
        })
}

/// The same statistic for an arbitrary shift. With `tail_bound` given, the
/// range must sit where the tail is below 1% of `psi_Theta`.
pub fn verify_shift(
    seq: &BestApproxSequence,
    eta: &VectorN,
    tail_bound: Option<&Scalar>,
    phi: &ApproxFunction,
    t_lo: u64,
    t_hi: u64,
) -> Result<ExperimentReport> {
    if t_lo == 0 || t_hi < t_lo {
        return Err(Error::Invalid(format!("bad t range [{t_lo}, {t_hi}]")));
    }
    let (a, b) = growth_constants(seq.n(), seq.m());
    let two_a = 2.0 * a as f64;
    if t_hi > seq.t_max {
        return Err(Error::OutOfRange(format!("t = {t_hi} exceeds the certified {}", seq.t_max)));
    }
    let smallest = seq.psi(t_hi as f64)?;
    if let Some(tb) = tail_bound {
        if !tb.mul_int(100).le_certified(&smallest)? {
            return Err(Error::Precondition(format!(
                "tail bound {} is not below 1% of psi(t_hi) = {}",
                tb.to_decimal(6),
                smallest.to_decimal(6)
            )));
        }
    }
    let inh = compute_inhom_with(&seq.matrix, eta, t_hi, DEFAULT_BUDGET)?;
    let (s, s_at) = sup_ratio(&inh, phi, t_lo, t_hi)?;
    let (i, i_at) = inf_ratio(seq, phi, two_a, t_lo, t_hi)?;
    let ratio = s / (2.0 * b as f64 * i);
    let mut r = ExperimentReport::new(
        "verify_construction",
        Status::Diagnostic,
        format!("S = {s:.6} at t = {s_at}, I = {i:.6} at t = {i_at}, S/(2B I) = {ratio:.6}"),
    )
    .metric("S", s)
    .metric("S_at", s_at)
    .metric("I", i)
    .metric("I_at", i_at)
    .metric("ratio", ratio)
    .metric("A", a)
    .metric("B", b)
    .metric("t_range", [t_lo, t_hi])
    .caveat("finite-range surrogate of limsup and liminf");
    if let Some(tb) = tail_bound {
        r = r.metric("tail_bound", scalar_json(tb));
    }
    Ok(r)
}

/// Scan of `min_t t^m psi_(Theta,eta)(t)^n` over random shifts, for a
/// matrix that looks badly approximable on `[1, t_max]`.
pub fn bad_approx_scan(
    seq: &BestApproxSequence,
    epsilon: f64,
    samples: u64,
    seed: u64,
) -> Result<ExperimentReport> {
    let (n, m) = (seq.n() as i32, seq.m() as i32);
    let t_max = seq.t_max;
    if samples == 0 {
        return Err(Error::Invalid("samples must be positive".into()));
    }
    let mut r = ExperimentReport::new("bad_approx_scan", Status::Diagnostic, "")
        .metric("epsilon", epsilon)
        .metric("t_max", t_max)
        .metric("samples", samples)
        .metric("seed", seed);
    // Gate: t^m psi_Theta(t)^n >= epsilon on the whole range.
    let gate = if seq.is_trivially_singular() {
        0.0
    } else {
        seq.records
            .iter()
            .map(|rec| (rec.norm as f64).powi(m) * rec.r.to_f64().powi(n))
            .fold(f64::INFINITY, f64::min)
    };
    r = r.metric("homogeneous_floor", gate);
    if !(gate >= epsilon) {
        r.status = Status::HypothesisFailed;
        r.summary = format!("precondition not met: homogeneous floor {gate:.3e} < epsilon {epsilon}");
        return Ok(r);
    }
    let theta = &seq.matrix;
    let results: Vec<Result<Option<f64>>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut g = rng::stream(seed, i);
            let eta = rng::unit_vector_dyadic(&mut g, theta.n());
            lattice_floor(theta, &eta, t_max, n, m)
        })
        .collect();
    let mut floors = Vec::new();
    let mut excluded = 0u64;
    for x in results {
        match x? {
            Some(f) => floors.push(f),
            None => excluded += 1,
        }
    }
    let min = floors.iter().copied().fold(f64::INFINITY, f64::min);
    let all_pos = floors.iter().all(|&f| f > 0.0);
    r.status = if all_pos { Status::Pass } else { Status::Fail };
    r.summary = format!(
        "{} shifts scanned, {excluded} excluded near the lattice; minimum floor {min:.3e}",
        floors.len()
    );
    Ok(r.metric("excluded", excluded)
        .metric("min_floor", min)
        .metric("all_floors_positive", all_pos)
        .caveat("finite range: a positive floor is necessary for, not evidence of, bad approximability"))
}

/// `min_t t^m psi^n` for one shift, or `None` if the shift lies in the
/// exclusion zone (within `1e-12` of some `Theta q mod 1`, `|q| <= t_max`).
pub fn lattice_floor(theta: &MatrixNM, eta: &VectorN, t_max: u64, n: i32, m: i32) -> Result<Option<f64>> {
    if dist_to_int(eta).to_f64() < 1e-12 {
        return Ok(None);
    }
    // A remainder that cannot be told apart from 0 puts eta next to the lattice.
    let inh = match compute_inhom_with(theta, eta, t_max, DEFAULT_BUDGET) {
        Err(Error::PrecisionExhausted(_)) => return Ok(None),
        x => x?,
    };
    if inh.is_trivially_singular() {
        return Ok(None);
    }
    let mut floor = f64::INFINITY;
    for rec in &inh.records {
        let v = rec.value.to_f64();
        if v < 1e-12 {
            return Ok(None);
        }
        floor = floor.min((rec.norm as f64).powi(m) * v.powi(n));
    }
    Ok(Some(floor))
}
