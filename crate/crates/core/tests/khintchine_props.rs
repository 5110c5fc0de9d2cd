//! Khintchine constructions on golden: invariants for arbitrary index
//! choices and injectivity of indices to shifts.

mod common;

use common::golden;
use dioph_core::best_approx::{compute_best_approx, BestApproxSequence};
use dioph_core::khintchine::construct_eta_from_indices;
use dioph_core::numerics::dist_to_int;
use proptest::prelude::*;
use std::sync::OnceLock;

fn seq() -> &'static BestApproxSequence {
    static S: OnceLock<BestApproxSequence> = OnceLock::new();
    S.get_or_init(|| compute_best_approx(&golden(), 100_000).unwrap())
}

/// Strictly increasing indices in `1..len` with consecutive gaps `>= gap`.
fn indices(gap: usize) -> impl Strategy<Value = Vec<usize>> {
    let len = seq().len();
    (1usize..4, prop::collection::vec(gap..gap + 3, 0..5)).prop_filter_map("fits", move |(start, steps)| {
        let mut v = vec![start];
        for s in steps {
            v.push(v[v.len() - 1] + s);
        }
        (v[v.len() - 1] < len).then_some(v)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn invariants_hold_for_any_gapped_indices(ix in indices(4)) {
        let c = construct_eta_from_indices(seq(), &ix).unwrap();
        for chk in c.invariant_checks().unwrap() {
            prop_assert!(chk.holds, "{ix:?}: {chk:?}");
        }
    }

    #[test]
    fn distinct_indices_give_distinct_shifts(a in indices(4), b in indices(4)) {
        prop_assume!(a != b);
        let ea = construct_eta_from_indices(seq(), &a).unwrap().eta_reduced();
        let eb = construct_eta_from_indices(seq(), &b).unwrap().eta_reduced();
        let d = dist_to_int(&ea.sub(&eb).unwrap());
        prop_assert!(d.is_certainly_positive(), "{a:?} and {b:?} give the same shift");
    }
}

#[test]
fn adjacent_indices_can_collide() {
    // With gap 1 injectivity fails: for golden the remainders satisfy
    // x_k + x_(k+1) = x_(k+2), which is why the default gap is 2B.
    let s = seq();
    let a = construct_eta_from_indices(s, &[3, 4]).unwrap().eta_reduced();
    let b = construct_eta_from_indices(s, &[5]).unwrap().eta_reduced();
    let d = dist_to_int(&a.sub(&b).unwrap());
    assert!(d.to_f64() < 1e-30, "{}", d.to_decimal(20));
}
