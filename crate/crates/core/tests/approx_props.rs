//! Duality and inversion on the power-log family, against a bisection
//! written here from scratch.

use dioph_core::approx_functions::{dual, invert, ApproxFunction};
use proptest::prelude::*;

const PARAMS: [((i64, i64), (i64, i64)); 5] = [((1, 1), (1, 2)), ((2, 1), (1, 1)), ((3, 2), (0, 1)), ((1, 1), (2, 1)), ((5, 2), (3, 2))];

fn family(i: usize) -> ApproxFunction {
    let (a, b) = PARAMS[i];
    ApproxFunction::power_log_ratio(a, b).unwrap()
}

fn f_direct(a: f64, b: f64, t: f64) -> f64 {
    t.powf(-a) * t.ln().powf(-b)
}

/// `1 / F^-1(1/T)` by bisection in `log t` on `(1, inf)`, 200 halvings.
fn dual_oracle(a: f64, b: f64, t: f64) -> f64 {
    let target = 1.0 / t;
    let (mut lo, mut hi) = (1e-12f64, 1e4f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f_direct(a, b, mid.exp()) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (-0.5 * (lo + hi)).exp()
}

fn log_uniform() -> impl Strategy<Value = f64> {
    (1.0f64..8.0).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn double_dual_is_identity(i in 0usize..5, t in log_uniform()) {
        let f = family(i);
        let gg = dual(&dual(&f));
        let (x, y) = (f.eval_f64(t).unwrap(), gg.eval_f64(t).unwrap());
        prop_assert!(((y - x) / x).abs() < 1e-9, "{:?} at {t}: {x} vs {y}", PARAMS[i]);
    }

    #[test]
    fn dual_matches_bisection(i in 0usize..5, t in log_uniform()) {
        let (a, b) = PARAMS[i];
        let (af, bf) = (a.0 as f64 / a.1 as f64, b.0 as f64 / b.1 as f64);
        let g = dual(&family(i)).eval_f64(t).unwrap();
        let o = dual_oracle(af, bf, t);
        prop_assert!(((g - o) / o).abs() < 1e-9, "{:?} at {t}: {g} vs {o}", PARAMS[i]);
    }

    #[test]
    fn f1_is_self_dual(t in log_uniform()) {
        let f1 = ApproxFunction::f1();
        let g = dual(&f1);
        prop_assert_eq!(&g, &f1);
        prop_assert_eq!(g.eval_at(t).unwrap(), f1.eval_at(t).unwrap());
    }

    #[test]
    fn invert_round_trips(i in 0usize..5, t in log_uniform()) {
        let f = family(i);
        let back = invert(&f, f.eval_f64(t).unwrap()).unwrap();
        prop_assert!(((back - t) / t).abs() < 1e-9);
    }

    #[test]
    fn dual_is_decreasing(i in 0usize..5, t in log_uniform(), ratio in 1.01f64..10.0) {
        let g = dual(&family(i));
        prop_assert!(g.eval_f64(t * ratio).unwrap() < g.eval_f64(t).unwrap());
    }
}
