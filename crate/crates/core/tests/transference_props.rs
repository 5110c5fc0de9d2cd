//! Cassels' lemma, the scalar-product bound and Jarník's check on random
//! inputs.

mod common;

use common::{cassels_y_range, golden, random_theta, rat};
use dioph_core::approx_functions::ApproxFunction;
use dioph_core::numerics::{dist_to_int, int_sup_norm, MatrixNM, VectorN};
use dioph_core::rng::{stream, unit_vector_dyadic};
use dioph_core::transference::{
    cassels_solve, kappa_rational, minimal_admissible_q, scalar_bound_check, jarnik_uniform_check, BoundVariant,
    JarnikCase,
};
use dioph_core::Error;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn cassels_finds_a_witness_at_the_minimal_q() {
    let shapes = [(1, 1), (2, 1), (1, 2), (2, 2)];
    let mut solved = 0;
    let mut case = 0u64;
    while solved < 200 {
        let mut rng = stream(11, case);
        case += 1;
        let (n, m) = shapes[solved % shapes.len()];
        let theta = random_theta(&mut rng, n, m);
        let eta = unit_vector_dyadic(&mut rng, n);
        let y = BigRational::from_integer(rng.random_range(1..=cassels_y_range(n, m)).into());
        let q = match minimal_admissible_q(&theta, &y) {
            Ok(q) => q,
            // A transpose that is (numerically) singular at this range admits
            // no Q at all; draw again.
            Err(Error::TriviallySingular { .. }) | Err(Error::PrecisionExhausted(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        if q.to_f64().unwrap() > 5_000.0 {
            continue;
        }
        let cert = cassels_solve(&theta, &eta, &y, &q).unwrap_or_else(|e| panic!("case {case}: {e}"));
        let qf = q.floor().to_integer().to_u64().unwrap();
        assert!(int_sup_norm(&cert.witness_q) <= qf);
        let kap = kappa_rational(n, m);
        assert_eq!(cert.conclusion_bound, &kap / &y);
        // Recompute the remainder independently of the certificate.
        let again = dist_to_int(&theta.mul_ints(&cert.witness_q).unwrap().sub(&eta).unwrap());
        assert!(again.upper() <= cert.conclusion_bound, "case {case}: {} > {}", again.to_decimal(12), cert.conclusion_bound);
        assert!(cert.achieved.upper() <= cert.conclusion_bound);
        solved += 1;
    }
    // The draws above must not be dominated by rejections.
    assert!(case < 400, "{case} draws for 200 cases");
}

#[test]
fn cassels_rejects_q_below_the_minimum() {
    let eta = VectorN::new(vec![dioph_core::numerics::Scalar::ratio(1, 3).unwrap()]).unwrap();
    for yk in 2..30 {
        let y = rat(yk, 1);
        let q = minimal_admissible_q(&golden(), &y).unwrap();
        let below = &q * rat(999_999, 1_000_000);
        assert!(matches!(cassels_solve(&golden(), &eta, &y, &below), Err(Error::HypothesisViolated { .. })));
    }
}

fn shape() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((1, 1)), Just((2, 1)), Just((1, 2)), Just((2, 2))]
}

fn tuple() -> impl Strategy<Value = (MatrixNM, VectorN, Vec<i64>, Vec<i64>)> {
    (shape(), any::<u64>()).prop_flat_map(|((n, m), seed)| {
        let mut rng = stream(seed, 0);
        let theta = random_theta(&mut rng, n, m);
        let eta = unit_vector_dyadic(&mut rng, n);
        (
            Just(theta),
            Just(eta),
            prop::collection::vec(-1000i64..=1000, m),
            prop::collection::vec(-1000i64..=1000, n).prop_filter("y nonzero", |y| y.iter().any(|&v| v != 0)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn scalar_product_bound_holds((theta, eta, q, y) in tuple()) {
        let b = scalar_bound_check(&theta, &eta, &q, &y, BoundVariant::PerVector).unwrap();
        prop_assert!(b.holds, "lhs {} rhs {}", b.lhs.to_decimal(15), b.rhs.to_decimal(15));
    }
}

#[test]
fn jarnik_on_golden_with_random_shifts() {
    let bound = ApproxFunction::f1().scaled(rat(1, 20)).unwrap();
    for i in 0..20 {
        let eta = unit_vector_dyadic(&mut stream(5, i), 1);
        let r = jarnik_uniform_check(&golden(), &eta, &bound, 10.0, 1000.0, JarnikCase::AllLarge).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.violations.is_empty());
        assert!(r.get_f64("max_product").unwrap() <= 2.0 * (1.0 + 1e-9));
    }
}
