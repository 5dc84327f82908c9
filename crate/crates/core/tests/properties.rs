//! Property tests: log-domain arithmetic laws, weight symmetry, the Laplace
//! bounds against quadrature, and order-independence of the Watson verdict.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use prime_intervals::cubes::{self, WatsonInstance, WatsonVerdict};
use prime_intervals::logdomain::LogNonNegReal;
use prime_intervals::weights::{f_eval, laplace_bounds, laplace_numeric, WeightSpec};

proptest! {
    #![proptest_config(ProptestConfig { cases: 500, .. ProptestConfig::default() })]

    #[test]
    fn log_sum_commutative_associative(
        a in -1e6_f64..1e6,
        b in -1e6_f64..1e6,
        c in -1e6_f64..1e6,
    ) {
        let (x, y, z) = (
            LogNonNegReal::from_log(a).unwrap(),
            LogNonNegReal::from_log(b).unwrap(),
            LogNonNegReal::from_log(c).unwrap(),
        );
        let left = x.add(y).add(z).log_value();
        let right = x.add(y.add(z)).log_value();
        let batched = LogNonNegReal::sum(&[z, x, y]).log_value();
        let tol = 1e-12 * left.abs().max(1.0);
        prop_assert!((left - right).abs() <= tol);
        prop_assert!((left - batched).abs() <= tol);
    }

    #[test]
    fn log_compare_matches_magnitudes(a in -700.0_f64..700.0, b in -700.0_f64..700.0) {
        let x = LogNonNegReal::from_log(a).unwrap();
        let y = LogNonNegReal::from_log(b).unwrap();
        let by_log = x.compare(&y);
        let by_value = x
            .to_linear()
            .unwrap()
            .partial_cmp(&y.to_linear().unwrap())
            .unwrap();
        prop_assert_eq!(by_log, by_value);
    }

    #[test]
    fn log_mul_pow_never_nan(a in -1e8_f64..1e8, k in -50.0_f64..50.0) {
        let x = LogNonNegReal::from_log(a).unwrap();
        prop_assert!(!x.mul(x).log_value().is_nan());
        prop_assert!(!x.pow(k).log_value().is_nan());
        prop_assert!(!x.add(x).log_value().is_nan());
    }

    #[test]
    fn round_trip_linear(x in 1e-300_f64..1e300) {
        let v = LogNonNegReal::from_linear(x).unwrap();
        let back = v.to_linear().unwrap();
        // exp(ln x) loses about |ln x| ulps; within +-e^90 that is below 1e-14.
        let tol = (1e-14_f64).max(x.ln().abs() * 2.3e-16);
        prop_assert!((back - x).abs() <= tol * x);
    }

    #[test]
    fn weight_symmetry(
        l in 0.0_f64..5.0,
        eps in 0.05_f64..4.0,
        m in 1u32..8,
        frac in 0.0_f64..0.44,
    ) {
        let spec = WeightSpec::new(l, eps, m).unwrap();
        let mid = l + eps / 2.0;
        let offset = frac * eps;
        let lo = f_eval(mid - offset, &spec);
        let hi = f_eval(mid + offset, &spec);
        // Cancellation in (t - l) near the endpoints costs ~m ulps scaled by
        // the distance to the endpoint.
        prop_assert!((lo - hi).abs() <= 1e-9 * lo.abs().max(1e-30));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, .. ProptestConfig::default() })]

    #[test]
    fn laplace_bounds_dominate_quadrature(
        l in 0.0_f64..3.0,
        eps in 0.1_f64..3.0,
        m in 1u32..7,
        sigma in 0.0_f64..5.0,
        tau_scaled in -40.0_f64..40.0,
    ) {
        let spec = WeightSpec::new(l, eps, m).unwrap();
        let s = Complex64::new(sigma, tau_scaled / eps);
        let numeric = laplace_numeric(s, &spec);
        let bounds = laplace_bounds(s, &spec).unwrap();
        let mag = numeric.norm();
        let slop = 1.0 + 1e-7;
        prop_assert!(mag <= bounds.flat.to_linear().unwrap() * slop);
        // The published 1/|s| constant is only valid for m <= 3; the
        // integration-by-parts constant 2*nu_m/eps holds for every m.
        if m <= 3 {
            if let Some(b) = bounds.decay_one {
                prop_assert!(mag <= b.to_linear().unwrap() * slop);
            }
        }
        if let Some(b) = bounds.decay_one_provable {
            prop_assert!(mag <= b.to_linear().unwrap() * slop);
        }
        if let Some(b) = bounds.decay_m {
            prop_assert!(mag <= b.to_linear().unwrap() * slop);
        }
        let real_val = laplace_numeric(Complex64::new(sigma, 0.0), &spec).re;
        prop_assert!(real_val * slop >= bounds.lower.to_linear().unwrap());
    }
}

/// Re-checks the seven conditions in a different order, collecting every
/// failure instead of stopping at the first; the pass/fail outcome must agree
/// with the production checker regardless of evaluation order.
fn watson_all_failures(inst: &WatsonInstance) -> Vec<u8> {
    let (n, a, u, v, w, t) = (&inst.n, &inst.a, &inst.u, &inst.v, &inst.w, &inst.t);
    let one = BigUint::one();
    let mut failures = Vec::new();

    let gap = num_bigint::BigInt::from(n.clone()) - num_bigint::BigInt::from(t.pow(3));
    let big = |x: u32| num_bigint::BigInt::from(x);

    // (7) first.
    {
        let uv = u * v;
        let s_sym = uv.pow(6) + (v * w).pow(6) + (u * w).pow(6);
        let a3 = num_bigint::BigInt::from(a.pow(3));
        let n_up = big(4) * num_bigint::BigInt::from(n.clone()) - &a3 * num_bigint::BigInt::from(s_sym);
        let n_lo = &n_up - big(3) * num_bigint::BigInt::from(uv.pow(6)) * &a3;
        let four_t3 = big(4) * num_bigint::BigInt::from(t.pow(3));
        if n_lo.is_negative() || four_t3 < n_lo || four_t3 > n_up {
            failures.push(7);
        }
    }
    // (6)
    {
        let four_gap = big(4) * &gap;
        let a3 = num_bigint::BigInt::from(a.pow(3));
        for (m2src, x, y) in [(u, v, w), (v, u, w), (w, u, v)] {
            let m2 = num_bigint::BigInt::from(m2src.pow(2));
            let rhs = (num_bigint::BigInt::from(x.pow(6)) * num_bigint::BigInt::from(y.pow(6)) * &a3)
                .mod_floor(&m2);
            if four_gap.mod_floor(&m2) != rhs {
                failures.push(6);
                break;
            }
        }
    }
    // (5)
    if !gap
        .mod_floor(&(big(3) * num_bigint::BigInt::from(a.clone())))
        .is_zero()
    {
        failures.push(5);
    }
    // (4)
    if gap.mod_floor(&big(2)) != num_bigint::BigInt::one() {
        failures.push(4);
    }
    // (3)
    if u.gcd(v) != one
        || u.gcd(w) != one
        || v.gcd(w) != one
        || a.gcd(u) != one
        || a.gcd(v) != one
        || a.gcd(w) != one
    {
        failures.push(3);
    }
    // (2)
    if (u * v * w).gcd(&(BigUint::from(6u32) * n)) != one || (a % 2u32).is_zero() {
        failures.push(2);
    }
    // (1)
    let uv = u * v;
    if u.is_zero() || u > v || v > w || BigUint::from(18432u32) * w.pow(3) > uv.pow(3) {
        failures.push(1);
    }
    failures
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 60, .. ProptestConfig::default() })]

    #[test]
    fn watson_verdict_is_order_independent(
        t_steps in 0u64..3,
        n_steps in 0u64..4,
        bump_n in 0u64..5,
        bump_t in 0u64..3,
        bump_a in 0u64..3,
    ) {
        let base = cubes::synthesize_instance(29, 35, 37, 1, t_steps, n_steps).unwrap();
        // Valid and perturbed variants.
        let mut inst = base.clone();
        inst.n = &base.n + BigUint::from(bump_n);
        inst.t = &base.t + BigUint::from(bump_t);
        inst.a = &base.a + BigUint::from(2 * bump_a);
        let forward = cubes::watson_check(&inst).passed();
        let reversed = watson_all_failures(&inst).is_empty();
        prop_assert_eq!(forward, reversed);
        // The untouched instance stays valid.
        prop_assert!(matches!(cubes::watson_check(&base), WatsonVerdict::Pass));
    }
}
