//! Sieve-lab integration: reference prime counts, the class-partition
//! identity, least primes over all small moduli, and the toy-scale positivity
//! of the smoothed prime sum.

use prime_intervals::sieve::{self, phi_table};
use prime_intervals::weights::WeightSpec;

#[test]
fn pi_of_1e7_reference() {
    let s = sieve::sieve(10_000_000).unwrap();
    assert_eq!(s.count(), 664_579);
    assert_eq!(s.primes().first(), Some(&2));
    assert_eq!(s.primes().last(), Some(&9_999_991));
}

#[test]
fn theta_partition_identity_to_1e5() {
    let s = sieve::sieve(100_000).unwrap();
    let y = 1e5;
    let full = sieve::theta(y, 1, 0, &s).unwrap();
    for q in 2..=100u64 {
        let mut sum = 0.0;
        for a in 0..q {
            if num_integer::gcd(a, q) == 1 {
                sum += sieve::theta(y, q, a, &s).unwrap();
            }
        }
        let missing: f64 = s
            .primes()
            .iter()
            .take_while(|&&p| (p as f64) <= y)
            .filter(|&&p| q % p == 0)
            .map(|&p| (p as f64).ln())
            .sum();
        assert!(
            (sum + missing - full).abs() < 1e-6 * full,
            "partition identity broken at q = {q}"
        );
    }
}

#[test]
fn least_primes_exist_below_1e7_for_q_up_to_1000() {
    let s = sieve::sieve(10_000_000).unwrap();
    let mut largest = (0u64, 0u64, 0u64);
    for q in 2..=1000u64 {
        for (a, p) in sieve::least_primes_all_classes(q, &s) {
            let p = p.unwrap_or_else(|| panic!("no prime = {a} mod {q} below 1e7"));
            if p > largest.0 {
                largest = (p, q, a);
            }
            // Trivially below e^(alpha ln^2 q) for the largest published
            // exponent alpha = 19.228.
            assert!((p as f64).ln() <= 19.228 * (q as f64).ln().powi(2).max(1.0));
        }
    }
    println!("largest least prime below q = 1000: P({}, {}) = {}", largest.2, largest.1, largest.0);
    assert!(largest.0 < 100_000);
}

#[test]
fn weighted_sum_positive_at_toy_scale() {
    // Support [e^12, e^13]: sieve to 4.5e5 covers it; every coprime class of
    // q in {3, 5, 7} holds weighted prime mass.
    let s = sieve::sieve(450_000).unwrap();
    let spec = WeightSpec::new(12.0, 1.0, 3).unwrap();
    for q in [3u64, 5, 7] {
        for a in 1..q {
            if num_integer::gcd(a, q) != 1 {
                continue;
            }
            let v = sieve::weighted_prime_sum(q, a, &spec, &s).unwrap();
            assert!(v > 0.0, "sum vanished for (q, a) = ({q}, {a})");
        }
    }
}

#[test]
fn phi_table_agrees_with_lower_bound_to_1e6() {
    let phi = phi_table(1_000_000);
    for q in 3..=1_000_000usize {
        let bound = prime_intervals::estimates::phi_lower_bound(q as f64).unwrap();
        assert!(
            f64::from(phi[q]) >= bound,
            "phi({q}) = {} below the analytic lower bound {bound}",
            phi[q]
        );
    }
}

#[test]
fn deviation_scan_report_fields_consistent() {
    let s = sieve::sieve(200_000).unwrap();
    let report = sieve::theta_deviation_scan(12, 2e5, &s).unwrap();
    assert_eq!(report.per_q.len(), 12);
    assert!(report.max_ratio >= report.per_q.iter().map(|&(_, r)| r).fold(0.0, f64::max) - 1e-15);
    assert_eq!(report.bound, 2.072);
    let as_report = report.to_report();
    assert_eq!(as_report.name, "theta-deviation");
    assert_eq!(as_report.pass, report.pass);
    // Reports are reproducible bit-for-bit given identical inputs.
    let again = sieve::theta_deviation_scan(12, 2e5, &s).unwrap();
    assert_eq!(report.max_ratio.to_bits(), again.max_ratio.to_bits());
    assert_eq!(report.witness.y.to_bits(), again.witness.y.to_bits());
}
