//! Table replay and sweep behaviour beyond the acceptance samples, including
//! the per-row deltas for the published block where the optimizer provably
//! beats the published entries.

use prime_intervals::solver::{self, RegionMode, SolverInput, SweepConfig};

/// Additional published rows (q0, eps, u, m, H, alpha) replayed through the
/// defining equation.
const MORE_ROWS: [(f64, f64, f64, u32, f64, f64); 6] = [
    (1e15, 1.0, 0.043, 21, 83.6, 4.8905),
    (1e20, 0.1, 0.037, 27, 1_045.0, 5.1114),
    (1e25, 1e-3, 0.030, 34, 131_618.0, 5.6164),
    (1e40, 0.1, 0.021, 47, 1_846.0, 4.4989),
    (1e55, 1e-2, 0.016, 63, 24_661.0, 4.4832),
    (1e85, 1.0, 0.010, 90, 361.0, 4.0645),
];

#[test]
fn replay_additional_published_rows() {
    for &(q0, eps, _u, m, h, alpha) in &MORE_ROWS {
        let s = solver::solve_alpha(h, m, q0, eps, 1e-6).unwrap();
        let rel = (s.alpha / alpha - 1.0).abs();
        assert!(rel < 0.005, "(q0={q0:e}, eps={eps}): {} vs {alpha} ({:.3}%)", s.alpha, rel * 100.0);
        assert!((s.residual - 1e-6).abs() <= 1e-9);
    }
}

#[test]
fn published_block_at_5e4_deltas_recorded() {
    // The 5e4 block: four cells optimize to the published value; the eps = 0.1
    // and eps = 1 entries are not reproducible by the published algorithm (no
    // balancing root yields their H at their u) and the honest optimum is
    // better. The deltas are pinned here so drift in either direction shows.
    let published = [(1e-4, 19.228), (1e-3, 15.550), (1e-2, 12.245), (0.1, 9.4357), (1.0, 6.9684), (10.0, 4.8430)];
    let mut deltas = Vec::new();
    for &(eps, alpha_pub) in &published {
        let s = solver::optimize(5e4, eps).unwrap();
        deltas.push((eps, s.alpha / alpha_pub - 1.0));
    }
    println!("5e4 block deltas: {deltas:?}");
    for &(eps, d) in &deltas {
        match eps {
            e if e == 0.1 => assert!((-0.02..=-0.005).contains(&d), "eps 0.1 delta {d}"),
            e if e == 1.0 => assert!((-0.03..=-0.01).contains(&d), "eps 1 delta {d}"),
            _ => assert!(d.abs() < 0.005, "eps {eps} delta {d}"),
        }
    }
}

#[test]
fn solve_dispatch_partial_overrides() {
    // (u, m) pinned: runs the balancing equation then the defining one.
    let input = SolverInput { q0: 1e10, eps: 1.0, u: Some(0.057), m: Some(16), h: None, slack: 1e-6 };
    let s = solver::solve(&input).unwrap();
    assert!((s.alpha / 5.3418 - 1.0).abs() < 0.005);
    assert!((s.h / 62.5 - 1.0).abs() < 0.05);

    // u pinned only: sweeps m near the seed.
    let input = SolverInput { q0: 1e10, eps: 1.0, u: Some(0.057), m: None, h: None, slack: 1e-6 };
    let s2 = solver::solve(&input).unwrap();
    assert!(s2.alpha <= s.alpha + 1e-12);

    // (m, H) pinned: plain replay.
    let input = SolverInput { q0: 1e10, eps: 1.0, u: None, m: Some(16), h: Some(62.5), slack: 1e-6 };
    let s3 = solver::solve(&input).unwrap();
    assert!((s3.alpha / 5.3418 - 1.0).abs() < 0.005);

    // H without m is unsupported.
    let input = SolverInput { q0: 1e10, eps: 1.0, u: None, m: None, h: Some(62.5), slack: 1e-6 };
    assert!(solver::solve(&input).is_err());
}

#[test]
fn reproduce_tables_small_grid() {
    let grid = [(1e10, 1.0), (1e15, 1.0), (1e10, 10.0)];
    let rows = solver::reproduce_tables(&grid, &SweepConfig::default()).unwrap();
    assert_eq!(rows.len(), 3);
    for (row, &(q0, eps)) in rows.iter().zip(&grid) {
        assert_eq!(row.q0, q0);
        assert_eq!(row.eps, eps);
        assert!(row.alpha > 3.0 && row.alpha < 8.0);
        assert!(row.h >= 1.0);
        assert!(row.m >= 3);
    }
    // Published values for the three cells.
    assert!((rows[0].alpha / 5.3418 - 1.0).abs() < 0.005);
    assert!((rows[1].alpha / 4.8905 - 1.0).abs() < 0.005);
    assert!((rows[2].alpha / 4.4761 - 1.0).abs() < 0.005);
}

#[test]
fn mccurley_chain_is_ordered() {
    let eps = 3.0_f64.ln();
    let full = solver::mccurley_comparison(1e30, eps, RegionMode::Full).unwrap();
    let single = solver::mccurley_comparison(1e30, eps, RegionMode::Single { r: 6.50 }).unwrap();
    assert!(full.alpha < single.alpha);
}

#[test]
fn slack_moves_alpha_monotonically() {
    // Larger slack demands a smaller q0*r, hence a larger alpha.
    let a1 = solver::solve_alpha(62.5, 16, 1e10, 1.0, 1e-6).unwrap().alpha;
    let a2 = solver::solve_alpha(62.5, 16, 1e10, 1.0, 1e-2).unwrap().alpha;
    assert!(a2 > a1);
}
