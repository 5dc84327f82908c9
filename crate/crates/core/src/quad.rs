//! Adaptive quadrature on finite intervals.
//!
//! Simpson's rule with recursive bisection and Richardson error control. The
//! integrands in this crate (log factors, polynomial bumps, damped
//! oscillations) are smooth, so adaptive Simpson converges quickly; callers
//! with infinite ranges substitute variables first and bound the tail
//! analytically.

/// Integrates `f` over `[a, b]` to the requested relative tolerance.
///
/// The tolerance is measured against a magnitude proxy for `int |f|`, so
/// cancelling integrands do not demand impossible absolute accuracy, and each
/// interval carries a floating-point noise floor that stops refinement once
/// the requested tolerance falls below what f64 evaluation can resolve.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let magnitude = (b - a) / 6.0 * (fa.abs() + 4.0 * fm.abs() + fb.abs());
    let scale = whole.abs().max(0.1 * magnitude).max(1e-300);
    recurse(f, a, b, fa, fm, fb, whole, rel_tol * scale, 48)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    abs_tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let err = left + right - whole;
    // f64 cannot resolve the interval below this level no matter how far we
    // split, so treat it as converged.
    let noise =
        1e-15 * (b - a) / 6.0 * (fa.abs() + 4.0 * (flm.abs() + frm.abs()) + fb.abs());
    if depth == 0 || err.abs() <= 15.0 * abs_tol.max(noise) {
        // Richardson extrapolation: Simpson error shrinks 16x per halving.
        return left + right + err / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * abs_tol, depth - 1)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * abs_tol, depth - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        // Simpson integrates cubics exactly: int_0^2 x^3 dx = 4.
        let v = adaptive_simpson(&|x| x * x * x, 0.0, 2.0, 1e-12);
        assert!((v - 4.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_matches_closed_form() {
        let v = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn oscillatory_with_cancellation_converges() {
        // int_0^pi sin(10 x) dx = (1 - cos(10 pi))/10 = 0: the noise floor
        // must stop refinement instead of chasing an impossible tolerance.
        let v = adaptive_simpson(&|x| (10.0 * x).sin(), 0.0, std::f64::consts::PI, 1e-11);
        assert!(v.abs() < 1e-9, "got {v}");
    }

    #[test]
    fn oscillatory_nonzero_value() {
        // int_0^1 sin(40 x) dx = (1 - cos 40)/40.
        let expect = (1.0 - 40.0_f64.cos()) / 40.0;
        let v = adaptive_simpson(&|x| (40.0 * x).sin(), 0.0, 1.0, 1e-11);
        assert!((v - expect).abs() < 1e-9 * expect.abs().max(1.0));
    }

    #[test]
    fn vanishing_integrand_terminates() {
        let v = adaptive_simpson(&|_| 0.0, 0.0, 1.0, 1e-12);
        assert_eq!(v, 0.0);
    }
}
