//! The polynomial bump weight `f(t) = (t-L)^m * (L+eps-t)^m` on `[L, L+eps]`,
//! its norm ratios `mu_m`, `nu_m`, and the four Laplace-transform bounds that
//! control the zero-sum contributions.
//!
//! The closed forms are what production code uses; the quadrature evaluator
//! [`laplace_numeric`] exists to property-test the bounds against the defining
//! integral.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::Error;
use crate::logdomain::LogNonNegReal;
use crate::quad::adaptive_simpson;
use crate::Result;

/// Largest smoothness order accepted; the factorial table is sized for it.
pub const MAX_M: u32 = 200;

/// Parameters of the bump: support `[l, l+eps]`, vanishing to order `m` at
/// both endpoints. In production `l = alpha * ln^2 q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub l: f64,
    pub eps: f64,
    pub m: u32,
}

impl WeightSpec {
    pub fn new(l: f64, eps: f64, m: u32) -> Result<Self> {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::domain(format!("weight support start must be >= 0, got {l}")));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::domain(format!("weight support width must be > 0, got {eps}")));
        }
        if m < 1 || m > MAX_M {
            return Err(Error::domain(format!("smoothness order must be in 1..={MAX_M}, got {m}")));
        }
        Ok(WeightSpec { l, eps, m })
    }
}

/// Cumulative `ln k!` table for `k <= 2*MAX_M + 1`.
fn ln_factorial(n: u32) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(2 * MAX_M as usize + 2);
        t.push(0.0); // 0!
        let mut acc = 0.0;
        for k in 1..=(2 * MAX_M + 1) {
            acc += f64::from(k).ln();
            t.push(acc);
        }
        t
    });
    table[n as usize]
}

fn check_m(m: u32) -> Result<()> {
    if m < 1 || m > MAX_M {
        return Err(Error::domain(format!("m must be in 1..={MAX_M}, got {m}")));
    }
    Ok(())
}

/// `ln mu_m` with `mu_m = (2m+1)! / (m! * sqrt(2m+1))`.
pub fn mu_log(m: u32) -> Result<LogNonNegReal> {
    check_m(m)?;
    let t = ln_factorial(2 * m + 1) - ln_factorial(m) - 0.5 * f64::from(2 * m + 1).ln();
    LogNonNegReal::from_log(t)
}

/// `ln nu_m` with `nu_m = (2m+1)! / (4^m * (m!)^2)`.
pub fn nu_log(m: u32) -> Result<LogNonNegReal> {
    check_m(m)?;
    let t = ln_factorial(2 * m + 1)
        - f64::from(m) * 4.0_f64.ln()
        - 2.0 * ln_factorial(m);
    LogNonNegReal::from_log(t)
}

/// `mu_m` in linear scale; fails with an overflow error once the ratio leaves
/// the native float range (around `m = 134`).
pub fn mu(m: u32) -> Result<f64> {
    mu_log(m)?.to_linear()
}

/// `nu_m` in linear scale.
pub fn nu(m: u32) -> Result<f64> {
    nu_log(m)?.to_linear()
}

/// Evaluates the bump itself: the displayed product inside the support, zero
/// outside.
pub fn f_eval(t: f64, spec: &WeightSpec) -> f64 {
    let hi = spec.l + spec.eps;
    if t < spec.l || t > hi {
        return 0.0;
    }
    ((t - spec.l) * (hi - t)).powi(spec.m as i32)
}

/// `||f||_1 = eps^(2m+1) * (m!)^2 / (2m+1)!` (a Beta integral), in log domain.
pub fn l1_norm(spec: &WeightSpec) -> LogNonNegReal {
    let m = spec.m;
    let t = f64::from(2 * m + 1) * spec.eps.ln() + 2.0 * ln_factorial(m) - ln_factorial(2 * m + 1);
    LogNonNegReal::from_log(t).expect("finite by construction")
}

/// `||f||_inf = (eps/2)^(2m)`, in log domain.
pub fn sup_norm(spec: &WeightSpec) -> LogNonNegReal {
    let t = f64::from(2 * spec.m) * (spec.eps / 2.0).ln();
    LogNonNegReal::from_log(t).expect("finite by construction")
}

/// `||f^(m)||_2 = mu_m * ||f||_1 / eps^(m+1/2)`, in log domain.
pub fn mth_deriv_l2_norm(spec: &WeightSpec) -> Result<LogNonNegReal> {
    let mu = mu_log(spec.m)?;
    let scale = LogNonNegReal::from_log(-(f64::from(spec.m) + 0.5) * spec.eps.ln())?;
    Ok(mu.mul(l1_norm(spec)).mul(scale))
}

/// Evaluates the `m`-th derivative of the bump by expanding
/// `f(l+x) = sum_k C(m,k) eps^(m-k) (-1)^k x^(m+k)` and differentiating
/// term by term. Intended for verification at small `m`.
pub fn mth_derivative_eval(t: f64, spec: &WeightSpec) -> f64 {
    let m = spec.m;
    let hi = spec.l + spec.eps;
    if t < spec.l || t > hi {
        return 0.0;
    }
    let x = t - spec.l;
    let mut acc = 0.0;
    for k in 0..=m {
        // C(m,k) * eps^(m-k) * (-1)^k * (m+k)!/k! * x^k
        let ln_mag = ln_factorial(m) - ln_factorial(k) - ln_factorial(m - k)
            + f64::from(m - k) * spec.eps.ln()
            + (ln_factorial(m + k) - ln_factorial(k));
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * ln_mag.exp() * x.powi(k as i32);
    }
    acc
}

/// Laplace transform `F(s) = int f(t) e^(-st) dt` by adaptive quadrature on
/// the factored form `e^(-s l) * int_0^eps x^m (eps-x)^m e^(-s x) dx`.
/// Reference evaluator for tests; production error terms use the closed-form
/// bounds below.
pub fn laplace_numeric(s: Complex64, spec: &WeightSpec) -> Complex64 {
    let m = spec.m as i32;
    let eps = spec.eps;
    let bump = move |x: f64| (x * (eps - x)).powi(m);
    let re = adaptive_simpson(&|x| bump(x) * (-s.re * x).exp() * (s.im * x).cos(), 0.0, eps, 1e-11);
    let im = adaptive_simpson(&|x| bump(x) * (-s.re * x).exp() * (s.im * x).sin(), 0.0, eps, 1e-11);
    // int e^(-st) = e^(-s(l+x)): the x-integral above used e^(+i s.im x).cos etc.
    // e^(-(a+ib)x) = e^(-ax)(cos(bx) - i sin(bx)).
    let inner = Complex64::new(re, -im);
    let shift = Complex64::new(-s.re * spec.l, -s.im * spec.l);
    inner * shift.exp()
}

/// The four right-hand sides of the Laplace bounds, as log-domain magnitudes.
///
/// * `lower`: `e^(-sigma(L+eps)) ||f||_1 <= F(sigma)` (real `s` only);
/// * `flat`: `|F(s)| <= e^(-sigma L) ||f||_1`;
/// * `decay_one`: `|F(s)| <= e^(-sigma L)/|s| * 2(2m+1)/(eps m) * ||f||_1`,
///   the published constant that the error terms consume;
/// * `decay_m`: `|F(s)| <= sqrt(eps) e^(-sigma L) ||f^(m)||_2 / |s|^m`.
///
/// One integration by parts gives `|F(s)| <= e^(-sigma L)/|s| * int |f'|`
/// with `int |f'| = 2 ||f||_inf` exactly (`f` rises once and falls once),
/// i.e. the constant `2 nu_m / eps`. The published `2(2m+1)/(eps m)` sits
/// *below* that from `m = 4` on (`nu_m` grows like `sqrt(m)`), and the
/// defining integral does overshoot it for moderate `|s| eps`; see the
/// pinned counterexample in the tests. `decay_one_provable` carries the
/// integration-by-parts constant.
///
/// The |s|-divided bounds are `None` at `s = 0`.
#[derive(Debug, Clone, Copy)]
pub struct LaplaceBounds {
    pub lower: LogNonNegReal,
    pub flat: LogNonNegReal,
    pub decay_one: Option<LogNonNegReal>,
    pub decay_one_provable: Option<LogNonNegReal>,
    pub decay_m: Option<LogNonNegReal>,
}

pub fn laplace_bounds(s: Complex64, spec: &WeightSpec) -> Result<LaplaceBounds> {
    if !(s.re >= 0.0) {
        return Err(Error::domain(format!("laplace bounds need Re s >= 0, got {}", s.re)));
    }
    let l1 = l1_norm(spec);
    let lower = LogNonNegReal::from_log(-s.re * (spec.l + spec.eps))?.mul(l1);
    let damp = LogNonNegReal::from_log(-s.re * spec.l)?;
    let flat = damp.mul(l1);
    let (decay_one, decay_one_provable, decay_m) = if s.norm_sqr() == 0.0 {
        (None, None, None)
    } else {
        let abs_s = LogNonNegReal::from_log(0.5 * s.norm_sqr().ln())?;
        let coeff =
            LogNonNegReal::from_linear(2.0 * f64::from(2 * spec.m + 1) / (spec.eps * f64::from(spec.m)))?;
        let one = damp.mul(l1).mul(coeff).div(abs_s)?;
        let coeff_provable = LogNonNegReal::from_linear(2.0 / spec.eps)?.mul(nu_log(spec.m)?);
        let one_provable = damp.mul(l1).mul(coeff_provable).div(abs_s)?;
        let sqrt_eps = LogNonNegReal::from_log(0.5 * spec.eps.ln())?;
        let md = sqrt_eps
            .mul(damp)
            .mul(mth_deriv_l2_norm(spec)?)
            .div(abs_s.pow(f64::from(spec.m)))?;
        (Some(one), Some(one_provable), Some(md))
    };
    Ok(LaplaceBounds { lower, flat, decay_one, decay_one_provable, decay_m })
}
