//! Fixed analytic constants and the zero-density / gamma-factor estimates.
//!
//! Everything here is an explicit closed form or a one-dimensional integral;
//! "log" always means the natural logarithm (the `2*pi*e` factors in the
//! displayed formulas only make sense that way).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::Error;
use crate::quad::adaptive_simpson;
use crate::Result;

/// Classical zero-free region constant: at most one (real, simple) zero with
/// `sigma >= 1 - 1/(R*log(q*max(1,|t|)))`.
pub const R: f64 = 6.50;
/// Low-lying zeros constant: at most four zeros with
/// `sigma >= 1 - 1/(R1*log x)`, `|Im s| <= x/q`.
pub const R1: f64 = 3.82;
/// Repulsion constant between real zeros of distinct real primitive characters.
pub const R2: f64 = 2.05;
/// Zero-count remainder coefficients: `|N(T,chi) - P(T)| <= a1*log(qT) + a2`.
pub const A1: f64 = 0.92;
pub const A2: f64 = 5.37;
/// Euler's constant, as the fixed decimal literal used throughout.
pub const EULER_GAMMA: f64 = 0.5772156649;

/// The fixed constant set, bundled for callers that thread it around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    pub r: f64,
    pub r1: f64,
    pub r2: f64,
    pub a1: f64,
    pub a2: f64,
    pub euler_gamma: f64,
}

impl Default for AnalyticConstants {
    fn default() -> Self {
        AnalyticConstants { r: R, r1: R1, r2: R2, a1: A1, a2: A2, euler_gamma: EULER_GAMMA }
    }
}

const LN_2PI: f64 = 1.8378770664093453;
const LN_2PI_E: f64 = LN_2PI + 1.0;

/// Main term `P(T) = (T/pi) * log(qT/(2*pi*e))` of the zero count `N(T,chi)`.
pub fn zero_count_main(t: f64, q: f64) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::domain(format!("zero count stated for T >= 1, got T = {t}")));
    }
    if !(q >= 3.0) {
        return Err(Error::domain(format!("zero count requires q >= 3, got q = {q}")));
    }
    Ok(t / PI * ((q * t).ln() - LN_2PI_E))
}

/// Upper bound `P(T) + a1*log(qT) + a2` for the zero count `N(T,chi)`.
pub fn zero_count_upper(t: f64, q: f64) -> Result<f64> {
    let p = zero_count_main(t, q)?;
    Ok(p + A1 * (q * t).ln() + A2)
}

/// The explicit bound `E~(H)` for `sum 1/|gamma|` over zeros with
/// `1 < |gamma| < H` of a single L-function of conductor `q`.
pub fn inverse_gamma_sum_bound(h: f64, q: f64) -> Result<f64> {
    if !(h >= 1.0) {
        return Err(Error::domain(format!("inverse_gamma_sum_bound requires H >= 1, got {h}")));
    }
    if !(q >= 3.0) {
        return Err(Error::domain(format!("inverse_gamma_sum_bound requires q >= 3, got {q}")));
    }
    let lq = q.ln();
    let lh = h.ln();
    Ok(lq * lh / PI + lh * lh / (2.0 * PI) + (1.0 / PI + A1) * lq - LN_2PI / PI * lh
        - LN_2PI_E / PI
        + A2
        + A1
        - A1 / h)
}

/// Gamma-factor bound `U(T) = log(6*(T+12))` for `T >= 0`.
pub fn gamma_bound(t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("gamma_bound requires T >= 0, got {t}")));
    }
    Ok((6.0 * (t + 12.0)).ln())
}

/// `J_0 = int_{|T|<=1} log(6*(|T|+12)) dT`, via the antiderivative
/// `(T+12)*log(6*(T+12)) - T`.
pub fn j_zero() -> f64 {
    2.0 * (13.0 * 78.0_f64.ln() - 12.0 * 72.0_f64.ln() - 1.0)
}

/// `J(m) = int_{|T|>1} log(6*(|T|+12)) / |T|^m dT` for `m >= 2`.
///
/// Computed as `2 * int_1^Tmax` after the substitution `T = e^x` (the
/// integrand is then smooth and exponentially decaying), with `Tmax` doubled
/// until the analytic tail bound drops below `1e-12` of the running value.
/// Results are memoized per `m`.
pub fn j_of_m(m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::domain(format!("J(m) diverges for m < 2, got m = {m}")));
    }
    static CACHE: OnceLock<Mutex<HashMap<u32, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(&v) = cache.lock().unwrap().get(&m) {
        return Ok(v);
    }

    let mf = f64::from(m);
    // After T = e^x: integrand log(6*(e^x+12)) * e^(x*(1-m)).
    let g = move |x: f64| (6.0 * (x.exp() + 12.0)).ln() * (x * (1.0 - mf)).exp();
    let mut t_max = 4.0_f64;
    let value = loop {
        let body = 2.0 * adaptive_simpson(&g, 0.0, t_max.ln(), 1e-10);
        // tail: 2 * int_Tmax^inf <= 2 * Tmax^(1-m)/(m-1) * (log(6(Tmax+12)) + 1/(m-1))
        let tail = 2.0 * t_max.powf(1.0 - mf) / (mf - 1.0)
            * ((6.0 * (t_max + 12.0)).ln() + 1.0 / (mf - 1.0));
        if tail <= 1e-12 * body {
            break body;
        }
        t_max *= 2.0;
    };
    cache.lock().unwrap().insert(m, value);
    Ok(value)
}

/// Lower bound for Euler's totient: `phi(q) > q / (e^C*loglog q + 2.51/loglog q)`
/// for `q >= 3`, with `C` Euler's constant.
pub fn phi_lower_bound(q: f64) -> Result<f64> {
    if !(q >= 3.0) {
        return Err(Error::domain(format!("phi_lower_bound requires q >= 3, got {q}")));
    }
    let llq = q.ln().ln();
    Ok(q / (EULER_GAMMA.exp() * llq + 2.51 / llq))
}

/// The reciprocal ratio `q/phi(q) < e^C*loglog q + 2.51/loglog q`, exposed for
/// the error-term block that uses it directly.
pub fn phi_ratio_upper(q: f64) -> Result<f64> {
    if !(q >= 3.0) {
        return Err(Error::domain(format!("phi_ratio_upper requires q >= 3, got {q}")));
    }
    let llq = q.ln().ln();
    Ok(EULER_GAMMA.exp() * llq + 2.51 / llq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_ordering() {
        let c = AnalyticConstants::default();
        assert!(c.r > c.r1 && c.r1 > c.r2 && c.r2 > 0.0);
        assert!(c.a1 > 0.0 && c.a2 > 0.0);
    }

    #[test]
    fn zero_count_main_log_argument_one() {
        // T = 2*pi*e/q makes the log argument exactly 1.
        let q = 3.0;
        let t = 2.0 * PI * std::f64::consts::E / q;
        assert!(t >= 1.0);
        let p = zero_count_main(t, q).unwrap();
        assert!(p.abs() < 1e-14);
    }

    #[test]
    fn zero_count_main_direct_evaluation() {
        // Independent grouping of the same formula.
        let expect = (1e6_f64.ln() - (2.0 * PI * std::f64::consts::E).ln()) / PI;
        let p = zero_count_main(1.0, 1e6).unwrap();
        assert!((p - expect).abs() < 1e-12);
        assert!((p - 3.4942892673).abs() < 1e-9);
    }

    #[test]
    fn zero_count_main_doubling_q() {
        let t = 7.5;
        let p1 = zero_count_main(t, 1e5).unwrap();
        let p2 = zero_count_main(t, 2e5).unwrap();
        assert!((p2 - p1 - t * 2.0_f64.ln() / PI).abs() < 1e-10);
    }

    #[test]
    fn zero_count_upper_values() {
        let v = zero_count_upper(1.0, 1e6).unwrap();
        let expect = (1e6_f64.ln() - (2.0 * PI * std::f64::consts::E).ln()) / PI
            + 0.92 * 1e6_f64.ln()
            + 5.37;
        assert!((v - expect).abs() < 1e-10);
        assert!((v - 21.5745589806).abs() < 1e-6);

        // q = 3, T = 1: each piece evaluated independently.
        let v3 = zero_count_upper(1.0, 3.0).unwrap();
        let p = (3.0_f64.ln() - 2.8378770664093453) / PI;
        let expect3 = p + 0.92 * 3.0_f64.ln() + 5.37;
        assert!((v3 - expect3).abs() < 1e-12);
        assert!((v3 - 5.8270981321).abs() < 1e-6);
    }

    #[test]
    fn zero_count_monotone_in_t() {
        let mut prev = zero_count_upper(1.0, 100.0).unwrap();
        for i in 1..50 {
            let t = 1.0 + f64::from(i) * 0.5;
            let v = zero_count_upper(t, 100.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn zero_count_domain_errors() {
        assert!(zero_count_main(0.5, 100.0).is_err());
        assert!(zero_count_main(1.0, 2.0).is_err());
        assert!(inverse_gamma_sum_bound(0.9, 100.0).is_err());
    }

    #[test]
    fn inverse_gamma_sum_bound_at_one_anchors_to_zero_count() {
        // E~(1) = P(1) + R(1): both reduce to the same anchor.
        let mut q = 3.0;
        for _ in 0..100 {
            let e1 = inverse_gamma_sum_bound(1.0, q).unwrap();
            let zc = zero_count_upper(1.0, q).unwrap();
            assert!((e1 - zc).abs() < 1e-10, "q = {q}: {e1} vs {zc}");
            q *= 1.7;
            if q > 1e90 {
                q = 3.5;
            }
        }
    }

    #[test]
    fn inverse_gamma_sum_bound_increasing_in_h() {
        for &q in &[3.0, 1e3, 1e6, 1e50] {
            let mut prev = inverse_gamma_sum_bound(1.0, q).unwrap();
            for i in 1..80 {
                let h = 1.0 + f64::from(i).powi(2) * 0.3;
                let v = inverse_gamma_sum_bound(h, q).unwrap();
                assert!(v > prev, "not increasing at q = {q}, H = {h}");
                prev = v;
            }
        }
    }

    #[test]
    fn inverse_gamma_sum_bound_growth_rate() {
        // E~(e*H) - E~(H) ~ (log q + log H + 1/2 - log 2pi)/pi for large H.
        let q = 1e6;
        let h = 1e5;
        let diff = inverse_gamma_sum_bound(std::f64::consts::E * h, q).unwrap()
            - inverse_gamma_sum_bound(h, q).unwrap();
        let predicted = (q.ln() + h.ln() + 0.5 - LN_2PI) / PI;
        assert!((diff - predicted).abs() / predicted < 1e-4);
    }

    #[test]
    fn gamma_bound_values() {
        assert!((gamma_bound(0.0).unwrap() - 72.0_f64.ln()).abs() < 1e-15);
        assert!((gamma_bound(1.0).unwrap() - 78.0_f64.ln()).abs() < 1e-15);
        assert!(gamma_bound(5.0).unwrap() > gamma_bound(4.0).unwrap());
        assert!(gamma_bound(-0.1).is_err());
    }

    #[test]
    fn j_zero_against_quadrature_and_riemann_bounds() {
        let closed = j_zero();
        let quad = 2.0 * adaptive_simpson(&|t: f64| (6.0 * (t + 12.0)).ln(), 0.0, 1.0, 1e-12);
        assert!((closed - quad).abs() < 1e-6 * closed);
        assert!((closed - 8.634442637).abs() < 1e-6);
        assert!(closed >= 2.0 * 72.0_f64.ln());
        assert!(closed <= 2.0 * 78.0_f64.ln());
    }

    #[test]
    fn j_of_m_value_at_three() {
        // Partial-fraction oracle: J(3) = log 78 + 1/12 - log(13)/144.
        let oracle = 78.0_f64.ln() + 1.0 / 12.0 - 13.0_f64.ln() / 144.0;
        let v = j_of_m(3).unwrap();
        assert!((v - oracle).abs() < 1e-8 * oracle, "J(3) = {v}, oracle = {oracle}");
    }

    #[test]
    fn j_of_m_decreasing_and_enveloped() {
        // Envelope from log(6(T+12)) <= log 78 + (T-1)/13 integrated termwise:
        // J(m) < 2*log(78)/(m-1) + 2/(13*(m-1)*(m-2)).
        let mut prev = f64::INFINITY;
        for m in 3..=40 {
            let v = j_of_m(m).unwrap();
            let mf = f64::from(m);
            let envelope = 2.0 * 78.0_f64.ln() / (mf - 1.0) + 2.0 / (13.0 * (mf - 1.0) * (mf - 2.0));
            assert!(v < envelope, "m = {m}: J = {v} >= envelope {envelope}");
            assert!(v < prev, "J not decreasing at m = {m}");
            prev = v;
        }
        assert!(j_of_m(1).is_err());
    }

    #[test]
    fn phi_lower_bound_values() {
        let b = phi_lower_bound(1e6).unwrap();
        assert!((b - 177537.0).abs() < 5.0, "got {b}");
        // q = 3: bound must sit below phi(3) = 2.
        let b3 = phi_lower_bound(3.0).unwrap();
        assert!(b3 > 0.11 && b3 < 0.12 && b3 <= 2.0);
        assert!(phi_lower_bound(2.9).is_err());
    }

    #[test]
    fn phi_lower_bound_below_q() {
        let mut q = 3.0;
        while q < 1e12 {
            assert!(phi_lower_bound(q).unwrap() <= q);
            q *= 2.3;
        }
    }
}
