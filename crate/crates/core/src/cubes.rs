//! Seven-cubes machinery: the Watson-lemma condition checker, instance
//! construction through modular cube roots and the Chinese remainder theorem,
//! the threshold solvers for the `exp(71 000)` headline, and the exhaustive
//! small-scale cube-count oracle used to confirm representations.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Error;
use crate::Result;

/// Constants of the seven-cubes pipeline: the prime-clustering interval
/// `[c1 log n, c2 log n]`, the interval-exponent operating point
/// `(alpha, eps)` valid from modulus `k_min`, and the theta-deviation
/// constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SevenCubesParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub alpha: f64,
    pub eps: f64,
    pub k_min: f64,
    pub theta_const: f64,
}

impl Default for SevenCubesParams {
    fn default() -> Self {
        let c1 = 0.521;
        let c2 = 2.562;
        SevenCubesParams {
            c1,
            c2,
            c3: (c2 / c1).sqrt(),
            alpha: 4.3060,
            eps: 1.9,
            k_min: 1e32,
            theta_const: 2.072,
        }
    }
}

impl SevenCubesParams {
    pub fn validate(&self) -> Result<()> {
        // The pigeonhole step needs c2 - c1 > phi(6) = 2.
        if !(self.c2 - self.c1 > 2.0) {
            return Err(Error::domain(format!(
                "clustering interval too narrow: c2 - c1 = {} <= 2",
                self.c2 - self.c1
            )));
        }
        if !(self.c1 > 0.0 && self.alpha > 0.0 && self.eps > 0.0 && self.k_min > 1.0) {
            return Err(Error::domain("seven-cubes parameters must be positive"));
        }
        Ok(())
    }
}

/// A candidate tuple for the seven-cubes lemma. `delta` and `rho` are always
/// recomputed from the fields rather than stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WatsonInstance {
    pub n: BigUint,
    pub a: BigUint,
    pub u: BigUint,
    pub v: BigUint,
    pub w: BigUint,
    pub t: BigUint,
}

impl WatsonInstance {
    /// `delta = (1 + (w/u)^6 + (w/v)^6) / 4`.
    pub fn delta(&self) -> f64 {
        let u = big_to_f64(&self.u);
        let v = big_to_f64(&self.v);
        let w = big_to_f64(&self.w);
        (1.0 + (w / u).powi(6) + (w / v).powi(6)) / 4.0
    }

    /// `rho = 1 / (6 u v w a)`.
    pub fn rho(&self) -> f64 {
        1.0 / (6.0
            * big_to_f64(&self.u)
            * big_to_f64(&self.v)
            * big_to_f64(&self.w)
            * big_to_f64(&self.a))
    }
}

fn big_to_f64(x: &BigUint) -> f64 {
    x.to_f64().expect("BigUint conversion to f64 is total")
}

/// The seven conditions, in the order they are checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WatsonCondition {
    SizeChain = 1,
    CoprimeToSixNOddA = 2,
    PairwiseCoprime = 3,
    ParityGap = 4,
    DivisibleByThreeA = 5,
    CubeCongruences = 6,
    WindowPlacement = 7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WatsonVerdict {
    Pass,
    Fail(WatsonCondition),
}

impl WatsonVerdict {
    pub fn passed(&self) -> bool {
        matches!(self, WatsonVerdict::Pass)
    }
}

/// Checks the seven sufficient conditions for `n` to be a sum of seven
/// nonnegative cubes, returning the first failure.
///
/// Condition (7) is evaluated in exact integer arithmetic: with
/// `S = u^6 v^6 + v^6 w^6 + u^6 w^6`, cubing
/// `0 <= (uv/6w)(n/(u^6v^6a^3) - delta - 3/4)^(1/3) <= t/(6uvwa)
///     <= (uv/6w)(n/(u^6v^6a^3) - delta)^(1/3)`
/// reduces it to `0 <= 4n - a^3 S - 3 u^6 v^6 a^3 <= 4 t^3 <= 4n - a^3 S`.
pub fn watson_check(inst: &WatsonInstance) -> WatsonVerdict {
    let (n, a, u, v, w, t) = (&inst.n, &inst.a, &inst.u, &inst.v, &inst.w, &inst.t);
    let one = BigUint::one();

    // (1) 1 <= u <= v <= w <= (3/4)^(1/3) uv / 24, cubed to 18432 w^3 <= (uv)^3.
    if u.is_zero() || u > v || v > w {
        return WatsonVerdict::Fail(WatsonCondition::SizeChain);
    }
    let uv = u * v;
    if BigUint::from(18432u32) * w.pow(3) > uv.pow(3) {
        return WatsonVerdict::Fail(WatsonCondition::SizeChain);
    }

    // (2) gcd(uvw, 6n) = 1 and a odd.
    let uvw = &uv * w;
    if uvw.gcd(&(BigUint::from(6u32) * n)) != one || (a % 2u32).is_zero() {
        return WatsonVerdict::Fail(WatsonCondition::CoprimeToSixNOddA);
    }

    // (3) u, v, w and a pairwise coprime.
    if u.gcd(v) != one
        || u.gcd(w) != one
        || v.gcd(w) != one
        || a.gcd(u) != one
        || a.gcd(v) != one
        || a.gcd(w) != one
    {
        return WatsonVerdict::Fail(WatsonCondition::PairwiseCoprime);
    }

    // gap = n - t^3, signed so malformed inputs fail cleanly.
    let gap = BigInt::from(n.clone()) - BigInt::from(t.pow(3));

    // (4) n - t^3 = 1 mod 2.
    if gap.mod_floor(&BigInt::from(2)) != BigInt::one() {
        return WatsonVerdict::Fail(WatsonCondition::ParityGap);
    }

    // (5) n - t^3 = 0 mod 3a.
    if !gap.mod_floor(&(BigInt::from(3) * BigInt::from(a.clone()))).is_zero() {
        return WatsonVerdict::Fail(WatsonCondition::DivisibleByThreeA);
    }

    // (6) 4(n - t^3) = v^6 w^6 a^3 mod u^2, and cyclically.
    let four_gap = BigInt::from(4) * &gap;
    let a3 = BigInt::from(a.pow(3));
    for (m, x, y) in [(u, v, w), (v, u, w), (w, u, v)] {
        let m2 = BigInt::from(m.pow(2));
        let rhs = (BigInt::from(x.pow(6)) * BigInt::from(y.pow(6)) * &a3).mod_floor(&m2);
        if four_gap.mod_floor(&m2) != rhs {
            return WatsonVerdict::Fail(WatsonCondition::CubeCongruences);
        }
    }

    // (7) exact integer window.
    let s_sym = uv.pow(6) + (v * w).pow(6) + (u * w).pow(6);
    let four_n = BigInt::from(4u32) * BigInt::from(n.clone());
    let n_up = &four_n - &a3 * BigInt::from(s_sym);
    let n_lo = &n_up - BigInt::from(3u32) * BigInt::from(uv.pow(6)) * &a3;
    let four_t3 = BigInt::from(4u32) * BigInt::from(t.pow(3));
    if n_lo.is_negative() || four_t3 < n_lo || four_t3 > n_up {
        return WatsonVerdict::Fail(WatsonCondition::WindowPlacement);
    }

    WatsonVerdict::Pass
}

// ---------------------------------------------------------------------------
// Modular helpers
// ---------------------------------------------------------------------------

fn egcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        (a.clone(), BigInt::one(), BigInt::zero())
    } else {
        let (g, x, y) = egcd(b, &a.mod_floor(b));
        (g, y.clone(), x - (a / b) * y)
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let (g, x, _) = egcd(&a.mod_floor(m), m);
    if g.is_one() {
        Some(x.mod_floor(m))
    } else {
        None
    }
}

/// Combines pairwise-coprime congruences `x = r_i mod m_i` into
/// `(residue, modulus)`.
fn crt(pairs: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt)> {
    let mut r = BigInt::zero();
    let mut m = BigInt::one();
    for (ri, mi) in pairs {
        if !m.gcd(mi).is_one() {
            return None;
        }
        let inv = mod_inverse(&m.mod_floor(mi), mi)?;
        let diff = (ri - &r).mod_floor(mi);
        r += &m * ((diff * inv).mod_floor(mi));
        m *= mi;
        r = r.mod_floor(&m);
    }
    Some((r, m))
}

/// Deterministic Miller-Rabin, valid for all `n < 2^64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        b %= n;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Cube root of `target` modulo `p^2` for a prime `p = 5 mod 6`: cubing is a
/// bijection on the invertible classes there because `gcd(3, p(p-1)) = 1`
/// (`p = 2 mod 3`), so the root is `target^e` with `3e = 1 mod p(p-1)`.
pub fn cube_root_mod_p2(target: &BigUint, p: u64) -> Result<BigUint> {
    if p % 6 != 5 || !is_prime_u64(p) {
        return Err(Error::domain(format!("cube roots need a prime p = 5 mod 6, got {p}")));
    }
    let p2 = BigUint::from(p) * BigUint::from(p);
    let t = target.mod_floor(&p2);
    if t.gcd(&BigUint::from(p)) != BigUint::one() {
        return Err(Error::domain(format!("target must be invertible mod {p}^2")));
    }
    let order = BigInt::from(p) * BigInt::from(p - 1);
    let e = mod_inverse(&BigInt::from(3), &order)
        .expect("3 is invertible mod p(p-1) for p = 2 mod 3")
        .to_biguint()
        .expect("mod_floor result is nonnegative");
    let root = t.modpow(&e, &p2);
    debug_assert_eq!(root.modpow(&BigUint::from(3u32), &p2), t);
    Ok(root)
}

// ---------------------------------------------------------------------------
// Instance construction
// ---------------------------------------------------------------------------

fn check_prime_5_mod_6(x: u64) -> Result<()> {
    if x % 6 != 5 || !is_prime_u64(x) {
        return Err(Error::domain(format!("{x} is not a prime congruent to 5 mod 6")));
    }
    Ok(())
}

fn size_chain_holds(u: u64, v: u64, w: u64) -> bool {
    let w3 = BigUint::from(w).pow(3);
    let uv3 = (BigUint::from(u) * BigUint::from(v)).pow(3);
    u >= 1 && u <= v && v <= w && BigUint::from(18432u32) * w3 <= uv3
}

/// Builds a full instance for `n` from three primes `u < v < w = 5 mod 6`:
/// cube roots mod `u^2, v^2, w^2` pin `a` by CRT, a prime `a = 5 mod 6` is
/// searched in the window `[Y/kappa, Y]`, and `t` is the CRT solution of
/// `t^3 = n mod 3a`, `t^3 = n-1 mod 2`, `t = 0 mod uvw` placed in the
/// condition-(7) window.
pub fn construct_instance(n: &BigUint, u: u64, v: u64, w: u64) -> Result<WatsonInstance> {
    check_prime_5_mod_6(u)?;
    check_prime_5_mod_6(v)?;
    check_prime_5_mod_6(w)?;
    if u >= v || v >= w {
        return Err(Error::domain("u < v < w required for distinct prime moduli"));
    }
    if !size_chain_holds(u, v, w) {
        return Err(Error::domain(format!("({u}, {v}, {w}) violates the size chain (1)")));
    }
    let six_n = BigUint::from(6u32) * n;
    for p in [u, v, w] {
        if !six_n.gcd(&BigUint::from(p)).is_one() {
            return Err(Error::domain(format!("{p} divides 6n; pick primes coprime to n")));
        }
    }

    // a' mod u^2 v^2 w^2 through the three cube roots.
    let four_n = BigUint::from(4u32) * n;
    let mut residues = Vec::new();
    for (p, x, y) in [(u, v, w), (v, u, w), (w, u, v)] {
        let p2 = BigUint::from(p) * BigUint::from(p);
        let x6y6 = (BigUint::from(x) * BigUint::from(y)).pow(6).mod_floor(&p2);
        let inv = mod_inverse(&BigInt::from(x6y6), &BigInt::from(p2.clone()))
            .ok_or_else(|| Error::domain(format!("x^6 y^6 not invertible mod {p}^2")))?;
        let target = (BigInt::from(four_n.clone()) * inv).mod_floor(&BigInt::from(p2.clone()));
        let root = cube_root_mod_p2(&target.to_biguint().expect("nonnegative"), p)?;
        residues.push((BigInt::from(root), BigInt::from(p2)));
    }
    // a = 5 mod 6 keeps every class cubic mod 3a.
    residues.push((BigInt::from(5), BigInt::from(6)));
    let (a_class, a_mod) = crt(&residues).expect("moduli are pairwise coprime");

    // Window [Y/kappa, Y] with Y = (4n / (3 u^6 v^6 + S))^(1/3) exactly and a
    // conservative kappa (rho at its largest possible value, a = 1).
    let u6v6 = (BigUint::from(u) * BigUint::from(v)).pow(6);
    let s_sym = &u6v6
        + (BigUint::from(v) * BigUint::from(w)).pow(6)
        + (BigUint::from(u) * BigUint::from(w)).pow(6);
    let y_cubed = &four_n / (BigUint::from(3u32) * &u6v6 + &s_sym);
    let y = y_cubed.cbrt();
    let delta = {
        let (uf, vf, wf) = (u as f64, v as f64, w as f64);
        (1.0 + (wf / uf).powi(6) + (wf / vf).powi(6)) / 4.0
    };
    let rho_max = 1.0 / (6.0 * u as f64 * v as f64 * w as f64);
    let kappa_cubed =
        (((u as f64 * v as f64) / (24.0 * w as f64 * (rho_max + 1.0))).powf(1.5) + delta)
            / (0.75 + delta);
    let kappa = kappa_cubed.cbrt();
    if kappa <= 1.0 {
        return Err(Error::infeasible(format!(
            "window is empty: kappa = {kappa:.6} <= 1 for ({u}, {v}, {w})"
        )));
    }
    let y_f = big_to_f64(&y);
    if y_f > 1.8e19 {
        return Err(Error::Resource(format!(
            "prime window ends at Y = {y_f:.3e}, beyond the 64-bit search range"
        )));
    }
    let window_lo = (y_f / kappa).ceil();
    let a_mod_f = a_mod.to_f64().expect("finite");
    let a_class_f = a_class.to_f64().expect("finite");
    if y_f < a_class_f {
        return Err(Error::infeasible(format!(
            "no candidate below Y = {y_f:.3e}: residue class starts at {a_class_f:.3e} \
             (mod {a_mod_f:.3e}); condition C2 has no room at this n"
        )));
    }

    // Walk a = a_class + k * a_mod downward from Y.
    let k_hi = ((y_f - a_class_f) / a_mod_f).floor().max(0.0) as u64;
    let k_lo = if window_lo <= a_class_f {
        0u64
    } else {
        ((window_lo - a_class_f) / a_mod_f).ceil() as u64
    };
    let mut found: Option<u64> = None;
    let mut k = k_hi;
    loop {
        let cand = (a_class.clone() + BigInt::from(k) * &a_mod)
            .to_u64()
            .ok_or_else(|| Error::Resource("candidate a exceeds 64 bits".into()))?;
        if BigUint::from(cand) <= y && is_prime_u64(cand) {
            found = Some(cand);
            break;
        }
        if k == k_lo || k == 0 {
            break;
        }
        k -= 1;
    }
    let a = found.ok_or_else(|| {
        Error::infeasible(format!(
            "no prime a in the window [{window_lo:.3e}, {y_f:.3e}] within its class (C2)"
        ))
    })?;
    let a_big = BigUint::from(a);

    // t: cube root of n mod a (cubing is bijective mod a for a = 5 mod 6),
    // t = n mod 3, the parity flip mod 2, and t = 0 mod uvw.
    let e_a = mod_inverse(&BigInt::from(3), &BigInt::from(a - 1)).expect("a = 5 mod 6");
    let t_mod_a =
        (n % &a_big).modpow(&e_a.to_biguint().expect("nonnegative"), &a_big);
    let uvw = BigUint::from(u) * BigUint::from(v) * BigUint::from(w);
    let t_pairs = [
        (BigInt::from(t_mod_a), BigInt::from(a_big.clone())),
        (BigInt::from(n % 3u32), BigInt::from(3)),
        (BigInt::from((n + BigUint::one()) % 2u32), BigInt::from(2)),
        (BigInt::zero(), BigInt::from(uvw)),
    ];
    let (t0, t_mod) = crt(&t_pairs).expect("moduli are pairwise coprime");

    // Land t in the condition-(7) window: n_lo <= 4 t^3 <= n_up.
    let a3 = BigInt::from(a_big.pow(3));
    let n_up = BigInt::from(four_n) - &a3 * BigInt::from(s_sym);
    let n_lo = &n_up - BigInt::from(3u32) * BigInt::from(u6v6) * &a3;
    if n_lo.is_negative() {
        return Err(Error::infeasible("window floor negative: n too small for this (u, v, w, a)"));
    }
    let t_min = (n_lo.to_biguint().expect("nonnegative") / BigUint::from(4u32)).cbrt();
    let mut t = t0.clone();
    let t_min = BigInt::from(t_min);
    if t < t_min {
        t += Integer::div_ceil(&(&t_min - &t), &t_mod) * &t_mod;
    }
    while BigInt::from(4u32) * t.pow(3) < n_lo {
        t += &t_mod;
    }
    if BigInt::from(4u32) * t.pow(3) > n_up {
        return Err(Error::infeasible(
            "no admissible t: the condition-(7) window misses the CRT class",
        ));
    }

    let inst = WatsonInstance {
        n: n.clone(),
        a: a_big,
        u: BigUint::from(u),
        v: BigUint::from(v),
        w: BigUint::from(w),
        t: t.to_biguint().expect("t >= 0"),
    };
    match watson_check(&inst) {
        WatsonVerdict::Pass => Ok(inst),
        WatsonVerdict::Fail(c) => Err(Error::infeasible(format!(
            "constructed instance unexpectedly fails condition {c:?}"
        ))),
    }
}

/// Builds a valid instance in reverse: fix `(u, v, w, a, t)` and solve the
/// congruences for `n` inside the condition-(7) window. Here `u, v, w` need
/// only be pairwise coprime, coprime to 6, and satisfy the size chain; this is
/// the smallest scale at which instances exist at all (`n` from about `2e18`),
/// used to round-trip the checker against the cube-count oracle.
pub fn synthesize_instance(
    u: u64,
    v: u64,
    w: u64,
    a: u64,
    t_steps: u64,
    n_steps: u64,
) -> Result<WatsonInstance> {
    if !size_chain_holds(u, v, w) {
        return Err(Error::domain(format!("({u}, {v}, {w}) violates the size chain (1)")));
    }
    if [(u, v), (u, w), (v, w), (a, u), (a, v), (a, w)]
        .iter()
        .any(|&(x, y)| x.gcd(&y) != 1)
    {
        return Err(Error::domain("u, v, w, a must be pairwise coprime"));
    }
    if [u, v, w, a].iter().any(|&x| x % 2 == 0 || x % 3 == 0) {
        return Err(Error::domain("u, v, w, a must all be coprime to 6"));
    }

    let uvw = BigUint::from(u) * BigUint::from(v) * BigUint::from(w);
    let t = &uvw * BigUint::from(1 + t_steps);
    let t3 = BigInt::from(t.pow(3));
    let a_big = BigUint::from(a);
    let a3 = BigInt::from(a_big.pow(3));

    // n = t^3 + 1 mod 2, n = t^3 mod 3a, and the three cube congruences
    // 4(n - t^3) = (..)^6 (..)^6 a^3 mod u^2 (cyclically).
    let mut pairs = vec![
        ((&t3 + BigInt::one()).mod_floor(&BigInt::from(2)), BigInt::from(2)),
        (
            t3.mod_floor(&(BigInt::from(3) * BigInt::from(a_big.clone()))),
            BigInt::from(3) * BigInt::from(a_big.clone()),
        ),
    ];
    for (m, x, y) in [(u, v, w), (v, u, w), (w, u, v)] {
        let m2 = BigInt::from(BigUint::from(m).pow(2));
        let inv4 = mod_inverse(&BigInt::from(4), &m2).expect("m odd");
        let rhs = (BigInt::from(BigUint::from(x).pow(6))
            * BigInt::from(BigUint::from(y).pow(6))
            * &a3)
            .mod_floor(&m2);
        pairs.push(((&t3 + inv4 * rhs).mod_floor(&m2), m2));
    }
    let (n_class, n_mod) =
        crt(&pairs).ok_or_else(|| Error::domain("moduli not pairwise coprime"))?;

    // Window for n: all of (7) must hold, including the nonnegative floor:
    //   n >= t^3 + ceil(a^3 S / 4),
    //   n >= ceil(a^3 (S + 3 u^6 v^6) / 4),
    //   n <= t^3 + floor(a^3 (S + 3 u^6 v^6) / 4).
    let u6v6 = (BigUint::from(u) * BigUint::from(v)).pow(6);
    let s_sym = BigInt::from(
        &u6v6
            + (BigUint::from(v) * BigUint::from(w)).pow(6)
            + (BigUint::from(u) * BigUint::from(w)).pow(6),
    );
    let four = BigInt::from(4);
    let three = BigInt::from(3);
    let widened = &a3 * (&s_sym + &three * BigInt::from(u6v6));
    let n_min = (&t3 + Integer::div_ceil(&(&a3 * &s_sym), &four))
        .max(Integer::div_ceil(&widened, &four));
    let n_max = &t3 + Integer::div_floor(&widened, &four);
    if n_min > n_max {
        return Err(Error::infeasible(
            "empty n-window: increase t_steps so t^3 clears the floor",
        ));
    }
    let first = &n_min + (&n_class - &n_min).mod_floor(&n_mod);
    let n = first + BigInt::from(n_steps) * &n_mod;
    if n > n_max {
        return Err(Error::infeasible(format!(
            "n_steps = {n_steps} walks past the window (capacity {})",
            (&n_max - &n_min) / &n_mod
        )));
    }

    let inst = WatsonInstance {
        n: n.to_biguint().expect("window start is positive"),
        a: a_big,
        u: BigUint::from(u),
        v: BigUint::from(v),
        w: BigUint::from(w),
        t,
    };
    match watson_check(&inst) {
        WatsonVerdict::Pass => Ok(inst),
        WatsonVerdict::Fail(c) => Err(Error::infeasible(format!(
            "synthesized instance fails condition {c:?}; inputs are inconsistent"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Thresholds
// ---------------------------------------------------------------------------

/// `kappa_0(n)^3`, the explicit lower bound for the window ratio `kappa`.
pub fn kappa0_cubed(log_n: f64, p: &SevenCubesParams) -> f64 {
    let c1x = p.c1 * log_n;
    let c3_6 = p.c3.powi(6);
    let inner = c1x / (24.0 * p.c3 * (1.0 / (6.0 * c1x.powi(3)) + 1.0));
    (inner.powf(1.5) + 0.25 + 1.0 / (2.0 * c3_6)) / (1.0 + c3_6 / 2.0)
}

/// `ln Y_0(n) = (log n)/3 - 4 ln(c2 log n) - (1/3) ln(1 + c3^6/2)`.
pub fn y0_log(log_n: f64, p: &SevenCubesParams) -> f64 {
    log_n / 3.0 - 4.0 * (p.c2 * log_n).ln() - (1.0 + p.c3.powi(6) / 2.0).ln() / 3.0
}

/// Minimal integer at which a monotone-from-below predicate starts to hold.
fn integer_crossing(mut lo: u64, mut hi: u64, pred: impl Fn(u64) -> bool) -> Option<u64> {
    if pred(lo) {
        return Some(lo);
    }
    if !pred(hi) {
        return None;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// Clustering inequality at `x = log n`:
/// `((c2-c1)/2 - 1) x - theta (sqrt(c1)+sqrt(c2)) sqrt(x) >= 12 ln(c2 x)`.
pub fn clustering_inequality_holds(x: f64, p: &SevenCubesParams) -> bool {
    ((p.c2 - p.c1) / 2.0 - 1.0) * x - p.theta_const * (p.c1.sqrt() + p.c2.sqrt()) * x.sqrt()
        >= 12.0 * (p.c2 * x).ln()
}

/// Minimal integer `log n` from which the interval `[c1 log n, c2 log n]`
/// provably contains more than 12 usable primes.
pub fn clustering_threshold(p: &SevenCubesParams) -> Result<u64> {
    p.validate()?;
    integer_crossing(2, 10_000_000, |x| clustering_inequality_holds(x as f64, p))
        .ok_or_else(|| Error::infeasible("clustering inequality holds nowhere below 1e7"))
}

/// Signed margin of the repulsion envelope chain
/// `2.12 ln(3 (c1 log n)^6) - ln(3 (c2 log n)^6)`; positive means the two
/// candidate moduli built from the clustered primes cannot both be
/// exceptional.
pub fn repulsion_margin(log_n: f64, p: &SevenCubesParams) -> Result<f64> {
    if log_n < 150.0_f64.ln() {
        return Err(Error::domain(format!(
            "repulsion margin stated for n >= 150, got log n = {log_n}"
        )));
    }
    Ok(2.12 * (3.0 * (p.c1 * log_n).powi(6)).ln() - (3.0 * (p.c2 * log_n).powi(6)).ln())
}

/// Where the envelope margin turns positive:
/// `log n = exp((6 ln c2 - 12.72 ln c1 - 1.12 ln 3) / 6.72)`.
pub fn repulsion_crossing(p: &SevenCubesParams) -> f64 {
    ((6.0 * p.c2.ln() - 12.72 * p.c1.ln() - 1.12 * 3.0_f64.ln()) / 6.72).exp()
}

/// The prime-window inequality at `x = log n`:
/// `x/3 - 4 ln(c2 x) - (1/3) ln(1 + c3^6/2) >= alpha ln^2(3 (c2 x)^6) + eps`.
pub fn window_inequality_holds(x: f64, p: &SevenCubesParams) -> bool {
    y0_log(x, p) >= p.alpha * (3.0 * (p.c2 * x).powi(6)).ln().powi(2) + p.eps
}

/// All thresholds feeding the headline bound, with the margins that make the
/// published rounding visible.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThresholdReport {
    /// Minimal integer `log n` satisfying the prime-window inequality.
    pub window_inequality: u64,
    /// Minimal integer `log n` for the prime-clustering lemma.
    pub clustering: u64,
    /// Minimal integer `log n` with `kappa_0(n) >= e^eps`.
    pub kappa_floor: u64,
    /// Minimal integer `log n` with `3 (c2 log n)^6 >= k_min` (upper envelope
    /// of the constructed modulus).
    pub modulus_floor_c2: u64,
    /// Same under the lower envelope `3 (c1 log n)^6 >= k_min`; carried
    /// because the two readings disagree and the combined threshold depends
    /// on which envelope justifies the operating point.
    pub modulus_floor_c1: u64,
    /// Max of window, clustering, kappa and the c2-envelope modulus floor.
    pub combined: u64,
    /// Max with the c1-envelope reading instead.
    pub combined_c1_reading: u64,
    /// The published presentation value.
    pub headline: u64,
    pub within_headline: bool,
    /// Signed slack of the window inequality at its crossing and at the
    /// headline.
    pub margin_at_crossing: f64,
    pub margin_at_headline: f64,
}

/// Solves every threshold. The combined value uses the `c2` (upper-envelope)
/// reading of the modulus floor, the reading consistent with the right-hand
/// side of the window inequality; the `c1` reading is reported alongside.
pub fn n0_threshold(p: &SevenCubesParams) -> Result<ThresholdReport> {
    p.validate()?;
    let window_inequality =
        integer_crossing(2, 100_000_000, |x| window_inequality_holds(x as f64, p))
            .ok_or_else(|| Error::infeasible("window inequality holds nowhere below 1e8"))?;
    let clustering = clustering_threshold(p)?;
    let kappa_target = p.eps.exp().powi(3);
    let kappa_floor =
        integer_crossing(2, 100_000_000, |x| kappa0_cubed(x as f64, p) >= kappa_target)
            .ok_or_else(|| Error::infeasible("kappa floor unreachable below 1e8"))?;
    // 3 (c x)^6 >= k_min  <=>  x >= exp(ln(k_min/3)/6) / c.
    let modulus_crossing = |c: f64| (((p.k_min / 3.0).ln() / 6.0).exp() / c).ceil() as u64;
    let modulus_floor_c2 = modulus_crossing(p.c2);
    let modulus_floor_c1 = modulus_crossing(p.c1);

    let combined = window_inequality.max(clustering).max(kappa_floor).max(modulus_floor_c2);
    let combined_c1_reading = combined.max(modulus_floor_c1);
    let headline = 71_000;

    let margin =
        |x: f64| y0_log(x, p) - p.alpha * (3.0 * (p.c2 * x).powi(6)).ln().powi(2) - p.eps;
    Ok(ThresholdReport {
        window_inequality,
        clustering,
        kappa_floor,
        modulus_floor_c2,
        modulus_floor_c1,
        combined,
        combined_c1_reading,
        headline,
        within_headline: combined <= headline,
        margin_at_crossing: margin(window_inequality as f64),
        margin_at_headline: margin(headline as f64),
    })
}

// ---------------------------------------------------------------------------
// Cube-count oracle
// ---------------------------------------------------------------------------

/// Hard cap for the exhaustive minimal-count oracle.
pub const BRUTE_FORCE_LIMIT: u64 = 100_000_000;

/// Size of the memoized layer-count table backing the search.
pub const TABLE_LIMIT: usize = 1 << 22;

/// Minimal cube counts for every `n <= limit` by dynamic programming over the
/// cube layers: `counts[n] = 1 + min over c^3 <= n of counts[n - c^3]`.
pub fn min_cubes_table(limit: usize) -> Vec<u8> {
    let mut counts = vec![u8::MAX; limit + 1];
    counts[0] = 0;
    let mut cubes = Vec::new();
    let mut c = 1usize;
    while c * c * c <= limit {
        cubes.push(c * c * c);
        c += 1;
    }
    for n in 1..=limit {
        let mut best = u8::MAX;
        for &c3 in &cubes {
            if c3 > n {
                break;
            }
            let prev = counts[n - c3];
            if prev < best {
                best = prev;
                if best == 0 {
                    break;
                }
            }
        }
        counts[n] = best.saturating_add(1);
    }
    counts
}

fn icbrt_u128(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).cbrt() as u128;
    while x > 0 && x * x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// Outcome of the minimal-count search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MinCubes {
    Count(u8),
    ExceedsCap,
}

/// Shared state for repeated oracle queries: the layer-count table plus a
/// descending-greedy DFS above it.
pub struct CubeCounter {
    table: Vec<u8>,
}

impl CubeCounter {
    pub fn new() -> Self {
        CubeCounter { table: min_cubes_table(TABLE_LIMIT) }
    }

    pub fn with_table_limit(limit: usize) -> Self {
        CubeCounter { table: min_cubes_table(limit) }
    }

    pub fn table(&self) -> &[u8] {
        &self.table
    }

    /// Can `n` be written with at most `k` cubes no larger than `max_cube^3`?
    /// The table shortcut drops the size ordering, which is sound: any
    /// unordered decomposition below the table limit completes the partial
    /// one found so far.
    fn feasible(&self, n: u128, k: u8, max_cube: u128) -> bool {
        if n == 0 {
            return true;
        }
        if k == 0 {
            return false;
        }
        if n < self.table.len() as u128 {
            return self.table[n as usize] <= k;
        }
        let top = icbrt_u128(n).min(max_cube);
        // The largest part must reach at least (n/k)^(1/3).
        let bottom = icbrt_u128(n / k as u128).max(1);
        let mut x = top;
        while x >= bottom {
            let c = x * x * x;
            if c <= n && self.feasible(n - c, k - 1, x) {
                return true;
            }
            if x == 1 {
                break;
            }
            x -= 1;
        }
        false
    }

    /// Minimal number of nonnegative cubes summing to `n`, up to `cap`.
    pub fn min_cubes(&self, n: u64, cap: u8) -> Result<MinCubes> {
        if n > BRUTE_FORCE_LIMIT {
            return Err(Error::Resource(format!(
                "minimal-count search capped at {BRUTE_FORCE_LIMIT}, got {n}"
            )));
        }
        if cap > 9 {
            return Err(Error::domain(format!("cap <= 9 required, got {cap}")));
        }
        for k in 1..=cap {
            if self.feasible(n as u128, k, icbrt_u128(n as u128)) {
                return Ok(MinCubes::Count(k));
            }
        }
        Ok(MinCubes::ExceedsCap)
    }

    /// Finds an explicit decomposition of `n` into at most `budget` cubes.
    /// Unlike [`Self::min_cubes`] this works at any `u128` scale; it returns
    /// the cubes' roots or `None` if the bounded search exhausts its node
    /// budget.
    pub fn witness(&self, n: u128, budget: u8) -> Option<Vec<u128>> {
        let mut nodes = 0u64;
        let mut parts = Vec::new();
        if self.witness_dfs(n, budget, icbrt_u128(n), &mut parts, &mut nodes) {
            Some(parts)
        } else {
            None
        }
    }

    fn witness_dfs(
        &self,
        n: u128,
        k: u8,
        max_cube: u128,
        parts: &mut Vec<u128>,
        nodes: &mut u64,
    ) -> bool {
        *nodes += 1;
        if *nodes > 50_000_000 {
            return false;
        }
        if n == 0 {
            return true;
        }
        if k == 0 {
            return false;
        }
        if n < self.table.len() as u128 {
            if self.table[n as usize] > k {
                return false;
            }
            // Reconstruct from the table: peel any cube stepping the count
            // down by one.
            let mut rest = n as usize;
            while rest > 0 {
                let target = self.table[rest] - 1;
                let mut c = icbrt_u128(rest as u128) as usize;
                let mut peeled = false;
                while c > 0 {
                    let c3 = c * c * c;
                    if c3 <= rest && self.table[rest - c3] == target {
                        parts.push(c as u128);
                        rest -= c3;
                        peeled = true;
                        break;
                    }
                    c -= 1;
                }
                if !peeled {
                    return false; // table inconsistency; cannot happen
                }
            }
            return true;
        }
        let top = icbrt_u128(n).min(max_cube);
        let bottom = icbrt_u128(n / k as u128).max(1);
        let mut x = top;
        while x >= bottom {
            let c = x * x * x;
            if c <= n {
                parts.push(x);
                if self.witness_dfs(n - c, k - 1, x, parts, nodes) {
                    return true;
                }
                parts.pop();
            }
            if x == 1 {
                break;
            }
            x -= 1;
        }
        false
    }
}

impl Default for CubeCounter {
    fn default() -> Self {
        Self::new()
    }
}

/// One-shot minimal-count query; builds a fresh table, so batch callers
/// should hold a [`CubeCounter`] instead.
pub fn brute_force_min_cubes(n: u64, cap: u8) -> Result<MinCubes> {
    CubeCounter::new().min_cubes(n, cap)
}
