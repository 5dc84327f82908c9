//! Segmented sieve of Eratosthenes and the verification lab built on it:
//! Chebyshev theta deviations in progressions, least primes, smoothed prime
//! sums, and the auxiliary prime-sum constants the error terms consume.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::estimates;
use crate::weights::{f_eval, WeightSpec};
use crate::Result;

/// Memory guard: sieving above this limit is refused.
pub const SIEVE_GUARD: u64 = 1_000_000_000;

const SEGMENT: u64 = 1 << 20;

/// An exact, ordered set of all primes up to `limit`.
#[derive(Debug, Clone)]
pub struct SieveResult {
    limit: u64,
    primes: Vec<u64>,
}

impl SieveResult {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn count(&self) -> usize {
        self.primes.len()
    }

    pub fn contains(&self, n: u64) -> bool {
        self.primes.binary_search(&n).is_ok()
    }

    /// Primes `p` with `lo <= p <= hi`, as a subslice.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let start = self.primes.partition_point(|&p| p < lo);
        let end = self.primes.partition_point(|&p| p <= hi);
        &self.primes[start..end]
    }
}

/// Simple sieve for the base primes up to `n`.
fn small_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut k = p * p;
            while k <= n {
                composite[k] = true;
                k += p;
            }
        }
    }
    primes
}

/// Segmented sieve: segments are processed in parallel and concatenated in
/// index order, so the result is deterministic.
pub fn sieve(limit: u64) -> Result<SieveResult> {
    if limit > SIEVE_GUARD {
        return Err(Error::Resource(format!(
            "sieve limit {limit} exceeds the guard {SIEVE_GUARD}"
        )));
    }
    if limit < 2 {
        return Ok(SieveResult { limit, primes: Vec::new() });
    }
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = small_sieve(root.min(limit));
    if root >= limit {
        let primes = base.into_iter().filter(|&p| p <= limit).collect();
        return Ok(SieveResult { limit, primes });
    }

    let seg_count = (limit - root) / SEGMENT + 1;
    let segments: Vec<Vec<u64>> = (0..seg_count)
        .into_par_iter()
        .map(|si| {
            let lo = root + 1 + si * SEGMENT;
            let hi = (lo + SEGMENT - 1).min(limit);
            if lo > hi {
                return Vec::new();
            }
            let len = (hi - lo + 1) as usize;
            let mut composite = vec![false; len];
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut k = lo.div_ceil(p) * p;
                if k < p * p {
                    k = p * p;
                }
                while k <= hi {
                    composite[(k - lo) as usize] = true;
                    k += p;
                }
            }
            (0..len).filter(|&i| !composite[i]).map(|i| lo + i as u64).collect()
        })
        .collect();

    let mut primes = base;
    for seg in segments {
        primes.extend(seg);
    }
    Ok(SieveResult { limit, primes })
}

/// Chebyshev `theta(y; q, a) = sum of ln p over primes p <= y, p = a mod q`,
/// summed exactly over the sieved primes (Kahan-compensated).
pub fn theta(y: f64, q: u64, a: u64, s: &SieveResult) -> Result<f64> {
    if y > s.limit as f64 {
        return Err(Error::Resource(format!(
            "theta needs y <= sieve limit, got y = {y} > {}",
            s.limit
        )));
    }
    if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
        return Err(Error::domain(format!("theta requires gcd(a, q) = 1, got a = {a}, q = {q}")));
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for &p in &s.primes {
        if (p as f64) > y {
            break;
        }
        if q == 1 || p % q == a % q {
            let term = (p as f64).ln();
            let t = sum + (term + comp);
            comp = (term + comp) - (t - sum);
            sum = t;
        }
    }
    Ok(sum)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Euler's totient for every index up to `n`, by a linear sieve.
pub fn phi_table(n: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = vec![0; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        phi[1] = 1;
    }
    for i in 2..=n {
        if phi[i] == 0 {
            phi[i] = (i - 1) as u32;
            primes.push(i);
        }
        for &p in &primes {
            let ip = i * p;
            if ip > n {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u32;
                break;
            }
            phi[ip] = phi[i] * (p - 1) as u32;
        }
    }
    phi
}

/// Outcome record of one verification experiment.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub name: String,
    pub parameters: String,
    pub max_deviation: f64,
    pub witness: String,
    pub pass: bool,
}

/// Where a theta-deviation extreme occurred.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DeviationWitness {
    pub q: u64,
    pub a: u64,
    pub y: f64,
    pub deviation: f64,
    /// `|deviation| / sqrt(y)`.
    pub ratio: f64,
}

/// Scan result over all moduli `q <= q_max` and all residues coprime to `q`.
#[derive(Debug, Clone, Serialize)]
pub struct ThetaScanReport {
    pub q_max: u64,
    pub x_max: f64,
    /// Largest `|theta(y;q,a) - y/phi(q)| / sqrt(y)` over all events; the
    /// claimed bound holds uniformly in `x` iff this stays within it.
    pub max_ratio: f64,
    pub witness: DeviationWitness,
    /// Largest raw deviation divided by `sqrt(x_max)`.
    pub max_dev_over_sqrt_xmax: f64,
    /// Per-modulus maxima of the uniform ratio.
    pub per_q: Vec<(u64, f64)>,
    pub bound: f64,
    pub pass: bool,
}

impl ThetaScanReport {
    pub fn to_report(&self) -> VerificationReport {
        VerificationReport {
            name: "theta-deviation".into(),
            parameters: format!("q <= {}, x <= {:.3e}", self.q_max, self.x_max),
            max_deviation: self.max_ratio,
            witness: format!(
                "q = {}, a = {}, y = {:.1}, deviation = {:.4}",
                self.witness.q, self.witness.a, self.witness.y, self.witness.deviation
            ),
            pass: self.pass,
        }
    }
}

/// Scans `|theta(y;q,a) - y/phi(q)|` for every modulus `q <= q_max` and every
/// coprime residue, evaluating the supremum only at the step discontinuities
/// (just before and at each prime) plus the endpoint, which is exact for a
/// step-function-minus-linear objective. The claimed bound `2.072 sqrt(x)` is
/// checked in its uniform-in-`x` form `|dev(y)| <= 2.072 sqrt(y)`.
pub fn theta_deviation_scan(q_max: u64, x_max: f64, s: &SieveResult) -> Result<ThetaScanReport> {
    const BOUND: f64 = 2.072;
    if x_max > s.limit as f64 {
        return Err(Error::Resource(format!(
            "scan needs x_max <= sieve limit, got {x_max} > {}",
            s.limit
        )));
    }
    if q_max < 1 {
        return Err(Error::domain("q_max must be at least 1"));
    }

    let results: Vec<(u64, DeviationWitness)> = (1..=q_max)
        .into_par_iter()
        .map(|q| {
            let phi = if q == 1 {
                1.0
            } else {
                f64::from(phi_table(q as usize)[q as usize])
            };
            let mut theta_acc = vec![0.0_f64; q as usize];
            let mut best = DeviationWitness { q, a: 0, y: 1.0, deviation: 0.0, ratio: 0.0 };
            let mut note = |a: u64, y: f64, dev: f64| {
                let ratio = dev.abs() / y.sqrt();
                if ratio > best.ratio {
                    best = DeviationWitness { q, a, y, deviation: dev, ratio };
                }
            };
            for &p in &s.primes {
                let pf = p as f64;
                if pf > x_max {
                    break;
                }
                if q > 1 && gcd(p % q, q) != 1 {
                    continue; // primes dividing q belong to no coprime class
                }
                let class = (p % q) as usize;
                let before = theta_acc[class];
                // just below the jump, and at the jump
                note(class as u64, pf, before - pf / phi);
                let after = before + pf.ln();
                note(class as u64, pf, after - pf / phi);
                theta_acc[class] = after;
            }
            // endpoint: theta stays flat after its last prime while y/phi grows
            for (class, &acc) in theta_acc.iter().enumerate() {
                if q == 1 || gcd(class as u64, q) == 1 {
                    note(class as u64, x_max, acc - x_max / phi);
                }
            }
            (q, best)
        })
        .collect();

    let mut per_q: Vec<(u64, f64)> = results.iter().map(|(q, w)| (*q, w.ratio)).collect();
    per_q.sort_by_key(|&(q, _)| q);
    let global = results
        .into_iter()
        .map(|(_, w)| w)
        .max_by(|a, b| a.ratio.partial_cmp(&b.ratio).expect("ratios are finite"))
        .expect("q_max >= 1 yields at least one modulus");
    let max_dev = global.deviation.abs() / x_max.sqrt();

    Ok(ThetaScanReport {
        q_max,
        x_max,
        max_ratio: global.ratio,
        witness: global,
        max_dev_over_sqrt_xmax: max_dev,
        per_q,
        bound: BOUND,
        pass: global.ratio <= BOUND,
    })
}

/// Smallest prime `p = a mod q` within the sieve, or `None` if none exists
/// below the limit.
pub fn least_prime_in_ap(q: u64, a: u64, s: &SieveResult) -> Result<Option<u64>> {
    if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
        return Err(Error::domain(format!(
            "least_prime_in_ap requires gcd(a, q) = 1, got a = {a}, q = {q}"
        )));
    }
    Ok(s.primes.iter().copied().find(|&p| q == 1 || p % q == a % q))
}

/// Least primes for every coprime class of `q` in one pass; `None` entries
/// mean the class has no prime below the sieve limit.
pub fn least_primes_all_classes(q: u64, s: &SieveResult) -> Vec<(u64, Option<u64>)> {
    let mut found: Vec<Option<u64>> = vec![None; q as usize];
    let classes: Vec<u64> = (0..q).filter(|&a| gcd(a, q) == 1).collect();
    let mut remaining = classes.len();
    for &p in &s.primes {
        if remaining == 0 {
            break;
        }
        let c = (p % q) as usize;
        if gcd(c as u64, q) == 1 && found[c].is_none() {
            found[c] = Some(p);
            remaining -= 1;
        }
    }
    classes.into_iter().map(|a| (a, found[a as usize])).collect()
}

/// The smoothed sum `sum over p = a mod q of (ln p / p) * f(ln p)`, exact over
/// the sieved primes in the support `[e^L, e^(L+eps)]`.
pub fn weighted_prime_sum(q: u64, a: u64, spec: &WeightSpec, s: &SieveResult) -> Result<f64> {
    if (spec.l + spec.eps).exp() > s.limit as f64 {
        return Err(Error::Resource(format!(
            "weight support reaches e^{:.2} beyond the sieve limit {}",
            spec.l + spec.eps,
            s.limit
        )));
    }
    if q == 0 || (q > 1 && gcd(a % q, q) != 1) {
        return Err(Error::domain(format!(
            "weighted_prime_sum requires gcd(a, q) = 1, got a = {a}, q = {q}"
        )));
    }
    let lo = spec.l.exp().floor().max(2.0) as u64;
    let hi = (spec.l + spec.eps).exp().ceil() as u64;
    let mut sum = 0.0;
    for &p in s.range(lo, hi) {
        if q > 1 && p % q != a % q {
            continue;
        }
        let lp = (p as f64).ln();
        sum += lp / (p as f64) * f_eval(lp, spec);
    }
    Ok(sum)
}

/// The three auxiliary prime-sum facts the error terms rely on:
/// the `2.10` series, the `sum ln p/(p-1) <= 2 ln x` bound, and the
/// `q/phi(q)` ratio bound, all checked exhaustively over the sieve.
pub fn auxiliary_constant_checks(s: &SieveResult) -> Result<Vec<VerificationReport>> {
    if s.limit < 1_000_000 {
        return Err(Error::Resource(format!(
            "auxiliary checks need a sieve to at least 1e6, got {}",
            s.limit
        )));
    }
    let mut reports = Vec::with_capacity(3);

    // (i) sum over primes of ln p * (1/(p-1)^2 + 1/(p-1)^3) stays below 2.10,
    // including the analytic tail 4 ln P / P past the sieve.
    {
        let mut partial = 0.0;
        let mut ok = true;
        for &p in &s.primes {
            let pm = (p - 1) as f64;
            partial += (p as f64).ln() * (1.0 / (pm * pm) + 1.0 / (pm * pm * pm));
            if partial >= 2.10 {
                ok = false;
                break;
            }
        }
        let tail = 4.0 * (s.limit as f64).ln() / s.limit as f64;
        let total = partial + tail;
        reports.push(VerificationReport {
            name: "prime-series-2.10".into(),
            parameters: format!("primes <= {}", s.limit),
            max_deviation: total,
            witness: format!("partial = {partial:.6}, analytic tail <= {tail:.2e}"),
            pass: ok && total < 2.10,
        });
    }

    // (ii) sum_{p <= x} ln p/(p-1) <= 2 ln x, worst right after each prime.
    {
        let mut partial = 0.0;
        let mut worst = 0.0;
        let mut witness = 0u64;
        for &p in &s.primes {
            partial += (p as f64).ln() / (p - 1) as f64;
            let ratio = partial / (2.0 * (p as f64).ln());
            if ratio > worst {
                worst = ratio;
                witness = p;
            }
        }
        reports.push(VerificationReport {
            name: "mertens-style-2logx".into(),
            parameters: format!("x <= {}", s.limit),
            max_deviation: worst,
            witness: format!("tightest at x = {witness}"),
            pass: worst <= 1.0,
        });
    }

    // (iii) q/phi(q) < e^C loglog q + 2.51/loglog q for 3 <= q <= 1e6, with
    // exact phi from a linear sieve.
    {
        let n = (s.limit.min(1_000_000)) as usize;
        let phi = phi_table(n);
        let mut worst = 0.0;
        let mut witness = 0usize;
        for q in 3..=n {
            let ratio = q as f64 / f64::from(phi[q]);
            let bound = estimates::phi_ratio_upper(q as f64)?;
            let rel = ratio / bound;
            if rel > worst {
                worst = rel;
                witness = q;
            }
        }
        reports.push(VerificationReport {
            name: "phi-ratio-bound".into(),
            parameters: format!("3 <= q <= {n}"),
            max_deviation: worst,
            witness: format!("tightest at q = {witness}"),
            pass: worst < 1.0,
        });
    }

    Ok(reports)
}
