//! Explicit-constant machinery for locating primes in arithmetic progressions
//! inside short intervals `[e^x, e^(x+eps)]`, together with the seven-cubes
//! application it feeds.
//!
//! The crate has three layers:
//!
//! * numeric plumbing: [`logdomain`] (underflow-safe arithmetic for magnitudes
//!   like `q^(-alpha*ln q)` at `q = 10^100`) and [`quad`] (adaptive quadrature);
//! * the analytic estimates: [`estimates`] (zero counts, gamma-factor bounds,
//!   the `J` integrals), [`weights`] (the polynomial bump weight and its
//!   Laplace-transform bounds) and [`errorterms`] (the five error terms whose
//!   sum controls the smoothed prime sum);
//! * the applications: [`solver`] (computes the interval exponent `alpha` and
//!   reproduces the published tables), [`cubes`] (Watson-lemma checking and
//!   the seven-cubes thresholds) and [`sieve`] (empirical verification of the
//!   desk-checkable claims by exhaustive sieving).

pub mod cubes;
pub mod error;
pub mod errorterms;
pub mod estimates;
pub mod logdomain;
pub mod quad;
pub mod sieve;
pub mod solver;
pub mod weights;

pub use error::Error;
pub use logdomain::LogNonNegReal;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
