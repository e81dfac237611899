//! Core library of `weightlab`: weight sequences, weight functions and
//! one-parameter weight matrices, together with the regularity conditions,
//! growth relations and Legendre-Fenchel conjugate numerics built on them.
//!
//! Everything is carried in the log domain. A [`seqcore::LogSeq`] stores
//! `log M_k` for `k = 0..=N`; weight matrices are finite sampled families of
//! such sequences; weight functions are evaluated on log-spaced grids. All
//! asymptotic "there is a constant such that for all k" statements are
//! decided at finite truncation by the windowed trend heuristic in
//! [`trend`], so every verdict is reproducible and explicitly grid-relative.

pub mod catalog;
pub mod error;
pub mod fdb;
pub mod matrix;
pub mod reproduce;
pub mod seqcore;
pub mod trend;
pub mod weightfn;
pub mod witness;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Natural log of `k!` via `lgamma(k + 1)`.
///
/// Exact for `k = 0, 1` and accurate to a few ulp elsewhere; all factorial
/// bookkeeping in the crate goes through here so the two routes never drift.
pub fn log_factorial(k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    lgamma(k as f64 + 1.0)
}

/// `ln Γ(x)` for `x > 0` (Lanczos approximation, g = 5, 6 terms).
pub fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    // Reflection is not needed for x > 0; shift small arguments up for accuracy.
    if x < 0.5 {
        // Γ(x) = Γ(x+1)/x
        return lgamma(x + 1.0) - x.ln();
    }
    let coefficients: [f64; 6] = [
        76.180_091_729_471_46,
        -86.505_320_329_416_77,
        24.014_098_240_830_91,
        -1.231_739_572_450_155,
        0.120_865_097_386_617_9e-2,
        -0.539_523_938_495_3e-5,
    ];
    let z = x - 1.0;
    let tmp = z + 5.5;
    let log = (z + 0.5) * tmp.ln() - tmp;
    let mut a = 1.000_000_000_190_015;
    for (i, c) in coefficients.iter().enumerate() {
        a += c / (z + 1.0 + i as f64);
    }
    log + (2.506_628_274_631_000_5 * a).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_factorial_matches_direct_product() {
        let mut acc = 0.0_f64;
        for k in 1..=20usize {
            acc += (k as f64).ln();
            assert!(
                (log_factorial(k) - acc).abs() < 1e-9 * acc.max(1.0),
                "k = {k}: {} vs {acc}",
                log_factorial(k)
            );
        }
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
    }

    #[test]
    fn lgamma_half_integer() {
        // Γ(1/2) = sqrt(pi)
        let expected = std::f64::consts::PI.sqrt().ln();
        assert!((lgamma(0.5) - expected).abs() < 1e-10);
    }
}
