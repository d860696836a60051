//! Composite Korobov p-set quasi-Monte Carlo rules.
//!
//! The crate builds the point sets `S`, `T` and `U` over a prime band,
//! evaluates their exponential sums exactly in residue arithmetic, checks
//! the known bounds on those sums, and turns them into two-sided worst-case
//! error estimates for the space of absolutely convergent Fourier series
//! weighted by `max(1, log|k|_inf)`.
//!
//! ```
//! use korobov_qmc::{composite_point_set, wce_truncated, KorobovFamily, ScanOptions};
//!
//! let rule = composite_point_set(KorobovFamily::T, 4, 1).unwrap();
//! let est = wce_truncated(&rule, 20, ScanOptions::default()).unwrap();
//! assert!(est.exact);
//! assert!((est.lower - 1.0 / 9f64.ln()).abs() < 1e-12);
//! ```

pub mod config;
mod error;
pub mod exposums;
pub mod pointsets;
pub mod primes;
pub mod spectrum;
pub mod testfns;
pub mod wce;

pub use error::{Error, Result};
pub use exposums::{
    corollary_bound, corollary_exact_bound, lemma_bound, verify_bounds, weyl_sum_block,
    weyl_sum_composite, BoundMode, BoxRadius, Frequency, VerificationReport, VerifyRequest,
    WeylSumResult,
};
pub use pointsets::{
    composite_point_set, korobov_block, to_unit_cube, CompositePointSet, KorobovBlock,
    KorobovFamily, RationalPoint,
};
pub use primes::{calibrate_density, prime_band, sieve_primes, DensityCalibration, PrimeBand};
pub use testfns::{
    convergence_experiment, norm_fd, qmc_apply, weierstrass_norm_bound, ConvergenceRow,
    FourierPolynomial, Integrand, IntegrandSpec, TestFunction, WeierstrassForm, WeierstrassProduct,
};
pub use wce::{
    info_complexity_bound, initial_error, wce_truncated, wce_upper, weight, ScanOptions, WceBounds,
    WceEstimate, WceSweepRow,
};
