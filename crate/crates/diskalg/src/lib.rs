//! Machinery for deciding when the function algebra generated by `z^2` and a
//! squared conjugate-like generator on a small disk is all of C(D):
//! coefficient tests with certified margins, explicit two-term certificate
//! polynomials, sampled verification of the two-sided sign condition, disk
//! geometry under coordinate squaring, and a uniform-approximation
//! experiment engine.
//!
//! The crate follows a strict split between *certified* results (coefficient
//! margins, Lipschitz-corrected circle minima, the two-certificate
//! combination floor) and *sampled evidence* (sign sweeps, separation gaps,
//! approximation residuals). Consumers such as the CLI keep the two apart in
//! their verdicts.
//!
//! The core loop, for the generator `g(z) = z^3 conj(z)`:
//!
//! ```
//! use diskalg::condition::{
//!     build_certificate, check_condition_a, check_strict_positivity, margin_trace,
//! };
//! use diskalg::{Complex64, HomogeneousSymbol};
//!
//! let g = HomogeneousSymbol::new(4, [(1, Complex64::new(1.0, 0.0))])?;
//! let verdict = check_condition_a(&g)?;
//! assert!(verdict.passes_a);
//!
//! let cert = build_certificate(&g, verdict.pivot)?;
//! let trace = margin_trace(&cert.p, &g, 4096)?;
//! let (strict, certified_min) = check_strict_positivity(&trace);
//! assert!(strict);
//! assert!((certified_min - 3.0).abs() < 1e-12);
//! # Ok::<(), diskalg::Error>(())
//! ```

pub mod approx;
pub mod bipoly;
pub mod condition;
pub mod error;
pub mod geometry;
pub mod mixed;
mod power;
pub mod symbol;

pub use bipoly::{difference_quotient, BiPoly};
pub use condition::{
    build_certificate, check_condition_a, check_condition_b, check_condition_c,
    check_strict_positivity, combine_certificates, companion_certificate, margin_trace,
    symbol_from_certificate, verify_polynomial_condition, Certificate, CoefficientVerdict,
    CombineResult, MarginTrace, SignEvidence,
};
pub use error::Error;
pub use geometry::{
    apply_shear, four_disks, invert_shear, kallin_probe, residual_trace, rewrite_even_perturbation,
    sample_disk, separation_check, transform_generator, DiskSample, GeneratorSpec, KallinReport,
    SeparationReport, SmallnessClass,
};
pub use mixed::{MixedPoly, Parity};
pub use num_complex::Complex64;
pub use symbol::HomogeneousSymbol;
