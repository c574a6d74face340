//! Integer powers of complex numbers by repeated squaring.
//!
//! Exponents here are desk-scale (degrees of small polynomials), so the
//! binary ladder is both fast and as accurate as the naive product.

use num_complex::Complex64;

pub(crate) fn powu(base: Complex64, mut exp: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    let mut base = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base *= base;
        exp >>= 1;
    }
    acc
}

/// `base^exp` for signed exponents; negative powers take one reciprocal
/// of the positive power.
pub(crate) fn powi(base: Complex64, exp: i64) -> Complex64 {
    if exp >= 0 {
        powu(base, exp as u32)
    } else {
        Complex64::new(1.0, 0.0) / powu(base, (-exp) as u32)
    }
}
