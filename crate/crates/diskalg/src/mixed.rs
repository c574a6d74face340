//! Finite sums `c_{p,q} z^p conj(z)^q` with nonnegative exponents.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Error;
use crate::power::powu;

/// Term-wise parity under `z -> -z`: a term flips by `(-1)^(p+q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MixedPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
    parity: Parity,
}

impl MixedPoly {
    /// Collects terms and infers the parity flag. The empty polynomial is
    /// flagged even.
    pub fn new<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut map: BTreeMap<(u32, u32), Complex64> = BTreeMap::new();
        for ((p, q), c) in terms {
            assert!(
                c.re.is_finite() && c.im.is_finite(),
                "non-finite coefficient at z^{p} conj(z)^{q}"
            );
            let entry = map.entry((p, q)).or_insert(Complex64::new(0.0, 0.0));
            *entry += c;
            if entry.re == 0.0 && entry.im == 0.0 {
                map.remove(&(p, q));
            }
        }
        let parity = infer_parity(&map);
        Self { terms: map, parity }
    }

    pub fn zero() -> Self {
        Self::new([])
    }

    /// As [`MixedPoly::new`] but validates a caller-declared parity.
    pub fn with_parity<I>(terms: I, declared: Parity) -> Result<Self, Error>
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let poly = Self::new(terms);
        if poly.parity != declared && !poly.is_zero() {
            return Err(Error::ParityMismatch);
        }
        Ok(poly)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn coeff(&self, p: u32, q: u32) -> Complex64 {
        self.terms
            .get(&(p, q))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(p, q), &c) in &self.terms {
            acc += c * powu(z, p) * powu(zb, q);
        }
        acc
    }

    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(p, q)| p + q).min()
    }

    /// Lowest total degree among the odd-parity terms, if any. This is the
    /// decay order of `v(z) - v(-z)`.
    pub fn min_odd_degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|&(p, q)| p + q)
            .filter(|d| d % 2 == 1)
            .min()
    }
}

fn infer_parity(terms: &BTreeMap<(u32, u32), Complex64>) -> Parity {
    let mut any_odd = false;
    let mut any_even = false;
    for &(p, q) in terms.keys() {
        if (p + q) % 2 == 1 {
            any_odd = true;
        } else {
            any_even = true;
        }
    }
    match (any_odd, any_even) {
        (true, false) => Parity::Odd,
        (true, true) => Parity::None,
        (false, _) => Parity::Even,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_fixtures() {
        // conj(z)^2 + z^3 at z = 1 -> 2
        let f = MixedPoly::new([((0, 2), c(1.0, 0.0)), ((3, 0), c(1.0, 0.0))]);
        assert_eq!(f.eval(c(1.0, 0.0)), c(2.0, 0.0));
        assert_eq!(MixedPoly::zero().eval(c(0.3, 0.7)), c(0.0, 0.0));
        // conj(z)^2 + conj(z)^3 at z = i -> (-i)^2 + (-i)^3 = -1 + i
        let f = MixedPoly::new([((0, 2), c(1.0, 0.0)), ((0, 3), c(1.0, 0.0))]);
        assert_eq!(f.eval(c(0.0, 1.0)), c(-1.0, 1.0));
    }

    #[test]
    fn parity_is_inferred_and_validated() {
        let odd = MixedPoly::new([((3, 0), c(1.0, 0.0)), ((1, 2), c(0.0, 2.0))]);
        assert_eq!(odd.parity(), Parity::Odd);
        let even = MixedPoly::new([((0, 2), c(1.0, 0.0))]);
        assert_eq!(even.parity(), Parity::Even);
        let mixed = MixedPoly::new([((0, 2), c(1.0, 0.0)), ((3, 0), c(1.0, 0.0))]);
        assert_eq!(mixed.parity(), Parity::None);

        assert!(MixedPoly::with_parity([((3, 0), c(1.0, 0.0))], Parity::Odd).is_ok());
        assert_eq!(
            MixedPoly::with_parity([((3, 0), c(1.0, 0.0))], Parity::Even).unwrap_err(),
            Error::ParityMismatch
        );
    }

    #[test]
    fn min_odd_degree_tracks_asymmetry_order() {
        let v = MixedPoly::new([((0, 2), c(1.0, 0.0)), ((3, 0), c(1.0, 0.0))]);
        assert_eq!(v.min_odd_degree(), Some(3));
        let even = MixedPoly::new([((0, 2), c(1.0, 0.0))]);
        assert_eq!(even.min_odd_degree(), None);
    }
}
