//! Sparse analytic polynomials in two complex variables.
//!
//! A [`BiPoly`] is a finite sum of terms `c * z1^j * z2^k` with complex
//! coefficients. Zero coefficients are dropped eagerly, so structural
//! predicates (parity filters, symmetry scans, degree bounds) see exactly
//! the written terms and never an explicit zero.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::Error;
use crate::power::powu;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BiPoly {
    terms: BTreeMap<(u32, u32), Complex64>,
}

/// Serializes as a list of `[j, k, re, im]` records.
impl Serialize for BiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.terms.len()))?;
        for (&(j, k), &c) in &self.terms {
            seq.serialize_element(&(j, k, c.re, c.im))?;
        }
        seq.end()
    }
}

impl BiPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Single term `c * z1^j * z2^k`; the zero polynomial when `c == 0`.
    pub fn monomial(j: u32, k: u32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.accumulate(j, k, c);
        p
    }

    /// Collects terms, summing duplicates and dropping exact zeros.
    ///
    /// Panics on non-finite coefficients: those are programming errors, not
    /// runtime conditions (the CLI validates user input at the boundary).
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Complex64)>,
    {
        let mut p = Self::zero();
        for ((j, k), c) in terms {
            p.accumulate(j, k, c);
        }
        p
    }

    fn accumulate(&mut self, j: u32, k: u32, c: Complex64) {
        assert!(
            c.re.is_finite() && c.im.is_finite(),
            "non-finite coefficient at z1^{j} z2^{k}"
        );
        let entry = self.terms.entry((j, k)).or_insert(Complex64::new(0.0, 0.0));
        *entry += c;
        if entry.re == 0.0 && entry.im == 0.0 {
            self.terms.remove(&(j, k));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, j: u32, k: u32) -> Complex64 {
        self.terms
            .get(&(j, k))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Stored terms in (j, k)-lexicographic order; no zero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), Complex64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn eval(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(j, k), &c) in &self.terms {
            acc += c * powu(z1, j) * powu(z2, k);
        }
        acc
    }

    pub fn min_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(j, k)| j + k).min()
    }

    pub fn max_total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|&(j, k)| j + k).max()
    }

    /// Splits into homogeneous parts, degrees strictly increasing.
    /// The parts sum back to the input coefficient-exactly.
    pub fn homogeneous_parts(&self) -> Vec<(u32, BiPoly)> {
        let mut by_degree: BTreeMap<u32, BiPoly> = BTreeMap::new();
        for (&(j, k), &c) in &self.terms {
            by_degree
                .entry(j + k)
                .or_insert_with(BiPoly::zero)
                .accumulate(j, k, c);
        }
        by_degree.into_iter().collect()
    }

    /// `Some(d)` when every term has total degree `d`; `None` for the zero
    /// polynomial or inhomogeneous input.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.min_total_degree()?;
        (self.max_total_degree() == Some(d)).then_some(d)
    }

    /// Terms of odd total degree only, so `result(-z1, -z2) = -result(z1, z2)`.
    pub fn odd_part(&self) -> BiPoly {
        BiPoly {
            terms: self
                .terms
                .iter()
                .filter(|(&(j, k), _)| (j + k) % 2 == 1)
                .map(|(&e, &c)| (e, c))
                .collect(),
        }
    }

    pub fn is_odd(&self) -> bool {
        self.terms.keys().all(|&(j, k)| (j + k) % 2 == 1)
    }

    /// For homogeneous odd `p = sum a_k z1^k z2^(d-k)` reports whether
    /// `a_k = conj(a_(d-k))` for every k, together with the worst deviation
    /// `max_k |a_k - conj(a_(d-k))|`. Such polynomials have a real trace
    /// `p(z, conj(z))` on the whole plane.
    pub fn is_complex_symmetric(&self) -> Result<(bool, f64), Error> {
        let d = self.homogeneous_degree().ok_or(Error::NotOddHomogeneous)?;
        if d % 2 == 0 {
            return Err(Error::NotOddHomogeneous);
        }
        let mut deviation = 0.0_f64;
        for k in 0..=d {
            let a = self.coeff(k, d - k);
            let partner = self.coeff(d - k, k).conj();
            deviation = deviation.max((a - partner).norm());
        }
        Ok((deviation == 0.0, deviation))
    }

    /// Formal partial derivative in the second variable.
    pub fn d_zeta2(&self) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(j, k), &c) in &self.terms {
            if k > 0 {
                out.accumulate(j, k - 1, c * (k as f64));
            }
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(j, k), &v) in &self.terms {
            out.accumulate(j, k, v * c);
        }
        out
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(j, k), &c) in &rhs.terms {
            out.accumulate(j, k, c);
        }
        out
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let mut out = self.clone();
        for (&(j, k), &c) in &rhs.terms {
            out.accumulate(j, k, -c);
        }
        out
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        let mut out = BiPoly::zero();
        for (&(j1, k1), &c1) in &self.terms {
            for (&(j2, k2), &c2) in &rhs.terms {
                out.accumulate(j1 + j2, k1 + k2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(j, k), &c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}{:+}i)", c.re, c.im)?;
            if j > 0 {
                write!(f, "*z1^{j}")?;
            }
            if k > 0 {
                write!(f, "*z2^{k}")?;
            }
        }
        Ok(())
    }
}

/// Divided difference of `F` in its second slot:
/// `(F(w1, w3) - F(w1, w2)) / (w3 - w2)` away from the diagonal, switching to
/// the formal derivative `dF/dz2(w1, w2)` when `|w3 - w2| <= 1e-8 (1 + |w2|)`
/// where the subtraction cancels catastrophically. In exact arithmetic it
/// satisfies `F(w1, w2 + z) = F(w1, w2) + z * difference_quotient(F, w1, w2, w2 + z)`.
pub fn difference_quotient(f: &BiPoly, w1: Complex64, w2: Complex64, w3: Complex64) -> Complex64 {
    let switch = 1e-8 * (1.0 + w2.norm());
    if (w3 - w2).norm() > switch {
        (f.eval(w1, w3) - f.eval(w1, w2)) / (w3 - w2)
    } else {
        f.d_zeta2().eval(w1, w2)
    }
}
