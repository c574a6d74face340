//! Homogeneous symbols: finite sums `a_k conj(z)^k z^(d-k)` of degree d >= 2.
//!
//! Indices k may be negative or exceed d (the missing exponent is made up by
//! a reciprocal power), so the family covers expressions like
//! `(1/2) conj(z)^(-1) z^3`. The value at the origin is 0 by definition,
//! which is the continuous extension since d >= 2 makes the symbol o(z).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::Error;
use crate::power::powi;

#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousSymbol {
    degree: u32,
    terms: BTreeMap<i64, Complex64>,
}

impl HomogeneousSymbol {
    /// Degree must be at least 2; zero coefficients are dropped.
    pub fn new<I>(degree: u32, terms: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        if degree < 2 {
            return Err(Error::SymbolDegreeTooSmall(degree));
        }
        let mut map = BTreeMap::new();
        for (k, a) in terms {
            assert!(
                a.re.is_finite() && a.im.is_finite(),
                "non-finite coefficient at index {k}"
            );
            let entry = map.entry(k).or_insert(Complex64::new(0.0, 0.0));
            *entry += a;
            if entry.re == 0.0 && entry.im == 0.0 {
                map.remove(&k);
            }
        }
        Ok(Self { degree, terms: map })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// m with degree = 2m, when the degree is even.
    pub fn half_degree(&self) -> Result<i64, Error> {
        if self.degree.is_multiple_of(2) {
            Ok((self.degree / 2) as i64)
        } else {
            Err(Error::OddSymbolDegree(self.degree))
        }
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.terms
            .get(&k)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.terms.iter().map(|(&k, &a)| (k, a))
    }

    pub fn support(&self) -> impl Iterator<Item = i64> + '_ {
        self.terms.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff_abs_sum(&self) -> f64 {
        self.terms.values().map(|a| a.norm()).sum()
    }

    /// `sum_k a_k conj(z)^k z^(d-k)`; 0 at the origin.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        if z.re == 0.0 && z.im == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let zb = z.conj();
        let mut acc = Complex64::new(0.0, 0.0);
        for (&k, &a) in &self.terms {
            acc += a * powi(zb, k) * powi(z, self.degree as i64 - k);
        }
        acc
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.degree, self.terms().map(|(k, a)| (k, a * c))).expect("degree unchanged")
    }

    /// Frequency content of the circle trace: `g(e^{i t}) = sum_q c_q e^{i q t}`
    /// with q = d - 2k. Distinct k never collide in q, so the map is exact.
    pub fn circle_frequencies(&self) -> BTreeMap<i64, Complex64> {
        self.terms
            .iter()
            .map(|(&k, &a)| (self.degree as i64 - 2 * k, a))
            .collect()
    }

    /// Bound on |d/dt g(e^{i t})| from the frequency content.
    pub fn circle_lipschitz(&self) -> f64 {
        self.circle_frequencies()
            .iter()
            .map(|(&q, a)| (q.unsigned_abs() as f64) * a.norm())
            .sum()
    }

    /// Angles where the circle trace (numerically) vanishes: local minima of
    /// |g(e^{i t})| below the resolution bound `pi/samples * circle_lipschitz`.
    /// A genuine zero forces a sampled value under that bound, so an empty
    /// result certifies there is no zero the grid could have straddled.
    pub fn circle_zeros(&self, samples: usize) -> Vec<f64> {
        if self.is_zero() || samples == 0 {
            return Vec::new();
        }
        let step = std::f64::consts::TAU / samples as f64;
        let magnitudes: Vec<f64> = (0..samples)
            .map(|j| self.eval(Complex64::cis(step * j as f64)).norm())
            .collect();
        let threshold = self.circle_lipschitz() * (step / 2.0) * 1.0001 + 1e-12;
        let mut zeros = Vec::new();
        for j in 0..samples {
            let prev = magnitudes[(j + samples - 1) % samples];
            let next = magnitudes[(j + 1) % samples];
            if magnitudes[j] <= threshold && magnitudes[j] <= prev && magnitudes[j] <= next {
                zeros.push(step * j as f64);
            }
        }
        zeros
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degree_below_two_is_rejected() {
        assert_eq!(
            HomogeneousSymbol::new(1, [(0, c(1.0, 0.0))]).unwrap_err(),
            Error::SymbolDegreeTooSmall(1)
        );
    }

    #[test]
    fn eval_abs_square() {
        // i |z|^2 = i conj(z) z
        let g = HomogeneousSymbol::new(2, [(1, c(0.0, 1.0))]).unwrap();
        assert_eq!(g.eval(c(2.0, 0.0)), c(0.0, 4.0));
        assert_eq!(g.eval(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn eval_cubic_conjugate_product() {
        // z^3 conj(z): degree 4, index 1
        let g = HomogeneousSymbol::new(4, [(1, c(1.0, 0.0))]).unwrap();
        let z = c(1.0, 1.0);
        let want = z * z * z * z.conj();
        assert!((g.eval(z) - want).norm() < 1e-14);
        assert_eq!(want, c(0.0, 4.0));
    }

    #[test]
    fn eval_negative_index() {
        // (1/2) conj(z)^(-1) z^3, homogeneous of degree 2
        let g = HomogeneousSymbol::new(2, [(-1, c(0.5, 0.0))]).unwrap();
        let z = c(0.3, -0.4);
        let want = 0.5 * z * z * z / z.conj();
        assert!((g.eval(z) - want).norm() < 1e-14);
        assert_eq!(g.eval(c(0.0, 0.0)), c(0.0, 0.0));
    }

    #[test]
    fn homogeneity_on_rays() {
        let g = HomogeneousSymbol::new(4, [(1, c(1.0, 0.0)), (3, c(0.0, 0.25))]).unwrap();
        let z = Complex64::cis(0.7);
        for t in [0.5_f64, 2.0] {
            let scaled = g.eval(t * z);
            let want = t.powi(4) * g.eval(z);
            assert!((scaled - want).norm() <= 1e-12 * t.powi(4) * g.coeff_abs_sum());
        }
    }

    #[test]
    fn circle_zero_detection() {
        // |z|^2 + conj(z)^2 vanishes on the circle at t = pi/2, 3pi/2
        let g = HomogeneousSymbol::new(2, [(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]).unwrap();
        let zeros = g.circle_zeros(4096);
        assert_eq!(zeros.len(), 2);
        assert!((zeros[0] - std::f64::consts::FRAC_PI_2).abs() < 1e-2);
        assert!((zeros[1] - 3.0 * std::f64::consts::FRAC_PI_2).abs() < 1e-2);

        // 2|z|^2 + conj(z)^2 has no circle zeros
        let g = HomogeneousSymbol::new(2, [(1, c(2.0, 0.0)), (2, c(1.0, 0.0))]).unwrap();
        assert!(g.circle_zeros(4096).is_empty());
    }
}
