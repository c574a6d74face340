//! Sufficient coefficient conditions, certificate polynomials and margin
//! traces for the sign condition that drives the gluing argument.
//!
//! For an even homogeneous symbol `g = sum_k a_k conj(z)^k z^(2m-k)` the
//! three checks below are increasingly weaker sufficient conditions, all
//! relative to a pivot index `l <= m` with `a_l != 0`:
//!
//!  A. `|a_l| > sum_{n != l} |a_n|`
//!  B. `sum_{n >= 1} |c_n| < 1` where `c_n = a_{l+n}/a_l + conj(a_{l-n}/a_l)`
//!  C. `Re Phi(w) > 0` on `|w| = 1` where `Phi(w) = 1 + sum c_n w^n`
//!
//! Any of them certifies the two-term certificate
//! `p = conj(alpha) z1^(2m-2l+1) + alpha z2^(2m-2l+1)`, `alpha = i |a_l|/a_l`,
//! whose margin trace on the unit circle is `(2m-2l+1) |a_l| Re Phi(e^{-2it})`.

use num_complex::Complex64;
use serde::Serialize;

use crate::bipoly::BiPoly;
use crate::error::Error;
use crate::power::powi;
use crate::symbol::HomogeneousSymbol;

/// Default angular resolution for circle sampling.
pub const DEFAULT_CIRCLE_SAMPLES: usize = 4096;

/// Outcome of the coefficient checks at one pivot.
///
/// The margins are certified quantities: `margin_a = |a_l| - sum_{n!=l}|a_n|`,
/// `margin_b = 1 - sum |c_n|`, and `margin_c` is a certified lower bound for
/// `Re Phi` on the circle. Passing means strictly positive margin, and the
/// checks weaken left to right: `passes_a` implies `passes_b` implies
/// `passes_c`.
#[derive(Clone, Debug, Serialize)]
pub struct CoefficientVerdict {
    pub pivot: i64,
    pub passes_a: bool,
    pub passes_b: bool,
    pub passes_c: bool,
    pub margin_a: f64,
    pub margin_b: f64,
    pub margin_c: f64,
    /// The derived sequence (n, c_n), nonzero entries only.
    pub c_seq: Vec<(u32, Complex64)>,
}

impl CoefficientVerdict {
    pub fn passes_any(&self) -> bool {
        self.passes_a || self.passes_b || self.passes_c
    }
}

/// Two-term certificate polynomial together with its construction data.
#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub p: BiPoly,
    /// Odd degree 2m - 2l + 1 of the certificate.
    pub s_degree: u32,
    /// Unimodular coefficient i |a_l| / a_l.
    pub alpha: Complex64,
    pub pivot: i64,
}

fn derived_sequence(g: &HomogeneousSymbol, l: i64) -> Result<Vec<(u32, Complex64)>, Error> {
    let a_l = g.coeff(l);
    if a_l.re == 0.0 && a_l.im == 0.0 {
        return Err(Error::PivotVanishes(l));
    }
    let lo = g.support().min().unwrap_or(l);
    let hi = g.support().max().unwrap_or(l);
    let reach = (hi - l).max(l - lo).max(0) as u32;
    let mut seq = Vec::new();
    for n in 1..=reach {
        let c_n = g.coeff(l + n as i64) / a_l + (g.coeff(l - n as i64) / a_l).conj();
        if c_n.re != 0.0 || c_n.im != 0.0 {
            seq.push((n, c_n));
        }
    }
    Ok(seq)
}

/// Full verdict at an explicit pivot, sampling `Re Phi` at `samples` angles.
fn verdict_at(g: &HomogeneousSymbol, l: i64, samples: usize) -> Result<CoefficientVerdict, Error> {
    let m = g.half_degree()?;
    if l > m {
        return Err(Error::InvalidParameter("pivot index exceeds half degree"));
    }
    let a_l = g.coeff(l);
    if a_l.re == 0.0 && a_l.im == 0.0 {
        return Err(Error::PivotVanishes(l));
    }
    if samples < 64 {
        return Err(Error::InvalidParameter("need at least 64 circle samples"));
    }

    let others: f64 = g
        .terms()
        .filter(|&(k, _)| k != l)
        .map(|(_, a)| a.norm())
        .sum();
    let margin_a = a_l.norm() - others;

    let c_seq = derived_sequence(g, l)?;
    let abs_sum: f64 = c_seq.iter().map(|(_, c)| c.norm()).sum();
    let margin_b = 1.0 - abs_sum;

    // Certified lower bound for Re Phi on the circle: the sampled minimum
    // corrected by the exact Lipschitz constant of the trigonometric
    // polynomial, or the coefficient bound 1 - sum|c_n|, whichever is larger
    // (both are true lower bounds, and keeping the coefficient bound makes
    // B => C hold at any sampling resolution).
    let lipschitz: f64 = c_seq.iter().map(|&(n, c)| n as f64 * c.norm()).sum();
    let mut sampled_min = f64::INFINITY;
    let step = std::f64::consts::TAU / samples as f64;
    for j in 0..samples {
        let w = Complex64::cis(step * j as f64);
        let value = re_phi(&c_seq, w);
        sampled_min = sampled_min.min(value);
    }
    let corrected = sampled_min - (std::f64::consts::PI / samples as f64) * lipschitz;
    let margin_c = corrected.max(margin_b);

    Ok(CoefficientVerdict {
        pivot: l,
        passes_a: margin_a > 0.0,
        passes_b: margin_b > 0.0,
        passes_c: margin_c > 0.0 && sampled_min > 0.0,
        margin_a,
        margin_b,
        margin_c,
        c_seq,
    })
}

/// `Re Phi(w) = Re(1 + sum c_n w^n)`.
pub fn re_phi(c_seq: &[(u32, Complex64)], w: Complex64) -> f64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &(n, c) in c_seq {
        acc += c * powi(w, n as i64);
    }
    acc.re
}

/// Dominant-coefficient check over every admissible pivot; returns the
/// verdict at the pivot maximizing `margin_a` (ties broken by smallest l).
pub fn check_condition_a(g: &HomogeneousSymbol) -> Result<CoefficientVerdict, Error> {
    best_pivot_by(g, DEFAULT_CIRCLE_SAMPLES, |v| v.margin_a)
}

/// Derived-sequence check at an explicit pivot.
pub fn check_condition_b(g: &HomogeneousSymbol, l: i64) -> Result<CoefficientVerdict, Error> {
    verdict_at(g, l, DEFAULT_CIRCLE_SAMPLES)
}

/// Circle-positivity check at an explicit pivot and sampling resolution.
pub fn check_condition_c(
    g: &HomogeneousSymbol,
    l: i64,
    samples: usize,
) -> Result<CoefficientVerdict, Error> {
    verdict_at(g, l, samples)
}

/// All pivots `l <= m` carrying a nonzero coefficient.
pub fn admissible_pivots(g: &HomogeneousSymbol) -> Result<Vec<i64>, Error> {
    let m = g.half_degree()?;
    let pivots: Vec<i64> = g.support().filter(|&k| k <= m).collect();
    if pivots.is_empty() {
        return Err(Error::NoAdmissiblePivot { half_degree: m });
    }
    Ok(pivots)
}

fn best_pivot_by(
    g: &HomogeneousSymbol,
    samples: usize,
    score: impl Fn(&CoefficientVerdict) -> f64,
) -> Result<CoefficientVerdict, Error> {
    let mut best: Option<CoefficientVerdict> = None;
    for l in admissible_pivots(g)? {
        let v = verdict_at(g, l, samples)?;
        let better = match &best {
            None => true,
            Some(b) => score(&v) > score(b),
        };
        if better {
            best = Some(v);
        }
    }
    Ok(best.expect("admissible_pivots is nonempty"))
}

/// Scans pivots preferring the strongest passing condition: the best pivot
/// by `margin_a` if any passes A, else by `margin_b`, else by `margin_c`;
/// falls back to the best `margin_a` verdict when nothing passes.
pub fn best_verdict(g: &HomogeneousSymbol, samples: usize) -> Result<CoefficientVerdict, Error> {
    let by_a = best_pivot_by(g, samples, |v| v.margin_a)?;
    if by_a.passes_a {
        return Ok(by_a);
    }
    let by_b = best_pivot_by(g, samples, |v| v.margin_b)?;
    if by_b.passes_b {
        return Ok(by_b);
    }
    let by_c = best_pivot_by(g, samples, |v| v.margin_c)?;
    if by_c.passes_c {
        return Ok(by_c);
    }
    Ok(by_a)
}

/// Builds `p = conj(alpha) z1^(2m-2l+1) + alpha z2^(2m-2l+1)` with
/// `alpha = i |a_l| / a_l`; complex-symmetric by construction.
pub fn build_certificate(g: &HomogeneousSymbol, l: i64) -> Result<Certificate, Error> {
    let m = g.half_degree()?;
    if l > m {
        return Err(Error::InvalidParameter("pivot index exceeds half degree"));
    }
    let a_l = g.coeff(l);
    if a_l.re == 0.0 && a_l.im == 0.0 {
        return Err(Error::PivotVanishes(l));
    }
    let alpha = Complex64::new(0.0, 1.0) * a_l.norm() / a_l;
    let s_degree = (2 * m - 2 * l + 1) as u32;
    let p = BiPoly::from_terms([((s_degree, 0), alpha.conj()), ((0, s_degree), alpha)]);
    Ok(Certificate {
        p,
        s_degree,
        alpha,
        pivot: l,
    })
}

/// Raised companion of a certificate: same `alpha`, exponent + 2. Used as
/// the second trace of the two-certificate combination.
pub fn companion_certificate(cert: &Certificate) -> Certificate {
    let n = cert.s_degree + 2;
    Certificate {
        p: BiPoly::from_terms([((n, 0), cert.alpha.conj()), ((0, n), cert.alpha)]),
        s_degree: n,
        alpha: cert.alpha,
        pivot: cert.pivot,
    }
}

/// Sampled margin function on the unit circle with its derivative bound.
#[derive(Clone, Debug, Serialize)]
pub struct MarginTrace {
    pub thetas: Vec<f64>,
    pub values: Vec<f64>,
    /// Bound on |d value / d theta| from the trace's frequency content.
    pub lipschitz: f64,
}

impl MarginTrace {
    pub fn from_samples(thetas: Vec<f64>, values: Vec<f64>, lipschitz: f64) -> Self {
        assert_eq!(thetas.len(), values.len(), "trace lengths must match");
        assert!(lipschitz >= 0.0);
        Self {
            thetas,
            values,
            lipschitz,
        }
    }

    /// Uniform sampling of a closure over the circle.
    pub fn from_fn(samples: usize, lipschitz: f64, f: impl Fn(f64) -> f64) -> Self {
        let step = std::f64::consts::TAU / samples as f64;
        let thetas: Vec<f64> = (0..samples).map(|j| step * j as f64).collect();
        let values = thetas.iter().map(|&t| f(t)).collect();
        Self::from_samples(thetas, values, lipschitz)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Samples `f(t) = Im(dp/dz2(e^{it}, e^{-it}) * g(e^{it}))` at uniform angles.
///
/// The product is a trigonometric polynomial assembled exactly by convolving
/// the frequency maps of the two factors, which also yields the exact
/// Lipschitz constant `sum |q| |c_q|`.
pub fn margin_trace(
    p: &BiPoly,
    g: &HomogeneousSymbol,
    samples: usize,
) -> Result<MarginTrace, Error> {
    let d = p.homogeneous_degree().ok_or(Error::NotOddHomogeneous)?;
    if d % 2 == 0 {
        return Err(Error::NotOddHomogeneous);
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample"));
    }
    let dp = p.d_zeta2();
    let mut freq: std::collections::BTreeMap<i64, Complex64> = std::collections::BTreeMap::new();
    for ((j, k), b) in dp.terms() {
        let base = j as i64 - k as i64;
        for (q_g, a) in g.circle_frequencies() {
            let q = base + q_g;
            let entry = freq.entry(q).or_insert(Complex64::new(0.0, 0.0));
            *entry += b * a;
        }
    }
    let lipschitz: f64 = freq
        .iter()
        .map(|(&q, c)| q.unsigned_abs() as f64 * c.norm())
        .sum();
    let step = std::f64::consts::TAU / samples as f64;
    let mut thetas = Vec::with_capacity(samples);
    let mut values = Vec::with_capacity(samples);
    for j in 0..samples {
        let t = step * j as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&q, &c) in &freq {
            acc += c * Complex64::cis(q as f64 * t);
        }
        thetas.push(t);
        values.push(acc.im);
    }
    Ok(MarginTrace::from_samples(thetas, values, lipschitz))
}

/// Certified strict positivity of a sampled trace: the sampled minimum less
/// `(pi / samples) * lipschitz` covers every point between samples.
pub fn check_strict_positivity(trace: &MarginTrace) -> (bool, f64) {
    if trace.values.is_empty() {
        return (false, 0.0);
    }
    let gap = std::f64::consts::PI / trace.values.len() as f64;
    let certified = trace.min() - gap * trace.lipschitz;
    (certified > 0.0, certified)
}

/// One strict-sign failure of the sampled sign condition.
#[derive(Clone, Debug, Serialize)]
pub struct SignViolation {
    pub z: Complex64,
    /// Coefficient c of the perturbation R = c z g(z) in force.
    pub perturbation: Complex64,
    pub plus_branch: bool,
    pub value: f64,
}

/// Sampled evidence for the two-sided sign condition.
#[derive(Clone, Debug, Serialize)]
pub struct SignEvidence {
    /// Minimum of `Im p(z, w_plus(z))` over all samples (should stay > 0).
    pub min_plus: f64,
    /// Maximum of `Im p(z, w_minus(z))` over all samples (should stay < 0).
    pub max_minus: f64,
    pub violations: Vec<SignViolation>,
    pub checked: usize,
}

impl SignEvidence {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }

    fn merge(&mut self, other: SignEvidence) {
        self.min_plus = self.min_plus.min(other.min_plus);
        self.max_minus = self.max_minus.max(other.max_minus);
        self.violations.extend(other.violations);
        self.checked += other.checked;
    }
}

/// Standard perturbation coefficients for `R = c z g(z)`.
pub fn standard_perturbations() -> [Complex64; 5] {
    [
        Complex64::new(0.0, 0.0),
        Complex64::new(0.1, 0.0),
        Complex64::new(-0.1, 0.0),
        Complex64::new(0.0, 0.1),
        Complex64::new(0.0, -0.1),
    ]
}

/// Sweeps both branches with caller-supplied second arguments. Only the odd
/// part of `p` matters for the sign condition, so it is applied up front.
pub fn verify_sign_samplers(
    p: &BiPoly,
    w_plus: impl Fn(Complex64) -> Complex64,
    w_minus: impl Fn(Complex64) -> Complex64,
    radii: &[f64],
    angles: usize,
) -> SignEvidence {
    let p = p.odd_part();
    let mut evidence = SignEvidence {
        min_plus: f64::INFINITY,
        max_minus: f64::NEG_INFINITY,
        violations: Vec::new(),
        checked: 0,
    };
    let step = std::f64::consts::TAU / angles as f64;
    for &r in radii {
        for j in 0..angles {
            let z = r * Complex64::cis(step * j as f64);
            let plus = p.eval(z, w_plus(z)).im;
            evidence.min_plus = evidence.min_plus.min(plus);
            if plus <= 0.0 {
                evidence.violations.push(SignViolation {
                    z,
                    perturbation: Complex64::new(0.0, 0.0),
                    plus_branch: true,
                    value: plus,
                });
            }
            let minus = p.eval(z, w_minus(z)).im;
            evidence.max_minus = evidence.max_minus.max(minus);
            if minus >= 0.0 {
                evidence.violations.push(SignViolation {
                    z,
                    perturbation: Complex64::new(0.0, 0.0),
                    plus_branch: false,
                    value: minus,
                });
            }
            evidence.checked += 2;
        }
    }
    evidence
}

/// Sampled check of the two-sided sign condition for `g` against `p` under
/// the perturbation family `R = c z g(z)`: on circles of each radius it
/// requires `Im p(z, conj(z) + g + R) > 0` and `Im p(z, conj(z) - g + R) < 0`.
/// Violations are returned, not raised; this is evidence, not a certificate.
pub fn verify_polynomial_condition(
    p: &BiPoly,
    g: &HomogeneousSymbol,
    perturbations: &[Complex64],
    radii: &[f64],
    angles: usize,
) -> SignEvidence {
    let mut evidence = SignEvidence {
        min_plus: f64::INFINITY,
        max_minus: f64::NEG_INFINITY,
        violations: Vec::new(),
        checked: 0,
    };
    for &c in perturbations {
        let mut one = verify_sign_samplers(
            p,
            |z| z.conj() + g.eval(z) + c * z * g.eval(z),
            |z| z.conj() - g.eval(z) + c * z * g.eval(z),
            radii,
            angles,
        );
        for v in &mut one.violations {
            v.perturbation = c;
        }
        evidence.merge(one);
    }
    evidence
}

/// Output of the two-certificate combination.
#[derive(Clone, Debug, Serialize)]
pub struct CombineResult {
    pub delta: f64,
    /// Angle intervals `[start, end]` covering the sampled sublevel set U.
    pub neighborhood: Vec<(f64, f64)>,
    /// `min f0` outside U; `+inf` when U is the whole circle.
    pub epsilon: f64,
    pub lambda0: f64,
    /// `min (f0 + lambda0 f1 - lambda0 delta)` over all samples.
    pub verified_floor: f64,
}

/// Combines a nonnegative first trace with a second trace positive on the
/// first one's zero set, producing `lambda0` and `delta` with
/// `f0 + lambda0 f1 >= lambda0 delta` on the circle.
///
/// The zero set is `N = {f0 <= zero_tol}`; `delta` is half the minimum of
/// `f1` on N (or `min f0` when N is empty, the strictly positive regime).
/// The neighborhood U is the largest sampled sublevel set `{f0 < tau}` on
/// which `f1 >= delta`, scanning tau over sampled values and `+inf`.
pub fn combine_certificates(
    f0: &MarginTrace,
    f1: &MarginTrace,
    zero_tol: f64,
    cap: f64,
) -> Result<CombineResult, Error> {
    if f0.thetas.len() != f1.thetas.len() || f0.thetas.iter().zip(&f1.thetas).any(|(a, b)| a != b) {
        return Err(Error::MismatchedTraces);
    }
    if !cap.is_finite() || cap <= 0.0 {
        return Err(Error::InvalidParameter("lambda cap must be positive"));
    }
    if zero_tol < 0.0 {
        return Err(Error::InvalidParameter(
            "zero tolerance must be nonnegative",
        ));
    }
    let n = f0.values.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty traces"));
    }

    for i in 0..n {
        if f0.values[i] < -zero_tol {
            return Err(Error::FirstMarginNegative {
                theta: f0.thetas[i],
                value: f0.values[i],
            });
        }
    }

    let zero_set: Vec<usize> = (0..n).filter(|&i| f0.values[i] <= zero_tol).collect();
    let delta = if zero_set.is_empty() {
        f0.min()
    } else {
        let mut min_f1 = f64::INFINITY;
        for &i in &zero_set {
            if f1.values[i] <= 0.0 {
                return Err(Error::SecondMarginNotPositive {
                    theta: f1.thetas[i],
                    value: f1.values[i],
                });
            }
            min_f1 = min_f1.min(f1.values[i]);
        }
        0.5 * min_f1
    };

    // Threshold scan, largest first; +inf makes U the whole circle.
    let mut taus: Vec<f64> = f0
        .values
        .iter()
        .copied()
        .filter(|&v| v > zero_tol)
        .collect();
    taus.sort_by(|a, b| b.partial_cmp(a).expect("finite trace values"));
    taus.dedup();
    taus.insert(0, f64::INFINITY);

    let mut chosen_mask: Vec<bool> = Vec::new();
    for &tau in &taus {
        let mask: Vec<bool> = f0.values.iter().map(|&v| v < tau).collect();
        let min_f1_on_u = mask
            .iter()
            .zip(&f1.values)
            .filter(|(&inside, _)| inside)
            .map(|(_, &v)| v)
            .fold(f64::INFINITY, f64::min);
        if min_f1_on_u >= delta {
            chosen_mask = mask;
            break;
        }
    }
    if chosen_mask.is_empty() {
        // unreachable: the smallest threshold gives U = N where f1 >= 2 delta
        return Err(Error::InvalidParameter("no admissible neighborhood"));
    }

    let epsilon = chosen_mask
        .iter()
        .zip(&f0.values)
        .filter(|(&inside, _)| !inside)
        .map(|(_, &v)| v)
        .fold(f64::INFINITY, f64::min);

    let sup_f1 = f1.max_abs();
    let lambda0 = (epsilon / (2.0 * sup_f1))
        .min(epsilon / (2.0 * delta))
        .min(cap);

    let verified_floor = (0..n)
        .map(|i| f0.values[i] + lambda0 * f1.values[i] - lambda0 * delta)
        .fold(f64::INFINITY, f64::min);
    if verified_floor < -1e-12 {
        return Err(Error::CombinedFloorNegative {
            floor: verified_floor,
        });
    }

    Ok(CombineResult {
        delta,
        neighborhood: mask_to_intervals(&f0.thetas, &chosen_mask),
        epsilon,
        lambda0,
        verified_floor,
    })
}

fn mask_to_intervals(thetas: &[f64], mask: &[bool]) -> Vec<(f64, f64)> {
    let n = mask.len();
    if mask.iter().all(|&b| b) {
        return vec![(0.0, std::f64::consts::TAU)];
    }
    let mut intervals = Vec::new();
    let mut start: Option<usize> = None;
    // Begin the scan at a gap so wrap-around runs stay contiguous.
    let offset = mask.iter().position(|&b| !b).unwrap_or(0);
    for step in 0..n {
        let i = (offset + step) % n;
        match (mask[i], start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                let end = (i + n - 1) % n;
                intervals.push((thetas[s], thetas[end]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        let end = (offset + n - 1) % n;
        intervals.push((thetas[s], thetas[end]));
    }
    intervals
}

/// Reverses the certificate construction: from a complex-symmetric odd
/// `p` of degree d >= 3, builds the degree d-1 symbol
/// `g(z) = i conj(dp/dz2(z, conj(z)))`, whose margin trace against `p`
/// is `|dp/dz2(z, conj(z))|^2 >= 0` on the circle.
pub fn symbol_from_certificate(p: &BiPoly) -> Result<HomogeneousSymbol, Error> {
    let d = p.homogeneous_degree().ok_or(Error::NotOddHomogeneous)?;
    if d % 2 == 0 {
        return Err(Error::NotOddHomogeneous);
    }
    let (symmetric, deviation) = p.is_complex_symmetric()?;
    if !symmetric {
        return Err(Error::NotComplexSymmetric { deviation });
    }
    if d < 3 {
        return Err(Error::CertificateDegreeTooSmall(d));
    }
    // dp/dz2 at (z, conj(z)) = sum_k a_k (d-k) z^k conj(z)^(d-1-k); conjugate,
    // multiply by i, and read off coefficients of conj(z)^k z^(d-1-k).
    let i_unit = Complex64::new(0.0, 1.0);
    let terms: Vec<(i64, Complex64)> = p
        .terms()
        .filter(|&((_, k2), _)| k2 >= 1)
        .map(|((k, k2), a)| {
            debug_assert_eq!(k + k2, d);
            (k as i64, i_unit * a.conj() * k2 as f64)
        })
        .collect();
    HomogeneousSymbol::new(d - 1, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn symbol(degree: u32, terms: &[(i64, Complex64)]) -> HomogeneousSymbol {
        HomogeneousSymbol::new(degree, terms.iter().copied()).unwrap()
    }

    #[test]
    fn condition_a_dominant_pivot() {
        // 2|z|^2 + conj(z)^2
        let g = symbol(2, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))]);
        let v = check_condition_a(&g).unwrap();
        assert_eq!(v.pivot, 1);
        assert_eq!(v.margin_a, 1.0);
        assert!(v.passes_a);

        // |z|^2 + conj(z)^2 fails every condition
        let g = symbol(2, &[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]);
        let v = check_condition_a(&g).unwrap();
        assert_eq!(v.pivot, 1);
        assert_eq!(v.margin_a, 0.0);
        assert!(!v.passes_a && !v.passes_b && !v.passes_c);

        // z^3 conj(z)
        let g = symbol(4, &[(1, c(1.0, 0.0))]);
        let v = check_condition_a(&g).unwrap();
        assert_eq!(v.pivot, 1);
        assert_eq!(v.margin_a, 1.0);
        assert!(v.passes_a);
        assert!(v.c_seq.is_empty());
        assert_eq!(v.margin_b, 1.0);
    }

    #[test]
    fn condition_a_rejects_odd_degree() {
        let g = symbol(3, &[(1, c(1.0, 0.0))]);
        assert_eq!(
            check_condition_a(&g).unwrap_err(),
            Error::OddSymbolDegree(3)
        );
    }

    #[test]
    fn condition_b_weaker_than_a() {
        // a_0 = 0.6i, a_1 = 1, a_2 = 0.6: A fails (1 > 1.2 is false) but
        // c_1 = 0.6 - 0.6i has |c_1| ~ 0.8485 < 1 so B passes.
        let g = symbol(2, &[(0, c(0.0, 0.6)), (1, c(1.0, 0.0)), (2, c(0.6, 0.0))]);
        let v = check_condition_b(&g, 1).unwrap();
        assert!(!v.passes_a);
        assert!(v.passes_b);
        assert_eq!(v.c_seq.len(), 1);
        assert!((v.c_seq[0].1 - c(0.6, -0.6)).norm() < 1e-15);
        assert!((v.margin_b - (1.0 - 0.6 * std::f64::consts::SQRT_2)).abs() < 1e-12);

        // boundary case: c_1 = 1 exactly
        let g = symbol(2, &[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]);
        let v = check_condition_b(&g, 1).unwrap();
        assert_eq!(v.margin_b, 0.0);
        assert!(!v.passes_b);
    }

    #[test]
    fn condition_b_rejects_vanishing_pivot() {
        let g = symbol(2, &[(2, c(0.5, 0.0))]);
        assert_eq!(
            check_condition_b(&g, 1).unwrap_err(),
            Error::PivotVanishes(1)
        );
    }

    #[test]
    fn condition_c_certified_margin() {
        // c_1 = 0.8: min Re(1 + 0.8 w) = 0.2; certified margin is the
        // coefficient bound 0.2 exactly here.
        let g = symbol(2, &[(1, c(1.0, 0.0)), (2, c(0.8, 0.0))]);
        let v = check_condition_c(&g, 1, 4096).unwrap();
        assert!(v.passes_c);
        assert!(v.margin_c >= 0.2 - std::f64::consts::PI / 4096.0 * 0.8);
        assert!((v.margin_c - 0.2).abs() < 1e-12);

        // c_1 = 1: Re(1 + w) touches 0 at w = -1, strict positivity fails
        let g = symbol(2, &[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]);
        let v = check_condition_c(&g, 1, 4096).unwrap();
        assert!(!v.passes_c);

        // empty sequence: margin 1
        let g = symbol(4, &[(1, c(1.0, 0.0))]);
        let v = check_condition_c(&g, 1, 4096).unwrap();
        assert_eq!(v.margin_c, 1.0);
    }

    #[test]
    fn no_admissible_pivot_is_reported() {
        // (1/2) conj(z)^2: support {2}, half degree 1
        let g = symbol(2, &[(2, c(0.5, 0.0))]);
        assert_eq!(
            check_condition_a(&g).unwrap_err(),
            Error::NoAdmissiblePivot { half_degree: 1 }
        );
    }

    #[test]
    fn certificate_fixtures() {
        // z^3 conj(z) -> alpha = i, p = -i z1^3 + i z2^3
        let g = symbol(4, &[(1, c(1.0, 0.0))]);
        let cert = build_certificate(&g, 1).unwrap();
        assert_eq!(cert.s_degree, 3);
        assert!((cert.alpha - c(0.0, 1.0)).norm() < 1e-15);
        assert!((cert.p.coeff(3, 0) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((cert.p.coeff(0, 3) - c(0.0, 1.0)).norm() < 1e-15);
        assert_eq!(cert.p.is_complex_symmetric().unwrap(), (true, 0.0));

        // i|z|^4 -> alpha = 1, p = z1 + z2
        let g = symbol(4, &[(2, c(0.0, 1.0))]);
        let cert = build_certificate(&g, 2).unwrap();
        assert_eq!(cert.s_degree, 1);
        assert!((cert.alpha - c(1.0, 0.0)).norm() < 1e-15);
        assert!((cert.p.coeff(1, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((cert.p.coeff(0, 1) - c(1.0, 0.0)).norm() < 1e-15);

        // 2|z|^2 + conj(z)^2 -> alpha = i, p = -i z1 + i z2
        let g = symbol(2, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))]);
        let cert = build_certificate(&g, 1).unwrap();
        assert_eq!(cert.s_degree, 1);
        assert!((cert.p.coeff(1, 0) - c(0.0, -1.0)).norm() < 1e-15);
        assert!((cert.p.coeff(0, 1) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn negative_pivot_certificate() {
        // (1/2) conj(z)^(-1) z^3: degree 2, pivot -1, certificate degree 5
        let g = symbol(2, &[(-1, c(0.5, 0.0))]);
        let v = check_condition_a(&g).unwrap();
        assert_eq!(v.pivot, -1);
        assert!(v.passes_a);
        let cert = build_certificate(&g, -1).unwrap();
        assert_eq!(cert.s_degree, 5);
        assert!((cert.alpha - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn margin_trace_constant_fixtures() {
        // (-i z1^3 + i z2^3, z^3 conj(z)): trace identically 3
        let p = BiPoly::from_terms([((3, 0), c(0.0, -1.0)), ((0, 3), c(0.0, 1.0))]);
        let g = symbol(4, &[(1, c(1.0, 0.0))]);
        let trace = margin_trace(&p, &g, 512).unwrap();
        for &v in &trace.values {
            assert!((v - 3.0).abs() < 1e-12);
        }
        assert!(trace.lipschitz < 1e-12);
        let (ok, certified) = check_strict_positivity(&trace);
        assert!(ok);
        assert!((certified - 3.0).abs() < 1e-12);

        // (z1 + z2, i|z|^4): trace identically 1
        let p = BiPoly::from_terms([((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))]);
        let g = symbol(4, &[(2, c(0.0, 1.0))]);
        let trace = margin_trace(&p, &g, 512).unwrap();
        for &v in &trace.values {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn margin_trace_oscillating_fixture() {
        // Scaled certificate -2i z1 + 2i z2 against 2|z|^2 + conj(z)^2:
        // trace 4 + 2 cos 2t, minimum 2.
        let p = BiPoly::from_terms([((1, 0), c(0.0, -2.0)), ((0, 1), c(0.0, 2.0))]);
        let g = symbol(2, &[(1, c(2.0, 0.0)), (2, c(1.0, 0.0))]);
        let trace = margin_trace(&p, &g, 4096).unwrap();
        for (j, &v) in trace.values.iter().enumerate() {
            let t = trace.thetas[j];
            assert!((v - (4.0 + 2.0 * (2.0 * t).cos())).abs() < 1e-12);
        }
        assert!((trace.min() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn strict_positivity_degenerate_and_failing() {
        let zero = MarginTrace::from_fn(256, 0.0, |_| 0.0);
        assert_eq!(check_strict_positivity(&zero), (false, 0.0));

        // |z|^2 + conj(z)^2 against its natural two-term polynomial: the
        // trace 2 + 2 cos 2t touches zero, so strictness fails.
        let p = BiPoly::from_terms([((1, 0), c(0.0, -1.0)), ((0, 1), c(0.0, 1.0))]);
        let g = symbol(2, &[(1, c(1.0, 0.0)), (2, c(1.0, 0.0))]);
        let trace = margin_trace(&p, &g, 4096).unwrap();
        let (ok, _) = check_strict_positivity(&trace);
        assert!(!ok);
    }

    #[test]
    fn verify_condition_positive_and_planted_failure() {
        // p = z1 + z2, g = i|z|^2: Im(z + conj(z) + i|z|^2 + R) = |z|^2 + Im R > 0
        let p = BiPoly::from_terms([((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))]);
        let g = symbol(2, &[(1, c(0.0, 1.0))]);
        let ev = verify_polynomial_condition(&p, &g, &standard_perturbations(), &[1e-1, 1e-2], 128);
        assert!(ev.is_clean(), "violations: {:?}", ev.violations.first());
        assert!(ev.min_plus > 0.0);
        assert!(ev.max_minus < 0.0);

        // planted failure: g = conj(z)^2 has a sign-changing trace
        let g = symbol(2, &[(2, c(1.0, 0.0))]);
        let ev = verify_polynomial_condition(&p, &g, &standard_perturbations(), &[1e-1, 1e-2], 128);
        assert!(!ev.is_clean());
        let v = &ev.violations[0];
        assert!(v.value <= 0.0 || !v.plus_branch);
    }

    #[test]
    fn combine_fixture_sine_squared() {
        let f0 = MarginTrace::from_fn(4096, 1.0, |t| t.sin().powi(2));
        let f1 = MarginTrace::from_fn(4096, 0.0, |_| 1.0);
        let out = combine_certificates(&f0, &f1, 1e-9, 1.0).unwrap();
        assert!((out.delta - 0.5).abs() < 1e-12);
        assert_eq!(out.neighborhood, vec![(0.0, std::f64::consts::TAU)]);
        assert!(out.epsilon.is_infinite());
        assert_eq!(out.lambda0, 1.0);
        assert!((out.verified_floor - 0.5).abs() < 1e-12);
    }

    #[test]
    fn combine_strict_regime() {
        let f0 = MarginTrace::from_fn(1024, 0.0, |_| 1.0);
        let f1 = MarginTrace::from_fn(1024, 0.0, |_| 1.0);
        let out = combine_certificates(&f0, &f1, 1e-9, 1.0).unwrap();
        assert_eq!(out.delta, 1.0);
        assert_eq!(out.lambda0, 1.0);
        assert!(out.verified_floor > 0.0);
    }

    #[test]
    fn combine_rejects_vanishing_second_trace() {
        let f0 = MarginTrace::from_fn(4096, 1.0, |t| t.sin().powi(2));
        let f1 = MarginTrace::from_fn(4096, 1.0, |t| 1.0 + t.cos());
        let err = combine_certificates(&f0, &f1, 1e-9, 1.0).unwrap_err();
        assert!(matches!(err, Error::SecondMarginNotPositive { .. }));
    }

    #[test]
    fn combine_rejects_negative_first_trace() {
        let f0 = MarginTrace::from_fn(512, 1.0, |t| t.sin());
        let f1 = MarginTrace::from_fn(512, 0.0, |_| 1.0);
        let err = combine_certificates(&f0, &f1, 1e-9, 1.0).unwrap_err();
        assert!(matches!(err, Error::FirstMarginNegative { .. }));
    }

    #[test]
    fn combine_rejects_mismatched_grids_and_bad_cap() {
        let f0 = MarginTrace::from_fn(512, 0.0, |_| 1.0);
        let f1 = MarginTrace::from_fn(256, 0.0, |_| 1.0);
        assert_eq!(
            combine_certificates(&f0, &f1, 1e-9, 1.0).unwrap_err(),
            Error::MismatchedTraces
        );
        let f1 = MarginTrace::from_fn(512, 0.0, |_| 1.0);
        assert!(matches!(
            combine_certificates(&f0, &f1, 1e-9, 0.0).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn condition_c_rejects_coarse_sampling() {
        let g = symbol(2, &[(1, c(1.0, 0.0))]);
        assert!(matches!(
            check_condition_c(&g, 1, 32).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn symbol_from_certificate_cubic() {
        let p = BiPoly::from_terms([((3, 0), c(0.0, -1.0)), ((0, 3), c(0.0, 1.0))]);
        let g = symbol_from_certificate(&p).unwrap();
        assert_eq!(g.degree(), 2);
        assert!((g.coeff(0) - c(3.0, 0.0)).norm() < 1e-15);
        // trace equals |dp/dz2|^2 = 9 on the circle
        let trace = margin_trace(&p, &g, 512).unwrap();
        for &v in &trace.values {
            assert!((v - 9.0).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_from_certificate_rejects_degree_one() {
        let p = BiPoly::from_terms([((1, 0), c(1.0, 0.0)), ((0, 1), c(1.0, 0.0))]);
        assert_eq!(
            symbol_from_certificate(&p).unwrap_err(),
            Error::CertificateDegreeTooSmall(1)
        );
    }

    #[test]
    fn derived_symbol_trace_is_squared_derivative() {
        // take a nontrivial complex-symmetric quintic
        let p = BiPoly::from_terms([
            ((5, 0), c(0.3, -0.4)),
            ((0, 5), c(0.3, 0.4)),
            ((3, 2), c(0.1, 0.2)),
            ((2, 3), c(0.1, -0.2)),
        ]);
        assert!(p.is_complex_symmetric().unwrap().0);
        let g = symbol_from_certificate(&p).unwrap();
        let trace = margin_trace(&p, &g, 1024).unwrap();
        let dp = p.d_zeta2();
        for (j, &v) in trace.values.iter().enumerate() {
            let z = Complex64::cis(trace.thetas[j]);
            let want = dp.eval(z, z.conj()).norm_sqr();
            assert!((v - want).abs() < 1e-11);
            assert!(v >= -1e-12);
        }
    }
}
