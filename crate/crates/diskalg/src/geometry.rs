//! Disk sampling, the four preimage sheets under coordinate squaring, the
//! triangular shear map and its Newton inverse, residual extraction on the
//! straightened sheets, and sign probes for the gluing criterion.

use num_complex::Complex64;
use serde::Serialize;

use crate::bipoly::BiPoly;
use crate::error::Error;
use crate::mixed::MixedPoly;
use crate::symbol::HomogeneousSymbol;

/// Declared decay class of the small perturbation `h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SmallnessClass {
    /// h = o(g)
    OfG,
    /// h = o(z^2 g)
    OfZSquaredG,
}

#[derive(Clone, Debug)]
pub enum SmallTerm {
    Mixed(MixedPoly),
    Symbol(HomogeneousSymbol),
}

impl SmallTerm {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            SmallTerm::Mixed(h) => h.eval(z),
            SmallTerm::Symbol(h) => h.eval(z),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SmallPerturbation {
    pub term: SmallTerm,
    pub class: SmallnessClass,
}

/// A generator `w(z) = conj(z) + F(z, conj(z)) + g(z) + h(z)` for the second
/// coordinate, or a direct replacement `v(z)` for `w(z)^2`.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    radius: f64,
    shear: BiPoly,
    symbol: HomogeneousSymbol,
    perturbation: Option<SmallPerturbation>,
    direct: Option<MixedPoly>,
}

impl GeneratorSpec {
    /// `shear` is the holomorphic F, required odd with lowest total degree
    /// at least 3 (the zero polynomial is admissible).
    pub fn new(
        radius: f64,
        shear: BiPoly,
        symbol: HomogeneousSymbol,
        perturbation: Option<SmallPerturbation>,
        direct: Option<MixedPoly>,
    ) -> Result<Self, Error> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidParameter("radius must be positive"));
        }
        if !shear.is_zero() && (!shear.is_odd() || shear.min_total_degree() < Some(3)) {
            return Err(Error::ShearNotAdmissible);
        }
        Ok(Self {
            radius,
            shear,
            symbol,
            perturbation,
            direct,
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn shear(&self) -> &BiPoly {
        &self.shear
    }

    pub fn symbol(&self) -> &HomogeneousSymbol {
        &self.symbol
    }

    pub fn perturbation(&self) -> Option<&SmallPerturbation> {
        self.perturbation.as_ref()
    }

    pub fn direct(&self) -> Option<&MixedPoly> {
        self.direct.as_ref()
    }

    pub fn has_direct(&self) -> bool {
        self.direct.is_some()
    }

    fn h_eval(&self, z: Complex64) -> Complex64 {
        self.perturbation
            .as_ref()
            .map_or(Complex64::new(0.0, 0.0), |p| p.term.eval(z))
    }

    /// `w(z) = conj(z) + F(z, conj(z)) + g(z) + h(z)`.
    pub fn w(&self, z: Complex64) -> Complex64 {
        z.conj() + self.shear.eval(z, z.conj()) + self.symbol.eval(z) + self.h_eval(z)
    }

    /// Second generator: the direct `v(z)` when declared, else `w(z)^2`.
    pub fn second_generator(&self, z: Complex64) -> Complex64 {
        match &self.direct {
            Some(v) => v.eval(z),
            None => {
                let w = self.w(z);
                w * w
            }
        }
    }

    /// Second parametrization of the opposite sheet:
    /// `conj(z) + f(z) - g(z) - h(-z)` (valid since F is odd, g even).
    pub fn w_minus(&self, z: Complex64) -> Complex64 {
        z.conj() + self.shear.eval(z, z.conj()) - self.symbol.eval(z) - self.h_eval(-z)
    }
}

/// Polar grid `{(j/n_r) r e^{2 pi i k / n_theta}}` plus the origin, origin
/// first, radii ascending, angles ascending.
pub fn sample_disk(radius: f64, n_r: usize, n_theta: usize) -> Vec<Complex64> {
    let mut points = Vec::with_capacity(n_r * n_theta + 1);
    points.push(Complex64::new(0.0, 0.0));
    let step = std::f64::consts::TAU / n_theta as f64;
    for j in 1..=n_r {
        let r = radius * j as f64 / n_r as f64;
        for k in 0..n_theta {
            points.push(r * Complex64::cis(step * k as f64));
        }
    }
    points
}

/// Sampled generator values over a point set.
#[derive(Clone, Debug)]
pub struct DiskSample {
    pub points: Vec<Complex64>,
    pub values: Vec<Complex64>,
}

impl DiskSample {
    pub fn of_w(spec: &GeneratorSpec, points: &[Complex64]) -> Self {
        Self {
            points: points.to_vec(),
            values: points.iter().map(|&z| spec.w(z)).collect(),
        }
    }

    pub fn of_second_generator(spec: &GeneratorSpec, points: &[Complex64]) -> Self {
        Self {
            points: points.to_vec(),
            values: points.iter().map(|&z| spec.second_generator(z)).collect(),
        }
    }
}

/// The four preimage sheets of `(z^2, w^2)` under coordinate squaring:
/// `D1 = (z, w(z))`, `D2 = (-z, -w(z))`, `D3 = (-z, w(z))`, `D4 = (z, -w(z))`.
pub fn four_disks(spec: &GeneratorSpec, points: &[Complex64]) -> Result<[Sheet; 4], Error> {
    if spec.has_direct() {
        return Err(Error::DirectGeneratorHasNoSheets);
    }
    let mut d1 = Vec::with_capacity(points.len());
    let mut d2 = Vec::with_capacity(points.len());
    let mut d3 = Vec::with_capacity(points.len());
    let mut d4 = Vec::with_capacity(points.len());
    for &z in points {
        let w = spec.w(z);
        d1.push((z, w));
        d2.push((-z, -w));
        d3.push((-z, w));
        d4.push((z, -w));
    }
    Ok([d1, d2, d3, d4])
}

/// Separation evidence: the two generators may only identify z with -z, so
/// for each sampled z != 0 the second generator must split the pair. The gap
/// `|v(z) - v(-z)|` is normalized by `|z|^kappa` with kappa the decay order
/// of the gap (1 + deg g in squared form, the lowest odd degree of v in
/// direct form), making the threshold radius-independent.
#[derive(Clone, Debug, Serialize)]
pub struct SeparationReport {
    pub min_normalized_gap: f64,
    pub exponent: f64,
    pub worst_z: Option<Complex64>,
    pub violations: Vec<Complex64>,
    pub checked: usize,
}

impl SeparationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.checked > 0
    }
}

pub fn separation_check(spec: &GeneratorSpec, points: &[Complex64], tol: f64) -> SeparationReport {
    let kappa = match spec.direct() {
        Some(v) => v.min_odd_degree().unwrap_or(0) as f64,
        None => 1.0 + spec.symbol().degree() as f64,
    };
    let mut report = SeparationReport {
        min_normalized_gap: f64::INFINITY,
        exponent: kappa,
        worst_z: None,
        violations: Vec::new(),
        checked: 0,
    };
    for &z in points {
        if z.re == 0.0 && z.im == 0.0 {
            continue;
        }
        let gap = (spec.second_generator(z) - spec.second_generator(-z)).norm();
        let normalized = gap / z.norm().powf(kappa);
        report.checked += 1;
        if normalized < report.min_normalized_gap {
            report.min_normalized_gap = normalized;
            report.worst_z = Some(z);
        }
        if normalized < tol {
            report.violations.push(z);
        }
    }
    report
}

/// The triangular shear `(w1, w2) -> (w1, w2 + F(w1, w2))`.
pub fn apply_shear(f: &BiPoly, w1: Complex64, w2: Complex64) -> (Complex64, Complex64) {
    (w1, w2 + f.eval(w1, w2))
}

/// Largest radius rho with `sum_k k |c_jk| rho^(j+k-1) <= 1/2`, so the shear
/// is a certified contraction in its second slot on the bi-disk of that
/// radius. Infinite when F does not involve the second variable.
pub fn contraction_radius(f: &BiPoly) -> f64 {
    let bound = |rho: f64| -> f64 {
        f.terms()
            .filter(|&((_, k), _)| k >= 1)
            .map(|((j, k), c)| k as f64 * c.norm() * rho.powi((j + k) as i32 - 1))
            .sum()
    };
    if f.terms().all(|((_, k), _)| k == 0) {
        return f64::INFINITY;
    }
    let mut hi = 1.0_f64;
    if bound(hi) <= 0.5 {
        while bound(hi) <= 0.5 {
            hi *= 2.0;
            if hi > 1e12 {
                return f64::INFINITY;
            }
        }
    }
    let mut lo = 0.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) <= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Solves `w2 + F(z1, w2) = z2` for w2 by Newton iteration seeded at z2.
/// The point must lie in the certified contraction region.
pub fn invert_shear(
    f: &BiPoly,
    z1: Complex64,
    z2: Complex64,
    tol: f64,
    max_iter: usize,
) -> Result<Complex64, Error> {
    let rho = contraction_radius(f);
    if z1.norm().max(z2.norm()) > rho {
        return Err(Error::OutsideInversionRegion {
            z1,
            z2,
            radius: rho,
        });
    }
    let df = f.d_zeta2();
    let mut w = z2;
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        let value = w + f.eval(z1, w) - z2;
        residual = value.norm();
        if residual <= tol {
            return Ok(w);
        }
        let derivative = Complex64::new(1.0, 0.0) + df.eval(z1, w);
        w -= value / derivative;
    }
    // accept a final iterate that already meets the tolerance
    let value = w + f.eval(z1, w) - z2;
    if value.norm() <= tol {
        return Ok(w);
    }
    Err(Error::InversionDiverged { max_iter, residual })
}

/// A sampled sheet in two complex coordinates.
pub type Sheet = Vec<(Complex64, Complex64)>;

/// Straightened sheets: applies the inverse shear to both parametrized
/// sheets, yielding points `(z, conj(z) + g + R1)` and `(z, conj(z) - g + R2)`.
pub fn straightened_sheets(
    spec: &GeneratorSpec,
    points: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<(Sheet, Sheet), Error> {
    if spec.has_direct() {
        return Err(Error::DirectGeneratorHasNoSheets);
    }
    let mut e1 = Vec::with_capacity(points.len());
    let mut e2 = Vec::with_capacity(points.len());
    for &z in points {
        let w1 = invert_shear(spec.shear(), z, spec.w(z), tol, max_iter)?;
        e1.push((z, w1));
        let w2 = invert_shear(spec.shear(), z, spec.w_minus(z), tol, max_iter)?;
        e2.push((z, w2));
    }
    Ok((e1, e2))
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualRow {
    pub radius: f64,
    /// max |R1| / |g| over the circle of this radius.
    pub ratio_plus: f64,
    /// max |R2| / |g| over the circle.
    pub ratio_minus: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualTable {
    pub rows: Vec<ResidualRow>,
}

/// Extracts the straightening residuals `R1 = H(D1).2 - conj(z) - g(z)` and
/// `R2 = H(D2).2 - conj(z) + g(z)` on circles of the given radii and reports
/// the worst ratios against |g|.
pub fn residual_trace(
    spec: &GeneratorSpec,
    radii: &[f64],
    n_theta: usize,
    tol: f64,
    max_iter: usize,
) -> Result<ResidualTable, Error> {
    let mut rows = Vec::with_capacity(radii.len());
    let step = std::f64::consts::TAU / n_theta as f64;
    for &r in radii {
        let mut ratio_plus = 0.0_f64;
        let mut ratio_minus = 0.0_f64;
        for j in 0..n_theta {
            let z = r * Complex64::cis(step * j as f64);
            let g = spec.symbol().eval(z);
            if g.norm() == 0.0 {
                return Err(Error::VanishingSecondGenerator(z));
            }
            let w1 = invert_shear(spec.shear(), z, spec.w(z), tol, max_iter)?;
            let r1 = w1 - z.conj() - g;
            ratio_plus = ratio_plus.max(r1.norm() / g.norm());
            let w2 = invert_shear(spec.shear(), z, spec.w_minus(z), tol, max_iter)?;
            let r2 = w2 - z.conj() + g;
            ratio_minus = ratio_minus.max(r2.norm() / g.norm());
        }
        rows.push(ResidualRow {
            radius: r,
            ratio_plus,
            ratio_minus,
        });
    }
    Ok(ResidualTable { rows })
}

#[derive(Clone, Debug, Serialize)]
pub struct KallinViolation {
    pub point: (Complex64, Complex64),
    pub value: f64,
    pub first_set: bool,
}

/// Sign probe for the gluing criterion: the polynomial must push the first
/// set strictly into the half-plane `e^{i phi} {Im > 0}` and the second into
/// its opposite, meeting only at 0. Values are compared against
/// `tol * |z1|^scale_exponent`; origin points are exempt from the strict
/// sign but must be the only zeros of the probe.
#[derive(Clone, Debug, Serialize)]
pub struct KallinReport {
    pub min_set1: f64,
    pub max_set2: f64,
    pub violations: Vec<KallinViolation>,
    pub origin_zeros: usize,
    pub spurious_zeros: Vec<(Complex64, Complex64)>,
    pub checked: usize,
}

impl KallinReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.spurious_zeros.is_empty() && self.checked > 0
    }
}

pub fn kallin_probe(
    p: &BiPoly,
    set1: &[(Complex64, Complex64)],
    set2: &[(Complex64, Complex64)],
    phi: f64,
    tol: f64,
    scale_exponent: f64,
) -> KallinReport {
    let rotation = Complex64::cis(-phi);
    let mut report = KallinReport {
        min_set1: f64::INFINITY,
        max_set2: f64::NEG_INFINITY,
        violations: Vec::new(),
        origin_zeros: 0,
        spurious_zeros: Vec::new(),
        checked: 0,
    };
    let mut probe = |points: &[(Complex64, Complex64)], first: bool| {
        for &(z1, z2) in points {
            let value = p.eval(z1, z2);
            if value.norm() == 0.0 {
                if z1.norm() == 0.0 && z2.norm() == 0.0 {
                    report.origin_zeros += 1;
                } else {
                    report.spurious_zeros.push((z1, z2));
                }
            }
            if z1.norm() == 0.0 && z2.norm() == 0.0 {
                continue;
            }
            let rotated = (rotation * value).im;
            let scale = z1.norm().powf(scale_exponent);
            let normalized = if scale > 0.0 {
                rotated / scale
            } else {
                rotated
            };
            report.checked += 1;
            if first {
                report.min_set1 = report.min_set1.min(normalized);
                if normalized <= tol {
                    report.violations.push(KallinViolation {
                        point: (z1, z2),
                        value: normalized,
                        first_set: true,
                    });
                }
            } else {
                report.max_set2 = report.max_set2.max(normalized);
                if normalized >= -tol {
                    report.violations.push(KallinViolation {
                        point: (z1, z2),
                        value: normalized,
                        first_set: false,
                    });
                }
            }
        }
    };
    probe(set1, true);
    probe(set2, false);
    report
}

/// Pointwise transform of a second generator: `z -> (w(z) + F(z, w(z)))^2`.
/// F must be odd with lowest total degree at least 3.
pub fn transform_generator<'a>(
    w: impl Fn(Complex64) -> Complex64 + 'a,
    f: &'a BiPoly,
) -> Result<impl Fn(Complex64) -> Complex64 + 'a, Error> {
    if !f.is_zero() && (!f.is_odd() || f.min_total_degree() < Some(3)) {
        return Err(Error::ShearNotAdmissible);
    }
    Ok(move |z: Complex64| {
        let wz = w(z);
        let t = wz + f.eval(z, wz);
        t * t
    })
}

/// For a factor perturbation `w -> w (1 + G(z^2, w^2))` the squared generator
/// is `w^2 (1 + H(z^2, w^2))` with `H = 2G + G^2`; requires `G(0,0) = 0`.
pub fn rewrite_even_perturbation(factor: &BiPoly) -> Result<BiPoly, Error> {
    let constant = factor.coeff(0, 0);
    if constant.re != 0.0 || constant.im != 0.0 {
        return Err(Error::ConstantTermNotZero);
    }
    Ok(&factor.scale(Complex64::new(2.0, 0.0)) + &(factor * factor))
}

/// Ratio evidence for the declared decay class of h: `|h| / |g|` or
/// `|h| / |z^2 g|` maxima per radius, which must decrease toward 0.
#[derive(Clone, Debug, Serialize)]
pub struct SmallnessReport {
    pub class: SmallnessClass,
    pub rows: Vec<(f64, f64)>,
    pub decreasing: bool,
}

pub fn validate_smallness(
    spec: &GeneratorSpec,
    radii: &[f64],
    n_theta: usize,
) -> Option<SmallnessReport> {
    let perturbation = spec.perturbation()?;
    let step = std::f64::consts::TAU / n_theta as f64;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut worst = 0.0_f64;
        for j in 0..n_theta {
            let z = r * Complex64::cis(step * j as f64);
            let h = perturbation.term.eval(z).norm();
            let g = spec.symbol().eval(z).norm();
            let denom = match perturbation.class {
                SmallnessClass::OfG => g,
                SmallnessClass::OfZSquaredG => z.norm_sqr() * g,
            };
            if denom > 0.0 {
                worst = worst.max(h / denom);
            }
        }
        rows.push((r, worst));
    }
    let decreasing = rows.windows(2).all(|pair| {
        let (r0, v0) = pair[0];
        let (r1, v1) = pair[1];
        if r1 < r0 {
            v1 <= v0
        } else {
            v0 <= v1
        }
    });
    Some(SmallnessReport {
        class: perturbation.class,
        rows,
        decreasing,
    })
}
