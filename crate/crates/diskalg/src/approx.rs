//! Least-squares and minimax fitting of continuous targets by polynomials in
//! the two generators `z^2` and `v(z)`, with sup-norm residuals measured on a
//! denser validation grid.
//!
//! Columns are `(z^2)^j v^k` for `j + k <= N` in graded order, each scaled to
//! unit max magnitude before the Hermitian normal system is formed; powers of
//! radius-0.1 quantities would otherwise sink the conditioning. All loops run
//! in a fixed order so reports reproduce bit-for-bit.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::geometry::sample_disk;
use crate::power::powu;

/// Named targets paired with their evaluators, as consumed by
/// [`convergence_study`].
pub type TargetList = Vec<(String, Box<dyn Fn(Complex64) -> Complex64>)>;

/// Default training grid; validation doubles both counts.
pub const DEFAULT_TRAIN_NR: usize = 12;
pub const DEFAULT_TRAIN_NTHETA: usize = 48;
pub const DEFAULT_RIDGE: f64 = 1e-12;

/// Column evaluations of `(z^2)^j v^k`, `j + k <= degree`, on the training
/// points, equilibrated to unit max magnitude per column.
#[derive(Clone, Debug)]
pub struct Basis {
    pub degree: usize,
    /// (j, k) per column: degree-ascending, then j descending.
    pub powers: Vec<(usize, usize)>,
    /// Max magnitude each raw column was divided by; always > 0.
    pub scales: Vec<f64>,
    pub points: Vec<Complex64>,
    /// Column-major scaled evaluations.
    pub columns: Vec<Vec<Complex64>>,
}

fn graded_powers(degree: usize) -> Vec<(usize, usize)> {
    let mut powers = Vec::with_capacity((degree + 1) * (degree + 2) / 2);
    for d in 0..=degree {
        for k in 0..=d {
            powers.push((d - k, k));
        }
    }
    powers
}

fn raw_column(points: &[Complex64], v_values: &[Complex64], j: usize, k: usize) -> Vec<Complex64> {
    points
        .iter()
        .zip(v_values)
        .map(|(&z, &v)| powu(z * z, j as u32) * powu(v, k as u32))
        .collect()
}

pub fn build_basis(
    v: &dyn Fn(Complex64) -> Complex64,
    points: &[Complex64],
    degree: usize,
) -> Basis {
    let v_values: Vec<Complex64> = points.iter().map(|&z| v(z)).collect();
    let powers = graded_powers(degree);
    let mut scales = Vec::with_capacity(powers.len());
    let mut columns = Vec::with_capacity(powers.len());
    for &(j, k) in &powers {
        let mut column = raw_column(points, &v_values, j, k);
        let mut max = 0.0_f64;
        for value in &column {
            max = max.max(value.norm());
        }
        let scale = if max > 0.0 { max } else { 1.0 };
        for value in &mut column {
            *value /= scale;
        }
        scales.push(scale);
        columns.push(column);
    }
    Basis {
        degree,
        powers,
        scales,
        points: points.to_vec(),
        columns,
    }
}

impl Basis {
    pub fn num_columns(&self) -> usize {
        self.powers.len()
    }

    /// Scaled column values at an arbitrary point.
    pub fn columns_at(&self, v: &dyn Fn(Complex64) -> Complex64, z: Complex64) -> Vec<Complex64> {
        let vz = v(z);
        self.powers
            .iter()
            .zip(&self.scales)
            .map(|(&(j, k), &s)| powu(z * z, j as u32) * powu(vz, k as u32) / s)
            .collect()
    }
}

/// Fit outcome in the equilibrated basis.
#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub degree: usize,
    /// sqrt of the summed squared training residuals.
    pub training_l2: f64,
    pub training_sup: f64,
    /// Rough conditioning indicator of the normal system,
    /// (max diag / min diag)^2 of its Cholesky factor.
    pub condition: f64,
    pub coefficients: Vec<Complex64>,
    /// Set when an iterative refinement stopped on degenerate weights.
    pub weight_collapse: bool,
}

/// Cholesky factorization of a Hermitian positive definite matrix stored
/// row-major, followed by the two triangular solves. Fails on a
/// non-positive pivot.
fn cholesky_solve(gram: &mut [Complex64], rhs: &mut [Complex64], n: usize) -> Result<f64, Error> {
    let mut min_diag = f64::INFINITY;
    let mut max_diag = 0.0_f64;
    for j in 0..n {
        let mut diag = gram[j * n + j].re;
        for k in 0..j {
            diag -= gram[j * n + k].norm_sqr();
        }
        if !diag.is_finite() || diag <= 0.0 {
            return Err(Error::RankDeficient);
        }
        let l_jj = diag.sqrt();
        min_diag = min_diag.min(l_jj);
        max_diag = max_diag.max(l_jj);
        gram[j * n + j] = Complex64::new(l_jj, 0.0);
        for i in (j + 1)..n {
            let mut value = gram[i * n + j];
            for k in 0..j {
                value -= gram[i * n + k] * gram[j * n + k].conj();
            }
            gram[i * n + j] = value / l_jj;
        }
    }
    // forward solve L y = rhs
    for i in 0..n {
        let mut value = rhs[i];
        for k in 0..i {
            value -= gram[i * n + k] * rhs[k];
        }
        rhs[i] = value / gram[i * n + i].re;
    }
    // backward solve L^H x = y
    for i in (0..n).rev() {
        let mut value = rhs[i];
        for k in (i + 1)..n {
            value -= gram[k * n + i].conj() * rhs[k];
        }
        rhs[i] = value / gram[i * n + i].re;
    }
    let ratio = max_diag / min_diag;
    Ok(ratio * ratio)
}

fn weighted_fit(
    basis: &Basis,
    target: &[Complex64],
    weights: &[f64],
    ridge: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>, f64), Error> {
    let n = basis.num_columns();
    let m = basis.points.len();
    if m < n {
        return Err(Error::InsufficientSamples {
            samples: m,
            columns: n,
        });
    }
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];
    for c1 in 0..n {
        for c2 in 0..=c1 {
            let mut acc = Complex64::new(0.0, 0.0);
            for ((&w, a), b) in weights
                .iter()
                .zip(&basis.columns[c1])
                .zip(&basis.columns[c2])
            {
                acc += w * a.conj() * b;
            }
            gram[c1 * n + c2] = acc;
            gram[c2 * n + c1] = acc.conj();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&w, a), t) in weights.iter().zip(&basis.columns[c1]).zip(target) {
            acc += w * a.conj() * t;
        }
        rhs[c1] = acc;
    }
    for c in 0..n {
        gram[c * n + c] += ridge;
    }
    let condition = cholesky_solve(&mut gram, &mut rhs, n)?;
    let coefficients = rhs;
    let residuals: Vec<Complex64> = (0..m)
        .map(|i| {
            let mut fitted = Complex64::new(0.0, 0.0);
            for (coefficient, column) in coefficients.iter().zip(&basis.columns) {
                fitted += coefficient * column[i];
            }
            target[i] - fitted
        })
        .collect();
    Ok((coefficients, residuals, condition))
}

fn report_from(
    degree: usize,
    coefficients: Vec<Complex64>,
    residuals: &[Complex64],
    condition: f64,
    weight_collapse: bool,
) -> FitReport {
    let l2 = residuals.iter().map(|r| r.norm_sqr()).sum::<f64>().sqrt();
    let sup = residuals.iter().fold(0.0_f64, |m, r| m.max(r.norm()));
    FitReport {
        degree,
        training_l2: l2,
        training_sup: sup,
        condition,
        coefficients,
        weight_collapse,
    }
}

/// Ridge-regularized least squares via the Hermitian normal system.
pub fn least_squares_fit(
    basis: &Basis,
    target: &[Complex64],
    ridge: f64,
) -> Result<FitReport, Error> {
    let weights = vec![1.0; basis.points.len()];
    let (coefficients, residuals, condition) = weighted_fit(basis, target, &weights, ridge)?;
    Ok(report_from(
        basis.degree,
        coefficients,
        &residuals,
        condition,
        false,
    ))
}

/// Iteratively reweighted refinement toward the minimax fit: weights scale
/// with the previous residual magnitudes. Returns the iterate with the best
/// training sup residual seen, so the result is never worse than the plain
/// fit. Degenerate weights stop early with `weight_collapse` set.
pub fn lawson_refine(
    basis: &Basis,
    target: &[Complex64],
    ridge: f64,
    iters: usize,
) -> Result<FitReport, Error> {
    if iters == 0 {
        return Err(Error::InvalidParameter("need at least one iteration"));
    }
    let m = basis.points.len();
    let mut weights = vec![1.0_f64; m];
    let mut best: Option<FitReport> = None;
    let mut collapse = false;
    for _ in 0..iters {
        let (coefficients, residuals, condition) = weighted_fit(basis, target, &weights, ridge)?;
        let report = report_from(basis.degree, coefficients, &residuals, condition, false);
        let improved = best
            .as_ref()
            .is_none_or(|b| report.training_sup < b.training_sup);
        if improved {
            best = Some(report);
        }
        let mut total = 0.0_f64;
        for (w, r) in weights.iter_mut().zip(&residuals) {
            *w *= r.norm();
            total += *w;
        }
        if !total.is_finite() || total <= 0.0 {
            collapse = true;
            break;
        }
        let normalize = m as f64 / total;
        for w in &mut weights {
            *w *= normalize;
        }
    }
    let mut best = best.expect("at least one iteration ran");
    best.weight_collapse = collapse;
    Ok(best)
}

/// Max residual of a fitted model over an arbitrary point set.
pub fn sup_residual(
    basis: &Basis,
    coefficients: &[Complex64],
    v: &dyn Fn(Complex64) -> Complex64,
    points: &[Complex64],
    target: &dyn Fn(Complex64) -> Complex64,
) -> f64 {
    let mut sup = 0.0_f64;
    for &z in points {
        let cols = basis.columns_at(v, z);
        let mut fitted = Complex64::new(0.0, 0.0);
        for (c, col) in coefficients.iter().zip(&cols) {
            fitted += c * col;
        }
        sup = sup.max((target(z) - fitted).norm());
    }
    sup
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRow {
    pub target: String,
    pub degree: usize,
    pub training_l2: f64,
    pub sup_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Per target: sup residual non-increasing in the degree (1e-12 slack).
    pub monotone: Vec<(String, bool)>,
}

impl ConvergenceTable {
    pub fn final_residual(&self, target: &str) -> Option<f64> {
        self.rows
            .iter()
            .rev()
            .find(|r| r.target == target)
            .map(|r| r.sup_residual)
    }
}

/// Fits every target at every degree on the training grid and measures sup
/// residuals on a validation grid twice as dense in both directions.
pub fn convergence_study(
    v: &dyn Fn(Complex64) -> Complex64,
    radius: f64,
    n_r: usize,
    n_theta: usize,
    degrees: &[usize],
    targets: &TargetList,
    ridge: f64,
) -> Result<ConvergenceTable, Error> {
    let training = sample_disk(radius, n_r, n_theta);
    let validation = sample_disk(radius, 2 * n_r, 2 * n_theta);
    let mut rows = Vec::new();
    let mut monotone = Vec::new();
    for (name, target) in targets {
        let target_values: Vec<Complex64> = training.iter().map(|&z| target(z)).collect();
        let mut previous = f64::INFINITY;
        let mut non_increasing = true;
        for &degree in degrees {
            let basis = build_basis(v, &training, degree);
            let fit = least_squares_fit(&basis, &target_values, ridge)?;
            let sup = sup_residual(&basis, &fit.coefficients, v, &validation, target.as_ref());
            if sup > previous + 1e-12 {
                non_increasing = false;
            }
            previous = sup;
            rows.push(ConvergenceRow {
                target: name.clone(),
                degree,
                training_l2: fit.training_l2,
                sup_residual: sup,
            });
        }
        monotone.push((name.clone(), non_increasing));
    }
    Ok(ConvergenceTable { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// v = (conj(z) + i|z|^2)^2
    fn squared_generator(z: Complex64) -> Complex64 {
        let w = z.conj() + Complex64::new(0.0, 1.0) * z * z.conj();
        w * w
    }

    #[test]
    fn column_counts_and_order() {
        assert_eq!(graded_powers(0), vec![(0, 0)]);
        assert_eq!(graded_powers(1), vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(graded_powers(8).len(), 45);

        let points = sample_disk(0.1, 4, 16);
        let basis = build_basis(&squared_generator, &points, 1);
        assert_eq!(basis.num_columns(), 3);
        assert!(basis.scales.iter().all(|&s| s > 0.0));
        // constant column scales to 1 exactly
        assert_eq!(basis.scales[0], 1.0);
    }

    #[test]
    fn exact_targets_fit_to_machine_precision() {
        let points = sample_disk(0.1, 8, 32);
        let validation = sample_disk(0.1, 16, 64);
        let basis = build_basis(&squared_generator, &points, 1);

        for (target, name) in [
            (
                Box::new(|z: Complex64| z * z) as Box<dyn Fn(Complex64) -> Complex64>,
                "z^2",
            ),
            (Box::new(squared_generator), "v"),
        ] {
            let values: Vec<Complex64> = points.iter().map(|&z| target(z)).collect();
            let fit = least_squares_fit(&basis, &values, 0.0).unwrap();
            let sup = sup_residual(
                &basis,
                &fit.coefficients,
                &squared_generator,
                &validation,
                target.as_ref(),
            );
            assert!(sup <= 1e-12, "{name}: sup {sup:e}");
        }
    }

    #[test]
    fn residual_orthogonal_to_columns_without_ridge() {
        let points = sample_disk(0.1, 8, 32);
        let basis = build_basis(&squared_generator, &points, 3);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        let weights = vec![1.0; points.len()];
        let (_, residuals, _) = weighted_fit(&basis, &values, &weights, 0.0).unwrap();
        let scale: f64 = values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for column in &basis.columns {
            let inner: Complex64 = column
                .iter()
                .zip(&residuals)
                .map(|(c, r)| c.conj() * r)
                .sum();
            assert!(inner.norm() <= 1e-8 * scale.max(1.0));
        }
    }

    #[test]
    fn nesting_training_l2_non_increasing() {
        let points = sample_disk(0.1, 8, 32);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        let mut previous = f64::INFINITY;
        for degree in [0, 1, 2, 3, 4] {
            let basis = build_basis(&squared_generator, &points, degree);
            let fit = least_squares_fit(&basis, &values, 0.0).unwrap();
            assert!(fit.training_l2 <= previous + 1e-12);
            previous = fit.training_l2;
        }
    }

    #[test]
    fn lawson_never_worse_and_single_iteration_is_plain() {
        let points = sample_disk(0.1, 8, 32);
        let basis = build_basis(&squared_generator, &points, 3);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        let plain = least_squares_fit(&basis, &values, DEFAULT_RIDGE).unwrap();
        let one = lawson_refine(&basis, &values, DEFAULT_RIDGE, 1).unwrap();
        assert_eq!(one.training_sup, plain.training_sup);
        let refined = lawson_refine(&basis, &values, DEFAULT_RIDGE, 10).unwrap();
        assert!(refined.training_sup <= plain.training_sup + 1e-12);

        // an exactly representable target stays at machine precision and
        // collapses the weights
        let exact: Vec<Complex64> = points.iter().map(|&z| z * z).collect();
        let refined = lawson_refine(&basis, &exact, 0.0, 5).unwrap();
        assert!(refined.training_sup <= 1e-12);
    }

    #[test]
    fn equilibration_does_not_change_fitted_values() {
        let points = sample_disk(0.1, 8, 32);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        let basis = build_basis(&squared_generator, &points, 3);
        let fit = least_squares_fit(&basis, &values, 0.0).unwrap();

        // undo the equilibration by hand: coefficients migrate by the scale,
        // fitted values stay put
        let mut raw = basis.clone();
        for (column, &scale) in raw.columns.iter_mut().zip(&basis.scales) {
            for value in column.iter_mut() {
                *value *= scale;
            }
        }
        for scale in raw.scales.iter_mut() {
            *scale = 1.0;
        }
        let raw_fit = least_squares_fit(&raw, &values, 0.0).unwrap();
        for i in 0..points.len() {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = Complex64::new(0.0, 0.0);
            for column in 0..basis.num_columns() {
                a += fit.coefficients[column] * basis.columns[column][i];
                b += raw_fit.coefficients[column] * raw.columns[column][i];
            }
            assert!((a - b).norm() <= 1e-10);
        }
    }

    #[test]
    fn even_generator_obstruction_lower_bound() {
        // v = conj(z)^2 is even, z^2 is even: every basis function is even,
        // so any odd target keeps half its asymmetry as residual.
        let even_v = |z: Complex64| z.conj() * z.conj();
        let radius = 0.1;
        let training = sample_disk(radius, 8, 32);
        let validation = sample_disk(radius, 16, 64);
        let basis = build_basis(&even_v, &training, 4);
        let target = |z: Complex64| z.conj();
        let values: Vec<Complex64> = training.iter().map(|&z| target(z)).collect();
        let fit = least_squares_fit(&basis, &values, DEFAULT_RIDGE).unwrap();
        let sup = sup_residual(&basis, &fit.coefficients, &even_v, &validation, &target);
        // the validation grid nests the training grid
        assert!(sup >= fit.training_sup - 1e-12);
        let mut asymmetry = 0.0_f64;
        for &z in &validation {
            asymmetry = asymmetry.max((target(z) - target(-z)).norm());
        }
        assert!(sup >= 0.5 * asymmetry - 1e-9);
        assert!((0.5 * asymmetry - radius).abs() < 1e-12);
    }

    #[test]
    fn rank_deficiency_is_reported() {
        // duplicate every point so the 0.0-ridge system with more columns
        // than distinct points breaks down
        let z = c(0.05, 0.0);
        let points = vec![z; 16];
        let basis = build_basis(&squared_generator, &points, 2);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        assert_eq!(
            least_squares_fit(&basis, &values, 0.0).unwrap_err(),
            Error::RankDeficient
        );
    }

    #[test]
    fn convergence_study_is_deterministic() {
        let targets = || -> TargetList {
            vec![
                (
                    "conj_z".to_string(),
                    Box::new(|z: Complex64| z.conj()) as Box<dyn Fn(Complex64) -> Complex64>,
                ),
                (
                    "z_sq".to_string(),
                    Box::new(|z: Complex64| z * z) as Box<dyn Fn(Complex64) -> Complex64>,
                ),
            ]
        };
        let a =
            convergence_study(&squared_generator, 0.1, 6, 24, &[2, 4], &targets(), 1e-12).unwrap();
        let b =
            convergence_study(&squared_generator, 0.1, 6, 24, &[2, 4], &targets(), 1e-12).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            assert_eq!(ra.sup_residual.to_bits(), rb.sup_residual.to_bits());
            assert_eq!(ra.training_l2.to_bits(), rb.training_l2.to_bits());
        }
        assert_eq!(a.rows.len(), 4);
        // an exactly representable target stays at machine precision and
        // its residual column is monotone
        assert!(a.final_residual("z_sq").unwrap() <= 1e-12);
        assert!(a.monotone.iter().any(|(n, m)| n == "z_sq" && *m));
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let points = sample_disk(0.1, 1, 4);
        let basis = build_basis(&squared_generator, &points, 3);
        let values: Vec<Complex64> = points.iter().map(|&z| z.conj()).collect();
        assert_eq!(
            least_squares_fit(&basis, &values, 0.0).unwrap_err(),
            Error::InsufficientSamples {
                samples: 5,
                columns: 10
            }
        );
    }

    #[test]
    fn trivial_constant_target() {
        let points = sample_disk(0.1, 4, 16);
        let basis = build_basis(&squared_generator, &points, 0);
        let values = vec![c(1.0, 0.0); points.len()];
        let fit = least_squares_fit(&basis, &values, 0.0).unwrap();
        assert!(fit.training_sup <= 1e-14);
    }
}
