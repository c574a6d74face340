//! Pipeline stages shared by the single-shot subcommands and `study`.
//!
//! Certified stages (coefficient conditions, strict trace positivity, the
//! two-certificate combination) produce `pass`/`fail`; everything sampled
//! (sign sweeps, separation, probes, residual tables, approximation runs)
//! tops out at `evidence`.

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use diskalg::approx::convergence_study;
use diskalg::condition::{
    best_verdict, build_certificate, check_strict_positivity, combine_certificates,
    companion_certificate, margin_trace, standard_perturbations, verify_polynomial_condition,
    Certificate, MarginTrace,
};
use diskalg::geometry::{
    four_disks, kallin_probe, residual_trace, sample_disk, separation_check, straightened_sheets,
    validate_smallness,
};
use diskalg::{BiPoly, Complex64, Error, GeneratorSpec};

use crate::config::Config;
use crate::report::{fmt_real, write_csv, StageReport, Verdict};

pub struct Session {
    pub config: Config,
    pub spec: GeneratorSpec,
    pub config_path: String,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub max_degree: Option<usize>,
}

impl Session {
    fn newton_tol(&self) -> f64 {
        self.config.tolerances.newton_tol
    }

    fn sign_tol(&self) -> f64 {
        self.config.tolerances.sign_tol
    }

    pub fn degrees(&self) -> Vec<usize> {
        match self.max_degree {
            Some(cap) => self
                .config
                .degrees
                .iter()
                .copied()
                .filter(|&d| d <= cap)
                .collect(),
            None => self.config.degrees.clone(),
        }
    }
}

const NEWTON_MAX_ITER: usize = 50;
const SWEEP_ANGLES: usize = 256;

/// Coefficient conditions and certificate construction. A certificate is
/// returned only when some condition passed; otherwise the report carries
/// the best margins and the circle zeros of the symbol.
pub fn conditions_stage(session: &Session) -> (StageReport, Option<Certificate>) {
    let g = session.spec.symbol();
    match best_verdict(g, session.config.trace_samples) {
        Ok(verdict) if verdict.passes_any() => {
            let certificate = build_certificate(g, verdict.pivot).ok();
            let details = json!({
                "pivot": verdict.pivot,
                "passes": {
                    "dominant_coefficient": verdict.passes_a,
                    "derived_sequence": verdict.passes_b,
                    "circle_positivity": verdict.passes_c,
                },
                "margins": {
                    "margin_a": verdict.margin_a,
                    "margin_b": verdict.margin_b,
                    "margin_c": verdict.margin_c,
                },
                "certificate": certificate.as_ref().map(|c| json!({
                    "polynomial": format!("{}", c.p),
                    "terms": c.p,
                    "degree": c.s_degree,
                    "alpha": {"re": c.alpha.re, "im": c.alpha.im},
                    "pivot": c.pivot,
                })),
            });
            let report = StageReport {
                stage: "conditions",
                verdict: Verdict::Pass,
                details,
            };
            (report, certificate)
        }
        Ok(verdict) => {
            // a pivot exists but no sufficient condition holds there
            let zeros = g.circle_zeros(session.config.trace_samples);
            let report = StageReport {
                stage: "conditions",
                verdict: Verdict::Fail,
                details: json!({
                    "message": "no sufficient condition applies",
                    "pivot": verdict.pivot,
                    "margins": {
                        "margin_a": verdict.margin_a,
                        "margin_b": verdict.margin_b,
                        "margin_c": verdict.margin_c,
                    },
                    "circle_zeros_of_g": zeros,
                }),
            };
            (report, None)
        }
        Err(err) => {
            let zeros = g.circle_zeros(session.config.trace_samples);
            let report = StageReport {
                stage: "conditions",
                verdict: Verdict::Fail,
                details: json!({
                    "error": err.to_string(),
                    "message": "no sufficient condition applies",
                    "circle_zeros_of_g": zeros,
                }),
            };
            (report, None)
        }
    }
}

/// Margin traces for the certificate and its raised companion, with the
/// certified strict-positivity check; writes `margin_trace.csv`.
pub fn margin_stage(
    session: &Session,
    cert: &Certificate,
) -> Result<(StageReport, MarginTrace, MarginTrace), Error> {
    let g = session.spec.symbol();
    let samples = session.config.trace_samples;
    let f0 = margin_trace(&cert.p, g, samples)?;
    let f1 = margin_trace(&companion_certificate(cert).p, g, samples)?;
    let (strict, certified_min) = check_strict_positivity(&f0);

    let rows = (0..f0.thetas.len()).map(|i| {
        format!(
            "{},{},{}",
            fmt_real(f0.thetas[i]),
            fmt_real(f0.values[i]),
            fmt_real(f1.values[i])
        )
    });
    let report = match write_csv(&session.out_dir, "margin_trace.csv", "theta,f0,f1", rows) {
        Ok(path) => StageReport {
            stage: "margin",
            verdict: Verdict::certified(strict),
            details: json!({
                "certified_min_f0": certified_min,
                "sample_min_f0": f0.min(),
                "lipschitz_f0": f0.lipschitz,
                "csv": path.display().to_string(),
            }),
        },
        Err(err) => StageReport {
            stage: "margin",
            verdict: Verdict::Fail,
            details: json!({ "error": format!("could not write margin_trace.csv: {err}") }),
        },
    };
    Ok((report, f0, f1))
}

/// As [`margin_stage`] but folds trace-construction errors into a failing
/// report so pipelines never drop the stage silently.
pub fn margin_stage_report(
    session: &Session,
    cert: &Certificate,
) -> (StageReport, Option<(MarginTrace, MarginTrace)>) {
    match margin_stage(session, cert) {
        Ok((report, f0, f1)) => (report, Some((f0, f1))),
        Err(err) => (
            StageReport {
                stage: "margin",
                verdict: Verdict::Fail,
                details: json!({ "error": err.to_string() }),
            },
            None,
        ),
    }
}

/// Sampled two-sided sign sweep under the standard perturbation family plus
/// any seeded extras. Per-radius cleanliness yields the safe radius.
pub fn verify_stage(session: &Session, p: &BiPoly) -> (StageReport, Option<f64>) {
    let mut perturbations: Vec<Complex64> = standard_perturbations().to_vec();
    if session.config.extra_perturbations > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(session.seed);
        for _ in 0..session.config.extra_perturbations {
            let magnitude = rng.gen_range(0.0..0.1);
            let angle = rng.gen_range(0.0..std::f64::consts::TAU);
            perturbations.push(magnitude * Complex64::cis(angle));
        }
    }
    let g = session.spec.symbol();
    let mut per_radius = Vec::new();
    let mut safe_radius: Option<f64> = None;
    let mut all_clean = true;
    for &r in &session.config.radii {
        let evidence = verify_polynomial_condition(p, g, &perturbations, &[r], SWEEP_ANGLES);
        let clean = evidence.is_clean();
        if clean {
            safe_radius = Some(safe_radius.map_or(r, |s: f64| s.max(r)));
        } else {
            all_clean = false;
        }
        per_radius.push(json!({
            "radius": r,
            "clean": clean,
            "min_plus": evidence.min_plus,
            "max_minus": evidence.max_minus,
            "violations": evidence.violations.len(),
            "first_violation": evidence.violations.first().map(|v| json!({
                "z": {"re": v.z.re, "im": v.z.im},
                "perturbation": {"re": v.perturbation.re, "im": v.perturbation.im},
                "plus_branch": v.plus_branch,
                "value": v.value,
            })),
        }));
    }
    let report = StageReport {
        stage: "verify",
        verdict: Verdict::sampled(all_clean),
        details: json!({
            "angles": SWEEP_ANGLES,
            "perturbations": perturbations.len(),
            "per_radius": per_radius,
            "safe_radius": safe_radius,
        }),
    };
    (report, safe_radius)
}

/// The two-certificate combination on the sampled traces.
pub fn combine_stage(session: &Session, f0: &MarginTrace, f1: &MarginTrace) -> StageReport {
    match combine_certificates(
        f0,
        f1,
        session.config.tolerances.zero_tol,
        session.config.cap,
    ) {
        Ok(out) => StageReport {
            stage: "combine",
            verdict: Verdict::certified(out.verified_floor >= -1e-12),
            details: json!({
                "delta": out.delta,
                "epsilon": if out.epsilon.is_finite() { json!(out.epsilon) } else { json!("inf") },
                "lambda0": out.lambda0,
                "verified_floor": out.verified_floor,
                "neighborhood_intervals": out.neighborhood.len(),
            }),
        },
        Err(err) => StageReport {
            stage: "combine",
            verdict: Verdict::Fail,
            details: json!({ "error": err.to_string() }),
        },
    }
}

/// Sampled point-separation check of the squared generators.
pub fn separate_stage(session: &Session) -> StageReport {
    let points = sample_disk(
        session.config.radius,
        session.config.sampling.n_r,
        session.config.sampling.n_theta,
    );
    let report = separation_check(&session.spec, &points, session.sign_tol());
    StageReport {
        stage: "separate",
        verdict: Verdict::sampled(report.is_clean()),
        details: json!({
            "min_normalized_gap": report.min_normalized_gap,
            "normalization_exponent": report.exponent,
            "violations": report.violations.len(),
            "checked": report.checked,
        }),
    }
}

/// Residual ratio table at the configured radius and its halvings; writes
/// `residuals.csv`.
pub fn residual_stage(session: &Session) -> StageReport {
    let r = session.config.radius;
    let radii = [r, r / 2.0, r / 4.0];
    match residual_trace(
        &session.spec,
        &radii,
        session.config.sampling.n_theta,
        session.newton_tol(),
        NEWTON_MAX_ITER,
    ) {
        Ok(table) => {
            let rows = table.rows.iter().map(|row| {
                format!(
                    "{},{},{}",
                    fmt_real(row.radius),
                    fmt_real(row.ratio_plus),
                    fmt_real(row.ratio_minus)
                )
            });
            let path = match write_csv(&session.out_dir, "residuals.csv", "r,ratio1,ratio2", rows) {
                Ok(path) => path,
                Err(err) => {
                    return StageReport {
                        stage: "residual",
                        verdict: Verdict::Fail,
                        details: json!({ "error": format!("could not write residuals.csv: {err}") }),
                    }
                }
            };
            let finite = table
                .rows
                .iter()
                .all(|row| row.ratio_plus.is_finite() && row.ratio_minus.is_finite());
            let smallness =
                validate_smallness(&session.spec, &radii, session.config.sampling.n_theta);
            StageReport {
                stage: "residual",
                verdict: Verdict::sampled(finite),
                details: json!({
                    "rows": table.rows,
                    "csv": path.display().to_string(),
                    "smallness": smallness.map(|s| json!({
                        "class": format!("{:?}", s.class),
                        "rows": s.rows,
                        "decreasing": s.decreasing,
                    })),
                }),
            }
        }
        Err(err) => StageReport {
            stage: "residual",
            verdict: Verdict::Fail,
            details: json!({ "error": err.to_string() }),
        },
    }
}

/// Sign probes on the four sheets and on the straightened pair.
pub fn kallin_stage(session: &Session, cert: &Certificate) -> StageReport {
    let points = sample_disk(
        session.config.radius,
        session.config.sampling.n_r,
        session.config.sampling.n_theta,
    );
    let disks = match four_disks(&session.spec, &points) {
        Ok(d) => d,
        Err(err) => {
            return StageReport {
                stage: "kallin",
                verdict: Verdict::Fail,
                details: json!({ "error": err.to_string() }),
            }
        }
    };
    let sheets = straightened_sheets(
        &session.spec,
        &points,
        session.newton_tol(),
        NEWTON_MAX_ITER,
    );
    let (e1, e2) = match sheets {
        Ok(pair) => pair,
        Err(err) => {
            return StageReport {
                stage: "kallin",
                verdict: Verdict::Fail,
                details: json!({ "error": err.to_string() }),
            }
        }
    };

    // Straightened sheets against the certificate: values decay like
    // |z|^(deg p - 1 + deg g).
    let kappa_cert = (cert.s_degree - 1 + session.spec.symbol().degree()) as f64;
    let probe_cert = kallin_probe(&cert.p, &e1, &e2, 0.0, session.sign_tol(), kappa_cert);

    // Product polynomial on the raw sheets, rotated a quarter turn so the
    // target half-planes are left/right; values decay like |z|^2.
    let [d1, d2, d3, d4] = disks;
    let set1: Vec<_> = d1.iter().chain(&d2).copied().collect();
    let set2: Vec<_> = d3.iter().chain(&d4).copied().collect();
    let product = BiPoly::monomial(1, 1, Complex64::new(1.0, 0.0));
    let probe_product = kallin_probe(
        &product,
        &set1,
        &set2,
        -std::f64::consts::FRAC_PI_2,
        session.sign_tol(),
        2.0,
    );

    let clean = probe_cert.is_clean() && probe_product.is_clean();
    StageReport {
        stage: "kallin",
        verdict: Verdict::sampled(clean),
        details: json!({
            "certificate_probe": {
                "min_set1": probe_cert.min_set1,
                "max_set2": probe_cert.max_set2,
                "violations": probe_cert.violations.len(),
                "origin_zeros": probe_cert.origin_zeros,
                "spurious_zeros": probe_cert.spurious_zeros.len(),
                "scale_exponent": kappa_cert,
            },
            "product_probe": {
                "min_set1": probe_product.min_set1,
                "max_set2": probe_product.max_set2,
                "violations": probe_product.violations.len(),
                "origin_zeros": probe_product.origin_zeros,
                "spurious_zeros": probe_product.spurious_zeros.len(),
            },
        }),
    }
}

/// Approximation convergence study; writes `convergence.csv`. Residual
/// trends are reported as evidence, never asserted.
pub fn approx_stage(session: &Session) -> StageReport {
    let targets = match session.config.targets() {
        Ok(t) => t,
        Err(message) => {
            return StageReport {
                stage: "approx",
                verdict: Verdict::Fail,
                details: json!({ "error": message }),
            }
        }
    };
    let boxed: diskalg::approx::TargetList =
        targets.into_iter().map(|t| (t.name, t.eval)).collect();
    let spec = &session.spec;
    let v = move |z: Complex64| spec.second_generator(z);
    let degrees = session.degrees();
    match convergence_study(
        &v,
        session.config.radius,
        session.config.sampling.n_r,
        session.config.sampling.n_theta,
        &degrees,
        &boxed,
        session.config.ridge,
    ) {
        Ok(table) => {
            let rows = table.rows.iter().map(|row| {
                format!(
                    "{},{},{}",
                    row.target,
                    row.degree,
                    fmt_real(row.sup_residual)
                )
            });
            let path = match write_csv(
                &session.out_dir,
                "convergence.csv",
                "target,N,sup_residual",
                rows,
            ) {
                Ok(path) => path,
                Err(err) => {
                    return StageReport {
                        stage: "approx",
                        verdict: Verdict::Fail,
                        details: json!({ "error": format!("could not write convergence.csv: {err}") }),
                    }
                }
            };
            StageReport {
                stage: "approx",
                verdict: Verdict::Evidence,
                details: json!({
                    "rows": table.rows,
                    "monotone": table.monotone,
                    "csv": path.display().to_string(),
                }),
            }
        }
        Err(err) => StageReport {
            stage: "approx",
            verdict: Verdict::Fail,
            details: json!({ "error": err.to_string() }),
        },
    }
}

/// Human-readable one-liner for a stage.
pub fn describe(report: &StageReport) -> String {
    let verdict = match report.verdict {
        Verdict::Pass => "pass",
        Verdict::Evidence => "evidence",
        Verdict::Fail => "FAIL",
    };
    format!("{:<10} {}", report.stage, verdict)
}

/// Compact margins value for the summary header.
pub fn margins_value(report: &StageReport) -> Option<Value> {
    report.details.get("margins").cloned()
}

pub fn certificate_value(report: &StageReport) -> Option<Value> {
    let value = report.details.get("certificate").cloned();
    match value {
        Some(Value::Null) | None => None,
        Some(v) => Some(v),
    }
}
