//! JSON experiment configuration and its translation into library inputs.
//!
//! Complex numbers appear as `{re, im}` pairs inside term records; unknown
//! fields are rejected so typos surface as configuration errors.

use std::path::PathBuf;

use serde::Deserialize;

use diskalg::geometry::{SmallPerturbation, SmallTerm};
use diskalg::{BiPoly, Complex64, GeneratorSpec, HomogeneousSymbol, MixedPoly, SmallnessClass};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub radius: f64,
    pub generator: GeneratorConfig,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default = "default_degrees")]
    pub degrees: Vec<usize>,
    /// Radii for the sampled sign sweep.
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default = "default_cap")]
    pub cap: f64,
    #[serde(default = "default_trace_samples")]
    pub trace_samples: usize,
    #[serde(default = "default_ridge")]
    pub ridge: f64,
    /// Extra random perturbation coefficients for the sign sweep, drawn
    /// from the seeded generator on top of the standard five.
    #[serde(default)]
    pub extra_perturbations: usize,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub g: SymbolConfig,
    #[serde(default)]
    pub f: Option<PolyConfig>,
    #[serde(default)]
    pub h: Option<PerturbationConfig>,
    #[serde(default)]
    pub direct: Option<MixedConfig>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub degree: u32,
    pub terms: Vec<SymbolTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTerm {
    pub k: i64,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyConfig {
    pub terms: Vec<PolyTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTerm {
    pub j: u32,
    pub k: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedConfig {
    pub terms: Vec<MixedTerm>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixedTerm {
    pub p: u32,
    pub q: u32,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub class: SmallnessClassConfig,
    #[serde(default)]
    pub mixed: Option<MixedConfig>,
    #[serde(default)]
    pub symbol: Option<SymbolConfig>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
pub enum SmallnessClassConfig {
    #[serde(rename = "o_g")]
    OfG,
    #[serde(rename = "o_z2_g")]
    OfZSquaredG,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetConfig {
    pub name: String,
    #[serde(default)]
    pub mixed: Option<MixedConfig>,
    #[serde(default)]
    pub abs_power: Option<u32>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub n_r: usize,
    pub n_theta: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            n_r: diskalg::approx::DEFAULT_TRAIN_NR,
            n_theta: diskalg::approx::DEFAULT_TRAIN_NTHETA,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_zero_tol")]
    pub zero_tol: f64,
    #[serde(default = "default_sign_tol")]
    pub sign_tol: f64,
    #[serde(default = "default_newton_tol")]
    pub newton_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            zero_tol: default_zero_tol(),
            sign_tol: default_sign_tol(),
            newton_tol: default_newton_tol(),
        }
    }
}

fn default_degrees() -> Vec<usize> {
    vec![2, 4, 6, 8]
}

fn default_radii() -> Vec<f64> {
    vec![1e-1, 1e-2, 1e-3]
}

fn default_cap() -> f64 {
    1.0
}

fn default_trace_samples() -> usize {
    diskalg::condition::DEFAULT_CIRCLE_SAMPLES
}

fn default_ridge() -> f64 {
    diskalg::approx::DEFAULT_RIDGE
}

fn default_zero_tol() -> f64 {
    1e-9
}

fn default_sign_tol() -> f64 {
    1e-7
}

fn default_newton_tol() -> f64 {
    1e-12
}

fn to_complex(re: f64, im: f64, context: &str) -> Result<Complex64, String> {
    if !re.is_finite() || !im.is_finite() {
        return Err(format!("{context}: coefficient must be finite"));
    }
    Ok(Complex64::new(re, im))
}

impl SymbolConfig {
    pub fn build(&self, context: &str) -> Result<HomogeneousSymbol, String> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            terms.push((
                t.k,
                to_complex(t.re, t.im, &format!("{context}.terms[{i}]"))?,
            ));
        }
        HomogeneousSymbol::new(self.degree, terms).map_err(|e| format!("{context}: {e}"))
    }
}

impl PolyConfig {
    pub fn build(&self, context: &str) -> Result<BiPoly, String> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            terms.push((
                (t.j, t.k),
                to_complex(t.re, t.im, &format!("{context}.terms[{i}]"))?,
            ));
        }
        Ok(BiPoly::from_terms(terms))
    }
}

impl MixedConfig {
    pub fn build(&self, context: &str) -> Result<MixedPoly, String> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (i, t) in self.terms.iter().enumerate() {
            terms.push((
                (t.p, t.q),
                to_complex(t.re, t.im, &format!("{context}.terms[{i}]"))?,
            ));
        }
        Ok(MixedPoly::new(terms))
    }
}

pub struct Target {
    pub name: String,
    pub eval: Box<dyn Fn(Complex64) -> Complex64>,
}

impl Config {
    pub fn generator_spec(&self) -> Result<GeneratorSpec, String> {
        let g = self.generator.g.build("generator.g")?;
        let f = match &self.generator.f {
            Some(f) => f.build("generator.f")?,
            None => BiPoly::zero(),
        };
        let h = match &self.generator.h {
            Some(h) => {
                let class = match h.class {
                    SmallnessClassConfig::OfG => SmallnessClass::OfG,
                    SmallnessClassConfig::OfZSquaredG => SmallnessClass::OfZSquaredG,
                };
                let term = match (&h.mixed, &h.symbol) {
                    (Some(m), None) => SmallTerm::Mixed(m.build("generator.h.mixed")?),
                    (None, Some(s)) => SmallTerm::Symbol(s.build("generator.h.symbol")?),
                    _ => {
                        return Err(
                            "generator.h: exactly one of `mixed` or `symbol` required".into()
                        )
                    }
                };
                Some(SmallPerturbation { term, class })
            }
            None => None,
        };
        let direct = match &self.generator.direct {
            Some(d) => Some(d.build("generator.direct")?),
            None => None,
        };
        GeneratorSpec::new(self.radius, f, g, h, direct).map_err(|e| format!("generator: {e}"))
    }

    /// Configured targets, or the default pair conj(z), conj(z)^2.
    pub fn targets(&self) -> Result<Vec<Target>, String> {
        if self.targets.is_empty() {
            return Ok(vec![
                Target {
                    name: "conj_z".into(),
                    eval: Box::new(|z: Complex64| z.conj()),
                },
                Target {
                    name: "conj_z_sq".into(),
                    eval: Box::new(|z: Complex64| z.conj() * z.conj()),
                },
            ]);
        }
        let mut out = Vec::with_capacity(self.targets.len());
        for (i, t) in self.targets.iter().enumerate() {
            let context = format!("targets[{i}]");
            let eval: Box<dyn Fn(Complex64) -> Complex64> = match (&t.mixed, t.abs_power) {
                (Some(m), None) => {
                    let poly = m.build(&context)?;
                    Box::new(move |z| poly.eval(z))
                }
                (None, Some(power)) => {
                    Box::new(move |z: Complex64| Complex64::new(z.norm().powi(power as i32), 0.0))
                }
                _ => {
                    return Err(format!(
                        "{context}: exactly one of `mixed` or `abs_power` required"
                    ))
                }
            };
            out.push(Target {
                name: t.name.clone(),
                eval,
            });
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.radius.is_finite() || self.radius <= 0.0 {
            return Err("radius: must be positive and finite".into());
        }
        if self.sampling.n_r == 0 || self.sampling.n_theta == 0 {
            return Err("sampling: n_r and n_theta must be at least 1".into());
        }
        if self.degrees.is_empty() {
            return Err("degrees: need at least one degree".into());
        }
        if self.degrees.windows(2).any(|w| w[0] >= w[1]) {
            return Err("degrees: must be strictly increasing".into());
        }
        if self.radii.is_empty() || self.radii.iter().any(|&r| !r.is_finite() || r <= 0.0) {
            return Err("radii: need positive radii".into());
        }
        if self.trace_samples < 64 {
            return Err("trace_samples: need at least 64".into());
        }
        if !self.cap.is_finite() || self.cap <= 0.0 {
            return Err("cap: must be positive".into());
        }
        if self.tolerances.zero_tol < 0.0
            || self.tolerances.sign_tol < 0.0
            || !self.tolerances.newton_tol.is_finite()
            || self.tolerances.newton_tol <= 0.0
        {
            return Err("tolerances: zero_tol, sign_tol >= 0 and newton_tol > 0".into());
        }
        Ok(())
    }
}
