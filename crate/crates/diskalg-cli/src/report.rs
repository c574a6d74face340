//! Verdicts, the structured summary report and atomic CSV emission.
//!
//! Verdict hygiene is structural: certified checks can reach `pass`, while
//! sampled checks top out at `evidence` because `Verdict::sampled` simply
//! cannot produce `pass`.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Evidence,
    Fail,
}

impl Verdict {
    /// For checks backed by a certified margin.
    pub fn certified(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// For sampled checks: clean runs are evidence, never proof.
    pub fn sampled(ok: bool) -> Self {
        if ok {
            Verdict::Evidence
        } else {
            Verdict::Fail
        }
    }

    pub fn failed(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub stage: &'static str,
    pub verdict: Verdict,
    pub details: Value,
}

#[derive(Debug, Serialize)]
pub struct SummaryReport {
    pub config: String,
    pub stages: Vec<StageReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margins: Option<Value>,
    /// Largest sampled radius at which the sign sweep was clean.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub safe_radius: Option<f64>,
    pub csv_files: Vec<String>,
}

impl SummaryReport {
    pub fn new(config: String) -> Self {
        Self {
            config,
            stages: Vec::new(),
            certificate: None,
            margins: None,
            safe_radius: None,
            csv_files: Vec::new(),
        }
    }

    pub fn push(&mut self, stage: StageReport) {
        self.stages.push(stage);
    }

    pub fn any_failed(&self) -> bool {
        self.stages.iter().any(|s| s.verdict.failed())
    }
}

/// All reals in CSV files carry 17 significant digits so reruns are
/// byte-comparable.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}

pub fn write_csv(
    dir: &Path,
    name: &str,
    header: &str,
    rows: impl IntoIterator<Item = String>,
) -> io::Result<PathBuf> {
    let mut contents = String::from(header);
    contents.push('\n');
    for row in rows {
        contents.push_str(&row);
        contents.push('\n');
    }
    let path = dir.join(name);
    write_atomic(&path, &contents)?;
    Ok(path)
}

pub fn write_summary(dir: &Path, summary: &SummaryReport) -> io::Result<PathBuf> {
    let path = dir.join("summary.json");
    let contents = serde_json::to_string_pretty(summary).expect("serializable report");
    write_atomic(&path, &contents)?;
    Ok(path)
}
