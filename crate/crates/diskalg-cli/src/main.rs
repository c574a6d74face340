//! Configuration-driven runner for the disk-algebra experiments.
//!
//! Exit codes: 0 when every certified check passes and no sampled violation
//! was found, 1 when a check fails or a violation is found, 2 for invalid
//! configuration.

mod config;
mod report;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;
use report::{write_summary, StageReport, SummaryReport};
use stages::{
    approx_stage, certificate_value, combine_stage, conditions_stage, describe, kallin_stage,
    margin_stage_report, margins_value, residual_stage, separate_stage, verify_stage, Session,
};

#[derive(Parser)]
#[command(name = "diskalg", version, about = "Disk algebra experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for CSV files and the summary report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the optional randomized perturbation fixtures.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on the approximation degree list.
    #[arg(long = "max-degree")]
    max_degree: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Coefficient conditions and certificate construction.
    Check(Common),
    /// Margin traces and the certified strict-positivity check.
    Margin(Common),
    /// Sampled two-sided sign sweep under the perturbation family.
    Verify(Common),
    /// Two-certificate combination on the sampled traces.
    Combine(Common),
    /// Sampled point-separation check.
    Separate(Common),
    /// Sign probes on the preimage sheets.
    Kallin(Common),
    /// Straightening residual ratios.
    Residual(Common),
    /// Approximation convergence study.
    Approx(Common),
    /// Full pipeline with summary report.
    Study(Common),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, common) = match &cli.command {
        Command::Check(c) => ("check", c),
        Command::Margin(c) => ("margin", c),
        Command::Verify(c) => ("verify", c),
        Command::Combine(c) => ("combine", c),
        Command::Separate(c) => ("separate", c),
        Command::Kallin(c) => ("kallin", c),
        Command::Residual(c) => ("residual", c),
        Command::Approx(c) => ("approx", c),
        Command::Study(c) => ("study", c),
    };
    let session = match load_session(common) {
        Ok(session) => session,
        Err(message) => {
            eprintln!("configuration error: {message}");
            return ExitCode::from(2);
        }
    };
    let stages = run(name, &session);
    let mut summary = SummaryReport::new(session.config_path.clone());
    for stage in stages {
        println!("{}", describe(&stage));
        if stage.stage == "conditions" {
            summary.certificate = certificate_value(&stage);
            summary.margins = margins_value(&stage);
            if summary.certificate.is_none() {
                if let Some(message) = stage.details.get("message").and_then(|v| v.as_str()) {
                    println!("           {message}");
                }
                if let Some(zeros) = stage
                    .details
                    .get("circle_zeros_of_g")
                    .and_then(|v| v.as_array())
                {
                    if !zeros.is_empty() {
                        let angles: Vec<String> = zeros
                            .iter()
                            .filter_map(|v| v.as_f64())
                            .map(|t| format!("{t:.6}"))
                            .collect();
                        println!(
                            "           zeros of g on the unit circle at theta = {}",
                            angles.join(", ")
                        );
                    }
                }
            }
        }
        if stage.stage == "verify" {
            summary.safe_radius = stage.details.get("safe_radius").and_then(|v| v.as_f64());
        }
        if let Some(path) = stage.details.get("csv").and_then(|v| v.as_str()) {
            summary.csv_files.push(path.to_string());
        }
        summary.push(stage);
    }
    if let Some(cert) = &summary.certificate {
        if let Some(polynomial) = cert.get("polynomial").and_then(|v| v.as_str()) {
            println!("certificate: p(z1,z2) = {polynomial}");
        }
    }
    if name == "study" {
        match write_summary(&session.out_dir, &summary) {
            Ok(path) => println!("summary    {}", path.display()),
            Err(err) => {
                eprintln!("could not write summary: {err}");
                return ExitCode::from(1);
            }
        }
    }
    if summary.any_failed() {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn load_session(common: &Common) -> Result<Session, String> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|err| format!("{}: {err}", common.config.display()))?;
    let config: Config =
        serde_json::from_str(&text).map_err(|err| format!("{}: {err}", common.config.display()))?;
    config.validate()?;
    let spec = config.generator_spec()?;
    let out_dir = common
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("diskalg-out"));
    Ok(Session {
        config,
        spec,
        config_path: common.config.display().to_string(),
        out_dir,
        seed: common.seed,
        max_degree: common.max_degree,
    })
}

fn run(name: &str, session: &Session) -> Vec<StageReport> {
    let mut stages = Vec::new();
    match name {
        "check" => {
            let (report, _) = conditions_stage(session);
            stages.push(report);
        }
        "margin" | "verify" | "combine" | "kallin" => {
            let (report, certificate) = conditions_stage(session);
            stages.push(report);
            if let Some(cert) = certificate {
                match name {
                    "margin" => {
                        let (report, _) = margin_stage_report(session, &cert);
                        stages.push(report);
                    }
                    "verify" => {
                        let (report, _) = verify_stage(session, &cert.p);
                        stages.push(report);
                    }
                    "combine" => {
                        let (report, traces) = margin_stage_report(session, &cert);
                        stages.push(report);
                        if let Some((f0, f1)) = traces {
                            stages.push(combine_stage(session, &f0, &f1));
                        }
                    }
                    "kallin" => {
                        stages.push(kallin_stage(session, &cert));
                    }
                    _ => unreachable!(),
                }
            }
        }
        "separate" => stages.push(separate_stage(session)),
        "residual" => stages.push(residual_stage(session)),
        "approx" => stages.push(approx_stage(session)),
        "study" => {
            let (report, certificate) = conditions_stage(session);
            stages.push(report);
            if let Some(cert) = &certificate {
                let (report, traces) = margin_stage_report(session, cert);
                stages.push(report);
                if let Some((f0, f1)) = traces {
                    stages.push(combine_stage(session, &f0, &f1));
                }
                let (report, _) = verify_stage(session, &cert.p);
                stages.push(report);
            }
            stages.push(separate_stage(session));
            if !session.spec.has_direct() {
                stages.push(residual_stage(session));
                if let Some(cert) = &certificate {
                    stages.push(kallin_stage(session, cert));
                }
            }
            stages.push(approx_stage(session));
        }
        _ => unreachable!("clap restricts subcommands"),
    }
    stages
}
