//! Command-line surface: one verb per artifact of the capacity pipeline.
//!
//! Exit codes: 0 success, 1 invariant failure in a batch run, 2 input
//! error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use symcap::body::ConvexBody;
use symcap::error::Error;
use symcap::experiments::{self, BodySpec, ExperimentConfig, MatrixSpec};
use symcap::pipeline;
use symcap::symplectic::{self, PdMatrix};
use symcap::volume::{self, McConfig};

#[derive(Parser)]
#[command(
    name = "symcap",
    about = "Capacity bounds and volume inequalities for convex bodies in R^{2n}",
    version
)]
struct Cli {
    /// Master seed for Monte Carlo volumes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Tolerance for symplecticity/orthogonality validation output.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Williamson normal form A = S^T D S of a positive definite matrix.
    Williamson {
        /// JSON file with {"dim": 2n, "entries": [row-major]}.
        matrix: PathBuf,
    },
    /// WDS factorization T = W D S of a volume-preserving matrix.
    Wds {
        matrix: PathBuf,
    },
    /// Volume of a body (exact when possible, else Monte Carlo).
    Volume {
        body: PathBuf,
        /// Force the Monte Carlo route.
        #[arg(long)]
        mc: bool,
    },
    /// Capacity upper bound via the full pipeline.
    Bound {
        body: PathBuf,
        /// Use the plain cylinder bound (requires K = iK).
        #[arg(long)]
        lemma_ai: bool,
    },
    /// Viterbo ratio gamma of a body.
    Viterbo {
        body: PathBuf,
    },
    /// Difference-body volume ratio Vol(K-K)/Vol(K).
    RogersShephard {
        body: PathBuf,
    },
    /// Generalized ratio Vol(A+B)^{1/d}/Vol(A-B)^{1/d}.
    Grs {
        body_a: PathBuf,
        body_b: PathBuf,
    },
    /// Batch experiment from a JSON config; writes a CSV report.
    Run {
        config: PathBuf,
        /// Also emit a gamma-vs-dimension SVG scatter next to the CSV.
        #[arg(long)]
        plot: bool,
        /// Override the config's output path.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Dump one pipeline stage of a body as a body-spec JSON file.
    DumpStage {
        body: PathBuf,
        /// One of k1, k2, k3.
        #[arg(long)]
        stage: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.downcast_ref::<Error>() {
                Some(Error::InvalidInput(_)) | Some(Error::Dimension(_)) | Some(Error::Domain(_)) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn read_body(path: &PathBuf) -> anyhow::Result<(BodySpec, ConvexBody)> {
    let text = fs::read_to_string(path)?;
    let spec: BodySpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("failed to parse body spec: {e}")))?;
    let body = experiments::generate_body(&spec)?;
    Ok((spec, body))
}

fn read_matrix(path: &PathBuf) -> anyhow::Result<nalgebra::DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let spec: MatrixSpec = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("failed to parse matrix spec: {e}")))?;
    Ok(spec.to_matrix()?)
}

fn emit(cli: &Cli, value: serde_json::Value) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&value)?;
    match &cli.out {
        Some(path) => fs::write(path, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}

fn mc_config(cli: &Cli) -> McConfig {
    McConfig {
        samples: cli.samples,
        seed: cli.seed,
        ..Default::default()
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Williamson { matrix } => {
            let a = PdMatrix::new(read_matrix(matrix)?)?;
            let f = symplectic::williamson(&a)?;
            emit(
                cli,
                json!({
                    "spectrum": f.spectrum,
                    "degenerate": f.degenerate,
                    "s": MatrixSpec::from_matrix(&f.s),
                    "d": MatrixSpec::from_matrix(&f.d),
                    "reconstruction_residual": f.reconstruction_residual(a.matrix()),
                    "symplectic_residual": symplectic::symplectic_residual(&f.s)?,
                    "tolerance": cli.tol,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Wds { matrix } => {
            let t = read_matrix(matrix)?;
            let f = symplectic::wds_decompose(&t)?;
            emit(
                cli,
                json!({
                    "w": MatrixSpec::from_matrix(&f.w),
                    "d": MatrixSpec::from_matrix(&f.d),
                    "s": MatrixSpec::from_matrix(&f.s),
                    "reconstruction_residual": f.reconstruction_residual(&t),
                    "s_is_symplectic": symplectic::is_symplectic(&f.s, cli.tol)?,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Volume { body, mc } => {
            let (spec, k) = read_body(body)?;
            let cfg = mc_config(cli);
            let est = if *mc {
                volume::volume_mc(&k, cfg.samples, cfg.seed)?
            } else {
                volume::volume(&k, &cfg)?
            };
            emit(
                cli,
                json!({
                    "body_id": spec.id,
                    "value": est.value,
                    "method": est.method.as_str(),
                    "stderr": est.stderr,
                    "samples": est.samples,
                    "seed": est.seed,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bound { body, lemma_ai } => {
            let (spec, k) = read_body(body)?;
            let cfg = mc_config(cli);
            let bound = if *lemma_ai {
                pipeline::lemma_ai_bound(&k)?
            } else {
                pipeline::tmt_upper_bound(&k, &cfg)?
            };
            let mut out = json!({
                "body_id": spec.id,
                "upper": bound.upper,
                "lower": bound.lower,
                "method": bound.method.as_str(),
            });
            if let Some(trace) = &bound.trace {
                out["inradius_k3"] = json!(trace.r);
                out["a2_empirical"] = json!(trace.a2);
                out["theta_ratios"] = json!(trace.theta_ratios);
            }
            if let Some(cert) = &bound.certificate {
                out["contact_point"] = json!(cert.point.iter().cloned().collect::<Vec<f64>>());
                out["contact_residual"] = json!(cert.residual);
            }
            emit(cli, out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Viterbo { body } => {
            let (spec, k) = read_body(body)?;
            let cfg = mc_config(cli);
            let report = pipeline::viterbo_ratio(&k, &cfg)?;
            emit(
                cli,
                json!({
                    "body_id": spec.id,
                    "dimension": report.dimension,
                    "gamma": report.gamma,
                    "volume_term": report.volume_term,
                    "upper": report.bound.upper,
                    "lower": report.bound.lower,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::RogersShephard { body } => {
            let (spec, k) = read_body(body)?;
            let cfg = mc_config(cli);
            let ratio = pipeline::rogers_shephard_ratio(&k, &cfg)?;
            let bound = 4f64.powi(k.dim() as i32);
            emit(
                cli,
                json!({
                    "body_id": spec.id,
                    "ratio": ratio,
                    "bound_4_pow_d": bound,
                    "within_bound": ratio <= bound * (1.0 + 1e-6),
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Grs { body_a, body_b } => {
            let (spec_a, a) = read_body(body_a)?;
            let (spec_b, b) = read_body(body_b)?;
            let cfg = mc_config(cli);
            let ratio = pipeline::grs_ratio(&a, &b, &cfg)?;
            emit(
                cli,
                json!({
                    "body_a": spec_a.id,
                    "body_b": spec_b.id,
                    "ratio": ratio,
                }),
            )?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Run { config, plot, csv } => {
            let text = fs::read_to_string(config)?;
            let mut cfg: ExperimentConfig = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidInput(format!("failed to parse config: {e}")))?;
            if *plot {
                cfg.plot = true;
            }
            if let Some(path) = csv {
                cfg.output = path.clone();
            }
            let report = experiments::run_experiment(&cfg)?;
            let failures: Vec<&str> = report
                .rows
                .iter()
                .filter(|r| r.error.is_some())
                .map(|r| r.body_id.as_str())
                .collect();
            eprintln!(
                "wrote {} ({} rows{})",
                report.csv_path.display(),
                report.rows.len(),
                report
                    .svg_path
                    .as_ref()
                    .map(|p| format!(", plot {}", p.display()))
                    .unwrap_or_default()
            );
            if !failures.is_empty() {
                eprintln!("rows with errors: {}", failures.join(", "));
            }
            if report.invariants_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(1))
            }
        }
        Command::DumpStage { body, stage } => {
            if !matches!(stage.as_str(), "k1" | "k2" | "k3") {
                return Err(Error::InvalidInput(format!(
                    "unknown stage {stage:?}; expected k1, k2 or k3"
                ))
                .into());
            }
            let (spec, k) = read_body(body)?;
            let cfg = mc_config(cli);
            let bound = pipeline::tmt_upper_bound(&k, &cfg)?;
            let trace = bound
                .trace
                .ok_or_else(|| Error::Numerical("pipeline returned no trace".into()))?;
            let stage_body = match stage.as_str() {
                "k1" => &trace.k1,
                "k2" => &trace.k2,
                _ => &trace.k3,
            };
            let out_spec =
                experiments::body_to_spec(format!("{}-{stage}", spec.id), stage_body)?;
            let value = serde_json::to_value(&out_spec)?;
            emit(cli, value)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
