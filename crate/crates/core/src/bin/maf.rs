//! `maf` command-line interface.
//!
//! Exit codes: 0 success, 2 input or parse error, 3 configuration or
//! precondition error. Log level comes from `MAF_LOG`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use maf_core::appearance::AppearanceConfig;
use maf_core::dataset::{evaluate, simulate_dataset, split, DatasetManifest, EvalConfig, Preset, SimulateConfig, SplitName};
use maf_core::motion_match::{NormalizationMode, WindowSpec};
use maf_core::{identify, load_query, Error, PipelineConfig};

#[derive(Parser)]
#[command(name = "maf", version, about = "Identify a first-person camera wearer in third-person video")]
struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Emit one JSON object per line on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    print_config: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Identify the camera wearer for one query directory.
    Identify {
        query: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also print the fusion trace.
        #[arg(long)]
        explain: bool,
    },
    /// Write simulated queries and a manifest.
    Simulate {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        queries: usize,
        /// Candidates per query, wearer included.
        #[arg(long, default_value_t = 4)]
        candidates: usize,
        /// Frames per sequence.
        #[arg(long, default_value_t = 17)]
        length: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = PresetArg::Easy)]
        preset: PresetArg,
        #[arg(long, default_value_t = 5)]
        sequences_per_video: usize,
        #[arg(long, default_value_t = 0.5)]
        detection_probability: f64,
        #[arg(long, default_value_t = 0.0)]
        embedding_noise: f64,
        #[arg(long, default_value_t = 0.0)]
        motion_noise: f64,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Compute a train/test split of a manifest.
    Split {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        split: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the assignment here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the pipeline on the test side of a split.
    Evaluate {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        split: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "report.json")]
        out: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Easy,
    Ambiguous,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long, default_value_t = 8)]
    window_length: usize,
    #[arg(long, default_value_t = 4)]
    window_stride: usize,
}

#[derive(Args)]
struct PipelineArgs {
    #[command(flatten)]
    window: WindowArgs,
    /// raw or ego-scale
    #[arg(long, default_value = "ego-scale")]
    norm: String,
    /// Trust in appearance matching.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
}

impl WindowArgs {
    fn resolve(&self) -> Result<WindowSpec, Error> {
        WindowSpec::new(self.window_length, self.window_stride)
    }
}

impl PipelineArgs {
    fn resolve(&self) -> Result<PipelineConfig, Error> {
        Ok(PipelineConfig {
            window: self.window.resolve()?,
            normalization: self.norm.parse::<NormalizationMode>()?,
            appearance: AppearanceConfig::new(self.lambda)?,
        })
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: if e.is_input_error() { 2 } else { 3 },
            message: e.to_string(),
        }
    }
}

fn emit<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string(value).expect("serializable"));
}

fn manifest_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Identify {
            query,
            pipeline,
            explain,
        } => {
            let cfg = pipeline.resolve()?;
            if cli.print_config {
                emit(&json!({"command": "identify", "query": query, "pipeline": cfg, "explain": explain}));
                return Ok(());
            }
            let q = load_query(&query)?;
            let id = identify(&q, &cfg)?;
            if cli.json {
                let mut out = json!({"candidate_id": id.candidate_id, "index": id.prediction});
                if explain {
                    out["trace"] = serde_json::to_value(&id.trace).expect("serializable");
                }
                emit(&out);
            } else {
                println!("{}", id.candidate_id);
                if explain {
                    println!("{}", serde_json::to_string_pretty(&id.trace).expect("serializable"));
                }
            }
        }
        Command::Simulate {
            out,
            queries,
            candidates,
            length,
            seed,
            preset,
            sequences_per_video,
            detection_probability,
            embedding_noise,
            motion_noise,
            window,
        } => {
            let cfg = SimulateConfig {
                queries,
                candidates,
                sequence_length: length,
                seed,
                preset: match preset {
                    PresetArg::Easy => Preset::Easy,
                    PresetArg::Ambiguous => Preset::Ambiguous,
                },
                sequences_per_video,
                detection_probability,
                embedding_noise,
                motion_noise,
                window: window.resolve()?,
            };
            cfg.validate()?;
            if cli.print_config {
                emit(&json!({"command": "simulate", "out": out, "simulate": cfg}));
                return Ok(());
            }
            let manifest = simulate_dataset(&cfg, &out, cli.jobs)?;
            let path = out.join(maf_core::dataset::MANIFEST_FILE);
            if cli.json {
                emit(&json!({"manifest": path, "queries": manifest.sequences.len()}));
            } else {
                println!("wrote {} queries, manifest {}", manifest.sequences.len(), path.display());
            }
        }
        Command::Split {
            manifest,
            split: name,
            seed,
            out,
        } => {
            let name: SplitName = name.parse()?;
            if cli.print_config {
                emit(&json!({"command": "split", "manifest": manifest, "split": name, "seed": seed, "out": out}));
                return Ok(());
            }
            let m = DatasetManifest::load(&manifest)?;
            let assignment = split(&m, name, seed)?;
            match out {
                Some(path) => {
                    let mut bytes = serde_json::to_vec_pretty(&assignment).expect("serializable");
                    bytes.push(b'\n');
                    std::fs::write(&path, bytes).map_err(|e| Failure {
                        code: 2,
                        message: format!("{}: {e}", path.display()),
                    })?;
                    if cli.json {
                        emit(&json!({"train": assignment.train.len(), "test": assignment.test.len(), "out": path}));
                    } else {
                        println!("train {} / test {}", assignment.train.len(), assignment.test.len());
                    }
                }
                None => emit(&assignment),
            }
        }
        Command::Evaluate {
            manifest,
            split: name,
            seed,
            out,
            pipeline,
        } => {
            let name: SplitName = name.parse()?;
            let cfg = EvalConfig {
                pipeline: pipeline.resolve()?,
                seed,
                jobs: cli.jobs,
            };
            if cli.print_config {
                emit(&json!({"command": "evaluate", "manifest": manifest, "split": name, "out": out, "eval": cfg, "jobs": cli.jobs}));
                return Ok(());
            }
            let m = DatasetManifest::load(&manifest)?;
            let report = evaluate(&m, manifest_dir(&manifest), name, &cfg)?;
            report.save(&out)?;
            if cli.json {
                emit(&json!({
                    "accuracy": report.accuracy,
                    "queries": report.queries,
                    "failures": report.failures,
                    "report": out,
                }));
            } else {
                println!(
                    "top-1 accuracy {} ({} queries, {} failures)",
                    report.accuracy, report.queries, report.failures
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("MAF_LOG", "warn")).init();
    let cli = Cli::parse();
    if cli.jobs == 0 {
        eprintln!("error: --jobs must be >= 1");
        return ExitCode::from(3);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
