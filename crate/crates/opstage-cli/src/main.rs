//! `opstage` — pipeline driver: synthetic corpora, texture features,
//! weighted broad-learning training, prediction, staging, and experiments.
//!
//! Machine output goes to stdout and the files named in flags; diagnostics
//! go to stderr. Exit codes: 0 success, 2 validation error, 3 numeric
//! failure. Every run is a pure function of its flags and inputs — there is
//! no wall-clock or OS entropy anywhere.

mod commands;
mod configs;
mod csvio;
mod modelio;
mod pgm;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opstage_core::WblsHyperParams;

use commands::CliError;

#[derive(Parser)]
#[command(
    name = "opstage",
    about = "Texture-based occupational pneumoconiosis staging pipeline",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic PGM corpus plus labels.csv from a JSON spec.
    Synth(SynthArgs),
    /// Compute 16 GLCM texture features per listed image into a CSV.
    Extract(ExtractArgs),
    /// Train a weighted broad learning classifier on a feature CSV.
    Train(TrainArgs),
    /// Classify a feature CSV with a saved model.
    Predict(PredictArgs),
    /// Resolve a chest assessment document to its final stage.
    Stage(StageArgs),
    /// Run the repeated split/balance experiment from a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// JSON corpus spec: {"classes": [{row_step, col_step, noise, count, image_size, levels, name?}, ...]}
    #[arg(long)]
    spec: PathBuf,
    /// Directory that receives the PGM files and labels.csv.
    #[arg(long)]
    out_dir: PathBuf,
    /// Corpus seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct ExtractArgs {
    /// Directory holding <id>.pgm for every id in the labels CSV.
    #[arg(long)]
    images: PathBuf,
    /// Labels CSV with header id,label.
    #[arg(long)]
    labels: PathBuf,
    /// Gray-level count for quantization.
    #[arg(long, default_value_t = 16)]
    levels: usize,
    /// Output feature CSV (header id,label,f1..f16).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    /// Training feature CSV (header id,label,f1..f16).
    #[arg(long)]
    features: PathBuf,
    /// Output model JSON path.
    #[arg(long)]
    out: PathBuf,
    /// Feature-layer width p.
    #[arg(long, default_value_t = 10)]
    feature_nodes: usize,
    /// Enhancement-layer width q.
    #[arg(long, default_value_t = 10)]
    enh_nodes: usize,
    /// Ridge regularizer lambda.
    #[arg(long, default_value_t = 1e-3)]
    lambda: f64,
    /// Seed for the random feature and enhancement maps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Drop class weighting (identity sample weights).
    #[arg(long)]
    unweighted: bool,
}

#[derive(Args)]
struct PredictArgs {
    /// Model JSON produced by train.
    #[arg(long)]
    model: PathBuf,
    /// Feature CSV to classify (header id,label,f1..f16).
    #[arg(long)]
    features: PathBuf,
    /// Output predictions CSV (header id,label,predicted).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StageArgs {
    /// Assessment JSON: six region levels (0-3 or vote arrays) plus large_opacities.
    #[arg(long)]
    assessment: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON (dataset source, protocol options).
    #[arg(long)]
    config: PathBuf,
    /// Output JSON report path.
    #[arg(long)]
    out_report: PathBuf,
    /// Output per-repeat CSV summary path.
    #[arg(long)]
    out_csv: PathBuf,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Synth(args) => {
            let summary = commands::cmd_synth(&args.spec, &args.out_dir, args.seed)?;
            println!("{summary}");
        }
        Command::Extract(args) => {
            commands::cmd_extract(&args.images, &args.labels, args.levels, &args.out)?;
        }
        Command::Train(args) => {
            let hyper = WblsHyperParams {
                feature_nodes: args.feature_nodes,
                enhancement_nodes: args.enh_nodes,
                lambda: args.lambda,
                seed: args.seed,
                weighted: !args.unweighted,
            };
            commands::cmd_train(&args.features, &args.out, &hyper)?;
        }
        Command::Predict(args) => {
            let summary = commands::cmd_predict(&args.model, &args.features, &args.out)?;
            if !summary.is_empty() {
                println!("{summary}");
            }
        }
        Command::Stage(args) => {
            let stage = commands::cmd_stage(&args.assessment)?;
            println!("{stage}");
        }
        Command::Experiment(args) => {
            let summary =
                commands::cmd_experiment(&args.config, &args.out_report, &args.out_csv)?;
            println!("{summary}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
