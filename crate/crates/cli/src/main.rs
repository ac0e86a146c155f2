//! `trackmix`: analyze track datasets, train and evaluate the likeability
//! classifier, and blend it with collaborative filtering for recommendations.
//!
//! Exit codes: 0 on success, 1 for data or runtime errors, 2 for usage errors.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trackmix_core::collab::DEFAULT_LAMBDA;
use trackmix_core::data::DEFAULT_LABEL_COLUMN;

#[derive(Parser)]
#[command(name = "trackmix", version, about = "Hybrid music-likeability engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the attribute correlation matrix and per-class feature means.
    Analyze(AnalyzeArgs),
    /// Train the classifier; writes a model file and per-epoch metrics.
    Train(TrainArgs),
    /// Report accuracy and loss of a model on a labeled dataset.
    Evaluate(EvaluateArgs),
    /// Score a single track.
    Predict(PredictArgs),
    /// Rank candidate tracks for a user by blending both recommenders.
    Recommend(RecommendArgs),
}

#[derive(Args)]
struct LabelArg {
    /// Name of the like/dislike column (matched case-insensitively).
    #[arg(long, default_value = DEFAULT_LABEL_COLUMN)]
    label_column: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Labeled track CSV.
    #[arg(long)]
    data: PathBuf,
    /// Output directory; receives correlation.csv and summary.csv.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    label: LabelArg,
}

#[derive(Args)]
struct TrainArgs {
    /// Labeled track CSV.
    #[arg(long)]
    data: PathBuf,
    /// Model JSON output path.
    #[arg(long)]
    out: PathBuf,
    /// Per-epoch metrics CSV output path.
    #[arg(long)]
    metrics: PathBuf,
    /// Seed for the split, initialization and batch order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 32)]
    batch_size: usize,
    /// Adam learning rate.
    #[arg(long, default_value_t = 1e-3)]
    lr: f64,
    /// Probability at or above which a track counts as liked.
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Share of records used for training (stratified).
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    /// Divide Adam's moment estimates by their bias-correction factors.
    #[arg(long)]
    bias_correction: bool,
    #[command(flatten)]
    label: LabelArg,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Labeled track CSV.
    #[arg(long)]
    data: PathBuf,
    /// Override the model's decision threshold.
    #[arg(long)]
    threshold: Option<f64>,
    #[command(flatten)]
    label: LabelArg,
}

#[derive(Args)]
struct PredictArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// CSV with exactly one track; a label column is not needed.
    #[arg(long)]
    data: PathBuf,
    /// Override the model's decision threshold.
    #[arg(long)]
    threshold: Option<f64>,
}

#[derive(Args)]
struct RecommendArgs {
    /// Model JSON written by `train`.
    #[arg(long)]
    model: PathBuf,
    /// Candidate track CSV (features; a label column is ignored).
    #[arg(long)]
    data: PathBuf,
    /// Ratings CSV with header user_id,track_id,rating.
    #[arg(long)]
    ratings: PathBuf,
    /// Active user id.
    #[arg(long)]
    user: String,
    /// Weight of the content model in the blend (1 = content only).
    #[arg(long = "lambda", default_value_t = DEFAULT_LAMBDA)]
    lambda: f64,
    /// Number of tracks to print.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Neighborhood size for collaborative predictions.
    #[arg(long, default_value_t = 20)]
    neighbors: usize,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Predict(a) => commands::predict(a),
        Command::Recommend(a) => commands::recommend(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
