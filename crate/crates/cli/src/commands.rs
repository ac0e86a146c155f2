use std::fmt;
use std::fs;
use std::path::Path;

use trackmix_core::collab::{self, hybrid_score, predict_rating, CollabError};
use trackmix_core::data::{
    self, class_conditional_summary, correlation_matrix, write_summary_csv, DataError,
};
use trackmix_core::train::{self, write_metrics_csv, TrainConfig, TrainError};
use trackmix_core::AdamConfig;

use crate::output::Staged;
use crate::{AnalyzeArgs, EvaluateArgs, PredictArgs, RecommendArgs, TrainArgs};

/// A single-line diagnostic.
#[derive(Debug)]
pub struct CliError(String);

impl CliError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn data_err(path: &Path, e: DataError) -> CliError {
    match e {
        // already names the path
        DataError::Io { .. } => CliError::new(e.to_string()),
        e => CliError::new(format!("{}: {e}", path.display())),
    }
}

fn model_err(path: &Path, e: TrainError) -> CliError {
    match e {
        TrainError::Io { .. } => CliError::new(e.to_string()),
        TrainError::Data(d) => data_err(path, d),
        e => CliError::new(format!("{}: {e}", path.display())),
    }
}

fn ratings_err(path: &Path, e: CollabError) -> CliError {
    match e {
        CollabError::Io { .. } => CliError::new(e.to_string()),
        e => CliError::new(format!("{}: {e}", path.display())),
    }
}

fn load_model(path: &Path, threshold: Option<f64>) -> Result<train::TrainedModel> {
    let mut model = train::load_model(path).map_err(|e| model_err(path, e))?;
    if let Some(t) = threshold {
        if !(t > 0.0 && t < 1.0) {
            return Err(CliError::new(format!("threshold {t} must lie in (0, 1)")));
        }
        model.config.threshold = t;
    }
    Ok(model)
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

pub fn analyze(args: AnalyzeArgs) -> Result<()> {
    let ds = data::load_dataset(&args.data, &args.label.label_column)
        .map_err(|e| data_err(&args.data, e))?;
    let corr = correlation_matrix(&ds).map_err(|e| data_err(&args.data, e))?;
    let summary = class_conditional_summary(&ds);

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::new(format!("{}: {e}", args.out.display())))?;
    let mut staged = Staged::default();
    staged.add(
        args.out.join("correlation.csv"),
        csv_bytes(|b| corr.write_csv(b)),
    );
    staged.add(
        args.out.join("summary.csv"),
        csv_bytes(|b| write_summary_csv(&summary, b)),
    );
    staged.commit()?;
    println!(
        "wrote {} and {}",
        args.out.join("correlation.csv").display(),
        args.out.join("summary.csv").display()
    );
    Ok(())
}

pub fn train(args: TrainArgs) -> Result<()> {
    let ds = data::load_dataset(&args.data, &args.label.label_column)
        .map_err(|e| data_err(&args.data, e))?;
    let cfg = TrainConfig {
        epochs: args.epochs,
        batch_size: args.batch_size,
        seed: args.seed,
        adam: AdamConfig {
            learning_rate: args.lr,
            bias_correction: args.bias_correction,
            ..AdamConfig::default()
        },
        train_fraction: args.train_fraction,
        threshold: args.threshold,
        ..TrainConfig::default()
    };
    let (model, metrics) = train::train(&cfg, &ds).map_err(|e| model_err(&args.data, e))?;
    let json = train::model_to_json(&model).map_err(|e| CliError::new(e.to_string()))?;

    let mut staged = Staged::default();
    staged.add(&args.out, json.into_bytes());
    staged.add(&args.metrics, csv_bytes(|b| write_metrics_csv(&metrics, b)));
    staged.commit()?;
    match metrics.last() {
        Some(m) => println!(
            "epochs={} train_accuracy={} train_loss={} val_accuracy={} val_loss={}",
            m.epoch, m.train_accuracy, m.train_loss, m.val_accuracy, m.val_loss
        ),
        None => println!("epochs=0"),
    }
    Ok(())
}

pub fn evaluate(args: EvaluateArgs) -> Result<()> {
    let model = load_model(&args.model, args.threshold)?;
    let ds = data::load_dataset(&args.data, &args.label.label_column)
        .map_err(|e| data_err(&args.data, e))?;
    let ev = train::evaluate(&model, &ds).map_err(|e| model_err(&args.data, e))?;
    println!("accuracy={}", ev.accuracy);
    println!("loss={}", ev.loss);
    Ok(())
}

pub fn predict(args: PredictArgs) -> Result<()> {
    let model = load_model(&args.model, args.threshold)?;
    let tracks = data::load_tracks(&args.data).map_err(|e| data_err(&args.data, e))?;
    let [track] = tracks.as_slice() else {
        return Err(CliError::new(format!(
            "{}: expected exactly one track, found {}",
            args.data.display(),
            tracks.len()
        )));
    };
    let (p, label) = train::predict(&model, &track.features).map_err(|e| model_err(&args.data, e))?;
    println!("probability={p}");
    println!("label={label}");
    Ok(())
}

pub fn recommend(args: RecommendArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.lambda) {
        return Err(CliError::new(format!(
            "lambda {} must lie in [0, 1]",
            args.lambda
        )));
    }
    if args.neighbors == 0 {
        return Err(CliError::new("neighbors must be at least 1"));
    }
    let model = load_model(&args.model, None)?;
    let tracks = data::load_tracks(&args.data).map_err(|e| data_err(&args.data, e))?;
    let ratings = collab::load_ratings(&args.ratings).map_err(|e| ratings_err(&args.ratings, e))?;
    let mean = ratings
        .user_mean(&args.user)
        .map_err(|e| ratings_err(&args.ratings, e))?;

    let mut scored = Vec::with_capacity(tracks.len());
    for (row, t) in tracks.iter().enumerate() {
        let (p, _) = train::predict(&model, &t.features).map_err(|e| {
            CliError::new(format!("{}: row {}: {e}", args.data.display(), row + 1))
        })?;
        // tracks nobody has rated get the user's own mean, like an empty neighborhood
        let r = if ratings.has_item(&t.track_id) {
            predict_rating(&ratings, &args.user, &t.track_id, args.neighbors)
                .map_err(|e| ratings_err(&args.ratings, e))?
        } else {
            mean
        };
        let s = hybrid_score(p, r, args.lambda).map_err(|e| CliError::new(e.to_string()))?;
        scored.push((t.track_id.as_str(), s));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(b.0)));

    println!("track_id,score");
    for (id, s) in scored.iter().take(args.top) {
        println!("{id},{s}");
    }
    Ok(())
}
