//! Implementations of the six subcommands.
//!
//! Every command is a pure function of its flags and input files: writes go
//! only to paths named in flags, stdout carries machine output, and all
//! human-facing text belongs on stderr (printed by `main`).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use opstage_core::experiment::{run_experiment, ExperimentError, ExperimentReport};
use opstage_core::linalg::DenseMatrix;
use opstage_core::staging::determine_final_stage;
use opstage_core::texture::feature_vector;
use opstage_core::{
    train, GrayImage, LabeledSample, WblsError, WblsHyperParams,
};

use crate::configs::{AssessmentDoc, ConfigError, DatasetSource, ExperimentConfig, SynthConfig};
use crate::csvio::{
    self, CsvError, FeatureRow, LabelRow, PredictionRow,
};
use crate::modelio::{self, ModelIoError};
use crate::pgm::{self, PgmError};

/// A command failure, tagged with the process exit code it maps to:
/// 2 for validation/input problems, 3 for numeric failures.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<PgmError> for CliError {
    fn from(e: PgmError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<CsvError> for CliError {
    fn from(e: CsvError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ModelIoError> for CliError {
    fn from(e: ModelIoError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<WblsError> for CliError {
    fn from(e: WblsError) -> Self {
        match e {
            WblsError::NumericError(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Model(inner @ WblsError::NumericError(_)) => {
                CliError::Numeric(inner.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

fn io_fail(path: &Path, source: std::io::Error) -> CliError {
    CliError::Validation(format!("cannot write {}: {source}", path.display()))
}

/// The id under which sample `seq` of class `class` is stored.
fn sample_id(class: usize, seq: usize) -> String {
    format!("c{class}-{seq:04}")
}

/// `synth`: generate a synthetic corpus of PGM images plus labels.csv.
pub fn cmd_synth(spec: &Path, out_dir: &Path, seed: u64) -> Result<String, CliError> {
    let config = SynthConfig::load(spec)?;
    let specs = config.specs();
    let corpus = opstage_core::synth::generate_synthetic(&specs, seed)
        .map_err(|e| CliError::Validation(e.to_string()))?;

    fs::create_dir_all(out_dir).map_err(|e| io_fail(out_dir, e))?;

    let mut rows = Vec::with_capacity(corpus.len());
    let mut seq_in_class = vec![0usize; specs.len()];
    for (img, class) in &corpus {
        let id = sample_id(*class, seq_in_class[*class]);
        seq_in_class[*class] += 1;
        let path = out_dir.join(format!("{id}.pgm"));
        // maxval = levels - 1 makes extract's uniform binning the identity,
        // so a synth -> extract round trip preserves every pixel.
        let max_value = (img.levels() - 1).max(1) as u16;
        pgm::encode_pgm_p5(&path, img.width(), img.height(), max_value, img.pixels())?;
        rows.push(LabelRow {
            id,
            label: config.class_name(*class),
        });
    }
    csvio::write_labels(&out_dir.join("labels.csv"), &rows)?;

    let mut summary = String::new();
    for (k, spec) in specs.iter().enumerate() {
        let _ = writeln!(
            summary,
            "class {}: {} images ({2}x{2}, {3} levels)",
            config.class_name(k),
            spec.count,
            spec.image_size,
            spec.levels,
        );
    }
    let _ = write!(summary, "total: {} images", corpus.len());
    Ok(summary)
}

/// Decodes one PGM and quantizes it to `levels` gray levels.
fn load_gray_image(path: &Path, levels: usize) -> Result<GrayImage, CliError> {
    let raw = pgm::decode_pgm(path)?;
    opstage_core::image::quantize_image(&raw.samples, raw.width, raw.height, raw.max_value, levels)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// `extract`: compute the 16-feature vector of every listed image.
pub fn cmd_extract(
    images: &Path,
    labels: &Path,
    levels: usize,
    out: &Path,
) -> Result<(), CliError> {
    let label_rows = csvio::read_labels(labels)?;
    let mut feature_rows = Vec::with_capacity(label_rows.len());
    for row in &label_rows {
        let path = images.join(format!("{}.pgm", row.id));
        let img = load_gray_image(&path, levels)?;
        let features = feature_vector(&img)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        feature_rows.push(FeatureRow {
            id: row.id.clone(),
            label: row.label.clone(),
            features,
        });
    }
    csvio::write_features(out, &feature_rows)?;
    Ok(())
}

/// Assembles the feature matrix and dense labels behind a feature table.
fn design_matrix(rows: &[FeatureRow]) -> (DenseMatrix, Vec<usize>, Vec<String>) {
    let (samples, class_names) = csvio::rows_to_samples(rows);
    let feature_rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| s.features.components().to_vec())
        .collect();
    let x = DenseMatrix::from_rows(&feature_rows).expect("equal-length feature rows");
    let labels = samples.iter().map(|s| s.label).collect();
    (x, labels, class_names)
}

/// `train`: fit a model on a feature table and save it as JSON.
pub fn cmd_train(
    features: &Path,
    out: &Path,
    hyper: &WblsHyperParams,
) -> Result<(), CliError> {
    let rows = csvio::read_features(features)?;
    let (x, labels, class_names) = design_matrix(&rows);
    let model = train(&x, &labels, &class_names, hyper)?;
    modelio::save_model(out, &model)?;
    Ok(())
}

/// `predict`: classify a feature table with a saved model; returns the
/// machine summary for stdout.
pub fn cmd_predict(
    model_path: &Path,
    features: &Path,
    out: &Path,
) -> Result<String, CliError> {
    let model = modelio::load_model(model_path)?;
    let rows = csvio::read_features(features)?;
    let feature_rows: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| r.features.components().to_vec())
        .collect();
    let x = DenseMatrix::from_rows(&feature_rows).expect("equal-length feature rows");
    let (predicted, _scores) = model.predict(&x)?;

    let prediction_rows: Vec<PredictionRow> = rows
        .iter()
        .zip(&predicted)
        .map(|(row, &k)| PredictionRow {
            id: row.id.clone(),
            label: row.label.clone(),
            predicted: model.class_names[k].clone(),
        })
        .collect();
    csvio::write_predictions(out, &prediction_rows)?;

    // Accuracy is reported only when every input label is a known class.
    let truth: Option<Vec<usize>> = rows
        .iter()
        .map(|r| model.class_names.iter().position(|c| c == &r.label))
        .collect();
    match truth {
        Some(truth) => {
            let accuracy = opstage_core::eval::accuracy(&predicted, &truth)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            Ok(format!("accuracy={accuracy}"))
        }
        None => Ok(String::new()),
    }
}

/// `stage`: resolve an assessment document to its final stage string.
pub fn cmd_stage(assessment: &Path) -> Result<String, CliError> {
    let doc = AssessmentDoc::load(assessment)?;
    let chest = doc.assessment(assessment)?;
    Ok(determine_final_stage(&chest).name().to_string())
}

/// Builds the experiment's labeled samples from its configured source.
fn load_experiment_samples(
    config: &ExperimentConfig,
    config_dir: &Path,
) -> Result<(Vec<LabeledSample>, Vec<String>), CliError> {
    match &config.source {
        DatasetSource::Synthetic(synth) => {
            let specs = synth.specs();
            let corpus = opstage_core::synth::generate_synthetic(&specs, config.master_seed)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let mut seq_in_class = vec![0usize; specs.len()];
            let mut samples = Vec::with_capacity(corpus.len());
            for (img, class) in &corpus {
                let id = sample_id(*class, seq_in_class[*class]);
                seq_in_class[*class] += 1;
                let features = feature_vector(img)
                    .map_err(|e| CliError::Validation(format!("sample {id}: {e}")))?;
                samples.push(LabeledSample {
                    id,
                    features,
                    label: *class,
                });
            }
            let class_names = (0..specs.len()).map(|k| synth.class_name(k)).collect();
            Ok((samples, class_names))
        }
        DatasetSource::Features { path } => {
            // Relative feature paths resolve against the config file.
            let raw = PathBuf::from(path);
            let resolved = if raw.is_relative() {
                config_dir.join(&raw)
            } else {
                raw
            };
            let rows = csvio::read_features(&resolved)?;
            let (samples, class_names) = csvio::rows_to_samples(&rows);
            Ok((samples, class_names))
        }
    }
}

/// Renders the per-repeat CSV summary: one row per repeat per variant.
fn experiment_csv(report: &ExperimentReport) -> String {
    let mut out = String::from("repeat,seed,variant,accuracy,minority_recall\n");
    let k = report.minority_class;
    for record in &report.records {
        let mut push = |variant: &str, accuracy: f64, recall: f64| {
            let _ = writeln!(
                out,
                "{},{},{variant},{accuracy:.16e},{recall:.16e}",
                record.repeat, record.seed,
            );
        };
        push("weighted", record.weighted.accuracy, record.weighted.stats.recall[k]);
        if let Some(unweighted) = &record.unweighted {
            push("unweighted", unweighted.accuracy, unweighted.stats.recall[k]);
        }
    }
    out
}

/// Renders the machine summary printed on stdout after an experiment.
fn experiment_summary(report: &ExperimentReport) -> String {
    let mut out = String::new();
    let _ = write!(
        out,
        "weighted_mean_accuracy={}\nweighted_mean_minority_recall={}",
        report.weighted_aggregate.mean_accuracy,
        report.weighted_aggregate.mean_minority_recall,
    );
    if let Some(unweighted) = &report.unweighted_aggregate {
        let _ = write!(
            out,
            "\nunweighted_mean_accuracy={}\nunweighted_mean_minority_recall={}",
            unweighted.mean_accuracy, unweighted.mean_minority_recall,
        );
    }
    if let Some(margin) = report.minority_recall_margin {
        let _ = write!(out, "\nminority_recall_margin={margin}");
    }
    out
}

/// `experiment`: run the split/balance/repeat protocol and write the JSON
/// report plus the flat CSV summary; returns the stdout summary.
pub fn cmd_experiment(
    config_path: &Path,
    out_report: &Path,
    out_csv: &Path,
) -> Result<String, CliError> {
    let config = ExperimentConfig::load(config_path)?;
    let config_dir = config_path.parent().unwrap_or(Path::new("."));
    let (samples, class_names) = load_experiment_samples(&config, config_dir)?;
    let report = run_experiment(&samples, &class_names, &config.protocol())?;

    let mut json = serde_json::to_vec_pretty(&report).expect("report serializes");
    json.push(b'\n');
    fs::write(out_report, json).map_err(|e| io_fail(out_report, e))?;
    fs::write(out_csv, experiment_csv(&report)).map_err(|e| io_fail(out_csv, e))?;

    Ok(experiment_summary(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
        let path = dir.join(name);
        fs::write(&path, text).unwrap();
        path
    }

    const TWO_CLASS_SPEC: &str = r#"{"classes": [
        {"row_step": 1, "col_step": 1, "noise": 0.1, "count": 12, "image_size": 12, "levels": 4},
        {"row_step": 2, "col_step": 1, "noise": 0.3, "count": 8, "image_size": 12, "levels": 4}
    ]}"#;

    #[test]
    fn synth_writes_images_and_labels() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "spec.json", TWO_CLASS_SPEC);
        let out = dir.path().join("corpus");
        let summary = cmd_synth(&spec, &out, 7).unwrap();
        assert!(summary.contains("total: 20 images"));
        assert!(out.join("c0-0000.pgm").exists());
        assert!(out.join("c1-0007.pgm").exists());
        let labels = csvio::read_labels(&out.join("labels.csv")).unwrap();
        assert_eq!(labels.len(), 20);
        assert_eq!(labels[0].label, "0");
        assert_eq!(labels[19].label, "1");
    }

    #[test]
    fn synth_is_deterministic_per_seed() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "spec.json", TWO_CLASS_SPEC);
        let out_a = dir.path().join("a");
        let out_b = dir.path().join("b");
        cmd_synth(&spec, &out_a, 7).unwrap();
        cmd_synth(&spec, &out_b, 7).unwrap();
        let bytes_a = fs::read(out_a.join("c0-0003.pgm")).unwrap();
        let bytes_b = fs::read(out_b.join("c0-0003.pgm")).unwrap();
        assert_eq!(bytes_a, bytes_b);
        let out_c = dir.path().join("c");
        cmd_synth(&spec, &out_c, 8).unwrap();
        let bytes_c = fs::read(out_c.join("c0-0003.pgm")).unwrap();
        assert_ne!(bytes_a, bytes_c, "different seed should change the corpus");
    }

    #[test]
    fn extract_preserves_synth_pixels_and_row_count() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "spec.json", TWO_CLASS_SPEC);
        let out = dir.path().join("corpus");
        cmd_synth(&spec, &out, 3).unwrap();
        let features_path = dir.path().join("features.csv");
        cmd_extract(&out, &out.join("labels.csv"), 4, &features_path).unwrap();
        let rows = csvio::read_features(&features_path).unwrap();
        assert_eq!(rows.len(), 20, "one feature row per image");
    }

    #[test]
    fn extract_fails_on_missing_image() {
        let dir = tempfile::tempdir().unwrap();
        let labels = write(dir.path(), "labels.csv", "id,label\nghost,0\n");
        let out = dir.path().join("features.csv");
        let err = cmd_extract(dir.path(), &labels, 4, &out).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.message().contains("ghost"), "message should name the file");
    }

    #[test]
    fn train_then_predict_reports_training_accuracy_one() {
        let dir = tempfile::tempdir().unwrap();
        let spec = write(dir.path(), "spec.json", TWO_CLASS_SPEC);
        let corpus = dir.path().join("corpus");
        cmd_synth(&spec, &corpus, 11).unwrap();
        let features = dir.path().join("features.csv");
        cmd_extract(&corpus, &corpus.join("labels.csv"), 4, &features).unwrap();
        let model = dir.path().join("model.json");
        cmd_train(&features, &model, &WblsHyperParams::default()).unwrap();
        let predictions = dir.path().join("predictions.csv");
        let summary = cmd_predict(&model, &features, &predictions).unwrap();
        assert_eq!(summary, "accuracy=1", "separated clusters should be memorized");
        let text = fs::read_to_string(&predictions).unwrap();
        assert!(text.starts_with("id,label,predicted\n"));
        assert_eq!(text.lines().count(), 21);
    }

    #[test]
    fn stage_resolves_assessment() {
        let dir = tempfile::tempdir().unwrap();
        let doc = write(
            dir.path(),
            "a.json",
            r#"{"left-top": 0, "left-middle": 0, "left-bottom": 0,
                "right-top": 0, "right-middle": 0, "right-bottom": 0,
                "large_opacities": false}"#,
        );
        assert_eq!(cmd_stage(&doc).unwrap(), "normal");
    }

    #[test]
    fn experiment_writes_report_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(
            dir.path(),
            "exp.json",
            r#"{
                "source": {"synthetic": {"classes": [
                    {"row_step": 1, "col_step": 1, "noise": 0.1, "count": 24, "image_size": 12, "levels": 4},
                    {"row_step": 2, "col_step": 1, "noise": 0.3, "count": 12, "image_size": 12, "levels": 4}
                ]}},
                "repeats": 2,
                "master_seed": 5
            }"#,
        );
        let report_path = dir.path().join("report.json");
        let csv_path = dir.path().join("summary.csv");
        let summary = cmd_experiment(&config, &report_path, &csv_path).unwrap();
        assert!(summary.contains("weighted_mean_accuracy="));
        assert!(summary.contains("minority_recall_margin="));

        let report: ExperimentReport =
            serde_json::from_slice(&fs::read(&report_path).unwrap()).unwrap();
        assert_eq!(report.records.len(), 2);
        assert_eq!(report.minority_class, 1);

        let csv = fs::read_to_string(&csv_path).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "repeat,seed,variant,accuracy,minority_recall");
        // Header + 2 repeats x 2 variants.
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("1,"));
        assert!(lines[1].contains(",weighted,"));
        assert!(lines[2].contains(",unweighted,"));
    }

    #[test]
    fn experiment_is_byte_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(
            dir.path(),
            "exp.json",
            r#"{
                "source": {"synthetic": {"classes": [
                    {"row_step": 1, "col_step": 1, "noise": 0.1, "count": 24, "image_size": 12, "levels": 4},
                    {"row_step": 2, "col_step": 1, "noise": 0.3, "count": 12, "image_size": 12, "levels": 4}
                ]}},
                "repeats": 2,
                "master_seed": 5
            }"#,
        );
        let report_a = dir.path().join("a.json");
        let report_b = dir.path().join("b.json");
        let csv_a = dir.path().join("a.csv");
        let csv_b = dir.path().join("b.csv");
        cmd_experiment(&config, &report_a, &csv_a).unwrap();
        cmd_experiment(&config, &report_b, &csv_b).unwrap();
        assert_eq!(fs::read(&report_a).unwrap(), fs::read(&report_b).unwrap());
        assert_eq!(fs::read(&csv_a).unwrap(), fs::read(&csv_b).unwrap());
    }
}
