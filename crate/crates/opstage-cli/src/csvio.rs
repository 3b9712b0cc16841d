//! CSV readers and writers for label lists, feature tables, predictions,
//! and experiment summaries.
//!
//! Feature values are printed with 17 significant digits (`{:.16e}`), which
//! is enough for a lossless `f64` round-trip, so extract -> train pipelines
//! see bit-identical values.

use std::fs::File;
use std::path::Path;

use opstage_core::{FeatureVector, LabeledSample};
use opstage_core::texture::FEATURE_DIM;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("cannot open {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
}

fn io_err(path: &Path, source: std::io::Error) -> CsvError {
    CsvError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn format_err(path: &Path, source: csv::Error) -> CsvError {
    CsvError::Format {
        path: path.display().to_string(),
        source,
    }
}

fn invalid(path: &Path, reason: impl Into<String>) -> CsvError {
    CsvError::Invalid {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

/// The header of a feature table: `id,label,f1..f16`.
pub fn feature_header() -> Vec<String> {
    let mut header = vec!["id".to_string(), "label".to_string()];
    header.extend((1..=FEATURE_DIM).map(|k| format!("f{k}")));
    header
}

/// One row of a labels table (`id,label`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelRow {
    pub id: String,
    pub label: String,
}

/// Reads a labels CSV with header `id,label`.
pub fn read_labels(path: &Path) -> Result<Vec<LabelRow>, CsvError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| format_err(path, e))?;
    if headers.len() != 2 || &headers[0] != "id" || &headers[1] != "label" {
        return Err(invalid(path, format!("expected header id,label, found {headers:?}")));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_err(path, e))?;
        rows.push(LabelRow {
            id: record[0].to_string(),
            label: record[1].to_string(),
        });
    }
    if rows.is_empty() {
        return Err(invalid(path, "no label rows"));
    }
    Ok(rows)
}

/// Writes a labels CSV with header `id,label`.
pub fn write_labels(path: &Path, rows: &[LabelRow]) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer
        .write_record(["id", "label"])
        .map_err(|e| format_err(path, e))?;
    for row in rows {
        writer
            .write_record([row.id.as_str(), row.label.as_str()])
            .map_err(|e| format_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

/// One row of a feature table, with the label kept as raw text.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: String,
    pub features: FeatureVector,
}

/// Writes a feature table with header `id,label,f1..f16`.
pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer
        .write_record(feature_header())
        .map_err(|e| format_err(path, e))?;
    for row in rows {
        let mut record = vec![row.id.clone(), row.label.clone()];
        record.extend(row.features.components().iter().map(|v| format!("{v:.16e}")));
        writer.write_record(&record).map_err(|e| format_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

/// Reads a feature table with header `id,label,f1..f16`.
pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>, CsvError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let headers = reader.headers().map_err(|e| format_err(path, e))?;
    let expected = feature_header();
    let found: Vec<&str> = headers.iter().collect();
    if found != expected.iter().map(String::as_str).collect::<Vec<_>>() {
        return Err(invalid(
            path,
            format!("expected header {}, found {}", expected.join(","), found.join(",")),
        ));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format_err(path, e))?;
        let mut components = [0.0f64; FEATURE_DIM];
        for (k, slot) in components.iter_mut().enumerate() {
            let text = &record[k + 2];
            *slot = text.parse::<f64>().map_err(|_| {
                invalid(path, format!("row {}: invalid number {text:?}", line + 2))
            })?;
            if !slot.is_finite() {
                return Err(invalid(path, format!("row {}: non-finite feature", line + 2)));
            }
        }
        rows.push(FeatureRow {
            id: record[0].to_string(),
            label: record[1].to_string(),
            features: FeatureVector(components),
        });
    }
    if rows.is_empty() {
        return Err(invalid(path, "no feature rows"));
    }
    Ok(rows)
}

/// Maps raw label strings to dense class indices by lexicographic order of
/// the distinct labels, and converts rows to in-memory samples.
pub fn rows_to_samples(rows: &[FeatureRow]) -> (Vec<LabeledSample>, Vec<String>) {
    let mut class_names: Vec<String> = rows.iter().map(|r| r.label.clone()).collect();
    class_names.sort();
    class_names.dedup();
    let samples = rows
        .iter()
        .map(|r| LabeledSample {
            id: r.id.clone(),
            features: r.features,
            label: class_names
                .binary_search(&r.label)
                .expect("label drawn from the distinct set"),
        })
        .collect();
    (samples, class_names)
}

/// One row of a predictions table (`id,label,predicted`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictionRow {
    pub id: String,
    pub label: String,
    pub predicted: String,
}

/// Writes a predictions CSV with header `id,label,predicted`.
pub fn write_predictions(path: &Path, rows: &[PredictionRow]) -> Result<(), CsvError> {
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    writer
        .write_record(["id", "label", "predicted"])
        .map_err(|e| format_err(path, e))?;
    for row in rows {
        writer
            .write_record([row.id.as_str(), row.label.as_str(), row.predicted.as_str()])
            .map_err(|e| format_err(path, e))?;
    }
    writer.flush().map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feature_header_has_18_columns() {
        let header = feature_header();
        assert_eq!(header.len(), 18);
        assert_eq!(header[0], "id");
        assert_eq!(header[1], "label");
        assert_eq!(header[2], "f1");
        assert_eq!(header[17], "f16");
    }

    #[test]
    fn features_round_trip_bit_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let mut components = [0.0f64; FEATURE_DIM];
        for (k, slot) in components.iter_mut().enumerate() {
            *slot = (k as f64 + 1.0).ln() * 0.123456789 - 0.5;
        }
        let rows = vec![
            FeatureRow {
                id: "a-000".into(),
                label: "0".into(),
                features: FeatureVector(components),
            },
            FeatureRow {
                id: "b-001".into(),
                label: "1".into(),
                features: FeatureVector([0.25; FEATURE_DIM]),
            },
        ];
        write_features(&path, &rows).unwrap();
        let back = read_features(&path).unwrap();
        assert_eq!(back.len(), 2);
        for (orig, got) in rows.iter().zip(&back) {
            assert_eq!(orig.id, got.id);
            assert_eq!(orig.label, got.label);
            for (x, y) in orig.features.components().iter().zip(got.features.components()) {
                assert_eq!(x.to_bits(), y.to_bits(), "feature value must survive the CSV");
            }
        }
    }

    #[test]
    fn feature_values_print_17_significant_digits() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let rows = vec![FeatureRow {
            id: "x".into(),
            label: "0".into(),
            features: FeatureVector([std::f64::consts::PI; FEATURE_DIM]),
        }];
        write_features(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(
            text.contains("3.1415926535897931e0"),
            "expected 17-significant-digit rendering, got: {text}"
        );
    }

    #[test]
    fn labels_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        let rows = vec![
            LabelRow { id: "c0-0000".into(), label: "0".into() },
            LabelRow { id: "c1-0000".into(), label: "1".into() },
        ];
        write_labels(&path, &rows).unwrap();
        assert_eq!(read_labels(&path).unwrap(), rows);
    }

    #[test]
    fn read_labels_rejects_wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("labels.csv");
        std::fs::write(&path, "name,klass\nx,0\n").unwrap();
        assert!(matches!(read_labels(&path), Err(CsvError::Invalid { .. })));
    }

    #[test]
    fn read_features_rejects_wrong_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        std::fs::write(&path, "id,label,f1\nx,0,1.0\n").unwrap();
        assert!(matches!(read_features(&path), Err(CsvError::Invalid { .. })));
    }

    #[test]
    fn read_features_rejects_bad_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let mut text = feature_header().join(",");
        text.push('\n');
        text.push_str("x,0");
        for _ in 0..FEATURE_DIM {
            text.push_str(",nope");
        }
        text.push('\n');
        std::fs::write(&path, text).unwrap();
        assert!(matches!(read_features(&path), Err(CsvError::Invalid { .. })));
    }

    #[test]
    fn rows_to_samples_sorts_distinct_labels() {
        let mk = |id: &str, label: &str| FeatureRow {
            id: id.into(),
            label: label.into(),
            features: FeatureVector([0.0; FEATURE_DIM]),
        };
        let rows = vec![mk("a", "small"), mk("b", "large"), mk("c", "small")];
        let (samples, class_names) = rows_to_samples(&rows);
        assert_eq!(class_names, vec!["large".to_string(), "small".to_string()]);
        assert_eq!(samples[0].label, 1);
        assert_eq!(samples[1].label, 0);
        assert_eq!(samples[2].label, 1);
    }
}
