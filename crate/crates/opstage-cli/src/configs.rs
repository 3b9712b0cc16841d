//! On-disk document formats: synthetic corpus specs, experiment configs,
//! and chest assessment documents.
//!
//! Config structs here mirror the core types but give every field a default,
//! so config files only state what they change.

use std::fs;
use std::path::Path;

use opstage_core::experiment::ProtocolOptions;
use opstage_core::staging::{ChestAssessment, OpacityLevel, SubRegion};
use opstage_core::synth::SyntheticClassSpec;
use opstage_core::WblsHyperParams;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {reason}")]
    Invalid { path: String, reason: String },
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let bytes = fs::read(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&bytes).map_err(|source| ConfigError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// One synthetic class: generator parameters plus an optional display name.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthClassConfig {
    /// Label written to labels.csv; defaults to the class index.
    #[serde(default)]
    pub name: Option<String>,
    pub row_step: i64,
    pub col_step: i64,
    pub noise: f64,
    pub count: usize,
    pub image_size: usize,
    pub levels: usize,
}

impl SynthClassConfig {
    pub fn spec(&self) -> SyntheticClassSpec {
        SyntheticClassSpec {
            row_step: self.row_step,
            col_step: self.col_step,
            noise: self.noise,
            count: self.count,
            image_size: self.image_size,
            levels: self.levels,
        }
    }
}

/// The synthetic corpus spec file: a list of classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub classes: Vec<SynthClassConfig>,
}

impl SynthConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let config: Self = read_json(path)?;
        if config.classes.len() < 2 {
            return Err(ConfigError::Invalid {
                path: path.display().to_string(),
                reason: "a corpus spec needs at least two classes".into(),
            });
        }
        Ok(config)
    }

    pub fn specs(&self) -> Vec<SyntheticClassSpec> {
        self.classes.iter().map(SynthClassConfig::spec).collect()
    }

    /// Display name of class `k` (its index unless the spec names it).
    pub fn class_name(&self, k: usize) -> String {
        match &self.classes[k].name {
            Some(name) => name.clone(),
            None => k.to_string(),
        }
    }
}

/// Hyperparameters with per-field defaults for config files.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HyperConfig {
    pub feature_nodes: usize,
    pub enhancement_nodes: usize,
    pub lambda: f64,
}

impl Default for HyperConfig {
    fn default() -> Self {
        let d = WblsHyperParams::default();
        Self {
            feature_nodes: d.feature_nodes,
            enhancement_nodes: d.enhancement_nodes,
            lambda: d.lambda,
        }
    }
}

impl HyperConfig {
    pub fn hyper(&self) -> WblsHyperParams {
        WblsHyperParams {
            feature_nodes: self.feature_nodes,
            enhancement_nodes: self.enhancement_nodes,
            lambda: self.lambda,
            ..WblsHyperParams::default()
        }
    }
}

/// Where an experiment's samples come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetSource {
    /// Generate a corpus in memory; the corpus seed is the experiment's
    /// `master_seed`.
    Synthetic(SynthConfig),
    /// Read an existing feature table (header `id,label,f1..f16`).
    Features { path: String },
}

/// The experiment config file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub source: DatasetSource,
    #[serde(default = "default_train_fraction")]
    pub train_fraction: f64,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub hyper: HyperConfig,
    #[serde(default = "default_true")]
    pub run_unweighted_baseline: bool,
}

fn default_train_fraction() -> f64 {
    ProtocolOptions::default().train_fraction
}

fn default_repeats() -> usize {
    ProtocolOptions::default().repeats
}

fn default_true() -> bool {
    true
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let config: Self = read_json(path)?;
        if let DatasetSource::Synthetic(synth) = &config.source {
            if synth.classes.len() < 2 {
                return Err(ConfigError::Invalid {
                    path: path.display().to_string(),
                    reason: "a synthetic source needs at least two classes".into(),
                });
            }
        }
        Ok(config)
    }

    pub fn protocol(&self) -> ProtocolOptions {
        ProtocolOptions {
            train_fraction: self.train_fraction,
            repeats: self.repeats,
            master_seed: self.master_seed,
            hyper: self.hyper.hyper(),
            run_unweighted_baseline: self.run_unweighted_baseline,
        }
    }
}

/// A region entry: a single reading, or several readings to be resolved by
/// majority vote.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LevelEntry {
    Single(u8),
    Votes(Vec<u8>),
}

/// An assessment document: per-region profusion levels plus the large
/// opacities flag.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssessmentDoc {
    #[serde(rename = "left-top")]
    pub left_top: LevelEntry,
    #[serde(rename = "left-middle")]
    pub left_middle: LevelEntry,
    #[serde(rename = "left-bottom")]
    pub left_bottom: LevelEntry,
    #[serde(rename = "right-top")]
    pub right_top: LevelEntry,
    #[serde(rename = "right-middle")]
    pub right_middle: LevelEntry,
    #[serde(rename = "right-bottom")]
    pub right_bottom: LevelEntry,
    pub large_opacities: bool,
}

fn parse_level(path: &Path, region: SubRegion, raw: u8) -> Result<OpacityLevel, ConfigError> {
    OpacityLevel::ALL
        .get(raw as usize)
        .copied()
        .ok_or_else(|| ConfigError::Invalid {
            path: path.display().to_string(),
            reason: format!("region {region:?}: level {raw} outside 0..=3"),
        })
}

impl AssessmentDoc {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        read_json(path)
    }

    fn entry(&self, region: SubRegion) -> &LevelEntry {
        match region {
            SubRegion::LeftTop => &self.left_top,
            SubRegion::LeftMiddle => &self.left_middle,
            SubRegion::LeftBottom => &self.left_bottom,
            SubRegion::RightTop => &self.right_top,
            SubRegion::RightMiddle => &self.right_middle,
            SubRegion::RightBottom => &self.right_bottom,
        }
    }

    /// Resolves vote lists and range-checks every level.
    pub fn assessment(&self, path: &Path) -> Result<ChestAssessment, ConfigError> {
        let mut levels = [OpacityLevel::Normal; 6];
        for region in SubRegion::ALL {
            let level = match self.entry(region) {
                LevelEntry::Single(raw) => parse_level(path, region, *raw)?,
                LevelEntry::Votes(raws) => {
                    let votes: Vec<OpacityLevel> = raws
                        .iter()
                        .map(|&raw| parse_level(path, region, raw))
                        .collect::<Result<_, _>>()?;
                    opstage_core::staging::majority_vote(&votes).map_err(|_| {
                        ConfigError::Invalid {
                            path: path.display().to_string(),
                            reason: format!("region {region:?}: empty vote list"),
                        }
                    })?
                }
            };
            levels[region.index()] = level;
        }
        Ok(ChestAssessment::new(levels, self.large_opacities))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use opstage_core::staging::{determine_final_stage, FinalStage};

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        fs::write(&path, text).unwrap();
        path
    }

    #[test]
    fn synth_config_defaults_names_to_indices() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "synth.json",
            r#"{"classes": [
                {"row_step": 1, "col_step": 1, "noise": 0.0, "count": 3, "image_size": 8, "levels": 4},
                {"name": "rough", "row_step": 2, "col_step": 1, "noise": 0.5, "count": 3, "image_size": 8, "levels": 4}
            ]}"#,
        );
        let config = SynthConfig::load(&path).unwrap();
        assert_eq!(config.class_name(0), "0");
        assert_eq!(config.class_name(1), "rough");
        assert_eq!(config.specs()[1].row_step, 2);
    }

    #[test]
    fn synth_config_rejects_single_class() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "synth.json",
            r#"{"classes": [{"row_step": 1, "col_step": 1, "noise": 0.0, "count": 3, "image_size": 8, "levels": 4}]}"#,
        );
        assert!(matches!(SynthConfig::load(&path), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn experiment_config_fills_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "exp.json",
            r#"{"source": {"features": {"path": "f.csv"}}}"#,
        );
        let config = ExperimentConfig::load(&path).unwrap();
        let protocol = config.protocol();
        assert_eq!(protocol.train_fraction, 0.75);
        assert_eq!(protocol.repeats, 10);
        assert_eq!(protocol.master_seed, 0);
        assert_eq!(protocol.hyper.feature_nodes, 10);
        assert_eq!(protocol.hyper.enhancement_nodes, 10);
        assert_eq!(protocol.hyper.lambda, 1e-3);
        assert!(protocol.run_unweighted_baseline);
    }

    #[test]
    fn experiment_config_reads_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "exp.json",
            r#"{
                "source": {"synthetic": {"classes": [
                    {"row_step": 1, "col_step": 1, "noise": 0.35, "count": 20, "image_size": 16, "levels": 8},
                    {"row_step": 1, "col_step": 2, "noise": 0.45, "count": 10, "image_size": 16, "levels": 8}
                ]}},
                "train_fraction": 0.8,
                "repeats": 3,
                "master_seed": 99,
                "hyper": {"feature_nodes": 6, "lambda": 0.01},
                "run_unweighted_baseline": false
            }"#,
        );
        let config = ExperimentConfig::load(&path).unwrap();
        let protocol = config.protocol();
        assert_eq!(protocol.train_fraction, 0.8);
        assert_eq!(protocol.repeats, 3);
        assert_eq!(protocol.master_seed, 99);
        assert_eq!(protocol.hyper.feature_nodes, 6);
        assert_eq!(protocol.hyper.enhancement_nodes, 10);
        assert_eq!(protocol.hyper.lambda, 0.01);
        assert!(!protocol.run_unweighted_baseline);
        match &config.source {
            DatasetSource::Synthetic(synth) => assert_eq!(synth.classes.len(), 2),
            other => panic!("expected synthetic source, got {other:?}"),
        }
    }

    #[test]
    fn experiment_config_rejects_unknown_fields() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "exp.json",
            r#"{"source": {"features": {"path": "f.csv"}}, "seeds": 5}"#,
        );
        assert!(matches!(ExperimentConfig::load(&path), Err(ConfigError::Json { .. })));
    }

    #[test]
    fn assessment_doc_reads_scalar_levels() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "a.json",
            r#"{"left-top": 0, "left-middle": 1, "left-bottom": 2,
                "right-top": 0, "right-middle": 0, "right-bottom": 3,
                "large_opacities": false}"#,
        );
        let doc = AssessmentDoc::load(&path).unwrap();
        let assessment = doc.assessment(&path).unwrap();
        assert_eq!(assessment.level(SubRegion::RightBottom), OpacityLevel::Level3);
        assert_eq!(determine_final_stage(&assessment), FinalStage::StageII);
    }

    #[test]
    fn assessment_doc_resolves_votes_toward_severity() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "a.json",
            r#"{"left-top": [1, 2], "left-middle": 0, "left-bottom": 0,
                "right-top": 0, "right-middle": 0, "right-bottom": 0,
                "large_opacities": false}"#,
        );
        let doc = AssessmentDoc::load(&path).unwrap();
        let assessment = doc.assessment(&path).unwrap();
        // A 1-1 tie between Level1 and Level2 resolves to Level2.
        assert_eq!(assessment.level(SubRegion::LeftTop), OpacityLevel::Level2);
    }

    #[test]
    fn assessment_doc_rejects_level_4() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "a.json",
            r#"{"left-top": 4, "left-middle": 0, "left-bottom": 0,
                "right-top": 0, "right-middle": 0, "right-bottom": 0,
                "large_opacities": false}"#,
        );
        let doc = AssessmentDoc::load(&path).unwrap();
        assert!(matches!(doc.assessment(&path), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn assessment_doc_rejects_empty_votes() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "a.json",
            r#"{"left-top": [], "left-middle": 0, "left-bottom": 0,
                "right-top": 0, "right-middle": 0, "right-bottom": 0,
                "large_opacities": false}"#,
        );
        let doc = AssessmentDoc::load(&path).unwrap();
        assert!(matches!(doc.assessment(&path), Err(ConfigError::Invalid { .. })));
    }

    #[test]
    fn assessment_doc_rejects_missing_region() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(
            &dir,
            "a.json",
            r#"{"left-top": 0, "left-middle": 0, "left-bottom": 0,
                "right-top": 0, "right-middle": 0,
                "large_opacities": false}"#,
        );
        assert!(matches!(AssessmentDoc::load(&path), Err(ConfigError::Json { .. })));
    }
}
