//! GBZ70-2015 staging: per-region reader voting and the rule table mapping
//! six sub-region opacity levels (plus a large-opacities flag) to a final
//! stage.
//!
//! Ambiguities in the rule table are resolved conservatively: vote ties and
//! rule overlaps both break toward the more severe outcome, and the Stage I
//! threshold of "more than two" Level-1 regions is read literally (≥ 3), so
//! exactly two Level-1 regions stage as normal.

use serde::{Deserialize, Serialize};

/// The six lung sub-regions of an assessment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubRegion {
    LeftTop,
    LeftMiddle,
    LeftBottom,
    RightTop,
    RightMiddle,
    RightBottom,
}

impl SubRegion {
    /// All six sub-regions, in reading order (left column then right).
    pub const ALL: [SubRegion; 6] = [
        SubRegion::LeftTop,
        SubRegion::LeftMiddle,
        SubRegion::LeftBottom,
        SubRegion::RightTop,
        SubRegion::RightMiddle,
        SubRegion::RightBottom,
    ];

    /// Stable index of this sub-region within [`SubRegion::ALL`].
    pub fn index(self) -> usize {
        match self {
            SubRegion::LeftTop => 0,
            SubRegion::LeftMiddle => 1,
            SubRegion::LeftBottom => 2,
            SubRegion::RightTop => 3,
            SubRegion::RightMiddle => 4,
            SubRegion::RightBottom => 5,
        }
    }
}

/// Per-region opacity profusion level, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum OpacityLevel {
    Normal,
    Level1,
    Level2,
    Level3,
}

impl OpacityLevel {
    pub const ALL: [OpacityLevel; 4] = [
        OpacityLevel::Normal,
        OpacityLevel::Level1,
        OpacityLevel::Level2,
        OpacityLevel::Level3,
    ];

    /// Numeric severity, 0 (normal) through 3.
    pub fn severity(self) -> u8 {
        match self {
            OpacityLevel::Normal => 0,
            OpacityLevel::Level1 => 1,
            OpacityLevel::Level2 => 2,
            OpacityLevel::Level3 => 3,
        }
    }

    /// Inverse of [`OpacityLevel::severity`].
    pub fn from_severity(v: u8) -> Option<OpacityLevel> {
        match v {
            0 => Some(OpacityLevel::Normal),
            1 => Some(OpacityLevel::Level1),
            2 => Some(OpacityLevel::Level2),
            3 => Some(OpacityLevel::Level3),
            _ => None,
        }
    }
}

/// One whole-chest assessment: a level for each of the six sub-regions plus
/// the large-opacities flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChestAssessment {
    levels: [OpacityLevel; 6],
    large_opacities: bool,
}

impl ChestAssessment {
    /// `levels` is ordered as [`SubRegion::ALL`].
    pub fn new(levels: [OpacityLevel; 6], large_opacities: bool) -> Self {
        Self {
            levels,
            large_opacities,
        }
    }

    pub fn level(&self, region: SubRegion) -> OpacityLevel {
        self.levels[region.index()]
    }

    pub fn levels(&self) -> &[OpacityLevel; 6] {
        &self.levels
    }

    pub fn large_opacities(&self) -> bool {
        self.large_opacities
    }
}

/// Final pneumoconiosis stage, ordered by severity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FinalStage {
    Normal,
    StageI,
    StageII,
    StageIII,
}

impl FinalStage {
    /// The canonical lowercase name: `normal`, `stage-1`, `stage-2`,
    /// `stage-3`.
    pub fn name(self) -> &'static str {
        match self {
            FinalStage::Normal => "normal",
            FinalStage::StageI => "stage-1",
            FinalStage::StageII => "stage-2",
            FinalStage::StageIII => "stage-3",
        }
    }
}

impl core::fmt::Display for FinalStage {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

/// Error from [`majority_vote`] on an empty label sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("majority vote requires at least one reader label")]
pub struct EmptyVote;

/// Reduces several readers' labels for one region to a single level: the
/// most frequent label, with ties broken toward the more severe level.
pub fn majority_vote(reader_labels: &[OpacityLevel]) -> Result<OpacityLevel, EmptyVote> {
    if reader_labels.is_empty() {
        return Err(EmptyVote);
    }
    let mut counts = [0usize; 4];
    for &label in reader_labels {
        counts[label.severity() as usize] += 1;
    }
    let mut best = OpacityLevel::Normal;
    let mut best_count = counts[0];
    for &level in &OpacityLevel::ALL[1..] {
        let c = counts[level.severity() as usize];
        // `>=` walks severity upward, so equal counts settle on the more
        // severe level.
        if c >= best_count && c > 0 {
            best = level;
            best_count = c;
        }
    }
    Ok(best)
}

/// Applies the rule table to an assessment. Rules are evaluated in
/// descending stage order; the first match wins:
///
/// 1. large opacities → stage 3;
/// 2. any Level-3 region, or at least four Level-2 regions → stage 2;
/// 3. any Level-2 region, or at least three Level-1 regions → stage 1;
/// 4. otherwise → normal.
pub fn determine_final_stage(a: &ChestAssessment) -> FinalStage {
    let mut counts = [0usize; 4];
    for &level in a.levels() {
        counts[level.severity() as usize] += 1;
    }
    let (n1, n2, n3) = (counts[1], counts[2], counts[3]);
    if a.large_opacities() {
        FinalStage::StageIII
    } else if n3 >= 1 || n2 >= 4 {
        FinalStage::StageII
    } else if n2 >= 1 || n1 >= 3 {
        FinalStage::StageI
    } else {
        FinalStage::Normal
    }
}
