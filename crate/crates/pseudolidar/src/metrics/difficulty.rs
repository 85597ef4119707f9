//! KITTI difficulty buckets: Easy / Moderate / Hard.

use serde::{Deserialize, Serialize};

use crate::kitti_io::LabelRecord;

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Difficulty {
    Easy,
    Moderate,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Moderate, Difficulty::Hard];

    fn index(self) -> usize {
        match self {
            Difficulty::Easy => 0,
            Difficulty::Moderate => 1,
            Difficulty::Hard => 2,
        }
    }
}

/// Qualification thresholds for one difficulty level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyRule {
    pub min_height_px: f64,
    pub max_occlusion: i32,
    pub max_truncation: f64,
}

/// Thresholds for the three difficulties; Easy is the strictest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DifficultyCriteria {
    rules: [DifficultyRule; 3],
}

impl DifficultyCriteria {
    /// The KITTI benchmark convention.
    pub fn kitti() -> Self {
        Self {
            rules: [
                DifficultyRule {
                    min_height_px: 40.0,
                    max_occlusion: 0,
                    max_truncation: 0.15,
                },
                DifficultyRule {
                    min_height_px: 25.0,
                    max_occlusion: 1,
                    max_truncation: 0.30,
                },
                DifficultyRule {
                    min_height_px: 25.0,
                    max_occlusion: 2,
                    max_truncation: 0.50,
                },
            ],
        }
    }

    /// Custom thresholds; rejects non-monotone rule sets (each level must be
    /// at least as permissive as the previous).
    pub fn new(rules: [DifficultyRule; 3]) -> Result<Self, MetricsError> {
        for w in rules.windows(2) {
            let (strict, loose) = (w[0], w[1]);
            if loose.min_height_px > strict.min_height_px
                || loose.max_occlusion < strict.max_occlusion
                || loose.max_truncation < strict.max_truncation
            {
                return Err(MetricsError::InvalidCriteria(
                    "difficulty thresholds must loosen monotonically".into(),
                ));
            }
        }
        Ok(Self { rules })
    }

    pub fn rule(&self, difficulty: Difficulty) -> &DifficultyRule {
        &self.rules[difficulty.index()]
    }

    /// Whether a label qualifies at a difficulty: tall enough in the image,
    /// occlusion and truncation within bounds.
    pub fn qualifies(&self, label: &LabelRecord, difficulty: Difficulty) -> bool {
        let rule = self.rule(difficulty);
        label.height_px() >= rule.min_height_px
            && label.occlusion <= rule.max_occlusion
            && label.truncation <= rule.max_truncation
    }
}

impl Default for DifficultyCriteria {
    fn default() -> Self {
        Self::kitti()
    }
}

/// All difficulties the label qualifies for. With monotone criteria the
/// result is cumulative: Easy implies Moderate implies Hard.
pub fn assign_difficulty(label: &LabelRecord, criteria: &DifficultyCriteria) -> Vec<Difficulty> {
    Difficulty::ALL
        .into_iter()
        .filter(|&d| criteria.qualifies(label, d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kitti_io::{BBox2D, ClassName};

    fn label(height: f64, occlusion: i32, truncation: f64) -> LabelRecord {
        LabelRecord {
            class_name: ClassName::Car,
            truncation,
            occlusion,
            alpha: 0.0,
            bbox2d: BBox2D {
                left: 100.0,
                top: 100.0,
                right: 150.0,
                bottom: 100.0 + height,
            },
            dims: (1.5, 1.6, 3.9),
            location: (0.0, 1.5, 20.0),
            rotation_y: 0.0,
            score: None,
        }
    }

    #[test]
    fn clean_tall_box_qualifies_everywhere() {
        let d = assign_difficulty(&label(50.0, 0, 0.0), &DifficultyCriteria::kitti());
        assert_eq!(d, Difficulty::ALL.to_vec());
    }

    #[test]
    fn medium_box_skips_easy() {
        let d = assign_difficulty(&label(30.0, 1, 0.2), &DifficultyCriteria::kitti());
        assert_eq!(d, vec![Difficulty::Moderate, Difficulty::Hard]);
    }

    #[test]
    fn short_box_qualifies_nowhere() {
        let d = assign_difficulty(&label(20.0, 0, 0.0), &DifficultyCriteria::kitti());
        assert!(d.is_empty());
    }

    #[test]
    fn boundary_height_is_inclusive() {
        let d = assign_difficulty(&label(40.0, 0, 0.15), &DifficultyCriteria::kitti());
        assert_eq!(d.len(), 3);
        let d = assign_difficulty(&label(25.0, 2, 0.5), &DifficultyCriteria::kitti());
        assert_eq!(d, vec![Difficulty::Hard]);
    }

    #[test]
    fn non_monotone_criteria_rejected() {
        let mut rules = *DifficultyCriteria::kitti().rule(Difficulty::Easy);
        rules.max_occlusion = 2;
        let bad = [
            rules,
            DifficultyRule {
                min_height_px: 25.0,
                max_occlusion: 1, // tighter than Easy: invalid
                max_truncation: 0.30,
            },
            *DifficultyCriteria::kitti().rule(Difficulty::Hard),
        ];
        assert!(DifficultyCriteria::new(bad).is_err());
    }
}
