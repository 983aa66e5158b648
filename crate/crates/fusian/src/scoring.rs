//! Likert-scale scoring of bipolar trait items into a scalar trait percentage.
//!
//! Each item is answered on a 1-5 scale keyed so that 1 is strong agreement
//! with the left pole and 5 with the right pole. Extremes earn 2 points for
//! their pole, the adjacent scores earn 1, and 3 is neutral. The trait
//! percentage for a pole is its share of all points awarded.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScoringError {
    #[error("invalid Likert score {score} for item {item_id} (must be 1..=5)")]
    InvalidScore { item_id: i64, score: i64 },
    #[error("all responses neutral: trait percentage is undefined")]
    NeutralOnly,
    #[error("empty response set")]
    EmptyInput,
    #[error("csv error: {0}")]
    Csv(String),
}

/// Which pole of the trait pair the percentage is computed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    Left,
    Right,
}

impl Pole {
    pub fn opposite(self) -> Pole {
        match self {
            Pole::Left => Pole::Right,
            Pole::Right => Pole::Left,
        }
    }
}

/// One answered questionnaire item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LikertResponse {
    pub item_id: i64,
    pub score: i64,
}

impl LikertResponse {
    pub fn new(item_id: i64, score: i64) -> Result<Self, ScoringError> {
        if !(1..=5).contains(&score) {
            return Err(ScoringError::InvalidScore { item_id, score });
        }
        Ok(Self { item_id, score })
    }
}

/// Cumulative points for the two poles.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PoleScores {
    pub left: u64,
    pub right: u64,
}

impl PoleScores {
    pub fn total(&self) -> u64 {
        self.left + self.right
    }
}

/// Points one response contributes: 1 -> (2,0), 2 -> (1,0), 3 -> (0,0),
/// 4 -> (0,1), 5 -> (0,2).
pub fn score_item(response: &LikertResponse) -> Result<(u64, u64), ScoringError> {
    match response.score {
        1 => Ok((2, 0)),
        2 => Ok((1, 0)),
        3 => Ok((0, 0)),
        4 => Ok((0, 1)),
        5 => Ok((0, 2)),
        s => Err(ScoringError::InvalidScore { item_id: response.item_id, score: s }),
    }
}

/// Sum pole points over a batch of responses.
pub fn accumulate(responses: &[LikertResponse]) -> Result<PoleScores, ScoringError> {
    let mut scores = PoleScores::default();
    for r in responses {
        let (l, right) = score_item(r)?;
        scores.left += l;
        scores.right += right;
    }
    Ok(scores)
}

/// Trait percentage for `target_pole`: `S_target / (S_left + S_right) * 100`.
///
/// Errors on an empty batch and on all-neutral batches (zero denominator);
/// the formula is undefined there and a silent 50 would hide degenerate
/// responders. The right-pole value is computed as the exact complement of
/// the left-pole value so the two always sum to 100.
pub fn trait_percentage(
    responses: &[LikertResponse],
    target_pole: Pole,
) -> Result<f64, ScoringError> {
    if responses.is_empty() {
        return Err(ScoringError::EmptyInput);
    }
    let scores = accumulate(responses)?;
    Ok(percentage_from_scores(&scores, target_pole)?)
}

/// The percentage formula on already-accumulated pole scores.
pub fn percentage_from_scores(
    scores: &PoleScores,
    target_pole: Pole,
) -> Result<f64, ScoringError> {
    let total = scores.total();
    if total == 0 {
        return Err(ScoringError::NeutralOnly);
    }
    let left = 100.0 * scores.left as f64 / total as f64;
    Ok(match target_pole {
        Pole::Left => left,
        Pole::Right => 100.0 - left,
    })
}

/// Read a response batch from a CSV file with columns `item_id,score`.
pub fn read_responses_csv(path: &Path) -> Result<Vec<LikertResponse>, ScoringError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ScoringError::Csv(e.to_string()))?;
    let mut out = Vec::new();
    for record in reader.deserialize() {
        let (item_id, score): (i64, i64) =
            record.map_err(|e| ScoringError::Csv(e.to_string()))?;
        out.push(LikertResponse::new(item_id, score)?);
    }
    Ok(out)
}
