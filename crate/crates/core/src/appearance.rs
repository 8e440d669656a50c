//! Appearance sources: each person detected in the first-person view is
//! compared against every third-person candidate. A small distance means the
//! candidate was seen by the camera, so it cannot be the wearer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{Detection, Embedding, ScoreSource};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppearanceConfig {
    lambda_trust: f64,
}

impl Default for AppearanceConfig {
    fn default() -> Self {
        Self { lambda_trust: 1.0 }
    }
}

impl AppearanceConfig {
    pub fn new(lambda_trust: f64) -> Result<Self> {
        if !(lambda_trust.is_finite() && lambda_trust > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "lambda_trust {lambda_trust} must be finite and > 0"
            )));
        }
        Ok(Self { lambda_trust })
    }

    pub fn lambda_trust(&self) -> f64 {
        self.lambda_trust
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameEmbedding {
    pub frame_index: usize,
    pub embedding: Embedding,
}

/// Re-identification embeddings for one candidate, one per exo frame in
/// which the candidate is visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEmbeddings {
    pub candidate_id: String,
    pub frames: Vec<FrameEmbedding>,
}

impl CandidateEmbeddings {
    pub fn embeddings(&self) -> Vec<Embedding> {
        self.frames.iter().map(|f| f.embedding.clone()).collect()
    }
}

/// First, middle and last frame of a `t`-frame sequence.
pub fn select_frames(t: usize) -> [usize; 3] {
    let last = t.saturating_sub(1);
    [0, last / 2, last]
}

/// [`select_frames`] with duplicates removed, ascending.
pub fn selected_frame_set(t: usize) -> Vec<usize> {
    let mut frames = select_frames(t).to_vec();
    frames.dedup();
    frames
}

pub fn embedding_distance(a: &Embedding, b: &Embedding) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "embedding dims {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Mean distance from the detection to the candidate's frame embeddings.
pub fn appearance_score(det: &Detection, candidate_frames: &[Embedding]) -> Result<f64> {
    if candidate_frames.is_empty() {
        return Err(Error::NoCandidateEmbeddings(String::new()));
    }
    let total = candidate_frames
        .iter()
        .map(|e| embedding_distance(&det.embedding, e))
        .sum::<Result<f64>>()?;
    Ok(total / candidate_frames.len() as f64)
}

pub fn build_sources(
    dets: &[Detection],
    candidates: &[CandidateEmbeddings],
    cfg: AppearanceConfig,
) -> Result<Vec<ScoreSource>> {
    if dets.is_empty() {
        return Ok(Vec::new());
    }
    let frames: Vec<Vec<Embedding>> = candidates.iter().map(CandidateEmbeddings::embeddings).collect();
    if let Some(c) = candidates.iter().find(|c| c.frames.is_empty()) {
        return Err(Error::NoCandidateEmbeddings(c.candidate_id.clone()));
    }
    dets.iter()
        .map(|det| {
            det.validate()?;
            let scores = frames
                .iter()
                .map(|f| appearance_score(det, f))
                .collect::<Result<Vec<_>>>()?;
            ScoreSource::appearance(scores, cfg.lambda_trust, det.alpha_mask)
        })
        .collect()
}
