//! End-to-end identification of the camera wearer for one query.

use log::debug;
use serde::{Deserialize, Serialize};

use crate::appearance::{build_sources, selected_frame_set, AppearanceConfig};
use crate::cbaf::{fuse, DecisionRecord, FusionState};
use crate::ego_motion::sequence_motion;
use crate::error::Result;
use crate::motion_match::{rank_candidates, NormalizationMode, WindowSpec};
use crate::query::QueryInstance;
use crate::types::{Detection, ScoreSource};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub window: WindowSpec,
    pub normalization: NormalizationMode,
    pub appearance: AppearanceConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Identification {
    pub prediction: usize,
    pub candidate_id: String,
    pub motion: ScoreSource,
    pub appearance: Vec<ScoreSource>,
    pub trace: Vec<DecisionRecord>,
}

/// Detections taken from the first, middle and last ego frames.
pub fn usable_detections(query: &QueryInstance) -> Vec<Detection> {
    let frames = selected_frame_set(query.sequence_length);
    query
        .ego_detections
        .iter()
        .filter(|d| frames.contains(&d.frame_index))
        .cloned()
        .collect()
}

pub fn identify(query: &QueryInstance, cfg: &PipelineConfig) -> Result<Identification> {
    query.validate()?;
    let ego = sequence_motion(&query.ego_flow, &query.ego_depth)?;
    let motion = rank_candidates(&ego, &query.candidate_motion_predictions, cfg.window, cfg.normalization)?;
    let dets = usable_detections(query);
    if dets.len() != query.ego_detections.len() {
        debug!(
            "ignoring {} detections outside the selected frames",
            query.ego_detections.len() - dets.len()
        );
    }
    let appearance = build_sources(&dets, &query.candidate_embeddings, cfg.appearance)?;
    let outcome = fuse(FusionState::new(motion.clone(), appearance.clone())?);
    Ok(Identification {
        prediction: outcome.prediction,
        candidate_id: query.candidates[outcome.prediction].candidate_id.clone(),
        motion,
        appearance,
        trace: outcome.trace,
    })
}
