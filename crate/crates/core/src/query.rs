//! A single identification problem and its on-disk directory layout.
//!
//! ```text
//! query.json                 index, see [`QueryIndex`]
//! ego/flow_0000.flo ...      t-1 flow rasters
//! ego/depth_0000.pfm ...     t-1 depth rasters
//! candidates/NN_<id>.masks.json         MaskSequence
//! candidates/NN_<id>.embeddings.json    CandidateEmbeddings
//! candidates/NN_<id>.prediction.json    MotionPrediction
//! detections.json            [Detection]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::appearance::CandidateEmbeddings;
use crate::error::{Error, Result};
use crate::io::{read_depth, read_flow, read_json, write_depth, write_flow, write_json};
use crate::motion_match::MotionPrediction;
use crate::rle::MaskSequence;
use crate::types::{DepthMap, Detection, FlowField};

pub const QUERY_SCHEMA_VERSION: u32 = 1;
pub const QUERY_INDEX_FILE: &str = "query.json";

#[derive(Debug, Clone, PartialEq)]
pub struct QueryInstance {
    pub sequence_length: usize,
    pub ego_flow: Vec<FlowField>,
    pub ego_depth: Vec<DepthMap>,
    pub candidates: Vec<MaskSequence>,
    pub candidate_motion_predictions: Vec<MotionPrediction>,
    pub candidate_embeddings: Vec<CandidateEmbeddings>,
    pub ego_detections: Vec<Detection>,
    /// Index into `candidates`; evaluation only.
    pub ground_truth: Option<usize>,
}

impl QueryInstance {
    pub fn candidate_count(&self) -> usize {
        self.candidates.len()
    }

    pub fn candidate_ids(&self) -> impl Iterator<Item = &str> {
        self.candidates.iter().map(|c| c.candidate_id.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.sequence_length;
        if t < 2 {
            return Err(Error::InvalidInput(format!("sequence length {t} < 2")));
        }
        let n = self.candidates.len();
        if n == 0 {
            return Err(Error::InvalidInput("query has no candidates".into()));
        }
        if self.ego_flow.len() != t - 1 || self.ego_depth.len() != t - 1 {
            return Err(Error::DimensionMismatch(format!(
                "{t}-frame sequence needs {} flow/depth rasters, got {}/{}",
                t - 1,
                self.ego_flow.len(),
                self.ego_depth.len()
            )));
        }
        if self.candidate_motion_predictions.len() != n || self.candidate_embeddings.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{n} candidates but {} predictions and {} embedding sets",
                self.candidate_motion_predictions.len(),
                self.candidate_embeddings.len()
            )));
        }
        for (i, c) in self.candidates.iter().enumerate() {
            c.validate(t)?;
            let p = &self.candidate_motion_predictions[i].candidate_id;
            let e = &self.candidate_embeddings[i].candidate_id;
            if p != &c.candidate_id || e != &c.candidate_id {
                return Err(Error::InvalidInput(format!(
                    "candidate {i} is {:?} but prediction is {p:?} and embeddings are {e:?}",
                    c.candidate_id
                )));
            }
            if self.candidates[..i].iter().any(|o| o.candidate_id == c.candidate_id) {
                return Err(Error::InvalidInput(format!(
                    "duplicate candidate id {:?}",
                    c.candidate_id
                )));
            }
        }
        let mut dim = None;
        let embeddings = self
            .candidate_embeddings
            .iter()
            .flat_map(|c| c.frames.iter().map(|f| (f.frame_index, &f.embedding)))
            .chain(self.ego_detections.iter().map(|d| (d.frame_index, &d.embedding)));
        for (frame, e) in embeddings {
            if frame >= t {
                return Err(Error::InvalidInput(format!(
                    "frame index {frame} outside {t}-frame sequence"
                )));
            }
            match dim {
                None => dim = Some(e.dim()),
                Some(d) if d != e.dim() => {
                    return Err(Error::DimensionMismatch(format!(
                        "embedding dims {d} and {} in one query",
                        e.dim()
                    )))
                }
                _ => {}
            }
        }
        self.ego_detections.iter().try_for_each(Detection::validate)?;
        if let Some(g) = self.ground_truth {
            if g >= n {
                return Err(Error::InvalidInput(format!("ground truth {g} out of {n} candidates")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EgoFrameFiles {
    pub flow: PathBuf,
    pub depth: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFiles {
    pub candidate_id: String,
    pub masks: PathBuf,
    pub embeddings: PathBuf,
    pub prediction: PathBuf,
}

/// Contents of `query.json`; paths are relative to the query directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryIndex {
    pub schema_version: u32,
    pub sequence_length: usize,
    pub ego: Vec<EgoFrameFiles>,
    pub candidates: Vec<CandidateFiles>,
    pub detections: PathBuf,
    pub ground_truth: Option<String>,
}

pub fn load_query(dir: impl AsRef<Path>) -> Result<QueryInstance> {
    let dir = dir.as_ref();
    let index_path = dir.join(QUERY_INDEX_FILE);
    let index: QueryIndex = read_json(&index_path)?;
    if index.schema_version != QUERY_SCHEMA_VERSION {
        return Err(Error::BadHeader(format!(
            "query schema_version {} (supported: {QUERY_SCHEMA_VERSION})",
            index.schema_version
        ))
        .in_file(&index_path));
    }
    let mut ego_flow = Vec::with_capacity(index.ego.len());
    let mut ego_depth = Vec::with_capacity(index.ego.len());
    for files in &index.ego {
        ego_flow.push(read_flow(dir.join(&files.flow))?);
        ego_depth.push(read_depth(dir.join(&files.depth))?);
    }
    let mut candidates = Vec::new();
    let mut predictions = Vec::new();
    let mut embeddings = Vec::new();
    for c in &index.candidates {
        candidates.push(read_json::<MaskSequence>(&dir.join(&c.masks))?);
        predictions.push(read_json::<MotionPrediction>(&dir.join(&c.prediction))?);
        embeddings.push(read_json::<CandidateEmbeddings>(&dir.join(&c.embeddings))?);
    }
    let ego_detections: Vec<Detection> = read_json(&dir.join(&index.detections))?;
    let ground_truth = match &index.ground_truth {
        None => None,
        Some(id) => Some(
            index
                .candidates
                .iter()
                .position(|c| &c.candidate_id == id)
                .ok_or_else(|| {
                    Error::InvalidInput(format!("ground truth {id:?} is not a candidate"))
                        .in_file(&index_path)
                })?,
        ),
    };
    let query = QueryInstance {
        sequence_length: index.sequence_length,
        ego_flow,
        ego_depth,
        candidates,
        candidate_motion_predictions: predictions,
        candidate_embeddings: embeddings,
        ego_detections,
        ground_truth,
    };
    query.validate().map_err(|e| e.in_file(&index_path))?;
    Ok(query)
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Writes `query` under `dir`, creating it if needed. Flow and depth are
/// stored as `f32`.
pub fn save_query(dir: impl AsRef<Path>, query: &QueryInstance) -> Result<()> {
    let dir = dir.as_ref();
    query.validate()?;
    for sub in ["ego", "candidates"] {
        let p = dir.join(sub);
        std::fs::create_dir_all(&p).map_err(|e| Error::io(&p, e))?;
    }
    let mut ego = Vec::with_capacity(query.ego_flow.len());
    for (i, (flow, depth)) in query.ego_flow.iter().zip(&query.ego_depth).enumerate() {
        let files = EgoFrameFiles {
            flow: PathBuf::from(format!("ego/flow_{i:04}.flo")),
            depth: PathBuf::from(format!("ego/depth_{i:04}.pfm")),
        };
        write_flow(dir.join(&files.flow), flow)?;
        write_depth(dir.join(&files.depth), depth)?;
        ego.push(files);
    }
    let mut candidates = Vec::with_capacity(query.candidates.len());
    for (i, masks) in query.candidates.iter().enumerate() {
        let stem = format!("{i:02}_{}", file_stem(&masks.candidate_id));
        let files = CandidateFiles {
            candidate_id: masks.candidate_id.clone(),
            masks: PathBuf::from(format!("candidates/{stem}.masks.json")),
            embeddings: PathBuf::from(format!("candidates/{stem}.embeddings.json")),
            prediction: PathBuf::from(format!("candidates/{stem}.prediction.json")),
        };
        write_json(&dir.join(&files.masks), masks)?;
        write_json(&dir.join(&files.embeddings), &query.candidate_embeddings[i])?;
        write_json(&dir.join(&files.prediction), &query.candidate_motion_predictions[i])?;
        candidates.push(files);
    }
    let detections = PathBuf::from("detections.json");
    write_json(&dir.join(&detections), &query.ego_detections)?;
    let index = QueryIndex {
        schema_version: QUERY_SCHEMA_VERSION,
        sequence_length: query.sequence_length,
        ego,
        candidates,
        detections,
        ground_truth: query
            .ground_truth
            .map(|g| query.candidates[g].candidate_id.clone()),
    };
    write_json(&dir.join(QUERY_INDEX_FILE), &index)
}
