//! Sliding-window comparison of predicted third-person motion against the
//! first-person motion signature.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ego_motion::{cumulative_motion, window_motion, FrameMotion};
use crate::error::{Error, Result};
use crate::types::{MotionSignature, ScoreSource};

/// Floor on the normalizing scale in [`NormalizationMode::EgoScale`].
pub const SCALE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    length: usize,
    stride: usize,
}

impl Default for WindowSpec {
    fn default() -> Self {
        Self { length: 8, stride: 4 }
    }
}

impl WindowSpec {
    /// Stride may not exceed length, otherwise some intervals would fall
    /// between windows.
    pub fn new(length: usize, stride: usize) -> Result<Self> {
        if length == 0 || stride == 0 {
            return Err(Error::InvalidConfig(format!(
                "window length {length} and stride {stride} must be >= 1"
            )));
        }
        if stride > length {
            return Err(Error::InvalidConfig(format!(
                "window stride {stride} exceeds length {length}"
            )));
        }
        Ok(Self { length, stride })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn stride(&self) -> usize {
        self.stride
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// Squared errors in native units.
    Raw,
    /// Each error term divided by the full-sequence ego total of its kind.
    #[default]
    EgoScale,
}

impl fmt::Display for NormalizationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormalizationMode::Raw => "raw",
            NormalizationMode::EgoScale => "ego-scale",
        })
    }
}

impl FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(Self::Raw),
            "ego-scale" => Ok(Self::EgoScale),
            other => Err(Error::InvalidConfig(format!(
                "unknown normalization {other:?} (expected raw or ego-scale)"
            ))),
        }
    }
}

/// Window start and length, both in frame intervals.
pub type Window = (usize, usize);

/// Regular windows at multiples of the stride, plus a final window flush with
/// the end when the regular grid stops short of it.
pub fn make_windows(interval_count: usize, spec: WindowSpec) -> Vec<Window> {
    if interval_count <= spec.length {
        return vec![(0, interval_count)];
    }
    let mut windows: Vec<Window> = (0..)
        .map(|k| k * spec.stride)
        .take_while(|&start| start + spec.length <= interval_count)
        .map(|start| (start, spec.length))
        .collect();
    let last_end = windows.last().map_or(0, |&(s, l)| s + l);
    if last_end < interval_count {
        windows.push((interval_count - spec.length, spec.length));
    }
    windows
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowPrediction {
    pub start: usize,
    pub length: usize,
    pub t_exo: f64,
    pub r_exo: f64,
}

impl WindowPrediction {
    pub fn signature(&self) -> MotionSignature {
        MotionSignature {
            t_total: self.t_exo,
            r_total: self.r_exo,
        }
    }
}

/// Predicted motion for one candidate, one entry per window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionPrediction {
    pub candidate_id: String,
    pub windows: Vec<WindowPrediction>,
}

impl MotionPrediction {
    pub fn from_signatures(
        candidate_id: impl Into<String>,
        windows: &[Window],
        signatures: &[MotionSignature],
    ) -> Self {
        Self {
            candidate_id: candidate_id.into(),
            windows: windows
                .iter()
                .zip(signatures)
                .map(|(&(start, length), s)| WindowPrediction {
                    start,
                    length,
                    t_exo: s.t_total,
                    r_exo: s.r_total,
                })
                .collect(),
        }
    }

    fn check_grid(&self, grid: &[Window]) -> Result<()> {
        let mismatch = |detail: String| Error::WindowCountMismatch {
            candidate: self.candidate_id.clone(),
            detail,
        };
        if self.windows.len() != grid.len() {
            return Err(mismatch(format!(
                "{} windows predicted, {} expected",
                self.windows.len(),
                grid.len()
            )));
        }
        for (w, &(start, length)) in self.windows.iter().zip(grid) {
            if (w.start, w.length) != (start, length) {
                return Err(mismatch(format!(
                    "window ({}, {}) where ({start}, {length}) expected",
                    w.start, w.length
                )));
            }
            if !(w.t_exo.is_finite() && w.r_exo.is_finite() && w.t_exo >= 0.0 && w.r_exo >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "candidate {}: window at {start} has invalid prediction ({}, {})",
                    self.candidate_id, w.t_exo, w.r_exo
                )));
            }
        }
        Ok(())
    }
}

/// Ego window signatures over the grid for `spec`.
pub fn ego_window_signatures(ego: &[FrameMotion], spec: WindowSpec) -> Result<Vec<MotionSignature>> {
    if ego.is_empty() {
        return Err(Error::EmptySequence);
    }
    make_windows(ego.len(), spec)
        .into_iter()
        .map(|(s, l)| window_motion(ego, s, l))
        .collect()
}

/// Mean over windows of the (optionally normalized) squared errors in the
/// translational and rotational totals.
pub fn motion_score(
    ego: &[FrameMotion],
    pred: &MotionPrediction,
    spec: WindowSpec,
    norm: NormalizationMode,
) -> Result<f64> {
    let grid = make_windows(ego.len(), spec);
    pred.check_grid(&grid)?;
    let ego_windows = ego_window_signatures(ego, spec)?;
    let (s_t, s_r) = match norm {
        NormalizationMode::Raw => (1.0, 1.0),
        NormalizationMode::EgoScale => {
            let full = cumulative_motion(ego)?;
            (full.t_total.max(SCALE_EPSILON), full.r_total.max(SCALE_EPSILON))
        }
    };
    let total: f64 = pred
        .windows
        .iter()
        .zip(&ego_windows)
        .map(|(p, e)| {
            let dt = (p.t_exo - e.t_total) / s_t;
            let dr = (p.r_exo - e.r_total) / s_r;
            dt * dt + dr * dr
        })
        .sum();
    Ok(total / grid.len() as f64)
}

pub fn rank_candidates(
    ego: &[FrameMotion],
    preds: &[MotionPrediction],
    spec: WindowSpec,
    norm: NormalizationMode,
) -> Result<ScoreSource> {
    if preds.is_empty() {
        return Err(Error::InvalidInput("no candidate predictions".into()));
    }
    let scores = preds
        .iter()
        .map(|p| motion_score(ego, p, spec, norm))
        .collect::<Result<Vec<_>>>()?;
    ScoreSource::motion(scores)
}
