//! First-person motion signals computed from flow and depth rasters.
//!
//! For each frame interval the translational signal is the median of
//! `depth * |flow|` and the rotational signal the median of `|flow|`, both
//! taken over pixels valid in flow and depth. Translation-induced flow falls
//! off with depth, so weighting by depth makes the first signal track camera
//! translation; rotation-induced flow carries no depth term.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{DepthMap, FlowField, MotionSignature};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FrameMotion {
    pub t_i: f64,
    pub r_i: f64,
}

impl From<FrameMotion> for MotionSignature {
    fn from(m: FrameMotion) -> Self {
        MotionSignature {
            t_total: m.t_i,
            r_total: m.r_i,
        }
    }
}

/// Median of a non-empty slice; even counts average the two central order
/// statistics. Reorders the slice.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    debug_assert!(!values.is_empty());
    let n = values.len();
    let mid = n / 2;
    let (lower, upper, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = lower.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lower + upper) / 2.0
    }
}

pub fn frame_motion(flow: &FlowField, depth: &DepthMap) -> Result<FrameMotion> {
    if flow.width() != depth.width() || flow.height() != depth.height() {
        return Err(Error::DimensionMismatch(format!(
            "flow is {}x{}, depth is {}x{}",
            flow.width(),
            flow.height(),
            depth.width(),
            depth.height()
        )));
    }
    let mut weighted = Vec::with_capacity(flow.len());
    let mut magnitudes = Vec::with_capacity(flow.len());
    let pixels = flow
        .fx()
        .iter()
        .zip(flow.fy())
        .zip(flow.valid())
        .zip(depth.z().iter().zip(depth.valid()));
    for (((&fx, &fy), &fv), (&z, &dv)) in pixels {
        if fv && dv {
            let mag = (fx * fx + fy * fy).sqrt();
            magnitudes.push(mag);
            weighted.push(z * mag);
        }
    }
    if magnitudes.is_empty() {
        return Err(Error::NoValidPixels);
    }
    Ok(FrameMotion {
        t_i: median_in_place(&mut weighted),
        r_i: median_in_place(&mut magnitudes),
    })
}

/// Per-interval motion for a sequence of aligned flow/depth rasters.
pub fn sequence_motion(flows: &[FlowField], depths: &[DepthMap]) -> Result<Vec<FrameMotion>> {
    if flows.len() != depths.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} flow rasters but {} depth rasters",
            flows.len(),
            depths.len()
        )));
    }
    flows
        .iter()
        .zip(depths)
        .map(|(f, d)| frame_motion(f, d))
        .collect()
}

pub fn cumulative_motion(frames: &[FrameMotion]) -> Result<MotionSignature> {
    if frames.is_empty() {
        return Err(Error::EmptySequence);
    }
    Ok(frames
        .iter()
        .fold(MotionSignature::default(), |acc, &m| acc + m.into()))
}

pub fn window_motion(frames: &[FrameMotion], start: usize, length: usize) -> Result<MotionSignature> {
    let end = start.checked_add(length);
    match end {
        Some(end) if length >= 1 && end <= frames.len() => cumulative_motion(&frames[start..end]),
        _ => Err(Error::OutOfRange {
            start,
            length,
            count: frames.len(),
        }),
    }
}
