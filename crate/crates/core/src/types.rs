//! Domain types shared across the pipeline.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flow components with magnitude above this are "unknown flow".
pub const UNKNOWN_FLOW_THRESHOLD: f64 = 1e9;

/// Value written for invalid flow pixels that carry no sentinel of their own.
pub const UNKNOWN_FLOW: f32 = 1e10;

fn check_dims(width: usize, height: usize) -> Result<usize> {
    if width == 0 || height == 0 {
        return Err(Error::NonPositiveDims {
            width: width as i64,
            height: height as i64,
        });
    }
    width
        .checked_mul(height)
        .ok_or_else(|| Error::InvalidInput(format!("raster {width}x{height} too large")))
}

/// Dense per-pixel displacement between two consecutive frames, in pixels
/// per frame interval. Rasters are row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowField {
    width: usize,
    height: usize,
    fx: Vec<f64>,
    fy: Vec<f64>,
    valid: Vec<bool>,
}

impl FlowField {
    /// Builds a field with an explicit validity mask. Valid pixels must be finite.
    pub fn new(
        width: usize,
        height: usize,
        fx: Vec<f64>,
        fy: Vec<f64>,
        valid: Vec<bool>,
    ) -> Result<Self> {
        let n = check_dims(width, height)?;
        if fx.len() != n || fy.len() != n || valid.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "flow {width}x{height} needs {n} samples, got fx={} fy={} valid={}",
                fx.len(),
                fy.len(),
                valid.len()
            )));
        }
        for i in 0..n {
            if valid[i] && !(fx[i].is_finite() && fy[i].is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "non-finite flow at valid pixel {i}"
                )));
            }
        }
        Ok(Self {
            width,
            height,
            fx,
            fy,
            valid,
        })
    }

    /// Builds a field, marking pixels invalid where either component is
    /// non-finite or exceeds the unknown-flow threshold.
    pub fn from_components(width: usize, height: usize, fx: Vec<f64>, fy: Vec<f64>) -> Result<Self> {
        let valid = fx
            .iter()
            .zip(&fy)
            .map(|(&x, &y)| flow_sample_valid(x) && flow_sample_valid(y))
            .collect();
        Self::new(width, height, fx, fy, valid)
    }

    pub fn uniform(width: usize, height: usize, fx: f64, fy: f64) -> Result<Self> {
        let n = check_dims(width, height)?;
        Self::from_components(width, height, vec![fx; n], vec![fy; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.fx.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fx.is_empty()
    }

    pub fn fx(&self) -> &[f64] {
        &self.fx
    }

    pub fn fy(&self) -> &[f64] {
        &self.fy
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    /// Rounds every component to the nearest `f32`, the precision of the
    /// on-disk format.
    pub fn quantized(&self) -> Self {
        let q = |v: &[f64]| v.iter().map(|&x| x as f32 as f64).collect::<Vec<_>>();
        let fx = q(&self.fx);
        let fy = q(&self.fy);
        let valid = self
            .valid
            .iter()
            .zip(fx.iter().zip(&fy))
            .map(|(&v, (&x, &y))| v && x.is_finite() && y.is_finite())
            .collect();
        Self {
            width: self.width,
            height: self.height,
            fx,
            fy,
            valid,
        }
    }
}

pub(crate) fn flow_sample_valid(v: f64) -> bool {
    v.is_finite() && v.abs() <= UNKNOWN_FLOW_THRESHOLD
}

/// Per-pixel scene depth, row-major. Units are arbitrary but consistent
/// within a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: usize,
    height: usize,
    z: Vec<f64>,
    valid: Vec<bool>,
}

impl DepthMap {
    /// Builds a map; samples that are non-positive or non-finite are invalid.
    pub fn new(width: usize, height: usize, z: Vec<f64>) -> Result<Self> {
        let n = check_dims(width, height)?;
        if z.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "depth {width}x{height} needs {n} samples, got {}",
                z.len()
            )));
        }
        let valid = z.iter().map(|&d| d.is_finite() && d > 0.0).collect();
        Ok(Self {
            width,
            height,
            z,
            valid,
        })
    }

    pub fn uniform(width: usize, height: usize, z: f64) -> Result<Self> {
        let n = check_dims(width, height)?;
        Self::new(width, height, vec![z; n])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn quantized(&self) -> Self {
        let z: Vec<f64> = self.z.iter().map(|&d| d as f32 as f64).collect();
        let valid = z.iter().map(|&d| d.is_finite() && d > 0.0).collect();
        Self {
            width: self.width,
            height: self.height,
            z,
            valid,
        }
    }
}

/// Cumulative translational and rotational motion over a run of frame
/// intervals.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotionSignature {
    pub t_total: f64,
    pub r_total: f64,
}

impl MotionSignature {
    pub fn new(t_total: f64, r_total: f64) -> Result<Self> {
        if !(t_total.is_finite() && r_total.is_finite() && t_total >= 0.0 && r_total >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "motion signature ({t_total}, {r_total}) must be finite and non-negative"
            )));
        }
        Ok(Self { t_total, r_total })
    }
}

impl std::ops::Add for MotionSignature {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            t_total: self.t_total + rhs.t_total,
            r_total: self.r_total + rhs.r_total,
        }
    }
}

/// A re-identification feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddingDoc", into = "EmbeddingDoc")]
pub struct Embedding(Vec<f64>);

#[derive(Serialize, Deserialize)]
struct EmbeddingDoc {
    dim: usize,
    values: Vec<f64>,
}

impl TryFrom<EmbeddingDoc> for Embedding {
    type Error = Error;

    fn try_from(doc: EmbeddingDoc) -> Result<Self> {
        if doc.dim != doc.values.len() {
            return Err(Error::DimensionMismatch(format!(
                "embedding declares dim {} but has {} values",
                doc.dim,
                doc.values.len()
            )));
        }
        Embedding::new(doc.values)
    }
}

impl From<Embedding> for EmbeddingDoc {
    fn from(e: Embedding) -> Self {
        EmbeddingDoc {
            dim: e.0.len(),
            values: e.0,
        }
    }
}

impl Embedding {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("embedding has non-finite entries".into()));
        }
        Ok(Self(values))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

/// A person detected in one of the selected first-person frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub frame_index: usize,
    pub alpha_mask: f64,
    pub embedding: Embedding,
}

impl Detection {
    pub fn new(frame_index: usize, embedding: Embedding, alpha_mask: f64) -> Result<Self> {
        let d = Self {
            frame_index,
            alpha_mask,
            embedding,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha_mask) {
            return Err(Error::InvalidInput(format!(
                "alpha_mask {} outside [0, 1]",
                self.alpha_mask
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    Motion,
    Appearance,
}

/// One row of candidate scores (lower is a stronger match) with the trust
/// weights used when computing its confidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSource {
    pub kind: SourceKind,
    pub scores: Vec<f64>,
    pub lambda_trust: f64,
    pub alpha_mask: f64,
}

impl ScoreSource {
    pub fn motion(scores: Vec<f64>) -> Result<Self> {
        Self::new(SourceKind::Motion, scores, 1.0, 1.0)
    }

    pub fn appearance(scores: Vec<f64>, lambda_trust: f64, alpha_mask: f64) -> Result<Self> {
        Self::new(SourceKind::Appearance, scores, lambda_trust, alpha_mask)
    }

    pub fn new(kind: SourceKind, scores: Vec<f64>, lambda_trust: f64, alpha_mask: f64) -> Result<Self> {
        let s = Self {
            kind,
            scores,
            lambda_trust,
            alpha_mask,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(bad) = self.scores.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!(
                "score {bad} must be finite and non-negative"
            )));
        }
        // Zero trust is allowed: it mutes a source entirely.
        if !(self.lambda_trust.is_finite() && self.lambda_trust >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda_trust {} must be finite and non-negative",
                self.lambda_trust
            )));
        }
        if !(0.0..=1.0).contains(&self.alpha_mask) {
            return Err(Error::InvalidInput(format!(
                "alpha_mask {} outside [0, 1]",
                self.alpha_mask
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    /// Position of the smallest score; ties go to the lowest position.
    pub fn argmin(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, &s) in self.scores.iter().enumerate() {
            match best {
                Some(b) if self.scores[b] <= s => {}
                _ => best = Some(i),
            }
        }
        best
    }
}
