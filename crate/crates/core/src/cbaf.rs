//! Confidence-based adaptive fusing of one motion source and any number of
//! appearance sources.
//!
//! A source's confidence is `lambda * alpha * x2 / x1`, the trust-weighted
//! ratio of its two smallest scores. At each step the most confident source
//! acts: the motion source commits to its argmin, while an appearance source
//! removes its argmin (a person the camera saw, hence not the wearer) from
//! every source and is then discarded.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{ScoreSource, SourceKind};

/// Smallest and second smallest entries.
fn two_smallest(scores: &[f64]) -> (f64, f64) {
    let mut x1 = f64::INFINITY;
    let mut x2 = f64::INFINITY;
    for &s in scores {
        if s < x1 {
            x2 = x1;
            x1 = s;
        } else if s < x2 {
            x2 = s;
        }
    }
    (x1, x2)
}

/// `+inf` when the best score is exactly zero and the runner-up is not.
pub fn confidence(src: &ScoreSource) -> Result<f64> {
    if src.scores.len() < 2 {
        return Err(Error::TooFewCandidates(src.scores.len()));
    }
    let weight = src.lambda_trust * src.alpha_mask;
    if weight == 0.0 {
        return Ok(0.0);
    }
    let (x1, x2) = two_smallest(&src.scores);
    if x1 == 0.0 {
        return Ok(if x2 > 0.0 { f64::INFINITY } else { weight });
    }
    Ok(weight * (x2 / x1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceRef {
    Motion,
    /// Index into the appearance sources as originally supplied.
    Appearance(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConfidence {
    pub source: SourceRef,
    #[serde(with = "confidence_json")]
    pub confidence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Predict { candidate: usize },
    Eliminate { candidate: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub step: usize,
    pub chosen: SourceRef,
    pub confidences: Vec<SourceConfidence>,
    pub action: Action,
}

/// Infinite confidences are written as the string `"inf"`.
mod confidence_json {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Finite(f64),
        Named(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Finite(*v).serialize(s)
        } else if *v == f64::INFINITY {
            Repr::Named("inf".into()).serialize(s)
        } else {
            Err(serde::ser::Error::custom(format!("unrepresentable confidence {v}")))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Finite(v) => Ok(v),
            Repr::Named(s) if s == "inf" => Ok(f64::INFINITY),
            Repr::Named(s) => Err(serde::de::Error::custom(format!("bad confidence {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionState {
    live_candidates: Vec<usize>,
    motion: ScoreSource,
    appearance: Vec<(usize, ScoreSource)>,
    trace: Vec<DecisionRecord>,
}

impl FusionState {
    pub fn new(motion: ScoreSource, appearance: Vec<ScoreSource>) -> Result<Self> {
        let n = motion.scores.len();
        if n == 0 {
            return Err(Error::InvalidInput("fusion needs at least one candidate".into()));
        }
        if motion.kind != SourceKind::Motion {
            return Err(Error::InvalidInput("first source must be the motion source".into()));
        }
        motion.validate()?;
        for (k, src) in appearance.iter().enumerate() {
            src.validate()?;
            if src.scores.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "appearance source {k} has {} scores for {n} candidates",
                    src.scores.len()
                )));
            }
        }
        Ok(Self {
            live_candidates: (0..n).collect(),
            motion,
            appearance: appearance.into_iter().enumerate().collect(),
            trace: Vec::new(),
        })
    }

    pub fn live_candidates(&self) -> &[usize] {
        &self.live_candidates
    }

    fn predict(mut self, chosen: SourceRef, confidences: Vec<SourceConfidence>, pos: usize) -> FusionOutcome {
        let candidate = self.live_candidates[pos];
        self.trace.push(DecisionRecord {
            step: self.trace.len(),
            chosen,
            confidences,
            action: Action::Predict { candidate },
        });
        FusionOutcome {
            prediction: candidate,
            trace: self.trace,
        }
    }

    fn remove_position(&mut self, pos: usize) {
        self.live_candidates.remove(pos);
        self.motion.scores.remove(pos);
        for (_, src) in &mut self.appearance {
            src.scores.remove(pos);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FusionOutcome {
    /// Index of the predicted candidate in the original ordering.
    pub prediction: usize,
    pub trace: Vec<DecisionRecord>,
}

pub fn fuse(mut state: FusionState) -> FusionOutcome {
    loop {
        if state.live_candidates.len() == 1 {
            return state.predict(SourceRef::Motion, Vec::new(), 0);
        }
        let motion_pos = state.motion.argmin().expect("live set is non-empty");
        let motion_conf = confidence(&state.motion).expect("at least two live candidates");
        let mut confidences = vec![SourceConfidence {
            source: SourceRef::Motion,
            confidence: motion_conf,
        }];
        if state.appearance.is_empty() {
            return state.predict(SourceRef::Motion, confidences, motion_pos);
        }

        // first maximum wins ties between appearance sources
        let mut best: Option<(usize, f64)> = None;
        for (slot, (original, src)) in state.appearance.iter().enumerate() {
            let c = confidence(src).expect("at least two live candidates");
            confidences.push(SourceConfidence {
                source: SourceRef::Appearance(*original),
                confidence: c,
            });
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((slot, c));
            }
        }
        let (slot, best_conf) = best.expect("appearance sources present");
        if motion_conf >= best_conf {
            return state.predict(SourceRef::Motion, confidences, motion_pos);
        }

        let (original, src) = state.appearance.remove(slot);
        let pos = src.argmin().expect("live set is non-empty");
        let candidate = state.live_candidates[pos];
        state.trace.push(DecisionRecord {
            step: state.trace.len(),
            chosen: SourceRef::Appearance(original),
            confidences,
            action: Action::Eliminate { candidate },
        });
        debug_assert!(state.live_candidates.len() >= 2);
        state.remove_position(pos);
    }
}
