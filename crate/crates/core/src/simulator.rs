//! Synthetic pinhole-camera scenes with known ego motion.
//!
//! Flow is produced by the instantaneous motion-field equations, so every
//! raster has a closed form and the whole pipeline can be checked against
//! analytic ground truth. The simulator also stands in for the learned
//! third-person motion predictor: it renders each candidate's own trajectory
//! and reports its window signatures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::appearance::{selected_frame_set, CandidateEmbeddings, FrameEmbedding};
use crate::ego_motion::{sequence_motion, FrameMotion};
use crate::error::{Error, Result};
use crate::motion_match::{ego_window_signatures, make_windows, MotionPrediction, WindowSpec};
use crate::query::QueryInstance;
use crate::rle::{BinaryMask, MaskSequence, RleMask};
use crate::types::{DepthMap, Detection, Embedding, FlowField};

/// Largest rotation rate (radians per frame) for which the first-order flow
/// model is used.
pub const MAX_ROTATION_RATE: f64 = 0.2;

/// Derives an independent stream seed (splitmix64 finalizer).
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(split_seed(seed, stream))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraIntrinsics {
    pub focal: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        Self {
            focal: 40.0,
            cx: 15.5,
            cy: 11.5,
            width: 32,
            height: 24,
        }
    }
}

impl CameraIntrinsics {
    pub fn validate(&self) -> Result<()> {
        let ok = self.focal.is_finite()
            && self.focal > 0.0
            && self.width > 0
            && self.height > 0
            && (0.0..self.width as f64).contains(&self.cx)
            && (0.0..self.height as f64).contains(&self.cy);
        if !ok {
            return Err(Error::InvalidConfig(format!("invalid intrinsics {self:?}")));
        }
        Ok(())
    }
}

/// Camera motion over one frame interval: translation in scene units and
/// rotation rates in radians.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MotionStep {
    pub translation: [f64; 3],
    pub rotation: [f64; 3],
}

impl MotionStep {
    pub fn translation(tx: f64, ty: f64, tz: f64) -> Self {
        Self {
            translation: [tx, ty, tz],
            rotation: [0.0; 3],
        }
    }

    pub fn rotation(wx: f64, wy: f64, wz: f64) -> Self {
        Self {
            translation: [0.0; 3],
            rotation: [wx, wy, wz],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.translation.iter().chain(&self.rotation).all(|v| v.is_finite());
        let rate = self.rotation.iter().map(|w| w * w).sum::<f64>().sqrt();
        if !finite || rate > MAX_ROTATION_RATE {
            return Err(Error::InvalidConfig(format!(
                "motion step {self:?} must be finite with |omega| <= {MAX_ROTATION_RATE}"
            )));
        }
        Ok(())
    }

    fn scaled(&self, k: f64) -> Self {
        Self {
            translation: self.translation.map(|v| v * k),
            rotation: self.rotation.map(|v| v * k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthModel {
    Plane { z: f64 },
    /// Independent uniform depth per pixel, redrawn every frame.
    Random { z_min: f64, z_max: f64 },
}

impl DepthModel {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            DepthModel::Plane { z } => z.is_finite() && z > 0.0,
            DepthModel::Random { z_min, z_max } => {
                z_min.is_finite() && z_max.is_finite() && z_min > 0.0 && z_max >= z_min
            }
        };
        if !ok {
            return Err(Error::InvalidConfig(format!("invalid depth model {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub depth: DepthModel,
    pub intrinsics: CameraIntrinsics,
    pub trajectory: Vec<MotionStep>,
    pub seed: u64,
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        self.depth.validate()?;
        self.intrinsics.validate()?;
        if self.trajectory.is_empty() {
            return Err(Error::InvalidConfig("trajectory is empty".into()));
        }
        self.trajectory.iter().try_for_each(MotionStep::validate)
    }

    /// The same scene with every depth multiplied by `k`.
    pub fn with_depth_scale(&self, k: f64) -> Self {
        let depth = match self.depth {
            DepthModel::Plane { z } => DepthModel::Plane { z: z * k },
            DepthModel::Random { z_min, z_max } => DepthModel::Random {
                z_min: z_min * k,
                z_max: z_max * k,
            },
        };
        Self {
            depth,
            ..self.clone()
        }
    }

    fn depth_raster(&self, step_index: usize) -> Vec<f64> {
        let n = self.intrinsics.width * self.intrinsics.height;
        match self.depth {
            DepthModel::Plane { z } => vec![z; n],
            DepthModel::Random { z_min, z_max } => {
                let mut r = rng(self.seed, step_index as u64);
                (0..n)
                    .map(|_| z_min + r.random::<f64>() * (z_max - z_min))
                    .collect()
            }
        }
    }
}

/// Instantaneous motion field at pixel offset `(x, y)` from the principal
/// point, at depth `z`.
pub fn motion_field(focal: f64, x: f64, y: f64, z: f64, step: &MotionStep) -> (f64, f64) {
    let [tx, ty, tz] = step.translation;
    let [wx, wy, wz] = step.rotation;
    let fx = (x * tz - focal * tx) / z + (x * y * wx / focal - (focal + x * x / focal) * wy + y * wz);
    let fy = (y * tz - focal * ty) / z + ((focal + y * y / focal) * wx - x * y * wy - x * wz);
    (fx, fy)
}

pub fn render_flow(scene: &SceneSpec, step_index: usize) -> Result<(FlowField, DepthMap)> {
    let step = scene.trajectory.get(step_index).ok_or(Error::OutOfRange {
        start: step_index,
        length: 1,
        count: scene.trajectory.len(),
    })?;
    let cam = scene.intrinsics;
    let z = scene.depth_raster(step_index);
    let n = cam.width * cam.height;
    let mut fx = Vec::with_capacity(n);
    let mut fy = Vec::with_capacity(n);
    for row in 0..cam.height {
        for col in 0..cam.width {
            let depth = z[row * cam.width + col];
            let (u, v) = motion_field(cam.focal, col as f64 - cam.cx, row as f64 - cam.cy, depth, step);
            fx.push(u);
            fy.push(v);
        }
    }
    Ok((
        FlowField::from_components(cam.width, cam.height, fx, fy)?,
        DepthMap::new(cam.width, cam.height, z)?,
    ))
}

/// All rasters of a scene, rounded to the `f32` storage precision.
pub fn render_sequence(scene: &SceneSpec) -> Result<(Vec<FlowField>, Vec<DepthMap>)> {
    scene.validate()?;
    let mut flows = Vec::with_capacity(scene.trajectory.len());
    let mut depths = Vec::with_capacity(scene.trajectory.len());
    for i in 0..scene.trajectory.len() {
        let (f, d) = render_flow(scene, i)?;
        flows.push(f.quantized());
        depths.push(d.quantized());
    }
    Ok((flows, depths))
}

fn trajectory_motion(scene: &SceneSpec) -> Result<Vec<FrameMotion>> {
    let (flows, depths) = render_sequence(scene)?;
    sequence_motion(&flows, &depths)
}

/// How a distractor's trajectory relates to the wearer's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistractorKind {
    /// A fresh random trajectory.
    Independent,
    /// The wearer's trajectory plus Gaussian noise of relative size `sigma`.
    Perturbed { sigma: f64 },
    /// The wearer's trajectory with translation and rotation scaled.
    Scaled { factor: f64 },
    /// The wearer's trajectory with the x and y rotation axes exchanged.
    RotationSwap,
    /// The wearer's trajectory rotated in time by `shift` steps.
    TimeShift { shift: usize },
}

/// A candidate whose motion the simulator knows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimCandidate {
    pub candidate_id: String,
    pub trajectory: Vec<MotionStep>,
    pub depth_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub scene: SceneSpec,
    pub candidates: Vec<SimCandidate>,
    pub wearer: usize,
}

/// Window signatures each candidate would produce if it wore the camera.
pub fn oracle_predictions(scenario: &Scenario, spec: WindowSpec) -> Result<Vec<MotionPrediction>> {
    let grid = make_windows(scenario.scene.trajectory.len(), spec);
    scenario
        .candidates
        .iter()
        .map(|c| {
            let scene = SceneSpec {
                trajectory: c.trajectory.clone(),
                seed: c.depth_seed,
                ..scenario.scene.clone()
            };
            let motion = trajectory_motion(&scene)?;
            let sigs = ego_window_signatures(&motion, spec)?;
            Ok(MotionPrediction::from_signatures(c.candidate_id.clone(), &grid, &sigs))
        })
        .collect()
}

/// Knobs for [`make_query`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryOptions {
    pub n_distractors: usize,
    pub distractor: DistractorKind,
    /// Adds a distractor that exactly replays the wearer's motion and is
    /// always seen in the ego view, so only appearance can separate them.
    pub ambiguous_pair: bool,
    /// Chance that each other non-wearer is detected in the ego view.
    pub detection_probability: f64,
    pub embedding_dim: usize,
    pub embedding_noise: f64,
    /// Relative Gaussian noise on every predicted window value.
    pub motion_noise: f64,
    pub window: WindowSpec,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            n_distractors: 3,
            distractor: DistractorKind::Independent,
            ambiguous_pair: false,
            detection_probability: 0.5,
            embedding_dim: 32,
            embedding_noise: 0.0,
            motion_noise: 0.0,
            window: WindowSpec::default(),
        }
    }
}

impl QueryOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = (0.0..=1.0).contains(&self.detection_probability)
            && self.embedding_dim > 0
            && self.embedding_noise.is_finite()
            && self.embedding_noise >= 0.0
            && self.motion_noise.is_finite()
            && self.motion_noise >= 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!("invalid query options {self:?}")));
        }
        match self.distractor {
            DistractorKind::Perturbed { sigma } if !(sigma.is_finite() && sigma >= 0.0) => {
                Err(Error::InvalidConfig(format!("perturbation sigma {sigma}")))
            }
            DistractorKind::Scaled { factor } if !(factor.is_finite() && factor >= 0.0) => {
                Err(Error::InvalidConfig(format!("scale factor {factor}")))
            }
            _ => Ok(()),
        }
    }
}

const TRANSLATION_SIGMA: f64 = 0.05;
const ROTATION_SIGMA: f64 = 0.02;
/// Random trajectories keep |omega| under this so a x3 scaling stays valid.
const RANDOM_ROTATION_CAP: f64 = 0.06;

fn clamp_rotation(mut step: MotionStep, cap: f64) -> MotionStep {
    let rate = step.rotation.iter().map(|w| w * w).sum::<f64>().sqrt();
    if rate > cap {
        step.rotation = step.rotation.map(|w| w * cap / rate);
    }
    step
}

pub fn random_trajectory(steps: usize, seed: u64) -> Vec<MotionStep> {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let t = Normal::new(0.0, TRANSLATION_SIGMA).unwrap();
    let w = Normal::new(0.0, ROTATION_SIGMA).unwrap();
    (0..steps)
        .map(|_| {
            let step = MotionStep {
                translation: [t.sample(&mut r), t.sample(&mut r), t.sample(&mut r)],
                rotation: [w.sample(&mut r), w.sample(&mut r), w.sample(&mut r)],
            };
            clamp_rotation(step, RANDOM_ROTATION_CAP)
        })
        .collect()
}

/// A scene with a random wearer trajectory over `sequence_length` frames and
/// random per-pixel depth in [2, 10].
pub fn random_scene(sequence_length: usize, seed: u64) -> Result<SceneSpec> {
    if sequence_length < 2 {
        return Err(Error::InvalidConfig(format!("sequence length {sequence_length} < 2")));
    }
    Ok(SceneSpec {
        depth: DepthModel::Random { z_min: 2.0, z_max: 10.0 },
        intrinsics: CameraIntrinsics::default(),
        trajectory: random_trajectory(sequence_length - 1, split_seed(seed, 1)),
        seed: split_seed(seed, 2),
    })
}

fn distractor_trajectory(kind: DistractorKind, wearer: &[MotionStep], seed: u64) -> Vec<MotionStep> {
    match kind {
        DistractorKind::Independent => random_trajectory(wearer.len(), seed),
        DistractorKind::Perturbed { sigma } => {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            wearer
                .iter()
                .map(|s| {
                    let mut out = *s;
                    for v in &mut out.translation {
                        *v += sigma * TRANSLATION_SIGMA * r.sample::<f64, _>(StandardNormal);
                    }
                    for v in &mut out.rotation {
                        *v += sigma * ROTATION_SIGMA * r.sample::<f64, _>(StandardNormal);
                    }
                    clamp_rotation(out, MAX_ROTATION_RATE)
                })
                .collect()
        }
        DistractorKind::Scaled { factor } => wearer
            .iter()
            .map(|s| clamp_rotation(s.scaled(factor), MAX_ROTATION_RATE))
            .collect(),
        DistractorKind::RotationSwap => wearer
            .iter()
            .map(|s| {
                let [wx, wy, wz] = s.rotation;
                MotionStep {
                    translation: s.translation,
                    rotation: [wy, wx, wz],
                }
            })
            .collect(),
        DistractorKind::TimeShift { shift } => {
            let mut out = wearer.to_vec();
            if !out.is_empty() {
                let k = shift % out.len();
                out.rotate_left(k);
            }
            out
        }
    }
}

fn gaussian_vector(r: &mut ChaCha8Rng, dim: usize, center: Option<&[f64]>, sigma: f64) -> Vec<f64> {
    (0..dim)
        .map(|i| {
            let c = center.map_or(0.0, |c| c[i]);
            if sigma == 0.0 && center.is_some() {
                c
            } else {
                c + sigma * r.sample::<f64, _>(StandardNormal)
            }
        })
        .collect()
}

/// A box mask for candidate `slot` drifting with the frame index.
fn candidate_mask(slot: usize, frame: usize, width: usize, height: usize) -> BinaryMask {
    let box_w = (width / 6).max(1);
    let box_h = (height / 2).max(1);
    let x0 = (slot * (box_w + 1) + frame / 4) % (width - box_w + 1);
    let y0 = (height - box_h) / 2;
    let data = (0..width * height)
        .map(|i| {
            let (x, y) = (i % width, i / width);
            (x0..x0 + box_w).contains(&x) && (y0..y0 + box_h).contains(&y)
        })
        .collect();
    BinaryMask::new(width, height, data).expect("dimensions are consistent")
}

/// A simulated query together with the scenario that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedQuery {
    pub query: QueryInstance,
    pub scenario: Scenario,
}

/// Builds a full query: the wearer follows `scene.trajectory`, distractors
/// follow trajectories derived per `opts`, and the wearer sits at a random
/// candidate position. Only non-wearers are ever detected in the ego view.
pub fn make_query(scene: &SceneSpec, opts: &QueryOptions, seed: u64) -> Result<SimulatedQuery> {
    scene.validate()?;
    opts.validate()?;
    let steps = scene.trajectory.len();
    let t = steps + 1;
    let mut r = rng(seed, 0);

    // identities in draw order: wearer, optional twin, distractors
    let mut people: Vec<(Vec<MotionStep>, u64, bool)> = vec![(scene.trajectory.clone(), scene.seed, false)];
    if opts.ambiguous_pair {
        people.push((scene.trajectory.clone(), scene.seed, true));
    }
    for k in 0..opts.n_distractors {
        let traj = distractor_trajectory(opts.distractor, &scene.trajectory, split_seed(seed, 100 + k as u64));
        people.push((traj, split_seed(seed, 200 + k as u64), false));
    }
    let n = people.len();

    // random placement so that positional tie-breaks carry no information
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = r.random_range(0..=i);
        order.swap(i, j);
    }
    let wearer_pos = order.iter().position(|&p| p == 0).expect("wearer present");

    let candidates: Vec<SimCandidate> = order
        .iter()
        .enumerate()
        .map(|(pos, &p)| SimCandidate {
            candidate_id: format!("cand_{pos}"),
            trajectory: people[p].0.clone(),
            depth_seed: people[p].1,
        })
        .collect();
    let scenario = Scenario {
        scene: scene.clone(),
        candidates,
        wearer: wearer_pos,
    };

    let (ego_flow, ego_depth) = render_sequence(scene)?;
    let mut predictions = oracle_predictions(&scenario, opts.window)?;
    if opts.motion_noise > 0.0 {
        for (pos, p) in predictions.iter_mut().enumerate() {
            let mut nr = rng(seed, 300 + pos as u64);
            for w in &mut p.windows {
                let a: f64 = nr.sample(StandardNormal);
                let b: f64 = nr.sample(StandardNormal);
                w.t_exo *= (1.0 + opts.motion_noise * a).max(0.0);
                w.r_exo *= (1.0 + opts.motion_noise * b).max(0.0);
            }
        }
    }

    let dim = opts.embedding_dim;
    let centers: Vec<Vec<f64>> = (0..n)
        .map(|pos| gaussian_vector(&mut rng(seed, 400 + pos as u64), dim, None, 1.0))
        .collect();
    let cam = scene.intrinsics;
    let mut masks = Vec::with_capacity(n);
    let mut embeddings = Vec::with_capacity(n);
    for (pos, (cand, center)) in scenario.candidates.iter().zip(&centers).enumerate() {
        let id = &cand.candidate_id;
        masks.push(MaskSequence {
            candidate_id: id.clone(),
            frames: (0..t)
                .map(|f| Some(RleMask::encode(&candidate_mask(pos, f, cam.width, cam.height))))
                .collect(),
        });
        let mut er = rng(seed, 500 + pos as u64);
        let frames = (0..t)
            .map(|f| {
                let v = gaussian_vector(&mut er, dim, Some(center), opts.embedding_noise);
                Ok(FrameEmbedding {
                    frame_index: f,
                    embedding: Embedding::new(v)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        embeddings.push(CandidateEmbeddings {
            candidate_id: id.clone(),
            frames,
        });
    }

    let frames = selected_frame_set(t);
    let mut dr = rng(seed, 600);
    let mut detections = Vec::new();
    for (pos, &p) in order.iter().enumerate() {
        if p == 0 {
            continue;
        }
        let is_twin = people[p].2;
        let seen = r.random::<f64>() < opts.detection_probability;
        if !(is_twin || seen) {
            continue;
        }
        let frame = frames[dr.random_range(0..frames.len())];
        let alpha = dr.random_range(0.6..=1.0);
        let v = gaussian_vector(&mut dr, dim, Some(&centers[pos]), opts.embedding_noise);
        detections.push(Detection::new(frame, Embedding::new(v)?, alpha)?);
    }

    let query = QueryInstance {
        sequence_length: t,
        ego_flow,
        ego_depth,
        candidates: masks,
        candidate_motion_predictions: predictions,
        candidate_embeddings: embeddings,
        ego_detections: detections,
        ground_truth: Some(wearer_pos),
    };
    query.validate()?;
    Ok(SimulatedQuery { query, scenario })
}
