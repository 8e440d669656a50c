use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, ManifestCandidate, SequenceEntry, SourceTag};
use crate::error::{Error, Result};
use crate::motion_match::WindowSpec;
use crate::query::save_query;
use crate::simulator::{make_query, random_scene, split_seed, DistractorKind, QueryOptions, SimulatedQuery};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Independent distractor trajectories; motion alone identifies the wearer.
    #[default]
    Easy,
    /// One distractor replays the wearer's motion exactly and is seen by the
    /// camera, so only appearance elimination resolves the query.
    Ambiguous,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulateConfig {
    pub queries: usize,
    /// Candidates per query, wearer included.
    pub candidates: usize,
    pub sequence_length: usize,
    pub seed: u64,
    pub preset: Preset,
    pub sequences_per_video: usize,
    pub detection_probability: f64,
    pub embedding_noise: f64,
    pub motion_noise: f64,
    pub window: WindowSpec,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            queries: 1,
            candidates: 4,
            sequence_length: 17,
            seed: 0,
            preset: Preset::Easy,
            sequences_per_video: 5,
            detection_probability: 0.5,
            embedding_noise: 0.0,
            motion_noise: 0.0,
            window: WindowSpec::default(),
        }
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<()> {
        let min_candidates = match self.preset {
            Preset::Easy => 1,
            Preset::Ambiguous => 2,
        };
        if self.candidates < min_candidates {
            return Err(Error::InvalidConfig(format!(
                "preset {:?} needs at least {min_candidates} candidates",
                self.preset
            )));
        }
        if self.queries == 0 || self.sequences_per_video == 0 || self.sequence_length < 2 {
            return Err(Error::InvalidConfig(
                "queries and sequences_per_video must be >= 1, sequence_length >= 2".into(),
            ));
        }
        self.query_options().validate()
    }

    pub fn query_options(&self) -> QueryOptions {
        let ambiguous = self.preset == Preset::Ambiguous;
        QueryOptions {
            n_distractors: self.candidates - 1 - ambiguous as usize,
            distractor: DistractorKind::Independent,
            ambiguous_pair: ambiguous,
            detection_probability: self.detection_probability,
            embedding_noise: self.embedding_noise,
            motion_noise: self.motion_noise,
            window: self.window,
            ..QueryOptions::default()
        }
    }

    /// Query `index` of the dataset, generated in memory.
    pub fn generate(&self, index: usize) -> Result<(SequenceEntry, SimulatedQuery)> {
        let seed = split_seed(self.seed, index as u64);
        let scene = random_scene(self.sequence_length, seed)?;
        let sim = make_query(&scene, &self.query_options(), split_seed(seed, 7))?;
        let video = index / self.sequences_per_video;
        let order = index % self.sequences_per_video;
        let gt = sim.query.ground_truth.expect("simulated queries carry ground truth");
        let entry = SequenceEntry {
            sequence_id: format!("syn_{index:05}"),
            source_tag: SourceTag::Synthetic,
            video_id: format!("video_{video:04}"),
            order: order as u64,
            // two wearers per video, none shared across videos
            wearer_id: format!("video_{video:04}_wearer_{}", order % 2),
            t: sim.query.sequence_length,
            query: PathBuf::from(format!("queries/syn_{index:05}")),
            candidates: sim
                .query
                .candidate_ids()
                .enumerate()
                .map(|(i, id)| ManifestCandidate {
                    candidate_id: id.to_string(),
                    ground_truth: i == gt,
                })
                .collect(),
        };
        Ok((entry, sim))
    }
}

/// Writes `cfg.queries` simulated queries and a manifest under `out_dir`.
/// Output is byte-identical for a given config regardless of `jobs`.
pub fn simulate_dataset(cfg: &SimulateConfig, out_dir: impl AsRef<Path>, jobs: usize) -> Result<DatasetManifest> {
    cfg.validate()?;
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let entries = pool.install(|| {
        (0..cfg.queries)
            .into_par_iter()
            .map(|i| {
                let (entry, sim) = cfg.generate(i)?;
                save_query(out_dir.join(&entry.query), &sim.query)?;
                Ok(entry)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let manifest = DatasetManifest::new(entries)?;
    manifest.save(out_dir.join(MANIFEST_FILE))?;
    Ok(manifest)
}
