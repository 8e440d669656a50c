use std::collections::BTreeMap;
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, SequenceEntry, SourceTag};
use super::splits::{split, SplitName};
use crate::cbaf::DecisionRecord;
use crate::error::{Error, Result};
use crate::io::{read_json, write_json};
use crate::pipeline::{identify, PipelineConfig};
use crate::query::{load_query, QueryInstance, QUERY_INDEX_FILE};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub pipeline: PipelineConfig,
    /// Seed for randomized splits.
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[serde(skip, default = "one_job")]
    pub jobs: usize,
}

fn one_job() -> usize {
    1
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            pipeline: PipelineConfig::default(),
            seed: 0,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub sequence_id: String,
    pub source_tag: SourceTag,
    pub candidate_count: usize,
    pub ground_truth: String,
    pub predicted: Option<String>,
    pub correct: bool,
    pub error: Option<String>,
    pub trace: Vec<DecisionRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TagSummary {
    pub queries: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub split: SplitName,
    pub config: EvalConfig,
    pub queries: usize,
    pub failures: usize,
    pub accuracy: f64,
    pub mean_candidates: f64,
    pub per_source: BTreeMap<SourceTag, TagSummary>,
    /// Sorted by sequence id.
    pub results: Vec<QueryResult>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path.as_ref(), self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        read_json(path.as_ref())
    }

    fn from_results(split: SplitName, config: EvalConfig, mut results: Vec<QueryResult>) -> Self {
        results.sort_by(|a, b| a.sequence_id.cmp(&b.sequence_id));
        let mut per_source: BTreeMap<SourceTag, TagSummary> = BTreeMap::new();
        for r in &results {
            let e = per_source.entry(r.source_tag).or_insert(TagSummary {
                queries: 0,
                correct: 0,
                accuracy: 0.0,
            });
            e.queries += 1;
            e.correct += r.correct as usize;
        }
        for s in per_source.values_mut() {
            s.accuracy = s.correct as f64 / s.queries as f64;
        }
        let n = results.len();
        let correct = results.iter().filter(|r| r.correct).count();
        let candidates: usize = results.iter().map(|r| r.candidate_count).sum();
        Report {
            schema_version: REPORT_SCHEMA_VERSION,
            split,
            config,
            queries: n,
            failures: results.iter().filter(|r| r.error.is_some()).count(),
            accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
            mean_candidates: if n == 0 { 0.0 } else { candidates as f64 / n as f64 },
            per_source,
            results,
        }
    }
}

fn run_one(entry: &SequenceEntry, query: Result<QueryInstance>, cfg: &PipelineConfig) -> QueryResult {
    let ground_truth = entry.ground_truth_id().unwrap_or_default().to_string();
    let outcome = query.and_then(|q| identify(&q, cfg));
    match outcome {
        Ok(id) => QueryResult {
            sequence_id: entry.sequence_id.clone(),
            source_tag: entry.source_tag,
            candidate_count: entry.candidates.len(),
            correct: id.candidate_id == ground_truth,
            ground_truth,
            predicted: Some(id.candidate_id),
            error: None,
            trace: id.trace,
        },
        Err(e) => {
            warn!("sequence {}: {e}", entry.sequence_id);
            QueryResult {
                sequence_id: entry.sequence_id.clone(),
                source_tag: entry.source_tag,
                candidate_count: entry.candidates.len(),
                ground_truth,
                predicted: None,
                correct: false,
                error: Some(e.to_string()),
                trace: Vec::new(),
            }
        }
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))
}

/// Runs the pipeline on every test-side sequence of `split_name`. Query
/// paths are resolved against `base_dir`.
pub fn evaluate(
    manifest: &DatasetManifest,
    base_dir: impl AsRef<Path>,
    split_name: SplitName,
    cfg: &EvalConfig,
) -> Result<Report> {
    let base_dir = base_dir.as_ref();
    manifest.validate()?;
    let assignment = split(manifest, split_name, cfg.seed)?;
    if assignment.test.is_empty() {
        return Err(Error::EmptySide("test"));
    }
    let entries: Vec<&SequenceEntry> = assignment
        .test
        .iter()
        .map(|id| manifest.get(id).expect("split ids come from the manifest"))
        .collect();
    for e in &entries {
        let index = base_dir.join(&e.query).join(QUERY_INDEX_FILE);
        if !index.is_file() {
            return Err(Error::ArtifactMissing(index));
        }
    }
    let results = pool(cfg.jobs)?.install(|| {
        entries
            .par_iter()
            .map(|e| run_one(e, load_query(base_dir.join(&e.query)), &cfg.pipeline))
            .collect::<Vec<_>>()
    });
    Ok(Report::from_results(split_name, *cfg, results))
}

/// Evaluates in-memory queries, all treated as test sequences.
pub fn evaluate_instances(
    queries: &[(SequenceEntry, QueryInstance)],
    cfg: &EvalConfig,
) -> Result<Report> {
    if queries.is_empty() {
        return Err(Error::EmptySide("test"));
    }
    let results = pool(cfg.jobs)?.install(|| {
        queries
            .par_iter()
            .map(|(e, q)| run_one(e, Ok(q.clone()), &cfg.pipeline))
            .collect::<Vec<_>>()
    });
    Ok(Report::from_results(SplitName::All, *cfg, results))
}
