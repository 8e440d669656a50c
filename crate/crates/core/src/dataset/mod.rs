//! Dataset manifests, train/test splits, the evaluation harness and the
//! synthetic dataset writer.

mod evaluate;
mod manifest;
mod synthetic;
mod splits;

pub use evaluate::{evaluate, evaluate_instances, EvalConfig, QueryResult, Report, TagSummary, REPORT_SCHEMA_VERSION};
pub use manifest::{DatasetManifest, ManifestCandidate, SequenceEntry, SourceTag, MANIFEST_SCHEMA_VERSION};
pub use splits::{split, split_cross_dataset, split_seen, split_unseen, SplitAssignment, SplitName};
pub use synthetic::{simulate_dataset, Preset, SimulateConfig, MANIFEST_FILE};
