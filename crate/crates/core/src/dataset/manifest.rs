use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{read_json, write_json};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTag {
    Tf2023,
    Iushareview,
    Ego4dTf,
    Synthetic,
}

impl SourceTag {
    pub const ALL: [SourceTag; 4] = [
        SourceTag::Tf2023,
        SourceTag::Iushareview,
        SourceTag::Ego4dTf,
        SourceTag::Synthetic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SourceTag::Tf2023 => "tf2023",
            SourceTag::Iushareview => "iushareview",
            SourceTag::Ego4dTf => "ego4d_tf",
            SourceTag::Synthetic => "synthetic",
        }
    }
}

impl fmt::Display for SourceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestCandidate {
    pub candidate_id: String,
    pub ground_truth: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequenceEntry {
    pub sequence_id: String,
    pub source_tag: SourceTag,
    pub video_id: String,
    /// Temporal position of the sequence within its video.
    pub order: u64,
    pub wearer_id: String,
    pub t: usize,
    /// Query directory, relative to the manifest.
    pub query: PathBuf,
    pub candidates: Vec<ManifestCandidate>,
}

impl SequenceEntry {
    pub fn ground_truth_id(&self) -> Option<&str> {
        self.candidates
            .iter()
            .find(|c| c.ground_truth)
            .map(|c| c.candidate_id.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub schema_version: u32,
    pub sequences: Vec<SequenceEntry>,
}

impl DatasetManifest {
    pub fn new(sequences: Vec<SequenceEntry>) -> Result<Self> {
        let m = Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            sequences,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(Error::BadHeader(format!(
                "manifest schema_version {} (supported: {MANIFEST_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let mut ids = HashSet::new();
        for s in &self.sequences {
            if !ids.insert(s.sequence_id.as_str()) {
                return Err(Error::InvalidInput(format!("duplicate sequence id {:?}", s.sequence_id)));
            }
            let gt = s.candidates.iter().filter(|c| c.ground_truth).count();
            if gt != 1 {
                return Err(Error::InvalidInput(format!(
                    "sequence {:?} has {gt} ground-truth candidates",
                    s.sequence_id
                )));
            }
        }
        Ok(())
    }

    pub fn get(&self, sequence_id: &str) -> Option<&SequenceEntry> {
        self.sequences.iter().find(|s| s.sequence_id == sequence_id)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let m: Self = read_json(path)?;
        m.validate().map_err(|e| e.in_file(path))?;
        Ok(m)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_json(path.as_ref(), self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}
