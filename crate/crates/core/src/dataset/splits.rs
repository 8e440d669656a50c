use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::manifest::{DatasetManifest, SequenceEntry, SourceTag};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitName {
    /// Temporal split inside each video.
    Seen,
    /// Wearer-disjoint split at video level.
    Unseen,
    /// Train on TF2023/IUShareView, test on Ego4D-TF.
    CrossDataset,
    /// Every sequence on the test side; for benchmarking a fixed model.
    All,
}

impl SplitName {
    pub const NAMES: [&'static str; 4] = ["seen", "unseen", "cross_dataset", "all"];

    pub fn as_str(&self) -> &'static str {
        match self {
            SplitName::Seen => "seen",
            SplitName::Unseen => "unseen",
            SplitName::CrossDataset => "cross_dataset",
            SplitName::All => "all",
        }
    }
}

impl fmt::Display for SplitName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "seen" => Ok(SplitName::Seen),
            "unseen" => Ok(SplitName::Unseen),
            "cross_dataset" => Ok(SplitName::CrossDataset),
            "all" => Ok(SplitName::All),
            other => Err(Error::InvalidConfig(format!(
                "unknown split {other:?}; valid splits: {}",
                SplitName::NAMES.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAssignment {
    pub split: SplitName,
    pub train: Vec<String>,
    pub test: Vec<String>,
}

pub fn split(manifest: &DatasetManifest, name: SplitName, seed: u64) -> Result<SplitAssignment> {
    match name {
        SplitName::Seen => split_seen(manifest),
        SplitName::Unseen => split_unseen(manifest, seed),
        SplitName::CrossDataset => split_cross_dataset(manifest),
        SplitName::All => Ok(SplitAssignment {
            split: SplitName::All,
            train: Vec::new(),
            test: manifest.sequences.iter().map(|s| s.sequence_id.clone()).collect(),
        }),
    }
}

/// Sources used on the train side of the within-dataset splits.
fn in_domain(tag: SourceTag) -> bool {
    matches!(tag, SourceTag::Tf2023 | SourceTag::Iushareview | SourceTag::Synthetic)
}

fn videos(manifest: &DatasetManifest) -> BTreeMap<&str, Vec<&SequenceEntry>> {
    let mut by_video: BTreeMap<&str, Vec<&SequenceEntry>> = BTreeMap::new();
    for s in manifest.sequences.iter().filter(|s| in_domain(s.source_tag)) {
        by_video.entry(s.video_id.as_str()).or_default().push(s);
    }
    by_video
}

/// Train on the first `ceil(0.8 n)` sequences of each video.
pub fn split_seen(manifest: &DatasetManifest) -> Result<SplitAssignment> {
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (video, mut seqs) in videos(manifest) {
        seqs.sort_by_key(|s| s.order);
        if seqs.windows(2).any(|w| w[0].order == w[1].order) {
            return Err(Error::UnorderedVideo(video.to_string()));
        }
        let n_train = (4 * seqs.len()).div_ceil(5);
        for (i, s) in seqs.iter().enumerate() {
            let side = if i < n_train { &mut train } else { &mut test };
            side.push(s.sequence_id.clone());
        }
    }
    Ok(SplitAssignment {
        split: SplitName::Seen,
        train,
        test,
    })
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Videos connected through a shared wearer always land on the same side;
/// components are then assigned greedily towards a 20% test share.
pub fn split_unseen(manifest: &DatasetManifest, seed: u64) -> Result<SplitAssignment> {
    let by_video = videos(manifest);
    let names: Vec<&str> = by_video.keys().copied().collect();
    let mut parent: Vec<usize> = (0..names.len()).collect();
    let mut wearer_home: BTreeMap<&str, usize> = BTreeMap::new();
    for (v, seqs) in by_video.values().enumerate() {
        for s in seqs {
            match wearer_home.get(s.wearer_id.as_str()) {
                Some(&other) => {
                    let (a, b) = (find(&mut parent, v), find(&mut parent, other));
                    parent[a.max(b)] = a.min(b);
                }
                None => {
                    wearer_home.insert(&s.wearer_id, v);
                }
            }
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for v in 0..names.len() {
        let root = find(&mut parent, v);
        components.entry(root).or_default().push(v);
    }
    if components.len() < 2 {
        return Err(Error::InfeasiblePartition);
    }

    let size = |c: &Vec<usize>| c.iter().map(|&v| by_video[names[v]].len()).sum::<usize>();
    let mut comps: Vec<(Vec<usize>, usize)> = components.into_values().map(|c| {
        let n = size(&c);
        (c, n)
    }).collect();
    comps.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    // stable: equal sizes keep their shuffled order
    comps.sort_by_key(|c| std::cmp::Reverse(c.1));

    let total: usize = comps.iter().map(|c| c.1).sum();
    let target = 0.2 * total as f64;
    let mut in_test = vec![false; comps.len()];
    let mut test_size = 0usize;
    for (i, (_, n)) in comps.iter().enumerate() {
        let with = (test_size + n) as f64 - target;
        let without = test_size as f64 - target;
        if with.abs() < without.abs() {
            in_test[i] = true;
            test_size += n;
        }
    }
    if !in_test.iter().any(|&b| b) {
        // smallest component, last among equals
        let i = (0..comps.len()).rev().min_by_key(|&i| comps[i].1).unwrap();
        in_test[i] = true;
    }
    if in_test.iter().all(|&b| b) {
        let i = (0..comps.len()).max_by_key(|&i| comps[i].1).unwrap();
        in_test[i] = false;
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for v in 0..names.len() {
        let ci = comps.iter().position(|(c, _)| c.contains(&v)).unwrap();
        let side = if in_test[ci] { &mut test } else { &mut train };
        let mut seqs = by_video[names[v]].clone();
        seqs.sort_by_key(|s| s.order);
        side.extend(seqs.iter().map(|s| s.sequence_id.clone()));
    }
    Ok(SplitAssignment {
        split: SplitName::Unseen,
        train,
        test,
    })
}

pub fn split_cross_dataset(manifest: &DatasetManifest) -> Result<SplitAssignment> {
    let pick = |tags: &[SourceTag]| -> Vec<String> {
        manifest
            .sequences
            .iter()
            .filter(|s| tags.contains(&s.source_tag))
            .map(|s| s.sequence_id.clone())
            .collect()
    };
    let train = pick(&[SourceTag::Tf2023, SourceTag::Iushareview]);
    let test = pick(&[SourceTag::Ego4dTf]);
    if train.is_empty() {
        return Err(Error::EmptySide("train"));
    }
    if test.is_empty() {
        return Err(Error::EmptySide("test"));
    }
    Ok(SplitAssignment {
        split: SplitName::CrossDataset,
        train,
        test,
    })
}
