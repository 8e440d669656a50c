//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use maf_core::dataset::{DatasetManifest, ManifestCandidate, SequenceEntry, SourceTag};
use maf_core::types::{DepthMap, FlowField, ScoreSource};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Median by full sort.
pub fn naive_median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Translational and rotational signals computed pixel by pixel.
pub fn naive_frame_motion(flow: &FlowField, depth: &DepthMap) -> Option<(f64, f64)> {
    let mut t = Vec::new();
    let mut r = Vec::new();
    for i in 0..flow.len() {
        if flow.valid()[i] && depth.valid()[i] {
            let m = flow.fx()[i].hypot(flow.fy()[i]);
            r.push(m);
            t.push(depth.z()[i] * m);
        }
    }
    if r.is_empty() {
        None
    } else {
        Some((naive_median(t), naive_median(r)))
    }
}

pub fn random_rasters(r: &mut ChaCha8Rng, max_side: usize) -> (FlowField, DepthMap) {
    let w = r.random_range(1..=max_side);
    let h = r.random_range(1..=max_side);
    let n = w * h;
    let scale = 10f64.powi(r.random_range(-2..=2));
    let mut fx: Vec<f64> = (0..n).map(|_| scale * r.random_range(-5.0..5.0)).collect();
    let fy: Vec<f64> = (0..n).map(|_| scale * r.random_range(-5.0..5.0)).collect();
    let mut z: Vec<f64> = (0..n).map(|_| r.random_range(0.1..50.0)).collect();
    // sprinkle invalid pixels, keeping at least one valid
    for i in 1..n {
        match r.random_range(0..40) {
            0 => fx[i] = 1e10,
            1 => z[i] = -1.0,
            _ => {}
        }
    }
    (
        FlowField::from_components(w, h, fx, fy).unwrap(),
        DepthMap::new(w, h, z).unwrap(),
    )
}

/// One appearance source as plain data: scores, lambda, alpha.
pub type RawSource = (Vec<f64>, f64, f64);

fn ref_confidence(scores: &[f64], weight: f64) -> f64 {
    let mut sorted = scores.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if weight == 0.0 {
        0.0
    } else if sorted[0] == 0.0 {
        if sorted[1] > 0.0 {
            f64::INFINITY
        } else {
            weight
        }
    } else {
        weight * (sorted[1] / sorted[0])
    }
}

fn ref_argmin(scores: &[f64], live: &[usize]) -> usize {
    let mut best = live[0];
    for &i in live {
        if scores[i] < scores[best] {
            best = i;
        }
    }
    best
}

/// A straightforward re-implementation of the fusion loop working on the
/// original score arrays and a liveness mask.
pub fn fuse_reference(motion: &[f64], appearance: &[RawSource]) -> usize {
    let n = motion.len();
    let mut alive = vec![true; n];
    let mut used = vec![false; appearance.len()];
    loop {
        let live: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        if live.len() == 1 {
            return live[0];
        }
        let motion_best = ref_argmin(motion, &live);
        let remaining: Vec<usize> = (0..appearance.len()).filter(|&k| !used[k]).collect();
        if remaining.is_empty() {
            return motion_best;
        }
        let pick = |s: &[f64]| live.iter().map(|&i| s[i]).collect::<Vec<_>>();
        let motion_conf = ref_confidence(&pick(motion), 1.0);
        let mut best_k = remaining[0];
        let mut best_c = f64::NEG_INFINITY;
        for &k in &remaining {
            let (s, lambda, alpha) = &appearance[k];
            let c = ref_confidence(&pick(s), lambda * alpha);
            if c > best_c {
                best_c = c;
                best_k = k;
            }
        }
        if motion_conf >= best_c {
            return motion_best;
        }
        let target = ref_argmin(&appearance[best_k].0, &live);
        alive[target] = false;
        used[best_k] = true;
    }
}

pub fn to_sources(motion: &[f64], appearance: &[RawSource]) -> (ScoreSource, Vec<ScoreSource>) {
    (
        ScoreSource::motion(motion.to_vec()).unwrap(),
        appearance
            .iter()
            .map(|(s, l, a)| ScoreSource::appearance(s.clone(), *l, *a).unwrap())
            .collect(),
    )
}

/// Random fusion instance with frequent ties and zeros.
pub fn random_fusion_instance(r: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> (Vec<f64>, Vec<RawSource>) {
    let n = r.random_range(1..=max_n);
    let m = r.random_range(0..=max_m);
    let discrete = r.random_bool(0.5);
    let score = |r: &mut ChaCha8Rng| {
        if discrete {
            r.random_range(0..4) as f64
        } else {
            r.random_range(0.0..3.0)
        }
    };
    let motion = (0..n).map(|_| score(r)).collect();
    let apps = (0..m)
        .map(|_| {
            let s = (0..n).map(|_| score(r)).collect();
            let lambda = [0.5, 1.0, 2.0, r.random_range(0.1..3.0)][r.random_range(0..4)];
            let alpha = if r.random_bool(0.3) { 1.0 } else { r.random_range(0.05..=1.0) };
            (s, lambda, alpha)
        })
        .collect();
    (motion, apps)
}

const TAGS: [SourceTag; 3] = [SourceTag::Tf2023, SourceTag::Iushareview, SourceTag::Ego4dTf];

/// A random manifest with several videos, shuffled sequence order and
/// wearers drawn from a shared pool so that videos sometimes link up.
pub fn random_manifest(r: &mut ChaCha8Rng) -> DatasetManifest {
    let videos = r.random_range(2..=8);
    let pool = r.random_range(videos..=3 * videos);
    let mut seqs = Vec::new();
    for v in 0..videos {
        let tag = TAGS[r.random_range(0..TAGS.len())];
        let n = r.random_range(1..=12);
        let wearers: Vec<usize> = (0..r.random_range(1..=2)).map(|_| r.random_range(0..pool)).collect();
        for k in 0..n {
            let c = r.random_range(1..=5);
            let gt = r.random_range(0..c);
            seqs.push(SequenceEntry {
                sequence_id: format!("v{v}_s{k}"),
                source_tag: tag,
                video_id: format!("v{v}"),
                order: (k * 10 + r.random_range(0..10)) as u64,
                wearer_id: format!("w{}", wearers[k % wearers.len()]),
                t: r.random_range(2..30),
                query: format!("q/v{v}_s{k}").into(),
                candidates: (0..c)
                    .map(|i| ManifestCandidate {
                        candidate_id: format!("c{i}"),
                        ground_truth: i == gt,
                    })
                    .collect(),
            });
        }
    }
    // scramble storage order
    for i in (1..seqs.len()).rev() {
        let j = r.random_range(0..=i);
        seqs.swap(i, j);
    }
    DatasetManifest::new(seqs).unwrap()
}

/// Number of wearer-connected video components among the given tags (BFS).
pub fn wearer_components(m: &DatasetManifest, tags: &[SourceTag]) -> usize {
    let mut wearers_of: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for s in m.sequences.iter().filter(|s| tags.contains(&s.source_tag)) {
        wearers_of.entry(&s.video_id).or_default().insert(&s.wearer_id);
    }
    let videos: Vec<&str> = wearers_of.keys().copied().collect();
    let mut seen = BTreeSet::new();
    let mut components = 0;
    for &start in &videos {
        if !seen.insert(start) {
            continue;
        }
        components += 1;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &u in &videos {
                if !seen.contains(u) && !wearers_of[v].is_disjoint(&wearers_of[u]) {
                    seen.insert(u);
                    queue.push_back(u);
                }
            }
        }
    }
    components
}

/// Every file under `root` with its bytes, keyed by relative path.
pub fn tree_bytes(root: &Path) -> BTreeMap<String, Vec<u8>> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
        for e in std::fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                let rel = p.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.insert(rel, std::fs::read(&p).unwrap());
            }
        }
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}
