mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use maf_core::appearance::{
    appearance_score, build_sources, embedding_distance, select_frames, selected_frame_set, AppearanceConfig,
    CandidateEmbeddings, FrameEmbedding,
};
use maf_core::types::{Detection, Embedding};

fn emb(v: Vec<f64>) -> Embedding {
    Embedding::new(v).unwrap()
}

fn random_emb(r: &mut rand_chacha::ChaCha8Rng, d: usize) -> Embedding {
    emb((0..d).map(|_| r.random_range(-1.0..1.0)).collect())
}

fn candidate(id: &str, frames: Vec<Embedding>) -> CandidateEmbeddings {
    CandidateEmbeddings {
        candidate_id: id.into(),
        frames: frames
            .into_iter()
            .enumerate()
            .map(|(i, embedding)| FrameEmbedding { frame_index: i, embedding })
            .collect(),
    }
}

#[test]
fn distance_matches_naive_in_128_dims() {
    let mut r = rng(31);
    for _ in 0..100 {
        let a = random_emb(&mut r, 128);
        let b = random_emb(&mut r, 128);
        let mut acc = 0.0;
        for i in 0..128 {
            let d = a.values()[i] - b.values()[i];
            acc += d * d;
        }
        assert!((embedding_distance(&a, &b).unwrap() - acc.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn score_is_mean_distance_two_loop() {
    let mut r = rng(32);
    for _ in 0..50 {
        let det = Detection::new(0, random_emb(&mut r, 16), 1.0).unwrap();
        let frames: Vec<Embedding> = (0..3).map(|_| random_emb(&mut r, 16)).collect();
        let mut sum = 0.0;
        for f in &frames {
            let mut sq = 0.0;
            for (x, y) in det.embedding.values().iter().zip(f.values()) {
                sq += (x - y).powi(2);
            }
            sum += sq.sqrt();
        }
        assert!((appearance_score(&det, &frames).unwrap() - sum / 3.0).abs() < 1e-12);
    }
}

#[test]
fn three_by_four_matrix() {
    let dets = [
        Detection::new(0, emb(vec![0.0, 0.0]), 1.0).unwrap(),
        Detection::new(4, emb(vec![3.0, 4.0]), 0.5).unwrap(),
        Detection::new(8, emb(vec![1.0, 0.0]), 0.25).unwrap(),
    ];
    let cands = [
        candidate("a", vec![emb(vec![0.0, 0.0])]),
        candidate("b", vec![emb(vec![3.0, 4.0])]),
        candidate("c", vec![emb(vec![0.0, 0.0]), emb(vec![3.0, 4.0])]),
        candidate("d", vec![emb(vec![1.0, 0.0])]),
    ];
    let srcs = build_sources(&dets, &cands, AppearanceConfig::new(2.0).unwrap()).unwrap();
    let expect = [
        [0.0, 5.0, 2.5, 1.0],
        [5.0, 0.0, 2.5, 20f64.sqrt()],
        [1.0, 20f64.sqrt(), (1.0 + 20f64.sqrt()) / 2.0, 0.0],
    ];
    for (s, (row, det)) in srcs.iter().zip(expect.iter().zip(&dets)) {
        for (a, b) in s.scores.iter().zip(row) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(s.lambda_trust, 2.0);
        assert_eq!(s.alpha_mask, det.alpha_mask);
    }
}

#[test]
fn frame_selection() {
    assert_eq!(select_frames(17), [0, 8, 16]);
    assert_eq!(select_frames(2), [0, 0, 1]);
    assert_eq!(selected_frame_set(2), vec![0, 1]);
    assert_eq!(selected_frame_set(1), vec![0]);
}

#[test]
fn no_detections_no_sources() {
    let cands = [candidate("a", vec![emb(vec![1.0])])];
    assert!(build_sources(&[], &cands, AppearanceConfig::default()).unwrap().is_empty());
}

proptest! {
    #[test]
    fn distance_is_symmetric(seed in any::<u64>(), d in 1usize..64) {
        let mut r = rng(seed);
        let a = random_emb(&mut r, d);
        let b = random_emb(&mut r, d);
        prop_assert_eq!(embedding_distance(&a, &b).unwrap(), embedding_distance(&b, &a).unwrap());
        prop_assert_eq!(embedding_distance(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn frame_order_does_not_matter(seed in any::<u64>()) {
        let mut r = rng(seed);
        let det = Detection::new(0, random_emb(&mut r, 8), 1.0).unwrap();
        let mut frames: Vec<Embedding> = (0..3).map(|_| random_emb(&mut r, 8)).collect();
        let a = appearance_score(&det, &frames).unwrap();
        frames.reverse();
        let b = appearance_score(&det, &frames).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn farther_candidates_score_higher(seed in any::<u64>()) {
        let mut r = rng(seed);
        let base = random_emb(&mut r, 8);
        let dir = random_emb(&mut r, 8);
        let det = Detection::new(0, base.clone(), 1.0).unwrap();
        let at = |s: f64| emb(base.values().iter().zip(dir.values()).map(|(b, d)| b + s * d).collect());
        let cands: Vec<CandidateEmbeddings> = (0..5).map(|k| candidate(&format!("c{k}"), vec![at(k as f64)])).collect();
        let scores = &build_sources(&[det], &cands, AppearanceConfig::default()).unwrap()[0].scores;
        prop_assert!(scores.windows(2).all(|w| w[0] < w[1]) || dir.values().iter().all(|&v| v == 0.0));
    }
}
