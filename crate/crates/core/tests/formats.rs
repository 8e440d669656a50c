use proptest::prelude::*;

use maf_core::io::{encode_depth, encode_flow, parse_depth, parse_flow, read_flow, write_flow};
use maf_core::rle::{decode_rle, encode_rle, BinaryMask, RleMask};
use maf_core::types::{DepthMap, Embedding, FlowField};
use maf_core::Error;

fn flow_strategy() -> impl Strategy<Value = FlowField> {
    (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
        let sample = prop_oneof![
            8 => -1e3f32..1e3f32,
            1 => Just(1e10f32),
            1 => Just(f32::NAN),
        ];
        (
            proptest::collection::vec(sample.clone(), w * h),
            proptest::collection::vec(sample, w * h),
        )
            .prop_map(move |(fx, fy)| {
                let widen = |v: Vec<f32>| v.into_iter().map(f64::from).collect();
                FlowField::from_components(w, h, widen(fx), widen(fy)).unwrap()
            })
    })
}

fn depth_strategy() -> impl Strategy<Value = DepthMap> {
    (1usize..12, 1usize..12).prop_flat_map(|(w, h)| {
        let sample = prop_oneof![9 => 1e-3f32..1e4f32, 1 => Just(0.0f32), 1 => Just(-2.0f32)];
        proptest::collection::vec(sample, w * h)
            .prop_map(move |z| DepthMap::new(w, h, z.into_iter().map(f64::from).collect()).unwrap())
    })
}

fn mask_strategy() -> impl Strategy<Value = BinaryMask> {
    (1usize..20, 1usize..20).prop_flat_map(|(w, h)| {
        proptest::collection::vec(any::<bool>(), w * h).prop_map(move |d| BinaryMask::new(w, h, d).unwrap())
    })
}

/// Column-major runs counted the obvious way.
fn naive_runs(mask: &BinaryMask) -> Vec<u32> {
    let mut runs = vec![0u32];
    let mut current = false;
    for x in 0..mask.width() {
        for y in 0..mask.height() {
            let v = mask.get(x, y);
            if v != current {
                runs.push(0);
                current = v;
            }
            *runs.last_mut().unwrap() += 1;
        }
    }
    runs
}

proptest! {
    #[test]
    fn flow_round_trip(flow in flow_strategy()) {
        let bytes = encode_flow(&flow).unwrap();
        prop_assert_eq!(bytes.len(), 12 + 8 * flow.len());
        let back = parse_flow(&bytes).unwrap();
        prop_assert_eq!(back.valid(), flow.valid());
        for i in 0..flow.len() {
            if flow.valid()[i] {
                prop_assert_eq!(back.fx()[i], flow.fx()[i]);
                prop_assert_eq!(back.fy()[i], flow.fy()[i]);
            }
        }
        prop_assert_eq!(encode_flow(&back).unwrap(), bytes);
    }

    #[test]
    fn depth_round_trip(depth in depth_strategy()) {
        let bytes = encode_depth(&depth);
        let back = parse_depth(&bytes).unwrap();
        prop_assert_eq!(back.valid(), depth.valid());
        for i in 0..depth.z().len() {
            if depth.valid()[i] {
                prop_assert_eq!(back.z()[i], depth.z()[i]);
            }
        }
        prop_assert_eq!(encode_depth(&back), bytes);
    }

    #[test]
    fn rle_matches_naive_runs(mask in mask_strategy()) {
        let runs = encode_rle(&mask);
        prop_assert_eq!(&runs, &naive_runs(&mask));
        prop_assert_eq!(runs.iter().map(|&r| r as usize).sum::<usize>(), mask.width() * mask.height());
        prop_assert_eq!(decode_rle(&runs, mask.width(), mask.height()).unwrap(), mask.clone());
        let json = serde_json::to_string(&RleMask::encode(&mask)).unwrap();
        let parsed: RleMask = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(parsed.decode().unwrap(), mask);
    }

    #[test]
    fn embedding_json_round_trip(values in proptest::collection::vec(-1e6f64..1e6, 1..64)) {
        let e = Embedding::new(values).unwrap();
        let json = serde_json::to_string(&e).unwrap();
        let back: Embedding = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, e);
    }
}

#[test]
fn flow_file_layout() {
    let flow = FlowField::from_components(2, 1, vec![1.5, -2.0], vec![0.25, 3.0]).unwrap();
    let bytes = encode_flow(&flow).unwrap();
    assert_eq!(&bytes[0..4], &202021.25f32.to_le_bytes());
    assert_eq!(&bytes[4..8], &2i32.to_le_bytes());
    assert_eq!(&bytes[8..12], &1i32.to_le_bytes());
    let floats: Vec<f32> = bytes[12..]
        .chunks(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    assert_eq!(floats, vec![1.5, 0.25, -2.0, 3.0]);
}

#[test]
fn depth_rows_are_stored_bottom_up() {
    let depth = DepthMap::new(1, 2, vec![1.0, 2.0]).unwrap();
    let bytes = encode_depth(&depth);
    let header = b"Pf\n1 2\n-1.0\n";
    assert_eq!(&bytes[..header.len()], header);
    let raster = &bytes[header.len()..];
    assert_eq!(f32::from_le_bytes(raster[0..4].try_into().unwrap()), 2.0);
    assert_eq!(f32::from_le_bytes(raster[4..8].try_into().unwrap()), 1.0);
}

#[test]
fn big_endian_depth_is_read() {
    let mut bytes = b"Pf\n2 1\n1.0\n".to_vec();
    bytes.extend_from_slice(&3.0f32.to_be_bytes());
    bytes.extend_from_slice(&4.0f32.to_be_bytes());
    assert_eq!(parse_depth(&bytes).unwrap().z(), &[3.0, 4.0]);
}

#[test]
fn truncated_flow_file_names_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.flo");
    write_flow(&path, &FlowField::uniform(4, 4, 1.0, 1.0).unwrap()).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
    let err = read_flow(&path).unwrap_err();
    assert!(matches!(err.root(), Error::TruncatedFile { .. }));
    assert!(err.to_string().contains("f.flo"));
}

#[test]
fn rle_rejects_wrong_total() {
    assert!(matches!(decode_rle(&[1, 2], 2, 2), Err(Error::RunSumMismatch { .. })));
}
