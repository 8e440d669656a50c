use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use maf_core::dataset::{simulate_dataset, Preset, SimulateConfig};
use maf_ffi::*;

fn simulated(dir: &Path) -> (PathBuf, String) {
    let cfg = SimulateConfig {
        queries: 1,
        seed: 2,
        preset: Preset::Ambiguous,
        ..SimulateConfig::default()
    };
    let m = simulate_dataset(&cfg, dir, 1).unwrap();
    let entry = &m.sequences[0];
    (dir.join(&entry.query), entry.ground_truth_id().unwrap().to_string())
}

fn last_error() -> String {
    let p = maf_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn query_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (path, truth) = simulated(dir.path());
    let c_path = CString::new(path.to_str().unwrap()).unwrap();
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(maf_query_load(c_path.as_ptr(), &mut q), MafStatus::Ok);
        let mut n = 0;
        assert_eq!(maf_query_candidate_count(q, &mut n), MafStatus::Ok);
        assert_eq!(n, 4);
        let mut index = usize::MAX;
        assert_eq!(maf_identify(q, ptr::null(), &mut index), MafStatus::Ok);

        let mut len = 0;
        assert_eq!(maf_query_candidate_id(q, index, ptr::null_mut(), 0, &mut len), MafStatus::BufferTooSmall);
        assert_eq!(len, truth.len());
        let mut buf = vec![0 as std::ffi::c_char; len + 1];
        assert_eq!(maf_query_candidate_id(q, index, buf.as_mut_ptr(), buf.len(), &mut len), MafStatus::Ok);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), truth);

        let bad = MafConfig { window_stride: 0, ..maf_config_default() };
        assert_eq!(maf_identify(q, &bad, &mut index), MafStatus::ConfigError);
        assert!(last_error().contains("stride"));
        assert_eq!(maf_query_candidate_id(q, 17, buf.as_mut_ptr(), buf.len(), &mut len), MafStatus::ConfigError);
        maf_query_free(q);
        maf_query_free(ptr::null_mut());
    }
}

#[test]
fn load_errors() {
    let missing = CString::new("/nonexistent/query").unwrap();
    unsafe {
        let mut q = ptr::null_mut();
        assert_eq!(maf_query_load(missing.as_ptr(), &mut q), MafStatus::InputError);
        assert!(q.is_null());
        assert!(last_error().contains("query.json"));
        assert_eq!(maf_query_load(ptr::null(), &mut q), MafStatus::NullPointer);
        let bad_utf8 = [0xffu8 as std::ffi::c_char, 0];
        assert_eq!(maf_query_load(bad_utf8.as_ptr(), &mut q), MafStatus::InvalidUtf8);
    }
}

#[test]
fn scalar_entry_points() {
    unsafe {
        let mut index = 0;
        let (lambda, alpha) = (1.0, 1.0);
        assert_eq!(
            maf_fuse([0.9, 1.0, 3.0].as_ptr(), 3, [0.2, 1.5, 1.6].as_ptr(), &lambda, &alpha, 1, &mut index),
            MafStatus::Ok
        );
        assert_eq!(index, 1);
        assert_eq!(
            maf_fuse([0.1, 5.0].as_ptr(), 2, ptr::null(), ptr::null(), ptr::null(), 0, &mut index),
            MafStatus::Ok
        );
        assert_eq!(index, 0);

        let mut c = 0.0;
        assert_eq!(maf_confidence([3.0, 1.0, 2.0].as_ptr(), 3, 1.0, 0.5, &mut c), MafStatus::Ok);
        assert_eq!(c, 1.0);
        assert_eq!(maf_confidence([1.0].as_ptr(), 1, 1.0, 1.0, &mut c), MafStatus::ConfigError);

        let mut m = MafFrameMotion::default();
        let fx = [3.0, 1e10, 0.0, 6.0];
        let fy = [4.0, 0.0, 1.0, 8.0];
        let z = [2.0, 1.0, -1.0, 1.0];
        assert_eq!(maf_frame_motion(2, 2, fx.as_ptr(), fy.as_ptr(), z.as_ptr(), &mut m), MafStatus::Ok);
        assert_eq!((m.t_i, m.r_i), (10.0, 7.5));
        assert_eq!(maf_frame_motion(2, 2, ptr::null(), fy.as_ptr(), z.as_ptr(), &mut m), MafStatus::NullPointer);
    }
    let v = unsafe { CStr::from_ptr(maf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("include/maf.h")).unwrap();
    for name in [
        "maf_version",
        "maf_last_error",
        "maf_config_default",
        "maf_query_load",
        "maf_query_free",
        "maf_query_candidate_count",
        "maf_query_candidate_id",
        "maf_identify",
        "maf_frame_motion",
        "maf_confidence",
        "maf_fuse",
        "typedef struct MafQuery MafQuery;",
        "MAF_STATUS_BUFFER_TOO_SMALL = 5",
    ] {
        assert!(header.contains(name), "{name} missing from maf.h");
    }
}

/// Builds tests/smoke.c against the static library and runs it.
#[test]
fn c_program_links_and_runs() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libmaf_ffi.a");
    assert!(lib.is_file(), "{} not built", lib.display());

    let dir = tempfile::tempdir().unwrap();
    let (query, truth) = simulated(&dir.path().join("data"));
    let bin = dir.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(root.join("include"))
        .arg(root.join("tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).arg(&query).arg(&truth).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
