//! C ABI over `maf-core`.
//!
//! Every fallible function returns a [`MafStatus`]; on failure the message is
//! available from [`maf_last_error`] on the same thread. Query handles are
//! opaque and must be released with [`maf_query_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use maf_core::appearance::AppearanceConfig;
use maf_core::cbaf::{confidence, fuse, FusionState};
use maf_core::ego_motion::frame_motion;
use maf_core::motion_match::{NormalizationMode, WindowSpec};
use maf_core::types::{DepthMap, FlowField, ScoreSource};
use maf_core::{identify, load_query, Error, PipelineConfig, QueryInstance};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MafStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Missing or malformed input data.
    InputError = 3,
    /// Invalid configuration or violated precondition.
    ConfigError = 4,
    /// The output buffer is too small; the required length was still written.
    BufferTooSmall = 5,
    /// The library panicked; this is a bug.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MafNormalization {
    Raw = 0,
    EgoScale = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MafConfig {
    pub window_length: usize,
    pub window_stride: usize,
    pub normalization: MafNormalization,
    pub lambda_trust: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MafFrameMotion {
    pub t_i: f64,
    pub r_i: f64,
}

/// A loaded query directory.
pub struct MafQuery {
    inner: QueryInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(MafStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = if e.is_input_error() {
            MafStatus::InputError
        } else {
            MafStatus::ConfigError
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MafStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MafStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            MafStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure(MafStatus::NullPointer, format!("{name} is NULL")))
    } else {
        Ok(())
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize, name: &str) -> Result<&'a [f64], Failure> {
    if n == 0 {
        return Ok(&[]);
    }
    non_null(p, name)?;
    Ok(std::slice::from_raw_parts(p, n))
}

impl MafConfig {
    fn resolve(&self) -> Result<PipelineConfig, Failure> {
        Ok(PipelineConfig {
            window: WindowSpec::new(self.window_length, self.window_stride)?,
            normalization: match self.normalization {
                MafNormalization::Raw => NormalizationMode::Raw,
                MafNormalization::EgoScale => NormalizationMode::EgoScale,
            },
            appearance: AppearanceConfig::new(self.lambda_trust)?,
        })
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn maf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn maf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Default pipeline configuration.
#[no_mangle]
pub extern "C" fn maf_config_default() -> MafConfig {
    let d = PipelineConfig::default();
    MafConfig {
        window_length: d.window.length(),
        window_stride: d.window.stride(),
        normalization: match d.normalization {
            NormalizationMode::Raw => MafNormalization::Raw,
            NormalizationMode::EgoScale => MafNormalization::EgoScale,
        },
        lambda_trust: d.appearance.lambda_trust(),
    }
}

/// Loads the query directory `dir`. On success `*out` owns a new handle.
///
/// # Safety
/// `dir` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn maf_query_load(dir: *const c_char, out: *mut *mut MafQuery) -> MafStatus {
    guard(|| {
        non_null(dir, "dir")?;
        non_null(out, "out")?;
        *out = ptr::null_mut();
        let dir = CStr::from_ptr(dir)
            .to_str()
            .map_err(|e| Failure(MafStatus::InvalidUtf8, format!("dir: {e}")))?;
        let inner = load_query(dir)?;
        *out = Box::into_raw(Box::new(MafQuery { inner }));
        Ok(())
    })
}

/// Releases a handle from [`maf_query_load`]. NULL is ignored.
///
/// # Safety
/// `query` must be NULL or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn maf_query_free(query: *mut MafQuery) {
    if !query.is_null() {
        drop(Box::from_raw(query));
    }
}

/// # Safety
/// `query` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn maf_query_candidate_count(query: *const MafQuery, out: *mut usize) -> MafStatus {
    guard(|| {
        non_null(query, "query")?;
        non_null(out, "out")?;
        *out = (*query).inner.candidate_count();
        Ok(())
    })
}

/// Copies the id of candidate `index` into `buf` with a trailing NUL.
/// `*out_len` receives the id length without the NUL, also when the buffer
/// is too small.
///
/// # Safety
/// `buf` must hold `capacity` bytes; `query` and `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn maf_query_candidate_id(
    query: *const MafQuery,
    index: usize,
    buf: *mut c_char,
    capacity: usize,
    out_len: *mut usize,
) -> MafStatus {
    guard(|| {
        non_null(query, "query")?;
        non_null(out_len, "out_len")?;
        let q = &(*query).inner;
        let id = q
            .candidates
            .get(index)
            .ok_or_else(|| {
                Failure(
                    MafStatus::ConfigError,
                    format!("candidate {index} out of range ({} candidates)", q.candidate_count()),
                )
            })?
            .candidate_id
            .as_bytes();
        *out_len = id.len();
        if capacity <= id.len() {
            return Err(Failure(
                MafStatus::BufferTooSmall,
                format!("need {} bytes, have {capacity}", id.len() + 1),
            ));
        }
        non_null(buf, "buf")?;
        ptr::copy_nonoverlapping(id.as_ptr(), buf.cast::<u8>(), id.len());
        *buf.add(id.len()) = 0;
        Ok(())
    })
}

/// Runs the full pipeline. `config` may be NULL for defaults. `*out_index`
/// receives the predicted candidate position.
///
/// # Safety
/// `query` and `out_index` must be valid; `config` NULL or valid.
#[no_mangle]
pub unsafe extern "C" fn maf_identify(
    query: *const MafQuery,
    config: *const MafConfig,
    out_index: *mut usize,
) -> MafStatus {
    guard(|| {
        non_null(query, "query")?;
        non_null(out_index, "out_index")?;
        let cfg = if config.is_null() {
            PipelineConfig::default()
        } else {
            (*config).resolve()?
        };
        *out_index = identify(&(*query).inner, &cfg)?.prediction;
        Ok(())
    })
}

/// Per-frame motion signals from row-major rasters of `width * height`
/// values. Flow components above 1e9 in magnitude or non-finite, and
/// non-positive depths, mark a pixel invalid.
///
/// # Safety
/// `fx`, `fy` and `z` must each hold `width * height` values.
#[no_mangle]
pub unsafe extern "C" fn maf_frame_motion(
    width: usize,
    height: usize,
    fx: *const f64,
    fy: *const f64,
    z: *const f64,
    out: *mut MafFrameMotion,
) -> MafStatus {
    guard(|| {
        non_null(out, "out")?;
        let n = width
            .checked_mul(height)
            .ok_or_else(|| Failure(MafStatus::ConfigError, "raster size overflows".into()))?;
        let flow = FlowField::from_components(width, height, slice(fx, n, "fx")?.to_vec(), slice(fy, n, "fy")?.to_vec())?;
        let depth = DepthMap::new(width, height, slice(z, n, "z")?.to_vec())?;
        let m = frame_motion(&flow, &depth)?;
        *out = MafFrameMotion { t_i: m.t_i, r_i: m.r_i };
        Ok(())
    })
}

/// Confidence of a score list weighted by `lambda_trust * alpha_mask`. May be
/// +infinity.
///
/// # Safety
/// `scores` must hold `n` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn maf_confidence(
    scores: *const f64,
    n: usize,
    lambda_trust: f64,
    alpha_mask: f64,
    out: *mut f64,
) -> MafStatus {
    guard(|| {
        non_null(out, "out")?;
        let src = ScoreSource::appearance(slice(scores, n, "scores")?.to_vec(), lambda_trust, alpha_mask)?;
        *out = confidence(&src)?;
        Ok(())
    })
}

/// Fuses motion scores for `n` candidates with `m` appearance sources.
/// `appearance` is row-major `m x n`; `lambdas` and `alphas` hold `m`
/// values each.
///
/// # Safety
/// Arrays must have the stated lengths; `out_index` must be valid.
#[no_mangle]
pub unsafe extern "C" fn maf_fuse(
    motion: *const f64,
    n: usize,
    appearance: *const f64,
    lambdas: *const f64,
    alphas: *const f64,
    m: usize,
    out_index: *mut usize,
) -> MafStatus {
    guard(|| {
        non_null(out_index, "out_index")?;
        let total = m
            .checked_mul(n)
            .ok_or_else(|| Failure(MafStatus::ConfigError, "score matrix size overflows".into()))?;
        let motion = ScoreSource::motion(slice(motion, n, "motion")?.to_vec())?;
        let rows = slice(appearance, total, "appearance")?;
        let lambdas = slice(lambdas, m, "lambdas")?;
        let alphas = slice(alphas, m, "alphas")?;
        let sources = (0..m)
            .map(|k| ScoreSource::appearance(rows[k * n..(k + 1) * n].to_vec(), lambdas[k], alphas[k]))
            .collect::<Result<Vec<_>, _>>()?;
        *out_index = fuse(FusionState::new(motion, sources)?).prediction;
        Ok(())
    })
}
