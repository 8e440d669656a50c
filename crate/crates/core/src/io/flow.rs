//! Middlebury `.flo` container: `f32` magic 202021.25, `i32` width and
//! height, then row-major interleaved `(fx, fy)` `f32` pairs, all
//! little-endian.

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{flow_sample_valid, FlowField, UNKNOWN_FLOW};

pub const FLOW_MAGIC: f32 = 202021.25;

const HEADER_LEN: usize = 12;

pub fn parse_flow(bytes: &[u8]) -> Result<FlowField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedFile {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    let magic = f32::from_le_bytes(bytes[0..4].try_into().unwrap());
    if magic != FLOW_MAGIC {
        return Err(Error::BadMagic(magic));
    }
    let width = i32::from_le_bytes(bytes[4..8].try_into().unwrap());
    let height = i32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if width <= 0 || height <= 0 {
        return Err(Error::NonPositiveDims {
            width: width as i64,
            height: height as i64,
        });
    }
    let n = width as usize * height as usize;
    let expected = n
        .checked_mul(8)
        .and_then(|p| p.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::BadHeader(format!("flow {width}x{height} too large")))?;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::BadHeader(format!(
            "{} trailing bytes after flow payload",
            bytes.len() - expected
        )));
    }
    let mut fx = Vec::with_capacity(n);
    let mut fy = Vec::with_capacity(n);
    for pair in bytes[HEADER_LEN..].chunks_exact(8) {
        fx.push(f32::from_le_bytes(pair[0..4].try_into().unwrap()) as f64);
        fy.push(f32::from_le_bytes(pair[4..8].try_into().unwrap()) as f64);
    }
    FlowField::from_components(width as usize, height as usize, fx, fy)
}

pub fn encode_flow(flow: &FlowField) -> Result<Vec<u8>> {
    let (w, h) = (flow.width(), flow.height());
    let (w32, h32) = match (i32::try_from(w), i32::try_from(h)) {
        (Ok(a), Ok(b)) => (a, b),
        _ => return Err(Error::InvalidInput(format!("flow {w}x{h} exceeds i32 header"))),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * flow.len());
    out.extend_from_slice(&FLOW_MAGIC.to_le_bytes());
    out.extend_from_slice(&w32.to_le_bytes());
    out.extend_from_slice(&h32.to_le_bytes());
    for i in 0..flow.len() {
        let mut x = flow.fx()[i] as f32;
        let mut y = flow.fy()[i] as f32;
        if !flow.valid()[i] && flow_sample_valid(x as f64) && flow_sample_valid(y as f64) {
            x = UNKNOWN_FLOW;
            y = UNKNOWN_FLOW;
        }
        out.extend_from_slice(&x.to_le_bytes());
        out.extend_from_slice(&y.to_le_bytes());
    }
    Ok(out)
}

pub fn read_flow(path: impl AsRef<Path>) -> Result<FlowField> {
    let path = path.as_ref();
    let bytes = super::read_bytes(path)?;
    parse_flow(&bytes).map_err(|e| e.in_file(path))
}

pub fn write_flow(path: impl AsRef<Path>, flow: &FlowField) -> Result<()> {
    let path = path.as_ref();
    super::write_bytes(path, &encode_flow(flow)?)
}
