//! Grayscale PFM (`Pf`) depth rasters. Rows are stored bottom-to-top; the
//! sign of the scale line selects byte order (negative = little-endian).

use std::path::Path;

use crate::error::{Error, Result};
use crate::types::DepthMap;

struct Header {
    width: usize,
    height: usize,
    little_endian: bool,
    data_offset: usize,
}

fn parse_header(bytes: &[u8]) -> Result<Header> {
    let mut pos = 0;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::BadHeader("incomplete PFM header".into()));
        }
        let tok = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| Error::BadHeader("non-ASCII PFM header".into()))?;
        tokens.push(tok);
        if tokens.len() == 1 && tok != "Pf" {
            return Err(Error::BadHeader(format!("expected Pf, found {tok:?}")));
        }
    }
    // exactly one whitespace byte separates the scale from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::BadHeader("missing separator after scale".into()));
    }
    let dim = |s: &str| -> Result<usize> {
        match s.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(Error::BadHeader(format!("bad dimension {s:?}"))),
        }
    };
    let width = dim(tokens[1])?;
    let height = dim(tokens[2])?;
    let scale: f64 = tokens[3]
        .parse()
        .map_err(|_| Error::BadHeader(format!("bad scale {:?}", tokens[3])))?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::BadHeader(format!("bad scale {scale}")));
    }
    Ok(Header {
        width,
        height,
        little_endian: scale < 0.0,
        data_offset: pos + 1,
    })
}

pub fn parse_depth(bytes: &[u8]) -> Result<DepthMap> {
    let h = parse_header(bytes)?;
    let n = h
        .width
        .checked_mul(h.height)
        .ok_or_else(|| Error::BadHeader("PFM too large".into()))?;
    let expected = n
        .checked_mul(4)
        .and_then(|p| p.checked_add(h.data_offset))
        .ok_or_else(|| Error::BadHeader("PFM too large".into()))?;
    if bytes.len() < expected {
        return Err(Error::TruncatedFile {
            expected,
            found: bytes.len(),
        });
    }
    if bytes.len() > expected {
        return Err(Error::BadHeader(format!(
            "{} trailing bytes after PFM raster",
            bytes.len() - expected
        )));
    }
    let raster = &bytes[h.data_offset..];
    let mut z = vec![0.0; n];
    for (i, chunk) in raster.chunks_exact(4).enumerate() {
        let raw: [u8; 4] = chunk.try_into().unwrap();
        let v = if h.little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let file_row = i / h.width;
        let col = i % h.width;
        let row = h.height - 1 - file_row;
        z[row * h.width + col] = v as f64;
    }
    DepthMap::new(h.width, h.height, z)
}

/// Encodes as little-endian PFM with scale -1.
pub fn encode_depth(depth: &DepthMap) -> Vec<u8> {
    let (w, h) = (depth.width(), depth.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(4 * w * h);
    for row in (0..h).rev() {
        for &v in &depth.z()[row * w..(row + 1) * w] {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    out
}

pub fn read_depth(path: impl AsRef<Path>) -> Result<DepthMap> {
    let path = path.as_ref();
    let bytes = super::read_bytes(path)?;
    parse_depth(&bytes).map_err(|e| e.in_file(path))
}

pub fn write_depth(path: impl AsRef<Path>, depth: &DepthMap) -> Result<()> {
    super::write_bytes(path.as_ref(), &encode_depth(depth))
}
