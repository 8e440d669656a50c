//! COCO-style run-length masks: column-major, alternating background and
//! foreground runs, always starting with a (possibly empty) background run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A binary mask stored row-major (`data[y * width + x]`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "mask {width}x{height} needs {} pixels, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.data[y * self.width + x]
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn area(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }
}

pub fn decode_rle(runs: &[u32], width: usize, height: usize) -> Result<BinaryMask> {
    let expected = (width * height) as u64;
    let sum: u64 = runs.iter().map(|&r| r as u64).sum();
    if sum != expected {
        return Err(Error::RunSumMismatch { sum, expected });
    }
    let mut data = vec![false; width * height];
    let mut k = 0usize;
    for (i, &run) in runs.iter().enumerate() {
        let fg = i % 2 == 1;
        for _ in 0..run {
            if fg {
                let (x, y) = (k / height, k % height);
                data[y * width + x] = true;
            }
            k += 1;
        }
    }
    BinaryMask::new(width, height, data)
}

pub fn encode_rle(mask: &BinaryMask) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut len = 0u32;
    for x in 0..mask.width {
        for y in 0..mask.height {
            let v = mask.get(x, y);
            if v != current {
                runs.push(len);
                current = v;
                len = 0;
            }
            len += 1;
        }
    }
    runs.push(len);
    runs
}

/// An encoded mask with its raster size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub width: usize,
    pub height: usize,
    pub counts: Vec<u32>,
}

impl RleMask {
    pub fn encode(mask: &BinaryMask) -> Self {
        Self {
            width: mask.width,
            height: mask.height,
            counts: encode_rle(mask),
        }
    }

    pub fn decode(&self) -> Result<BinaryMask> {
        decode_rle(&self.counts, self.width, self.height)
    }

    pub fn validate(&self) -> Result<()> {
        let expected = (self.width * self.height) as u64;
        let sum: u64 = self.counts.iter().map(|&r| r as u64).sum();
        if sum != expected {
            return Err(Error::RunSumMismatch { sum, expected });
        }
        Ok(())
    }
}

/// One candidate's masks across the sequence; `None` marks frames where the
/// candidate is not visible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskSequence {
    pub candidate_id: String,
    pub frames: Vec<Option<RleMask>>,
}

impl MaskSequence {
    pub fn validate(&self, sequence_length: usize) -> Result<()> {
        if self.frames.len() != sequence_length {
            return Err(Error::DimensionMismatch(format!(
                "candidate {} has {} mask frames, sequence has {}",
                self.candidate_id,
                self.frames.len(),
                sequence_length
            )));
        }
        self.frames.iter().flatten().try_for_each(RleMask::validate)
    }
}
