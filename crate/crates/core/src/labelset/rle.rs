//! Run-length codec for segmentation ground truth.
//!
//! Runs are `start length` pairs of whitespace-separated integers. Pixel
//! positions are 1-based and linearized column-major: position `i` is
//! column `(i - 1) / height`, row `(i - 1) % height`.

use crate::error::{Result, TrxError};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    /// Row-major.
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(TrxError::invalid("mask dimensions must be positive"));
        }
        if bits.len() != width * height {
            return Err(TrxError::DimensionMismatch(format!(
                "{width}x{height} mask needs {} bits, got {}",
                width * height,
                bits.len()
            )));
        }
        Ok(BinaryMask { width, height, bits })
    }

    pub fn empty(width: usize, height: usize) -> Result<Self> {
        BinaryMask::new(width, height, vec![false; width * height])
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        self.bits[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: bool) {
        self.bits[row * self.width + col] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Value at 0-based column-major position.
    fn at_linear(&self, pos: usize) -> bool {
        self.get(pos / self.height, pos % self.height)
    }
}

pub fn rle_decode(rle: &str, width: usize, height: usize) -> Result<BinaryMask> {
    let mut mask = BinaryMask::empty(width, height)?;
    let total = (width * height) as u64;
    let tokens: Vec<&str> = rle.split_whitespace().collect();
    if !tokens.len().is_multiple_of(2) {
        return Err(TrxError::Rle {
            pair: tokens.len() / 2,
            reason: format!("odd token count {}", tokens.len()),
        });
    }
    for (pair, chunk) in tokens.chunks_exact(2).enumerate() {
        let parse = |t: &str| {
            t.parse::<u64>().map_err(|_| TrxError::Rle {
                pair,
                reason: format!("non-integer token {t:?}"),
            })
        };
        let start = parse(chunk[0])?;
        let len = parse(chunk[1])?;
        if start == 0 {
            return Err(TrxError::Rle {
                pair,
                reason: "start positions are 1-based".into(),
            });
        }
        if len == 0 {
            return Err(TrxError::Rle {
                pair,
                reason: "zero-length run".into(),
            });
        }
        if start.checked_add(len - 1).is_none_or(|end| end > total) {
            return Err(TrxError::Rle {
                pair,
                reason: format!("run {start}+{len} exceeds {total} pixels"),
            });
        }
        for pos in (start - 1)..(start - 1 + len) {
            let pos = pos as usize;
            let (col, row) = (pos / height, pos % height);
            if mask.get(col, row) {
                return Err(TrxError::Rle {
                    pair,
                    reason: format!("run overlaps pixel {}", pos + 1),
                });
            }
            mask.set(col, row, true);
        }
    }
    Ok(mask)
}

/// Canonical encoding: ascending, maximal runs; all-false masks encode to
/// the empty string.
pub fn rle_encode(mask: &BinaryMask) -> String {
    let total = mask.width * mask.height;
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut pos = 0;
    while pos < total {
        if mask.at_linear(pos) {
            let start = pos;
            while pos < total && mask.at_linear(pos) {
                pos += 1;
            }
            runs.push((start + 1, pos - start));
        } else {
            pos += 1;
        }
    }
    runs.iter()
        .map(|(s, l)| format!("{s} {l}"))
        .collect::<Vec<_>>()
        .join(" ")
}
