//! On-disk formats.
//!
//! An outputs directory holds one subdirectory per study, named by study id:
//!
//! ```text
//! <dir>/<study>/pneumothorax.trxm       mask grid
//! <dir>/<study>/pleural_effusion.trxm   mask grid
//! <dir>/<study>/lung_opacity.txt        softmax pair: "neg" and "pos" on two lines
//! <dir>/<study>/fracture.txt            one "x1 y1 x2 y2 conf" line per box; may be empty
//! <dir>/<study>/lung_opacity_cam.trxm   optional class activation map
//! ```
//!
//! A `.trxm` grid is the ASCII magic `TRXM`, width and height as
//! little-endian `u32`, then `width * height` little-endian `f32` cells in
//! row-major order.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::domain::{FindingKind, FindingMap, RawOutput, ScoreGrid, ScoredBox, SoftmaxPair, StudyOutputs};
use crate::error::{Result, TrxError};

pub const MASK_MAGIC: &[u8; 4] = b"TRXM";
pub const CAM_FILE: &str = "lung_opacity_cam.trxm";

/// File name holding a finding's raw output.
pub fn output_file_name(kind: FindingKind) -> String {
    match kind {
        FindingKind::Pneumothorax | FindingKind::PleuralEffusion => format!("{}.trxm", kind.key()),
        FindingKind::LungOpacity | FindingKind::Fracture => format!("{}.txt", kind.key()),
    }
}

pub fn encode_mask(grid: &ScoreGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 4 * grid.cells().len());
    out.extend_from_slice(MASK_MAGIC);
    out.extend_from_slice(&(grid.width() as u32).to_le_bytes());
    out.extend_from_slice(&(grid.height() as u32).to_le_bytes());
    for v in grid.cells() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses a `.trxm` grid. Errors are plain strings; callers attach the
/// study and file.
pub fn decode_mask(bytes: &[u8]) -> std::result::Result<ScoreGrid, String> {
    if bytes.len() < 12 || &bytes[..4] != MASK_MAGIC {
        return Err("corrupt header: missing TRXM magic".into());
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let (w, h) = (word(4) as usize, word(8) as usize);
    let expected = w
        .checked_mul(h)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(12))
        .ok_or("corrupt header: dimensions overflow")?;
    if bytes.len() != expected {
        return Err(format!(
            "corrupt header: {w}x{h} grid needs {expected} bytes, file has {}",
            bytes.len()
        ));
    }
    let cells = bytes[12..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
        .collect();
    ScoreGrid::new(w, h, cells).map_err(|e| e.to_string())
}

pub fn encode_softmax(pair: &SoftmaxPair) -> String {
    format!("{}\n{}\n", pair.negative(), pair.positive())
}

pub fn decode_softmax(text: &str) -> std::result::Result<SoftmaxPair, String> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.len() != 2 {
        return Err(format!("expected 2 values, found {}", tokens.len()));
    }
    let parse = |t: &str| t.parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    SoftmaxPair::new(parse(tokens[0])?, parse(tokens[1])?).map_err(|e| e.to_string())
}

pub fn encode_boxes(boxes: &[ScoredBox]) -> String {
    boxes
        .iter()
        .map(|b| format!("{} {} {} {} {}\n", b.x1(), b.y1(), b.x2(), b.y2(), b.confidence()))
        .collect()
}

pub fn decode_boxes(text: &str) -> std::result::Result<Vec<ScoredBox>, String> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, line)| {
            let v: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| format!("line {}: not a number: {t:?}", n + 1))
                })
                .collect::<std::result::Result<_, _>>()?;
            if v.len() != 5 {
                return Err(format!("line {}: expected 5 values, found {}", n + 1, v.len()));
            }
            ScoredBox::new(v[0], v[1], v[2], v[3], v[4]).map_err(|e| format!("line {}: {e}", n + 1))
        })
        .collect()
}

fn format_err(study: &str, file: &str, reason: impl Into<String>) -> TrxError {
    TrxError::Format {
        study: study.to_string(),
        file: file.to_string(),
        reason: reason.into(),
    }
}

fn read_study_file(dir: &Path, study: &str, file: &str) -> Result<Vec<u8>> {
    fs::read(dir.join(file)).map_err(|e| format_err(study, file, e.to_string()))
}

/// Reads and validates one study directory.
pub fn load_study(study_dir: &Path) -> Result<StudyOutputs> {
    let study = study_dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| TrxError::invalid(format!("bad study directory {}", study_dir.display())))?
        .to_string();
    let mut outputs = Vec::with_capacity(4);
    for kind in FindingKind::ALL {
        let file = output_file_name(kind);
        let bytes = read_study_file(study_dir, &study, &file)?;
        let text = || String::from_utf8(bytes.clone()).map_err(|_| "not UTF-8 text".to_string());
        let parsed = match kind {
            FindingKind::Pneumothorax | FindingKind::PleuralEffusion => decode_mask(&bytes).map(RawOutput::MaskGrid),
            FindingKind::LungOpacity => text().and_then(|t| decode_softmax(&t)).map(RawOutput::SoftmaxPair),
            FindingKind::Fracture => text().and_then(|t| decode_boxes(&t)).map(RawOutput::BoxList),
        };
        outputs.push(parsed.map_err(|reason| format_err(&study, &file, reason))?);
    }
    let mut it = outputs.into_iter();
    StudyOutputs::new(study, FindingMap::from_fn(|_| it.next().expect("four outputs")))
}

/// Every study under `dir`, sorted by study id.
pub fn load_raw_outputs(dir: &Path) -> Result<Vec<StudyOutputs>> {
    let mut dirs: Vec<_> = fs::read_dir(dir)
        .map_err(|e| TrxError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_dir())
        .collect();
    dirs.sort();
    dirs.iter().map(|d| load_study(d)).collect()
}

/// Loads a single study by id.
pub fn load_study_by_id(dir: &Path, study_id: &str) -> Result<StudyOutputs> {
    let path = dir.join(study_id);
    if !path.is_dir() {
        return Err(TrxError::invalid(format!(
            "no study {study_id} under {}",
            dir.display()
        )));
    }
    load_study(&path)
}

/// The optional activation map stored next to a study's outputs.
pub fn load_cam(dir: &Path, study_id: &str) -> Result<Option<ScoreGrid>> {
    let path = dir.join(study_id).join(CAM_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let bytes = fs::read(&path).map_err(|e| TrxError::io(&path, e))?;
    decode_mask(&bytes)
        .map(Some)
        .map_err(|reason| format_err(study_id, CAM_FILE, reason))
}

pub fn write_study(dir: &Path, outputs: &StudyOutputs, cam: Option<&ScoreGrid>) -> Result<()> {
    let study_dir = dir.join(outputs.study_id());
    fs::create_dir_all(&study_dir).map_err(|e| TrxError::io(&study_dir, e))?;
    for (kind, out) in outputs.per_finding().iter() {
        let bytes = match out {
            RawOutput::MaskGrid(g) => encode_mask(g),
            RawOutput::SoftmaxPair(p) => encode_softmax(p).into_bytes(),
            RawOutput::BoxList(b) => encode_boxes(b).into_bytes(),
        };
        write_bytes(&study_dir.join(output_file_name(kind)), &bytes)?;
    }
    if let Some(cam) = cam {
        write_bytes(&study_dir.join(CAM_FILE), &encode_mask(cam))?;
    }
    Ok(())
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| TrxError::io(path, e))
}

/// Pretty JSON with struct-declaration key order and a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| TrxError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mask_round_trip_and_corruption() {
        let g = ScoreGrid::new(3, 2, vec![0.0, 0.25, 1.0, 0.1, 0.3, 0.9]).unwrap();
        let bytes = encode_mask(&g);
        assert_eq!(&bytes[..4], b"TRXM");
        assert_eq!(bytes.len(), 12 + 24);
        assert_eq!(decode_mask(&bytes).unwrap(), g);
        assert!(decode_mask(&bytes[..20]).unwrap_err().contains("corrupt header"));
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_mask(&bad).is_err());
        let mut out_of_range = bytes;
        out_of_range[12..16].copy_from_slice(&1.5f32.to_le_bytes());
        assert!(decode_mask(&out_of_range).unwrap_err().contains("value out of range"));
    }

    #[test]
    fn softmax_and_boxes_text() {
        let p = SoftmaxPair::new(0.02, 0.98).unwrap();
        assert_eq!(encode_softmax(&p), "0.02\n0.98\n");
        assert_eq!(decode_softmax("0.02 0.98").unwrap(), p);
        assert!(decode_softmax("0.5").is_err());
        let boxes = vec![ScoredBox::new(1.0, 2.0, 3.5, 4.0, 0.4).unwrap()];
        assert_eq!(encode_boxes(&boxes), "1 2 3.5 4 0.4\n");
        assert_eq!(decode_boxes(&encode_boxes(&boxes)).unwrap(), boxes);
        assert_eq!(decode_boxes("").unwrap(), vec![]);
        assert!(decode_boxes("1 2 3 4").is_err());
        assert!(decode_boxes("3 2 1 4 0.5").is_err());
    }
}
