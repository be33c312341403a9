//! Label CSV files.
//!
//! Header: `studyId,patientId,sex,age,view,<category columns...>`. Category
//! cells use `1` (confirmed positive), `0` (confirmed negative), `-1`
//! (uncertain) or blank (empty).

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::domain::LabelState;
use crate::error::{Result, TrxError};
use crate::labelset::{encode_label_value, merge_opacity_label, LabelRecord, Sex, ViewPosition};

const FIXED_COLUMNS: [&str; 5] = ["studyId", "patientId", "sex", "age", "view"];

pub fn parse_labels<R: Read>(reader: R) -> Result<Vec<LabelRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    for (i, name) in FIXED_COLUMNS.iter().enumerate() {
        if headers.get(i) != Some(*name) {
            return Err(TrxError::invalid(format!(
                "label header column {} must be {name:?}, found {:?}",
                i + 1,
                headers.get(i)
            )));
        }
    }
    let mut seen = BTreeSet::new();
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let at = |what: &str| format!("labels row {}: {what}", line + 2);
        let study_id = row[0].to_string();
        if study_id.is_empty() {
            return Err(TrxError::invalid(at("empty studyId")));
        }
        if !seen.insert(study_id.clone()) {
            return Err(TrxError::invalid(at(&format!("duplicate studyId {study_id}"))));
        }
        if row[1].is_empty() {
            return Err(TrxError::invalid(at("empty patientId")));
        }
        let age = row[3]
            .parse::<f64>()
            .ok()
            .filter(|a| *a >= 0.0 && a.fract() == 0.0)
            .ok_or_else(|| TrxError::invalid(at(&format!("bad age {:?}", &row[3]))))?;
        let mut categories = BTreeMap::new();
        for (name, cell) in headers.iter().zip(row.iter()).skip(FIXED_COLUMNS.len()) {
            let state = LabelState::parse_code(cell).map_err(|e| TrxError::invalid(at(&e.to_string())))?;
            if state != LabelState::Empty {
                categories.insert(name.to_string(), state);
            }
        }
        records.push(LabelRecord {
            study_id,
            patient_id: row[1].to_string(),
            sex: Sex::parse(&row[2]),
            age: age as u32,
            view: ViewPosition::parse(&row[4]),
            categories,
        });
    }
    Ok(records)
}

pub fn read_labels(path: &Path) -> Result<Vec<LabelRecord>> {
    let file = std::fs::File::open(path).map_err(|e| TrxError::io(path, e))?;
    parse_labels(file)
}

/// Writes records with the given category columns; absent categories are
/// written blank.
pub fn write_labels_to<W: Write>(writer: W, records: &[LabelRecord], categories: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<&str> = FIXED_COLUMNS
        .iter()
        .copied()
        .chain(categories.iter().map(String::as_str))
        .collect();
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![
            r.study_id.clone(),
            r.patient_id.clone(),
            r.sex.as_str().to_string(),
            r.age.to_string(),
            r.view.as_str().to_string(),
        ];
        row.extend(categories.iter().map(|c| r.state(c).code().to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| TrxError::io("<labels>", e))?;
    Ok(())
}

/// Category columns used by any record, sorted.
pub fn category_union(records: &[LabelRecord]) -> Vec<String> {
    records
        .iter()
        .flat_map(|r| r.categories.keys().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn write_labels(path: &Path, records: &[LabelRecord], categories: &[String]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| TrxError::io(path, e))?;
    write_labels_to(file, records, categories)
}

/// Unified opacity label and its soft training target per record:
/// `studyId,patientId,sex,age,view,opacity,opacityTarget`.
pub fn write_merged_labels_to<W: Write>(writer: W, records: &[LabelRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(FIXED_COLUMNS.iter().chain(&["opacity", "opacityTarget"]))?;
    for r in records {
        let state = merge_opacity_label(r);
        w.write_record([
            r.study_id.as_str(),
            r.patient_id.as_str(),
            r.sex.as_str(),
            &r.age.to_string(),
            r.view.as_str(),
            state.code(),
            &encode_label_value(state).to_string(),
        ])?;
    }
    w.flush().map_err(|e| TrxError::io("<merged labels>", e))?;
    Ok(())
}
