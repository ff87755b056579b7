//! CSV sample rows.

use std::path::Path;

use serde::Serialize;

use super::HarnessError;

/// One measured value. `value` is empty for censored runs; `n`, `k` and `m`
/// are empty where the command has no such parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleRow {
    pub run_id: u64,
    pub seed: u64,
    pub n: Option<f64>,
    pub k: Option<f64>,
    pub box_halfwidth: u64,
    pub flavor: String,
    pub observable: String,
    pub m: Option<u64>,
    pub value: Option<f64>,
}

/// Write `rows` as CSV with a header taken from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Like [`write_csv`] but writes the header even when `rows` is empty.
pub fn write_samples(path: &Path, rows: &[SampleRow]) -> Result<(), HarnessError> {
    if rows.is_empty() {
        std::fs::write(path, "run_id,seed,n,k,box_halfwidth,flavor,observable,m,value\n")?;
        return Ok(());
    }
    write_csv(path, rows)
}
