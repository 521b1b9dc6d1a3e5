//! CSV input and output.

use std::path::Path;

/// Reads a two-column numeric CSV. A first row that does not parse as
/// numbers is taken as a header.
pub fn read_two_columns(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        if record.len() != 2 {
            return Err(format!(
                "{}: row {} has {} columns, expected 2",
                path.display(),
                row + 1,
                record.len()
            ));
        }
        match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
            (Ok(x), Ok(y)) if x.is_finite() && y.is_finite() => {
                xs.push(x);
                ys.push(y);
            }
            _ if row == 0 => continue,
            _ => {
                return Err(format!(
                    "{}: row {} is not numeric",
                    path.display(),
                    row + 1
                ))
            }
        }
    }
    if xs.is_empty() {
        return Err(format!("{}: no data rows", path.display()));
    }
    Ok((xs, ys))
}

/// Writes `columns` side by side under `headers`. All columns must have the
/// same length.
pub fn write_columns(path: &Path, headers: &[String], columns: &[&[f64]]) -> Result<(), String> {
    debug_assert_eq!(headers.len(), columns.len());
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    w.write_record(headers).map_err(|e| e.to_string())?;
    let rows = columns.first().map_or(0, |c| c.len());
    let mut record = Vec::with_capacity(columns.len());
    for i in 0..rows {
        record.clear();
        record.extend(columns.iter().map(|c| num(c[i])));
        w.write_record(&record).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

/// Writes string records under `headers`.
pub fn write_rows(path: &Path, headers: &[&str], rows: &[Vec<String>]) -> Result<(), String> {
    let mut w = csv::Writer::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
    w.write_record(headers).map_err(|e| e.to_string())?;
    for row in rows {
        w.write_record(row).map_err(|e| e.to_string())?;
    }
    w.flush().map_err(|e| format!("{}: {e}", path.display()))
}

/// Shortest round-trip decimal; exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}
