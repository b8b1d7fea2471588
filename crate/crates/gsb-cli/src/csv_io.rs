//! Numeric CSV reading and writing.
//!
//! All emitters format floats with Rust's shortest round-trip notation,
//! so a written value parses back bit-identically. Writes go through a
//! temporary file in the target directory followed by a rename.
//! Ingestion rejects NaN and non-numeric fields with the offending row
//! number; decimal points only, no locale handling.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};

/// A parsed CSV: column names (synthesised as `c0, c1, ...` when the
/// file has no header row) and column-major values.
#[derive(Debug, Clone)]
pub struct Columns {
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl Columns {
    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Looks a column up by header name or 0-based index.
    pub fn column(&self, key: &str) -> CliResult<&[f64]> {
        if let Some(pos) = self.names.iter().position(|n| n == key) {
            return Ok(&self.data[pos]);
        }
        if let Ok(idx) = key.parse::<usize>() {
            if idx < self.data.len() {
                return Ok(&self.data[idx]);
            }
        }
        Err(CliError::input(format!(
            "column '{key}' not found; available: {}",
            self.names.join(", ")
        )))
    }
}

fn parse_field(field: &str, path: &Path, row: usize) -> CliResult<f64> {
    let value: f64 = field.trim().parse().map_err(|_| {
        CliError::input(format!(
            "{}: row {row}: cannot parse '{}' as a number",
            path.display(),
            field.trim()
        ))
    })?;
    if value.is_nan() {
        return Err(CliError::input(format!(
            "{}: row {row}: NaN is not accepted in inputs",
            path.display()
        )));
    }
    Ok(value)
}

/// Reads a whole numeric CSV. The first row is treated as a header
/// unless every field of it already parses as a number.
pub fn read_columns(path: &Path) -> CliResult<Columns> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());

    let Some((first_idx, first)) = lines.next() else {
        return Err(CliError::input(format!("{}: file is empty", path.display())));
    };
    let first_fields: Vec<&str> = first.split(',').collect();
    let width = first_fields.len();
    let headerless = first_fields.iter().all(|f| f.trim().parse::<f64>().is_ok());

    let names: Vec<String> = if headerless {
        (0..width).map(|i| format!("c{i}")).collect()
    } else {
        first_fields.iter().map(|f| f.trim().to_string()).collect()
    };

    let mut data: Vec<Vec<f64>> = vec![Vec::new(); width];
    if headerless {
        for (col, field) in first_fields.iter().enumerate() {
            data[col].push(parse_field(field, path, first_idx + 1)?);
        }
    }
    for (idx, line) in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != width {
            return Err(CliError::input(format!(
                "{}: row {}: expected {width} fields, found {}",
                path.display(),
                idx + 1,
                fields.len()
            )));
        }
        for (col, field) in fields.iter().enumerate() {
            data[col].push(parse_field(field, path, idx + 1)?);
        }
    }
    Ok(Columns { names, data })
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes `content` atomically: temp file in the same directory, then
/// rename over the target.
pub fn write_atomic(path: &Path, content: &str) -> CliResult<()> {
    let tmp = temp_sibling(path);
    let mut file = fs::File::create(&tmp)
        .map_err(|e| CliError::input(format!("{}: {e}", tmp.display())))?;
    file.write_all(content.as_bytes())
        .and_then(|_| file.sync_all())
        .map_err(|e| CliError::input(format!("{}: {e}", tmp.display())))?;
    drop(file);
    fs::rename(&tmp, path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Renders one CSV from a header and row-major cells.
pub fn render_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Shortest round-trip formatting for a float cell.
pub fn fmt_f64(value: f64) -> String {
    format!("{value}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmp_path(name: &str) -> PathBuf {
        std::env::temp_dir().join(format!("gsb_csv_test_{name}_{}", std::process::id()))
    }

    #[test]
    fn round_trip_is_lossless() {
        let path = tmp_path("roundtrip");
        let values = [1.0 / 3.0, -2.5e-17, 6.0827, f64::MIN_POSITIVE, 12345.678901234567];
        let body = render_csv(
            &["x"],
            values.iter().map(|v| vec![fmt_f64(*v)]),
        );
        write_atomic(&path, &body).unwrap();
        let cols = read_columns(&path).unwrap();
        assert_eq!(cols.names, vec!["x"]);
        for (a, b) in cols.data[0].iter().zip(&values) {
            assert_eq!(a.to_bits(), b.to_bits(), "{a} != {b}");
        }
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn headerless_files_get_synthetic_names() {
        let path = tmp_path("headerless");
        write_atomic(&path, "1.0,2.0\n3.0,4.0\n").unwrap();
        let cols = read_columns(&path).unwrap();
        assert_eq!(cols.names, vec!["c0", "c1"]);
        assert_eq!(cols.data[0], vec![1.0, 3.0]);
        assert_eq!(cols.column("1").unwrap(), &[2.0, 4.0]);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_nan_and_garbage_with_row_numbers() {
        let path = tmp_path("nan");
        write_atomic(&path, "x\n1.0\nNaN\n").unwrap();
        let err = read_columns(&path).unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("NaN"), "{err}");

        write_atomic(&path, "x\n1.0\noops\n").unwrap();
        let err = read_columns(&path).unwrap_err().to_string();
        assert!(err.contains("row 3") && err.contains("oops"), "{err}");
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_ragged_rows_and_missing_columns() {
        let path = tmp_path("ragged");
        write_atomic(&path, "a,b\n1.0,2.0\n3.0\n").unwrap();
        let err = read_columns(&path).unwrap_err().to_string();
        assert!(err.contains("row 3"), "{err}");

        write_atomic(&path, "a,b\n1.0,2.0\n").unwrap();
        let cols = read_columns(&path).unwrap();
        assert!(cols.column("missing").is_err());
        std::fs::remove_file(&path).ok();
    }
}
