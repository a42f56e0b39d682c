//! Dataset resolution: built-in names or a CSV file with one `time` column.

use std::path::Path;

use dhillon::{dataset, Dataset};

use crate::error::{CliError, Result};

/// Resolves `source` as a built-in dataset name, then as a CSV path.
pub fn resolve(source: &str, unit: Option<&str>) -> Result<Dataset> {
    let d = match dataset::builtin(source) {
        Some(d) => d,
        None => {
            let path = Path::new(source);
            if !path.exists() {
                return Err(CliError::Input(format!(
                    "dataset '{source}' is neither a built-in ({}) nor an existing file",
                    dataset::BUILTIN_NAMES.join(", ")
                )));
            }
            read_times_csv(path)?
        }
    };
    Ok(match unit {
        Some(u) => d.with_unit(u),
        None => d,
    })
}

/// Reads failure times from a headerless single column or a column headed
/// `time`. Errors name the offending line.
pub fn read_times_csv(path: &Path) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("data").to_string();
    parse_times(file, &label)
}

pub fn parse_times<R: std::io::Read>(reader: R, label: &str) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut times = Vec::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record?;
        let row = record.position().map(|p| p.line() as usize).unwrap_or(i + 1);
        if record.len() != 1 {
            return Err(CliError::Input(format!("row {row}: expected one column, found {}", record.len())));
        }
        let field = &record[0];
        if i == 0 && field.eq_ignore_ascii_case("time") {
            continue;
        }
        let t: f64 = field
            .parse()
            .map_err(|_| CliError::Input(format!("row {row}: '{field}' is not a number")))?;
        if t.is_nan() {
            return Err(CliError::Input(format!("row {row}: value is NaN")));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::Input(format!("row {row}: failure time {t} must be positive and finite")));
        }
        times.push(t);
    }
    if times.is_empty() {
        return Err(CliError::Input(format!("dataset '{label}' contains no observations")));
    }
    Ok(Dataset::new(times, label)?)
}
