//! Raw ordinal survey tables and their CSV form.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Version line written at the top of generated dataset files. Leading `#`
/// lines are treated as comments by the loader, so plain survey CSV exports
/// and generated files read through the same path.
pub const DATASET_VERSION_LINE: &str = "# costboost-dataset v1";

/// A table of ordinal survey responses.
///
/// Cells hold ratings on the 1–5 scale or a missing marker (`None`). Every
/// row has exactly one cell per column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyTable {
    column_names: Vec<String>,
    rows: Vec<Vec<Option<u8>>>,
}

impl SurveyTable {
    /// Build a table from parts, validating the cell range and row widths.
    pub fn new(column_names: Vec<String>, rows: Vec<Vec<Option<u8>>>) -> Result<Self> {
        validate_header(&column_names)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != column_names.len() {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} cells, expected {}",
                    r + 1,
                    row.len(),
                    column_names.len()
                )));
            }
            for (c, cell) in row.iter().enumerate() {
                if let Some(v) = cell {
                    if !(1..=5).contains(v) {
                        return Err(Error::ValueOutOfRange {
                            value: i64::from(*v),
                            row: r + 1,
                            column: column_names[c].clone(),
                        });
                    }
                }
            }
        }
        Ok(Self { column_names, rows })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.column_names.len()
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|c| c == name)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<u8> {
        self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<Option<u8>>] {
        &self.rows
    }

    /// Parse a survey table from CSV text.
    ///
    /// The first non-comment row is the header. Cells that are empty or not
    /// an integer become missing markers; integers outside 1..=5 are an
    /// error naming the offending row and column.
    pub fn from_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(reader);

        let header: Vec<String> = rdr
            .headers()?
            .iter()
            .map(|h| h.trim().to_string())
            .collect();
        validate_header(&header)?;

        let mut rows = Vec::new();
        for (r, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::InvalidInput(format!(
                    "row {} has {} cells, expected {}",
                    r + 1,
                    record.len(),
                    header.len()
                )));
            }
            let mut row = Vec::with_capacity(header.len());
            for (c, raw) in record.iter().enumerate() {
                row.push(parse_cell(raw, r + 1, &header[c])?);
            }
            rows.push(row);
        }
        Ok(Self {
            column_names: header,
            rows,
        })
    }

    /// Render the table as CSV, prefixed with the dataset version line.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        out.push_str(DATASET_VERSION_LINE);
        out.push('\n');
        out.push_str(&join_csv_row(self.column_names.iter().map(String::as_str)));
        out.push('\n');
        for row in &self.rows {
            let rendered = row.iter().map(|c| match c {
                Some(v) => v.to_string(),
                None => String::new(),
            });
            let fields: Vec<String> = rendered.collect();
            out.push_str(&join_csv_row(fields.iter().map(String::as_str)));
            out.push('\n');
        }
        out
    }
}

/// Load a survey CSV from disk and check that `target_column` exists.
pub fn load_survey_csv<P: AsRef<Path>>(path: P, target_column: &str) -> Result<SurveyTable> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path.display().to_string())
        } else {
            Error::Io(e)
        }
    })?;
    let table = SurveyTable::from_reader(file)?;
    if table.column_index(target_column).is_none() {
        return Err(Error::MissingTargetColumn(target_column.to_string()));
    }
    Ok(table)
}

fn validate_header(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::MalformedHeader("header row is empty".into()));
    }
    let mut seen = HashSet::new();
    for name in names {
        if name.is_empty() {
            return Err(Error::MalformedHeader("empty column name".into()));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::MalformedHeader(format!(
                "duplicate column name {name:?}"
            )));
        }
    }
    Ok(())
}

fn parse_cell(raw: &str, row: usize, column: &str) -> Result<Option<u8>> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok(None);
    }
    match trimmed.parse::<i64>() {
        Ok(v) if (1..=5).contains(&v) => Ok(Some(v as u8)),
        Ok(v) => Err(Error::ValueOutOfRange {
            value: v,
            row,
            column: column.to_string(),
        }),
        // Non-integer cells (free text, decimals) count as missing.
        Err(_) => Ok(None),
    }
}

/// Quote one CSV field when it contains separators. Survey column names
/// rarely need quoting, but commas and quotes must survive a round trip.
pub(crate) fn csv_field(f: &str) -> String {
    if f.contains(',') || f.contains('"') || f.contains('\n') {
        format!("\"{}\"", f.replace('"', "\"\""))
    } else {
        f.to_string()
    }
}

pub(crate) fn join_csv_row<'a>(fields: impl Iterator<Item = &'a str>) -> String {
    fields.map(csv_field).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<SurveyTable> {
        SurveyTable::from_reader(text.as_bytes())
    }

    #[test]
    fn parses_plain_table() {
        let t = read("Comedy,Age\n5,3\n4,2\n1,5\n").unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.n_columns(), 2);
        assert_eq!(t.cell(0, 0), Some(5));
        assert_eq!(t.cell(2, 0), Some(1));
        assert!(t.rows().iter().all(|r| r.iter().all(|c| c.is_some())));
    }

    #[test]
    fn empty_cell_becomes_missing() {
        let t = read("a,b\n5,\n,3\n").unwrap();
        assert_eq!(t.cell(0, 1), None);
        assert_eq!(t.cell(1, 0), None);
    }

    #[test]
    fn non_numeric_cell_becomes_missing() {
        let t = read("a,b\nn/a,2\n3.5,4\n").unwrap();
        assert_eq!(t.cell(0, 0), None);
        assert_eq!(t.cell(1, 0), None);
        assert_eq!(t.cell(1, 1), Some(4));
    }

    #[test]
    fn out_of_range_integer_is_an_error_naming_row_and_column() {
        let err = read("a,b\n1,2\n7,3\n").unwrap_err();
        match err {
            Error::ValueOutOfRange { value, row, column } => {
                assert_eq!(value, 7);
                assert_eq!(row, 2);
                assert_eq!(column, "a");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_and_empty_headers_rejected() {
        assert!(matches!(
            read("a,a\n1,2\n").unwrap_err(),
            Error::MalformedHeader(_)
        ));
        assert!(matches!(
            read("a,\n1,2\n").unwrap_err(),
            Error::MalformedHeader(_)
        ));
    }

    #[test]
    fn load_checks_target_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("survey.csv");
        std::fs::write(&path, "Comedy,Age\n5,3\n").unwrap();
        assert!(load_survey_csv(&path, "Comedy").is_ok());
        assert!(matches!(
            load_survey_csv(&path, "Western").unwrap_err(),
            Error::MissingTargetColumn(_)
        ));
        assert!(matches!(
            load_survey_csv(dir.path().join("nope.csv"), "Comedy").unwrap_err(),
            Error::FileNotFound(_)
        ));
    }

    #[test]
    fn csv_round_trip_preserves_cells() {
        let t = read("a,b\n5,\n1,3\n").unwrap();
        let text = t.to_csv_string();
        assert!(text.starts_with(DATASET_VERSION_LINE));
        let back = read(&text).unwrap();
        assert_eq!(t, back);
    }

    #[test]
    fn rejects_out_of_range_cells_in_constructor() {
        let err = SurveyTable::new(vec!["a".into()], vec![vec![Some(6)]]).unwrap_err();
        assert!(matches!(err, Error::ValueOutOfRange { .. }));
    }
}
