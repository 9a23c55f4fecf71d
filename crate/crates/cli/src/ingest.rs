//! Reading return series from delimited text.
//!
//! One value per line, comma or whitespace delimited. A line may carry a
//! leading label (usually a date) before the value; labels are passed
//! through. The first line is treated as a header when its value field is
//! not numeric. Blank lines and lines starting with `#` are skipped.

use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    pub source: String,
    pub values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl ReturnSeries {
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut width = None;
        let mut first = true;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim().trim_start_matches('\u{feff}');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|f| !f.is_empty())
                .collect();
            let is_header = first && fields.last().is_some_and(|f| f.parse::<f64>().is_err());
            first = false;
            if is_header {
                continue;
            }
            let bad = |msg: String| CliError::Data(format!("{source}:{line_no}: {msg}"));
            match (width, fields.len()) {
                (_, 0) => continue,
                (None, w @ (1 | 2)) => width = Some(w),
                (None, w) => return Err(bad(format!("expected 1 or 2 columns, found {w}"))),
                (Some(w), got) if w != got => {
                    return Err(bad(format!("expected {w} column(s), found {got}")))
                }
                _ => {}
            }
            let field = fields[fields.len() - 1];
            let value: f64 = field
                .parse()
                .map_err(|_| bad(format!("not a number: {field:?}")))?;
            if !value.is_finite() {
                return Err(bad(format!("non-finite value {field:?}")));
            }
            if fields.len() == 2 {
                labels.push(fields[0].to_string());
            }
            values.push(value);
        }
        if values.len() < 2 {
            return Err(CliError::Data(format!(
                "{source}: need at least 2 values, found {}",
                values.len()
            )));
        }
        Ok(ReturnSeries {
            source: source.to_string(),
            values,
            labels: (!labels.is_empty()).then_some(labels),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_column_with_header() {
        let s = ReturnSeries::parse("ret\n0.01\n-0.02\n 3e-3 \n", "t").unwrap();
        assert_eq!(s.values, vec![0.01, -0.02, 0.003]);
        assert!(s.labels.is_none());
    }

    #[test]
    fn headerless_and_whitespace() {
        let s = ReturnSeries::parse("1\n\n# note\n2\t\n", "t").unwrap();
        assert_eq!(s.values, vec![1.0, 2.0]);
    }

    #[test]
    fn dated_rows_pass_labels_through() {
        let s = ReturnSeries::parse("date,ret\n2020-01-02,0.5\n2020-01-03,-0.25\n", "t").unwrap();
        assert_eq!(s.values, vec![0.5, -0.25]);
        assert_eq!(s.labels.unwrap(), vec!["2020-01-02", "2020-01-03"]);
    }

    #[test]
    fn errors_name_the_row() {
        let err = ReturnSeries::parse("x\n1\nfoo\n", "r.csv").unwrap_err();
        assert_eq!(
            err.to_string(),
            "data error: r.csv:3: not a number: \"foo\""
        );
        let err = ReturnSeries::parse("1\n2,3\n", "r.csv").unwrap_err();
        assert!(err.to_string().contains("r.csv:2"));
        let err = ReturnSeries::parse("1\nNaN\n", "r.csv").unwrap_err();
        assert!(err.to_string().contains("non-finite"));
        assert!(ReturnSeries::parse("value\n1\n", "r.csv").is_err());
        assert!(ReturnSeries::parse("1,2,3\n", "r.csv").is_err());
    }
}
