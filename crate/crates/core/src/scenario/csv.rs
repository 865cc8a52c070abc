//! CSV rendering with fixed number formatting.
//!
//! Numbers are rounded to 12 significant digits and printed in the shortest
//! form that reads back to the rounded value, with a `.` decimal separator.
//! Integral values keep a trailing `.0`. Negative zero prints as `0.0`.

use std::fmt::Write as _;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0.0".to_string();
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses");
    format!("{rounded:?}")
}

/// A table of optional numbers; `None` renders as an empty field.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        CsvTable {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Option<f64>>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                if let Some(v) = cell {
                    out.push_str(&format_number(*v));
                }
            }
            out.push('\n');
        }
        out
    }
}

/// A table whose first column is a text label.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LabeledTable {
    pub header: Vec<String>,
    pub rows: Vec<(String, Vec<f64>)>,
}

impl LabeledTable {
    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for (label, values) in &self.rows {
            out.push_str(label);
            for v in values {
                let _ = write!(out, ",{}", format_number(*v));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formatting_examples() {
        assert_eq!(format_number(1.0), "1.0");
        assert_eq!(format_number(1.5), "1.5");
        assert_eq!(format_number(0.0), "0.0");
        assert_eq!(format_number(-0.0), "0.0");
        assert_eq!(format_number(1.125), "1.125");
        assert_eq!(format_number(0.1 + 0.2), "0.3");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(-2.0 / 3.0), "-0.666666666667");
        assert_eq!(format_number(1.5000000000000004), "1.5");
        assert_eq!(format_number(f64::NAN), "NaN");
    }

    #[test]
    fn table_rendering() {
        let mut t = CsvTable::new(["t", "z"]);
        t.push(vec![Some(0.0), Some(1.0)]);
        t.push(vec![Some(0.5), None]);
        assert_eq!(t.render(), "t,z\n0.0,1.0\n0.5,\n");
    }

    proptest! {
        #[test]
        fn twelve_significant_digits(x in -1e6f64..1e6) {
            let s = format_number(x);
            let back: f64 = s.parse().unwrap();
            let tol = 5e-12 * x.abs().max(f64::MIN_POSITIVE);
            prop_assert!((back - x).abs() <= tol, "{} -> {}", x, s);
            prop_assert!(!s.contains(','));
        }
    }
}
