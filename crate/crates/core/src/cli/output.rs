//! Rendering of command results as JSON, CSV or SVG.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::analysis::diagram::fmt_sig;

/// Significant digits for floats in JSON and CSV.
pub const JSON_DIGITS: usize = 17;
pub const CSV_DIGITS: usize = 9;

/// A cell of a CSV table.
#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<i64> for Field {
    fn from(x: i64) -> Self {
        Field::Int(x)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.to_string())
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Text(b.to_string())
    }
}

impl From<Option<f64>> for Field {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Field::Empty, Field::Num)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|f| match f {
                    Field::Num(x) => fmt_sig(*x, CSV_DIGITS),
                    Field::Int(i) => i.to_string(),
                    Field::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
                    Field::Text(s) => s.clone(),
                    Field::Empty => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Pretty JSON with every float written to [`JSON_DIGITS`] significant
/// digits; non-finite floats become `null`.
struct SigFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident $(($arg:ident: $ty:ty))?),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)?) -> io::Result<()> {
                self.0.$name(w $(, $arg)?)
            }
        )*
    };
}

impl Formatter for SigFormatter<'_> {
    delegate!(
        begin_array,
        end_array,
        begin_array_value(first: bool),
        end_array_value,
        begin_object,
        end_object,
        begin_object_key(first: bool),
        end_object_key,
        begin_object_value,
        end_object_value,
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f64) -> io::Result<()> {
        if !x.is_finite() {
            return w.write_all(b"null");
        }
        let mut s = fmt_sig(x, JSON_DIGITS);
        if !s.contains(['.', 'e']) {
            s.push_str(".0");
        }
        w.write_all(s.as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, x: f32) -> io::Result<()> {
        self.write_f64(w, x as f64)
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// What a command produced, before a format is chosen.
#[derive(Debug, Clone)]
pub struct Emitted {
    pub json: Value,
    pub table: Table,
    pub svg: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn json_floats_roundtrip_exactly() {
        let xs = [0.1, 1.0 / 3.0, 2.0e-4, -1.5e300, 6.02214076e23, 5e-324, 1.0, 100.0];
        let text = to_json(&xs);
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, xs);
        assert!(text.contains("0.10000000000000001"), "{text}");
    }

    #[test]
    fn non_finite_becomes_null() {
        let text = to_json(&json!({"a": 1}));
        assert!(text.contains("\"a\": 1"));
        assert!(to_json(&[f64::NAN]).contains("null"));
    }

    #[test]
    fn csv_uses_nine_digits_and_quotes_text() {
        let mut t = Table::new(&["x", "note"]);
        t.push(vec![Field::Num(1.0 / 3.0), "a,b".into()]);
        t.push(vec![Field::Empty, Field::Int(-2)]);
        assert_eq!(t.to_csv(), "x,note\n0.333333333,\"a,b\"\n,-2\n");
    }
}
