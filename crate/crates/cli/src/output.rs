use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::Format;

/// Buffered destination: the `--out` file or stdout.
pub struct Sink {
    inner: BufWriter<Box<dyn Write>>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> io::Result<Self> {
        let w: Box<dyn Write> = match path {
            Some(p) => Box::new(File::create(p)?),
            None => Box::new(io::stdout().lock()),
        };
        Ok(Sink {
            inner: BufWriter::new(w),
        })
    }

    /// One pretty-printed JSON document followed by a newline.
    pub fn json(&mut self, value: &impl Serialize) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut self.inner, value)?;
        self.inner.write_all(b"\n")
    }

    /// One compact JSON document per line.
    pub fn json_line(&mut self, value: &impl Serialize) -> io::Result<()> {
        serde_json::to_writer(&mut self.inner, value)?;
        self.inner.write_all(b"\n")
    }

    pub fn row<I, S>(&mut self, fields: I) -> io::Result<()>
    where
        I: IntoIterator<Item = S>,
        S: std::fmt::Display,
    {
        let mut first = true;
        for f in fields {
            if !first {
                self.inner.write_all(b",")?;
            }
            first = false;
            write!(self.inner, "{f}")?;
        }
        self.inner.write_all(b"\n")
    }

    /// Header plus a single row holding the scalar top-level fields of
    /// `value`; nested objects and arrays are left out.
    pub fn flat_csv(&mut self, value: &impl Serialize) -> io::Result<()> {
        let v = serde_json::to_value(value)?;
        let Value::Object(map) = v else {
            return self.row(["value"]).and_then(|_| self.row([csv_cell(&v)]));
        };
        let scalars: Vec<(&String, &Value)> = map
            .iter()
            .filter(|(_, v)| !matches!(v, Value::Object(_) | Value::Array(_)))
            .collect();
        self.row(scalars.iter().map(|(k, _)| k.as_str()))?;
        self.row(scalars.iter().map(|(_, v)| csv_cell(v)))
    }

    pub fn emit(&mut self, format: Format, value: &impl Serialize) -> io::Result<()> {
        match format {
            Format::Json => self.json(value),
            Format::Csv => self.flat_csv(value),
        }
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.inner.flush()
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}
