//! `x,y` CSV ingestion.

use std::io::BufRead;

use pccsens::Point;

use crate::CliError;

/// Row-by-row reader over an `x,y` CSV stream. Lines starting with `#` and
/// blank lines are skipped; LF and CRLF endings are both accepted. Line
/// numbers in errors count every physical line.
pub struct PointReader<R: BufRead> {
    inner: R,
    line: u64,
    buf: String,
}

impl<R: BufRead> PointReader<R> {
    pub fn new(rdr: R) -> Result<Self, CliError> {
        let mut reader = PointReader {
            inner: rdr,
            line: 0,
            buf: String::new(),
        };
        let header = reader.next_row()?.unwrap_or_default();
        let names: Vec<String> = header.split(',').map(|h| h.trim().to_ascii_lowercase()).collect();
        if names != ["x", "y"] {
            return Err(CliError::Input(format!(
                "line {}: expected header 'x,y', found '{header}'",
                reader.line.max(1)
            )));
        }
        Ok(reader)
    }

    /// Next non-comment, non-blank line with its terminator removed.
    fn next_row(&mut self) -> Result<Option<String>, CliError> {
        loop {
            self.buf.clear();
            let n = self
                .inner
                .read_line(&mut self.buf)
                .map_err(|e| CliError::Input(format!("line {}: {e}", self.line + 1)))?;
            if n == 0 {
                return Ok(None);
            }
            self.line += 1;
            let row = self.buf.trim_end_matches(['\n', '\r']).trim();
            if row.is_empty() || row.starts_with('#') {
                continue;
            }
            return Ok(Some(row.to_string()));
        }
    }

    /// Next point, or `None` at end of input.
    pub fn next_point(&mut self) -> Result<Option<Point>, CliError> {
        let Some(row) = self.next_row()? else {
            return Ok(None);
        };
        let fields: Vec<&str> = row.split(',').map(str::trim).collect();
        if fields.len() != 2 {
            return Err(CliError::Input(format!(
                "line {}: expected 2 fields, found {}",
                self.line,
                fields.len()
            )));
        }
        let x = parse_field(fields[0], self.line)?;
        let y = parse_field(fields[1], self.line)?;
        Ok(Some(Point::new(x, y)))
    }

    pub fn read_all(mut self) -> Result<Vec<Point>, CliError> {
        let mut out = Vec::new();
        while let Some(p) = self.next_point()? {
            out.push(p);
        }
        Ok(out)
    }
}

fn parse_field(s: &str, line: u64) -> Result<f64, CliError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        Ok(_) => Err(CliError::Input(format!("line {line}: non-finite value '{s}'"))),
        Err(_) => Err(CliError::Input(format!("line {line}: cannot parse '{s}' as a number"))),
    }
}
