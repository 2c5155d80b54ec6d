//! CSV tables with 17-significant-digit numbers and an optional trailing
//! JSON footer line.

use crate::error::{invalid, Result};

/// Scientific notation with 17 significant digits; round-trips every `f64`.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_num(s: &str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|_| invalid(format!("not a number: {s:?}")))
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// One JSON object written after the rows.
    pub footer: Option<String>,
}

impl CsvTable {
    pub fn new(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        CsvTable { header: header.iter().map(|s| s.to_string()).collect(), rows, footer: None }
    }

    pub fn with_footer(mut self, footer: String) -> Self {
        self.footer = Some(footer);
        self
    }

    pub fn expect_header(&self, header: &[&str]) -> Result<()> {
        if self.header.iter().map(String::as_str).eq(header.iter().copied()) {
            Ok(())
        } else {
            Err(invalid(format!("unexpected CSV header {:?}, wanted {:?}", self.header, header)))
        }
    }

    /// Column `name` parsed as numbers.
    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let idx =
            self.header.iter().position(|h| h == name).ok_or_else(|| invalid(format!("no column named {name:?}")))?;
        self.rows.iter().map(|r| parse_num(&r[idx])).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        let mut out = String::from_utf8(w.into_inner().expect("flushing to memory")).expect("ASCII fields");
        if let Some(f) = &self.footer {
            out.push_str(f);
            out.push('\n');
        }
        out
    }

    /// Parses text written by [`CsvTable::to_csv`]; a final line starting
    /// with `{` is taken as the footer.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_end();
        let (body, footer) = match trimmed.rfind('\n') {
            Some(i) if trimmed[i + 1..].starts_with('{') => (&trimmed[..i], Some(trimmed[i + 1..].to_string())),
            _ => (trimmed, None),
        };
        if body.trim().is_empty() {
            return Err(invalid("empty CSV input"));
        }
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
        let header =
            reader.headers().map_err(|e| invalid(format!("bad CSV header: {e}")))?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| invalid(format!("bad CSV row: {e}")))?;
            rows.push(record.iter().map(str::to_string).collect());
        }
        Ok(CsvTable { header, rows, footer })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.0, -0.0, 1.0, 1.0 / 3.0, 6.02214076e23, -2.5e-308, f64::MAX, 1e9] {
            let back = parse_num(&fmt_num(x)).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(fmt_num(100.0), "1.0000000000000000e2");
    }

    #[test]
    fn table_round_trip() {
        let t = CsvTable::new(&["a", "b"], vec![vec![fmt_num(1.5), fmt_num(-2.0)]])
            .with_footer(r#"{"exponent":2.0}"#.into());
        let back = CsvTable::parse(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.column("b").unwrap(), vec![-2.0]);
        assert!(back.column("c").is_err());
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(CsvTable::parse("a,b\n1,2,3\n").is_err());
        assert!(CsvTable::parse("").is_err());
    }
}
