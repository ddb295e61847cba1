//! Numeric CSV tables that can be written back with untouched records
//! reproduced byte for byte.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("CSV has no header row")]
    NoHeader,
    #[error("row {row}, column `{column}`: `{text}` is not a number")]
    NotANumber { row: usize, column: String, text: String },
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("row {row} has {got} values, expected {expected}")]
    Shape { row: usize, got: usize, expected: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
    cells: Vec<Vec<String>>,
    /// Raw bytes of the header record and of every data record, each with
    /// its line terminator.
    raw_header: Vec<u8>,
    raw_records: Vec<Vec<u8>>,
}

fn terminator(raw: &[u8]) -> &'static [u8] {
    if raw.ends_with(b"\r\n") {
        b"\r\n"
    } else if raw.ends_with(b"\n") {
        b"\n"
    } else if raw.ends_with(b"\r") {
        b"\r"
    } else {
        b""
    }
}

impl Dataset {
    pub fn parse(bytes: &[u8]) -> Result<Self, DatasetError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(bytes);
        let mut records: Vec<(csv::StringRecord, usize)> = Vec::new();
        let mut rec = csv::StringRecord::new();
        loop {
            let mut start = rdr.position().byte() as usize;
            if !rdr.read_record(&mut rec)? {
                break;
            }
            while matches!(bytes.get(start), Some(b'\r' | b'\n')) {
                start += 1;
            }
            records.push((rec.clone(), start));
        }
        if records.is_empty() {
            return Err(DatasetError::NoHeader);
        }
        let spans: Vec<(usize, usize)> = records
            .iter()
            .enumerate()
            .map(|(i, (_, s))| (*s, records.get(i + 1).map_or(bytes.len(), |(_, e)| *e)))
            .collect();
        let header: Vec<String> = records[0].0.iter().map(|s| s.trim().to_string()).collect();
        let raw_header = bytes[spans[0].0..spans[0].1].to_vec();
        let mut rows = Vec::with_capacity(records.len() - 1);
        let mut cells = Vec::with_capacity(records.len() - 1);
        let mut raw_records = Vec::with_capacity(records.len() - 1);
        for (i, ((r, _), (s, e))) in records.iter().zip(&spans).enumerate().skip(1) {
            let mut vals = Vec::with_capacity(r.len());
            for (j, text) in r.iter().enumerate() {
                let v = text.trim().parse::<f64>().map_err(|_| DatasetError::NotANumber {
                    row: i - 1,
                    column: header.get(j).cloned().unwrap_or_default(),
                    text: text.to_string(),
                })?;
                vals.push(v);
            }
            rows.push(vals);
            cells.push(r.iter().map(str::to_string).collect());
            raw_records.push(bytes[*s..*e].to_vec());
        }
        Ok(Dataset { header, rows, cells, raw_header, raw_records })
    }

    pub fn from_rows(header: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&header).expect("write to memory");
        let text = String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8");
        let cells: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        let raw_records = cells.iter().map(|c| record_bytes(c, b"\n")).collect();
        Dataset { header, rows, cells, raw_header: text.into_bytes(), raw_records }
    }

    pub fn header(&self) -> &[String] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Column index of each name.
    pub fn column_indices(&self, names: &[String]) -> Result<Vec<usize>, DatasetError> {
        names
            .iter()
            .map(|n| self.header.iter().position(|h| h == n).ok_or_else(|| DatasetError::MissingColumn(n.clone())))
            .collect()
    }

    /// Rows restricted to (and reordered by) `columns`.
    pub fn select(&self, columns: &[usize]) -> Vec<Vec<f64>> {
        self.rows.iter().map(|r| columns.iter().map(|&c| r[c]).collect()).collect()
    }

    /// Serializes with `rows` replacing the values. Records whose values
    /// are bitwise unchanged are copied verbatim; in changed records the
    /// untouched cells keep their original text.
    pub fn write_with(&self, rows: &[Vec<f64>]) -> Result<Vec<u8>, DatasetError> {
        let mut out = self.raw_header.clone();
        if !self.raw_records.is_empty() && terminator(&self.raw_header).is_empty() {
            out.extend_from_slice(b"\n");
        }
        let n = self.rows.len();
        for (i, (orig, new)) in self.rows.iter().zip(rows).enumerate() {
            if new.len() != orig.len() {
                return Err(DatasetError::Shape { row: i, got: new.len(), expected: orig.len() });
            }
            let raw = &self.raw_records[i];
            if orig.iter().zip(new).all(|(a, b)| a.to_bits() == b.to_bits()) {
                out.extend_from_slice(raw);
                continue;
            }
            let texts: Vec<String> = orig
                .iter()
                .zip(new)
                .zip(&self.cells[i])
                .map(|((a, b), t)| if a.to_bits() == b.to_bits() { t.clone() } else { b.to_string() })
                .collect();
            let term = match terminator(raw) {
                b"" if i + 1 < n => b"\n".as_slice(),
                t => t,
            };
            out.extend_from_slice(&record_bytes(&texts, term));
        }
        if rows.len() != n {
            return Err(DatasetError::Shape { row: n, got: rows.len(), expected: n });
        }
        Ok(out)
    }
}

fn record_bytes(cells: &[String], term: &[u8]) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(cells).expect("write to memory");
    let mut bytes = w.into_inner().expect("flush to memory");
    bytes.pop();
    bytes.extend_from_slice(term);
    bytes
}
