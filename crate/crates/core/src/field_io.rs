//! Field serialization for caching test fields: CSV rows `index,re,im` or a
//! flat little-endian binary, both preceded by a JSON header `{n, N, L}`.
//!
//! Values are written with shortest round-trip formatting, so both formats
//! reproduce every sample exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SampledField};

const BINARY_MAGIC: &[u8; 8] = b"LPLFLD01";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub n: usize,
    #[serde(rename = "N")]
    pub samples: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
}

impl FieldHeader {
    pub fn of(spec: &GridSpec) -> Self {
        Self { n: spec.dim(), samples: spec.samples(), half_width: spec.half_width() }
    }

    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.samples, self.half_width)
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(format!("field file: {}", msg.into()))
}

/// First line `# {"n":..,"N":..,"L":..}`, then `index,re,im` rows.
pub fn write_csv(field: &SampledField, mut out: impl Write) -> Result<()> {
    writeln!(out, "# {}", serde_json::to_string(&FieldHeader::of(field.spec()))?)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "re", "im"]).map_err(csv_err)?;
    for (i, v) in field.values().iter().enumerate() {
        w.write_record([i.to_string(), v.re.to_string(), v.im.to_string()]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    bad(e.to_string())
}

pub fn read_csv(input: impl Read) -> Result<SampledField> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first)?;
    let header: FieldHeader = serde_json::from_str(
        first.trim().strip_prefix('#').ok_or_else(|| bad("missing '# {header}' line"))?.trim(),
    )?;
    let spec = header.spec()?;
    let mut values = vec![Complex64::new(0.0, 0.0); spec.len()];
    let mut seen = vec![false; spec.len()];
    let mut rows = csv::Reader::from_reader(reader);
    for row in rows.records() {
        let row = row.map_err(csv_err)?;
        let parse = |i: usize| -> Result<&str> { row.get(i).ok_or_else(|| bad("short row")) };
        let idx: usize = parse(0)?.parse().map_err(|_| bad("bad index"))?;
        let re: f64 = parse(1)?.parse().map_err(|_| bad("bad real part"))?;
        let im: f64 = parse(2)?.parse().map_err(|_| bad("bad imaginary part"))?;
        if idx >= spec.len() {
            return Err(bad(format!("index {idx} out of range")));
        }
        values[idx] = Complex64::new(re, im);
        seen[idx] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(bad(format!("sample {i} missing")));
    }
    SampledField::new(spec, values)
}

/// Magic, one JSON header line, then `(re, im)` as little-endian `f64`.
pub fn write_binary(field: &SampledField, mut out: impl Write) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    writeln!(out, "{}", serde_json::to_string(&FieldHeader::of(field.spec()))?)?;
    for v in field.values() {
        out.write_all(&v.re.to_le_bytes())?;
        out.write_all(&v.im.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_binary(input: impl Read) -> Result<SampledField> {
    let mut reader = BufReader::new(input);
    let mut magic = [0u8; 8];
    reader.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(bad("not a binary field file"));
    }
    let mut line = String::new();
    reader.read_line(&mut line)?;
    let header: FieldHeader = serde_json::from_str(line.trim())?;
    let spec = header.spec()?;
    let mut values = Vec::with_capacity(spec.len());
    let mut buf = [0u8; 16];
    for _ in 0..spec.len() {
        reader.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf[..8].try_into().expect("8 bytes"));
        let im = f64::from_le_bytes(buf[8..].try_into().expect("8 bytes"));
        values.push(Complex64::new(re, im));
    }
    if reader.read(&mut buf)? != 0 {
        return Err(bad("trailing data after the last sample"));
    }
    SampledField::new(spec, values)
}

/// Writes CSV for a `.csv` path, binary otherwise.
pub fn save_field(field: &SampledField, path: &Path) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    if is_csv(path) {
        write_csv(field, out)
    } else {
        write_binary(field, out)
    }
}

pub fn load_field(path: &Path) -> Result<SampledField> {
    let input = File::open(path)?;
    if is_csv(path) {
        read_csv(input)
    } else {
        read_binary(input)
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}
