//! Matrix Market (decimal, for interoperability) and JSON (exact) forms.

use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::sparse::to_f64;
use super::{Rational, SparseMatrix};
use crate::error::{Error, Result};

const MM_HEADER: &str = "%%MatrixMarket matrix coordinate real general";

/// Writes 1-based coordinates with values printed to 17 significant digits.
pub fn write_matrix_market<W: Write>(m: &SparseMatrix, mut w: W) -> Result<()> {
    writeln!(w, "{MM_HEADER}")?;
    writeln!(w, "{} {} {}", m.rows(), m.cols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, to_f64(v))?;
    }
    Ok(())
}

/// A Matrix Market file read back as floating point coordinates (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct MarketMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

pub fn read_matrix_market<R: BufRead>(r: R) -> Result<MarketMatrix> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty Matrix Market file".into()))??;
    let header_lc = header.to_ascii_lowercase();
    if !header_lc.starts_with("%%matrixmarket matrix coordinate real general") {
        return Err(Error::Format(format!("unsupported header {header:?}")));
    }
    let mut size: Option<(usize, usize, usize)> = None;
    let mut entries = Vec::new();
    for line in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Format(format!("bad line {line:?}"));
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad());
                size = Some((p(fields[0])?, p(fields[1])?, p(fields[2])?));
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(bad());
                }
                let i: usize = fields[0].parse().map_err(|_| bad())?;
                let j: usize = fields[1].parse().map_err(|_| bad())?;
                let v: f64 = fields[2].parse().map_err(|_| bad())?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(bad());
                }
                entries.push((i - 1, j - 1, v));
            }
        }
    }
    let (rows, cols, count) = size.ok_or_else(|| Error::Format("missing size line".into()))?;
    if entries.len() != count {
        return Err(Error::Format(format!(
            "header declares {count} entries, found {}",
            entries.len()
        )));
    }
    Ok(MarketMatrix {
        rows,
        cols,
        entries,
    })
}

/// Lossless JSON form. Indices are 0-based; numerator and denominator are
/// decimal strings so integers of any size survive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<EntryJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub row: usize,
    pub col: usize,
    pub num: String,
    pub den: String,
}

impl From<&SparseMatrix> for MatrixJson {
    fn from(m: &SparseMatrix) -> Self {
        MatrixJson {
            rows: m.rows(),
            cols: m.cols(),
            entries: m
                .iter()
                .map(|(row, col, v)| EntryJson {
                    row,
                    col,
                    num: v.numer().to_string(),
                    den: v.denom().to_string(),
                })
                .collect(),
        }
    }
}

impl TryFrom<MatrixJson> for SparseMatrix {
    type Error = Error;

    fn try_from(json: MatrixJson) -> Result<Self> {
        let mut triplets = Vec::with_capacity(json.entries.len());
        for e in json.entries {
            let parse = |s: &str| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| Error::Format(format!("bad integer {s:?}")))
            };
            let num = parse(&e.num)?;
            let den = parse(&e.den)?;
            if den.is_zero() {
                return Err(Error::Format(format!(
                    "zero denominator at ({}, {})",
                    e.row, e.col
                )));
            }
            triplets.push((e.row, e.col, Rational::new(num, den)));
        }
        SparseMatrix::from_triplets(json.rows, json.cols, triplets)
    }
}

pub fn write_json<W: Write>(m: &SparseMatrix, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, &MatrixJson::from(m))?;
    Ok(())
}

pub fn read_json<R: std::io::Read>(r: R) -> Result<SparseMatrix> {
    let json: MatrixJson = serde_json::from_reader(r)?;
    SparseMatrix::try_from(json)
}
