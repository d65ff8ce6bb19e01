//! Plain-text matrix files: a `rows,cols` header line followed by `rows`
//! lines of `cols` comma-separated decimals.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Writes every entry with 17 significant digits so values round-trip exactly.
pub fn write_matrix<W: Write>(m: &DenseMatrix, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .has_headers(false)
        .from_writer(out);
    w.write_record([m.rows().to_string(), m.cols().to_string()])?;
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R) -> Result<DenseMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = rdr.records();
    let header = records
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    if header.len() != 2 {
        return Err(Error::Parse(format!(
            "header must be `rows,cols`, got {} fields",
            header.len()
        )));
    }
    let dim = |s: &str| {
        s.parse::<usize>()
            .map_err(|e| Error::Parse(format!("bad dimension {s:?}: {e}")))
    };
    let (rows, cols) = (dim(&header[0])?, dim(&header[1])?);
    let mut data = Vec::with_capacity(rows * cols);
    for (i, rec) in records.enumerate() {
        let rec = rec?;
        if i >= rows {
            return Err(Error::Parse(format!("more than {rows} data lines")));
        }
        if rec.len() != cols {
            return Err(Error::Parse(format!(
                "line {} has {} fields, expected {cols}",
                i + 2,
                rec.len()
            )));
        }
        for field in rec.iter() {
            data.push(
                field
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {field:?}: {e}", i + 2)))?,
            );
        }
    }
    if data.len() != rows * cols {
        return Err(Error::Parse(format!(
            "expected {rows} data lines, got {}",
            data.len() / cols.max(1)
        )));
    }
    DenseMatrix::new(rows, cols, data)
}

pub fn save_matrix(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    write_matrix(m, BufWriter::new(file))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let file = File::open(path.as_ref())?;
    read_matrix(BufReader::new(file))
}
