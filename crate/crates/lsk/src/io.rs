//! Matrix and vector file formats: CSV (row-major records, optional
//! `rows,cols` header) and a binary container. Readers sniff the format
//! by magic bytes; binary round-trips bit-exactly.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

pub const MAGIC: &[u8; 4] = b"LSK1";

/// Binary layout: magic "LSK1", rows and cols as u64 LE, then
/// rows*cols f64 LE in column-major order.
pub fn write_matrix_binary(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut buf = Vec::with_capacity(20 + 8 * m.rows() * m.cols());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(m.rows() as u64).to_le_bytes());
    buf.extend_from_slice(&(m.cols() as u64).to_le_bytes());
    for j in 0..m.cols() {
        for &v in m.col(j) {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    fs::write(path, buf)?;
    Ok(())
}

fn parse_matrix_binary(bytes: &[u8], path: &Path) -> Result<DenseMatrix> {
    if bytes.len() < 20 {
        return Err(Error::Parse(format!("{}: truncated binary header", path.display())));
    }
    let rows = u64::from_le_bytes(bytes[4..12].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let expected = 20 + 8usize.checked_mul(rows.saturating_mul(cols)).unwrap_or(usize::MAX);
    if bytes.len() != expected {
        return Err(Error::Parse(format!(
            "{}: {} bytes for {rows}x{cols} matrix, expected {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[20..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::from_col_major(rows, cols, data)
}

pub fn write_matrix_csv(path: &Path, m: &DenseMatrix) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("rows,cols\n{},{}\n", m.rows(), m.cols()));
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:?}", m.get(i, j)));
        }
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

fn parse_matrix_csv(text: &str, path: &Path) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .peekable();
    // Optional dims header: a literal "rows,cols" line followed by the
    // two counts.
    let mut declared: Option<(usize, usize)> = None;
    if lines.peek().map(|l| l.eq_ignore_ascii_case("rows,cols")) == Some(true) {
        lines.next();
        let dims = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("{}: missing dims after header", path.display())))?;
        let mut it = dims.split(',').map(str::trim);
        let r = it.next().and_then(|s| s.parse().ok());
        let c = it.next().and_then(|s| s.parse().ok());
        match (r, c) {
            (Some(r), Some(c)) => declared = Some((r, c)),
            _ => return Err(Error::Parse(format!("{}: bad dims line {dims:?}", path.display()))),
        }
    }
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in lines {
        let row: Vec<f64> = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{}: bad number {s:?}", path.display())))
            })
            .collect::<Result<_>>()?;
        if let Some(prev) = rows.first() {
            if row.len() != prev.len() {
                return Err(Error::Parse(format!(
                    "{}: ragged row with {} fields, expected {}",
                    path.display(),
                    row.len(),
                    prev.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{}: no data rows", path.display())));
    }
    let (r, c) = (rows.len(), rows[0].len());
    if let Some((dr, dc)) = declared {
        if (dr, dc) != (r, c) {
            return Err(Error::Parse(format!(
                "{}: header declares {dr}x{dc}, data is {r}x{c}",
                path.display()
            )));
        }
    }
    DenseMatrix::from_row_major(r, c, rows.into_iter().flatten().collect())
}

/// Read a matrix, sniffing binary vs CSV by the magic bytes.
pub fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        parse_matrix_binary(&bytes, path)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::Parse(format!("{}: neither binary nor UTF-8 CSV", path.display())))?;
        parse_matrix_csv(text, path)
    }
}

/// Vectors are stored as single-column matrices.
pub fn read_vector(path: &Path) -> Result<DenseVector> {
    let m = read_matrix(path)?;
    if m.cols() == 1 {
        return Ok(m.column_vec(0));
    }
    if m.rows() == 1 {
        return Ok(DenseVector::new((0..m.cols()).map(|j| m.get(0, j)).collect()));
    }
    Err(Error::Parse(format!(
        "{}: expected a vector, got {}x{}",
        path.display(),
        m.rows(),
        m.cols()
    )))
}

pub fn write_vector_csv(path: &Path, v: &DenseVector) -> Result<()> {
    let mut out = String::new();
    for &x in v.as_slice() {
        out.push_str(&format!("{x:?}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_vector_binary(path: &Path, v: &DenseVector) -> Result<()> {
    let m = DenseMatrix::from_col_major(v.len(), 1, v.as_slice().to_vec())?;
    write_matrix_binary(path, &m)
}
