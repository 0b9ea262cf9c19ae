//! Matrix and vector file formats.
//!
//! * CSV matrix: first line `m,n`, then the entries row-major; any mix of
//!   commas and newlines separates values.
//! * Binary matrix: magic `MIPMAT01`, `m` and `n` as little-endian u64, then
//!   `m·n` little-endian f64 entries row-major.
//! * Vector: a JSON array, or numbers separated by whitespace/commas.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use thiserror::Error;

use crate::{Matrix, Vector};

pub const BINARY_MAGIC: &[u8; 8] = b"MIPMAT01";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File { path: String, source: io::Error },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("bad binary matrix: {0}")]
    Binary(String),
}

fn file_err(path: &Path, source: io::Error) -> IoError {
    IoError::File { path: path.display().to_string(), source }
}

/// Parse a CSV matrix with a `m,n` header.
pub fn parse_csv_matrix(text: &str) -> Result<Matrix, IoError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (hline, header) = lines.next().ok_or(IoError::Parse { line: 1, message: "empty file".into() })?;
    let dims: Vec<&str> = header.split(',').map(str::trim).collect();
    if dims.len() != 2 {
        return Err(IoError::Parse { line: hline + 1, message: format!("expected header `m,n`, got `{header}`") });
    }
    let parse_dim = |s: &str| {
        s.parse::<usize>().map_err(|e| IoError::Parse { line: hline + 1, message: format!("bad dimension `{s}`: {e}") })
    };
    let (m, n) = (parse_dim(dims[0])?, parse_dim(dims[1])?);
    let mut values = Vec::with_capacity(m * n);
    for (idx, line) in lines {
        for tok in line.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let v = tok
                .parse::<f64>()
                .map_err(|e| IoError::Parse { line: idx + 1, message: format!("bad number `{tok}`: {e}") })?;
            values.push(v);
        }
    }
    if values.len() != m * n {
        return Err(IoError::Parse {
            line: text.lines().count(),
            message: format!("expected {} entries for {m}x{n}, found {}", m * n, values.len()),
        });
    }
    Ok(Matrix::from_row_slice(m, n, &values))
}

pub fn format_csv_matrix(a: &Matrix) -> String {
    let mut out = format!("{},{}\n", a.nrows(), a.ncols());
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:?}", a[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn encode_binary_matrix(a: &Matrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 8 * a.len());
    out.extend_from_slice(BINARY_MAGIC);
    out.extend_from_slice(&(a.nrows() as u64).to_le_bytes());
    out.extend_from_slice(&(a.ncols() as u64).to_le_bytes());
    for i in 0..a.nrows() {
        for j in 0..a.ncols() {
            out.extend_from_slice(&a[(i, j)].to_le_bytes());
        }
    }
    out
}

pub fn decode_binary_matrix(mut bytes: &[u8]) -> Result<Matrix, IoError> {
    let mut magic = [0u8; 8];
    bytes.read_exact(&mut magic).map_err(|_| IoError::Binary("truncated header".into()))?;
    if &magic != BINARY_MAGIC {
        return Err(IoError::Binary("missing MIPMAT01 magic".into()));
    }
    let mut word = [0u8; 8];
    let mut next_u64 = |b: &mut &[u8]| -> Result<u64, IoError> {
        b.read_exact(&mut word).map_err(|_| IoError::Binary("truncated header".into()))?;
        Ok(u64::from_le_bytes(word))
    };
    let m = next_u64(&mut bytes)? as usize;
    let n = next_u64(&mut bytes)? as usize;
    let expected = m.checked_mul(n).and_then(|k| k.checked_mul(8));
    if expected != Some(bytes.len()) {
        return Err(IoError::Binary(format!("payload of {} bytes does not match {m}x{n}", bytes.len())));
    }
    let values: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    Ok(Matrix::from_row_slice(m, n, &values))
}

/// Read a matrix, picking the format from the leading bytes.
pub fn read_matrix(path: &Path) -> Result<Matrix, IoError> {
    let bytes = fs::read(path).map_err(|e| file_err(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        decode_binary_matrix(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| IoError::Parse { line: 1, message: "not UTF-8".into() })?;
        parse_csv_matrix(&text)
    }
}

/// Write a matrix; `.bin` selects the binary format, anything else CSV.
pub fn write_matrix(path: &Path, a: &Matrix) -> Result<(), IoError> {
    let data = if path.extension().is_some_and(|e| e == "bin") {
        encode_binary_matrix(a)
    } else {
        format_csv_matrix(a).into_bytes()
    };
    fs::File::create(path).and_then(|mut f| f.write_all(&data)).map_err(|e| file_err(path, e))
}

pub fn parse_vector(text: &str) -> Result<Vector, IoError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let values: Vec<f64> =
            serde_json::from_str(trimmed).map_err(|e| IoError::Parse { line: e.line(), message: e.to_string() })?;
        return Ok(Vector::from_vec(values));
    }
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        for tok in line.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let v = tok
                .parse::<f64>()
                .map_err(|e| IoError::Parse { line: idx + 1, message: format!("bad number `{tok}`: {e}") })?;
            values.push(v);
        }
    }
    Ok(Vector::from_vec(values))
}

pub fn read_vector(path: &Path) -> Result<Vector, IoError> {
    let text = fs::read_to_string(path).map_err(|e| file_err(path, e))?;
    parse_vector(&text)
}

pub fn write_vector(path: &Path, v: &Vector) -> Result<(), IoError> {
    let text = serde_json::to_string(v.as_slice()).expect("f64 slice serializes");
    fs::write(path, text + "\n").map_err(|e| file_err(path, e))
}

/// Serde adapter storing a [`Vector`] as a plain number array.
pub mod vector_serde {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Vector;

    pub fn serialize<S: Serializer>(v: &Vector, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vector, D::Error> {
        Vec::<f64>::deserialize(d).map(Vector::from_vec)
    }
}

/// Serde adapter storing a list of [`Vector`]s as nested number arrays.
pub mod vectors_serde {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::Vector;

    pub fn serialize<S: Serializer>(vs: &[Vector], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(vs.len()))?;
        for v in vs {
            seq.serialize_element(v.as_slice())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vector>, D::Error> {
        Vec::<Vec<f64>>::deserialize(d).map(|vs| vs.into_iter().map(Vector::from_vec).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let a = Matrix::from_row_slice(2, 3, &[1.0, -0.5, 1e-17, 0.1, 2.0, 3.25]);
        assert_eq!(parse_csv_matrix(&format_csv_matrix(&a)).unwrap(), a);
    }

    #[test]
    fn binary_roundtrip() {
        let a = Matrix::from_row_slice(3, 2, &[1.0, -0.5, 0.1, 0.2, f64::MIN_POSITIVE, 7.0]);
        let bytes = encode_binary_matrix(&a);
        assert_eq!(&bytes[..8], b"MIPMAT01");
        assert_eq!(bytes.len(), 24 + 48);
        assert_eq!(decode_binary_matrix(&bytes).unwrap(), a);
    }

    #[test]
    fn csv_errors_carry_lines() {
        match parse_csv_matrix("2,2\n1,2\n3,x\n") {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_csv_matrix("2,2\n1,2,3\n").is_err());
        assert!(decode_binary_matrix(b"MIPMAT00").is_err());
    }

    #[test]
    fn vector_formats() {
        let expected = Vector::from_column_slice(&[1.0, -2.0, 0.5]);
        assert_eq!(parse_vector("[1, -2, 0.5]").unwrap(), expected);
        assert_eq!(parse_vector("1\n-2\n0.5\n").unwrap(), expected);
        assert_eq!(parse_vector("1, -2 0.5").unwrap(), expected);
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = Matrix::from_row_slice(2, 2, &[0.6, 0.8, 0.8, -0.6]);
        for name in ["a.csv", "a.bin"] {
            let p = dir.path().join(name);
            write_matrix(&p, &a).unwrap();
            assert_eq!(read_matrix(&p).unwrap(), a);
        }
        let v = Vector::from_column_slice(&[0.1, 0.2]);
        let p = dir.path().join("v.json");
        write_vector(&p, &v).unwrap();
        assert_eq!(read_vector(&p).unwrap(), v);
    }
}
