//! Matrix text format: a first line holding `n`, then `n` lines of `n`
//! comma-separated decimals. Values are written with 17 significant digits
//! so that every finite double round-trips exactly.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

pub fn save_matrix(m: &SquareMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut w = BufWriter::new(file);
    write_matrix(m, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<SquareMatrix> {
    read_matrix(fs::File::open(path)?)
}

pub fn write_matrix(m: &SquareMatrix, w: &mut impl Write) -> Result<()> {
    writeln!(w, "{}", m.n())?;
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn format_matrix(m: &SquareMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix(m, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("ascii output")
}

/// 17 significant digits in scientific notation.
fn format_value(v: f64) -> String {
    // Avoid "-0e0" noise in files.
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

pub fn read_matrix(r: impl Read) -> Result<SquareMatrix> {
    let reader = BufReader::new(r);
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|l| (i + 1, l)))
        .filter(|l| !matches!(l, Ok((_, s)) if s.trim().is_empty()));

    let (hline, header) = match lines.next() {
        Some(l) => l?,
        None => {
            return Err(Error::Parse {
                line: 1,
                col: 1,
                msg: "empty file".into(),
            })
        }
    };
    let n: usize = header.trim().parse().map_err(|_| Error::Parse {
        line: hline,
        col: 1,
        msg: format!("expected dimension, found {:?}", header.trim()),
    })?;
    if n == 0 {
        return Err(Error::Parse {
            line: hline,
            col: 1,
            msg: "dimension must be positive".into(),
        });
    }

    let mut entries = Vec::with_capacity(n * n);
    let mut rows = 0;
    for l in lines {
        let (lineno, text) = l?;
        if rows == n {
            return Err(Error::DimensionMismatch(format!(
                "more than {n} rows (extra row at line {lineno})"
            )));
        }
        let mut count = 0;
        let mut col = 1;
        for field in text.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                col,
                msg: format!("invalid number {:?}", field.trim()),
            })?;
            entries.push(v);
            count += 1;
            col += field.len() + 1;
        }
        if count != n {
            return Err(Error::DimensionMismatch(format!(
                "line {lineno} has {count} values, expected {n}"
            )));
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::DimensionMismatch(format!("found {rows} rows, header says {n}")));
    }
    SquareMatrix::new(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_three_by_three() {
        let m = read_matrix("3\n1,0,0\n0, 2 ,0\n0,0,3\n".as_bytes()).unwrap();
        assert_eq!(m.n(), 3);
        assert_eq!(m.get(1, 1), 2.0);
        assert_eq!(m.get(2, 2), 3.0);
    }

    #[test]
    fn too_few_rows() {
        let err = read_matrix("3\n1,0,0\n0,1,0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
    }

    #[test]
    fn ragged_row() {
        let err = read_matrix("2\n1,0\n0\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)), "{err}");
    }

    #[test]
    fn bad_number_reports_position() {
        let err = read_matrix("2\n1,0\n0,abc\n".as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, col, .. } => assert_eq!((line, col), (3, 3)),
            other => panic!("unexpected {other}"),
        }
        let err = read_matrix("x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, col: 1, .. }));
    }

    #[test]
    fn identity_round_trip_through_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("id.csv");
        let id = SquareMatrix::identity(4);
        save_matrix(&id, &p).unwrap();
        assert_eq!(load_matrix(&p).unwrap(), id);
    }

    #[test]
    fn writes_seventeen_digits() {
        let m = SquareMatrix::from_rows(&[[1.0 / 3.0]]).unwrap();
        assert_eq!(format_matrix(&m), "1\n3.3333333333333331e-1\n");
    }
}
