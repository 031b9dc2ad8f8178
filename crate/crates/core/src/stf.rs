//! Symmetric Triplet Format: a human-diffable exact text format for
//! symmetric matrices.
//!
//! ```text
//! %%stf <p> <stored_nnz>
//! <i> <j> <value>        (one line per stored entry)
//! ```
//!
//! Indices are 1-based with `i <= j`; readers reject `i > j`. Unstored
//! entries are zero. Values are written as shortest round-trip decimals, so
//! write-then-read reproduces every entry exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::SymMatrix;

/// Write a matrix in STF.
pub fn write_stf<W: Write>(mut w: W, m: &SymMatrix) -> Result<()> {
    let p = m.dim();
    let mut entries = Vec::new();
    for i in 0..p {
        for j in i..p {
            let v = m.get(i, j);
            if v != 0.0 {
                entries.push((i + 1, j + 1, v));
            }
        }
    }
    writeln!(w, "%%stf {} {}", p, entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{i} {j} {v}")?;
    }
    Ok(())
}

/// Read a matrix from STF.
pub fn read_stf<R: BufRead>(r: R) -> Result<SymMatrix> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty file"))??;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("%%stf") {
        return Err(Error::parse(1, "expected '%%stf <p> <nnz>' header"));
    }
    let p: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad dimension in header"))?;
    let nnz: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::parse(1, "bad entry count in header"))?;
    if parts.next().is_some() {
        return Err(Error::parse(1, "trailing tokens in header"));
    }
    if p < 1 {
        return Err(Error::parse(1, "dimension must be at least 1"));
    }

    let mut m = SymMatrix::zeros(p);
    let mut seen = std::collections::HashSet::with_capacity(nnz);
    let mut count = 0usize;
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let mut parts = text.split_whitespace();
        let i: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line_no, "bad row index"))?;
        let j: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line_no, "bad column index"))?;
        let v: f64 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::parse(line_no, "bad value"))?;
        if parts.next().is_some() {
            return Err(Error::parse(line_no, "trailing tokens"));
        }
        if i < 1 || j < 1 || i > p || j > p {
            return Err(Error::parse(line_no, format!("index ({i}, {j}) out of range for p = {p}")));
        }
        if i > j {
            return Err(Error::parse(line_no, format!("lower-triangle entry ({i}, {j}); stored entries need i <= j")));
        }
        if !v.is_finite() {
            return Err(Error::parse(line_no, "non-finite value"));
        }
        if !seen.insert((i, j)) {
            return Err(Error::parse(line_no, format!("duplicate entry ({i}, {j})")));
        }
        m.set_sym(i - 1, j - 1, v);
        count += 1;
    }
    if count != nnz {
        return Err(Error::parse(1, format!("header promised {nnz} entries, found {count}")));
    }
    Ok(m)
}

/// Write a matrix to a file in STF.
pub fn write_stf_file(path: &Path, m: &SymMatrix) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_stf(&mut w, m)?;
    Ok(())
}

/// Read a matrix from an STF file.
pub fn read_stf_file(path: &Path) -> Result<SymMatrix> {
    let file = std::fs::File::open(path)?;
    read_stf(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(m: &SymMatrix) -> SymMatrix {
        let mut buf = Vec::new();
        write_stf(&mut buf, m).unwrap();
        read_stf(buf.as_slice()).unwrap()
    }

    #[test]
    fn chain3_stores_five_entries() {
        let m = crate::synthetic::chain_precision(3);
        let mut buf = Vec::new();
        write_stf(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("%%stf 3 5\n"), "{text}");
        assert_eq!(text.lines().count(), 6);
        assert_eq!(roundtrip(&m), m);
    }

    #[test]
    fn rejects_lower_triangle_rows() {
        let text = "%%stf 2 1\n2 1 0.5\n";
        assert!(matches!(read_stf(text.as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn rejects_bad_header_and_counts() {
        assert!(read_stf("%%mtx 2 1\n".as_bytes()).is_err());
        assert!(read_stf("%%stf 2 3\n1 1 1.0\n".as_bytes()).is_err());
        assert!(read_stf("%%stf 2 1\n1 1 1.0\n1 2 2.0\n".as_bytes()).is_err());
        assert!(read_stf("%%stf 2 2\n1 1 1.0\n1 1 2.0\n".as_bytes()).is_err());
        assert!(read_stf("%%stf 2 1\n1 3 1.0\n".as_bytes()).is_err());
        assert!(read_stf("%%stf 2 1\n1 2 nan\n".as_bytes()).is_err());
    }

    #[test]
    fn writes_are_byte_deterministic() {
        let m = crate::synthetic::chain_precision(7);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_stf(&mut a, &m).unwrap();
        write_stf(&mut b, &m).unwrap();
        assert_eq!(a, b);
    }

    proptest! {
        #[test]
        fn roundtrip_is_exact(dim in 1usize..8, raw in proptest::collection::vec(-1e6f64..1e6, 64)) {
            let mut m = SymMatrix::zeros(dim);
            let mut it = raw.into_iter();
            for i in 0..dim {
                for j in 0..=i {
                    // Sprinkle exact zeros so the sparse path is exercised.
                    let v = it.next().unwrap();
                    m.set_sym(i, j, if v.abs() < 2e5 { 0.0 } else { v });
                }
            }
            prop_assert_eq!(roundtrip(&m), m);
        }

        #[test]
        fn roundtrip_awkward_values(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL) {
            let mut m = SymMatrix::zeros(2);
            m.set_sym(0, 1, v);
            m.set_sym(0, 0, 1.0);
            m.set_sym(1, 1, 1.0);
            let back = roundtrip(&m);
            prop_assert_eq!(back.get(0, 1).to_bits(), v.to_bits());
        }
    }
}
