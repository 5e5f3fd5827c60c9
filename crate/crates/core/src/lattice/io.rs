//! Field files.
//!
//! Both encodings carry the header `(n, eps, lateral_halfwidth, height, time)`
//! followed by the values in storage order. A block holding exactly one
//! boundary plane of values is read back as a [`BoundaryField`].
//!
//! * CSV: `n,eps,lateral_halfwidth,height,time` header line, one header row,
//!   a `value` line, then one value per line, printed with 17 significant digits.
//! * Binary (little endian): `u64 n, f64 eps, u64 lateral_halfwidth,
//!   u64 height, f64 time`, then `f64` values.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::lattice::{BoundaryField, LatticeDomain, LatticeField};
use crate::scalar::Real;

/// A field read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub enum FieldBlock<T> {
    Full(LatticeField<T>),
    Boundary(BoundaryField<T>),
}

pub const CSV_HEADER: &str = "n,eps,lateral_halfwidth,height,time";

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

fn header_row<T: Real>(d: &LatticeDomain<T>, time: T) -> String {
    format!(
        "{},{},{},{},{}",
        d.n(),
        fmt_sig17(d.eps().as_f64()),
        d.lateral_halfwidth(),
        d.height(),
        fmt_sig17(time.as_f64())
    )
}

pub fn field_to_csv<T: Real>(domain: &LatticeDomain<T>, values: &[T], time: T) -> String {
    let mut s = String::with_capacity(values.len() * 25 + 64);
    s.push_str(CSV_HEADER);
    s.push('\n');
    s.push_str(&header_row(domain, time));
    s.push_str("\nvalue\n");
    for v in values {
        s.push_str(&fmt_sig17(v.as_f64()));
        s.push('\n');
    }
    s
}

pub fn field_to_binary<T: Real>(domain: &LatticeDomain<T>, values: &[T], time: T) -> Vec<u8> {
    let mut out = Vec::with_capacity(40 + 8 * values.len());
    out.extend_from_slice(&(domain.n() as u64).to_le_bytes());
    out.extend_from_slice(&domain.eps().as_f64().to_le_bytes());
    out.extend_from_slice(&(domain.lateral_halfwidth() as u64).to_le_bytes());
    out.extend_from_slice(&(domain.height() as u64).to_le_bytes());
    out.extend_from_slice(&time.as_f64().to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.as_f64().to_le_bytes());
    }
    out
}

pub fn write_csv<T: Real>(field: &LatticeField<T>, path: &Path) -> Result<()> {
    write_bytes(
        path,
        field_to_csv(field.domain(), field.values(), field.time()).as_bytes(),
    )
}

pub fn write_boundary_csv<T: Real>(field: &BoundaryField<T>, path: &Path) -> Result<()> {
    write_bytes(
        path,
        field_to_csv(field.domain(), field.values(), field.time()).as_bytes(),
    )
}

pub fn write_binary<T: Real>(field: &LatticeField<T>, path: &Path) -> Result<()> {
    write_bytes(path, &field_to_binary(field.domain(), field.values(), field.time()))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

fn assemble<T: Real>(
    header: (u64, f64, u64, u64, f64),
    values: Vec<f64>,
) -> std::result::Result<FieldBlock<T>, String> {
    let (n, eps, lateral, height, time) = header;
    let domain =
        LatticeDomain::new(n as usize, T::lit(eps), lateral as usize, height as usize).map_err(|e| e.to_string())?;
    let values: Vec<T> = values.into_iter().map(T::lit).collect();
    let time = T::lit(time);
    if values.len() == domain.site_count() {
        LatticeField::from_values(domain, values, time)
            .map(FieldBlock::Full)
            .map_err(|e| e.to_string())
    } else if values.len() == domain.plane_len() {
        BoundaryField::from_values(domain, values, time)
            .map(FieldBlock::Boundary)
            .map_err(|e| e.to_string())
    } else {
        Err(format!(
            "{} values match neither the lattice ({}) nor its boundary plane ({})",
            values.len(),
            domain.site_count(),
            domain.plane_len()
        ))
    }
}

pub fn parse_csv<T: Real>(text: &str) -> std::result::Result<FieldBlock<T>, String> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(CSV_HEADER) {
        return Err("missing header line".into());
    }
    let row = lines.next().ok_or("missing header row")?;
    let cols: Vec<&str> = row.split(',').map(str::trim).collect();
    if cols.len() != 5 {
        return Err(format!("header row has {} columns, expected 5", cols.len()));
    }
    let int = |s: &str| s.parse::<u64>().map_err(|e| format!("{s}: {e}"));
    let real = |s: &str| s.parse::<f64>().map_err(|e| format!("{s}: {e}"));
    let header = (
        int(cols[0])?,
        real(cols[1])?,
        int(cols[2])?,
        int(cols[3])?,
        real(cols[4])?,
    );
    if lines.next().map(str::trim) != Some("value") {
        return Err("missing `value` line".into());
    }
    let values = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| real(l.trim()))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    assemble(header, values)
}

pub fn parse_binary<T: Real>(bytes: &[u8]) -> std::result::Result<FieldBlock<T>, String> {
    if bytes.len() < 40 || !(bytes.len() - 40).is_multiple_of(8) {
        return Err(format!("{} bytes is not a header plus whole f64 values", bytes.len()));
    }
    let word = |i: usize| -> [u8; 8] { bytes[8 * i..8 * i + 8].try_into().expect("8 bytes") };
    let header = (
        u64::from_le_bytes(word(0)),
        f64::from_le_bytes(word(1)),
        u64::from_le_bytes(word(2)),
        u64::from_le_bytes(word(3)),
        f64::from_le_bytes(word(4)),
    );
    let values = (5..bytes.len() / 8).map(|i| f64::from_le_bytes(word(i))).collect();
    assemble(header, values)
}

pub fn read_csv<T: Real>(path: &Path) -> Result<FieldBlock<T>> {
    let text = fs::read_to_string(path)?;
    parse_csv(&text).map_err(|reason| Error::MalformedField {
        path: path.to_path_buf(),
        reason,
    })
}

pub fn read_binary<T: Real>(path: &Path) -> Result<FieldBlock<T>> {
    let bytes = fs::read(path)?;
    parse_binary(&bytes).map_err(|reason| Error::MalformedField {
        path: path.to_path_buf(),
        reason,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn csv_and_binary_roundtrip(
            vals in proptest::collection::vec(-1e6f64..1e6, 15),
            time in 0.0f64..10.0,
        ) {
            let d = LatticeDomain::new(2, 0.1, 2, 2).unwrap();
            let f = LatticeField::from_values(d.clone(), vals, time).unwrap();
            let csv = field_to_csv(f.domain(), f.values(), f.time());
            prop_assert_eq!(parse_csv::<f64>(&csv).unwrap(), FieldBlock::Full(f.clone()));
            let bin = field_to_binary(f.domain(), f.values(), f.time());
            prop_assert_eq!(parse_binary::<f64>(&bin).unwrap(), FieldBlock::Full(f));
        }
    }

    #[test]
    fn boundary_block_and_errors() {
        let d = LatticeDomain::new(2, 0.5, 1, 2).unwrap();
        let g = BoundaryField::from_values(d, vec![0.1, 0.2, 0.3], 1.5).unwrap();
        let csv = field_to_csv(g.domain(), g.values(), g.time());
        assert_eq!(parse_csv::<f64>(&csv).unwrap(), FieldBlock::Boundary(g));
        assert!(parse_csv::<f64>("n,eps\n").is_err());
        assert!(parse_csv::<f64>(&csv.replacen("5.0000000000000000e-1", "x", 1)).is_err());
        assert!(parse_binary::<f64>(&[0u8; 41]).is_err());
        let short = format!("{CSV_HEADER}\n2,0.5,1,2,0\nvalue\n1.0\n");
        assert!(parse_csv::<f64>(&short).is_err());
    }
}
