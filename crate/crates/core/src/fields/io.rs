//! Field containers on disk.
//!
//! Binary layout (all little-endian): `b"DCL1"`, `u32` rank (1 or 2), then
//! `f64 a_min, f64 a_max, u64 n_a, f64 b_min, f64 b_max, u64 n_b` and eight
//! reserved zero bytes, 64 bytes in total. The body is `(re, im)` pairs of
//! `f64` in row-major order. Rank-1 files leave the `b` fields zero.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::field::{ComplexField1D, ComplexField2D};
use super::grid::Grid1D;
use crate::error::{DclError, Result};

pub const MAGIC: &[u8; 4] = b"DCL1";
pub const HEADER_LEN: usize = 64;

fn header(rank: u32, a: &Grid1D, b: Option<&Grid1D>) -> [u8; HEADER_LEN] {
    let mut h = [0u8; HEADER_LEN];
    h[0..4].copy_from_slice(MAGIC);
    h[4..8].copy_from_slice(&rank.to_le_bytes());
    h[8..16].copy_from_slice(&a.x_min().to_le_bytes());
    h[16..24].copy_from_slice(&a.x_max().to_le_bytes());
    h[24..32].copy_from_slice(&(a.len() as u64).to_le_bytes());
    if let Some(b) = b {
        h[32..40].copy_from_slice(&b.x_min().to_le_bytes());
        h[40..48].copy_from_slice(&b.x_max().to_le_bytes());
        h[48..56].copy_from_slice(&(b.len() as u64).to_le_bytes());
    }
    h
}

fn write_body<W: Write>(w: &mut W, values: &[Complex64]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 16);
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn write_field_1d<W: Write>(w: &mut W, field: &ComplexField1D) -> Result<()> {
    w.write_all(&header(1, field.grid(), None))?;
    write_body(w, field.values())
}

pub fn write_field_2d<W: Write>(w: &mut W, field: &ComplexField2D) -> Result<()> {
    w.write_all(&header(2, field.grid_a(), Some(field.grid_b())))?;
    write_body(w, field.values())
}

/// A field read back from a container.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredField {
    One(ComplexField1D),
    Two(ComplexField2D),
}

pub fn read_field<R: Read>(r: &mut R) -> Result<StoredField> {
    let mut h = [0u8; HEADER_LEN];
    r.read_exact(&mut h)?;
    if &h[0..4] != MAGIC {
        return Err(DclError::Format("bad magic".into()));
    }
    let f = |o: usize| f64::from_le_bytes(h[o..o + 8].try_into().unwrap());
    let u = |o: usize| u64::from_le_bytes(h[o..o + 8].try_into().unwrap()) as usize;
    let rank = u32::from_le_bytes(h[4..8].try_into().unwrap());
    let a = Grid1D::new(f(8), f(16), u(24))?;
    let (b, count) = match rank {
        1 => (None, a.len()),
        2 => {
            let b = Grid1D::new(f(32), f(40), u(48))?;
            (Some(b), a.len() * b.len())
        }
        _ => return Err(DclError::Format(format!("unsupported rank {rank}"))),
    };
    let mut body = vec![0u8; count * 16];
    r.read_exact(&mut body)
        .map_err(|e| DclError::Format(format!("truncated body: {e}")))?;
    let values: Vec<Complex64> = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(match b {
        None => StoredField::One(ComplexField1D::new(a, values)?),
        Some(b) => StoredField::Two(ComplexField2D::new(a, b, values)?),
    })
}

/// `x,re,im` rows with a header line.
pub fn write_csv_1d<W: Write>(w: &mut W, field: &ComplexField1D) -> Result<()> {
    writeln!(w, "x,re,im")?;
    for (x, v) in field.grid().points().zip(field.values()) {
        writeln!(w, "{x:?},{:?},{:?}", v.re, v.im)?;
    }
    Ok(())
}
