//! The LPF1 binary field format.
//!
//! Layout:
//! - 8-byte magic `LPFIELD1`
//! - little-endian u32 header length, then that many bytes of UTF-8 JSON:
//!   `{"n_per_dim", "box_length", "kind": "scalar"|"vector3",
//!     "layout": "complex-interleaved-f64", "order": "row-major-modes"}`
//! - little-endian f64 payload: interleaved (re, im) coefficient pairs over
//!   modes in row-major storage order; `vector3` stores the three component
//!   blocks back to back.
//!
//! Loaded fields are re-symmetrized so in-memory invariants hold even for
//! files produced elsewhere.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use ndarray::Array3;
use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{SpectralField, SpectralVectorField};
use crate::grid::Grid;
use crate::ops::FieldValue;

const MAGIC: &[u8; 8] = b"LPFIELD1";
const LAYOUT: &str = "complex-interleaved-f64";
const ORDER: &str = "row-major-modes";

fn header_json(grid: &Grid, kind: &str) -> String {
    // assembled by hand to keep key order fixed
    format!(
        "{{\"box_length\":{:.17e},\"kind\":\"{}\",\"layout\":\"{}\",\"n_per_dim\":{},\"order\":\"{}\"}}",
        grid.box_length(),
        kind,
        LAYOUT,
        grid.n_per_dim(),
        ORDER
    )
}

fn write_coeffs<W: Write>(w: &mut W, coeffs: &Array3<Complex64>) -> Result<()> {
    for c in coeffs.iter() {
        w.write_all(&c.re.to_le_bytes())?;
        w.write_all(&c.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn write_field(path: &Path, value: &FieldValue) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    match value {
        FieldValue::Scalar(f) => {
            let header = header_json(f.grid(), "scalar");
            w.write_all(&(header.len() as u32).to_le_bytes())?;
            w.write_all(header.as_bytes())?;
            write_coeffs(&mut w, f.coeffs())?;
        }
        FieldValue::Vector(v) => {
            let header = header_json(v.grid(), "vector3");
            w.write_all(&(header.len() as u32).to_le_bytes())?;
            w.write_all(header.as_bytes())?;
            for comp in v.components() {
                write_coeffs(&mut w, comp.coeffs())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn read_exact_f64s<R: Read>(r: &mut R, count: usize) -> Result<Vec<f64>> {
    let mut bytes = vec![0u8; count * 8];
    r.read_exact(&mut bytes)
        .map_err(|_| Error::Format("payload truncated".into()))?;
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

fn read_component<R: Read>(r: &mut R, grid: Grid) -> Result<SpectralField> {
    let n = grid.n_points();
    let raw = read_exact_f64s(r, 2 * n)?;
    let coeffs: Vec<Complex64> = raw
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect();
    let arr = Array3::from_shape_vec(grid.shape(), coeffs).expect("shape");
    SpectralField::from_coeffs(grid, arr)
}

pub fn read_field(path: &Path) -> Result<FieldValue> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)
        .map_err(|_| Error::Format("file too short for magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic; not an LPF1 field file".into()));
    }
    let mut len_bytes = [0u8; 4];
    r.read_exact(&mut len_bytes)
        .map_err(|_| Error::Format("missing header length".into()))?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    if header_len > 1 << 20 {
        return Err(Error::Format("implausible header length".into()));
    }
    let mut header_bytes = vec![0u8; header_len];
    r.read_exact(&mut header_bytes)
        .map_err(|_| Error::Format("header truncated".into()))?;
    let header: serde_json::Value = serde_json::from_slice(&header_bytes)
        .map_err(|e| Error::Format(format!("header is not valid JSON: {e}")))?;

    let n = header["n_per_dim"]
        .as_u64()
        .ok_or_else(|| Error::Format("header lacks n_per_dim".into()))? as usize;
    let box_length = header["box_length"]
        .as_f64()
        .ok_or_else(|| Error::Format("header lacks box_length".into()))?;
    let kind = header["kind"]
        .as_str()
        .ok_or_else(|| Error::Format("header lacks kind".into()))?;
    if header["layout"].as_str() != Some(LAYOUT) {
        return Err(Error::Format(format!("unsupported layout, want {LAYOUT}")));
    }
    if header["order"].as_str() != Some(ORDER) {
        return Err(Error::Format(format!("unsupported order, want {ORDER}")));
    }
    let grid = Grid::new(n, box_length)?;
    match kind {
        "scalar" => {
            let mut f = read_component(&mut r, grid)?;
            f.sanitize();
            Ok(FieldValue::Scalar(f))
        }
        "vector3" => {
            let comps = [
                read_component(&mut r, grid)?,
                read_component(&mut r, grid)?,
                read_component(&mut r, grid)?,
            ];
            let mut v = SpectralVectorField::from_components(comps)?;
            v.sanitize();
            Ok(FieldValue::Vector(v))
        }
        other => Err(Error::Format(format!("unknown field kind {other:?}"))),
    }
}
