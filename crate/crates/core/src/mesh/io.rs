//! Field snapshots: a small self-describing little-endian binary layout and CSV.
//!
//! Binary layout: magic `LCSF`, `u32` version, `u32` dim, `u32` degree, then
//! per axis `u64` points and `f64` period, `u32` component count, then each
//! component's values in row-major node order (last axis fastest) as `f64`.

use std::io::{Read, Write};

use super::grid::{GridForm, PeriodicGrid};
use crate::error::{Error, Result};
use crate::formcalc::form::multi_indices;

const MAGIC: &[u8; 4] = b"LCSF";
const VERSION: u32 = 1;

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("i/o: {e}"))
}

pub fn write_field<W: Write>(field: &GridForm, mut w: W) -> Result<()> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(32 + 8 * field.components().len() * grid.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim() as u32).to_le_bytes());
    buf.extend_from_slice(&(field.degree() as u32).to_le_bytes());
    for a in 0..grid.dim() {
        buf.extend_from_slice(&(grid.points(a) as u64).to_le_bytes());
        buf.extend_from_slice(&grid.period(a).to_le_bytes());
    }
    buf.extend_from_slice(&(field.components().len() as u32).to_le_bytes());
    for c in field.components() {
        for v in c {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    w.write_all(&buf).map_err(io_err)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K]> {
        let end = self.pos + K;
        let s = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::InvalidParameter("truncated field snapshot".into()))?;
        self.pos = end;
        Ok(s.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

pub fn read_field<R: Read>(mut r: R) -> Result<GridForm> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes).map_err(io_err)?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    if &c.take::<4>()? != MAGIC {
        return Err(Error::InvalidParameter("not a field snapshot".into()));
    }
    let version = c.u32()?;
    if version != VERSION {
        return Err(Error::InvalidParameter(format!("unsupported snapshot version {version}")));
    }
    let dim = c.u32()? as usize;
    let degree = c.u32()? as usize;
    if dim == 0 || dim > 4 || degree > dim {
        return Err(Error::InvalidParameter(format!("bad header: dim {dim}, degree {degree}")));
    }
    let mut n = Vec::with_capacity(dim);
    let mut period = Vec::with_capacity(dim);
    for _ in 0..dim {
        n.push(c.u64()? as usize);
        period.push(c.f64()?);
    }
    let grid = PeriodicGrid::with_axes(n, period)?;
    let ncomp = c.u32()? as usize;
    if ncomp != multi_indices(dim, degree).len() {
        return Err(Error::InvalidParameter("component count does not match degree".into()));
    }
    let comps = (0..ncomp)
        .map(|_| (0..grid.len()).map(|_| c.f64()).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    if c.pos != bytes.len() {
        return Err(Error::InvalidParameter("trailing bytes after field snapshot".into()));
    }
    GridForm::from_components(&grid, degree, comps)
}

/// One row per node: coordinates, then components (named like `c01` for
/// `dx_0∧dx_1`).
pub fn write_field_csv<W: Write>(field: &GridForm, mut w: W) -> Result<()> {
    let grid = field.grid();
    let n = grid.dim();
    let mut header: Vec<String> = (0..n).map(|a| format!("x{a}")).collect();
    for idx in multi_indices(n, field.degree()) {
        let name: String = idx.iter().map(|i| i.to_string()).collect();
        header.push(format!("c{name}"));
    }
    let mut out = header.join(",");
    out.push('\n');
    for p in 0..grid.len() {
        let mut row: Vec<String> = grid.coords(p).iter().map(|x| format!("{x:e}")).collect();
        row.extend(field.components().iter().map(|c| format!("{:e}", c[p])));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    w.write_all(out.as_bytes()).map_err(io_err)
}

/// Reads a CSV written by [`write_field_csv`] back onto a known grid.
pub fn read_field_csv<R: Read>(mut r: R, grid: &PeriodicGrid, degree: usize) -> Result<GridForm> {
    let mut text = String::new();
    r.read_to_string(&mut text).map_err(io_err)?;
    let ncomp = multi_indices(grid.dim(), degree).len();
    let mut comps = vec![Vec::with_capacity(grid.len()); ncomp];
    let mut lines = text.lines().enumerate();
    lines.next();
    for (line, row) in lines {
        let cells: Vec<&str> = row.split(',').collect();
        if cells.len() != grid.dim() + ncomp {
            return Err(Error::Parse {
                line: line + 1,
                msg: format!("expected {} columns", grid.dim() + ncomp),
            });
        }
        for (c, cell) in cells[grid.dim()..].iter().enumerate() {
            let v = cell.trim().parse::<f64>().map_err(|e| Error::Parse {
                line: line + 1,
                msg: e.to_string(),
            })?;
            comps[c].push(v);
        }
    }
    GridForm::from_components(grid, degree, comps)
}
