//! GRD2 grid dump: a 32-byte little-endian header (magic `GRD2`, version
//! u32, nx u32, ny u32, Lx f64, Ly f64) followed by `nx·ny` f64 values in
//! row-major order.

use std::io::{Read, Write};

use super::{Domain, GridFunction};
use crate::error::{Error, Result};

pub const GRD2_MAGIC: &[u8; 4] = b"GRD2";
pub const GRD2_VERSION: u32 = 1;

pub fn write_grd2<W: Write>(mut w: W, u: &GridFunction) -> Result<()> {
    let d = u.domain();
    let mut buf = Vec::with_capacity(32 + 8 * d.len());
    buf.extend_from_slice(GRD2_MAGIC);
    buf.extend_from_slice(&GRD2_VERSION.to_le_bytes());
    buf.extend_from_slice(&(d.nx() as u32).to_le_bytes());
    buf.extend_from_slice(&(d.ny() as u32).to_le_bytes());
    buf.extend_from_slice(&d.lx().to_le_bytes());
    buf.extend_from_slice(&d.ly().to_le_bytes());
    for v in u.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_grd2<R: Read>(mut r: R) -> Result<GridFunction> {
    let mut head = [0u8; 32];
    r.read_exact(&mut head)
        .map_err(|e| Error::Format(format!("short header: {e}")))?;
    if &head[0..4] != GRD2_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().unwrap());
    let f64_at = |o: usize| f64::from_le_bytes(head[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != GRD2_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dom = Domain::new(f64_at(16), f64_at(24), u32_at(8) as usize, u32_at(12) as usize)?;
    let mut body = Vec::new();
    r.read_to_end(&mut body)?;
    if body.len() != 8 * dom.len() {
        return Err(Error::Format(format!(
            "expected {} payload bytes, found {}",
            8 * dom.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridFunction::from_values(dom, values)
}
