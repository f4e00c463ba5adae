//! Field snapshots as CSV and as raw little-endian binary.
//!
//! Binary layout, all little-endian:
//!
//! | bytes        | content                                  |
//! |--------------|------------------------------------------|
//! | 4            | magic `IKFD`                             |
//! | 4            | `u32` format version (1)                 |
//! | 4            | `u32` dimension `d`                      |
//! | 8·d          | `u64` resolution per axis                |
//! | 8·d          | `f64` period length per axis             |
//! | 4            | `u32` number of fields `m`               |
//! | 8            | `f64` time                               |
//! | 8·m·Π res    | `f64` samples, field by field, row-major |

use std::io::{Read, Write};

use crate::diagnostics::{csv_err, fmt_f64};
use crate::error::{IkError, Result};
use crate::field::Field;
use crate::grid::PeriodicDomain;
use crate::state::State;

pub const MAGIC: &[u8; 4] = b"IKFD";
pub const FORMAT_VERSION: u32 = 1;

/// Writes `x[,y],value` rows, one per grid point.
pub fn write_field_csv<W: Write>(field: &Field, out: W) -> Result<()> {
    let grid = field.grid();
    let mut w = csv::Writer::from_writer(out);
    let header: &[&str] = if grid.dim() == 1 {
        &["x", "value"]
    } else {
        &["x", "y", "value"]
    };
    w.write_record(header).map_err(csv_err)?;
    for (k, v) in field.values().iter().enumerate() {
        let p = grid.point(k);
        let mut row = vec![fmt_f64(p[0])];
        if grid.dim() == 2 {
            row.push(fmt_f64(p[1]));
        }
        row.push(fmt_f64(*v));
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a field CSV back as coordinates and values.
pub fn read_field_csv<R: Read>(input: R) -> Result<(Vec<[f64; 2]>, Vec<f64>)> {
    let mut rd = csv::Reader::from_reader(input);
    let header = rd.headers().map_err(csv_err)?.clone();
    let dim = match header.iter().collect::<Vec<_>>().as_slice() {
        ["x", "value"] => 1,
        ["x", "y", "value"] => 2,
        _ => return Err(IkError::Format(format!("unexpected field header {header:?}"))),
    };
    let mut coords = Vec::new();
    let mut values = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let v: Vec<f64> = row
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| IkError::Format(format!("bad number {s:?}")))
            })
            .collect::<Result<_>>()?;
        coords.push(if dim == 1 { [v[0], 0.0] } else { [v[0], v[1]] });
        values.push(v[dim]);
    }
    Ok((coords, values))
}

/// Contents of a binary snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub domain: PeriodicDomain,
    pub t: f64,
    pub fields: Vec<Vec<f64>>,
}

pub fn write_snapshot<W: Write>(mut out: W, t: f64, fields: &[&Field]) -> Result<()> {
    let first = fields
        .first()
        .ok_or_else(|| IkError::Format("snapshot needs at least one field".into()))?;
    let dom = first.grid().domain();
    out.write_all(MAGIC)?;
    out.write_all(&FORMAT_VERSION.to_le_bytes())?;
    out.write_all(&(dom.dim as u32).to_le_bytes())?;
    for &n in &dom.resolution {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    for &l in &dom.lengths {
        out.write_all(&l.to_le_bytes())?;
    }
    out.write_all(&(fields.len() as u32).to_le_bytes())?;
    out.write_all(&t.to_le_bytes())?;
    for f in fields {
        if !f.same_grid(first) {
            return Err(IkError::GridMismatch);
        }
        let mut buf = Vec::with_capacity(8 * f.len());
        for v in f.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        out.write_all(&buf)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `η, φ₀, …, φ_N` in that order.
pub fn write_state<W: Write>(out: W, state: &State) -> Result<()> {
    let fields: Vec<&Field> = std::iter::once(&state.eta).chain(&state.phi).collect();
    write_snapshot(out, state.t, &fields)
}

fn read_array<const N: usize, R: Read>(r: &mut R) -> Result<[u8; N]> {
    let mut b = [0u8; N];
    r.read_exact(&mut b)
        .map_err(|e| IkError::Format(format!("truncated snapshot: {e}")))?;
    Ok(b)
}

pub fn read_snapshot<R: Read>(mut r: R) -> Result<Snapshot> {
    let magic: [u8; 4] = read_array(&mut r)?;
    if &magic != MAGIC {
        return Err(IkError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != FORMAT_VERSION {
        return Err(IkError::Format(format!("unsupported version {version}")));
    }
    let dim = u32::from_le_bytes(read_array(&mut r)?) as usize;
    if !(1..=2).contains(&dim) {
        return Err(IkError::Format(format!("bad dimension {dim}")));
    }
    let resolution = (0..dim)
        .map(|_| Ok(u64::from_le_bytes(read_array(&mut r)?) as usize))
        .collect::<Result<Vec<_>>>()?;
    let lengths = (0..dim)
        .map(|_| Ok(f64::from_le_bytes(read_array(&mut r)?)))
        .collect::<Result<Vec<_>>>()?;
    let domain =
        PeriodicDomain::new(lengths, resolution).map_err(|e| IkError::Format(format!("bad domain: {e}")))?;
    let count = u32::from_le_bytes(read_array(&mut r)?) as usize;
    let t = f64::from_le_bytes(read_array(&mut r)?);
    let n = domain.num_points();
    let mut fields = Vec::with_capacity(count);
    for _ in 0..count {
        let mut buf = vec![0u8; 8 * n];
        r.read_exact(&mut buf)
            .map_err(|e| IkError::Format(format!("truncated snapshot: {e}")))?;
        fields.push(
            buf.chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        );
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(IkError::Format(format!("{} trailing bytes", rest.len())));
    }
    Ok(Snapshot { domain, t, fields })
}
