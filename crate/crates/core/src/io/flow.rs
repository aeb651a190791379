//! Dense optical flow in the common `.flo` interchange layout: magic float
//! 202021.25, i32 width, i32 height, then row-major interleaved f32 `(u, v)`.

use std::path::Path;

use super::{read_file, ByteReader, ReadOptions};
use crate::curation::FlowField;
use crate::error::{ParseError, Result};

pub const FLOW_MAGIC: f32 = 202021.25;

pub fn parse_flow(bytes: &[u8], opts: ReadOptions) -> Result<FlowField> {
    let mut r = ByteReader::new(bytes);
    let magic = r.f32()?;
    if magic != FLOW_MAGIC {
        return Err(ParseError::BadMagic { offset: 0 }.into());
    }
    let width = r.i32()?;
    let height = r.i32()?;
    if width < 0 || height < 0 {
        return Err(ParseError::Header {
            offset: 4,
            message: format!("negative dimensions {width}x{height}"),
        }
        .into());
    }
    let count = width as u64 * height as u64;
    r.require(count.saturating_mul(8))?;
    let mut vectors = Vec::with_capacity(count as usize);
    for _ in 0..count {
        vectors.push([r.finite_f32()?, r.finite_f32()?]);
    }
    r.finish(opts)?;
    FlowField::new(width as u32, height as u32, vectors)
}

pub fn read_flow(path: &Path) -> Result<FlowField> {
    read_flow_with(path, ReadOptions::default())
}

pub fn read_flow_with(path: &Path, opts: ReadOptions) -> Result<FlowField> {
    let bytes = read_file(path)?;
    parse_flow(&bytes, opts).map_err(|e| e.in_file(path))
}

pub fn encode_flow(flow: &FlowField) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + flow.vectors().len() * 8);
    out.extend_from_slice(&FLOW_MAGIC.to_le_bytes());
    out.extend_from_slice(&(flow.width() as i32).to_le_bytes());
    out.extend_from_slice(&(flow.height() as i32).to_le_bytes());
    for [u, v] in flow.vectors() {
        out.extend_from_slice(&u.to_le_bytes());
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn write_flow(path: &Path, flow: &FlowField) -> Result<()> {
    std::fs::write(path, encode_flow(flow))?;
    Ok(())
}
