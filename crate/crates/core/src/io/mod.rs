//! File formats: the scene document, dense flow, binary tracks, pose text,
//! masks and depth maps.

pub mod flow;
pub mod poses;
pub mod raster;
pub mod scene_doc;
pub mod tracks;

use crate::error::ParseError;

/// What binary readers do with bytes past the declared payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TrailingBytes {
    #[default]
    Reject,
    Warn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ReadOptions {
    pub trailing: TrailingBytes,
}

/// Little-endian reader that reports byte offsets.
pub(crate) struct ByteReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> ByteReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        ByteReader { data, pos: 0 }
    }

    pub fn offset(&self) -> u64 {
        self.pos as u64
    }

    pub fn remaining(&self) -> usize {
        self.data.len() - self.pos
    }

    /// Fails up front if the payload promised by a header is not all present.
    pub fn require(&self, bytes: u64) -> Result<(), ParseError> {
        if (self.remaining() as u64) < bytes {
            return Err(ParseError::Truncated {
                offset: self.data.len() as u64,
                expected: bytes - self.remaining() as u64,
            });
        }
        Ok(())
    }

    pub fn take<const N: usize>(&mut self) -> Result<[u8; N], ParseError> {
        self.require(N as u64)?;
        let mut out = [0u8; N];
        out.copy_from_slice(&self.data[self.pos..self.pos + N]);
        self.pos += N;
        Ok(out)
    }

    pub fn u32(&mut self) -> Result<u32, ParseError> {
        Ok(u32::from_le_bytes(self.take()?))
    }

    pub fn i32(&mut self) -> Result<i32, ParseError> {
        Ok(i32::from_le_bytes(self.take()?))
    }

    pub fn f32(&mut self) -> Result<f32, ParseError> {
        Ok(f32::from_le_bytes(self.take()?))
    }

    pub fn finite_f32(&mut self) -> Result<f32, ParseError> {
        let offset = self.offset();
        let v = self.f32()?;
        if !v.is_finite() {
            return Err(ParseError::NonFinite { offset });
        }
        Ok(v)
    }

    pub fn finish(&self, opts: ReadOptions) -> Result<(), ParseError> {
        let extra = self.remaining();
        if extra == 0 {
            return Ok(());
        }
        match opts.trailing {
            TrailingBytes::Reject => Err(ParseError::TrailingBytes {
                offset: self.offset(),
                count: extra as u64,
            }),
            TrailingBytes::Warn => {
                log::warn!("ignoring {extra} trailing bytes at offset {}", self.offset());
                Ok(())
            }
        }
    }
}

pub(crate) fn read_file(path: &std::path::Path) -> crate::Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| crate::Error::from(e).in_file(path))
}
