//! Reader for the IDX image container (the MNIST distribution format):
//! big-endian magic 0x00000803, three 32-bit counts (items, rows, cols),
//! then row-major unsigned bytes.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{BigEndian, ReadBytesExt};

use crate::error::HarnessError;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;

/// A stack of equally sized 8-bit grayscale images.
#[derive(Clone, Debug)]
pub struct ImageDataset {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    /// `count * rows * cols` bytes, image-major then row-major.
    pub pixels: Vec<u8>,
    /// FNV-1a digest of the source bytes, for provenance.
    pub source_digest: u64,
}

impl ImageDataset {
    pub fn pixel(&self, image: usize, r: usize, c: usize) -> u8 {
        debug_assert!(image < self.count && r < self.rows && c < self.cols);
        self.pixels[(image * self.rows + r) * self.cols + c]
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1_0000_01b3);
    }
    h
}

/// Parses an IDX image file from raw bytes.
pub fn parse_idx_images(bytes: &[u8]) -> Result<ImageDataset, HarnessError> {
    let mut cur = Cursor::new(bytes);
    let magic = cur
        .read_u32::<BigEndian>()
        .map_err(|_| HarnessError::TruncatedFile("missing magic".into()))?;
    if magic != IDX_IMAGES_MAGIC {
        return Err(HarnessError::BadMagic {
            got: magic,
            expected: IDX_IMAGES_MAGIC,
        });
    }
    let count = cur
        .read_u32::<BigEndian>()
        .map_err(|_| HarnessError::TruncatedFile("missing item count".into()))?
        as usize;
    let rows =
        cur.read_u32::<BigEndian>()
            .map_err(|_| HarnessError::TruncatedFile("missing row count".into()))? as usize;
    let cols =
        cur.read_u32::<BigEndian>()
            .map_err(|_| HarnessError::TruncatedFile("missing col count".into()))? as usize;
    let mut pixels = vec![0u8; count * rows * cols];
    cur.read_exact(&mut pixels).map_err(|_| {
        HarnessError::TruncatedFile(format!(
            "expected {} pixel bytes, file has {}",
            count * rows * cols,
            bytes.len().saturating_sub(16)
        ))
    })?;
    Ok(ImageDataset {
        count,
        rows,
        cols,
        pixels,
        source_digest: fnv1a(bytes),
    })
}

/// Loads an IDX image file from disk.
pub fn load_idx_images(path: &Path) -> Result<ImageDataset, HarnessError> {
    let bytes = std::fs::read(path)?;
    parse_idx_images(&bytes)
}

/// Serializes a dataset back into IDX bytes (used by tests and fixtures).
pub fn write_idx_images(ds: &ImageDataset) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + ds.pixels.len());
    out.extend_from_slice(&IDX_IMAGES_MAGIC.to_be_bytes());
    out.extend_from_slice(&(ds.count as u32).to_be_bytes());
    out.extend_from_slice(&(ds.rows as u32).to_be_bytes());
    out.extend_from_slice(&(ds.cols as u32).to_be_bytes());
    out.extend_from_slice(&ds.pixels);
    out
}
