//! FTB bundle files.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic "FTB1" (4 bytes)
//! u32 tensorCount
//! per tensor:
//!   u32 nameLen · UTF-8 name · u8 dtype (1 = f32) · u32 ndim ·
//!   ndim x u64 dims · row-major little-endian f32 payload
//! ```
//!
//! Bundle metadata rides in an optional trailing block (`u32 entryCount`,
//! then per entry `u32 keyLen · key · u32 valLen · val`); readers of the
//! core layout may stop after the last tensor, and files without the block
//! load with empty metadata.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensorio::{Tensor, TensorBundle};

const MAGIC: &[u8; 4] = b"FTB1";
const DTYPE_F32: u8 = 1;

/// Writes a bundle to `path`; `read_bundle` reproduces it bit-exactly.
pub fn write_bundle(bundle: &TensorBundle, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    write_u32(&mut w, bundle.len() as u32)?;
    for t in bundle.tensors() {
        write_u32(&mut w, t.name().len() as u32)?;
        w.write_all(t.name().as_bytes())?;
        w.write_all(&[DTYPE_F32])?;
        write_u32(&mut w, t.dims().len() as u32)?;
        for &d in t.dims() {
            w.write_all(&(d as u64).to_le_bytes())?;
        }
        for &v in t.data() {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    write_u32(&mut w, bundle.meta().len() as u32)?;
    for (k, v) in bundle.meta() {
        write_u32(&mut w, k.len() as u32)?;
        w.write_all(k.as_bytes())?;
        write_u32(&mut w, v.len() as u32)?;
        w.write_all(v.as_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a bundle written by [`write_bundle`] (or any FTB exporter).
pub fn read_bundle(path: impl AsRef<Path>) -> Result<TensorBundle> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic, "magic")?;
    if &magic != MAGIC {
        return Err(Error::BadMagic { found: magic });
    }
    let count = read_u32(&mut r, "tensor count")?;
    let mut bundle = TensorBundle::new();
    for _ in 0..count {
        let name_len = read_u32(&mut r, "name length")? as usize;
        let name = read_string(&mut r, name_len, "tensor name")?;
        let mut dtype = [0u8; 1];
        read_exact(&mut r, &mut dtype, "dtype")?;
        if dtype[0] != DTYPE_F32 {
            return Err(Error::UnknownDtype(dtype[0]));
        }
        let ndim = read_u32(&mut r, "ndim")? as usize;
        let mut dims = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            let mut buf = [0u8; 8];
            read_exact(&mut r, &mut buf, "dims")?;
            dims.push(u64::from_le_bytes(buf) as usize);
        }
        let numel: usize = dims.iter().product();
        let mut raw = vec![0u8; numel * 4];
        read_exact(&mut r, &mut raw, "tensor payload")?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        bundle.push(Tensor::new(name, dims, data)?)?;
    }
    // Trailing metadata block; absent on files from minimal exporters.
    if let Ok(meta_count) = read_u32(&mut r, "meta count") {
        for _ in 0..meta_count {
            let klen = read_u32(&mut r, "meta key length")? as usize;
            let key = read_string(&mut r, klen, "meta key")?;
            let vlen = read_u32(&mut r, "meta value length")? as usize;
            let val = read_string(&mut r, vlen, "meta value")?;
            bundle.set_meta(key, val);
        }
    }
    Ok(bundle)
}

fn write_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    w.write_all(&v.to_le_bytes())?;
    Ok(())
}

fn read_u32<R: Read>(r: &mut R, context: &'static str) -> Result<u32> {
    let mut buf = [0u8; 4];
    read_exact(r, &mut buf, context)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], context: &'static str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Truncated { context })
}

fn read_string<R: Read>(r: &mut R, len: usize, context: &'static str) -> Result<String> {
    let mut buf = vec![0u8; len];
    read_exact(r, &mut buf, context)?;
    String::from_utf8(buf).map_err(|_| Error::Truncated { context })
}
