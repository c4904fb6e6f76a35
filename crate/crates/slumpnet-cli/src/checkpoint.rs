//! Checkpoint container for model state.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic    8 bytes  "SLMPCKPT"
//! version  u16      currently 1
//! model    u8       model tag
//! count    u32      number of tensors
//! entry*:
//!   name_len  u16, then UTF-8 name bytes
//!   trainable u8 (0 or 1)
//!   dtype     u8 element tag
//!   rank      u8, then rank extents as u32
//!   payload   numel elements, little-endian
//! ```
//!
//! Entries appear in the model's canonical order, so identical state
//! always serializes to identical bytes.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use slumpnet_core::models::{CheckpointEntry, ModelId};
use slumpnet_core::{DType, Scalar};

use crate::{at_path, CliError, CliResult};

pub const MAGIC: &[u8; 8] = b"SLMPCKPT";
pub const VERSION: u16 = 1;
pub const EXTENSION: &str = "ckpt";

pub fn write_checkpoint<T: Scalar>(
    path: &Path,
    model: ModelId,
    entries: &[CheckpointEntry<T>],
) -> CliResult<()> {
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(model.tag());
    let count = u32::try_from(entries.len())
        .map_err(|_| CliError::input("too many tensors for the checkpoint format".to_string()))?;
    out.extend_from_slice(&count.to_le_bytes());

    for entry in entries {
        let name = entry.name.as_bytes();
        let name_len = u16::try_from(name.len()).map_err(|_| {
            CliError::input(format!("tensor name `{}` is too long", entry.name))
        })?;
        let numel: usize = entry.shape.iter().product();
        if numel != entry.data.len() {
            return Err(CliError::input(format!(
                "tensor `{}` has {} values but shape {:?}",
                entry.name,
                entry.data.len(),
                entry.shape
            )));
        }
        out.extend_from_slice(&name_len.to_le_bytes());
        out.extend_from_slice(name);
        out.push(entry.trainable as u8);
        out.push(T::DTYPE.tag());
        let rank = u8::try_from(entry.shape.len())
            .map_err(|_| CliError::input(format!("tensor `{}` rank overflow", entry.name)))?;
        out.push(rank);
        for &e in &entry.shape {
            let e = u32::try_from(e).map_err(|_| {
                CliError::input(format!("tensor `{}` extent overflow", entry.name))
            })?;
            out.extend_from_slice(&e.to_le_bytes());
        }
        match T::DTYPE {
            DType::F32 => {
                for &v in &entry.data {
                    out.extend_from_slice(&(v.to_f64() as f32).to_le_bytes());
                }
            }
            DType::F64 => {
                for &v in &entry.data {
                    out.extend_from_slice(&v.to_f64().to_le_bytes());
                }
            }
        }
    }

    let mut file = fs::File::create(path).map_err(at_path(path))?;
    file.write_all(&out).map_err(at_path(path))?;
    Ok(())
}

pub fn read_checkpoint<T: Scalar>(path: &Path) -> CliResult<(ModelId, Vec<CheckpointEntry<T>>)> {
    let mut file = fs::File::open(path).map_err(at_path(path))?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(at_path(path))?;

    let bad = |what: &str| {
        CliError::input(format!("{}: not a valid checkpoint ({what})", path.display()))
    };
    let mut cursor = 0usize;
    let mut take = |n: usize| -> CliResult<&[u8]> {
        let end = cursor.checked_add(n).ok_or_else(|| bad("length overflow"))?;
        if end > bytes.len() {
            return Err(bad("file is truncated"));
        }
        let slice = &bytes[cursor..end];
        cursor = end;
        Ok(slice)
    };

    if take(8)? != MAGIC {
        return Err(bad("wrong magic"));
    }
    let version = u16::from_le_bytes(take(2)?.try_into().unwrap());
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let model = ModelId::from_tag(take(1)?[0]).map_err(|_| bad("unknown model tag"))?;
    let count = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;

    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = u16::from_le_bytes(take(2)?.try_into().unwrap()) as usize;
        let name = core::str::from_utf8(take(name_len)?)
            .map_err(|_| bad("tensor name is not UTF-8"))?
            .to_string();
        let trainable = match take(1)?[0] {
            0 => false,
            1 => true,
            _ => return Err(bad("invalid trainable flag")),
        };
        let dtype = DType::from_tag(take(1)?[0]).ok_or_else(|| bad("unknown element tag"))?;
        if dtype != T::DTYPE {
            return Err(CliError::input(format!(
                "{}: checkpoint stores {dtype:?} tensors, expected {:?}",
                path.display(),
                T::DTYPE
            )));
        }
        let rank = take(1)?[0] as usize;
        let mut shape = Vec::with_capacity(rank);
        for _ in 0..rank {
            shape.push(u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize);
        }
        let numel = shape.iter().try_fold(1usize, |acc, &e| acc.checked_mul(e))
            .ok_or_else(|| bad("shape overflow"))?;
        let payload = take(numel * dtype.size_of())?;
        let data: Vec<T> = match dtype {
            DType::F32 => payload
                .chunks_exact(4)
                .map(|c| T::from_f64(f32::from_le_bytes(c.try_into().unwrap()) as f64))
                .collect(),
            DType::F64 => payload
                .chunks_exact(8)
                .map(|c| T::from_f64(f64::from_le_bytes(c.try_into().unwrap())))
                .collect(),
        };
        entries.push(CheckpointEntry { name, shape, data, trainable });
    }
    if cursor != bytes.len() {
        return Err(bad("trailing bytes after the last tensor"));
    }
    Ok((model, entries))
}
