//! The `.cwv` clip file format.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic   4 bytes  "CWV1"
//! version u16      currently 1
//! frames  u32
//! height  u32
//! width   u32
//! chans   u8       currently 3
//! dtype   u8       element tag, currently 1 (u8)
//! fps     u16
//! data    frames * height * width * chans bytes, row-major
//! ```

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use slumpnet_core::synth::VideoClip;

use crate::{at_path, CliError, CliResult};

pub const MAGIC: &[u8; 4] = b"CWV1";
pub const VERSION: u16 = 1;
const DTYPE_U8: u8 = 1;
pub const EXTENSION: &str = "cwv";

pub fn write_clip(path: &Path, clip: &VideoClip) -> CliResult<()> {
    let n = clip.frames * clip.height * clip.width * VideoClip::CHANNELS;
    if clip.data.len() != n {
        return Err(CliError::input(format!(
            "clip buffer holds {} bytes, geometry needs {}",
            clip.data.len(),
            n
        )));
    }
    let dims_fit = u32::try_from(clip.frames).is_ok()
        && u32::try_from(clip.height).is_ok()
        && u32::try_from(clip.width).is_ok()
        && u16::try_from(clip.fps).is_ok();
    if !dims_fit {
        return Err(CliError::input("clip dimensions overflow the file format".to_string()));
    }

    let mut out = Vec::with_capacity(20 + n);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(clip.frames as u32).to_le_bytes());
    out.extend_from_slice(&(clip.height as u32).to_le_bytes());
    out.extend_from_slice(&(clip.width as u32).to_le_bytes());
    out.push(VideoClip::CHANNELS as u8);
    out.push(DTYPE_U8);
    out.extend_from_slice(&(clip.fps as u16).to_le_bytes());
    out.extend_from_slice(&clip.data);

    let mut file = fs::File::create(path).map_err(at_path(path))?;
    file.write_all(&out).map_err(at_path(path))?;
    Ok(())
}

pub fn read_clip(path: &Path) -> CliResult<VideoClip> {
    let mut file = fs::File::open(path).map_err(at_path(path))?;
    let mut header = [0u8; 20];
    file.read_exact(&mut header).map_err(at_path(path))?;

    let bad = |what: &str| {
        CliError::input(format!("{}: not a valid clip file ({what})", path.display()))
    };
    if &header[0..4] != MAGIC {
        return Err(bad("wrong magic"));
    }
    let version = u16::from_le_bytes([header[4], header[5]]);
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let frames = u32::from_le_bytes(header[6..10].try_into().unwrap()) as usize;
    let height = u32::from_le_bytes(header[10..14].try_into().unwrap()) as usize;
    let width = u32::from_le_bytes(header[14..18].try_into().unwrap()) as usize;
    let channels = header[18];
    let dtype = header[19];
    if channels as usize != VideoClip::CHANNELS {
        return Err(bad(&format!("expected 3 channels, found {channels}")));
    }
    if dtype != DTYPE_U8 {
        return Err(bad(&format!("unsupported element tag {dtype}")));
    }
    let mut fps_bytes = [0u8; 2];
    file.read_exact(&mut fps_bytes).map_err(at_path(path))?;
    let fps = u16::from_le_bytes(fps_bytes) as u32;

    if frames == 0 || height == 0 || width == 0 || fps == 0 {
        return Err(bad("zero-sized dimension"));
    }
    let n = frames
        .checked_mul(height)
        .and_then(|v| v.checked_mul(width))
        .and_then(|v| v.checked_mul(VideoClip::CHANNELS))
        .ok_or_else(|| bad("dimensions overflow"))?;
    let mut data = Vec::new();
    file.read_to_end(&mut data).map_err(at_path(path))?;
    if data.len() != n {
        return Err(bad(&format!("payload holds {} bytes, header promises {n}", data.len())));
    }

    Ok(VideoClip { frames, height, width, fps, data })
}
