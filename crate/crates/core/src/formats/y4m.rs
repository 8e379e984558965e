//! YUV4MPEG2 (.y4m) reading and writing, 4:2:0 only.
//!
//! Layout: one ASCII header line (`YUV4MPEG2 W.. H.. F..:.. ...`), then for
//! each frame the marker line `FRAME\n` followed by raw planar samples.
//! Frames carry no timestamps of their own; readers assign consecutive pts
//! starting at zero, which is exactly what the codec expects.

use crate::error::{Error, Result};
use crate::formats::{yuv420_frame_bytes, Frame, RawVideo};

const SIGNATURE: &[u8] = b"YUV4MPEG2";

/// Parses a YUV4MPEG2 stream into raw frames with consecutive timestamps.
pub fn read_y4m(data: &[u8]) -> Result<RawVideo> {
    let header_end = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or(Error::TruncatedInput)?;
    let header = &data[..header_end];
    if !header.starts_with(SIGNATURE) {
        return Err(Error::Parse("missing YUV4MPEG2 signature".into()));
    }
    let header = std::str::from_utf8(header)
        .map_err(|_| Error::Parse("header is not ASCII".into()))?;

    let mut width = None;
    let mut height = None;
    let mut fps = None;
    for param in header.split(' ').skip(1) {
        if let Some(rest) = param.strip_prefix('W') {
            width = Some(parse_dim(rest)?);
        } else if let Some(rest) = param.strip_prefix('H') {
            height = Some(parse_dim(rest)?);
        } else if let Some(rest) = param.strip_prefix('F') {
            let (n, d) = rest
                .split_once(':')
                .ok_or_else(|| Error::Parse("frame rate is not N:D".into()))?;
            fps = Some((parse_dim(n)?, parse_dim(d)?));
        } else if let Some(rest) = param.strip_prefix('C') {
            // Any 4:2:0 chroma siting variant is acceptable; everything else
            // changes the plane layout and is rejected.
            if !rest.starts_with("420") {
                return Err(Error::Unsupported(format!("colourspace C{rest}")));
            }
        }
        // Interlacing, aspect ratio and X extensions do not affect the
        // sample layout we consume.
    }
    let width = width.ok_or_else(|| Error::Parse("header missing W".into()))?;
    let height = height.ok_or_else(|| Error::Parse("header missing H".into()))?;
    let (fps_num, fps_den) = fps.ok_or_else(|| Error::Parse("header missing F".into()))?;
    if fps_num == 0 || fps_den == 0 {
        return Err(Error::Parse("frame rate must be positive".into()));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidDims("zero width or height".into()));
    }
    if width % 2 != 0 || height % 2 != 0 {
        return Err(Error::Unsupported(
            "4:2:0 video needs even luma dimensions".into(),
        ));
    }

    let luma = width as usize * height as usize;
    let chroma = luma / 4;
    let frame_bytes = yuv420_frame_bytes(width, height) as usize;

    let mut frames = Vec::new();
    let mut pos = header_end + 1;
    while pos < data.len() {
        let line_end = data[pos..]
            .iter()
            .position(|&b| b == b'\n')
            .ok_or(Error::TruncatedInput)?;
        let marker = &data[pos..pos + line_end];
        if marker != b"FRAME" && !marker.starts_with(b"FRAME ") {
            return Err(Error::Parse("expected FRAME marker".into()));
        }
        pos += line_end + 1;
        if data.len() - pos < frame_bytes {
            return Err(Error::TruncatedInput);
        }
        let y = data[pos..pos + luma].to_vec();
        let cb = data[pos + luma..pos + luma + chroma].to_vec();
        let cr = data[pos + luma + chroma..pos + frame_bytes].to_vec();
        pos += frame_bytes;
        frames.push(Frame { y, cb, cr, pts: frames.len() as u32 });
    }
    if frames.is_empty() {
        return Err(Error::EmptyInput);
    }

    Ok(RawVideo { width, height, fps_num, fps_den, frames })
}

/// Serializes a video as YUV4MPEG2. Timestamps are positional in this format,
/// so frames are written in order and re-reading assigns pts from zero.
pub fn write_y4m(video: &RawVideo) -> Result<Vec<u8>> {
    video.validate()?;
    let mut out = Vec::with_capacity(
        64 + video.frames.len() * (6 + yuv420_frame_bytes(video.width, video.height) as usize),
    );
    out.extend_from_slice(
        format!(
            "YUV4MPEG2 W{} H{} F{}:{} Ip A1:1 C420\n",
            video.width, video.height, video.fps_num, video.fps_den
        )
        .as_bytes(),
    );
    for frame in &video.frames {
        out.extend_from_slice(b"FRAME\n");
        out.extend_from_slice(&frame.y);
        out.extend_from_slice(&frame.cb);
        out.extend_from_slice(&frame.cr);
    }
    Ok(out)
}

fn parse_dim(s: &str) -> Result<u32> {
    s.parse::<u32>()
        .map_err(|_| Error::Parse(format!("bad numeric field {s:?}")))
}
