//! File formats and low-level serialization.
//!
//! Raw video moves through the toolkit as [`RawVideo`]: planar 4:2:0 YUV with
//! one explicit presentation timestamp per frame. Coded video lives in the
//! stego container (see [`container`]). Audio covers are plain WAV, image
//! covers are binary PNM.

pub mod bits;
pub mod container;
pub mod pnm;
pub mod wav;
pub mod y4m;

pub use bits::{BitReader, BitWriter};
pub use container::{EncodedFrame, FrameType, StegoContainer};
pub use pnm::PnmImage;
pub use wav::WavFile;

use crate::error::{Error, Result};

/// One uncompressed 4:2:0 frame. Plane sizes are fixed by the owning
/// [`RawVideo`]: luma is `width * height` bytes, each chroma plane a quarter
/// of that.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub y: Vec<u8>,
    pub cb: Vec<u8>,
    pub cr: Vec<u8>,
    /// Presentation timestamp in frame-index units. Mandatory: downstream
    /// coding decisions (GOP placement) key off it.
    pub pts: u32,
}

/// An uncompressed 4:2:0 video sequence with a rational frame rate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVideo {
    pub width: u32,
    pub height: u32,
    pub fps_num: u32,
    pub fps_den: u32,
    pub frames: Vec<Frame>,
}

impl RawVideo {
    /// Checks the structural invariants: even dimensions, correct plane
    /// sizes, nonzero frame rate, at least one frame, strictly increasing
    /// timestamps.
    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDims("zero width or height".into()));
        }
        if self.width % 2 != 0 || self.height % 2 != 0 {
            return Err(Error::Unsupported(
                "4:2:0 video needs even luma dimensions".into(),
            ));
        }
        if self.fps_den == 0 || self.fps_num == 0 {
            return Err(Error::Parse("frame rate must be a positive rational".into()));
        }
        if self.frames.is_empty() {
            return Err(Error::EmptyInput);
        }
        let luma = self.width as usize * self.height as usize;
        let chroma = luma / 4;
        let mut last_pts = None;
        for (i, f) in self.frames.iter().enumerate() {
            if f.y.len() != luma || f.cb.len() != chroma || f.cr.len() != chroma {
                return Err(Error::InvalidDims(format!(
                    "frame {i} plane sizes do not match {}x{}",
                    self.width, self.height
                )));
            }
            if let Some(prev) = last_pts {
                if f.pts <= prev {
                    return Err(Error::Parse(format!(
                        "pts must be strictly increasing (frame {i}: {} after {prev})",
                        f.pts
                    )));
                }
            }
            last_pts = Some(f.pts);
        }
        Ok(())
    }
}

/// Pixel count of one frame at the given dimensions.
pub fn pixel_count(width: u32, height: u32) -> u64 {
    width as u64 * height as u64
}

/// Raw sample bytes of one 4:2:0 frame: full-size luma plus two half-size
/// chroma planes.
pub fn yuv420_frame_bytes(width: u32, height: u32) -> u64 {
    let luma = pixel_count(width, height);
    let chroma = pixel_count(width / 2, height / 2);
    luma + 2 * chroma
}
