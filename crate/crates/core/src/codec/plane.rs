//! Sample planes, padding to coded dimensions, and macroblock pixel access.

use crate::error::{Error, Result};
use crate::formats::Frame;

use super::MB_SIZE;

/// A single 8-bit sample plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    pub w: usize,
    pub h: usize,
    pub data: Vec<u8>,
}

impl Plane {
    pub fn new(w: usize, h: usize, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), w * h);
        Self { w, h, data }
    }

    pub fn filled(w: usize, h: usize, value: u8) -> Self {
        Self { w, h, data: vec![value; w * h] }
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.w + x]
    }

    /// Sample at a possibly out-of-bounds position, clamped to the edge.
    #[inline]
    pub fn get_clamped(&self, x: i64, y: i64) -> u8 {
        let cx = x.clamp(0, self.w as i64 - 1) as usize;
        let cy = y.clamp(0, self.h as i64 - 1) as usize;
        self.get(cx, cy)
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        self.data[y * self.w + x] = v;
    }
}

/// One frame held as planes at coded (16-aligned) dimensions. Used for
/// reference frames and reconstruction buffers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedFrame {
    pub y: Plane,
    pub cb: Plane,
    pub cr: Plane,
}

impl CodedFrame {
    pub fn filled(coded_w: usize, coded_h: usize, value: u8) -> Self {
        Self {
            y: Plane::filled(coded_w, coded_h, value),
            cb: Plane::filled(coded_w / 2, coded_h / 2, value),
            cr: Plane::filled(coded_w / 2, coded_h / 2, value),
        }
    }
}

/// Pixel data of one macroblock: a 16x16 luma block and the two co-sited
/// 8x8 chroma blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MbPixels {
    pub y: [u8; 256],
    pub cb: [u8; 64],
    pub cr: [u8; 64],
}

impl MbPixels {
    pub fn filled(value: u8) -> Self {
        Self { y: [value; 256], cb: [value; 64], cr: [value; 64] }
    }

    /// Copies the macroblock at `origin` (luma coordinates, 16-aligned) out
    /// of a coded frame.
    pub fn read_from(frame: &CodedFrame, origin: (usize, usize)) -> Self {
        let (ox, oy) = origin;
        let mut mb = MbPixels::filled(0);
        for r in 0..MB_SIZE {
            for c in 0..MB_SIZE {
                mb.y[r * MB_SIZE + c] = frame.y.get(ox + c, oy + r);
            }
        }
        for r in 0..8 {
            for c in 0..8 {
                mb.cb[r * 8 + c] = frame.cb.get(ox / 2 + c, oy / 2 + r);
                mb.cr[r * 8 + c] = frame.cr.get(ox / 2 + c, oy / 2 + r);
            }
        }
        mb
    }

    /// Writes this macroblock into a coded frame at `origin`.
    pub fn write_to(&self, frame: &mut CodedFrame, origin: (usize, usize)) {
        let (ox, oy) = origin;
        for r in 0..MB_SIZE {
            for c in 0..MB_SIZE {
                frame.y.set(ox + c, oy + r, self.y[r * MB_SIZE + c]);
            }
        }
        for r in 0..8 {
            for c in 0..8 {
                frame.cb.set(ox / 2 + c, oy / 2 + r, self.cb[r * 8 + c]);
                frame.cr.set(ox / 2 + c, oy / 2 + r, self.cr[r * 8 + c]);
            }
        }
    }
}

fn pad_plane(src: &[u8], w: usize, h: usize, out_w: usize, out_h: usize) -> Vec<u8> {
    let mut out = vec![0u8; out_w * out_h];
    for y in 0..out_h {
        let sy = y.min(h - 1);
        for x in 0..out_w {
            out[y * out_w + x] = src[sy * w + x.min(w - 1)];
        }
    }
    out
}

/// Pads a frame from display to coded dimensions by replicating the right
/// and bottom edges. Interior samples are untouched.
pub fn pad_frame(
    frame: &Frame,
    display: (u32, u32),
    coded: (u32, u32),
) -> Result<CodedFrame> {
    let (w, h) = (display.0 as usize, display.1 as usize);
    let (cw, ch) = (coded.0 as usize, coded.1 as usize);
    if w == 0 || h == 0 || cw < w || ch < h || cw % MB_SIZE != 0 || ch % MB_SIZE != 0 {
        return Err(Error::InvalidDims(format!(
            "cannot pad {w}x{h} to {cw}x{ch}"
        )));
    }
    if frame.y.len() != w * h {
        return Err(Error::InvalidDims("luma plane does not match display dims".into()));
    }
    Ok(CodedFrame {
        y: Plane::new(cw, ch, pad_plane(&frame.y, w, h, cw, ch)),
        cb: Plane::new(cw / 2, ch / 2, pad_plane(&frame.cb, w / 2, h / 2, cw / 2, ch / 2)),
        cr: Plane::new(cw / 2, ch / 2, pad_plane(&frame.cr, w / 2, h / 2, cw / 2, ch / 2)),
    })
}

/// Crops a coded frame back to display dimensions, inverting [`pad_frame`].
pub fn crop_frame(frame: &CodedFrame, display: (u32, u32), pts: u32) -> Frame {
    let (w, h) = (display.0 as usize, display.1 as usize);
    let crop = |p: &Plane, w: usize, h: usize| {
        let mut out = Vec::with_capacity(w * h);
        for y in 0..h {
            out.extend_from_slice(&p.data[y * p.w..y * p.w + w]);
        }
        out
    };
    Frame {
        y: crop(&frame.y, w, h),
        cb: crop(&frame.cb, w / 2, h / 2),
        cr: crop(&frame.cr, w / 2, h / 2),
        pts,
    }
}
