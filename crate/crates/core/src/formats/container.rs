//! The stego container: a minimal coded-video file with an optional verbatim
//! audio block. All integers are big-endian.
//!
//! ```text
//! magic      4  "SVST"
//! version    u8 (currently 1)
//! flags      u8 (bit 0: audio block present)
//! display_w  u16   display_h  u16
//! coded_w    u16   coded_h    u16     (display rounded up to 16)
//! fps_num    u16   fps_den    u16
//! gop_size   u8    qp         u8
//! frame_count u32
//! [audio_len u32, audio bytes]        (iff flags bit 0)
//! frame_count * { frame_type u8 (0 I, 1 P); pts u32; data_len u32; data }
//! ```

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"SVST";
pub const VERSION: u8 = 1;

const FLAG_AUDIO: u8 = 0x01;

/// Coded picture type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameType {
    /// Intra-only frame: every macroblock predicted from the constant 128.
    I,
    /// Predicted frame: macroblocks reference the previous reconstruction.
    P,
}

impl FrameType {
    fn from_wire(v: u8) -> Result<Self> {
        match v {
            0 => Ok(FrameType::I),
            1 => Ok(FrameType::P),
            _ => Err(Error::CorruptContainer(format!("frame type {v}"))),
        }
    }

    fn to_wire(self) -> u8 {
        match self {
            FrameType::I => 0,
            FrameType::P => 1,
        }
    }
}

/// One coded frame: a bit-packed macroblock stream, byte-aligned at the end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedFrame {
    pub frame_type: FrameType,
    pub pts: u32,
    pub data: Vec<u8>,
}

/// A complete coded video plus codec parameters and optional audio cover.
/// The frame count on the wire always equals `frames.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StegoContainer {
    pub display_w: u16,
    pub display_h: u16,
    pub coded_w: u16,
    pub coded_h: u16,
    pub fps_num: u16,
    pub fps_den: u16,
    pub gop_size: u8,
    pub qp: u8,
    /// Verbatim WAV bytes carried alongside the video, if any.
    pub audio: Option<Vec<u8>>,
    pub frames: Vec<EncodedFrame>,
}

impl StegoContainer {
    /// Header-level invariants: coded dims are the display dims rounded up
    /// to multiples of 16, parameters are in range, timestamps increase,
    /// and every frame whose pts lands on a GOP boundary is an I-frame
    /// (in particular the first frame).
    pub fn validate(&self) -> Result<()> {
        let round16 = |v: u16| v.checked_add(15).map(|x| x / 16 * 16);
        if self.display_w == 0 || self.display_h == 0 {
            return Err(Error::CorruptContainer("zero display dimensions".into()));
        }
        if round16(self.display_w) != Some(self.coded_w)
            || round16(self.display_h) != Some(self.coded_h)
        {
            return Err(Error::CorruptContainer(
                "coded dims are not display dims rounded up to 16".into(),
            ));
        }
        if self.gop_size == 0 {
            return Err(Error::CorruptContainer("gop_size must be >= 1".into()));
        }
        if self.qp == 0 || self.qp > 63 {
            return Err(Error::CorruptContainer(format!("qp {} out of 1..=63", self.qp)));
        }
        if self.fps_num == 0 || self.fps_den == 0 {
            return Err(Error::CorruptContainer("frame rate must be positive".into()));
        }
        if let Some(audio) = &self.audio {
            if audio.is_empty() {
                return Err(Error::CorruptContainer("empty audio block".into()));
            }
        }
        let mut last: Option<u32> = None;
        for (i, f) in self.frames.iter().enumerate() {
            if let Some(prev) = last {
                if f.pts <= prev {
                    return Err(Error::CorruptContainer(format!(
                        "pts not strictly increasing at frame {i}"
                    )));
                }
            }
            last = Some(f.pts);
            let on_boundary = f.pts % self.gop_size as u32 == 0;
            if on_boundary && f.frame_type != FrameType::I {
                return Err(Error::CorruptContainer(format!(
                    "frame {i} at pts {} must be an I-frame",
                    f.pts
                )));
            }
            if i == 0 && f.frame_type != FrameType::I {
                return Err(Error::CorruptContainer("first frame must be an I-frame".into()));
            }
        }
        Ok(())
    }

    /// Macroblock count per coded frame.
    pub fn macroblocks_per_frame(&self) -> usize {
        (self.coded_w as usize / 16) * (self.coded_h as usize / 16)
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let slice = self
            .data
            .get(self.pos..self.pos.checked_add(n).ok_or(Error::TruncatedInput)?)
            .ok_or(Error::TruncatedInput)?;
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

/// Parses and validates a stego container.
pub fn read_container(data: &[u8]) -> Result<StegoContainer> {
    let mut r = Reader { data, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::NotAStegoContainer);
    }
    let version = r.u8()?;
    if version != VERSION {
        return Err(Error::Unsupported(format!("container version {version}")));
    }
    let flags = r.u8()?;
    if flags & !FLAG_AUDIO != 0 {
        return Err(Error::CorruptContainer(format!("unknown flags {flags:#04x}")));
    }
    let display_w = r.u16()?;
    let display_h = r.u16()?;
    let coded_w = r.u16()?;
    let coded_h = r.u16()?;
    let fps_num = r.u16()?;
    let fps_den = r.u16()?;
    let gop_size = r.u8()?;
    let qp = r.u8()?;
    let frame_count = r.u32()?;

    let audio = if flags & FLAG_AUDIO != 0 {
        let len = r.u32()? as usize;
        if len == 0 {
            return Err(Error::CorruptContainer("audio flag set with empty block".into()));
        }
        Some(r.take(len)?.to_vec())
    } else {
        None
    };

    let mut frames = Vec::with_capacity(frame_count.min(1 << 16) as usize);
    for _ in 0..frame_count {
        let frame_type = FrameType::from_wire(r.u8()?)?;
        let pts = r.u32()?;
        let data_len = r.u32()? as usize;
        frames.push(EncodedFrame { frame_type, pts, data: r.take(data_len)?.to_vec() });
    }
    if r.pos != data.len() {
        return Err(Error::CorruptContainer(format!(
            "{} trailing bytes after the last frame",
            data.len() - r.pos
        )));
    }

    let container = StegoContainer {
        display_w,
        display_h,
        coded_w,
        coded_h,
        fps_num,
        fps_den,
        gop_size,
        qp,
        audio,
        frames,
    };
    container.validate()?;
    Ok(container)
}

/// Serializes a container. `read_container(write_container(c))` is byte-exact.
pub fn write_container(container: &StegoContainer) -> Result<Vec<u8>> {
    container.validate()?;
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(if container.audio.is_some() { FLAG_AUDIO } else { 0 });
    out.extend_from_slice(&container.display_w.to_be_bytes());
    out.extend_from_slice(&container.display_h.to_be_bytes());
    out.extend_from_slice(&container.coded_w.to_be_bytes());
    out.extend_from_slice(&container.coded_h.to_be_bytes());
    out.extend_from_slice(&container.fps_num.to_be_bytes());
    out.extend_from_slice(&container.fps_den.to_be_bytes());
    out.push(container.gop_size);
    out.push(container.qp);
    out.extend_from_slice(&(container.frames.len() as u32).to_be_bytes());
    if let Some(audio) = &container.audio {
        out.extend_from_slice(&(audio.len() as u32).to_be_bytes());
        out.extend_from_slice(audio);
    }
    for frame in &container.frames {
        out.push(frame.frame_type.to_wire());
        out.extend_from_slice(&frame.pts.to_be_bytes());
        out.extend_from_slice(&(frame.data.len() as u32).to_be_bytes());
        out.extend_from_slice(&frame.data);
    }
    Ok(out)
}
