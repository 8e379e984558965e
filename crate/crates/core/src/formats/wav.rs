//! RIFF/WAVE reading and writing.
//!
//! The reader walks the chunk list, keeps the `fmt ` payload and the declared
//! `data` samples, and hands back everything past the declared data chunk as
//! a separate tail. That tail is the whole point for steganography: players
//! honour the declared sizes and never look at it.

use crate::error::{Error, Result};

/// Parsed `fmt ` chunk. The six standard PCM fields are decoded; anything a
/// writer appended beyond them is preserved verbatim in `extra`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WavFormat {
    pub audio_format: u16,
    pub channels: u16,
    pub sample_rate: u32,
    pub byte_rate: u32,
    pub block_align: u16,
    pub bits_per_sample: u16,
    pub extra: Vec<u8>,
}

/// A WAV file split into format description, declared sample data, and any
/// bytes found after the declared data chunk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WavFile {
    pub format: WavFormat,
    pub samples: Vec<u8>,
    pub trailing: Vec<u8>,
}

fn le16(data: &[u8], at: usize) -> Result<u16> {
    let b = data.get(at..at + 2).ok_or(Error::TruncatedInput)?;
    Ok(u16::from_le_bytes([b[0], b[1]]))
}

fn le32(data: &[u8], at: usize) -> Result<u32> {
    let b = data.get(at..at + 4).ok_or(Error::TruncatedInput)?;
    Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
}

/// Parses a WAV file. Chunks other than `fmt ` and `data` ahead of the data
/// chunk are skipped; `fmt ` must precede `data`.
pub fn read_wav(data: &[u8]) -> Result<WavFile> {
    if data.len() < 12 {
        return Err(Error::TruncatedInput);
    }
    if &data[0..4] != b"RIFF" || &data[8..12] != b"WAVE" {
        return Err(Error::Parse("missing RIFF/WAVE signature".into()));
    }

    let mut format: Option<WavFormat> = None;
    let mut pos = 12usize;
    loop {
        if data.len() - pos < 8 {
            return Err(if data.len() == pos {
                Error::Parse("no data chunk".into())
            } else {
                Error::TruncatedInput
            });
        }
        let id = &data[pos..pos + 4];
        let size = le32(data, pos + 4)? as usize;
        let body = pos + 8;
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(Error::Parse("fmt chunk shorter than 16 bytes".into()));
                }
                if data.len() - body < size {
                    return Err(Error::TruncatedInput);
                }
                format = Some(WavFormat {
                    audio_format: le16(data, body)?,
                    channels: le16(data, body + 2)?,
                    sample_rate: le32(data, body + 4)?,
                    byte_rate: le32(data, body + 8)?,
                    block_align: le16(data, body + 12)?,
                    bits_per_sample: le16(data, body + 14)?,
                    extra: data[body + 16..body + size].to_vec(),
                });
                pos = body + size;
            }
            b"data" => {
                let format = format
                    .ok_or_else(|| Error::Parse("data chunk before fmt chunk".into()))?;
                if data.len() - body < size {
                    return Err(Error::Parse(
                        "declared data length exceeds file size".into(),
                    ));
                }
                return Ok(WavFile {
                    format,
                    samples: data[body..body + size].to_vec(),
                    trailing: data[body + size..].to_vec(),
                });
            }
            _ => {
                if data.len() - body < size {
                    return Err(Error::TruncatedInput);
                }
                pos = body + size;
            }
        }
    }
}

/// Serializes a canonical WAV file: RIFF header, `fmt ` chunk, `data` chunk,
/// then `trailing` appended verbatim outside the declared structure.
/// `read_wav(write_wav(f))` reproduces `f` exactly.
pub fn write_wav(file: &WavFile) -> Vec<u8> {
    let fmt_len = 16 + file.format.extra.len();
    let riff_len = 4 + (8 + fmt_len) + (8 + file.samples.len());
    let mut out = Vec::with_capacity(8 + riff_len + file.trailing.len());
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(riff_len as u32).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&(fmt_len as u32).to_le_bytes());
    out.extend_from_slice(&file.format.audio_format.to_le_bytes());
    out.extend_from_slice(&file.format.channels.to_le_bytes());
    out.extend_from_slice(&file.format.sample_rate.to_le_bytes());
    out.extend_from_slice(&file.format.byte_rate.to_le_bytes());
    out.extend_from_slice(&file.format.block_align.to_le_bytes());
    out.extend_from_slice(&file.format.bits_per_sample.to_le_bytes());
    out.extend_from_slice(&file.format.extra);
    out.extend_from_slice(b"data");
    out.extend_from_slice(&(file.samples.len() as u32).to_le_bytes());
    out.extend_from_slice(&file.samples);
    out.extend_from_slice(&file.trailing);
    out
}

#[cfg(test)]
pub(crate) fn pcm16_mono(samples: &[u8]) -> WavFile {
    WavFile {
        format: WavFormat {
            audio_format: 1,
            channels: 1,
            sample_rate: 8000,
            byte_rate: 16000,
            block_align: 2,
            bits_per_sample: 16,
            extra: Vec::new(),
        },
        samples: samples.to_vec(),
        trailing: Vec::new(),
    }
}
