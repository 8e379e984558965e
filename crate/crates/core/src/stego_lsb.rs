//! Payloads hidden in audio, two ways.
//!
//! The LSB channel rewrites the least significant bit of successive cover
//! bytes with a length-prefixed payload, changing each carrier byte by at
//! most one. The append channel is blunter: it parks the payload after a
//! WAV file's declared data chunk, where players never look. Both leave
//! every declared structure byte-compatible with the original.

use crate::error::{Error, Result};
use crate::formats::wav::read_wav;

/// Payload bytes a cover of `cover_len` bytes can hold in its LSBs, after
/// the four-byte length prefix.
pub fn lsb_capacity(cover_len: usize) -> usize {
    (cover_len / 8).saturating_sub(4)
}

fn write_lsbs(out: &mut [u8], start: usize, bytes: &[u8]) {
    let mut at = start;
    for &b in bytes {
        for shift in (0..8).rev() {
            out[at] = out[at] & !1 | b >> shift & 1;
            at += 1;
        }
    }
}

/// Embeds `payload` into the least significant bits of `cover`, one bit
/// per cover byte: a four-byte big-endian length first, then the payload,
/// both most significant bit first. Cover bytes beyond the written region
/// are returned untouched.
pub fn lsb_embed(cover: &[u8], payload: &[u8]) -> Result<Vec<u8>> {
    let required = 32 + 8 * payload.len() as u64;
    if required > cover.len() as u64 {
        return Err(Error::InsufficientCapacity {
            placed: cover.len() as u64,
            required,
        });
    }
    let mut out = cover.to_vec();
    write_lsbs(&mut out, 0, &(payload.len() as u32).to_be_bytes());
    write_lsbs(&mut out, 32, payload);
    Ok(out)
}

fn read_lsb_bytes(cover: &[u8], start: usize, n: usize) -> Vec<u8> {
    (0..n)
        .map(|i| {
            cover[start + 8 * i..start + 8 * i + 8]
                .iter()
                .fold(0u8, |acc, &b| acc << 1 | b & 1)
        })
        .collect()
}

/// Reads a payload back out of a cover's least significant bits. The
/// declared length must fit the cover; a cover that never held a payload
/// either fails that check or returns whatever its LSBs happen to spell.
pub fn lsb_extract(cover: &[u8]) -> Result<Vec<u8>> {
    if cover.len() < 32 {
        return Err(Error::CorruptPayload);
    }
    let length = u32::from_be_bytes(read_lsb_bytes(cover, 0, 4).try_into().unwrap()) as usize;
    if length > lsb_capacity(cover.len()) {
        return Err(Error::CorruptPayload);
    }
    Ok(read_lsb_bytes(cover, 32, length))
}

/// Appends `payload` verbatim after a WAV file's declared structure. The
/// input must parse as a WAV; its bytes are not rewritten, so an empty
/// payload returns the input unchanged.
pub fn inject_append(audio: &[u8], payload: &[u8]) -> Result<Vec<u8>> {
    read_wav(audio)?;
    let mut out = Vec::with_capacity(audio.len() + payload.len());
    out.extend_from_slice(audio);
    out.extend_from_slice(payload);
    Ok(out)
}

/// Returns every byte found after a WAV file's declared data chunk.
pub fn extract_appended(audio: &[u8]) -> Result<Vec<u8>> {
    Ok(read_wav(audio)?.trailing)
}
