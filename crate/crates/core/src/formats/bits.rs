//! Bit-level writer/reader with order-0 exponential-Golomb codes.
//!
//! Both the macroblock entropy layer and the payload framing ride on these.
//! Bits are packed most significant first; the writer zero-pads the final
//! byte so a stream is always a whole number of bytes.
//!
//! Unsigned exp-Golomb: `n` is written as `k` zero bits followed by the
//! `k+1`-bit binary form of `n + 1`, where `k = bit_length(n + 1) - 1`.
//!
//! ```text
//! 0 -> 1        2 -> 011       4 -> 00101
//! 1 -> 010      3 -> 00100     5 -> 00110
//! ```
//!
//! Signed values map onto the unsigned code through the usual interleaving:
//! 0 -> 0, 1 -> 1, -1 -> 2, 2 -> 3, -2 -> 4, ...

use crate::error::{Error, Result};

/// Accumulates bits most-significant-first into a byte buffer.
#[derive(Debug, Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    /// Number of bits already used in the final byte (0..8).
    used: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        if self.used == 0 {
            self.bytes.push(0);
        }
        if bit {
            let last = self.bytes.last_mut().unwrap();
            *last |= 0x80 >> self.used;
        }
        self.used = (self.used + 1) % 8;
    }

    /// Writes the low `count` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u32, count: u32) {
        debug_assert!(count <= 32);
        for i in (0..count).rev() {
            self.push_bit(value >> i & 1 != 0);
        }
    }

    /// Unsigned order-0 exp-Golomb code.
    pub fn write_ue(&mut self, n: u32) {
        debug_assert!(n < u32::MAX, "ue code domain is 0..=u32::MAX-1");
        let v = n as u64 + 1;
        let len = 64 - v.leading_zeros(); // bit length of n + 1
        self.push_bits(0, len - 1);
        for i in (0..len).rev() {
            self.push_bit(v >> i & 1 != 0);
        }
    }

    /// Signed exp-Golomb code (0, 1, -1, 2, -2, ... interleaving). Covers
    /// every i32 except i32::MIN, whose interleaved index exceeds u32.
    pub fn write_se(&mut self, s: i32) {
        debug_assert!(s != i32::MIN, "se code domain excludes i32::MIN");
        let n = if s > 0 {
            2 * s as u32 - 1
        } else {
            (2 * -(s as i64)) as u32
        };
        self.write_ue(n);
    }

    /// Number of bits written so far.
    pub fn bit_len(&self) -> usize {
        self.bytes.len() * 8 - if self.used == 0 { 0 } else { (8 - self.used) as usize }
    }

    /// Finishes the stream, zero-padding the final partial byte.
    pub fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

/// Reads bits most-significant-first from a byte slice. Reading past the end
/// of the buffer yields [`Error::TruncatedInput`].
#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    /// Bits consumed so far.
    pub fn bit_pos(&self) -> usize {
        self.pos
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = self.data.get(self.pos / 8).ok_or(Error::TruncatedInput)?;
        let bit = byte >> (7 - self.pos % 8) & 1 != 0;
        self.pos += 1;
        Ok(bit)
    }

    pub fn read_bits(&mut self, count: u32) -> Result<u32> {
        debug_assert!(count <= 32);
        let mut v = 0u32;
        for _ in 0..count {
            v = v << 1 | self.read_bit()? as u32;
        }
        Ok(v)
    }

    /// Decodes one unsigned exp-Golomb value.
    pub fn read_ue(&mut self) -> Result<u32> {
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros > 32 {
                return Err(Error::Parse("exp-Golomb run overflows u32".into()));
            }
        }
        let mut v: u64 = 1;
        for _ in 0..zeros {
            v = v << 1 | self.read_bit()? as u64;
        }
        let n = v - 1;
        u32::try_from(n).map_err(|_| Error::Parse("exp-Golomb value overflows u32".into()))
    }

    /// Decodes one signed exp-Golomb value.
    pub fn read_se(&mut self) -> Result<i32> {
        let n = self.read_ue()?;
        let v: i64 = if n % 2 == 1 {
            (n as i64 + 1) / 2
        } else {
            -((n / 2) as i64)
        };
        i32::try_from(v).map_err(|_| Error::Parse("signed exp-Golomb value overflows i32".into()))
    }
}

/// Encodes a single unsigned exp-Golomb codeword on its own.
pub fn ue_encode(n: u32) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write_ue(n);
    w.finish()
}

/// Decodes a single unsigned exp-Golomb codeword from the head of `bits`.
pub fn ue_decode(bits: &[u8]) -> Result<u32> {
    BitReader::new(bits).read_ue()
}

/// Encodes a single signed exp-Golomb codeword on its own.
pub fn se_encode(s: i32) -> Vec<u8> {
    let mut w = BitWriter::new();
    w.write_se(s);
    w.finish()
}

/// Decodes a single signed exp-Golomb codeword from the head of `bits`.
pub fn se_decode(bits: &[u8]) -> Result<i32> {
    BitReader::new(bits).read_se()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bit_string(n: u32) -> String {
        let mut w = BitWriter::new();
        w.write_ue(n);
        let len = w.bit_len();
        let bytes = w.finish();
        (0..len)
            .map(|i| if bytes[i / 8] >> (7 - i % 8) & 1 != 0 { '1' } else { '0' })
            .collect()
    }

    fn se_bit_string(s: i32) -> String {
        let mut w = BitWriter::new();
        w.write_se(s);
        let len = w.bit_len();
        let bytes = w.finish();
        (0..len)
            .map(|i| if bytes[i / 8] >> (7 - i % 8) & 1 != 0 { '1' } else { '0' })
            .collect()
    }

    #[test]
    fn ue_known_codewords() {
        assert_eq!(bit_string(0), "1");
        assert_eq!(bit_string(1), "010");
        assert_eq!(bit_string(2), "011");
        assert_eq!(bit_string(3), "00100");
        assert_eq!(bit_string(4), "00101");
        assert_eq!(bit_string(5), "00110");
        assert_eq!(bit_string(6), "00111");
        assert_eq!(bit_string(7), "0001000");
    }

    #[test]
    fn se_known_codewords() {
        // Interleaved mapping: 0 -> ue(0), 1 -> ue(1), -1 -> ue(2), 2 -> ue(3).
        assert_eq!(se_bit_string(0), "1");
        assert_eq!(se_bit_string(1), "010");
        assert_eq!(se_bit_string(-1), "011");
        assert_eq!(se_bit_string(2), "00100");
        assert_eq!(se_bit_string(-2), "00101");
    }

    #[test]
    fn ue_round_trip_exhaustive_16_bit() {
        let mut w = BitWriter::new();
        for n in 0..1u32 << 16 {
            w.write_ue(n);
        }
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        for n in 0..1u32 << 16 {
            assert_eq!(r.read_ue().unwrap(), n);
        }
    }

    #[test]
    fn se_round_trip_exhaustive() {
        let mut w = BitWriter::new();
        for s in -(1 << 12)..=1 << 12 {
            w.write_se(s);
        }
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        for s in -(1 << 12)..=1 << 12 {
            assert_eq!(r.read_se().unwrap(), s);
        }
    }

    #[test]
    fn se_extremes_round_trip() {
        for s in [i32::MIN, i32::MIN + 1, -1, 0, 1, i32::MAX - 1, i32::MAX] {
            // The interleaved index must stay inside the u32 code domain.
            if s == i32::MIN {
                continue;
            }
            let bits = se_encode(s);
            assert_eq!(se_decode(&bits).unwrap(), s);
        }
    }

    #[test]
    fn codewords_are_prefix_free() {
        let codes: Vec<String> = (0..1u32 << 10).map(bit_string).collect();
        let set: std::collections::HashSet<&str> = codes.iter().map(|s| s.as_str()).collect();
        for code in &codes {
            for plen in 1..code.len() {
                assert!(
                    !set.contains(&code[..plen]),
                    "{code} has prefix {} in the code set",
                    &code[..plen]
                );
            }
        }
    }

    #[test]
    fn writer_pads_final_byte_with_zeros() {
        let mut w = BitWriter::new();
        w.push_bit(true);
        w.push_bit(true);
        w.push_bit(true);
        assert_eq!(w.finish(), vec![0b1110_0000]);
    }

    #[test]
    fn reading_past_end_is_truncated_input() {
        let mut r = BitReader::new(&[0xFF]);
        for _ in 0..8 {
            r.read_bit().unwrap();
        }
        assert!(matches!(r.read_bit(), Err(Error::TruncatedInput)));
        // A ue code cut off mid-stream reports the same.
        let mut r = BitReader::new(&[0b0000_0000]);
        assert!(matches!(r.read_ue(), Err(Error::TruncatedInput)));
    }

    #[test]
    fn push_bits_matches_bit_by_bit() {
        let mut a = BitWriter::new();
        a.push_bits(0b1011_0010_110, 11);
        let mut b = BitWriter::new();
        for bit in [true, false, true, true, false, false, true, false, true, true, false] {
            b.push_bit(bit);
        }
        assert_eq!(a.finish(), b.finish());
    }
}
