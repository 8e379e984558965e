//! Macroblock bitstream coding.
//!
//! Per macroblock: the mode as `ue` (0 inter, 1 intra, 2 skip). A skip
//! record is that single codeword and nothing else. Inter records follow
//! with the motion vector as two `se` values in quarter-pel units. Inter
//! and intra records then carry six coefficient blocks (Y00, Y01, Y10,
//! Y11, Cb, Cr), each as `ue(nonzero count)` followed by that many
//! `(zigzag position delta as ue, level as se)` pairs. The first delta is
//! the zigzag position itself, later deltas are the gap to the previous
//! position minus one; levels are never zero.

use crate::error::{Error, Result};
use crate::formats::{BitReader, BitWriter};

use super::transform::ZIGZAG;
use super::{CoeffBlocks, MacroblockRecord, MotionVector};

const MODE_INTER: u32 = 0;
const MODE_INTRA: u32 = 1;
const MODE_SKIP: u32 = 2;

fn encode_blocks(blocks: &CoeffBlocks, w: &mut BitWriter) {
    for block in blocks {
        let nonzero: Vec<(u32, i32)> = ZIGZAG
            .iter()
            .enumerate()
            .filter_map(|(pos, &raster)| {
                (block[raster] != 0).then_some((pos as u32, block[raster]))
            })
            .collect();
        w.write_ue(nonzero.len() as u32);
        let mut prev = None;
        for (pos, level) in nonzero {
            debug_assert!(level != 0);
            let delta = match prev {
                None => pos,
                Some(p) => pos - p - 1,
            };
            w.write_ue(delta);
            w.write_se(level);
            prev = Some(pos);
        }
    }
}

fn decode_blocks(r: &mut BitReader) -> Result<Box<CoeffBlocks>> {
    let mut blocks: Box<CoeffBlocks> = Box::new([[0; 64]; 6]);
    for block in blocks.iter_mut() {
        let nnz = r.read_ue()?;
        if nnz > 64 {
            return Err(Error::CorruptContainer(format!(
                "{nnz} nonzero coefficients in an 8x8 block"
            )));
        }
        let mut pos: Option<u32> = None;
        for _ in 0..nnz {
            let delta = r.read_ue()?;
            let next = match pos {
                None => delta,
                Some(p) => p
                    .checked_add(delta)
                    .and_then(|v| v.checked_add(1))
                    .ok_or_else(|| Error::CorruptContainer("zigzag position overflow".into()))?,
            };
            if next >= 64 {
                return Err(Error::CorruptContainer(format!("zigzag position {next}")));
            }
            let level = r.read_se()?;
            if level == 0 {
                return Err(Error::CorruptContainer("zero coefficient level".into()));
            }
            block[ZIGZAG[next as usize]] = level;
            pos = Some(next);
        }
    }
    Ok(blocks)
}

/// Appends one macroblock record to a frame's bit stream.
pub fn encode_macroblock(record: &MacroblockRecord, w: &mut BitWriter) {
    match record {
        MacroblockRecord::Skip => w.write_ue(MODE_SKIP),
        MacroblockRecord::Intra { coeffs } => {
            w.write_ue(MODE_INTRA);
            encode_blocks(coeffs, w);
        }
        MacroblockRecord::Inter { mv, coeffs } => {
            w.write_ue(MODE_INTER);
            w.write_se(mv.dx);
            w.write_se(mv.dy);
            encode_blocks(coeffs, w);
        }
    }
}

/// Parses one macroblock record from a frame's bit stream.
pub fn decode_macroblock(r: &mut BitReader) -> Result<MacroblockRecord> {
    match r.read_ue()? {
        MODE_SKIP => Ok(MacroblockRecord::Skip),
        MODE_INTRA => Ok(MacroblockRecord::Intra { coeffs: decode_blocks(r)? }),
        MODE_INTER => {
            let dx = r.read_se()?;
            let dy = r.read_se()?;
            Ok(MacroblockRecord::Inter {
                mv: MotionVector { dx, dy },
                coeffs: decode_blocks(r)?,
            })
        }
        m => Err(Error::CorruptContainer(format!("macroblock mode {m}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits_of(record: &MacroblockRecord) -> (Vec<u8>, usize) {
        let mut w = BitWriter::new();
        encode_macroblock(record, &mut w);
        let len = w.bit_len();
        (w.finish(), len)
    }

    fn expected_stream(parts: &[Code]) -> (Vec<u8>, usize) {
        let mut w = BitWriter::new();
        for p in parts {
            match *p {
                Code::Ue(n) => w.write_ue(n),
                Code::Se(s) => w.write_se(s),
            }
        }
        let len = w.bit_len();
        (w.finish(), len)
    }

    enum Code {
        Ue(u32),
        Se(i32),
    }

    #[test]
    fn skip_is_a_single_codeword() {
        let (bytes, len) = bits_of(&MacroblockRecord::Skip);
        assert_eq!(len, 3); // ue(2) = 011
        assert_eq!(bytes, vec![0b0110_0000]);
    }

    #[test]
    fn inter_with_empty_blocks_is_mode_mv_and_six_counts() {
        let record = MacroblockRecord::Inter {
            mv: MotionVector { dx: 16, dy: 0 },
            coeffs: Box::new([[0; 64]; 6]),
        };
        use Code::*;
        let expected = expected_stream(&[
            Ue(0),
            Se(16),
            Se(0),
            Ue(0),
            Ue(0),
            Ue(0),
            Ue(0),
            Ue(0),
            Ue(0),
        ]);
        assert_eq!(expected.1, 19);
        assert_eq!(bits_of(&record), expected);
    }

    #[test]
    fn coefficients_code_as_position_deltas() {
        let mut coeffs: CoeffBlocks = [[0; 64]; 6];
        // Zigzag positions 0 (DC), 2 and 5 of the first luma block.
        coeffs[0][ZIGZAG[0]] = 3;
        coeffs[0][ZIGZAG[2]] = -1;
        coeffs[0][ZIGZAG[5]] = 1;
        let record = MacroblockRecord::Intra { coeffs: Box::new(coeffs) };
        use Code::*;
        let expected = expected_stream(&[
            Ue(1), // intra mode
            Ue(3), // three coefficients in Y00
            Ue(0),
            Se(3), // position 0
            Ue(1),
            Se(-1), // gap of one zero to position 2
            Ue(2),
            Se(1), // gap of two zeros to position 5
            Ue(0),
            Ue(0),
            Ue(0),
            Ue(0),
            Ue(0), // remaining five blocks empty
        ]);
        assert_eq!(bits_of(&record), expected);
    }

    #[test]
    fn records_round_trip() {
        let mut coeffs: CoeffBlocks = [[0; 64]; 6];
        coeffs[0][0] = 40;
        coeffs[0][63] = -2;
        coeffs[3][17] = 1;
        coeffs[4][1] = -128;
        coeffs[5][62] = 2040;
        let records = [
            MacroblockRecord::Skip,
            MacroblockRecord::Intra { coeffs: Box::new(coeffs) },
            MacroblockRecord::Inter {
                mv: MotionVector { dx: -68, dy: 64 },
                coeffs: Box::new(coeffs),
            },
        ];
        let mut w = BitWriter::new();
        for r in &records {
            encode_macroblock(r, &mut w);
        }
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes);
        for record in &records {
            assert_eq!(&decode_macroblock(&mut r).unwrap(), record);
        }
    }

    #[test]
    fn zero_level_in_stream_is_corrupt() {
        let mut w = BitWriter::new();
        w.write_ue(1); // intra
        w.write_ue(1); // one coefficient
        w.write_ue(0); // position 0
        w.write_se(0); // level zero: illegal
        let bytes = w.finish();
        assert!(matches!(
            decode_macroblock(&mut BitReader::new(&bytes)),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn position_past_63_is_corrupt() {
        let mut w = BitWriter::new();
        w.write_ue(1);
        w.write_ue(1);
        w.write_ue(64); // first position already out of range
        w.write_se(5);
        let bytes = w.finish();
        assert!(matches!(
            decode_macroblock(&mut BitReader::new(&bytes)),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn unknown_mode_is_corrupt() {
        let mut w = BitWriter::new();
        w.write_ue(3);
        let bytes = w.finish();
        assert!(matches!(
            decode_macroblock(&mut BitReader::new(&bytes)),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn truncated_record_is_reported() {
        let record = MacroblockRecord::Inter {
            mv: MotionVector { dx: 16, dy: 0 },
            coeffs: Box::new([[0; 64]; 6]),
        };
        let mut w = BitWriter::new();
        encode_macroblock(&record, &mut w);
        let bytes = w.finish();
        let mut r = BitReader::new(&bytes[..1]);
        assert!(matches!(decode_macroblock(&mut r), Err(Error::TruncatedInput)));
    }
}
