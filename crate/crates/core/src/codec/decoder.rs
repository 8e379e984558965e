//! Frame decoding and the reconstruction rule.
//!
//! Reconstruction lives here and is also called by the encoder, so both
//! sides compute bit-identical reference frames and prediction never
//! drifts.

use crate::error::{Error, Result};
use crate::formats::{BitReader, FrameType, RawVideo, StegoContainer};

use super::entropy::decode_macroblock;
use super::motion::motion_compensate;
use super::plane::{crop_frame, CodedFrame, MbPixels};
use super::transform::{dequantise, idct8};
use super::{partition, DecodeTap, MacroblockRecord, MbContext, MbMode, MotionVector};

/// Reads one sample of the macroblock in coding order: `block` selects
/// Y00, Y01, Y10, Y11, Cb or Cr, `(r, c)` the position inside that 8x8
/// block.
pub(super) fn block_sample(mb: &MbPixels, block: usize, r: usize, c: usize) -> u8 {
    match block {
        0..=3 => mb.y[(block / 2 * 8 + r) * 16 + block % 2 * 8 + c],
        4 => mb.cb[r * 8 + c],
        _ => mb.cr[r * 8 + c],
    }
}

fn set_block_sample(mb: &mut MbPixels, block: usize, r: usize, c: usize, v: u8) {
    match block {
        0..=3 => mb.y[(block / 2 * 8 + r) * 16 + block % 2 * 8 + c] = v,
        4 => mb.cb[r * 8 + c] = v,
        _ => mb.cr[r * 8 + c] = v,
    }
}

/// Rebuilds one macroblock into `out`: prediction per mode, plus the
/// inverse-transformed residual, rounded half away from zero and clamped
/// to 0..=255. `reference` is the previous reconstructed frame and may be
/// `None` only while coding intra macroblocks.
pub(super) fn reconstruct_macroblock(
    record: &MacroblockRecord,
    reference: Option<&CodedFrame>,
    origin: (usize, usize),
    qp: u8,
    out: &mut CodedFrame,
) {
    let mut pixels = match record {
        MacroblockRecord::Intra { .. } => MbPixels::filled(128),
        MacroblockRecord::Skip => motion_compensate(
            reference.expect("skip macroblock in a frame without a reference"),
            MotionVector::ZERO,
            origin,
        ),
        MacroblockRecord::Inter { mv, .. } => motion_compensate(
            reference.expect("inter macroblock in a frame without a reference"),
            *mv,
            origin,
        ),
    };
    if let Some(coeffs) = record.coeffs() {
        for (block, levels) in coeffs.iter().enumerate() {
            let mut freq = [[0.0f64; 8]; 8];
            for (i, &level) in levels.iter().enumerate() {
                freq[i / 8][i % 8] = dequantise(level, qp);
            }
            let residual = idct8(&freq);
            for r in 0..8 {
                for c in 0..8 {
                    let p = block_sample(&pixels, block, r, c) as f64;
                    let v = (p + residual[r][c]).round().clamp(0.0, 255.0) as u8;
                    set_block_sample(&mut pixels, block, r, c, v);
                }
            }
        }
    }
    pixels.write_to(out, origin);
}

fn corrupt_frame_data(e: Error) -> Error {
    match e {
        Error::TruncatedInput => {
            Error::CorruptContainer("frame data ends mid-macroblock".into())
        }
        Error::Parse(msg) => Error::CorruptContainer(msg),
        other => other,
    }
}

/// Decodes every frame of a container back to raw video. The tap, when
/// given, observes each macroblock record in raster order, for every frame
/// and every mode, before the macroblock is reconstructed.
pub fn decode_video(
    container: &StegoContainer,
    mut tap: Option<&mut dyn DecodeTap>,
) -> Result<RawVideo> {
    container.validate()?;
    let display = (container.display_w as u32, container.display_h as u32);
    let origins = partition(container.coded_w as u32, container.coded_h as u32)?;
    let (coded_w, coded_h) = (container.coded_w as usize, container.coded_h as usize);

    let mut reference: Option<CodedFrame> = None;
    let mut frames = Vec::with_capacity(container.frames.len());
    for (frame_index, coded) in container.frames.iter().enumerate() {
        let mut r = BitReader::new(&coded.data);
        let mut recon = CodedFrame::filled(coded_w, coded_h, 0);
        for (mb_index, &origin) in origins.iter().enumerate() {
            let record = decode_macroblock(&mut r).map_err(corrupt_frame_data)?;
            if coded.frame_type == FrameType::I && record.mode() != MbMode::Intra {
                return Err(Error::CorruptContainer(
                    "non-intra macroblock in an intra frame".into(),
                ));
            }
            if let Some(t) = tap.as_deref_mut() {
                let ctx = MbContext { frame_index, frame_type: coded.frame_type, mb_index };
                t.macroblock(&ctx, &record);
            }
            reconstruct_macroblock(&record, reference.as_ref(), origin, container.qp, &mut recon);
        }
        let total_bits = coded.data.len() * 8;
        if total_bits - r.bit_pos() >= 8 {
            return Err(Error::CorruptContainer("trailing bytes in frame data".into()));
        }
        while r.bit_pos() < total_bits {
            if r.read_bit()? {
                return Err(Error::CorruptContainer("nonzero padding in frame data".into()));
            }
        }
        frames.push(crop_frame(&recon, display, coded.pts));
        reference = Some(recon);
    }

    Ok(RawVideo {
        width: display.0,
        height: display.1,
        fps_num: container.fps_num as u32,
        fps_den: container.fps_den as u32,
        frames,
    })
}

#[cfg(test)]
mod tests {
    use super::super::entropy::encode_macroblock;
    use super::*;
    use crate::formats::{BitWriter, Frame};

    fn empty_inter_frame(mbs: usize, mv: MotionVector) -> Vec<u8> {
        let mut w = BitWriter::new();
        for _ in 0..mbs {
            encode_macroblock(
                &MacroblockRecord::Inter { mv, coeffs: Box::new([[0; 64]; 6]) },
                &mut w,
            );
        }
        w.finish()
    }

    fn skip_frame(mbs: usize) -> Vec<u8> {
        let mut w = BitWriter::new();
        for _ in 0..mbs {
            encode_macroblock(&MacroblockRecord::Skip, &mut w);
        }
        w.finish()
    }

    fn intra_frame(mbs: usize, dc: i32) -> Vec<u8> {
        let mut coeffs = [[0i32; 64]; 6];
        for block in &mut coeffs {
            block[0] = dc;
        }
        let mut w = BitWriter::new();
        for _ in 0..mbs {
            encode_macroblock(&MacroblockRecord::Intra { coeffs: Box::new(coeffs) }, &mut w);
        }
        w.finish()
    }

    fn two_frame_container(i_data: Vec<u8>, p_data: Vec<u8>) -> StegoContainer {
        use crate::formats::{EncodedFrame, FrameType};
        StegoContainer {
            display_w: 32,
            display_h: 16,
            coded_w: 32,
            coded_h: 16,
            fps_num: 25,
            fps_den: 1,
            gop_size: 12,
            qp: 8,
            audio: None,
            frames: vec![
                EncodedFrame { frame_type: FrameType::I, pts: 0, data: i_data },
                EncodedFrame { frame_type: FrameType::P, pts: 1, data: p_data },
            ],
        }
    }

    #[test]
    fn all_zero_intra_frame_reconstructs_to_128() {
        let container = two_frame_container(intra_frame(2, 0), skip_frame(2));
        let video = decode_video(&container, None).unwrap();
        assert_eq!(video.width, 32);
        assert_eq!(video.frames.len(), 2);
        assert!(video.frames[0].y.iter().all(|&s| s == 128));
        assert!(video.frames[0].cb.iter().all(|&s| s == 128));
        assert_eq!(video.frames[1], Frame { pts: 1, ..video.frames[0].clone() });
    }

    #[test]
    fn dc_level_shifts_the_whole_block() {
        // DC level 2 at qp 8 dequantises to 16, and the inverse transform
        // spreads 16 / 8 = 2 onto every sample.
        let container = two_frame_container(intra_frame(2, 2), skip_frame(2));
        let video = decode_video(&container, None).unwrap();
        assert!(video.frames[0].y.iter().all(|&s| s == 130));
        assert!(video.frames[0].cb.iter().all(|&s| s == 130));
        assert!(video.frames[0].cr.iter().all(|&s| s == 130));
    }

    #[test]
    fn inter_macroblock_in_intra_frame_is_corrupt() {
        let container = two_frame_container(empty_inter_frame(2, MotionVector::ZERO), skip_frame(2));
        assert!(matches!(
            decode_video(&container, None),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn truncated_frame_data_is_corrupt_not_truncated() {
        let mut container = two_frame_container(intra_frame(2, 0), skip_frame(2));
        container.frames[0].data.truncate(1);
        let err = decode_video(&container, None).unwrap_err();
        assert!(matches!(err, Error::CorruptContainer(_)), "{err:?}");
    }

    #[test]
    fn whole_trailing_byte_in_frame_data_is_corrupt() {
        let mut container = two_frame_container(intra_frame(2, 0), skip_frame(2));
        container.frames[1].data.push(0);
        assert!(matches!(
            decode_video(&container, None),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn nonzero_padding_bits_are_corrupt() {
        let mut container = two_frame_container(intra_frame(2, 0), skip_frame(2));
        // Two skips are 6 bits; set one of the two padding bits.
        assert_eq!(container.frames[1].data.len(), 1);
        *container.frames[1].data.last_mut().unwrap() |= 0b01;
        assert!(matches!(
            decode_video(&container, None),
            Err(Error::CorruptContainer(_))
        ));
    }

    #[test]
    fn tap_sees_every_macroblock_in_order() {
        struct Recorder(Vec<(usize, usize, MbMode)>);
        impl DecodeTap for Recorder {
            fn macroblock(&mut self, ctx: &MbContext, record: &MacroblockRecord) {
                self.0.push((ctx.frame_index, ctx.mb_index, record.mode()));
            }
        }
        let container = two_frame_container(intra_frame(2, 0), skip_frame(2));
        let mut tap = Recorder(Vec::new());
        decode_video(&container, Some(&mut tap)).unwrap();
        assert_eq!(
            tap.0,
            vec![
                (0, 0, MbMode::Intra),
                (0, 1, MbMode::Intra),
                (1, 0, MbMode::Skip),
                (1, 1, MbMode::Skip),
            ]
        );
    }

    #[test]
    fn inter_vector_shifts_the_reference() {
        let mut coeffs = [[0i32; 64]; 6];
        coeffs[0][1] = 3; // horizontal AC in Y00 makes the frame non-uniform
        let mut w = BitWriter::new();
        encode_macroblock(&MacroblockRecord::Intra { coeffs: Box::new(coeffs) }, &mut w);
        encode_macroblock(&MacroblockRecord::Intra { coeffs: Box::new([[0; 64]; 6]) }, &mut w);
        let i_data = w.finish();
        let p_data = empty_inter_frame(2, MotionVector { dx: -4, dy: 0 });
        let container = two_frame_container(i_data, p_data);
        let video = decode_video(&container, None).unwrap();
        let first = &video.frames[0];
        let second = &video.frames[1];
        // Shift left by one pixel: sample (x) of the new frame equals
        // sample (x - 1) of the old one, clamped at the frame edge.
        for y in 0..16 {
            for x in 0..32 {
                let src_x = (x as i64 - 1).max(0) as usize;
                assert_eq!(second.y[y * 32 + x], first.y[y * 32 + src_x], "at ({x},{y})");
            }
        }
    }
}
