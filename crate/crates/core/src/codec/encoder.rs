//! Frame encoding: mode decisions, the transform pipeline and hook
//! dispatch.

use crate::error::{Error, Result};
use crate::formats::{BitWriter, EncodedFrame, FrameType, RawVideo, StegoContainer};

use super::decoder::{block_sample, reconstruct_macroblock};
use super::entropy::encode_macroblock;
use super::motion::{motion_compensate, motion_estimate};
use super::plane::{crop_frame, pad_frame, CodedFrame, MbPixels};
use super::transform::{dct8, quantise};
use super::{
    coded_dim, partition, CodecParams, CoeffBlocks, EncodeHook, MacroblockRecord, MbContext,
    MbMode, MotionVector, RawCoeffBlocks,
};

fn transform_residual(cur: &MbPixels, pred: &MbPixels) -> RawCoeffBlocks {
    let mut out = [[0.0f64; 64]; 6];
    for (block, coeffs) in out.iter_mut().enumerate() {
        let mut residual = [[0.0f64; 8]; 8];
        for (r, row) in residual.iter_mut().enumerate() {
            for (c, v) in row.iter_mut().enumerate() {
                *v = block_sample(cur, block, r, c) as f64
                    - block_sample(pred, block, r, c) as f64;
            }
        }
        let freq = dct8(&residual);
        for r in 0..8 {
            coeffs[r * 8..r * 8 + 8].copy_from_slice(&freq[r]);
        }
    }
    out
}

fn quantise_blocks(raw: &RawCoeffBlocks, qp: u8) -> CoeffBlocks {
    let mut out = [[0i32; 64]; 6];
    for (levels, coeffs) in out.iter_mut().zip(raw) {
        for (l, &c) in levels.iter_mut().zip(coeffs) {
            *l = quantise(c, qp);
        }
    }
    out
}

fn intra_record(cur: &MbPixels, qp: u8) -> MacroblockRecord {
    let raw = transform_residual(cur, &MbPixels::filled(128));
    MacroblockRecord::Intra { coeffs: Box::new(quantise_blocks(&raw, qp)) }
}

fn checked_hook_mv(mv: MotionVector, params: &CodecParams) -> Result<MotionVector> {
    let max_abs = 4 * (params.search_range as i32 + 1);
    if mv.dx.abs() > max_abs || mv.dy.abs() > max_abs {
        return Err(Error::HookRange { dx: mv.dx, dy: mv.dy, max_abs });
    }
    Ok(mv)
}

fn inter_record(
    src: &CodedFrame,
    reference: &CodedFrame,
    origin: (usize, usize),
    params: &CodecParams,
    hook: &mut dyn EncodeHook,
    ctx: &MbContext,
) -> Result<MacroblockRecord> {
    let decision = motion_estimate(&src.y, &reference.y, origin, params);
    let cur = MbPixels::read_from(src, origin);
    if decision.mode == MbMode::Intra {
        return Ok(intra_record(&cur, params.qp));
    }

    // The skip decision comes before any hook: a zero estimated vector
    // whose residual quantises away is coded as skip and never offered for
    // embedding.
    let probed = if decision.mv == MotionVector::ZERO {
        let pred = motion_compensate(reference, decision.mv, origin);
        let raw = transform_residual(&cur, &pred);
        let levels = quantise_blocks(&raw, params.qp);
        if levels.iter().all(|block| block.iter().all(|&l| l == 0)) {
            return Ok(MacroblockRecord::Skip);
        }
        Some(raw)
    } else {
        None
    };

    let mv = checked_hook_mv(hook.motion_vector(ctx, decision.mv), params)?;
    let mut raw = match probed {
        Some(raw) if mv == decision.mv => raw,
        _ => {
            let pred = motion_compensate(reference, mv, origin);
            transform_residual(&cur, &pred)
        }
    };
    hook.dct_coefficients(ctx, &mut raw);
    let mut levels = quantise_blocks(&raw, params.qp);
    hook.quantised_levels(ctx, &mut levels);
    Ok(MacroblockRecord::Inter { mv, coeffs: Box::new(levels) })
}

fn encode_impl(
    video: &RawVideo,
    params: &CodecParams,
    hook: &mut dyn EncodeHook,
    keep_reconstruction: bool,
) -> Result<(StegoContainer, Option<RawVideo>)> {
    params.validate()?;
    video.validate()?;
    let coded_w = coded_dim(video.width);
    let coded_h = coded_dim(video.height);
    if coded_w > u16::MAX as u32
        || coded_h > u16::MAX as u32
        || video.fps_num > u16::MAX as u32
        || video.fps_den > u16::MAX as u32
    {
        return Err(Error::Unsupported(format!(
            "{}x{} at {}/{} fps does not fit the container's 16-bit header fields",
            video.width, video.height, video.fps_num, video.fps_den
        )));
    }
    let first_pts = video.frames[0].pts;
    if first_pts % params.gop_size as u32 != 0 {
        return Err(Error::Unsupported(format!(
            "first frame pts {first_pts} is not on a group-of-pictures boundary"
        )));
    }

    let origins = partition(coded_w, coded_h)?;
    let display = (video.width, video.height);
    let mut reference: Option<CodedFrame> = None;
    let mut frames = Vec::with_capacity(video.frames.len());
    let mut reconstruction = keep_reconstruction.then(Vec::new);

    for (frame_index, frame) in video.frames.iter().enumerate() {
        let frame_type = if frame.pts % params.gop_size as u32 == 0 {
            FrameType::I
        } else {
            FrameType::P
        };
        let src = pad_frame(frame, display, (coded_w, coded_h))?;
        let mut recon = CodedFrame::filled(coded_w as usize, coded_h as usize, 0);
        let mut w = BitWriter::new();
        for (mb_index, &origin) in origins.iter().enumerate() {
            let ctx = MbContext { frame_index, frame_type, mb_index };
            let record = match frame_type {
                FrameType::I => intra_record(&MbPixels::read_from(&src, origin), params.qp),
                FrameType::P => {
                    let reference =
                        reference.as_ref().expect("a predicted frame always has a reference");
                    inter_record(&src, reference, origin, params, hook, &ctx)?
                }
            };
            encode_macroblock(&record, &mut w);
            reconstruct_macroblock(&record, reference.as_ref(), origin, params.qp, &mut recon);
        }
        frames.push(EncodedFrame { frame_type, pts: frame.pts, data: w.finish() });
        if let Some(v) = &mut reconstruction {
            v.push(crop_frame(&recon, display, frame.pts));
        }
        reference = Some(recon);
    }

    let container = StegoContainer {
        display_w: video.width as u16,
        display_h: video.height as u16,
        coded_w: coded_w as u16,
        coded_h: coded_h as u16,
        fps_num: video.fps_num as u16,
        fps_den: video.fps_den as u16,
        gop_size: params.gop_size,
        qp: params.qp,
        audio: None,
        frames,
    };
    container.validate()?;
    let reconstruction = reconstruction.map(|frames| RawVideo {
        width: video.width,
        height: video.height,
        fps_num: video.fps_num,
        fps_den: video.fps_den,
        frames,
    });
    Ok((container, reconstruction))
}

/// Encodes raw video into a container, passing every inter macroblock that
/// was not skipped through `hook`. Frames whose pts falls on a
/// group-of-pictures boundary are coded intra; the first frame must be one
/// of them.
pub fn encode_video(
    video: &RawVideo,
    params: &CodecParams,
    hook: &mut dyn EncodeHook,
) -> Result<StegoContainer> {
    Ok(encode_impl(video, params, hook, false)?.0)
}

/// Like [`encode_video`], and also returns the encoder's own
/// reconstruction, which is bit-identical to what [`super::decode_video`]
/// produces from the container.
pub fn encode_video_with_reconstruction(
    video: &RawVideo,
    params: &CodecParams,
    hook: &mut dyn EncodeHook,
) -> Result<(StegoContainer, RawVideo)> {
    let (container, recon) = encode_impl(video, params, hook, true)?;
    Ok((container, recon.expect("reconstruction was requested")))
}
