//! Motion-compensated video codec.
//!
//! A deliberately small design: 16x16 macroblocks, full-search integer-pel
//! motion estimation against the previous *reconstructed* frame, an 8x8
//! floating-point DCT with flat quantisation, and exp-Golomb entropy coding.
//! Frames at `pts % gop_size == 0` are coded intra-only; everything else is
//! predicted. The encoder reconstructs each frame exactly as the decoder
//! will, so there is no drift between the two.
//!
//! Steganography attaches through [`EncodeHook`] and [`DecodeTap`]: the
//! encoder offers every inter macroblock's motion vector and transform
//! coefficients for modification after the mode decision but before the
//! residual is computed, which is what keeps embedding lossless; the decoder
//! reports every macroblock it parses.

mod decoder;
mod encoder;
mod entropy;
mod motion;
mod plane;
mod transform;

pub use decoder::decode_video;
pub use encoder::{encode_video, encode_video_with_reconstruction};
pub use entropy::{decode_macroblock, encode_macroblock};
pub use motion::{motion_compensate, motion_estimate, MotionDecision};
pub use plane::{crop_frame, pad_frame, CodedFrame, MbPixels, Plane};
pub use transform::{dct8, dequantise, idct8, quantise, ZIGZAG};

use crate::error::{Error, Result};
pub use crate::formats::FrameType;

/// Macroblock edge length in luma samples.
pub const MB_SIZE: usize = 16;

/// Codec tuning parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecParams {
    /// Distance between intra-only frames; 1 makes every frame an I-frame.
    pub gop_size: u8,
    /// Flat quantiser step applied to every transform coefficient.
    pub qp: u8,
    /// Motion search radius in integer pixels.
    pub search_range: u8,
    /// A macroblock whose best inter SAD exceeds this is coded intra.
    pub intra_sad_threshold: u32,
}

impl Default for CodecParams {
    fn default() -> Self {
        Self {
            gop_size: 12,
            qp: 8,
            search_range: 16,
            // 16 * 16 * 12: an average absolute prediction error of 12 per
            // sample over the block.
            intra_sad_threshold: 3072,
        }
    }
}

impl CodecParams {
    /// Rejects parameter combinations the bitstream cannot express.
    pub fn validate(&self) -> Result<()> {
        if self.gop_size == 0 {
            return Err(Error::Unsupported("gop_size must be >= 1".into()));
        }
        if self.qp == 0 || self.qp > 63 {
            return Err(Error::Unsupported(format!("qp {} out of 1..=63", self.qp)));
        }
        if self.search_range == 0 {
            return Err(Error::Unsupported("search_range must be >= 1".into()));
        }
        Ok(())
    }
}

/// A motion vector in quarter-pel units. The integer-pel search always
/// produces multiples of 4; embedding may flip bit 2 (the integer-pel LSB),
/// which keeps the quarter-pel alignment intact but moves the prediction by
/// one whole pixel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MotionVector {
    pub dx: i32,
    pub dy: i32,
}

impl MotionVector {
    /// The zero vector.
    pub const ZERO: MotionVector = MotionVector { dx: 0, dy: 0 };

    /// Integer-pel displacement actually used for prediction; the two
    /// sub-pel bits are ignored.
    pub fn pel(&self) -> (i32, i32) {
        (self.dx >> 2, self.dy >> 2)
    }
}

/// How a macroblock was coded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MbMode {
    /// Predicted from the previous reconstruction through a motion vector.
    Inter,
    /// Predicted from the constant 128.
    Intra,
    /// Copied from the co-located macroblock; carries no data at all.
    Skip,
}

/// Quantised coefficient levels for the six 8x8 blocks of one macroblock,
/// in coding order Y00, Y01, Y10, Y11, Cb, Cr. Samples within each block are
/// in raster order; the entropy layer applies the zigzag scan.
pub type CoeffBlocks = [[i32; 64]; 6];

/// Unquantised DCT coefficients in the same layout as [`CoeffBlocks`].
pub type RawCoeffBlocks = [[f64; 64]; 6];

/// One parsed or to-be-coded macroblock. The variants make the structural
/// rules unrepresentable to violate: only inter macroblocks carry a motion
/// vector, skip macroblocks carry nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MacroblockRecord {
    Skip,
    Intra { coeffs: Box<CoeffBlocks> },
    Inter { mv: MotionVector, coeffs: Box<CoeffBlocks> },
}

impl MacroblockRecord {
    pub fn mode(&self) -> MbMode {
        match self {
            MacroblockRecord::Skip => MbMode::Skip,
            MacroblockRecord::Intra { .. } => MbMode::Intra,
            MacroblockRecord::Inter { .. } => MbMode::Inter,
        }
    }

    pub fn motion_vector(&self) -> Option<MotionVector> {
        match self {
            MacroblockRecord::Inter { mv, .. } => Some(*mv),
            _ => None,
        }
    }

    pub fn coeffs(&self) -> Option<&CoeffBlocks> {
        match self {
            MacroblockRecord::Skip => None,
            MacroblockRecord::Intra { coeffs } => Some(coeffs),
            MacroblockRecord::Inter { coeffs, .. } => Some(coeffs),
        }
    }
}

/// Position of the macroblock currently passing through a hook or tap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MbContext {
    /// Index of the frame in coded order.
    pub frame_index: usize,
    pub frame_type: FrameType,
    /// Raster index of the macroblock within its frame.
    pub mb_index: usize,
}

/// Encoder-side modification points. Every method is invoked only for inter
/// macroblocks that survived the skip decision, in raster order within each
/// predicted frame; intra and skip macroblocks never reach a hook. Call
/// order per macroblock: [`Self::motion_vector`], then
/// [`Self::dct_coefficients`] on the raw transform of the residual against
/// the (possibly modified) prediction, then [`Self::quantised_levels`] on
/// the quantiser output that will be entropy-coded and used for
/// reconstruction.
pub trait EncodeHook {
    /// May replace the estimated motion vector. The result must stay within
    /// one pixel beyond the search range.
    fn motion_vector(&mut self, ctx: &MbContext, mv: MotionVector) -> MotionVector {
        let _ = ctx;
        mv
    }

    /// May rewrite raw DCT coefficients before quantisation. Anything
    /// written here is subject to the quantiser's rounding.
    fn dct_coefficients(&mut self, ctx: &MbContext, blocks: &mut RawCoeffBlocks) {
        let _ = (ctx, blocks);
    }

    /// May rewrite quantised levels after quantisation; these survive
    /// losslessly into the bitstream. A level must not be set to zero if it
    /// is meant to remain recoverable, since zeros are not coded.
    fn quantised_levels(&mut self, ctx: &MbContext, blocks: &mut CoeffBlocks) {
        let _ = (ctx, blocks);
    }
}

/// An [`EncodeHook`] that changes nothing: plain transcoding.
#[derive(Debug, Default)]
pub struct IdentityHook;

impl EncodeHook for IdentityHook {}

/// Decoder-side observation point: called once per macroblock, in raster
/// order within each frame, for every frame and every mode. This is the
/// extraction surface.
pub trait DecodeTap {
    fn macroblock(&mut self, ctx: &MbContext, record: &MacroblockRecord);
}

/// Splits a coded frame into macroblock origins, top-left corners in raster
/// order. Dimensions must be nonzero multiples of 16.
pub fn partition(coded_w: u32, coded_h: u32) -> Result<Vec<(usize, usize)>> {
    if coded_w == 0
        || coded_h == 0
        || coded_w % MB_SIZE as u32 != 0
        || coded_h % MB_SIZE as u32 != 0
    {
        return Err(Error::InvalidDims(format!(
            "{coded_w}x{coded_h} is not a nonzero multiple of {MB_SIZE}"
        )));
    }
    let mut origins = Vec::with_capacity((coded_w / 16) as usize * (coded_h / 16) as usize);
    for my in (0..coded_h as usize).step_by(MB_SIZE) {
        for mx in (0..coded_w as usize).step_by(MB_SIZE) {
            origins.push((mx, my));
        }
    }
    Ok(origins)
}

/// Rounds a display dimension up to the coded multiple of 16.
pub fn coded_dim(display: u32) -> u32 {
    display.div_ceil(16) * 16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_match_hand_arithmetic() {
        assert_eq!(partition(1920, 1088).unwrap().len(), 8160);
        assert_eq!(partition(320, 240).unwrap().len(), 300);
        let single = partition(16, 16).unwrap();
        assert_eq!(single, vec![(0, 0)]);
    }

    #[test]
    fn partition_is_raster_ordered() {
        let origins = partition(48, 32).unwrap();
        assert_eq!(
            origins,
            vec![(0, 0), (16, 0), (32, 0), (0, 16), (16, 16), (32, 16)]
        );
    }

    #[test]
    fn partition_rejects_unaligned_dims() {
        assert!(matches!(partition(100, 100), Err(Error::InvalidDims(_))));
        assert!(matches!(partition(0, 16), Err(Error::InvalidDims(_))));
    }

    #[test]
    fn coded_dim_rounds_up_to_16() {
        assert_eq!(coded_dim(1080), 1088);
        assert_eq!(coded_dim(1920), 1920);
        assert_eq!(coded_dim(1), 16);
    }

    #[test]
    fn default_params_are_valid() {
        let p = CodecParams::default();
        assert_eq!((p.gop_size, p.qp, p.search_range), (12, 8, 16));
        assert_eq!(p.intra_sad_threshold, 3072);
        p.validate().unwrap();
    }

    #[test]
    fn out_of_range_params_are_rejected() {
        for bad in [
            CodecParams { gop_size: 0, ..Default::default() },
            CodecParams { qp: 0, ..Default::default() },
            CodecParams { qp: 64, ..Default::default() },
            CodecParams { search_range: 0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn pel_displacement_ignores_subpel_bits() {
        assert_eq!(MotionVector { dx: 16, dy: -20 }.pel(), (4, -5));
        assert_eq!(MotionVector { dx: 0, dy: 0 }.pel(), (0, 0));
    }
}
