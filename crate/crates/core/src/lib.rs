//! Video steganography toolkit built around a small motion-compensated
//! codec.
//!
//! The pipeline: raw 4:2:0 video ([`formats::y4m`]) is transcoded by
//! [`codec`] into a custom coded container ([`formats::container`]). During
//! encoding, hooks expose each inter-predicted macroblock's motion vector
//! and transform coefficients; [`stego_video`] uses them to hide payload
//! bits, and a decoder-side tap recovers them. [`crypto`] supplies AES-CTR
//! for payload confidentiality, [`stego_lsb`] covers the classic byte-stream
//! techniques (LSB substitution, end-of-file injection), and [`analysis`]
//! holds the steganalysis counterparts: LSB histograms, a chi-square
//! uniformity test, PSNR, and motion-vector comparison.

pub mod analysis;
pub mod codec;
pub mod crypto;
pub mod error;
pub mod formats;
pub mod stego_lsb;
pub mod stego_video;
pub mod synth;

pub use error::{Error, Result};
pub use formats::{Frame, RawVideo, StegoContainer};
