//! Embedding payloads in coded video.
//!
//! The embedding channel is the motion vector stream: payload bits ride in
//! bit 2 of a vector component, the integer-pel least significant bit of
//! the quarter-pel value, so each written bit moves a prediction by at
//! most one pixel. Because the residual is computed against the modified
//! prediction, the decoder reproduces the frame faithfully and the change
//! is visually invisible. A coefficient mode embeds in the least
//! significant bit of quantised AC levels instead, plus a deliberately
//! broken pre-quantisation variant that demonstrates why embedding must
//! happen after the lossy step.
//!
//! Payloads are framed (magic, mode, length, optional nonce, checksum)
//! and the extractor finds the mode by trial: it collects all five
//! candidate bit streams in one decode and accepts the one whose frame
//! validates.

use crate::codec::{
    decode_macroblock, decode_video, encode_macroblock, encode_video, CodecParams, CoeffBlocks,
    DecodeTap, EncodeHook, MacroblockRecord, MbContext, MotionVector, RawCoeffBlocks, ZIGZAG,
};
use crate::crypto::{ctr_transform, SymmetricKey};
use crate::error::{Error, Result};
use crate::formats::{BitReader, BitWriter, RawVideo, StegoContainer};

/// Where payload bits live in the coded stream.
///
/// The first-macroblock modes write one bit per predicted frame into its
/// first inter macroblock; the all-macroblock modes use every inter
/// macroblock; the coefficient mode uses quantised AC levels instead of
/// motion vectors. Skip and intra macroblocks are never touched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbedMode {
    FirstMbX,
    FirstMbY,
    AllMbX,
    AllMbY,
    Coeff,
}

impl EmbedMode {
    /// All modes, in wire-value order; also the extractor's trial order.
    pub const ALL: [EmbedMode; 5] = [
        EmbedMode::FirstMbX,
        EmbedMode::FirstMbY,
        EmbedMode::AllMbX,
        EmbedMode::AllMbY,
        EmbedMode::Coeff,
    ];

    pub fn wire(self) -> u8 {
        match self {
            EmbedMode::FirstMbX => 0,
            EmbedMode::FirstMbY => 1,
            EmbedMode::AllMbX => 2,
            EmbedMode::AllMbY => 3,
            EmbedMode::Coeff => 4,
        }
    }

    pub fn from_wire(v: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.wire() == v)
    }

    fn uses_x(self) -> bool {
        matches!(self, EmbedMode::FirstMbX | EmbedMode::AllMbX)
    }

    fn first_only(self) -> bool {
        matches!(self, EmbedMode::FirstMbX | EmbedMode::FirstMbY)
    }
}

/// A parsed payload frame. When `encrypted` is set, `body` holds the
/// ciphertext and `crc` covers the plaintext, so the checksum can only be
/// verified after decryption.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadFrame {
    pub mode: EmbedMode,
    pub encrypted: bool,
    pub nonce: Option<[u8; 16]>,
    pub body: Vec<u8>,
    pub crc: u32,
}

const PAYLOAD_MAGIC: [u8; 2] = [0x53, 0x54];
const PAYLOAD_VERSION: u8 = 1;
const FLAG_ENCRYPTED: u8 = 0x01;

/// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320).
fn crc32(data: &[u8]) -> u32 {
    let mut crc = 0xffff_ffffu32;
    for &b in data {
        crc ^= b as u32;
        for _ in 0..8 {
            let mask = (crc & 1).wrapping_neg();
            crc = (crc >> 1) ^ (0xedb8_8320 & mask);
        }
    }
    !crc
}

fn bytes_to_bits(bytes: &[u8]) -> Vec<bool> {
    let mut bits = Vec::with_capacity(bytes.len() * 8);
    for &b in bytes {
        for shift in (0..8).rev() {
            bits.push(b >> shift & 1 == 1);
        }
    }
    bits
}

/// Serializes a payload into the bit sequence that embedding writes:
/// magic, version, flags, mode, body length, nonce when encrypting, body
/// (encrypted in place when a key is given) and a checksum of the
/// plaintext body. Bytes are emitted most significant bit first.
pub fn frame_payload(
    body: &[u8],
    mode: EmbedMode,
    encryption: Option<(&SymmetricKey, [u8; 16])>,
) -> Result<Vec<bool>> {
    if body.len() > u32::MAX as usize {
        return Err(Error::Unsupported(format!(
            "{}-byte payload exceeds the 32-bit length field",
            body.len()
        )));
    }
    let crc = crc32(body);
    let mut bytes = Vec::with_capacity(13 + 16 + body.len());
    bytes.extend_from_slice(&PAYLOAD_MAGIC);
    bytes.push(PAYLOAD_VERSION);
    bytes.push(if encryption.is_some() { FLAG_ENCRYPTED } else { 0 });
    bytes.push(mode.wire());
    bytes.extend_from_slice(&(body.len() as u32).to_be_bytes());
    match encryption {
        Some((key, nonce)) => {
            bytes.extend_from_slice(&nonce);
            bytes.extend_from_slice(&ctr_transform(key, &nonce, body));
        }
        None => bytes.extend_from_slice(body),
    }
    bytes.extend_from_slice(&crc.to_be_bytes());
    Ok(bytes_to_bits(&bytes))
}

struct BitCursor<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitCursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [bool]> {
        if self.pos + n > self.bits.len() {
            return Err(Error::CorruptPayload);
        }
        let s = &self.bits[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn byte(&mut self) -> Result<u8> {
        Ok(self.take(8)?.iter().fold(0, |acc, &b| acc << 1 | b as u8))
    }

    fn bytes(&mut self, n: usize) -> Result<Vec<u8>> {
        (0..n).map(|_| self.byte()).collect()
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.bytes(4)?.try_into().unwrap()))
    }
}

/// Parses a payload frame from the front of a candidate bit stream,
/// ignoring whatever follows the framed length. The checksum is verified
/// here for plaintext payloads; encrypted bodies are returned as stored,
/// to be checked against `crc` after decryption.
pub fn parse_payload(bits: &[bool]) -> Result<PayloadFrame> {
    let mut c = BitCursor { bits, pos: 0 };
    if bits.len() < 104 || c.bytes(2)? != PAYLOAD_MAGIC {
        return Err(Error::NoPayloadFound);
    }
    if c.byte()? != PAYLOAD_VERSION {
        return Err(Error::CorruptPayload);
    }
    let flags = c.byte()?;
    if flags & !FLAG_ENCRYPTED != 0 {
        return Err(Error::CorruptPayload);
    }
    let encrypted = flags & FLAG_ENCRYPTED != 0;
    let mode = EmbedMode::from_wire(c.byte()?).ok_or(Error::CorruptPayload)?;
    let length = c.u32()? as usize;
    let nonce = if encrypted {
        Some(c.bytes(16)?.try_into().expect("sixteen bytes were read"))
    } else {
        None
    };
    let body = c.bytes(length)?;
    let crc = c.u32()?;
    if !encrypted && crc32(&body) != crc {
        return Err(Error::CorruptPayload);
    }
    Ok(PayloadFrame { mode, encrypted, nonce, body, crc })
}

/// Writes a payload bit into bit 2 of a motion vector component,
/// preserving the sign and acting on the magnitude, so extraction is a
/// pure function of the absolute value. A zero component becomes +4 when
/// the bit is set. The perturbation is at most one integer pel.
pub fn mv_embed_bit(component: i32, bit: bool) -> i32 {
    let magnitude = ((component.unsigned_abs() & !4) | (bit as u32) << 2) as i32;
    if component < 0 {
        -magnitude
    } else {
        magnitude
    }
}

/// Reads the payload bit back out of a motion vector component.
pub fn mv_extract_bit(component: i32) -> bool {
    component.unsigned_abs() >> 2 & 1 == 1
}

/// Rewrites a quantised level so its magnitude's least significant bit is
/// `bit`, preserving sign and never producing zero (zero levels are not
/// entropy-coded, so the slot would vanish).
fn coeff_embed_level(level: i32, bit: bool) -> i32 {
    let mut magnitude = (level.unsigned_abs() & !1) | bit as u32;
    if magnitude == 0 {
        magnitude = 2;
    }
    if level < 0 {
        -(magnitude as i32)
    } else {
        magnitude as i32
    }
}

/// Zigzag position of the first nonzero AC level in a block, if any.
fn first_nonzero_ac(block: &[i32; 64]) -> Option<usize> {
    (1..64).find(|&pos| block[ZIGZAG[pos]] != 0)
}

fn coeff_extract_bit(coeffs: &CoeffBlocks) -> Option<bool> {
    first_nonzero_ac(&coeffs[0]).map(|pos| coeffs[0][ZIGZAG[pos]].unsigned_abs() & 1 == 1)
}

/// Streams payload bits into eligible macroblocks during an encode. One
/// struct serves all five modes; the fields that do not apply to a mode
/// stay inert.
struct EmbedSink<'a> {
    bits: &'a [bool],
    placed: usize,
    mode: EmbedMode,
    pre_quant: bool,
    /// Frame that already consumed its bit, for the first-macroblock modes.
    frame_done: Option<usize>,
}

impl<'a> EmbedSink<'a> {
    fn new(bits: &'a [bool], mode: EmbedMode, pre_quant: bool) -> Self {
        Self { bits, placed: 0, mode, pre_quant, frame_done: None }
    }

    /// The next bit for this slot, unless the payload is exhausted or the
    /// frame already took its bit in a first-macroblock mode.
    fn claim(&mut self, ctx: &MbContext) -> Option<bool> {
        if self.placed >= self.bits.len() {
            return None;
        }
        if self.mode.first_only() && self.frame_done == Some(ctx.frame_index) {
            return None;
        }
        let bit = self.bits[self.placed];
        self.placed += 1;
        self.frame_done = Some(ctx.frame_index);
        Some(bit)
    }

    fn unplaced(&self) -> Option<Error> {
        (self.placed < self.bits.len()).then(|| Error::InsufficientCapacity {
            placed: self.placed as u64,
            required: self.bits.len() as u64,
        })
    }
}

impl EncodeHook for EmbedSink<'_> {
    fn motion_vector(&mut self, ctx: &MbContext, mv: MotionVector) -> MotionVector {
        if self.mode == EmbedMode::Coeff {
            return mv;
        }
        match self.claim(ctx) {
            None => mv,
            Some(bit) if self.mode.uses_x() => {
                MotionVector { dx: mv_embed_bit(mv.dx, bit), dy: mv.dy }
            }
            Some(bit) => MotionVector { dx: mv.dx, dy: mv_embed_bit(mv.dy, bit) },
        }
    }

    fn dct_coefficients(&mut self, ctx: &MbContext, blocks: &mut RawCoeffBlocks) {
        if self.mode != EmbedMode::Coeff || !self.pre_quant {
            return;
        }
        // The demonstration of embedding before the lossy step: write the
        // bit into the integer part of the first live AC coefficient. The
        // quantiser then divides and rounds, destroying most of the bits.
        let slot = (1..64).find(|&pos| blocks[0][ZIGZAG[pos]].round() != 0.0);
        let Some(pos) = slot else { return };
        let Some(bit) = self.claim(ctx) else { return };
        let rounded = blocks[0][ZIGZAG[pos]].round() as i64;
        let mut magnitude = (rounded.unsigned_abs() & !1) | bit as u64;
        if magnitude == 0 {
            magnitude = 2;
        }
        blocks[0][ZIGZAG[pos]] =
            if rounded < 0 { -(magnitude as f64) } else { magnitude as f64 };
    }

    fn quantised_levels(&mut self, ctx: &MbContext, blocks: &mut CoeffBlocks) {
        if self.mode != EmbedMode::Coeff || self.pre_quant {
            return;
        }
        let Some(pos) = first_nonzero_ac(&blocks[0]) else { return };
        let Some(bit) = self.claim(ctx) else { return };
        blocks[0][ZIGZAG[pos]] = coeff_embed_level(blocks[0][ZIGZAG[pos]], bit);
    }
}

/// Encodes `video` with `payload` framed and embedded in the chosen mode.
/// With `encryption`, the body is AES-CTR encrypted under the key and
/// nonce before framing. Fails with [`Error::InsufficientCapacity`] when
/// the video has fewer eligible slots than the framed payload has bits.
pub fn embed(
    video: &RawVideo,
    payload: &[u8],
    mode: EmbedMode,
    params: &CodecParams,
    encryption: Option<(&SymmetricKey, [u8; 16])>,
) -> Result<StegoContainer> {
    let bits = frame_payload(payload, mode, encryption)?;
    let mut sink = EmbedSink::new(&bits, mode, false);
    let container = encode_video(video, params, &mut sink)?;
    match sink.unplaced() {
        Some(e) => Err(e),
        None => Ok(container),
    }
}

/// Coefficient-mode embedding with an explicit choice of when the bit is
/// written. `pre_quant = false` is the real channel, identical to
/// [`embed`] with [`EmbedMode::Coeff`]. `pre_quant = true` writes into
/// the raw transform coefficients before quantisation; at typical
/// quantiser strengths the rounding then destroys the payload, which is
/// exactly the failure this flag exists to reproduce. Extraction from a
/// pre-quantisation embed is expected to return garbage.
pub fn embed_coeff(
    video: &RawVideo,
    payload: &[u8],
    params: &CodecParams,
    pre_quant: bool,
) -> Result<StegoContainer> {
    if !pre_quant {
        return embed(video, payload, EmbedMode::Coeff, params, None);
    }
    let bits = frame_payload(payload, EmbedMode::Coeff, None)?;
    let mut sink = EmbedSink::new(&bits, EmbedMode::Coeff, true);
    let container = encode_video(video, params, &mut sink)?;
    match sink.unplaced() {
        Some(e) => Err(e),
        None => Ok(container),
    }
}

/// Collects the candidate bit stream of every mode in a single decode.
#[derive(Default)]
struct StreamCollector {
    streams: [Vec<bool>; 5],
    frame_done: Option<usize>,
}

impl DecodeTap for StreamCollector {
    fn macroblock(&mut self, ctx: &MbContext, record: &MacroblockRecord) {
        if let Some(mv) = record.motion_vector() {
            self.streams[EmbedMode::AllMbX.wire() as usize].push(mv_extract_bit(mv.dx));
            self.streams[EmbedMode::AllMbY.wire() as usize].push(mv_extract_bit(mv.dy));
            if self.frame_done != Some(ctx.frame_index) {
                self.frame_done = Some(ctx.frame_index);
                self.streams[EmbedMode::FirstMbX.wire() as usize].push(mv_extract_bit(mv.dx));
                self.streams[EmbedMode::FirstMbY.wire() as usize].push(mv_extract_bit(mv.dy));
            }
        }
        if let MacroblockRecord::Inter { coeffs, .. } = record {
            if let Some(bit) = coeff_extract_bit(coeffs) {
                self.streams[EmbedMode::Coeff.wire() as usize].push(bit);
            }
        }
    }
}

/// Recovers an embedded payload, trying each mode's bit stream in wire
/// order and returning the body of the first frame that validates: magic,
/// version, a mode field matching the stream it was read from, and a
/// checksum match, after decryption when the frame calls for it.
pub fn extract(container: &StegoContainer, key: Option<&SymmetricKey>) -> Result<Vec<u8>> {
    let mut collector = StreamCollector::default();
    decode_video(container, Some(&mut collector))?;

    let mut strongest = Error::NoPayloadFound;
    for mode in EmbedMode::ALL {
        let frame = match parse_payload(&collector.streams[mode.wire() as usize]) {
            Ok(frame) => frame,
            Err(e) => {
                strongest = stronger(strongest, e);
                continue;
            }
        };
        if frame.mode != mode {
            continue;
        }
        if !frame.encrypted {
            return Ok(frame.body);
        }
        let Some(key) = key else {
            strongest = stronger(strongest, Error::KeyRequired);
            continue;
        };
        let nonce = frame.nonce.expect("encrypted frames carry a nonce");
        let plaintext = ctr_transform(key, &nonce, &frame.body);
        if crc32(&plaintext) == frame.crc {
            return Ok(plaintext);
        }
        strongest = stronger(strongest, Error::CorruptPayload);
    }
    Err(strongest)
}

/// Error precedence for the extraction trials: a mode that found a frame
/// but needed a key outranks one that found a broken frame, which
/// outranks finding nothing.
fn stronger(a: Error, b: Error) -> Error {
    fn rank(e: &Error) -> u8 {
        match e {
            Error::KeyRequired => 2,
            Error::CorruptPayload => 1,
            _ => 0,
        }
    }
    if rank(&b) > rank(&a) {
        b
    } else {
        a
    }
}

/// Capacity estimate for one mode. `caveat` is always true: the counting
/// pass runs without embedding, and writing real bits perturbs motion
/// vectors, hence reference frames, hence later mode decisions, so the
/// true capacity can differ in both directions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CapacityReport {
    pub mode: EmbedMode,
    pub estimated_bits: u64,
    pub per_frame_bits: Vec<u64>,
    pub caveat: bool,
}

struct SlotCounter {
    mode: EmbedMode,
    per_frame: Vec<u64>,
    frame_done: Option<usize>,
}

impl SlotCounter {
    fn count(&mut self, ctx: &MbContext) {
        if self.mode.first_only() {
            if self.frame_done == Some(ctx.frame_index) {
                return;
            }
            self.frame_done = Some(ctx.frame_index);
        }
        self.per_frame[ctx.frame_index] += 1;
    }
}

impl EncodeHook for SlotCounter {
    fn motion_vector(&mut self, ctx: &MbContext, mv: MotionVector) -> MotionVector {
        if self.mode != EmbedMode::Coeff {
            self.count(ctx);
        }
        mv
    }

    fn quantised_levels(&mut self, ctx: &MbContext, blocks: &mut CoeffBlocks) {
        if self.mode == EmbedMode::Coeff && first_nonzero_ac(&blocks[0]).is_some() {
            self.count(ctx);
        }
    }
}

/// Counts the bits `mode` could place in `video` by running the encoder
/// with a counting hook that embeds nothing.
pub fn estimate_capacity(
    video: &RawVideo,
    params: &CodecParams,
    mode: EmbedMode,
) -> Result<CapacityReport> {
    let mut counter = SlotCounter {
        mode,
        per_frame: vec![0; video.frames.len()],
        frame_done: None,
    };
    encode_video(video, params, &mut counter)?;
    Ok(CapacityReport {
        mode,
        estimated_bits: counter.per_frame.iter().sum(),
        per_frame_bits: counter.per_frame,
        caveat: true,
    })
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

/// Negates both components of every inter motion vector, leaving modes and
/// residuals untouched. The output still decodes cleanly, but every
/// prediction now comes from the mirrored displacement while the residuals
/// correct for the original one, so motion areas corrupt visibly. Applying
/// it twice restores the container byte for byte.
pub fn invert_motion_vectors(container: &StegoContainer) -> Result<StegoContainer> {
    container.validate()?;
    let mbs = container.macroblocks_per_frame();
    let mut out = container.clone();
    for frame in &mut out.frames {
        let mut r = BitReader::new(&frame.data);
        let mut w = BitWriter::new();
        for _ in 0..mbs {
            let mut record = decode_macroblock(&mut r).map_err(corrupt_frame_data)?;
            if let MacroblockRecord::Inter { mv, .. } = &mut record {
                mv.dx = -mv.dx;
                mv.dy = -mv.dy;
            }
            encode_macroblock(&record, &mut w);
        }
        frame.data = w.finish();
    }
    Ok(out)
}
