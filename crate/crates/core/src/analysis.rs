//! Steganalysis and quality measurement.
//!
//! Everything here is a pure function over bytes, frames or containers:
//! LSB stream extraction and byte histograms with a chi-square uniformity
//! statistic for detecting plaintext payloads, PSNR for quantifying how
//! much an embedding or a corruption changed the picture, and a
//! motion-vector diff for comparing two encodes of the same source.
//! Reports that are meant for plotting are emitted as CSV.

use crate::codec::{decode_macroblock, MbMode};
use crate::error::{Error, Result};
use crate::formats::{BitReader, Frame, RawVideo, StegoContainer};

/// Packs the least significant bit of each cover byte into output bytes,
/// most significant bit first. A trailing group of fewer than eight cover
/// bytes is dropped, so the result holds `cover.len() / 8` bytes.
pub fn lsb_stream_bytes(cover: &[u8]) -> Vec<u8> {
    cover
        .chunks_exact(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| acc << 1 | b & 1))
        .collect()
}

/// Occurrence counts for every byte value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    pub counts: [u64; 256],
}

impl Default for Histogram256 {
    fn default() -> Self {
        Self { counts: [0; 256] }
    }
}

impl Histogram256 {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// CSV with a `value,count` header and one row per byte value, 256
    /// rows in ascending value order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (value, count) in self.counts.iter().enumerate() {
            out.push_str(&format!("{value},{count}\n"));
        }
        out
    }

    /// Parses the CSV form back. Every byte value must appear exactly
    /// once; the header row is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut counts = [0u64; 256];
        let mut seen = [false; 256];
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line == "value,count" {
                continue;
            }
            let (value, count) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("histogram row without a comma: {line}")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad histogram value: {value}")))?;
            if value > 255 {
                return Err(Error::Parse(format!("histogram value out of range: {value}")));
            }
            if seen[value] {
                return Err(Error::Parse(format!("duplicate histogram value: {value}")));
            }
            seen[value] = true;
            counts[value] = count
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad histogram count: {count}")))?;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::Parse(format!("histogram value missing: {missing}")));
        }
        Ok(Self { counts })
    }
}

/// Counts byte values. The name reflects its main use: fed with an LSB
/// stream, the histogram exposes ASCII structure when the embedded
/// payload was plaintext.
pub fn ascii_histogram(bytes: &[u8]) -> Histogram256 {
    let mut h = Histogram256::default();
    for &b in bytes {
        h.counts[b as usize] += 1;
    }
    h
}

/// Chi-square statistic of the histogram against the uniform distribution
/// over all 256 byte values: the sum of (observed - expected)^2 / expected
/// with expected = total / 256. Zero for perfectly uniform counts, and
/// 255 times the total when all mass sits on a single value.
pub fn chi_square_uniform(h: &Histogram256) -> Result<f64> {
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let expected = total as f64 / 256.0;
    Ok(h.counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum())
}

/// Peak signal-to-noise ratio per plane, in decibels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePsnr {
    pub y: f64,
    pub cb: f64,
    pub cr: f64,
}

fn sum_squared_error(a: &[u8], b: &[u8]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| {
            let d = x as f64 - y as f64;
            d * d
        })
        .sum()
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (255.0 * 255.0 / mse).log10()
    }
}

/// PSNR between two frames, one value per plane: 10 log10(255^2 / MSE),
/// with infinity as the sentinel for identical planes.
pub fn psnr(a: &Frame, b: &Frame) -> Result<PlanePsnr> {
    if a.y.len() != b.y.len() || a.cb.len() != b.cb.len() || a.cr.len() != b.cr.len() {
        return Err(Error::InvalidDims("frames have different plane sizes".into()));
    }
    if a.y.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(PlanePsnr {
        y: psnr_from_mse(sum_squared_error(&a.y, &b.y) / a.y.len() as f64),
        cb: psnr_from_mse(sum_squared_error(&a.cb, &b.cb) / a.cb.len() as f64),
        cr: psnr_from_mse(sum_squared_error(&a.cr, &b.cr) / a.cr.len() as f64),
    })
}

/// PSNR between two videos with the squared error pooled over all frames
/// before the logarithm, one value per plane.
pub fn video_psnr(a: &RawVideo, b: &RawVideo) -> Result<PlanePsnr> {
    a.validate()?;
    b.validate()?;
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::InvalidDims("videos have different dimensions".into()));
    }
    if a.frames.len() != b.frames.len() {
        return Err(Error::InvalidComparison(format!(
            "frame counts differ: {} vs {}",
            a.frames.len(),
            b.frames.len()
        )));
    }
    let mut sse = [0.0f64; 3];
    let mut samples = [0u64; 3];
    for (fa, fb) in a.frames.iter().zip(&b.frames) {
        for (i, (pa, pb)) in [(&fa.y, &fb.y), (&fa.cb, &fb.cb), (&fa.cr, &fb.cr)]
            .into_iter()
            .enumerate()
        {
            sse[i] += sum_squared_error(pa, pb);
            samples[i] += pa.len() as u64;
        }
    }
    Ok(PlanePsnr {
        y: psnr_from_mse(sse[0] / samples[0] as f64),
        cb: psnr_from_mse(sse[1] / samples[1] as f64),
        cr: psnr_from_mse(sse[2] / samples[2] as f64),
    })
}

/// One positionally paired macroblock in a motion-vector comparison.
/// Deltas are absolute quarter-pel differences, zero unless both records
/// carry a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MvDiffEntry {
    pub frame: usize,
    pub mb: usize,
    pub mode_a: MbMode,
    pub mode_b: MbMode,
    pub ddx: u32,
    pub ddy: u32,
}

/// Motion-vector comparison of two containers, with per-component mean
/// and maximum deltas over all paired macroblocks.
#[derive(Debug, Clone, PartialEq)]
pub struct MvDiffReport {
    pub entries: Vec<MvDiffEntry>,
    pub mean_ddx: f64,
    pub mean_ddy: f64,
    pub max_ddx: u32,
    pub max_ddy: u32,
}

fn mode_name(mode: MbMode) -> &'static str {
    match mode {
        MbMode::Inter => "inter",
        MbMode::Intra => "intra",
        MbMode::Skip => "skip",
    }
}

impl MvDiffReport {
    /// CSV with a `frame,mb,mode_a,mode_b,ddx,ddy` header and one row per
    /// paired macroblock.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("frame,mb,mode_a,mode_b,ddx,ddy\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.frame,
                e.mb,
                mode_name(e.mode_a),
                mode_name(e.mode_b),
                e.ddx,
                e.ddy
            ));
        }
        out
    }
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

/// Pairs the macroblocks of two containers positionally and reports the
/// mode of each side and the absolute motion vector difference. The
/// containers must agree on dimensions, GOP size and frame count.
pub fn mv_diff_report(a: &StegoContainer, b: &StegoContainer) -> Result<MvDiffReport> {
    a.validate()?;
    b.validate()?;
    if (a.display_w, a.display_h) != (b.display_w, b.display_h) {
        return Err(Error::InvalidComparison(format!(
            "dimensions differ: {}x{} vs {}x{}",
            a.display_w, a.display_h, b.display_w, b.display_h
        )));
    }
    if a.gop_size != b.gop_size {
        return Err(Error::InvalidComparison(format!(
            "GOP sizes differ: {} vs {}",
            a.gop_size, b.gop_size
        )));
    }
    if a.frames.len() != b.frames.len() {
        return Err(Error::InvalidComparison(format!(
            "frame counts differ: {} vs {}",
            a.frames.len(),
            b.frames.len()
        )));
    }

    let mbs = a.macroblocks_per_frame();
    let mut entries = Vec::with_capacity(a.frames.len() * mbs);
    for (frame, (fa, fb)) in a.frames.iter().zip(&b.frames).enumerate() {
        let mut ra = BitReader::new(&fa.data);
        let mut rb = BitReader::new(&fb.data);
        for mb in 0..mbs {
            let rec_a = decode_macroblock(&mut ra).map_err(corrupt_frame_data)?;
            let rec_b = decode_macroblock(&mut rb).map_err(corrupt_frame_data)?;
            let (ddx, ddy) = match (rec_a.motion_vector(), rec_b.motion_vector()) {
                (Some(va), Some(vb)) => (va.dx.abs_diff(vb.dx), va.dy.abs_diff(vb.dy)),
                _ => (0, 0),
            };
            entries.push(MvDiffEntry {
                frame,
                mb,
                mode_a: rec_a.mode(),
                mode_b: rec_b.mode(),
                ddx,
                ddy,
            });
        }
    }

    let n = entries.len().max(1) as f64;
    Ok(MvDiffReport {
        mean_ddx: entries.iter().map(|e| e.ddx as f64).sum::<f64>() / n,
        mean_ddy: entries.iter().map(|e| e.ddy as f64).sum::<f64>() / n,
        max_ddx: entries.iter().map(|e| e.ddx).max().unwrap_or(0),
        max_ddy: entries.iter().map(|e| e.ddy).max().unwrap_or(0),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_video, CodecParams, IdentityHook};
    use crate::stego_video::{embed, invert_motion_vectors, EmbedMode};
    use crate::synth::{constant_video, moving_gradient};

    #[test]
    fn lsb_stream_packs_msb_first() {
        assert_eq!(lsb_stream_bytes(&[2, 1, 2, 2, 3, 2, 2, 2]), vec![0x48]);
        assert_eq!(lsb_stream_bytes(&[0x10; 24]), vec![0, 0, 0]);
        assert_eq!(lsb_stream_bytes(&[1; 17]).len(), 2);
        assert_eq!(lsb_stream_bytes(&[]), Vec::<u8>::new());
    }

    #[test]
    fn histogram_counts_and_total_agree() {
        let h = ascii_histogram(b"abacus");
        assert_eq!(h.counts[b'a' as usize], 2);
        assert_eq!(h.counts[b'b' as usize], 1);
        assert_eq!(h.counts[b'z' as usize], 0);
        assert_eq!(h.total(), 6);
        assert_eq!(ascii_histogram(b"").total(), 0);
    }

    #[test]
    fn histogram_csv_round_trips_exactly() {
        let h = ascii_histogram(b"the quick brown fox jumps over the lazy dog");
        let csv = h.to_csv();
        assert_eq!(csv.lines().count(), 257);
        assert!(csv.starts_with("value,count\n0,0\n"));
        assert_eq!(Histogram256::from_csv(&csv).unwrap(), h);
    }

    #[test]
    fn histogram_csv_rejects_malformed_input() {
        assert!(Histogram256::from_csv("value,count\n0,1\n").is_err());
        assert!(Histogram256::from_csv("not,a,histogram").is_err());
        let mut csv = ascii_histogram(b"x").to_csv();
        csv.push_str("12,5\n");
        assert!(matches!(Histogram256::from_csv(&csv), Err(Error::Parse(_))));
    }

    #[test]
    fn chi_square_closed_forms() {
        let uniform = Histogram256 { counts: [5; 256] };
        assert_eq!(chi_square_uniform(&uniform).unwrap(), 0.0);

        let mut spike = Histogram256::default();
        spike.counts[7] = 512;
        assert_eq!(chi_square_uniform(&spike).unwrap(), 512.0 * 255.0);

        assert!(matches!(
            chi_square_uniform(&Histogram256::default()),
            Err(Error::EmptyInput)
        ));
    }

    fn flat_frame(side: usize, value: u8) -> Frame {
        Frame {
            y: vec![value; side * side],
            cb: vec![value; side * side / 4],
            cr: vec![value; side * side / 4],
            pts: 0,
        }
    }

    #[test]
    fn psnr_identical_frames_is_infinite() {
        let f = flat_frame(16, 100);
        let p = psnr(&f, &f).unwrap();
        assert_eq!(p.y, f64::INFINITY);
        assert_eq!(p.cb, f64::INFINITY);
        assert_eq!(p.cr, f64::INFINITY);
    }

    #[test]
    fn psnr_single_max_error_pixel_matches_arithmetic() {
        let a = flat_frame(16, 0);
        let mut b = flat_frame(16, 0);
        b.y[40] = 255;
        let p = psnr(&a, &b).unwrap();
        let expected = 10.0 * 256f64.log10();
        assert!((p.y - expected).abs() < 1e-12, "got {}", p.y);
        assert_eq!(p.cb, f64::INFINITY);
        assert_eq!(psnr(&b, &a).unwrap().y, p.y);
    }

    #[test]
    fn psnr_rejects_mismatched_planes() {
        let err = psnr(&flat_frame(16, 0), &flat_frame(32, 0)).unwrap_err();
        assert!(matches!(err, Error::InvalidDims(_)));
    }

    #[test]
    fn video_psnr_pools_over_frames() {
        let a = constant_video(32, 32, 4, 100);
        let b = constant_video(32, 32, 4, 101);
        let p = video_psnr(&a, &b).unwrap();
        let expected = 10.0 * (255.0f64 * 255.0).log10();
        assert!((p.y - expected).abs() < 1e-12);
        assert!((p.cb - expected).abs() < 1e-12);

        let short = constant_video(32, 32, 3, 100);
        assert!(matches!(video_psnr(&a, &short), Err(Error::InvalidComparison(_))));
    }

    fn gradient_container() -> (RawVideo, StegoContainer) {
        let video = moving_gradient(64, 48, 25, 40);
        let container = encode_video(&video, &CodecParams::default(), &mut IdentityHook).unwrap();
        (video, container)
    }

    #[test]
    fn container_diffed_against_itself_is_all_zero() {
        let (_, container) = gradient_container();
        let report = mv_diff_report(&container, &container).unwrap();
        assert_eq!(report.entries.len(), container.frames.len() * 12);
        assert!(report.entries.iter().all(|e| e.ddx == 0 && e.ddy == 0));
        assert!(report.entries.iter().all(|e| e.mode_a == e.mode_b));
        assert_eq!(report.max_ddx, 0);
        assert_eq!(report.mean_ddy, 0.0);
    }

    #[test]
    fn embedding_in_x_moves_only_x_and_only_by_four() {
        let (video, plain) = gradient_container();
        let stego = embed(&video, b"A", EmbedMode::AllMbX, &CodecParams::default(), None)
            .unwrap();
        let report = mv_diff_report(&plain, &stego).unwrap();
        assert!(report.entries.iter().all(|e| e.ddx == 0 || e.ddx == 4));
        assert!(report.entries.iter().all(|e| e.ddy == 0));
        assert!(report.max_ddx == 4);
        assert!(report.entries.iter().all(|e| e.mode_a == e.mode_b));
    }

    #[test]
    fn inversion_doubles_every_inter_vector_component() {
        let (_, plain) = gradient_container();
        let inverted = invert_motion_vectors(&plain).unwrap();
        let report = mv_diff_report(&plain, &inverted).unwrap();
        let mut inter_seen = false;
        for e in &report.entries {
            assert_eq!(e.mode_a, e.mode_b);
            if e.mode_a == MbMode::Inter {
                // Every moving macroblock of the gradient carries (8, 4).
                assert_eq!((e.ddx, e.ddy), (16, 8));
                inter_seen = true;
            } else {
                assert_eq!((e.ddx, e.ddy), (0, 0));
            }
        }
        assert!(inter_seen);
        assert_eq!(report.max_ddx, 16);
        assert_eq!(report.max_ddy, 8);
        assert!(report.mean_ddx > 0.0 && report.mean_ddx < 16.0);
    }

    #[test]
    fn mismatched_containers_are_not_comparable() {
        let (video, container) = gradient_container();
        let short = encode_video(
            &RawVideo { frames: video.frames[..13].to_vec(), ..video.clone() },
            &CodecParams::default(),
            &mut IdentityHook,
        )
        .unwrap();
        assert!(matches!(
            mv_diff_report(&container, &short),
            Err(Error::InvalidComparison(_))
        ));

        let other_gop = encode_video(
            &video,
            &CodecParams { gop_size: 6, ..CodecParams::default() },
            &mut IdentityHook,
        )
        .unwrap();
        assert!(matches!(
            mv_diff_report(&container, &other_gop),
            Err(Error::InvalidComparison(_))
        ));
    }

    #[test]
    fn diff_report_emits_one_csv_row_per_macroblock() {
        let (video, plain) = gradient_container();
        let stego = embed(&video, b"A", EmbedMode::AllMbY, &CodecParams::default(), None)
            .unwrap();
        let report = mv_diff_report(&plain, &stego).unwrap();
        let csv = report.to_csv();
        assert_eq!(csv.lines().count(), report.entries.len() + 1);
        assert!(csv.starts_with("frame,mb,mode_a,mode_b,ddx,ddy\n"));
        assert!(csv.contains("inter"));
        assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 6));
    }
}
