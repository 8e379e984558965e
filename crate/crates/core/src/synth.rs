//! Deterministic test videos.
//!
//! The moving gradient is the workhorse: a sawtooth luma ramp overlaid
//! with a position-keyed speckle, both scrolling two pixels right and one
//! pixel down per frame, plus low-amplitude per-frame grain. The speckle
//! makes the motion search unambiguous: a plain ramp matches equally well
//! along a whole line of displacements, while the speckle only lines up
//! at the true one, by a margin far above the intra threshold. The grain
//! keeps residuals nonzero so quantised coefficients exist to embed in,
//! and its amplitude is small enough that blocks matched at the true
//! displacement always stay inter-coded.

use crate::formats::{Frame, RawVideo};

/// Integer hash mixed splitmix-style, reduced to `0..modulus`.
fn hash_mod(x: u32, y: u32, salt: u64, modulus: u64) -> i32 {
    let mut z = salt ^ ((x as u64) << 40) ^ ((y as u64) << 20);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z % modulus) as i32
}

/// Per-frame grain in -6..=6 at a fixed screen position.
fn grain(x: u32, y: u32, t: u32, seed: u64) -> i32 {
    hash_mod(x, y, seed ^ ((t as u64) << 1) ^ 0x67e6_c7a7, 13) - 6
}

/// Content value at scrolled position `(u, v)`: ramp plus speckle.
fn content(u: u32, v: u32, seed: u64) -> i32 {
    let ramp = ((u * 3 + v * 2) & 0xff) as i32;
    let speckle = hash_mod(u, v, seed, 97) - 48;
    ramp + speckle
}

/// A `frames`-long 25 fps sequence whose content scrolls right by two
/// pixels and down by one pixel per frame: away from the trailing edges,
/// the ground-truth motion vector is (8, 4) in quarter-pels. `seed`
/// varies speckle and grain together.
pub fn moving_gradient(width: u32, height: u32, frames: u32, seed: u64) -> RawVideo {
    assert!(width % 2 == 0 && height % 2 == 0, "4:2:0 video needs even dimensions");
    let (w, h) = (width as usize, height as usize);
    let frames = (0..frames)
        .map(|t| {
            let mut y = vec![0u8; w * h];
            for row in 0..h {
                for col in 0..w {
                    let (u, v) = (col as u32 + 2 * t, row as u32 + t);
                    let s = content(u, v, seed) + grain(col as u32, row as u32, t, seed);
                    y[row * w + col] = s.clamp(0, 255) as u8;
                }
            }
            let mut cb = vec![0u8; w * h / 4];
            let mut cr = vec![0u8; w * h / 4];
            for row in 0..h / 2 {
                for col in 0..w / 2 {
                    let (u, v) = (2 * col as u32 + 2 * t, 2 * row as u32 + t);
                    let base = ((u * 3 + v * 2) & 0xff) as u8;
                    cb[row * (w / 2) + col] = base.wrapping_add(85);
                    cr[row * (w / 2) + col] = base.wrapping_add(170);
                }
            }
            Frame { y, cb, cr, pts: t }
        })
        .collect();
    RawVideo { width, height, fps_num: 25, fps_den: 1, frames }
}

/// A 25 fps sequence where every sample of every frame is `value`; its
/// predicted frames code as pure skip.
pub fn constant_video(width: u32, height: u32, frames: u32, value: u8) -> RawVideo {
    let (w, h) = (width as usize, height as usize);
    let frames = (0..frames)
        .map(|t| Frame {
            y: vec![value; w * h],
            cb: vec![value; w * h / 4],
            cr: vec![value; w * h / 4],
            pts: t,
        })
        .collect();
    RawVideo { width, height, fps_num: 25, fps_den: 1, frames }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{motion_estimate, pad_frame, CodecParams, MbMode, MotionVector};

    #[test]
    fn generators_produce_valid_video() {
        moving_gradient(64, 48, 5, 7).validate().unwrap();
        constant_video(32, 32, 3, 128).validate().unwrap();
    }

    #[test]
    fn gradient_is_deterministic_per_seed() {
        assert_eq!(moving_gradient(32, 32, 3, 1), moving_gradient(32, 32, 3, 1));
        assert_ne!(
            moving_gradient(32, 32, 3, 1).frames[0].y,
            moving_gradient(32, 32, 3, 2).frames[0].y
        );
    }

    #[test]
    fn interior_blocks_move_by_two_right_one_down() {
        for seed in [11u64, 12, 13] {
            let video = moving_gradient(96, 96, 3, seed);
            let params = CodecParams::default();
            let prev = pad_frame(&video.frames[1], (96, 96), (96, 96)).unwrap();
            let cur = pad_frame(&video.frames[2], (96, 96), (96, 96)).unwrap();
            for origin in [(0usize, 0usize), (32, 32), (48, 48), (32, 64)] {
                let d = motion_estimate(&cur.y, &prev.y, origin, &params);
                assert_eq!(d.mode, MbMode::Inter, "seed {seed} at {origin:?}");
                assert_eq!(d.mv, MotionVector { dx: 8, dy: 4 }, "seed {seed} at {origin:?}");
                assert!(d.sad < params.intra_sad_threshold);
            }
        }
    }

    #[test]
    fn trailing_edge_blocks_cannot_match_and_go_intra() {
        let video = moving_gradient(64, 48, 2, 3);
        let prev = pad_frame(&video.frames[0], (64, 48), (64, 48)).unwrap();
        let cur = pad_frame(&video.frames[1], (64, 48), (64, 48)).unwrap();
        let d = motion_estimate(&cur.y, &prev.y, (48, 32), &CodecParams::default());
        assert_eq!(d.mode, MbMode::Intra);
    }

    #[test]
    fn grain_and_speckle_stay_in_band() {
        for x in 0..50u32 {
            for t in 0..5 {
                assert!((-6..=6).contains(&grain(x, x / 2, t, 99)));
                let c = content(x, x / 2, 99);
                assert!((-48..=303).contains(&c));
            }
        }
    }
}
