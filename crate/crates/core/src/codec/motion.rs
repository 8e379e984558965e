//! Full-search motion estimation and motion compensation.

use super::plane::{CodedFrame, MbPixels, Plane};
use super::{CodecParams, MbMode, MotionVector, MB_SIZE};

/// Outcome of the mode decision for one macroblock: inter with the winning
/// vector, or intra when even the best match is poor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotionDecision {
    /// [`MbMode::Inter`] or [`MbMode::Intra`]; skip is decided later, after
    /// quantisation.
    pub mode: MbMode,
    /// Winning displacement in quarter-pel units; zero for intra.
    pub mv: MotionVector,
    /// Sum of absolute luma differences at the winning displacement.
    pub sad: u32,
}

/// Luma SAD between the macroblock at `(cx, cy)` in `cur` and the one at
/// `(rx, ry)` in `reference`. Both windows must lie inside their planes.
/// Returns early with a value above `cutoff` once the sum can no longer win.
fn sad_16x16(
    cur: &Plane,
    (cx, cy): (usize, usize),
    reference: &Plane,
    (rx, ry): (usize, usize),
    cutoff: u32,
) -> u32 {
    let mut sad = 0u32;
    for row in 0..MB_SIZE {
        let c = &cur.data[(cy + row) * cur.w + cx..][..MB_SIZE];
        let r = &reference.data[(ry + row) * reference.w + rx..][..MB_SIZE];
        for (a, b) in c.iter().zip(r) {
            sad += a.abs_diff(*b) as u32;
        }
        if sad > cutoff {
            break;
        }
    }
    sad
}

/// Exhaustive integer-pel search over the window `+/- search_range`,
/// restricted to displacements whose 16x16 window lies entirely inside the
/// reference plane. Ties are broken toward the shorter vector
/// (`|dx| + |dy|`), then the smaller `dy`, then the smaller `dx`, so the
/// result is independent of scan order. The block is coded intra when the
/// winning SAD exceeds `intra_sad_threshold`.
pub fn motion_estimate(
    cur: &Plane,
    reference: &Plane,
    origin: (usize, usize),
    params: &CodecParams,
) -> MotionDecision {
    let (ox, oy) = (origin.0 as i64, origin.1 as i64);
    let range = params.search_range as i64;
    let max_x = reference.w as i64 - MB_SIZE as i64;
    let max_y = reference.h as i64 - MB_SIZE as i64;
    let dy_lo = (-range).max(-oy);
    let dy_hi = range.min(max_y - oy);
    let dx_lo = (-range).max(-ox);
    let dx_hi = range.min(max_x - ox);

    // (sad, |dx|+|dy|, dy, dx) lexicographic minimum.
    let mut best: Option<(u32, i64, i64, i64)> = None;
    for dy in dy_lo..=dy_hi {
        for dx in dx_lo..=dx_hi {
            let cutoff = best.map_or(u32::MAX, |b| b.0);
            let sad = sad_16x16(
                cur,
                origin,
                reference,
                ((ox + dx) as usize, (oy + dy) as usize),
                cutoff,
            );
            let key = (sad, dx.abs() + dy.abs(), dy, dx);
            if best.is_none() || key < best.unwrap() {
                best = Some(key);
            }
        }
    }
    // The zero displacement is always inside the plane, so a candidate
    // exists whenever the macroblock itself does.
    let (sad, _, dy, dx) = best.expect("search window is never empty");

    if sad > params.intra_sad_threshold {
        MotionDecision { mode: MbMode::Intra, mv: MotionVector::ZERO, sad }
    } else {
        MotionDecision {
            mode: MbMode::Inter,
            mv: MotionVector { dx: dx as i32 * 4, dy: dy as i32 * 4 },
            sad,
        }
    }
}

/// Builds the inter prediction for the macroblock at `origin`: luma
/// displaced by the vector's integer-pel part, chroma by half of it rounded
/// toward zero. Reads beyond the plane clamp to its edge.
pub fn motion_compensate(
    reference: &CodedFrame,
    mv: MotionVector,
    origin: (usize, usize),
) -> MbPixels {
    let (ox, oy) = (origin.0 as i64, origin.1 as i64);
    let (pdx, pdy) = mv.pel();
    let (pdx, pdy) = (pdx as i64, pdy as i64);
    let mut mb = MbPixels::filled(0);
    for r in 0..MB_SIZE as i64 {
        for c in 0..MB_SIZE as i64 {
            mb.y[(r * 16 + c) as usize] = reference.y.get_clamped(ox + c + pdx, oy + r + pdy);
        }
    }
    let (cdx, cdy) = (pdx / 2, pdy / 2);
    let (cox, coy) = (ox / 2, oy / 2);
    for r in 0..8 {
        for c in 0..8 {
            mb.cb[(r * 8 + c) as usize] = reference.cb.get_clamped(cox + c + cdx, coy + r + cdy);
            mb.cr[(r * 8 + c) as usize] = reference.cr.get_clamped(cox + c + cdx, coy + r + cdy);
        }
    }
    mb
}
