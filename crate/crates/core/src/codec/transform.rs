//! 8x8 orthonormal DCT, flat quantisation, and the zigzag scan order.

use std::sync::OnceLock;

/// Basis matrix `C[k][n] = a(k) cos((2n+1) k pi / 16)` with `a(0) = sqrt(1/8)`
/// and `a(k) = 1/2` otherwise, making the transform orthonormal: a constant
/// residual of `c` lands entirely in the DC coefficient as `8c`.
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut c = [[0.0; 8]; 8];
        for (k, row) in c.iter_mut().enumerate() {
            let a = if k == 0 { (1.0f64 / 8.0).sqrt() } else { 0.5 };
            for (n, v) in row.iter_mut().enumerate() {
                *v = a * ((2 * n + 1) as f64 * k as f64 * std::f64::consts::PI / 16.0).cos();
            }
        }
        c
    })
}

/// Forward 2-D DCT of an 8x8 residual block: `C * X * C^T`.
pub fn dct8(residual: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let c = basis();
    // Rows first: tmp = X * C^T, then columns: out = C * tmp.
    let mut tmp = [[0.0; 8]; 8];
    for r in 0..8 {
        for k in 0..8 {
            let mut acc = 0.0;
            for n in 0..8 {
                acc += residual[r][n] * c[k][n];
            }
            tmp[r][k] = acc;
        }
    }
    let mut out = [[0.0; 8]; 8];
    for k in 0..8 {
        for j in 0..8 {
            let mut acc = 0.0;
            for r in 0..8 {
                acc += c[k][r] * tmp[r][j];
            }
            out[k][j] = acc;
        }
    }
    out
}

/// Inverse 2-D DCT: `C^T * Y * C`. Up to float rounding this undoes
/// [`dct8`].
pub fn idct8(coeffs: &[[f64; 8]; 8]) -> [[f64; 8]; 8] {
    let c = basis();
    let mut tmp = [[0.0; 8]; 8];
    for k in 0..8 {
        for n in 0..8 {
            let mut acc = 0.0;
            for j in 0..8 {
                acc += coeffs[k][j] * c[j][n];
            }
            tmp[k][n] = acc;
        }
    }
    let mut out = [[0.0; 8]; 8];
    for n in 0..8 {
        for m in 0..8 {
            let mut acc = 0.0;
            for k in 0..8 {
                acc += c[k][n] * tmp[k][m];
            }
            out[n][m] = acc;
        }
    }
    out
}

/// Flat quantiser: nearest level with halves rounded away from zero. The
/// reconstruction error of `dequantise(quantise(c))` never exceeds `qp / 2`.
pub fn quantise(coeff: f64, qp: u8) -> i32 {
    (coeff / qp as f64).round() as i32
}

/// Inverse of the flat quantiser.
pub fn dequantise(level: i32, qp: u8) -> f64 {
    level as f64 * qp as f64
}

/// Zigzag scan order for an 8x8 block: entry `i` is the raster index of the
/// `i`-th coefficient along ascending anti-diagonals.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27,
    20, 13, 6, 7, 14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58,
    59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
];
