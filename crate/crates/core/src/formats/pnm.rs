//! Binary PNM images: P5 (greyscale) and P6 (RGB), 8 bits per sample.
//!
//! These are the image covers for LSB embedding; the pixel buffer is exposed
//! as one flat byte stream regardless of channel count.

use crate::error::{Error, Result};

/// A decoded PNM image. `pixels` holds `width * height * channels` bytes in
/// raster order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnmImage {
    pub width: u32,
    pub height: u32,
    /// 1 for greyscale (P5), 3 for RGB (P6).
    pub channels: u8,
    pub pixels: Vec<u8>,
}

/// Parses a binary PNM file. ASCII variants (P1..P3), bitmaps (P4) and
/// sample depths other than 8 bits are not supported.
pub fn read_pnm(data: &[u8]) -> Result<PnmImage> {
    if data.len() < 2 {
        return Err(Error::TruncatedInput);
    }
    let channels = match &data[0..2] {
        b"P5" => 1,
        b"P6" => 3,
        [b'P', b'1'..=b'4'] | [b'P', b'7'] => {
            return Err(Error::Unsupported(format!(
                "PNM variant P{}",
                data[1] as char
            )))
        }
        _ => return Err(Error::Parse("missing PNM signature".into())),
    };

    let mut pos = 2usize;
    let mut fields = [0u32; 3];
    for field in &mut fields {
        *field = next_header_number(data, &mut pos)?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::Unsupported(format!("maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::InvalidDims("zero width or height".into()));
    }
    // Exactly one whitespace byte separates the header from the samples.
    match data.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        Some(_) => return Err(Error::Parse("header not terminated by whitespace".into())),
        None => return Err(Error::TruncatedInput),
    }

    let len = width as usize * height as usize * channels as usize;
    if data.len() - pos < len {
        return Err(Error::TruncatedInput);
    }
    Ok(PnmImage {
        width,
        height,
        channels: channels as u8,
        pixels: data[pos..pos + len].to_vec(),
    })
}

/// Serializes an image as binary P5 or P6 with maxval 255.
pub fn write_pnm(image: &PnmImage) -> Result<Vec<u8>> {
    let magic = match image.channels {
        1 => "P5",
        3 => "P6",
        n => return Err(Error::Unsupported(format!("{n}-channel PNM"))),
    };
    let expected = image.width as usize * image.height as usize * image.channels as usize;
    if image.pixels.len() != expected {
        return Err(Error::InvalidDims(format!(
            "pixel buffer is {} bytes, dimensions need {expected}",
            image.pixels.len()
        )));
    }
    let mut out = format!("{magic}\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.pixels);
    Ok(out)
}

/// Reads the next ASCII integer in a PNM header, skipping whitespace and
/// `#` comments that run to end of line.
fn next_header_number(data: &[u8], pos: &mut usize) -> Result<u32> {
    loop {
        match data.get(*pos) {
            None => return Err(Error::TruncatedInput),
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(b'#') => {
                while let Some(&b) = data.get(*pos) {
                    *pos += 1;
                    if b == b'\n' {
                        break;
                    }
                }
            }
            Some(b) if b.is_ascii_digit() => {
                let mut value: u64 = 0;
                while let Some(&b) = data.get(*pos) {
                    if !b.is_ascii_digit() {
                        break;
                    }
                    value = value * 10 + (b - b'0') as u64;
                    if value > u32::MAX as u64 {
                        return Err(Error::Parse("header number overflows".into()));
                    }
                    *pos += 1;
                }
                return Ok(value as u32);
            }
            Some(&b) => {
                return Err(Error::Parse(format!(
                    "unexpected byte {b:#04x} in PNM header"
                )))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_rgb_pair_parses() {
        let img = read_pnm(b"P6\n2 1\n255\n\xff\xff\xff\xff\xff\xff").unwrap();
        assert_eq!((img.width, img.height, img.channels), (2, 1, 3));
        assert_eq!(img.pixels, vec![0xFF; 6]);
    }

    #[test]
    fn round_trip_is_exact() {
        let img = PnmImage {
            width: 3,
            height: 2,
            channels: 1,
            pixels: vec![0, 10, 20, 30, 40, 50],
        };
        assert_eq!(read_pnm(&write_pnm(&img).unwrap()).unwrap(), img);
    }

    #[test]
    fn comments_and_spread_whitespace_parse() {
        let img = read_pnm(b"P5 # grey\n# another comment\n 2\n\t2 # w h\n255\nabcd").unwrap();
        assert_eq!((img.width, img.height), (2, 2));
        assert_eq!(img.pixels, b"abcd");
    }

    #[test]
    fn ascii_variants_are_unsupported() {
        assert!(matches!(read_pnm(b"P3\n1 1\n255\n1 2 3"), Err(Error::Unsupported(_))));
        assert!(matches!(read_pnm(b"P1\n1 1\n1"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn non_255_maxval_is_unsupported() {
        assert!(matches!(read_pnm(b"P5\n1 1\n100\n\x00"), Err(Error::Unsupported(_))));
    }

    #[test]
    fn truncated_pixels_are_reported() {
        assert!(matches!(read_pnm(b"P6\n2 2\n255\n\x00\x00"), Err(Error::TruncatedInput)));
    }

    #[test]
    fn non_pnm_is_a_parse_error() {
        assert!(matches!(read_pnm(b"GIF89a"), Err(Error::Parse(_))));
    }
}
