use super::IoError;
use crate::field::ScalarField;
use crate::shape::BinaryImage;

/// Binary P5 greymap with maxval 255. `pixels` holds rows top to bottom.
pub fn encode_pgm(width: usize, height: usize, pixels: &[u8]) -> Vec<u8> {
    assert_eq!(pixels.len(), width * height, "pixel count must match dimensions");
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    out
}

/// Parses a P5 file written by [`encode_pgm`].
pub fn decode_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), IoError> {
    let bad = |m: &str| IoError::Format(format!("pgm: {m}"));
    let mut fields = Vec::new();
    let mut pos = 0;
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(String::from_utf8_lossy(&bytes[start..pos]).into_owned());
    }
    pos += 1;
    if fields[0] != "P5" {
        return Err(bad("not a binary greymap"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (w, h, maxval) = (num(&fields[1])?, num(&fields[2])?, num(&fields[3])?);
    if maxval != 255 {
        return Err(bad("maxval must be 255"));
    }
    let data = bytes.get(pos..).unwrap_or_default();
    if data.len() != w * h {
        return Err(bad("pixel count does not match dimensions"));
    }
    Ok((w, h, data.to_vec()))
}

/// Grid rows flipped so world +y points up in the image.
fn rows_top_down(width: usize, height: usize, value: impl Fn(usize, usize) -> u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(width * height);
    for y in (0..height).rev() {
        for x in 0..width {
            out.push(value(x, y));
        }
    }
    out
}

/// `u` mapped linearly from [0, 1] to [0, 255], clamped.
pub fn render_u(u: &ScalarField) -> Vec<u8> {
    let g = u.grid;
    let pixels = rows_top_down(g.width, g.height, |x, y| {
        (u.get(x, y).clamp(0.0, 1.0) * 255.0).round() as u8
    });
    encode_pgm(g.width, g.height, &pixels)
}

/// Any field stretched from its own minimum to maximum.
pub fn render_normalized(field: &ScalarField) -> Vec<u8> {
    let g = field.grid;
    let (lo, hi) = (field.min(), field.max());
    let span = hi - lo;
    let pixels = rows_top_down(g.width, g.height, |x, y| {
        if span > 0.0 {
            ((field.get(x, y) - lo) / span * 255.0).round() as u8
        } else {
            0
        }
    });
    encode_pgm(g.width, g.height, &pixels)
}

/// Set cells as 255, unset as 0.
pub fn render_binary(img: &BinaryImage) -> Vec<u8> {
    let g = img.grid;
    let pixels = rows_top_down(g.width, g.height, |x, y| if img.get(x, y) { 255 } else { 0 });
    encode_pgm(g.width, g.height, &pixels)
}
