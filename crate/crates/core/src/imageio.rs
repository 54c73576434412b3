//! Grayscale PNG reading and writing.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use crate::{Error, Result};

/// Maps an intensity in `[0, 1]` to an 8-bit level.
pub fn to_level(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

pub fn from_level(l: u8) -> f64 {
    l as f64 / 255.0
}

/// Encodes an 8-bit grayscale image, with optional `tEXt` metadata.
pub fn encode_gray(width: u32, height: u32, pixels: &[f64], text: &[(&str, &str)]) -> Result<Vec<u8>> {
    if pixels.len() != (width * height) as usize {
        return Err(Error::DimensionMismatch {
            what: "image pixels",
            expected: (width * height) as usize,
            got: pixels.len(),
        });
    }
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width, height);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        for (k, v) in text {
            enc.add_text_chunk(k.to_string(), v.to_string())
                .map_err(|e| Error::format("<png>", e))?;
        }
        let mut writer = enc.write_header().map_err(|e| Error::format("<png>", e))?;
        let bytes: Vec<u8> = pixels.iter().map(|&v| to_level(v)).collect();
        writer
            .write_image_data(&bytes)
            .map_err(|e| Error::format("<png>", e))?;
    }
    Ok(out)
}

pub fn write_gray(path: &Path, width: u32, height: u32, pixels: &[f64], text: &[(&str, &str)]) -> Result<()> {
    let bytes = encode_gray(width, height, pixels, text)?;
    let mut f = BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    f.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    f.flush().map_err(|e| Error::io(path, e))
}

/// Reads an 8-bit grayscale PNG into intensities in `[0, 1]`.
pub fn read_gray(path: &Path) -> Result<(u32, u32, Vec<f64>)> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(BufReader::new(f));
    let mut reader = decoder.read_info().map_err(|e| Error::format(path, e))?;
    let mut buf = vec![0; reader.output_buffer_size().unwrap_or(0)];
    let info = reader.next_frame(&mut buf).map_err(|e| Error::format(path, e))?;
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::format(path, "expected 8-bit grayscale"));
    }
    let pixels = buf[..info.buffer_size()].iter().map(|&l| from_level(l)).collect();
    Ok((info.width, info.height, pixels))
}
