//! Image loading, saving and grid alignment.
//!
//! Everything downstream works on [`ImageTensor`]: a row-major
//! `(row, column, channel)` array of intensities normalized to `[0, 1]`.
//! Only 8-bit sources are accepted, and a sample `s` loads as `s / 255`.
//!
//! Readable formats are PNG (grayscale or RGB, alpha stripped with a
//! warning) and binary PGM/PPM (`P5`/`P6`, maxval 255). Output is always
//! lossless 8-bit PNG.

use std::fs;
use std::io::Cursor;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalized image: `height × width × channels` values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageTensor {
    height: usize,
    width: usize,
    channels: usize,
    data: Vec<f64>,
}

impl ImageTensor {
    pub fn new(height: usize, width: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::invalid(format!(
                "channel count must be 1 or 3, got {channels}"
            )));
        }
        if height == 0 || width == 0 {
            return Err(Error::invalid(format!(
                "image must be non-empty, got {height}x{width}"
            )));
        }
        let expected = height * width * channels;
        if data.len() != expected {
            return Err(Error::mismatch(format!(
                "expected {expected} samples for {height}x{width}x{channels}, got {}",
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::invalid(format!("intensity {v} outside [0, 1]")));
        }
        Ok(Self {
            height,
            width,
            channels,
            data,
        })
    }

    pub fn zeros(height: usize, width: usize, channels: usize) -> Result<Self> {
        Self::new(
            height,
            width,
            channels,
            vec![0.0; height * width * channels],
        )
    }

    /// Builds a tensor from 8-bit samples, dividing each by 255.
    pub fn from_u8(height: usize, width: usize, channels: usize, samples: &[u8]) -> Result<Self> {
        let data = samples.iter().map(|&s| f64::from(s) / 255.0).collect();
        Self::new(height, width, channels, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixel_count(&self) -> usize {
        self.height * self.width
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize, channel: usize) -> usize {
        (row * self.width + col) * self.channels + channel
    }

    pub fn get(&self, row: usize, col: usize, channel: usize) -> f64 {
        self.data[self.index(row, col, channel)]
    }

    pub fn same_shape(&self, other: &ImageTensor) -> bool {
        self.height == other.height && self.width == other.width && self.channels == other.channels
    }

    /// Quantizes to 8 bits with `round(v × 255)`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }
}

/// Geometry of a zero-padding step, kept so the padding can be undone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PadRecord {
    pub original_height: usize,
    pub original_width: usize,
    pub padded_height: usize,
    pub padded_width: usize,
}

impl PadRecord {
    pub fn is_identity(&self) -> bool {
        self.original_height == self.padded_height && self.original_width == self.padded_width
    }
}

const PNG_SIGNATURE: [u8; 8] = [0x89, b'P', b'N', b'G', b'\r', b'\n', 0x1a, b'\n'];

pub fn load_image(path: impl AsRef<Path>) -> Result<ImageTensor> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    decode_image(&bytes)
}

/// Decodes PNG or binary PGM/PPM bytes, sniffing the format from the magic.
pub fn decode_image(bytes: &[u8]) -> Result<ImageTensor> {
    if bytes.starts_with(&PNG_SIGNATURE) {
        decode_png(bytes)
    } else if bytes.starts_with(b"P5") || bytes.starts_with(b"P6") {
        decode_pnm(bytes)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(Error::UnsupportedFormat(format!(
            "netpbm variant P{} (only binary P5/P6 are read)",
            bytes[1] as char
        )))
    } else {
        Err(Error::UnsupportedFormat(
            "not a PNG, PGM or PPM file".into(),
        ))
    }
}

fn decode_png(bytes: &[u8]) -> Result<ImageTensor> {
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    // palette -> RGB, sub-byte gray -> 8-bit, tRNS -> alpha channel
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(png_error)?;
    let (color, depth) = reader.output_color_type();
    if depth != png::BitDepth::Eight {
        return Err(Error::UnsupportedFormat(format!(
            "{depth:?}-bit PNG (only 8-bit is supported)"
        )));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptImage("PNG dimensions overflow".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(png_error)?;
    buf.truncate(info.buffer_size());
    let (height, width) = (info.height as usize, info.width as usize);

    let (channels, samples) = match color {
        png::ColorType::Grayscale => (1, buf),
        png::ColorType::Rgb => (3, buf),
        png::ColorType::GrayscaleAlpha => {
            log::warn!("dropping alpha channel from grayscale PNG");
            (1, strip_alpha(&buf, 2))
        }
        png::ColorType::Rgba => {
            log::warn!("dropping alpha channel from RGBA PNG");
            (3, strip_alpha(&buf, 4))
        }
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedFormat("unexpanded indexed PNG".into()));
        }
    };
    ImageTensor::from_u8(height, width, channels, &samples)
}

fn png_error(e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::IoError(io) => Error::CorruptImage(io.to_string()),
        png::DecodingError::Format(f) => Error::CorruptImage(f.to_string()),
        png::DecodingError::Parameter(p) => Error::CorruptImage(p.to_string()),
        png::DecodingError::LimitsExceeded => {
            Error::CorruptImage("PNG exceeds decoder limits".into())
        }
    }
}

fn strip_alpha(samples: &[u8], stride: usize) -> Vec<u8> {
    samples
        .chunks_exact(stride)
        .flat_map(|px| px[..stride - 1].iter().copied())
        .collect()
}

/// Parses the ASCII header of a binary netpbm file. Returns the header
/// fields and the offset of the first raster byte.
fn parse_pnm_header(bytes: &[u8]) -> Result<([usize; 3], usize)> {
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(Error::CorruptImage("truncated netpbm header".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::CorruptImage("malformed netpbm header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::CorruptImage("netpbm header value out of range".into()))?;
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => Ok((fields, pos + 1)),
        _ => Err(Error::CorruptImage(
            "missing separator after netpbm header".into(),
        )),
    }
}

fn decode_pnm(bytes: &[u8]) -> Result<ImageTensor> {
    let channels = if bytes[1] == b'5' { 1 } else { 3 };
    let ([width, height, maxval], offset) = parse_pnm_header(bytes)?;
    if maxval != 255 {
        return Err(Error::UnsupportedFormat(format!(
            "netpbm maxval {maxval} (only 8-bit maxval 255 is supported)"
        )));
    }
    if width == 0 || height == 0 {
        return Err(Error::CorruptImage("zero-sized netpbm image".into()));
    }
    let needed = width
        .checked_mul(height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| Error::CorruptImage("netpbm dimensions overflow".into()))?;
    let raster = &bytes[offset..];
    if raster.len() < needed {
        return Err(Error::CorruptImage(format!(
            "netpbm raster truncated: {} of {needed} bytes",
            raster.len()
        )));
    }
    ImageTensor::from_u8(height, width, channels, &raster[..needed])
}

/// Encodes to an 8-bit PNG in memory. Output is deterministic for a given
/// tensor.
pub fn encode_png(img: &ImageTensor) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let width = u32::try_from(img.width()).map_err(|_| Error::invalid("image too wide for PNG"))?;
    let height =
        u32::try_from(img.height()).map_err(|_| Error::invalid("image too tall for PNG"))?;
    let mut encoder = png::Encoder::new(&mut out, width, height);
    encoder.set_color(if img.channels() == 1 {
        png::ColorType::Grayscale
    } else {
        png::ColorType::Rgb
    });
    encoder.set_depth(png::BitDepth::Eight);
    encoder.set_compression(png::Compression::Balanced);
    let mut writer = encoder.write_header().map_err(png_encode_error)?;
    writer
        .write_image_data(&img.to_u8())
        .map_err(png_encode_error)?;
    writer.finish().map_err(png_encode_error)?;
    Ok(out)
}

fn png_encode_error(e: png::EncodingError) -> Error {
    match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::invalid(other.to_string()),
    }
}

/// Writes a lossless PNG and returns its size in bytes.
pub fn save_image(img: &ImageTensor, path: impl AsRef<Path>) -> Result<u64> {
    let bytes = encode_png(img)?;
    fs::write(path, &bytes)?;
    Ok(bytes.len() as u64)
}

/// Zero-pads the bottom and right edges so both dimensions become
/// multiples of the bixel size.
pub fn pad_to_grid(
    img: &ImageTensor,
    bixel_h: usize,
    bixel_w: usize,
) -> Result<(ImageTensor, PadRecord)> {
    if bixel_h == 0 || bixel_w == 0 {
        return Err(Error::invalid(format!(
            "bixel size must be positive, got {bixel_h}x{bixel_w}"
        )));
    }
    let padded_height = img.height.div_ceil(bixel_h) * bixel_h;
    let padded_width = img.width.div_ceil(bixel_w) * bixel_w;
    let pad = PadRecord {
        original_height: img.height,
        original_width: img.width,
        padded_height,
        padded_width,
    };
    if pad.is_identity() {
        return Ok((img.clone(), pad));
    }
    let c = img.channels;
    let mut data = vec![0.0; padded_height * padded_width * c];
    let row_len = img.width * c;
    for (r, src) in img.data.chunks_exact(row_len).enumerate() {
        let dst = r * padded_width * c;
        data[dst..dst + row_len].copy_from_slice(src);
    }
    let padded = ImageTensor {
        height: padded_height,
        width: padded_width,
        channels: c,
        data,
    };
    Ok((padded, pad))
}

/// Removes padding added by [`pad_to_grid`].
pub fn crop(img: &ImageTensor, pad: &PadRecord) -> Result<ImageTensor> {
    if img.height != pad.padded_height || img.width != pad.padded_width {
        return Err(Error::mismatch(format!(
            "image is {}x{} but pad record expects {}x{}",
            img.height, img.width, pad.padded_height, pad.padded_width
        )));
    }
    if pad.original_height > pad.padded_height || pad.original_width > pad.padded_width {
        return Err(Error::invalid("pad record original exceeds padded size"));
    }
    if pad.is_identity() {
        return Ok(img.clone());
    }
    let c = img.channels;
    let row_len = pad.original_width * c;
    let mut data = Vec::with_capacity(pad.original_height * row_len);
    for row in img
        .data
        .chunks_exact(img.width * c)
        .take(pad.original_height)
    {
        data.extend_from_slice(&row[..row_len]);
    }
    ImageTensor::new(pad.original_height, pad.original_width, c, data)
}
