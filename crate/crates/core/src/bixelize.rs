//! Bixel segmentation: per-block intensity sums and intra-block weights.
//!
//! Blocks are enumerated row-major over the grid. Inside a block the pixels
//! are flattened row-major as `(row, column, channel)`, so a block holds
//! `M = bixel_h × bixel_w × channels` values.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::imageio::{ImageTensor, PadRecord};

/// The weight vector `w_i = p_i / S` of one block.
///
/// Stored as the raw intensities together with their sum so that
/// redistributing a sum `S'` can be computed as `p_i × (S' / S)`. That is
/// the same quantity as `w_i × S'`, but it returns `p_i` bit-exactly when
/// `S' == S`. A block with `S = 0` has all-zero weights.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightVector {
    intensities: Vec<f64>,
    sum: f64,
}

impl WeightVector {
    pub fn from_intensities(intensities: Vec<f64>) -> Self {
        let sum = compensated_sum(&intensities);
        Self { intensities, sum }
    }

    /// Wraps an explicit weight vector. It must be non-negative and sum to
    /// one within 1e-9, or be all zeros.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and non-negative"));
        }
        let total: f64 = weights.iter().sum();
        let sum = if total == 0.0 {
            0.0
        } else if (total - 1.0).abs() <= 1e-9 {
            1.0
        } else {
            return Err(Error::invalid(format!(
                "weights sum to {total}, expected 1"
            )));
        };
        Ok(Self {
            intensities: weights,
            sum,
        })
    }

    /// Rebuilds a block from stored weights and its sum.
    pub fn from_parts(weights: &[f64], sum: f64) -> Self {
        Self {
            intensities: weights.iter().map(|w| w * sum).collect(),
            sum,
        }
    }

    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.sum
    }

    /// True for the zero-sum sentinel.
    pub fn is_zero(&self) -> bool {
        self.sum == 0.0
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn weight(&self, i: usize) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            self.intensities[i] / self.sum
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }

    /// Pixel values `w_i × target` (unclamped).
    pub fn scaled(&self, target: f64) -> Vec<f64> {
        if self.is_zero() {
            return vec![0.0; self.len()];
        }
        let ratio = target / self.sum;
        self.intensities.iter().map(|p| p * ratio).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockDecomposition {
    bixel_h: usize,
    bixel_w: usize,
    grid_rows: usize,
    grid_cols: usize,
    channels: usize,
    sums: Vec<f64>,
    blocks: Vec<WeightVector>,
    pad: PadRecord,
}

impl BlockDecomposition {
    pub fn bixel_h(&self) -> usize {
        self.bixel_h
    }

    pub fn bixel_w(&self) -> usize {
        self.bixel_w
    }

    pub fn grid_rows(&self) -> usize {
        self.grid_rows
    }

    pub fn grid_cols(&self) -> usize {
        self.grid_cols
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn block_count(&self) -> usize {
        self.grid_rows * self.grid_cols
    }

    /// `M`, the flattened length of one block.
    pub fn block_len(&self) -> usize {
        self.bixel_h * self.bixel_w * self.channels
    }

    pub fn sums(&self) -> &[f64] {
        &self.sums
    }

    pub fn blocks(&self) -> &[WeightVector] {
        &self.blocks
    }

    pub fn pad(&self) -> &PadRecord {
        &self.pad
    }
}

fn check_grid(img: &ImageTensor, bixel_h: usize, bixel_w: usize) -> Result<()> {
    if bixel_h == 0 || bixel_w == 0 {
        return Err(Error::invalid(format!(
            "bixel size must be positive, got {bixel_h}x{bixel_w}"
        )));
    }
    if !img.height().is_multiple_of(bixel_h) || !img.width().is_multiple_of(bixel_w) {
        return Err(Error::mismatch(format!(
            "{}x{} image is not a multiple of the {bixel_h}x{bixel_w} bixel",
            img.height(),
            img.width()
        )));
    }
    Ok(())
}

/// Flattens every block of a grid-aligned image, in grid order.
pub fn flatten_blocks(img: &ImageTensor, bixel_h: usize, bixel_w: usize) -> Result<Vec<Vec<f64>>> {
    check_grid(img, bixel_h, bixel_w)?;
    let c = img.channels();
    let (rows, cols) = (img.height() / bixel_h, img.width() / bixel_w);
    let span = bixel_w * c;
    let data = img.data();
    let mut blocks = Vec::with_capacity(rows * cols);
    for gr in 0..rows {
        for gc in 0..cols {
            let mut block = Vec::with_capacity(bixel_h * span);
            for r in 0..bixel_h {
                let start = img.index(gr * bixel_h + r, gc * bixel_w, 0);
                block.extend_from_slice(&data[start..start + span]);
            }
            blocks.push(block);
        }
    }
    Ok(blocks)
}

/// Neumaier-compensated sum. Block sums feed bin assignment, where a
/// rounding error of one ulp can move a block across an edge, so they are
/// accumulated accurately rather than left to summation order.
pub fn compensated_sum(values: &[f64]) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for &v in values {
        let t = sum + v;
        carry += if sum.abs() >= v.abs() {
            (sum - t) + v
        } else {
            (v - t) + sum
        };
        sum = t;
    }
    sum + carry
}

/// Splits a padded image into bixels and records each block's sum and
/// weight vector.
pub fn decompose(
    img: &ImageTensor,
    bixel_h: usize,
    bixel_w: usize,
    pad: PadRecord,
) -> Result<BlockDecomposition> {
    check_grid(img, bixel_h, bixel_w)?;
    if pad.padded_height != img.height() || pad.padded_width != img.width() {
        return Err(Error::mismatch("pad record does not describe this image"));
    }
    let blocks: Vec<WeightVector> = flatten_blocks(img, bixel_h, bixel_w)?
        .into_iter()
        .map(WeightVector::from_intensities)
        .collect();
    Ok(BlockDecomposition {
        bixel_h,
        bixel_w,
        grid_rows: img.height() / bixel_h,
        grid_cols: img.width() / bixel_w,
        channels: img.channels(),
        sums: blocks.iter().map(WeightVector::sum).collect(),
        blocks,
        pad,
    })
}

/// Inverse of the block enumeration: places one flattened block per grid
/// cell and returns the padded image.
pub fn reassemble(decomp: &BlockDecomposition, block_pixels: &[Vec<f64>]) -> Result<ImageTensor> {
    if block_pixels.len() != decomp.block_count() {
        return Err(Error::mismatch(format!(
            "expected {} blocks, got {}",
            decomp.block_count(),
            block_pixels.len()
        )));
    }
    let m = decomp.block_len();
    if let Some((b, v)) = block_pixels.iter().enumerate().find(|(_, v)| v.len() != m) {
        return Err(Error::mismatch(format!(
            "block {b} has length {}, expected {m}",
            v.len()
        )));
    }
    let c = decomp.channels;
    let height = decomp.grid_rows * decomp.bixel_h;
    let width = decomp.grid_cols * decomp.bixel_w;
    let span = decomp.bixel_w * c;
    let mut data = vec![0.0; height * width * c];
    for (b, block) in block_pixels.iter().enumerate() {
        let (gr, gc) = (b / decomp.grid_cols, b % decomp.grid_cols);
        for (r, row) in block.chunks_exact(span).enumerate() {
            let start = ((gr * decomp.bixel_h + r) * width + gc * decomp.bixel_w) * c;
            data[start..start + span].copy_from_slice(row);
        }
    }
    ImageTensor::new(height, width, c, data)
}

// Sidecar container, all integers and floats little-endian:
//
//   magic        b"BXQD"
//   version      u32 = 1
//   layout       u32 = 0   (row-major (row, column, channel) inside a block)
//   bixel_h, bixel_w, grid_rows, grid_cols, channels               u32 x5
//   original_h, original_w, padded_h, padded_w                     u32 x4
//   sums         f64 x (grid_rows * grid_cols)
//   weights      f64 x (grid_rows * grid_cols * M), block after block
const SIDECAR_MAGIC: &[u8; 4] = b"BXQD";
const SIDECAR_VERSION: u32 = 1;
const LAYOUT_ROW_MAJOR: u32 = 0;

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v)
        .map_err(|_| Error::invalid(format!("{what} {v} does not fit the sidecar format")))
}

pub fn write_sidecar<W: Write>(decomp: &BlockDecomposition, mut out: W) -> Result<()> {
    out.write_all(SIDECAR_MAGIC)?;
    let header = [
        SIDECAR_VERSION,
        LAYOUT_ROW_MAJOR,
        to_u32(decomp.bixel_h, "bixel height")?,
        to_u32(decomp.bixel_w, "bixel width")?,
        to_u32(decomp.grid_rows, "grid rows")?,
        to_u32(decomp.grid_cols, "grid columns")?,
        to_u32(decomp.channels, "channels")?,
        to_u32(decomp.pad.original_height, "height")?,
        to_u32(decomp.pad.original_width, "width")?,
        to_u32(decomp.pad.padded_height, "padded height")?,
        to_u32(decomp.pad.padded_width, "padded width")?,
    ];
    for v in header {
        out.write_all(&v.to_le_bytes())?;
    }
    for s in &decomp.sums {
        out.write_all(&s.to_le_bytes())?;
    }
    for block in &decomp.blocks {
        for w in block.weights() {
            out.write_all(&w.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_sidecar<R: Read>(mut input: R) -> Result<BlockDecomposition> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    let mut cursor = bytes.as_slice();
    let mut take = |n: usize| -> Result<&[u8]> {
        if cursor.len() < n {
            return Err(Error::Malformed("sidecar truncated".into()));
        }
        let (head, rest) = cursor.split_at(n);
        cursor = rest;
        Ok(head)
    };
    if take(4)? != SIDECAR_MAGIC {
        return Err(Error::Malformed("not a bixel sidecar (bad magic)".into()));
    }
    let mut header = [0usize; 11];
    for h in header.iter_mut() {
        *h = u32::from_le_bytes(take(4)?.try_into().unwrap()) as usize;
    }
    let [version, layout, bixel_h, bixel_w, grid_rows, grid_cols, channels, oh, ow, ph, pw] =
        header;
    if version as u32 != SIDECAR_VERSION || layout as u32 != LAYOUT_ROW_MAJOR {
        return Err(Error::Malformed(format!(
            "unsupported sidecar version {version} layout {layout}"
        )));
    }
    if bixel_h == 0 || bixel_w == 0 || !(channels == 1 || channels == 3) {
        return Err(Error::Malformed("invalid sidecar geometry".into()));
    }
    if ph != grid_rows * bixel_h
        || pw != grid_cols * bixel_w
        || oh > ph
        || ow > pw
        || oh == 0
        || ow == 0
    {
        return Err(Error::Malformed("inconsistent sidecar geometry".into()));
    }
    let n_blocks = grid_rows * grid_cols;
    let m = bixel_h * bixel_w * channels;
    let mut read_f64s = |n: usize| -> Result<Vec<f64>> {
        let raw = take(
            n.checked_mul(8)
                .ok_or_else(|| Error::Malformed("sidecar too large".into()))?,
        )?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    };
    let sums = read_f64s(n_blocks)?;
    let weights = read_f64s(n_blocks * m)?;
    if sums
        .iter()
        .chain(&weights)
        .any(|v| !v.is_finite() || *v < 0.0)
    {
        return Err(Error::Malformed(
            "sidecar contains negative or non-finite values".into(),
        ));
    }
    let blocks: Vec<WeightVector> = weights
        .chunks_exact(m)
        .zip(&sums)
        .map(|(w, &s)| WeightVector::from_parts(w, s))
        .collect();
    Ok(BlockDecomposition {
        bixel_h,
        bixel_w,
        grid_rows,
        grid_cols,
        channels,
        sums,
        blocks,
        pad: PadRecord {
            original_height: oh,
            original_width: ow,
            padded_height: ph,
            padded_width: pw,
        },
    })
}
