//! Image recovery from bin centers and the stored block weights.

use serde::{Deserialize, Serialize};

use crate::bixelize::{reassemble, BlockDecomposition, WeightVector};
use crate::error::{Error, Result};
use crate::histencode::BinnedHistogram;
use crate::imageio::{crop, ImageTensor};

/// How reconstructed block sums are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconMode {
    /// Center of the bin each block was originally assigned to.
    #[default]
    Paper,
    /// Bin center scaled by the measured-to-true count ratio `ĥ_k / h_k`.
    /// Lets shot noise reach the image; off by default.
    Measured,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReconstructionResult {
    pub image: ImageTensor,
    pub reconstructed_sums: Vec<f64>,
    pub clip_count: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Redistributed {
    pub blocks: Vec<Vec<f64>>,
    pub clip_count: u64,
}

/// `S'_b` = center of block `b`'s bin.
pub fn reconstruct_sums(hist: &BinnedHistogram) -> Vec<f64> {
    let centers: Vec<f64> = (0..hist.bin_count())
        .map(|k| hist.bin_center(k).expect("k < B"))
        .collect();
    hist.assignments().iter().map(|&k| centers[k]).collect()
}

/// Block sums for [`ReconMode::Measured`]. Bins with `h_k = 0` never hold
/// a block, so their ratio is irrelevant.
pub fn measured_sums(hist: &BinnedHistogram, estimated_counts: &[f64]) -> Result<Vec<f64>> {
    if estimated_counts.len() < hist.bin_count() {
        return Err(Error::mismatch(format!(
            "{} estimated counts for {} bins",
            estimated_counts.len(),
            hist.bin_count()
        )));
    }
    let counts = hist.counts();
    Ok(hist
        .assignments()
        .iter()
        .map(|&k| hist.bin_center(k).expect("k < B") * estimated_counts[k] / counts[k] as f64)
        .collect())
}

/// `r_i = w_i × S'_b` for every block, clamped to `[0, 1]`.
pub fn redistribute(weights: &[WeightVector], sums: &[f64]) -> Result<Redistributed> {
    if weights.len() != sums.len() {
        return Err(Error::mismatch(format!(
            "{} weight vectors for {} sums",
            weights.len(),
            sums.len()
        )));
    }
    let mut clip_count = 0;
    let blocks = weights
        .iter()
        .zip(sums)
        .map(|(w, &s)| {
            let mut px = w.scaled(s);
            for r in px.iter_mut() {
                if *r > 1.0 || *r < 0.0 {
                    *r = r.clamp(0.0, 1.0);
                    clip_count += 1;
                }
            }
            px
        })
        .collect();
    Ok(Redistributed { blocks, clip_count })
}

/// Rebuilds the original-size image from explicit block sums.
pub fn reconstruct_with_sums(
    decomp: &BlockDecomposition,
    sums: Vec<f64>,
) -> Result<ReconstructionResult> {
    let Redistributed { blocks, clip_count } = redistribute(decomp.blocks(), &sums)?;
    let padded = reassemble(decomp, &blocks)?;
    let image = crop(&padded, decomp.pad())?;
    Ok(ReconstructionResult {
        image,
        reconstructed_sums: sums,
        clip_count,
    })
}

pub fn reconstruct_image(
    decomp: &BlockDecomposition,
    hist: &BinnedHistogram,
) -> Result<ReconstructionResult> {
    if hist.assignments().len() != decomp.block_count() {
        return Err(Error::mismatch(format!(
            "histogram covers {} blocks, decomposition has {}",
            hist.assignments().len(),
            decomp.block_count()
        )));
    }
    reconstruct_with_sums(decomp, reconstruct_sums(hist))
}
