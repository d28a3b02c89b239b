//! End-to-end compression run shared by the CLI and the C API.

use std::time::Instant;

use crate::bixelize::{decompose, BlockDecomposition};
use crate::error::{Error, Result};
use crate::histencode::{
    build_histogram, build_histogram_in_range, to_amplitudes, AmplitudeVector, BinRange,
    BinnedHistogram,
};
use crate::imageio::{pad_to_grid, ImageTensor};
use crate::metrics::{mse, psnr, tvd, FidelityReport, Timings};
use crate::qbackend::{
    embed, estimate_histogram, expected_histogram, ideal_probabilities, sample, Backend, ShotRecord,
};
use crate::reconstruct::{
    measured_sums, reconstruct_image, reconstruct_with_sums, ReconMode, ReconstructionResult,
};

pub const DEFAULT_BIXEL: usize = 32;
pub const DEFAULT_BINS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PipelineConfig {
    pub bixel_h: usize,
    pub bixel_w: usize,
    pub bins: usize,
    pub backend: Backend,
    pub bin_range: BinRange,
    pub recon: ReconMode,
}

impl Default for PipelineConfig {
    /// 32×32 bixels, 32 bins, 4096 sampled shots with seed 0.
    fn default() -> Self {
        Self {
            bixel_h: DEFAULT_BIXEL,
            bixel_w: DEFAULT_BIXEL,
            bins: DEFAULT_BINS,
            backend: Backend::default(),
            bin_range: BinRange::Data,
            recon: ReconMode::Paper,
        }
    }
}

/// An image already padded and split into bixels. Reusable across bin
/// counts.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub original: ImageTensor,
    pub decomposition: BlockDecomposition,
}

pub fn prepare(img: &ImageTensor, bixel_h: usize, bixel_w: usize) -> Result<Prepared> {
    let (padded, pad) = pad_to_grid(img, bixel_h, bixel_w)?;
    let decomposition = decompose(&padded, bixel_h, bixel_w, pad)?;
    Ok(Prepared {
        original: img.clone(),
        decomposition,
    })
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub bins: usize,
    pub qubits: u32,
    pub histogram: BinnedHistogram,
    pub amplitudes: AmplitudeVector,
    pub probabilities: Vec<f64>,
    pub shots: Option<ShotRecord>,
    /// `ĥ_k` over all `2^n` outcomes.
    pub estimated_counts: Vec<f64>,
    pub reconstruction: ReconstructionResult,
    pub fidelity: FidelityReport,
    /// `((hi − lo) / 2B)²` for the histogram's range.
    pub mse_bound: f64,
    pub mse_bound_ok: bool,
}

pub fn histogram_for(
    decomp: &BlockDecomposition,
    bins: usize,
    range: BinRange,
) -> Result<BinnedHistogram> {
    match range {
        BinRange::Data => build_histogram(decomp.sums(), bins),
        BinRange::Full => {
            build_histogram_in_range(decomp.sums(), bins, 0.0, decomp.block_len() as f64)
        }
    }
}

pub fn run(prepared: &Prepared, config: &PipelineConfig) -> Result<RunOutcome> {
    let decomp = &prepared.decomposition;
    if decomp.bixel_h() != config.bixel_h || decomp.bixel_w() != config.bixel_w {
        return Err(Error::invalid("prepared image uses a different bixel size"));
    }
    let histogram = histogram_for(decomp, config.bins, config.bin_range)?;
    let n_blocks = decomp.block_count() as u64;

    let embed_start = Instant::now();
    let amplitudes = to_amplitudes(&histogram)?;
    let state = embed(&amplitudes)?;
    let probabilities = ideal_probabilities(&state);
    let (shots, estimated_counts, distance) = match config.backend {
        Backend::Ideal => (None, expected_histogram(&probabilities, n_blocks), None),
        Backend::Sampled { shots, seed } => {
            let rec = sample(&state, shots, seed)?;
            let est = estimate_histogram(&rec, n_blocks)?;
            let d = tvd(&rec.frequencies(), &probabilities)?;
            (Some(rec), est, Some(d))
        }
    };
    let embed_s = embed_start.elapsed().as_secs_f64();

    let recon_start = Instant::now();
    let reconstruction = match config.recon {
        ReconMode::Paper => reconstruct_image(decomp, &histogram)?,
        ReconMode::Measured => {
            reconstruct_with_sums(decomp, measured_sums(&histogram, &estimated_counts)?)?
        }
    };
    let recon_s = recon_start.elapsed().as_secs_f64();

    let mse_value = mse(&prepared.original, &reconstruction.image)?;
    let (lo, hi) = histogram.range();
    let half_width = (hi - lo) / (2.0 * config.bins as f64);
    let mse_bound = half_width * half_width;
    let fidelity = FidelityReport {
        mse: mse_value,
        psnr_db: psnr(mse_value)?,
        tvd: distance,
        clip_count: reconstruction.clip_count,
        timings: Some(Timings { embed_s, recon_s }),
    };
    Ok(RunOutcome {
        bins: config.bins,
        qubits: amplitudes.qubits(),
        histogram,
        amplitudes,
        probabilities,
        shots,
        estimated_counts,
        reconstruction,
        fidelity,
        mse_bound,
        mse_bound_ok: mse_value <= mse_bound,
    })
}

pub fn compress(img: &ImageTensor, config: &PipelineConfig) -> Result<RunOutcome> {
    run(&prepare(img, config.bixel_h, config.bixel_w)?, config)
}

/// One line of a bin-count sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub bins: usize,
    pub qubits: u32,
    pub mse: f64,
    pub psnr_db: f64,
    pub tvd: Option<f64>,
    pub embed_s: f64,
    pub recon_s: f64,
    pub mse_bound_ok: bool,
}

/// Seed used for the sweep row with `bins` bins.
pub fn row_seed(seed: u64, bins: usize) -> u64 {
    seed ^ bins as u64
}

/// Runs the pipeline once per bin count over a shared decomposition. The
/// sampled backend uses seed `seed ^ B` for row `B`.
pub fn sweep(
    prepared: &Prepared,
    base: &PipelineConfig,
    bins_list: &[usize],
) -> Result<Vec<SweepRow>> {
    if bins_list.is_empty() {
        return Err(Error::EmptyInput("no bin counts to sweep".into()));
    }
    bins_list
        .iter()
        .map(|&bins| {
            let backend = match base.backend {
                Backend::Sampled { shots, seed } => Backend::Sampled {
                    shots,
                    seed: row_seed(seed, bins),
                },
                Backend::Ideal => Backend::Ideal,
            };
            let out = run(
                prepared,
                &PipelineConfig {
                    bins,
                    backend,
                    ..*base
                },
            )?;
            let timings = out.fidelity.timings.unwrap_or_default();
            Ok(SweepRow {
                bins,
                qubits: out.qubits,
                mse: out.fidelity.mse,
                psnr_db: out.fidelity.psnr_db,
                tvd: out.fidelity.tvd,
                embed_s: timings.embed_s,
                recon_s: timings.recon_s,
                mse_bound_ok: out.mse_bound_ok,
            })
        })
        .collect()
}
