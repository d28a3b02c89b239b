//! Machine-readable run reports (JSON and CSV).
//!
//! Reports carry everything needed to redo the pipeline by hand: geometry,
//! bin edges and counts, measured counts, seeds and per-block sums. Floats
//! use the shortest representation that parses back to the same `f64`.
//! Timings are left out unless requested so that identical runs produce
//! identical bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histencode::BinRange;
use crate::metrics::{format_psnr, FidelityReport};
use crate::pipeline::{PipelineConfig, Prepared, RunOutcome, SweepRow};
use crate::qbackend::Backend;
use crate::reconstruct::ReconMode;

/// Header of the sweep CSV.
pub const SWEEP_HEADER: [&str; 7] = [
    "bins", "qubits", "mse", "psnr_db", "tvd", "embed_s", "recon_s",
];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub bixel_h: usize,
    pub bixel_w: usize,
    pub bins: usize,
    pub qubits: u32,
    pub backend: String,
    pub shots: Option<u64>,
    pub seed: Option<u64>,
    pub bin_range: BinRange,
    pub recon: ReconMode,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ImageEcho {
    pub height: usize,
    pub width: usize,
    pub channels: usize,
    pub padded_height: usize,
    pub padded_width: usize,
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub block_len: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HistogramEcho {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    /// Measured counts scaled back to blocks; fractional, not rounded.
    pub estimated_counts: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuantumEcho {
    pub qubits: u32,
    pub amplitudes: Vec<f64>,
    pub ideal_probabilities: Vec<f64>,
    pub shot_counts: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockEcho {
    pub sums: Vec<f64>,
    pub reconstructed_sums: Vec<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct FileEcho {
    pub input_bytes: Option<u64>,
    /// The original re-encoded with the same PNG settings as the output.
    pub original_png_bytes: u64,
    pub reconstructed_png_bytes: u64,
    pub output: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressReport {
    pub tool: String,
    pub version: String,
    pub config: ConfigEcho,
    pub image: ImageEcho,
    pub histogram: HistogramEcho,
    pub quantum: QuantumEcho,
    pub blocks: BlockEcho,
    pub fidelity: FidelityReport,
    pub mse_bound: f64,
    pub mse_bound_ok: bool,
    pub files: FileEcho,
    pub notes: Vec<String>,
}

/// Subset of a JSON report needed to reconstruct from a sidecar.
#[derive(Clone, Debug, Deserialize)]
pub struct ReportHistogramView {
    pub config: ConfigEcho,
    pub image: ImageEcho,
    pub histogram: HistogramEcho,
}

pub fn backend_label(backend: &Backend) -> &'static str {
    match backend {
        Backend::Ideal => "ideal",
        Backend::Sampled { .. } => "sampled",
    }
}

pub fn build_report(
    input: &str,
    config: &PipelineConfig,
    prepared: &Prepared,
    outcome: &RunOutcome,
    files: FileEcho,
    include_timings: bool,
) -> CompressReport {
    let d = &prepared.decomposition;
    let pad = d.pad();
    let (shots, seed) = match config.backend {
        Backend::Ideal => (None, None),
        Backend::Sampled { shots, seed } => (Some(shots), Some(seed)),
    };
    let mut fidelity = outcome.fidelity.clone();
    if !include_timings {
        fidelity.timings = None;
    }
    let mut notes = vec![
        "estimated_counts are fractional: measured frequency times block count".to_string(),
        "timings cover local computation only".to_string(),
    ];
    if config.recon == ReconMode::Measured {
        notes.push("recon=measured scales bin centers by estimated/true counts".to_string());
    }
    CompressReport {
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: ConfigEcho {
            input: input.to_string(),
            bixel_h: config.bixel_h,
            bixel_w: config.bixel_w,
            bins: config.bins,
            qubits: outcome.qubits,
            backend: backend_label(&config.backend).to_string(),
            shots,
            seed,
            bin_range: config.bin_range,
            recon: config.recon,
        },
        image: ImageEcho {
            height: pad.original_height,
            width: pad.original_width,
            channels: d.channels(),
            padded_height: pad.padded_height,
            padded_width: pad.padded_width,
            grid_rows: d.grid_rows(),
            grid_cols: d.grid_cols(),
            block_len: d.block_len(),
        },
        histogram: HistogramEcho {
            edges: outcome.histogram.edges().to_vec(),
            counts: outcome.histogram.counts().to_vec(),
            estimated_counts: outcome.estimated_counts.clone(),
        },
        quantum: QuantumEcho {
            qubits: outcome.qubits,
            amplitudes: outcome.amplitudes.amplitudes().to_vec(),
            ideal_probabilities: outcome.probabilities.clone(),
            shot_counts: outcome.shots.as_ref().map(|s| s.counts.clone()),
        },
        blocks: BlockEcho {
            sums: d.sums().to_vec(),
            reconstructed_sums: outcome.reconstruction.reconstructed_sums.clone(),
        },
        fidelity,
        mse_bound: outcome.mse_bound,
        mse_bound_ok: outcome.mse_bound_ok,
        files,
        notes,
    }
}

pub fn write_json<W: Write>(report: &CompressReport, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report).map_err(|e| Error::Io(e.into()))?;
    out.write_all(b"\n")?;
    Ok(())
}

fn opt(v: Option<impl ToString>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// One-row CSV summary of a compress run.
pub fn write_csv<W: Write>(report: &CompressReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let c = &report.config;
    let f = &report.fidelity;
    w.write_record([
        "input",
        "bins",
        "qubits",
        "bixel_h",
        "bixel_w",
        "backend",
        "shots",
        "seed",
        "mse",
        "psnr_db",
        "tvd",
        "clip_count",
        "mse_bound",
        "mse_bound_ok",
        "original_png_bytes",
        "reconstructed_png_bytes",
        "embed_s",
        "recon_s",
    ])
    .map_err(csv_error)?;
    w.write_record([
        c.input.clone(),
        c.bins.to_string(),
        c.qubits.to_string(),
        c.bixel_h.to_string(),
        c.bixel_w.to_string(),
        c.backend.clone(),
        opt(c.shots),
        opt(c.seed),
        f.mse.to_string(),
        format_psnr(f.psnr_db),
        opt(f.tvd),
        f.clip_count.to_string(),
        report.mse_bound.to_string(),
        report.mse_bound_ok.to_string(),
        report.files.original_png_bytes.to_string(),
        report.files.reconstructed_png_bytes.to_string(),
        opt(f.timings.map(|t| t.embed_s)),
        opt(f.timings.map(|t| t.recon_s)),
    ])
    .map_err(csv_error)?;
    w.flush()?;
    Ok(())
}

/// Plot-ready sweep table with the fixed [`SWEEP_HEADER`].
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_error)?;
    for r in rows {
        w.write_record([
            r.bins.to_string(),
            r.qubits.to_string(),
            r.mse.to_string(),
            format_psnr(r.psnr_db),
            opt(r.tvd),
            r.embed_s.to_string(),
            r.recon_s.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_header_is_exact() {
        let mut buf = Vec::new();
        let rows = vec![SweepRow {
            bins: 1,
            qubits: 0,
            mse: 0.0,
            psnr_db: f64::INFINITY,
            tvd: None,
            embed_s: 0.5,
            recon_s: 0.25,
            mse_bound_ok: true,
        }];
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "bins,qubits,mse,psnr_db,tvd,embed_s,recon_s"
        );
        assert_eq!(lines.next().unwrap(), "1,0,0,inf,,0.5,0.25");
    }
}
