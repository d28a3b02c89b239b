//! Histogram-driven amplitude-embedding image compression.
//!
//! An image is cut into fixed-size blocks ("bixels"), each block is
//! summarized by its total intensity, and the block sums are quantized into
//! a `B`-bin histogram. The square-root-normalized histogram is loaded as
//! the amplitudes of an `n = ceil(log2 B)` qubit state on a simulated
//! backend. The image is rebuilt from bin centers redistributed through
//! each block's stored intra-block weights.
//!
//! ```no_run
//! use bixelq::{imageio, pipeline};
//!
//! let img = imageio::load_image("photo.png")?;
//! let out = pipeline::compress(&img, &pipeline::PipelineConfig::default())?;
//! println!("{} qubits, PSNR {:.2} dB", out.qubits, out.fidelity.psnr_db);
//! # Ok::<(), bixelq::Error>(())
//! ```

pub mod bixelize;
pub mod error;
pub mod histencode;
pub mod imageio;
pub mod metrics;
pub mod pipeline;
pub mod qbackend;
pub mod reconstruct;
pub mod report;

pub use error::{Error, Result};
