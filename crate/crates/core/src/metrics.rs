//! Fidelity metrics and qubit accounting.

use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::imageio::ImageTensor;
use crate::qbackend::ceil_log2;

/// Peak signal value for normalized intensities.
pub const MAX_INTENSITY: f64 = 1.0;

/// Mean squared error over every sample of two equally shaped images.
pub fn mse(a: &ImageTensor, b: &ImageTensor) -> Result<f64> {
    if !a.same_shape(b) {
        return Err(Error::mismatch(format!(
            "{}x{}x{} vs {}x{}x{}",
            a.height(),
            a.width(),
            a.channels(),
            b.height(),
            b.width(),
            b.channels()
        )));
    }
    let total: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(total / a.len() as f64)
}

/// PSNR in dB with `MAX = 1`; `+inf` for a perfect match.
pub fn psnr(mse_value: f64) -> Result<f64> {
    if mse_value.is_nan() || mse_value < 0.0 {
        return Err(Error::NegativeMse(mse_value));
    }
    if mse_value == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (MAX_INTENSITY * MAX_INTENSITY / mse_value).log10())
}

const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Total variation distance `½ Σ |p_k − q_k|`.
pub fn tvd(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::mismatch(format!(
            "distributions of length {} and {}",
            p.len(),
            q.len()
        )));
    }
    for d in [p, q] {
        if d.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDistribution(
                "entries must be finite and non-negative".into(),
            ));
        }
        let total: f64 = d.iter().sum();
        if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
    }
    let d = 0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(d.min(1.0))
}

/// Quantum image encodings compared by qubit cost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE", tag = "method")]
pub enum EncodingScheme {
    /// Position register plus one angle qubit.
    Frqi,
    /// Position register plus a `bit_depth`-qubit value register.
    Neqr { bit_depth: u32 },
    /// Position register plus two color qubits.
    Ncqi,
    /// Histogram amplitude embedding; independent of the pixel count.
    Proposed { bins: u64 },
}

impl EncodingScheme {
    pub fn name(&self) -> &'static str {
        match self {
            EncodingScheme::Frqi => "FRQI",
            EncodingScheme::Neqr { .. } => "NEQR",
            EncodingScheme::Ncqi => "NCQI",
            EncodingScheme::Proposed { .. } => "PROPOSED",
        }
    }
}

/// Qubits `scheme` needs for an image of `n_pixels` pixels.
pub fn qubit_accounting(n_pixels: u64, scheme: EncodingScheme) -> Result<u32> {
    let position = || {
        if n_pixels == 0 {
            Err(Error::invalid("pixel count must be at least 1"))
        } else {
            ceil_log2(n_pixels)
        }
    };
    match scheme {
        EncodingScheme::Frqi => Ok(position()? + 1),
        EncodingScheme::Neqr { bit_depth } => {
            if bit_depth == 0 {
                return Err(Error::invalid("NEQR bit depth must be at least 1"));
            }
            Ok(position()? + bit_depth)
        }
        EncodingScheme::Ncqi => Ok(position()? + 2),
        EncodingScheme::Proposed { bins } => {
            if bins == 0 {
                return Err(Error::invalid("bin count must be at least 1"));
            }
            ceil_log2(bins)
        }
    }
}

/// Wall-clock seconds of local computation only.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub embed_s: f64,
    pub recon_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FidelityReport {
    pub mse: f64,
    #[serde(serialize_with = "serialize_psnr")]
    pub psnr_db: f64,
    pub tvd: Option<f64>,
    pub clip_count: u64,
    pub timings: Option<Timings>,
}

/// Writes `+inf` as the string `"inf"`; JSON has no infinity literal.
pub fn serialize_psnr<S: Serializer>(value: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_infinite() && value.is_sign_positive() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*value)
    }
}

/// Text form used in CSV output.
pub fn format_psnr(value: f64) -> String {
    if value.is_infinite() && value.is_sign_positive() {
        "inf".to_string()
    } else {
        value.to_string()
    }
}
