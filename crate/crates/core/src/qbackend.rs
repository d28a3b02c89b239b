//! Simulated quantum backend for amplitude-embedded histograms.
//!
//! The embedded state has real, non-negative amplitudes and is measured in
//! the computational basis, so the ideal outcome distribution is
//! `P_k = a_k²` and a finite-shot run is a multinomial draw from it. No
//! device noise is modeled.
//!
//! Shots are drawn with ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded from a
//! `u64`, one uniform `f64` per shot mapped through the cumulative
//! distribution. The same `(state, shots, seed)` gives the same counts on
//! every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histencode::AmplitudeVector;

/// Shot count used when none is given.
pub const DEFAULT_SHOTS: u64 = 4096;

/// Squared-norm tolerance accepted by [`embed`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// `ceil(log2(x))` for `x ≥ 1`, in integer arithmetic.
pub fn ceil_log2(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::invalid("log2 of zero"));
    }
    Ok(u64::BITS - (x - 1).leading_zeros())
}

/// Qubits needed to hold `bins` amplitudes.
pub fn required_qubits(bins: u64) -> Result<u32> {
    if bins < 1 {
        return Err(Error::invalid("bin count must be at least 1"));
    }
    ceil_log2(bins)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum Backend {
    /// Exact probabilities, no sampling.
    Ideal,
    /// Finite-shot multinomial sampling.
    Sampled { shots: u64, seed: u64 },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Sampled {
            shots: DEFAULT_SHOTS,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    qubits: u32,
    amplitudes: Vec<f64>,
}

impl QuantumState {
    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Loads an amplitude vector as an `n`-qubit state.
pub fn embed(amps: &AmplitudeVector) -> Result<QuantumState> {
    let norm: f64 = amps.amplitudes().iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::NormViolation(norm));
    }
    Ok(QuantumState {
        qubits: amps.qubits(),
        amplitudes: amps.amplitudes().to_vec(),
    })
}

pub fn ideal_probabilities(state: &QuantumState) -> Vec<f64> {
    state.amplitudes.iter().map(|a| a * a).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub shots: u64,
    pub counts: Vec<u64>,
    pub seed: u64,
}

impl ShotRecord {
    /// Observed outcome frequencies `c_k / S`.
    pub fn frequencies(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }
}

/// Measures `state` `shots` times.
pub fn sample(state: &QuantumState, shots: u64, seed: u64) -> Result<ShotRecord> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    let probs = ideal_probabilities(state);
    let cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    // rounding can leave cdf.last() a hair below 1; such draws go to the
    // last outcome that has probability mass
    let last_live = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.partition_point(|&c| c <= u).min(last_live);
        counts[k] += 1;
    }
    Ok(ShotRecord {
        shots,
        counts,
        seed,
    })
}

/// Scales measured frequencies back to (fractional) bin counts:
/// `ĥ_k = c_k / S × n_blocks`.
pub fn estimate_histogram(rec: &ShotRecord, n_blocks: u64) -> Result<Vec<f64>> {
    if n_blocks == 0 {
        return Err(Error::invalid("block count must be at least 1"));
    }
    if rec.shots == 0 {
        return Err(Error::ZeroShots);
    }
    Ok(rec
        .counts
        .iter()
        .map(|&c| c as f64 / rec.shots as f64 * n_blocks as f64)
        .collect())
}

/// Ideal-backend counterpart of [`estimate_histogram`]: `P_k × n_blocks`.
pub fn expected_histogram(probabilities: &[f64], n_blocks: u64) -> Vec<f64> {
    probabilities.iter().map(|p| p * n_blocks as f64).collect()
}
