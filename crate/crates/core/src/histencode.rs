//! Global histogram of block sums and its square-root amplitude encoding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qbackend::required_qubits;

/// Interval the `B` uniform bins cover.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinRange {
    /// `[min(sums), max(sums)]`, the observed extent.
    #[default]
    Data,
    /// `[0, M]`, every sum a block of length `M` could take.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinnedHistogram {
    edges: Vec<f64>,
    counts: Vec<u64>,
    assignments: Vec<usize>,
}

impl BinnedHistogram {
    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Bin index of every block, in block order.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn range(&self) -> (f64, f64) {
        (self.edges[0], self.edges[self.bin_count()])
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.range();
        (hi - lo) / self.bin_count() as f64
    }

    pub fn is_degenerate(&self) -> bool {
        let (lo, hi) = self.range();
        lo == hi
    }

    /// Midpoint of bin `k`. A zero-width histogram returns its common edge.
    pub fn bin_center(&self, k: usize) -> Result<f64> {
        if k >= self.bin_count() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.bin_count(),
            });
        }
        if self.is_degenerate() {
            return Ok(self.edges[0]);
        }
        Ok((self.edges[k] + self.edges[k + 1]) / 2.0)
    }

    /// Bin holding `value`. A value on an interior edge goes to the lower
    /// bin, so bin `k` is `(edges[k], edges[k+1]]` except bin 0, which also
    /// includes `edges[0]`. Values outside the range clamp to the end bins.
    pub fn bin_of(&self, value: f64) -> usize {
        bin_index(&self.edges, value)
    }
}

fn bin_index(edges: &[f64], value: f64) -> usize {
    let bins = edges.len() - 1;
    let (lo, hi) = (edges[0], edges[bins]);
    if value <= lo || lo == hi {
        return 0;
    }
    if value >= hi {
        return bins - 1;
    }
    let guess = ((value - lo) / (hi - lo) * bins as f64).ceil() as usize;
    let mut k = guess.saturating_sub(1).min(bins - 1);
    // the stored edges decide, not the arithmetic guess
    while k > 0 && value <= edges[k] {
        k -= 1;
    }
    while k < bins - 1 && value > edges[k + 1] {
        k += 1;
    }
    k
}

fn uniform_edges(lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut edges: Vec<f64> = (0..=bins)
        .map(|k| lo + (hi - lo) * k as f64 / bins as f64)
        .collect();
    edges[bins] = hi;
    edges
}

fn check_sums(sums: &[f64], bins: usize) -> Result<()> {
    if bins < 1 {
        return Err(Error::invalid("bin count must be at least 1"));
    }
    if sums.is_empty() {
        return Err(Error::EmptyInput("no block sums to histogram".into()));
    }
    if sums.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("block sums must be finite"));
    }
    Ok(())
}

/// Histograms `sums` into `bins` uniform bins over `[min, max]` of the data.
pub fn build_histogram(sums: &[f64], bins: usize) -> Result<BinnedHistogram> {
    check_sums(sums, bins)?;
    let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    histogram_with_edges(sums, uniform_edges(lo, hi, bins))
}

/// Histograms `sums` into `bins` uniform bins over `[lo, hi]`.
pub fn build_histogram_in_range(
    sums: &[f64],
    bins: usize,
    lo: f64,
    hi: f64,
) -> Result<BinnedHistogram> {
    check_sums(sums, bins)?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid(format!("invalid bin range [{lo}, {hi}]")));
    }
    if let Some(s) = sums.iter().find(|&&s| s < lo || s > hi) {
        return Err(Error::invalid(format!(
            "block sum {s} outside bin range [{lo}, {hi}]"
        )));
    }
    histogram_with_edges(sums, uniform_edges(lo, hi, bins))
}

/// Bins `sums` against explicit ascending edges, e.g. ones read back from a
/// report.
pub fn histogram_with_edges(sums: &[f64], edges: Vec<f64>) -> Result<BinnedHistogram> {
    if edges.len() < 2 {
        return Err(Error::invalid("need at least two bin edges"));
    }
    check_sums(sums, edges.len() - 1)?;
    let degenerate = edges[0] == edges[edges.len() - 1];
    let ascending = edges.windows(2).all(|w| w[0] < w[1]);
    if !(ascending || degenerate && edges.windows(2).all(|w| w[0] == w[1])) {
        return Err(Error::invalid("bin edges must be strictly ascending"));
    }
    let mut counts = vec![0u64; edges.len() - 1];
    let assignments: Vec<usize> = sums
        .iter()
        .map(|&s| {
            let k = bin_index(&edges, s);
            counts[k] += 1;
            k
        })
        .collect();
    Ok(BinnedHistogram {
        edges,
        counts,
        assignments,
    })
}

/// Square-root-normalized histogram, zero-padded to `2^n` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeVector {
    qubits: u32,
    amplitudes: Vec<f64>,
}

impl AmplitudeVector {
    /// Wraps raw amplitudes. The length must be a power of two and every
    /// entry finite and non-negative; normalization is checked by
    /// [`crate::qbackend::embed`].
    pub fn new(amplitudes: Vec<f64>) -> Result<Self> {
        if !amplitudes.len().is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude length {} is not a power of two",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.is_finite() || *a < 0.0) {
            return Err(Error::invalid("amplitudes must be finite and non-negative"));
        }
        let qubits = amplitudes.len().trailing_zeros();
        Ok(Self { qubits, amplitudes })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }
}

/// `a_k = sqrt(h_k) / sqrt(sum h)`, padded with zeros to `2^ceil(log2 B)`.
pub fn to_amplitudes(hist: &BinnedHistogram) -> Result<AmplitudeVector> {
    amplitudes_from_counts(hist.counts())
}

pub fn amplitudes_from_counts(counts: &[u64]) -> Result<AmplitudeVector> {
    let qubits = required_qubits(counts.len() as u64)?;
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput("histogram has no counts".into()));
    }
    let norm = (total as f64).sqrt();
    let mut amplitudes = vec![0.0; 1usize << qubits];
    for (a, &h) in amplitudes.iter_mut().zip(counts) {
        *a = (h as f64).sqrt() / norm;
    }
    Ok(AmplitudeVector { qubits, amplitudes })
}
