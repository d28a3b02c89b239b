#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bixelq"))
}

pub fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("failed to spawn bixelq")
}

pub fn corpus_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus")
}

pub fn corpus() -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .collect();
    files.sort();
    files
}

/// Binary PPM (P6) or PGM (P5) bytes.
pub fn netpbm(height: usize, width: usize, channels: usize, samples: &[u8]) -> Vec<u8> {
    assert_eq!(samples.len(), height * width * channels);
    let magic = if channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(samples);
    out
}

/// 4×4 RGB image whose 2×2 blocks sum to 3, 3, 6 and 12 (row-major).
///
/// Each block holds 12 samples: 3 = (9·64 + 3·63)/255, 6 = (6·128 +
/// 6·127)/255 and 12 is all 255.
pub fn worked_example_samples() -> Vec<u8> {
    let block3: Vec<u8> = [64u8; 9].into_iter().chain([63u8; 3]).collect();
    let block6: Vec<u8> = [128u8; 6].into_iter().chain([127u8; 6]).collect();
    let block12 = vec![255u8; 12];
    let blocks = [&block3, &block3, &block6, &block12];
    let mut img = vec![0u8; 4 * 4 * 3];
    for (b, samples) in blocks.iter().enumerate() {
        let (br, bc) = (b / 2, b % 2);
        for (i, &v) in samples.iter().enumerate() {
            let (pix, ch) = (i / 3, i % 3);
            let (r, c) = (br * 2 + pix / 2, bc * 2 + pix % 2);
            img[(r * 4 + c) * 3 + ch] = v;
        }
    }
    img
}

/// 512×512 RGB linear ramp: R = x/2, G = y/2, B = (x+y)/4 (integer division).
pub fn ramp_samples() -> Vec<u8> {
    let mut img = Vec::with_capacity(512 * 512 * 3);
    for y in 0..512usize {
        for x in 0..512usize {
            img.extend_from_slice(&[(x / 2) as u8, (y / 2) as u8, ((x + y) / 4) as u8]);
        }
    }
    img
}

pub fn assert_close(actual: &[f64], expected: &[f64], tol: f64, what: &str) {
    assert_eq!(actual.len(), expected.len(), "{what}: length");
    for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
        assert!((a - e).abs() < tol, "{what}[{i}]: {a} vs {e}");
    }
}

pub fn f64s(v: &serde_json::Value) -> Vec<f64> {
    v.as_array()
        .expect("array")
        .iter()
        .map(|x| x.as_f64().expect("number"))
        .collect()
}
