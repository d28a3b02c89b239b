//! C ABI for `bixelq`.
//!
//! Objects cross the boundary as opaque handles (`BqImage`, `BqRun`) that
//! the caller releases with the matching `*_free` function. Every fallible
//! call returns a [`BqStatus`]; on failure a message for the calling thread
//! is available from [`bq_last_error_message`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bixelq::histencode::BinRange;
use bixelq::imageio::{self, ImageTensor};
use bixelq::metrics::{qubit_accounting, EncodingScheme};
use bixelq::pipeline::{self, PipelineConfig, RunOutcome};
use bixelq::qbackend::{required_qubits, Backend};
use bixelq::reconstruct::ReconMode;
use bixelq::Error;

/// Status codes. Values above 2 match the CLI exit codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqStatus {
    Ok = 0,
    Internal = 1,
    NullPointer = 2,
    FileNotFound = 3,
    UnsupportedFormat = 4,
    CorruptImage = 5,
    Io = 6,
    InvalidParameter = 7,
    DimensionMismatch = 8,
    EmptyInput = 9,
    IndexOutOfRange = 10,
    NormViolation = 11,
    InvalidDistribution = 12,
    NegativeMse = 13,
    ZeroShots = 14,
    Malformed = 15,
}

impl From<&Error> for BqStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::FileNotFound(_) => BqStatus::FileNotFound,
            Error::UnsupportedFormat(_) => BqStatus::UnsupportedFormat,
            Error::CorruptImage(_) => BqStatus::CorruptImage,
            Error::Io(_) => BqStatus::Io,
            Error::InvalidParameter(_) => BqStatus::InvalidParameter,
            Error::DimensionMismatch(_) => BqStatus::DimensionMismatch,
            Error::EmptyInput(_) => BqStatus::EmptyInput,
            Error::IndexOutOfRange { .. } => BqStatus::IndexOutOfRange,
            Error::NormViolation(_) => BqStatus::NormViolation,
            Error::InvalidDistribution(_) => BqStatus::InvalidDistribution,
            Error::NegativeMse(_) => BqStatus::NegativeMse,
            Error::ZeroShots => BqStatus::ZeroShots,
            Error::Malformed(_) => BqStatus::Malformed,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqBackend {
    Ideal = 0,
    Sampled = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqBinRange {
    Data = 0,
    Full = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqReconMode {
    Paper = 0,
    Measured = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BqScheme {
    Frqi = 0,
    Neqr = 1,
    Ncqi = 2,
    Proposed = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BqConfig {
    pub bixel_h: u32,
    pub bixel_w: u32,
    pub bins: u32,
    pub backend: BqBackend,
    pub shots: u64,
    pub seed: u64,
    pub bin_range: BqBinRange,
    pub recon: BqReconMode,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct BqFidelity {
    pub mse: f64,
    /// `INFINITY` for a perfect reconstruction.
    pub psnr_db: f64,
    /// Total variation distance; only meaningful when `has_tvd` is 1.
    pub tvd: f64,
    pub has_tvd: u8,
    pub clip_count: u64,
    pub qubits: u32,
    pub mse_bound: f64,
    pub embed_s: f64,
    pub recon_s: f64,
}

/// Opaque normalized image.
pub struct BqImage(ImageTensor);

/// Opaque result of one compression run.
pub struct BqRun(RunOutcome);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn fail(e: Error) -> BqStatus {
    let status = BqStatus::from(&e);
    set_last_error(format!("{}: {e}", e.name()));
    status
}

fn null_arg(what: &str) -> BqStatus {
    set_last_error(format!("null-pointer: {what} must not be null"));
    BqStatus::NullPointer
}

/// Runs `f`, turning panics into `BqStatus::Internal`.
fn guard(f: impl FnOnce() -> BqStatus) -> BqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_last_error("internal: panic inside bixelq".into());
            BqStatus::Internal
        }
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call that fails on the same thread.
#[no_mangle]
pub extern "C" fn bq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Stable kebab-case name of a status code; never null.
#[no_mangle]
pub extern "C" fn bq_status_name(status: BqStatus) -> *const c_char {
    let s: &'static CStr = match status {
        BqStatus::Ok => c"ok",
        BqStatus::Internal => c"internal",
        BqStatus::NullPointer => c"null-pointer",
        BqStatus::FileNotFound => c"file-not-found",
        BqStatus::UnsupportedFormat => c"unsupported-format",
        BqStatus::CorruptImage => c"corrupt-image-data",
        BqStatus::Io => c"io-failure",
        BqStatus::InvalidParameter => c"invalid-parameter",
        BqStatus::DimensionMismatch => c"dimension-mismatch",
        BqStatus::EmptyInput => c"empty-input",
        BqStatus::IndexOutOfRange => c"index-out-of-range",
        BqStatus::NormViolation => c"norm-violation",
        BqStatus::InvalidDistribution => c"invalid-distribution",
        BqStatus::NegativeMse => c"negative-mse",
        BqStatus::ZeroShots => c"zero-shots",
        BqStatus::Malformed => c"malformed-data",
    };
    s.as_ptr()
}

/// 32×32 bixels, 32 bins, sampled backend with 4096 shots and seed 0.
#[no_mangle]
pub extern "C" fn bq_config_default() -> BqConfig {
    BqConfig {
        bixel_h: 32,
        bixel_w: 32,
        bins: 32,
        backend: BqBackend::Sampled,
        shots: 4096,
        seed: 0,
        bin_range: BqBinRange::Data,
        recon: BqReconMode::Paper,
    }
}

impl From<&BqConfig> for PipelineConfig {
    fn from(c: &BqConfig) -> Self {
        PipelineConfig {
            bixel_h: c.bixel_h as usize,
            bixel_w: c.bixel_w as usize,
            bins: c.bins as usize,
            backend: match c.backend {
                BqBackend::Ideal => Backend::Ideal,
                BqBackend::Sampled => Backend::Sampled {
                    shots: c.shots,
                    seed: c.seed,
                },
            },
            bin_range: match c.bin_range {
                BqBinRange::Data => BinRange::Data,
                BqBinRange::Full => BinRange::Full,
            },
            recon: match c.recon {
                BqReconMode::Paper => ReconMode::Paper,
                BqReconMode::Measured => ReconMode::Measured,
            },
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, BqStatus> {
    if path.is_null() {
        return Err(null_arg("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| fail(Error::InvalidParameter("path is not valid UTF-8".into())))
}

/// Loads a PNG, PGM or PPM file.
///
/// # Safety
/// `path` must be a nul-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bq_image_load(path: *const c_char, out: *mut *mut BqImage) -> BqStatus {
    guard(|| {
        if out.is_null() {
            return null_arg("out");
        }
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match imageio::load_image(path) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(BqImage(img)));
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Wraps `height × width × channels` 8-bit samples, row-major with
/// interleaved channels.
///
/// # Safety
/// `data` must point to `len` readable bytes and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bq_image_from_u8(
    data: *const u8,
    len: usize,
    height: u32,
    width: u32,
    channels: u32,
    out: *mut *mut BqImage,
) -> BqStatus {
    guard(|| {
        if data.is_null() {
            return null_arg("data");
        }
        if out.is_null() {
            return null_arg("out");
        }
        let expected = height as usize * width as usize * channels as usize;
        if len != expected {
            return fail(Error::DimensionMismatch(format!(
                "{len} bytes for {height}x{width}x{channels}"
            )));
        }
        let samples = std::slice::from_raw_parts(data, len);
        match ImageTensor::from_u8(height as usize, width as usize, channels as usize, samples) {
            Ok(img) => {
                *out = Box::into_raw(Box::new(BqImage(img)));
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `image` must be a live handle; output pointers may be null.
#[no_mangle]
pub unsafe extern "C" fn bq_image_dims(
    image: *const BqImage,
    height: *mut u32,
    width: *mut u32,
    channels: *mut u32,
) -> BqStatus {
    guard(|| {
        let Some(img) = image.as_ref() else {
            return null_arg("image");
        };
        let img = &img.0;
        for (p, v) in [
            (height, img.height()),
            (width, img.width()),
            (channels, img.channels()),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v as u32;
            }
        }
        BqStatus::Ok
    })
}

/// Copies the image as 8-bit samples (`round(v × 255)`).
///
/// # Safety
/// `image` must be live and `buf` must have room for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn bq_image_copy_u8(
    image: *const BqImage,
    buf: *mut u8,
    len: usize,
) -> BqStatus {
    guard(|| {
        let Some(img) = image.as_ref() else {
            return null_arg("image");
        };
        if buf.is_null() {
            return null_arg("buf");
        }
        let bytes = img.0.to_u8();
        if len < bytes.len() {
            return fail(Error::DimensionMismatch(format!(
                "buffer holds {len} bytes, need {}",
                bytes.len()
            )));
        }
        ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
        BqStatus::Ok
    })
}

/// Writes a PNG; the file size goes to `out_bytes` when non-null.
///
/// # Safety
/// `image` must be live, `path` nul-terminated.
#[no_mangle]
pub unsafe extern "C" fn bq_image_save_png(
    image: *const BqImage,
    path: *const c_char,
    out_bytes: *mut u64,
) -> BqStatus {
    guard(|| {
        let Some(img) = image.as_ref() else {
            return null_arg("image");
        };
        let path = match path_arg(path) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match imageio::save_image(&img.0, path) {
            Ok(n) => {
                if let Some(o) = out_bytes.as_mut() {
                    *o = n;
                }
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `image` must come from this library and not be freed twice. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn bq_image_free(image: *mut BqImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Runs the full pipeline on `image`.
///
/// # Safety
/// `image` and `config` must be valid; `out` receives a new handle.
#[no_mangle]
pub unsafe extern "C" fn bq_compress(
    image: *const BqImage,
    config: *const BqConfig,
    out: *mut *mut BqRun,
) -> BqStatus {
    guard(|| {
        let Some(img) = image.as_ref() else {
            return null_arg("image");
        };
        let Some(cfg) = config.as_ref() else {
            return null_arg("config");
        };
        if out.is_null() {
            return null_arg("out");
        }
        match pipeline::compress(&img.0, &PipelineConfig::from(cfg)) {
            Ok(run) => {
                *out = Box::into_raw(Box::new(BqRun(run)));
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `run` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_run_fidelity(run: *const BqRun, out: *mut BqFidelity) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        let Some(out) = out.as_mut() else {
            return null_arg("out");
        };
        let r = &run.0;
        let t = r.fidelity.timings.unwrap_or_default();
        *out = BqFidelity {
            mse: r.fidelity.mse,
            psnr_db: r.fidelity.psnr_db,
            tvd: r.fidelity.tvd.unwrap_or(0.0),
            has_tvd: u8::from(r.fidelity.tvd.is_some()),
            clip_count: r.fidelity.clip_count,
            qubits: r.qubits,
            mse_bound: r.mse_bound,
            embed_s: t.embed_s,
            recon_s: t.recon_s,
        };
        BqStatus::Ok
    })
}

unsafe fn copy_out<T: Copy>(src: &[T], buf: *mut T, len: usize, written: *mut usize) -> BqStatus {
    if let Some(w) = written.as_mut() {
        *w = src.len();
    }
    if buf.is_null() {
        // size query
        return BqStatus::Ok;
    }
    if len < src.len() {
        return fail(Error::DimensionMismatch(format!(
            "buffer holds {len} entries, need {}",
            src.len()
        )));
    }
    ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    BqStatus::Ok
}

/// Copies the `B` histogram counts. Pass a null `buf` to query the length
/// through `written`.
///
/// # Safety
/// `run` must be live; `buf` must hold `len` entries when non-null.
#[no_mangle]
pub unsafe extern "C" fn bq_run_histogram_counts(
    run: *const BqRun,
    buf: *mut u64,
    len: usize,
    written: *mut usize,
) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        copy_out(run.0.histogram.counts(), buf, len, written)
    })
}

/// Copies the `B + 1` bin edges.
///
/// # Safety
/// As for [`bq_run_histogram_counts`].
#[no_mangle]
pub unsafe extern "C" fn bq_run_bin_edges(
    run: *const BqRun,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        copy_out(run.0.histogram.edges(), buf, len, written)
    })
}

/// Copies the `2^n` ideal measurement probabilities.
///
/// # Safety
/// As for [`bq_run_histogram_counts`].
#[no_mangle]
pub unsafe extern "C" fn bq_run_probabilities(
    run: *const BqRun,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        copy_out(&run.0.probabilities, buf, len, written)
    })
}

/// Copies the per-block reconstructed sums.
///
/// # Safety
/// As for [`bq_run_histogram_counts`].
#[no_mangle]
pub unsafe extern "C" fn bq_run_reconstructed_sums(
    run: *const BqRun,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        copy_out(&run.0.reconstruction.reconstructed_sums, buf, len, written)
    })
}

/// New image handle holding the reconstruction.
///
/// # Safety
/// `run` must be live and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn bq_run_reconstructed_image(
    run: *const BqRun,
    out: *mut *mut BqImage,
) -> BqStatus {
    guard(|| {
        let Some(run) = run.as_ref() else {
            return null_arg("run");
        };
        if out.is_null() {
            return null_arg("out");
        }
        *out = Box::into_raw(Box::new(BqImage(run.0.reconstruction.image.clone())));
        BqStatus::Ok
    })
}

/// # Safety
/// `run` must come from [`bq_compress`] and not be freed twice. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn bq_run_free(run: *mut BqRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// `ceil(log2(bins))`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bq_required_qubits(bins: u64, out: *mut u32) -> BqStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return null_arg("out");
        };
        match required_qubits(bins) {
            Ok(n) => {
                *out = n;
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Qubits needed by `scheme` for `n_pixels` pixels. `param` is the NEQR bit
/// depth or the PROPOSED bin count and is ignored otherwise.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bq_qubit_accounting(
    n_pixels: u64,
    scheme: BqScheme,
    param: u64,
    out: *mut u32,
) -> BqStatus {
    guard(|| {
        let Some(out) = out.as_mut() else {
            return null_arg("out");
        };
        let scheme = match scheme {
            BqScheme::Frqi => EncodingScheme::Frqi,
            BqScheme::Neqr => match u32::try_from(param) {
                Ok(bit_depth) => EncodingScheme::Neqr { bit_depth },
                Err(_) => return fail(Error::InvalidParameter("bit depth too large".into())),
            },
            BqScheme::Ncqi => EncodingScheme::Ncqi,
            BqScheme::Proposed => EncodingScheme::Proposed { bins: param },
        };
        match qubit_accounting(n_pixels, scheme) {
            Ok(n) => {
                *out = n;
                BqStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
