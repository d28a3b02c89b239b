use std::ffi::{CStr, CString};
use std::ptr;

use bixelq_ffi::*;

fn last_error() -> String {
    let p = bq_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn gray_image(h: u32, w: u32, f: impl Fn(u32, u32) -> u8) -> *mut BqImage {
    let data: Vec<u8> = (0..h)
        .flat_map(|y| (0..w).map(move |x| (y, x)))
        .map(|(y, x)| f(y, x))
        .collect();
    let mut img = ptr::null_mut();
    let s = unsafe { bq_image_from_u8(data.as_ptr(), data.len(), h, w, 1, &mut img) };
    assert_eq!(s, BqStatus::Ok);
    img
}

#[test]
fn default_config_matches_cli_defaults() {
    let c = bq_config_default();
    assert_eq!(
        (c.bixel_h, c.bixel_w, c.bins, c.shots, c.seed),
        (32, 32, 32, 4096, 0)
    );
    assert_eq!(c.backend, BqBackend::Sampled);
    assert_eq!(c.bin_range, BqBinRange::Data);
    assert_eq!(c.recon, BqReconMode::Paper);
}

#[test]
fn constant_image_round_trips_exactly() {
    let img = gray_image(8, 8, |_, _| 77);
    let mut cfg = bq_config_default();
    cfg.bixel_h = 4;
    cfg.bixel_w = 4;
    cfg.bins = 8;
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(bq_compress(img, &cfg, &mut run), BqStatus::Ok);
        let mut fid = BqFidelity::default();
        assert_eq!(bq_run_fidelity(run, &mut fid), BqStatus::Ok);
        assert_eq!(fid.mse, 0.0);
        assert!(fid.psnr_db.is_infinite());
        assert_eq!(fid.qubits, 3);
        assert_eq!(fid.has_tvd, 1);

        let mut rec = ptr::null_mut();
        assert_eq!(bq_run_reconstructed_image(run, &mut rec), BqStatus::Ok);
        let (mut h, mut w, mut c) = (0, 0, 0);
        assert_eq!(bq_image_dims(rec, &mut h, &mut w, &mut c), BqStatus::Ok);
        assert_eq!((h, w, c), (8, 8, 1));
        let mut px = [0u8; 64];
        assert_eq!(
            bq_image_copy_u8(rec, px.as_mut_ptr(), px.len()),
            BqStatus::Ok
        );
        assert!(px.iter().all(|&v| v == 77));

        bq_image_free(rec);
        bq_run_free(run);
        bq_image_free(img);
    }
}

#[test]
fn buffer_queries_and_copies() {
    let img = gray_image(4, 8, |y, x| (x * 30 + y) as u8);
    let mut cfg = bq_config_default();
    cfg.bixel_h = 2;
    cfg.bixel_w = 2;
    cfg.bins = 5;
    cfg.backend = BqBackend::Ideal;
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(bq_compress(img, &cfg, &mut run), BqStatus::Ok);
        let mut n = 0usize;
        assert_eq!(
            bq_run_histogram_counts(run, ptr::null_mut(), 0, &mut n),
            BqStatus::Ok
        );
        assert_eq!(n, 5);
        let mut counts = vec![0u64; n];
        assert_eq!(
            bq_run_histogram_counts(run, counts.as_mut_ptr(), n, &mut n),
            BqStatus::Ok
        );
        assert_eq!(counts.iter().sum::<u64>(), 8);

        let mut short = [0u64; 2];
        assert_eq!(
            bq_run_histogram_counts(run, short.as_mut_ptr(), 2, ptr::null_mut()),
            BqStatus::DimensionMismatch
        );

        assert_eq!(
            bq_run_bin_edges(run, ptr::null_mut(), 0, &mut n),
            BqStatus::Ok
        );
        assert_eq!(n, 6);
        assert_eq!(
            bq_run_probabilities(run, ptr::null_mut(), 0, &mut n),
            BqStatus::Ok
        );
        assert_eq!(n, 8);
        let mut probs = vec![0.0; n];
        assert_eq!(
            bq_run_probabilities(run, probs.as_mut_ptr(), n, ptr::null_mut()),
            BqStatus::Ok
        );
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert_eq!(
            bq_run_reconstructed_sums(run, ptr::null_mut(), 0, &mut n),
            BqStatus::Ok
        );
        assert_eq!(n, 8);

        let mut fid = BqFidelity::default();
        assert_eq!(bq_run_fidelity(run, &mut fid), BqStatus::Ok);
        assert_eq!(fid.has_tvd, 0);
        assert!(fid.mse > 0.0 && fid.mse <= fid.mse_bound);

        bq_run_free(run);
        bq_image_free(img);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let mut img = ptr::null_mut();
        let path = CString::new("/definitely/missing.png").unwrap();
        assert_eq!(
            bq_image_load(path.as_ptr(), &mut img),
            BqStatus::FileNotFound
        );
        assert!(last_error().starts_with("file-not-found"));
        assert!(img.is_null());

        assert_eq!(bq_image_load(ptr::null(), &mut img), BqStatus::NullPointer);
        assert!(last_error().contains("null"));

        let data = [0u8; 5];
        assert_eq!(
            bq_image_from_u8(data.as_ptr(), 5, 2, 2, 1, &mut img),
            BqStatus::DimensionMismatch
        );
        assert_eq!(
            bq_image_from_u8(data.as_ptr(), 4, 2, 2, 2, &mut img),
            BqStatus::DimensionMismatch
        );

        let good = gray_image(4, 4, |_, _| 10);
        let mut cfg = bq_config_default();
        cfg.bins = 0;
        let mut run = ptr::null_mut();
        assert_eq!(
            bq_compress(good, &cfg, &mut run),
            BqStatus::InvalidParameter
        );
        cfg = bq_config_default();
        cfg.shots = 0;
        assert_eq!(bq_compress(good, &cfg, &mut run), BqStatus::ZeroShots);
        assert!(run.is_null());
        bq_image_free(good);

        bq_image_free(ptr::null_mut());
        bq_run_free(ptr::null_mut());
    }
}

#[test]
fn status_names_are_stable() {
    let name = |s| {
        unsafe { CStr::from_ptr(bq_status_name(s)) }
            .to_str()
            .unwrap()
            .to_owned()
    };
    assert_eq!(name(BqStatus::Ok), "ok");
    assert_eq!(name(BqStatus::FileNotFound), "file-not-found");
    assert_eq!(name(BqStatus::Malformed), "malformed-data");
    assert_eq!(BqStatus::Malformed as i32, 15);
}

#[test]
fn qubit_accounting_table() {
    let n = 3403u64 * 5266;
    let q = |scheme, param| {
        let mut out = 0;
        let s = unsafe { bq_qubit_accounting(n, scheme, param, &mut out) };
        assert_eq!(s, BqStatus::Ok);
        out
    };
    assert_eq!(q(BqScheme::Frqi, 0), 26);
    assert_eq!(q(BqScheme::Neqr, 24), 49);
    assert_eq!(q(BqScheme::Ncqi, 0), 27);
    assert_eq!(q(BqScheme::Proposed, 32), 5);
    let mut out = 0;
    unsafe {
        assert_eq!(bq_required_qubits(33, &mut out), BqStatus::Ok);
        assert_eq!(out, 6);
        assert_eq!(bq_required_qubits(0, &mut out), BqStatus::InvalidParameter);
    }
}
