use std::ffi::CString;
use std::ptr;

use erpsift_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0u8; 256];
    let n = unsafe { erpsift_last_error_message(buf.as_mut_ptr().cast(), buf.len()) };
    buf.truncate(n.min(255));
    String::from_utf8(buf).unwrap()
}

fn toy(rows: usize, cols: usize, informative: usize) -> (Vec<f64>, Vec<u8>) {
    let labels: Vec<u8> = (0..rows).map(|r| (r % 2) as u8).collect();
    let values = (0..rows * cols)
        .map(|i| {
            let (r, c) = (i / cols, i % cols);
            let noise = ((i * 7919) % 101) as f64 / 101.0 - 0.5;
            noise + if c == informative { 3.0 * labels[r] as f64 } else { 0.0 }
        })
        .collect();
    (values, labels)
}

fn dataset(values: &[f64], labels: &[u8], cols: usize) -> *mut ErpsiftDataset {
    let mut ds = ptr::null_mut();
    let st = unsafe { erpsift_dataset_new(values.as_ptr(), labels.len(), cols, labels.as_ptr(), &mut ds) };
    assert_eq!(st, ErpsiftStatus::Ok, "{}", last_error());
    ds
}

#[test]
fn wavelet_split_matches_library() {
    let x: Vec<f64> = (0..100).map(|i| ((i * i) % 17) as f64).collect();
    let (mut lp, mut hp) = (vec![0.0; 100], vec![0.0; 100]);
    let st = unsafe { erpsift_wavelet_split(x.as_ptr(), 100, 3, 1, lp.as_mut_ptr(), hp.as_mut_ptr()) };
    assert_eq!(st, ErpsiftStatus::Ok);
    let (elp, ehp) = erpsift::wavelet::split_signal(
        &x,
        3,
        erpsift::wavelet::WaveletFilterPair::db4(),
        erpsift::wavelet::BoundaryMode::Symmetric,
    )
    .unwrap();
    assert_eq!((lp, hp), (elp, ehp));
}

#[test]
fn errors_map_to_status_codes() {
    let x = [1.0; 8];
    let mut out = [0.0; 8];
    let st = unsafe { erpsift_wavelet_split(x.as_ptr(), 8, 0, 0, out.as_mut_ptr(), out.as_mut_ptr()) };
    assert_eq!(st, ErpsiftStatus::InvalidArgument);
    assert!(!last_error().is_empty());

    let labels = [0u8, 2];
    let mut ds = ptr::null_mut();
    let st = unsafe { erpsift_dataset_new([0.0, 1.0].as_ptr(), 2, 1, labels.as_ptr(), &mut ds) };
    assert_eq!(st, ErpsiftStatus::InvalidArgument);
    assert!(ds.is_null());

    let path = CString::new("/nonexistent/registry.toml").unwrap();
    let mut reg = ptr::null_mut();
    assert_eq!(
        unsafe { erpsift_registry_load(path.as_ptr(), &mut reg) },
        ErpsiftStatus::Io
    );
    assert_eq!(
        unsafe { erpsift_registry_load(ptr::null(), &mut reg) },
        ErpsiftStatus::NullPointer
    );
    assert_eq!(unsafe { erpsift_registry_len(ptr::null()) }, 0);

    let st = unsafe { erpsift_wavelet_split(x.as_ptr(), 8, 1, 0, out.as_mut_ptr(), out.as_mut_ptr()) };
    assert_eq!(st, ErpsiftStatus::Ok);
    assert_eq!(last_error(), "");
}

#[test]
fn truncated_error_message_reports_full_length() {
    unsafe { erpsift_wavelet_split(ptr::null(), 4, 1, 0, ptr::null_mut(), ptr::null_mut()) };
    let mut small = [0x7fu8; 4];
    let n = unsafe { erpsift_last_error_message(small.as_mut_ptr().cast(), small.len()) };
    assert!(n > 3);
    assert_eq!(small[3], 0);
    assert_eq!(unsafe { erpsift_last_error_message(ptr::null_mut(), 0) }, n);
}

#[test]
fn features_match_library_layout() {
    let reg = erpsift_registry_default();
    let per = unsafe { erpsift_registry_len(reg) };
    let values: Vec<f64> = (0..3 * 448)
        .map(|i| (i as f64 * 0.02).sin() * 4.0 + (i % 7) as f64 * 0.1)
        .collect();
    let mut out = vec![0.0; 3 * per];
    let st = unsafe {
        erpsift_extract_features(
            reg,
            values.as_ptr(),
            3,
            256.0,
            64,
            384,
            5,
            0,
            out.as_mut_ptr(),
            out.len(),
        )
    };
    assert_eq!(st, ErpsiftStatus::Ok, "{}", last_error());
    // Channel blocks depend only on their own samples.
    let mut single = vec![0.0; per];
    let st = unsafe {
        erpsift_extract_features(
            reg,
            values[448..896].as_ptr(),
            1,
            256.0,
            64,
            384,
            5,
            0,
            single.as_mut_ptr(),
            per,
        )
    };
    assert_eq!(st, ErpsiftStatus::Ok);
    assert_eq!(
        out[per..2 * per].iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        single.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    unsafe { erpsift_registry_free(reg) };
}

#[test]
fn relieff_and_cross_validation() {
    let (values, labels) = toy(30, 5, 3);
    let ds = dataset(&values, &labels, 5);
    let mut w = [0.0; 5];
    assert_eq!(unsafe { erpsift_relieff(ds, 5, w.as_mut_ptr(), 5) }, ErpsiftStatus::Ok);
    assert!((0..5).filter(|&c| c != 3).all(|c| w[c] < w[3]), "{w:?}");
    assert_eq!(
        unsafe { erpsift_relieff(ds, 5, w.as_mut_ptr(), 4) },
        ErpsiftStatus::Shape
    );

    let mut s = erpsift_cv_settings_default();
    s.top_k = 1;
    s.neighbors = 5;
    s.repeats = 4;
    s.seed = 3;
    let mut a = ErpsiftConfusion::default();
    let mut b = ErpsiftConfusion::default();
    assert_eq!(
        unsafe { erpsift_cross_validate(ds, &s, &mut a) },
        ErpsiftStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(unsafe { erpsift_cross_validate(ds, &s, &mut b) }, ErpsiftStatus::Ok);
    assert_eq!(a, b);
    assert_eq!(a.n_repeats, 4);
    assert!(a.mean[0][0] > 95.0 && a.mean[1][1] > 95.0, "{a:?}");

    s.folds = 0;
    s.leaky = true;
    s.kernel = ErpsiftKernel::Gaussian as i32;
    assert_eq!(
        unsafe { erpsift_cross_validate(ds, &s, &mut a) },
        ErpsiftStatus::Ok,
        "{}",
        last_error()
    );
    assert_eq!(a.n_repeats, 1);
    assert_eq!(a.sd, [[0.0; 2]; 2]);

    s.kernel = 5;
    assert_eq!(
        unsafe { erpsift_cross_validate(ds, &s, &mut a) },
        ErpsiftStatus::InvalidArgument
    );
    unsafe { erpsift_dataset_free(ds) };
}

#[test]
fn model_round_trip() {
    let (mut values, labels) = toy(20, 4, 1);
    values[5] = f64::NAN;
    let ds = dataset(&values, &labels, 4);
    let mut model = ptr::null_mut();
    let st = unsafe { erpsift_model_train(ds, 0, 5, 0, 0.0, 1.0, 0, &mut model) };
    assert_eq!(st, ErpsiftStatus::Ok, "{}", last_error());
    assert_eq!(unsafe { erpsift_model_n_selected(model) }, 4);
    let mut errors = 0;
    for (r, &y) in labels.iter().enumerate() {
        let mut label = 9u32;
        let st = unsafe { erpsift_model_predict(model, values[r * 4..].as_ptr(), 4, &mut label, ptr::null_mut()) };
        assert_eq!(st, ErpsiftStatus::Ok);
        errors += usize::from(label != y as u32);
    }
    assert_eq!(errors, 0);
    let mut idx = [0usize; 3];
    assert_eq!(
        unsafe { erpsift_model_selected(model, idx.as_mut_ptr(), 3) },
        ErpsiftStatus::Shape
    );
    unsafe {
        erpsift_model_free(model);
        erpsift_dataset_free(ds);
    }
}
