//! C ABI over the erpsift library.
//!
//! Every fallible call returns an [`ErpsiftStatus`]; on failure the message is
//! kept per thread and read back with [`erpsift_last_error_message`]. Handles
//! are opaque and owned by the caller once returned, each with its own
//! `_free` function. Matrices are row-major `double` arrays, and missing
//! feature values are NaN.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use erpsift::classifier::{
    cross_validate, predict, train, CvScheme, CvSettings, FeatureSelection, KernelSpec, TrainedModel,
};
use erpsift::features::{extract_subject, FeatureRegistry};
use erpsift::relieff::{relieff_weights, select_top_k, RawDataset};
use erpsift::signal::{ErpAverage, SamplingMeta};
use erpsift::wavelet::{split_signal, BoundaryMode, WaveletFilterPair};
use erpsift::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpsiftStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Length = 3,
    EmptyInput = 4,
    Shape = 5,
    InsufficientStructure = 6,
    UndefinedInput = 7,
    Config = 8,
    Convergence = 9,
    Io = 10,
    Parse = 11,
    Panic = 12,
}

/// Values accepted by the `boundary` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpsiftBoundary {
    Periodic = 0,
    Symmetric = 1,
}

/// Values accepted by the `kernel` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErpsiftKernel {
    Linear = 0,
    Gaussian = 1,
}

/// Cross-validation settings; start from [`erpsift_cv_settings_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErpsiftCvSettings {
    /// Stratified fold count; 0 selects leave-one-subject-out.
    pub folds: u32,
    pub repeats: u32,
    /// ReliefF subset size; 0 keeps every feature.
    pub top_k: usize,
    pub neighbors: usize,
    /// An [`ErpsiftKernel`] value.
    pub kernel: i32,
    /// Gaussian width; values <= 0 use 1 / feature count.
    pub gamma: f64,
    pub c: f64,
    pub seed: u64,
    /// Select on all rows before splitting instead of inside each fold.
    pub leaky: bool,
}

/// Row-normalised confusion percentages, row = true class, column = predicted.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErpsiftConfusion {
    pub mean: [[f64; 2]; 2],
    pub sd: [[f64; 2]; 2],
    pub n_repeats: u32,
}

pub struct ErpsiftRegistry(FeatureRegistry);

/// Labelled subjects × features table.
pub struct ErpsiftDataset(RawDataset);

/// Classifier together with the column count and imputation means it was fitted with.
pub struct ErpsiftModel {
    model: TrainedModel,
    n_features: usize,
    means: Vec<f64>,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(ErpsiftStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Parameter(_) => ErpsiftStatus::InvalidArgument,
            Error::Length(_) => ErpsiftStatus::Length,
            Error::EmptyInput(_) => ErpsiftStatus::EmptyInput,
            Error::Shape(_) => ErpsiftStatus::Shape,
            Error::InsufficientStructure(_) => ErpsiftStatus::InsufficientStructure,
            Error::UndefinedInput(_) => ErpsiftStatus::UndefinedInput,
            Error::Config(_) => ErpsiftStatus::Config,
            Error::Convergence { .. } => ErpsiftStatus::Convergence,
            Error::Io { .. } => ErpsiftStatus::Io,
            Error::Parse { .. } => ErpsiftStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ErpsiftStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(ErpsiftStatus::InvalidArgument, msg.into())
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> ErpsiftStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ErpsiftStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            ErpsiftStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or point to `len` writable values.
unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn boundary(code: i32) -> Result<BoundaryMode, Failure> {
    match code {
        0 => Ok(BoundaryMode::Periodic),
        1 => Ok(BoundaryMode::Symmetric),
        other => Err(invalid(format!("unknown boundary mode {other}"))),
    }
}

fn kernel(code: i32, gamma: f64) -> Result<KernelSpec, Failure> {
    let gamma = (gamma > 0.0).then_some(gamma);
    match code {
        0 => Ok(KernelSpec::linear()),
        1 => Ok(KernelSpec {
            gamma,
            ..KernelSpec::gaussian(1.0)
        }),
        other => Err(invalid(format!("unknown kernel {other}"))),
    }
}

fn rows(values: &[f64], n_rows: usize, n_cols: usize) -> Vec<Vec<f64>> {
    (0..n_rows)
        .map(|r| values[r * n_cols..(r + 1) * n_cols].to_vec())
        .collect()
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn erpsift_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf`, truncated to
/// `len - 1` bytes and NUL-terminated. Returns the full message length, so a
/// return value >= `len` means the copy was truncated.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn erpsift_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Splits `signal` into low-pass (level-`levels` db4 approximation) and
/// high-pass (`signal - lp`) parts, each `len` samples.
///
/// # Safety
/// `signal`, `lp_out` and `hp_out` must each hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn erpsift_wavelet_split(
    signal: *const f64,
    len: usize,
    levels: usize,
    boundary_mode: i32,
    lp_out: *mut f64,
    hp_out: *mut f64,
) -> ErpsiftStatus {
    guard(|| {
        let x = slice(signal, len, "signal")?;
        let lp_out = slice_mut(lp_out, len, "lp_out")?;
        let hp_out = slice_mut(hp_out, len, "hp_out")?;
        let (lp, hp) = split_signal(x, levels, WaveletFilterPair::db4(), boundary(boundary_mode)?)?;
        lp_out.copy_from_slice(&lp);
        hp_out.copy_from_slice(&hp);
        Ok(())
    })
}

/// The built-in 27-feature registry.
#[no_mangle]
pub extern "C" fn erpsift_registry_default() -> *mut ErpsiftRegistry {
    Box::into_raw(Box::new(ErpsiftRegistry(FeatureRegistry::default_registry())))
}

/// Loads a registry TOML file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn erpsift_registry_load(path: *const c_char, out: *mut *mut ErpsiftRegistry) -> ErpsiftStatus {
    guard(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| invalid("path is not UTF-8"))?;
        let reg = FeatureRegistry::load(Path::new(path))?;
        *out = Box::into_raw(Box::new(ErpsiftRegistry(reg)));
        Ok(())
    })
}

/// Number of features computed per channel; 0 for a null handle.
///
/// # Safety
/// `registry` must be null or a live registry handle.
#[no_mangle]
pub unsafe extern "C" fn erpsift_registry_len(registry: *const ErpsiftRegistry) -> usize {
    registry.as_ref().map_or(0, |r| r.0.len())
}

/// # Safety
/// `registry` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erpsift_registry_free(registry: *mut ErpsiftRegistry) {
    if !registry.is_null() {
        drop(Box::from_raw(registry));
    }
}

/// Feature vector of one averaged ERP. `values` is `n_channels` rows of
/// `pre_samples + post_samples` samples; the output is channel-major with
/// `erpsift_registry_len` entries per channel. Features that are undefined
/// for the input are written as NaN.
///
/// # Safety
/// `values` must hold `n_channels * (pre_samples + post_samples)` doubles and
/// `out` must hold `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn erpsift_extract_features(
    registry: *const ErpsiftRegistry,
    values: *const f64,
    n_channels: usize,
    rate_hz: f64,
    pre_samples: usize,
    post_samples: usize,
    levels: usize,
    boundary_mode: i32,
    out: *mut f64,
    out_len: usize,
) -> ErpsiftStatus {
    guard(|| {
        let reg = &handle(registry, "registry")?.0;
        let meta = SamplingMeta::new(rate_hz, pre_samples, post_samples)?;
        let n = meta.epoch_len();
        let total = n_channels
            .checked_mul(n)
            .ok_or_else(|| invalid("input size overflows"))?;
        let values = slice(values, total, "values")?;
        let expected = n_channels * reg.len();
        if out_len != expected {
            return Err(Failure(
                ErpsiftStatus::Shape,
                format!("out_len is {out_len}, {n_channels} channels need {expected}"),
            ));
        }
        let out = slice_mut(out, out_len, "out")?;
        let erp = ErpAverage {
            channels: (0..n_channels).map(|i| format!("ch{i}")).collect(),
            channel_values: rows(values, n_channels, n),
            meta,
            n_trials: 1,
            subject_id: String::new(),
            class_label: None,
        };
        let v = extract_subject(&erp, levels, boundary(boundary_mode)?, reg)?;
        out.copy_from_slice(&v.values);
        Ok(())
    })
}

/// Copies an `n_rows × n_cols` matrix and its 0/1 labels into a dataset.
///
/// # Safety
/// `values` must hold `n_rows * n_cols` doubles, `labels` `n_rows` bytes,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn erpsift_dataset_new(
    values: *const f64,
    n_rows: usize,
    n_cols: usize,
    labels: *const u8,
    out: *mut *mut ErpsiftDataset,
) -> ErpsiftStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let total = n_rows
            .checked_mul(n_cols)
            .ok_or_else(|| invalid("input size overflows"))?;
        let values = slice(values, total, "values")?;
        let labels = slice(labels, n_rows, "labels")?;
        if let Some(bad) = labels.iter().find(|&&l| l > 1) {
            return Err(invalid(format!("labels must be 0 or 1, got {bad}")));
        }
        let ds = RawDataset::new(
            rows(values, n_rows, n_cols),
            labels.iter().map(|&l| l as usize).collect(),
        )?;
        *out = Box::into_raw(Box::new(ErpsiftDataset(ds)));
        Ok(())
    })
}

/// # Safety
/// `dataset` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erpsift_dataset_free(dataset: *mut ErpsiftDataset) {
    if !dataset.is_null() {
        drop(Box::from_raw(dataset));
    }
}

/// ReliefF weight of every column, after mean imputation over all rows.
///
/// # Safety
/// `dataset` must be a live handle and `weights_out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn erpsift_relieff(
    dataset: *const ErpsiftDataset,
    neighbors: usize,
    weights_out: *mut f64,
    len: usize,
) -> ErpsiftStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.0;
        if len != ds.n_features() {
            return Err(Failure(
                ErpsiftStatus::Shape,
                format!("len is {len}, dataset has {} columns", ds.n_features()),
            ));
        }
        let out = slice_mut(weights_out, len, "weights_out")?;
        let w = relieff_weights(&ds.impute_all()?, neighbors)?;
        out.copy_from_slice(&w.weights);
        Ok(())
    })
}

/// Five-fold, 20-repeat, in-fold ReliefF top 10 with K = 10 and a linear
/// kernel at C = 1.
#[no_mangle]
pub extern "C" fn erpsift_cv_settings_default() -> ErpsiftCvSettings {
    ErpsiftCvSettings {
        folds: 5,
        repeats: 20,
        top_k: 10,
        neighbors: 10,
        kernel: ErpsiftKernel::Linear as i32,
        gamma: 0.0,
        c: 1.0,
        seed: 0,
        leaky: false,
    }
}

/// Repeated cross-validation of `dataset`.
///
/// # Safety
/// `dataset` must be a live handle; `settings` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn erpsift_cross_validate(
    dataset: *const ErpsiftDataset,
    settings: *const ErpsiftCvSettings,
    out: *mut ErpsiftConfusion,
) -> ErpsiftStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.0;
        let s = *handle(settings, "settings")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let selection = match (s.top_k, s.leaky) {
            (0, _) => FeatureSelection::Fixed {
                indices: (0..ds.n_features()).collect(),
            },
            (top_k, false) => FeatureSelection::InFold {
                top_k,
                neighbors: s.neighbors,
            },
            (top_k, true) => FeatureSelection::Leaky {
                top_k,
                neighbors: s.neighbors,
            },
        };
        let settings = CvSettings {
            scheme: match s.folds {
                0 => CvScheme::LeaveOneSubjectOut,
                folds => CvScheme::StratifiedKFold { folds: folds as usize },
            },
            selection,
            kernel: kernel(s.kernel, s.gamma)?,
            c: s.c,
            repeats: s.repeats as usize,
            seed: s.seed,
        };
        let r = cross_validate(ds, &settings)?;
        *out = ErpsiftConfusion {
            mean: r.mean,
            sd: r.sd,
            n_repeats: r.n_repeats as u32,
        };
        Ok(())
    })
}

/// Fits a classifier on every row: mean imputation, ReliefF top `top_k`
/// (0 keeps every column), then the SVM.
///
/// # Safety
/// `dataset` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn erpsift_model_train(
    dataset: *const ErpsiftDataset,
    top_k: usize,
    neighbors: usize,
    kernel_kind: i32,
    gamma: f64,
    c: f64,
    seed: u64,
    out: *mut *mut ErpsiftModel,
) -> ErpsiftStatus {
    guard(|| {
        let ds = &handle(dataset, "dataset")?.0;
        if out.is_null() {
            return Err(null("out"));
        }
        let full = ds.impute_all()?;
        let subset = if top_k == 0 {
            (0..ds.n_features()).collect()
        } else {
            select_top_k(&relieff_weights(&full, neighbors)?, top_k)?
        };
        let model = train(&full, &subset, kernel(kernel_kind, gamma)?, c, seed)?;
        let all: Vec<usize> = (0..ds.n_samples()).collect();
        *out = Box::into_raw(Box::new(ErpsiftModel {
            model,
            n_features: ds.n_features(),
            means: ds.column_means(&all),
        }));
        Ok(())
    })
}

/// Classifies one full-width row; NaN entries take the training means.
///
/// # Safety
/// `model` must be a live handle, `row` must hold `len` doubles, and
/// `label_out` / `decision_out` must each be null or writable.
#[no_mangle]
pub unsafe extern "C" fn erpsift_model_predict(
    model: *const ErpsiftModel,
    row: *const f64,
    len: usize,
    label_out: *mut u32,
    decision_out: *mut f64,
) -> ErpsiftStatus {
    guard(|| {
        let m = handle(model, "model")?;
        if len != m.n_features {
            return Err(Failure(
                ErpsiftStatus::Shape,
                format!("row has {len} values, model expects {}", m.n_features),
            ));
        }
        let row = slice(row, len, "row")?;
        let sample: Vec<f64> = m
            .model
            .feature_subset
            .iter()
            .map(|&i| if row[i].is_nan() { m.means[i] } else { row[i] })
            .collect();
        let (label, decision) = predict(&m.model, &sample)?;
        if !label_out.is_null() {
            *label_out = label as u32;
        }
        if !decision_out.is_null() {
            *decision_out = decision;
        }
        Ok(())
    })
}

/// Number of columns the model uses; 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn erpsift_model_n_selected(model: *const ErpsiftModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.feature_subset.len())
}

/// Copies the selected column indices, best first.
///
/// # Safety
/// `model` must be a live handle and `out` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn erpsift_model_selected(
    model: *const ErpsiftModel,
    out: *mut usize,
    len: usize,
) -> ErpsiftStatus {
    guard(|| {
        let m = handle(model, "model")?;
        let subset = &m.model.feature_subset;
        if len != subset.len() {
            return Err(Failure(
                ErpsiftStatus::Shape,
                format!("len is {len}, model uses {} columns", subset.len()),
            ));
        }
        slice_mut(out, len, "out")?.copy_from_slice(subset);
        Ok(())
    })
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn erpsift_model_free(model: *mut ErpsiftModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
