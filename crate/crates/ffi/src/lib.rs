//! C ABI over `fbpaug-core`.
//!
//! Objects are opaque heap handles created by `*_new`, `*_read` or an
//! operation and released with the matching `*_free`. Every fallible call
//! returns an [`FbpaugStatus`]; on failure `fbpaug_last_error_message`
//! describes the error for the calling thread. Output handles are written
//! only on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fbpaug_core::augment::{
    fbpaug, gamma_aug, noise_aug, transform, windowing_aug, AugmentConfig, NoiseScale,
};
use fbpaug_core::io::{read_rimg, write_rimg, Object};
use fbpaug_core::metrics::{dice, Mask};
use fbpaug_core::{fbp, radon, Error, FilterSpec, Image2D, RngStream, Sinogram, Spacing};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FbpaugStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// A parameter is out of range (kernel `a < -1`, `b <= 0`, width <= 0, ...).
    InvalidArgument = 2,
    /// Non-finite values, zero dimensions or a non-square image where a
    /// square one is required.
    InvalidImage = 3,
    DimensionMismatch = 4,
    /// Malformed augmentation config.
    Config = 5,
    Io = 6,
    BadMagic = 7,
    Truncated = 8,
    UnknownKind = 9,
    BadHeader = 10,
    /// A statistic is undefined for the input (empty or degenerate).
    Degenerate = 11,
    /// An internal panic was caught at the boundary.
    Panic = 12,
}

/// Opaque image handle.
pub struct FbpaugImage {
    inner: Image2D,
}

/// Opaque sinogram handle.
pub struct FbpaugSinogram {
    inner: Sinogram,
}

struct Failure {
    status: FbpaugStatus,
    message: String,
}

impl Failure {
    fn new(status: FbpaugStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidImage(_) | Error::NonSquare { .. } => FbpaugStatus::InvalidImage,
            Error::DimensionMismatch { .. } => FbpaugStatus::DimensionMismatch,
            Error::InvalidParameter { .. } => FbpaugStatus::InvalidArgument,
            Error::DegenerateTest(_) | Error::EmptyInput(_) => FbpaugStatus::Degenerate,
            Error::Config(_) => FbpaugStatus::Config,
            Error::Io { .. } => FbpaugStatus::Io,
            Error::BadMagic { .. } => FbpaugStatus::BadMagic,
            Error::Truncated { .. } => FbpaugStatus::Truncated,
            Error::UnknownKind { .. } => FbpaugStatus::UnknownKind,
            Error::BadHeader { .. } => FbpaugStatus::BadHeader,
        };
        Failure::new(status, e.to_string())
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FbpaugStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FbpaugStatus::Ok
        }
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(_) => {
            set_last_error("internal panic");
            FbpaugStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure::new(FbpaugStatus::NullPointer, format!("{what} is null")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FbpaugStatus::NullPointer, "output pointer is null"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn check_out<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure::new(FbpaugStatus::NullPointer, "output pointer is null"))
    } else {
        Ok(())
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(FbpaugStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::new(FbpaugStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn copy_in(values: *const f64, len: usize) -> Result<Vec<f64>, Failure> {
    if values.is_null() {
        return Err(Failure::new(FbpaugStatus::NullPointer, "values is null"));
    }
    Ok(std::slice::from_raw_parts(values, len).to_vec())
}

unsafe fn copy_out(src: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::new(FbpaugStatus::NullPointer, "output buffer is null"));
    }
    if len != src.len() {
        return Err(Failure::new(
            FbpaugStatus::DimensionMismatch,
            format!("buffer holds {len} values, object has {}", src.len()),
        ));
    }
    std::slice::from_raw_parts_mut(out, len).copy_from_slice(src);
    Ok(())
}

/// Message for the most recent failed call on this thread, or an empty
/// string after a success. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fbpaug_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fbpaug_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates an image from `height * width` row-major values (copied).
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_new(
    height: usize,
    width: usize,
    spacing_y: f64,
    spacing_x: f64,
    values: *const f64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let n = height
            .checked_mul(width)
            .ok_or_else(|| Failure::new(FbpaugStatus::InvalidImage, "dimensions overflow"))?;
        let vals = copy_in(values, n)?;
        let inner = Image2D::new(height, width, Spacing::new(spacing_y, spacing_x)?, vals)?;
        emit(out, FbpaugImage { inner })
    })
}

/// Releases an image; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_free(image: *mut FbpaugImage) {
    if !image.is_null() {
        drop(Box::from_raw(image));
    }
}

/// Height in pixels, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_height(image: *const FbpaugImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.height())
}

/// Width in pixels, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_width(image: *const FbpaugImage) -> usize {
    image.as_ref().map_or(0, |i| i.inner.width())
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_spacing(
    image: *const FbpaugImage,
    spacing_y: *mut f64,
    spacing_x: *mut f64,
) -> FbpaugStatus {
    guard(|| {
        let img = deref(image, "image")?;
        if spacing_y.is_null() || spacing_x.is_null() {
            return Err(Failure::new(FbpaugStatus::NullPointer, "output pointer is null"));
        }
        *spacing_y = img.inner.spacing().sy;
        *spacing_x = img.inner.spacing().sx;
        Ok(())
    })
}

/// Copies the row-major values into `out`, which must hold exactly
/// `height * width` doubles.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_copy_values(
    image: *const FbpaugImage,
    out: *mut f64,
    len: usize,
) -> FbpaugStatus {
    guard(|| copy_out(deref(image, "image")?.inner.values(), out, len))
}

/// Reads an image or mask RIMG file (masks become 0/1 images).
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_read(
    path: *const c_char,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let path = c_str(path, "path")?;
        let inner = match read_rimg(path)? {
            Object::Image(img) => img,
            Object::Mask(m) => m.to_image(),
            Object::Sinogram(_) => {
                return Err(Failure::new(
                    FbpaugStatus::BadHeader,
                    format!("{path}: expected kind `image`, found `sinogram`"),
                ))
            }
        };
        emit(out, FbpaugImage { inner })
    })
}

/// Writes an image as a RIMG file.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_image_write(
    image: *const FbpaugImage,
    path: *const c_char,
) -> FbpaugStatus {
    guard(|| {
        let img = deref(image, "image")?;
        let path = c_str(path, "path")?;
        write_rimg(&Object::Image(img.inner.clone()), path)?;
        Ok(())
    })
}

/// Creates a sinogram from `n_angles * n_detectors` values (copied);
/// `n_detectors` must be odd.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_new(
    n_angles: usize,
    n_detectors: usize,
    det_spacing: f64,
    values: *const f64,
    out: *mut *mut FbpaugSinogram,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let n = n_angles
            .checked_mul(n_detectors)
            .ok_or_else(|| Failure::new(FbpaugStatus::InvalidImage, "dimensions overflow"))?;
        let vals = copy_in(values, n)?;
        let inner = Sinogram::new(n_angles, n_detectors, det_spacing, vals)?;
        emit(out, FbpaugSinogram { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_free(sinogram: *mut FbpaugSinogram) {
    if !sinogram.is_null() {
        drop(Box::from_raw(sinogram));
    }
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_n_angles(sinogram: *const FbpaugSinogram) -> usize {
    sinogram.as_ref().map_or(0, |s| s.inner.n_angles())
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_n_detectors(sinogram: *const FbpaugSinogram) -> usize {
    sinogram.as_ref().map_or(0, |s| s.inner.n_detectors())
}

/// Detector pitch in mm, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_det_spacing(sinogram: *const FbpaugSinogram) -> f64 {
    sinogram.as_ref().map_or(0.0, |s| s.inner.det_spacing())
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_sinogram_copy_values(
    sinogram: *const FbpaugSinogram,
    out: *mut f64,
    len: usize,
) -> FbpaugStatus {
    guard(|| copy_out(deref(sinogram, "sinogram")?.inner.values(), out, len))
}

/// Parallel-beam projection of a square image over `n_angles` angles in
/// `[0, pi)`.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_radon(
    image: *const FbpaugImage,
    n_angles: usize,
    out: *mut *mut FbpaugSinogram,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let inner = radon(&deref(image, "image")?.inner, n_angles)?;
        emit(out, FbpaugSinogram { inner })
    })
}

/// Filtered back-projection with kernel `|w|(1 + a*w^b)`; `a = 0` is the
/// plain ramp filter.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_fbp(
    sinogram: *const FbpaugSinogram,
    a: f64,
    b: f64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let inner = fbp(&deref(sinogram, "sinogram")?.inner, FilterSpec::kab(a, b)?)?;
        emit(out, FbpaugImage { inner })
    })
}

/// Re-reconstructs `image` with kernel `(a, b)`; `n_angles = 0` uses the
/// padded side length.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_fbpaug(
    image: *const FbpaugImage,
    a: f64,
    b: f64,
    n_angles: usize,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let img = &deref(image, "image")?.inner;
        let inner = fbpaug(img, a, b, (n_angles > 0).then_some(n_angles))?;
        emit(out, FbpaugImage { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_gamma(
    image: *const FbpaugImage,
    gamma: f64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let inner = gamma_aug(&deref(image, "image")?.inner, gamma)?;
        emit(out, FbpaugImage { inner })
    })
}

/// Adds Gaussian noise drawn from stream `(seed, index)`. With `raw = 0` the
/// noise is applied on min-max normalised intensities.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_noise(
    image: *const FbpaugImage,
    sigma: f64,
    raw: bool,
    seed: u64,
    index: u64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let scale = if raw {
            NoiseScale::Raw
        } else {
            NoiseScale::Normalized
        };
        let mut rng = RngStream::new(seed, index);
        let inner = noise_aug(&deref(image, "image")?.inner, sigma, scale, &mut rng)?;
        emit(out, FbpaugImage { inner })
    })
}

#[no_mangle]
pub unsafe extern "C" fn fbpaug_windowing(
    image: *const FbpaugImage,
    center: f64,
    width: f64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let inner = windowing_aug(&deref(image, "image")?.inner, center, width)?;
        emit(out, FbpaugImage { inner })
    })
}

/// Full sampled augmentation for item `index`, identical to the CLI batch
/// item with the same seed. `config_toml` is a flat TOML config (null or
/// empty for defaults); its `seed` key is replaced by `seed`.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_transform(
    image: *const FbpaugImage,
    config_toml: *const c_char,
    seed: u64,
    index: u64,
    out: *mut *mut FbpaugImage,
) -> FbpaugStatus {
    guard(|| {
        check_out(out)?;
        let img = &deref(image, "image")?.inner;
        let mut cfg = if config_toml.is_null() {
            AugmentConfig::default()
        } else {
            AugmentConfig::from_toml_str(c_str(config_toml, "config")?)?
        };
        cfg.seed = seed;
        let inner = transform(img, &cfg, index)?.image;
        emit(out, FbpaugImage { inner })
    })
}

/// Dice overlap of two masks stored as 0/1 images of the same shape.
#[no_mangle]
pub unsafe extern "C" fn fbpaug_dice(
    mask_a: *const FbpaugImage,
    mask_b: *const FbpaugImage,
    out: *mut f64,
) -> FbpaugStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::new(FbpaugStatus::NullPointer, "output pointer is null"));
        }
        let a = Mask::from_image(&deref(mask_a, "mask_a")?.inner)?;
        let b = Mask::from_image(&deref(mask_b, "mask_b")?.inner)?;
        *out = dice(&a, &b)?;
        Ok(())
    })
}
