//! Discrete parallel-beam Radon transform and back-projection.
//!
//! Geometry: for a square image of side `S` the rotation centre is the pixel
//! centre `c = (S - 1) / 2`, with physical coordinates `x = (col - c)·s` and
//! `y = (c - row)·s` (y points up). The ray with angle `θ` and detector
//! offset `t` is the line `x·cosθ + y·sinθ = t`. Angles are
//! `θ_i = i·π/n` for `i = 0..n`, and the detector axis holds an odd number
//! of bins centred on `t = 0`.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{Image2D, Spacing};

/// Projections `p_θ(t)`, one row per angle.
#[derive(Debug, Clone, PartialEq)]
pub struct Sinogram {
    n_angles: usize,
    n_detectors: usize,
    det_spacing: f64,
    values: Vec<f64>,
}

impl Sinogram {
    pub fn new(
        n_angles: usize,
        n_detectors: usize,
        det_spacing: f64,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_angles == 0 {
            return Err(Error::param("n_angles", "must be >= 1"));
        }
        if n_detectors.is_multiple_of(2) {
            return Err(Error::param(
                "n_detectors",
                format!("must be odd so t = 0 is a bin centre, got {n_detectors}"),
            ));
        }
        if !(det_spacing.is_finite() && det_spacing > 0.0) {
            return Err(Error::param("det_spacing", format!("must be > 0, got {det_spacing}")));
        }
        if values.len() != n_angles * n_detectors {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", n_angles * n_detectors),
                actual: format!("{} values", values.len()),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidImage("sinogram contains non-finite values".into()));
        }
        Ok(Sinogram {
            n_angles,
            n_detectors,
            det_spacing,
            values,
        })
    }

    pub fn zeros(n_angles: usize, n_detectors: usize, det_spacing: f64) -> Result<Self> {
        Sinogram::new(
            n_angles,
            n_detectors,
            det_spacing,
            vec![0.0; n_angles * n_detectors],
        )
    }

    pub(crate) fn from_parts_unchecked(
        n_angles: usize,
        n_detectors: usize,
        det_spacing: f64,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(values.len(), n_angles * n_detectors);
        Sinogram {
            n_angles,
            n_detectors,
            det_spacing,
            values,
        }
    }

    pub fn n_angles(&self) -> usize {
        self.n_angles
    }

    pub fn n_detectors(&self) -> usize {
        self.n_detectors
    }

    pub fn det_spacing(&self) -> f64 {
        self.det_spacing
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn angle(&self, i: usize) -> f64 {
        i as f64 * PI / self.n_angles as f64
    }

    pub fn angles(&self) -> Vec<f64> {
        (0..self.n_angles).map(|i| self.angle(i)).collect()
    }

    /// Detector offset of bin `j` in millimetres.
    pub fn detector_offset(&self, j: usize) -> f64 {
        (j as f64 - self.detector_centre()) * self.det_spacing
    }

    pub fn detector_centre(&self) -> f64 {
        (self.n_detectors - 1) as f64 / 2.0
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_detectors..(i + 1) * self.n_detectors]
    }

    pub fn get(&self, angle: usize, det: usize) -> f64 {
        self.values[angle * self.n_detectors + det]
    }

    pub fn add(&self, other: &Sinogram) -> Result<Sinogram> {
        if (self.n_angles, self.n_detectors) != (other.n_angles, other.n_detectors) {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.n_angles, self.n_detectors),
                actual: format!("{}x{}", other.n_angles, other.n_detectors),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Sinogram::new(self.n_angles, self.n_detectors, self.det_spacing, values)
    }
}

/// Bookkeeping needed to undo [`pad_for_radon`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PadRecord {
    pub original: (usize, usize),
    pub offsets: (usize, usize),
    pub fill: f64,
}

impl PadRecord {
    pub fn identity(img: &Image2D) -> Self {
        PadRecord {
            original: img.shape(),
            offsets: (0, 0),
            fill: 0.0,
        }
    }
}

/// Side of the square canvas that contains every rotation of an `h × w`
/// image: `ceil(sqrt(h² + w²))`, bumped to the next odd number.
pub fn padded_side(height: usize, width: usize) -> usize {
    let diag = ((height * height + width * width) as f64).sqrt().ceil() as usize;
    let side = diag.max(height).max(width);
    if side.is_multiple_of(2) {
        side + 1
    } else {
        side
    }
}

/// Centres `img` on a square canvas large enough that the whole image lies
/// inside the inscribed circle.
pub fn pad_for_radon(img: &Image2D, fill: f64) -> (Image2D, PadRecord) {
    let (h, w) = img.shape();
    let side = padded_side(h, w);
    let top = (side - h) / 2;
    let left = (side - w) / 2;
    let mut values = vec![fill; side * side];
    for r in 0..h {
        values[(r + top) * side + left..(r + top) * side + left + w].copy_from_slice(img.row(r));
    }
    let rec = PadRecord {
        original: (h, w),
        offsets: (top, left),
        fill,
    };
    (Image2D::from_parts_unchecked(side, side, img.spacing(), values), rec)
}

/// Extracts the original window recorded in `rec`.
pub fn crop_after_radon(img: &Image2D, rec: &PadRecord) -> Result<Image2D> {
    let (h, w) = rec.original;
    let (top, left) = rec.offsets;
    if h == 0 || w == 0 || top + h > img.height() || left + w > img.width() {
        return Err(Error::DimensionMismatch {
            expected: format!(
                "image of at least {}x{} for window {h}x{w} at ({top}, {left})",
                top + h,
                left + w
            ),
            actual: format!("{}x{}", img.height(), img.width()),
        });
    }
    let mut values = Vec::with_capacity(h * w);
    for r in top..top + h {
        values.extend_from_slice(&img.row(r)[left..left + w]);
    }
    Ok(Image2D::from_parts_unchecked(h, w, img.spacing(), values))
}

/// Number of detector bins used for a square image of the given side.
pub fn detector_count(side: usize) -> usize {
    if side.is_multiple_of(2) {
        side + 1
    } else {
        side
    }
}

/// Parallel-beam Radon transform: line integrals along every ray, sampled
/// at one pixel pitch with bilinear interpolation (equivalently: rotate the
/// image by `-θ` and sum columns). Values outside the image read as 0, so
/// callers should shift the background to zero first.
pub fn radon(img: &Image2D, n_angles: usize) -> Result<Sinogram> {
    if !img.is_square() {
        return Err(Error::NonSquare {
            height: img.height(),
            width: img.width(),
        });
    }
    if n_angles == 0 {
        return Err(Error::param("n_angles", "must be >= 1"));
    }
    let Spacing { sy, sx } = img.spacing();
    if (sy - sx).abs() > 1e-12 * sx.max(sy) {
        return Err(Error::param(
            "spacing",
            format!("radon needs isotropic pixels, got ({sy}, {sx})"),
        ));
    }
    let side = img.width();
    let n_det = detector_count(side);
    let centre = (side - 1) as f64 / 2.0;
    let det_centre = (n_det - 1) as f64 / 2.0;

    let mut values = vec![0.0; n_angles * n_det];
    values
        .par_chunks_mut(n_det)
        .enumerate()
        .for_each(|(i, row)| {
            let theta = i as f64 * PI / n_angles as f64;
            let (sin, cos) = theta.sin_cos();
            for (j, out) in row.iter_mut().enumerate() {
                // Work in pixel units; scale by the pixel pitch at the end.
                let t = j as f64 - det_centre;
                let mut acc = 0.0;
                for k in 0..n_det {
                    let u = k as f64 - det_centre;
                    let x = t * cos - u * sin;
                    let y = t * sin + u * cos;
                    acc += img.bilinear_or(centre - y, centre + x, 0.0);
                }
                *out = acc * sx;
            }
        });
    Ok(Sinogram::from_parts_unchecked(n_angles, n_det, sx, values))
}

/// Back-projection `(1 / 2n) Σ_i f_i(x cosθ_i + y sinθ_i)` with linear
/// interpolation along the detector axis. Rays that miss the detector
/// contribute nothing. The output is square with side `n_detectors`.
pub fn backproject(sino: &Sinogram) -> Image2D {
    let n = sino.n_angles();
    let n_det = sino.n_detectors();
    let centre = sino.detector_centre();
    let trig: Vec<(f64, f64)> = (0..n).map(|i| sino.angle(i).sin_cos()).collect();
    let weight = 1.0 / (2.0 * n as f64);
    let last = (n_det - 1) as f64;

    let mut values = vec![0.0; n_det * n_det];
    values
        .par_chunks_mut(n_det)
        .enumerate()
        .for_each(|(r, out_row)| {
            let y = centre - r as f64;
            for (c, out) in out_row.iter_mut().enumerate() {
                let x = c as f64 - centre;
                let mut acc = 0.0;
                for (i, &(sin, cos)) in trig.iter().enumerate() {
                    let pos = x * cos + y * sin + centre;
                    if !(0.0..=last).contains(&pos) {
                        continue;
                    }
                    let j0 = pos.floor() as usize;
                    let frac = pos - j0 as f64;
                    let row = sino.row(i);
                    let v = if j0 + 1 < n_det {
                        row[j0] * (1.0 - frac) + row[j0 + 1] * frac
                    } else {
                        row[j0]
                    };
                    acc += v;
                }
                *out = acc * weight;
            }
        });
    let s = sino.det_spacing();
    Image2D::from_parts_unchecked(n_det, n_det, Spacing { sy: s, sx: s }, values)
}
