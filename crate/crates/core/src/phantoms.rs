//! Synthetic test objects: disks, ellipse sums (Shepp–Logan), the closed-form
//! disk sinogram, and seeded Gaussian noise.
//!
//! Ellipse coordinates are normalised to `[-1, 1]²` over the image, with `x`
//! to the right and `y` up, so the same table renders at every resolution.
//! Pixels near an ellipse boundary are supersampled on a 4×4 grid.

use std::f64::consts::PI;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::{Image2D, Spacing};
use crate::rng::RngStream;
use crate::tomography::Sinogram;

const SUPERSAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseSpec {
    pub cx: f64,
    pub cy: f64,
    pub semi_x: f64,
    pub semi_y: f64,
    /// Counter-clockwise rotation in radians.
    pub phi: f64,
    /// Added to every pixel inside the ellipse.
    pub value: f64,
}

impl EllipseSpec {
    pub fn new(cx: f64, cy: f64, semi_x: f64, semi_y: f64, phi: f64, value: f64) -> Result<Self> {
        if !(semi_x > 0.0 && semi_y > 0.0) {
            return Err(Error::param(
                "semi_axes",
                format!("must be > 0, got ({semi_x}, {semi_y})"),
            ));
        }
        Ok(EllipseSpec {
            cx,
            cy,
            semi_x,
            semi_y,
            phi,
            value,
        })
    }

    /// Squared normalised radius `q`; the point is inside when `q <= 1`.
    #[inline]
    fn radius_sq(&self, x: f64, y: f64) -> f64 {
        let (s, c) = self.phi.sin_cos();
        let dx = x - self.cx;
        let dy = y - self.cy;
        let u = (dx * c + dy * s) / self.semi_x;
        let v = (-dx * s + dy * c) / self.semi_y;
        u * u + v * v
    }
}

/// Named phantom tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Shepp–Logan with the higher-contrast intensities of Toft (skull 1.0,
    /// brain 0.2). This is the default "shepp-logan".
    SheppLogan,
    /// The original Shepp–Logan intensities (skull 2.0, brain 1.02).
    SheppLoganOriginal,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shepp-logan" => Ok(Preset::SheppLogan),
            "shepp-logan-original" => Ok(Preset::SheppLoganOriginal),
            other => Err(Error::param(
                "preset",
                format!("unknown preset `{other}` (expected shepp-logan or shepp-logan-original)"),
            )),
        }
    }
}

// (cx, cy, semi_x, semi_y, phi in degrees)
const SHEPP_LOGAN_GEOMETRY: [(f64, f64, f64, f64, f64); 10] = [
    (0.0, 0.0, 0.69, 0.92, 0.0),
    (0.0, -0.0184, 0.6624, 0.874, 0.0),
    (0.22, 0.0, 0.11, 0.31, -18.0),
    (-0.22, 0.0, 0.16, 0.41, 18.0),
    (0.0, 0.35, 0.21, 0.25, 0.0),
    (0.0, 0.1, 0.046, 0.046, 0.0),
    (0.0, -0.1, 0.046, 0.046, 0.0),
    (-0.08, -0.605, 0.046, 0.023, 0.0),
    (0.0, -0.606, 0.023, 0.023, 0.0),
    (0.06, -0.605, 0.023, 0.046, 0.0),
];
const SHEPP_LOGAN_TOFT: [f64; 10] = [1.0, -0.8, -0.2, -0.2, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1];
const SHEPP_LOGAN_ORIGINAL: [f64; 10] = [
    2.0, -0.98, -0.02, -0.02, 0.01, 0.01, 0.01, 0.01, 0.01, 0.01,
];

impl Preset {
    pub fn ellipses(&self) -> Vec<EllipseSpec> {
        let values = match self {
            Preset::SheppLogan => &SHEPP_LOGAN_TOFT,
            Preset::SheppLoganOriginal => &SHEPP_LOGAN_ORIGINAL,
        };
        SHEPP_LOGAN_GEOMETRY
            .iter()
            .zip(values)
            .map(|(&(cx, cy, ax, ay, deg), &value)| EllipseSpec {
                cx,
                cy,
                semi_x: ax,
                semi_y: ay,
                phi: deg.to_radians(),
                value,
            })
            .collect()
    }

    pub fn render(&self, size: usize) -> Result<Image2D> {
        ellipses_phantom(size, &self.ellipses())
    }
}

/// Sum of ellipse indicators times their values on a `size × size` grid
/// with unit spacing.
pub fn ellipses_phantom(size: usize, ellipses: &[EllipseSpec]) -> Result<Image2D> {
    if size < 8 {
        return Err(Error::param("size", format!("must be >= 8, got {size}")));
    }
    let half = size as f64 / 2.0;
    let centre = (size - 1) as f64 / 2.0;
    let mut values = vec![0.0; size * size];
    for e in ellipses {
        // Supersample where the pixel centre is within ~1.5 px of the edge.
        let min_axis_px = e.semi_x.min(e.semi_y) * half;
        for r in 0..size {
            for c in 0..size {
                let x = (c as f64 - centre) / half;
                let y = (centre - r as f64) / half;
                let q = e.radius_sq(x, y);
                let edge_px = (q.sqrt() - 1.0).abs() * min_axis_px;
                let coverage = if edge_px > 1.5 {
                    if q <= 1.0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    let mut inside = 0usize;
                    for i in 0..SUPERSAMPLE {
                        for j in 0..SUPERSAMPLE {
                            let dr = (i as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                            let dc = (j as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5;
                            let xs = (c as f64 + dc - centre) / half;
                            let ys = (centre - r as f64 - dr) / half;
                            if e.radius_sq(xs, ys) <= 1.0 {
                                inside += 1;
                            }
                        }
                    }
                    inside as f64 / (SUPERSAMPLE * SUPERSAMPLE) as f64
                };
                if coverage > 0.0 {
                    values[r * size + c] += coverage * e.value;
                }
            }
        }
    }
    Image2D::new(size, size, Spacing::UNIT, values)
}

/// Centred disk of radius `radius_frac · size / 2` pixels.
pub fn disk_phantom(size: usize, radius_frac: f64, value: f64) -> Result<Image2D> {
    if !(radius_frac > 0.0 && radius_frac < 1.0) {
        return Err(Error::param(
            "radius_frac",
            format!("must be in (0, 1), got {radius_frac}"),
        ));
    }
    let disk = EllipseSpec::new(0.0, 0.0, radius_frac, radius_frac, 0.0, value)?;
    ellipses_phantom(size, &[disk])
}

/// Closed-form parallel projection of a centred disk: the chord length
/// `2·value·sqrt(R² - t²)` at every angle.
pub fn analytic_disk_sinogram(
    radius_mm: f64,
    value: f64,
    n_angles: usize,
    n_detectors: usize,
    det_spacing: f64,
) -> Result<Sinogram> {
    let sino = Sinogram::zeros(n_angles, n_detectors, det_spacing)?;
    let t_max = sino.detector_offset(n_detectors - 1);
    if !(radius_mm > 0.0 && radius_mm <= t_max) {
        return Err(Error::param(
            "radius_mm",
            format!("must be in (0, {t_max}] to fit the detector, got {radius_mm}"),
        ));
    }
    let row: Vec<f64> = (0..n_detectors)
        .map(|j| {
            let t = sino.detector_offset(j);
            let h = radius_mm * radius_mm - t * t;
            if h > 0.0 {
                2.0 * value * h.sqrt()
            } else {
                0.0
            }
        })
        .collect();
    let values = row.iter().copied().cycle().take(n_angles * n_detectors).collect();
    Sinogram::new(n_angles, n_detectors, det_spacing, values)
}

/// Adds i.i.d. `N(0, sigma²)` noise, drawn row-major from stream
/// `(seed, 0)`.
pub fn add_noise(img: &Image2D, sigma: f64, seed: u64) -> Result<Image2D> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = RngStream::new(seed, 0);
    let values = img
        .values()
        .iter()
        .map(|&v| v + sigma * rng.standard_normal())
        .collect();
    Image2D::new(img.height(), img.width(), img.spacing(), values)
}

/// Adds i.i.d. `N(0, sigma²)` noise to every sinogram bin, drawn row-major
/// from stream `(seed, 0)`.
pub fn add_sinogram_noise(sino: &Sinogram, sigma: f64, seed: u64) -> Result<Sinogram> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    let mut rng = RngStream::new(seed, 0);
    let values = sino
        .values()
        .iter()
        .map(|&v| if sigma == 0.0 { v } else { v + sigma * rng.standard_normal() })
        .collect();
    Sinogram::new(sino.n_angles(), sino.n_detectors(), sino.det_spacing(), values)
}

/// Body value of [`lesion_phantom`].
pub const LESION_BODY: f64 = 0.3;
/// Value inside a lesion of [`lesion_phantom`] (body plus lesion contrast).
pub const LESION_VALUE: f64 = 0.8;

/// An elliptical body with one to three elliptical lesions whose number,
/// position, size and orientation are drawn from stream `(seed, 0)`.
/// Lesions do not overlap each other.
pub fn lesion_phantom(size: usize, seed: u64) -> Result<Image2D> {
    let mut rng = RngStream::new(seed, 0);
    let mut ellipses = vec![EllipseSpec::new(0.0, 0.0, 0.8, 0.65, 0.0, LESION_BODY)?];
    let n = rng.integer_in(1, 3) as usize;
    let mut placed: Vec<(f64, f64, f64)> = Vec::new();
    while placed.len() < n {
        let cx = rng.uniform_in(-0.45, 0.45);
        let cy = rng.uniform_in(-0.3, 0.3);
        let sx = rng.uniform_in(0.08, 0.18);
        let sy = rng.uniform_in(0.08, 0.18);
        let phi = rng.uniform_in(0.0, PI);
        let reach = sx.max(sy);
        if placed
            .iter()
            .any(|&(px, py, pr)| ((px - cx).powi(2) + (py - cy).powi(2)).sqrt() < pr + reach + 0.02)
        {
            continue;
        }
        placed.push((cx, cy, reach));
        ellipses.push(EllipseSpec::new(cx, cy, sx, sy, phi, LESION_VALUE - LESION_BODY)?);
    }
    ellipses_phantom(size, &ellipses)
}

/// Disk area in pixels, for mass checks.
pub fn disk_area_px(size: usize, radius_frac: f64) -> f64 {
    let r = radius_frac * size as f64 / 2.0;
    PI * r * r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lesion_phantom_is_seeded() {
        let a = lesion_phantom(64, 3).unwrap();
        assert_eq!(a, lesion_phantom(64, 3).unwrap());
        assert_ne!(a, lesion_phantom(64, 4).unwrap());
        assert_eq!(a.get(0, 0), 0.0);
        assert!((a.max() - LESION_VALUE).abs() < 1e-12);
    }

    #[test]
    fn sinogram_noise_zero_sigma_is_identity() {
        let s = analytic_disk_sinogram(10.0, 1.0, 4, 31, 1.0).unwrap();
        assert_eq!(add_sinogram_noise(&s, 0.0, 1).unwrap(), s);
        assert_ne!(add_sinogram_noise(&s, 0.1, 1).unwrap(), s);
    }

    #[test]
    fn disk_interior_and_corner() {
        let d = disk_phantom(64, 0.5, 1.0).unwrap();
        assert_eq!(d.get(32, 32), 1.0);
        assert_eq!(d.get(0, 0), 0.0);
    }

    #[test]
    fn disk_mass_matches_area() {
        for (size, frac) in [(64, 0.5), (128, 0.3), (256, 0.8)] {
            let d = disk_phantom(size, frac, 2.5).unwrap();
            let expected = disk_area_px(size, frac) * 2.5;
            let rel = (d.sum() - expected).abs() / expected;
            assert!(rel < 0.005, "size {size}: rel err {rel}");
        }
    }

    #[test]
    fn zero_value_disk_is_zero() {
        let d = disk_phantom(32, 0.4, 0.0).unwrap();
        assert!(d.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn rejects_tiny_or_bad_inputs() {
        assert!(disk_phantom(4, 0.5, 1.0).is_err());
        assert!(disk_phantom(16, 1.0, 1.0).is_err());
        assert!(EllipseSpec::new(0.0, 0.0, 0.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn empty_ellipse_list_is_zero() {
        let img = ellipses_phantom(16, &[]).unwrap();
        assert!(img.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn circular_ellipse_equals_disk() {
        let e = EllipseSpec::new(0.0, 0.0, 0.6, 0.6, 0.0, 1.5).unwrap();
        assert_eq!(
            ellipses_phantom(48, &[e]).unwrap(),
            disk_phantom(48, 0.6, 1.5).unwrap()
        );
    }

    #[test]
    fn shepp_logan_regions() {
        let p = Preset::SheppLogan.render(256).unwrap();
        assert_eq!(p.get(0, 0), 0.0);
        assert_eq!(p.get(255, 128), 0.0);
        // Top of the skull ring, between the two outer ellipses.
        assert_eq!(p.get(14, 128), 1.0);
        // Brain matter between the ventricles: 1 - 0.8.
        assert!((p.get(128, 128) - 0.2).abs() < 1e-12);
        // Upper ellipse: 1 - 0.8 + 0.1.
        let y: f64 = 0.35;
        let r = (127.5 - y * 128.0).round() as usize;
        assert!((p.get(r, 128) - 0.3).abs() < 1e-12);
        assert!(p.min() >= -1e-12 && p.max() <= 1.0 + 1e-12);

        let o = Preset::SheppLoganOriginal.render(256).unwrap();
        assert_eq!(o.get(14, 128), 2.0);
        assert!((o.get(128, 128) - 1.02).abs() < 1e-12);
    }

    #[test]
    fn preset_names() {
        assert_eq!("shepp-logan".parse::<Preset>().unwrap(), Preset::SheppLogan);
        assert!("phantom".parse::<Preset>().is_err());
    }

    #[test]
    fn analytic_disk_closed_forms() {
        let r = 10.0;
        let s = analytic_disk_sinogram(r, 1.5, 3, 41, 0.5).unwrap();
        // bin 20 is t = 0; bin 40 is t = 10 = R.
        assert_eq!(s.get(0, 20), 2.0 * 1.5 * r);
        assert_eq!(s.get(2, 40), 0.0);
        let t = r / 2f64.sqrt();
        let h = r * r - t * t;
        assert!((2.0 * 1.5 * h.sqrt() - 2f64.sqrt() * 1.5 * r).abs() < 1e-12);
        assert_eq!(s.row(0), s.row(2));
        assert!(analytic_disk_sinogram(10.5, 1.0, 3, 41, 0.5).is_err());
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let flat = Image2D::filled(256, 256, Spacing::UNIT, 3.0);
        assert_eq!(add_noise(&flat, 0.0, 1).unwrap(), flat);
        let a = add_noise(&flat, 0.5, 42).unwrap();
        let b = add_noise(&flat, 0.5, 42).unwrap();
        assert_eq!(a, b);
        let n = a.values().len() as f64;
        let mean = a.sum() / n;
        let var = a.values().iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!((var.sqrt() - 0.5).abs() < 0.01, "std {}", var.sqrt());
    }
}
