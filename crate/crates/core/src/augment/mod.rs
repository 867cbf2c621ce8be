//! Sinogram-space kernel augmentation and the intensity/geometric baselines.
//!
//! [`fbpaug`] re-reconstructs an image through the forward projector with a
//! different kernel from the `k_{a,b}` family:
//! pad, remove background, Radon transform, filter with `|w|(1 + a·ŵ^b)`,
//! back-project, restore background, crop. With `a = 0` it runs exactly the
//! plain ramp re-reconstruction.

mod config;
mod pipeline;

pub use config::{AugmentConfig, GeometricCoupling, Mode, NoiseScale, ResampleOrder};
pub use pipeline::{transform, Augmented, Step};

use crate::error::{Error, Result};
use crate::filtering::{fbp, FilterSpec};
use crate::image::{Image2D, Spacing};
use crate::rng::RngStream;
use crate::tomography::{crop_after_radon, pad_for_radon, padded_side, radon};

/// Level treated as "outside the object" during re-reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Background {
    /// The image minimum (air for CT, zero for clean phantoms).
    #[default]
    Min,
    Value(f64),
}

impl Background {
    fn resolve(&self, img: &Image2D) -> f64 {
        match *self {
            Background::Min => img.min(),
            Background::Value(v) => v,
        }
    }
}

impl From<Option<f64>> for Background {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Background::Min, Background::Value)
    }
}

/// Options shared by every re-reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReconOptions {
    /// Number of projections; `None` uses the padded side length.
    pub n_angles: Option<usize>,
    pub background: Background,
}

/// Projection count used when none is given: one per padded detector bin.
pub fn default_n_angles(img: &Image2D) -> usize {
    padded_side(img.height(), img.width())
}

/// Projects `img` and reconstructs it with `filter`, keeping shape and
/// spacing.
pub fn reconstruct(img: &Image2D, filter: FilterSpec, opts: &ReconOptions) -> Result<Image2D> {
    let n_angles = opts.n_angles.unwrap_or_else(|| default_n_angles(img));
    let background = opts.background.resolve(img);
    let (padded, rec) = pad_for_radon(img, background);
    let shifted = padded.map(|v| v - background)?;
    let sino = radon(&shifted, n_angles)?;
    let recon = fbp(&sino, filter)?;
    let recon = crop_after_radon(&recon, &rec)?;
    recon
        .map(|v| v + background)
        .map(|out| out.with_spacing(img.spacing()))
}

/// Simulates reconstruction of `img` with kernel `k_{a,b}`.
pub fn fbpaug(img: &Image2D, a: f64, b: f64, n_angles: Option<usize>) -> Result<Image2D> {
    fbpaug_with(
        img,
        a,
        b,
        &ReconOptions {
            n_angles,
            background: Background::Min,
        },
    )
}

pub fn fbpaug_with(img: &Image2D, a: f64, b: f64, opts: &ReconOptions) -> Result<Image2D> {
    reconstruct(img, FilterSpec::kab(a, b)?, opts)
}

/// Outcome of drawing kernel-augmentation parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelDraw {
    Sharpen { a: f64, b: f64 },
    Smooth { a: f64, b: f64 },
    Identity,
}

/// Draws sharpen / smooth / identity with the configured probabilities.
/// Always consumes three uniforms so later draws stay aligned.
pub fn sample_fbpaug(rng: &mut RngStream, cfg: &AugmentConfig) -> KernelDraw {
    let u = rng.uniform();
    let ua = rng.uniform();
    let ub = rng.uniform();
    let lerp = |lo: f64, hi: f64, t: f64| lo + (hi - lo) * t;
    if u < cfg.p_sharpen {
        KernelDraw::Sharpen {
            a: lerp(cfg.sharpen_a_min, cfg.sharpen_a_max, ua),
            b: lerp(cfg.sharpen_b_min, cfg.sharpen_b_max, ub),
        }
    } else if u < cfg.p_sharpen + cfg.p_smooth {
        KernelDraw::Smooth {
            a: lerp(cfg.smooth_a_min, cfg.smooth_a_max, ua),
            b: lerp(cfg.smooth_b_min, cfg.smooth_b_max, ub),
        }
    } else {
        KernelDraw::Identity
    }
}

/// `((I - m) / (M - m))^γ · (M - m) + m` with `m`, `M` the image extrema.
pub fn gamma_aug(img: &Image2D, gamma: f64) -> Result<Image2D> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::param("gamma", format!("must be > 0, got {gamma}")));
    }
    let (m, big_m) = (img.min(), img.max());
    let range = big_m - m;
    if range == 0.0 {
        return Ok(img.clone());
    }
    img.map(|v| {
        // Clamp guards the base against rounding just outside [0, 1].
        let t = ((v - m) / range).clamp(0.0, 1.0);
        t.powf(gamma) * range + m
    })
}

/// Draws `γ = exp(z)` with `z ~ N(0, log_std²)`.
pub fn sample_gamma(rng: &mut RngStream, log_std: f64) -> f64 {
    rng.normal(0.0, log_std).exp()
}

/// Adds `N(0, sigma²)` noise per pixel, drawn row-major from `rng`.
pub fn noise_aug(
    img: &Image2D,
    sigma: f64,
    scale: NoiseScale,
    rng: &mut RngStream,
) -> Result<Image2D> {
    if !(sigma.is_finite() && sigma >= 0.0) {
        return Err(Error::param("sigma", format!("must be >= 0, got {sigma}")));
    }
    let (m, range) = match scale {
        NoiseScale::Raw => (0.0, 1.0),
        NoiseScale::Normalized => {
            let m = img.min();
            let range = img.max() - m;
            if range == 0.0 {
                return Ok(img.clone());
            }
            (m, range)
        }
    };
    let values = img
        .values()
        .iter()
        .map(|&v| {
            let n = (v - m) / range + sigma * rng.standard_normal();
            n * range + m
        })
        .collect();
    Image2D::new(img.height(), img.width(), img.spacing(), values)
}

/// Clips values to `[c - w/2, c + w/2]`.
pub fn windowing_aug(img: &Image2D, center: f64, width: f64) -> Result<Image2D> {
    if !(width.is_finite() && width > 0.0) || !center.is_finite() {
        return Err(Error::param("width", format!("must be > 0, got {width}")));
    }
    let lo = center - width / 2.0;
    let hi = center + width / 2.0;
    img.map(|v| v.clamp(lo, hi))
}

/// Draws `(center, width)` uniformly from the configured ranges.
pub fn sample_window(rng: &mut RngStream, cfg: &AugmentConfig) -> (f64, f64) {
    let c = rng.uniform_in(cfg.window_center_min, cfg.window_center_max);
    let w = rng.uniform_in(cfg.window_width_min, cfg.window_width_max);
    (c, w)
}

/// Mirror axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flip {
    /// Left-right.
    Horizontal,
    /// Top-bottom.
    Vertical,
}

/// Rotates counter-clockwise by `quarter_turns · 90°`.
pub fn rotate90(img: &Image2D, quarter_turns: u32) -> Image2D {
    let (h, w) = img.shape();
    let Spacing { sy, sx } = img.spacing();
    match quarter_turns % 4 {
        0 => img.clone(),
        1 => {
            // out[r][c] = in[c][w - 1 - r], shape w × h
            let values = (0..w)
                .flat_map(|r| (0..h).map(move |c| (r, c)))
                .map(|(r, c)| img.get(c, w - 1 - r))
                .collect();
            Image2D::from_parts_unchecked(w, h, Spacing { sy: sx, sx: sy }, values)
        }
        2 => {
            let mut values = img.values().to_vec();
            values.reverse();
            Image2D::from_parts_unchecked(h, w, img.spacing(), values)
        }
        _ => {
            // out[r][c] = in[h - 1 - c][r]
            let values = (0..w)
                .flat_map(|r| (0..h).map(move |c| (r, c)))
                .map(|(r, c)| img.get(h - 1 - c, r))
                .collect();
            Image2D::from_parts_unchecked(w, h, Spacing { sy: sx, sx: sy }, values)
        }
    }
}

pub fn flip(img: &Image2D, axis: Flip) -> Image2D {
    let (h, w) = img.shape();
    let values = (0..h)
        .flat_map(|r| (0..w).map(move |c| (r, c)))
        .map(|(r, c)| match axis {
            Flip::Horizontal => img.get(r, w - 1 - c),
            Flip::Vertical => img.get(h - 1 - r, c),
        })
        .collect();
    Image2D::from_parts_unchecked(h, w, img.spacing(), values)
}

/// Geometric draw: optional quarter-turn count and optional flip.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeometricDraw {
    pub quarter_turns: Option<u32>,
    pub flip: Option<Flip>,
}

impl GeometricDraw {
    pub fn apply(&self, img: &Image2D) -> Image2D {
        let rotated = match self.quarter_turns {
            Some(k) => rotate90(img, k),
            None => img.clone(),
        };
        match self.flip {
            Some(axis) => flip(&rotated, axis),
            None => rotated,
        }
    }
}

/// Draws the rotation/flip decision. Consumes a fixed number of draws
/// (three uniforms plus one integer) regardless of outcome.
pub fn sample_geometric(
    rng: &mut RngStream,
    p: f64,
    coupling: GeometricCoupling,
) -> GeometricDraw {
    let rotate_coin = rng.coin(p);
    let flip_coin = rng.coin(p);
    let k = rng.integer_in(1, 3);
    let axis = if rng.coin(0.5) {
        Flip::Horizontal
    } else {
        Flip::Vertical
    };
    let (do_rotate, do_flip) = match coupling {
        GeometricCoupling::Coupled => (rotate_coin, rotate_coin),
        GeometricCoupling::Independent => (rotate_coin, flip_coin),
    };
    GeometricDraw {
        quarter_turns: do_rotate.then_some(k),
        flip: do_flip.then_some(axis),
    }
}

/// With probability 0.5 rotates by a random multiple of 90° and flips.
pub fn flip_rot_aug(img: &Image2D, rng: &mut RngStream) -> Image2D {
    sample_geometric(rng, 0.5, GeometricCoupling::Coupled).apply(img)
}

/// Bilinear resampling to `target` spacing over the same physical extent.
/// Output size is `round(n · spacing / target)` per axis; samples beyond
/// the outermost pixel centres take the edge value.
pub fn resample(img: &Image2D, target: Spacing) -> Result<Image2D> {
    let (h, w) = img.shape();
    let src = img.spacing();
    let out_h = ((h as f64 * src.sy / target.sy).round() as usize).max(1);
    let out_w = ((w as f64 * src.sx / target.sx).round() as usize).max(1);
    let ry = target.sy / src.sy;
    let rx = target.sx / src.sx;
    let mut values = Vec::with_capacity(out_h * out_w);
    for r in 0..out_h {
        let sr = ((r as f64 + 0.5) * ry - 0.5).clamp(0.0, (h - 1) as f64);
        for c in 0..out_w {
            let sc = ((c as f64 + 0.5) * rx - 0.5).clamp(0.0, (w - 1) as f64);
            values.push(img.bilinear_or(sr, sc, 0.0));
        }
    }
    // Clamped coordinates never read outside; the fill is unused.
    Image2D::new(out_h, out_w, target, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img_2x3() -> Image2D {
        Image2D::new(2, 3, Spacing::new(0.5, 2.0).unwrap(), (0..6).map(f64::from).collect())
            .unwrap()
    }

    #[test]
    fn gamma_identity_and_endpoints() {
        let img = Image2D::from_fn(4, 4, Spacing::UNIT, |r, c| (r * 4 + c) as f64 * 1.7 - 3.0)
            .unwrap();
        let same = gamma_aug(&img, 1.0).unwrap();
        for (a, b) in same.values().iter().zip(img.values()) {
            assert!((a - b).abs() < 1e-6);
        }
        for g in [0.3, 0.8, 2.5] {
            let out = gamma_aug(&img, g).unwrap();
            assert_eq!(out.min(), img.min());
            assert!((out.max() - img.max()).abs() < 1e-12);
        }
    }

    #[test]
    fn gamma_direct_formula() {
        let img = Image2D::new(1, 3, Spacing::UNIT, vec![0.0, 0.25, 1.0]).unwrap();
        let out = gamma_aug(&img, 2.0).unwrap();
        assert_eq!(out.values(), &[0.0, 0.0625, 1.0]);
        assert!(gamma_aug(&img, 0.0).is_err());
    }

    #[test]
    fn gamma_on_constant_image_is_identity() {
        let img = Image2D::filled(3, 3, Spacing::UNIT, -1000.0);
        assert_eq!(gamma_aug(&img, 3.0).unwrap(), img);
    }

    #[test]
    fn windowing_examples() {
        let img = Image2D::new(1, 4, Spacing::UNIT, vec![-2000.0, -1350.0, 0.0, 900.0]).unwrap();
        let out = windowing_aug(&img, -600.0, 1500.0).unwrap();
        assert_eq!(out.values(), &[-1350.0, -1350.0, 0.0, 150.0]);
        let inside = Image2D::new(1, 2, Spacing::UNIT, vec![-1000.0, 100.0]).unwrap();
        assert_eq!(windowing_aug(&inside, -600.0, 1500.0).unwrap(), inside);
        assert!(windowing_aug(&img, 0.0, 0.0).is_err());
    }

    #[test]
    fn noise_on_constant_image_is_identity() {
        let img = Image2D::filled(4, 4, Spacing::UNIT, 5.0);
        let mut rng = RngStream::new(1, 0);
        assert_eq!(noise_aug(&img, 0.1, NoiseScale::Normalized, &mut rng).unwrap(), img);
    }

    #[test]
    fn noise_is_reproducible_from_stream_state() {
        let img = Image2D::from_fn(8, 8, Spacing::UNIT, |r, c| (r + c) as f64).unwrap();
        let a = noise_aug(&img, 0.1, NoiseScale::Normalized, &mut RngStream::new(3, 2)).unwrap();
        let b = noise_aug(&img, 0.1, NoiseScale::Normalized, &mut RngStream::new(3, 2)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, img);
    }

    #[test]
    fn rotate_2x3_quarter_turn() {
        // [0 1 2]      [2 5]
        // [3 4 5]  ->  [1 4]
        //              [0 3]
        let out = rotate90(&img_2x3(), 1);
        assert_eq!(out.shape(), (3, 2));
        assert_eq!(out.values(), &[2.0, 5.0, 1.0, 4.0, 0.0, 3.0]);
        assert_eq!(out.spacing(), Spacing::new(2.0, 0.5).unwrap());
        let back = rotate90(&out, 3);
        assert_eq!(back, img_2x3());
    }

    #[test]
    fn four_quarter_turns_are_identity() {
        let img = img_2x3();
        let mut cur = img.clone();
        for _ in 0..4 {
            cur = rotate90(&cur, 1);
        }
        assert_eq!(cur, img);
        assert_eq!(rotate90(&rotate90(&img, 1), 1), rotate90(&img, 2));
    }

    #[test]
    fn flips() {
        let img = img_2x3();
        assert_eq!(flip(&img, Flip::Horizontal).values(), &[2.0, 1.0, 0.0, 5.0, 4.0, 3.0]);
        assert_eq!(flip(&img, Flip::Vertical).values(), &[3.0, 4.0, 5.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn flip_rot_preserves_value_multiset() {
        let img = Image2D::from_fn(5, 7, Spacing::UNIT, |r, c| (r * 7 + c) as f64).unwrap();
        let mut applied = 0;
        for idx in 0..40 {
            let out = flip_rot_aug(&img, &mut RngStream::new(11, idx));
            let mut a = out.values().to_vec();
            a.sort_by(f64::total_cmp);
            assert_eq!(a, img.values());
            if out != img {
                applied += 1;
            }
        }
        assert!(applied > 5 && applied < 35, "applied {applied}/40");
    }

    #[test]
    fn geometric_coupling_modes() {
        for idx in 0..50 {
            let d = sample_geometric(&mut RngStream::new(5, idx), 0.5, GeometricCoupling::Coupled);
            assert_eq!(d.quarter_turns.is_some(), d.flip.is_some());
        }
        let mut split = false;
        for idx in 0..50 {
            let d =
                sample_geometric(&mut RngStream::new(5, idx), 0.5, GeometricCoupling::Independent);
            split |= d.quarter_turns.is_some() != d.flip.is_some();
        }
        assert!(split);
    }

    #[test]
    fn resample_size_and_identity() {
        let img = Image2D::from_fn(6, 5, Spacing::isotropic(0.7).unwrap(), |r, c| {
            (r as f64).sin() + c as f64
        })
        .unwrap();
        let same = resample(&img, img.spacing()).unwrap();
        assert_eq!(same.shape(), img.shape());
        for (a, b) in same.values().iter().zip(img.values()) {
            assert!((a - b).abs() < 1e-6);
        }
        let big = Image2D::filled(512, 512, Spacing::isotropic(0.7).unwrap(), -1000.0);
        let out = resample(&big, Spacing::UNIT).unwrap();
        assert_eq!(out.shape(), (358, 358));
        assert_eq!(out.spacing(), Spacing::UNIT);
        assert!(out.values().iter().all(|&v| v == -1000.0));
    }

    #[test]
    fn sample_fbpaug_ranges() {
        let cfg = AugmentConfig {
            p_sharpen: 1.0,
            p_smooth: 0.0,
            ..Default::default()
        };
        let mut rng = RngStream::new(0, 0);
        for _ in 0..1000 {
            match sample_fbpaug(&mut rng, &cfg) {
                KernelDraw::Sharpen { a, b } => {
                    assert!((10.0..=40.0).contains(&a) && (1.0..=4.0).contains(&b));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
        let off = AugmentConfig {
            p_sharpen: 0.0,
            p_smooth: 0.0,
            ..Default::default()
        };
        for _ in 0..100 {
            assert_eq!(sample_fbpaug(&mut rng, &off), KernelDraw::Identity);
        }
        let smooth = AugmentConfig {
            p_sharpen: 0.0,
            p_smooth: 1.0,
            ..Default::default()
        };
        for _ in 0..1000 {
            match sample_fbpaug(&mut rng, &smooth) {
                KernelDraw::Smooth { a, b } => {
                    assert!((-1.0..=0.0).contains(&a) && (0.1..=1.0).contains(&b));
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn sharpen_a_mean_is_range_midpoint() {
        let cfg = AugmentConfig {
            p_sharpen: 1.0,
            p_smooth: 0.0,
            ..Default::default()
        };
        let mut rng = RngStream::new(2024, 0);
        let n = 100_000;
        let mut sum = 0.0;
        for _ in 0..n {
            if let KernelDraw::Sharpen { a, .. } = sample_fbpaug(&mut rng, &cfg) {
                sum += a;
            }
        }
        let mean = sum / n as f64;
        assert!((mean - 25.0).abs() < 0.3, "mean {mean}");
    }

    #[test]
    fn fbpaug_rejects_invalid_kernel() {
        let img = Image2D::zeros(8, 8, Spacing::UNIT);
        assert!(fbpaug(&img, -1.5, 1.0, Some(8)).is_err());
        assert!(fbpaug(&img, 1.0, 0.0, Some(8)).is_err());
    }
}
