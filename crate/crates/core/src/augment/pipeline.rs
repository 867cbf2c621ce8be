use serde::Serialize;

use super::{
    fbpaug_with, gamma_aug, noise_aug, resample, sample_fbpaug, sample_gamma, sample_geometric,
    sample_window, windowing_aug, AugmentConfig, Flip, KernelDraw, Mode, ReconOptions,
    ResampleOrder,
};
use crate::error::Result;
use crate::image::{Image2D, Spacing};
use crate::rng::RngStream;

/// A step that was applied to an item, with its drawn parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "lowercase")]
pub enum Step {
    Resample { spacing_mm: f64 },
    Sharpen { a: f64, b: f64 },
    Smooth { a: f64, b: f64 },
    Gamma { gamma: f64 },
    Noise { sigma: f64 },
    Windowing { center: f64, width: f64 },
    Rotate { quarter_turns: u32 },
    Flip { axis: &'static str },
}

#[derive(Debug, Clone)]
pub struct Augmented {
    pub image: Image2D,
    pub steps: Vec<Step>,
}

/// Applies every enabled family to `img` using the stream for
/// `(cfg.seed, item_index)`.
///
/// Stages run in a fixed order (optional resample, FBPAug, gamma, noise,
/// windowing, flips, optional resample) and draw from a single stream, so the
/// result depends only on the image, the config and the item index.
pub fn transform(img: &Image2D, cfg: &AugmentConfig, item_index: u64) -> Result<Augmented> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed, item_index);
    let mut steps = Vec::new();
    let mut cur = img.clone();

    let resample_step = |cur: &Image2D, steps: &mut Vec<Step>| -> Result<Option<Image2D>> {
        match cfg.target_spacing {
            Some(s) => {
                steps.push(Step::Resample { spacing_mm: s });
                Ok(Some(resample(cur, Spacing::isotropic(s)?)?))
            }
            None => Ok(None),
        }
    };

    if cfg.resample_order == ResampleOrder::Before {
        if let Some(out) = resample_step(&cur, &mut steps)? {
            cur = out;
        }
    }

    for mode in Mode::ALL {
        if !cfg.is_enabled(mode) {
            continue;
        }
        match mode {
            Mode::Fbpaug => {
                let opts = ReconOptions {
                    n_angles: (cfg.n_angles > 0).then_some(cfg.n_angles),
                    background: cfg.background.into(),
                };
                match sample_fbpaug(&mut rng, cfg) {
                    KernelDraw::Sharpen { a, b } => {
                        cur = fbpaug_with(&cur, a, b, &opts)?;
                        steps.push(Step::Sharpen { a, b });
                    }
                    KernelDraw::Smooth { a, b } => {
                        cur = fbpaug_with(&cur, a, b, &opts)?;
                        steps.push(Step::Smooth { a, b });
                    }
                    KernelDraw::Identity => {}
                }
            }
            Mode::Gamma => {
                let gamma = sample_gamma(&mut rng, cfg.gamma_log_std);
                cur = gamma_aug(&cur, gamma)?;
                steps.push(Step::Gamma { gamma });
            }
            Mode::Noise => {
                cur = noise_aug(&cur, cfg.noise_sigma, cfg.noise_scale, &mut rng)?;
                steps.push(Step::Noise {
                    sigma: cfg.noise_sigma,
                });
            }
            Mode::Windowing => {
                let (center, width) = sample_window(&mut rng, cfg);
                cur = windowing_aug(&cur, center, width)?;
                steps.push(Step::Windowing { center, width });
            }
            Mode::Flips => {
                let draw = sample_geometric(&mut rng, cfg.p_geometric, cfg.geometric_coupling);
                cur = draw.apply(&cur);
                if let Some(k) = draw.quarter_turns {
                    steps.push(Step::Rotate { quarter_turns: k });
                }
                if let Some(axis) = draw.flip {
                    steps.push(Step::Flip {
                        axis: match axis {
                            Flip::Horizontal => "horizontal",
                            Flip::Vertical => "vertical",
                        },
                    });
                }
            }
        }
    }

    if cfg.resample_order == ResampleOrder::After {
        if let Some(out) = resample_step(&cur, &mut steps)? {
            cur = out;
        }
    }

    Ok(Augmented { image: cur, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantoms::disk_phantom;

    #[test]
    fn disabled_everything_is_identity() {
        let img = disk_phantom(16, 0.5, 1.0).unwrap();
        let cfg = AugmentConfig {
            modes: vec![Mode::Fbpaug],
            p_sharpen: 0.0,
            p_smooth: 0.0,
            ..Default::default()
        };
        for idx in 0..5 {
            let out = transform(&img, &cfg, idx).unwrap();
            assert_eq!(out.image, img);
            assert!(out.steps.is_empty());
        }
    }

    #[test]
    fn same_index_same_output() {
        let img = disk_phantom(24, 0.5, 1.0).unwrap();
        let cfg = AugmentConfig {
            modes: Mode::ALL.to_vec(),
            p_sharpen: 0.5,
            p_smooth: 0.5,
            window_center_min: 0.2,
            window_center_max: 0.4,
            window_width_min: 0.5,
            window_width_max: 0.8,
            seed: 7,
            ..Default::default()
        };
        let a = transform(&img, &cfg, 3).unwrap();
        let b = transform(&img, &cfg, 3).unwrap();
        assert_eq!(a.image, b.image);
        assert_eq!(a.steps, b.steps);
        let c = transform(&img, &cfg, 4).unwrap();
        assert_ne!(a.image, c.image);
    }

    #[test]
    fn sharpen_fraction_tracks_probability() {
        let mut rng_hits = 0;
        let cfg = AugmentConfig {
            p_sharpen: 0.3,
            p_smooth: 0.2,
            ..Default::default()
        };
        for idx in 0..1000 {
            let mut rng = RngStream::new(cfg.seed, idx);
            if matches!(sample_fbpaug(&mut rng, &cfg), KernelDraw::Sharpen { .. }) {
                rng_hits += 1;
            }
        }
        let frac = rng_hits as f64 / 1000.0;
        assert!((frac - 0.3).abs() < 0.05, "fraction {frac}");
    }

    #[test]
    fn resample_before_changes_shape() {
        let img = Image2D::filled(20, 20, Spacing::isotropic(0.5).unwrap(), 1.0);
        let cfg = AugmentConfig {
            modes: vec![],
            target_spacing: Some(1.0),
            ..Default::default()
        };
        let out = transform(&img, &cfg, 0).unwrap();
        assert_eq!(out.image.shape(), (10, 10));
        assert_eq!(out.steps, vec![Step::Resample { spacing_mm: 1.0 }]);
    }
}
