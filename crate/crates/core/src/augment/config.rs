use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One augmentation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fbpaug,
    Gamma,
    Noise,
    Windowing,
    Flips,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Fbpaug,
        Mode::Gamma,
        Mode::Noise,
        Mode::Windowing,
        Mode::Flips,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Mode::Fbpaug => "fbpaug",
            Mode::Gamma => "gamma",
            Mode::Noise => "noise",
            Mode::Windowing => "windowing",
            Mode::Flips => "flips",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .iter()
            .copied()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown mode `{s}`")))
    }
}

/// Intensity scale on which additive noise is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseScale {
    /// Min-max normalise to `[0, 1]`, add noise, map back.
    Normalized,
    /// Add noise directly to the stored values.
    Raw,
}

/// How the rotation and flip of the geometric augmentation are triggered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometricCoupling {
    /// A single coin applies both the rotation and the flip.
    Coupled,
    /// Separate coins for rotation and flip.
    Independent,
}

/// Whether resampling to `target_spacing` happens before or after the
/// intensity augmentations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleOrder {
    Before,
    After,
}

/// Sampling ranges and probabilities for every augmentation family.
///
/// Serialised as a flat TOML table; every key matches a long flag of the
/// `augment` subcommand (underscores become hyphens).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    /// Enabled families, applied in the fixed order of [`Mode::ALL`].
    pub modes: Vec<Mode>,
    pub p_sharpen: f64,
    pub p_smooth: f64,
    pub sharpen_a_min: f64,
    pub sharpen_a_max: f64,
    pub sharpen_b_min: f64,
    pub sharpen_b_max: f64,
    pub smooth_a_min: f64,
    pub smooth_a_max: f64,
    pub smooth_b_min: f64,
    pub smooth_b_max: f64,
    /// Standard deviation of `ln γ`.
    pub gamma_log_std: f64,
    pub noise_sigma: f64,
    pub noise_scale: NoiseScale,
    pub window_center_min: f64,
    pub window_center_max: f64,
    pub window_width_min: f64,
    pub window_width_max: f64,
    pub p_geometric: f64,
    pub geometric_coupling: GeometricCoupling,
    /// Projection count for the internal Radon step; 0 = padded side length.
    pub n_angles: usize,
    /// Background level removed before projection; absent = image minimum.
    pub background: Option<f64>,
    /// Isotropic target pixel size in mm; absent = no resampling.
    pub target_spacing: Option<f64>,
    pub resample_order: ResampleOrder,
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            modes: vec![Mode::Fbpaug],
            p_sharpen: 0.25,
            p_smooth: 0.25,
            sharpen_a_min: 10.0,
            sharpen_a_max: 40.0,
            sharpen_b_min: 1.0,
            sharpen_b_max: 4.0,
            smooth_a_min: -1.0,
            smooth_a_max: 0.0,
            smooth_b_min: 0.1,
            smooth_b_max: 1.0,
            gamma_log_std: 0.2,
            noise_sigma: 0.1,
            noise_scale: NoiseScale::Normalized,
            window_center_min: -700.0,
            window_center_max: -500.0,
            window_width_min: 1300.0,
            window_width_max: 1700.0,
            p_geometric: 0.5,
            geometric_coupling: GeometricCoupling::Coupled,
            n_angles: 0,
            background: None,
            target_spacing: None,
            resample_order: ResampleOrder::Before,
            seed: 0,
        }
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be in [0, 1], got {p}")))
    }
}

fn check_range(name: &'static str, lo: f64, hi: f64) -> Result<()> {
    if lo.is_finite() && hi.is_finite() && lo <= hi {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} range must satisfy min <= max, got [{lo}, {hi}]"
        )))
    }
}

impl AugmentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: AugmentConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("flat config always serialises")
    }

    pub fn is_enabled(&self, mode: Mode) -> bool {
        self.modes.contains(&mode)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("p_sharpen", self.p_sharpen)?;
        check_probability("p_smooth", self.p_smooth)?;
        check_probability("p_geometric", self.p_geometric)?;
        if self.p_sharpen + self.p_smooth > 1.0 {
            return Err(Error::Config(format!(
                "p_sharpen + p_smooth must be <= 1, got {}",
                self.p_sharpen + self.p_smooth
            )));
        }
        check_range("sharpen_a", self.sharpen_a_min, self.sharpen_a_max)?;
        check_range("sharpen_b", self.sharpen_b_min, self.sharpen_b_max)?;
        check_range("smooth_a", self.smooth_a_min, self.smooth_a_max)?;
        check_range("smooth_b", self.smooth_b_min, self.smooth_b_max)?;
        check_range("window_center", self.window_center_min, self.window_center_max)?;
        check_range("window_width", self.window_width_min, self.window_width_max)?;
        if self.sharpen_a_min.min(self.smooth_a_min) < -1.0 {
            return Err(Error::Config("kernel parameter a must be >= -1".into()));
        }
        if self.sharpen_b_min <= 0.0 || self.smooth_b_min <= 0.0 {
            return Err(Error::Config("kernel exponent b must be > 0".into()));
        }
        if self.window_width_min <= 0.0 {
            return Err(Error::Config("window width must be > 0".into()));
        }
        if !(self.gamma_log_std.is_finite() && self.gamma_log_std >= 0.0) {
            return Err(Error::Config("gamma_log_std must be >= 0".into()));
        }
        if !(self.noise_sigma.is_finite() && self.noise_sigma >= 0.0) {
            return Err(Error::Config("noise_sigma must be >= 0".into()));
        }
        if let Some(s) = self.target_spacing {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::Config(format!("target_spacing must be > 0, got {s}")));
            }
        }
        if let Some(b) = self.background {
            if !b.is_finite() {
                return Err(Error::Config("background must be finite".into()));
            }
        }
        Ok(())
    }
}
