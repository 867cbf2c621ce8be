use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Parallel-beam tomography, kernel augmentation and paired-consistency
/// evaluation on RIMG files.
#[derive(Debug, Parser)]
#[command(name = "fbpaug", version)]
pub struct Cli {
    /// Flat TOML file whose keys are long flag names (`p_sharpen` or
    /// `p-sharpen`); flags given on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Render a synthetic phantom.
    Phantom(PhantomArgs),
    /// Forward-project a square image into a sinogram.
    Radon(RadonArgs),
    /// Filtered back-projection of a sinogram.
    Fbp(FbpArgs),
    /// Sample augmentations for one file or every `.rimg` in a directory.
    Augment(AugmentArgs),
    /// Reconstruct one sinogram (or re-reconstruct one image) with a soft
    /// and a sharp kernel.
    Pair(PairArgs),
    /// Threshold segmentation with small-component removal.
    Segment(SegmentArgs),
    /// Dice consistency report and Bland–Altman CSV for paired masks.
    Eval(EvalArgs),
    /// Window an image into a 16-bit binary PGM.
    ExportPgm(ExportPgmArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    SheppLogan,
    SheppLoganOriginal,
    Disk,
    Lesions,
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    #[arg(long, value_enum, default_value = "shepp-logan")]
    pub preset: PresetArg,
    #[arg(long, default_value_t = 256)]
    pub size: usize,
    /// Disk radius as a fraction of half the side (`disk` preset).
    #[arg(long, default_value_t = 0.8)]
    pub radius_frac: f64,
    /// Disk attenuation (`disk` preset).
    #[arg(long, default_value_t = 1.0)]
    pub value: f64,
    /// Isotropic pixel size in mm.
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    /// Standard deviation of additive Gaussian noise.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    /// Seeds the lesion layout and the noise.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RadonArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = 360)]
    pub n_angles: usize,
    /// Zero-pad to the circumscribed square first (needed for non-square
    /// inputs and for objects that reach the corners).
    #[arg(long)]
    pub pad: bool,
    /// Standard deviation of Gaussian noise added to every bin.
    #[arg(long, default_value_t = 0.0)]
    pub noise_sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Ramp,
    Kab,
}

#[derive(Debug, Args)]
pub struct FbpArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "ramp")]
    pub filter: FilterArg,
    /// Kernel gain `a` (`kab` only); `a >= -1`.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub a: f64,
    /// Kernel exponent `b` (`kab` only); `b > 0`.
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// A `.rimg` image or a directory of them.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output file, or directory when the input is a directory.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Comma-separated families: fbpaug, gamma, noise, windowing, flips.
    #[arg(long, visible_alias = "modes", value_name = "LIST")]
    pub mode: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Item index for a single-file input (batch items use their sorted
    /// position).
    #[arg(long, default_value_t = 0)]
    pub index: u64,
    /// Worker threads; 0 uses every core. Results do not depend on it.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    #[arg(long)]
    pub p_sharpen: Option<f64>,
    #[arg(long)]
    pub p_smooth: Option<f64>,
    #[arg(long)]
    pub sharpen_a_min: Option<f64>,
    #[arg(long)]
    pub sharpen_a_max: Option<f64>,
    #[arg(long)]
    pub sharpen_b_min: Option<f64>,
    #[arg(long)]
    pub sharpen_b_max: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub smooth_a_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub smooth_a_max: Option<f64>,
    #[arg(long)]
    pub smooth_b_min: Option<f64>,
    #[arg(long)]
    pub smooth_b_max: Option<f64>,
    /// Standard deviation of `ln(gamma)`.
    #[arg(long)]
    pub gamma_log_std: Option<f64>,
    #[arg(long)]
    pub noise_sigma: Option<f64>,
    /// `normalized` (noise on min-max scaled values) or `raw`.
    #[arg(long)]
    pub noise_scale: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub window_center_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub window_center_max: Option<f64>,
    #[arg(long)]
    pub window_width_min: Option<f64>,
    #[arg(long)]
    pub window_width_max: Option<f64>,
    #[arg(long)]
    pub p_geometric: Option<f64>,
    /// `coupled` (one coin for rotation and flip) or `independent`.
    #[arg(long)]
    pub geometric_coupling: Option<String>,
    /// Projections in the internal Radon step; 0 = padded side length.
    #[arg(long)]
    pub n_angles: Option<usize>,
    /// Background level for re-reconstruction; default is the image minimum.
    #[arg(long, allow_negative_numbers = true)]
    pub background: Option<f64>,
    /// Resample to this isotropic pixel size (mm).
    #[arg(long)]
    pub target_spacing: Option<f64>,
    /// `before` or `after` the other augmentations.
    #[arg(long)]
    pub resample_order: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// A sinogram or image `.rimg`, or a directory of them.
    #[arg(short, long)]
    pub input: PathBuf,
    /// Output for the soft-kernel reconstruction (file or directory).
    #[arg(long)]
    pub soft: PathBuf,
    /// Output for the sharp-kernel reconstruction (file or directory).
    #[arg(long)]
    pub sharp: PathBuf,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub soft_a: f64,
    #[arg(long, default_value_t = 0.7)]
    pub soft_b: f64,
    #[arg(long, default_value_t = 30.0, allow_negative_numbers = true)]
    pub sharp_a: f64,
    #[arg(long, default_value_t = 3.0)]
    pub sharp_b: f64,
    /// Projections when re-reconstructing an image; 0 = padded side length.
    #[arg(long, default_value_t = 0)]
    pub n_angles: usize,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    /// An image `.rimg` or a directory of them.
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Lower intensity threshold (inclusive).
    #[arg(long, allow_negative_numbers = true)]
    pub low: f64,
    /// Upper intensity threshold (inclusive).
    #[arg(long, default_value_t = f64::INFINITY, allow_negative_numbers = true)]
    pub high: f64,
    /// 4-connected components smaller than this are dropped.
    #[arg(long, default_value_t = 1)]
    pub min_component_px: usize,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Masks from the soft-kernel images (file or directory).
    #[arg(long)]
    pub soft: PathBuf,
    /// Masks from the sharp-kernel images, matched by file name.
    #[arg(long)]
    pub sharp: PathBuf,
    /// Write `pair_id,mean_volume,diff_volume,dice` rows here.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportPgmArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Window centre; default is the midpoint of the value range.
    #[arg(long, allow_negative_numbers = true)]
    pub center: Option<f64>,
    /// Window width; default is the value range.
    #[arg(long)]
    pub width: Option<f64>,
}
