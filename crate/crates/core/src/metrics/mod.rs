//! Segmentation agreement: Dice, lesion volume, Bland–Altman, multiple-test
//! correction, a threshold segmenter and the paired-consistency report.

mod wilcoxon;

pub use wilcoxon::{wilcoxon_one_sided, wilcoxon_one_sided_with, Method, WilcoxonResult, EXACT_MAX_N};

use std::collections::VecDeque;
use std::io::Write;

use crate::error::{Error, Result};
use crate::image::{Image2D, Spacing};

/// Binary segmentation of one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct Mask {
    height: usize,
    width: usize,
    spacing: Spacing,
    values: Vec<bool>,
}

impl Mask {
    pub fn new(height: usize, width: usize, spacing: Spacing, values: Vec<bool>) -> Result<Self> {
        if height == 0 || width == 0 || values.len() != height * width {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values for {height}x{width}", height * width),
                actual: format!("{} values", values.len()),
            });
        }
        Ok(Mask {
            height,
            width,
            spacing,
            values,
        })
    }

    pub fn empty(height: usize, width: usize, spacing: Spacing) -> Self {
        Mask {
            height,
            width,
            spacing,
            values: vec![false; height * width],
        }
    }

    /// Reads an image that stores only 0.0 and 1.0.
    pub fn from_image(img: &Image2D) -> Result<Self> {
        let values = img
            .values()
            .iter()
            .map(|&v| match v {
                0.0 => Ok(false),
                1.0 => Ok(true),
                other => Err(Error::InvalidImage(format!(
                    "mask values must be 0 or 1, found {other}"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Mask::new(img.height(), img.width(), img.spacing(), values)
    }

    pub fn to_image(&self) -> Image2D {
        Image2D::from_parts_unchecked(
            self.height,
            self.width,
            self.spacing,
            self.values.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        )
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    pub fn count(&self) -> usize {
        self.values.iter().filter(|&&b| b).count()
    }
}

/// `2|X ∩ Y| / (|X| + |Y|)`; two empty masks agree perfectly (1.0).
pub fn dice(x: &Mask, y: &Mask) -> Result<f64> {
    if x.shape() != y.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", x.shape()),
            actual: format!("{:?}", y.shape()),
        });
    }
    let both = x
        .values
        .iter()
        .zip(&y.values)
        .filter(|(&a, &b)| a && b)
        .count();
    let total = x.count() + y.count();
    if total == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * both as f64 / total as f64)
}

/// Positive pixel count times pixel area (mm²).
pub fn lesion_volume(m: &Mask) -> f64 {
    m.count() as f64 * m.spacing.pixel_area()
}

/// Volume of a stack of slices with the given slice thickness (mm³).
pub fn stack_volume(slices: &[Mask], thickness_mm: f64) -> f64 {
    slices.iter().map(lesion_volume).sum::<f64>() * thickness_mm
}

/// Per-pair agreement record.
#[derive(Debug, Clone, PartialEq)]
pub struct PairRecord {
    pub pair_id: String,
    pub volume_soft: f64,
    pub volume_sharp: f64,
    pub dice: f64,
}

impl PairRecord {
    pub fn new(pair_id: impl Into<String>, soft: &Mask, sharp: &Mask) -> Result<Self> {
        Ok(PairRecord {
            pair_id: pair_id.into(),
            volume_soft: lesion_volume(soft),
            volume_sharp: lesion_volume(sharp),
            dice: dice(soft, sharp)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlandAltman {
    /// `(mean, diff)` per pair, with `diff = soft − sharp`.
    pub points: Vec<(f64, f64)>,
    pub mean_diff: f64,
    pub lower_limit: f64,
    pub upper_limit: f64,
}

/// Bland–Altman points and 95% limits of agreement (`mean ± 1.96·sd`, sample
/// sd). Differences are always `soft − sharp`.
pub fn bland_altman_points(pairs: &[PairRecord]) -> Result<BlandAltman> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("bland-altman needs at least one pair"));
    }
    let points: Vec<(f64, f64)> = pairs
        .iter()
        .map(|p| {
            (
                (p.volume_soft + p.volume_sharp) / 2.0,
                p.volume_soft - p.volume_sharp,
            )
        })
        .collect();
    let diffs: Vec<f64> = points.iter().map(|&(_, d)| d).collect();
    let (mean_diff, sd) = mean_and_sample_std(&diffs);
    Ok(BlandAltman {
        points,
        mean_diff,
        lower_limit: mean_diff - 1.96 * sd,
        upper_limit: mean_diff + 1.96 * sd,
    })
}

/// Multiplies each p-value by `m`, capped at 1.
pub fn bonferroni(p_values: &[f64], m: usize) -> Result<Vec<f64>> {
    if p_values.is_empty() || m < p_values.len() {
        return Err(Error::param(
            "m",
            format!("need m >= len(p_values) >= 1, got m = {m}, len = {}", p_values.len()),
        ));
    }
    Ok(p_values.iter().map(|&p| (p * m as f64).min(1.0)).collect())
}

/// Marks pixels in `[low, high]`, then removes 4-connected components smaller
/// than `min_component_px`.
pub fn threshold_segment(img: &Image2D, low: f64, high: f64, min_component_px: usize) -> Result<Mask> {
    if low.is_nan() || high.is_nan() || low >= high {
        return Err(Error::param("low", format!("need low < high, got [{low}, {high}]")));
    }
    let (h, w) = img.shape();
    let raw: Vec<bool> = img.values().iter().map(|&v| v >= low && v <= high).collect();
    let mut keep = vec![false; h * w];
    let mut seen = vec![false; h * w];
    let mut queue = VecDeque::new();
    let mut component = Vec::new();
    for start in 0..h * w {
        if !raw[start] || seen[start] {
            continue;
        }
        component.clear();
        seen[start] = true;
        queue.push_back(start);
        while let Some(i) = queue.pop_front() {
            component.push(i);
            let (r, c) = (i / w, i % w);
            let mut visit = |j: usize| {
                if raw[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            };
            if r > 0 {
                visit(i - w);
            }
            if r + 1 < h {
                visit(i + w);
            }
            if c > 0 {
                visit(i - 1);
            }
            if c + 1 < w {
                visit(i + 1);
            }
        }
        if component.len() >= min_component_px {
            for &i in &component {
                keep[i] = true;
            }
        }
    }
    Mask::new(h, w, img.spacing(), keep)
}

/// Dice agreement over paired masks.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyReport {
    pub dices: Vec<f64>,
    pub mean: f64,
    /// Sample standard deviation (n − 1); 0 for a single pair.
    pub std: f64,
    pub population_std: f64,
}

impl ConsistencyReport {
    /// `mean (std)` with two decimals, e.g. `0.92 (0.05)`.
    pub fn summary(&self) -> String {
        format!("{:.2} ({:.2})", self.mean, self.std)
    }
}

pub fn consistency_report(pairs: &[(Mask, Mask)]) -> Result<ConsistencyReport> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput("consistency report needs at least one pair"));
    }
    let dices = pairs
        .iter()
        .map(|(a, b)| dice(a, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(report_from_dices(dices))
}

pub fn report_from_dices(dices: Vec<f64>) -> ConsistencyReport {
    let (mean, std) = mean_and_sample_std(&dices);
    let n = dices.len() as f64;
    let population_std = (dices.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n).sqrt();
    ConsistencyReport {
        dices,
        mean,
        std,
        population_std,
    }
}

fn mean_and_sample_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Writes `pair_id,mean_volume,diff_volume,dice` rows (header first, LF line
/// endings, shortest round-trip decimal formatting).
pub fn write_agreement_csv<W: Write>(out: W, pairs: &[PairRecord]) -> Result<()> {
    let ba = bland_altman_points(pairs)?;
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let io_err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        source: std::io::Error::other(e),
    };
    wtr.write_record(["pair_id", "mean_volume", "diff_volume", "dice"])
        .map_err(io_err)?;
    for (p, &(mean, diff)) in pairs.iter().zip(&ba.points) {
        wtr.write_record([
            p.pair_id.clone(),
            mean.to_string(),
            diff.to_string(),
            p.dice.to_string(),
        ])
        .map_err(io_err)?;
    }
    wtr.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e,
    })
}
