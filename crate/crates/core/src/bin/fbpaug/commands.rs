use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use rayon::prelude::*;

use fbpaug_core::augment::{
    reconstruct, transform, AugmentConfig, Background, GeometricCoupling, Mode, NoiseScale,
    ReconOptions, ResampleOrder, Step,
};
use fbpaug_core::io::{export_pgm, read_image, read_mask, read_rimg, write_rimg, Object};
use fbpaug_core::metrics::{
    bland_altman_points, report_from_dices, threshold_segment, write_agreement_csv, PairRecord,
};
use fbpaug_core::phantoms::{add_noise, add_sinogram_noise, disk_phantom, lesion_phantom, Preset};
use fbpaug_core::tomography::pad_for_radon;
use fbpaug_core::{fbp, radon, Error, FilterSpec, Image2D, Spacing};

use crate::args::*;

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Phantom(a) => phantom(a),
        Command::Radon(a) => radon_cmd(a),
        Command::Fbp(a) => fbp_cmd(a),
        Command::Augment(a) => augment(a),
        Command::Pair(a) => pair(a),
        Command::Segment(a) => segment(a),
        Command::Eval(a) => eval(a),
        Command::ExportPgm(a) => export(a),
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("starting worker threads")
}

/// Sorted `.rimg` files of a directory.
fn list_rimg(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "rimg") {
            files.push(path);
        }
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::EmptyInput("no .rimg files in the input directory").into());
    }
    Ok(files)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e).into())
}

/// Input files and, for each output root, the matching output path. A
/// directory input maps every file into the output directories under the
/// same name.
fn plan(input: &Path, outputs: &[&Path]) -> Result<Vec<(PathBuf, Vec<PathBuf>)>> {
    if input.is_dir() {
        for out in outputs {
            create_dir(out)?;
        }
        Ok(list_rimg(input)?
            .into_iter()
            .map(|f| {
                let name = f.file_name().expect("listed files have names").to_owned();
                let outs = outputs.iter().map(|o| o.join(&name)).collect();
                (f, outs)
            })
            .collect())
    } else {
        Ok(vec![(
            input.to_path_buf(),
            outputs.iter().map(|o| o.to_path_buf()).collect(),
        )])
    }
}

fn phantom(a: PhantomArgs) -> Result<()> {
    let img = match a.preset {
        PresetArg::SheppLogan => Preset::SheppLogan.render(a.size)?,
        PresetArg::SheppLoganOriginal => Preset::SheppLoganOriginal.render(a.size)?,
        PresetArg::Disk => disk_phantom(a.size, a.radius_frac, a.value)?,
        PresetArg::Lesions => lesion_phantom(a.size, a.seed)?,
    };
    // Noise uses a different stream item than the lesion layout.
    let img = add_noise(&img, a.noise_sigma, a.seed.wrapping_add(1))?
        .with_spacing(Spacing::isotropic(a.spacing)?);
    write_rimg(&img.into(), &a.output)?;
    Ok(())
}

fn radon_cmd(a: RadonArgs) -> Result<()> {
    let img = read_image(&a.input)?;
    let img = if a.pad { pad_for_radon(&img, 0.0).0 } else { img };
    let sino = radon(&img, a.n_angles)?;
    let sino = add_sinogram_noise(&sino, a.noise_sigma, a.seed)?;
    write_rimg(&sino.into(), &a.output)?;
    Ok(())
}

fn filter_spec(filter: FilterArg, a: f64, b: f64) -> Result<FilterSpec> {
    Ok(match filter {
        FilterArg::Ramp => FilterSpec::Ramp,
        FilterArg::Kab => FilterSpec::kab(a, b)?,
    })
}

fn fbp_cmd(a: FbpArgs) -> Result<()> {
    let sino = match read_rimg(&a.input)? {
        Object::Sinogram(s) => s,
        other => {
            return Err(Error::BadHeader {
                path: a.input.clone(),
                reason: format!("expected kind `sinogram`, found `{}`", other.kind()),
            }
            .into())
        }
    };
    let img = fbp(&sino, filter_spec(a.filter, a.a, a.b)?)?;
    write_rimg(&img.into(), &a.output)?;
    Ok(())
}

fn parse_enum<T: serde::de::DeserializeOwned>(key: &str, v: &str) -> Result<T> {
    serde_json::from_value(serde_json::Value::String(v.to_owned()))
        .map_err(|_| Error::Config(format!("invalid value `{v}` for {key}")).into())
}

fn augment_config(a: &AugmentArgs) -> Result<AugmentConfig> {
    let mut cfg = AugmentConfig::default();
    if let Some(list) = &a.mode {
        cfg.modes = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse::<Mode>)
            .collect::<Result<_, _>>()?;
    }
    macro_rules! set {
        ($($field:ident),*) => {$(
            if let Some(v) = a.$field {
                cfg.$field = v;
            }
        )*};
    }
    set!(
        seed, p_sharpen, p_smooth, sharpen_a_min, sharpen_a_max, sharpen_b_min, sharpen_b_max,
        smooth_a_min, smooth_a_max, smooth_b_min, smooth_b_max, gamma_log_std, noise_sigma,
        window_center_min, window_center_max, window_width_min, window_width_max, p_geometric,
        n_angles
    );
    if a.background.is_some() {
        cfg.background = a.background;
    }
    if a.target_spacing.is_some() {
        cfg.target_spacing = a.target_spacing;
    }
    if let Some(v) = &a.noise_scale {
        cfg.noise_scale = parse_enum::<NoiseScale>("noise-scale", v)?;
    }
    if let Some(v) = &a.geometric_coupling {
        cfg.geometric_coupling = parse_enum::<GeometricCoupling>("geometric-coupling", v)?;
    }
    if let Some(v) = &a.resample_order {
        cfg.resample_order = parse_enum::<ResampleOrder>("resample-order", v)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(serde::Serialize)]
struct LogLine<'a> {
    index: u64,
    file: String,
    steps: &'a [Step],
}

fn augment(a: AugmentArgs) -> Result<()> {
    let cfg = augment_config(&a)?;
    let batch = a.input.is_dir();
    let jobs = plan(&a.input, &[&a.output])?;
    let results = pool(a.jobs)?.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(pos, (src, outs))| -> Result<String> {
                let index = if batch { pos as u64 } else { a.index };
                let img = read_image(src)?;
                let out = transform(&img, &cfg, index)
                    .with_context(|| format!("augmenting {}", src.display()))?;
                write_rimg(&out.image.into(), &outs[0])?;
                let line = LogLine {
                    index,
                    file: src
                        .file_name()
                        .map(|n| n.to_string_lossy().into_owned())
                        .unwrap_or_default(),
                    steps: &out.steps,
                };
                Ok(serde_json::to_string(&line)?)
            })
            .collect::<Vec<_>>()
    });
    let mut lines = Vec::with_capacity(results.len());
    for r in results {
        lines.push(r?);
    }
    let text = lines.join("\n") + "\n";
    if batch {
        let log = a.output.join("augment_log.jsonl");
        fs::write(&log, text).map_err(|e| Error::io(log, e))?;
    } else {
        print!("{text}");
    }
    Ok(())
}

fn pair(a: PairArgs) -> Result<()> {
    let soft = FilterSpec::kab(a.soft_a, a.soft_b)?;
    let sharp = FilterSpec::kab(a.sharp_a, a.sharp_b)?;
    let jobs = plan(&a.input, &[&a.soft, &a.sharp])?;
    let opts = ReconOptions {
        n_angles: (a.n_angles > 0).then_some(a.n_angles),
        background: Background::Min,
    };
    let results = pool(a.jobs)?.install(|| {
        jobs.par_iter()
            .map(|(src, outs)| -> Result<()> {
                let (s, h) = match read_rimg(src)? {
                    Object::Sinogram(sino) => (fbp(&sino, soft)?, fbp(&sino, sharp)?),
                    Object::Image(img) => (
                        reconstruct(&img, soft, &opts)?,
                        reconstruct(&img, sharp, &opts)?,
                    ),
                    Object::Mask(_) => {
                        return Err(Error::BadHeader {
                            path: src.clone(),
                            reason: "expected kind `sinogram` or `image`, found `mask`".into(),
                        }
                        .into())
                    }
                };
                write_rimg(&s.into(), &outs[0])?;
                write_rimg(&h.into(), &outs[1])?;
                Ok(())
            })
            .collect::<Vec<_>>()
    });
    results.into_iter().collect()
}

fn segment(a: SegmentArgs) -> Result<()> {
    let jobs = plan(&a.input, &[&a.output])?;
    let results = pool(a.jobs)?.install(|| {
        jobs.par_iter()
            .map(|(src, outs)| -> Result<()> {
                let img = read_image(src)?;
                let mask = threshold_segment(&img, a.low, a.high, a.min_component_px)?;
                write_rimg(&mask.into(), &outs[0])?;
                Ok(())
            })
            .collect::<Vec<_>>()
    });
    results.into_iter().collect()
}

fn pair_id(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn eval(a: EvalArgs) -> Result<()> {
    let (soft_files, sharp_files) = if a.soft.is_dir() {
        let soft = list_rimg(&a.soft)?;
        let sharp = list_rimg(&a.sharp)?;
        let names = |v: &[PathBuf]| v.iter().map(|p| p.file_name().map(|n| n.to_owned())).collect::<Vec<_>>();
        if names(&soft) != names(&sharp) {
            return Err(Error::DimensionMismatch {
                expected: format!("{} files named as in {}", soft.len(), a.soft.display()),
                actual: format!("{} files in {}", sharp.len(), a.sharp.display()),
            }
            .into());
        }
        (soft, sharp)
    } else {
        (vec![a.soft.clone()], vec![a.sharp.clone()])
    };

    let mut records = Vec::with_capacity(soft_files.len());
    for (s, h) in soft_files.iter().zip(&sharp_files) {
        let ms = read_mask(s)?;
        let mh = read_mask(h)?;
        records.push(
            PairRecord::new(pair_id(s), &ms, &mh)
                .with_context(|| format!("comparing {} and {}", s.display(), h.display()))?,
        );
    }
    let report = report_from_dices(records.iter().map(|r| r.dice).collect());
    let ba = bland_altman_points(&records)?;

    let mut out = std::io::stdout().lock();
    writeln!(out, "pairs: {}", records.len())?;
    writeln!(out, "dice mean (std): {}", report.summary())?;
    writeln!(out, "dice population std: {:.4}", report.population_std)?;
    writeln!(
        out,
        "volume diff (soft - sharp): mean {:.4}, limits of agreement [{:.4}, {:.4}]",
        ba.mean_diff, ba.lower_limit, ba.upper_limit
    )?;

    if let Some(path) = &a.csv {
        let f = fs::File::create(path).map_err(|e| Error::io(path.clone(), e))?;
        write_agreement_csv(std::io::BufWriter::new(f), &records)?;
    }
    Ok(())
}

fn export(a: ExportPgmArgs) -> Result<()> {
    let img: Image2D = match read_rimg(&a.input)? {
        Object::Image(img) => img,
        Object::Mask(m) => m.to_image(),
        Object::Sinogram(s) => Image2D::new(
            s.n_angles(),
            s.n_detectors(),
            Spacing::UNIT,
            s.values().to_vec(),
        )?,
    };
    let (lo, hi) = (img.min(), img.max());
    let center = a.center.unwrap_or((lo + hi) / 2.0);
    let width = a.width.unwrap_or(if hi > lo { hi - lo } else { 1.0 });
    export_pgm(&img, &a.output, center, width)?;
    Ok(())
}
