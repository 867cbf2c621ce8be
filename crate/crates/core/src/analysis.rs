//! Image statistics used to characterise reconstructions: spectral band
//! energy, region moments, and error inside the inscribed circle.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::image::Image2D;

/// Energy of the 2-D DFT over bins whose normalised radial frequency exceeds
/// `cutoff` (1.0 = Nyquist along an axis), divided by the pixel count.
pub fn high_frequency_energy(img: &Image2D, cutoff: f64) -> f64 {
    let (h, w) = img.shape();
    let mut buf: Vec<Complex<f64>> = img.values().iter().map(|&v| Complex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    let row_fft = planner.plan_fft_forward(w);
    for row in buf.chunks_mut(w) {
        row_fft.process(row);
    }
    let col_fft = planner.plan_fft_forward(h);
    let mut col = vec![Complex::new(0.0, 0.0); h];
    for c in 0..w {
        for r in 0..h {
            col[r] = buf[r * w + c];
        }
        col_fft.process(&mut col);
        for r in 0..h {
            buf[r * w + c] = col[r];
        }
    }
    let signed = |k: usize, n: usize| -> f64 {
        let k = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        // cycles per pixel over the Nyquist limit of 0.5
        k / n as f64 / 0.5
    };
    let mut energy = 0.0;
    for r in 0..h {
        let fy = signed(r, h);
        for c in 0..w {
            let fx = signed(c, w);
            if (fx * fx + fy * fy).sqrt() > cutoff {
                energy += buf[r * w + c].norm_sqr();
            }
        }
    }
    energy / (h * w) as f64
}

/// Pixels within `radius_px` of the image centre.
pub fn centred_disk(height: usize, width: usize, radius_px: f64) -> Vec<bool> {
    let cy = (height - 1) as f64 / 2.0;
    let cx = (width - 1) as f64 / 2.0;
    (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .map(|(r, c)| {
            let dy = r as f64 - cy;
            let dx = c as f64 - cx;
            (dx * dx + dy * dy).sqrt() <= radius_px
        })
        .collect()
}

/// Mean and sample standard deviation of the selected pixels.
pub fn masked_mean_std(img: &Image2D, region: &[bool]) -> (f64, f64) {
    assert_eq!(region.len(), img.values().len());
    let sel: Vec<f64> = img
        .values()
        .iter()
        .zip(region)
        .filter_map(|(&v, &keep)| keep.then_some(v))
        .collect();
    let n = sel.len() as f64;
    let mean = sel.iter().sum::<f64>() / n;
    let var = sel.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

/// Root-mean-square difference inside the inscribed circle.
pub fn rmse_in_inscribed_circle(a: &Image2D, b: &Image2D) -> f64 {
    assert_eq!(a.shape(), b.shape());
    let (h, w) = a.shape();
    let region = centred_disk(h, w, h.min(w) as f64 / 2.0);
    let (mut se, mut n) = (0.0, 0usize);
    for ((x, y), keep) in a.values().iter().zip(b.values()).zip(&region) {
        if *keep {
            se += (x - y).powi(2);
            n += 1;
        }
    }
    (se / n as f64).sqrt()
}
