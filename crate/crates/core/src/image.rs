//! Row-major 2-D image with physical pixel spacing.

use crate::error::{Error, Result};

/// Pixel spacing in millimetres, `(sy, sx)` = (row pitch, column pitch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spacing {
    pub sy: f64,
    pub sx: f64,
}

impl Spacing {
    pub const UNIT: Spacing = Spacing { sy: 1.0, sx: 1.0 };

    pub fn new(sy: f64, sx: f64) -> Result<Self> {
        if !(sy.is_finite() && sx.is_finite() && sy > 0.0 && sx > 0.0) {
            return Err(Error::param(
                "spacing",
                format!("components must be finite and > 0, got ({sy}, {sx})"),
            ));
        }
        Ok(Spacing { sy, sx })
    }

    pub fn isotropic(s: f64) -> Result<Self> {
        Spacing::new(s, s)
    }

    pub fn pixel_area(&self) -> f64 {
        self.sy * self.sx
    }
}

impl Default for Spacing {
    fn default() -> Self {
        Spacing::UNIT
    }
}

/// A real-valued image. Values are finite; every constructor checks this.
#[derive(Debug, Clone, PartialEq)]
pub struct Image2D {
    height: usize,
    width: usize,
    spacing: Spacing,
    values: Vec<f64>,
}

impl Image2D {
    pub fn new(height: usize, width: usize, spacing: Spacing, values: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be >= 1, got {height}x{width}"
            )));
        }
        if values.len() != height * width {
            return Err(Error::DimensionMismatch {
                expected: format!("{} values", height * width),
                actual: format!("{} values", values.len()),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidImage(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(Image2D {
            height,
            width,
            spacing,
            values,
        })
    }

    pub fn zeros(height: usize, width: usize, spacing: Spacing) -> Self {
        Self::filled(height, width, spacing, 0.0)
    }

    pub fn filled(height: usize, width: usize, spacing: Spacing, value: f64) -> Self {
        assert!(height > 0 && width > 0, "image dimensions must be >= 1");
        assert!(value.is_finite());
        Image2D {
            height,
            width,
            spacing,
            values: vec![value; height * width],
        }
    }

    /// Builds an image by evaluating `f(row, col)` for every pixel.
    pub fn from_fn(
        height: usize,
        width: usize,
        spacing: Spacing,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(height * width);
        for r in 0..height {
            for c in 0..width {
                values.push(f(r, c));
            }
        }
        Image2D::new(height, width, spacing, values)
    }

    /// Internal constructor for operations whose arithmetic cannot produce
    /// non-finite values from finite inputs.
    pub(crate) fn from_parts_unchecked(
        height: usize,
        width: usize,
        spacing: Spacing,
        values: Vec<f64>,
    ) -> Self {
        debug_assert_eq!(values.len(), height * width);
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Image2D {
            height,
            width,
            spacing,
            values,
        }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn with_spacing(mut self, spacing: Spacing) -> Self {
        self.spacing = spacing;
        self
    }

    pub fn is_square(&self) -> bool {
        self.height == self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.values[row * self.width..(row + 1) * self.width]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Applies `f` to every value. Fails if `f` produces a non-finite value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Image2D::new(
            self.height,
            self.width,
            self.spacing,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }

    /// Pointwise `self + other`, shapes must agree.
    pub fn add(&self, other: &Image2D) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Image2D) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, k: f64) -> Result<Self> {
        self.map(|v| v * k)
    }

    fn zip_with(&self, other: &Image2D, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.height, self.width),
                actual: format!("{}x{}", other.height, other.width),
            });
        }
        Image2D::new(
            self.height,
            self.width,
            self.spacing,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// Bilinear sample at fractional `(row, col)`; positions outside the
    /// pixel-centre grid read as `outside`.
    #[inline]
    pub(crate) fn bilinear_or(&self, row: f64, col: f64, outside: f64) -> f64 {
        let r0 = row.floor();
        let c0 = col.floor();
        let fr = row - r0;
        let fc = col - c0;
        let r0 = r0 as isize;
        let c0 = c0 as isize;
        let px = |r: isize, c: isize| -> f64 {
            if r < 0 || c < 0 || r >= self.height as isize || c >= self.width as isize {
                outside
            } else {
                self.values[r as usize * self.width + c as usize]
            }
        };
        // a + (b - a)·f is exact when a == b, so flat regions stay flat.
        let lerp = |a: f64, b: f64, f: f64| a + (b - a) * f;
        let top = lerp(px(r0, c0), px(r0, c0 + 1), fc);
        let bottom = lerp(px(r0 + 1, c0), px(r0 + 1, c0 + 1), fc);
        lerp(top, bottom, fr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_values() {
        let err = Image2D::new(1, 2, Spacing::UNIT, vec![0.0, f64::NAN]).unwrap_err();
        assert!(matches!(err, Error::InvalidImage(_)));
    }

    #[test]
    fn rejects_zero_dimensions_and_bad_spacing() {
        assert!(Image2D::new(0, 2, Spacing::UNIT, vec![]).is_err());
        assert!(Spacing::new(0.0, 1.0).is_err());
        assert!(Spacing::new(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn bilinear_interpolates_between_centres() {
        let img = Image2D::new(2, 2, Spacing::UNIT, vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(img.bilinear_or(0.5, 0.5, 0.0), 1.5);
        assert_eq!(img.bilinear_or(0.0, 1.0, 0.0), 1.0);
        assert_eq!(img.bilinear_or(-1.0, 0.0, 7.0), 7.0);
    }
}
