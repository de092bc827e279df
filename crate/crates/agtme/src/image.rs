//! Pixel containers and the normalization that maps 8-bit levels into the
//! open interval (0, 1).
//!
//! Every estimator in this crate works on a [`NormalizedImage`]: a flat
//! buffer of intensities with `0 < u < 1` strictly. 8-bit levels enter that
//! domain through `u = (l + 0.5) / 256`, which keeps the darkest and
//! brightest levels away from the `ln(0)` and `1/0` boundary traps.

use crate::error::{Error, Result};

/// Largest `f64` strictly below 1.0.
const ONE_BELOW: f64 = 1.0 - f64::EPSILON / 2.0;

/// An 8-bit grayscale image, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    levels: Vec<u8>,
}

impl GrayImage {
    /// Wraps a row-major level buffer. Fails if the buffer length does not
    /// equal `width * height`.
    pub fn new(width: u32, height: u32, levels: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if levels.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: levels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            levels,
        })
    }

    /// Builds an image by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Self {
        let mut levels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                levels.push(f(x, y));
            }
        }
        Self {
            width,
            height,
            levels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn into_levels(self) -> Vec<u8> {
        self.levels
    }

    /// One row of levels, for scan-line analysis.
    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.levels[start..start + w]
    }
}

/// Where a [`NormalizedImage`]'s intensities came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceDepth {
    /// Quantized 8-bit levels mapped through `(l + 0.5) / 256`; intensities
    /// take at most 256 distinct values.
    Bits8,
    /// Real-valued data (synthetic signals, float images).
    Continuous,
}

/// An image whose intensities all lie strictly inside (0, 1).
///
/// This is the domain of every gamma estimator: the strict bounds guarantee
/// `ln(u)` is finite and negative for every pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedImage {
    width: u32,
    height: u32,
    intensities: Vec<f64>,
    source_depth: SourceDepth,
}

impl NormalizedImage {
    /// Normalizes 8-bit levels with `u = (l + 0.5) / 256`.
    ///
    /// Every output is strictly inside (0, 1): level 0 maps to `1/512` and
    /// level 255 to `511/512`.
    pub fn from_levels(image: &GrayImage) -> Self {
        let intensities = image.levels().iter().map(|&l| normalize_level(l)).collect();
        Self {
            width: image.width(),
            height: image.height(),
            intensities,
            source_depth: SourceDepth::Bits8,
        }
    }

    /// Wraps continuous intensities, rejecting any value outside (0, 1).
    pub fn from_intensities(width: u32, height: u32, intensities: Vec<f64>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if intensities.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: intensities.len(),
            });
        }
        for (index, &value) in intensities.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::IntensityOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            intensities,
            source_depth: SourceDepth::Continuous,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Pixel count `M`.
    pub fn len(&self) -> usize {
        self.intensities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intensities.is_empty()
    }

    pub fn intensities(&self) -> &[f64] {
        &self.intensities
    }

    pub fn source_depth(&self) -> SourceDepth {
        self.source_depth
    }

    /// Pixel-wise power law `g = u^gamma`.
    ///
    /// The output stays inside (0, 1): `powf` can underflow to 0 or round up
    /// to 1 at extreme exponents, so the result is nudged back to the nearest
    /// interior value.
    pub fn apply_gamma(&self, gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let intensities = self
            .intensities
            .iter()
            .map(|&u| u.powf(gamma).clamp(f64::MIN_POSITIVE, ONE_BELOW))
            .collect();
        Ok(Self {
            width: self.width,
            height: self.height,
            intensities,
            source_depth: SourceDepth::Continuous,
        })
    }

    /// Inverse of the level normalization: `l = clamp(round(u * 256 - 0.5), 0, 255)`.
    ///
    /// Round-trips exactly: `denormalize(from_levels(x)) == x` for every level.
    pub fn denormalize(&self) -> GrayImage {
        let levels = self
            .intensities
            .iter()
            .map(|&u| denormalize_intensity(u))
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            levels,
        }
    }
}

/// `u = (l + 0.5) / 256` for a single level.
pub fn normalize_level(level: u8) -> f64 {
    (level as f64 + 0.5) / 256.0
}

/// `l = clamp(round(u * 256 - 0.5), 0, 255)` for a single intensity.
pub fn denormalize_intensity(u: f64) -> u8 {
    (u * 256.0 - 0.5).round().clamp(0.0, 255.0) as u8
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidGamma(gamma))
    }
}

/// A binary region-of-interest selector over the pixels of an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskImage {
    width: u32,
    height: u32,
    included: Vec<bool>,
    n: usize,
}

impl MaskImage {
    /// Wraps a per-pixel inclusion buffer.
    pub fn new(width: u32, height: u32, included: Vec<bool>) -> Result<Self> {
        let expected = width as usize * height as usize;
        if included.len() != expected {
            return Err(Error::BufferSize {
                expected,
                actual: included.len(),
            });
        }
        let n = included.iter().filter(|&&b| b).count();
        Ok(Self {
            width,
            height,
            included,
            n,
        })
    }

    /// Mask semantics for 8-bit mask files: nonzero level means included.
    pub fn from_levels(image: &GrayImage) -> Self {
        let included: Vec<bool> = image.levels().iter().map(|&l| l > 0).collect();
        let n = included.iter().filter(|&&b| b).count();
        Self {
            width: image.width(),
            height: image.height(),
            included,
            n,
        }
    }

    /// A mask that includes every pixel.
    pub fn full(width: u32, height: u32) -> Self {
        let len = width as usize * height as usize;
        Self {
            width,
            height,
            included: vec![true; len],
            n: len,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of included pixels `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn included(&self) -> &[bool] {
        &self.included
    }

    pub(crate) fn check_dims(&self, image: &NormalizedImage) -> Result<()> {
        if self.width != image.width() || self.height != image.height() {
            return Err(Error::DimensionMismatch {
                left_width: image.width(),
                left_height: image.height(),
                right_width: self.width,
                right_height: self.height,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_pins_reference_levels() {
        assert_eq!(normalize_level(0), 0.001953125);
        assert_eq!(normalize_level(255), 0.998046875);
        assert_eq!(normalize_level(127), 0.498046875);
    }

    #[test]
    fn denormalize_inverts_reference_levels() {
        assert_eq!(denormalize_intensity(0.001953125), 0);
        assert_eq!(denormalize_intensity(0.998046875), 255);
        // 1/e: round(0.367879 * 256 - 0.5) = round(93.677) = 94
        assert_eq!(denormalize_intensity(0.367879), 94);
    }

    #[test]
    fn normalize_denormalize_round_trips_all_levels() {
        let levels: Vec<u8> = (0..=255).collect();
        let img = GrayImage::new(16, 16, levels.clone()).unwrap();
        let back = NormalizedImage::from_levels(&img).denormalize();
        assert_eq!(back.levels(), levels.as_slice());
    }

    #[test]
    fn apply_gamma_power_and_identity() {
        let img = NormalizedImage::from_intensities(1, 1, vec![0.25]).unwrap();
        let squared = img.apply_gamma(2.0).unwrap();
        assert_eq!(squared.intensities()[0], 0.0625);

        let many = NormalizedImage::from_intensities(3, 1, vec![0.1, 0.5, 0.9]).unwrap();
        let same = many.apply_gamma(1.0).unwrap();
        assert_eq!(same.intensities(), many.intensities());
    }

    #[test]
    fn apply_gamma_constant_image_lands_on_inverse_e() {
        // u = c with gamma = -1/ln(c) sends every pixel to e^-1.
        let c = 0.123_f64;
        let img = NormalizedImage::from_intensities(2, 2, vec![c; 4]).unwrap();
        let out = img.apply_gamma(-1.0 / c.ln()).unwrap();
        for &g in out.intensities() {
            assert!((g - (-1.0_f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn apply_gamma_rejects_nonpositive() {
        let img = NormalizedImage::from_intensities(1, 1, vec![0.5]).unwrap();
        assert!(matches!(img.apply_gamma(0.0), Err(Error::InvalidGamma(_))));
        assert!(matches!(img.apply_gamma(-1.5), Err(Error::InvalidGamma(_))));
    }

    #[test]
    fn apply_gamma_output_stays_interior_at_extreme_exponents() {
        let img =
            NormalizedImage::from_intensities(2, 1, vec![0.001953125, 0.998046875]).unwrap();
        let crushed = img.apply_gamma(600.0).unwrap();
        for &g in crushed.intensities() {
            assert!(g > 0.0 && g < 1.0, "got {g}");
        }
    }

    #[test]
    fn from_intensities_rejects_out_of_range() {
        let err = NormalizedImage::from_intensities(3, 1, vec![0.5, 1.0, 0.2]).unwrap_err();
        match err {
            Error::IntensityOutOfRange { index, value } => {
                assert_eq!(index, 1);
                assert_eq!(value, 1.0);
            }
            other => panic!("unexpected error {other:?}"),
        }
        assert!(NormalizedImage::from_intensities(1, 1, vec![0.0]).is_err());
        assert!(NormalizedImage::from_intensities(1, 1, vec![f64::NAN]).is_err());
    }

    #[test]
    fn buffer_length_is_checked() {
        assert!(GrayImage::new(2, 2, vec![0; 3]).is_err());
        assert!(NormalizedImage::from_intensities(2, 2, vec![0.5; 5]).is_err());
        assert!(MaskImage::new(2, 2, vec![true; 2]).is_err());
    }

    #[test]
    fn mask_counts_included_pixels() {
        let mask = MaskImage::new(2, 2, vec![true, false, true, false]).unwrap();
        assert_eq!(mask.n(), 2);
        assert_eq!(MaskImage::full(3, 3).n(), 9);

        let all_zero = GrayImage::new(2, 1, vec![0, 0]).unwrap();
        assert_eq!(MaskImage::from_levels(&all_zero).n(), 0);
    }
}
