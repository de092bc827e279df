//! RGB/HSV conversion and the color-image correction strategies.
//!
//! A gamma exponent is estimated from one plane of the color image and then
//! applied without disturbing chroma. The default strategy works on the V
//! channel of HSV space, where luminance is decoupled from hue and
//! saturation, so correction cannot introduce color casts.

use crate::error::{Error, Result};
use crate::estimator::{
    estimate_gamma, estimate_gamma_masked, visual_gamma, GammaEstimate, Variant,
};
use crate::image::{check_gamma, denormalize_intensity, normalize_level, GrayImage, MaskImage,
    NormalizedImage};

/// An 8-bit RGB image stored as three planes, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorImage {
    width: u32,
    height: u32,
    channels: [Vec<u8>; 3],
}

impl ColorImage {
    /// Wraps three planes in R, G, B order; all must hold `width * height`
    /// samples.
    pub fn new(width: u32, height: u32, channels: [Vec<u8>; 3]) -> Result<Self> {
        let expected = width as usize * height as usize;
        for plane in &channels {
            if plane.len() != expected {
                return Err(Error::BufferSize {
                    expected,
                    actual: plane.len(),
                });
            }
        }
        Ok(Self {
            width,
            height,
            channels,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Self {
        let len = width as usize * height as usize;
        let mut channels = [
            Vec::with_capacity(len),
            Vec::with_capacity(len),
            Vec::with_capacity(len),
        ];
        for y in 0..height {
            for x in 0..width {
                let px = f(x, y);
                for (plane, &v) in channels.iter_mut().zip(px.iter()) {
                    plane.push(v);
                }
            }
        }
        Self {
            width,
            height,
            channels,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Pixel count per plane.
    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels[0].is_empty()
    }

    pub fn channel(&self, index: usize) -> &[u8] {
        &self.channels[index]
    }

    pub fn pixel(&self, index: usize) -> [u8; 3] {
        [
            self.channels[0][index],
            self.channels[1][index],
            self.channels[2][index],
        ]
    }
}

/// How a color image is reduced to the plane the estimator sees, and how
/// the exponent is applied back.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelStrategy {
    /// One estimate over all `3M` channel samples, applied to each channel.
    AllChannelsPooled,
    /// Estimate on the luma plane (weights 299/587/114 per thousand), apply
    /// the common exponent to each RGB channel.
    GrayCommonGamma,
    /// Estimate and apply per channel; yields three independent estimates.
    PerChannelIndependent,
    /// Estimate on the V plane of HSV and transform V only, preserving hue
    /// and saturation.
    #[default]
    HsvVChannel,
}

impl ChannelStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelStrategy::AllChannelsPooled => "pooled",
            ChannelStrategy::GrayCommonGamma => "gray",
            ChannelStrategy::PerChannelIndependent => "per-channel",
            ChannelStrategy::HsvVChannel => "hsv-v",
        }
    }
}

/// Estimates returned by [`correct_color`]: one shared exponent, or one per
/// channel under [`ChannelStrategy::PerChannelIndependent`].
#[derive(Debug, Clone, PartialEq)]
pub enum CorrectionEstimates {
    Single(GammaEstimate),
    PerChannel([GammaEstimate; 3]),
}

/// Hexcone RGB -> HSV: `h` in degrees [0, 360), `s` and `v` in [0, 1], with
/// `v = max(R, G, B) / 255`. Achromatic pixels report hue 0.
pub fn rgb_to_hsv(r: u8, g: u8, b: u8) -> (f64, f64, f64) {
    let rf = r as f64 / 255.0;
    let gf = g as f64 / 255.0;
    let bf = b as f64 / 255.0;
    let max = rf.max(gf).max(bf);
    let min = rf.min(gf).min(bf);
    let delta = max - min;

    let h = if delta == 0.0 {
        0.0
    } else if max == rf {
        60.0 * ((gf - bf) / delta).rem_euclid(6.0)
    } else if max == gf {
        60.0 * ((bf - rf) / delta + 2.0)
    } else {
        60.0 * ((rf - gf) / delta + 4.0)
    };
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

/// Inverse hexcone with round-to-nearest levels. Inverts [`rgb_to_hsv`]
/// exactly for every 8-bit pixel.
pub fn hsv_to_rgb(h: f64, s: f64, v: f64) -> Result<(u8, u8, u8)> {
    if !(h >= 0.0 && h < 360.0) {
        return Err(Error::HsvOutOfRange {
            name: "h",
            value: h,
            range: "[0, 360)",
        });
    }
    for (name, value) in [("s", s), ("v", v)] {
        if !(value >= 0.0 && value <= 1.0) {
            return Err(Error::HsvOutOfRange {
                name,
                value,
                range: "[0, 1]",
            });
        }
    }

    let c = v * s;
    let hp = h / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r1, g1, b1) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let level = |f: f64| ((f + m) * 255.0).round().clamp(0.0, 255.0) as u8;
    Ok((level(r1), level(g1), level(b1)))
}

/// Luma plane with integer weights 299/587/114 per thousand.
pub fn luma_image(image: &ColorImage) -> GrayImage {
    let levels: Vec<u8> = (0..image.len())
        .map(|i| {
            let [r, g, b] = image.pixel(i);
            ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
        })
        .collect();
    GrayImage::new(image.width(), image.height(), levels).expect("planes share dimensions")
}

/// V plane of HSV as 8-bit levels. `round(V * 255)` is exactly the per-pixel
/// channel maximum, so the plane shares the estimator's level convention.
pub fn v_plane(image: &ColorImage) -> GrayImage {
    let levels: Vec<u8> = (0..image.len())
        .map(|i| {
            let [r, g, b] = image.pixel(i);
            r.max(g).max(b)
        })
        .collect();
    GrayImage::new(image.width(), image.height(), levels).expect("planes share dimensions")
}

/// Estimates a restoration exponent (or three, for the per-channel
/// strategy) without transforming the image. The mask, when given,
/// restricts which pixels feed the estimate.
pub fn estimate_color(
    image: &ColorImage,
    strategy: ChannelStrategy,
    variant: Variant,
    mask: Option<&MaskImage>,
) -> Result<CorrectionEstimates> {
    match strategy {
        ChannelStrategy::HsvVChannel => Ok(CorrectionEstimates::Single(finalize(
            estimate_plane(&v_plane(image), mask)?,
            variant,
        )?)),
        ChannelStrategy::GrayCommonGamma => Ok(CorrectionEstimates::Single(finalize(
            estimate_plane(&luma_image(image), mask)?,
            variant,
        )?)),
        ChannelStrategy::AllChannelsPooled => Ok(CorrectionEstimates::Single(finalize(
            estimate_pooled(image, mask)?,
            variant,
        )?)),
        ChannelStrategy::PerChannelIndependent => {
            let mut estimates = Vec::with_capacity(3);
            for c in 0..3 {
                let plane =
                    GrayImage::new(image.width(), image.height(), image.channel(c).to_vec())?;
                estimates.push(finalize(estimate_plane(&plane, mask)?, variant)?);
            }
            Ok(CorrectionEstimates::PerChannel([
                estimates[0],
                estimates[1],
                estimates[2],
            ]))
        }
    }
}

/// Estimates a restoration exponent per `strategy` and applies it.
///
/// The mask, when given, restricts estimation only; the transform is applied
/// to the whole image.
pub fn correct_color(
    image: &ColorImage,
    strategy: ChannelStrategy,
    variant: Variant,
    mask: Option<&MaskImage>,
) -> Result<(ColorImage, CorrectionEstimates)> {
    let estimates = estimate_color(image, strategy, variant, mask)?;
    let corrected = match &estimates {
        CorrectionEstimates::Single(est) => apply_gamma_color(image, strategy, est.gamma)?,
        CorrectionEstimates::PerChannel(ests) => {
            apply_per_channel(image, [ests[0].gamma, ests[1].gamma, ests[2].gamma])?
        }
    };
    Ok((corrected, estimates))
}

/// Applies a caller-chosen exponent through a strategy's transform path,
/// bypassing estimation.
pub fn apply_gamma_color(
    image: &ColorImage,
    strategy: ChannelStrategy,
    gamma: f64,
) -> Result<ColorImage> {
    match strategy {
        ChannelStrategy::HsvVChannel => apply_v_channel(image, gamma),
        _ => apply_per_channel(image, [gamma; 3]),
    }
}

/// Applies an independent exponent to each RGB channel.
pub fn apply_gamma_channels(image: &ColorImage, gammas: [f64; 3]) -> Result<ColorImage> {
    apply_per_channel(image, gammas)
}

fn estimate_plane(plane: &GrayImage, mask: Option<&MaskImage>) -> Result<GammaEstimate> {
    let norm = NormalizedImage::from_levels(plane);
    match mask {
        Some(m) => estimate_gamma_masked(&norm, m),
        None => estimate_gamma(&norm),
    }
}

fn estimate_pooled(image: &ColorImage, mask: Option<&MaskImage>) -> Result<GammaEstimate> {
    let mut samples = Vec::with_capacity(3 * image.len());
    for c in 0..3 {
        samples.extend_from_slice(image.channel(c));
    }
    let pooled = GrayImage::new(3 * image.width(), image.height(), samples)?;
    let norm = NormalizedImage::from_levels(&pooled);
    match mask {
        Some(m) => {
            if m.width() != image.width() || m.height() != image.height() {
                return Err(Error::DimensionMismatch {
                    left_width: image.width(),
                    left_height: image.height(),
                    right_width: m.width(),
                    right_height: m.height(),
                });
            }
            let mut included = Vec::with_capacity(3 * image.len());
            for _ in 0..3 {
                included.extend_from_slice(m.included());
            }
            let pooled_mask = MaskImage::new(3 * image.width(), image.height(), included)?;
            estimate_gamma_masked(&norm, &pooled_mask)
        }
        None => estimate_gamma(&norm),
    }
}

fn finalize(estimate: GammaEstimate, variant: Variant) -> Result<GammaEstimate> {
    match variant {
        Variant::Raw => Ok(estimate),
        Variant::Visual => visual_gamma(&estimate),
    }
}

/// Per-level transform table: level -> denormalize(normalize(level)^gamma).
fn gamma_level_map(gamma: f64) -> Result<[u8; 256]> {
    check_gamma(gamma)?;
    let mut map = [0u8; 256];
    for (l, out) in map.iter_mut().enumerate() {
        *out = denormalize_intensity(normalize_level(l as u8).powf(gamma));
    }
    Ok(map)
}

fn apply_per_channel(image: &ColorImage, gammas: [f64; 3]) -> Result<ColorImage> {
    let maps = [
        gamma_level_map(gammas[0])?,
        gamma_level_map(gammas[1])?,
        gamma_level_map(gammas[2])?,
    ];
    let channels = [
        image.channel(0).iter().map(|&l| maps[0][l as usize]).collect(),
        image.channel(1).iter().map(|&l| maps[1][l as usize]).collect(),
        image.channel(2).iter().map(|&l| maps[2][l as usize]).collect(),
    ];
    ColorImage::new(image.width(), image.height(), channels)
}

fn apply_v_channel(image: &ColorImage, gamma: f64) -> Result<ColorImage> {
    let map = gamma_level_map(gamma)?;
    let len = image.len();
    let mut out = [
        Vec::with_capacity(len),
        Vec::with_capacity(len),
        Vec::with_capacity(len),
    ];
    for i in 0..len {
        let [r, g, b] = image.pixel(i);
        let (h, s, _) = rgb_to_hsv(r, g, b);
        let v_level = map[r.max(g).max(b) as usize];
        let (r2, g2, b2) = hsv_to_rgb(h, s, v_level as f64 / 255.0)?;
        out[0].push(r2);
        out[1].push(g2);
        out[2].push(b2);
    }
    ColorImage::new(image.width(), image.height(), out)
}
