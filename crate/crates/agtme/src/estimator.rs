//! Closed-form gamma estimation by differential-entropy maximization.
//!
//! For intensities `u` in (0, 1) the negative differential entropy of the
//! transformed image `g = u^gamma`, written in terms of the source density,
//! is convex in `gamma` and minimized at
//!
//! ```text
//! gamma* = -1 / mean(ln u)
//! ```
//!
//! which this module evaluates directly in the pixel domain. The companion
//! [`predicted_neg_entropy`] evaluates the full loss so tests and loss-curve
//! plots can confirm the closed form against a brute-force grid search.

use crate::error::{Error, Result};
use crate::histogram::Histogram256;
use crate::image::{check_gamma, normalize_level, MaskImage, NormalizedImage};

/// Divisor of the perceptual variant: a power-law display encoding with
/// exponent 2.2 spreads quantization steps more evenly for the eye, so the
/// visual estimate applies `gamma* / 2.2` instead of `gamma*`.
pub const VISUAL_DIVISOR: f64 = 2.2;

/// Which exponent an estimate carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// The entropy-maximizing exponent itself.
    Raw,
    /// The raw exponent divided by 2.2 for display viewing.
    Visual,
}

/// A restoration exponent together with its predicted entropy effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    /// Restoration exponent, always positive and finite.
    pub gamma: f64,
    pub variant: Variant,
    /// Predicted differential-entropy change, in bits, of applying this
    /// estimate's exponent to the image it was computed from. Non-negative
    /// for [`Variant::Raw`]; may be negative for [`Variant::Visual`].
    pub entropy_gain_bits: f64,
}

/// Entropy-maximizing exponent of an image: `-1 / mean(ln u)`.
///
/// Accepts any pixel collection in (0, 1) — a frame, a masked subset, or
/// several frames concatenated. The result is finite and strictly positive
/// for every valid input, including constant images.
pub fn estimate_gamma(image: &NormalizedImage) -> Result<GammaEstimate> {
    if image.is_empty() {
        return Err(Error::Empty);
    }
    let mean_ln = pairwise_ln_sum(image.intensities()) / image.len() as f64;
    raw_estimate(-1.0 / mean_ln)
}

/// [`estimate_gamma`] for quantized input in one streaming pass:
/// normalization and the `ln` accumulation are fused, so no float image is
/// materialized.
///
/// Chunk sums feed the same pairwise reduction as the float path, keeping
/// the result deterministic and within roundoff of
/// `estimate_gamma(&NormalizedImage::from_levels(image))`.
pub fn estimate_gamma_levels(image: &crate::image::GrayImage) -> Result<GammaEstimate> {
    const CHUNK: usize = 4096;
    let levels = image.levels();
    if levels.is_empty() {
        return Err(Error::Empty);
    }
    let mut buf = [0.0f64; CHUNK];
    let mut chunk_sums = Vec::with_capacity(levels.len().div_ceil(CHUNK));
    for chunk in levels.chunks(CHUNK) {
        for (slot, &l) in buf.iter_mut().zip(chunk) {
            *slot = normalize_level(l).ln();
        }
        chunk_sums.push(pairwise_sum(&buf[..chunk.len()]));
    }
    let mean_ln = pairwise_sum(&chunk_sums) / levels.len() as f64;
    raw_estimate(-1.0 / mean_ln)
}

/// [`estimate_gamma`] restricted to the pixels a mask includes.
///
/// With a full mask this reproduces the unmasked estimate bit for bit: the
/// included intensities form the same sequence, so the summation order is
/// identical.
pub fn estimate_gamma_masked(image: &NormalizedImage, mask: &MaskImage) -> Result<GammaEstimate> {
    mask.check_dims(image)?;
    if mask.n() == 0 {
        return Err(Error::EmptyMask);
    }
    let selected: Vec<f64> = image
        .intensities()
        .iter()
        .zip(mask.included())
        .filter(|(_, &keep)| keep)
        .map(|(&u, _)| u)
        .collect();
    let mean_ln = pairwise_ln_sum(&selected) / selected.len() as f64;
    raw_estimate(-1.0 / mean_ln)
}

fn raw_estimate(gamma: f64) -> Result<GammaEstimate> {
    Ok(GammaEstimate {
        gamma,
        variant: Variant::Raw,
        entropy_gain_bits: entropy_gain(gamma)?,
    })
}

/// Derives the display-oriented variant: `gamma / 2.2`.
///
/// The reported gain is the predicted entropy change of the exponent
/// actually applied, which trades entropy for perceptual brightness and can
/// be negative. Fails on an estimate that is already visual.
pub fn visual_gamma(estimate: &GammaEstimate) -> Result<GammaEstimate> {
    if estimate.variant == Variant::Visual {
        return Err(Error::AlreadyVisual);
    }
    let gamma = estimate.gamma / VISUAL_DIVISOR;
    Ok(GammaEstimate {
        gamma,
        variant: Variant::Visual,
        entropy_gain_bits: applied_entropy_gain(gamma, estimate.gamma)?,
    })
}

/// Mean-brightness baseline: the exponent that maps the average intensity
/// to one half, `gamma = ln(1/2) / ln(mean u)`.
///
/// This method does not optimize entropy; `entropy_gain_bits` is filled with
/// [`entropy_gain`] of its exponent purely so estimates from both methods
/// can be tabulated side by side.
pub fn cab_gamma(image: &NormalizedImage) -> Result<GammaEstimate> {
    if image.is_empty() {
        return Err(Error::Empty);
    }
    let mean = pairwise_sum(image.intensities()) / image.len() as f64;
    raw_estimate(0.5_f64.ln() / mean.ln())
}

/// Entropy gain, in bits, of applying the optimal exponent `gamma` to the
/// image it was estimated from:
///
/// ```text
/// log2(gamma) + (1/gamma - 1) * log2(e)  =  (ln gamma + 1/gamma - 1) / ln 2
/// ```
///
/// Non-negative for every positive `gamma`, and zero exactly at `gamma = 1`.
pub fn entropy_gain(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((gamma.ln() + 1.0 / gamma - 1.0) / std::f64::consts::LN_2)
}

/// Predicted entropy change, in bits, of applying an arbitrary exponent
/// `beta` to an image whose optimal exponent is `optimal_gamma`:
/// `(ln beta + (1 - beta) / optimal_gamma) / ln 2`.
///
/// Reduces to [`entropy_gain`] at `beta == optimal_gamma`; negative whenever
/// `beta` moves the image away from its entropy optimum by enough.
pub fn applied_entropy_gain(beta: f64, optimal_gamma: f64) -> Result<f64> {
    check_gamma(beta)?;
    check_gamma(optimal_gamma)?;
    Ok((beta.ln() + (1.0 - beta) / optimal_gamma) / std::f64::consts::LN_2)
}

/// Negative differential entropy `J(gamma)` the transform would produce,
/// predicted from the source histogram alone:
///
/// ```text
/// J(gamma) = sum_l p_l * log2( (p_l / delta) * (1/gamma) * u_l^(1-gamma) )
/// ```
///
/// with bin centers `u_l = (l + 0.5)/256` and `delta = 1/256`. Convex in
/// `gamma`; its minimizer is the [`estimate_gamma`] closed form, and
/// `J(1)` is exactly the negated differential entropy of the input.
pub fn predicted_neg_entropy(hist: &Histogram256, gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    if hist.total() == 0 {
        return Err(Error::Empty);
    }
    let log2_gamma = gamma.log2();
    Ok(hist
        .pdf()
        .map(|(l, p)| {
            let u = normalize_level(l as u8);
            p * ((p * 256.0).log2() - log2_gamma + (1.0 - gamma) * u.log2())
        })
        .sum())
}

/// Deterministic pairwise sum of `ln(x)` over a slice, in slice order.
///
/// Pairwise reduction keeps the accumulated rounding error near
/// `O(log n * eps)` even for tens of millions of pixels, and the fixed
/// split makes results bitwise reproducible run to run.
fn pairwise_ln_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().map(|&u| u.ln()).sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_ln_sum(left) + pairwise_ln_sum(right)
}

/// Deterministic pairwise sum of a slice, in slice order.
fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}
