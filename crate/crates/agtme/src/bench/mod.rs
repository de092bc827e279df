//! Evaluation harness: synthetic-distortion recognition sweeps, the 1-D
//! signal experiment, loss-curve emission, timing, and scan-line spectra.
//!
//! The harness recognizes a synthetically applied bias exponent by
//! estimating before and after: `gamma_r = gamma*(original) /
//! gamma*(distorted)`. Aggregated over a corpus and a bias grid this yields
//! the RMSE accuracy figure, computed for both the entropy estimator and
//! the mean-brightness baseline.

pub mod textures;

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::estimator::{cab_gamma, estimate_gamma, predicted_neg_entropy};
use crate::histogram::{shannon_entropy, Histogram256, BINS};
use crate::image::{
    check_gamma, denormalize_intensity, normalize_level, GrayImage, NormalizedImage,
};

/// Number of points in the synthetic 1-D signal.
pub const SIGNAL_POINTS: usize = 512;

/// Bias exponent applied in the 1-D signal experiment.
pub const SIGNAL_DISTORTION: f64 = 1.5;

/// A 1-D test signal of 512 samples, nominally in (0, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    samples: Vec<f64>,
}

impl Signal1D {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.len() != SIGNAL_POINTS {
            return Err(Error::BufferSize {
                expected: SIGNAL_POINTS,
                actual: samples.len(),
            });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// 8-bit levels of the raw signal (bias exponent 1).
    pub fn quantized(&self) -> Vec<u8> {
        distort_quantize(&self.samples, 1.0).expect("unit exponent is valid")
    }
}

/// The two-tone synthetic signal used by the 1-D experiment:
///
/// ```text
/// y(n) = 75/255 sin(2 pi 2n/64) - 55/255 sin(2 pi 1.3n/64) + 127/255
/// ```
///
/// for `n` in 0..512. Nine samples overshoot (0, 1) by at most 0.012 where
/// the two tones align; quantization clamps them to the level range.
pub fn synth_signal() -> Signal1D {
    let tau = std::f64::consts::TAU;
    let samples = (0..SIGNAL_POINTS)
        .map(|n| {
            let n = n as f64;
            (75.0 / 255.0) * (tau * 2.0 * n / 64.0).sin()
                - (55.0 / 255.0) * (tau * 1.3 * n / 64.0).sin()
                + 127.0 / 255.0
        })
        .collect();
    Signal1D { samples }
}

/// Applies a bias exponent and quantizes to 8-bit levels:
/// `l = clamp(round(clamp(u, 0, 1)^gamma_b * 255), 0, 255)`.
///
/// Rounding is half-away-from-zero. Out-of-domain inputs are clamped into
/// [0, 1] before the power so the result is always a valid level.
pub fn distort_quantize(values: &[f64], gamma_b: f64) -> Result<Vec<u8>> {
    check_gamma(gamma_b)?;
    Ok(values
        .iter()
        .map(|&u| {
            let v = u.clamp(0.0, 1.0).powf(gamma_b);
            (v * 255.0).round().clamp(0.0, 255.0) as u8
        })
        .collect())
}

/// Recognized relative distortion between an image pair:
/// `gamma*(original) / gamma*(distorted)`.
pub fn relative_gamma(original: &NormalizedImage, distorted: &NormalizedImage) -> Result<f64> {
    Ok(estimate_gamma(original)?.gamma / estimate_gamma(distorted)?.gamma)
}

/// Which estimator a sweep row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    AgtMe,
    Cab,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::AgtMe => "agtme",
            Method::Cab => "cab",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recognition accuracy of one method over a corpus and a bias grid.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub method: Method,
    pub bias_gammas: Vec<f64>,
    /// `per_image_recognized[image][bias]` is the recognized `gamma_r`.
    pub per_image_recognized: Vec<Vec<f64>>,
    /// `sqrt(sum_k (gamma_r,k - gamma_b)^2 / K)` per bias.
    pub rmse_per_bias: Vec<f64>,
    /// Mean of `rmse_per_bias` excluding the `gamma_b = 1` grid point,
    /// where every method is trivially exact. Zero if the grid holds only
    /// that point.
    pub mean_rmse: f64,
}

/// Results of [`rmse_sweep`] for both methods over one corpus.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub image_ids: Vec<String>,
    pub agtme: SweepResult,
    pub cab: SweepResult,
    /// Files that could not be used, with the reason; the sweep continues
    /// without them.
    pub skipped: Vec<(PathBuf, String)>,
}

/// Runs the recognition sweep over every `.pgm` file in a directory,
/// in filename order.
pub fn rmse_sweep(corpus: impl AsRef<Path>, grid: &[f64]) -> Result<SweepReport> {
    let corpus = corpus.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(corpus)
        .map_err(|e| Error::io(corpus, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|ext| ext.eq_ignore_ascii_case("pgm"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();

    let mut images = Vec::new();
    let mut skipped = Vec::new();
    for path in paths {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match crate::pnm::read_image(&path) {
            Ok(crate::pnm::Image::Gray(g)) => images.push((id, g)),
            Ok(crate::pnm::Image::Color(_)) => {
                skipped.push((path, "color image in grayscale corpus".to_string()))
            }
            Err(e) => skipped.push((path, e.to_string())),
        }
    }

    let mut report = rmse_sweep_images(&images, grid)?;
    report.skipped = skipped;
    Ok(report)
}

/// [`rmse_sweep`] over in-memory images.
pub fn rmse_sweep_images(images: &[(String, GrayImage)], grid: &[f64]) -> Result<SweepReport> {
    if images.is_empty() || grid.is_empty() {
        return Err(Error::Empty);
    }
    for &g in grid {
        check_gamma(g)?;
    }

    let mut agtme_rows = Vec::with_capacity(images.len());
    let mut cab_rows = Vec::with_capacity(images.len());
    for (_, image) in images {
        let original = NormalizedImage::from_levels(image);
        let base_agtme = estimate_gamma(&original)?.gamma;
        let base_cab = cab_gamma(&original)?.gamma;

        let mut agtme_row = Vec::with_capacity(grid.len());
        let mut cab_row = Vec::with_capacity(grid.len());
        for &bias in grid {
            let levels = distort_quantize(original.intensities(), bias)?;
            let distorted = NormalizedImage::from_levels(&GrayImage::new(
                image.width(),
                image.height(),
                levels,
            )?);
            agtme_row.push(base_agtme / estimate_gamma(&distorted)?.gamma);
            cab_row.push(base_cab / cab_gamma(&distorted)?.gamma);
        }
        agtme_rows.push(agtme_row);
        cab_rows.push(cab_row);
    }

    Ok(SweepReport {
        image_ids: images.iter().map(|(id, _)| id.clone()).collect(),
        agtme: summarize(Method::AgtMe, grid, agtme_rows),
        cab: summarize(Method::Cab, grid, cab_rows),
        skipped: Vec::new(),
    })
}

fn summarize(method: Method, grid: &[f64], rows: Vec<Vec<f64>>) -> SweepResult {
    let k = rows.len() as f64;
    let rmse_per_bias: Vec<f64> = (0..grid.len())
        .map(|j| {
            let sum_sq: f64 = rows.iter().map(|row| (row[j] - grid[j]).powi(2)).sum();
            (sum_sq / k).sqrt()
        })
        .collect();
    let included: Vec<f64> = grid
        .iter()
        .zip(&rmse_per_bias)
        .filter(|(&bias, _)| (bias - 1.0).abs() > 1e-12)
        .map(|(_, &rmse)| rmse)
        .collect();
    let mean_rmse = if included.is_empty() {
        0.0
    } else {
        included.iter().sum::<f64>() / included.len() as f64
    };
    SweepResult {
        method,
        bias_gammas: grid.to_vec(),
        per_image_recognized: rows,
        rmse_per_bias,
        mean_rmse,
    }
}

/// One grid point of the two entropy-prediction pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossPoint {
    pub gamma: f64,
    /// Negative entropy predicted from the source histogram alone.
    pub predicted: f64,
    /// Negative entropy measured after actually transforming and
    /// re-quantizing the levels (shifted by the same 8-bit offset so the
    /// two pipelines coincide at `gamma = 1`).
    pub quantized: f64,
}

/// Evaluates both entropy pipelines over a gamma grid.
///
/// The predicted curve is convex with its minimum at the closed-form
/// estimate. The quantized curve can only rise above the predicted one:
/// re-quantization merges levels and loses entropy at every `gamma != 1`.
pub fn loss_curve(hist: &Histogram256, grid: &[f64]) -> Result<Vec<LossPoint>> {
    if grid.is_empty() {
        return Err(Error::Empty);
    }
    grid.iter()
        .map(|&gamma| {
            let predicted = predicted_neg_entropy(hist, gamma)?;
            let requantized = requantize_histogram(hist, gamma)?;
            let quantized = 8.0 - shannon_entropy(&requantized);
            Ok(LossPoint {
                gamma,
                predicted,
                quantized,
            })
        })
        .collect()
}

/// Pushes a level histogram through normalize -> power -> denormalize.
fn requantize_histogram(hist: &Histogram256, gamma: f64) -> Result<Histogram256> {
    check_gamma(gamma)?;
    let mut counts = [0u64; BINS];
    for (l, &c) in hist.counts().iter().enumerate() {
        if c > 0 {
            let g = normalize_level(l as u8).powf(gamma);
            counts[denormalize_intensity(g) as usize] += c;
        }
    }
    Ok(Histogram256::from_counts(counts))
}

/// Mean wall-clock milliseconds of one estimation at one image size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingRow {
    pub size: u32,
    pub mean_ms: f64,
}

/// Times estimation end-to-end (normalization included) on random square
/// images, using the level-native estimator so the measurement tracks the
/// O(M) pixel work rather than large-buffer allocator behavior.
///
/// Image synthesis is excluded from the timed region; one untimed warmup
/// run precedes the measured repetitions.
pub fn timing_run(sizes: &[u32], repetitions: u32) -> Vec<TimingRow> {
    let repetitions = repetitions.max(1);
    sizes
        .iter()
        .filter(|&&size| size > 0)
        .map(|&size| {
            let mut rng = ChaCha8Rng::seed_from_u64(size as u64);
            let levels: Vec<u8> = (0..size as usize * size as usize)
                .map(|_| rng.gen())
                .collect();
            let image = GrayImage::new(size, size, levels).expect("square buffer");

            let run = |image: &GrayImage| {
                crate::estimator::estimate_gamma_levels(image)
                    .expect("nonempty image")
                    .gamma
            };
            std::hint::black_box(run(&image));

            let mut total_ms = 0.0;
            for _ in 0..repetitions {
                let start = Instant::now();
                std::hint::black_box(run(&image));
                total_ms += start.elapsed().as_secs_f64() * 1e3;
            }
            TimingRow {
                size,
                mean_ms: total_ms / repetitions as f64,
            }
        })
        .collect()
}

/// Mean-removed periodogram of a scan line: squared DFT magnitude for bins
/// `0..=len/2`.
pub fn scanline_spectrum(levels: &[u8]) -> Vec<f64> {
    let n = levels.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = levels.iter().map(|&l| l as f64).sum::<f64>() / n as f64;
    let centered: Vec<f64> = levels.iter().map(|&l| l as f64 - mean).collect();
    (0..=n / 2)
        .map(|bin| {
            let w = std::f64::consts::TAU * bin as f64 / n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for (t, &v) in centered.iter().enumerate() {
                let phase = w * t as f64;
                re += v * phase.cos();
                im -= v * phase.sin();
            }
            re * re + im * im
        })
        .collect()
}

/// Distortion estimates for one method in the 1-D experiment.
#[derive(Debug, Clone, Copy)]
pub struct SignalEstimates {
    pub method: Method,
    /// Restoration exponent of the quantized original signal.
    pub original_gamma: f64,
    /// Restoration exponent of the quantized distorted signal.
    pub distorted_gamma: f64,
    /// Single-signal distortion estimate `1 / distorted_gamma`.
    pub single: f64,
    /// Pair-relative distortion estimate `original_gamma / distorted_gamma`.
    pub pair: f64,
    /// Single-signal estimate with the signal quantized by a numpy-style
    /// `uint8` cast (truncate toward zero, wrap modulo 256, NaN to 0)
    /// instead of the round-and-clamp convention, for comparison with
    /// numpy-based pipelines.
    pub reference_single: f64,
}

/// Everything the 1-D signal experiment produces.
#[derive(Debug, Clone)]
pub struct SignalReport {
    /// The bias exponent applied to the signal.
    pub distortion: f64,
    pub agtme: SignalEstimates,
    pub cab: SignalEstimates,
    /// Predicted/quantized loss over a gamma grid for the distorted signal.
    pub loss_curve: Vec<LossPoint>,
}

/// Runs the 1-D experiment: synthesize, distort by 1.5, quantize, estimate
/// with both methods under both distortion-estimate conventions.
pub fn signal_experiment() -> SignalReport {
    let signal = synth_signal();
    let original = quantized_signal(&signal, 1.0);
    let distorted = quantized_signal(&signal, SIGNAL_DISTORTION);

    let reference_distorted: Vec<u8> = signal
        .samples()
        .iter()
        .map(|&y| trunc_wrap_u8(y.powf(SIGNAL_DISTORTION) * 255.0))
        .collect();
    let reference = normalize_levels_1d(&reference_distorted);

    let estimates = |method: Method| {
        let estimate = |img: &NormalizedImage| match method {
            Method::AgtMe => estimate_gamma(img).expect("nonempty").gamma,
            Method::Cab => cab_gamma(img).expect("nonempty").gamma,
        };
        let original_gamma = estimate(&original);
        let distorted_gamma = estimate(&distorted);
        SignalEstimates {
            method,
            original_gamma,
            distorted_gamma,
            single: 1.0 / distorted_gamma,
            pair: original_gamma / distorted_gamma,
            reference_single: 1.0 / estimate(&reference),
        }
    };

    let grid: Vec<f64> = (2..=60).map(|k| k as f64 * 0.05).collect();
    let hist = Histogram256::from_normalized(&distorted);
    let loss_curve = loss_curve(&hist, &grid).expect("valid grid");

    SignalReport {
        distortion: SIGNAL_DISTORTION,
        agtme: estimates(Method::AgtMe),
        cab: estimates(Method::Cab),
        loss_curve,
    }
}

fn quantized_signal(signal: &Signal1D, gamma: f64) -> NormalizedImage {
    let levels = distort_quantize(signal.samples(), gamma).expect("positive exponent");
    normalize_levels_1d(&levels)
}

fn normalize_levels_1d(levels: &[u8]) -> NormalizedImage {
    let image =
        GrayImage::new(levels.len() as u32, 1, levels.to_vec()).expect("1-D buffer");
    NormalizedImage::from_levels(&image)
}

/// Numpy-style `uint8` cast: truncate toward zero, wrap modulo 256, NaN
/// becomes 0.
fn trunc_wrap_u8(v: f64) -> u8 {
    if !v.is_finite() {
        return 0;
    }
    (v.trunc() as i64).rem_euclid(256) as u8
}
