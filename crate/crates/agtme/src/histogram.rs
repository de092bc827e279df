//! 256-bin intensity histograms and the two entropy conventions built on
//! them.
//!
//! Reported image entropies are discrete Shannon entropy in bits over the
//! 256 levels. Differential entropy treats the same histogram as a
//! piecewise-constant density `p_l / delta` with bin width `delta = 1/256`,
//! which makes it exactly `shannon - 8`. Both conventions define
//! `0 * log 0 = 0`, so empty bins contribute nothing.

use crate::image::NormalizedImage;

pub const BINS: usize = 256;
const BIN_WIDTH: f64 = 1.0 / BINS as f64;

/// A 256-bin empirical distribution of 8-bit levels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; BINS],
    total: u64,
}

impl Histogram256 {
    pub fn from_levels(levels: &[u8]) -> Self {
        let mut counts = [0u64; BINS];
        for &l in levels {
            counts[l as usize] += 1;
        }
        Self {
            counts,
            total: levels.len() as u64,
        }
    }

    /// Bins intensities in (0, 1) with `l = floor(u * 256)`.
    ///
    /// For intensities produced by the level normalization this recovers the
    /// original level exactly.
    pub fn from_normalized(image: &NormalizedImage) -> Self {
        let mut counts = [0u64; BINS];
        for &u in image.intensities() {
            let bin = ((u * BINS as f64) as usize).min(BINS - 1);
            counts[bin] += 1;
        }
        Self {
            counts,
            total: image.len() as u64,
        }
    }

    pub fn from_counts(counts: [u64; BINS]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; BINS] {
        &self.counts
    }

    pub fn count(&self, level: u8) -> u64 {
        self.counts[level as usize]
    }

    /// Total sample count (`M`, or `N` under a mask).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// `(level, p_l)` over occupied bins only.
    pub fn pdf(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let total = self.total as f64;
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(l, &c)| (l, c as f64 / total))
    }
}

/// Discrete Shannon entropy `-sum p_l log2 p_l`, in bits. Range [0, 8].
pub fn shannon_entropy(hist: &Histogram256) -> f64 {
    -hist.pdf().map(|(_, p)| p * p.log2()).sum::<f64>()
}

/// Differential entropy of the piecewise-constant density `p_l / delta`,
/// in bits: `-sum (p_l/delta) log2(p_l/delta) delta`. Equals
/// [`shannon_entropy`] minus 8 under this convention.
pub fn differential_entropy(hist: &Histogram256) -> f64 {
    -hist.pdf().map(|(_, p)| p * (p / BIN_WIDTH).log2()).sum::<f64>()
}
