//! Deterministic synthetic textures that form the shipped recognition
//! corpus. Every generator is seeded, so the corpus can be regenerated
//! byte-identically at any time.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::image::GrayImage;

/// Side length of every corpus texture.
pub const TEXTURE_SIZE: u32 = 200;

/// Level range textures are mapped into. Keeping clear of the extreme bins
/// mirrors natural photographs, which rarely saturate whole regions to pure
/// black or white.
const LEVEL_LO: f64 = 6.0;
const LEVEL_HI: f64 = 249.0;

/// The nine shipped textures, in corpus order.
pub fn synthetic_corpus() -> Vec<(String, GrayImage)> {
    vec![
        ("blobs".to_string(), blobs()),
        ("clouds-a".to_string(), clouds(11, 4, 3)),
        ("clouds-b".to_string(), clouds(29, 6, 4)),
        ("dunes".to_string(), dunes()),
        ("ramp-waves".to_string(), ramp_waves()),
        ("rings".to_string(), rings()),
        ("terrace".to_string(), terrace()),
        ("vignette".to_string(), vignette()),
        ("weave".to_string(), weave()),
    ]
}

/// Smoothly interpolated random lattice (value noise).
struct ValueNoise {
    lattice: Vec<f64>,
    cells: usize,
}

impl ValueNoise {
    fn new(seed: u64, cells: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lattice = (0..(cells + 1) * (cells + 1))
            .map(|_| rng.gen::<f64>())
            .collect();
        Self { lattice, cells }
    }

    fn at(&self, ix: usize, iy: usize) -> f64 {
        self.lattice[iy * (self.cells + 1) + ix]
    }

    /// Samples the field at `(x, y)` in [0, 1]^2.
    fn sample(&self, x: f64, y: f64) -> f64 {
        let fx = (x * self.cells as f64).min(self.cells as f64 - 1e-9);
        let fy = (y * self.cells as f64).min(self.cells as f64 - 1e-9);
        let ix = fx as usize;
        let iy = fy as usize;
        let tx = smoothstep(fx - ix as f64);
        let ty = smoothstep(fy - iy as f64);
        let top = lerp(self.at(ix, iy), self.at(ix + 1, iy), tx);
        let bottom = lerp(self.at(ix, iy + 1), self.at(ix + 1, iy + 1), tx);
        lerp(top, bottom, ty)
    }
}

fn smoothstep(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

fn lerp(a: f64, b: f64, t: f64) -> f64 {
    a + (b - a) * t
}

/// Multi-octave value noise in roughly [0, 1].
fn fbm(seed: u64, base_cells: usize, octaves: u32) -> impl Fn(f64, f64) -> f64 {
    let layers: Vec<(ValueNoise, f64)> = (0..octaves)
        .map(|o| {
            let cells = base_cells << o;
            let amplitude = 0.5_f64.powi(o as i32);
            (ValueNoise::new(seed.wrapping_add(o as u64), cells), amplitude)
        })
        .collect();
    let norm: f64 = layers.iter().map(|(_, a)| a).sum();
    move |x, y| layers.iter().map(|(n, a)| a * n.sample(x, y)).sum::<f64>() / norm
}

/// Renders a scalar field into levels, min-max scaled into the corpus range.
fn render(field: impl Fn(f64, f64) -> f64) -> GrayImage {
    let size = TEXTURE_SIZE;
    let mut values = Vec::with_capacity((size * size) as usize);
    for y in 0..size {
        for x in 0..size {
            let u = (x as f64 + 0.5) / size as f64;
            let v = (y as f64 + 0.5) / size as f64;
            values.push(field(u, v));
        }
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = if max > min { max - min } else { 1.0 };
    let levels = values
        .iter()
        .map(|&v| {
            let t = (v - min) / span;
            (LEVEL_LO + t * (LEVEL_HI - LEVEL_LO)).round() as u8
        })
        .collect();
    GrayImage::new(size, size, levels).expect("square buffer")
}

fn clouds(seed: u64, base_cells: usize, octaves: u32) -> GrayImage {
    render(fbm(seed, base_cells, octaves))
}

fn blobs() -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..14)
        .map(|_| {
            (
                rng.gen::<f64>(),
                rng.gen::<f64>(),
                0.03 + 0.10 * rng.gen::<f64>(),
                0.4 + 0.6 * rng.gen::<f64>(),
            )
        })
        .collect();
    render(move |x, y| {
        let base = 0.25 + 0.2 * x + 0.1 * y;
        blobs
            .iter()
            .map(|&(cx, cy, sigma, amp)| {
                let d2 = (x - cx).powi(2) + (y - cy).powi(2);
                amp * (-d2 / (2.0 * sigma * sigma)).exp()
            })
            .sum::<f64>()
            + base
    })
}

fn dunes() -> GrayImage {
    let warp = fbm(43, 5, 3);
    render(move |x, y| {
        let phase = 9.0 * (x + 0.4 * warp(x, y)) + 2.0 * y;
        0.5 + 0.35 * (std::f64::consts::TAU * phase / 3.0).sin() + 0.3 * warp(y, x)
    })
}

fn ramp_waves() -> GrayImage {
    render(|x, y| {
        let tau = std::f64::consts::TAU;
        0.55 * (x + y) / 2.0
            + 0.25 * (tau * 3.0 * x).sin()
            + 0.20 * (tau * 2.2 * y + 1.0).sin()
    })
}

fn rings() -> GrayImage {
    let texture = fbm(57, 8, 2);
    render(move |x, y| {
        let r = ((x - 0.42).powi(2) + (y - 0.55).powi(2)).sqrt();
        0.5 + 0.4 * (std::f64::consts::TAU * 6.5 * r).sin() * (1.0 - r).max(0.0)
            + 0.25 * texture(x, y)
    })
}

fn terrace() -> GrayImage {
    let base = fbm(83, 4, 3);
    render(move |x, y| {
        let v = base(x, y) * 5.0;
        let step = v.floor();
        step + smoothstep(v - step)
    })
}

fn vignette() -> GrayImage {
    let detail = fbm(97, 10, 2);
    render(move |x, y| {
        let r2 = (x - 0.5).powi(2) + (y - 0.5).powi(2);
        (1.2 - 1.6 * r2) * (0.55 + 0.45 * detail(x, y))
    })
}

fn weave() -> GrayImage {
    let grain = fbm(113, 12, 2);
    render(move |x, y| {
        let tau = std::f64::consts::TAU;
        0.5 + 0.28 * (tau * 5.0 * x).sin() * (tau * 4.0 * y).sin() + 0.35 * grain(x, y)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::histogram::Histogram256;

    #[test]
    fn corpus_is_deterministic_and_desk_scale() {
        let a = synthetic_corpus();
        let b = synthetic_corpus();
        assert!(a.len() >= 8);
        assert_eq!(a.len(), b.len());
        for ((id_a, img_a), (id_b, img_b)) in a.iter().zip(&b) {
            assert_eq!(id_a, id_b);
            assert_eq!(img_a, img_b);
            assert_eq!(img_a.width(), TEXTURE_SIZE);
            assert_eq!(img_a.height(), TEXTURE_SIZE);
        }
    }

    #[test]
    fn corpus_histograms_are_rich() {
        for (id, img) in synthetic_corpus() {
            let hist = Histogram256::from_levels(img.levels());
            let occupied = hist.counts().iter().filter(|&&c| c > 0).count();
            assert!(occupied >= 100, "{id} occupies only {occupied} bins");
            assert_eq!(hist.count(0), 0, "{id} touches level 0");
            assert_eq!(hist.count(255), 0, "{id} touches level 255");
        }
    }
}
