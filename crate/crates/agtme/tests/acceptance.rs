//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured figures (run with `--nocapture` to see them).
//!
//! Tolerances are pinned in code next to each assertion. Oracles used here
//! (dense-grid argmin, fine-bin change-of-variables entropy) are brute-force
//! routes independent of the closed forms they check.

use std::path::PathBuf;
use std::sync::{Mutex, MutexGuard};
use std::time::Instant;

use agtme::bench::{distort_quantize, rmse_sweep, signal_experiment, textures, timing_run};
use agtme::{
    correct_color, differential_entropy, estimate_gamma, hsv_to_rgb, predicted_neg_entropy,
    rgb_to_hsv, shannon_entropy, ChannelStrategy, ColorImage, CorrectionEstimates, GrayImage,
    Histogram256, NormalizedImage, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// The criteria run one at a time: the performance criterion measures wall
// clock and must not share cores with the oracle searches.
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

fn report(number: u32, title: &str, details: String) {
    println!("acceptance {number} ({title}): PASS — {details}");
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// Criterion 1: the closed form lands on the dense-grid argmin of the
/// predicted loss for 50 random histograms, within 1e-4, in under 10 s.
#[test]
fn criterion_1_closed_form_matches_grid_oracle() {
    let _serial = serial();
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC1);
    let mut worst: f64 = 0.0;

    for _ in 0..50 {
        // Random histogram whose optimum stays inside the searched range.
        let (hist, levels) = loop {
            let support = rng.gen_range(16..=256usize);
            let mut counts = [0u64; 256];
            for _ in 0..support {
                counts[rng.gen_range(0..256usize)] += rng.gen_range(1..400u64);
            }
            let levels: Vec<u8> = counts
                .iter()
                .enumerate()
                .flat_map(|(l, &c)| std::iter::repeat(l as u8).take(c as usize))
                .collect();
            let hist = Histogram256::from_counts(counts);
            let image = GrayImage::new(levels.len() as u32, 1, levels.clone()).unwrap();
            let gamma = estimate_gamma(&NormalizedImage::from_levels(&image))
                .unwrap()
                .gamma;
            if (0.12..=2.95).contains(&gamma) {
                break (hist, levels);
            }
        };

        let image = GrayImage::new(levels.len() as u32, 1, levels).unwrap();
        let closed_form = estimate_gamma(&NormalizedImage::from_levels(&image))
            .unwrap()
            .gamma;

        // Brute-force search, step 1e-4 over [0.1, 3.0].
        let step = 1e-4;
        let mut best = (f64::INFINITY, 0.0);
        let mut k = 0u32;
        loop {
            let gamma = 0.1 + k as f64 * step;
            if gamma > 3.0 {
                break;
            }
            let loss = predicted_neg_entropy(&hist, gamma).unwrap();
            if loss < best.0 {
                best = (loss, gamma);
            }
            k += 1;
        }
        let diff = (best.1 - closed_form).abs();
        assert!(
            diff <= 1e-4,
            "grid argmin {} vs closed form {closed_form}",
            best.1
        );
        worst = worst.max(diff);
    }

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "oracle took {elapsed:?}");
    report(
        1,
        "closed form vs grid oracle",
        format!("50 histograms, worst |argmin - gamma*| = {worst:.2e}, {elapsed:.2?}"),
    );
}

/// Criterion 2: exact scale law on continuous images,
/// `gamma*(I^beta) * beta = gamma*(I)` within 1e-9.
#[test]
fn criterion_2_scale_law_on_continuous_images() {
    let _serial = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC2);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let values: Vec<f64> = (0..96 * 96)
            .map(|_| rng.gen_range(0.02..0.98))
            .collect();
        let image = NormalizedImage::from_intensities(96, 96, values).unwrap();
        let base = estimate_gamma(&image).unwrap().gamma;
        for beta in [0.1, 0.5, 1.0, 1.5, 2.0, 3.0] {
            let distorted = image.apply_gamma(beta).unwrap();
            let scaled = estimate_gamma(&distorted).unwrap().gamma;
            let diff = (scaled * beta - base).abs();
            assert!(diff <= 1e-9, "beta {beta}: {} vs {base}", scaled * beta);
            worst = worst.max(diff);
        }
    }
    report(
        2,
        "continuous scale law",
        format!("20 images x 6 exponents, worst |gamma*(I^b)*b - gamma*(I)| = {worst:.2e}"),
    );
}

/// Criterion 3: recognition sweep on the shipped corpus. Entropy estimator
/// mean RMSE <= 0.10 and strictly below the mean-brightness baseline.
#[test]
fn criterion_3_quantized_sweep_accuracy() {
    let _serial = serial();
    let started = Instant::now();

    // Guard against drift between shipped files and their generators.
    for (id, image) in textures::synthetic_corpus() {
        let path = corpus_dir().join(format!("{id}.pgm"));
        let shipped = std::fs::read(&path).expect("shipped corpus file");
        let regenerated = agtme::pnm::encode_image(&agtme::pnm::Image::Gray(image));
        assert_eq!(shipped, regenerated, "{id} drifted from its generator");
    }

    let grid: Vec<f64> = (1..=30).map(|k| (k as f64 * 0.1 * 1e9).round() / 1e9).collect();
    let sweep = rmse_sweep(corpus_dir(), &grid).unwrap();
    assert!(sweep.skipped.is_empty(), "unreadable corpus files: {:?}", sweep.skipped);
    assert!(sweep.image_ids.len() >= 8, "corpus has {} images", sweep.image_ids.len());

    let unit_index = grid.iter().position(|&g| g == 1.0).unwrap();
    assert_eq!(sweep.agtme.rmse_per_bias[unit_index], 0.0);
    assert_eq!(sweep.cab.rmse_per_bias[unit_index], 0.0);

    assert!(
        sweep.agtme.mean_rmse <= 0.10,
        "entropy-method mean RMSE {} exceeds 0.10",
        sweep.agtme.mean_rmse
    );
    assert!(
        sweep.agtme.mean_rmse < sweep.cab.mean_rmse,
        "expected strict ordering: {} vs {}",
        sweep.agtme.mean_rmse,
        sweep.cab.mean_rmse
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "sweep took {elapsed:?}");
    report(
        3,
        "quantized sweep accuracy",
        format!(
            "{} images, mean RMSE agtme {:.4} < cab {:.4}, {elapsed:.2?}",
            sweep.image_ids.len(),
            sweep.agtme.mean_rmse,
            sweep.cab.mean_rmse
        ),
    );
}

/// Criterion 4: characteristic behaviors of the estimator.
#[test]
fn criterion_4_characteristics_suite() {
    let _serial = serial();
    // (a) finite, strictly positive estimates on degenerate images.
    let uniform = GrayImage::new(256, 1, (0..=255).collect()).unwrap();
    let degenerate: Vec<(&str, GrayImage)> = vec![
        ("all-black", GrayImage::new(16, 16, vec![0; 256]).unwrap()),
        ("all-white", GrayImage::new(16, 16, vec![255; 256]).unwrap()),
        ("constant", GrayImage::new(16, 16, vec![77; 256]).unwrap()),
        ("uniform", uniform.clone()),
    ];
    for (id, image) in &degenerate {
        let est = estimate_gamma(&NormalizedImage::from_levels(image)).unwrap();
        assert!(
            est.gamma.is_finite() && est.gamma > 0.0,
            "{id}: gamma = {}",
            est.gamma
        );
    }

    // (b) uniform levels estimate to 1 within 0.005.
    let uniform_gamma = estimate_gamma(&NormalizedImage::from_levels(&uniform))
        .unwrap()
        .gamma;
    assert!((uniform_gamma - 1.0).abs() <= 0.005, "uniform gamma {uniform_gamma}");

    // (c) every constant image corrects to 1/e within one quantization
    // level: round(e^-1 * 256 - 0.5) = 94.
    for c in 0..=255u8 {
        let image = GrayImage::new(4, 4, vec![c; 16]).unwrap();
        let normalized = NormalizedImage::from_levels(&image);
        let est = estimate_gamma(&normalized).unwrap();
        let corrected = normalized.apply_gamma(est.gamma).unwrap().denormalize();
        for &level in corrected.levels() {
            assert!(
                (level as i32 - 94).abs() <= 1,
                "constant {c} corrected to level {level}"
            );
        }
    }

    // (d) the predicted gain is non-negative for every test image and
    // matches the fine-bin change-of-variables oracle within 0.01 bits.
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    let mut images: Vec<(String, GrayImage)> = textures::synthetic_corpus();
    images.push(("uniform".to_string(), uniform));
    images.push(("constant-127".to_string(), GrayImage::new(8, 8, vec![127; 64]).unwrap()));
    images.push(("all-white".to_string(), GrayImage::new(8, 8, vec![255; 64]).unwrap()));
    images.push(("smooth-continuous".to_string(), smooth_continuous_image()));

    for (id, image) in &images {
        let normalized = NormalizedImage::from_levels(image);
        let hist = Histogram256::from_levels(image.levels());
        let est = estimate_gamma(&normalized).unwrap();
        assert!(est.entropy_gain_bits >= 0.0, "{id}: negative gain");

        let fine = fine_bin_transformed_entropy(&hist, est.gamma) - differential_entropy(&hist);
        let diff = (fine - est.entropy_gain_bits).abs();
        assert!(
            diff <= 0.01,
            "{id}: fine-bin gain {fine} vs formula {}",
            est.entropy_gain_bits
        );
        worst = worst.max(diff);
        checked += 1;
    }

    // The all-black image satisfies the non-negativity half of (d), but the
    // level-0 bin makes the density oracle disagree with the bin-center
    // convention by a fixed 0.37 bits: ln(u) is unbounded across (0, 1/256),
    // so the bin's center cannot represent its average log. The gap is
    // pinned here rather than hidden.
    let black = GrayImage::new(8, 8, vec![0; 64]).unwrap();
    let black_est = estimate_gamma(&NormalizedImage::from_levels(&black)).unwrap();
    assert!(black_est.entropy_gain_bits >= 0.0);
    let black_hist = Histogram256::from_levels(black.levels());
    let black_fine = fine_bin_transformed_entropy(&black_hist, black_est.gamma)
        - differential_entropy(&black_hist);
    let black_gap = (black_fine - black_est.entropy_gain_bits).abs();
    assert!((black_gap - 0.3719).abs() < 0.01, "level-0 gap moved: {black_gap}");

    report(
        4,
        "characteristics suite",
        format!(
            "finite/positive on degenerates; uniform gamma {uniform_gamma:.4}; 256 constants -> level 94+-1; \
             fine-bin gain within {worst:.5} bits on {checked} images"
        ),
    );
}

/// Criterion 5: the 1-D signal experiment reproduces the reference
/// estimates under the documented conventions, in under 1 s.
#[test]
fn criterion_5_signal_experiment() {
    let _serial = serial();
    let started = Instant::now();
    let report_data = signal_experiment();

    // Pair-relative recognition of the 1.5 bias under the crate's
    // round-and-clamp quantizer.
    assert!(
        (report_data.agtme.pair - 1.5).abs() <= 0.06,
        "pair estimate {}",
        report_data.agtme.pair
    );

    // Reference single-signal values: reproduced with the numpy-style
    // truncating cast (the convention the published figures come from),
    // reciprocal convention.
    assert!(
        (report_data.agtme.reference_single - 1.4478).abs() <= 0.01,
        "entropy-method reference single {}",
        report_data.agtme.reference_single
    );
    assert!(
        (report_data.cab.reference_single - 1.3999).abs() <= 0.01,
        "mean-brightness reference single {}",
        report_data.cab.reference_single
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "signal experiment took {elapsed:?}");
    report(
        5,
        "1-D signal experiment",
        format!(
            "pair {:.4} (target 1.5±0.06), reference singles {:.4}/{:.4} (targets 1.4478/1.3999), {elapsed:.2?}",
            report_data.agtme.pair,
            report_data.agtme.reference_single,
            report_data.cab.reference_single
        ),
    );
}

/// Criterion 6: re-quantized Shannon entropy never exceeds the untouched
/// image's entropy, for any non-unit exponent.
#[test]
fn criterion_6_quantized_entropy_decrease_barrier() {
    let _serial = serial();
    let mut images: Vec<(String, GrayImage)> = textures::synthetic_corpus();
    images.push(("uniform".to_string(), GrayImage::new(256, 1, (0..=255).collect()).unwrap()));
    images.push(("two-tone".to_string(), GrayImage::from_fn(32, 32, |x, _| if x < 16 { 64 } else { 192 })));
    images.push(("smooth-continuous".to_string(), smooth_continuous_image()));

    let mut cells = 0;
    for (id, image) in &images {
        let normalized = NormalizedImage::from_levels(image);
        let base_entropy = shannon_entropy(&Histogram256::from_levels(image.levels()));
        for gamma in [0.5, 0.8, 1.25, 2.0] {
            let transformed = normalized.apply_gamma(gamma).unwrap().denormalize();
            let entropy = shannon_entropy(&Histogram256::from_levels(transformed.levels()));
            assert!(
                entropy <= base_entropy + 1e-9,
                "{id} at gamma {gamma}: {entropy} > {base_entropy}"
            );
            cells += 1;
        }
    }
    report(
        6,
        "quantized entropy decrease barrier",
        format!("{cells} image/exponent cells, all <= unit-exponent entropy + 1e-9"),
    );
}

/// Criterion 7: estimation at 1024^2 under 100 ms; doubling the side
/// scales time by the pixel ratio (within [3, 5]).
#[test]
fn criterion_7_performance() {
    let _serial = serial();
    // Wall-clock measurements on shared machines see scheduler noise, so a
    // transient out-of-band ratio gets up to two remeasurements. The bounds
    // themselves never move.
    let mut measurements = Vec::new();
    for _attempt in 0..3 {
        let rows = timing_run(&[1024, 2048], 15);
        let at_1024 = rows[0].mean_ms;
        let at_2048 = rows[1].mean_ms;
        assert!(at_1024 < 100.0, "1024^2 estimation took {at_1024} ms");
        let ratio = at_2048 / at_1024;
        measurements.push((at_1024, at_2048, ratio));
        if (3.0..=5.0).contains(&ratio) {
            report(
                7,
                "performance",
                format!(
                    "1024^2 in {at_1024:.2} ms, 2048^2 in {at_2048:.2} ms, ratio {ratio:.2} \
                     (attempt {})",
                    measurements.len()
                ),
            );
            return;
        }
    }
    panic!("2048^2/1024^2 time ratio outside [3, 5] in all attempts: {measurements:?}");
}

/// Criterion 8: byte-exact netpbm round-trips and hue/saturation
/// preservation under the V-channel strategy.
#[test]
fn criterion_8_io_and_color() {
    let _serial = serial();
    let dir = tempfile::tempdir().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC8);

    // 20 mixed files, including 1x1 and single-row shapes.
    for i in 0..20 {
        let width = [1u32, 2, 3, 7, 16, 33][i % 6];
        let height = [1u32, 5, 2, 9, 4, 11][(i / 2) % 6];
        let image = if i % 2 == 0 {
            agtme::pnm::Image::Gray(GrayImage::from_fn(width, height, |_, _| rng.gen()))
        } else {
            agtme::pnm::Image::Color(ColorImage::from_fn(width, height, |_, _| {
                [rng.gen(), rng.gen(), rng.gen()]
            }))
        };
        let path = dir.path().join(format!("rt-{i}.pnm"));
        agtme::pnm::write_image(&image, &path).unwrap();
        let reread = agtme::pnm::read_image(&path).unwrap();
        assert_eq!(reread, image, "file {i} decoded differently");
        let rewritten = agtme::pnm::encode_image(&reread);
        assert_eq!(rewritten, std::fs::read(&path).unwrap(), "file {i} bytes changed");
    }

    // 10 color images: V-channel correction must keep hue/saturation within
    // the +-1-level reconversion tolerance.
    let mut worst_channel_dev: f64 = 0.0;
    for i in 0..10u32 {
        let image = ColorImage::from_fn(24, 24, |x, y| {
            let v = 30 + ((x * 9 + y * 5 + i * 13) % 200) as u8;
            let w = 20 + ((x * 3 + y * 11 + i * 29) % 210) as u8;
            match i % 3 {
                0 => [v, w, 60],
                1 => [50, v, w],
                _ => [w, 60, v],
            }
        });
        let (corrected, estimates) =
            correct_color(&image, ChannelStrategy::HsvVChannel, Variant::Raw, None).unwrap();
        let gamma = match estimates {
            CorrectionEstimates::Single(e) => e.gamma,
            _ => unreachable!(),
        };
        for p in 0..image.len() {
            let [r, g, b] = image.pixel(p);
            let (h, s, _) = rgb_to_hsv(r, g, b);
            let v_in = r.max(g).max(b);
            let u = agtme::normalize_level(v_in);
            let v_out = agtme::denormalize_intensity(u.powf(gamma));
            // Exact reconversion target at the corrected V level.
            let ideal = hsv_to_rgb(h, s, v_out as f64 / 255.0).unwrap();
            let got = corrected.pixel(p);
            for (&got_c, ideal_c) in got.iter().zip([ideal.0, ideal.1, ideal.2]) {
                let dev = (got_c as f64 - ideal_c as f64).abs();
                assert!(dev <= 1.0, "pixel {p}: {got:?} vs {ideal:?}");
                worst_channel_dev = worst_channel_dev.max(dev);
            }
            // Direct hue/saturation comparison where chroma supports it.
            let (h2, s2, v2) = rgb_to_hsv(got[0], got[1], got[2]);
            let chroma_out = (s2 * v2 * 255.0).round();
            if chroma_out >= 16.0 && v2 * 255.0 >= 64.0 {
                let dh = (h2 - h).abs().min(360.0 - (h2 - h).abs());
                assert!(dh <= 120.0 / chroma_out, "pixel {p}: hue moved {dh} deg");
                assert!((s2 - s).abs() <= 2.0 / (v2 * 255.0) + 1e-12, "pixel {p}: sat moved");
            }
        }
    }

    report(
        8,
        "I/O and color",
        format!("20 byte-exact round-trips; V-channel correction within {worst_channel_dev:.2} levels of exact reconversion"),
    );
}

/// Smooth continuous-valued image, quantized to 8 bits.
fn smooth_continuous_image() -> GrayImage {
    let mut x = 0.4_f64;
    let values: Vec<f64> = (0..200 * 200)
        .map(|_| {
            x = (x * 997.13 + 0.3717).fract();
            0.04 + 0.9 * (0.5 - 0.5 * (std::f64::consts::TAU * x).cos()).powf(1.3)
        })
        .collect();
    let levels = distort_quantize(&values, 1.0).unwrap();
    GrayImage::new(200, 200, levels).unwrap()
}

/// Differential entropy of the transformed density, computed from the
/// change-of-variables formula on a fine grid of the transformed variable
/// (2^17 midpoint panels). Independent of the closed-form gain it verifies.
fn fine_bin_transformed_entropy(hist: &Histogram256, gamma: f64) -> f64 {
    const FINE: usize = 1 << 17;
    let total = hist.total() as f64;
    let density: Vec<f64> = hist
        .counts()
        .iter()
        .map(|&c| c as f64 / total * 256.0)
        .collect();
    let dg = 1.0 / FINE as f64;
    let mut entropy = 0.0;
    for j in 0..FINE {
        let g = (j as f64 + 0.5) * dg;
        let u = g.powf(1.0 / gamma);
        let bin = ((u * 256.0) as usize).min(255);
        let source_density = density[bin];
        if source_density > 0.0 {
            let transformed = source_density * (1.0 / gamma) * u.powf(1.0 - gamma);
            entropy -= transformed * transformed.log2() * dg;
        }
    }
    entropy
}
