//! `agtme` — blind inverse gamma correction from the command line.
//!
//! Exit codes: 0 on success, 2 for usage, input, or domain errors, 3 for
//! output I/O failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use agtme::bench;
use agtme::pnm;
use agtme::{
    estimate_gamma, estimate_gamma_masked, shannon_entropy, visual_gamma, ChannelStrategy,
    ColorImage, CorrectionEstimates, GammaEstimate, GrayImage, Histogram256, MaskImage,
    NormalizedImage, Variant,
};

#[derive(Parser)]
#[command(name = "agtme", version, about = "Blind inverse gamma correction by entropy maximization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the estimated restoration gamma of a PGM/PPM image
    Estimate {
        /// Input image (binary PGM or PPM, maxval 255)
        input: PathBuf,
        /// Restrict estimation to the nonzero pixels of this P5 mask
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Estimation strategy for color inputs
        #[arg(long, value_enum, default_value_t = StrategyArg::HsvV)]
        strategy: StrategyArg,
    },
    /// Estimate, transform, and write the corrected image
    Correct {
        input: PathBuf,
        /// Output path (same format as the input)
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Apply gamma/2.2 for display viewing
        #[arg(long)]
        visual: bool,
        #[arg(long, value_enum, default_value_t = StrategyArg::HsvV)]
        strategy: StrategyArg,
        /// Skip estimation and apply this exponent instead
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Write the entropy loss curve of a grayscale image as CSV
    Curve {
        input: PathBuf,
        /// Gamma grid as START:STOP:STEP
        #[arg(long, default_value = "0.1:3.0:0.01")]
        grid: String,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit the transform-then-requantize measurement instead of the
        /// histogram prediction
        #[arg(long)]
        quantized: bool,
    },
    /// Recognition-error sweep over a directory of PGM images
    Sweep {
        corpus: PathBuf,
        #[arg(long, default_value = "0.1:3.0:0.1")]
        grid: String,
        /// Output CSV path (stdout when omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time the estimator on random images of the given sizes
    Time {
        /// Comma-separated square image sizes
        #[arg(long, default_value = "256,512,1024,2048")]
        sizes: String,
        #[arg(long, default_value_t = 5)]
        reps: u32,
        /// Also write the table as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the synthetic 1-D signal experiment
    Signal {
        /// Write the distorted signal's loss curve as CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// One estimate over all channel samples
    Pooled,
    /// Estimate on the luma plane, apply to all channels
    Gray,
    /// Independent estimate per channel
    PerChannel,
    /// Estimate and transform the V channel of HSV
    HsvV,
}

impl From<StrategyArg> for ChannelStrategy {
    fn from(arg: StrategyArg) -> Self {
        match arg {
            StrategyArg::Pooled => ChannelStrategy::AllChannelsPooled,
            StrategyArg::Gray => ChannelStrategy::GrayCommonGamma,
            StrategyArg::PerChannel => ChannelStrategy::PerChannelIndependent,
            StrategyArg::HsvV => ChannelStrategy::HsvVChannel,
        }
    }
}

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

type CliResult<T> = Result<T, CliError>;

/// Input-side failures (unreadable or malformed inputs, domain errors).
fn input_err(err: impl std::fmt::Display) -> CliError {
    CliError {
        code: 2,
        message: err.to_string(),
    }
}

/// Output-side failures (the request was valid but the artifact could not
/// be written).
fn output_err(err: impl std::fmt::Display) -> CliError {
    CliError {
        code: 3,
        message: err.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("agtme: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Estimate {
            input,
            mask,
            strategy,
        } => cmd_estimate(&input, mask.as_deref(), strategy.into()),
        Command::Correct {
            input,
            out,
            mask,
            visual,
            strategy,
            gamma,
        } => cmd_correct(&input, &out, mask.as_deref(), visual, strategy.into(), gamma),
        Command::Curve {
            input,
            grid,
            out,
            quantized,
        } => cmd_curve(&input, &grid, out.as_deref(), quantized),
        Command::Sweep { corpus, grid, out } => cmd_sweep(&corpus, &grid, out.as_deref()),
        Command::Time { sizes, reps, out } => cmd_time(&sizes, reps, out.as_deref()),
        Command::Signal { out } => cmd_signal(out.as_deref()),
    }
}

fn cmd_estimate(input: &Path, mask: Option<&Path>, strategy: ChannelStrategy) -> CliResult<()> {
    let image = pnm::read_image(input).map_err(input_err)?;
    let mask = read_mask(mask)?;

    match image {
        pnm::Image::Gray(gray) => {
            let (estimate, entropy) = estimate_gray(&gray, mask.as_ref())?;
            println!("{}", estimate_line(&estimate, entropy)?);
        }
        pnm::Image::Color(color) => {
            let estimates = agtme::estimate_color(&color, strategy, Variant::Raw, mask.as_ref())
                .map_err(input_err)?;
            print_color_estimates(&color, strategy, &estimates, None)?;
        }
    }
    Ok(())
}

fn cmd_correct(
    input: &Path,
    out: &Path,
    mask: Option<&Path>,
    visual: bool,
    strategy: ChannelStrategy,
    gamma_override: Option<f64>,
) -> CliResult<()> {
    let image = pnm::read_image(input).map_err(input_err)?;
    let mask = read_mask(mask)?;

    let corrected = match &image {
        pnm::Image::Gray(gray) => {
            let (estimate, entropy) = estimate_gray(gray, mask.as_ref())?;
            let applied = applied_gamma(estimate.gamma, gamma_override, visual)?;
            let mut line = estimate_line(&estimate, entropy)?;
            write!(line, " applied={}", sig6(applied)).expect("string write");
            println!("{line}");

            let normalized = NormalizedImage::from_levels(gray);
            let transformed = normalized.apply_gamma(applied).map_err(input_err)?;
            pnm::Image::Gray(transformed.denormalize())
        }
        pnm::Image::Color(color) => {
            let estimates = agtme::estimate_color(color, strategy, Variant::Raw, mask.as_ref())
                .map_err(input_err)?;
            let transformed = match &estimates {
                CorrectionEstimates::Single(estimate) => {
                    let applied = applied_gamma(estimate.gamma, gamma_override, visual)?;
                    print_color_estimates(color, strategy, &estimates, Some(&[applied]))?;
                    agtme::apply_gamma_color(color, strategy, applied).map_err(input_err)?
                }
                CorrectionEstimates::PerChannel(per_channel) => {
                    let mut applied = [0.0; 3];
                    for (slot, estimate) in applied.iter_mut().zip(per_channel) {
                        *slot = applied_gamma(estimate.gamma, gamma_override, visual)?;
                    }
                    print_color_estimates(color, strategy, &estimates, Some(&applied))?;
                    agtme::apply_gamma_channels(color, applied).map_err(input_err)?
                }
            };
            pnm::Image::Color(transformed)
        }
    };

    write_image_atomic(&corrected, out)
}

fn cmd_curve(input: &Path, grid: &str, out: Option<&Path>, quantized: bool) -> CliResult<()> {
    let image = pnm::read_image(input).map_err(input_err)?;
    let gray = match image {
        pnm::Image::Gray(g) => g,
        pnm::Image::Color(_) => {
            return Err(input_err("curve expects a grayscale image"));
        }
    };
    let grid = parse_grid(grid)?;
    let hist = Histogram256::from_levels(gray.levels());
    let points = bench::loss_curve(&hist, &grid).map_err(input_err)?;

    let mut csv = String::from("gamma,loss\n");
    for p in &points {
        let loss = if quantized { p.quantized } else { p.predicted };
        writeln!(csv, "{},{}", p.gamma, loss).expect("string write");
    }
    emit(csv, out)
}

fn cmd_sweep(corpus: &Path, grid: &str, out: Option<&Path>) -> CliResult<()> {
    let grid = parse_grid(grid)?;
    let report = bench::rmse_sweep(corpus, &grid).map_err(input_err)?;
    for (path, reason) in &report.skipped {
        eprintln!("agtme: skipped {}: {reason}", path.display());
    }

    let mut csv = String::from("gamma_b,image_id,gamma_r,method\n");
    for result in [&report.agtme, &report.cab] {
        for (image_index, id) in report.image_ids.iter().enumerate() {
            for (bias_index, &bias) in result.bias_gammas.iter().enumerate() {
                writeln!(
                    csv,
                    "{},{},{},{}",
                    bias,
                    id,
                    result.per_image_recognized[image_index][bias_index],
                    result.method
                )
                .expect("string write");
            }
        }
    }
    println!(
        "mean_rmse_agtme={} mean_rmse_cab={}",
        sig6(report.agtme.mean_rmse),
        sig6(report.cab.mean_rmse)
    );
    emit(csv, out)
}

fn cmd_time(sizes: &str, reps: u32, out: Option<&Path>) -> CliResult<()> {
    let sizes: Vec<u32> = sizes
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .map_err(|e| input_err(format!("bad size {s:?}: {e}")))
        })
        .collect::<CliResult<_>>()?;
    let rows = bench::timing_run(&sizes, reps);

    let mut csv = String::from("size,mean_ms\n");
    for row in &rows {
        println!("size={} mean_ms={}", row.size, sig6(row.mean_ms));
        writeln!(csv, "{},{}", row.size, row.mean_ms).expect("string write");
    }
    match out {
        Some(path) => emit(csv, Some(path)),
        None => Ok(()),
    }
}

fn cmd_signal(out: Option<&Path>) -> CliResult<()> {
    let report = bench::signal_experiment();
    for est in [&report.agtme, &report.cab] {
        println!(
            "method={} original_gamma={} distorted_gamma={} single={} pair={} reference_single={}",
            est.method,
            sig6(est.original_gamma),
            sig6(est.distorted_gamma),
            sig6(est.single),
            sig6(est.pair),
            sig6(est.reference_single),
        );
    }
    if let Some(path) = out {
        let mut csv = String::from("gamma,loss\n");
        for p in &report.loss_curve {
            writeln!(csv, "{},{}", p.gamma, p.predicted).expect("string write");
        }
        emit(csv, Some(path))?;
    }
    Ok(())
}

fn read_mask(path: Option<&Path>) -> CliResult<Option<MaskImage>> {
    path.map(|p| pnm::read_mask(p).map_err(input_err)).transpose()
}

fn estimate_gray(
    gray: &GrayImage,
    mask: Option<&MaskImage>,
) -> CliResult<(GammaEstimate, f64)> {
    let normalized = NormalizedImage::from_levels(gray);
    let estimate = match mask {
        Some(m) => estimate_gamma_masked(&normalized, m),
        None => estimate_gamma(&normalized),
    }
    .map_err(input_err)?;
    let entropy = shannon_entropy(&Histogram256::from_levels(gray.levels()));
    Ok((estimate, entropy))
}

/// The machine-readable estimate line:
/// `gamma=<v> gamma_visual=<v> entropy_bits=<v> gain_bits=<v>`.
fn estimate_line(estimate: &GammaEstimate, entropy_bits: f64) -> CliResult<String> {
    let visual = visual_gamma(estimate).map_err(input_err)?;
    Ok(format!(
        "gamma={} gamma_visual={} entropy_bits={} gain_bits={}",
        sig6(estimate.gamma),
        sig6(visual.gamma),
        sig6(entropy_bits),
        sig6(estimate.entropy_gain_bits),
    ))
}

/// Prints the raw-variant estimate lines for a color image, optionally
/// appending the exponent actually applied.
fn print_color_estimates(
    color: &ColorImage,
    strategy: ChannelStrategy,
    estimates: &CorrectionEstimates,
    applied: Option<&[f64]>,
) -> CliResult<()> {
    let with_applied = |mut line: String, value: Option<f64>| {
        if let Some(v) = value {
            write!(line, " applied={}", sig6(v)).expect("string write");
        }
        line
    };
    match estimates {
        CorrectionEstimates::Single(estimate) => {
            let plane = match strategy {
                ChannelStrategy::HsvVChannel => agtme::color::v_plane(color),
                ChannelStrategy::GrayCommonGamma => agtme::color::luma_image(color),
                _ => pooled_plane(color),
            };
            let entropy = shannon_entropy(&Histogram256::from_levels(plane.levels()));
            let line = estimate_line(estimate, entropy)?;
            println!("{}", with_applied(line, applied.map(|a| a[0])));
        }
        CorrectionEstimates::PerChannel(per_channel) => {
            for (index, estimate) in per_channel.iter().enumerate() {
                let entropy = shannon_entropy(&Histogram256::from_levels(color.channel(index)));
                let line = format!(
                    "channel={} {}",
                    ["r", "g", "b"][index],
                    estimate_line(estimate, entropy)?
                );
                println!("{}", with_applied(line, applied.map(|a| a[index])));
            }
        }
    }
    Ok(())
}

fn pooled_plane(color: &ColorImage) -> GrayImage {
    let mut samples = Vec::with_capacity(3 * color.len());
    for c in 0..3 {
        samples.extend_from_slice(color.channel(c));
    }
    GrayImage::new(3 * color.width(), color.height(), samples).expect("pooled buffer")
}

/// The exponent the correction actually applies: the estimate unless
/// overridden, divided by 2.2 when `--visual` is set.
fn applied_gamma(
    estimated: f64,
    gamma_override: Option<f64>,
    visual: bool,
) -> CliResult<f64> {
    let base = match gamma_override {
        Some(gamma) if gamma > 0.0 && gamma.is_finite() => gamma,
        Some(gamma) => {
            return Err(input_err(format!("gamma must be positive, got {gamma}")));
        }
        None => estimated,
    };
    Ok(if visual { base / agtme::VISUAL_DIVISOR } else { base })
}

fn write_image_atomic(image: &pnm::Image, out: &Path) -> CliResult<()> {
    let tmp = out.with_extension("tmp-agtme");
    let bytes = pnm::encode_image(image);
    std::fs::write(&tmp, bytes).map_err(|e| output_err(format!("{}: {e}", tmp.display())))?;
    if let Err(e) = std::fs::rename(&tmp, out) {
        let _ = std::fs::remove_file(&tmp);
        return Err(output_err(format!("{}: {e}", out.display())));
    }
    Ok(())
}

fn emit(csv: String, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| output_err(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

/// Parses `START:STOP:STEP` into an inclusive grid, snapping each point to
/// nine decimals so decimal steps land exactly on values like 1.0.
fn parse_grid(spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(input_err(format!("grid {spec:?} is not START:STOP:STEP")));
    }
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| input_err(format!("bad grid number {s:?}: {e}")))
    };
    let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
    if !(start > 0.0 && stop >= start && step > 0.0) {
        return Err(input_err(format!(
            "grid requires 0 < START <= STOP and STEP > 0, got {spec:?}"
        )));
    }
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let value = ((start + k as f64 * step) * 1e9).round() / 1e9;
        if value > stop + step * 1e-9 {
            break;
        }
        grid.push(value);
        k += 1;
    }
    Ok(grid)
}

/// Six significant digits, `%g` style.
fn sig6(x: f64) -> String {
    if !x.is_finite() || x == 0.0 {
        return format!("{x}");
    }
    let scientific = format!("{x:.5e}");
    let exponent: i32 = scientific
        .split('e')
        .nth(1)
        .expect("scientific notation has an exponent")
        .parse()
        .expect("exponent parses");
    if (-4..6).contains(&exponent) {
        let decimals = (5 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        scientific
    }
}
