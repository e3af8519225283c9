//! The `derain` command-line front end.

mod config;

use std::io::Cursor;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use image::ImageFormat;

pub use config::RunConfig;

use crate::detection::detect_rain_traced;
use crate::error::Error;
use crate::imaging::RasterImage;
use crate::metrics::QualityReport;
use crate::separation::separate_layers;
use crate::synthesis::synth_rain;

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 1,
    Io = 2,
    Numerical = 3,
}

impl From<&Error> for ExitStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Io { .. } | Error::Codec { .. } => ExitStatus::Io,
            Error::Numerical(_) => ExitStatus::Numerical,
            _ => ExitStatus::Usage,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "derain", version, about = "Single-image rain streak detection and removal")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect rain pixels and write the rain mask.
    Detect {
        input: PathBuf,
        output_mask: PathBuf,
        /// Per-component report (id N lambda1 lambda2 D W stage).
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Detect rain and write the rain-removed image.
    Derain {
        input: PathBuf,
        output: PathBuf,
        /// Also write the rain layer.
        #[arg(long)]
        rain_layer: Option<PathBuf>,
        /// Also write the rain mask.
        #[arg(long)]
        mask: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Add synthetic rain to a clean image.
    Synth {
        clean: PathBuf,
        output_rainy: PathBuf,
        output_mask: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print PSNR and SSIM of a test image against a clean reference.
    Eval { clean: PathBuf, test: PathBuf },
}

/// Config file plus one flag per configuration field.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// `section.key=value` file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,

    #[arg(long)]
    pub window_side: Option<usize>,
    #[arg(long)]
    pub kmeans_iters: Option<usize>,
    /// Direction threshold, degrees.
    #[arg(long = "t1")]
    pub t1: Option<f64>,
    /// Chromaticity threshold.
    #[arg(long = "t2")]
    pub t2: Option<f64>,
    /// Aspect-ratio threshold.
    #[arg(long)]
    pub mu: Option<f64>,
    /// Length/width scale.
    #[arg(long = "c")]
    pub c: Option<f64>,
    /// 4 or 8.
    #[arg(long)]
    pub connectivity: Option<String>,
    /// disk1 or square1.
    #[arg(long)]
    pub element: Option<String>,

    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub irls_iters: Option<usize>,
    #[arg(long)]
    pub epsilon_irls: Option<f64>,
    #[arg(long)]
    pub solver_tol: Option<f64>,
    #[arg(long)]
    pub clamp_rain: Option<bool>,

    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub streak_count: Option<usize>,
    #[arg(long)]
    pub angle_mean: Option<f64>,
    #[arg(long)]
    pub angle_jitter: Option<f64>,
    #[arg(long)]
    pub length_min: Option<f64>,
    #[arg(long)]
    pub length_max: Option<f64>,
    #[arg(long)]
    pub thickness_min: Option<f64>,
    #[arg(long)]
    pub thickness_max: Option<f64>,
    #[arg(long)]
    pub intensity_min: Option<f64>,
    #[arg(long)]
    pub intensity_max: Option<f64>,
    #[arg(long)]
    pub blur_sigma: Option<f64>,
}

impl ConfigArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut push = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push((key.to_string(), v));
            }
        };
        let s = |v: &Option<f64>| v.map(|x| x.to_string());
        push("detection.window_side", self.window_side.map(|x| x.to_string()));
        push("detection.kmeans_iters", self.kmeans_iters.map(|x| x.to_string()));
        push("detection.T1", s(&self.t1));
        push("detection.T2", s(&self.t2));
        push("detection.mu", s(&self.mu));
        push("detection.c", s(&self.c));
        push("detection.connectivity", self.connectivity.clone());
        push("detection.element", self.element.clone());
        push("separation.lambda", s(&self.lambda));
        push("separation.eta", s(&self.eta));
        push("separation.irls_iters", self.irls_iters.map(|x| x.to_string()));
        push("separation.epsilon_irls", s(&self.epsilon_irls));
        push("separation.solver_tol", s(&self.solver_tol));
        push("separation.clamp_rain", self.clamp_rain.map(|x| x.to_string()));
        push("synth.seed", self.seed.map(|x| x.to_string()));
        push("synth.streak_count", self.streak_count.map(|x| x.to_string()));
        push("synth.angle_mean", s(&self.angle_mean));
        push("synth.angle_jitter", s(&self.angle_jitter));
        push("synth.length_min", s(&self.length_min));
        push("synth.length_max", s(&self.length_max));
        push("synth.thickness_min", s(&self.thickness_min));
        push("synth.thickness_max", s(&self.thickness_max));
        push("synth.intensity_min", s(&self.intensity_min));
        push("synth.intensity_max", s(&self.intensity_max));
        push("synth.blur_sigma", s(&self.blur_sigma));
        out
    }

    /// Built-in defaults, then `--config`, then flags.
    pub fn resolve(&self) -> Result<RunConfig, Error> {
        RunConfig::layered(self.config.as_deref(), &self.overrides())
    }
}

/// Files staged in memory and committed together, so a failed command
/// leaves no new output paths behind.
#[derive(Default)]
struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    fn png<I>(&mut self, path: &Path, img: &I) -> Result<(), Error>
    where
        I: PngEncode,
    {
        let mut bytes = Vec::new();
        img.encode_png(&mut Cursor::new(&mut bytes)).map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })?;
        self.files.push((path.to_path_buf(), bytes));
        Ok(())
    }

    fn text(&mut self, path: &Path, text: String) {
        self.files.push((path.to_path_buf(), text.into_bytes()));
    }

    fn commit(self) -> Result<(), Error> {
        let mut created: Vec<PathBuf> = Vec::new();
        for (path, bytes) in &self.files {
            let existed = path.exists();
            if let Err(source) = std::fs::write(path, bytes) {
                for p in &created {
                    let _ = std::fs::remove_file(p);
                }
                return Err(Error::Io {
                    path: path.clone(),
                    source,
                });
            }
            if !existed {
                created.push(path.clone());
            }
        }
        Ok(())
    }
}

/// PNG encoding for the two buffer types the CLI writes.
trait PngEncode {
    fn encode_png(&self, out: &mut Cursor<&mut Vec<u8>>) -> image::ImageResult<()>;
}

impl PngEncode for image::RgbImage {
    fn encode_png(&self, out: &mut Cursor<&mut Vec<u8>>) -> image::ImageResult<()> {
        self.write_to(out, ImageFormat::Png)
    }
}

impl PngEncode for image::GrayImage {
    fn encode_png(&self, out: &mut Cursor<&mut Vec<u8>>) -> image::ImageResult<()> {
        self.write_to(out, ImageFormat::Png)
    }
}

pub fn cmd_detect(input: &Path, output_mask: &Path, report: Option<&Path>, config: &RunConfig) -> Result<(), Error> {
    let image = RasterImage::load_png(input)?;
    let trace = detect_rain_traced(&image, &config.detection)?;
    let mut out = Outputs::default();
    out.png(output_mask, &trace.rain_mask.to_gray8())?;
    if let Some(path) = report {
        out.text(path, trace.report());
    }
    out.commit()
}

pub fn cmd_derain(
    input: &Path,
    output: &Path,
    rain_layer: Option<&Path>,
    mask: Option<&Path>,
    config: &RunConfig,
) -> Result<(), Error> {
    let image = RasterImage::load_png(input)?;
    let trace = detect_rain_traced(&image, &config.detection)?;
    let layers = separate_layers(&image, &trace.rain_mask, &config.separation)?;
    let mut out = Outputs::default();
    out.png(output, &layers.background.to_rgb8())?;
    if let Some(path) = rain_layer {
        out.png(path, &layers.rain.to_rgb8())?;
    }
    if let Some(path) = mask {
        out.png(path, &trace.rain_mask.to_gray8())?;
    }
    out.commit()
}

pub fn cmd_synth(clean: &Path, output_rainy: &Path, output_mask: &Path, config: &RunConfig) -> Result<(), Error> {
    let image = RasterImage::load_png(clean)?;
    let (rainy, truth) = synth_rain(&image, &config.synth)?;
    let mut out = Outputs::default();
    out.png(output_rainy, &rainy.to_rgb8())?;
    out.png(output_mask, &truth.to_gray8())?;
    out.commit()
}

/// Returns the report line printed by `derain eval`.
pub fn cmd_eval(clean: &Path, test: &Path) -> Result<String, Error> {
    let a = RasterImage::load_png(clean)?;
    let b = RasterImage::load_png(test)?;
    Ok(QualityReport::compute(&a, &b)?.to_string())
}

/// Runs a parsed command, printing errors to stderr. Returns the exit status.
pub fn run(cli: Cli) -> ExitStatus {
    let start = Instant::now();
    let (name, result) = match &cli.command {
        Command::Detect {
            input,
            output_mask,
            report,
            config,
        } => (
            "detect",
            config
                .resolve()
                .and_then(|cfg| cmd_detect(input, output_mask, report.as_deref(), &cfg)),
        ),
        Command::Derain {
            input,
            output,
            rain_layer,
            mask,
            config,
        } => (
            "derain",
            config
                .resolve()
                .and_then(|cfg| cmd_derain(input, output, rain_layer.as_deref(), mask.as_deref(), &cfg)),
        ),
        Command::Synth {
            clean,
            output_rainy,
            output_mask,
            config,
        } => (
            "synth",
            config
                .resolve()
                .and_then(|cfg| cmd_synth(clean, output_rainy, output_mask, &cfg)),
        ),
        Command::Eval { clean, test } => (
            "eval",
            cmd_eval(clean, test).map(|line| println!("{line}")),
        ),
    };
    match result {
        Ok(()) => {
            if name != "eval" {
                eprintln!("{name}: {:.2}s", start.elapsed().as_secs_f64());
            }
            ExitStatus::Success
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitStatus::from(&e)
        }
    }
}

/// Entry point used by the binary: parses `args` and runs the command.
pub fn main_with_args<I, T>(args: I) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                ExitStatus::Usage
            } else {
                ExitStatus::Success
            }
        }
    }
}
