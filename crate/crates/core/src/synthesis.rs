//! Synthetic rain with ground truth.
//!
//! Streaks are anti-aliased line segments accumulated into a neutral
//! brightness field, softened with a Gaussian blur and added to a clean image.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::imaging::{dilate, BinaryMask, RasterImage, StructuringElement, CHANNELS};

/// Streak-field level above which a pixel counts as rain in the ground truth.
pub const TRUTH_THRESHOLD: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub struct RainSynthConfig {
    pub seed: u64,
    pub streak_count: usize,
    /// Mean streak angle from the row axis, degrees (0 = vertical).
    pub angle_mean: f64,
    /// Half-width of the uniform angle jitter, degrees.
    pub angle_jitter: f64,
    /// Streak length range, pixels.
    pub length_range: (f64, f64),
    /// Streak thickness range, pixels.
    pub thickness_range: (f64, f64),
    /// Additive brightness range.
    pub intensity_range: (f64, f64),
    /// Gaussian blur sigma, pixels. Zero disables the blur.
    pub blur_sigma: f64,
}

impl Default for RainSynthConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            streak_count: 120,
            angle_mean: 0.0,
            angle_jitter: 4.0,
            length_range: (15.0, 40.0),
            thickness_range: (1.0, 2.0),
            intensity_range: (0.15, 0.45),
            blur_sigma: 0.5,
        }
    }
}

impl RainSynthConfig {
    pub fn validate(&self) -> Result<()> {
        let range_ok = |(lo, hi): (f64, f64)| lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi;
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !range_ok(self.length_range) {
            return bad("length range must satisfy 0 <= min <= max");
        }
        if !range_ok(self.thickness_range) {
            return bad("thickness range must satisfy 0 <= min <= max");
        }
        if !range_ok(self.intensity_range) || self.intensity_range.1 > 1.0 {
            return bad("intensity range must satisfy 0 <= min <= max <= 1");
        }
        if !(self.angle_jitter >= 0.0) || !self.angle_mean.is_finite() {
            return bad("angle jitter must be >= 0 and angle mean finite");
        }
        if !(self.blur_sigma >= 0.0) {
            return bad("blur sigma must be >= 0");
        }
        Ok(())
    }
}

fn sample(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

/// Distance from point `p` to the segment `a-b`, all in `(row, col)`.
fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = if len2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Accumulates one streak into `field` with coverage
/// `clamp(thickness / 2 + 0.5 - distance, 0, 1)`.
fn draw_streak(field: &mut [f64], h: usize, w: usize, a: [f64; 2], b: [f64; 2], thickness: f64, intensity: f64) {
    let reach = thickness / 2.0 + 0.5;
    let r0 = (a[0].min(b[0]) - reach).floor().max(0.0) as usize;
    let r1 = (a[0].max(b[0]) + reach).ceil().min(h as f64 - 1.0);
    let c0 = (a[1].min(b[1]) - reach).floor().max(0.0) as usize;
    let c1 = (a[1].max(b[1]) + reach).ceil().min(w as f64 - 1.0);
    if r1 < 0.0 || c1 < 0.0 {
        return;
    }
    for r in r0..=r1 as usize {
        for c in c0..=c1 as usize {
            let cover = (reach - segment_distance([r as f64, c as f64], a, b)).clamp(0.0, 1.0);
            field[r * w + c] += intensity * cover;
        }
    }
}

/// Separable Gaussian blur with edge clamping.
pub(crate) fn gaussian_blur(plane: &[f64], h: usize, w: usize, sigma: f64) -> Vec<f64> {
    if sigma <= 0.0 {
        return plane.to_vec();
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let kernel: Vec<f64> = (-radius..=radius)
        .map(|i| (-(i * i) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    let kernel: Vec<f64> = kernel.into_iter().map(|k| k / norm).collect();
    let clamp = |x: isize, n: usize| x.clamp(0, n as isize - 1) as usize;

    let mut tmp = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            tmp[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(t, k)| k * plane[r * w + clamp(c as isize + t as isize - radius, w)])
                .sum();
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            out[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(t, k)| k * tmp[clamp(r as isize + t as isize - radius, h) * w + c])
                .sum();
        }
    }
    out
}

/// Streak brightness field and its ground-truth mask.
///
/// The field is zeroed outside the disk-1 dilation of the mask, so faint
/// blur tails never reach pixels the ground truth does not account for.
pub fn streak_field(height: usize, width: usize, config: &RainSynthConfig) -> Result<(Vec<f64>, BinaryMask)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut field = vec![0.0; height * width];
    for _ in 0..config.streak_count {
        let centre = [rng.gen_range(0.0..height as f64), rng.gen_range(0.0..width as f64)];
        let jitter = if config.angle_jitter > 0.0 {
            rng.gen_range(-config.angle_jitter..=config.angle_jitter)
        } else {
            0.0
        };
        let angle = (config.angle_mean + jitter).to_radians();
        let length = sample(&mut rng, config.length_range);
        let thickness = sample(&mut rng, config.thickness_range);
        let intensity = sample(&mut rng, config.intensity_range);
        let half = [0.5 * length * angle.cos(), 0.5 * length * angle.sin()];
        let a = [centre[0] - half[0], centre[1] - half[1]];
        let b = [centre[0] + half[0], centre[1] + half[1]];
        draw_streak(&mut field, height, width, a, b, thickness, intensity);
    }
    let mut field = gaussian_blur(&field, height, width, config.blur_sigma);
    let truth = BinaryMask::from_fn(height, width, |r, c| field[r * width + c] > TRUTH_THRESHOLD);
    let support = dilate(&truth, &StructuringElement::disk1());
    for (s, &keep) in field.iter_mut().zip(support.bits()) {
        if !keep {
            *s = 0.0;
        }
    }
    Ok((field, truth))
}

/// Adds neutral synthetic rain to `clean`: `rainy = min(clean + S, 1)` in
/// every channel. Returns the rainy image and the mask `S > 0.02`.
pub fn synth_rain(clean: &RasterImage, config: &RainSynthConfig) -> Result<(RasterImage, BinaryMask)> {
    let (h, w) = clean.dims();
    let (field, truth) = streak_field(h, w, config)?;
    let plane = h * w;
    let data: Vec<f64> = clean
        .as_planar()
        .iter()
        .enumerate()
        .map(|(i, &x)| (x + field[i % plane]).min(1.0))
        .collect();
    Ok((RasterImage::from_planar(h, w, data)?, truth))
}

/// Chroma budget of [`clean_scene`]: the gradient and each blob are tinted by
/// at most half of this per channel.
pub const SCENE_CHROMA: f64 = 0.025;

/// A smooth, lightly textured, low-saturation scene for evaluation runs: a
/// luminance gradient, a few soft-edged blobs and low-amplitude sinusoidal
/// texture with slight tints (see [`SCENE_CHROMA`]).
/// Intensities stay within `[0.05, 0.8]`, leaving headroom for rain.
pub fn clean_scene(height: usize, width: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c1ea_5ce0_e000);
    let tint = |rng: &mut ChaCha8Rng, level: f64| -> [f64; CHANNELS] {
        std::array::from_fn(|_| level + rng.gen_range(-0.5 * SCENE_CHROMA..0.5 * SCENE_CHROMA))
    };
    let base = [tint(&mut rng, 0.0), tint(&mut rng, 0.0)];
    let levels = [rng.gen_range(0.15..0.55), rng.gen_range(0.15..0.55)];
    let tilt = rng.gen_range(0.0..std::f64::consts::TAU);
    let blob_count = rng.gen_range(3..7);
    let blobs: Vec<([f64; 2], [f64; 2], [f64; 3])> = (0..blob_count)
        .map(|_| {
            let centre = [rng.gen_range(0.0..height as f64), rng.gen_range(0.0..width as f64)];
            let radii = [rng.gen_range(10.0..50.0), rng.gen_range(10.0..50.0)];
            let level = rng.gen_range(-0.2..0.2);
            (centre, radii, tint(&mut rng, level))
        })
        .collect();
    let waves: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            (
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(12.0..48.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
                rng.gen_range(0.01..0.03),
            )
        })
        .collect();
    let diag = (height as f64).hypot(width as f64);

    RasterImage::from_fn(height, width, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let t = ((y * tilt.cos() + x * tilt.sin()) / diag).clamp(-1.0, 1.0) * 0.5 + 0.5;
        let mut px: [f64; CHANNELS] = std::array::from_fn(|ch| {
            let level = levels[0] * (1.0 - t) + levels[1] * t;
            level + base[0][ch] * (1.0 - t) + base[1][ch] * t
        });
        for (centre, radii, color) in &blobs {
            let d2 = ((y - centre[0]) / radii[0]).powi(2) + ((x - centre[1]) / radii[1]).powi(2);
            let weight = 1.0 / (1.0 + (4.0 * (d2 - 1.0)).exp());
            for ch in 0..CHANNELS {
                px[ch] += weight * color[ch];
            }
        }
        let texture: f64 = waves
            .iter()
            .map(|&(dir, period, phase, amp)| {
                amp * ((y * dir.cos() + x * dir.sin()) * std::f64::consts::TAU / period + phase).sin()
            })
            .sum();
        px.map(|v| (v + texture).clamp(0.05, 0.8))
    })
    .expect("scene intensities are clamped into range")
    .quantized()
}
