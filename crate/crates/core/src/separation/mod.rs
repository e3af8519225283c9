//! Rain/background layer separation.
//!
//! Per channel, the rain layer `I_R` minimizes an L1 penalty on derivative
//! responses of both `I_R` and `I - I_R`, plus gradient agreement with the
//! input inside the rain mask, zero gradients and zero values outside it.
//! The background is `I_NR = I - I_R`.

mod filters;
mod irls;
mod system;

pub use filters::{build_filter_bank, FilterBank, Kernel};
pub use irls::{irls_solve, irls_weight, IrlsOutcome, SolveStats};
pub use system::{assemble_system, CsrMatrix, RowTerm, SparseL1System};

use crate::error::{check_dims, Error, Result};
use crate::imaging::{BinaryMask, RasterImage, CHANNELS};

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationConfig {
    /// Weight of the gradient-agreement terms.
    pub lambda: f64,
    /// Weight of the zero-value rows on non-rain pixels.
    pub eta: f64,
    pub irls_iters: usize,
    /// Residual floor before reweighting.
    pub epsilon_irls: f64,
    /// Relative residual target of each inner least-squares solve.
    pub solver_tol: f64,
    /// Restrict the rain layer to `[0, I]`.
    pub clamp_rain: bool,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        Self {
            lambda: 0.25,
            eta: 0.1,
            irls_iters: 3,
            epsilon_irls: 1e-6,
            solver_tol: 1e-8,
            clamp_rain: true,
        }
    }
}

impl SeparationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.lambda > 0.0) {
            return bad(format!("lambda must be > 0, got {}", self.lambda));
        }
        if !(self.eta > 0.0) {
            return bad(format!("eta must be > 0, got {}", self.eta));
        }
        if self.irls_iters == 0 {
            return bad("irls_iters must be >= 1".into());
        }
        if !(self.epsilon_irls > 0.0) {
            return bad(format!("epsilon_irls must be > 0, got {}", self.epsilon_irls));
        }
        if !(self.solver_tol > 0.0) {
            return bad(format!("solver_tol must be > 0, got {}", self.solver_tol));
        }
        Ok(())
    }
}

/// Rain and background layers. `rain + background` reproduces the input
/// exactly. Without clamping the layers may leave `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPair {
    pub rain: RasterImage,
    pub background: RasterImage,
}

/// Splits `total - rain` so that the two parts add back to `total` exactly.
///
/// The rain part is re-derived from the rounded background. By the Sterbenz
/// lemma one of the two subtractions is exact whenever
/// `-total <= rain <= 2 total`, which covers every clamped rain value.
fn exact_split(total: f64, rain: f64) -> (f64, f64) {
    let background = total - rain;
    (total - background, background)
}

/// Layers plus per-channel solver diagnostics.
#[derive(Debug, Clone)]
pub struct SeparationOutcome {
    pub layers: LayerPair,
    pub channels: Vec<IrlsOutcome>,
}

/// Separates rain from background given the rain mask `S_R`.
pub fn separate_layers(image: &RasterImage, rain_mask: &BinaryMask, config: &SeparationConfig) -> Result<LayerPair> {
    separate_layers_traced(image, rain_mask, config).map(|o| o.layers)
}

/// [`separate_layers`] that also returns each channel's IRLS history.
pub fn separate_layers_traced(
    image: &RasterImage,
    rain_mask: &BinaryMask,
    config: &SeparationConfig,
) -> Result<SeparationOutcome> {
    config.validate()?;
    check_dims(image.dims(), rain_mask.dims())?;
    let (h, w) = image.dims();
    let plane = h * w;
    let bank = build_filter_bank();

    let mut rain = vec![0.0; CHANNELS * plane];
    let mut background = vec![0.0; CHANNELS * plane];
    let mut channels = Vec::with_capacity(CHANNELS);
    for ch in 0..CHANNELS {
        let input = image.channel(ch);
        let outcome = if rain_mask.is_empty() && input.iter().all(|&x| x == input[0]) {
            // Every target is zero; skip the solve.
            IrlsOutcome {
                v: vec![0.0; plane],
                objectives: vec![0.0; config.irls_iters + 1],
                solves: Vec::new(),
            }
        } else {
            let system = assemble_system(input, h, w, rain_mask, &bank, config)?;
            irls_solve(&system, config)?
        };
        for (i, (&total, &r)) in input.iter().zip(&outcome.v).enumerate() {
            let r = if config.clamp_rain { r.clamp(0.0, total) } else { r };
            let (r, bg) = exact_split(total, r);
            rain[ch * plane + i] = r;
            background[ch * plane + i] = bg;
        }
        channels.push(outcome);
    }

    Ok(SeparationOutcome {
        layers: LayerPair {
            rain: RasterImage::from_planar_unchecked(h, w, rain),
            background: RasterImage::from_planar_unchecked(h, w, background),
        },
        channels,
    })
}
