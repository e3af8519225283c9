//! Single-image rain streak removal.
//!
//! The pipeline has two halves:
//!
//! 1. [`detection`] finds rain pixels. A windowed brightness test over-detects
//!    candidates, then connected components are filtered by width (1-D
//!    k-means), direction and elongation (PCA of pixel coordinates) and
//!    chromaticity, and the survivors are dilated.
//! 2. [`separation`] splits the image into a rain layer and a background layer
//!    by minimizing an L1 penalty on derivative-filter responses of both layers
//!    with iteratively reweighted least squares.
//!
//! [`synthesis`] and [`metrics`] provide synthetic rain with ground truth and
//! PSNR/SSIM scoring, and [`cli`] wires everything into the `derain` binary.

pub mod cli;
pub mod detection;
pub mod error;
pub mod imaging;
pub mod metrics;
pub mod separation;
pub mod synthesis;

pub use detection::{detect_rain, DetectionConfig};
pub use error::{Error, Result};
pub use imaging::{BinaryMask, Connectivity, RasterImage, StructuringElement};
pub use metrics::{psnr, ssim, QualityReport};
pub use separation::{separate_layers, LayerPair, SeparationConfig};
pub use synthesis::{synth_rain, RainSynthConfig};
