//! Image and mask containers, connected-component labeling and dilation.

mod labeling;
mod mask;
mod morphology;
mod raster;

pub use labeling::{label_components, ComponentLabeling, Connectivity};
pub use mask::BinaryMask;
pub use morphology::{dilate, StructuringElement};
pub use raster::{RasterImage, CHANNELS};
