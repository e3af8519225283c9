//! Rain-pixel detection: windowed brightness test followed by a cascade of
//! component filters and a final dilation.

mod color;
mod initial;
mod kmeans;
mod shape;

use std::fmt::Write as _;

pub use color::{uv_transform, UvColor};
pub use initial::detect_initial;
pub use kmeans::{kmeans_1d, KMeans1d};
pub use shape::{component_stats, direction_degrees, symmetric_eigen2, ComponentStats};

use crate::error::{Error, Result};
use crate::imaging::{
    dilate, label_components, BinaryMask, ComponentLabeling, Connectivity, RasterImage,
    StructuringElement,
};

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionConfig {
    /// Side of the square windows in the brightness test. Odd, at least 3.
    pub window_side: usize,
    pub kmeans_iters: usize,
    /// Largest accepted `|D|`, degrees (exclusive).
    pub direction_threshold: f64,
    /// Largest accepted u-v magnitude (inclusive).
    pub chroma_threshold: f64,
    /// Smallest accepted `lambda1 / lambda2`.
    pub aspect_threshold: f64,
    /// Proportionality constant `c` in `L = c lambda1`, `W = c lambda2`.
    pub scale: f64,
    pub element: StructuringElement,
    pub connectivity: Connectivity,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            window_side: 7,
            kmeans_iters: 100,
            direction_threshold: 10.0,
            chroma_threshold: 0.08,
            aspect_threshold: 2.0,
            scale: 1.0,
            element: StructuringElement::disk1(),
            connectivity: Connectivity::Eight,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.window_side < 3 || self.window_side % 2 == 0 {
            return bad(format!("window_side must be odd and >= 3, got {}", self.window_side));
        }
        if self.kmeans_iters == 0 {
            return bad("kmeans_iters must be >= 1".into());
        }
        if !(self.direction_threshold > 0.0 && self.direction_threshold <= 90.0) {
            return bad(format!("T1 must be in (0, 90], got {}", self.direction_threshold));
        }
        if !(self.chroma_threshold > 0.0) {
            return bad(format!("T2 must be > 0, got {}", self.chroma_threshold));
        }
        if !(self.aspect_threshold >= 1.0) {
            return bad(format!("mu must be >= 1, got {}", self.aspect_threshold));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return bad(format!("c must be > 0, got {}", self.scale));
        }
        Ok(())
    }
}

/// Drops the cluster of wider components found by 2-means on `W`.
///
/// `stats` is indexed by component id - 1. Nothing is removed when fewer than
/// two candidates remain or when all widths coincide.
pub fn filter_by_width(ids: &[usize], stats: &[ComponentStats], iters: usize) -> Vec<usize> {
    if ids.len() < 2 {
        return ids.to_vec();
    }
    let widths: Vec<f64> = ids.iter().map(|&id| stats[id - 1].width).collect();
    match kmeans_1d(&widths, 2, iters) {
        Ok(km) if !km.degenerate => ids
            .iter()
            .zip(&km.assignments)
            .filter(|(_, &a)| a == 0)
            .map(|(&id, _)| id)
            .collect(),
        _ => ids.to_vec(),
    }
}

/// Keeps components with `|D| < threshold` degrees.
pub fn filter_by_direction(ids: &[usize], stats: &[ComponentStats], threshold: f64) -> Vec<usize> {
    ids.iter()
        .copied()
        .filter(|&id| stats[id - 1].direction.abs() < threshold)
        .collect()
}

/// Mean RGB of a component over the original image.
pub fn mean_color(image: &RasterImage, pixels: &[(usize, usize)]) -> [f64; 3] {
    let mut sum = [0.0; 3];
    for &(r, c) in pixels {
        for (s, v) in sum.iter_mut().zip(image.pixel(r, c)) {
            *s += v;
        }
    }
    let n = pixels.len() as f64;
    sum.map(|s| s / n)
}

/// Keeps components whose mean color has u-v magnitude `<= threshold`.
pub fn filter_by_color(
    image: &RasterImage,
    labeling: &ComponentLabeling,
    ids: &[usize],
    threshold: f64,
) -> Vec<usize> {
    ids.iter()
        .copied()
        .filter(|&id| {
            uv_transform(mean_color(image, labeling.pixels(id)))
                .is_some_and(|uv| uv.magnitude <= threshold)
        })
        .collect()
}

/// Keeps components with `lambda1 / max(lambda2, 1e-9) >= threshold`.
/// Perfect lines pass, isolated pixels do not.
pub fn filter_by_aspect(ids: &[usize], stats: &[ComponentStats], threshold: f64) -> Vec<usize> {
    ids.iter()
        .copied()
        .filter(|&id| stats[id - 1].lambda1 > 0.0 && stats[id - 1].aspect_ratio() >= threshold)
        .collect()
}

/// The cascade stage that removed a component, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Width,
    Direction,
    Color,
    Aspect,
}

impl Stage {
    fn name(self) -> &'static str {
        match self {
            Stage::Width => "width",
            Stage::Direction => "direction",
            Stage::Color => "color",
            Stage::Aspect => "aspect",
        }
    }
}

/// Every intermediate product of [`detect_rain`].
#[derive(Debug, Clone)]
pub struct DetectionTrace {
    pub initial: BinaryMask,
    pub labeling: ComponentLabeling,
    pub stats: Vec<ComponentStats>,
    pub after_width: Vec<usize>,
    pub after_direction: Vec<usize>,
    pub after_color: Vec<usize>,
    pub after_aspect: Vec<usize>,
    /// Surviving components before dilation.
    pub refined: BinaryMask,
    /// Final `S_R`.
    pub rain_mask: BinaryMask,
}

impl DetectionTrace {
    /// Stage at which component `id` was dropped, or `None` if it survived.
    pub fn removed_at(&self, id: usize) -> Option<Stage> {
        if !self.after_width.contains(&id) {
            Some(Stage::Width)
        } else if !self.after_direction.contains(&id) {
            Some(Stage::Direction)
        } else if !self.after_color.contains(&id) {
            Some(Stage::Color)
        } else if !self.after_aspect.contains(&id) {
            Some(Stage::Aspect)
        } else {
            None
        }
    }

    /// Masks of the initial detection and each stage's survivors, in cascade order.
    pub fn stage_masks(&self) -> [BinaryMask; 5] {
        let l = &self.labeling;
        [
            self.initial.clone(),
            l.mask_of(self.after_width.iter().copied()),
            l.mask_of(self.after_direction.iter().copied()),
            l.mask_of(self.after_color.iter().copied()),
            l.mask_of(self.after_aspect.iter().copied()),
        ]
    }

    /// One line per component: id, N, lambda1, lambda2, D, W, and the stage
    /// that removed it (`kept` for survivors).
    pub fn report(&self) -> String {
        let mut out = String::from("# id N lambda1 lambda2 D W stage\n");
        for (i, s) in self.stats.iter().enumerate() {
            let id = i + 1;
            let stage = self.removed_at(id).map_or("kept", Stage::name);
            let _ = writeln!(
                out,
                "{id} {} {:.4} {:.4} {:.4} {:.4} {stage}",
                s.pixel_count, s.lambda1, s.lambda2, s.direction, s.width
            );
        }
        out
    }
}

/// Runs the full detection cascade and keeps every intermediate result.
pub fn detect_rain_traced(image: &RasterImage, config: &DetectionConfig) -> Result<DetectionTrace> {
    config.validate()?;
    let initial = detect_initial(image, config.window_side);
    let labeling = label_components(&initial, config.connectivity);
    let stats: Vec<ComponentStats> = labeling
        .pixel_lists()
        .iter()
        .map(|px| component_stats(px, config.scale))
        .collect();
    let all: Vec<usize> = (1..=labeling.component_count()).collect();

    let after_width = filter_by_width(&all, &stats, config.kmeans_iters);
    let after_direction = filter_by_direction(&after_width, &stats, config.direction_threshold);
    let after_color = filter_by_color(image, &labeling, &after_direction, config.chroma_threshold);
    let after_aspect = filter_by_aspect(&after_color, &stats, config.aspect_threshold);

    let refined = labeling.mask_of(after_aspect.iter().copied());
    let rain_mask = dilate(&refined, &config.element);
    log::debug!(
        "detection: {} candidates, {} components, survivors width={} direction={} color={} aspect={}",
        initial.count(),
        all.len(),
        after_width.len(),
        after_direction.len(),
        after_color.len(),
        after_aspect.len()
    );

    Ok(DetectionTrace {
        initial,
        labeling,
        stats,
        after_width,
        after_direction,
        after_color,
        after_aspect,
        refined,
        rain_mask,
    })
}

/// Final rain mask `S_R` for an image.
pub fn detect_rain(image: &RasterImage, config: &DetectionConfig) -> Result<BinaryMask> {
    detect_rain_traced(image, config).map(|t| t.rain_mask)
}
