//! Flat `section.key=value` configuration with layered overrides.

use std::path::Path;

use crate::detection::DetectionConfig;
use crate::error::{Error, Result};
use crate::imaging::{Connectivity, StructuringElement};
use crate::separation::SeparationConfig;
use crate::synthesis::RainSynthConfig;

/// Every tunable of a run. Defaults reproduce the reference parameters.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunConfig {
    pub detection: DetectionConfig,
    pub separation: SeparationConfig,
    pub synth: RainSynthConfig,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("{key}: cannot parse {value:?}")))
}

impl RunConfig {
    /// Sets one field from its dotted key. Threshold keys accept both the
    /// symbolic names (`detection.T1`) and descriptive ones
    /// (`detection.direction_threshold`).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let d = &mut self.detection;
        let s = &mut self.separation;
        let y = &mut self.synth;
        match key {
            "detection.window_side" => d.window_side = parse(key, value)?,
            "detection.kmeans_iters" => d.kmeans_iters = parse(key, value)?,
            "detection.T1" | "detection.direction_threshold" => d.direction_threshold = parse(key, value)?,
            "detection.T2" | "detection.chroma_threshold" => d.chroma_threshold = parse(key, value)?,
            "detection.mu" | "detection.aspect_threshold" => d.aspect_threshold = parse(key, value)?,
            "detection.c" | "detection.scale" => d.scale = parse(key, value)?,
            "detection.connectivity" => {
                d.connectivity = match value.trim() {
                    "4" => Connectivity::Four,
                    "8" => Connectivity::Eight,
                    other => return Err(Error::InvalidConfig(format!("{key}: expected 4 or 8, got {other:?}"))),
                }
            }
            "detection.element" => {
                d.element = match value.trim() {
                    "disk1" => StructuringElement::disk1(),
                    "square1" => StructuringElement::square(1),
                    other => {
                        return Err(Error::InvalidConfig(format!(
                            "{key}: expected disk1 or square1, got {other:?}"
                        )))
                    }
                }
            }
            "separation.lambda" => s.lambda = parse(key, value)?,
            "separation.eta" => s.eta = parse(key, value)?,
            "separation.irls_iters" => s.irls_iters = parse(key, value)?,
            "separation.epsilon_irls" => s.epsilon_irls = parse(key, value)?,
            "separation.solver_tol" => s.solver_tol = parse(key, value)?,
            "separation.clamp_rain" => s.clamp_rain = parse(key, value)?,
            "synth.seed" => y.seed = parse(key, value)?,
            "synth.streak_count" => y.streak_count = parse(key, value)?,
            "synth.angle_mean" => y.angle_mean = parse(key, value)?,
            "synth.angle_jitter" => y.angle_jitter = parse(key, value)?,
            "synth.length_min" => y.length_range.0 = parse(key, value)?,
            "synth.length_max" => y.length_range.1 = parse(key, value)?,
            "synth.thickness_min" => y.thickness_range.0 = parse(key, value)?,
            "synth.thickness_max" => y.thickness_range.1 = parse(key, value)?,
            "synth.intensity_min" => y.intensity_range.0 = parse(key, value)?,
            "synth.intensity_max" => y.intensity_range.1 = parse(key, value)?,
            "synth.blur_sigma" => y.blur_sigma = parse(key, value)?,
            _ => return Err(Error::InvalidConfig(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("line {}: expected key=value", n + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.apply_text(&text)
    }

    /// Defaults, then the optional config file, then explicit overrides.
    pub fn layered(file: Option<&Path>, overrides: &[(String, String)]) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        for (k, v) in overrides {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.detection.validate()?;
        self.separation.validate()?;
        self.synth.validate()
    }
}
