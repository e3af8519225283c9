//! Runs the full pipeline on generated scenes with synthetic rain and prints
//! PSNR/SSIM before and after deraining.
//!
//! `cargo run --release --example synthetic_eval -- [count] [size]`

use std::time::Instant;

use derain::detection::{detect_rain_traced, DetectionConfig};
use derain::metrics::QualityReport;
use derain::separation::{separate_layers_traced, SeparationConfig};
use derain::synthesis::{clean_scene, synth_rain, RainSynthConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: u64 = args.next().map_or(3, |s| s.parse().expect("count"));
    let size: usize = args.next().map_or(256, |s| s.parse().expect("size"));

    for seed in 0..count {
        let clean = clean_scene(size, size, seed);
        let synth = RainSynthConfig {
            seed,
            ..Default::default()
        };
        let (rainy, truth) = synth_rain(&clean, &synth).unwrap();
        let rainy = rainy.quantized();

        let t = Instant::now();
        let trace = detect_rain_traced(&rainy, &DetectionConfig::default()).unwrap();
        let t_detect = t.elapsed();
        let sep = separate_layers_traced(&rainy, &trace.rain_mask, &SeparationConfig::default()).unwrap();
        let t_total = t.elapsed();

        let hits = truth.set_pixels().filter(|&(r, c)| trace.rain_mask.get(r, c)).count();
        let before = QualityReport::compute(&clean, &rainy).unwrap();
        let after = QualityReport::compute(&clean, &sep.layers.background.quantized()).unwrap();
        let iters: Vec<String> = sep.channels[0].solves.iter().map(|s| format!("{}:{:.0e}", s.refinements, s.relative_residual)).collect();
        println!(
            "seed {seed}: rainy {before} -> derained {after} | recall {:.3} mask {} px | detect {:.2}s total {:.2}s | solves {:?}",
            hits as f64 / truth.count().max(1) as f64,
            trace.rain_mask.count(),
            t_detect.as_secs_f64(),
            t_total.as_secs_f64(),
            iters,
        );
    }
}
