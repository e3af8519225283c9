mod common;

use derain::detection::{detect_initial, detect_rain_traced, DetectionConfig};
use derain::synthesis::{clean_scene, synth_rain, RainSynthConfig};
use derain::RasterImage;

/// Flat gray with a few bright vertical streaks, a slanted one and a blob,
/// all at least `margin` pixels from the border, offset by `(dr, dc)`.
fn streak_scene(h: usize, w: usize, dr: usize, dc: usize) -> RasterImage {
    RasterImage::from_fn(h, w, |r, c| {
        let (r, c) = (r as i64 - dr as i64, c as i64 - dc as i64);
        let vertical = [(12, 14), (15, 30), (20, 41)]
            .iter()
            .any(|&(r0, col)| c == col && (r0..r0 + 14).contains(&r));
        let slanted = (30..45).contains(&r) && c == 20 + (r - 30) / 4;
        let blob = (40..44).contains(&r) && (40..44).contains(&c);
        if vertical || slanted {
            [0.8, 0.8, 0.8]
        } else if blob {
            [0.7, 0.6, 0.6]
        } else {
            [0.3, 0.3, 0.3]
        }
    })
    .unwrap()
}

fn rainy(seed: u64, size: usize) -> RasterImage {
    let clean = clean_scene(size, size, seed);
    let cfg = RainSynthConfig {
        seed,
        streak_count: 40,
        ..Default::default()
    };
    synth_rain(&clean, &cfg).unwrap().0.quantized()
}

#[test]
fn initial_detection_matches_brute_force() {
    for seed in 0..6 {
        let (img, codes) = common::random_rgb8(23, 19, seed);
        for side in [3, 5, 7] {
            assert_eq!(
                detect_initial(&img, side),
                common::brute_force_initial(&codes, 23, 19, side),
                "seed {seed} side {side}"
            );
        }
    }
}

#[test]
fn translation_moves_the_mask() {
    let cfg = DetectionConfig::default();
    let base = detect_rain_traced(&streak_scene(80, 80, 0, 0), &cfg).unwrap();
    assert!(!base.rain_mask.is_empty());
    let (dr, dc) = (6, 9);
    let moved = detect_rain_traced(&streak_scene(80, 80, dr, dc), &cfg).unwrap();
    assert_eq!(moved.rain_mask.count(), base.rain_mask.count());
    for (r, c) in base.rain_mask.set_pixels() {
        assert!(moved.rain_mask.get(r + dr, c + dc));
    }
}

#[test]
fn scale_does_not_change_the_mask() {
    for seed in 0..3 {
        let img = rainy(seed, 96);
        let reference = detect_rain_traced(&img, &DetectionConfig::default()).unwrap();
        for scale in [0.5, 2.0] {
            let cfg = DetectionConfig {
                scale,
                ..Default::default()
            };
            let t = detect_rain_traced(&img, &cfg).unwrap();
            assert_eq!(t.rain_mask, reference.rain_mask, "seed {seed} c={scale}");
            assert_eq!(t.after_width, reference.after_width);
        }
    }
}

#[test]
fn component_eigen_decomposition_is_consistent() {
    let img = rainy(4, 96);
    let t = detect_rain_traced(&img, &DetectionConfig::default()).unwrap();
    assert!(!t.stats.is_empty());
    for s in &t.stats {
        let c = s.covariance;
        for (lambda, e) in [(s.lambda1, s.e1), (s.lambda2, s.e2)] {
            let ce = [c[0][0] * e[0] + c[0][1] * e[1], c[1][0] * e[0] + c[1][1] * e[1]];
            assert!((ce[0] - lambda * e[0]).abs() < 1e-9 && (ce[1] - lambda * e[1]).abs() < 1e-9);
            assert!((e[0].hypot(e[1]) - 1.0).abs() < 1e-9);
        }
        assert!(s.lambda1 >= s.lambda2 && s.lambda2 >= -1e-12);
        assert!((s.e1[0] * s.e2[0] + s.e1[1] * s.e2[1]).abs() < 1e-9);
        assert!(s.e1[0] >= 0.0);
        assert!(s.direction > -90.0 - 1e-9 && s.direction <= 90.0);
    }
}

#[test]
fn cascade_is_monotone() {
    for seed in 0..4 {
        let img = rainy(seed, 96);
        let t = detect_rain_traced(&img, &DetectionConfig::default()).unwrap();
        let masks = t.stage_masks();
        for pair in masks.windows(2) {
            assert!(pair[1].is_subset_of(&pair[0]));
        }
        assert!(t.refined.is_subset_of(&t.rain_mask));
        assert_eq!(masks[4], t.refined);
    }
}

#[test]
fn constant_image_has_empty_mask() {
    let img = RasterImage::constant(40, 50, 0.5).unwrap();
    let t = detect_rain_traced(&img, &DetectionConfig::default()).unwrap();
    assert!(t.initial.is_empty() && t.rain_mask.is_empty());
    assert_eq!(t.labeling.component_count(), 0);
}
