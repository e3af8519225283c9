use crate::imaging::{BinaryMask, RasterImage, CHANNELS};

/// Fixed-point scale for the windowed comparison. Samples loaded from 8-bit
/// files land exactly on multiples of `2^24`, so window sums are exact and
/// ties between a pixel and a window mean are resolved without rounding noise.
const FIXED_SCALE: f64 = 255.0 * 16_777_216.0;

fn to_fixed(v: f64) -> i64 {
    (v * FIXED_SCALE).round() as i64
}

/// Summed-area table with a zero guard row and column.
struct IntegralImage {
    width: usize,
    sums: Vec<i64>,
}

impl IntegralImage {
    fn new(samples: &[f64], height: usize, width: usize) -> Self {
        let stride = width + 1;
        let mut sums = vec![0i64; (height + 1) * stride];
        for r in 0..height {
            let mut row_sum = 0i64;
            for c in 0..width {
                row_sum += to_fixed(samples[r * width + c]);
                sums[(r + 1) * stride + c + 1] = sums[r * stride + c + 1] + row_sum;
            }
        }
        Self { width, sums }
    }

    /// Sum over rows `r0..=r1`, cols `c0..=c1` (inclusive, already clipped).
    fn rect(&self, r0: usize, c0: usize, r1: usize, c1: usize) -> i64 {
        let stride = self.width + 1;
        self.sums[(r1 + 1) * stride + c1 + 1] - self.sums[r0 * stride + c1 + 1]
            - self.sums[(r1 + 1) * stride + c0]
            + self.sums[r0 * stride + c0]
    }
}

/// Inclusive, clipped row/col ranges of the five windows anchored at a pixel:
/// centered, then with the pixel at the top-left, top-right, bottom-left and
/// bottom-right corner.
pub(crate) fn window_ranges(
    row: usize,
    col: usize,
    side: usize,
    height: usize,
    width: usize,
) -> [(usize, usize, usize, usize); 5] {
    let span = side - 1;
    let half = span / 2;
    let lo = |x: usize, d: usize| x.saturating_sub(d);
    let hi = |x: usize, d: usize, n: usize| (x + d).min(n - 1);
    let (r, c) = (row, col);
    [
        (lo(r, half), lo(c, half), hi(r, half, height), hi(c, half, width)),
        (r, c, hi(r, span, height), hi(c, span, width)),
        (r, lo(c, span), hi(r, span, height), c),
        (lo(r, span), c, r, hi(c, span, width)),
        (lo(r, span), lo(c, span), r, c),
    ]
}

/// Initial over-detection: a pixel is a rain candidate when, in every color
/// channel, it is strictly brighter than the mean of each of its five
/// windows. Windows are clipped at the border and averaged over the pixels
/// they actually cover (the candidate included).
pub fn detect_initial(image: &RasterImage, window_side: usize) -> BinaryMask {
    let (h, w) = image.dims();
    let tables: Vec<IntegralImage> = (0..CHANNELS)
        .map(|ch| IntegralImage::new(image.channel(ch), h, w))
        .collect();
    let fixed: Vec<Vec<i64>> = (0..CHANNELS)
        .map(|ch| image.channel(ch).iter().map(|&v| to_fixed(v)).collect())
        .collect();

    BinaryMask::from_fn(h, w, |r, c| {
        let windows = window_ranges(r, c, window_side, h, w);
        (0..CHANNELS).all(|ch| {
            let centre = fixed[ch][r * w + c];
            windows.iter().all(|&(r0, c0, r1, c1)| {
                let count = ((r1 - r0 + 1) * (c1 - c0 + 1)) as i64;
                centre * count > tables[ch].rect(r0, c0, r1, c1)
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_image_has_no_candidates() {
        let img = RasterImage::constant(12, 9, 0.4).unwrap();
        assert!(detect_initial(&img, 7).is_empty());
    }

    #[test]
    fn single_bright_pixel() {
        let img = RasterImage::from_fn(15, 15, |r, c| {
            if (r, c) == (7, 7) {
                [0.9; 3]
            } else {
                [0.2; 3]
            }
        })
        .unwrap();
        let m = detect_initial(&img, 7);
        assert_eq!(m, BinaryMask::from_pixels(15, 15, &[(7, 7)]));
    }

    #[test]
    fn red_only_pixel_is_rejected() {
        let img = RasterImage::from_fn(15, 15, |r, c| {
            if (r, c) == (7, 7) {
                [0.9, 0.2, 0.2]
            } else {
                [0.2; 3]
            }
        })
        .unwrap();
        assert!(detect_initial(&img, 7).is_empty());
    }

    #[test]
    fn window_ranges_are_clipped() {
        let ws = window_ranges(0, 0, 7, 10, 10);
        assert_eq!(ws[0], (0, 0, 3, 3));
        assert_eq!(ws[1], (0, 0, 6, 6));
        assert_eq!(ws[4], (0, 0, 0, 0));
        let ws = window_ranges(5, 5, 7, 10, 10);
        assert_eq!(ws[0], (2, 2, 8, 8));
        assert_eq!(ws[2], (5, 0, 9, 5));
        assert_eq!(ws[3], (0, 5, 5, 9));
    }
}
