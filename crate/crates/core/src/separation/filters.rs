/// A derivative kernel as taps `(dr, dc, coefficient)` relative to its anchor.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub name: &'static str,
    pub taps: Vec<(isize, isize, f64)>,
}

impl Kernel {
    /// Anchor positions `(row, col)` at which every tap lies inside an
    /// `height x width` image, in raster order.
    pub fn placements(&self, height: usize, width: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (r_lo, r_hi) = span(self.taps.iter().map(|t| t.0));
        let (c_lo, c_hi) = span(self.taps.iter().map(|t| t.1));
        let rows = (-r_lo) as usize..(height as isize - r_hi).max(0) as usize;
        let cols = (-c_lo) as usize..(width as isize - c_hi).max(0) as usize;
        rows.flat_map(move |r| cols.clone().map(move |c| (r, c)))
    }

    /// Pixel indices (row-major) and coefficients of the kernel anchored at `(row, col)`.
    pub fn support(&self, row: usize, col: usize, width: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.taps.iter().map(move |&(dr, dc, k)| {
            let r = (row as isize + dr) as usize;
            let c = (col as isize + dc) as usize;
            (r * width + c, k)
        })
    }

    /// Response of the kernel at `(row, col)` on a row-major plane.
    pub fn respond(&self, plane: &[f64], row: usize, col: usize, width: usize) -> f64 {
        self.support(row, col, width).map(|(i, k)| k * plane[i]).sum()
    }

    /// All valid responses in placement order.
    pub fn apply(&self, plane: &[f64], height: usize, width: usize) -> Vec<f64> {
        self.placements(height, width)
            .map(|(r, c)| self.respond(plane, r, c, width))
            .collect()
    }
}

fn span(it: impl Iterator<Item = isize>) -> (isize, isize) {
    it.fold((0, 0), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Horizontal and vertical first and second differences.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterBank {
    pub kernels: Vec<Kernel>,
}

/// First differences `(-1, +1)` anchored at the left/top tap; second
/// differences `(+1, -2, +1)` anchored at the middle tap.
pub fn build_filter_bank() -> FilterBank {
    FilterBank {
        kernels: vec![
            Kernel {
                name: "dx",
                taps: vec![(0, 0, -1.0), (0, 1, 1.0)],
            },
            Kernel {
                name: "dy",
                taps: vec![(0, 0, -1.0), (1, 0, 1.0)],
            },
            Kernel {
                name: "dxx",
                taps: vec![(0, -1, 1.0), (0, 0, -2.0), (0, 1, 1.0)],
            },
            Kernel {
                name: "dyy",
                taps: vec![(-1, 0, 1.0), (0, 0, -2.0), (1, 0, 1.0)],
            },
        ],
    }
}

impl FilterBank {
    /// Total number of valid responses on an `height x width` image.
    pub fn response_count(&self, height: usize, width: usize) -> usize {
        self.kernels.iter().map(|k| k.placements(height, width).count()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernels_sum_to_zero() {
        for k in build_filter_bank().kernels {
            assert_eq!(k.taps.iter().map(|t| t.2).sum::<f64>(), 0.0, "{}", k.name);
        }
    }

    #[test]
    fn constant_and_ramp_responses() {
        let bank = build_filter_bank();
        let (h, w) = (5, 6);
        let constant = vec![0.7; h * w];
        for k in &bank.kernels {
            assert!(k.apply(&constant, h, w).iter().all(|&x| x == 0.0));
        }
        let ramp: Vec<f64> = (0..h * w).map(|i| (i % w) as f64 * 0.125).collect();
        assert!(bank.kernels[2].apply(&ramp, h, w).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn first_difference_of_square() {
        let (h, w) = (2, 6);
        let sq: Vec<f64> = (0..h * w).map(|i| ((i % w) as f64).powi(2)).collect();
        let dx = &build_filter_bank().kernels[0];
        let resp = dx.apply(&sq, h, w);
        assert_eq!(resp.len(), h * (w - 1));
        for (n, &x) in resp.iter().enumerate() {
            let j = (n % (w - 1)) as f64;
            assert_eq!(x, 2.0 * j + 1.0);
        }
    }

    #[test]
    fn response_counts() {
        let bank = build_filter_bank();
        assert_eq!(bank.response_count(3, 3), 18);
        assert_eq!(bank.response_count(1, 2), 1);
        assert_eq!(bank.response_count(1, 1), 0);
    }
}
