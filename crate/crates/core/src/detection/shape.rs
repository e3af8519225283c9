//! PCA shape description of a connected component.

/// Second-order shape summary of a component's pixel coordinates.
///
/// Coordinates are `(row, col)`, so the first component of every vector
/// runs down the image. A vertical streak has `e1 = (±1, 0)` and direction 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentStats {
    pub pixel_count: usize,
    pub mean: [f64; 2],
    /// Symmetric covariance `[[rr, rc], [rc, cc]]`, population form.
    pub covariance: [[f64; 2]; 2],
    pub lambda1: f64,
    pub lambda2: f64,
    pub e1: [f64; 2],
    pub e2: [f64; 2],
    /// `c * lambda1`.
    pub length: f64,
    /// `c * lambda2`.
    pub width: f64,
    /// Angle of `e1` from the row axis, degrees in `(-90, 90]`.
    pub direction: f64,
}

impl ComponentStats {
    /// `lambda1 / max(lambda2, eps)`; zero for a single pixel.
    pub fn aspect_ratio(&self) -> f64 {
        self.lambda1 / self.lambda2.max(ASPECT_EPS)
    }
}

pub(crate) const ASPECT_EPS: f64 = 1e-9;

/// Eigen-decomposition of a symmetric 2x2 matrix, largest eigenvalue first.
/// Eigenvectors are unit length, `e1` is oriented with a nonnegative row
/// component and `e2` is `e1` rotated by +90 degrees.
pub fn symmetric_eigen2(m: [[f64; 2]; 2]) -> (f64, f64, [f64; 2], [f64; 2]) {
    let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
    let half_trace = 0.5 * (a + d);
    let half_gap = 0.5 * (a - d);
    let radius = half_gap.hypot(b);
    let lambda1 = half_trace + radius;
    let lambda2 = half_trace - radius;

    let e1 = if b == 0.0 {
        if a >= d {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else {
        // Pick the better-conditioned of the two equivalent null-space rows.
        let v = if a >= d {
            [lambda1 - d, b]
        } else {
            [b, lambda1 - a]
        };
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    };
    let e1 = if e1[0] < 0.0 || (e1[0] == 0.0 && e1[1] < 0.0) {
        [-e1[0], -e1[1]]
    } else {
        e1
    };
    let e2 = [-e1[1], e1[0]];
    (lambda1, lambda2, e1, e2)
}

/// `arctan(e[1] / e[0])` in degrees. A vector along the column axis maps to 90.
pub fn direction_degrees(e: [f64; 2]) -> f64 {
    if e[0] == 0.0 {
        90.0
    } else {
        (e[1] / e[0]).atan().to_degrees()
    }
}

/// Mean, population covariance and principal axes of a pixel set.
///
/// A single pixel yields zero eigenvalues and `e1 = (1, 0)`.
///
/// # Panics
/// Panics if `pixels` is empty.
pub fn component_stats(pixels: &[(usize, usize)], scale: f64) -> ComponentStats {
    assert!(!pixels.is_empty(), "component_stats needs at least one pixel");
    let n = pixels.len() as f64;
    let (sr, sc) = pixels
        .iter()
        .fold((0.0, 0.0), |(sr, sc), &(r, c)| (sr + r as f64, sc + c as f64));
    let mean = [sr / n, sc / n];

    // Centered sums: same value as (1/N) sum z z^T - m m^T, without cancellation.
    let (mut rr, mut rc, mut cc) = (0.0, 0.0, 0.0);
    for &(r, c) in pixels {
        let dr = r as f64 - mean[0];
        let dc = c as f64 - mean[1];
        rr += dr * dr;
        rc += dr * dc;
        cc += dc * dc;
    }
    let covariance = [[rr / n, rc / n], [rc / n, cc / n]];
    let (lambda1, lambda2, e1, e2) = symmetric_eigen2(covariance);
    // Rounding can push a zero eigenvalue slightly negative.
    let lambda2 = lambda2.max(0.0);

    ComponentStats {
        pixel_count: pixels.len(),
        mean,
        covariance,
        lambda1,
        lambda2,
        e1,
        e2,
        length: scale * lambda1,
        width: scale * lambda2,
        direction: direction_degrees(e1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    #[test]
    fn vertical_segment() {
        let px: Vec<_> = (4..14).map(|r| (r, 7)).collect();
        let s = component_stats(&px, 1.0);
        assert_eq!(s.e1, [1.0, 0.0]);
        assert_eq!(s.lambda2, 0.0);
        assert_eq!(s.direction, 0.0);
        // Variance of 0..9 is 8.25.
        assert!((s.lambda1 - 8.25).abs() < TOL);
    }

    #[test]
    fn two_by_four_block() {
        let px: Vec<_> = (0..2).flat_map(|r| (0..4).map(move |c| (r, c))).collect();
        let s = component_stats(&px, 1.0);
        assert_eq!(s.mean, [0.5, 1.5]);
        assert!((s.lambda1 - 1.25).abs() < TOL);
        assert!((s.lambda2 - 0.25).abs() < TOL);
        assert_eq!(s.e1, [0.0, 1.0]);
        assert_eq!(s.direction, 90.0);
        assert!((s.aspect_ratio() - 5.0).abs() < 1e-9);
    }

    #[test]
    fn single_pixel_convention() {
        let s = component_stats(&[(3, 3)], 1.0);
        assert_eq!((s.lambda1, s.lambda2), (0.0, 0.0));
        assert_eq!(s.e1, [1.0, 0.0]);
        assert_eq!(s.aspect_ratio(), 0.0);
    }

    #[test]
    fn diagonal_line_is_forty_five_degrees() {
        let px: Vec<_> = (0..8).map(|i| (i, i)).collect();
        let s = component_stats(&px, 1.0);
        assert!((s.direction - 45.0).abs() < 1e-9);
        let anti: Vec<_> = (0..8).map(|i| (i, 10 - i)).collect();
        assert!((component_stats(&anti, 1.0).direction + 45.0).abs() < 1e-9);
    }

    #[test]
    fn scale_multiplies_length_and_width() {
        let px = [(0, 0), (1, 0), (2, 1), (3, 1)];
        let a = component_stats(&px, 1.0);
        let b = component_stats(&px, 2.5);
        assert_eq!(b.length, 2.5 * a.length);
        assert_eq!(b.width, 2.5 * a.width);
        assert_eq!(a.direction, b.direction);
    }

    #[test]
    fn published_direction_within_rounding_of_eigenvector() {
        // The published eigenvector is rounded to four decimals; bound the
        // angle change that rounding can cause and check the published angle
        // lies inside it.
        let (x, y) = (0.9309_f64, 0.3653_f64);
        let half_ulp = 0.5e-4;
        let bound = (x.abs() + y.abs()) / (x * x + y * y) * half_ulp * 180.0 / std::f64::consts::PI;
        let d = direction_degrees([x, y]);
        assert!((d - 21.4286).abs() <= bound, "d={d} bound={bound}");

        // Same angle through the eigen solver on C = l1 e1 e1^T + l2 e2 e2^T.
        let n = x.hypot(y);
        let (e1, e2) = ([x / n, y / n], [-y / n, x / n]);
        let (l1, l2) = (9.0, 0.5);
        let c = [
            [l1 * e1[0] * e1[0] + l2 * e2[0] * e2[0], l1 * e1[0] * e1[1] + l2 * e2[0] * e2[1]],
            [l1 * e1[1] * e1[0] + l2 * e2[1] * e2[0], l1 * e1[1] * e1[1] + l2 * e2[1] * e2[1]],
        ];
        let (m1, m2, v1, _) = symmetric_eigen2(c);
        assert!((m1 - l1).abs() < 1e-9 && (m2 - l2).abs() < 1e-9);
        assert!((direction_degrees(v1) - d).abs() < 1e-9);
    }
}
