//! Oracles and fixtures shared by the integration tests.

#![allow(dead_code)]

use derain::separation::{CsrMatrix, RowTerm, SparseL1System};
use derain::{BinaryMask, RasterImage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random 8-bit RGB image, returned with its raw codes (planar, channel-major).
pub fn random_rgb8(h: usize, w: usize, seed: u64) -> (RasterImage, Vec<u8>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let codes: Vec<u8> = (0..3 * h * w).map(|_| rng.gen()).collect();
    let data = codes.iter().map(|&c| f64::from(c) / 255.0).collect();
    (RasterImage::from_planar(h, w, data).unwrap(), codes)
}

/// Brute-force windowed test on integer codes: a pixel is a candidate when,
/// in every channel, `code * count > window_sum` for all five windows. The
/// windows are the centered square and the four squares having the pixel
/// at a corner, each clipped to the image.
pub fn brute_force_initial(codes: &[u8], h: usize, w: usize, side: usize) -> BinaryMask {
    let span = (side - 1) as i64;
    let half = span / 2;
    let windows = [
        (-half, half, -half, half),
        (0, span, 0, span),
        (0, span, -span, 0),
        (-span, 0, 0, span),
        (-span, 0, -span, 0),
    ];
    BinaryMask::from_fn(h, w, |r, c| {
        (0..3).all(|ch| {
            let plane = &codes[ch * h * w..(ch + 1) * h * w];
            let centre = i64::from(plane[r * w + c]);
            windows.iter().all(|&(dr0, dr1, dc0, dc1)| {
                let (mut sum, mut count) = (0i64, 0i64);
                for dr in dr0..=dr1 {
                    for dc in dc0..=dc1 {
                        let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                        if rr >= 0 && cc >= 0 && rr < h as i64 && cc < w as i64 {
                            sum += i64::from(plane[rr as usize * w + cc as usize]);
                            count += 1;
                        }
                    }
                }
                centre * count > sum
            })
        })
    })
}

pub fn dense_system(rows: &[Vec<f64>], b: &[f64]) -> SparseL1System {
    let a = CsrMatrix::from_dense(rows);
    SparseL1System {
        row_weights: vec![1.0; a.n_rows],
        row_terms: vec![RowTerm::Anchor; a.n_rows],
        a,
        b: b.to_vec(),
        anchored_everywhere: false,
    }
}

/// Random dense `m x n` system with entries uniform in (-1, 1).
pub fn random_system(m: usize, n: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<f64>) {
    let a = (0..m)
        .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let b = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (a, b)
}

/// Gaussian elimination with partial pivoting; `None` if (near) singular.
fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-12 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn l1_objective(a: &[Vec<f64>], b: &[f64], x: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(row, bi)| (row.iter().zip(x).map(|(p, q)| p * q).sum::<f64>() - bi).abs())
        .sum()
}

/// Exact minimum of `||A x - b||_1` for full-column-rank `A`. The problem is
/// a linear program, so some optimum interpolates `n` rows exactly; enumerate
/// every such vertex.
pub fn l1_vertex_oracle(a: &[Vec<f64>], b: &[f64]) -> f64 {
    let n = a[0].len();
    combinations(a.len(), n)
        .into_iter()
        .filter_map(|rows| {
            let sub_a = rows.iter().map(|&i| a[i].clone()).collect();
            let sub_b = rows.iter().map(|&i| b[i]).collect();
            solve_square(sub_a, sub_b)
        })
        .map(|x| l1_objective(a, b, &x))
        .fold(f64::INFINITY, f64::min)
}

/// Random binary mask with roughly `density` of its pixels set.
pub fn random_mask(h: usize, w: usize, density: f64, rng: &mut ChaCha8Rng) -> BinaryMask {
    BinaryMask::from_fn(h, w, |_, _| rng.gen_bool(density))
}

pub fn max_abs_diff(a: &RasterImage, b: &RasterImage) -> f64 {
    a.as_planar()
        .iter()
        .zip(b.as_planar())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
