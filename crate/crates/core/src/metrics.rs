//! PSNR and SSIM on the 8-bit scale.

use crate::error::{check_dims, Error, Result};
use crate::imaging::RasterImage;

const PEAK: f64 = 255.0;
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const K1: f64 = 0.01;
const K2: f64 = 0.03;

/// PSNR and SSIM of a test image against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    /// Decibels; `f64::INFINITY` for identical images.
    pub psnr_db: f64,
    pub ssim: f64,
}

impl QualityReport {
    pub fn compute(reference: &RasterImage, test: &RasterImage) -> Result<Self> {
        Ok(Self {
            psnr_db: psnr(reference, test)?,
            ssim: ssim(reference, test)?,
        })
    }
}

impl std::fmt::Display for QualityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.psnr_db.is_infinite() {
            write!(f, "PSNR=infdB SSIM={:.4}", self.ssim)
        } else {
            write!(f, "PSNR={:.2}dB SSIM={:.4}", self.psnr_db, self.ssim)
        }
    }
}

/// Mean squared error over all pixels and channels on the `[0, 255]` scale.
pub fn mse(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let n = a.as_planar().len() as f64;
    Ok(a.as_planar()
        .iter()
        .zip(b.as_planar())
        .map(|(x, y)| ((x - y) * PEAK).powi(2))
        .sum::<f64>()
        / n)
}

/// `10 log10(255^2 / MSE)` over all three channels jointly.
pub fn psnr(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    let m = mse(a, b)?;
    Ok(if m == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (PEAK * PEAK / m).log10()
    })
}

/// BT.601 luma on the `[0, 255]` scale, row-major.
pub fn luma(img: &RasterImage) -> Vec<f64> {
    let (r, g, b) = (img.channel(0), img.channel(1), img.channel(2));
    (0..r.len())
        .map(|i| PEAK * (0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]))
        .collect()
}

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let g: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| (-((i as f64 - half).powi(2)) / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp())
        .collect();
    let s: f64 = g.iter().sum();
    g.into_iter().map(|x| x / s).collect()
}

/// Separable "valid" filtering with a symmetric 1-D kernel.
fn filter_valid(plane: &[f64], h: usize, w: usize, k: &[f64]) -> (Vec<f64>, usize, usize) {
    let n = k.len();
    let (oh, ow) = (h - n + 1, w - n + 1);
    let mut tmp = vec![0.0; h * ow];
    for r in 0..h {
        for c in 0..ow {
            tmp[r * ow + c] = (0..n).map(|t| k[t] * plane[r * w + c + t]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..n).map(|t| k[t] * tmp[(r + t) * ow + c]).sum();
        }
    }
    (out, oh, ow)
}

/// Mean SSIM on BT.601 luma with an 11x11 Gaussian window (sigma 1.5),
/// `K1 = 0.01`, `K2 = 0.03`, `L = 255`, averaged over all window
/// positions that fit inside the image.
pub fn ssim(a: &RasterImage, b: &RasterImage) -> Result<f64> {
    check_dims(a.dims(), b.dims())?;
    let (h, w) = a.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::TooSmall {
            min: SSIM_WINDOW,
            h,
            w,
        });
    }
    let (x, y) = (luma(a), luma(b));
    let k = gaussian_window();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(&y).map(|(p, q)| p * q).collect();
    let (mx, _, _) = filter_valid(&x, h, w, &k);
    let (my, _, _) = filter_valid(&y, h, w, &k);
    let (sxx, _, _) = filter_valid(&xx, h, w, &k);
    let (syy, _, _) = filter_valid(&yy, h, w, &k);
    let (sxy, _, _) = filter_valid(&xy, h, w, &k);

    let c1 = (K1 * PEAK).powi(2);
    let c2 = (K2 * PEAK).powi(2);
    let total: f64 = (0..mx.len())
        .map(|i| {
            let (ux, uy) = (mx[i], my[i]);
            let vx = sxx[i] - ux * ux;
            let vy = syy[i] - uy * uy;
            let cov = sxy[i] - ux * uy;
            ((2.0 * ux * uy + c1) * (2.0 * cov + c2)) / ((ux * ux + uy * uy + c1) * (vx + vy + c2))
        })
        .sum();
    Ok((total / mx.len() as f64).clamp(-1.0, 1.0))
}


#[cfg(test)]
mod tests {
    use super::*;

    fn gray8(h: usize, w: usize, level: u8) -> RasterImage {
        RasterImage::constant(h, w, f64::from(level) / 255.0).unwrap()
    }

    #[test]
    fn identical_images() {
        let a = RasterImage::from_fn(16, 16, |r, c| [(r * c % 7) as f64 / 7.0, 0.5, (r % 3) as f64 / 3.0]).unwrap();
        assert_eq!(psnr(&a, &a).unwrap(), f64::INFINITY);
        assert!((ssim(&a, &a).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_psnr() {
        let p = psnr(&gray8(8, 8, 0), &gray8(8, 8, 10)).unwrap();
        // MSE = 100.
        assert!((p - 10.0 * 650.25f64.log10()).abs() < 1e-9);
        assert!((p - 28.13).abs() < 0.01);
    }

    #[test]
    fn constant_ssim() {
        let s = ssim(&gray8(16, 16, 100), &gray8(16, 16, 150)).unwrap();
        let expected = (2.0 * 100.0 * 150.0 + 6.5025) / (100.0f64.powi(2) + 150.0f64.powi(2) + 6.5025);
        assert!((s - expected).abs() < 1e-9, "{s} vs {expected}");
        assert!((s - 0.9231).abs() < 0.0005);
    }

    #[test]
    fn errors() {
        assert!(psnr(&gray8(4, 4, 0), &gray8(4, 5, 0)).is_err());
        assert!(matches!(ssim(&gray8(10, 20, 0), &gray8(10, 20, 0)), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn display_format() {
        let r = QualityReport { psnr_db: 28.1307, ssim: 0.92312 };
        assert_eq!(r.to_string(), "PSNR=28.13dB SSIM=0.9231");
    }
}
