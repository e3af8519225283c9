use std::path::Path;

use image::{ImageBuffer, Rgb};

use crate::error::{Error, Result};

pub const CHANNELS: usize = 3;

/// An RGB image with real-valued intensities in `[0, 1]`.
///
/// Storage is planar: all red samples in row-major order, then green, then
/// blue. The separation stage works one channel at a time, so planar slices
/// avoid strided access.
#[derive(Debug, Clone, PartialEq)]
pub struct RasterImage {
    height: usize,
    width: usize,
    data: Vec<f64>,
}

impl RasterImage {
    /// Builds an image from planar data, validating the `[0, 1]` range.
    pub fn from_planar(height: usize, width: usize, data: Vec<f64>) -> Result<Self> {
        if height == 0 || width == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {height}x{width}"
            )));
        }
        if data.len() != CHANNELS * height * width {
            return Err(Error::InvalidImage(format!(
                "expected {} samples, got {}",
                CHANNELS * height * width,
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(v.is_finite() && (0.0..=1.0).contains(*v))) {
            return Err(Error::InvalidImage(format!(
                "intensity {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            height,
            width,
            data,
        })
    }

    /// Builds an image without range validation. Used for unclamped layers
    /// produced by the separation stage, which may leave `[0, 1]`.
    pub(crate) fn from_planar_unchecked(height: usize, width: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), CHANNELS * height * width);
        Self {
            height,
            width,
            data,
        }
    }

    /// An image filled with the same value in every channel.
    pub fn constant(height: usize, width: usize, value: f64) -> Result<Self> {
        Self::from_planar(height, width, vec![value; CHANNELS * height * width])
    }

    pub fn from_fn<F>(height: usize, width: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> [f64; CHANNELS],
    {
        let plane = height * width;
        let mut data = vec![0.0; CHANNELS * plane];
        for r in 0..height {
            for c in 0..width {
                let px = f(r, c);
                for (ch, v) in px.into_iter().enumerate() {
                    data[ch * plane + r * width + c] = v;
                }
            }
        }
        Self::from_planar(height, width, data)
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Sample at `(row, col)` in channel `ch`.
    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> f64 {
        self.data[ch * self.height * self.width + row * self.width + col]
    }

    #[inline]
    pub fn pixel(&self, row: usize, col: usize) -> [f64; CHANNELS] {
        [self.get(row, col, 0), self.get(row, col, 1), self.get(row, col, 2)]
    }

    /// Row-major samples of one channel.
    pub fn channel(&self, ch: usize) -> &[f64] {
        let plane = self.height * self.width;
        &self.data[ch * plane..(ch + 1) * plane]
    }

    pub fn as_planar(&self) -> &[f64] {
        &self.data
    }

    pub fn into_planar(self) -> Vec<f64> {
        self.data
    }

    /// Rebuilds an image from three channel planes.
    pub fn from_channels(height: usize, width: usize, channels: [Vec<f64>; CHANNELS]) -> Result<Self> {
        let data = channels.concat();
        Self::from_planar(height, width, data)
    }

    /// Reads an 8-bit PNG (any color type is converted to RGB).
    pub fn load_png(path: &Path) -> Result<Self> {
        let img = image::open(path).map_err(|source| match source {
            image::ImageError::IoError(e) => Error::Io {
                path: path.to_path_buf(),
                source: e,
            },
            other => Error::Codec {
                path: path.to_path_buf(),
                source: other,
            },
        })?;
        Ok(Self::from_rgb8(&img.to_rgb8()))
    }

    pub fn from_rgb8(buf: &ImageBuffer<Rgb<u8>, Vec<u8>>) -> Self {
        let (w, h) = (buf.width() as usize, buf.height() as usize);
        let plane = h * w;
        let mut data = vec![0.0; CHANNELS * plane];
        for (x, y, px) in buf.enumerate_pixels() {
            let idx = y as usize * w + x as usize;
            for ch in 0..CHANNELS {
                data[ch * plane + idx] = f64::from(px[ch]) / 255.0;
            }
        }
        Self::from_planar_unchecked(h, w, data)
    }

    /// Quantizes to 8 bits, rounding half up. Out-of-range samples saturate.
    pub fn to_rgb8(&self) -> ImageBuffer<Rgb<u8>, Vec<u8>> {
        let mut buf = ImageBuffer::new(self.width as u32, self.height as u32);
        for (x, y, px) in buf.enumerate_pixels_mut() {
            let (r, c) = (y as usize, x as usize);
            *px = Rgb([
                quantize(self.get(r, c, 0)),
                quantize(self.get(r, c, 1)),
                quantize(self.get(r, c, 2)),
            ]);
        }
        buf
    }

    /// The image after an 8-bit save/load round trip.
    pub fn quantized(&self) -> Self {
        Self::from_rgb8(&self.to_rgb8())
    }

    pub fn save_png(&self, path: &Path) -> Result<()> {
        self.to_rgb8().save(path).map_err(|source| Error::Codec {
            path: path.to_path_buf(),
            source,
        })
    }
}

pub(crate) fn quantize(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_range() {
        assert!(RasterImage::from_planar(1, 1, vec![0.0, 0.5, 1.5]).is_err());
        assert!(RasterImage::from_planar(1, 1, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(RasterImage::from_planar(0, 1, vec![]).is_err());
        assert!(RasterImage::from_planar(1, 2, vec![0.0; 3]).is_err());
    }

    #[test]
    fn eight_bit_round_trip_is_exact() {
        let img = RasterImage::from_fn(4, 5, |r, c| {
            let v = ((r * 5 + c) * 13 % 256) as f64 / 255.0;
            [v, 1.0 - v, 0.5]
        })
        .unwrap();
        let q = img.to_rgb8();
        assert_eq!(RasterImage::from_rgb8(&q).to_rgb8(), q);
        assert_eq!(q.get_pixel(0, 0)[2], 128);
    }

    #[test]
    fn quantize_rounds_half_up() {
        assert_eq!(quantize(0.5 / 255.0), 1);
        assert_eq!(quantize(0.49 / 255.0), 0);
        assert_eq!(quantize(-0.2), 0);
        assert_eq!(quantize(1.7), 255);
    }

    #[test]
    fn planar_layout() {
        let img = RasterImage::from_fn(2, 3, |r, c| [r as f64 / 2.0, c as f64 / 3.0, 1.0]).unwrap();
        assert_eq!(img.channel(0), &[0.0, 0.0, 0.0, 0.5, 0.5, 0.5]);
        assert_eq!(img.get(1, 2, 1), 2.0 / 3.0);
        assert_eq!(img.pixel(0, 1), [0.0, 1.0 / 3.0, 1.0]);
    }
}
