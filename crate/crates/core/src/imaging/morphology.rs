use crate::error::{Error, Result};

use super::BinaryMask;

/// Offsets `(dr, dc)` of a flat structuring element. Always contains the origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(isize, isize)>,
}

impl StructuringElement {
    pub fn new(offsets: Vec<(isize, isize)>) -> Result<Self> {
        if !offsets.contains(&(0, 0)) {
            return Err(Error::InvalidConfig(
                "structuring element must contain the origin".into(),
            ));
        }
        Ok(Self { offsets })
    }

    /// Radius-1 disk: the center and its 4-neighbors.
    pub fn disk1() -> Self {
        Self {
            offsets: vec![(0, 0), (-1, 0), (1, 0), (0, -1), (0, 1)],
        }
    }

    /// Full `(2r+1) x (2r+1)` square.
    pub fn square(radius: usize) -> Self {
        let r = radius as isize;
        let offsets = (-r..=r).flat_map(|dr| (-r..=r).map(move |dc| (dr, dc))).collect();
        Self { offsets }
    }

    pub fn offsets(&self) -> &[(isize, isize)] {
        &self.offsets
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self::disk1()
    }
}

/// Binary dilation. Output pixel `(i, j)` is set when some input pixel
/// `(i - dr, j - dc)` is set for an offset in `element`; neighbors that fall
/// outside the image are ignored.
pub fn dilate(mask: &BinaryMask, element: &StructuringElement) -> BinaryMask {
    let (h, w) = mask.dims();
    let mut out = BinaryMask::new(h, w);
    for (r, c) in mask.set_pixels() {
        for &(dr, dc) in element.offsets() {
            let (nr, nc) = (r as isize + dr, c as isize + dc);
            if nr >= 0 && nc >= 0 && (nr as usize) < h && (nc as usize) < w {
                out.set(nr as usize, nc as usize, true);
            }
        }
    }
    out
}
