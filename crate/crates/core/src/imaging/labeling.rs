use std::collections::VecDeque;

use super::BinaryMask;

/// Pixel adjacency used when grouping mask pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    Four,
    #[default]
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        match self {
            Connectivity::Four => &[(-1, 0), (0, -1), (0, 1), (1, 0)],
            Connectivity::Eight => &[
                (-1, -1),
                (-1, 0),
                (-1, 1),
                (0, -1),
                (0, 1),
                (1, -1),
                (1, 0),
                (1, 1),
            ],
        }
    }
}

/// Connected components of a mask. Label 0 is background; component `p`
/// (1-based) owns `pixel_lists[p - 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentLabeling {
    height: usize,
    width: usize,
    labels: Vec<u32>,
    pixel_lists: Vec<Vec<(usize, usize)>>,
}

impl ComponentLabeling {
    pub fn component_count(&self) -> usize {
        self.pixel_lists.len()
    }

    pub fn label(&self, row: usize, col: usize) -> u32 {
        self.labels[row * self.width + col]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Pixels of component `id` (1-based).
    pub fn pixels(&self, id: usize) -> &[(usize, usize)] {
        &self.pixel_lists[id - 1]
    }

    /// All pixel lists, indexed by `id - 1`.
    pub fn pixel_lists(&self) -> &[Vec<(usize, usize)>] {
        &self.pixel_lists
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.height, self.width)
    }

    /// Mask containing only the listed components (1-based ids).
    pub fn mask_of<I: IntoIterator<Item = usize>>(&self, ids: I) -> BinaryMask {
        let mut m = BinaryMask::new(self.height, self.width);
        for id in ids {
            for &(r, c) in self.pixels(id) {
                m.set(r, c, true);
            }
        }
        m
    }
}

/// Labels connected components by breadth-first flood fill. Labels are
/// assigned in raster-scan order of each component's first pixel.
pub fn label_components(mask: &BinaryMask, connectivity: Connectivity) -> ComponentLabeling {
    let (h, w) = mask.dims();
    let mut labels = vec![0u32; h * w];
    let mut pixel_lists = Vec::new();
    let mut queue = VecDeque::new();
    let offsets = connectivity.offsets();

    for start in 0..h * w {
        if !mask.bits()[start] || labels[start] != 0 {
            continue;
        }
        let id = pixel_lists.len() as u32 + 1;
        let mut pixels = Vec::new();
        labels[start] = id;
        queue.push_back(start);
        while let Some(idx) = queue.pop_front() {
            let (r, c) = (idx / w, idx % w);
            pixels.push((r, c));
            for &(dr, dc) in offsets {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 || nr >= h as isize || nc >= w as isize {
                    continue;
                }
                let n = nr as usize * w + nc as usize;
                if mask.bits()[n] && labels[n] == 0 {
                    labels[n] = id;
                    queue.push_back(n);
                }
            }
        }
        pixel_lists.push(pixels);
    }

    ComponentLabeling {
        height: h,
        width: w,
        labels,
        pixel_lists,
    }
}
