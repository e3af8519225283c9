use crate::error::{check_dims, Result};
use crate::imaging::BinaryMask;

use super::filters::FilterBank;
use super::SeparationConfig;

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(n_cols: usize) -> Self {
        Self {
            n_rows: 0,
            n_cols,
            row_ptr: vec![0],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::new(n_cols);
        for row in rows {
            m.push_row(row.iter().copied().enumerate().filter(|&(_, v)| v != 0.0));
        }
        m
    }

    pub fn push_row<I: IntoIterator<Item = (usize, f64)>>(&mut self, entries: I) {
        for (c, v) in entries {
            debug_assert!(c < self.n_cols);
            self.col_idx.push(c);
            self.values.push(v);
        }
        self.row_ptr.push(self.col_idx.len());
        self.n_rows += 1;
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[span.clone()].iter().copied().zip(self.values[span].iter().copied())
    }

    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n_rows)
            .map(|i| self.row(i).map(|(c, v)| v * x[c]).sum())
            .collect()
    }

    /// `y = A^T x`.
    pub fn mul_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_cols];
        for (i, &xi) in x.iter().enumerate() {
            for (c, v) in self.row(i) {
                y[c] += v * xi;
            }
        }
        y
    }
}

/// Which term of the loss a row encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowTerm {
    /// `|w . I_R|`
    RainSparsity,
    /// `|w . (I - I_R)|`
    BackgroundSparsity,
    /// `lambda |w . I_R - w . I|` on responses touching `S_R`.
    RainGradient,
    /// `lambda |w . I_R|` on responses inside `S_NR`.
    BackgroundGradient,
    /// `eta |I_R|` on `S_NR` pixels.
    Anchor,
}

/// `min_v ||A v - b||_1` with the per-row weights already folded into `A`
/// and `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseL1System {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    pub row_weights: Vec<f64>,
    pub row_terms: Vec<RowTerm>,
    /// Set when `S_NR` was empty and every pixel received an anchor row.
    pub anchored_everywhere: bool,
}

impl SparseL1System {
    pub fn n_rows(&self) -> usize {
        self.a.n_rows
    }

    pub fn n_unknowns(&self) -> usize {
        self.a.n_cols
    }

    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = self.a.mul_vec(v);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }

    /// `||A v - b||_1`.
    pub fn objective(&self, v: &[f64]) -> f64 {
        self.residual(v).iter().map(|e| e.abs()).sum()
    }
}

/// Builds the weighted L1 system for one channel.
///
/// For every valid filter response three rows are emitted in order: the
/// rain-layer sparsity row (target 0), the background sparsity row (target
/// `w . I`), and a `lambda`-weighted gradient-agreement row whose target is
/// `w . I` if any pixel of the kernel support lies in `S_R` and 0 otherwise.
/// After all responses, each `S_NR` pixel gets an `eta`-weighted row pinning
/// the rain layer to zero. If `S_NR` is empty every pixel is pinned instead,
/// since the filter rows alone leave constants unresolved.
pub fn assemble_system(
    channel: &[f64],
    height: usize,
    width: usize,
    rain_mask: &BinaryMask,
    bank: &FilterBank,
    config: &SeparationConfig,
) -> Result<SparseL1System> {
    check_dims((height, width), rain_mask.dims())?;
    check_dims((height * width, 1), (channel.len(), 1))?;
    let n = height * width;
    let responses = bank.response_count(height, width);
    let s_nr = n - rain_mask.count();
    let anchored_everywhere = s_nr == 0;
    let anchors = if anchored_everywhere { n } else { s_nr };
    let rows = 3 * responses + anchors;

    let mut a = CsrMatrix::new(n);
    a.col_idx.reserve(rows * 3);
    a.values.reserve(rows * 3);
    a.row_ptr.reserve(rows);
    let mut b = Vec::with_capacity(rows);
    let mut row_weights = Vec::with_capacity(rows);
    let mut row_terms = Vec::with_capacity(rows);
    let lambda = config.lambda;
    let mask = rain_mask.bits();

    for kernel in &bank.kernels {
        for (r, c) in kernel.placements(height, width) {
            let support: Vec<(usize, f64)> = kernel.support(r, c, width).collect();
            let response: f64 = support.iter().map(|&(i, k)| k * channel[i]).sum();
            let touches_rain = support.iter().any(|&(i, _)| mask[i]);

            a.push_row(support.iter().copied());
            b.push(0.0);
            row_weights.push(1.0);
            row_terms.push(RowTerm::RainSparsity);

            a.push_row(support.iter().copied());
            b.push(response);
            row_weights.push(1.0);
            row_terms.push(RowTerm::BackgroundSparsity);

            a.push_row(support.iter().map(|&(i, k)| (i, lambda * k)));
            row_weights.push(lambda);
            if touches_rain {
                b.push(lambda * response);
                row_terms.push(RowTerm::RainGradient);
            } else {
                b.push(0.0);
                row_terms.push(RowTerm::BackgroundGradient);
            }
        }
    }

    if anchored_everywhere {
        log::warn!("rain mask covers every pixel; anchoring the whole rain layer toward zero");
    }
    for i in 0..n {
        if anchored_everywhere || !mask[i] {
            a.push_row([(i, config.eta)]);
            b.push(0.0);
            row_weights.push(config.eta);
            row_terms.push(RowTerm::Anchor);
        }
    }
    debug_assert_eq!(a.n_rows, rows);

    Ok(SparseL1System {
        a,
        b,
        row_weights,
        row_terms,
        anchored_everywhere,
    })
}
