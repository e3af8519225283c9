use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMatRef};
use faer::{Mat, Side};

use crate::error::{Error, Result};

use super::system::{CsrMatrix, SparseL1System};
use super::SeparationConfig;

/// Weighted normal equations `A^T W A x = A^T W b` with a fixed sparsity
/// pattern, so reweighting only rewrites values.
struct NormalEquations {
    n: usize,
    /// Symmetric pattern of `A^T A`, full storage.
    pattern: CsrMatrix,
    /// For each row of `A`, the slots in `pattern.values` receiving its
    /// `k x k` outer product, row-major.
    slots: Vec<usize>,
    slot_ptr: Vec<usize>,
    symbolic: Option<SymbolicLlt<usize>>,
}

impl NormalEquations {
    fn new(a: &CsrMatrix) -> Self {
        let n = a.n_cols;
            let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); n];
        for i in 0..a.n_rows {
            for (p, _) in a.row(i) {
                neighbours[p].extend(a.row(i).map(|(q, _)| q));
            }
        }
        for (p, cols) in neighbours.iter_mut().enumerate() {
            cols.push(p);
            cols.sort_unstable();
            cols.dedup();
        }
        let mut pattern = CsrMatrix::new(n);
        for cols in &neighbours {
            pattern.push_row(cols.iter().map(|&q| (q, 0.0)));
        }
        let find = |p: usize, q: usize| {
            let span = pattern.row_ptr[p]..pattern.row_ptr[p + 1];
            span.start + pattern.col_idx[span].binary_search(&q).expect("pattern covers A^T A")
        };

        let mut slots = Vec::new();
        let mut slot_ptr = vec![0];
        for i in 0..a.n_rows {
            for (p, _) in a.row(i) {
                for (q, _) in a.row(i) {
                    slots.push(find(p, q));
                }
            }
            slot_ptr.push(slots.len());
        }
        Self {
            n,
            pattern,
            slots,
            slot_ptr,
            symbolic: None,
        }
    }

    /// Fills the matrix for row weights `w` and returns `A^T W b`.
    fn assemble(&mut self, a: &CsrMatrix, b: &[f64], w: &[f64]) -> Vec<f64> {
        self.pattern.values.iter_mut().for_each(|v| *v = 0.0);
        let mut rhs = vec![0.0; self.n];
        for i in 0..a.n_rows {
            let span = a.row_ptr[i]..a.row_ptr[i + 1];
            let cols = &a.col_idx[span.clone()];
            let vals = &a.values[span];
            let k = cols.len();
            let slots = &self.slots[self.slot_ptr[i]..self.slot_ptr[i + 1]];
            for x in 0..k {
                let wa = w[i] * vals[x];
                rhs[cols[x]] += wa * b[i];
                for y in 0..k {
                    self.pattern.values[slots[x * k + y]] += wa * vals[y];
                }
            }
        }
        rhs
    }
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Result of one inner solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStats {
    /// Iterative-refinement passes after the initial Cholesky solve.
    pub refinements: usize,
    pub relative_residual: f64,
}

const MAX_REFINEMENTS: usize = 4;

impl NormalEquations {
    fn matrix(&self) -> SparseColMatRef<'_, usize, f64> {
        // Full symmetric storage: the CSR arrays are also a valid CSC.
        let symbolic = SymbolicSparseColMatRef::new_checked(
            self.n,
            self.n,
            &self.pattern.row_ptr,
            None,
            &self.pattern.col_idx,
        );
        SparseColMatRef::new(symbolic, &self.pattern.values)
    }

    /// Solves the current system by sparse Cholesky plus iterative
    /// refinement until the relative residual drops to `tol`.
    fn solve(&mut self, rhs: &[f64], tol: f64) -> Result<(Vec<f64>, SolveStats)> {
        let rhs_norm = norm(rhs);
        if rhs_norm == 0.0 {
            let stats = SolveStats {
                refinements: 0,
                relative_residual: 0.0,
            };
            return Ok((vec![0.0; self.n], stats));
        }
        if self.symbolic.is_none() {
            let sym = SymbolicLlt::try_new(self.matrix().symbolic(), Side::Lower)
                .map_err(|e| Error::Numerical(format!("symbolic Cholesky failed: {e:?}")))?;
            self.symbolic = Some(sym);
        }
        let symbolic = self.symbolic.clone().expect("set above");
        let llt = Llt::try_new_with_symbolic(symbolic, self.matrix(), Side::Lower)
            .map_err(|e| Error::Numerical(format!("Cholesky factorization failed: {e:?}")))?;
        let back_solve = |b: &[f64]| {
            let mut col = Mat::from_fn(b.len(), 1, |i, _| b[i]);
            llt.solve_in_place(col.as_mut());
            (0..b.len()).map(|i| col[(i, 0)]).collect::<Vec<f64>>()
        };

        let mut x = back_solve(rhs);
        let mut refinements = 0;
        let relative_residual = loop {
            let mx = self.pattern.mul_vec(&x);
            let r: Vec<f64> = rhs.iter().zip(&mx).map(|(b, y)| b - y).collect();
            let rel = norm(&r) / rhs_norm;
            if !rel.is_finite() {
                return Err(Error::Numerical("non-finite residual in inner solve".into()));
            }
            if rel <= tol || refinements == MAX_REFINEMENTS {
                break rel;
            }
            for (xi, di) in x.iter_mut().zip(back_solve(&r)) {
                *xi += di;
            }
            refinements += 1;
        };
        if relative_residual > tol {
            log::warn!("inner solve reached relative residual {relative_residual:.3e} (target {tol:.1e})");
        }
        Ok((
            x,
            SolveStats {
                refinements,
                relative_residual,
            },
        ))
    }
}

/// Solution and diagnostics of [`irls_solve`].
#[derive(Debug, Clone, PartialEq)]
pub struct IrlsOutcome {
    pub v: Vec<f64>,
    /// `||A v - b||_1` at the least-squares initializer and after each reweighting.
    pub objectives: Vec<f64>,
    pub solves: Vec<SolveStats>,
}

impl IrlsOutcome {
    pub fn initial_objective(&self) -> f64 {
        self.objectives[0]
    }

    pub fn final_objective(&self) -> f64 {
        *self.objectives.last().expect("at least the initial objective")
    }
}

/// Weight applied to a row with absolute residual `e`: `max(e, floor)^-1`,
/// the square of `max(e, floor)^-1/2`.
pub fn irls_weight(residual: f64, floor: f64) -> f64 {
    1.0 / residual.abs().max(floor)
}

/// Minimizes `||A v - b||_1` by iteratively reweighted least squares.
///
/// Starts from the ordinary least-squares solution of `A v = b`, then
/// repeats `irls_iters` times: residuals `e = |A v - b|`, row scale
/// `z = max(e, epsilon)^-1/2`, and `v = argmin ||diag(z) (A v - b)||_2`.
/// Each weighted problem is solved through its normal equations with a
/// sparse Cholesky factorization whose symbolic analysis is shared across
/// iterations.
pub fn irls_solve(system: &SparseL1System, config: &SeparationConfig) -> Result<IrlsOutcome> {
    let a = &system.a;
    let b = &system.b;
    let mut normal = NormalEquations::new(a);

    let mut weights = vec![1.0; a.n_rows];
    let rhs = normal.assemble(a, b, &weights);
    let (mut v, stats) = normal.solve(&rhs, config.solver_tol)?;
    let mut solves = vec![stats];
    let mut objectives = vec![system.objective(&v)];

    for _ in 0..config.irls_iters {
        let residual = system.residual(&v);
        for (w, e) in weights.iter_mut().zip(&residual) {
            *w = irls_weight(*e, config.epsilon_irls);
        }
        let rhs = normal.assemble(a, b, &weights);
        let (next, stats) = normal.solve(&rhs, config.solver_tol)?;
        v = next;
        solves.push(stats);
        objectives.push(system.objective(&v));
    }
    log::debug!(
        "irls: objective {:.6e} -> {:.6e}, refinements {:?}",
        objectives[0],
        objectives[objectives.len() - 1],
        solves.iter().map(|s| s.refinements).collect::<Vec<_>>()
    );

    Ok(IrlsOutcome { v, objectives, solves })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_system(rows: &[Vec<f64>], b: &[f64]) -> SparseL1System {
        let a = CsrMatrix::from_dense(rows);
        SparseL1System {
            row_weights: vec![1.0; a.n_rows],
            row_terms: vec![super::super::system::RowTerm::Anchor; a.n_rows],
            a,
            b: b.to_vec(),
            anchored_everywhere: false,
        }
    }

    fn config(iters: usize) -> SeparationConfig {
        SeparationConfig {
            irls_iters: iters,
            ..Default::default()
        }
    }

    #[test]
    fn consistent_square_system() {
        let sys = dense_system(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[3.0, -1.0]);
        let out = irls_solve(&sys, &config(3)).unwrap();
        assert!((out.v[0] - 3.0).abs() < 1e-12 && (out.v[1] + 1.0).abs() < 1e-12);
        assert!(out.objectives.iter().all(|&o| o < 1e-12));
    }

    #[test]
    fn median_of_three() {
        let sys = dense_system(&[vec![1.0], vec![1.0], vec![1.0]], &[1.0, 2.0, 10.0]);
        let out = irls_solve(&sys, &config(3)).unwrap();
        assert!((out.v[0] - 2.0).abs() <= 0.25, "v = {}", out.v[0]);
        // Initializer is the mean.
        assert!((out.objectives[0] - (10.0 / 3.0 + 7.0 / 3.0 + 17.0 / 3.0)).abs() < 1e-9);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sys = dense_system(&[vec![1.0, 2.0], vec![0.5, -1.0], vec![3.0, 1.0]], &[0.0; 3]);
        let out = irls_solve(&sys, &config(3)).unwrap();
        assert_eq!(out.v, vec![0.0, 0.0]);
    }

    #[test]
    fn reweighted_quadratic_equals_l1() {
        let residuals = [0.3, -2.0, 1e-3, 5.5, -0.25];
        let quad: f64 = residuals.iter().map(|&e| irls_weight(e, 1e-6) * e * e).sum();
        let l1: f64 = residuals.iter().map(|e: &f64| e.abs()).sum();
        assert!((quad - l1).abs() < 1e-12);
    }
}
