//! Flop accounting.
//!
//! Counting conventions: a multiply-add is two flops, a lone add, multiply
//! or divide is one, cached row norms are never recounted, and scalar-only
//! arithmetic that happens a constant number of times per cycle is free.
//! Under these rules the plain and line-search counters reproduce the
//! closed-form per-cycle costs exactly.

use std::ops::AddAssign;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Flops(pub u64);

impl Flops {
    #[inline]
    pub fn add(&mut self, n: usize) {
        self.0 += n as u64;
    }
}

impl AddAssign for Flops {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

/// Closed-form per-cycle costs of the solver variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostModel {
    pub nnz: usize,
    pub m: usize,
    pub n: usize,
}

impl CostModel {
    pub fn new(nnz: usize, m: usize, n: usize) -> Self {
        Self { nnz, m, n }
    }

    pub fn for_matrix(a: &crate::SparseRowMatrix) -> Self {
        Self::new(a.nnz(), a.n_rows(), a.n_cols())
    }

    /// `4 nnz + m`
    pub fn plain(&self) -> f64 {
        (4 * self.nnz + self.m) as f64
    }

    /// `4 nnz + 3m + 5n`
    pub fn line_search(&self) -> f64 {
        (4 * self.nnz + 3 * self.m + 5 * self.n) as f64
    }

    /// `4 nnz + (3 + 5ℓ) n + 3m + 5ℓ`, valid once the window is full.
    pub fn fast_affine(&self, ell: usize) -> f64 {
        let l = ell as f64;
        4.0 * self.nnz as f64 + (3.0 + 5.0 * l) * self.n as f64 + 3.0 * self.m as f64 + 5.0 * l
    }

    /// `4 nnz + (3 + 3ℓ + ℓ²/2) n + 3m + ℓ³`
    pub fn naive_affine(&self, ell: usize) -> f64 {
        let l = ell as f64;
        4.0 * self.nnz as f64 + (3.0 + 3.0 * l + 0.5 * l * l) * self.n as f64 + 3.0 * self.m as f64 + l * l * l
    }

    /// Cost of one acceleration step relative to one plain cycle:
    /// `((3 + 5ℓ) n + 2m + 5ℓ) / (4 nnz + m)`.
    pub fn oncost(&self, ell: usize) -> f64 {
        let l = ell as f64;
        ((3.0 + 5.0 * l) * self.n as f64 + 2.0 * self.m as f64 + 5.0 * l) / self.plain()
    }
}
