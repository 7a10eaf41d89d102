//! Affine search through the assembled normal equations `MᵀM s = γ e_last`.

use super::{dot, AcceleratedStep, Breakdown, Direction, SearchWindow, StepBreak, StepSolution};
use crate::flops::Flops;
use crate::kernel::SweepOutcome;

/// In-place Cholesky factorization `G = L Lᵀ` of a dense symmetric matrix
/// stored row-major in `g` (only the lower triangle is read).
fn cholesky(g: &mut [f64], dim: usize) -> Result<(), Breakdown> {
    for j in 0..dim {
        let mut pivot = g[j * dim + j];
        for k in 0..j {
            pivot -= g[j * dim + k] * g[j * dim + k];
        }
        if !(pivot > 0.0) || !pivot.is_finite() {
            return Err(Breakdown::Pivot { index: j, value: pivot });
        }
        let ljj = pivot.sqrt();
        g[j * dim + j] = ljj;
        for i in j + 1..dim {
            let mut v = g[i * dim + j];
            for k in 0..j {
                v -= g[i * dim + k] * g[j * dim + k];
            }
            g[i * dim + j] = v / ljj;
        }
    }
    Ok(())
}

/// Solves `L Lᵀ s = rhs` with the factor produced by [`cholesky`].
fn cholesky_solve(l: &[f64], dim: usize, rhs: &mut [f64]) {
    for i in 0..dim {
        let mut v = rhs[i];
        for k in 0..i {
            v -= l[i * dim + k] * rhs[k];
        }
        rhs[i] = v / l[i * dim + i];
    }
    for i in (0..dim).rev() {
        let mut v = rhs[i];
        for k in i + 1..dim {
            v -= l[k * dim + i] * rhs[k];
        }
        rhs[i] = v / l[i * dim + i];
    }
}

/// LU-solve cost `⅔w³ + 7/2 w² + 5/6 w` for `w` history columns, rounded.
fn dense_solve_flops(w: usize) -> usize {
    let w = w as f64;
    (2.0 / 3.0 * w * w * w + 3.5 * w * w + 5.0 / 6.0 * w).round() as usize
}

impl SearchWindow {
    /// Affine search step through a dense factorization of `MᵀM`, with
    /// `M = (x_{j_k} − x_k, …, x_{k−1} − x_k, P(x_k) − x_k)`.
    ///
    /// Flops are charged with the itemized accounting of the reference
    /// algorithm: `(k−j_k) n` to assemble `V`, `½(w+1)(w+2) n` for `MᵀM`, the
    /// LU solve count and `2(w+1) n` for the update. On any [`StepBreak`] the
    /// window is left untouched.
    pub fn naive_step(&mut self, outcome: &SweepOutcome, flops: &mut Flops) -> Result<AcceleratedStep, StepBreak> {
        let dir = Direction::new(self.current(), outcome, flops)?;
        let w = self.history_len();
        if w == 0 {
            let step = dir.line_search(self.current(), flops);
            self.accept(&step);
            return Ok(step);
        }
        let v = self.differences(flops);
        let dim = w + 1;
        let cols: Vec<&[f64]> = v.iter().map(Vec::as_slice).chain([dir.d.as_slice()]).collect();
        let mut g = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..=i {
                let val = if i == w && j == w {
                    dir.delta
                } else {
                    dot(cols[i], cols[j])
                };
                g[i * dim + j] = val;
                g[j * dim + i] = val;
            }
        }
        flops.add(dim * (dim + 1) / 2 * dir.d.len());

        cholesky(&mut g, dim).map_err(StepBreak::Breakdown)?;
        let mut s = vec![0.0; dim];
        s[w] = dir.gamma;
        cholesky_solve(&g, dim, &mut s);
        flops.add(dense_solve_flops(w));

        let s_under = s[w];
        if !(s_under > 0.0) || !s.iter().all(|v| v.is_finite()) {
            return Err(StepBreak::Breakdown(Breakdown::Step { value: s_under }));
        }
        s.truncate(w);
        let solution = StepSolution {
            s_bar: s,
            s_under,
            gamma: dir.gamma,
            predicted_gain: dir.gamma * s_under,
        };
        let x_next = self.combine(&v, &dir.d, &solution, flops);
        let step = AcceleratedStep {
            x_next,
            solution,
            rho: dir.rho,
            delta: dir.delta,
        };
        self.accept(&step);
        Ok(step)
    }
}
