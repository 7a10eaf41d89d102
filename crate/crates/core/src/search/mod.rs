//! Acceleration steps that follow a Kaczmarz sweep.
//!
//! Given `x_k` and the sweep outcome `(P(x_k), ρ_k)`, every step minimizes
//! `‖ξ − x*‖` over an affine search space without knowing `x*`:
//!
//! - [`line_search_step`] searches the line through `x_k` and `P(x_k)`;
//! - [`SearchWindow::naive_step`] searches `aff(x_{j_k}, …, x_k, P(x_k))` by
//!   assembling and factoring the Gram matrix `MᵀM`;
//! - [`SearchWindow::fast_step`] searches the same space in linear time from
//!   the explicit tridiagonal inverse of `VᵀV` and a bordered solve.

mod naive;
mod structured;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

pub use structured::{bordered_solve, tridiag_apply};

use crate::error::ConfigError;
use crate::flops::Flops;
use crate::kernel::SweepOutcome;

/// Relative threshold below which the window is considered degenerate.
pub const BREAKDOWN_RTOL: f64 = 1e-14;

/// Maximum number of iterates kept in the search window (`ℓ`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSize {
    Bounded(usize),
    /// Keep every iterate; memory grows by one vector per cycle.
    Unbounded,
}

impl WindowSize {
    pub fn admits(&self, len: usize) -> bool {
        match *self {
            Self::Bounded(l) => len <= l,
            Self::Unbounded => true,
        }
    }

    /// `None` for an unbounded window.
    pub fn get(&self) -> Option<usize> {
        match *self {
            Self::Bounded(l) => Some(l),
            Self::Unbounded => None,
        }
    }
}

impl FromStr for WindowSize {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") || s == "inf" {
            return Ok(Self::Unbounded);
        }
        match s.parse::<usize>() {
            Ok(l) if l >= 1 => Ok(Self::Bounded(l)),
            _ => Err(ConfigError::Unknown {
                kind: "window size",
                value: s.to_string(),
            }),
        }
    }
}

impl fmt::Display for WindowSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bounded(l) => write!(f, "{l}"),
            Self::Unbounded => f.write_str("all"),
        }
    }
}

/// Why an acceleration step was not taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepBreak {
    /// `P(x_k) = x_k`, hence `A x_k = b`.
    Solved,
    /// The window lost positivity or independence numerically.
    Breakdown(Breakdown),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Breakdown {
    /// A window coefficient `α_i` is not safely positive.
    Alpha { index: usize, value: f64 },
    /// The Schur complement `δ − pᵀq` vanished.
    Schur { value: f64 },
    /// Cholesky met a nonpositive pivot.
    Pivot { index: usize, value: f64 },
    /// The coefficient on `P(x_k) − x_k` is not positive.
    Step { value: f64 },
}

/// Solution of `MᵀM s = γ e_last`, split as `s = (s̄, s̲)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepSolution {
    /// Coefficients on the columns of `V`.
    pub s_bar: Vec<f64>,
    /// Coefficient on `d = P(x_k) − x_k`.
    pub s_under: f64,
    pub gamma: f64,
    /// `γ s̲`, the exact decrease of `‖x − x*‖²`.
    pub predicted_gain: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceleratedStep {
    pub x_next: Vec<f64>,
    pub solution: StepSolution,
    pub rho: f64,
    pub delta: f64,
}

/// `d = P(x) − x` with its squared norm and `γ = (ρ + δ)/2`.
struct Direction {
    d: Vec<f64>,
    delta: f64,
    rho: f64,
    gamma: f64,
}

impl Direction {
    fn new(x: &[f64], outcome: &SweepOutcome, flops: &mut Flops) -> Result<Self, StepBreak> {
        assert_eq!(x.len(), outcome.endpoint.len(), "iterate and endpoint lengths differ");
        let d: Vec<f64> = outcome.endpoint.iter().zip(x).map(|(p, x)| p - x).collect();
        let delta: f64 = d.iter().map(|v| v * v).sum();
        flops.add(3 * x.len());
        if delta == 0.0 {
            return Err(StepBreak::Solved);
        }
        let rho = outcome.rho;
        Ok(Self {
            d,
            delta,
            rho,
            gamma: 0.5 * (rho + delta),
        })
    }

    fn line_search(self, x: &[f64], flops: &mut Flops) -> AcceleratedStep {
        let s = 0.5 + self.rho / (2.0 * self.delta);
        let x_next: Vec<f64> = x.iter().zip(&self.d).map(|(x, d)| x + s * d).collect();
        flops.add(2 * x.len());
        let gain = (self.rho + self.delta) * (self.rho + self.delta) / (4.0 * self.delta);
        AcceleratedStep {
            x_next,
            solution: StepSolution {
                s_bar: Vec::new(),
                s_under: s,
                gamma: self.gamma,
                predicted_gain: gain,
            },
            rho: self.rho,
            delta: self.delta,
        }
    }
}

/// Exact line search along `d = P(x) − x`:
/// `s* = 1/2 + ρ/(2δ)`, gain `(ρ + δ)²/(4δ)`.
///
/// Returns [`StepBreak::Solved`] when `δ = 0`.
pub fn line_search_step(x: &[f64], outcome: &SweepOutcome, flops: &mut Flops) -> Result<AcceleratedStep, StepBreak> {
    Ok(Direction::new(x, outcome, flops)?.line_search(x, flops))
}

/// Ring buffer of the latest iterates `x_{j_k}, …, x_k` (oldest first) and the
/// coefficients `α_i = γ_i s̲_i` of the steps between them.
///
/// Invariant: `alphas.len() + 1 == iterates.len()` and the capacity admits
/// `iterates.len()`.
#[derive(Debug, Clone)]
pub struct SearchWindow {
    capacity: WindowSize,
    iterates: VecDeque<Vec<f64>>,
    alphas: VecDeque<f64>,
    start: usize,
    k: usize,
}

impl SearchWindow {
    /// Panics on a bounded capacity of zero.
    pub fn new(capacity: WindowSize, x0: Vec<f64>) -> Self {
        assert!(capacity != WindowSize::Bounded(0), "window capacity must be at least 1");
        Self {
            capacity,
            iterates: VecDeque::from([x0]),
            alphas: VecDeque::new(),
            start: 0,
            k: 0,
        }
    }

    pub fn capacity(&self) -> WindowSize {
        self.capacity
    }

    /// The newest iterate `x_k`.
    pub fn current(&self) -> &[f64] {
        self.iterates.back().expect("window is never empty")
    }

    pub fn iterates(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.iterates.iter().map(Vec::as_slice)
    }

    pub fn alphas(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        self.alphas.iter().copied()
    }

    /// `k − j_k`, the number of columns of `V`.
    pub fn history_len(&self) -> usize {
        self.iterates.len() - 1
    }

    /// Iteration index `j_k` of the oldest stored iterate.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Iteration index `k` of the newest iterate.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Drops all history and keeps `x_k`; the next step restarts the startup phase.
    pub fn reset(&mut self) {
        let x = self.iterates.pop_back().expect("window is never empty");
        self.iterates.clear();
        self.iterates.push_back(x);
        self.alphas.clear();
        self.start = self.k;
    }

    fn push(&mut self, x_next: Vec<f64>, alpha: f64) {
        self.iterates.push_back(x_next);
        self.alphas.push_back(alpha);
        self.k += 1;
        if !self.capacity.admits(self.iterates.len()) {
            self.iterates.pop_front();
            self.alphas.pop_front();
            self.start += 1;
        }
    }

    fn accept(&mut self, step: &AcceleratedStep) {
        let alpha = step.solution.gamma * step.solution.s_under;
        self.push(step.x_next.clone(), alpha);
    }

    /// Columns `x_i − x_k` of `V`, oldest first. Charges `(k − j_k) n` flops.
    fn differences(&self, flops: &mut Flops) -> Vec<Vec<f64>> {
        let x = self.current();
        let w = self.history_len();
        flops.add(w * x.len());
        self.iterates
            .iter()
            .take(w)
            .map(|xi| xi.iter().zip(x).map(|(a, b)| a - b).collect())
            .collect()
    }

    /// `x_next = x_k + V s̄ + s̲ d`. Charges `2 (k − j_k + 1) n` flops.
    fn combine(&self, v: &[Vec<f64>], d: &[f64], sol: &StepSolution, flops: &mut Flops) -> Vec<f64> {
        let mut x_next = self.current().to_vec();
        for (col, &s) in v.iter().zip(&sol.s_bar) {
            for (xi, ci) in x_next.iter_mut().zip(col) {
                *xi += s * ci;
            }
        }
        for (xi, di) in x_next.iter_mut().zip(d) {
            *xi += sol.s_under * di;
        }
        flops.add(2 * (v.len() + 1) * d.len());
        x_next
    }

    /// Affine search step in linear time. On success the window advances to
    /// `x_{k+1}`; on any [`StepBreak`] it is left untouched.
    pub fn fast_step(&mut self, outcome: &SweepOutcome, flops: &mut Flops) -> Result<AcceleratedStep, StepBreak> {
        let dir = Direction::new(self.current(), outcome, flops)?;
        if self.history_len() == 0 {
            let step = dir.line_search(self.current(), flops);
            self.accept(&step);
            return Ok(step);
        }
        let alphas: Vec<f64> = self.alphas.iter().copied().collect();
        for (index, &value) in alphas.iter().enumerate() {
            if !(value > BREAKDOWN_RTOL * dir.gamma) || !value.is_finite() {
                return Err(StepBreak::Breakdown(Breakdown::Alpha { index, value }));
            }
        }
        let v = self.differences(flops);
        let p: Vec<f64> = v.iter().map(|col| dot(col, &dir.d)).collect();
        flops.add(2 * v.len() * dir.d.len());
        let q = tridiag_apply(&alphas, &p, flops)?;
        let solution = bordered_solve(&q, &p, dir.delta, dir.gamma, flops)?;
        if !(solution.s_under > 0.0) || !solution.s_under.is_finite() {
            return Err(StepBreak::Breakdown(Breakdown::Step {
                value: solution.s_under,
            }));
        }
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

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
