//! Row projections, the full deterministic cycle and the randomized epoch.
//!
//! A sweep evaluates the normalized defect of each row right before
//! projecting onto it. The squared defects add up to `ρ = ‖r(x)‖²`, so the
//! internal residual comes out of the sweep without another pass over `A`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::flops::Flops;
use crate::sparse::SparseRowMatrix;

/// Result of one cycle or epoch started from some `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    /// `P(x)` for a cycle, the epoch end point for a random epoch.
    pub endpoint: Vec<f64>,
    /// `ρ = ‖r(x)‖²`, the sum of squared normalized pre-projection defects.
    pub rho: f64,
    /// The residual vector `r(x)`, only when requested.
    pub residual: Option<Vec<f64>>,
    /// Cost of the sweep: `4 nnz_j + 1` per projected row.
    pub flops: Flops,
}

/// Projects `x` onto the hyperplane `a_jᵀz = b_j` in place and returns the
/// defect `a_jᵀx − b_j` evaluated before the projection.
#[inline]
pub fn project_row_in_place(a: &SparseRowMatrix, j: usize, b_j: f64, x: &mut [f64]) -> f64 {
    let row = a.row(j);
    let mut defect = -b_j;
    for (&c, &v) in row.cols.iter().zip(row.values) {
        defect += v * x[c];
    }
    let scale = defect / row.norm_sq;
    for (&c, &v) in row.cols.iter().zip(row.values) {
        x[c] -= scale * v;
    }
    defect
}

/// `P_j(x) = x + (b_j − a_jᵀx)/‖a_j‖² · a_j`
pub fn project_row(a: &SparseRowMatrix, j: usize, b_j: f64, x: &[f64]) -> Vec<f64> {
    assert!(j < a.n_rows(), "row {j} out of range");
    assert_eq!(x.len(), a.n_cols());
    let mut out = x.to_vec();
    project_row_in_place(a, j, b_j, &mut out);
    out
}

fn sweep_rows(
    a: &SparseRowMatrix,
    b: &[f64],
    x: &[f64],
    rows: impl Iterator<Item = usize>,
    with_residual: bool,
) -> SweepOutcome {
    assert_eq!(b.len(), a.n_rows(), "rhs length must equal row count");
    assert_eq!(x.len(), a.n_cols(), "iterate length must equal column count");
    let mut endpoint = x.to_vec();
    let mut residual = with_residual.then(|| Vec::with_capacity(a.n_rows()));
    let mut rho = 0.0;
    let mut flops = Flops::default();
    let norms = a.row_norm_sq();
    for j in rows {
        let defect = project_row_in_place(a, j, b[j], &mut endpoint);
        rho += defect * (defect / norms[j]);
        flops.add(4 * a.row(j).nnz() + 1);
        if let Some(r) = residual.as_mut() {
            r.push(defect / norms[j].sqrt());
        }
    }
    SweepOutcome {
        endpoint,
        rho,
        residual,
        flops,
    }
}

/// One full cycle `P = P_m ∘ … ∘ P_1` from `x`.
pub fn sweep_cycle(a: &SparseRowMatrix, b: &[f64], x: &[f64]) -> SweepOutcome {
    sweep_rows(a, b, x, 0..a.n_rows(), false)
}

/// Like [`sweep_cycle`] but also materializes the residual vector `r(x)`.
pub fn sweep_cycle_with_residual(a: &SparseRowMatrix, b: &[f64], x: &[f64]) -> SweepOutcome {
    sweep_rows(a, b, x, 0..a.n_rows(), true)
}

/// One epoch of `m` projections in the order given by `plan`.
///
/// Panics unless the plan holds exactly `m` valid row indices.
pub fn sweep_epoch_random(a: &SparseRowMatrix, b: &[f64], x: &[f64], plan: &EpochPlan) -> SweepOutcome {
    assert_eq!(plan.indices.len(), a.n_rows(), "plan must hold exactly m indices");
    assert!(plan.indices.iter().all(|&i| i < a.n_rows()), "plan index out of range");
    sweep_rows(a, b, x, plan.indices.iter().copied(), false)
}

/// Row sampling distribution for random epochs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Weighting {
    /// Uniform with replacement.
    #[default]
    Uniform,
    /// Probability proportional to `‖a_j‖²`.
    SquaredNorm,
}

impl std::str::FromStr for Weighting {
    type Err = crate::error::ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "rownorm" | "squared-norm" => Ok(Self::SquaredNorm),
            other => Err(crate::error::ConfigError::Unknown {
                kind: "weighting",
                value: other.to_string(),
            }),
        }
    }
}

/// The row sequence of one random epoch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpochPlan {
    pub indices: Vec<usize>,
    pub seed: u64,
    pub epoch: u64,
    pub weighting: Weighting,
}

impl EpochPlan {
    /// The cyclic order `0, 1, …, m−1`.
    pub fn identity(m: usize) -> Self {
        Self {
            indices: (0..m).collect(),
            seed: 0,
            epoch: 0,
            weighting: Weighting::Uniform,
        }
    }
}

/// Draws epoch plans reproducibly: the rows of epoch `k` come from a
/// ChaCha8 stream selected by `k` under key `seed`, so index `j` of epoch
/// `k` depends only on `(seed, k, j)`.
#[derive(Debug, Clone)]
pub struct PlanSource {
    seed: u64,
    m: usize,
    weighting: Weighting,
    weights: Option<WeightedIndex<f64>>,
}

impl PlanSource {
    pub fn new(a: &SparseRowMatrix, seed: u64, weighting: Weighting) -> Self {
        let weights = match weighting {
            Weighting::Uniform => None,
            Weighting::SquaredNorm => {
                Some(WeightedIndex::new(a.row_norm_sq().iter().copied()).expect("row norms are positive and finite"))
            }
        };
        Self {
            seed,
            m: a.n_rows(),
            weighting,
            weights,
        }
    }

    pub fn plan(&self, epoch: u64) -> EpochPlan {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(epoch);
        let indices = match &self.weights {
            None => (0..self.m).map(|_| rng.random_range(0..self.m)).collect(),
            Some(w) => (0..self.m).map(|_| w.sample(&mut rng)).collect(),
        };
        EpochPlan {
            indices,
            seed: self.seed,
            epoch,
            weighting: self.weighting,
        }
    }
}
