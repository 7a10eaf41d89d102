//! Iteration loops for the six solver variants, stopping rules, the
//! repeat-until-progress guard for random epochs, and per-cycle tracing.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ConfigError;
use crate::flops::{CostModel, Flops};
use crate::kernel::{sweep_cycle, sweep_epoch_random, PlanSource, SweepOutcome, Weighting};
use crate::search::{line_search_step, AcceleratedStep, SearchWindow, StepBreak, WindowSize};
use crate::sparse::SparseRowMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Plain cyclic Kaczmarz.
    Kaczmarz,
    /// Kaczmarz with exact line search.
    LineSearch,
    /// Affine search via the assembled normal equations.
    AffineNaive,
    /// Affine search via the tridiagonal inverse and bordered solve.
    AffineFast,
    /// Random Kaczmarz, epochs of `m` projections.
    RandomKaczmarz,
    /// Random Kaczmarz with the fast affine search after each productive epoch.
    RandomAffine,
}

impl Variant {
    pub const ALL: [Variant; 6] = [
        Variant::Kaczmarz,
        Variant::LineSearch,
        Variant::AffineNaive,
        Variant::AffineFast,
        Variant::RandomKaczmarz,
        Variant::RandomAffine,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Kaczmarz => "k",
            Self::LineSearch => "k-ls",
            Self::AffineNaive => "k-aff",
            Self::AffineFast => "k-aff-fast",
            Self::RandomKaczmarz => "rk",
            Self::RandomAffine => "rk-aff",
        }
    }

    pub fn is_random(self) -> bool {
        matches!(self, Self::RandomKaczmarz | Self::RandomAffine)
    }

    /// Whether the variant keeps a search window of past iterates.
    pub fn uses_window(self) -> bool {
        matches!(self, Self::AffineNaive | Self::AffineFast | Self::RandomAffine)
    }

    fn min_window(self) -> usize {
        match self {
            Self::AffineFast | Self::RandomAffine => 2,
            _ => 1,
        }
    }
}

impl FromStr for Variant {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s.trim())
            .ok_or_else(|| ConfigError::Unknown {
                kind: "variant",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub variant: Variant,
    /// Window capacity `ℓ`; ignored by variants without a window.
    pub ell: WindowSize,
    pub max_cycles: usize,
    /// Deterministic variants stop once `δ ≤ tol² · max(1, ‖x‖²)`.
    pub tol: f64,
    pub seed: u64,
    pub weighting: Weighting,
    /// Apply a seeded random permutation to the rows of `A` and `b` first.
    pub shuffle_rows: bool,
    /// Consecutive no-progress random epochs after which the run is declared solved.
    pub no_progress_cap: usize,
    /// Keep every iterate `x_0, x_1, …` in the trace.
    pub record_iterates: bool,
}

impl SolverConfig {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            ell: WindowSize::Bounded(10),
            max_cycles: 1000,
            tol: 1e-12,
            seed: 0,
            weighting: Weighting::Uniform,
            shuffle_rows: true,
            no_progress_cap: 100,
            record_iterates: false,
        }
    }

    pub fn with_ell(mut self, ell: WindowSize) -> Self {
        self.ell = ell;
        self
    }

    pub fn with_max_cycles(mut self, max_cycles: usize) -> Self {
        self.max_cycles = max_cycles;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_shuffle(mut self, shuffle_rows: bool) -> Self {
        self.shuffle_rows = shuffle_rows;
        self
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    pub fn recording_iterates(mut self) -> Self {
        self.record_iterates = true;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(ConfigError::Tolerance(self.tol));
        }
        if self.max_cycles == 0 {
            return Err(ConfigError::MaxCycles);
        }
        if self.variant.uses_window() {
            if let WindowSize::Bounded(l) = self.ell {
                let min = self.variant.min_window();
                if l < min {
                    return Err(ConfigError::Window {
                        variant: self.variant.name(),
                        min,
                        got: l,
                    });
                }
            }
        }
        Ok(())
    }
}

/// What the driver did with the sweep of a cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    /// Took the sweep end point as the next iterate.
    Plain,
    LineSearch,
    Affine,
    /// Random epoch that made no progress; the iterate is unchanged.
    Rejected,
    /// The sweep showed the iterate solves the system; no step taken.
    Terminal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    /// `‖x_k − x*‖` when the solution is known.
    pub error: Option<f64>,
    /// `‖P(x_k) − x*‖` when the solution is known.
    pub sweep_error: Option<f64>,
    pub rho: f64,
    pub delta: f64,
    pub gamma: Option<f64>,
    pub s_under: Option<f64>,
    pub predicted_gain: Option<f64>,
    /// `k − j_k` at the time of the step.
    pub window_len: usize,
    pub kind: StepKind,
    /// The window was reset during this cycle.
    pub breakdown: bool,
    pub flops: Flops,
    pub cum_flops: Flops,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    MaxCycles,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Solved => "solved",
            Self::MaxCycles => "max-cycles",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub variant: Variant,
    pub ell: WindowSize,
    pub records: Vec<CycleRecord>,
    pub status: Status,
    pub breakdown_resets: usize,
    /// Final iterate.
    pub solution: Vec<f64>,
    pub final_error: Option<f64>,
    /// `x_0, x_1, …` when requested by the config.
    pub iterates: Option<Vec<Vec<f64>>>,
}

impl IterationTrace {
    /// Number of cycles after which the iterate stopped changing or the
    /// budget ran out: the index of the final iterate.
    pub fn cycles(&self) -> usize {
        match self.records.last() {
            Some(r) if r.kind == StepKind::Terminal => r.cycle,
            Some(r) => r.cycle + 1,
            None => 0,
        }
    }

    /// `‖x_k − x*‖` for `k = 0, …, cycles()`, when the solution was known.
    pub fn error_curve(&self) -> Option<Vec<f64>> {
        let mut out: Vec<f64> = self.records.iter().map(|r| r.error).collect::<Option<_>>()?;
        if self.records.last().is_some_and(|r| r.kind != StepKind::Terminal) {
            out.push(self.final_error?);
        }
        Some(out)
    }

    /// Total flops spent.
    pub fn total_flops(&self) -> Flops {
        self.records.last().map_or(Flops::default(), |r| r.cum_flops)
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

fn step_delta(x: &[f64], endpoint: &[f64]) -> f64 {
    x.iter().zip(endpoint).map(|(a, b)| (b - a) * (b - a)).sum()
}

/// Seed-deterministic row permutation.
pub fn row_shuffle(m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Result of drawing random epochs until one moves the iterate.
#[derive(Debug, Clone)]
pub struct GuardedEpoch {
    /// The productive epoch, if one was found within the budget.
    pub accepted: Option<SweepOutcome>,
    /// Epochs whose end point equalled the start point, in draw order.
    pub rejected: Vec<SweepOutcome>,
    /// The consecutive no-progress cap was hit.
    pub exhausted: bool,
}

/// Draws random epochs from a [`PlanSource`] with a running epoch counter.
#[derive(Debug, Clone)]
pub struct EpochGuard {
    source: PlanSource,
    next_epoch: u64,
    cap: usize,
    misses: usize,
}

impl EpochGuard {
    pub fn new(source: PlanSource, cap: usize) -> Self {
        Self {
            source,
            next_epoch: 0,
            cap: cap.max(1),
            misses: 0,
        }
    }

    /// Index of the next epoch to be drawn.
    pub fn next_epoch(&self) -> u64 {
        self.next_epoch
    }

    /// Repeats random epochs from `x` until the end point differs from `x`
    /// by more than `1e-15 · max(1, ‖x‖)`. Stops early after `budget` epochs
    /// or once `cap` consecutive epochs made no progress.
    pub fn run_random_epoch_guarded(
        &mut self,
        a: &SparseRowMatrix,
        b: &[f64],
        x: &[f64],
        budget: usize,
    ) -> GuardedEpoch {
        let threshold = 1e-15 * norm_sq(x).sqrt().max(1.0);
        let mut rejected = Vec::new();
        for _ in 0..budget {
            let plan = self.source.plan(self.next_epoch);
            self.next_epoch += 1;
            let out = sweep_epoch_random(a, b, x, &plan);
            if step_delta(x, &out.endpoint).sqrt() > threshold {
                self.misses = 0;
                return GuardedEpoch {
                    accepted: Some(out),
                    rejected,
                    exhausted: false,
                };
            }
            rejected.push(out);
            self.misses += 1;
            if self.misses >= self.cap {
                return GuardedEpoch {
                    accepted: None,
                    rejected,
                    exhausted: true,
                };
            }
        }
        GuardedEpoch {
            accepted: None,
            rejected,
            exhausted: false,
        }
    }
}

/// Accelerated state shared by the loops.
enum Stepper {
    Plain,
    LineSearch,
    Window { window: SearchWindow, fast: bool },
}

impl Stepper {
    fn new(cfg: &SolverConfig, x0: &[f64]) -> Self {
        match cfg.variant {
            Variant::Kaczmarz | Variant::RandomKaczmarz => Self::Plain,
            Variant::LineSearch => Self::LineSearch,
            Variant::AffineNaive => Self::Window {
                window: SearchWindow::new(cfg.ell, x0.to_vec()),
                fast: false,
            },
            Variant::AffineFast | Variant::RandomAffine => Self::Window {
                window: SearchWindow::new(cfg.ell, x0.to_vec()),
                fast: true,
            },
        }
    }
}

struct StepResult {
    x_next: Vec<f64>,
    step: Option<AcceleratedStep>,
    kind: StepKind,
    window_len: usize,
    breakdown: bool,
}

impl Stepper {
    /// Advances from `x` using the sweep outcome. `Err(())` means solved.
    fn step(&mut self, x: &[f64], out: SweepOutcome, m: usize, flops: &mut Flops) -> Result<StepResult, ()> {
        match self {
            Self::Plain => Ok(StepResult {
                x_next: out.endpoint,
                step: None,
                kind: StepKind::Plain,
                window_len: 0,
                breakdown: false,
            }),
            Self::LineSearch => {
                flops.add(2 * m);
                let step = line_search_step(x, &out, flops).map_err(|_| ())?;
                Ok(StepResult {
                    x_next: step.x_next.clone(),
                    step: Some(step),
                    kind: StepKind::LineSearch,
                    window_len: 0,
                    breakdown: false,
                })
            }
            Self::Window { window, fast } => {
                flops.add(2 * m);
                let window_len = window.history_len();
                let attempt = |w: &mut SearchWindow, flops: &mut Flops| {
                    if *fast {
                        w.fast_step(&out, flops)
                    } else {
                        w.naive_step(&out, flops)
                    }
                };
                let (step, breakdown) = match attempt(window, flops) {
                    Ok(step) => (step, false),
                    Err(StepBreak::Solved) => return Err(()),
                    Err(StepBreak::Breakdown(_)) => {
                        window.reset();
                        (attempt(window, flops).map_err(|_| ())?, true)
                    }
                };
                Ok(StepResult {
                    x_next: step.x_next.clone(),
                    step: Some(step),
                    kind: StepKind::Affine,
                    window_len: if breakdown { 0 } else { window_len },
                    breakdown,
                })
            }
        }
    }
}

/// Runs the configured solver on `A x = b` from `x0`.
///
/// `x_star` is only used to record errors; the algorithms never read it.
pub fn run(
    a: &SparseRowMatrix,
    b: &[f64],
    x0: &[f64],
    x_star: Option<&[f64]>,
    cfg: &SolverConfig,
) -> Result<IterationTrace, ConfigError> {
    cfg.validate()?;
    if b.len() != a.n_rows() {
        return Err(ConfigError::Dimension(format!(
            "rhs has length {}, matrix has {} rows",
            b.len(),
            a.n_rows()
        )));
    }
    if x0.len() != a.n_cols() {
        return Err(ConfigError::Dimension(format!(
            "initial guess has length {}, matrix has {} columns",
            x0.len(),
            a.n_cols()
        )));
    }
    if let Some(xs) = x_star {
        if xs.len() != a.n_cols() {
            return Err(ConfigError::Dimension(format!(
                "solution has length {}, matrix has {} columns",
                xs.len(),
                a.n_cols()
            )));
        }
    }

    let (a, b): (Cow<SparseRowMatrix>, Cow<[f64]>) = if cfg.shuffle_rows {
        let perm = row_shuffle(a.n_rows(), cfg.seed);
        let pb: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
        (Cow::Owned(a.permute_rows(&perm)), Cow::Owned(pb))
    } else {
        (Cow::Borrowed(a), Cow::Borrowed(b))
    };
    let (a, b) = (a.as_ref(), b.as_ref());
    let m = a.n_rows();
    let err = |x: &[f64]| x_star.map(|xs| dist(x, xs));

    let mut stepper = Stepper::new(cfg, x0);
    let mut guard = cfg
        .variant
        .is_random()
        .then(|| EpochGuard::new(PlanSource::new(a, cfg.seed, cfg.weighting), cfg.no_progress_cap));
    let mut x = x0.to_vec();
    let mut iterates = cfg.record_iterates.then(|| vec![x.clone()]);
    let mut records: Vec<CycleRecord> = Vec::new();
    let mut cum = Flops::default();
    let mut resets = 0;
    let mut status = Status::MaxCycles;

    let push = |records: &mut Vec<CycleRecord>, mut rec: CycleRecord, cum: &mut Flops| {
        *cum += rec.flops;
        rec.cum_flops = *cum;
        records.push(rec);
    };
    let blank = |x: &[f64], out: &SweepOutcome, kind: StepKind| CycleRecord {
        cycle: 0,
        error: err(x),
        sweep_error: err(&out.endpoint),
        rho: out.rho,
        delta: step_delta(x, &out.endpoint),
        gamma: None,
        s_under: None,
        predicted_gain: None,
        window_len: 0,
        kind,
        breakdown: false,
        flops: out.flops,
        cum_flops: Flops::default(),
    };

    while records.len() < cfg.max_cycles {
        let out = match guard.as_mut() {
            None => {
                let out = sweep_cycle(a, b, &x);
                let delta = step_delta(&x, &out.endpoint);
                if delta <= cfg.tol * cfg.tol * norm_sq(&x).max(1.0) {
                    let mut rec = blank(&x, &out, StepKind::Terminal);
                    rec.cycle = records.len();
                    push(&mut records, rec, &mut cum);
                    status = Status::Solved;
                    break;
                }
                out
            }
            Some(g) => {
                let budget = cfg.max_cycles - records.len();
                let drawn = g.run_random_epoch_guarded(a, b, &x, budget);
                for rej in &drawn.rejected {
                    let mut rec = blank(&x, rej, StepKind::Rejected);
                    rec.cycle = records.len();
                    push(&mut records, rec, &mut cum);
                }
                if drawn.exhausted {
                    status = Status::Solved;
                    break;
                }
                match drawn.accepted {
                    Some(out) => out,
                    None => break,
                }
            }
        };

        let mut rec = blank(&x, &out, StepKind::Plain);
        rec.cycle = records.len();
        let mut flops = out.flops;
        match stepper.step(&x, out, m, &mut flops) {
            Ok(res) => {
                if let Some(step) = &res.step {
                    rec.gamma = Some(step.solution.gamma);
                    rec.s_under = Some(step.solution.s_under);
                    rec.predicted_gain = Some(step.solution.predicted_gain);
                }
                rec.kind = res.kind;
                rec.window_len = res.window_len;
                rec.breakdown = res.breakdown;
                resets += usize::from(res.breakdown);
                rec.flops = flops;
                push(&mut records, rec, &mut cum);
                x = res.x_next;
                if let Some(its) = iterates.as_mut() {
                    its.push(x.clone());
                }
            }
            Err(()) => {
                rec.kind = StepKind::Terminal;
                rec.flops = flops;
                push(&mut records, rec, &mut cum);
                status = Status::Solved;
                break;
            }
        }
    }

    Ok(IterationTrace {
        variant: cfg.variant,
        ell: cfg.ell,
        records,
        status,
        breakdown_resets: resets,
        final_error: err(&x),
        solution: x,
        iterates,
    })
}

/// Comparison of instrumented per-cycle flops with the closed-form model.
#[derive(Debug, Clone, PartialEq)]
pub struct FlopReport {
    /// Cycles compared against a model value.
    pub checked: usize,
    pub max_abs_deviation: f64,
    pub max_rel_deviation: f64,
}

/// Compares each completed step's flop count with the model for its variant.
///
/// Affine steps are compared only once the window is full (for an unbounded
/// window, against the model at the window's current size); terminal,
/// rejected and breakdown cycles are skipped.
pub fn flop_check(trace: &IterationTrace, a: &SparseRowMatrix) -> FlopReport {
    let model = CostModel::for_matrix(a);
    let mut report = FlopReport {
        checked: 0,
        max_abs_deviation: 0.0,
        max_rel_deviation: 0.0,
    };
    for rec in &trace.records {
        if rec.breakdown {
            continue;
        }
        let expected = match rec.kind {
            StepKind::Plain => model.plain(),
            StepKind::LineSearch => model.line_search(),
            StepKind::Affine => {
                let ell = rec.window_len + 1;
                let full = match trace.ell {
                    WindowSize::Bounded(l) => ell == l,
                    WindowSize::Unbounded => rec.window_len > 0,
                };
                if !full {
                    continue;
                }
                match trace.variant {
                    Variant::AffineNaive => model.naive_affine(ell),
                    _ => model.fast_affine(ell),
                }
            }
            StepKind::Rejected | StepKind::Terminal => continue,
        };
        let dev = (rec.flops.0 as f64 - expected).abs();
        report.checked += 1;
        report.max_abs_deviation = report.max_abs_deviation.max(dev);
        report.max_rel_deviation = report.max_rel_deviation.max(dev / expected);
    }
    report
}
