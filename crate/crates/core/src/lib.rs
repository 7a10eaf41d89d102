//! Kaczmarz solvers for sparse consistent systems `Ax = b`, with line-search
//! and windowed affine-subspace acceleration, randomized variants, flop
//! instrumentation and a tomography benchmark generator.
//!
//! ```
//! use gk_kaczmarz::{run, SolverConfig, SparseRowMatrix, Variant, WindowSize};
//!
//! let a = SparseRowMatrix::from_dense_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
//! let x_star = [1.0, -1.0];
//! let b = a.mul_vec(&x_star);
//! let cfg = SolverConfig::new(Variant::AffineFast).with_ell(WindowSize::Bounded(2));
//! let trace = run(&a, &b, &[0.0, 0.0], Some(&x_star), &cfg).unwrap();
//! assert!(trace.final_error.unwrap() < 1e-10);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod driver;
pub mod error;
pub mod flops;
pub mod io;
pub mod kernel;
pub mod search;
pub mod sparse;
pub mod tomo;
pub mod trace;

pub use driver::{flop_check, run, IterationTrace, SolverConfig, Status, StepKind, Variant};
pub use error::{ConfigError, MatrixError, ParseError, TomoError};
pub use flops::{CostModel, Flops};
pub use kernel::{sweep_cycle, SweepOutcome, Weighting};
pub use search::{SearchWindow, WindowSize};
pub use sparse::SparseRowMatrix;
pub use tomo::TomoProblem;
pub use trace::{CompareRow, TraceRow};
