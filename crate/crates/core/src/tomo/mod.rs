//! Tomography benchmark problems: a parallel-beam system matrix applied to
//! the modified Shepp-Logan phantom.

mod parallel;
mod phantom;

use std::path::Path;

pub use parallel::{parallel_tomo, sin_cos_deg, trace_ray, Geometry};
pub use phantom::{shepp_logan, shepp_logan_at, MODIFIED_SHEPP_LOGAN};

use crate::error::TomoError;
use crate::io::{write_matrix_market_file, write_vector_file};
use crate::sparse::SparseRowMatrix;

/// A consistent system `A x* = b`.
#[derive(Debug, Clone)]
pub struct TomoProblem {
    pub matrix: SparseRowMatrix,
    pub x_star: Vec<f64>,
    pub b: Vec<f64>,
    pub geometry: Geometry,
}

impl TomoProblem {
    pub fn new(geometry: Geometry) -> Result<Self, TomoError> {
        let matrix = parallel_tomo(&geometry)?;
        let x_star = shepp_logan(geometry.n);
        let b = matrix.mul_vec(&x_star);
        Ok(Self {
            matrix,
            x_star,
            b,
            geometry,
        })
    }

    /// Problem with the default geometry for an `N × N` image.
    pub fn with_defaults(n: usize) -> Result<Self, TomoError> {
        Self::new(Geometry::default_for(n))
    }

    /// Writes `A.mtx`, `b.txt` and `x_star.txt` into `dir` (created if needed).
    pub fn export(&self, dir: impl AsRef<Path>) -> std::io::Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        write_matrix_market_file(&self.matrix, dir.join("A.mtx"))?;
        write_vector_file(&self.b, dir.join("b.txt"))?;
        write_vector_file(&self.x_star, dir.join("x_star.txt"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistent_by_construction() {
        let p = TomoProblem::with_defaults(10).unwrap();
        let r = p.matrix.mul_vec(&p.x_star);
        let scale = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let err = r.iter().zip(&p.b).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
        assert!(err <= 1e-14 * scale);
        assert!(p.matrix.row_norm_sq().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn scenario_a_shape() {
        let p = TomoProblem::with_defaults(10).unwrap();
        let (m, nnz) = (p.matrix.n_rows() as f64, p.matrix.nnz() as f64);
        assert_eq!(p.matrix.n_cols(), 100);
        assert!((m - 2296.0).abs() / 2296.0 <= 0.15, "m = {m}");
        assert!((nnz - 22820.0).abs() / 22820.0 <= 0.25, "nnz = {nnz}");
    }

    #[test]
    fn export_round_trips() {
        let p = TomoProblem::with_defaults(4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        p.export(dir.path()).unwrap();
        let a = crate::io::read_matrix_market_file(dir.path().join("A.mtx")).unwrap();
        assert_eq!(a, p.matrix);
        assert_eq!(crate::io::read_vector_file(dir.path().join("b.txt")).unwrap(), p.b);
    }
}
