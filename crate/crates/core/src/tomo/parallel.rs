//! Parallel-beam projection matrices by exact ray/pixel intersection.
//!
//! The image occupies `[−N/2, N/2]²` with unit pixels. For angle `θ`, ray `i`
//! is the line through `t_i (cos θ, sin θ)` with direction `(−sin θ, cos θ)`,
//! where the offsets `t_i` are `p` equispaced values on `[−(p−1)/2, (p−1)/2]`.

use crate::error::TomoError;
use crate::sparse::SparseRowMatrix;

/// Scanner geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    /// Image side length in pixels.
    pub n: usize,
    /// Projection angles in degrees.
    pub angles: Vec<f64>,
    /// Rays per angle.
    pub rays: usize,
}

impl Geometry {
    /// Angles `0, 1, …, 179` and `round(√2 N)` rays per angle.
    pub fn default_for(n: usize) -> Self {
        Self {
            n,
            angles: (0..180).map(f64::from).collect(),
            rays: (std::f64::consts::SQRT_2 * n as f64).round() as usize,
        }
    }

    fn validate(&self) -> Result<(), TomoError> {
        if self.n < 2 {
            return Err(TomoError::GridSize(self.n));
        }
        if self.rays < 1 {
            return Err(TomoError::Rays);
        }
        if self.angles.is_empty() {
            return Err(TomoError::NoAngles);
        }
        Ok(())
    }

    /// Ray offsets `t_i`, spaced one pixel apart.
    pub fn offsets(&self) -> Vec<f64> {
        let p = self.rays;
        let half = (p as f64 - 1.0) / 2.0;
        (0..p).map(|i| i as f64 - half).collect()
    }
}

/// `(sin θ, cos θ)` for `θ` in degrees, exact at multiples of 90° and
/// exactly antipodal for `θ` and `θ + 180°`.
pub fn sin_cos_deg(theta: f64) -> (f64, f64) {
    let r = theta.rem_euclid(360.0);
    let (r, sign) = if r >= 180.0 { (r - 180.0, -1.0) } else { (r, 1.0) };
    let (s, c) = if r == 0.0 {
        (0.0, 1.0)
    } else if r == 90.0 {
        (1.0, 0.0)
    } else {
        r.to_radians().sin_cos()
    };
    (sign * s, sign * c)
}

/// Intersections `(pixel, length)` of one ray with the grid, in traversal order.
pub fn trace_ray(n: usize, theta_deg: f64, offset: f64) -> Vec<(usize, f64)> {
    let half = n as f64 / 2.0;
    let (s, c) = sin_cos_deg(theta_deg);
    let origin = [offset * c, offset * s];
    let dir = [-s, c];

    // parameter interval inside the square
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for k in 0..2 {
        if dir[k] == 0.0 {
            if origin[k].abs() > half {
                return Vec::new();
            }
        } else {
            let a = (-half - origin[k]) / dir[k];
            let b = (half - origin[k]) / dir[k];
            lo = lo.max(a.min(b));
            hi = hi.min(a.max(b));
        }
    }
    if !(hi > lo) {
        return Vec::new();
    }

    let mut cuts = vec![lo, hi];
    for k in 0..2 {
        if dir[k] != 0.0 {
            for g in 0..=n {
                let t = (g as f64 - half - origin[k]) / dir[k];
                if t > lo && t < hi {
                    cuts.push(t);
                }
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let eps = 1e-12 * n as f64;
    cuts.dedup_by(|b, a| (*b - *a).abs() <= eps);

    let mut out = Vec::with_capacity(2 * n);
    for w in cuts.windows(2) {
        let len = w[1] - w[0];
        if len <= eps {
            continue;
        }
        let mid = 0.5 * (w[0] + w[1]);
        let gx = origin[0] + mid * dir[0] + half;
        let gy = origin[1] + mid * dir[1] + half;
        // an axis-parallel ray lying on a grid line borders two pixel columns
        // (or rows); its length is shared equally between them
        let on_x_line = dir[0] == 0.0 && (gx - gx.round()).abs() <= eps;
        let on_y_line = dir[1] == 0.0 && (gy - gy.round()).abs() <= eps;
        let cols: Vec<(i64, f64)> = if on_x_line {
            vec![(gx.round() as i64 - 1, 0.5), (gx.round() as i64, 0.5)]
        } else {
            vec![(gx.floor() as i64, 1.0)]
        };
        let rows: Vec<(i64, f64)> = if on_y_line {
            vec![(gy.round() as i64 - 1, 0.5), (gy.round() as i64, 0.5)]
        } else {
            vec![(gy.floor() as i64, 1.0)]
        };
        for &(col, wc) in &cols {
            for &(row, wr) in &rows {
                if (0..n as i64).contains(&col) && (0..n as i64).contains(&row) {
                    out.push((row as usize * n + col as usize, len * wc * wr));
                }
            }
        }
    }
    out
}

/// System matrix with one row per ray that meets the image, ordered by
/// (angle, ray); rays missing the image are dropped. Column count is `N²`.
pub fn parallel_tomo(geometry: &Geometry) -> Result<SparseRowMatrix, TomoError> {
    geometry.validate()?;
    let n = geometry.n;
    let offsets = geometry.offsets();
    let mut row_offsets = vec![0usize];
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut row: Vec<(usize, f64)> = Vec::new();
    for &theta in &geometry.angles {
        for &t in &offsets {
            row.clear();
            row.extend(trace_ray(n, theta, t));
            if row.is_empty() {
                continue;
            }
            row.sort_by_key(|e| e.0);
            let start = cols.len();
            for &(c, v) in &row {
                if cols.len() > start && cols.last() == Some(&c) {
                    *vals.last_mut().expect("nonempty") += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                }
            }
            row_offsets.push(cols.len());
        }
    }
    if row_offsets.len() == 1 {
        return Err(TomoError::Empty);
    }
    Ok(SparseRowMatrix::from_csr(
        row_offsets.len() - 1,
        n * n,
        row_offsets,
        cols,
        vals,
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row_sum(r: &[(usize, f64)]) -> f64 {
        r.iter().map(|e| e.1).sum()
    }

    #[test]
    fn vertical_ray_through_left_column() {
        let g = Geometry {
            n: 2,
            angles: vec![0.0],
            rays: 2,
        };
        let a = parallel_tomo(&g).unwrap();
        assert_eq!(a.n_rows(), 2);
        assert_eq!(a.n_cols(), 4);
        // offset −0.5 is the line x = −0.5 through pixels (0,0) and (1,0)
        let r = a.row(0);
        assert_eq!(r.cols, &[0, 2]);
        assert_eq!(r.values, &[1.0, 1.0]);
    }

    #[test]
    fn diagonal_chord() {
        let r = trace_ray(4, 45.0, 0.0);
        assert!((row_sum(&r) - 4.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(r.len(), 4);
    }

    #[test]
    fn grid_line_ray_is_shared() {
        let r = trace_ray(2, 0.0, 0.0);
        assert_eq!(r.len(), 4);
        assert!(r.iter().all(|e| (e.1 - 0.5).abs() < 1e-15));
    }

    #[test]
    fn missing_rays_are_dropped() {
        assert!(trace_ray(4, 0.0, 2.5).is_empty());
        assert!(trace_ray(4, 30.0, 10.0).is_empty());
        let g = Geometry {
            n: 4,
            angles: vec![0.0],
            rays: 9,
        };
        let a = parallel_tomo(&g).unwrap();
        assert!(a.n_rows() < 9);
    }

    #[test]
    fn row_sums_bounded_by_diagonal() {
        let g = Geometry::default_for(8);
        let a = parallel_tomo(&g).unwrap();
        for j in 0..a.n_rows() {
            let s: f64 = a.row(j).values.iter().sum();
            assert!(s <= std::f64::consts::SQRT_2 * 8.0 + 1e-12);
            assert!(s > 0.0);
        }
    }

    #[test]
    fn antipodal_rays_agree() {
        for n in [3, 6, 11] {
            for theta in [0.0, 17.0, 45.0, 90.0, 133.5] {
                for t in [-2.25, -0.5, 0.0, 1.0, 1.7] {
                    let a = row_sum(&trace_ray(n, theta, t));
                    let b = row_sum(&trace_ray(n, theta + 180.0, -t));
                    assert!((a - b).abs() <= 1e-12, "n={n} θ={theta} t={t}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_geometry() {
        let mut g = Geometry::default_for(4);
        g.rays = 0;
        assert!(matches!(parallel_tomo(&g), Err(TomoError::Rays)));
        assert!(matches!(
            parallel_tomo(&Geometry::default_for(1)),
            Err(TomoError::GridSize(1))
        ));
        g.rays = 3;
        g.angles.clear();
        assert!(matches!(parallel_tomo(&g), Err(TomoError::NoAngles)));
    }

    #[test]
    fn exact_trig() {
        assert_eq!(sin_cos_deg(90.0), (1.0, 0.0));
        assert_eq!(sin_cos_deg(180.0), (-0.0, -1.0));
        assert_eq!(sin_cos_deg(270.0), (-1.0, -0.0));
        let (s, c) = sin_cos_deg(30.0);
        assert_eq!(sin_cos_deg(210.0), (-s, -c));
    }
}
