//! Modified Shepp-Logan head phantom.

/// `(intensity, semi-axis x, semi-axis y, center x, center y, rotation in degrees)`
/// on the square `[−1, 1]²`. Standard modified parameter set (Toft's
/// contrast-enhanced variant), 10 ellipses.
pub const MODIFIED_SHEPP_LOGAN: [[f64; 6]; 10] = [
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0],
    [-0.2, 0.11, 0.31, 0.22, 0.0, -18.0],
    [-0.2, 0.16, 0.41, -0.22, 0.0, 18.0],
    [0.1, 0.21, 0.25, 0.0, 0.35, 0.0],
    [0.1, 0.046, 0.046, 0.0, 0.1, 0.0],
    [0.1, 0.046, 0.046, 0.0, -0.1, 0.0],
    [0.1, 0.046, 0.023, -0.08, -0.605, 0.0],
    [0.1, 0.023, 0.023, 0.0, -0.606, 0.0],
    [0.1, 0.023, 0.046, 0.06, -0.605, 0.0],
];

/// Phantom value at `(x, y) ∈ [−1, 1]²`: the sum of the intensities of all
/// ellipses containing the point, with round-off below zero clamped.
pub fn shepp_logan_at(x: f64, y: f64) -> f64 {
    let mut v = 0.0;
    for &[intensity, a, b, x0, y0, phi] in &MODIFIED_SHEPP_LOGAN {
        let (s, c) = phi.to_radians().sin_cos();
        let (dx, dy) = (x - x0, y - y0);
        let u = dx * c + dy * s;
        let w = -dx * s + dy * c;
        if (u / a).powi(2) + (w / b).powi(2) <= 1.0 {
            v += intensity;
        }
    }
    v.max(0.0)
}

/// Rasterizes the phantom on an `N × N` grid over `[−1, 1]²`, sampling at
/// pixel centers. Pixel `(row, col)` is stored at `row · N + col`; rows run
/// along increasing `y`, columns along increasing `x`.
///
/// Panics if `n < 2`.
pub fn shepp_logan(n: usize) -> Vec<f64> {
    assert!(n >= 2, "phantom needs N >= 2");
    let h = 2.0 / n as f64;
    let mut out = Vec::with_capacity(n * n);
    for row in 0..n {
        let y = -1.0 + (row as f64 + 0.5) * h;
        for col in 0..n {
            let x = -1.0 + (col as f64 + 0.5) * h;
            out.push(shepp_logan_at(x, y));
        }
    }
    out
}
