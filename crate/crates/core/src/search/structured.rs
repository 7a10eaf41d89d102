//! Linear-time solves for the structured Gram matrices of the search window.
//!
//! With `f_j = e_1 + … + e_j`, the window Gram matrix has the form
//! `B(α) = Σ_j α_j f_j f_jᵀ`, i.e. `B_ik = Σ_{h ≥ max(i,k)} α_h`. Its inverse
//! is the tridiagonal matrix `C(α)` with `1/α_{i−1} + 1/α_i` on the diagonal
//! (the `1/α_0` term absent in the first row) and `−1/α_i` beside it.

use super::{dot, Breakdown, StepBreak, StepSolution, BREAKDOWN_RTOL};
use crate::flops::Flops;

/// `q = C(α) p`, equivalently the solution of `B(α) q = p`.
///
/// Uses `q_i = u_i − u_{i−1}` with `u_i = (p_i − p_{i+1}) / α_i` and
/// `u_last = p_last / α_last`, which costs `3w − 2` flops for length `w`.
pub fn tridiag_apply(alphas: &[f64], p: &[f64], flops: &mut Flops) -> Result<Vec<f64>, StepBreak> {
    assert_eq!(alphas.len(), p.len(), "alphas and p must have equal length");
    let w = p.len();
    if w == 0 {
        return Ok(Vec::new());
    }
    if let Some((index, &value)) = alphas.iter().enumerate().find(|(_, a)| **a == 0.0 || !a.is_finite()) {
        return Err(StepBreak::Breakdown(Breakdown::Alpha { index, value }));
    }
    let mut q = Vec::with_capacity(w);
    let mut prev_u = 0.0;
    for i in 0..w {
        let u = if i + 1 < w {
            (p[i] - p[i + 1]) / alphas[i]
        } else {
            p[i] / alphas[i]
        };
        q.push(u - prev_u);
        prev_u = u;
    }
    flops.add(3 * w - 2);
    Ok(q)
}

/// Solves `[[B, p], [pᵀ, δ]] s = γ e_last` given `q = B⁻¹p`:
/// `s̲ = γ / (δ − pᵀq)` and `s̄ = −s̲ q`. Costs `3w` flops.
///
/// Signals a breakdown when `|δ − pᵀq| ≤ 1e-14 · max(δ, |pᵀq|)`.
pub fn bordered_solve(
    q: &[f64],
    p: &[f64],
    delta: f64,
    gamma: f64,
    flops: &mut Flops,
) -> Result<StepSolution, StepBreak> {
    assert_eq!(q.len(), p.len(), "q and p must have equal length");
    let ptq = dot(p, q);
    let schur = delta - ptq;
    flops.add(2 * p.len());
    if !(schur.abs() > BREAKDOWN_RTOL * delta.abs().max(ptq.abs())) || !schur.is_finite() {
        return Err(StepBreak::Breakdown(Breakdown::Schur { value: schur }));
    }
    let s_under = gamma / schur;
    let s_bar: Vec<f64> = q.iter().map(|qi| -s_under * qi).collect();
    flops.add(q.len());
    Ok(StepSolution {
        s_bar,
        s_under,
        gamma,
        predicted_gain: gamma * s_under,
    })
}
