use super::realization::{AdmissibleTimes, Family, SemigroupRealization};
use super::verdict::EmbeddingMethod;
use crate::error::{Error, Result};
use crate::opcore::{volterra_matrix, CMatrix, C64};

pub const MIN_VOLTERRA_GRID: usize = 16;

/// Declared bound on `‖I^s I^t − I^{s+t}‖` for the cell-average
/// discretization at grids of at least 200 cells.
pub const VOLTERRA_QUADRATURE_BUDGET: f64 = 5e-3;

/// Galerkin matrix of the Riemann–Liouville integral `Iᵗ` on the cell
/// indicators of an `n`-cell grid of `[0, 1]`.
///
/// For `0 < t ≤ 1` the kernel `(τ−s)^{t−1}/Γ(t)` is integrated exactly over
/// each pair of cells, which gives a Toeplitz matrix with entries
/// `hᵗ/Γ(t+2)·[(k+1)^{t+1} − 2k^{t+1} + (k−1)₊^{t+1}]`, `k = i − j ≥ 0`.
/// At `t = 1` this is exactly [`volterra_matrix`]. Larger orders compose
/// the integer part as powers of the Volterra matrix.
pub fn fractional_integral_matrix(n: usize, t: f64) -> CMatrix {
    if t == 0.0 {
        return CMatrix::identity(n, n);
    }
    let whole = t.floor();
    let frac = t - whole;
    let v = volterra_matrix(n);
    let mut out = if frac > 0.0 {
        toeplitz_factor(n, frac)
    } else {
        CMatrix::identity(n, n)
    };
    for _ in 0..whole as usize {
        out = &v * out;
    }
    out
}

fn toeplitz_factor(n: usize, t: f64) -> CMatrix {
    let h = 1.0 / n as f64;
    let scale = h.powf(t) / libm::tgamma(t + 2.0);
    let p = t + 1.0;
    let coeffs: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                return scale;
            }
            let k = k as f64;
            scale * ((k + 1.0).powf(p) - 2.0 * k.powf(p) + (k - 1.0).powf(p))
        })
        .collect();
    CMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            C64::new(coeffs[i - j], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Fractional integration semigroup `t ↦ Iᵗ` on the `n`-cell grid.
pub fn embed_volterra(n: usize) -> Result<SemigroupRealization> {
    if n < MIN_VOLTERRA_GRID {
        return Err(Error::InvalidOperator(format!(
            "Volterra grid must have at least {MIN_VOLTERRA_GRID} cells, got {n}"
        )));
    }
    Ok(SemigroupRealization::new(
        Family::FractionalIntegral { n },
        AdmissibleTimes::Continuous,
        EmbeddingMethod::VolterraFractional,
    )
    .with_note(format!(
        "cell-average quadrature; semigroup law holds to {VOLTERRA_QUADRATURE_BUDGET:e}"
    )))
}
