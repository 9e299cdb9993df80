use std::cmp::Ordering;
use std::f64::consts::TAU;

use nalgebra::Schur;

use super::matrix::{CMatrix, MatrixOperator, C64};
use crate::error::{Error, Result};

/// Complex Schur form `m = Q T Q*` with `T` upper triangular.
pub(crate) fn schur(m: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let n = m.nrows();
    if is_upper_triangular(m) {
        return Ok((CMatrix::identity(n, n), m.clone()));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 1000 * n.max(10))
        .ok_or(Error::NonConvergence("Schur iteration"))?;
    let (q, mut t) = schur.unpack();
    // the iteration leaves rounding-level debris below the diagonal
    for j in 0..n {
        for i in (j + 1)..n {
            t[(i, j)] = C64::new(0.0, 0.0);
        }
    }
    Ok((q, t))
}

fn is_upper_triangular(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| ((j + 1)..n).all(|i| m[(i, j)] == C64::new(0.0, 0.0)))
}

fn is_lower_triangular(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..j).all(|i| m[(i, j)] == C64::new(0.0, 0.0)))
}

/// Eigenvalues with multiplicity, sorted by descending modulus, then by
/// phase in `[0, 2π)`.
pub fn spectrum(m: &MatrixOperator) -> Result<Vec<C64>> {
    let a = m.matrix();
    let mut eigs: Vec<C64> = if is_upper_triangular(a) || is_lower_triangular(a) {
        a.diagonal().iter().copied().collect()
    } else {
        let (_, t) = schur(a)?;
        t.diagonal().iter().copied().collect()
    };
    sort_spectrum(&mut eigs);
    Ok(eigs)
}

pub(crate) fn unsigned_phase(z: C64) -> f64 {
    let p = z.arg();
    if p < 0.0 {
        (p + TAU) % TAU
    } else {
        p
    }
}

pub fn sort_spectrum(eigs: &mut [C64]) {
    eigs.sort_by(|a, b| {
        let (ra, rb) = (a.norm(), b.norm());
        let scale = ra.max(rb).max(1.0);
        if (ra - rb).abs() > 1e-12 * scale {
            rb.total_cmp(&ra)
        } else {
            unsigned_phase(*a)
                .total_cmp(&unsigned_phase(*b))
                .then(Ordering::Equal)
        }
    });
}
