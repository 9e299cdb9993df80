use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

/// A dense square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator(CMatrix);

impl MatrixOperator {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidOperator(format!(
                "matrix is {}x{}, expected square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.nrows() == 0 {
            return Err(Error::InvalidOperator("matrix has dimension 0".into()));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(MatrixOperator(m))
    }

    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::InvalidOperator(format!(
                "{} entries given for dimension {dim}",
                entries.len()
            )));
        }
        Self::new(CMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let entries: Vec<C64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(dim, &entries)
    }

    pub fn identity(dim: usize) -> Self {
        MatrixOperator(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        MatrixOperator(CMatrix::zeros(dim, dim))
    }

    pub fn from_diagonal(values: &[C64]) -> Result<Self> {
        let n = values.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        MatrixOperator(self.0.adjoint())
    }

    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| self.0[(i, j)])
            .collect()
    }
}

impl AsRef<CMatrix> for MatrixOperator {
    fn as_ref(&self) -> &CMatrix {
        &self.0
    }
}

/// Spectral norm (largest singular value). Used for every operator-norm
/// residual in the crate.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `max(‖M*M − I‖, ‖MM* − I‖)` in the spectral norm.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let id = CMatrix::identity(n, n);
    let a = spectral_norm(&(m.adjoint() * m - &id));
    let b = spectral_norm(&(m * m.adjoint() - &id));
    a.max(b)
}

/// Block-diagonal assembly.
pub fn block_diagonal(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(n, n);
    let mut offset = 0;
    for b in blocks {
        let k = b.nrows();
        out.view_mut((offset, offset), (k, k)).copy_from(b);
        offset += k;
    }
    out
}

pub fn permutation_matrix(targets: &[usize]) -> CMatrix {
    // column j is e_{targets[j]}
    let n = targets.len();
    let mut p = CMatrix::zeros(n, n);
    for (j, &i) in targets.iter().enumerate() {
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    p
}
