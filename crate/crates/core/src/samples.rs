//! Seeded random operators for tests, the demo corpus and spec-file
//! generators. All draws use ChaCha8 so a seed fixes the output across
//! platforms.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::opcore::{CMatrix, MatrixOperator, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re * s, im * s)
    })
}

pub fn real_gaussian(rng: &mut impl Rng, rows: usize, cols: usize) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        C64::new(re, 0.0)
    })
}

/// Haar-distributed unitary: QR of a complex Gaussian draw with the phases
/// of `R`'s diagonal pushed into `Q`.
pub fn random_unitary(seed: u64, dim: usize) -> MatrixOperator {
    let mut rng = rng(seed);
    let g = complex_gaussian(&mut rng, dim, dim);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    MatrixOperator::new(q).expect("unitary draw is finite")
}

/// Random real matrix of the given rank: `A Bᵀ` with Gaussian factors.
pub fn random_of_rank(rng: &mut impl Rng, dim: usize, rank: usize) -> MatrixOperator {
    let a = real_gaussian(rng, dim, rank);
    let b = real_gaussian(rng, dim, rank);
    MatrixOperator::new(a * b.transpose()).expect("finite")
}

/// `S D S⁻¹` with `S = I + coupling·G` for a Gaussian `G`.
pub fn with_spectrum(rng: &mut impl Rng, eigenvalues: &[C64], coupling: f64) -> MatrixOperator {
    let n = eigenvalues.len();
    loop {
        let g = complex_gaussian(rng, n, n);
        let s = CMatrix::identity(n, n) + g * C64::new(coupling / (n as f64).sqrt(), 0.0);
        if let Some(inv) = s.clone().try_inverse() {
            let d = CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(eigenvalues));
            return MatrixOperator::new(&s * d * inv).expect("finite");
        }
    }
}
