use nalgebra::SVD;
use serde::Serialize;

use super::cardinal::CardinalDim;
use super::matrix::{CMatrix, MatrixOperator};
use super::structured::StructuredOperator;
use crate::error::{Error, Result};

/// Singular-value threshold for numerical rank.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tolerance {
    /// `ε · dim · σ_max`.
    #[default]
    Auto,
    Absolute(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub kernel_dim: CardinalDim,
    pub cokernel_dim: CardinalDim,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub tolerance_used: f64,
}

pub(crate) fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let n = m.nrows().max(m.ncols());
    let svd = SVD::try_new(m.clone(), false, false, f64::EPSILON, 10_000 + 100 * n * n)
        .ok_or(Error::NonConvergence("singular value decomposition"))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn threshold(tol: Tolerance, dim: usize, sigma_max: f64) -> f64 {
    match tol {
        Tolerance::Auto => (f64::EPSILON * dim as f64 * sigma_max).max(f64::MIN_POSITIVE),
        Tolerance::Absolute(t) => t,
    }
}

pub fn rank_analysis(m: &MatrixOperator, tol: Tolerance) -> Result<RankReport> {
    if let Tolerance::Absolute(t) = tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::InvalidOperator(format!(
                "rank tolerance must be positive, got {t}"
            )));
        }
    }
    let s = singular_values(m.matrix())?;
    let dim = m.dim();
    let tol = threshold(tol, dim, s.first().copied().unwrap_or(0.0));
    let rank = s.iter().filter(|&&x| x > tol).count();
    Ok(RankReport {
        rank,
        kernel_dim: CardinalDim::from(dim - rank),
        cokernel_dim: CardinalDim::from(dim - rank),
        singular_values: s,
        tolerance_used: tol,
    })
}

/// Numerical rank of an arbitrary (possibly rectangular) matrix at the
/// `auto` tolerance.
pub(crate) fn numerical_rank(m: &CMatrix) -> Result<usize> {
    let s = singular_values(m)?;
    let dim = m.nrows().max(m.ncols());
    let tol = threshold(Tolerance::Auto, dim, s.first().copied().unwrap_or(0.0));
    Ok(s.iter().filter(|&&x| x > tol).count())
}

/// `(dim ker, codim rg)` of the operator the representation stands for.
/// Symbolic variants report their declared cardinals; dense matrices are
/// measured at the `auto` tolerance.
pub fn kernel_defect(op: &StructuredOperator) -> (CardinalDim, CardinalDim) {
    use StructuredOperator::*;
    match op {
        Dense(m) => match rank_analysis(m, Tolerance::Auto) {
            Ok(r) => (r.kernel_dim, r.cokernel_dim),
            // A failed SVD leaves nothing to assert; report the conservative
            // "maximally defective" finite answer so callers never see Embeddable.
            Err(_) => {
                let n = CardinalDim::from(m.dim());
                (n, n)
            }
        },
        Diagonal {
            kernel_dim,
            cokernel_dim,
            ..
        } => (*kernel_dim, *cokernel_dim),
        BlockRightShift(p) => (CardinalDim::ZERO, p.fiber_dim),
        BlockLeftShift(p) => (p.fiber_dim, CardinalDim::ZERO),
        Multiplication { points, .. } => {
            let zeros = CardinalDim::from(points.iter().filter(|z| z.norm() == 0.0).count());
            (zeros, zeros)
        }
        Volterra { .. } => (CardinalDim::ZERO, CardinalDim::Infinite),
        Zero { space_dim, .. } => (*space_dim, *space_dim),
        Compact { kernel_dim, .. } => (*kernel_dim, CardinalDim::Infinite),
        DirectSum(parts) => {
            let (k, c): (Vec<_>, Vec<_>) = parts.iter().map(kernel_defect).unzip();
            (k.into_iter().sum(), c.into_iter().sum())
        }
    }
}

/// Kernel and cokernel dimension of the truncation with boundary rows and
/// columns removed (see [`StructuredOperator::domain_interior`]).
pub fn truncation_defect(op: &StructuredOperator) -> Result<(usize, usize)> {
    let m = op.materialize()?;
    let cols: Vec<usize> = mask_indices(&op.domain_interior());
    let rows: Vec<usize> = mask_indices(&op.range_interior());
    let sub = m.matrix().select_columns(&cols).select_rows(&rows);
    let rank = numerical_rank(&sub)?;
    Ok((cols.len() - rank, rows.len() - rank))
}

pub(crate) fn mask_indices(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&i| mask[i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::C64;

    #[test]
    fn identity_has_full_rank() {
        let r = rank_analysis(&MatrixOperator::identity(3), Tolerance::Auto).unwrap();
        assert_eq!(r.rank, 3);
        assert_eq!(r.kernel_dim, CardinalDim::ZERO);
        assert_eq!(r.cokernel_dim, CardinalDim::ZERO);
    }

    #[test]
    fn jordan_block_has_one_dimensional_kernel() {
        let m = MatrixOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let r = rank_analysis(&m, Tolerance::Auto).unwrap();
        assert_eq!(r.rank, 1);
        assert_eq!(r.kernel_dim, CardinalDim::Finite(1));
        assert_eq!(r.cokernel_dim, CardinalDim::Finite(1));
        assert!((r.singular_values[0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_diagonal_entry() {
        let m = MatrixOperator::from_diagonal(&[1.0, 0.0, 2.0].map(|x| C64::new(x, 0.0))).unwrap();
        let r = rank_analysis(&m, Tolerance::Auto).unwrap();
        assert_eq!(r.rank, 2);
        assert_eq!(r.kernel_dim, CardinalDim::Finite(1));
        assert_eq!(r.singular_values, vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn zero_matrix_tolerance_is_positive() {
        let r = rank_analysis(&MatrixOperator::zeros(4), Tolerance::Auto).unwrap();
        assert_eq!(r.rank, 0);
        assert!(r.tolerance_used > 0.0);
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(rank_analysis(&MatrixOperator::identity(2), Tolerance::Absolute(0.0)).is_err());
    }

    #[test]
    fn symbolic_defects() {
        let r = StructuredOperator::right_shift(CardinalDim::Infinite, 4, 8).unwrap();
        assert_eq!(kernel_defect(&r), (CardinalDim::ZERO, CardinalDim::Infinite));
        let d = StructuredOperator::invertible_diagonal(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(kernel_defect(&d), (CardinalDim::ZERO, CardinalDim::ZERO));
        let sum = StructuredOperator::direct_sum(vec![
            r.clone(),
            StructuredOperator::left_shift(CardinalDim::Infinite, 4, 8).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            kernel_defect(&sum),
            (CardinalDim::Infinite, CardinalDim::Infinite)
        );
        let z = StructuredOperator::zero(CardinalDim::Infinite, 3).unwrap();
        assert_eq!(
            kernel_defect(&z),
            (CardinalDim::Infinite, CardinalDim::Infinite)
        );
    }

    #[test]
    fn truncation_reproduces_declared_finite_cardinals() {
        // two truncation sizes per variant
        for blocks in [6, 12] {
            let r = StructuredOperator::right_shift(CardinalDim::Finite(2), 2, blocks).unwrap();
            assert_eq!(truncation_defect(&r).unwrap(), (0, 2));
            let l = StructuredOperator::left_shift(CardinalDim::Finite(3), 3, blocks).unwrap();
            assert_eq!(truncation_defect(&l).unwrap(), (3, 0));
            let z = StructuredOperator::zero(CardinalDim::Finite(blocks as u64), blocks).unwrap();
            assert_eq!(truncation_defect(&z).unwrap(), (blocks, blocks));
            let v = StructuredOperator::volterra(blocks * 4).unwrap();
            assert_eq!(truncation_defect(&v).unwrap().0, 0);
        }
        let d = StructuredOperator::diagonal(
            vec![C64::new(0.0, 0.0), C64::new(2.0, 1.0), C64::new(0.0, 0.0)],
            CardinalDim::Finite(2),
            CardinalDim::Finite(2),
        )
        .unwrap();
        assert_eq!(truncation_defect(&d).unwrap(), (2, 2));
    }
}
