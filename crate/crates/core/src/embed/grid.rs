//! Translation semigroups realized on a grid of cells.
//!
//! A block right shift on `l²(Y)` with `dim Y = ∞` is the time-one map of
//! right translation on `L²([0, ∞), Z)` once each fiber `Y ≅ L²([0, 1], Z)`
//! is unrolled along the half-line. On the truncation a fiber of `m·d`
//! coordinates is read as `m` cells carrying `d` slots each, so translation
//! by `k/m` moves `k·d` coordinates and translation by one moves a whole
//! block.

use super::realization::{AdmissibleTimes, Family, SemigroupRealization};
use super::verdict::EmbeddingMethod;
use crate::error::{Error, Result};

/// Right translation on `blocks` blocks of `grid_per_block` cells with
/// `fiber` slots each. `T(1)` is the block right shift with fiber
/// truncation `grid_per_block·fiber`.
pub fn embed_shift_translation(
    fiber: usize,
    blocks: usize,
    grid_per_block: usize,
) -> Result<SemigroupRealization> {
    if fiber == 0 || blocks == 0 || grid_per_block == 0 {
        return Err(Error::InvalidOperator(
            "shift translation parameters must be positive".into(),
        ));
    }
    let dim = fiber
        .checked_mul(blocks)
        .and_then(|x| x.checked_mul(grid_per_block))
        .ok_or(Error::DimensionCap {
            requested: usize::MAX,
            cap: usize::MAX,
        })?;
    Ok(SemigroupRealization::new(
        Family::Translation {
            dim,
            step: fiber,
            per_unit: grid_per_block as u64,
        },
        AdmissibleTimes::Grid {
            per_unit: grid_per_block as u64,
        },
        EmbeddingMethod::ShiftTranslation,
    )
    .with_note("boundary loss: mass translated past the last block is dropped"))
}

/// Nilpotent translation on `L²[0, 1]` sampled at `grid` cells, with the
/// `truncation` coordinates spread evenly over them. Dead from `t = 1` on.
pub fn embed_zero_infinite(truncation: usize, grid: usize) -> Result<SemigroupRealization> {
    if truncation == 0 || grid == 0 || truncation % grid != 0 {
        return Err(Error::InvalidOperator(format!(
            "grid {grid} must be positive and divide the truncation {truncation}"
        )));
    }
    Ok(SemigroupRealization::new(
        Family::Translation {
            dim: truncation,
            step: truncation / grid,
            per_unit: grid as u64,
        },
        AdmissibleTimes::Grid {
            per_unit: grid as u64,
        },
        EmbeddingMethod::NilpotentShift,
    ))
}

/// Largest divisor of `n` not exceeding `preferred`.
pub(crate) fn grid_dividing(n: usize, preferred: usize) -> usize {
    (1..=preferred.clamp(1, n.max(1)))
        .rev()
        .find(|g| n % g == 0)
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::{block_shift_matrix, spectral_norm, CMatrix, C64};

    #[test]
    fn endpoint_is_block_shift() {
        let (d, n, m) = (2, 5, 3);
        let s = embed_shift_translation(d, n, m).unwrap();
        let one = s.evaluate(1.0).unwrap();
        assert_eq!(one.matrix(), &block_shift_matrix(m * d, n));
    }

    #[test]
    fn grid_step_composes_exactly() {
        let (d, n, m) = (1, 4, 8);
        let s = embed_shift_translation(d, n, m).unwrap();
        let step = s.evaluate(1.0 / m as f64).unwrap().into_matrix();
        let mut acc = CMatrix::identity(n * m * d, n * m * d);
        for _ in 0..m {
            acc = &acc * &step;
        }
        assert_eq!(acc, s.evaluate(1.0).unwrap().into_matrix());
        assert!(s.evaluate(0.3).is_err());
    }

    #[test]
    fn interior_isometry() {
        let s = embed_shift_translation(1, 4, 4).unwrap();
        let e = s.evaluate(0.5).unwrap().into_matrix();
        // supported on the first block: nothing reaches the tail
        let mut x = CMatrix::zeros(16, 1);
        for i in 0..4 {
            x[i] = C64::new(0.5, 0.0);
        }
        assert!(((&e * &x).norm() - x.norm()).abs() <= 1e-15);
    }

    /// The jump of a smooth fiber function sampled on `m` cells contributes
    /// one cell of mass per unit jump, so `‖T(1/m)x − x‖` falls like `m^{-1/2}`.
    #[test]
    fn one_step_displacement_shrinks_with_resolution() {
        let displacement = |m: usize| {
            let s = embed_shift_translation(1, 2, m).unwrap();
            let h = 1.0 / m as f64;
            // f(s) = sin(πs) on the first block, normalized in L²
            let x = CMatrix::from_fn(2 * m, 1, |i, _| {
                if i < m {
                    let mid = (i as f64 + 0.5) * h;
                    C64::new((std::f64::consts::PI * mid).sin() * (2.0 * h).sqrt(), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            });
            (s.evaluate(h).unwrap().into_matrix() * &x - &x).norm()
        };
        let a = displacement(16);
        let b = displacement(32);
        assert!(b < a);
    }

    #[test]
    fn nilpotent_shift() {
        let s = embed_zero_infinite(8, 4).unwrap();
        assert_eq!(s.evaluate(1.0).unwrap().into_matrix(), CMatrix::zeros(8, 8));
        let half = s.evaluate(0.5).unwrap().into_matrix();
        assert_eq!(&half * &half, CMatrix::zeros(8, 8));
        let quarter = s.evaluate(0.25).unwrap().into_matrix();
        assert!((spectral_norm(&quarter) - 1.0).abs() <= 1e-12);
        assert!(embed_zero_infinite(8, 3).is_err());
    }

    #[test]
    fn divisor_choice() {
        assert_eq!(grid_dividing(12, 8), 6);
        assert_eq!(grid_dividing(7, 4), 1);
        assert_eq!(grid_dividing(16, 8), 8);
        assert_eq!(grid_dividing(3, 8), 3);
    }
}
