use std::fmt;

use super::cardinal::CardinalDim;
use super::matrix::{block_diagonal, spectral_norm, CMatrix, MatrixOperator, C64};
use super::rank::{rank_analysis, Tolerance};
use crate::error::{Error, Result};

/// Largest dense dimension `materialize` will produce unless told otherwise.
pub const DEFAULT_DENSE_CAP: usize = 2048;

/// Truncation parameters of a block shift on `l²(Y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftParams {
    /// `dim Y`, possibly infinite.
    pub fiber_dim: CardinalDim,
    /// Number of coordinates kept per fiber.
    pub fiber_truncation: usize,
    /// Number of fibers (blocks) kept.
    pub block_truncation: usize,
}

impl ShiftParams {
    pub fn new(fiber_dim: CardinalDim, fiber_truncation: usize, block_truncation: usize) -> Self {
        ShiftParams {
            fiber_dim,
            fiber_truncation,
            block_truncation,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.fiber_truncation == 0 || self.block_truncation == 0 {
            return Err(Error::InvalidOperator(
                "shift truncation parameters must be positive".into(),
            ));
        }
        match self.fiber_dim {
            CardinalDim::Finite(0) => Err(Error::InvalidOperator(
                "shift fiber dimension must be positive".into(),
            )),
            CardinalDim::Finite(k) if k != self.fiber_truncation as u64 => {
                Err(Error::InvalidOperator(format!(
                    "finite fiber dimension {k} must equal the fiber truncation {}",
                    self.fiber_truncation
                )))
            }
            _ => Ok(()),
        }
    }

    fn dim(&self) -> Option<usize> {
        self.fiber_truncation.checked_mul(self.block_truncation)
    }
}

/// Tagged operator representation: a dense matrix, or a symbolic
/// infinite-dimensional operator carrying truncation parameters and exact
/// kernel/cokernel cardinals.
#[derive(Debug, Clone, PartialEq)]
pub enum StructuredOperator {
    Dense(MatrixOperator),
    /// Multiplication by a sequence on `l²`, truncated to the listed entries.
    Diagonal {
        eigenvalues: Vec<C64>,
        kernel_dim: CardinalDim,
        cokernel_dim: CardinalDim,
    },
    BlockRightShift(ShiftParams),
    BlockLeftShift(ShiftParams),
    /// `f(z) ↦ z f(z)` on `L²(μ)` for the discrete measure `Σ wₖ δ_{zₖ}`.
    Multiplication { points: Vec<C64>, weights: Vec<f64> },
    /// Cell-average discretization of `(Vf)(τ) = ∫₀^τ f(s) ds` on `[0, 1]`.
    Volterra { grid_size: usize },
    Zero { space_dim: CardinalDim, truncation: usize },
    /// Truncation of a compact operator on an infinite-dimensional space.
    /// The cokernel of such an operator is always infinite.
    Compact {
        matrix: MatrixOperator,
        kernel_dim: CardinalDim,
        dense_range: bool,
    },
    DirectSum(Vec<StructuredOperator>),
}

impl StructuredOperator {
    pub fn dense(m: MatrixOperator) -> Self {
        StructuredOperator::Dense(m)
    }

    pub fn diagonal(
        eigenvalues: Vec<C64>,
        kernel_dim: CardinalDim,
        cokernel_dim: CardinalDim,
    ) -> Result<Self> {
        let op = StructuredOperator::Diagonal {
            eigenvalues,
            kernel_dim,
            cokernel_dim,
        };
        op.validate()?;
        Ok(op)
    }

    /// Diagonal with no zero entries and trivial kernel/cokernel.
    pub fn invertible_diagonal(eigenvalues: Vec<C64>) -> Result<Self> {
        Self::diagonal(eigenvalues, CardinalDim::ZERO, CardinalDim::ZERO)
    }

    pub fn right_shift(
        fiber_dim: CardinalDim,
        fiber_truncation: usize,
        block_truncation: usize,
    ) -> Result<Self> {
        let op = StructuredOperator::BlockRightShift(ShiftParams::new(
            fiber_dim,
            fiber_truncation,
            block_truncation,
        ));
        op.validate()?;
        Ok(op)
    }

    pub fn left_shift(
        fiber_dim: CardinalDim,
        fiber_truncation: usize,
        block_truncation: usize,
    ) -> Result<Self> {
        let op = StructuredOperator::BlockLeftShift(ShiftParams::new(
            fiber_dim,
            fiber_truncation,
            block_truncation,
        ));
        op.validate()?;
        Ok(op)
    }

    pub fn multiplication(points: Vec<C64>, weights: Vec<f64>) -> Result<Self> {
        let op = StructuredOperator::Multiplication { points, weights };
        op.validate()?;
        Ok(op)
    }

    pub fn volterra(grid_size: usize) -> Result<Self> {
        let op = StructuredOperator::Volterra { grid_size };
        op.validate()?;
        Ok(op)
    }

    pub fn zero(space_dim: CardinalDim, truncation: usize) -> Result<Self> {
        let op = StructuredOperator::Zero {
            space_dim,
            truncation,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn compact(matrix: MatrixOperator, kernel_dim: CardinalDim, dense_range: bool) -> Result<Self> {
        let op = StructuredOperator::Compact {
            matrix,
            kernel_dim,
            dense_range,
        };
        op.validate()?;
        Ok(op)
    }

    pub fn direct_sum(parts: Vec<StructuredOperator>) -> Result<Self> {
        let op = StructuredOperator::DirectSum(parts);
        op.validate()?;
        Ok(op)
    }

    /// Checks the variant invariants, including consistency between declared
    /// cardinals and the truncation.
    pub fn validate(&self) -> Result<()> {
        use StructuredOperator::*;
        let invalid = |msg: String| Err(Error::InvalidOperator(msg));
        match self {
            Dense(_) => Ok(()),
            Diagonal {
                eigenvalues,
                kernel_dim,
                cokernel_dim,
            } => {
                if eigenvalues.is_empty() {
                    return invalid("diagonal needs at least one entry".into());
                }
                if eigenvalues.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                let zeros = eigenvalues.iter().filter(|z| z.norm() == 0.0).count() as u64;
                match *kernel_dim {
                    CardinalDim::Finite(k) if k != zeros => {
                        return invalid(format!(
                            "declared kernel Finite({k}) but {zeros} zero entries"
                        ))
                    }
                    CardinalDim::Infinite if zeros == 0 => {
                        return invalid(
                            "declared infinite kernel needs a zero entry in the truncation".into(),
                        )
                    }
                    _ => {}
                }
                match *cokernel_dim {
                    CardinalDim::Finite(c) if c != zeros => invalid(format!(
                        "declared cokernel Finite({c}) but {zeros} zero entries"
                    )),
                    CardinalDim::Finite(_) if kernel_dim.is_infinite() => {
                        invalid("an infinite kernel forces an infinite cokernel".into())
                    }
                    _ => Ok(()),
                }
            }
            BlockRightShift(p) | BlockLeftShift(p) => p.validate(),
            Multiplication { points, weights } => {
                if points.is_empty() {
                    return invalid("multiplication operator needs sample points".into());
                }
                if points.len() != weights.len() {
                    return invalid(format!(
                        "{} sample points but {} weights",
                        points.len(),
                        weights.len()
                    ));
                }
                if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite);
                }
                if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
                    return invalid("sample weights must be positive".into());
                }
                Ok(())
            }
            Volterra { grid_size } => {
                if *grid_size == 0 {
                    invalid("Volterra grid size must be positive".into())
                } else {
                    Ok(())
                }
            }
            Zero {
                space_dim,
                truncation,
            } => match (*space_dim, *truncation) {
                (_, 0) => invalid("zero operator truncation must be positive".into()),
                (CardinalDim::Finite(k), n) if k != n as u64 => invalid(format!(
                    "zero operator on a space of dimension {k} truncated to {n}"
                )),
                _ => Ok(()),
            },
            Compact {
                matrix,
                kernel_dim,
                ..
            } => {
                let report = rank_analysis(matrix, Tolerance::Auto)?;
                match *kernel_dim {
                    CardinalDim::Finite(k) if CardinalDim::Finite(k) != report.kernel_dim => {
                        invalid(format!(
                            "declared kernel Finite({k}) but the truncation has numerical kernel {}",
                            report.kernel_dim
                        ))
                    }
                    CardinalDim::Infinite if report.kernel_dim.is_zero() => invalid(
                        "declared infinite kernel but the truncation is injective".into(),
                    ),
                    _ => Ok(()),
                }
            }
            DirectSum(parts) => {
                if parts.is_empty() {
                    return invalid("direct sum needs at least one part".into());
                }
                parts.iter().try_for_each(|p| p.validate())
            }
        }
    }

    /// Dimension of the dense truncation, `None` on arithmetic overflow.
    pub fn dim(&self) -> Option<usize> {
        use StructuredOperator::*;
        match self {
            Dense(m) | Compact { matrix: m, .. } => Some(m.dim()),
            Diagonal { eigenvalues, .. } => Some(eigenvalues.len()),
            BlockRightShift(p) | BlockLeftShift(p) => p.dim(),
            Multiplication { points, .. } => Some(points.len()),
            Volterra { grid_size } => Some(*grid_size),
            Zero { truncation, .. } => Some(*truncation),
            DirectSum(parts) => parts
                .iter()
                .try_fold(0usize, |acc, p| acc.checked_add(p.dim()?)),
        }
    }

    pub fn materialize(&self) -> Result<MatrixOperator> {
        self.materialize_with_cap(DEFAULT_DENSE_CAP)
    }

    /// Dense truncation. Fails with [`Error::DimensionCap`] instead of
    /// allocating beyond `cap` rows.
    pub fn materialize_with_cap(&self, cap: usize) -> Result<MatrixOperator> {
        self.validate()?;
        let n = self.dim().ok_or(Error::DimensionCap {
            requested: usize::MAX,
            cap,
        })?;
        if n > cap {
            return Err(Error::DimensionCap { requested: n, cap });
        }
        MatrixOperator::new(self.build())
    }

    fn build(&self) -> CMatrix {
        use StructuredOperator::*;
        match self {
            Dense(m) | Compact { matrix: m, .. } => m.matrix().clone(),
            Diagonal { eigenvalues, .. } => diagonal_matrix(eigenvalues),
            Multiplication { points, .. } => diagonal_matrix(points),
            BlockRightShift(p) => block_shift_matrix(p.fiber_truncation, p.block_truncation),
            BlockLeftShift(p) => {
                block_shift_matrix(p.fiber_truncation, p.block_truncation).transpose()
            }
            Volterra { grid_size } => volterra_matrix(*grid_size),
            Zero { truncation, .. } => CMatrix::zeros(*truncation, *truncation),
            DirectSum(parts) => {
                let blocks: Vec<CMatrix> = parts.iter().map(|p| p.build()).collect();
                block_diagonal(&blocks)
            }
        }
    }

    /// Coordinates of the truncated domain that are not boundary artifacts.
    /// For a right shift the last block maps out of the truncation.
    pub fn domain_interior(&self) -> Vec<bool> {
        self.mask(|op| match op {
            StructuredOperator::BlockRightShift(p) => Some(shift_mask(p)),
            _ => None,
        })
    }

    /// Coordinates of the truncated codomain that are not boundary artifacts.
    /// For a left shift nothing from outside the truncation reaches the last block.
    pub fn range_interior(&self) -> Vec<bool> {
        self.mask(|op| match op {
            StructuredOperator::BlockLeftShift(p) => Some(shift_mask(p)),
            _ => None,
        })
    }

    fn mask(&self, leaf: impl Fn(&StructuredOperator) -> Option<Vec<bool>> + Copy) -> Vec<bool> {
        match self {
            StructuredOperator::DirectSum(parts) => {
                parts.iter().flat_map(|p| p.mask(leaf)).collect()
            }
            other => leaf(other).unwrap_or_else(|| vec![true; other.dim().unwrap_or(0)]),
        }
    }

    /// Adjoint, for the variants closed under it.
    pub fn adjoint(&self) -> Option<StructuredOperator> {
        use StructuredOperator::*;
        match self {
            Dense(m) => Some(Dense(m.adjoint())),
            BlockRightShift(p) => Some(BlockLeftShift(*p)),
            BlockLeftShift(p) => Some(BlockRightShift(*p)),
            Zero { .. } => Some(self.clone()),
            DirectSum(parts) => parts
                .iter()
                .map(|p| p.adjoint())
                .collect::<Option<Vec<_>>>()
                .map(DirectSum),
            _ => None,
        }
    }

    /// `‖(VP)*(VP) − P‖` where `P` keeps the domain interior.
    pub fn interior_isometry_defect(&self) -> Result<f64> {
        let v = self.materialize()?;
        Ok(isometry_defect_on(v.matrix(), &self.domain_interior()))
    }

    /// Short variant name.
    pub fn kind(&self) -> &'static str {
        use StructuredOperator::*;
        match self {
            Dense(_) => "dense",
            Diagonal { .. } => "diagonal",
            BlockRightShift(_) => "right_shift",
            BlockLeftShift(_) => "left_shift",
            Multiplication { .. } => "multiplication",
            Volterra { .. } => "volterra",
            Zero { .. } => "zero",
            Compact { .. } => "compact",
            DirectSum(_) => "direct_sum",
        }
    }
}

impl fmt::Display for StructuredOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use StructuredOperator::*;
        match self {
            Dense(m) => write!(f, "Dense({0}x{0})", m.dim()),
            Diagonal {
                eigenvalues,
                kernel_dim,
                cokernel_dim,
            } => write!(
                f,
                "Diagonal(n={}, kernel={kernel_dim}, cokernel={cokernel_dim})",
                eigenvalues.len()
            ),
            BlockRightShift(p) => write!(
                f,
                "BlockRightShift({}, {}, {})",
                p.fiber_dim, p.fiber_truncation, p.block_truncation
            ),
            BlockLeftShift(p) => write!(
                f,
                "BlockLeftShift({}, {}, {})",
                p.fiber_dim, p.fiber_truncation, p.block_truncation
            ),
            Multiplication { points, .. } => write!(f, "Multiplication(n={})", points.len()),
            Volterra { grid_size } => write!(f, "Volterra({grid_size})"),
            Zero {
                space_dim,
                truncation,
            } => write!(f, "Zero({space_dim}, {truncation})"),
            Compact {
                matrix,
                kernel_dim,
                dense_range,
            } => write!(
                f,
                "Compact({0}x{0}, kernel={kernel_dim}, dense_range={dense_range})",
                matrix.dim()
            ),
            DirectSum(parts) => {
                f.write_str("DirectSum[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{p}")?;
                }
                f.write_str("]")
            }
        }
    }
}

pub(crate) fn isometry_defect_on(v: &CMatrix, interior: &[bool]) -> f64 {
    let cols: Vec<usize> = (0..interior.len()).filter(|&j| interior[j]).collect();
    if cols.is_empty() {
        return 0.0;
    }
    let vp = v.select_columns(&cols);
    let gram = vp.adjoint() * &vp;
    spectral_norm(&(gram - CMatrix::identity(cols.len(), cols.len())))
}

fn shift_mask(p: &ShiftParams) -> Vec<bool> {
    let n = p.fiber_truncation * p.block_truncation;
    let boundary = n - p.fiber_truncation;
    (0..n).map(|i| i < boundary).collect()
}

fn diagonal_matrix(values: &[C64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values))
}

/// Identity blocks of size `fiber` on the first block subdiagonal.
pub fn block_shift_matrix(fiber: usize, blocks: usize) -> CMatrix {
    let n = fiber * blocks;
    let mut m = CMatrix::zeros(n, n);
    for i in fiber..n {
        m[(i, i - fiber)] = C64::new(1.0, 0.0);
    }
    m
}

/// Galerkin matrix of the Volterra operator on the cell indicators of a
/// uniform `n`-cell grid: `h` strictly below the diagonal, `h/2` on it.
pub fn volterra_matrix(n: usize) -> CMatrix {
    let h = 1.0 / n as f64;
    CMatrix::from_fn(n, n, |i, j| {
        if j < i {
            C64::new(h, 0.0)
        } else if j == i {
            C64::new(0.5 * h, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}
