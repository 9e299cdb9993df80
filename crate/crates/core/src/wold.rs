//! Wold decomposition of truncated isometries.
//!
//! An isometry `V` splits as `H = H₀ ⊕ H₁` with `V|H₀` unitary and `V|H₁` a
//! unilateral shift whose wandering space is `Y = (rg V)⊥`. On a truncation
//! the shift part loses its last block, so the isometry condition is only
//! checked on [`StructuredOperator::domain_interior`].
//!
//! `H₁` is accumulated as `span{VⁿY : n < depth}` with Gram–Schmidt
//! re-orthonormalization after each application of `V`. `H₀` is taken as
//! the range of `V^K` for `K` at least the truncation dimension: the
//! truncated shift part is nilpotent, so only the unitary part survives.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::opcore::{
    isometry_defect_on, kernel_defect, spectral_norm, CMatrix, CardinalDim, StructuredOperator,
};

pub const ISOMETRY_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WoldResiduals {
    pub orthogonality: f64,
    pub invariance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WoldDecomposition {
    /// Orthonormal columns spanning `H₀`.
    pub unitary_part: CMatrix,
    /// Orthonormal columns spanning `Y`.
    pub wandering: CMatrix,
    /// `VⁿY` for `n < depth_used`, re-orthonormalized.
    pub shift_blocks: Vec<CMatrix>,
    pub multiplicity: CardinalDim,
    /// Set when the multiplicity had to be read off a dense matrix.
    pub multiplicity_note: Option<&'static str>,
    pub depth_used: usize,
    pub residuals: WoldResiduals,
}

impl WoldDecomposition {
    pub fn unitary_dim(&self) -> usize {
        self.unitary_part.ncols()
    }

    pub fn wandering_dim(&self) -> usize {
        self.wandering.ncols()
    }

    /// `[H₀ | Y | VY | … ]` as one column set.
    pub fn basis(&self) -> CMatrix {
        let mut cols = vec![self.unitary_part.clone()];
        cols.extend(self.shift_blocks.iter().cloned());
        hstack(self.unitary_part.nrows(), &cols)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WoldVerification {
    /// `max_{n<m} ‖(VⁿY)*(VᵐY)‖`.
    pub pairwise_orthogonality: f64,
    /// Orthonormality of `[H₀ | Y]`.
    pub basis_defect: f64,
    /// `‖(I − P₀) V U₀‖`.
    pub invariance_defect: f64,
    /// `max(‖B*B − I‖, ‖BB* − I‖)` for `B = U₀* V U₀`.
    pub unitarity_defect: f64,
}

impl WoldVerification {
    pub fn max_residual(&self) -> f64 {
        self.pairwise_orthogonality
            .max(self.basis_defect)
            .max(self.invariance_defect)
            .max(self.unitarity_defect)
    }
}

pub fn wold_decompose(v: &StructuredOperator, depth: usize) -> Result<WoldDecomposition> {
    if depth == 0 {
        return Err(Error::InvalidOperator("Wold depth must be positive".into()));
    }
    let m = v.materialize()?;
    let vm = m.matrix();
    let n = vm.nrows();
    let defect = isometry_defect_on(vm, &v.domain_interior());
    if defect > ISOMETRY_TOLERANCE {
        return Err(Error::NotInteriorIsometry(defect));
    }

    let wandering = range_complement(vm)?;
    let mut blocks: Vec<CMatrix> = Vec::new();
    if wandering.ncols() > 0 {
        blocks.push(wandering.clone());
        for step in 1..depth {
            let image = vm * blocks.last().expect("non-empty");
            let lost = image
                .column_iter()
                .map(|c| c.norm())
                .fold(f64::INFINITY, f64::min);
            if lost < 0.5 {
                return Err(Error::DepthTooLarge { depth, max: step });
            }
            let next = orthonormalize_against(&image, &blocks);
            blocks.push(next);
        }
    }

    let unitary_part = stable_range(vm)?;
    let h1_dim: usize = blocks.iter().map(|b| b.ncols()).sum();
    if unitary_part.ncols() + h1_dim > n {
        return Err(Error::DepthTooLarge {
            depth,
            max: (n - unitary_part.ncols()) / wandering.ncols().max(1),
        });
    }

    let (multiplicity, note) = match v {
        StructuredOperator::Dense(_) => (
            CardinalDim::from(wandering.ncols()),
            Some("dense isometries are unitary in finite dimensions; multiplicity read from the truncation"),
        ),
        other => (kernel_defect(other).1, None),
    };

    let mut residuals = WoldResiduals {
        orthogonality: 0.0,
        invariance: 0.0,
    };
    let h1 = hstack(n, &blocks);
    if h1.ncols() > 0 && unitary_part.ncols() > 0 {
        residuals.orthogonality = spectral_norm(&(h1.adjoint() * &unitary_part));
    }
    if unitary_part.ncols() > 0 {
        let image = vm * &unitary_part;
        let residual = &image - &unitary_part * (unitary_part.adjoint() * &image);
        residuals.invariance = spectral_norm(&residual);
    }

    Ok(WoldDecomposition {
        unitary_part,
        wandering,
        shift_blocks: blocks,
        multiplicity,
        multiplicity_note: note,
        depth_used: depth,
        residuals,
    })
}

pub fn wold_verify(v: &StructuredOperator, w: &WoldDecomposition) -> Result<WoldVerification> {
    let m = v.materialize()?;
    let vm = m.matrix();
    let n = vm.nrows();

    let mut images = Vec::new();
    if w.wandering.ncols() > 0 {
        let mut current = w.wandering.clone();
        for _ in 0..w.depth_used {
            let next = vm * &current;
            images.push(current);
            current = next;
        }
    }
    let mut pairwise = 0.0_f64;
    for a in 0..images.len() {
        for b in (a + 1)..images.len() {
            pairwise = pairwise.max(spectral_norm(&(images[a].adjoint() * &images[b])));
        }
    }

    let both = hstack(n, &[w.unitary_part.clone(), w.wandering.clone()]);
    let basis_defect = if both.ncols() > 0 {
        spectral_norm(&(both.adjoint() * &both - CMatrix::identity(both.ncols(), both.ncols())))
    } else {
        0.0
    };

    let u0 = &w.unitary_part;
    let (invariance_defect, unitarity_defect) = if u0.ncols() > 0 {
        let image = vm * u0;
        let inv = spectral_norm(&(&image - u0 * (u0.adjoint() * &image)));
        let b = u0.adjoint() * &image;
        let k = b.nrows();
        let id = CMatrix::identity(k, k);
        let unit = spectral_norm(&(b.adjoint() * &b - &id)).max(spectral_norm(&(&b * b.adjoint() - &id)));
        (inv, unit)
    } else {
        (0.0, 0.0)
    };

    Ok(WoldVerification {
        pairwise_orthogonality: pairwise,
        basis_defect,
        invariance_defect,
        unitarity_defect,
    })
}

/// Orthonormal basis of `(rg V)⊥` from the left singular vectors.
fn range_complement(v: &CMatrix) -> Result<CMatrix> {
    let n = v.nrows();
    let svd = nalgebra::SVD::try_new(v.clone(), true, false, f64::EPSILON, 10_000 + 100 * n * n)
        .ok_or(Error::NonConvergence("singular value decomposition"))?;
    let u = svd.u.expect("requested");
    let s = &svd.singular_values;
    let cols: Vec<usize> = (0..s.len()).filter(|&i| s[i] < 0.5).collect();
    Ok(u.select_columns(&cols))
}

/// Orthonormal basis of `rg V^K`, `K ≥ dim`.
fn stable_range(v: &CMatrix) -> Result<CMatrix> {
    let n = v.nrows();
    let mut power = CMatrix::identity(n, n);
    let mut base = v.clone();
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            power = &power * &base;
        }
        base = &base * &base;
        k >>= 1;
    }
    let svd = nalgebra::SVD::try_new(power, true, false, f64::EPSILON, 10_000 + 100 * n * n)
        .ok_or(Error::NonConvergence("singular value decomposition"))?;
    let u = svd.u.expect("requested");
    let s = &svd.singular_values;
    let cols: Vec<usize> = (0..s.len()).filter(|&i| s[i] >= 0.5).collect();
    Ok(u.select_columns(&cols))
}

/// Modified Gram–Schmidt of `block` against `previous` and itself, two passes.
fn orthonormalize_against(block: &CMatrix, previous: &[CMatrix]) -> CMatrix {
    let mut out = block.clone();
    for j in 0..out.ncols() {
        for _ in 0..2 {
            for p in previous {
                for q in p.column_iter() {
                    let coeff = q.dotc(&out.column(j));
                    let update = q * coeff;
                    let mut col = out.column_mut(j);
                    col -= update;
                }
            }
            for i in 0..j {
                let q = out.column(i).clone_owned();
                let coeff = q.dotc(&out.column(j));
                let mut col = out.column_mut(j);
                col -= q * coeff;
            }
        }
        let norm = out.column(j).norm();
        out.column_mut(j).unscale_mut(norm);
    }
    out
}

fn hstack(rows: usize, parts: &[CMatrix]) -> CMatrix {
    let cols: usize = parts.iter().map(|p| p.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut offset = 0;
    for p in parts {
        out.view_mut((0, offset), (rows, p.ncols())).copy_from(p);
        offset += p.ncols();
    }
    out
}
