//! Embeddability verdicts and the semigroup constructors.
//!
//! [`classify`] decides, [`embed`] decides and constructs. Every
//! constructor returns a [`SemigroupRealization`] whose time-one map
//! reproduces the input truncation; [`crate::verify`] checks that claim
//! together with the semigroup law.

mod classify;
mod grid;
mod isometry;
mod realization;
mod realize;
mod spectral;
mod verdict;
mod volterra;

pub use classify::classify;
pub use grid::{embed_shift_translation, embed_zero_infinite};
pub use isometry::{embed_isometry, IsometryOutcome};
pub use realization::{
    rescale, AdmissibleTimes, Family, RealizationSummary, Semigroup, SemigroupRealization,
};
pub use spectral::{
    embed_compact_injective, embed_dense_invertible, embed_diagonal, embed_normal, embed_unitary,
    MAX_PROJECTOR_CONDITION, UNITARY_TOLERANCE,
};
pub use verdict::{EmbeddabilityVerdict, EmbeddingMethod, NotEmbeddableReason, UnknownCase};
pub use volterra::{
    embed_volterra, fractional_integral_matrix, MIN_VOLTERRA_GRID, VOLTERRA_QUADRATURE_BUDGET,
};

use crate::error::{Error, Result};
use crate::funcalc::{DEFAULT_CLEARANCE, DEFAULT_NODES};
use crate::opcore::{StructuredOperator, DEFAULT_DENSE_CAP};

/// Numerical parameters shared by the constructors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbedOptions {
    /// Trapezoidal nodes per contour circle.
    pub nodes: usize,
    pub clearance: f64,
    /// Preferred number of grid cells per unit time for translation
    /// semigroups.
    pub grid: usize,
    /// Wold depth.
    pub depth: usize,
    /// Logarithm branch per diagonal entry; principal when absent.
    pub branch_offsets: Option<Vec<i64>>,
    pub cluster_radius: Option<f64>,
    pub dense_cap: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            nodes: DEFAULT_NODES,
            clearance: DEFAULT_CLEARANCE,
            grid: 8,
            depth: 8,
            branch_offsets: None,
            cluster_radius: None,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbedOutcome {
    pub verdict: EmbeddabilityVerdict,
    /// Present exactly when the verdict is `Embeddable`.
    pub realization: Option<SemigroupRealization>,
}

/// Classifies `op` and, when it is embeddable, constructs the semigroup.
pub fn embed(op: &StructuredOperator, opts: &EmbedOptions) -> Result<EmbedOutcome> {
    op.validate()?;
    let n = op.dim().unwrap_or(usize::MAX);
    if n > opts.dense_cap {
        return Err(Error::DimensionCap {
            requested: n,
            cap: opts.dense_cap,
        });
    }
    let verdict = classify(op);
    let EmbeddabilityVerdict::Embeddable { method, components } = &verdict else {
        return Ok(EmbedOutcome {
            verdict,
            realization: None,
        });
    };
    let groups = classify::decompose(op);
    let realization = if *method == EmbeddingMethod::IsometryWold {
        if classify::isometric_in(&groups, true) {
            isometric(op, opts)?
        } else {
            let adjoint = op
                .adjoint()
                .ok_or_else(|| Error::Unsupported(format!("adjoint of {}", op.kind())))?;
            let mut s = isometric(&adjoint, opts)?.adjoint();
            s.notes.push("co-isometry embedded through its adjoint".into());
            s
        }
    } else {
        realize::realize_groups(&groups, n, opts, *method, components.clone())?
    };
    Ok(EmbedOutcome {
        verdict,
        realization: Some(realization),
    })
}

fn isometric(v: &StructuredOperator, opts: &EmbedOptions) -> Result<SemigroupRealization> {
    match embed_isometry(v, opts)? {
        IsometryOutcome::Embedded(s) => Ok(s),
        IsometryOutcome::NotEmbeddable { multiplicity } => Err(Error::NotEmbeddable {
            kernel: crate::opcore::CardinalDim::ZERO,
            cokernel: multiplicity,
        }),
    }
}
