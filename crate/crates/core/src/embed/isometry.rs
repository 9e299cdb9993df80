use super::classify::{decompose, is_unitary, isometric_in, Group, Piece};
use super::realize::realize_groups;
use super::realization::SemigroupRealization;
use super::verdict::EmbeddingMethod;
use super::EmbedOptions;
use crate::error::{Error, Result};
use crate::opcore::{CardinalDim, StructuredOperator};
use crate::wold::{wold_decompose, WoldDecomposition};

#[derive(Debug, Clone, PartialEq)]
pub enum IsometryOutcome {
    Embedded(SemigroupRealization),
    /// The shift part has finite nonzero multiplicity.
    NotEmbeddable { multiplicity: CardinalDim },
}

/// Wold decomposition, then the unitary part through its spectral
/// logarithm and the shift part through translation on the half-line.
pub fn embed_isometry(v: &StructuredOperator, opts: &EmbedOptions) -> Result<IsometryOutcome> {
    let groups = decompose(v);
    let unitary_only = groups
        .iter()
        .all(|g| matches!(&g.piece, Piece::Dense(m) if is_unitary(m)));
    if !(unitary_only || isometric_in(&groups, true)) {
        return Err(Error::NotInteriorIsometry(v.interior_isometry_defect()?));
    }
    let w = decompose_within_horizon(v, opts.depth)?;
    if w.multiplicity.is_finite_nonzero() {
        return Ok(IsometryOutcome::NotEmbeddable {
            multiplicity: w.multiplicity,
        });
    }
    let components = component_tags(&groups);
    let method = if unitary_only {
        EmbeddingMethod::UnitarySpectral
    } else {
        EmbeddingMethod::IsometryWold
    };
    let mut s = realize_groups(&groups, v.dim().unwrap_or(0), opts, method, components)?;
    s.notes.push(format!(
        "wold: dim H0 = {}, dim Y = {}, multiplicity {}, depth {}, orthogonality {:.3e}, invariance {:.3e}",
        w.unitary_dim(),
        w.wandering_dim(),
        w.multiplicity,
        w.depth_used,
        w.residuals.orthogonality,
        w.residuals.invariance
    ));
    if let Some(note) = w.multiplicity_note {
        s.notes.push(note.to_string());
    }
    Ok(IsometryOutcome::Embedded(s))
}

fn component_tags(groups: &[Group]) -> Vec<EmbeddingMethod> {
    let mut out = Vec::new();
    for g in groups {
        let tag = match g.piece {
            Piece::Dense(_) => EmbeddingMethod::UnitarySpectral,
            _ => EmbeddingMethod::ShiftTranslation,
        };
        if !out.contains(&tag) {
            out.push(tag);
        }
    }
    out
}

/// `wold_decompose` at `depth`, or at the truncation horizon if that is
/// shallower.
pub(crate) fn decompose_within_horizon(
    v: &StructuredOperator,
    depth: usize,
) -> Result<WoldDecomposition> {
    match wold_decompose(v, depth.max(1)) {
        Err(Error::DepthTooLarge { max, .. }) if max >= 1 && max < depth => wold_decompose(v, max),
        other => other,
    }
}
