use super::classify::{is_unitary, pooled_fiber, shift_blocks_aligned, Group, Piece};
use super::grid::{embed_shift_translation, embed_zero_infinite, grid_dividing};
use super::realization::SemigroupRealization;
use super::spectral::{
    embed_compact_injective, embed_dense_invertible, embed_diagonal, embed_normal, embed_unitary,
};
use super::verdict::EmbeddingMethod;
use super::volterra::embed_volterra;
use super::EmbedOptions;
use crate::error::{Error, Result};
use crate::opcore::{permutation_matrix, CardinalDim, ShiftParams};

/// Realizes each group and reassembles them in the original coordinates.
pub(crate) fn realize_groups(
    groups: &[Group],
    dim: usize,
    opts: &EmbedOptions,
    method: EmbeddingMethod,
    components: Vec<EmbeddingMethod>,
) -> Result<SemigroupRealization> {
    let parts = groups
        .iter()
        .map(|g| realize_piece(g, opts))
        .collect::<Result<Vec<_>>>()?;
    let s = SemigroupRealization::direct_sum(parts, method, components)?;
    let targets: Vec<usize> = groups.iter().flat_map(|g| g.coords.iter().copied()).collect();
    if targets.len() != dim {
        return Err(Error::InvalidOperator(format!(
            "pieces cover {} of {dim} coordinates",
            targets.len()
        )));
    }
    if targets.iter().enumerate().all(|(i, &t)| i == t) {
        return Ok(s);
    }
    let p = permutation_matrix(&targets);
    let pt = p.transpose();
    s.conjugated(p, pt)
}

fn realize_piece(group: &Group, opts: &EmbedOptions) -> Result<SemigroupRealization> {
    match &group.piece {
        Piece::Dense(m) if is_unitary(m) => embed_unitary(m),
        Piece::Dense(m) => embed_dense_invertible(m, opts.nodes, opts.clearance),
        Piece::Diagonal(eigs) => {
            let offsets = match &opts.branch_offsets {
                Some(k) => k.clone(),
                None => vec![0; eigs.len()],
            };
            embed_diagonal(eigs, &offsets)
        }
        Piece::RightShifts(params) => shift_translation(params, opts),
        Piece::LeftShifts(params) => Ok(shift_translation(params, opts)?.adjoint()),
        Piece::Multiplication { points, weights } => embed_normal(points, weights),
        Piece::Volterra(n) => embed_volterra(*n),
        Piece::Zero { space_dim } => {
            if !space_dim.is_infinite() {
                return Err(Error::NotEmbeddable {
                    kernel: *space_dim,
                    cokernel: *space_dim,
                });
            }
            let t = group.coords.len();
            embed_zero_infinite(t, grid_dividing(t, opts.grid))
        }
        Piece::Compact {
            matrix,
            kernel_dim,
            dense_range,
        } => {
            if !(kernel_dim.is_zero() && *dense_range) {
                return Err(Error::Unsupported(
                    "compact operators need trivial kernel and dense range".into(),
                ));
            }
            embed_compact_injective(matrix, opts.cluster_radius, opts.nodes, opts.clearance)
        }
    }
}

/// One translation semigroup for the pooled shift: fiber truncation
/// `F = ΣFᵢ` read as `m` cells of `F/m` slots, `m` the largest divisor of
/// `F` not above the requested grid.
fn shift_translation(params: &[ShiftParams], opts: &EmbedOptions) -> Result<SemigroupRealization> {
    let fiber = pooled_fiber(params);
    if !fiber.is_infinite() {
        return Err(Error::NotEmbeddable {
            kernel: CardinalDim::ZERO,
            cokernel: fiber,
        });
    }
    if !shift_blocks_aligned(params) {
        return Err(Error::Unsupported(
            "pooled shifts need a common block truncation".into(),
        ));
    }
    let total: usize = params.iter().map(|p| p.fiber_truncation).sum();
    let m = grid_dividing(total, opts.grid);
    embed_shift_translation(total / m, params[0].block_truncation, m)
}
