use super::spectral::UNITARY_TOLERANCE;
use super::verdict::{EmbeddabilityVerdict, EmbeddingMethod, NotEmbeddableReason, UnknownCase};
use crate::opcore::{
    kernel_defect, rank_analysis, unitarity_defect, CardinalDim, MatrixOperator, ShiftParams,
    StructuredOperator, Tolerance, C64,
};

/// A summand after flattening direct sums. Shifts in the same direction
/// are pooled into one shift on the sum of their fibers, and every zero
/// coordinate (zero operators, zero diagonal entries, zero sample points)
/// into one zero operator, since only the pooled cardinals matter.
#[derive(Debug, Clone)]
pub(crate) enum Piece {
    Dense(MatrixOperator),
    /// Nonzero diagonal entries.
    Diagonal(Vec<C64>),
    RightShifts(Vec<ShiftParams>),
    LeftShifts(Vec<ShiftParams>),
    Multiplication { points: Vec<C64>, weights: Vec<f64> },
    Volterra(usize),
    Zero { space_dim: CardinalDim },
    Compact {
        matrix: MatrixOperator,
        kernel_dim: CardinalDim,
        dense_range: bool,
    },
}

/// A piece and the coordinates of the original truncation it occupies,
/// listed in the piece's own order.
#[derive(Debug, Clone)]
pub(crate) struct Group {
    pub piece: Piece,
    pub coords: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PieceVerdict {
    Embeddable(EmbeddingMethod),
    NotEmbeddable,
    Unknown(UnknownCase),
}

#[derive(Default)]
struct Pools {
    zero: Option<(CardinalDim, Vec<usize>)>,
    right: Vec<(ShiftParams, usize)>,
    left: Vec<(ShiftParams, usize)>,
    /// Position of each pool in the output, by first appearance.
    order: Vec<Slot>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Slot {
    Own(usize),
    Zero,
    Right,
    Left,
}

pub(crate) fn decompose(op: &StructuredOperator) -> Vec<Group> {
    let mut own = Vec::new();
    let mut pools = Pools::default();
    let mut offset = 0;
    walk(op, &mut offset, &mut own, &mut pools);

    let mut out = Vec::new();
    for slot in &pools.order {
        match slot {
            Slot::Own(i) => out.push(own[*i].clone()),
            Slot::Zero => {
                let (space_dim, coords) = pools.zero.clone().expect("registered");
                out.push(Group {
                    piece: Piece::Zero { space_dim },
                    coords,
                });
            }
            Slot::Right => out.push(shift_group(&pools.right, Piece::RightShifts)),
            Slot::Left => out.push(shift_group(&pools.left, Piece::LeftShifts)),
        }
    }
    out
}

fn walk(op: &StructuredOperator, offset: &mut usize, own: &mut Vec<Group>, pools: &mut Pools) {
    use StructuredOperator::*;
    let n = op.dim().unwrap_or(0);
    let start = *offset;
    let push_own = |piece: Piece, coords: Vec<usize>, own: &mut Vec<Group>, pools: &mut Pools| {
        pools.order.push(Slot::Own(own.len()));
        own.push(Group { piece, coords });
    };
    match op {
        DirectSum(parts) => {
            for p in parts {
                walk(p, offset, own, pools);
            }
            return;
        }
        Dense(m) => push_own(Piece::Dense(m.clone()), (start..start + n).collect(), own, pools),
        Diagonal {
            eigenvalues,
            kernel_dim,
            ..
        } => {
            let (zeros, nonzero): (Vec<usize>, Vec<usize>) =
                (0..n).partition(|&i| eigenvalues[i].norm() == 0.0);
            if !nonzero.is_empty() {
                push_own(
                    Piece::Diagonal(nonzero.iter().map(|&i| eigenvalues[i]).collect()),
                    nonzero.iter().map(|&i| start + i).collect(),
                    own,
                    pools,
                );
            }
            if !zeros.is_empty() {
                add_zero(pools, *kernel_dim, zeros.iter().map(|&i| start + i).collect());
            }
        }
        Multiplication { points, weights } => {
            let (zeros, nonzero): (Vec<usize>, Vec<usize>) =
                (0..n).partition(|&i| points[i].norm() == 0.0);
            if !nonzero.is_empty() {
                push_own(
                    Piece::Multiplication {
                        points: nonzero.iter().map(|&i| points[i]).collect(),
                        weights: nonzero.iter().map(|&i| weights[i]).collect(),
                    },
                    nonzero.iter().map(|&i| start + i).collect(),
                    own,
                    pools,
                );
            }
            if !zeros.is_empty() {
                add_zero(
                    pools,
                    CardinalDim::from(zeros.len()),
                    zeros.iter().map(|&i| start + i).collect(),
                );
            }
        }
        BlockRightShift(p) => {
            if pools.right.is_empty() {
                pools.order.push(Slot::Right);
            }
            pools.right.push((*p, start));
        }
        BlockLeftShift(p) => {
            if pools.left.is_empty() {
                pools.order.push(Slot::Left);
            }
            pools.left.push((*p, start));
        }
        Volterra { grid_size } => push_own(
            Piece::Volterra(*grid_size),
            (start..start + n).collect(),
            own,
            pools,
        ),
        Zero { space_dim, .. } => add_zero(pools, *space_dim, (start..start + n).collect()),
        Compact {
            matrix,
            kernel_dim,
            dense_range,
        } => push_own(
            Piece::Compact {
                matrix: matrix.clone(),
                kernel_dim: *kernel_dim,
                dense_range: *dense_range,
            },
            (start..start + n).collect(),
            own,
            pools,
        ),
    }
    *offset = start + n;
}

fn add_zero(pools: &mut Pools, dim: CardinalDim, coords: Vec<usize>) {
    match &mut pools.zero {
        Some((d, c)) => {
            *d = *d + dim;
            c.extend(coords);
        }
        None => {
            pools.order.push(Slot::Zero);
            pools.zero = Some((dim, coords));
        }
    }
}

/// Coordinates of the pooled shift, block by block: block `b` of the pool
/// is block `b` of every member, in order. Members with differing block
/// counts are listed one after the other instead.
fn shift_group(members: &[(ShiftParams, usize)], make: fn(Vec<ShiftParams>) -> Piece) -> Group {
    let params: Vec<ShiftParams> = members.iter().map(|(p, _)| *p).collect();
    let coords = if shift_blocks_aligned(&params) {
        let blocks = params[0].block_truncation;
        let mut coords = Vec::new();
        for b in 0..blocks {
            for (p, start) in members {
                let f = p.fiber_truncation;
                coords.extend((0..f).map(|s| start + b * f + s));
            }
        }
        coords
    } else {
        members
            .iter()
            .flat_map(|(p, start)| *start..start + p.fiber_truncation * p.block_truncation)
            .collect()
    };
    Group {
        piece: make(params),
        coords,
    }
}

pub(crate) fn shift_blocks_aligned(params: &[ShiftParams]) -> bool {
    params
        .windows(2)
        .all(|w| w[0].block_truncation == w[1].block_truncation)
}

pub(crate) fn pooled_fiber(params: &[ShiftParams]) -> CardinalDim {
    params.iter().map(|p| p.fiber_dim).sum()
}

pub(crate) fn is_unitary(m: &MatrixOperator) -> bool {
    unitarity_defect(m.matrix()) <= UNITARY_TOLERANCE
}

fn classify_piece(piece: &Piece) -> PieceVerdict {
    use EmbeddingMethod::*;
    match piece {
        Piece::Dense(m) => {
            if is_unitary(m) {
                PieceVerdict::Embeddable(UnitarySpectral)
            } else {
                match rank_analysis(m, Tolerance::Auto) {
                    Ok(r) if r.kernel_dim.is_zero() => PieceVerdict::Embeddable(DunfordLog),
                    Ok(_) => PieceVerdict::NotEmbeddable,
                    Err(_) => PieceVerdict::Unknown(UnknownCase::UnclassifiedStructure),
                }
            }
        }
        Piece::Diagonal(_) => PieceVerdict::Embeddable(DiagonalBranch),
        Piece::RightShifts(p) | Piece::LeftShifts(p) => {
            if pooled_fiber(p).is_infinite() {
                PieceVerdict::Embeddable(ShiftTranslation)
            } else {
                PieceVerdict::NotEmbeddable
            }
        }
        Piece::Multiplication { .. } => PieceVerdict::Embeddable(NormalSpectral),
        Piece::Volterra(_) => PieceVerdict::Embeddable(VolterraFractional),
        Piece::Zero { space_dim } => {
            if space_dim.is_infinite() {
                PieceVerdict::Embeddable(NilpotentShift)
            } else {
                PieceVerdict::NotEmbeddable
            }
        }
        Piece::Compact {
            matrix,
            kernel_dim,
            dense_range,
        } => {
            if kernel_dim.is_infinite() {
                PieceVerdict::Unknown(UnknownCase::CompactInfiniteKernel)
            } else if kernel_dim.is_zero() && *dense_range {
                match rank_analysis(matrix, Tolerance::Auto) {
                    Ok(r) if r.kernel_dim.is_zero() => PieceVerdict::Embeddable(CompactRiesz),
                    _ => PieceVerdict::Unknown(UnknownCase::UnclassifiedStructure),
                }
            } else {
                PieceVerdict::Unknown(UnknownCase::UnclassifiedStructure)
            }
        }
    }
}

/// Whether every group is a unitary or a shift in `direction`, with at
/// least one shift.
pub(crate) fn isometric_in(groups: &[Group], right: bool) -> bool {
    let mut shifts = 0;
    for g in groups {
        match (&g.piece, right) {
            (Piece::Dense(m), _) if is_unitary(m) => {}
            (Piece::RightShifts(_), true) | (Piece::LeftShifts(_), false) => shifts += 1,
            _ => return false,
        }
    }
    shifts > 0
}

/// Decides embeddability.
///
/// The kernel/cokernel dichotomy is checked first and is the only source of
/// `NotEmbeddable`. Direct sums are then split into pieces (see
/// [`StructuredOperator`] variants), each of which must be embeddable on
/// its own; a piece that is not, inside a sum that passes the dichotomy,
/// leaves the verdict `Unknown`.
pub fn classify(op: &StructuredOperator) -> EmbeddabilityVerdict {
    let (kernel_dim, cokernel_dim) = kernel_defect(op);
    if kernel_dim.is_finite_nonzero() || cokernel_dim.is_finite_nonzero() {
        return EmbeddabilityVerdict::NotEmbeddable(
            NotEmbeddableReason::NecessaryConditionViolated {
                kernel_dim,
                cokernel_dim,
            },
        );
    }
    let groups = decompose(op);
    let verdicts: Vec<PieceVerdict> = groups.iter().map(|g| classify_piece(&g.piece)).collect();
    if let Some(case) = verdicts.iter().find_map(|v| match v {
        PieceVerdict::Unknown(c) => Some(*c),
        _ => None,
    }) {
        return EmbeddabilityVerdict::Unknown(case);
    }
    if verdicts.contains(&PieceVerdict::NotEmbeddable) {
        return EmbeddabilityVerdict::Unknown(UnknownCase::UnclassifiedStructure);
    }
    let mut components = Vec::new();
    for v in &verdicts {
        if let PieceVerdict::Embeddable(m) = v {
            if !components.contains(m) {
                components.push(*m);
            }
        }
    }
    let method = if isometric_in(&groups, true) || isometric_in(&groups, false) {
        EmbeddingMethod::IsometryWold
    } else {
        components[0]
    };
    EmbeddabilityVerdict::Embeddable { method, components }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use EmbeddingMethod::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn not_embeddable(kernel: CardinalDim, cokernel: CardinalDim) -> EmbeddabilityVerdict {
        EmbeddabilityVerdict::NotEmbeddable(NotEmbeddableReason::NecessaryConditionViolated {
            kernel_dim: kernel,
            cokernel_dim: cokernel,
        })
    }

    #[test]
    fn jordan_block() {
        let m = MatrixOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        assert_eq!(
            classify(&StructuredOperator::Dense(m)),
            not_embeddable(CardinalDim::Finite(1), CardinalDim::Finite(1))
        );
    }

    #[test]
    fn finite_multiplicity_shift() {
        let v = StructuredOperator::right_shift(CardinalDim::Finite(3), 3, 5).unwrap();
        assert_eq!(classify(&v), not_embeddable(CardinalDim::ZERO, CardinalDim::Finite(3)));
    }

    #[test]
    fn infinite_multiplicity_shift() {
        let v = StructuredOperator::right_shift(CardinalDim::Infinite, 4, 5).unwrap();
        assert_eq!(
            classify(&v),
            EmbeddabilityVerdict::Embeddable {
                method: IsometryWold,
                components: vec![ShiftTranslation]
            }
        );
        let w = StructuredOperator::left_shift(CardinalDim::Infinite, 4, 5).unwrap();
        assert_eq!(classify(&w).method(), Some(IsometryWold));
    }

    #[test]
    fn annulus_diagonal() {
        let eigs: Vec<C64> = (0..24)
            .map(|k| C64::from_polar(1.0 + (k % 4) as f64 * 0.25, 0.7 * k as f64))
            .collect();
        let d = StructuredOperator::invertible_diagonal(eigs).unwrap();
        assert_eq!(classify(&d), EmbeddabilityVerdict::embeddable(DiagonalBranch));
    }

    #[test]
    fn zero_operators() {
        let z1 = StructuredOperator::zero(CardinalDim::Finite(1), 1).unwrap();
        assert!(classify(&z1).is_not_embeddable());
        let zi = StructuredOperator::zero(CardinalDim::Infinite, 8).unwrap();
        assert_eq!(classify(&zi), EmbeddabilityVerdict::embeddable(NilpotentShift));
        // a finite zero summand is absorbed by an infinite one
        let sum = StructuredOperator::direct_sum(vec![z1, zi]).unwrap();
        assert_eq!(classify(&sum), EmbeddabilityVerdict::embeddable(NilpotentShift));
    }

    #[test]
    fn normal_with_finite_kernel() {
        let m = StructuredOperator::multiplication(vec![c(0.0), c(1.0)], vec![1.0, 1.0]).unwrap();
        assert_eq!(
            classify(&m),
            not_embeddable(CardinalDim::Finite(1), CardinalDim::Finite(1))
        );
        let m = StructuredOperator::multiplication(vec![c(0.5), c(-1.0)], vec![1.0, 2.0]).unwrap();
        assert_eq!(classify(&m), EmbeddabilityVerdict::embeddable(NormalSpectral));
    }

    #[test]
    fn diagonal_with_infinite_kernel_splits() {
        let d = StructuredOperator::diagonal(
            vec![c(2.0), c(0.0), c(0.5), c(0.0)],
            CardinalDim::Infinite,
            CardinalDim::Infinite,
        )
        .unwrap();
        assert_eq!(
            classify(&d),
            EmbeddabilityVerdict::Embeddable {
                method: DiagonalBranch,
                components: vec![DiagonalBranch, NilpotentShift]
            }
        );
    }

    #[test]
    fn volterra_and_compact() {
        assert_eq!(
            classify(&StructuredOperator::volterra(32).unwrap()),
            EmbeddabilityVerdict::embeddable(VolterraFractional)
        );
        let m = MatrixOperator::from_diagonal(&[c(1.0), c(0.5), c(0.25)]).unwrap();
        let k = StructuredOperator::compact(m, CardinalDim::ZERO, true).unwrap();
        assert_eq!(classify(&k), EmbeddabilityVerdict::embeddable(CompactRiesz));
        let m = MatrixOperator::from_diagonal(&[c(1.0), c(0.0), c(0.25)]).unwrap();
        let k = StructuredOperator::compact(m, CardinalDim::Infinite, false).unwrap();
        assert_eq!(
            classify(&k),
            EmbeddabilityVerdict::Unknown(UnknownCase::CompactInfiniteKernel)
        );
        let m = MatrixOperator::from_diagonal(&[c(1.0), c(0.5)]).unwrap();
        let k = StructuredOperator::compact(m, CardinalDim::ZERO, false).unwrap();
        assert_eq!(
            classify(&k),
            EmbeddabilityVerdict::Unknown(UnknownCase::UnclassifiedStructure)
        );
    }

    #[test]
    fn isometric_sums() {
        let u = StructuredOperator::Dense(samples::random_unitary(3, 4));
        let inf = StructuredOperator::right_shift(CardinalDim::Infinite, 2, 8).unwrap();
        let fin = StructuredOperator::right_shift(CardinalDim::Finite(2), 2, 8).unwrap();
        let a = StructuredOperator::direct_sum(vec![u.clone(), inf.clone()]).unwrap();
        assert_eq!(
            classify(&a),
            EmbeddabilityVerdict::Embeddable {
                method: IsometryWold,
                components: vec![UnitarySpectral, ShiftTranslation]
            }
        );
        let b = StructuredOperator::direct_sum(vec![u.clone(), fin.clone()]).unwrap();
        assert!(classify(&b).is_not_embeddable());
        // finite multiplicity is absorbed by an infinite one
        let c = StructuredOperator::direct_sum(vec![fin, u.clone(), inf]).unwrap();
        assert_eq!(classify(&c).method(), Some(IsometryWold));
        assert_eq!(classify(&u), EmbeddabilityVerdict::embeddable(UnitarySpectral));
    }

    #[test]
    fn unembeddable_piece_in_passing_sum_is_unknown() {
        // both cardinals infinite, but the finite-multiplicity left shift
        // has no constructor of its own
        let s = StructuredOperator::direct_sum(vec![
            StructuredOperator::left_shift(CardinalDim::Finite(1), 1, 4).unwrap(),
            StructuredOperator::zero(CardinalDim::Infinite, 4).unwrap(),
        ])
        .unwrap();
        assert_eq!(
            classify(&s),
            EmbeddabilityVerdict::Unknown(UnknownCase::UnclassifiedStructure)
        );
    }

    #[test]
    fn pooled_shift_coordinates_interleave_blocks() {
        let s = StructuredOperator::direct_sum(vec![
            StructuredOperator::right_shift(CardinalDim::Finite(1), 1, 3).unwrap(),
            StructuredOperator::right_shift(CardinalDim::Infinite, 2, 3).unwrap(),
        ])
        .unwrap();
        let groups = decompose(&s);
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].coords, vec![0, 3, 4, 1, 5, 6, 2, 7, 8]);
    }
}
