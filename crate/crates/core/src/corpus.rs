//! Built-in operator corpus: one or more cases per constructor, plus the
//! standard negative controls.

use crate::embed::{EmbeddabilityVerdict, EmbeddingMethod, UnknownCase};
use crate::opcore::{CardinalDim, CMatrix, MatrixOperator, StructuredOperator, C64};
use crate::samples;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expected {
    Embeddable(EmbeddingMethod),
    NotEmbeddable,
    Unknown(UnknownCase),
}

impl Expected {
    pub fn matches(&self, v: &EmbeddabilityVerdict) -> bool {
        match (self, v) {
            (Expected::Embeddable(m), EmbeddabilityVerdict::Embeddable { method, .. }) => m == method,
            (Expected::NotEmbeddable, EmbeddabilityVerdict::NotEmbeddable(_)) => true,
            (Expected::Unknown(c), EmbeddabilityVerdict::Unknown(d)) => c == d,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Case {
    pub name: &'static str,
    pub op: StructuredOperator,
    pub expected: Expected,
}

/// Offsets applied to the rescaling cases.
pub const RESCALE_OFFSETS: [i64; 5] = [-2, -1, 0, 1, 2];

/// Cases whose realizations are also rescaled.
pub const RESCALED_CASES: [&str; 5] = [
    "random_unitary",
    "random_invertible",
    "annulus_diagonal",
    "normal_contractive",
    "compact_clusters",
];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn jordan_block() -> StructuredOperator {
    StructuredOperator::Dense(MatrixOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).expect("finite"))
}

/// Eigenvalues sampling the annulus `1/2 ≤ |z| ≤ 2`.
pub fn annulus(count: usize) -> Vec<C64> {
    (0..count)
        .map(|k| {
            let r = 0.5 * 4f64.powf((k % 5) as f64 / 4.0);
            C64::from_polar(r, 2.399_963 * k as f64)
        })
        .collect()
}

/// Two eigenvalue clusters, `{1, 1.02}` with a Jordan-like coupling and
/// `{0.1, 0.105}`, mixed by a seeded similarity.
pub fn clustered(seed: u64) -> MatrixOperator {
    let mut t = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        c(1.0, 0.0),
        c(1.02, 0.0),
        c(0.1, 0.0),
        c(0.105, 0.0),
    ]));
    t[(0, 1)] = c(0.5, 0.0);
    t[(2, 3)] = c(0.05, 0.0);
    let mut rng = samples::rng(seed);
    loop {
        let s = CMatrix::identity(4, 4) + samples::real_gaussian(&mut rng, 4, 4) * c(0.2, 0.0);
        if let Some(inv) = s.clone().try_inverse() {
            return MatrixOperator::new(&s * &t * inv).expect("finite");
        }
    }
}

pub fn demo_corpus(seed: u64) -> Vec<Case> {
    use EmbeddingMethod::*;
    let unitary = |s: u64, n: usize| StructuredOperator::Dense(samples::random_unitary(s, n));
    let shift = |fiber: CardinalDim, f: usize, n: usize| {
        StructuredOperator::right_shift(fiber, f, n).expect("valid shift")
    };
    let mut rng = samples::rng(seed);
    let invertible = samples::complex_gaussian(&mut rng, 8, 8) + CMatrix::identity(8, 8) * c(3.0, 0.0);
    let contractive: Vec<C64> = (0..12)
        .map(|k| C64::from_polar(0.2 + 0.06 * k as f64, 0.9 * k as f64 + 0.3))
        .collect();

    vec![
        Case {
            name: "jordan_block",
            op: jordan_block(),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "random_unitary",
            op: unitary(seed, 16),
            expected: Expected::Embeddable(UnitarySpectral),
        },
        Case {
            name: "random_invertible",
            op: StructuredOperator::Dense(MatrixOperator::new(invertible).expect("finite")),
            expected: Expected::Embeddable(DunfordLog),
        },
        Case {
            name: "shift_multiplicity_1",
            op: shift(CardinalDim::Finite(1), 1, 64),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "shift_multiplicity_2",
            op: shift(CardinalDim::Finite(2), 2, 32),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "shift_multiplicity_3",
            op: shift(CardinalDim::Finite(3), 3, 24),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "shift_infinite",
            op: shift(CardinalDim::Infinite, 4, 16),
            expected: Expected::Embeddable(IsometryWold),
        },
        Case {
            name: "left_shift_infinite",
            op: StructuredOperator::left_shift(CardinalDim::Infinite, 4, 16).expect("valid shift"),
            expected: Expected::Embeddable(IsometryWold),
        },
        Case {
            name: "unitary_plus_shift_infinite",
            op: StructuredOperator::direct_sum(vec![unitary(seed + 1, 4), shift(CardinalDim::Infinite, 2, 32)])
                .expect("valid sum"),
            expected: Expected::Embeddable(IsometryWold),
        },
        Case {
            name: "unitary_plus_shift_2",
            op: StructuredOperator::direct_sum(vec![unitary(seed + 1, 4), shift(CardinalDim::Finite(2), 2, 32)])
                .expect("valid sum"),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "annulus_diagonal",
            op: StructuredOperator::invertible_diagonal(annulus(32)).expect("nonzero"),
            expected: Expected::Embeddable(DiagonalBranch),
        },
        Case {
            name: "diagonal_infinite_kernel",
            op: StructuredOperator::diagonal(
                vec![c(2.0, 0.0), c(0.0, 0.0), c(-0.5, 0.5), c(0.0, 0.0)],
                CardinalDim::Infinite,
                CardinalDim::Infinite,
            )
            .expect("valid diagonal"),
            expected: Expected::Embeddable(DiagonalBranch),
        },
        Case {
            name: "normal_contractive",
            op: StructuredOperator::multiplication(contractive, (1..=12).map(|k| 1.0 / k as f64).collect())
                .expect("valid measure"),
            expected: Expected::Embeddable(NormalSpectral),
        },
        Case {
            name: "normal_finite_kernel",
            op: StructuredOperator::multiplication(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![1.0, 1.0])
                .expect("valid measure"),
            expected: Expected::NotEmbeddable,
        },
        Case {
            name: "volterra",
            op: StructuredOperator::volterra(400).expect("valid grid"),
            expected: Expected::Embeddable(VolterraFractional),
        },
        Case {
            name: "compact_clusters",
            op: StructuredOperator::compact(clustered(seed), CardinalDim::ZERO, true).expect("injective"),
            expected: Expected::Embeddable(CompactRiesz),
        },
        Case {
            name: "compact_geometric",
            op: StructuredOperator::compact(
                MatrixOperator::from_diagonal(&(0..8).map(|k| c(0.5f64.powi(k), 0.0)).collect::<Vec<_>>())
                    .expect("finite"),
                CardinalDim::ZERO,
                true,
            )
            .expect("injective"),
            expected: Expected::Embeddable(CompactRiesz),
        },
        Case {
            name: "compact_infinite_kernel",
            op: StructuredOperator::compact(
                MatrixOperator::from_diagonal(&[c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)])
                    .expect("finite"),
                CardinalDim::Infinite,
                false,
            )
            .expect("valid compact"),
            expected: Expected::Unknown(UnknownCase::CompactInfiniteKernel),
        },
        Case {
            name: "zero_infinite",
            op: StructuredOperator::zero(CardinalDim::Infinite, 16).expect("valid zero"),
            expected: Expected::Embeddable(NilpotentShift),
        },
        Case {
            name: "zero_one_dimensional",
            op: StructuredOperator::zero(CardinalDim::Finite(1), 1).expect("valid zero"),
            expected: Expected::NotEmbeddable,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::classify;

    #[test]
    fn corpus_verdicts_match_expectations() {
        for case in demo_corpus(7) {
            let v = classify(&case.op);
            assert!(case.expected.matches(&v), "{}: {v}", case.name);
        }
    }

    #[test]
    fn corpus_covers_every_method_tag() {
        let mut seen = Vec::new();
        for case in demo_corpus(7) {
            seen.extend(classify(&case.op).tags());
        }
        for m in EmbeddingMethod::ALL {
            assert!(seen.contains(&m), "{m} not covered");
        }
    }
}
