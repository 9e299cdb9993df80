use std::fmt;

use serde::Serialize;

use crate::opcore::CardinalDim;

/// Construction tag of an embedding semigroup.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EmbeddingMethod {
    DunfordLog,
    DiagonalBranch,
    UnitarySpectral,
    NormalSpectral,
    IsometryWold,
    ShiftTranslation,
    CompactRiesz,
    VolterraFractional,
    NilpotentShift,
}

impl EmbeddingMethod {
    pub const ALL: [EmbeddingMethod; 9] = [
        EmbeddingMethod::DunfordLog,
        EmbeddingMethod::DiagonalBranch,
        EmbeddingMethod::UnitarySpectral,
        EmbeddingMethod::NormalSpectral,
        EmbeddingMethod::IsometryWold,
        EmbeddingMethod::ShiftTranslation,
        EmbeddingMethod::CompactRiesz,
        EmbeddingMethod::VolterraFractional,
        EmbeddingMethod::NilpotentShift,
    ];
}

impl fmt::Display for EmbeddingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Cases the classifier deliberately leaves undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum UnknownCase {
    /// Compact operator with infinite-dimensional kernel.
    CompactInfiniteKernel,
    UnclassifiedStructure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NotEmbeddableReason {
    /// Kernel or cokernel dimension is finite and nonzero.
    NecessaryConditionViolated {
        kernel_dim: CardinalDim,
        cokernel_dim: CardinalDim,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum EmbeddabilityVerdict {
    /// `method` names the construction as a whole; `components` lists the
    /// constructors used for the independent parts, in order.
    Embeddable {
        method: EmbeddingMethod,
        components: Vec<EmbeddingMethod>,
    },
    NotEmbeddable(NotEmbeddableReason),
    Unknown(UnknownCase),
}

impl EmbeddabilityVerdict {
    pub fn embeddable(method: EmbeddingMethod) -> Self {
        EmbeddabilityVerdict::Embeddable {
            method,
            components: vec![method],
        }
    }

    pub fn is_embeddable(&self) -> bool {
        matches!(self, EmbeddabilityVerdict::Embeddable { .. })
    }

    pub fn is_not_embeddable(&self) -> bool {
        matches!(self, EmbeddabilityVerdict::NotEmbeddable(_))
    }

    pub fn method(&self) -> Option<EmbeddingMethod> {
        match self {
            EmbeddabilityVerdict::Embeddable { method, .. } => Some(*method),
            _ => None,
        }
    }

    /// Every tag the verdict mentions, the overall method first.
    pub fn tags(&self) -> Vec<EmbeddingMethod> {
        match self {
            EmbeddabilityVerdict::Embeddable { method, components } => {
                let mut out = vec![*method];
                for c in components {
                    if !out.contains(c) {
                        out.push(*c);
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

impl fmt::Display for EmbeddabilityVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmbeddabilityVerdict::Embeddable { method, components } => {
                write!(f, "Embeddable({method}")?;
                if components.len() > 1 || components.first() != Some(method) {
                    let names: Vec<String> = components.iter().map(|c| c.to_string()).collect();
                    write!(f, " -> {}", names.join(" + "))?;
                }
                f.write_str(")")
            }
            EmbeddabilityVerdict::NotEmbeddable(NotEmbeddableReason::NecessaryConditionViolated {
                kernel_dim,
                cokernel_dim,
            }) => write!(
                f,
                "NotEmbeddable(kernel {kernel_dim}, cokernel {cokernel_dim})"
            ),
            EmbeddabilityVerdict::Unknown(case) => write!(f, "Unknown({case:?})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let v = EmbeddabilityVerdict::Embeddable {
            method: EmbeddingMethod::IsometryWold,
            components: vec![EmbeddingMethod::ShiftTranslation],
        };
        assert_eq!(v.to_string(), "Embeddable(IsometryWold -> ShiftTranslation)");
        assert_eq!(
            EmbeddabilityVerdict::embeddable(EmbeddingMethod::DunfordLog).to_string(),
            "Embeddable(DunfordLog)"
        );
        let n = EmbeddabilityVerdict::NotEmbeddable(NotEmbeddableReason::NecessaryConditionViolated {
            kernel_dim: CardinalDim::Finite(1),
            cokernel_dim: CardinalDim::Finite(1),
        });
        assert_eq!(n.to_string(), "NotEmbeddable(kernel Finite(1), cokernel Finite(1))");
        assert_eq!(v.tags(), vec![EmbeddingMethod::IsometryWold, EmbeddingMethod::ShiftTranslation]);
    }
}
