use std::fmt;
use std::ops::Add;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Dimension of a kernel or cokernel: a finite count or a symbolic infinity.
///
/// The derived ordering puts every `Finite(n)` below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CardinalDim {
    Finite(u64),
    Infinite,
}

impl CardinalDim {
    pub const ZERO: CardinalDim = CardinalDim::Finite(0);

    pub fn is_zero(self) -> bool {
        self == Self::ZERO
    }

    pub fn is_infinite(self) -> bool {
        self == CardinalDim::Infinite
    }

    /// `0 < self < Infinite`, the range excluded for embeddable operators.
    pub fn is_finite_nonzero(self) -> bool {
        matches!(self, CardinalDim::Finite(n) if n > 0)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            CardinalDim::Finite(n) => Some(n),
            CardinalDim::Infinite => None,
        }
    }
}

impl From<usize> for CardinalDim {
    fn from(n: usize) -> Self {
        CardinalDim::Finite(n as u64)
    }
}

impl Add for CardinalDim {
    type Output = CardinalDim;

    fn add(self, rhs: CardinalDim) -> CardinalDim {
        match (self, rhs) {
            (CardinalDim::Finite(a), CardinalDim::Finite(b)) => a
                .checked_add(b)
                .map_or(CardinalDim::Infinite, CardinalDim::Finite),
            _ => CardinalDim::Infinite,
        }
    }
}

impl std::iter::Sum for CardinalDim {
    fn sum<I: Iterator<Item = CardinalDim>>(iter: I) -> Self {
        iter.fold(CardinalDim::ZERO, Add::add)
    }
}

impl fmt::Display for CardinalDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CardinalDim::Finite(n) => write!(f, "Finite({n})"),
            CardinalDim::Infinite => f.write_str("Infinite"),
        }
    }
}

// Serialized as a plain integer or the string "infinite".
impl Serialize for CardinalDim {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            CardinalDim::Finite(n) => s.serialize_u64(*n),
            CardinalDim::Infinite => s.serialize_str("infinite"),
        }
    }
}

impl<'de> Deserialize<'de> for CardinalDim {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = CardinalDim;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative integer or \"infinite\"")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<CardinalDim, E> {
                Ok(CardinalDim::Finite(v))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<CardinalDim, E> {
                u64::try_from(v)
                    .map(CardinalDim::Finite)
                    .map_err(|_| E::custom(format!("dimension must be nonnegative, got {v}")))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<CardinalDim, E> {
                match v {
                    "infinite" | "Infinite" | "inf" => Ok(CardinalDim::Infinite),
                    other => Err(E::custom(format!(
                        "expected \"infinite\" or an integer, got {other:?}"
                    ))),
                }
            }
        }

        d.deserialize_any(Visitor)
    }
}
