use std::f64::consts::TAU;

use serde::Serialize;

use super::verdict::EmbeddingMethod;
use super::volterra::fractional_integral_matrix;
use crate::error::{Error, Result};
use crate::funcalc::expm;
use crate::opcore::{block_diagonal, spectral_norm, CMatrix, MatrixOperator, C64};

/// Time set on which a realization is defined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AdmissibleTimes {
    Continuous,
    /// Multiples of `1/per_unit`.
    Grid { per_unit: u64 },
}

impl AdmissibleTimes {
    pub fn step(&self) -> Option<f64> {
        match self {
            AdmissibleTimes::Continuous => None,
            AdmissibleTimes::Grid { per_unit } => Some(1.0 / *per_unit as f64),
        }
    }

    pub fn check(&self, t: f64) -> Result<()> {
        if !t.is_finite() {
            return Err(Error::InadmissibleTime(t));
        }
        if let AdmissibleTimes::Grid { per_unit } = self {
            let x = t * *per_unit as f64;
            if (x - x.round()).abs() > 1e-9 * x.abs().max(1.0) {
                return Err(Error::InadmissibleTime(t));
            }
        }
        Ok(())
    }

    /// Nearest admissible time.
    pub fn snap(&self, t: f64) -> f64 {
        match self {
            AdmissibleTimes::Continuous => t,
            AdmissibleTimes::Grid { per_unit } => {
                let m = *per_unit as f64;
                (t * m).round() / m
            }
        }
    }

    /// Largest time set contained in both.
    pub fn common(self, other: AdmissibleTimes) -> AdmissibleTimes {
        use AdmissibleTimes::*;
        match (self, other) {
            (Continuous, x) | (x, Continuous) => x,
            (Grid { per_unit: a }, Grid { per_unit: b }) => Grid { per_unit: gcd(a, b) },
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// How a realization evaluates `T(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// `exp(tG)`.
    Exponential { generator: CMatrix },
    /// `diag(exp(t·rₖ))`.
    Diagonal { rates: Vec<C64> },
    /// Translation by `round(t·per_unit)·step` coordinates towards higher
    /// indices, losing whatever leaves the last coordinate.
    Translation {
        dim: usize,
        step: usize,
        per_unit: u64,
    },
    /// Galerkin Riemann–Liouville integration of order `t` on `n` cells.
    FractionalIntegral { n: usize },
    /// `basis · inner(t) · inverse`.
    Conjugated {
        basis: CMatrix,
        inverse: CMatrix,
        inner: Box<Family>,
    },
    Adjoint(Box<Family>),
    DirectSum(Vec<Family>),
    /// `e^{2πi·offset·t} · inner(t)`.
    Rescaled { offset: i64, inner: Box<Family> },
}

impl Family {
    pub fn dim(&self) -> usize {
        match self {
            Family::Exponential { generator } => generator.nrows(),
            Family::Diagonal { rates } => rates.len(),
            Family::Translation { dim, .. } => *dim,
            Family::FractionalIntegral { n } => *n,
            Family::Conjugated { basis, .. } => basis.nrows(),
            Family::Adjoint(inner) | Family::Rescaled { inner, .. } => inner.dim(),
            Family::DirectSum(parts) => parts.iter().map(|p| p.dim()).sum(),
        }
    }

    /// Whether negative times make sense.
    pub fn is_group(&self) -> bool {
        match self {
            Family::Exponential { .. } | Family::Diagonal { .. } => true,
            Family::Translation { .. } | Family::FractionalIntegral { .. } => false,
            Family::Conjugated { inner, .. }
            | Family::Adjoint(inner)
            | Family::Rescaled { inner, .. } => inner.is_group(),
            Family::DirectSum(parts) => parts.iter().all(|p| p.is_group()),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Family::Exponential { .. } => "exponential",
            Family::Diagonal { .. } => "diagonal",
            Family::Translation { .. } => "translation",
            Family::FractionalIntegral { .. } => "fractional_integral",
            Family::Conjugated { .. } => "conjugated",
            Family::Adjoint(_) => "adjoint",
            Family::DirectSum(_) => "direct_sum",
            Family::Rescaled { .. } => "rescaled",
        }
    }

    fn evaluate(&self, t: f64) -> Result<CMatrix> {
        match self {
            Family::Exponential { generator } => expm(generator, t),
            Family::Diagonal { rates } => {
                let values: Vec<C64> = rates.iter().map(|r| (r * t).exp()).collect();
                if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::Overflow(f64::INFINITY));
                }
                Ok(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(values)))
            }
            Family::Translation {
                dim,
                step,
                per_unit,
            } => {
                let k = (t * *per_unit as f64).round() as usize;
                let shift = k.saturating_mul(*step);
                let mut m = CMatrix::zeros(*dim, *dim);
                for i in shift..*dim {
                    m[(i, i - shift)] = C64::new(1.0, 0.0);
                }
                Ok(m)
            }
            Family::FractionalIntegral { n } => Ok(fractional_integral_matrix(*n, t)),
            Family::Conjugated {
                basis,
                inverse,
                inner,
            } => Ok(basis * inner.evaluate(t)? * inverse),
            Family::Adjoint(inner) => Ok(inner.evaluate(t)?.adjoint()),
            Family::DirectSum(parts) => {
                let blocks = parts
                    .iter()
                    .map(|p| p.evaluate(t))
                    .collect::<Result<Vec<_>>>()?;
                Ok(block_diagonal(&blocks))
            }
            Family::Rescaled { offset, inner } => {
                // reduce n·t mod 1 first so that integer times give exactly 1
                let turns = (*offset as f64 * t).rem_euclid(1.0);
                let phase = C64::from_polar(1.0, TAU * turns);
                Ok(inner.evaluate(t)? * phase)
            }
        }
    }
}

/// Anything that can be checked as a semigroup.
pub trait Semigroup: Sync {
    fn dim(&self) -> usize;
    fn admissible(&self) -> AdmissibleTimes;
    /// Whether negative times are meaningful.
    fn is_group(&self) -> bool {
        false
    }
    fn evaluate(&self, t: f64) -> Result<CMatrix>;
    fn generator(&self) -> Option<&CMatrix> {
        None
    }
}

/// A concrete semigroup `T(t)` together with its construction metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupRealization {
    pub family: Family,
    pub admissible: AdmissibleTimes,
    pub generator: Option<MatrixOperator>,
    /// Per-eigenvalue `2πik` shifts of the logarithm, when chosen explicitly.
    pub branch_offsets: Option<Vec<i64>>,
    pub method: EmbeddingMethod,
    pub components: Vec<EmbeddingMethod>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealizationSummary {
    pub method: EmbeddingMethod,
    pub components: Vec<EmbeddingMethod>,
    pub family: &'static str,
    pub dim: usize,
    pub admissible: AdmissibleTimes,
    pub generator_norm: Option<f64>,
    pub branch_offsets: Option<Vec<i64>>,
    pub notes: Vec<String>,
}

impl SemigroupRealization {
    pub fn new(family: Family, admissible: AdmissibleTimes, method: EmbeddingMethod) -> Self {
        SemigroupRealization {
            family,
            admissible,
            generator: None,
            branch_offsets: None,
            method,
            components: vec![method],
            notes: Vec::new(),
        }
    }

    pub fn with_generator(mut self, g: CMatrix) -> Result<Self> {
        self.generator = Some(MatrixOperator::new(g)?);
        Ok(self)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn evaluate(&self, t: f64) -> Result<MatrixOperator> {
        MatrixOperator::new(self.evaluate_matrix(t)?)
    }

    fn evaluate_matrix(&self, t: f64) -> Result<CMatrix> {
        self.admissible.check(t)?;
        if t < 0.0 && !self.family.is_group() {
            return Err(Error::InadmissibleTime(t));
        }
        if t == 0.0 {
            let n = self.dim();
            return Ok(CMatrix::identity(n, n));
        }
        self.family.evaluate(t)
    }

    /// `S ⊕ ...` on the common time lattice.
    pub fn direct_sum(
        parts: Vec<SemigroupRealization>,
        method: EmbeddingMethod,
        components: Vec<EmbeddingMethod>,
    ) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidOperator("empty direct sum".into()));
        }
        if parts.len() == 1 {
            let mut only = parts.into_iter().next().expect("one part");
            only.method = method;
            only.components = components;
            return Ok(only);
        }
        let admissible = parts
            .iter()
            .map(|p| p.admissible)
            .reduce(AdmissibleTimes::common)
            .expect("non-empty");
        let generator = parts
            .iter()
            .map(|p| p.generator.as_ref().map(|g| g.matrix().clone()))
            .collect::<Option<Vec<_>>>()
            .map(|gs| block_diagonal(&gs));
        let branch_offsets = if parts.iter().any(|p| p.branch_offsets.is_some()) {
            Some(
                parts
                    .iter()
                    .flat_map(|p| p.branch_offsets.clone().unwrap_or_else(|| vec![0; p.dim()]))
                    .collect(),
            )
        } else {
            None
        };
        let mut notes = Vec::new();
        for p in &parts {
            for n in &p.notes {
                if !notes.contains(n) {
                    notes.push(n.clone());
                }
            }
        }
        let family = Family::DirectSum(parts.into_iter().map(|p| p.family).collect());
        let mut out = SemigroupRealization::new(family, admissible, method);
        out.components = components;
        out.branch_offsets = branch_offsets;
        out.notes = notes;
        if let Some(g) = generator {
            out = out.with_generator(g)?;
        }
        Ok(out)
    }

    /// `basis · T(t) · inverse`.
    pub fn conjugated(self, basis: CMatrix, inverse: CMatrix) -> Result<Self> {
        let generator = self
            .generator
            .as_ref()
            .map(|g| &basis * g.matrix() * &inverse);
        let mut out = SemigroupRealization {
            family: Family::Conjugated {
                basis,
                inverse,
                inner: Box::new(self.family),
            },
            generator: None,
            ..self
        };
        if let Some(g) = generator {
            out = out.with_generator(g)?;
        }
        Ok(out)
    }

    /// `T(t)*`.
    pub fn adjoint(self) -> Self {
        let generator = self.generator.as_ref().map(|g| g.adjoint());
        SemigroupRealization {
            family: Family::Adjoint(Box::new(self.family)),
            generator,
            ..self
        }
    }

    pub fn summary(&self) -> RealizationSummary {
        RealizationSummary {
            method: self.method,
            components: self.components.clone(),
            family: self.family.kind(),
            dim: self.dim(),
            admissible: self.admissible,
            generator_norm: self.generator.as_ref().map(|g| spectral_norm(g.matrix())),
            branch_offsets: self.branch_offsets.clone(),
            notes: self.notes.clone(),
        }
    }
}

impl Semigroup for SemigroupRealization {
    fn dim(&self) -> usize {
        self.family.dim()
    }

    fn admissible(&self) -> AdmissibleTimes {
        self.admissible
    }

    fn is_group(&self) -> bool {
        self.family.is_group()
    }

    fn evaluate(&self, t: f64) -> Result<CMatrix> {
        self.evaluate_matrix(t)
    }

    fn generator(&self) -> Option<&CMatrix> {
        self.generator.as_ref().map(|g| g.matrix())
    }
}

/// `T_n(t) = e^{2πi·n·t} T(t)`: another semigroup with the same `T(1)`.
pub fn rescale(s: &SemigroupRealization, offset: i64) -> SemigroupRealization {
    if offset == 0 {
        return s.clone();
    }
    let generator = s.generator.as_ref().map(|g| {
        let n = g.dim();
        let shift = CMatrix::identity(n, n) * C64::new(0.0, TAU * offset as f64);
        MatrixOperator::new(g.matrix() + shift).expect("finite shift of a finite generator")
    });
    SemigroupRealization {
        family: Family::Rescaled {
            offset,
            inner: Box::new(s.family.clone()),
        },
        generator,
        ..s.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_semigroup(n: usize) -> SemigroupRealization {
        SemigroupRealization::new(
            Family::Exponential {
                generator: CMatrix::zeros(n, n),
            },
            AdmissibleTimes::Continuous,
            EmbeddingMethod::DunfordLog,
        )
        .with_generator(CMatrix::zeros(n, n))
        .unwrap()
    }

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_admissibility() {
        let g = AdmissibleTimes::Grid { per_unit: 4 };
        assert!(g.check(0.75).is_ok());
        assert!(g.check(3.0).is_ok());
        assert!(matches!(g.check(0.3), Err(Error::InadmissibleTime(_))));
        assert_eq!(g.snap(0.3), 0.25);
        assert_eq!(
            g.common(AdmissibleTimes::Grid { per_unit: 6 }),
            AdmissibleTimes::Grid { per_unit: 2 }
        );
        assert_eq!(g.common(AdmissibleTimes::Continuous), g);
    }

    #[test]
    fn translation_semigroup_rejects_negative_time() {
        let s = SemigroupRealization::new(
            Family::Translation {
                dim: 4,
                step: 1,
                per_unit: 2,
            },
            AdmissibleTimes::Grid { per_unit: 2 },
            EmbeddingMethod::NilpotentShift,
        );
        assert!(s.evaluate(-0.5).is_err());
        let half = s.evaluate(0.5).unwrap();
        assert_eq!(half.matrix()[(1, 0)], C64::new(1.0, 0.0));
        assert_eq!(half.matrix()[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn rescale_zero_is_identical() {
        let s = identity_semigroup(2);
        assert_eq!(rescale(&s, 0), s);
    }

    #[test]
    fn rescale_trivial_semigroup_at_half() {
        let s = rescale(&identity_semigroup(3), 1);
        let half = s.evaluate(0.5).unwrap();
        assert!(max_abs(&(half.matrix() + CMatrix::identity(3, 3))) <= 1e-15);
        let g = s.generator.unwrap();
        assert!((g.matrix()[(1, 1)] - C64::new(0.0, TAU)).norm() == 0.0);
    }

    #[test]
    fn rescale_keeps_endpoint_exactly() {
        let g = CMatrix::from_fn(2, 2, |i, j| C64::new(0.3 * i as f64 - 0.1 * j as f64, 0.2));
        let s = SemigroupRealization::new(
            Family::Exponential { generator: g.clone() },
            AdmissibleTimes::Continuous,
            EmbeddingMethod::DunfordLog,
        )
        .with_generator(g)
        .unwrap();
        let r = rescale(&s, 3);
        let diff = r.evaluate(1.0).unwrap().into_matrix() - s.evaluate(1.0).unwrap().into_matrix();
        assert!(spectral_norm(&diff) <= 1e-12);
    }

    #[test]
    fn direct_sum_downgrades_to_common_grid() {
        let a = identity_semigroup(1);
        let b = SemigroupRealization::new(
            Family::Translation {
                dim: 4,
                step: 1,
                per_unit: 4,
            },
            AdmissibleTimes::Grid { per_unit: 4 },
            EmbeddingMethod::NilpotentShift,
        );
        let s = SemigroupRealization::direct_sum(
            vec![a, b],
            EmbeddingMethod::DunfordLog,
            vec![EmbeddingMethod::DunfordLog, EmbeddingMethod::NilpotentShift],
        )
        .unwrap();
        assert_eq!(s.admissible, AdmissibleTimes::Grid { per_unit: 4 });
        assert!(s.generator.is_none());
        assert_eq!(s.dim(), 5);
        assert_eq!(s.evaluate(1.0).unwrap().matrix()[(0, 0)], C64::new(1.0, 0.0));
    }
}
