use std::f64::consts::PI;

use serde::Serialize;

use crate::error::Result;
use crate::opcore::{singular_values, spectrum, CMatrix, MatrixOperator, C64};

/// Largest `|λ|·‖R(λ, m)‖` accepted as a sector constant.
pub const DEFAULT_CONSTANT_CAP: f64 = 1e3;
const RAYS_PER_SIDE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorSample {
    pub lambda: C64,
    pub resolvent_norm: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorReport {
    /// Smallest tested half-angle with spectrum inside the sector and a
    /// bounded resolvent constant outside it.
    pub best_angle: Option<f64>,
    pub constant_estimate: f64,
    pub samples: Vec<SectorSample>,
}

pub fn default_angles() -> Vec<f64> {
    (1..16).map(|k| PI * k as f64 / 16.0).collect()
}

pub fn default_radii() -> Vec<f64> {
    (-6..=6).map(|k| 10f64.powf(k as f64 / 2.0)).collect()
}

/// Samples `‖(λI − m)⁻¹‖` on rays outside each candidate sector
/// `{|arg z| ≤ ω}` and reports the smallest admissible `ω`.
pub fn sectoriality_probe(m: &MatrixOperator, angles: &[f64], radii: &[f64]) -> Result<SectorReport> {
    sectoriality_probe_with_cap(m, angles, radii, DEFAULT_CONSTANT_CAP)
}

pub fn sectoriality_probe_with_cap(
    m: &MatrixOperator,
    angles: &[f64],
    radii: &[f64],
    cap: f64,
) -> Result<SectorReport> {
    let eigs = spectrum(m)?;
    let mut angles: Vec<f64> = angles.iter().copied().filter(|a| *a > 0.0 && *a < PI).collect();
    angles.sort_by(f64::total_cmp);

    let mut last = SectorReport {
        best_angle: None,
        constant_estimate: f64::INFINITY,
        samples: Vec::new(),
    };
    for &omega in &angles {
        let inside = eigs
            .iter()
            .all(|z| z.norm() <= 1e-14 || z.arg().abs() <= omega + 1e-12);
        let samples = sample_rays(m.matrix(), omega, radii)?;
        let constant = samples
            .iter()
            .map(|s| s.lambda.norm() * s.resolvent_norm)
            .fold(0.0_f64, f64::max);
        let samples = samples
            .into_iter()
            .map(|s| SectorSample {
                bound: constant / s.lambda.norm(),
                ..s
            })
            .collect();
        let report = SectorReport {
            best_angle: None,
            constant_estimate: constant,
            samples,
        };
        if inside && constant.is_finite() && constant <= cap {
            return Ok(SectorReport {
                best_angle: Some(omega),
                ..report
            });
        }
        last = report;
    }
    Ok(last)
}

fn sample_rays(m: &CMatrix, omega: f64, radii: &[f64]) -> Result<Vec<SectorSample>> {
    let n = m.nrows();
    let mut out = Vec::new();
    for k in 1..=RAYS_PER_SIDE {
        let phi = omega + (PI - omega) * k as f64 / RAYS_PER_SIDE as f64;
        let signs: &[f64] = if k == RAYS_PER_SIDE { &[1.0] } else { &[1.0, -1.0] };
        for &sign in signs {
            for &r in radii {
                let lambda = C64::from_polar(r, sign * phi);
                let mut shifted = -m.clone();
                for i in 0..n {
                    shifted[(i, i)] += lambda;
                }
                let s = singular_values(&shifted)?;
                let smin = s.last().copied().unwrap_or(0.0);
                let resolvent_norm = if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
                out.push(SectorSample {
                    lambda,
                    resolvent_norm,
                    bound: f64::INFINITY,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positive_diagonal_is_sectorial_with_small_angle() {
        let m = MatrixOperator::from_diagonal(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0)]).unwrap();
        let r = sectoriality_probe(&m, &default_angles(), &default_radii()).unwrap();
        let angle = r.best_angle.unwrap();
        assert!(angle < PI / 4.0);
        assert!(r.constant_estimate.is_finite());
        // explicit resolvent: 1/dist(λ, {1, 2})
        for s in &r.samples {
            let d = (s.lambda - 1.0).norm().min((s.lambda - 2.0).norm());
            assert!((s.resolvent_norm - 1.0 / d).abs() < 1e-9 * s.resolvent_norm);
            assert!(s.resolvent_norm <= s.bound * (1.0 + 1e-12));
        }
    }

    #[test]
    fn identity_constant_is_bounded() {
        let r = sectoriality_probe(&MatrixOperator::identity(3), &default_angles(), &default_radii())
            .unwrap();
        assert!(r.best_angle.is_some());
        for s in &r.samples {
            let want = 1.0 / (s.lambda - 1.0).norm();
            assert!((s.resolvent_norm - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn minus_identity_is_not_sectorial() {
        let m = MatrixOperator::from_diagonal(&[C64::new(-1.0, 0.0); 2]).unwrap();
        let r = sectoriality_probe(&m, &default_angles(), &default_radii()).unwrap();
        assert_eq!(r.best_angle, None);
    }
}
