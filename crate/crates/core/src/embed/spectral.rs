//! Constructors through spectral data: logarithms of invertible matrices,
//! diagonal and normal operators, unitaries, and compact operators split
//! into eigenvalue clusters.

use std::f64::consts::TAU;

use super::realization::{AdmissibleTimes, Family, SemigroupRealization};
use super::verdict::EmbeddingMethod;
use crate::error::{Error, Result};
use crate::funcalc::{dunford_log, principal_log_oracle, riesz_projection, BranchCut, Contour};
use crate::opcore::{
    rank_analysis, schur, spectral_norm, spectrum, unitarity_defect, unsigned_phase, CMatrix,
    MatrixOperator, Tolerance, C64,
};

pub const UNITARY_TOLERANCE: f64 = 1e-8;
/// `cond(S)` above which the cluster basis is rejected.
pub const MAX_PROJECTOR_CONDITION: f64 = 1e8;

/// `exp(tA)` with `A` the contour logarithm of `m`. The cut is the negative
/// real axis unless an eigenvalue sits on it, in which case it is rotated
/// by the smallest angle that clears the spectrum.
pub fn embed_dense_invertible(
    m: &MatrixOperator,
    nodes: usize,
    clearance: f64,
) -> Result<SemigroupRealization> {
    if !rank_analysis(m, Tolerance::Auto)?.kernel_dim.is_zero() {
        return Err(Error::Singular);
    }
    let eigs = spectrum(m)?;
    if let Some(k) = eigs.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroEigenvalue(k));
    }
    let cut = BranchCut::clearing(&eigs, clearance)?;
    let contour = Contour::design(&eigs, &[], Some(cut), nodes)?.with_clearance(clearance);
    let g = dunford_log(m, &contour)?.into_matrix();
    let mut s = SemigroupRealization::new(
        Family::Exponential {
            generator: g.clone(),
        },
        AdmissibleTimes::Continuous,
        EmbeddingMethod::DunfordLog,
    );
    if cut.is_principal() {
        if let Ok(oracle) = principal_log_oracle(m) {
            let gap = spectral_norm(&(&g - oracle.matrix()));
            s = s.with_note(format!("principal logarithm cross-check: {gap:.3e}"));
        }
    } else {
        s = s.with_note(format!("branch cut rotated to angle {:.6}", cut.angle));
    }
    s.with_generator(g)
}

/// Principal logarithm with `-0.0` imaginary parts read as `+0.0`, so that
/// `Log(−1) = iπ`.
fn principal_log(z: C64) -> C64 {
    C64::new(z.re, if z.im == 0.0 { 0.0 } else { z.im }).ln()
}

/// `diag(exp(t·(Log λⱼ + 2πi·kⱼ)))`.
pub fn embed_diagonal(eigs: &[C64], offsets: &[i64]) -> Result<SemigroupRealization> {
    if eigs.is_empty() {
        return Err(Error::InvalidOperator("no eigenvalues".into()));
    }
    if offsets.len() != eigs.len() {
        return Err(Error::InvalidOperator(format!(
            "{} branch offsets for {} eigenvalues",
            offsets.len(),
            eigs.len()
        )));
    }
    if let Some(k) = eigs.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroEigenvalue(k));
    }
    if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite);
    }
    let rates: Vec<C64> = eigs
        .iter()
        .zip(offsets)
        .map(|(&z, &k)| principal_log(z) + C64::new(0.0, TAU * k as f64))
        .collect();
    let g = CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&rates));
    let mut s = SemigroupRealization::new(
        Family::Diagonal { rates },
        AdmissibleTimes::Continuous,
        EmbeddingMethod::DiagonalBranch,
    );
    s.branch_offsets = Some(offsets.to_vec());
    s.with_generator(g)
}

/// `Q·diag(e^{itφⱼ})·Q*` with `φⱼ ∈ [0, 2π)` from the Schur form of `u`.
pub fn embed_unitary(u: &MatrixOperator) -> Result<SemigroupRealization> {
    let defect = unitarity_defect(u.matrix());
    if defect > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary(defect));
    }
    let (q, t) = schur(u.matrix())?;
    let rates: Vec<C64> = t
        .diagonal()
        .iter()
        .map(|&z| C64::new(0.0, unsigned_phase(z)))
        .collect();
    let g = &q * CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&rates)) * q.adjoint();
    // skew-Hermitian part only; removes rounding from the two products
    let g = (&g - g.adjoint()) * C64::new(0.5, 0.0);
    let qa = q.adjoint();
    SemigroupRealization::new(
        Family::Conjugated {
            basis: q,
            inverse: qa,
            inner: Box::new(Family::Diagonal { rates }),
        },
        AdmissibleTimes::Continuous,
        EmbeddingMethod::UnitarySpectral,
    )
    .with_generator(g)
}

/// Multiplication by `|z|ᵗ e^{itφ(z)}`, `φ(z) ∈ [0, 2π)`, on `L²(μ)` for a
/// discrete measure. The construction does not depend on the weights.
pub fn embed_normal(points: &[C64], weights: &[f64]) -> Result<SemigroupRealization> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::InvalidOperator(format!(
            "{} sample points and {} weights",
            points.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
        return Err(Error::InvalidOperator("sample weights must be positive".into()));
    }
    if let Some(k) = points.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroEigenvalue(k));
    }
    let rates: Vec<C64> = points
        .iter()
        .map(|&z| C64::new(z.norm().ln(), unsigned_phase(z)))
        .collect();
    let g = CMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&rates));
    SemigroupRealization::new(
        Family::Diagonal { rates },
        AdmissibleTimes::Continuous,
        EmbeddingMethod::NormalSpectral,
    )
    .with_generator(g)
}

/// Spectral decomposition of an injective truncation into the invariant
/// subspaces of its eigenvalue clusters, each embedded by a logarithm on
/// its own branch. `cluster_radius` defaults to a tenth of the smallest
/// eigenvalue modulus.
pub fn embed_compact_injective(
    m: &MatrixOperator,
    cluster_radius: Option<f64>,
    nodes: usize,
    clearance: f64,
) -> Result<SemigroupRealization> {
    if !rank_analysis(m, Tolerance::Auto)?.kernel_dim.is_zero() {
        return Err(Error::Singular);
    }
    let eigs = spectrum(m)?;
    let smallest = eigs.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    if smallest == 0.0 {
        return Err(Error::Singular);
    }
    let radius = cluster_radius.unwrap_or(0.1 * smallest);
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidOperator("cluster radius must be positive".into()));
    }
    let clusters = cluster_by_radius(&eigs, radius);
    let n = m.dim();

    let mut projections = Vec::with_capacity(clusters.len());
    let mut columns = Vec::with_capacity(clusters.len());
    for cluster in &clusters {
        let center = cluster.iter().sum::<C64>() / cluster.len() as f64;
        let spread = cluster.iter().map(|z| (z - center).norm()).fold(0.0, f64::max);
        if center.norm() <= spread + radius {
            return Err(Error::ClusterNearZero { center, radius });
        }
        let others: Vec<C64> = eigs.iter().filter(|z| !cluster.contains(z)).copied().collect();
        let contour = Contour::design(cluster, &others, None, nodes)?.with_clearance(clearance);
        let p = riesz_projection(m, &contour)?.into_matrix();
        let svd = nalgebra::SVD::try_new(p.clone(), true, false, f64::EPSILON, 10_000 + 100 * n * n)
            .ok_or(Error::NonConvergence("singular value decomposition"))?;
        let u = svd.u.expect("requested");
        // the SVD basis can be off range(P) by ~1e-5 for non-normal input;
        // one application of P puts it back, QR restores orthonormality
        let back = &p * u.columns(0, cluster.len());
        columns.push(back.qr().q());
        projections.push(p);
    }

    let s = hstack(n, &columns);
    let sv = s.singular_values();
    let cond = sv.max() / sv.min();
    if !(cond <= MAX_PROJECTOR_CONDITION) {
        return Err(Error::ProjectorConditioning(cond));
    }
    let s_inv = s.clone().lu().try_inverse().ok_or(Error::Singular)?;
    let b = &s_inv * m.matrix() * &s;

    let mut parts = Vec::with_capacity(clusters.len());
    let mut offset = 0;
    let mut leakage = 0.0_f64;
    for cluster in &clusters {
        let k = cluster.len();
        let block = b.view((offset, offset), (k, k)).into_owned();
        let mut off = b.columns(offset, k).into_owned();
        off.view_mut((offset, 0), (k, k)).fill(C64::new(0.0, 0.0));
        leakage = leakage.max(off.iter().map(|z| z.norm()).fold(0.0, f64::max));
        parts.push(embed_dense_invertible(&MatrixOperator::new(block)?, nodes, clearance)?);
        offset += k;
    }

    let total: CMatrix = projections.iter().fold(CMatrix::zeros(n, n), |acc, p| acc + p);
    let sum_defect = spectral_norm(&(total - CMatrix::identity(n, n)));
    let commutator = projections
        .iter()
        .map(|p| spectral_norm(&(p * m.matrix() - m.matrix() * p)))
        .fold(0.0, f64::max);

    let components = vec![EmbeddingMethod::CompactRiesz];
    let inner = SemigroupRealization::direct_sum(parts, EmbeddingMethod::CompactRiesz, components)?;
    let mut out = inner.conjugated(s, s_inv)?;
    out.notes = vec![
        format!("{} eigenvalue clusters at radius {radius:.3e}", clusters.len()),
        format!("projector sum defect {sum_defect:.3e}, commutator defect {commutator:.3e}"),
        format!("basis condition {cond:.3e}, off-block leakage {leakage:.3e}"),
    ];
    Ok(out)
}

/// Single-linkage clusters: eigenvalues closer than `radius` share a cluster.
fn cluster_by_radius(eigs: &[C64], radius: f64) -> Vec<Vec<C64>> {
    let n = eigs.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (eigs[i] - eigs[j]).norm() <= radius {
                let (a, b) = (root(&mut label, i), root(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out: Vec<(usize, Vec<C64>)> = Vec::new();
    for i in 0..n {
        let r = root(&mut label, i);
        match out.iter_mut().find(|(k, _)| *k == r) {
            Some((_, group)) => group.push(eigs[i]),
            None => out.push((r, vec![eigs[i]])),
        }
    }
    out.into_iter().map(|(_, g)| g).collect()
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
