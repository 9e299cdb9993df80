use super::contour::Contour;
use crate::error::{Error, Result};
use crate::opcore::{frobenius_norm, schur, spectrum, CMatrix, MatrixOperator, C64};

/// `A = (1/2πi) ∮ log(λ) (λI − m)⁻¹ dλ` with the branch fixed by the
/// contour's cut.
pub fn dunford_log(m: &MatrixOperator, contour: &Contour) -> Result<MatrixOperator> {
    let eigs = spectrum(m)?;
    contour.check_for_log(&eigs)?;
    let cut = contour.cut;
    let a = contour.integrate(m.matrix(), |z| cut.log(z))?;
    MatrixOperator::new(a)
}

/// `m^t = (1/2πi) ∮ λ^t (λI − m)⁻¹ dλ`, `λ^t = exp(t·log λ)` on the
/// contour's branch.
pub fn fractional_power(m: &MatrixOperator, t: f64, contour: &Contour) -> Result<MatrixOperator> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidOperator(format!(
            "fractional power order must lie in (0, 1], got {t}"
        )));
    }
    let eigs = spectrum(m)?;
    contour.check_for_log(&eigs)?;
    let cut = contour.cut;
    let p = contour.integrate(m.matrix(), |z| (cut.log(z) * t).exp())?;
    MatrixOperator::new(p)
}

/// Principal logarithm by Schur triangularization and inverse scaling and
/// squaring: repeated triangular square roots until `‖R − I‖_F ≤ 0.05`,
/// then the Mercator series for `log(I + X)`.
pub fn principal_log_oracle(m: &MatrixOperator) -> Result<MatrixOperator> {
    let (q, t) = schur(m.matrix())?;
    let n = t.nrows();
    for i in 0..n {
        let d = t[(i, i)];
        if d.norm() == 0.0 {
            return Err(Error::Singular);
        }
        if d.re < 0.0 && d.im.abs() <= 1e-14 * d.norm() {
            return Err(Error::EigenvalueOnCut(d));
        }
    }
    let id = CMatrix::identity(n, n);
    let mut r = t;
    let mut halvings = 0;
    while frobenius_norm(&(&r - &id)) > 0.05 {
        if halvings >= 64 {
            return Err(Error::NonConvergence("inverse scaling and squaring"));
        }
        r = triangular_sqrt(&r);
        halvings += 1;
    }
    let x = &r - &id;
    let mut series = CMatrix::zeros(n, n);
    let mut power = x.clone();
    for k in 1..=40 {
        let term = &power / C64::new(k as f64, 0.0);
        if k % 2 == 1 {
            series += &term;
        } else {
            series -= &term;
        }
        if frobenius_norm(&term) < 1e-20 {
            break;
        }
        power = &power * &x;
    }
    let log_t = series * C64::new(2f64.powi(halvings), 0.0);
    MatrixOperator::new(&q * log_t * q.adjoint())
}

/// Principal square root of an upper-triangular matrix with no eigenvalue
/// on the closed negative real axis.
pub(crate) fn triangular_sqrt(t: &CMatrix) -> CMatrix {
    let n = t.nrows();
    let mut r = CMatrix::zeros(n, n);
    for j in 0..n {
        r[(j, j)] = t[(j, j)].sqrt();
        for i in (0..j).rev() {
            let mut s = t[(i, j)];
            for k in (i + 1)..j {
                s -= r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = s / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}
