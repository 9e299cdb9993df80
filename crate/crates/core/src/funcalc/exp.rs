use crate::error::{Error, Result};
use crate::opcore::{is_finite, CMatrix, MatrixOperator, C64};

/// `exp(t·m)` by Padé scaling and squaring (nalgebra's implementation of
/// Al-Mohy–Higham). Overflow is reported, never saturated.
pub fn matrix_exp(m: &MatrixOperator, t: f64) -> Result<MatrixOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    MatrixOperator::new(expm(m.matrix(), t)?)
}

pub(crate) fn expm(m: &CMatrix, t: f64) -> Result<CMatrix> {
    let n = m.nrows();
    if t == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    let scaled = m * C64::new(t, 0.0);
    let norm1 = (0..n)
        .map(|j| scaled.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    if !norm1.is_finite() {
        return Err(Error::Overflow(norm1));
    }
    // beyond this the squaring phase is certain to leave f64 range or lose
    // every digit; nalgebra would loop on it for a long time
    if norm1 > 1e8 {
        return Err(Error::Overflow(norm1));
    }
    let e = scaled.exp();
    if !is_finite(&e) {
        return Err(Error::Overflow(norm1));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::frobenius_norm;
    use crate::samples;

    #[test]
    fn zero_time_gives_identity() {
        let m = MatrixOperator::from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(matrix_exp(&m, 0.0).unwrap(), MatrixOperator::identity(2));
    }

    #[test]
    fn nilpotent_series_terminates() {
        let m = MatrixOperator::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let want = MatrixOperator::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        let got = matrix_exp(&m, 1.0).unwrap();
        assert!(frobenius_norm(&(got.matrix() - want.matrix())) < 1e-15);
    }

    #[test]
    fn diagonal_logs() {
        let m = MatrixOperator::from_diagonal(&[C64::new(2f64.ln(), 0.0), C64::new(3f64.ln(), 0.0)])
            .unwrap();
        let got = matrix_exp(&m, 1.0).unwrap();
        let want = MatrixOperator::from_diagonal(&[C64::new(2.0, 0.0), C64::new(3.0, 0.0)]).unwrap();
        assert!(frobenius_norm(&(got.matrix() - want.matrix())) < 1e-12);
    }

    #[test]
    fn matches_eigendecomposition() {
        let mut rng = samples::rng(8);
        let eigs = [C64::new(0.3, 1.0), C64::new(-0.5, 0.2), C64::new(1.1, -0.7), C64::new(0.0, 2.0)];
        // m = S D S⁻¹ so exp(m) = S exp(D) S⁻¹; rebuild S from the same draw
        let m = samples::with_spectrum(&mut rng, &eigs, 0.3);
        let mut rng = samples::rng(8);
        let g = samples::complex_gaussian(&mut rng, 4, 4);
        let s = CMatrix::identity(4, 4) + g * C64::new(0.3 / 2.0, 0.0);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, eigs.iter().map(|z| z.exp())));
        let oracle = &s * d * s.clone().try_inverse().unwrap();
        let got = matrix_exp(&m, 1.0).unwrap();
        let rel = frobenius_norm(&(got.matrix() - &oracle)) / frobenius_norm(&oracle);
        assert!(rel < 1e-9, "{rel}");
    }

    #[test]
    fn overflow_reported() {
        let m = MatrixOperator::from_diagonal(&[C64::new(1000.0, 0.0)]).unwrap();
        assert!(matches!(matrix_exp(&m, 1.0), Err(Error::Overflow(_))));
    }
}
