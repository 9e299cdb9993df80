use super::contour::Contour;
use crate::error::Result;
use crate::opcore::{spectrum, MatrixOperator};

/// `P = (1/2πi) ∮ (λI − m)⁻¹ dλ`, the spectral projection onto the
/// eigenvalues enclosed by the contour.
pub fn riesz_projection(m: &MatrixOperator, contour: &Contour) -> Result<MatrixOperator> {
    let eigs = spectrum(m)?;
    contour.check_clearance(&eigs)?;
    MatrixOperator::new(contour.integrate(m.matrix(), |_| num_complex::Complex64::new(1.0, 0.0))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opcore::{frobenius_norm, C64};
    use crate::error::Error;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn projects_onto_enclosed_eigenvalue() {
        let m = MatrixOperator::from_diagonal(&[c(1.0, 0.0), c(5.0, 0.0)]).unwrap();
        let p = riesz_projection(&m, &Contour::circle(c(1.0, 0.0), 1.0, 128)).unwrap();
        let want = MatrixOperator::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(frobenius_norm(&(p.matrix() - want.matrix())) < 1e-10);
    }

    #[test]
    fn full_contour_gives_identity() {
        let m = MatrixOperator::from_real_rows(&[&[1.0, 3.0], &[0.0, -2.0]]).unwrap();
        let p = riesz_projection(&m, &Contour::circle(c(0.0, 0.0), 4.0, 128)).unwrap();
        assert!(frobenius_norm(&(p.matrix() - MatrixOperator::identity(2).matrix())) < 1e-10);
    }

    #[test]
    fn jordan_block_projection_is_identity() {
        // resolvent of J₂(2) is [[1/(λ−2), 1/(λ−2)²], [0, 1/(λ−2)]]; the
        // double pole integrates to 0, the simple poles to 1
        let m = MatrixOperator::from_real_rows(&[&[2.0, 1.0], &[0.0, 2.0]]).unwrap();
        let p = riesz_projection(&m, &Contour::circle(c(2.0, 0.0), 0.5, 128)).unwrap();
        assert!(frobenius_norm(&(p.matrix() - MatrixOperator::identity(2).matrix())) < 1e-8);
    }

    #[test]
    fn clearance_violation() {
        let m = MatrixOperator::from_diagonal(&[c(1.0, 0.0)]).unwrap();
        let r = riesz_projection(&m, &Contour::circle(c(0.0, 0.0), 1.0, 32));
        assert!(matches!(r, Err(Error::ContourClearance { .. })));
    }
}
