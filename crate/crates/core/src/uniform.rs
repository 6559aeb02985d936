//! Uniformity checks, similarity images and the two universal lower bounds
//! on apportionment constants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Reciprocal condition number below which `M` is treated as singular.
pub const RCOND_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { rel: 1e-9, abs: 1e-12 }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel >= 0.0 && abs >= 0.0) || (rel == 0.0 && abs == 0.0) || !rel.is_finite() || !abs.is_finite() {
            return Err(Error::InvalidInput(format!("bad tolerance rel={rel} abs={abs}")));
        }
        Ok(Self { rel, abs })
    }

    /// Largest admissible deviation from `kappa`.
    pub fn allowance(&self, kappa: f64) -> f64 {
        self.abs.max(self.rel * kappa)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub is_uniform: bool,
    /// Mean entry modulus.
    pub kappa: f64,
    /// Largest deviation of an entry modulus from `kappa`.
    pub defect: f64,
}

/// Checks whether all entries of `b` share a modulus. Rectangular input is
/// allowed.
pub fn is_uniform(b: &ComplexMatrix, tol: Tolerance) -> Result<UniformityReport> {
    if b.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let moduli: Vec<f64> = b.iter().map(|z| z.norm()).collect();
    let kappa = moduli.iter().sum::<f64>() / moduli.len() as f64;
    let defect = moduli.iter().map(|m| (m - kappa).abs()).fold(0.0, f64::max);
    Ok(UniformityReport { is_uniform: defect <= tol.allowance(kappa), kappa, defect })
}

fn check_pair(m: &ComplexMatrix, a: &ComplexMatrix) -> Result<usize> {
    let n = m.order()?;
    let na = a.order()?;
    if n != na {
        return Err(Error::ShapeMismatch(format!("M has order {n}, A has order {na}")));
    }
    Ok(n)
}

/// `B = M A M⁻¹`, computed by solving `B M = M A` through an LU factorization
/// of `Mᵀ`. Fails when `M` is numerically singular.
pub fn similarity_image(m: &ComplexMatrix, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_pair(m, a)?;
    let lu = m.transpose().lu()?;
    let rcond = lu.rcond();
    if rcond < RCOND_THRESHOLD {
        return Err(Error::Singular { rcond });
    }
    let ma = m * a;
    Ok(lu.solve(&ma.transpose())?.transpose())
}

/// `M A Minv` for a caller-supplied inverse.
pub fn similarity_image_with_inverse(
    m: &ComplexMatrix,
    m_inv: &ComplexMatrix,
    a: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    check_pair(m, a)?;
    check_pair(m_inv, a)?;
    Ok(&(m * a) * m_inv)
}

/// `|tr A| / n`.
pub fn trace_lower_bound(a: &ComplexMatrix) -> Result<f64> {
    let n = a.order().map_err(|e| Error::InvalidInput(e.to_string()))?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    Ok(a.trace().norm() / n as f64)
}

/// `n^{-1/2} |det A|^{1/n}`, evaluated in log space; zero for singular `A`.
pub fn hadamard_lower_bound(a: &ComplexMatrix) -> Result<f64> {
    let n = a.order().map_err(|e| Error::InvalidInput(e.to_string()))?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let lu = a.lu()?;
    if lu.is_exactly_singular() {
        return Ok(0.0);
    }
    let nf = n as f64;
    Ok((lu.log_abs_det() / nf - 0.5 * nf.ln()).exp())
}

/// Larger of the trace and Hadamard bounds.
pub fn lower_bound(a: &ComplexMatrix) -> Result<f64> {
    Ok(trace_lower_bound(a)?.max(hadamard_lower_bound(a)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{C64, ONE, ZERO};

    #[test]
    fn zero_matrix_is_uniform() {
        let r = is_uniform(&ComplexMatrix::zeros(3, 3), Tolerance::new(1e-12, 1e-12).unwrap()).unwrap();
        assert!(r.is_uniform);
        assert_eq!(r.kappa, 0.0);
    }

    #[test]
    fn unit_moduli_are_uniform() {
        let i = C64::new(0.0, 1.0);
        let b = ComplexMatrix::from_rows(&[vec![ONE, -ONE], vec![i, -i]]).unwrap();
        let r = is_uniform(&b, Tolerance::default()).unwrap();
        assert!(r.is_uniform);
        assert!((r.kappa - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_uniform_detected() {
        let b = ComplexMatrix::from_real_rows(&[&[1.0, 2.0]]);
        let r = is_uniform(&b, Tolerance::default()).unwrap();
        assert!(!r.is_uniform);
        assert!((r.defect - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_matrix_rejected() {
        assert!(is_uniform(&ComplexMatrix::zeros(0, 0), Tolerance::default()).is_err());
    }

    #[test]
    fn diagonal_scaling_of_e12() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = similarity_image(&m, &a).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[0.0, 0.5], &[0.0, 0.0]]);
        assert!(b.max_abs_diff(&want) < 1e-15);
        let id = similarity_image(&ComplexMatrix::identity(2), &a).unwrap();
        assert_eq!(id, a);
    }

    #[test]
    fn singular_similarity_rejected() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        let a = ComplexMatrix::identity(2);
        assert!(matches!(similarity_image(&m, &a), Err(Error::Singular { .. })));
    }

    #[test]
    fn bounds() {
        assert_eq!(trace_lower_bound(&ComplexMatrix::zeros(4, 4)).unwrap(), 0.0);
        let d = ComplexMatrix::diag(&[C64::new(1.0, 0.0), C64::new(2.0, 0.0), C64::new(3.0, 0.0)]);
        assert!((trace_lower_bound(&d).unwrap() - 2.0).abs() < 1e-15);
        let io = ComplexMatrix::diag(&[ONE, ONE, ZERO, ZERO]);
        assert_eq!(trace_lower_bound(&io).unwrap(), 0.5);
        assert_eq!(hadamard_lower_bound(&io).unwrap(), 0.0);
        let i3 = ComplexMatrix::identity(3);
        assert!((hadamard_lower_bound(&i3).unwrap() - 3f64.sqrt().recip()).abs() < 1e-15);
        let lam = C64::new(1.5, -2.0);
        let pm = ComplexMatrix::diag(&[lam, -lam]);
        assert!((hadamard_lower_bound(&pm).unwrap() - lam.norm() / 2f64.sqrt()).abs() < 1e-14);
        assert!(trace_lower_bound(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
