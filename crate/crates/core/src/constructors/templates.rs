use serde::{Deserialize, Serialize};

use super::{apportion_nilpotent, ApportionCertificate, TheoremTag};
use crate::error::Result;
use crate::jordan::{build_jordan, InversePair, JordanSpec};
use crate::matrix::{cis, ComplexMatrix, C64, ONE, ZERO};
use std::f64::consts::PI;

/// The two fixed 3×3 constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TemplateKind {
    /// `J₂(λ) ⊕ [0]`, constant `|λ|`.
    LambdaJ2PlusZero,
    /// `[λ] ⊕ J₂(0)`, constant `|λ|/√3`.
    LambdaPlusN2,
}

impl TemplateKind {
    pub fn spec(&self, lambda: C64) -> JordanSpec {
        let pairs = match self {
            TemplateKind::LambdaJ2PlusZero => [(lambda, 2), (ZERO, 1)],
            TemplateKind::LambdaPlusN2 => [(lambda, 1), (ZERO, 2)],
        };
        JordanSpec::from_pairs(&pairs).expect("valid template spec")
    }
}

fn rows(r: [[C64; 3]; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&r.map(|row| row.to_vec())).expect("finite template")
}

/// Hard-coded apportioning matrices for the two 3×3 shapes; `λ = 0` falls
/// back to the nilpotent construction at constant 1.
pub fn apportion_3x3_template(kind: TemplateKind, lambda: C64) -> Result<ApportionCertificate> {
    let spec = kind.spec(lambda);
    if lambda == ZERO {
        return apportion_nilpotent(&spec, 1.0);
    }
    let e1 = cis(PI / 3.0);
    let e2 = cis(2.0 * PI / 3.0);
    let (o, z) = (ONE, ZERO);
    let inv = ONE / lambda;
    let pair = match kind {
        TemplateKind::LambdaJ2PlusZero => {
            let m = &rows([[z, o, o], [e2, z, o], [o, z, z]]) * &ComplexMatrix::diag(&[lambda, o, o]);
            let m_inv = &ComplexMatrix::diag(&[inv, o, o]) * &rows([[z, z, o], [o, -o, e2], [z, o, -e2]]);
            InversePair { m, m_inv }
        }
        TemplateKind::LambdaPlusN2 => {
            let m = &rows([[z, o, e2], [o, z, e1], [o, o, z]]) * &ComplexMatrix::diag(&[o, lambda, o]);
            let e1c = e1.conj();
            let core = rows([[-o, e1, o], [o, -e1, e1], [e1c, e1c, -e1c]]).scale(ONE / (ONE + e1));
            let m_inv = &ComplexMatrix::diag(&[o, inv, o]) * &core;
            InversePair { m, m_inv }
        }
    };
    ApportionCertificate::from_pair(pair, &build_jordan(&spec), TheoremTag::ThreeByThreeTemplate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j2_plus_zero_image() {
        let cert = apportion_3x3_template(TemplateKind::LambdaJ2PlusZero, ONE).unwrap();
        let e2 = cis(2.0 * PI / 3.0);
        let want = rows([[ONE, -ONE, e2], [e2, -e2, -ONE], [ONE, -ONE, ONE + e2]]);
        assert!(cert.b.max_abs_diff(&want) < 1e-14);
        assert!((cert.kappa - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lambda_plus_n2_image() {
        // rows of M₀ X C / (1 + e₁), X = D A D⁻¹ with rows (λ,0,0), (0,0,λ), 0
        let lam = C64::new(0.3, -1.2);
        let cert = apportion_3x3_template(TemplateKind::LambdaPlusN2, lam).unwrap();
        let e1 = cis(PI / 3.0);
        let e1c = e1.conj();
        let c1 = [-ONE, e1, ONE];
        let c3 = [e1c, e1c, -e1c];
        let want = rows([c3, c1, [c1[0] + c3[0], c1[1] + c3[1], c1[2] + c3[2]]]).scale(lam / (ONE + e1));
        assert!(cert.b.max_abs_diff(&want) < 1e-13);
        assert!((cert.b.trace() - lam).norm() < 1e-13);
        assert!((cert.kappa - lam.norm() / 3f64.sqrt()).abs() < 1e-13);
        let unit = apportion_3x3_template(TemplateKind::LambdaPlusN2, ONE).unwrap();
        assert!((unit.kappa - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn complex_lambda_and_zero() {
        let lam = C64::new(2.0, -1.0);
        let cert = apportion_3x3_template(TemplateKind::LambdaJ2PlusZero, lam).unwrap();
        assert!((cert.kappa - 5f64.sqrt()).abs() < 1e-12);
        let nil = apportion_3x3_template(TemplateKind::LambdaPlusN2, ZERO).unwrap();
        assert_eq!(nil.theorem_tag, TheoremTag::Nilpotent);
    }
}
