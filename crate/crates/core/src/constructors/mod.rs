//! Explicit apportioning matrices. Every constructor returns a certificate
//! that has already been checked against its input.

mod half_rank;
mod nilpotent;
mod perturb;
mod rank_one;
mod templates;
mod two_by_two;

use serde::Serialize;

pub use half_rank::{apportion_a_oplus_zeros, apportion_half_rank, apportion_i_oplus_o, half_rank_plan, HalfRankPlan};
pub use nilpotent::{apportion_nilpotent, nilpotent_base_pair};
pub use perturb::{apportion_perturb_identity, perturb_identity_constants, perturb_identity_matrix};
pub use rank_one::{apportion_rank_one, spiral_sum, SpiralSolution};
pub use templates::{apportion_3x3_template, TemplateKind};
pub use two_by_two::{
    apportion_2x2, is_imaginary_ratio, is_negated_pair, polar_condition_2x2, two_by_two_constants, two_by_two_plan,
    TwoByTwoPlan,
};

use crate::error::{Error, Result};
use crate::jordan::InversePair;
use crate::matrix::{cis, ComplexMatrix, C64, ONE};
use crate::uniform::{is_uniform, Tolerance, UniformityReport};
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TheoremTag {
    PadZero,
    Nilpotent,
    IOplusO,
    HalfRank,
    RankOne,
    PerturbIdentity,
    TwoByTwo,
    ThreeByThreeTemplate,
    Search,
}

impl TheoremTag {
    pub fn name(&self) -> &'static str {
        match self {
            TheoremTag::PadZero => "PadZero",
            TheoremTag::Nilpotent => "Nilpotent",
            TheoremTag::IOplusO => "IOplusO",
            TheoremTag::HalfRank => "HalfRank",
            TheoremTag::RankOne => "RankOne",
            TheoremTag::PerturbIdentity => "PerturbIdentity",
            TheoremTag::TwoByTwo => "TwoByTwo",
            TheoremTag::ThreeByThreeTemplate => "ThreeByThreeTemplate",
            TheoremTag::Search => "Search",
        }
    }
}

/// An apportioning matrix `M`, its inverse, the uniform image
/// `B = M A M⁻¹` and the common modulus `kappa`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApportionCertificate {
    pub m: ComplexMatrix,
    pub m_inv: ComplexMatrix,
    pub b: ComplexMatrix,
    pub kappa: f64,
    pub theorem_tag: TheoremTag,
}

impl ApportionCertificate {
    /// Builds the certificate for `a` from an inverse pair, measuring `B`
    /// and its mean modulus, and checks it with the default tolerance.
    pub fn from_pair(pair: InversePair, a: &ComplexMatrix, tag: TheoremTag) -> Result<Self> {
        let b = &(&pair.m * a) * &pair.m_inv;
        let kappa = is_uniform(&b, Tolerance::default())?.kappa;
        let cert = Self { m: pair.m, m_inv: pair.m_inv, b, kappa, theorem_tag: tag };
        cert.verify(a, Tolerance::default())?;
        Ok(cert)
    }

    pub fn order(&self) -> usize {
        self.m.rows()
    }

    pub fn pair(&self) -> InversePair {
        InversePair { m: self.m.clone(), m_inv: self.m_inv.clone() }
    }

    /// Re-checks the certificate against `a`: `M · Minv ≈ I`,
    /// `B ≈ M A Minv`, and `B` uniform under `tol`.
    pub fn verify(&self, a: &ComplexMatrix, tol: Tolerance) -> Result<UniformityReport> {
        let n = self.order();
        if a.rows() != n || a.cols() != n || self.m_inv.rows() != n || self.b.rows() != n {
            return Err(Error::ShapeMismatch("certificate and matrix orders differ".into()));
        }
        let residual = self.pair().residual();
        if residual > n as f64 * 1e-10 {
            return Err(Error::Verification(format!("M·Minv deviates from I by {residual:.3e}")));
        }
        let b = &(&self.m * a) * &self.m_inv;
        let scale = self.kappa.max(a.max_abs()).max(1.0);
        let drift = b.max_abs_diff(&self.b);
        if drift > 1e-9 * scale {
            return Err(Error::Verification(format!("stored B differs from M A Minv by {drift:.3e}")));
        }
        let report = is_uniform(&b, tol)?;
        if !report.is_uniform {
            return Err(Error::Verification(format!(
                "image is not uniform: kappa {:.6e}, defect {:.3e}",
                report.kappa, report.defect
            )));
        }
        Ok(report)
    }

    /// Certificate for `Q⁻¹ A' Q` given one for `A'`, where `pair = (Q, Q⁻¹)`:
    /// `M ↦ M Q`, `Minv ↦ Q⁻¹ Minv`. `B` and `kappa` are unchanged.
    pub fn pulled_back(&self, q: &InversePair) -> Self {
        Self {
            m: &self.m * &q.m,
            m_inv: &q.m_inv * &self.m_inv,
            b: self.b.clone(),
            kappa: self.kappa,
            theorem_tag: self.theorem_tag,
        }
    }

    pub fn with_tag(mut self, tag: TheoremTag) -> Self {
        self.theorem_tag = tag;
        self
    }
}

/// From a certificate for `A`, one for `A ⊕ [0]` with the same constant:
/// `M' = N (M ⊕ 1)` with `N = [[I, −ω e₁], [ω e₁ᵀ, 1]]`, `ω = e^{iπ/3}`,
/// whose inverse is `[[D, e₁], [−e₁ᵀ, ω̄]]`, `D = diag(ω̄, 1, …, 1)`.
pub fn pad_by_zero(cert: &ApportionCertificate) -> ApportionCertificate {
    let n = cert.order();
    let omega = cis(PI / 3.0);
    let mut nmat = ComplexMatrix::identity(n + 1);
    nmat[(0, n)] = -omega;
    nmat[(n, 0)] = omega;
    let mut ninv = ComplexMatrix::identity(n + 1);
    ninv[(0, 0)] = omega.conj();
    ninv[(0, n)] = ONE;
    ninv[(n, 0)] = -ONE;
    ninv[(n, n)] = omega.conj();
    let one = ComplexMatrix::identity(1);
    let m = &nmat * &cert.m.direct_sum(&one);
    let m_inv = &cert.m_inv.direct_sum(&one) * &ninv;
    let b = &(&nmat * &cert.b.direct_sum(&ComplexMatrix::zeros(1, 1))) * &ninv;
    ApportionCertificate { m, m_inv, b, kappa: cert.kappa, theorem_tag: TheoremTag::PadZero }
}

/// Certificate for `[0]ₙ`-padded zero matrices is trivial; this is the
/// `1 × 1` scalar case `[λ]`, already uniform.
pub fn scalar_certificate(lambda: C64) -> ApportionCertificate {
    let a = ComplexMatrix::diag(&[lambda]);
    ApportionCertificate {
        m: ComplexMatrix::identity(1),
        m_inv: ComplexMatrix::identity(1),
        b: a,
        kappa: lambda.norm(),
        theorem_tag: TheoremTag::PadZero,
    }
}

/// The zero matrix is its own uniform image with constant 0.
pub fn zero_certificate(n: usize) -> ApportionCertificate {
    ApportionCertificate {
        m: ComplexMatrix::identity(n),
        m_inv: ComplexMatrix::identity(n),
        b: ComplexMatrix::zeros(n, n),
        kappa: 0.0,
        theorem_tag: TheoremTag::PadZero,
    }
}

pub(crate) fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidInput(format!("apportionment constant must be positive and finite, got {kappa}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::{build_jordan, JordanSpec};
    use crate::matrix::ZERO;

    #[test]
    fn pad_scalar_gives_diag_lambda_zero() {
        let lam = C64::new(2.0, -1.0);
        let cert = scalar_certificate(lam);
        let padded = pad_by_zero(&cert);
        let a = ComplexMatrix::diag(&[lam, ZERO]);
        let report = padded.verify(&a, Tolerance::default()).unwrap();
        assert!((report.kappa - lam.norm()).abs() < 1e-12);
        assert!((padded.kappa - lam.norm()).abs() < 1e-15);
    }

    #[test]
    fn pad_example_cert() {
        let spec = JordanSpec::from_real(&[(0.0, 3), (0.0, 2)]).unwrap();
        let cert = apportion_nilpotent(&spec, 1.0 / 3f64.sqrt()).unwrap();
        let padded = pad_by_zero(&cert);
        let a = build_jordan(&spec.pad_zeros(1));
        let r = padded.verify(&a, Tolerance::default()).unwrap();
        assert!((r.kappa - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn pad_twice_preserves_rank_one_constant() {
        let cert = apportion_rank_one(ONE, 2, 0.5).unwrap();
        let once = pad_by_zero(&cert);
        let twice = pad_by_zero(&once);
        let a = build_jordan(&JordanSpec::from_real(&[(1.0, 1), (0.0, 1), (0.0, 1), (0.0, 1)]).unwrap());
        let r = twice.verify(&a, Tolerance::default()).unwrap();
        assert!((once.kappa - 0.5).abs() < 1e-12 && (r.kappa - 0.5).abs() < 1e-12);
    }
}
