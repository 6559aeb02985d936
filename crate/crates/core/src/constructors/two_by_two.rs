use super::{check_kappa, ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::{InversePair, JordanSpec};
use crate::matrix::{ComplexMatrix, C64, I, ONE, ZERO};
use crate::report::{Bounds, ClassificationReport, ConstantSet, Membership, Verdict};

const REL: f64 = 1e-12;

/// `M = [[a, b], [c, d]]` with `ad − bc = 1`, and `ω = 2bc + 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoByTwoPlan {
    pub gamma: C64,
    pub omega: C64,
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl TwoByTwoPlan {
    pub fn pair(&self) -> InversePair {
        let m = ComplexMatrix::from_rows(&[vec![self.a, self.b], vec![self.c, self.d]]).expect("finite plan");
        let m_inv = ComplexMatrix::from_rows(&[vec![self.d, -self.b], vec![-self.c, self.a]]).expect("finite plan");
        InversePair { m, m_inv }
    }

    /// The closed form `(λ₂ − λ₁)[[(γ − ω)/2, ab], [−cd, (γ + ω)/2]]`.
    pub fn image(&self, lambda1: C64, lambda2: C64) -> ComplexMatrix {
        let s = lambda2 - lambda1;
        let (g, w) = (self.gamma, self.omega);
        ComplexMatrix::from_rows(&[
            vec![s * (g - w) / 2.0, s * self.a * self.b],
            vec![-s * self.c * self.d, s * (g + w) / 2.0],
        ])
        .expect("finite image")
    }
}

fn check_pair(l1: C64, l2: C64) -> Result<()> {
    if !l1.is_finite() || !l2.is_finite() {
        return Err(Error::InvalidInput("eigenvalues must be finite".into()));
    }
    if l1 == ZERO || l2 == ZERO {
        return Err(Error::InvalidInput("eigenvalues must be nonzero".into()));
    }
    Ok(())
}

/// `λ₁ = −λ₂` (γ = 0) up to a relative `1e-12`.
pub fn is_negated_pair(l1: C64, l2: C64) -> bool {
    (l1 + l2).norm() <= REL * l1.norm().max(l2.norm())
}

/// `λ₂/λ₁` purely imaginary (`|γ| = 1`) up to a relative `1e-12`.
pub fn is_imaginary_ratio(l1: C64, l2: C64) -> bool {
    (l1 * l2.conj()).re.abs() <= REL * l1.norm() * l2.norm()
}

fn distinct(l1: C64, l2: C64) -> bool {
    (l1 - l2).norm() > REL * l1.norm().max(l2.norm())
}

fn gamma_of(l1: C64, l2: C64) -> C64 {
    (l2 + l1) / (l2 - l1)
}

fn condition(l1: C64, l2: C64) -> bool {
    if is_negated_pair(l1, l2) || is_imaginary_ratio(l1, l2) {
        return true;
    }
    if (l1 * l2.conj()).re >= 0.0 {
        // |γ| > 1
        return false;
    }
    let g = gamma_of(l1, l2);
    (g * g).re < g.norm_sqr() * g.norm_sqr()
}

/// Verdict and `K(A)` for `A ~ diag(λ₁, λ₂)` with distinct nonzero
/// eigenvalues.
pub fn two_by_two_constants(l1: C64, l2: C64) -> Result<(Verdict, ConstantSet)> {
    check_pair(l1, l2)?;
    if !distinct(l1, l2) {
        return Err(Error::InvalidInput("eigenvalues must be distinct".into()));
    }
    if !condition(l1, l2) {
        return Ok((Verdict::NotApportionable, ConstantSet::Empty));
    }
    if is_negated_pair(l1, l2) {
        let rho = l1.norm().max(l2.norm());
        return Ok((Verdict::Apportionable, ConstantSet::ClosedHalfLine(rho / 2f64.sqrt())));
    }
    let half = ((l1 + l2) / 2.0).norm();
    let kappa = if is_imaginary_ratio(l1, l2) {
        half
    } else {
        let g = gamma_of(l1, l2);
        let g4 = g.norm_sqr() * g.norm_sqr();
        half * (1.0 + (1.0 - g4) / (2.0 * (g4 - (g * g).re))).sqrt()
    };
    Ok((Verdict::Apportionable, ConstantSet::FiniteSet(vec![kappa])))
}

/// The apportioning plan for an apportionable pair. `kappa` is only used
/// when `γ = 0`, where every `κ ≥ ρ/√2` is reachable; it defaults to the
/// endpoint.
pub fn two_by_two_plan(l1: C64, l2: C64, kappa: Option<f64>) -> Result<TwoByTwoPlan> {
    let (verdict, set) = two_by_two_constants(l1, l2)?;
    if verdict != Verdict::Apportionable {
        return Err(Error::NotApportionable(format!("diag({l1}, {l2}) is not apportionable")));
    }
    let gamma;
    let omega = if is_negated_pair(l1, l2) {
        gamma = ZERO;
        let rho = l1.norm().max(l2.norm());
        let k = kappa.unwrap_or(rho / 2f64.sqrt());
        let q = 0.5 * (k / rho).powi(2);
        C64::new((q + 0.25).sqrt(), (q - 0.25).max(0.0).sqrt())
    } else if is_imaginary_ratio(l1, l2) {
        gamma = gamma_of(l1, l2);
        ZERO
    } else {
        gamma = gamma_of(l1, l2);
        let g4 = gamma.norm_sqr() * gamma.norm_sqr();
        gamma * I * ((1.0 - g4) / (2.0 * (g4 - (gamma * gamma).re))).sqrt()
    };
    debug_assert!(matches!(set, ConstantSet::ClosedHalfLine(_) | ConstantSet::FiniteSet(_)));
    let b = ((omega * omega - ONE) / 4.0).sqrt();
    assert!(b != ZERO, "b vanished: ω² = 1 should be excluded by the case analysis");
    let a = ONE;
    let c = (omega - ONE) / (2.0 * b);
    let d = (omega + ONE) / 2.0;
    Ok(TwoByTwoPlan { gamma, omega, a, b, c, d })
}

/// Classifies `diag(λ₁, λ₂)` with distinct nonzero eigenvalues and, when
/// apportionable, builds a certificate at `target` (or at a default member
/// of `K(A)`).
pub fn apportion_2x2(l1: C64, l2: C64, target: Option<f64>) -> Result<ClassificationReport> {
    let (verdict, set) = two_by_two_constants(l1, l2)?;
    let a = ComplexMatrix::diag(&[l1, l2]);
    let bounds = Bounds::of(&a)?;
    let spec = JordanSpec::from_pairs(&[(l1, 1), (l2, 1)])?.canonical();
    let mut report = ClassificationReport {
        verdict,
        constants: set.clone(),
        theorem_tag: TheoremTag::TwoByTwo.name().to_string(),
        certificate: None,
        approximate_eigen: false,
        bounds,
        spec: Some(spec),
    };
    if verdict != Verdict::Apportionable {
        return Ok(report);
    }
    if let Some(k) = target {
        check_kappa(k)?;
        if set.contains(k) != Membership::Yes {
            return Err(Error::ConstantNotAchievable { kappa: k, set: set.to_string() });
        }
    }
    let plan = two_by_two_plan(l1, l2, target)?;
    report.certificate = Some(ApportionCertificate::from_pair(plan.pair(), &a, TheoremTag::TwoByTwo)?);
    Ok(report)
}

/// `λ₁ = −λ₂`, or `λ₁ = c i λ₂` for real `c`, or `π/2 < θ < 3π/2` with
/// `|r cos θ + 1| < |sin θ|` for `λ₂/λ₁ = r e^{iθ}`.
pub fn polar_condition_2x2(l1: C64, l2: C64) -> Result<bool> {
    check_pair(l1, l2)?;
    if is_negated_pair(l1, l2) || is_imaginary_ratio(l1, l2) {
        return Ok(true);
    }
    let mu = l2 / l1;
    let (r, theta) = mu.to_polar();
    Ok(theta.cos() < 0.0 && (r * theta.cos() + 1.0).abs() < theta.sin().abs())
}
