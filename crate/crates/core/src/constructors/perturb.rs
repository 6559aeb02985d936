use std::f64::consts::PI;

use super::{check_kappa, ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::InversePair;
use crate::matrix::{cis, ComplexMatrix, C64, ONE};
use crate::report::ConstantSet;
use crate::uniform::RCOND_THRESHOLD;

/// Absolute tolerance on `Re λ = 1 − n/2`.
pub const RE_TOL: f64 = 1e-9;

fn check_order(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("perturbation of the identity needs n >= 3, got {n}")));
    }
    Ok(())
}

fn check_lambda(n: usize, lambda: C64) -> Result<()> {
    let want = 1.0 - n as f64 / 2.0;
    if (lambda.re - want).abs() > RE_TOL {
        return Err(Error::NotApportionable(format!(
            "I_{} ⊕ [λ] is apportionable only when Re λ = {want}, got {}",
            n - 1,
            lambda.re
        )));
    }
    Ok(())
}

/// `I_{n−1} ⊕ [λ]`.
pub fn perturb_identity_matrix(n: usize, lambda: C64) -> ComplexMatrix {
    let mut d = vec![ONE; n];
    if let Some(last) = d.last_mut() {
        *last = lambda;
    }
    ComplexMatrix::diag(&d)
}

fn half_line(n: usize, lambda: C64) -> bool {
    n.is_multiple_of(2) && lambda.im == 0.0
}

/// `K(I_{n−1} ⊕ [λ])`; empty when `Re λ ≠ 1 − n/2`.
pub fn perturb_identity_constants(n: usize, lambda: C64) -> Result<ConstantSet> {
    check_order(n)?;
    if check_lambda(n, lambda).is_err() {
        return Ok(ConstantSet::Empty);
    }
    if half_line(n, lambda) {
        return Ok(ConstantSet::ClosedHalfLine(0.5));
    }
    let im2 = lambda.im * lambda.im;
    let values = (0..=(n - 1) / 2)
        .map(|s| {
            let d = (n - 2 * s) as f64;
            (im2 / (d * d) + 0.25).sqrt()
        })
        .collect();
    Ok(ConstantSet::finite(values))
}

fn dft_pair(n: usize) -> InversePair {
    let scale = 1.0 / (n as f64).sqrt();
    let f = ComplexMatrix::from_fn(n, n, |j, k| cis(-2.0 * PI * ((j * k) % n) as f64 / n as f64) * scale);
    let f_star = f.adjoint();
    InversePair { m: f, m_inv: f_star }
}

/// `M_r(t)`: first row `(−1, …, −1, w₁)`, row `i ≥ 2` has a 1 in column
/// `n + 1 − i` and `w_i` last, with `w₁..w_r` on the `+` branch.
fn selection_matrix(n: usize, lambda: C64, r: usize, t: f64) -> ComplexMatrix {
    let tau = (t * t - 0.25).max(0.0).sqrt();
    let denom = ONE - lambda;
    let w_plus = C64::new(0.5, tau) / denom;
    let w_minus = C64::new(0.5, -tau) / denom;
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n - 1 {
        m[(0, j)] = -ONE;
    }
    for i in 1..n {
        m[(i, n - 1 - i)] = ONE;
    }
    for i in 0..n {
        m[(i, n - 1)] = if i < r { w_plus } else { w_minus };
    }
    m
}

/// Apportions `I_{n−1} ⊕ [λ]` (`n ≥ 3`, `Re λ = 1 − n/2`). Without a target
/// the unitary DFT matrix is used; with one, the target is checked against
/// `K(A)` and the matching `M_r(κ)` is built.
pub fn apportion_perturb_identity(n: usize, lambda: C64, target: Option<f64>) -> Result<ApportionCertificate> {
    check_order(n)?;
    check_lambda(n, lambda)?;
    let a = perturb_identity_matrix(n, lambda);
    let Some(kappa) = target else {
        return ApportionCertificate::from_pair(dft_pair(n), &a, TheoremTag::PerturbIdentity);
    };
    check_kappa(kappa)?;
    let set = perturb_identity_constants(n, lambda)?;
    if set.contains(kappa) != crate::report::Membership::Yes {
        return Err(Error::ConstantNotAchievable { kappa, set: set.to_string() });
    }
    let (r, t) = if half_line(n, lambda) {
        (n / 2, kappa.max(0.5))
    } else {
        // the member of K(A) nearest the target, and the s that produced it
        let im2 = lambda.im * lambda.im;
        let (s, t) = (0..=(n - 1) / 2)
            .map(|s| {
                let d = (n - 2 * s) as f64;
                (s, (im2 / (d * d) + 0.25).sqrt())
            })
            .min_by(|x, y| (x.1 - kappa).abs().total_cmp(&(y.1 - kappa).abs()))
            .expect("non-empty range");
        // Σw = 1 needs (2r − n)·√(t² − 1/4) = −Im λ
        (if lambda.im >= 0.0 { s } else { n - s }, t)
    };
    let m = selection_matrix(n, lambda, r, t);
    let lu = m.lu()?;
    let rc = lu.rcond();
    if rc < RCOND_THRESHOLD {
        return Err(Error::Singular { rcond: rc });
    }
    let m_inv = lu.inverse()?;
    ApportionCertificate::from_pair(InversePair { m, m_inv }, &a, TheoremTag::PerturbIdentity)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dft_is_unitary_and_diagonal_matches() {
        let lam = C64::new(-1.0, 0.7);
        let cert = apportion_perturb_identity(4, lam, None).unwrap();
        let mm = &cert.m * &cert.m.adjoint();
        assert!(mm.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-12);
        for j in 0..4 {
            assert!((cert.b[(j, j)] - C64::new(0.5, 0.7 / 4.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn even_real_half_line() {
        let lam = C64::new(-1.0, 0.0);
        assert_eq!(perturb_identity_constants(4, lam).unwrap(), ConstantSet::ClosedHalfLine(0.5));
        for kappa in [0.5, 0.8, 3.0] {
            let cert = apportion_perturb_identity(4, lam, Some(kappa)).unwrap();
            assert!((cert.kappa - kappa).abs() < 1e-9 * kappa);
        }
        assert!(matches!(apportion_perturb_identity(4, lam, Some(0.4)), Err(Error::ConstantNotAchievable { .. })));
    }

    #[test]
    fn finite_set_members_are_reached() {
        let lam = C64::new(-0.5, 1.0);
        let set = perturb_identity_constants(3, lam).unwrap();
        let want = [13f64.sqrt() / 6.0, 5f64.sqrt() / 2.0];
        assert_eq!(set.values().len(), 2);
        for (got, w) in set.values().iter().zip(want) {
            assert!((got - w).abs() < 1e-15);
        }
        for w in want {
            let cert = apportion_perturb_identity(3, lam, Some(w)).unwrap();
            assert!((cert.kappa - w).abs() < 1e-9);
            let conj = apportion_perturb_identity(3, lam.conj(), Some(w)).unwrap();
            assert!((conj.kappa - w).abs() < 1e-9);
        }
        assert!(apportion_perturb_identity(3, lam, Some(1.0)).is_err());
    }

    #[test]
    fn refusal() {
        assert!(matches!(apportion_perturb_identity(3, C64::new(0.0, 0.0), None), Err(Error::NotApportionable(_))));
        assert_eq!(perturb_identity_constants(3, C64::new(0.0, 0.0)).unwrap(), ConstantSet::Empty);
        assert!(apportion_perturb_identity(2, C64::new(0.0, 0.0), None).is_err());
    }
}
