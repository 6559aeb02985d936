use super::{check_kappa, pad_by_zero, ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::{build_jordan, InversePair, JordanSpec};
use crate::matrix::{ComplexMatrix, C64, ONE};
use crate::uniform::Tolerance;

/// `e^{iπk/3}` from a table, so the sixth roots of unity are exact up to the
/// rounding of `√3/2`.
fn sixth_root(k: i64) -> C64 {
    let h = 3f64.sqrt() / 2.0;
    match k.rem_euclid(6) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.5, h),
        2 => C64::new(-0.5, h),
        3 => C64::new(-1.0, 0.0),
        4 => C64::new(-0.5, -h),
        _ => C64::new(0.5, -h),
    }
}

/// `M = I + PD` for the cyclic shift `P e_j = e_{j+1}` and the diagonal `D`
/// of sixth roots of unity, together with `M⁻¹ = adj(M) / det(M)` from the
/// closed-form adjugate. Every nilpotent Jordan matrix of order `n` whose
/// blocks all have size at least 2 is sent to a uniform matrix with
/// modulus `1/√3`.
pub fn nilpotent_base_pair(n: usize) -> InversePair {
    assert!(n >= 2, "nilpotent base needs order >= 2");
    let ni = n as i64;
    // exponents of e^{iπ/3}
    let mut k: Vec<i64> = (0..ni - 1).collect();
    k.push(2 - 3 * ni - (ni - 1) * (ni - 2) / 2);
    let d: Vec<C64> = k.iter().map(|&e| sixth_root(e)).collect();

    let mut m = ComplexMatrix::identity(n);
    for j in 0..n {
        m[((j + 1) % n, j)] = d[j];
    }
    let det = ONE - sixth_root(2);
    let mut m_inv = ComplexMatrix::zeros(n, n);
    for r in 0..n {
        for s in 0..n {
            let t = (r + n - s) % n;
            let mut entry = if t.is_multiple_of(2) { ONE } else { -ONE };
            for l in 0..t {
                entry *= d[(s + l) % n];
            }
            m_inv[(r, s)] = entry / det;
        }
    }
    InversePair { m, m_inv }
}

/// Apportions a nilpotent Jordan matrix at any constant `kappa > 0`.
///
/// Size-1 blocks are stripped, the base pair is applied to the rest, the
/// constant is moved to `kappa` with a diagonal similarity (`S A S⁻¹ = cA`
/// for `S = diag(c^{-p})` within each block), the stripped blocks are padded
/// back, and the result is permuted to the input block order.
pub fn apportion_nilpotent(spec: &JordanSpec, kappa: f64) -> Result<ApportionCertificate> {
    if !spec.is_nilpotent() {
        return Err(Error::InvalidInput("spec has a nonzero eigenvalue".into()));
    }
    check_kappa(kappa)?;
    if spec.is_zero() {
        return Err(Error::ConstantNotAchievable { kappa, set: "{0}".into() });
    }
    let big: Vec<usize> = (0..spec.blocks().len()).filter(|&i| spec.blocks()[i].size >= 2).collect();
    let small: Vec<usize> = (0..spec.blocks().len()).filter(|&i| spec.blocks()[i].size == 1).collect();
    let reduced = spec.reordered(&big);
    let n = reduced.order();

    let c = kappa * 3f64.sqrt();
    let mut s = Vec::with_capacity(n);
    let mut s_inv = Vec::with_capacity(n);
    for b in reduced.blocks() {
        // centered exponents keep M and M⁻¹ balanced
        let mid = (b.size as f64 - 1.0) / 2.0;
        for p in 0..b.size {
            let e = mid - p as f64;
            s.push(C64::new(c.powf(e), 0.0));
            s_inv.push(C64::new(c.powf(-e), 0.0));
        }
    }
    let scaling = InversePair { m: ComplexMatrix::diag(&s), m_inv: ComplexMatrix::diag(&s_inv) };
    let pair = nilpotent_base_pair(n).compose(&scaling);
    let mut cert = ApportionCertificate::from_pair(pair, &build_jordan(&reduced), TheoremTag::Nilpotent)?;
    for _ in &small {
        cert = pad_by_zero(&cert);
    }
    let mut order = big;
    order.extend(small);
    let q = InversePair::permutation(spec.block_permutation(&order));
    let cert = cert.pulled_back(&q).with_tag(TheoremTag::Nilpotent);
    cert.verify(&build_jordan(spec), Tolerance::default())?;
    Ok(cert)
}
