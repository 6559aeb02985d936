use std::f64::consts::PI;

use super::{apportion_nilpotent, check_kappa, pad_by_zero, ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::{build_jordan, complete_inverse_pair, complete_inverse_pair_with, InversePair, JordanSpec};
use crate::matrix::{cis, ComplexMatrix, C64, ONE, ZERO};
use crate::report::ENDPOINT_REL;
use crate::uniform::Tolerance;

/// Apportions `I_n ⊕ O_n` at any `kappa ≥ 1/2`, using
/// `u_k = ζ Σ_{j≥2k} e_j − ζ̄ Σ_{j<2k} e_j`, `v_k = e_{2k} − e_{2k−1}` with
/// `ζ = 1/2 + i √(κ² − 1/4)`.
pub fn apportion_i_oplus_o(n: usize, kappa: f64) -> Result<ApportionCertificate> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    check_kappa(kappa)?;
    if kappa < 0.5 * (1.0 - ENDPOINT_REL) {
        return Err(Error::BelowMinimum { kappa, minimum: 0.5, set: "[0.5, ∞)".into() });
    }
    let zeta = C64::new(0.5, (kappa * kappa - 0.25).max(0.0).sqrt());
    let dim = 2 * n;
    let mut u = ComplexMatrix::zeros(dim, n);
    let mut v = ComplexMatrix::zeros(n, dim);
    for k in 0..n {
        // 0-based: entries j >= 2k+1 carry ζ, the rest −ζ̄
        for j in 0..dim {
            u[(j, k)] = if j > 2 * k { zeta } else { -zeta.conj() };
        }
        v[(k, 2 * k + 1)] = ONE;
        v[(k, 2 * k)] = -ONE;
    }
    let pair = complete_inverse_pair(&u, &v)?;
    let a = ComplexMatrix::identity(n).direct_sum(&ComplexMatrix::zeros(n, n));
    ApportionCertificate::from_pair(pair, &a, TheoremTag::IOplusO)
}

/// Ingredients of the construction for `B ⊕ O_{2r−n}` where `B` is a
/// canonically ordered, non-nilpotent Jordan matrix of rank `r ≥ n/2` with
/// spectral radius below 2. Indices are 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfRankPlan {
    /// `ζ_k` for `k < r` with `λ_k ≠ 0`.
    pub zetas: Vec<Option<C64>>,
    /// `γ_k` for `k < r` with `λ_k ≠ 0`.
    pub gammas: Vec<Option<C64>>,
    /// `u_1, …, u_r, û_1, …, û_r`.
    pub us: Vec<Vec<C64>>,
    /// `v_1, …, v_r`.
    pub vs: Vec<Vec<C64>>,
    /// Indices of the nonzero columns of `B`.
    pub omega_set: Vec<usize>,
    /// `P e_j = e_{phi[j]}`.
    pub phi: Vec<usize>,
}

/// Builds the plan for the Jordan matrix described by `b` (order `n`,
/// canonical order, rank `r ≥ n/2`, all `|λ| < 2`, not nilpotent).
pub fn half_rank_plan(b: &JordanSpec) -> Result<HalfRankPlan> {
    let n = b.order();
    let r = b.rank();
    if 2 * r < n {
        return Err(Error::Precondition(format!("rank {r} is below half the order {n}")));
    }
    if b.is_nilpotent() {
        return Err(Error::Precondition("plan needs a non-nilpotent matrix".into()));
    }
    if !b.is_canonical() {
        return Err(Error::Precondition("Jordan spec must be in canonical order".into()));
    }
    if b.spectral_radius() >= 2.0 {
        return Err(Error::Precondition("eigenvalues must have modulus below 2".into()));
    }
    let diag = b.diagonal();
    let alpha = b.superdiagonal();
    let dim = 2 * r;
    let lambda = |k: usize| if k < n { diag[k] } else { ZERO };

    let mut zetas = Vec::with_capacity(r);
    let mut gammas = Vec::with_capacity(r);
    let mut us = Vec::with_capacity(dim);
    let mut vs = Vec::with_capacity(r);
    let w_plus = cis(PI / 3.0);
    let w_minus = cis(5.0 * PI / 3.0);
    for k in 0..r {
        // 1-based index k+1: entries j >= 2(k+1) (0-based j >= 2k+1) are "upper"
        let lam = lambda(k);
        let mut u = vec![ZERO; dim];
        let mut v = vec![ZERO; dim];
        if lam != ZERO {
            let m = lam.norm();
            let zeta = C64::new(m / 2.0, (4.0 - m * m).sqrt() / 2.0);
            let gamma = ((zeta.conj() * zeta.conj() - ONE) * lam).powu(k as u32 + 1);
            let s = ONE / (gamma * m);
            for (j, x) in u.iter_mut().enumerate() {
                *x = if j > 2 * k { zeta * s } else { -zeta.conj() * s };
            }
            v[2 * k + 1] = gamma;
            v[2 * k] = -gamma;
            zetas.push(Some(zeta));
            gammas.push(Some(gamma));
        } else {
            for (j, x) in u.iter_mut().enumerate() {
                *x = if j > 2 * k { w_plus } else { -w_minus };
            }
            v[2 * k + 1] = ONE;
            v[2 * k] = -ONE;
            zetas.push(None);
            gammas.push(None);
        }
        us.push(u);
        vs.push(v);
    }
    for k in 0..r {
        us.push((0..dim).map(|j| if j > 2 * k + 1 { ONE } else { -ONE }).collect());
    }

    let mut omega_set = vec![0];
    omega_set.extend((1..n).filter(|&l| diag[l] != ZERO || alpha[l - 1]));
    if omega_set.len() != r {
        return Err(Error::Precondition(format!("found {} nonzero columns, expected rank {r}", omega_set.len())));
    }
    let mut phi = vec![0; dim];
    let mut in_omega = vec![false; dim];
    for (pos, &l) in omega_set.iter().enumerate() {
        phi[l] = pos;
        in_omega[l] = true;
    }
    let mut next = r;
    for j in 0..dim {
        if !in_omega[j] {
            phi[j] = next;
            next += 1;
        }
    }
    Ok(HalfRankPlan { zetas, gammas, us, vs, omega_set, phi })
}

impl HalfRankPlan {
    pub fn rank(&self) -> usize {
        self.vs.len()
    }

    /// `(M P, (M P)⁻¹)` with `M = [u_1 | … | u_{2r}]`.
    pub fn pair(&self) -> Result<InversePair> {
        let r = self.rank();
        let dim = 2 * r;
        let u = ComplexMatrix::from_fn(dim, r, |i, k| self.us[k][i]);
        let u_hat = ComplexMatrix::from_fn(dim, r, |i, k| self.us[r + k][i]);
        let v = ComplexMatrix::from_fn(r, dim, |k, j| self.vs[k][j]);
        let full = complete_inverse_pair_with(&u, &v, &u_hat)?;
        let p = InversePair::permutation(ComplexMatrix::permutation(&self.phi));
        Ok(full.compose(&p))
    }
}

fn threshold_error(kappa: f64, rho: f64) -> Error {
    Error::BelowThreshold { kappa, threshold: rho / 2.0, set: format!("⊇ ({}, ∞)", rho / 2.0) }
}

/// Diagonal `S` with `S (J/κ) S⁻¹` in Jordan form, balanced within blocks
/// (`κ^{(k−1)/2 − p}` at position `p` of a block of size `k`).
fn balanced_rescale(spec: &JordanSpec, kappa: f64) -> InversePair {
    let mut s = Vec::with_capacity(spec.order());
    let mut s_inv = Vec::with_capacity(spec.order());
    for b in spec.blocks() {
        let mid = (b.size as f64 - 1.0) / 2.0;
        for p in 0..b.size {
            let e = mid - p as f64;
            s.push(C64::new(kappa.powf(e), 0.0));
            s_inv.push(C64::new(kappa.powf(-e), 0.0));
        }
    }
    InversePair { m: ComplexMatrix::diag(&s), m_inv: ComplexMatrix::diag(&s_inv) }
}

/// Apportions `A ⊕ O_m` with `m = 2 rank(A) − n` at any `kappa > ρ(A)/2`.
/// Returns the certificate (for the Jordan matrix of `spec` followed by `m`
/// zero blocks) together with `m`.
pub fn apportion_a_oplus_zeros(spec: &JordanSpec, kappa: f64) -> Result<(ApportionCertificate, usize)> {
    check_kappa(kappa)?;
    let n = spec.order();
    let r = spec.rank();
    if 2 * r < n {
        return Err(Error::OutOfScope(format!("rank {r} is below half the order {n}; no padding is needed")));
    }
    let m = 2 * r - n;
    let padded = spec.pad_zeros(m);
    if spec.is_nilpotent() {
        return Ok((apportion_nilpotent(&padded, kappa)?, m));
    }
    let rho = spec.spectral_radius();
    if !(kappa > rho / 2.0) {
        return Err(threshold_error(kappa, rho));
    }
    let order = padded.canonical_order();
    let canon = padded.reordered(&order);
    let scaled = canon.scaled(C64::new(1.0 / kappa, 0.0));
    let plan = half_rank_plan(&scaled)?;
    let pair = plan.pair()?.compose(&balanced_rescale(&canon, kappa));
    let cert = ApportionCertificate::from_pair(pair, &build_jordan(&canon), TheoremTag::HalfRank)?;
    let q = InversePair::permutation(padded.block_permutation(&order));
    let cert = cert.pulled_back(&q);
    cert.verify(&build_jordan(&padded), Tolerance::default())?;
    Ok((cert, m))
}

/// Apportions a Jordan matrix of rank at most half its order at any
/// `kappa > ρ/2`. Nilpotent input is delegated to [`apportion_nilpotent`].
pub fn apportion_half_rank(spec: &JordanSpec, kappa: f64) -> Result<ApportionCertificate> {
    check_kappa(kappa)?;
    let n = spec.order();
    let r = spec.rank();
    if 2 * r > n {
        return Err(Error::OutOfScope(format!("rank {r} exceeds half the order {n}")));
    }
    if spec.is_nilpotent() {
        return apportion_nilpotent(spec, kappa);
    }
    let rho = spec.spectral_radius();
    if !(kappa > rho / 2.0) {
        return Err(threshold_error(kappa, rho));
    }
    let m = n - 2 * r;
    let zero_units: Vec<usize> =
        (0..spec.blocks().len()).filter(|&i| spec.blocks()[i].lambda == ZERO && spec.blocks()[i].size == 1).collect();
    if zero_units.len() < m {
        return Err(Error::Precondition("not enough zero 1-blocks to peel".into()));
    }
    let peeled: Vec<usize> = zero_units[zero_units.len() - m..].to_vec();
    let kept: Vec<usize> = (0..spec.blocks().len()).filter(|i| !peeled.contains(i)).collect();
    let core = spec.reordered(&kept);
    let (mut cert, extra) = apportion_a_oplus_zeros(&core, kappa)?;
    debug_assert_eq!(extra, 0);
    for _ in 0..m {
        cert = pad_by_zero(&cert);
    }
    let mut order = kept;
    order.extend(peeled);
    let q = InversePair::permutation(spec.block_permutation(&order));
    let cert = cert.pulled_back(&q).with_tag(TheoremTag::HalfRank);
    cert.verify(&build_jordan(spec), Tolerance::default())?;
    Ok(cert)
}
