use std::f64::consts::PI;

use super::{check_kappa, scalar_certificate, ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::complete_inverse_pair;
use crate::matrix::{cis, ComplexMatrix, C64, ONE, ZERO};
use crate::report::ENDPOINT_REL;

/// Angles `θ_j = jρ − α` with `r Σ e^{iθ_j} = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpiralSolution {
    pub rho: f64,
    pub alpha: f64,
    pub thetas: Vec<f64>,
}

impl SpiralSolution {
    pub fn sum(&self) -> C64 {
        self.thetas.iter().map(|&t| cis(t)).sum()
    }
}

fn spiral(n: usize, theta: f64) -> C64 {
    (1..=n).map(|j| cis(j as f64 * theta)).sum()
}

/// Solves `r Σ_{j=1}^n e^{iθ_j} = 1` for `r ≥ 1/n` by locating `ρ ∈ [0, 2π/n]`
/// with `|Σ e^{ijρ}| = 1/r`.
pub fn spiral_sum(n: usize, r: f64) -> Result<SpiralSolution> {
    if n < 2 {
        return Err(Error::InvalidInput("spiral sum needs n >= 2".into()));
    }
    if !r.is_finite() || r <= 0.0 {
        return Err(Error::InvalidInput(format!("r must be positive and finite, got {r}")));
    }
    let nf = n as f64;
    if r * nf < 1.0 - ENDPOINT_REL {
        return Err(Error::Infeasible(format!("|r Σ e^(iθ)| ≤ rn = {} < 1", r * nf)));
    }
    let target = 1.0 / r;
    let g = |t: f64| spiral(n, t).norm() - target;
    let rho = if g(0.0) <= 0.0 {
        0.0
    } else {
        let end = 2.0 * PI / nf;
        const SCAN: usize = 64;
        let (mut lo, mut hi) = (0.0, end);
        for i in 1..=SCAN {
            let t = end * i as f64 / SCAN as f64;
            if g(t) <= 0.0 {
                hi = t;
                break;
            }
            lo = t;
        }
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if g(lo).abs() <= g(hi).abs() {
            lo
        } else {
            hi
        }
    };
    let alpha = spiral(n, rho).arg();
    let thetas = (1..=n).map(|j| j as f64 * rho - alpha).collect();
    Ok(SpiralSolution { rho, alpha, thetas })
}

/// Apportions `diag(λ, 0, …, 0)` of order `n` at any `kappa ≥ |λ|/n`, with
/// `B = λ u vᵀ`, `u` all ones and `v_j = (κ/|λ|) e^{iθ_j}`.
pub fn apportion_rank_one(lambda: C64, n: usize, kappa: f64) -> Result<ApportionCertificate> {
    if lambda == ZERO || !lambda.is_finite() {
        return Err(Error::InvalidInput("rank-one construction needs a nonzero eigenvalue".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("order must be at least 1".into()));
    }
    check_kappa(kappa)?;
    let rho = lambda.norm();
    let minimum = rho / n as f64;
    if kappa < minimum * (1.0 - ENDPOINT_REL) {
        return Err(Error::BelowMinimum { kappa, minimum, set: format!("[{minimum}, ∞)") });
    }
    if n == 1 {
        if (kappa - rho).abs() > ENDPOINT_REL * rho {
            return Err(Error::ConstantNotAchievable { kappa, set: format!("{{{rho}}}") });
        }
        return Ok(scalar_certificate(lambda).with_tag(TheoremTag::RankOne));
    }
    let r = kappa / rho;
    let sol = spiral_sum(n, r)?;
    let u = ComplexMatrix::column_vector(&vec![ONE; n]);
    let v_entries: Vec<C64> = sol.thetas.iter().map(|&t| cis(t) * r).collect();
    let v = ComplexMatrix::row_vector(&v_entries);
    let pair = complete_inverse_pair(&u, &v)?;
    let mut diag = vec![ZERO; n];
    diag[0] = lambda;
    ApportionCertificate::from_pair(pair, &ComplexMatrix::diag(&diag), TheoremTag::RankOne)
}
