//! Jordan-form specifications, their matrices, diagonal rescaling, inverse
//! pair completion, and eigenstructure recovery for orders up to three.

use std::cmp::Ordering;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JordanBlock {
    pub lambda: C64,
    pub size: usize,
}

impl JordanBlock {
    pub fn new(lambda: C64, size: usize) -> Self {
        Self { lambda, size }
    }
}

/// Ordered list of Jordan blocks `J_{size}(lambda)`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanSpec {
    blocks: Vec<JordanBlock>,
}

#[derive(Serialize, Deserialize)]
struct BlockRepr {
    re: f64,
    im: f64,
    size: usize,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    blocks: Vec<BlockRepr>,
}

impl Serialize for JordanSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SpecRepr {
            blocks: self.blocks.iter().map(|b| BlockRepr { re: b.lambda.re, im: b.lambda.im, size: b.size }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for JordanSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SpecRepr::deserialize(d)?;
        JordanSpec::new(repr.blocks.into_iter().map(|b| JordanBlock::new(C64::new(b.re, b.im), b.size)).collect())
            .map_err(serde::de::Error::custom)
    }
}

fn arg_0_2pi(z: C64) -> f64 {
    if z == ZERO {
        return 0.0;
    }
    let a = z.arg();
    if a < 0.0 {
        a + TAU
    } else {
        a
    }
}

fn canonical_cmp(a: &JordanBlock, b: &JordanBlock) -> Ordering {
    b.lambda
        .norm()
        .total_cmp(&a.lambda.norm())
        .then(b.size.cmp(&a.size))
        .then(arg_0_2pi(a.lambda).total_cmp(&arg_0_2pi(b.lambda)))
}

impl JordanSpec {
    pub fn new(blocks: Vec<JordanBlock>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidInput("Jordan spec has no blocks".into()));
        }
        if blocks.iter().any(|b| b.size == 0) {
            return Err(Error::InvalidInput("Jordan block of size 0".into()));
        }
        if blocks.iter().any(|b| !b.lambda.re.is_finite() || !b.lambda.im.is_finite()) {
            return Err(Error::InvalidInput("eigenvalues must be finite".into()));
        }
        Ok(Self { blocks })
    }

    /// `[(lambda, size), ...]` shorthand.
    pub fn from_pairs(pairs: &[(C64, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(l, s)| JordanBlock::new(l, s)).collect())
    }

    /// Shorthand for real eigenvalues.
    pub fn from_real(pairs: &[(f64, usize)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(l, s)| JordanBlock::new(C64::new(l, 0.0), s)).collect())
    }

    pub fn blocks(&self) -> &[JordanBlock] {
        &self.blocks
    }

    pub fn order(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    pub fn rank(&self) -> usize {
        self.blocks.iter().map(|b| if b.lambda == ZERO { b.size - 1 } else { b.size }).sum()
    }

    pub fn is_nilpotent(&self) -> bool {
        self.blocks.iter().all(|b| b.lambda == ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.lambda == ZERO && b.size == 1)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.blocks.iter().map(|b| b.lambda.norm()).fold(0.0, f64::max)
    }

    /// Starting row of each block.
    pub fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.size;
                Some(o)
            })
            .collect()
    }

    /// Eigenvalue at each diagonal position.
    pub fn diagonal(&self) -> Vec<C64> {
        self.blocks.iter().flat_map(|b| std::iter::repeat_n(b.lambda, b.size)).collect()
    }

    /// `α_k` indicators: whether positions `k` and `k + 1` share a block.
    pub fn superdiagonal(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.order().saturating_sub(1));
        for (bi, b) in self.blocks.iter().enumerate() {
            out.extend(std::iter::repeat_n(true, b.size - 1));
            if bi + 1 < self.blocks.len() {
                out.push(false);
            }
        }
        out
    }

    /// Block indices sorted into canonical order: descending `|λ|`,
    /// descending size, ascending `arg λ ∈ [0, 2π)`. Stable.
    pub fn canonical_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.blocks.len()).collect();
        idx.sort_by(|&i, &j| canonical_cmp(&self.blocks[i], &self.blocks[j]));
        idx
    }

    pub fn canonical(&self) -> Self {
        self.reordered(&self.canonical_order())
    }

    pub fn is_canonical(&self) -> bool {
        self.blocks.windows(2).all(|w| canonical_cmp(&w[0], &w[1]) != Ordering::Greater)
    }

    /// Spec whose k-th block is `self.blocks[order[k]]`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self { blocks: order.iter().map(|&i| self.blocks[i]).collect() }
    }

    /// Permutation matrix `Q` with `Q · build_jordan(self) · Qᵀ` equal to
    /// `build_jordan(self.reordered(order))`.
    pub fn block_permutation(&self, order: &[usize]) -> ComplexMatrix {
        let offsets = self.offsets();
        let mut perm = vec![0; self.order()];
        let mut next = 0;
        for &bi in order {
            for t in 0..self.blocks[bi].size {
                perm[offsets[bi] + t] = next;
                next += 1;
            }
        }
        ComplexMatrix::permutation(&perm)
    }

    pub fn scaled(&self, lambda: C64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| JordanBlock::new(b.lambda * lambda, b.size)).collect() }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend_from_slice(&other.blocks);
        Self { blocks }
    }

    /// Appends `count` zero 1-blocks.
    pub fn pad_zeros(&self, count: usize) -> Self {
        let mut blocks = self.blocks.clone();
        blocks.extend(std::iter::repeat_n(JordanBlock::new(ZERO, 1), count));
        Self { blocks }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// `Σ λ_k e_k e_kᵀ + Σ α_k e_k e_{k+1}ᵀ`.
pub fn build_jordan(spec: &JordanSpec) -> ComplexMatrix {
    let n = spec.order();
    let mut j = ComplexMatrix::diag(&spec.diagonal());
    for (k, alpha) in spec.superdiagonal().into_iter().enumerate() {
        if alpha {
            j[(k, k + 1)] = ONE;
        }
    }
    debug_assert_eq!(j.rows(), n);
    j
}

/// Scales every eigenvalue by `lambda`, returning the new spec and the
/// diagonal `S` with `S (λ J) S⁻¹ = J(new spec)`. Within each block
/// `S = diag(1, λ, λ², …)`.
pub fn scale_jordan(spec: &JordanSpec, lambda: C64) -> Result<(JordanSpec, ComplexMatrix)> {
    if lambda == ZERO || !lambda.re.is_finite() || !lambda.im.is_finite() {
        return Err(Error::InvalidInput("scale factor must be finite and nonzero".into()));
    }
    let d: Vec<C64> = spec.blocks.iter().flat_map(|b| (0..b.size).map(move |p| lambda.powu(p as u32))).collect();
    Ok((spec.scaled(lambda), ComplexMatrix::diag(&d)))
}

/// A nonsingular matrix together with its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct InversePair {
    pub m: ComplexMatrix,
    pub m_inv: ComplexMatrix,
}

impl InversePair {
    pub fn identity(n: usize) -> Self {
        Self { m: ComplexMatrix::identity(n), m_inv: ComplexMatrix::identity(n) }
    }

    /// `‖M · Minv − I‖_max`.
    pub fn residual(&self) -> f64 {
        (&self.m * &self.m_inv).max_abs_diff(&ComplexMatrix::identity(self.m.rows()))
    }

    /// Pair for `self · other` (i.e. `M₁M₂` and `M₂⁻¹M₁⁻¹`).
    pub fn compose(&self, other: &Self) -> Self {
        Self { m: &self.m * &other.m, m_inv: &other.m_inv * &self.m_inv }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        Self { m: self.m.direct_sum(&other.m), m_inv: self.m_inv.direct_sum(&other.m_inv) }
    }

    /// Pair for the permutation matrix `Q` (whose inverse is `Qᵀ`).
    pub fn permutation(q: ComplexMatrix) -> Self {
        let qt = q.transpose();
        Self { m: q, m_inv: qt }
    }
}

fn dot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn norm(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes the components of `x` along the orthonormal vectors `basis`,
/// twice for stability.
fn project_out(x: &mut [C64], basis: &[Vec<C64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, x);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi -= c * qi;
            }
        }
    }
}

/// Extends `U` (n×m) and `V` (m×n) with `VU = I` to `M = [U | U′]` and
/// `Minv = [V; V′]`. The columns of `U′` are an orthonormal basis of the
/// orthogonal complement of the row space of `V`, chosen by pivoted
/// Gram–Schmidt over the standard basis; `V′ = U′ᴴ (I − U V)`.
pub fn complete_inverse_pair(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<InversePair> {
    let n = u.rows();
    let m = u.cols();
    if v.rows() != m || v.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "U is {}x{}, V is {}x{}; expected V to be {}x{}",
            n,
            m,
            v.rows(),
            v.cols(),
            m,
            n
        )));
    }
    if m > n || n == 0 {
        return Err(Error::Precondition(format!("need 0 < m <= n, got m = {m}, n = {n}")));
    }
    let vu_err = (v * u).max_abs_diff(&ComplexMatrix::identity(m));
    if vu_err > 1e-10 {
        return Err(Error::Precondition(format!("VU differs from the identity by {vu_err:.3e}")));
    }
    let mut row_basis: Vec<Vec<C64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut x: Vec<C64> = v.row(i).iter().map(|z| z.conj()).collect();
        let scale = norm(&x);
        project_out(&mut x, &row_basis);
        let r = norm(&x);
        if r <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::SingularCompletion(format!("rows of V are dependent (rank < {m})")));
        }
        x.iter_mut().for_each(|z| *z /= r);
        row_basis.push(x);
    }
    let mut chosen: Vec<Vec<C64>> = Vec::with_capacity(n - m);
    for _ in m..n {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for k in 0..n {
            let mut x = vec![ZERO; n];
            x[k] = ONE;
            project_out(&mut x, &row_basis);
            project_out(&mut x, &chosen);
            let r = norm(&x);
            if best.as_ref().is_none_or(|(br, _)| r > *br) {
                best = Some((r, x));
            }
        }
        let (r, mut x) = best.expect("n > 0");
        if r <= 1e-12 {
            return Err(Error::SingularCompletion("complement basis degenerated".into()));
        }
        x.iter_mut().for_each(|z| *z /= r);
        chosen.push(x);
    }
    let mut u_prime = ComplexMatrix::zeros(n, n - m);
    for (j, col) in chosen.iter().enumerate() {
        u_prime.set_column(j, col);
    }
    let residual = &ComplexMatrix::identity(n) - &(u * v);
    let v_prime = &u_prime.adjoint() * &residual;
    Ok(InversePair { m: u.hstack(&u_prime), m_inv: v.vstack(&v_prime) })
}

/// Like [`complete_inverse_pair`] but with a caller-chosen `U′` whose
/// columns span the orthogonal complement of the row space of `V`. Then
/// `V′ = (U′ᴴU′)⁻¹ U′ᴴ (I − U V)`, the unique matrix with `V′U = O` and
/// `V′U′ = I`.
pub fn complete_inverse_pair_with(
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    u_prime: &ComplexMatrix,
) -> Result<InversePair> {
    let n = u.rows();
    let m = u.cols();
    if v.rows() != m || v.cols() != n || u_prime.rows() != n || u_prime.cols() + m != n {
        return Err(Error::ShapeMismatch("incompatible U, V, U′ shapes".into()));
    }
    let vu_err = (v * u).max_abs_diff(&ComplexMatrix::identity(m));
    if vu_err > 1e-10 {
        return Err(Error::Precondition(format!("VU differs from the identity by {vu_err:.3e}")));
    }
    let leak = (v * u_prime).max_abs() / u_prime.max_abs().max(f64::MIN_POSITIVE) / v.max_abs().max(f64::MIN_POSITIVE);
    if leak > 1e-10 {
        return Err(Error::Precondition(format!("U′ is not orthogonal to the rows of V ({leak:.3e})")));
    }
    let uh = u_prime.adjoint();
    let gram = (&uh * u_prime).lu()?;
    if gram.rcond() < crate::uniform::RCOND_THRESHOLD {
        return Err(Error::SingularCompletion("columns of U′ are dependent".into()));
    }
    let residual = &ComplexMatrix::identity(n) - &(u * v);
    let v_prime = gram.solve(&(&uh * &residual))?;
    Ok(InversePair { m: u.hstack(u_prime), m_inv: v.vstack(&v_prime) })
}

/// Eigenstructure recovered from raw entries.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenStructure {
    /// Canonically ordered spec.
    pub spec: JordanSpec,
    /// Set when eigenvalues were merged beyond the strict grouping tolerance
    /// or sit close to the grouping boundary.
    pub approximate: bool,
}

fn spectral_scale(vals: &[C64]) -> f64 {
    vals.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

/// Strict grouping tolerance `1e-9 · max(1, ρ)`.
fn strict_tol(vals: &[C64]) -> f64 {
    1e-9 * spectral_scale(vals)
}

fn quadratic_roots(t: C64, d: C64) -> [C64; 2] {
    let disc = (t * t - d * 4.0).sqrt();
    let q = if (t.conj() * disc).re >= 0.0 { (t + disc) * 0.5 } else { (t - disc) * 0.5 };
    if q == ZERO {
        [ZERO, ZERO]
    } else {
        [q, d / q]
    }
}

fn cubic_roots(a: C64, b: C64, c: C64) -> [C64; 3] {
    // x³ + a x² + b x + c
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let delta = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let w1 = -q / 2.0 + delta;
    let w2 = -q / 2.0 - delta;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let omega = C64::from_polar(1.0, TAU / 3.0);
    let mut roots = [ZERO; 3];
    if w == ZERO {
        roots = [-a / 3.0; 3];
    } else {
        let u = w.powf(1.0 / 3.0);
        for (k, r) in roots.iter_mut().enumerate() {
            let uk = u * omega.powu(k as u32);
            *r = uk - p / (uk * 3.0) - a / 3.0;
        }
    }
    let f = |x: C64| ((x + a) * x + b) * x + c;
    let df = |x: C64| (x * 3.0 + a * 2.0) * x + b;
    for r in roots.iter_mut() {
        for _ in 0..8 {
            let d = df(*r);
            if d == ZERO {
                break;
            }
            let next = *r - f(*r) / d;
            if f(next).norm() < f(*r).norm() {
                *r = next;
            } else {
                break;
            }
        }
    }
    roots
}

fn raw_eigenvalues(a: &ComplexMatrix) -> Vec<C64> {
    let n = a.rows();
    if a.is_upper_triangular() || a.is_lower_triangular() {
        return (0..n).map(|i| a[(i, i)]).collect();
    }
    match n {
        1 => vec![a[(0, 0)]],
        2 => {
            let t = a.trace();
            let d = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
            quadratic_roots(t, d).to_vec()
        }
        _ => {
            let m = |i: usize, j: usize| a[(i, j)];
            let minor = |i: usize, j: usize| m(i, i) * m(j, j) - m(i, j) * m(j, i);
            let tr = a.trace();
            let b = minor(0, 1) + minor(0, 2) + minor(1, 2);
            let det = a.lu().map(|lu| lu.det()).unwrap_or(ZERO);
            cubic_roots(-tr, b, -det).to_vec()
        }
    }
}

/// Recovers a Jordan spec for a 2×2 matrix (see [`eigenstructure_small`]).
pub fn eigenstructure_2x2(a: &ComplexMatrix) -> Result<JordanSpec> {
    if a.rows() != 2 || a.cols() != 2 {
        return Err(Error::ShapeMismatch(format!("expected 2x2, got {}x{}", a.rows(), a.cols())));
    }
    Ok(eigenstructure_small(a)?.spec)
}

/// Jordan structure of a matrix of order at most 3.
///
/// Eigenvalues come from the triangular diagonal when available, otherwise
/// from the characteristic polynomial. Eigenvalues within `1e-9 · max(1, ρ)`
/// are grouped. Because a k-fold defective eigenvalue is only determined to
/// roughly `ε^{1/k}`, clusters within the looser bound
/// `(1e3 ε)^{1/k} · max(1, ‖A‖_F)` are merged as well but flagged
/// approximate. Block sizes follow from the rank of `A − μI`.
pub fn eigenstructure_small(a: &ComplexMatrix) -> Result<EigenStructure> {
    let n = a.order()?;
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if n > 3 {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "eigenstructure recovery from raw entries is limited to order 3; supply a Jordan spec".into(),
        });
    }
    let vals = raw_eigenvalues(a);
    let strict = strict_tol(&vals);
    let scale = a.frobenius_norm().max(1.0);
    let loose = |k: usize| (1e3 * f64::EPSILON).powf(1.0 / k as f64) * scale;

    // Grow clusters from the closest pairs.
    let mut cluster: Vec<usize> = (0..n).collect();
    let mut approximate = false;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            pairs.push(((vals[i] - vals[j]).norm(), i, j));
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    // A k-fold cluster splits into values ~ε^{1/k} apart, so its closest
    // pair can already exceed the pair scale: test the whole triple first.
    let diameter = pairs.last().map_or(0.0, |p| p.0);
    if n == 3 && diameter > strict && diameter <= loose(3) {
        cluster = vec![0; 3];
        approximate = true;
    } else if n == 3 && diameter > loose(3) && diameter <= 10.0 * loose(3) {
        approximate = true;
    }
    for &(gap, i, j) in &pairs {
        let (ci, cj) = (cluster[i], cluster[j]);
        if ci == cj {
            continue;
        }
        let size = cluster.iter().filter(|&&c| c == ci || c == cj).count();
        if gap <= strict {
            // exact-intent equality
        } else if gap <= loose(size) {
            approximate = true;
        } else {
            if gap <= 10.0 * loose(size) {
                approximate = true;
            }
            continue;
        }
        for c in cluster.iter_mut() {
            if *c == cj {
                *c = ci;
            }
        }
    }

    let mut groups: Vec<(C64, usize)> = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| cluster[j] == cluster[i]).collect();
        members.iter().for_each(|&j| seen[j] = true);
        let mut mu = members.iter().map(|&j| vals[j]).sum::<C64>() / members.len() as f64;
        if members.len() > 1 && members.iter().any(|&j| vals[j] != vals[members[0]]) && mu.norm() <= loose(members.len()) {
            mu = ZERO;
        }
        if mu != ZERO && mu.norm() <= strict {
            mu = ZERO;
        }
        groups.push((mu, members.len()));
    }

    let mut blocks = Vec::new();
    for &(mu, k) in &groups {
        if k == 1 {
            blocks.push(JordanBlock::new(mu, 1));
            continue;
        }
        let shifted = a - &ComplexMatrix::identity(n).scale(mu);
        let rank_tol = 1e-6 * scale;
        let geometric = (n - shifted.rank(rank_tol)).clamp(1, k);
        // with k <= 3 the number of blocks fixes the partition
        let sizes: Vec<usize> = match (k, geometric) {
            (2, 1) => vec![2],
            (3, 1) => vec![3],
            (3, 2) => vec![2, 1],
            _ => vec![1; k],
        };
        blocks.extend(sizes.into_iter().map(|s| JordanBlock::new(mu, s)));
    }
    let spec = JordanSpec::new(blocks)?.canonical();
    Ok(EigenStructure { spec, approximate })
}

/// Right singular vectors of `x` for its `count` smallest singular values.
fn smallest_right_vectors(x: &ComplexMatrix, count: usize) -> Vec<Vec<C64>> {
    let n = x.cols();
    let ns = x.null_space(f64::INFINITY);
    // `null_space` with an infinite threshold returns all right singular
    // vectors ordered by descending singular value.
    (n - count..n).map(|j| ns.column(j)).collect()
}

/// Returns `P` with `A = P · build_jordan(spec) · P⁻¹` for a matrix of order
/// at most 3 whose structure is `spec` (as produced by
/// [`eigenstructure_small`]).
pub fn jordan_basis_small(a: &ComplexMatrix, spec: &JordanSpec) -> Result<InversePair> {
    let n = a.order()?;
    if n != spec.order() || n > 3 {
        return Err(Error::UnsupportedOrder { order: n, reason: "Jordan basis recovery needs order <= 3".into() });
    }
    let mut p = ComplexMatrix::zeros(n, n);
    let offsets = spec.offsets();
    let mut done = vec![false; spec.blocks().len()];
    for (bi, block) in spec.blocks().iter().enumerate() {
        if done[bi] {
            continue;
        }
        let same: Vec<usize> =
            (0..spec.blocks().len()).filter(|&j| spec.blocks()[j].lambda == block.lambda).collect();
        let k: usize = same.iter().map(|&j| spec.blocks()[j].size).sum();
        let shifted = a - &ComplexMatrix::identity(n).scale(block.lambda);
        let general = smallest_right_vectors(&shifted.pow(k as u32), k);
        let g = ComplexMatrix::from_fn(n, k, |i, j| general[j][i]);
        let mut taken: Vec<Vec<C64>> = Vec::new();
        let mut sizes: Vec<usize> = same.iter().map(|&j| spec.blocks()[j].size).collect();
        sizes.sort_unstable_by(|x, y| y.cmp(x));
        let mut chains: Vec<Vec<Vec<C64>>> = Vec::new();
        for &s in &sizes {
            // pick x in the generalized eigenspace, away from previous chains,
            // maximizing the tail (A − μI)^{s−1} x
            let tail = &shifted.pow(s as u32 - 1) * &g;
            let mut best: Option<(f64, Vec<C64>)> = None;
            let svd_v = tail.null_space(f64::INFINITY);
            for c in 0..k {
                let y = svd_v.column(c);
                let mut x = (&g * &ComplexMatrix::column_vector(&y)).column(0);
                project_out(&mut x, &taken);
                let t = norm(&(&shifted.pow(s as u32 - 1) * &ComplexMatrix::column_vector(&x)).column(0));
                if best.as_ref().is_none_or(|(bt, _)| t > *bt * (1.0 + 1e-9)) {
                    best = Some((t, x));
                }
            }
            let (_, x) = best.expect("k >= 1");
            let mut chain = vec![x.clone()];
            let mut cur = ComplexMatrix::column_vector(&x);
            for _ in 1..s {
                cur = &shifted * &cur;
                chain.push(cur.column(0));
            }
            chain.reverse();
            for vec in &chain {
                let mut q = vec.clone();
                project_out(&mut q, &taken);
                let r = norm(&q);
                if r > 0.0 {
                    q.iter_mut().for_each(|z| *z /= r);
                    taken.push(q);
                }
            }
            chains.push(chain);
        }
        // assign chains to blocks of matching size in spec order
        let mut used = vec![false; chains.len()];
        for &j in &same {
            let size = spec.blocks()[j].size;
            let ci = (0..chains.len()).find(|&c| !used[c] && chains[c].len() == size).expect("chain sizes match");
            used[ci] = true;
            for (t, vec) in chains[ci].iter().enumerate() {
                p.set_column(offsets[j] + t, vec);
            }
            done[j] = true;
        }
    }
    let lu = p.lu()?;
    let rcond = lu.rcond();
    if rcond < crate::uniform::RCOND_THRESHOLD {
        return Err(Error::Singular { rcond });
    }
    let p_inv = lu.inverse()?;
    Ok(InversePair { m: p, m_inv: p_inv })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn builds_nilpotent_blocks() {
        let j = build_jordan(&JordanSpec::from_real(&[(0.0, 2)]).unwrap());
        assert_eq!(j, ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]));
        let j5 = build_jordan(&JordanSpec::from_real(&[(0.0, 3), (0.0, 2)]).unwrap());
        let mut want = ComplexMatrix::zeros(5, 5);
        want[(0, 1)] = ONE;
        want[(1, 2)] = ONE;
        want[(3, 4)] = ONE;
        assert_eq!(j5, want);
        let d = build_jordan(&JordanSpec::from_pairs(&[(c(1.0, 2.0), 1), (c(-3.0, 0.0), 1)]).unwrap());
        assert_eq!(d, ComplexMatrix::diag(&[c(1.0, 2.0), c(-3.0, 0.0)]));
    }

    #[test]
    fn rejects_empty_blocks() {
        assert!(JordanSpec::from_real(&[(1.0, 0)]).is_err());
        assert!(JordanSpec::new(vec![]).is_err());
    }

    #[test]
    fn scale_example() {
        let spec = JordanSpec::from_real(&[(1.0, 2)]).unwrap();
        let (scaled, s) = scale_jordan(&spec, c(2.0, 0.0)).unwrap();
        assert_eq!(scaled, JordanSpec::from_real(&[(2.0, 2)]).unwrap());
        assert_eq!(s, ComplexMatrix::diag(&[ONE, c(2.0, 0.0)]));
        let img = crate::uniform::similarity_image(&s, &build_jordan(&spec).scale(c(2.0, 0.0))).unwrap();
        assert!(img.max_abs_diff(&build_jordan(&scaled)) < 1e-15);
        assert!(scale_jordan(&spec, ZERO).is_err());
        let pm = JordanSpec::from_real(&[(1.0, 1), (-1.0, 1)]).unwrap();
        let (sc, _) = scale_jordan(&pm, c(0.0, 1.0)).unwrap();
        assert_eq!(sc, JordanSpec::from_pairs(&[(c(0.0, 1.0), 1), (c(0.0, -1.0), 1)]).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let spec = JordanSpec::from_pairs(&[(c(0.1, -1.0 / 3.0), 2), (c(0.0, 0.0), 1)]).unwrap();
        let s = spec.to_json();
        assert_eq!(JordanSpec::from_json(&s).unwrap(), spec);
        assert!(JordanSpec::from_json(r#"{"blocks":[{"re":1,"im":0,"size":0}]}"#).is_err());
    }

    #[test]
    fn canonical_order_sorts_by_modulus_size_arg() {
        let spec = JordanSpec::from_pairs(&[(ZERO, 2), (c(5.0, 0.0), 1), (c(0.0, -1.0), 1), (c(1.0, 0.0), 2)]).unwrap();
        let canon = spec.canonical();
        let got: Vec<(C64, usize)> = canon.blocks().iter().map(|b| (b.lambda, b.size)).collect();
        assert_eq!(got, vec![(c(5.0, 0.0), 1), (c(1.0, 0.0), 2), (c(0.0, -1.0), 1), (ZERO, 2)]);
        let q = spec.block_permutation(&spec.canonical_order());
        let moved = &(&q * &build_jordan(&spec)) * &q.transpose();
        assert_eq!(moved, build_jordan(&canon));
    }

    #[test]
    fn completes_trivial_pair() {
        let u = ComplexMatrix::column_vector(&[ONE, ZERO]);
        let v = ComplexMatrix::row_vector(&[ONE, ZERO]);
        let pair = complete_inverse_pair(&u, &v).unwrap();
        assert_eq!(pair.m, ComplexMatrix::identity(2));
        assert_eq!(pair.m_inv, ComplexMatrix::identity(2));
    }

    #[test]
    fn completion_checks_preconditions() {
        let u = ComplexMatrix::column_vector(&[ONE, ZERO]);
        let v = ComplexMatrix::row_vector(&[c(2.0, 0.0), ZERO]);
        assert!(matches!(complete_inverse_pair(&u, &v), Err(Error::Precondition(_))));
    }

    #[test]
    fn eigenstructure_examples() {
        let n2 = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(eigenstructure_2x2(&n2).unwrap(), JordanSpec::from_real(&[(0.0, 2)]).unwrap());
        let d = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(eigenstructure_2x2(&d).unwrap(), JordanSpec::from_real(&[(1.0, 1), (-1.0, 1)]).unwrap());
        let j = ComplexMatrix::from_real_rows(&[&[3.0, 1.0], &[0.0, 3.0]]);
        assert_eq!(eigenstructure_2x2(&j).unwrap(), JordanSpec::from_real(&[(3.0, 2)]).unwrap());
        let d3 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 0.0]]);
        let es = eigenstructure_small(&d3).unwrap();
        assert_eq!(es.spec, JordanSpec::from_real(&[(1.0, 1), (1.0, 1), (0.0, 1)]).unwrap());
        assert!(!es.approximate);
        let ex = build_jordan(&JordanSpec::from_real(&[(2.0, 2), (0.0, 1)]).unwrap());
        assert_eq!(eigenstructure_small(&ex).unwrap().spec, JordanSpec::from_real(&[(2.0, 2), (0.0, 1)]).unwrap());
        assert!(matches!(
            eigenstructure_small(&ComplexMatrix::identity(4)),
            Err(Error::UnsupportedOrder { order: 4, .. })
        ));
    }

    #[test]
    fn eigenstructure_of_dense_similar_matrix() {
        let spec = JordanSpec::from_real(&[(0.0, 2), (5.0, 1)]).unwrap();
        let p = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(0.3, 0.0), c(-0.2, 1.0)],
            vec![c(0.0, -1.0), c(2.0, 0.0), c(0.4, 0.1)],
            vec![c(0.7, 0.0), c(-0.5, 0.5), c(1.5, 0.0)],
        ])
        .unwrap();
        let a = &(&p * &build_jordan(&spec)) * &p.lu().unwrap().inverse().unwrap();
        let es = eigenstructure_small(&a).unwrap();
        assert_eq!(es.spec.blocks().len(), 2);
        assert_eq!(es.spec.blocks()[0].size, 1);
        assert!((es.spec.blocks()[0].lambda - c(5.0, 0.0)).norm() < 1e-9);
        assert_eq!(es.spec.blocks()[1], JordanBlock::new(ZERO, 2));
        let basis = jordan_basis_small(&a, &es.spec).unwrap();
        let rebuilt = &(&basis.m * &build_jordan(&es.spec)) * &basis.m_inv;
        assert!(rebuilt.max_abs_diff(&a) < 1e-6);
    }
}
