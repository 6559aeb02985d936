//! Verdicts, constant sets and certificates for Jordan specs and small raw
//! matrices, plus the admissible region for the second eigenvalue of a 2×2
//! matrix.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::constructors::{
    apportion_2x2, apportion_3x3_template, apportion_half_rank, apportion_nilpotent, apportion_perturb_identity,
    apportion_rank_one, pad_by_zero, perturb_identity_constants, polar_condition_2x2, scalar_certificate,
    two_by_two_constants, zero_certificate, ApportionCertificate, TemplateKind, TheoremTag,
};
use crate::error::{Error, Result};
use crate::jordan::{build_jordan, eigenstructure_small, jordan_basis_small, InversePair, JordanBlock, JordanSpec};
use crate::matrix::{ComplexMatrix, C64, ONE, ZERO};
use crate::report::{Bounds, ClassificationReport, ConstantSet, Membership, Verdict, ENDPOINT_REL};
use crate::uniform::Tolerance;

/// Which result decides a canonical spec.
#[derive(Clone, Debug, PartialEq)]
enum Route {
    Zero,
    Scalar(C64),
    ScalarIdentity,
    Nilpotent,
    RankOne(C64),
    HalfRank,
    /// `μ (I_{n−1} ⊕ [λ])`; `natural` lists the `μ` blocks first.
    PerturbIdentity { mu: C64, lambda: C64, natural: JordanSpec },
    /// `μ (I + E₁₂)` with `n ≥ 3`, or `J₂(λ)` with `λ ≠ 0`.
    RepeatedNonzero,
    TwoByTwo(C64, C64),
    Template(TemplateKind, C64),
    PadTwoByTwo(C64, C64),
    Unknown,
}

impl Route {
    fn tag(&self) -> &'static str {
        match self {
            Route::Zero => "ZeroMatrix",
            Route::Scalar(_) => "Scalar",
            Route::ScalarIdentity => "ScalarIdentity",
            Route::Nilpotent => TheoremTag::Nilpotent.name(),
            Route::RankOne(_) => TheoremTag::RankOne.name(),
            Route::HalfRank => TheoremTag::HalfRank.name(),
            Route::PerturbIdentity { .. } => TheoremTag::PerturbIdentity.name(),
            Route::RepeatedNonzero => "RepeatedNonzeroEigenvalue",
            Route::TwoByTwo(..) => TheoremTag::TwoByTwo.name(),
            Route::Template(..) => TheoremTag::ThreeByThreeTemplate.name(),
            Route::PadTwoByTwo(..) => TheoremTag::PadZero.name(),
            Route::Unknown => "Unknown",
        }
    }
}

fn is_scalar_identity(spec: &JordanSpec) -> bool {
    let b = spec.blocks();
    b.iter().all(|x| x.size == 1 && x.lambda == b[0].lambda)
}

/// `μ(I_{n−1} ⊕ [λ])` or `μ(I + E₁₂)`; returns `(μ, Some(λ))` for the first
/// form and `(μ, None)` for the second.
fn perturbation_of_identity(spec: &JordanSpec) -> Option<(C64, Option<C64>)> {
    let n = spec.order();
    if n < 3 {
        return None;
    }
    let blocks = spec.blocks();
    for mu in blocks.iter().map(|b| b.lambda) {
        if mu == ZERO {
            continue;
        }
        let unit = blocks.iter().filter(|b| b.lambda == mu && b.size == 1).count();
        if unit == n - 1 {
            let other = blocks.iter().find(|b| b.lambda != mu).map(|b| b.lambda)?;
            return Some((mu, Some(other / mu)));
        }
        if unit == n - 2 && blocks.iter().any(|b| b.lambda == mu && b.size == 2) {
            return Some((mu, None));
        }
    }
    None
}

fn route(spec: &JordanSpec) -> Route {
    let n = spec.order();
    let blocks = spec.blocks();
    if spec.is_zero() {
        return Route::Zero;
    }
    if n == 1 {
        return Route::Scalar(blocks[0].lambda);
    }
    if is_scalar_identity(spec) {
        return Route::ScalarIdentity;
    }
    if spec.is_nilpotent() {
        return Route::Nilpotent;
    }
    let r = spec.rank();
    if r == 1 {
        return Route::RankOne(blocks[0].lambda);
    }
    if 2 * r <= n {
        return Route::HalfRank;
    }
    if let Some((mu, lam)) = perturbation_of_identity(spec) {
        return match lam {
            Some(lambda) => {
                let mut natural: Vec<JordanBlock> = blocks.iter().copied().filter(|b| b.lambda == mu).collect();
                natural.extend(blocks.iter().copied().filter(|b| b.lambda != mu));
                Route::PerturbIdentity { mu, lambda, natural: JordanSpec::new(natural).expect("valid blocks") }
            }
            None => Route::RepeatedNonzero,
        };
    }
    let shape: Vec<(C64, usize)> = blocks.iter().map(|b| (b.lambda, b.size)).collect();
    match (n, shape.as_slice()) {
        (2, [(_, 2)]) => Route::RepeatedNonzero,
        (2, [(l1, 1), (l2, 1)]) => Route::TwoByTwo(*l1, *l2),
        (3, [(l, 2), (z, 1)]) if *z == ZERO => Route::Template(TemplateKind::LambdaJ2PlusZero, *l),
        (3, [(l, 1), (z, 2)]) if *z == ZERO => Route::Template(TemplateKind::LambdaPlusN2, *l),
        (3, [(l1, 1), (l2, 1), (z, 1)]) if *z == ZERO && two_by_two_constants(*l1, *l2).is_ok() => {
            match two_by_two_constants(*l1, *l2) {
                Ok((Verdict::Apportionable, _)) => Route::PadTwoByTwo(*l1, *l2),
                _ => Route::Unknown,
            }
        }
        _ => Route::Unknown,
    }
}

fn constants_for(route: &Route, spec: &JordanSpec, bounds: &Bounds) -> Result<(Verdict, ConstantSet)> {
    let n = spec.order() as f64;
    let rho = spec.spectral_radius();
    Ok(match route {
        Route::Zero => (Verdict::Apportionable, ConstantSet::ZeroOnly),
        Route::Scalar(l) => (Verdict::Apportionable, ConstantSet::FiniteSet(vec![l.norm()])),
        Route::ScalarIdentity | Route::RepeatedNonzero => (Verdict::NotApportionable, ConstantSet::Empty),
        Route::Nilpotent => (Verdict::Apportionable, ConstantSet::OpenHalfLine(0.0)),
        Route::RankOne(l) => (Verdict::Apportionable, ConstantSet::ClosedHalfLine(l.norm() / n)),
        Route::HalfRank => (Verdict::Apportionable, ConstantSet::SupersetOfOpenHalfLine(rho / 2.0)),
        Route::PerturbIdentity { mu, lambda, .. } => {
            let set = perturb_identity_constants(spec.order(), *lambda)?.scaled(mu.norm());
            if set == ConstantSet::Empty {
                (Verdict::NotApportionable, set)
            } else {
                (Verdict::Apportionable, set)
            }
        }
        Route::TwoByTwo(l1, l2) => two_by_two_constants(*l1, *l2)?,
        Route::Template(TemplateKind::LambdaJ2PlusZero, l) => {
            (Verdict::Apportionable, ConstantSet::SupersetOfFinite(vec![l.norm()]))
        }
        Route::Template(TemplateKind::LambdaPlusN2, l) => {
            (Verdict::Apportionable, ConstantSet::SupersetOfFinite(vec![l.norm() / 3f64.sqrt()]))
        }
        Route::PadTwoByTwo(l1, l2) => {
            let set = match two_by_two_constants(*l1, *l2)?.1 {
                ConstantSet::ClosedHalfLine(lo) => ConstantSet::SupersetOfClosedHalfLine(lo),
                ConstantSet::FiniteSet(v) => ConstantSet::SupersetOfFinite(v),
                other => other,
            };
            (Verdict::Apportionable, set)
        }
        Route::Unknown => (Verdict::Unknown, ConstantSet::Unknown { lower_bound: bounds.max() }),
    })
}

fn scaled_certificate(cert: ApportionCertificate, mu: C64) -> ApportionCertificate {
    ApportionCertificate { b: cert.b.scale(mu), kappa: cert.kappa * mu.norm(), ..cert }
}

/// Maps a certificate for `build_jordan(from)` to one for
/// `build_jordan(to)` when the two specs hold the same blocks.
fn reorder_certificate(cert: ApportionCertificate, from: &JordanSpec, to: &JordanSpec) -> Result<ApportionCertificate> {
    let mut used = vec![false; to.blocks().len()];
    let mut order = Vec::with_capacity(from.blocks().len());
    for b in from.blocks() {
        let k = (0..used.len())
            .find(|&k| !used[k] && to.blocks()[k] == *b)
            .ok_or_else(|| Error::ShapeMismatch("specs hold different blocks".into()))?;
        used[k] = true;
        order.push(k);
    }
    let q = InversePair::permutation(to.block_permutation(&order));
    Ok(cert.pulled_back(&q))
}

fn check_membership(kappa: f64, set: &ConstantSet) -> Result<()> {
    match set.contains(kappa) {
        Membership::Yes => Ok(()),
        _ => Err(Error::ConstantNotAchievable { kappa, set: set.to_string() }),
    }
}

/// Certificate for `build_jordan(spec)` with `spec` canonical.
fn build_certificate(route: &Route, spec: &JordanSpec, set: &ConstantSet, kappa: Option<f64>) -> Result<ApportionCertificate> {
    let n = spec.order();
    let cert = match route {
        Route::Zero => {
            if let Some(k) = kappa {
                check_membership(k, set)?;
            }
            zero_certificate(n)
        }
        Route::Scalar(l) => {
            if let Some(k) = kappa {
                check_membership(k, set)?;
            }
            scalar_certificate(*l)
        }
        Route::ScalarIdentity | Route::RepeatedNonzero => {
            return Err(Error::NotApportionable(format!("{} has no uniform similarity image", describe(spec))))
        }
        Route::Nilpotent => apportion_nilpotent(spec, kappa.unwrap_or(1.0))?,
        Route::RankOne(l) => apportion_rank_one(*l, n, kappa.unwrap_or(l.norm() / n as f64))?,
        Route::HalfRank => apportion_half_rank(spec, kappa.unwrap_or(spec.spectral_radius()))?,
        Route::PerturbIdentity { mu, lambda, natural } => {
            let target = kappa.map(|k| k / mu.norm());
            if let Some(k) = kappa {
                check_membership(k, set)?;
            }
            let unit = apportion_perturb_identity(n, *lambda, target)?;
            reorder_certificate(scaled_certificate(unit, *mu), natural, spec)?
        }
        Route::TwoByTwo(l1, l2) => apportion_2x2(*l1, *l2, kappa)?
            .certificate
            .ok_or_else(|| Error::NotApportionable(format!("{} is not apportionable", describe(spec))))?,
        Route::Template(kind, l) => {
            if let Some(k) = kappa {
                check_membership(k, set)?;
            }
            apportion_3x3_template(*kind, *l)?
        }
        Route::PadTwoByTwo(l1, l2) => {
            if let Some(k) = kappa {
                check_membership(k, set)?;
            }
            let inner = apportion_2x2(*l1, *l2, kappa)?
                .certificate
                .ok_or_else(|| Error::Verification("2×2 block lost its certificate".into()))?;
            pad_by_zero(&inner)
        }
        Route::Unknown => {
            return Err(Error::Unknown(format!(
                "{} is not covered by a known result; every constant is at least {}",
                describe(spec),
                set.infimum().unwrap_or(0.0)
            )))
        }
    };
    cert.verify(&build_jordan(spec), Tolerance::default())?;
    Ok(cert)
}

fn describe(spec: &JordanSpec) -> String {
    let parts: Vec<String> = spec
        .blocks()
        .iter()
        .map(|b| format!("J{}({})", b.size, b.lambda))
        .collect();
    parts.join(" ⊕ ")
}

fn report_for_canonical(spec: &JordanSpec, kappa: Option<f64>, with_cert: bool) -> Result<(ClassificationReport, Route)> {
    let a = build_jordan(spec);
    let bounds = Bounds::of(&a)?;
    let route = route(spec);
    let (verdict, constants) = constants_for(&route, spec, &bounds)?;
    let certificate = if with_cert && verdict == Verdict::Apportionable {
        Some(build_certificate(&route, spec, &constants, kappa)?)
    } else {
        None
    };
    let report = ClassificationReport {
        verdict,
        constants,
        theorem_tag: route.tag().to_string(),
        certificate,
        approximate_eigen: false,
        bounds,
        spec: Some(spec.clone()),
    };
    Ok((report, route))
}

/// Classifies the Jordan matrix of `spec`. The certificate, when present,
/// apportions `build_jordan(spec)` in the given block order.
pub fn classify_spec(spec: &JordanSpec) -> Result<ClassificationReport> {
    let canonical = spec.canonical();
    let (mut report, _) = report_for_canonical(&canonical, None, true)?;
    if let Some(cert) = report.certificate.take() {
        report.certificate = Some(reorder_certificate(cert, &canonical, spec)?);
    }
    Ok(report)
}

/// Reads a Jordan matrix back into its spec; `None` when `a` is not exactly
/// a Jordan matrix.
pub fn jordan_form_of(a: &ComplexMatrix) -> Option<JordanSpec> {
    let n = a.order().ok()?;
    for i in 0..n {
        for j in 0..n {
            if j != i && j != i + 1 && a[(i, j)] != ZERO {
                return None;
            }
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    for i in 0..n {
        let link = i + 1 < n && a[(i, i + 1)] != ZERO;
        if link && (a[(i, i + 1)] != ONE || a[(i, i)] != a[(i + 1, i + 1)]) {
            return None;
        }
        if !link {
            blocks.push(JordanBlock::new(a[(start, start)], i + 1 - start));
            start = i + 1;
        }
    }
    JordanSpec::new(blocks).ok()
}

enum Structure {
    Exact(JordanSpec),
    Similar { spec: JordanSpec, basis: InversePair, approximate: bool },
}

fn structure_of(a: &ComplexMatrix) -> Result<Structure> {
    let n = a.order()?;
    if !a.is_finite() {
        return Err(Error::InvalidInput("matrix entries must be finite".into()));
    }
    if n == 0 {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    if let Some(spec) = jordan_form_of(a) {
        return Ok(Structure::Exact(spec));
    }
    if a.is_zero() {
        return Ok(Structure::Exact(JordanSpec::from_real(&vec![(0.0, 1); n])?));
    }
    if n > 3 {
        return Err(Error::UnsupportedOrder {
            order: n,
            reason: "raw entries are accepted up to order 3; supply a Jordan spec".into(),
        });
    }
    let es = eigenstructure_small(a)?;
    let basis = jordan_basis_small(a, &es.spec)?;
    Ok(Structure::Similar { spec: es.spec, basis, approximate: es.approximate })
}

/// Moves a certificate for `J` to one for `A = P J P⁻¹`.
fn to_raw(cert: ApportionCertificate, basis: &InversePair, a: &ComplexMatrix) -> Result<ApportionCertificate> {
    let q = InversePair { m: basis.m_inv.clone(), m_inv: basis.m.clone() };
    let cert = cert.pulled_back(&q);
    let b = &(&cert.m * a) * &cert.m_inv;
    let cert = ApportionCertificate { b, ..cert };
    cert.verify(a, Tolerance::default())?;
    Ok(cert)
}

/// Classifies a raw square matrix. Jordan matrices of any order are read
/// exactly; other matrices must have order at most 3, and their Jordan
/// structure is recovered numerically (see `approximate_eigen`).
pub fn classify_matrix(a: &ComplexMatrix) -> Result<ClassificationReport> {
    match structure_of(a)? {
        Structure::Exact(spec) => {
            let mut report = classify_spec(&spec)?;
            report.bounds = Bounds::of(a)?;
            Ok(report)
        }
        Structure::Similar { spec, basis, approximate } => {
            let (mut report, _) = report_for_canonical(&spec, None, true)?;
            report.approximate_eigen = approximate;
            report.bounds = Bounds::of(a)?;
            if let Some(cert) = report.certificate.take() {
                // a failed mapping leaves the verdict standing without a certificate
                report.certificate = to_raw(cert, &basis, a).ok();
            }
            Ok(report)
        }
    }
}

/// Input accepted by [`classify`] and [`certificate_at`].
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixInput {
    Entries(ComplexMatrix),
    Jordan(JordanSpec),
}

impl MatrixInput {
    pub fn matrix(&self) -> ComplexMatrix {
        match self {
            MatrixInput::Entries(a) => a.clone(),
            MatrixInput::Jordan(s) => build_jordan(s),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            MatrixInput::Entries(a) => a.rows(),
            MatrixInput::Jordan(s) => s.order(),
        }
    }
}

pub fn classify(input: &MatrixInput) -> Result<ClassificationReport> {
    match input {
        MatrixInput::Entries(a) => classify_matrix(a),
        MatrixInput::Jordan(s) => classify_spec(s),
    }
}

/// The set `K(A)` recorded in a report.
pub fn constant_set(report: &ClassificationReport) -> ConstantSet {
    report.constants.clone()
}

/// A certificate for the input at constant `kappa` (or a default member of
/// `K(A)` when `kappa` is `None`).
///
/// Errors: `NotApportionable`, `Unknown`, or one of the constant errors
/// (`ConstantNotAchievable`, `BelowMinimum`, `BelowThreshold`) when `kappa`
/// is outside the established part of `K(A)`.
pub fn certificate_at(input: &MatrixInput, kappa: Option<f64>) -> Result<ApportionCertificate> {
    let (spec, raw) = match input {
        MatrixInput::Jordan(s) => (s.clone(), None),
        MatrixInput::Entries(a) => match structure_of(a)? {
            Structure::Exact(s) => (s, None),
            Structure::Similar { spec, basis, .. } => (spec, Some((basis, a))),
        },
    };
    let canonical = spec.canonical();
    let (report, route) = report_for_canonical(&canonical, None, false)?;
    match report.verdict {
        Verdict::NotApportionable => {
            return Err(Error::NotApportionable(format!("{} is not apportionable", describe(&canonical))))
        }
        Verdict::Unknown => {
            return Err(Error::Unknown(format!(
                "{} is not covered by a known result; every constant is at least {}",
                describe(&canonical),
                report.bounds.max()
            )))
        }
        Verdict::Apportionable => {}
    }
    if let Some(k) = kappa {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidInput(format!("constant must be non-negative and finite, got {k}")));
        }
        if report.constants.contains(k) == Membership::No {
            let lo = report.constants.infimum().unwrap_or(0.0);
            return Err(match &report.constants {
                ConstantSet::ClosedHalfLine(_) if k < lo * (1.0 - ENDPOINT_REL) => {
                    Error::BelowMinimum { kappa: k, minimum: lo, set: report.constants.to_string() }
                }
                _ => Error::ConstantNotAchievable { kappa: k, set: report.constants.to_string() },
            });
        }
    }
    let cert = build_certificate(&route, &canonical, &report.constants, kappa)?;
    match raw {
        None => reorder_certificate(cert, &canonical, &spec),
        Some((basis, a)) => to_raw(cert, &basis, a),
    }
}

/// Status of one grid point of the admissible region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RegionStatus {
    Admissible,
    Inadmissible,
    /// Within `1e-9` of `λ₁` or of 0.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionSample {
    pub re: f64,
    pub im: f64,
    pub status: RegionStatus,
}

/// Axis-aligned box in the complex plane sampled on a `res × res` grid
/// including its edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub resolution: usize,
}

impl RegionGrid {
    pub fn square(half_width: f64, resolution: usize) -> Self {
        Self { re_min: -half_width, re_max: half_width, im_min: -half_width, im_max: half_width, resolution }
    }

    fn coord(lo: f64, hi: f64, i: usize, res: usize) -> f64 {
        lo + (hi - lo) * i as f64 / (res - 1) as f64
    }

    /// Grid points, rows of constant imaginary part from top (largest) to
    /// bottom, each row left to right.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let r = self.resolution;
        let mut pts = Vec::with_capacity(r * r);
        for row in 0..r {
            let im = Self::coord(self.im_max, self.im_min, row, r);
            for col in 0..r {
                pts.push((Self::coord(self.re_min, self.re_max, col, r), im));
            }
        }
        pts
    }
}

const DEGENERATE: f64 = 1e-9;

/// Evaluates the polar criterion for `diag(λ₁, λ₂)` at every grid point
/// `λ₂`.
pub fn admissible_region(lambda1: C64, grid: &RegionGrid) -> Result<Vec<RegionSample>> {
    if lambda1 == ZERO || !lambda1.is_finite() {
        return Err(Error::InvalidInput("λ₁ must be nonzero and finite".into()));
    }
    if grid.resolution < 2 {
        return Err(Error::InvalidInput(format!("resolution must be at least 2, got {}", grid.resolution)));
    }
    let bounds = [grid.re_min, grid.re_max, grid.im_min, grid.im_max];
    if bounds.iter().any(|x| !x.is_finite()) || grid.re_min >= grid.re_max || grid.im_min >= grid.im_max {
        return Err(Error::InvalidInput("region box must be finite with min < max".into()));
    }
    Ok(grid
        .points()
        .into_par_iter()
        .map(|(re, im)| {
            let l2 = C64::new(re, im);
            let status = if l2.norm() <= DEGENERATE || (l2 - lambda1).norm() <= DEGENERATE {
                RegionStatus::Degenerate
            } else if polar_condition_2x2(lambda1, l2).unwrap_or(false) {
                RegionStatus::Admissible
            } else {
                RegionStatus::Inadmissible
            };
            RegionSample { re, im, status }
        })
        .collect())
}

/// `re,im,admissible` with `1`, `0` or `skip`.
pub fn region_csv(samples: &[RegionSample]) -> String {
    let mut out = String::from("re,im,admissible\n");
    for s in samples {
        let flag = match s.status {
            RegionStatus::Admissible => "1",
            RegionStatus::Inadmissible => "0",
            RegionStatus::Degenerate => "skip",
        };
        let _ = writeln!(out, "{},{},{}", s.re, s.im, flag);
    }
    out
}

/// Self-contained SVG raster of the region: one pixel per grid point, runs
/// of equal status merged per row, with the real and imaginary axes.
pub fn region_svg(samples: &[RegionSample], grid: &RegionGrid) -> String {
    let r = grid.resolution;
    let color = |s: RegionStatus| match s {
        RegionStatus::Admissible => "#3b6ea5",
        RegionStatus::Inadmissible => "#f4f4f4",
        RegionStatus::Degenerate => "#d62728",
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{r}\" height=\"{r}\" viewBox=\"0 0 {r} {r}\" shape-rendering=\"crispEdges\">"
    );
    for row in 0..r {
        let line = &samples[row * r..(row + 1) * r];
        let mut start = 0;
        for col in 1..=r {
            if col == r || line[col].status != line[start].status {
                let _ = writeln!(
                    out,
                    "<rect x=\"{start}\" y=\"{row}\" width=\"{}\" height=\"1\" fill=\"{}\"/>",
                    col - start,
                    color(line[start].status)
                );
                start = col;
            }
        }
    }
    let px = |v: f64, lo: f64, hi: f64| (v - lo) / (hi - lo) * (r - 1) as f64 + 0.5;
    if grid.re_min <= 0.0 && grid.re_max >= 0.0 {
        let x = px(0.0, grid.re_min, grid.re_max);
        let _ = writeln!(out, "<line x1=\"{x}\" y1=\"0\" x2=\"{x}\" y2=\"{r}\" stroke=\"#000\" stroke-width=\"1\"/>");
    }
    if grid.im_min <= 0.0 && grid.im_max >= 0.0 {
        let y = px(0.0, grid.im_max, grid.im_min);
        let _ = writeln!(out, "<line x1=\"0\" y1=\"{y}\" x2=\"{r}\" y2=\"{y}\" stroke=\"#000\" stroke-width=\"1\"/>");
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn spec(pairs: &[(C64, usize)]) -> JordanSpec {
        JordanSpec::from_pairs(pairs).unwrap()
    }

    #[test]
    fn jordan_block_two_is_refused() {
        let r = classify_spec(&spec(&[(c(2.0, 0.0), 2)])).unwrap();
        assert_eq!((r.verdict, r.constants), (Verdict::NotApportionable, ConstantSet::Empty));
    }

    #[test]
    fn identity_plus_zero_is_refused() {
        let r = classify_spec(&spec(&[(ONE, 1), (ONE, 1), (ZERO, 1)])).unwrap();
        assert_eq!(r.verdict, Verdict::NotApportionable);
        assert_eq!(r.theorem_tag, "PerturbIdentity");
    }

    #[test]
    fn nilpotent_three() {
        let r = classify_spec(&spec(&[(ZERO, 3)])).unwrap();
        assert_eq!(r.constants, ConstantSet::OpenHalfLine(0.0));
        assert!(r.certificate.is_some());
    }

    #[test]
    fn rank_one_diag() {
        let r = classify_spec(&spec(&[(c(3.0, 0.0), 1), (ZERO, 1), (ZERO, 1)])).unwrap();
        assert_eq!(r.constants, ConstantSet::ClosedHalfLine(1.0));
    }

    #[test]
    fn diag_one_minus_one() {
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        let r = classify_matrix(&a).unwrap();
        assert_eq!(r.constants, ConstantSet::ClosedHalfLine(1.0 / 2f64.sqrt()));
        let cert = r.certificate.unwrap();
        cert.verify(&a, Tolerance::default()).unwrap();
    }

    #[test]
    fn perturbed_identity_finite_set() {
        let lam = c(-0.5, 2.0);
        let r = classify_spec(&spec(&[(ONE, 1), (ONE, 1), (lam, 1)])).unwrap();
        let want: Vec<f64> = (0..2).map(|s| (4.0 / ((3 - 2 * s) as f64).powi(2) + 0.25).sqrt()).collect();
        match &r.constants {
            ConstantSet::FiniteSet(v) => {
                assert_eq!(v.len(), 2);
                for (g, w) in v.iter().zip(&want) {
                    assert!((g - w).abs() < 1e-15);
                }
            }
            other => panic!("{other:?}"),
        }
        for w in want {
            let cert = certificate_at(&MatrixInput::Jordan(spec(&[(ONE, 1), (ONE, 1), (lam, 1)])), Some(w)).unwrap();
            assert!((cert.kappa - w).abs() < 1e-9);
        }
    }

    #[test]
    fn scaled_perturbation_in_any_order() {
        let mu = c(1.0, 1.0);
        let s = spec(&[(mu * c(-0.5, 0.3), 1), (mu, 1), (mu, 1)]);
        let r = classify_spec(&s).unwrap();
        assert_eq!(r.verdict, Verdict::Apportionable);
        r.certificate.unwrap().verify(&build_jordan(&s), Tolerance::default()).unwrap();
    }

    #[test]
    fn raw_matrix_certificates() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 1.0), ZERO],
            vec![ZERO, c(-1.0, 0.0), ONE],
            vec![ZERO, ZERO, ZERO],
        ])
        .unwrap();
        let r = classify_matrix(&a).unwrap();
        assert_eq!(r.verdict, Verdict::Apportionable);
        assert_eq!(r.theorem_tag, "PadZero");
        r.certificate.unwrap().verify(&a, Tolerance::default()).unwrap();
        let cert = certificate_at(&MatrixInput::Entries(a.clone()), Some(2.0)).unwrap();
        assert!((cert.kappa - 2.0).abs() < 1e-9);
    }

    #[test]
    fn three_distinct_is_unknown() {
        let r = classify_spec(&spec(&[(c(3.0, 0.0), 1), (c(2.0, 0.0), 1), (ONE, 1)])).unwrap();
        assert_eq!(r.verdict, Verdict::Unknown);
        assert!(matches!(r.constants, ConstantSet::Unknown { lower_bound } if (lower_bound - 2.0).abs() < 1e-12));
    }

    #[test]
    fn certificate_errors() {
        let j2 = MatrixInput::Jordan(spec(&[(c(5.0, 0.0), 2)]));
        assert!(matches!(certificate_at(&j2, None), Err(Error::NotApportionable(_))));
        let d = MatrixInput::Jordan(spec(&[(c(2.0, 0.0), 1), (ZERO, 1)]));
        assert!(matches!(certificate_at(&d, Some(0.9)), Err(Error::BelowMinimum { .. })));
        let u = MatrixInput::Jordan(spec(&[(c(1.0, 0.0), 3)]));
        assert!(matches!(certificate_at(&u, None), Err(Error::Unknown(_))));
    }

    #[test]
    fn jordan_form_detection() {
        let s = spec(&[(c(2.0, 0.0), 2), (ZERO, 1), (c(2.0, 0.0), 1)]);
        assert_eq!(jordan_form_of(&build_jordan(&s)), Some(s));
        let not = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[0.0, 1.0]]);
        assert_eq!(jordan_form_of(&not), None);
    }

    #[test]
    fn region_points() {
        let grid = RegionGrid::square(3.0, 601);
        let samples = admissible_region(ONE, &grid).unwrap();
        let at = |re: f64, im: f64| samples.iter().find(|s| s.re == re && s.im == im).unwrap().status;
        assert_eq!(at(-1.0, 0.0), RegionStatus::Admissible);
        assert_eq!(at(2.0, 0.0), RegionStatus::Inadmissible);
        assert_eq!(at(0.0, 1.0), RegionStatus::Admissible);
        assert_eq!(at(1.0, 0.0), RegionStatus::Degenerate);
        assert!(admissible_region(ZERO, &grid).is_err());
        assert!(admissible_region(ONE, &RegionGrid::square(3.0, 1)).is_err());
        let svg = region_svg(&samples, &grid);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
