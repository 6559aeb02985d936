//! Numerical search for apportioning matrices, and an empirical estimate of
//! the least number of zero blocks that makes a matrix apportionable.
//!
//! The objective is the squared coefficient of variation of `|b_ij|²` for
//! `B = M A M⁻¹`, plus a small barrier `−w log |det(M/‖M‖_F)|²`. Both parts
//! are invariant under scaling of `M`. Minimisation is BFGS over the
//! `2n²` real parameters of `M = X + iY`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{classify, MatrixInput};
use crate::constructors::{ApportionCertificate, TheoremTag};
use crate::error::{Error, Result};
use crate::jordan::{build_jordan, eigenstructure_small, JordanSpec};
use crate::matrix::{ComplexMatrix, C64};
use crate::report::Verdict;
use crate::uniform::{is_uniform, similarity_image, Tolerance, RCOND_THRESHOLD};

/// Largest order the search accepts.
pub const MAX_ORDER: usize = 16;
/// Restarts run in fixed batches of this size; the search stops after the
/// first batch containing a success, independent of the thread count.
const BATCH: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub seed: u64,
    /// Relative spread `max |mod − κ| / κ` accepted as uniform.
    pub defect_target: f64,
    /// Barrier weight.
    pub barrier: f64,
    /// Armijo constant of the backtracking line search.
    pub armijo: f64,
    /// Iterations of refinement after the main run, at barrier weight
    /// `polish_barrier`.
    pub polish_iters: usize,
    pub polish_barrier: f64,
    /// Smallest reciprocal condition number of an accepted `M`.
    pub min_rcond: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 2000, seed: 1, defect_target: 1e-8, barrier: 1e-6, armijo: 1e-4, polish_iters: 200, polish_barrier: 1e-10, min_rcond: 1e-3 }
    }
}

impl SearchConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidInput("restarts must be at least 1".into()));
        }
        if !(self.defect_target > 0.0 && self.defect_target.is_finite()) {
            return Err(Error::InvalidInput("defect target must be positive".into()));
        }
        if !(self.barrier >= 0.0 && self.barrier.is_finite()) || !(self.armijo > 0.0 && self.armijo < 0.5) {
            return Err(Error::InvalidInput("bad barrier or Armijo constant".into()));
        }
        Ok(())
    }
}

/// Per-restart summary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub iterations: usize,
    pub objective: f64,
    /// Relative spread of the final image (`∞` if `M` went singular).
    pub defect: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub found: bool,
    pub best_defect: f64,
    pub certificate: Option<ApportionCertificate>,
    pub restarts_used: usize,
    pub transcript: Vec<RestartRecord>,
}

fn from_params(n: usize, p: &[f64]) -> ComplexMatrix {
    let nn = n * n;
    ComplexMatrix::from_fn(n, n, |i, j| C64::new(p[i * n + j], p[nn + i * n + j]))
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Objective value and gradient at the parameter vector `p` (real parts of
/// `M` row-major, then imaginary parts). Returns `None` when `M` is
/// numerically singular.
pub fn objective_and_gradient(a: &ComplexMatrix, p: &[f64], barrier: f64) -> Option<(f64, Vec<f64>)> {
    let n = a.rows();
    let m = from_params(n, p);
    let lu = m.lu().ok()?;
    if lu.is_exactly_singular() || lu.rcond() < RCOND_THRESHOLD {
        return None;
    }
    let w = lu.inverse().ok()?;
    let b = &(&m * a) * &w;
    let nn = (n * n) as f64;
    let q: Vec<f64> = b.iter().map(|z| z.norm_sqr()).collect();
    let s1: f64 = q.iter().sum();
    let s2: f64 = q.iter().map(|x| x * x).sum();
    if !(s1 > 0.0) {
        return None;
    }
    let pn2 = norm2(p);
    let log_det = lu.log_abs_det();
    let f = nn * s2 / (s1 * s1) - 1.0 - barrier * (2.0 * log_det - n as f64 * pn2.ln());

    // H = 2 g ∘ conj(B), g = ∂f/∂q
    let h = ComplexMatrix::from_fn(n, n, |i, j| {
        let qij = q[i * n + j];
        let g = nn * (2.0 * qij / (s1 * s1) - 2.0 * s2 / (s1 * s1 * s1));
        b[(i, j)].conj() * (2.0 * g)
    });
    let wht = &w * &h.transpose();
    let k = &(a * &wht) - &(&wht * &b);
    let mut grad = vec![0.0; 2 * n * n];
    for i in 0..n {
        for j in 0..n {
            let kji = k[(j, i)];
            let wji = w[(j, i)];
            grad[i * n + j] = kji.re - 2.0 * barrier * wji.re + 2.0 * barrier * n as f64 * p[i * n + j] / pn2;
            grad[n * n + i * n + j] =
                -kji.im + 2.0 * barrier * wji.im + 2.0 * barrier * n as f64 * p[n * n + i * n + j] / pn2;
        }
    }
    Some((f, grad))
}

struct Run {
    params: Vec<f64>,
    objective: f64,
    iterations: usize,
}

/// BFGS with backtracking Armijo line search from `p0`.
fn minimise(a: &ComplexMatrix, p0: Vec<f64>, cfg: &SearchConfig) -> Run {
    let main = bfgs(a, p0, cfg.barrier, cfg.max_iters, cfg.armijo);
    if cfg.polish_iters == 0 || !main.objective.is_finite() {
        return main;
    }
    let polished = bfgs(a, main.params.clone(), cfg.polish_barrier, cfg.polish_iters, cfg.armijo);
    Run { iterations: main.iterations + polished.iterations, ..polished }
}

fn bfgs(a: &ComplexMatrix, p0: Vec<f64>, barrier: f64, max_iters: usize, armijo: f64) -> Run {
    let d = p0.len();
    let mut x = p0;
    let scale = norm2(&x).sqrt();
    x.iter_mut().for_each(|v| *v /= scale);
    let Some((mut f, mut g)) = objective_and_gradient(a, &x, barrier) else {
        return Run { params: x, objective: f64::INFINITY, iterations: 0 };
    };
    let identity = |d: usize| {
        let mut h = vec![0.0; d * d];
        (0..d).for_each(|i| h[i * d + i] = 1.0);
        h
    };
    let mut hinv = identity(d);
    let mut stalls = 0;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        let mut dir: Vec<f64> = (0..d).map(|i| -dot(&hinv[i * d..(i + 1) * d], &g)).collect();
        let mut slope = dot(&dir, &g);
        if !(slope < 0.0) {
            hinv = identity(d);
            dir = g.iter().map(|v| -v).collect();
            slope = -norm2(&g);
        }
        if slope == 0.0 {
            break;
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            if let Some((fnew, gnew)) = objective_and_gradient(a, &xn, barrier) {
                if fnew <= f + armijo * t * slope {
                    accepted = Some((xn, fnew, gnew));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            if hinv == identity(d) {
                break;
            }
            hinv = identity(d);
            continue;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gnew.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if iterations == 1 {
                // scale the initial inverse Hessian
                let gamma = sy / norm2(&y);
                hinv.iter_mut().for_each(|v| *v *= gamma);
            }
            let hy: Vec<f64> = (0..d).map(|i| dot(&hinv[i * d..(i + 1) * d], &y)).collect();
            let yhy = dot(&y, &hy);
            let rho = 1.0 / sy;
            let coef = (1.0 + rho * yhy) * rho;
            for i in 0..d {
                for j in 0..d {
                    hinv[i * d + j] += coef * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
                }
            }
        }
        let progress = f - fnew;
        x = xn;
        f = fnew;
        g = gnew;
        let pn = norm2(&x).sqrt();
        if !(0.5..=2.0).contains(&pn) {
            // the objective is scale invariant; rescale and restart the curvature model
            x.iter_mut().for_each(|v| *v /= pn);
            g.iter_mut().for_each(|v| *v *= pn);
            hinv = identity(d);
        }
        if progress <= 1e-16 * f.abs().max(1e-300) {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        } else {
            stalls = 0;
        }
        if norm2(&g).sqrt() < 1e-15 {
            break;
        }
    }
    Run { params: x, objective: f, iterations }
}

fn relative_defect(a: &ComplexMatrix, m: &ComplexMatrix) -> f64 {
    match similarity_image(m, a).and_then(|b| is_uniform(&b, Tolerance::default())) {
        Ok(r) if r.kappa > 0.0 => r.defect / r.kappa,
        _ => f64::INFINITY,
    }
}

fn initial_point(n: usize, seed: u64, restart: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    (0..2 * n * n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

fn certificate(a: &ComplexMatrix, m: &ComplexMatrix, cfg: &SearchConfig) -> Option<ApportionCertificate> {
    let target = cfg.defect_target;
    let lu = m.lu().ok()?;
    if lu.rcond() < cfg.min_rcond {
        return None;
    }
    let m_inv = lu.inverse().ok()?;
    let b = &(m * a) * &m_inv;
    let kappa = is_uniform(&b, Tolerance::default()).ok()?.kappa;
    let cert = ApportionCertificate { m: m.clone(), m_inv, b, kappa, theorem_tag: TheoremTag::Search };
    let tol = Tolerance::new(target, f64::MIN_POSITIVE).ok()?;
    cert.verify(a, tol).ok()?;
    Some(cert)
}

/// Worker threads: `APPORTION_THREADS` when set, else the available parallelism.
pub fn thread_count() -> usize {
    std::env::var("APPORTION_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&k| k > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

/// Multi-start search for `M` with `M A M⁻¹` uniform to relative spread
/// `cfg.defect_target`. A miss is not evidence of non-apportionability.
pub fn find_apportioning(a: &ComplexMatrix, cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let n = a.order()?;
    if n > MAX_ORDER {
        return Err(Error::Budget(format!("search is limited to order {MAX_ORDER}, got {n}")));
    }
    if n == 0 || !a.is_finite() {
        return Err(Error::InvalidInput("matrix must be non-empty and finite".into()));
    }
    if a.is_zero() {
        let cert = ApportionCertificate {
            m: ComplexMatrix::identity(n),
            m_inv: ComplexMatrix::identity(n),
            b: a.clone(),
            kappa: 0.0,
            theorem_tag: TheoremTag::Search,
        };
        return Ok(SearchOutcome {
            found: true,
            best_defect: 0.0,
            certificate: Some(cert),
            restarts_used: 0,
            transcript: vec![],
        });
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(thread_count())
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    let mut transcript = Vec::new();
    let mut best: Option<(f64, usize, ComplexMatrix)> = None;
    let mut found = None;
    let mut start = 0;
    while start < cfg.restarts && found.is_none() {
        let end = (start + BATCH).min(cfg.restarts);
        let results: Vec<(RestartRecord, ComplexMatrix)> = pool.install(|| {
            (start..end)
                .into_par_iter()
                .map(|r| {
                    let run = minimise(a, initial_point(n, cfg.seed, r), cfg);
                    let m = from_params(n, &run.params);
                    let defect = relative_defect(a, &m);
                    (RestartRecord { restart: r, iterations: run.iterations, objective: run.objective, defect }, m)
                })
                .collect()
        });
        for (rec, m) in results {
            if best.as_ref().is_none_or(|(d, _, _)| rec.defect < *d) {
                best = Some((rec.defect, rec.restart, m.clone()));
            }
            if found.is_none() && rec.defect <= cfg.defect_target {
                if let Some(cert) = certificate(a, &m, cfg) {
                    found = Some((rec.defect, cert));
                }
            }
            transcript.push(rec);
        }
        start = end;
    }
    let restarts_used = start;
    Ok(match found {
        Some((defect, cert)) => {
            SearchOutcome { found: true, best_defect: defect, certificate: Some(cert), restarts_used, transcript }
        }
        None => SearchOutcome {
            found: false,
            best_defect: best.map_or(f64::INFINITY, |b| b.0),
            certificate: None,
            restarts_used,
            transcript,
        },
    })
}

/// How the verdict at one padding level was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SigmaSource {
    Classifier,
    Search,
    /// Not searched because a smaller padding already succeeded.
    Skipped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaStep {
    pub m: usize,
    pub verdict: Verdict,
    pub source: SigmaSource,
    /// Apportionable by theory or found by search.
    pub apportionable: bool,
    pub outcome: Option<SearchOutcome>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SigmaReport {
    pub steps: Vec<SigmaStep>,
    pub sigma_upper_empirical: Option<usize>,
    pub sigma_theory_upper: usize,
}

fn spec_of(input: &MatrixInput) -> Result<JordanSpec> {
    match input {
        MatrixInput::Jordan(s) => Ok(s.clone()),
        MatrixInput::Entries(a) => {
            if let Some(s) = crate::classify::jordan_form_of(a) {
                return Ok(s);
            }
            let n = a.order()?;
            if n > 3 {
                return Err(Error::UnsupportedOrder {
                    order: n,
                    reason: "raw entries are accepted up to order 3; supply a Jordan spec".into(),
                });
            }
            Ok(eigenstructure_small(a)?.spec)
        }
    }
}

/// For `m = 0..=m_max`, decides whether `A ⊕ O_m` is apportionable: by the
/// classifier where a result applies, otherwise by search. `m_max`
/// defaults to the theoretical upper bound `clamp(2 rank − n, 0, n)`.
pub fn sigma_estimate(input: &MatrixInput, m_max: Option<usize>, cfg: &SearchConfig) -> Result<SigmaReport> {
    cfg.validate()?;
    let spec = spec_of(input)?;
    let n = spec.order();
    let theory = (2 * spec.rank()).saturating_sub(n).min(n);
    let m_max = m_max.unwrap_or(theory);
    if n + m_max > MAX_ORDER {
        return Err(Error::Budget(format!("order {n} plus padding {m_max} exceeds {MAX_ORDER}")));
    }
    let mut steps = Vec::with_capacity(m_max + 1);
    let mut sigma = None;
    for m in 0..=m_max {
        let padded = spec.pad_zeros(m);
        let report = classify(&MatrixInput::Jordan(padded.clone()))?;
        let step = match report.verdict {
            Verdict::Apportionable => {
                SigmaStep { m, verdict: report.verdict, source: SigmaSource::Classifier, apportionable: true, outcome: None }
            }
            Verdict::NotApportionable => SigmaStep {
                m,
                verdict: report.verdict,
                source: SigmaSource::Classifier,
                apportionable: false,
                outcome: None,
            },
            Verdict::Unknown if sigma.is_some() => {
                SigmaStep { m, verdict: report.verdict, source: SigmaSource::Skipped, apportionable: false, outcome: None }
            }
            Verdict::Unknown => {
                let outcome = find_apportioning(&build_jordan(&padded), cfg)?;
                SigmaStep {
                    m,
                    verdict: report.verdict,
                    source: SigmaSource::Search,
                    apportionable: outcome.found,
                    outcome: Some(outcome),
                }
            }
        };
        if step.apportionable && sigma.is_none() {
            sigma = Some(m);
        }
        steps.push(step);
    }
    Ok(SigmaReport { steps, sigma_upper_empirical: sigma, sigma_theory_upper: theory })
}
