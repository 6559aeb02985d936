//! Verdicts and descriptions of the set `K(A)` of apportionment constants.

use std::fmt;

use serde::Serialize;

use crate::constructors::ApportionCertificate;
use crate::error::Result;
use crate::jordan::JordanSpec;
use crate::matrix::ComplexMatrix;
use crate::uniform::{hadamard_lower_bound, trace_lower_bound};

/// Relative slack used when testing a constant against a closed endpoint.
pub const ENDPOINT_REL: f64 = 1e-12;
/// Relative tolerance for matching a member of a finite set.
pub const MEMBER_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Apportionable,
    NotApportionable,
    Unknown,
}

/// Three-valued membership answer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Membership {
    Yes,
    No,
    Unknown,
}

/// Symbolic description of `K(A)`.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstantSet {
    Empty,
    ZeroOnly,
    OpenHalfLine(f64),
    ClosedHalfLine(f64),
    /// Sorted ascending, positive.
    FiniteSet(Vec<f64>),
    /// `K(A)` contains `(lo, ∞)`; nothing more is established.
    SupersetOfOpenHalfLine(f64),
    /// `K(A)` contains `[lo, ∞)`; nothing more is established.
    SupersetOfClosedHalfLine(f64),
    /// `K(A)` contains these values; nothing more is established.
    SupersetOfFinite(Vec<f64>),
    /// Nothing is known beyond `κ ≥ lower_bound`.
    Unknown { lower_bound: f64 },
}

fn at_least(kappa: f64, lo: f64) -> bool {
    kappa >= lo - ENDPOINT_REL * lo.abs()
}

fn matches_member(kappa: f64, v: f64) -> bool {
    (kappa - v).abs() <= MEMBER_REL * v.abs().max(f64::MIN_POSITIVE)
}

impl ConstantSet {
    pub fn finite(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| matches_member(*a, *b));
        ConstantSet::FiniteSet(values)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ConstantSet::Empty => "Empty",
            ConstantSet::ZeroOnly => "ZeroOnly",
            ConstantSet::OpenHalfLine(_) => "OpenHalfLine",
            ConstantSet::ClosedHalfLine(_) => "ClosedHalfLine",
            ConstantSet::FiniteSet(_) => "FiniteSet",
            ConstantSet::SupersetOfOpenHalfLine(_) => "SupersetOfOpenHalfLine",
            ConstantSet::SupersetOfClosedHalfLine(_) => "SupersetOfClosedHalfLine",
            ConstantSet::SupersetOfFinite(_) => "SupersetOfFinite",
            ConstantSet::Unknown { .. } => "Unknown",
        }
    }

    /// Whether this describes `K(A)` exactly.
    pub fn is_exact(&self) -> bool {
        matches!(
            self,
            ConstantSet::Empty
                | ConstantSet::ZeroOnly
                | ConstantSet::OpenHalfLine(_)
                | ConstantSet::ClosedHalfLine(_)
                | ConstantSet::FiniteSet(_)
        )
    }

    pub fn contains(&self, kappa: f64) -> Membership {
        use Membership::*;
        if !kappa.is_finite() || kappa < 0.0 {
            return No;
        }
        let yes_no = |b: bool| if b { Yes } else { No };
        match self {
            ConstantSet::Empty => No,
            ConstantSet::ZeroOnly => yes_no(kappa == 0.0),
            ConstantSet::OpenHalfLine(lo) => yes_no(kappa > *lo),
            ConstantSet::ClosedHalfLine(lo) => yes_no(kappa > 0.0 && at_least(kappa, *lo)),
            ConstantSet::FiniteSet(vals) => yes_no(vals.iter().any(|&v| matches_member(kappa, v))),
            ConstantSet::SupersetOfOpenHalfLine(lo) => {
                if kappa > *lo {
                    Yes
                } else if kappa == 0.0 {
                    No
                } else {
                    Unknown
                }
            }
            ConstantSet::SupersetOfClosedHalfLine(lo) => {
                if kappa > 0.0 && at_least(kappa, *lo) {
                    Yes
                } else if kappa == 0.0 {
                    No
                } else {
                    Unknown
                }
            }
            ConstantSet::SupersetOfFinite(vals) => {
                if vals.iter().any(|&v| matches_member(kappa, v)) {
                    Yes
                } else if kappa == 0.0 {
                    No
                } else {
                    Unknown
                }
            }
            ConstantSet::Unknown { lower_bound } => {
                if kappa == 0.0 || !at_least(kappa, *lower_bound) {
                    No
                } else {
                    Unknown
                }
            }
        }
    }

    /// Infimum of the known part, if any.
    pub fn infimum(&self) -> Option<f64> {
        match self {
            ConstantSet::Empty => None,
            ConstantSet::ZeroOnly => Some(0.0),
            ConstantSet::OpenHalfLine(lo)
            | ConstantSet::ClosedHalfLine(lo)
            | ConstantSet::SupersetOfOpenHalfLine(lo)
            | ConstantSet::SupersetOfClosedHalfLine(lo) => Some(*lo),
            ConstantSet::FiniteSet(v) | ConstantSet::SupersetOfFinite(v) => v.first().copied(),
            ConstantSet::Unknown { lower_bound } => Some(*lower_bound),
        }
    }

    /// Numeric endpoints / members.
    pub fn values(&self) -> Vec<f64> {
        match self {
            ConstantSet::Empty => vec![],
            ConstantSet::ZeroOnly => vec![0.0],
            ConstantSet::FiniteSet(v) | ConstantSet::SupersetOfFinite(v) => v.clone(),
            other => other.infimum().into_iter().collect(),
        }
    }

    /// The set for `λA`, given this set for `A`.
    pub fn scaled(&self, s: f64) -> Self {
        let s = s.abs();
        let sc = |v: &Vec<f64>| v.iter().map(|x| x * s).collect();
        match self {
            ConstantSet::Empty => ConstantSet::Empty,
            ConstantSet::ZeroOnly => ConstantSet::ZeroOnly,
            ConstantSet::OpenHalfLine(lo) => ConstantSet::OpenHalfLine(lo * s),
            ConstantSet::ClosedHalfLine(lo) => ConstantSet::ClosedHalfLine(lo * s),
            ConstantSet::FiniteSet(v) => ConstantSet::FiniteSet(sc(v)),
            ConstantSet::SupersetOfOpenHalfLine(lo) => ConstantSet::SupersetOfOpenHalfLine(lo * s),
            ConstantSet::SupersetOfClosedHalfLine(lo) => ConstantSet::SupersetOfClosedHalfLine(lo * s),
            ConstantSet::SupersetOfFinite(v) => ConstantSet::SupersetOfFinite(sc(v)),
            ConstantSet::Unknown { lower_bound } => ConstantSet::Unknown { lower_bound: lower_bound * s },
        }
    }

    /// A few constants known to lie in the set (empty when none are known).
    pub fn samples(&self) -> Vec<f64> {
        match self {
            ConstantSet::Empty | ConstantSet::Unknown { .. } => vec![],
            ConstantSet::ZeroOnly => vec![0.0],
            ConstantSet::OpenHalfLine(lo) | ConstantSet::SupersetOfOpenHalfLine(lo) => {
                if *lo == 0.0 {
                    vec![1e-3, 1.0, 1e3]
                } else {
                    vec![lo * (1.0 + 1e-6), lo * 1.5, lo * 10.0]
                }
            }
            ConstantSet::ClosedHalfLine(lo) | ConstantSet::SupersetOfClosedHalfLine(lo) => {
                vec![*lo, lo * 1.5, lo * 10.0]
            }
            ConstantSet::FiniteSet(v) | ConstantSet::SupersetOfFinite(v) => v.clone(),
        }
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

impl fmt::Display for ConstantSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &Vec<f64>| v.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(", ");
        match self {
            ConstantSet::Empty => write!(f, "∅"),
            ConstantSet::ZeroOnly => write!(f, "{{0}}"),
            ConstantSet::OpenHalfLine(lo) => write!(f, "({}, ∞)", fmt_num(*lo)),
            ConstantSet::ClosedHalfLine(lo) => write!(f, "[{}, ∞)", fmt_num(*lo)),
            ConstantSet::FiniteSet(v) => write!(f, "{{{}}}", list(v)),
            ConstantSet::SupersetOfOpenHalfLine(lo) => write!(f, "⊇ ({}, ∞)", fmt_num(*lo)),
            ConstantSet::SupersetOfClosedHalfLine(lo) => write!(f, "⊇ [{}, ∞)", fmt_num(*lo)),
            ConstantSet::SupersetOfFinite(v) => write!(f, "⊇ {{{}}}", list(v)),
            ConstantSet::Unknown { lower_bound } => write!(f, "unknown, every constant ≥ {}", fmt_num(*lower_bound)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bounds {
    pub trace: f64,
    pub hadamard: f64,
}

impl Bounds {
    pub fn of(a: &ComplexMatrix) -> Result<Self> {
        Ok(Self { trace: trace_lower_bound(a)?, hadamard: hadamard_lower_bound(a)? })
    }

    pub fn max(&self) -> f64 {
        self.trace.max(self.hadamard)
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub verdict: Verdict,
    pub constants: ConstantSet,
    pub theorem_tag: String,
    pub certificate: Option<ApportionCertificate>,
    pub approximate_eigen: bool,
    pub bounds: Bounds,
    /// Jordan structure the verdict was derived from (canonical order).
    pub spec: Option<JordanSpec>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership() {
        let c = ConstantSet::ClosedHalfLine(0.5);
        assert_eq!(c.contains(0.5), Membership::Yes);
        assert_eq!(c.contains(0.5 - 1e-9), Membership::No);
        let o = ConstantSet::OpenHalfLine(0.0);
        assert_eq!(o.contains(0.0), Membership::No);
        assert_eq!(o.contains(1e-9), Membership::Yes);
        let s = ConstantSet::SupersetOfOpenHalfLine(1.0);
        assert_eq!(s.contains(1.0), Membership::Unknown);
        assert_eq!(s.contains(1.0 + 1e-6), Membership::Yes);
        let f = ConstantSet::finite(vec![2.0, 1.0]);
        assert_eq!(f, ConstantSet::FiniteSet(vec![1.0, 2.0]));
        assert_eq!(f.contains(2.0 * (1.0 + 1e-12)), Membership::Yes);
        assert_eq!(f.contains(1.5), Membership::No);
        let u = ConstantSet::Unknown { lower_bound: 0.7 };
        assert_eq!(u.contains(0.5), Membership::No);
        assert_eq!(u.contains(0.8), Membership::Unknown);
        assert_eq!(ConstantSet::ZeroOnly.contains(0.0), Membership::Yes);
        assert_eq!(ConstantSet::Empty.contains(1.0), Membership::No);
    }

    #[test]
    fn display_forms() {
        assert_eq!(ConstantSet::OpenHalfLine(0.0).to_string(), "(0, ∞)");
        assert_eq!(ConstantSet::ClosedHalfLine(1.0).to_string(), "[1, ∞)");
        assert_eq!(ConstantSet::Empty.to_string(), "∅");
    }
}
