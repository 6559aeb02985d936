use apportion::classify::classify_spec;
use apportion::constructors::{two_by_two_constants, two_by_two_plan};
use apportion::jordan::{build_jordan, complete_inverse_pair, eigenstructure_small, JordanSpec};
use apportion::matrix::{cis, ComplexMatrix, C64, ONE, ZERO};
use apportion::report::{ConstantSet, Verdict};
use apportion::search::{find_apportioning, SearchConfig};
use apportion::uniform::{is_uniform, similarity_image, Tolerance};
use proptest::prelude::*;

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn matrix(n: usize, r: f64) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(r), n * n).prop_map(move |v| ComplexMatrix::new(n, n, v).unwrap())
}

fn near_identity(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n, 0.4).prop_map(move |e| &ComplexMatrix::identity(n) + &e)
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn same_set(a: &ConstantSet, b: &ConstantSet) -> bool {
    let va = a.values();
    let vb = b.values();
    a.kind() == b.kind() && va.len() == vb.len() && va.iter().zip(&vb).all(|(x, y)| rel_close(*x, *y, 1e-9))
}

// Jordan specs of order ≤ 3 over a palette of well separated eigenvalues
fn small_spec() -> impl Strategy<Value = JordanSpec> {
    let palette = [ZERO, ONE, C64::new(-2.0, 0.0), C64::new(1.0, 2.0), C64::new(0.0, -1.5)];
    let shapes: Vec<Vec<usize>> = vec![vec![1], vec![2], vec![1, 1], vec![3], vec![2, 1], vec![1, 1, 1]];
    (prop::sample::select(shapes), prop::collection::vec(0..palette.len(), 3)).prop_map(move |(shape, picks)| {
        let pairs: Vec<(C64, usize)> = shape.iter().zip(&picks).map(|(&k, &i)| (palette[i], k)).collect();
        JordanSpec::from_pairs(&pairs).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn uniformity_is_phase_invariant(
        n in 1usize..6,
        r in 0.1f64..10.0,
        seed in prop::collection::vec(-10.0f64..10.0, 48),
    ) {
        let b = ComplexMatrix::from_fn(n, n, |i, j| cis(seed[i * n + j]).scale(r));
        let d1 = ComplexMatrix::diag(&(0..n).map(|i| cis(seed[25 + i])).collect::<Vec<_>>());
        let d2 = ComplexMatrix::diag(&(0..n).map(|i| cis(seed[31 + i])).collect::<Vec<_>>());
        let tol = Tolerance::default();
        let base = is_uniform(&b, tol).unwrap();
        let moved = is_uniform(&(&(&d1 * &b) * &d2), tol).unwrap();
        prop_assert!(base.is_uniform && moved.is_uniform);
        prop_assert!(rel_close(base.kappa, moved.kappa, 1e-13));
        prop_assert!(rel_close(base.kappa, r, 1e-13));
    }

    #[test]
    fn similarity_composes(a in matrix(3, 2.0), m1 in near_identity(3), m2 in near_identity(3)) {
        let direct = similarity_image(&(&m2 * &m1), &a).unwrap();
        let stepwise = similarity_image(&m2, &similarity_image(&m1, &a).unwrap()).unwrap();
        prop_assert!(direct.max_abs_diff(&stepwise) <= 1e-10 * direct.max_abs().max(1.0));
    }

    #[test]
    fn complex_three_point_identity(z1 in complex(1e3), z2 in complex(1e3), z3 in complex(1e3)) {
        let lhs = ((z1 - z2).norm_sqr() - (z3 - z2).norm_sqr()) / 2.0;
        let rhs = (z1.norm_sqr() - z3.norm_sqr()) / 2.0 - (z1 * z2.conj()).re + (z3 * z2.conj()).re;
        let scale = z1.norm_sqr() + z2.norm_sqr() + z3.norm_sqr();
        prop_assert!((lhs - rhs).abs() <= 8.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn inverse_pair_blocks(n in 2usize..7, m_frac in 0.0f64..1.0, u in matrix(6, 1.0)) {
        let m = 1 + ((n - 1) as f64 * m_frac) as usize % (n - 1);
        let u = ComplexMatrix::from_fn(n, m, |i, j| u[(i, j)] + if i == j { ONE * 2.0 } else { ZERO });
        let uh = u.adjoint();
        let v = &(&uh * &u).lu().unwrap().inverse().unwrap() * &uh;
        let pair = complete_inverse_pair(&u, &v).unwrap();
        let id = ComplexMatrix::identity(n);
        prop_assert!((&pair.m * &pair.m_inv).max_abs_diff(&id) < 1e-10);
        prop_assert!(pair.m.block(0, 0, n, m).max_abs_diff(&u) == 0.0);
        prop_assert!(pair.m_inv.block(0, 0, m, n).max_abs_diff(&v) == 0.0);
        let up = pair.m.block(0, m, n, n - m);
        let vp = pair.m_inv.block(m, 0, n - m, n);
        prop_assert!((&vp * &u).max_abs() < 1e-10);
        prop_assert!((&vp * &up).max_abs_diff(&ComplexMatrix::identity(n - m)) < 1e-10);
        prop_assert!((&v * &up).max_abs() < 1e-10);
        prop_assert!((&up.adjoint() * &up).max_abs_diff(&ComplexMatrix::identity(n - m)) < 1e-12);
    }

    #[test]
    fn eigenstructure_round_trip(spec in small_spec(), m in near_identity(3)) {
        let n = spec.order();
        let m = m.block(0, 0, n, n);
        let a = similarity_image(&m, &build_jordan(&spec)).unwrap();
        let got = eigenstructure_small(&a).unwrap().spec;
        let want = spec.canonical();
        prop_assert_eq!(got.blocks().len(), want.blocks().len());
        for (g, w) in got.blocks().iter().zip(want.blocks()) {
            prop_assert_eq!(g.size, w.size);
            prop_assert!((g.lambda - w.lambda).norm() < 1e-5, "{:?} vs {:?}", got, want);
        }
    }

    #[test]
    fn two_by_two_plan_identities(l1 in complex(3.0), l2 in complex(3.0)) {
        prop_assume!(l1.norm() > 1e-3 && l2.norm() > 1e-3 && (l1 - l2).norm() > 1e-3);
        let (verdict, _) = two_by_two_constants(l1, l2).unwrap();
        prop_assume!(verdict == Verdict::Apportionable);
        let p = two_by_two_plan(l1, l2, None).unwrap();
        let scale = p.a.norm() * p.d.norm() + p.b.norm() * p.c.norm();
        prop_assert!((p.a * p.d - p.b * p.c - ONE).norm() < 1e-10 * scale.max(1.0));
        prop_assert!((p.omega - (p.b * p.c * 2.0 + ONE)).norm() < 1e-10 * scale.max(1.0));
        prop_assert!(((p.gamma - p.omega).norm() - (p.gamma + p.omega).norm()).abs() < 1e-9 * (p.gamma.norm() + p.omega.norm()).max(1.0));
    }

    #[test]
    fn classifier_scales_with_the_matrix(spec in small_spec(), c in complex(4.0)) {
        prop_assume!(c.norm() > 0.05);
        let base = classify_spec(&spec).unwrap();
        let scaled = classify_spec(&spec.scaled(c)).unwrap();
        prop_assert_eq!(base.verdict, scaled.verdict);
        prop_assert!(same_set(&base.constants.scaled(c.norm()), &scaled.constants), "{} vs {}", base.constants, scaled.constants);
        if let Some(cert) = &scaled.certificate {
            prop_assert!(cert.kappa >= scaled.bounds.max() - 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn search_is_deterministic(a in matrix(2, 2.0), seed in 0u64..1000) {
        let cfg = SearchConfig { seed, restarts: 4, max_iters: 300, ..SearchConfig::default() };
        let x = find_apportioning(&a, &cfg).unwrap();
        let y = find_apportioning(&a, &cfg).unwrap();
        prop_assert_eq!(x, y);
    }
}
