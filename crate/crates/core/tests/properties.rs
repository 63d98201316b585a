use proptest::prelude::*;

use rmspace::bergman::{bilinear_bound_sides, maximal_r, ray_maximal, RayMesh};
use rmspace::exponent::{Finite, Infinity};
use rmspace::mixed_norm::{rm_norm, weak_lp_norm};
use rmspace::theorem::{compactness_predicate, exponent_grid, inclusion_predicate, region_a_contains};
use rmspace::{AnalyticFunction, Complex64, ExponentPair, ExtendedExponent, LacunaryNode, QuadratureConfig};

const EXPS: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 4.0];

fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), 1..7)
        .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
}

fn poly() -> impl Strategy<Value = AnalyticFunction> {
    coeffs()
        .prop_filter("nonzero", |c| c.iter().any(|z| z.norm() > 1e-3))
        .prop_map(AnalyticFunction::taylor)
}

fn exponent() -> impl Strategy<Value = ExtendedExponent> {
    prop_oneof![4 => (0..5usize).prop_map(|i| Finite(EXPS[i])), 1 => Just(Infinity)]
}

fn function() -> impl Strategy<Value = AnalyticFunction> {
    let leaf = prop_oneof![
        (0..40u32).prop_map(AnalyticFunction::monomial),
        coeffs().prop_map(AnalyticFunction::taylor),
        (0.05..2.5f64).prop_map(AnalyticFunction::power_singularity),
        (0..50u64, 0.3..3.0f64).prop_map(|(n, a)| AnalyticFunction::cesaro_power(n, a).unwrap()),
        prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..6).prop_map(|v| {
            let nodes = v
                .into_iter()
                .enumerate()
                .map(|(k, (a, b))| LacunaryNode { n: 3u64.pow(k as u32), a: Complex64::new(a, b) })
                .collect();
            AnalyticFunction::lacunary(nodes).unwrap()
        }),
        (0.01..0.5f64, 0.05..0.5f64, -3.0..3.0f64)
            .prop_map(|(e, am1, t)| AnalyticFunction::rational_bump_excess(e, am1, t).unwrap()),
    ];
    leaf.prop_recursive(2, 8, 3, |inner| {
        prop_oneof![
            (inner.clone(), 0.1..0.95f64).prop_map(|(f, r)| f.dilate(r).unwrap()),
            (inner.clone(), -3.0..3.0f64).prop_map(|(f, phi)| f.rotated(phi)),
            prop::collection::vec((inner, -2.0..2.0f64), 1..3).prop_map(|v| {
                AnalyticFunction::sum(v.into_iter().map(|(f, w)| (Complex64::new(w, 0.5 * w), f)).collect())
            }),
        ]
    })
}

fn norm(f: &AnalyticFunction, pq: ExponentPair) -> f64 {
    rm_norm(f, pq, &QuadratureConfig::default()).unwrap().expect_value()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn holder_monotone(f in poly(), a in 0..5usize, b in 0..5usize, da in 0..5usize, db in 0..5usize) {
        let tol = QuadratureConfig::default().rel_tol;
        let (a0, b0) = ((a + da).min(4), (b + db).min(4));
        let lo = norm(&f, ExponentPair::finite(EXPS[a], EXPS[b]).unwrap());
        let hi = norm(&f, ExponentPair::finite(EXPS[a0], EXPS[b0]).unwrap());
        prop_assert!(lo <= hi * (1.0 + 2.0 * tol), "{lo} > {hi}");
    }

    #[test]
    fn homogeneous(f in poly(), p in exponent(), q in exponent(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let c = Complex64::new(re, im);
        prop_assume!(c.norm() > 1e-3);
        let pq = ExponentPair::new(p, q);
        let a = norm(&f.clone().times(c), pq);
        let b = c.norm() * norm(&f, pq);
        prop_assert!((a - b).abs() <= 1e-12 * b, "{a} vs {b}");
    }

    #[test]
    fn triangle(f in poly(), g in poly(), p in exponent(), q in exponent()) {
        let tol = QuadratureConfig::default().rel_tol;
        let pq = ExponentPair::new(p, q);
        let s = AnalyticFunction::sum(vec![(1.0.into(), f.clone()), (1.0.into(), g.clone())]);
        let (nf, ng) = (norm(&f, pq), norm(&g, pq));
        prop_assert!(norm(&s, pq) <= (nf + ng) * (1.0 + 2.0 * tol));
    }

    #[test]
    fn rotation_invariant(f in poly(), p in exponent(), q in exponent(), phi in 0.0..std::f64::consts::TAU) {
        let tol = QuadratureConfig::default().rel_tol;
        let pq = ExponentPair::new(p, q);
        let a = norm(&f, pq);
        let b = norm(&f.clone().rotated(phi), pq);
        prop_assert!((a - b).abs() <= tol * a, "{a} vs {b}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn json_round_trip(f in function()) {
        let back = AnalyticFunction::from_json(&f.to_json()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn derivative_matches_central_difference(f in function(), r in 0.0..0.8f64, t in -3.1..3.1f64) {
        let z = Complex64::from_polar(r, t);
        let h = 1e-5;
        let d = f.derivative_at(z).unwrap();
        let fd = (f.evaluate(z + h).unwrap() - f.evaluate(z - h).unwrap()) / (2.0 * h);
        let scale = 1.0 + d.norm() + f.evaluate(z).unwrap().norm();
        prop_assert!((d - fd).norm() <= 1e-6 * scale, "{d} vs {fd}");
    }

    #[test]
    fn taylor_coefficients_do_not_depend_on_radius(f in function()) {
        let a = f.taylor_coefficients(16, 0.5).unwrap();
        let b = f.taylor_coefficients(16, 0.8).unwrap();
        for (x, y) in a.iter().zip(&b) {
            if x.norm() >= 1e-4 {
                prop_assert!((x - y).norm() <= 1e-8, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn r_below_m(s in prop::collection::vec(0.0..10.0f64, 28), x in 0.0..1.0f64) {
        let mesh = RayMesh::dyadic(9, 3);
        let r = maximal_r(&mesh, &s, x).unwrap();
        let m = ray_maximal(&mesh, &s, x).unwrap();
        prop_assert!(r <= m * (1.0 + 1e-12), "{r} > {m}");
    }

    #[test]
    fn r_is_nonincreasing(s in prop::collection::vec(0.0..10.0f64, 28), x in 0.0..1.0f64, y in 0.0..1.0f64) {
        let mesh = RayMesh::dyadic(9, 3);
        let (lo, hi) = (x.min(y), x.max(y));
        prop_assert!(maximal_r(&mesh, &s, hi).unwrap() <= maximal_r(&mesh, &s, lo).unwrap() * (1.0 + 1e-12));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn bilinear_bound(seed in prop::collection::vec(0.0..1.0f64, 16 * 10 * 2)) {
        let mesh = RayMesh::dyadic(4, 2);
        let (n, m) = (16, mesh.len());
        let f: Vec<Vec<f64>> = (0..n).map(|a| seed[a * m..(a + 1) * m].to_vec()).collect();
        let g: Vec<Vec<f64>> = (0..n).map(|a| seed[(n + a) * m..(n + a + 1) * m].to_vec()).collect();
        let (lhs, rhs) = bilinear_bound_sides(&mesh, &f, &g).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }
}

#[test]
fn inclusion_is_transitive_on_the_grid() {
    let g = exponent_grid();
    for &p0 in &g {
        for &q0 in &g {
            for &p1 in &g {
                for &q1 in &g {
                    if !inclusion_predicate(p0, q0, p1, q1) {
                        continue;
                    }
                    for &p2 in &g {
                        for &q2 in &g {
                            let excluded = region_a_contains(p0, q0, p2, q2).excluded_point;
                            if inclusion_predicate(p1, q1, p2, q2) && !excluded {
                                assert!(inclusion_predicate(p0, q0, p2, q2), "({p0},{q0}) ({p1},{q1}) ({p2},{q2})");
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn compact_implies_included() {
    let g = exponent_grid();
    for &p0 in &g {
        for &q0 in &g {
            for &p in &g {
                for &q in &g {
                    if compactness_predicate(p0, q0, p, q) {
                        let r = region_a_contains(p0, q0, p, q);
                        assert!(r.inclusion_holds(), "({p0},{q0}) -> ({p},{q})");
                        let s0 = p0.reciprocal() + q0.reciprocal();
                        assert!(p.reciprocal() + q.reciprocal() > s0);
                    }
                }
            }
        }
    }
}

#[test]
fn monomial_ratios_bounded_by_closed_form() {
    let cfg = QuadratureConfig::default();
    let g = exponent_grid();
    for &p0 in &g {
        for &q0 in &g {
            for &p in &g {
                for &q in &g {
                    let (Some(a0), Some(_), Some(a), Some(_)) = (p0.value(), q0.value(), p.value(), q.value()) else {
                        continue;
                    };
                    if !inclusion_predicate(p0, q0, p, q) {
                        continue;
                    }
                    let closed = |n: f64| (1.0 + n * a).powf(-1.0 / a) / (1.0 + n * a0).powf(-1.0 / a0);
                    let closed_max = (0..=64).map(|n| closed(n as f64)).fold(0.0, f64::max);
                    // ratio at n = 0 is the supremum over n ≥ 0 when p ≤ p0
                    assert!(closed_max <= 1.05 * 1.0);
                    for n in [0u32, 1, 4, 16, 64] {
                        let f = AnalyticFunction::monomial(n);
                        let r = rm_norm(&f, ExponentPair::new(p, q), &cfg).unwrap().expect_value()
                            / rm_norm(&f, ExponentPair::new(p0, q0), &cfg).unwrap().expect_value();
                        assert!(r <= closed_max * (1.0 + 10.0 * cfg.rel_tol), "n={n}: {r} > {closed_max}");
                    }
                }
            }
        }
    }
}

#[test]
fn weak_interpolation_constant_is_mesh_stable() {
    let (p0, p1, lam) = (2.0, 4.0, 0.5);
    let p = 1.0 / ((1.0 - lam) / p0 + lam / p1);
    let constant = |m: usize| {
        let s: Vec<f64> = (0..m).map(|k| (1.0 - (k as f64 + 0.5) / m as f64).powf(-0.2)).collect();
        let lp = (s.iter().map(|v| v.powf(p)).sum::<f64>() / m as f64).powf(1.0 / p);
        let w0 = weak_lp_norm(&s, p0).unwrap();
        let w1 = weak_lp_norm(&s, p1).unwrap();
        lp / (w0.powf(1.0 - lam) * w1.powf(lam))
    };
    for m in [500, 1000, 2000, 4000] {
        let ratio = constant(2 * m) / constant(m);
        assert!((0.5..=2.0).contains(&ratio), "m={m}: {ratio}");
    }
}

#[test]
fn cesaro_power_upper_bound_is_uniform() {
    let cfg = QuadratureConfig::default().with_tol(1e-4);
    for (p, q) in [(2.0, 2.0), (4.0, 4.0), (2.0, 4.0), (4.0, 4.0 / 3.0)] {
        let a = 1.0 / (1.0 / p + 1.0 / q);
        let r: Vec<f64> = [4u64, 16, 64, 256]
            .iter()
            .map(|&n| {
                let f = AnalyticFunction::cesaro_power(n, a).unwrap();
                let v = rm_norm(&f, ExponentPair::finite(p, q).unwrap(), &cfg).unwrap().expect_value();
                v / ((p / (p - a)).powf(1.0 / p) * ((n as f64 + 1.0).ln()).powf(1.0 / q))
            })
            .collect();
        assert!(r.iter().all(|v| *v <= 1.0), "({p},{q}): {r:?}");
        assert!(r[3] <= 1.1 * r[0].max(r[1]), "({p},{q}): {r:?}");
    }
}
