use rmspace::exponent::{Finite, Infinity};
use rmspace::theorem::{
    boundary_points, compactness_predicate, compactness_witness_scan, delta_exponent_fit, delta_exponent_fit_cached,
    exponent_grid, fejer_riesz_ratio, inclusion_witness_scan, noncompactness_witness, nontangential_decay_check,
    region_a_contains, scan_config, DeltaFamily, ExponentFit, Functional, NormCache, WitnessConclusion,
};
use rmspace::{AnalyticFunction, Complex64, ExponentPair, QuadratureConfig};

fn scan_cache() -> NormCache {
    NormCache::new(scan_config())
}

#[test]
fn region_examples() {
    let r = region_a_contains(Finite(3.0), Finite(2.0), Finite(3.0), Finite(2.0));
    assert!(r.contained && r.inclusion_holds());
    let r = region_a_contains(Finite(2.0), Finite(2.0), Finite(1.0), Infinity);
    assert!(r.contained && r.excluded_point && !r.inclusion_holds());
    let r = region_a_contains(Infinity, Finite(2.0), Finite(2.0), Infinity);
    assert!(r.contained && !r.excluded_point);
}

#[test]
fn excluded_point_only_at_beta_infinity() {
    let g = exponent_grid();
    for &p0 in &g {
        for &q0 in &g {
            for &p in &g {
                for &q in &g {
                    if region_a_contains(p0, q0, p, q).excluded_point {
                        assert!(!p0.is_infinite() && !q0.is_infinite() && q.is_infinite());
                        assert!((p.reciprocal() - p0.reciprocal() - q0.reciprocal()).abs() < 1e-12);
                    }
                }
            }
        }
    }
}

#[test]
fn compactness_examples() {
    assert!(compactness_predicate(Finite(4.0), Finite(4.0), Finite(2.0), Finite(2.0)));
    assert!(!compactness_predicate(Finite(2.0), Finite(2.0), Finite(2.0), Finite(1.0)));
    assert!(!compactness_predicate(Finite(4.0), Finite(4.0), Finite(2.0), Infinity));
}

#[test]
fn inclusion_witness_examples() {
    let cache = scan_cache();
    let v = inclusion_witness_scan(Finite(2.0), Finite(2.0), Finite(4.0), Finite(4.0), &cache).unwrap();
    assert!(!v.included && v.agrees());
    assert!(v.witness_report.iter().any(|w| w.name == "monomial" && w.conclusion == WitnessConclusion::Unbounded));

    let v = inclusion_witness_scan(Finite(2.0), Finite(2.0), Finite(1.0), Infinity, &cache).unwrap();
    assert!(v.excluded_point && v.agrees());
    let w = v.witness_report.iter().find(|w| w.name.starts_with("cesaro")).unwrap();
    assert_eq!(w.conclusion, WitnessConclusion::Unbounded);
    assert!(w.trace.windows(2).all(|p| p[1].1 >= p[0].1));

    let v = inclusion_witness_scan(Finite(2.0), Finite(2.0), Finite(2.0), Finite(4.0), &cache).unwrap();
    assert!(v.agrees());
    let w = v.witness_report.iter().find(|w| w.name.starts_with("power")).unwrap();
    assert_eq!(w.conclusion, WitnessConclusion::Separates);

    let v = inclusion_witness_scan(Finite(4.0), Finite(4.0), Finite(2.0), Finite(2.0), &cache).unwrap();
    assert!(v.included && v.agrees());
}

#[test]
fn compactness_witness_examples() {
    let cache = scan_cache();
    let v = compactness_witness_scan(Finite(4.0), Finite(4.0), Finite(2.0), Finite(2.0), &cache).unwrap();
    assert!(v.compact && v.agrees());
    let v = compactness_witness_scan(Finite(2.0), Finite(2.0), Finite(2.0), Finite(1.0), &cache).unwrap();
    assert!(!v.compact && v.agrees());
    assert!(v.witness_report.iter().any(|w| w.conclusion == WitnessConclusion::Persists));
}

#[test]
fn normalized_monomials_are_not_compact() {
    let cfg = QuadratureConfig::default();
    let rep = noncompactness_witness(2.0, Finite(2.0), Finite(1.0), &[1, 4, 16, 64], &cfg).unwrap();
    assert!(rep.unit_norms && rep.decays_on_compacta, "{rep:?}");
    assert!((rep.rows[0].1 - 1.0).abs() < 1e-9);
    assert!(noncompactness_witness(f64::INFINITY, Finite(2.0), Finite(1.0), &[1], &cfg).is_err());
}

#[test]
fn bounded_functions_have_flat_point_exponent() {
    let pq = ExponentPair::new(Infinity, Infinity);
    let fit = delta_exponent_fit(
        pq,
        Functional::PointEval,
        &boundary_points(3..=8),
        &DeltaFamily::Standard,
        &QuadratureConfig::default().with_tol(1e-4),
    )
    .unwrap();
    assert!(fit.slope.abs() < 1e-6, "{}", fit.slope);
}

#[test]
fn exponent_fit_is_rotation_invariant() {
    let cache = scan_cache();
    let zs = boundary_points(3..=8);
    let pq = ExponentPair::finite(2.0, 2.0).unwrap();
    let base = delta_exponent_fit_cached(pq, Functional::PointEval, &zs, &DeltaFamily::Standard, &cache).unwrap();
    for phi in [0.7, 2.5, -1.9] {
        let rot = delta_exponent_fit_cached(pq, Functional::PointEval, &zs, &DeltaFamily::Rotated(phi), &cache).unwrap();
        assert!((rot.slope - base.slope).abs() <= 0.02, "{phi}: {} vs {}", rot.slope, base.slope);
    }
}

#[test]
fn exponent_fit_needs_four_points() {
    assert!(ExponentFit::from_points(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]).is_err());
    let fit = ExponentFit::from_points(vec![(0.0, 1.0), (1.0, 3.0), (2.0, 5.0), (3.0, 7.0)]).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12 && fit.residual < 1e-12);
}

#[test]
fn nontangential_decay() {
    let rs: Vec<f64> = (1..=30).map(|k| 1.0 - 0.5f64.powi(k)).collect();
    let p = 2.0;
    let poly = AnalyticFunction::taylor(vec![Complex64::new(1.0, 0.0), Complex64::new(-0.5, 2.0)]);
    assert!(nontangential_decay_check(&poly, p, &rs).unwrap().tends_to_zero());
    let inside = AnalyticFunction::power_singularity(0.8 / p);
    assert!(nontangential_decay_check(&inside, p, &rs).unwrap().tends_to_zero());
    let edge = AnalyticFunction::power_singularity(1.0 / p);
    assert!(!nontangential_decay_check(&edge, p, &rs).unwrap().tends_to_zero());
}

#[test]
fn fejer_riesz_examples() {
    let cfg = QuadratureConfig::default();
    let thetas: Vec<f64> = (0..24).map(|j| j as f64 * 0.2618).collect();
    let one = AnalyticFunction::constant(Complex64::new(1.0, 0.0));
    assert!((fejer_riesz_ratio(&one, 2.0, &thetas, &cfg).unwrap() - 1.0).abs() < 1e-9);
    for n in [1u32, 5, 20] {
        let s = 3.0;
        let r = fejer_riesz_ratio(&AnalyticFunction::monomial(n), s, &thetas, &cfg).unwrap();
        assert!((r - (1.0 + n as f64 * s).powf(-1.0 / s)).abs() < 1e-6, "{n}: {r}");
    }
    let poly = AnalyticFunction::taylor((0..=10).map(|k| Complex64::new((k as f64).cos(), 0.3)).collect());
    let a = fejer_riesz_ratio(&poly, 2.0, &thetas, &cfg).unwrap();
    let b = fejer_riesz_ratio(&poly, 2.0, &thetas, &cfg.clone().with_theta_count(128)).unwrap();
    assert!(a.is_finite() && (a - b).abs() <= 1e-3 * a);
}
