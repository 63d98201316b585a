use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::region::{compactness_predicate, region_a_contains};
use crate::error::Result;
use crate::exponent::{ExponentPair, ExtendedExponent};
use crate::function::AnalyticFunction;
use crate::mixed_norm::{rm_norm, NormEstimate, QuadratureConfig};

/// The quadrature settings the scan verdict rules are calibrated for.
pub fn scan_config() -> QuadratureConfig {
    QuadratureConfig::default().with_tol(1e-3).with_refine_max(16).with_theta_count(16)
}

/// Memoized norm estimates shared by the scans.
pub struct NormCache {
    cfg: QuadratureConfig,
    map: Mutex<HashMap<(String, String), NormEstimate>>,
}

impl NormCache {
    pub fn new(cfg: QuadratureConfig) -> Self {
        NormCache { cfg, map: Mutex::new(HashMap::new()) }
    }

    pub fn config(&self) -> &QuadratureConfig {
        &self.cfg
    }

    pub fn norm(&self, f: &AnalyticFunction, pq: ExponentPair) -> Result<NormEstimate> {
        let key = (f.to_json(), pq.to_string());
        if let Some(e) = self.map.lock().unwrap().get(&key) {
            return Ok(e.clone());
        }
        let e = rm_norm(f, pq, &self.cfg)?;
        self.map.lock().unwrap().insert(key, e.clone());
        Ok(e)
    }

    pub fn len(&self) -> usize {
        self.map.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessConclusion {
    /// The norm ratio stays bounded over the budget.
    Bounded,
    /// The norm ratio grows without bound over the budget.
    Unbounded,
    /// Finite in the source norm, divergent in the target norm.
    Separates,
    /// Finite in both norms.
    Contained,
    /// Ratios of normalized sequences tend to zero.
    Decays,
    /// Ratios of normalized sequences stay away from zero.
    Persists,
    Inconclusive,
}

impl WitnessConclusion {
    /// Evidence that the target space does not contain the source.
    pub fn refutes_inclusion(self) -> bool {
        matches!(self, WitnessConclusion::Unbounded | WitnessConclusion::Separates)
    }

    pub fn supports_inclusion(self) -> bool {
        matches!(self, WitnessConclusion::Bounded | WitnessConclusion::Contained)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub name: String,
    /// `(family parameter, target norm / source norm)`.
    pub trace: Vec<(f64, f64)>,
    pub conclusion: WitnessConclusion,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionVerdict {
    /// The verdict of the inclusion theorem.
    pub included: bool,
    pub excluded_point: bool,
    /// What the witnesses show: `Some(true)` when every check supports the
    /// inclusion, `Some(false)` when a witness refutes it, `None` otherwise.
    pub witness_included: Option<bool>,
    pub witness_report: Vec<WitnessReport>,
}

impl InclusionVerdict {
    pub fn decided(&self) -> bool {
        self.witness_included.is_some()
    }

    pub fn agrees(&self) -> bool {
        self.witness_included == Some(self.included)
    }
}

/// `n = 0, 1, 4, 16, …, 4^{k-1}`.
pub fn power_of_four_budget(k: u32) -> Vec<u64> {
    std::iter::once(0).chain((0..k).map(|j| 4u64.pow(j))).collect()
}

/// Monomial degrees for the inclusion scan.
pub const MONOMIAL_BUDGET: u32 = 7;
/// Degrees of `f_{n,β}` for the excluded-point witness.
pub const CESARO_BUDGET: u32 = 11;
/// Degrees of `f_{n,β}` when checking boundedness in included cells.
pub const CESARO_BOUNDED_BUDGET: u32 = 7;

/// Last three ratios each at least twice the first, and the sequence
/// monotone increasing.
pub fn is_unbounded(trace: &[(f64, f64)]) -> bool {
    if trace.len() < 4 {
        return false;
    }
    let first = trace[0].1;
    let monotone = trace.windows(2).all(|w| w[1].1 >= w[0].1);
    monotone && trace[trace.len() - 3..].iter().all(|t| t.1 >= 2.0 * first)
}

/// No appreciable growth over the last two budget steps.
pub fn is_bounded(trace: &[(f64, f64)]) -> bool {
    if trace.len() < 3 {
        return false;
    }
    let n = trace.len();
    trace[n - 1].1 <= 1.1 * trace[n - 3].1
}

fn ratio_conclusion(trace: &[(f64, f64)], complete: bool) -> WitnessConclusion {
    if !complete {
        WitnessConclusion::Inconclusive
    } else if is_unbounded(trace) {
        WitnessConclusion::Unbounded
    } else if is_bounded(trace) {
        WitnessConclusion::Bounded
    } else {
        WitnessConclusion::Inconclusive
    }
}

/// Ratio trace of `target / source` norms over a family; `complete` is
/// false when any norm failed to converge.
fn ratio_trace(
    cache: &NormCache,
    family: impl Iterator<Item = (f64, AnalyticFunction)>,
    source: ExponentPair,
    target: ExponentPair,
) -> Result<(Vec<(f64, f64)>, bool)> {
    let mut trace = Vec::new();
    let mut complete = true;
    for (t, f) in family {
        let a = cache.norm(&f, target)?;
        let b = cache.norm(&f, source)?;
        match (a.finite(), b.finite()) {
            (Some(a), Some(b)) if b > 0.0 => trace.push((t, a / b)),
            _ => complete = false,
        }
    }
    Ok((trace, complete))
}

fn monomial_family(k: u32) -> impl Iterator<Item = (f64, AnalyticFunction)> {
    power_of_four_budget(k).into_iter().map(|n| (n as f64, AnalyticFunction::monomial(n as u32)))
}

fn cesaro_family(k: u32, beta: f64) -> Result<Vec<(f64, AnalyticFunction)>> {
    power_of_four_budget(k)
        .into_iter()
        .map(|n| Ok((n as f64, AnalyticFunction::cesaro_power(n, beta)?)))
        .collect()
}

fn monomial_report(cache: &NormCache, source: ExponentPair, target: ExponentPair) -> Result<WitnessReport> {
    let (trace, complete) = ratio_trace(cache, monomial_family(MONOMIAL_BUDGET), source, target)?;
    Ok(WitnessReport { name: "monomial".into(), conclusion: ratio_conclusion(&trace, complete), trace })
}

fn cesaro_report(
    cache: &NormCache,
    source: ExponentPair,
    target: ExponentPair,
    beta: f64,
    k: u32,
) -> Result<WitnessReport> {
    let fam = cesaro_family(k, beta)?;
    let (trace, complete) = ratio_trace(cache, fam.into_iter(), source, target)?;
    Ok(WitnessReport {
        name: format!("cesaro-power beta={beta:.6}"),
        conclusion: ratio_conclusion(&trace, complete),
        trace,
    })
}

fn power_report(
    cache: &NormCache,
    source: ExponentPair,
    target: ExponentPair,
    alpha: f64,
) -> Result<WitnessReport> {
    let f = AnalyticFunction::power_singularity(alpha);
    let a = cache.norm(&f, target)?;
    let b = cache.norm(&f, source)?;
    let conclusion = match (b.finite(), a.finite(), a.diverged()) {
        (Some(_), Some(_), _) => WitnessConclusion::Contained,
        (Some(_), None, true) => WitnessConclusion::Separates,
        _ => WitnessConclusion::Inconclusive,
    };
    let trace = match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => vec![(alpha, x / y)],
        (None, Some(y)) => vec![(alpha, a.last() / y)],
        _ => vec![],
    };
    Ok(WitnessReport { name: format!("power-singularity alpha={alpha:.6}"), trace, conclusion })
}

/// Numerical evidence for or against `RM(p₀, q₀) ⊂ RM(p, q)`.
///
/// Outside the region the matching witness is run: monomials when
/// `p > p₀`, `f_α` with `α` midway between the reciprocal sums when
/// `1/p + 1/q < 1/p₀ + 1/q₀`, and `f_{n,β}` at the excluded point. Inside,
/// all three families must show bounded ratios or finite norms.
pub fn inclusion_witness_scan(
    p0: ExtendedExponent,
    q0: ExtendedExponent,
    p: ExtendedExponent,
    q: ExtendedExponent,
    cache: &NormCache,
) -> Result<InclusionVerdict> {
    let region = region_a_contains(p0, q0, p, q);
    let source = ExponentPair::new(p0, q0);
    let target = ExponentPair::new(p, q);
    let s0 = source.reciprocal_sum();
    let s = target.reciprocal_sum();
    let mut reports = Vec::new();

    let witness_included = if region.inclusion_holds() {
        reports.push(monomial_report(cache, source, target)?);
        if s0 > 0.0 {
            reports.push(power_report(cache, source, target, 0.5 * s0)?);
            reports.push(cesaro_report(cache, source, target, 1.0 / s0, CESARO_BOUNDED_BUDGET)?);
        }
        if reports.iter().all(|r| r.conclusion.supports_inclusion()) {
            Some(true)
        } else if reports.iter().any(|r| r.conclusion.refutes_inclusion()) {
            Some(false)
        } else {
            None
        }
    } else {
        if p.reciprocal() < p0.reciprocal() {
            reports.push(monomial_report(cache, source, target)?);
        }
        if s < s0 {
            reports.push(power_report(cache, source, target, 0.5 * (s + s0))?);
        }
        if region.excluded_point {
            reports.push(cesaro_report(cache, source, target, 1.0 / s0, CESARO_BUDGET)?);
        }
        if reports.iter().any(|r| r.conclusion.refutes_inclusion()) {
            Some(false)
        } else if reports.iter().all(|r| r.conclusion.supports_inclusion()) {
            Some(true)
        } else {
            None
        }
    };

    Ok(InclusionVerdict {
        included: region.inclusion_holds(),
        excluded_point: region.excluded_point,
        witness_included,
        witness_report: reports,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactnessVerdict {
    pub compact: bool,
    /// `Some(true)` when both normalized families decay in the target norm,
    /// `Some(false)` when one of them persists.
    pub witness_compact: Option<bool>,
    pub witness_report: Vec<WitnessReport>,
}

impl CompactnessVerdict {
    pub fn decided(&self) -> bool {
        self.witness_compact.is_some()
    }

    pub fn agrees(&self) -> bool {
        self.witness_compact == Some(self.compact)
    }
}

/// Kernel parameters `w = 1 - 2^{-k}` for the compactness scan.
pub fn kernel_parameters() -> Vec<f64> {
    (2..=14).map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

fn decay_conclusion(trace: &[(f64, f64)], complete: bool) -> WitnessConclusion {
    let n = trace.len();
    if !complete || n < 4 {
        return WitnessConclusion::Inconclusive;
    }
    let first = trace[0].1;
    let tail = &trace[n - 3..];
    if tail.windows(2).all(|w| w[1].1 <= w[0].1) && tail[2].1 <= 0.25 * first {
        WitnessConclusion::Decays
    } else if tail.iter().all(|t| t.1 >= 0.5 * first) {
        WitnessConclusion::Persists
    } else {
        WitnessConclusion::Inconclusive
    }
}

/// Numerical evidence for compactness of `RM(p₀, q₀) ⊂ RM(p, q)`: the
/// sequences `z^n` and `(1 - wz)^{-3}`, `w → 1`, normalized in the source,
/// tend to zero on compacta; the inclusion is compact iff both tend to
/// zero in the target norm.
pub fn compactness_witness_scan(
    p0: ExtendedExponent,
    q0: ExtendedExponent,
    p: ExtendedExponent,
    q: ExtendedExponent,
    cache: &NormCache,
) -> Result<CompactnessVerdict> {
    let source = ExponentPair::new(p0, q0);
    let target = ExponentPair::new(p, q);
    let (mt, mc) = ratio_trace(cache, monomial_family(MONOMIAL_BUDGET), source, target)?;
    let kernels = kernel_parameters().into_iter().map(|w| {
        let f = AnalyticFunction::Scaled { inner: Box::new(AnalyticFunction::power_singularity(3.0)), r: w };
        (w, f)
    });
    let (kt, kc) = ratio_trace(cache, kernels, source, target)?;
    let reports = vec![
        WitnessReport { name: "monomial".into(), conclusion: decay_conclusion(&mt, mc), trace: mt },
        WitnessReport { name: "kernel".into(), conclusion: decay_conclusion(&kt, kc), trace: kt },
    ];
    let witness_compact = if reports.iter().all(|r| r.conclusion == WitnessConclusion::Decays) {
        Some(true)
    } else if reports.iter().any(|r| r.conclusion == WitnessConclusion::Persists) {
        Some(false)
    } else {
        None
    };
    Ok(CompactnessVerdict {
        compact: compactness_predicate(p0, q0, p, q),
        witness_compact,
        witness_report: reports,
    })
}

/// One row of a grid scan.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub p0: ExtendedExponent,
    pub q0: ExtendedExponent,
    pub p: ExtendedExponent,
    pub q: ExtendedExponent,
    pub predicted: bool,
    /// `None` for an inconclusive witness.
    pub witness: Option<bool>,
}

impl ScanRow {
    pub fn agreement(&self) -> bool {
        self.witness == Some(self.predicted)
    }
}

fn grid_cells(grid: &[ExtendedExponent]) -> Vec<[ExtendedExponent; 4]> {
    let mut cells = Vec::new();
    for &p0 in grid {
        for &q0 in grid {
            for &p in grid {
                for &q in grid {
                    cells.push([p0, q0, p, q]);
                }
            }
        }
    }
    cells
}

/// Inclusion scan over all `|grid|⁴` cells, in canonical order.
pub fn inclusion_grid_scan(grid: &[ExtendedExponent], cache: &NormCache) -> Result<Vec<(ScanRow, InclusionVerdict)>> {
    grid_cells(grid)
        .into_iter()
        .map(|[p0, q0, p, q]| {
            let v = inclusion_witness_scan(p0, q0, p, q, cache)?;
            Ok((ScanRow { p0, q0, p, q, predicted: v.included, witness: v.witness_included }, v))
        })
        .collect()
}

/// Compactness scan over all `|grid|⁴` cells, in canonical order.
pub fn compactness_grid_scan(
    grid: &[ExtendedExponent],
    cache: &NormCache,
) -> Result<Vec<(ScanRow, CompactnessVerdict)>> {
    grid_cells(grid)
        .into_iter()
        .map(|[p0, q0, p, q]| {
            let v = compactness_witness_scan(p0, q0, p, q, cache)?;
            Ok((ScanRow { p0, q0, p, q, predicted: v.compact, witness: v.witness_compact }, v))
        })
        .collect()
}

/// `max_{|z| ≤ radius} |f(z)|` sampled on the circle `|z| = radius`.
pub(crate) fn max_on_circle(f: &AnalyticFunction, radius: f64, samples: usize) -> Result<f64> {
    let mut m = 0.0f64;
    for j in 0..samples {
        let z = Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * j as f64 / samples as f64);
        m = m.max(f.evaluate(z)?.norm());
    }
    Ok(m)
}
