use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::scan::{max_on_circle, NormCache};
use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, ExtendedExponent};
use crate::function::AnalyticFunction;
use crate::mixed_norm::{least_squares, radial_integral, rm_norm, QuadratureConfig};

/// A least-squares line through `(ln abscissa, ln ordinate)` points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of a point from the line.
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
}

impl ExponentFit {
    pub fn from_points(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::Invariant(format!("exponent fit needs 4 points, got {}", points.len())));
        }
        let (slope, intercept) = least_squares(&points);
        let residual = points
            .iter()
            .map(|(x, y)| (y - slope * x - intercept).abs())
            .fold(0.0, f64::max);
        Ok(ExponentFit { slope, intercept, residual, points })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Functional {
    PointEval,
    DerivativeEval,
}

/// Test functions for the lower estimate of `‖δ_z‖`.
#[derive(Clone, Debug, PartialEq)]
pub enum DeltaFamily {
    /// `f_α` for `α ∈ {0.5, 0.8, 0.95}·s`, the monomials `z^{2^j}`, and the
    /// kernel `(1 - zw)^{-2s}` for each evaluation point, `s = 1/p + 1/q`.
    Standard,
    /// The standard family composed with a rotation by `φ`, evaluated at
    /// the rotated points.
    Rotated(f64),
    /// A fixed list.
    Custom(Vec<AnalyticFunction>),
}

fn standard_members(s: f64) -> Vec<AnalyticFunction> {
    let mut v: Vec<AnalyticFunction> = (0..=8).map(|j| AnalyticFunction::monomial(1 << j)).collect();
    v.push(AnalyticFunction::monomial(0));
    if s > 0.0 {
        for c in [0.5, 0.8, 0.95] {
            v.push(AnalyticFunction::power_singularity(c * s));
        }
    }
    v
}

fn kernel_member(s: f64, z: f64) -> Option<AnalyticFunction> {
    (s > 0.0).then(|| AnalyticFunction::Scaled {
        inner: Box::new(AnalyticFunction::power_singularity(2.0 * s)),
        r: z,
    })
}

/// Fit of `ln(sup_f |f(z)|/ρ(f))` (or `|f'(z)|`) against `ln(1/(1 - z²))`
/// over `z_list`.
pub fn delta_exponent_fit(
    pq: ExponentPair,
    which: Functional,
    z_list: &[f64],
    family: &DeltaFamily,
    cfg: &QuadratureConfig,
) -> Result<ExponentFit> {
    delta_exponent_fit_cached(pq, which, z_list, family, &NormCache::new(cfg.clone()))
}

pub fn delta_exponent_fit_cached(
    pq: ExponentPair,
    which: Functional,
    z_list: &[f64],
    family: &DeltaFamily,
    cache: &NormCache,
) -> Result<ExponentFit> {
    if z_list.windows(2).any(|w| w[1] <= w[0]) || z_list.iter().any(|z| !(*z > 0.0 && *z < 1.0)) {
        return Err(Error::Invalid("z_list must increase inside (0, 1)".into()));
    }
    let s = pq.reciprocal_sum();
    let (phi, fixed) = match family {
        DeltaFamily::Standard => (0.0, standard_members(s)),
        DeltaFamily::Rotated(phi) => (*phi, standard_members(s)),
        DeltaFamily::Custom(v) => (0.0, v.clone()),
    };
    let rotate = |f: AnalyticFunction| if phi == 0.0 { f } else { f.rotated(phi) };
    let mut points = Vec::new();
    for &z in z_list {
        let mut members: Vec<AnalyticFunction> = fixed.iter().cloned().map(rotate).collect();
        if !matches!(family, DeltaFamily::Custom(_)) {
            members.extend(kernel_member(s, z).map(rotate));
        }
        let at = Complex64::from_polar(z, -phi);
        let mut best = 0.0f64;
        for f in &members {
            let Some(norm) = cache.norm(f, pq)?.finite() else { continue };
            if !(norm > 0.0) {
                continue;
            }
            let v = match which {
                Functional::PointEval => f.evaluate(at)?,
                Functional::DerivativeEval => f.derivative_at(at)?,
            };
            best = best.max(v.norm() / norm);
        }
        if best > 0.0 && best.is_finite() {
            points.push(((1.0 / (1.0 - z * z)).ln(), best.ln()));
        }
    }
    ExponentFit::from_points(points)
}

/// `z = 1 - 2^{-k}` for `k` in the range.
pub fn boundary_points(k: std::ops::RangeInclusive<i32>) -> Vec<f64> {
    k.map(|k| 1.0 - 0.5f64.powi(k)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoncompactnessReport {
    /// `(n, ρ_{p₀,q₀}(f_n), ρ_{p₀,q}(f_n), max_{|z|≤1/2} |f_n|)`.
    pub rows: Vec<(u32, f64, f64, f64)>,
    /// Both norms equal 1 within the tolerance for every `n`.
    pub unit_norms: bool,
    /// The compacta maxima decrease and end below `1e-3`.
    pub decays_on_compacta: bool,
}

/// `f_n = (1 + np₀)^{1/p₀} z^n`: unit norm in both `RM(p₀, q₀)` and
/// `RM(p₀, q)`, tending to zero uniformly on compacta.
pub fn noncompactness_witness(
    p0: f64,
    q0: ExtendedExponent,
    q: ExtendedExponent,
    n_list: &[u32],
    cfg: &QuadratureConfig,
) -> Result<NoncompactnessReport> {
    if !(p0 >= 1.0 && p0.is_finite()) {
        return Err(Error::Invalid(format!("noncompactness witness needs finite p0 >= 1, got {p0}")));
    }
    let p = ExtendedExponent::Finite(p0);
    let tol = 10.0 * cfg.rel_tol;
    let mut rows = Vec::new();
    let mut unit = true;
    for &n in n_list {
        let c = (1.0 + n as f64 * p0).powf(1.0 / p0);
        let f = AnalyticFunction::monomial(n).times(Complex64::new(c, 0.0));
        let a = rm_norm(&f, ExponentPair::new(p, q0), cfg)?.finite().unwrap_or(f64::NAN);
        let b = rm_norm(&f, ExponentPair::new(p, q), cfg)?.finite().unwrap_or(f64::NAN);
        unit &= (a - 1.0).abs() <= tol && (b - 1.0).abs() <= tol;
        rows.push((n, a, b, max_on_circle(&f, 0.5, 64)?));
    }
    let decays = rows.len() >= 2
        && rows.windows(2).all(|w| w[1].0 <= w[0].0 || w[1].3 <= w[0].3)
        && rows.last().is_some_and(|r| r.3 < 1e-3);
    Ok(NoncompactnessReport { rows, unit_norms: unit, decays_on_compacta: decays })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTrace {
    /// `(r, |f(r)| (1 - r)^{1/p})`.
    pub points: Vec<(f64, f64)>,
    /// Strictly decreasing over the second half of the points.
    pub eventually_decreasing: bool,
    /// Last value over the largest value.
    pub last_over_max: f64,
}

impl DecayTrace {
    /// Decreasing in the tail and ending below half the largest value.
    pub fn tends_to_zero(&self) -> bool {
        self.eventually_decreasing && self.last_over_max < 0.5
    }
}

/// `|f(r)| (1 - r)^{1/p}` along the radius toward `σ = 1`.
pub fn nontangential_decay_check(f: &AnalyticFunction, p: f64, r_list: &[f64]) -> Result<DecayTrace> {
    if !(p >= 1.0) {
        return Err(Error::Invalid(format!("decay check needs p >= 1, got {p}")));
    }
    if r_list.len() < 2 || r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("r_list must be increasing with at least two radii".into()));
    }
    let mut points = Vec::with_capacity(r_list.len());
    for &r in r_list {
        let x = 1.0 - r;
        let v = f.evaluate_polar(x, 0.0)?.norm() * x.powf(1.0 / p);
        points.push((r, v));
    }
    let tail = &points[points.len() / 2..];
    let eventually_decreasing = tail.windows(2).all(|w| w[1].1 < w[0].1);
    let max = points.iter().map(|p| p.1).fold(0.0, f64::max);
    let last = points.last().unwrap().1;
    Ok(DecayTrace {
        last_over_max: if max > 0.0 { last / max } else { 0.0 },
        eventually_decreasing,
        points,
    })
}

/// `max_θ (∫_0^1 |f(re^{iθ})|^s dr)^{1/s} / ρ_{∞,s}(f)`.
pub fn fejer_riesz_ratio(f: &AnalyticFunction, s: f64, theta_list: &[f64], cfg: &QuadratureConfig) -> Result<f64> {
    if !(s >= 1.0 && s.is_finite()) {
        return Err(Error::Invalid(format!("Hardy exponent must be finite and >= 1, got {s}")));
    }
    if theta_list.is_empty() {
        return Err(Error::Invalid("theta_list is empty".into()));
    }
    let hardy = rm_norm(f, ExponentPair::new(ExtendedExponent::Infinity, ExtendedExponent::Finite(s)), cfg)?;
    let hardy = hardy
        .finite()
        .ok_or_else(|| Error::Invariant(format!("Hardy norm did not converge: {:?}", hardy.trace)))?;
    let mut best = 0.0f64;
    for &t in theta_list {
        let v = radial_integral(f, t, ExtendedExponent::Finite(s), cfg)?.powf(1.0 / s);
        best = best.max(v);
    }
    Ok(best / hardy)
}
