//! The mixed norm `ρ_{p,q}` in all four exponent regimes, with truncated,
//! tail and weak-type variants.
//!
//! Radial integrals use Gauss panels on dyadic cells in `x = 1 - r`; the
//! angular rule is uniform away from a function's hotspots and dyadically
//! graded toward them. Refinement level `ℓ` deepens the grading by eight
//! dyadic levels and, for the first two steps, doubles the uniform angular
//! cells.

use std::f64::consts::{LN_2, PI};
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, ExtendedExponent};
use crate::function::{AnalyticFunction, Hotspot, Point, Ray};
use crate::quadrature::{
    angular_rule, dyadic_breaks, dyadic_breaks_above, gauss8, golden_max, hotspot_distance,
    Rule1D,
};

/// Resolution and stopping parameters for the norm quadratures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub theta_count: usize,
    pub radial_levels: u32,
    pub refine_max: u32,
    pub rel_tol: f64,
    pub sup_sample_count: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            theta_count: 64,
            radial_levels: 20,
            refine_max: 12,
            rel_tol: 1e-6,
            sup_sample_count: 64,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.theta_count < 8 {
            return Err(Error::Invalid("theta_count must be at least 8".into()));
        }
        if self.radial_levels < 4 {
            return Err(Error::Invalid("radial_levels must be at least 4".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol <= 0.1) {
            return Err(Error::Invalid("rel_tol must lie in (0, 0.1]".into()));
        }
        if self.refine_max < 1 {
            return Err(Error::Invalid("refine_max must be positive".into()));
        }
        if self.sup_sample_count < 2 {
            return Err(Error::Invalid("sup_sample_count must be at least 2".into()));
        }
        Ok(())
    }

    pub fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_theta_count(mut self, n: usize) -> Self {
        self.theta_count = n;
        self
    }

    pub fn with_refine_max(mut self, n: u32) -> Self {
        self.refine_max = n;
        self
    }

    pub fn with_radial_levels(mut self, n: u32) -> Self {
        self.radial_levels = n;
        self
    }
}

/// A norm value, or the flag for a detected divergence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NormValue {
    Finite(f64),
    Infinite,
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Finite(v) => s.serialize_f64(*v),
            NormValue::Infinite => s.serialize_str("infinity"),
        }
    }
}

impl<'de> Deserialize<'de> for NormValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(NormValue::Finite(v)),
            Raw::Str(s) if s == "infinity" => Ok(NormValue::Infinite),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad norm value '{s}'"))),
        }
    }
}

/// Result of a refined norm quadrature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub value: NormValue,
    pub converged: bool,
    /// `(refinement level, value)` for every level computed.
    pub trace: Vec<(u32, f64)>,
    pub divergence_exponent: Option<f64>,
}

impl NormEstimate {
    pub fn finite(&self) -> Option<f64> {
        match self.value {
            NormValue::Finite(v) if self.converged => Some(v),
            _ => None,
        }
    }

    pub fn diverged(&self) -> bool {
        self.value == NormValue::Infinite
    }

    /// Last computed level, finite or not.
    pub fn last(&self) -> f64 {
        self.trace.last().map(|t| t.1).unwrap_or(f64::NAN)
    }

    /// Converged value; panics if the estimate did not converge.
    pub fn expect_value(&self) -> f64 {
        self.finite()
            .unwrap_or_else(|| panic!("norm did not converge: trace {:?}", self.trace))
    }
}

#[derive(Clone, Copy, Debug)]
enum Span {
    Full,
    Below(f64),
    Above(f64),
}

struct Engine<'a> {
    f: &'a AnalyticFunction,
    hotspots: Vec<Hotspot>,
    cfg: &'a QuadratureConfig,
    span: Span,
    level: u32,
    depth_max: u32,
    rules: Vec<OnceLock<Rule1D>>,
}

impl<'a> Engine<'a> {
    fn new(f: &'a AnalyticFunction, cfg: &'a QuadratureConfig, span: Span, level: u32) -> Self {
        let depth_max = cfg.radial_levels + 8 * level;
        Engine {
            f,
            hotspots: f.hotspots(),
            cfg,
            span,
            level,
            depth_max,
            rules: (0..=depth_max).map(|_| OnceLock::new()).collect(),
        }
    }

    fn theta_cells(&self) -> usize {
        self.cfg.theta_count << self.level.min(2)
    }

    fn ray_depth(&self, theta: f64) -> u32 {
        let base = self.cfg.radial_levels + 2 * self.level;
        let d = hotspot_distance(theta, &self.hotspots);
        let local = if d.is_finite() && d > 0.0 {
            (-d.log2()).ceil().max(0.0) as u32
        } else if d == 0.0 {
            self.depth_max
        } else {
            0
        };
        (base + local).min(self.depth_max)
    }

    fn rule(&self, depth: u32) -> &Rule1D {
        self.rules[depth as usize].get_or_init(|| {
            let breaks = match self.span {
                Span::Full => dyadic_breaks(1.0, depth),
                Span::Above(rho) => dyadic_breaks(1.0 - rho, depth),
                Span::Below(r) => dyadic_breaks_above(1.0 - r, depth),
            };
            Rule1D::composite(&breaks, gauss8())
        })
    }

    fn x_range(&self, depth: u32) -> (f64, f64) {
        match self.span {
            Span::Full => (0.5f64.powi(depth as i32), 1.0),
            Span::Above(rho) => ((1.0 - rho) * 0.5f64.powi(depth as i32), 1.0 - rho),
            Span::Below(r) => (1.0 - r, 1.0),
        }
    }

    /// `∫ |f|^p dr` along the ray for finite `p`; `sup |f|` for `p = ∞`.
    fn ray_value(&self, theta: f64, p: ExtendedExponent) -> f64 {
        let ray = Ray::new(theta);
        let depth = self.ray_depth(theta);
        match p {
            ExtendedExponent::Finite(p) => {
                let rule = self.rule(depth);
                rule.nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| w * self.f.modulus_pow(&Point::polar(x, ray), p))
                    .sum()
            }
            ExtendedExponent::Infinity => {
                let (lo, hi) = self.x_range(depth);
                ray_sup(self.f, ray, lo, hi, self.cfg.sup_sample_count)
            }
        }
    }

    fn estimate(&self, pq: ExponentPair) -> f64 {
        let (rule, breaks) = angular_rule(self.theta_cells(), &self.hotspots, self.depth_max);
        match pq.q {
            ExtendedExponent::Finite(q) => {
                let vals: Vec<f64> =
                    rule.nodes.par_iter().map(|&t| self.ray_value(t, pq.p)).collect();
                let exponent = match pq.p {
                    ExtendedExponent::Finite(p) => q / p,
                    ExtendedExponent::Infinity => q,
                };
                let s: f64 =
                    vals.iter().zip(&rule.weights).map(|(v, w)| w * v.powf(exponent)).sum();
                s.powf(1.0 / q)
            }
            ExtendedExponent::Infinity => {
                let mut cand: Vec<f64> = rule.nodes.clone();
                cand.extend(breaks.iter().copied().filter(|&b| b < PI));
                cand.sort_by(f64::total_cmp);
                cand.dedup();
                let vals: Vec<f64> = cand.par_iter().map(|&t| self.ray_value(t, pq.p)).collect();
                let (imax, &vmax) = vals
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .expect("angular rule is never empty");
                let lo = if imax > 0 { cand[imax - 1] } else { cand[cand.len() - 1] - 2.0 * PI };
                let hi = if imax + 1 < cand.len() { cand[imax + 1] } else { cand[0] + 2.0 * PI };
                let (_, vref) = golden_max(|t| self.ray_value(t, pq.p), lo, hi, 40);
                let best = vmax.max(vref);
                match pq.p {
                    ExtendedExponent::Finite(p) => best.powf(1.0 / p),
                    ExtendedExponent::Infinity => best,
                }
            }
        }
    }
}

/// `sup |f|` along a ray over `x ∈ [lo, hi]`: geometric samples followed
/// by a golden-section pass in `log x` around the best sample.
fn ray_sup(f: &AnalyticFunction, ray: Ray, lo: f64, hi: f64, samples: usize) -> f64 {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let at = |lx: f64| f.modulus_pow(&Point::polar(lx.exp(), ray), 1.0);
    let n = samples.max(2);
    let pts: Vec<f64> = (0..n).map(|k| lhi + (llo - lhi) * k as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = pts.iter().map(|&l| at(l)).collect();
    let (i, &v) = vals.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap();
    let a = pts[i.saturating_sub(1)];
    let b = pts[(i + 1).min(n - 1)];
    let (_, w) = golden_max(at, a, b, 40);
    v.max(w)
}

fn check_inputs(f: &AnalyticFunction, cfg: &QuadratureConfig) -> Result<()> {
    cfg.validate()?;
    f.validate()
}

/// The settled value of a refinement trace: the last value when the last
/// step is within `tol`, or the Aitken limit when the last three increments
/// contract geometrically with a steady ratio `≤ 0.75` and the limits from
/// the last two windows agree within `tol`.
fn settled(trace: &[(u32, f64)], tol: f64) -> Option<f64> {
    let v: Vec<f64> = trace.iter().map(|t| t.1).collect();
    let n = v.len();
    if n >= 2 && (v[n - 1] - v[n - 2]).abs() <= tol * v[n - 1].abs() {
        return Some(v[n - 1]);
    }
    if n < 5 {
        return None;
    }
    let limit = |k: usize| -> Option<(f64, f64)> {
        let (d0, d1) = (v[k - 1] - v[k - 2], v[k] - v[k - 1]);
        let ratio = d1 / d0;
        (d0 != 0.0 && ratio > 0.0 && ratio <= 0.75).then(|| (v[k] + d1 * ratio / (1.0 - ratio), ratio))
    };
    let (a, ra) = limit(n - 1)?;
    let (b, rb) = limit(n - 2)?;
    ((ra - rb).abs() <= 0.1 * ra && (a - b).abs() <= tol * a.abs()).then_some(a)
}

/// Five successive growths with non-contracting increments.
fn diverging(trace: &[(u32, f64)], tol: f64) -> bool {
    let n = trace.len();
    if n < 6 {
        return false;
    }
    let v: Vec<f64> = trace[n - 6..].iter().map(|t| t.1).collect();
    let grows = v.windows(2).all(|w| w[1] > (1.0 + tol) * w[0]);
    let inc: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let steady = inc.windows(2).all(|w| w[1] >= 0.8 * w[0]);
    grows && steady
}

/// Least-squares slope of `log value` against `log(1/(1-R))` with
/// `1 - R = 2^{-depth}` over the last five trace points.
fn growth_exponent(trace: &[(u32, f64)], cfg: &QuadratureConfig) -> Option<f64> {
    let pts: Vec<(f64, f64)> = trace
        .iter()
        .rev()
        .take(5)
        .filter(|t| t.1 > 0.0 && t.1.is_finite())
        .map(|&(l, v)| (((cfg.radial_levels + 8 * l) as f64) * LN_2, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    Some(least_squares(&pts).0)
}

/// `(slope, intercept)` of the least-squares line through `pts`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (slope, my - slope * mx)
}

/// `ρ_{p,q}(f)` with refinement, a convergence verdict and, when the
/// truncations keep growing, a fitted growth exponent.
pub fn rm_norm(f: &AnalyticFunction, pq: ExponentPair, cfg: &QuadratureConfig) -> Result<NormEstimate> {
    check_inputs(f, cfg)?;
    let mut trace: Vec<(u32, f64)> = Vec::new();
    for level in 0..=cfg.refine_max {
        let v = Engine::new(f, cfg, Span::Full, level).estimate(pq);
        if !v.is_finite() {
            trace.push((level, v));
            return Ok(NormEstimate {
                value: NormValue::Infinite,
                converged: false,
                divergence_exponent: growth_exponent(&trace, cfg),
                trace,
            });
        }
        trace.push((level, v));
        if let Some(v) = settled(&trace, cfg.rel_tol) {
            return Ok(NormEstimate {
                value: NormValue::Finite(v),
                converged: true,
                trace,
                divergence_exponent: None,
            });
        }
        if diverging(&trace, cfg.rel_tol) {
            return Ok(NormEstimate {
                value: NormValue::Infinite,
                converged: false,
                divergence_exponent: growth_exponent(&trace, cfg),
                trace,
            });
        }
    }
    let last = trace.last().unwrap().1;
    Ok(NormEstimate {
        value: NormValue::Finite(last),
        converged: false,
        divergence_exponent: growth_exponent(&trace, cfg),
        trace,
    })
}

fn refine_until_stable(cfg: &QuadratureConfig, mut step: impl FnMut(u32) -> f64) -> f64 {
    let mut trace = Vec::new();
    for level in 0..=cfg.refine_max {
        trace.push((level, step(level)));
        if let Some(v) = settled(&trace, cfg.rel_tol) {
            return v;
        }
    }
    trace.last().unwrap().1
}

/// `ρ_{p,q}` with the radial integral restricted to `[0, R]`.
pub fn rm_norm_truncated(
    f: &AnalyticFunction,
    pq: ExponentPair,
    r_max: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_inputs(f, cfg)?;
    if !(r_max > 0.0 && r_max < 1.0) {
        return Err(Error::Domain(format!("truncation radius {r_max} outside (0, 1)")));
    }
    Ok(refine_until_stable(cfg, |level| {
        Engine::new(f, cfg, Span::Below(r_max), level).estimate(pq)
    }))
}

/// `sup_θ (∫_ρ^1 |f(re^{iθ})|^p dr)^{1/p}`.
pub fn tail_sup_norm(
    f: &AnalyticFunction,
    p: ExtendedExponent,
    rho: f64,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_inputs(f, cfg)?;
    if p.is_infinite() {
        return Err(Error::Invalid("tail_sup_norm needs a finite exponent".into()));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::Domain(format!("tail radius {rho} outside (0, 1)")));
    }
    let pq = ExponentPair::new(p, ExtendedExponent::Infinity);
    Ok(refine_until_stable(cfg, |level| {
        Engine::new(f, cfg, Span::Above(rho), level).estimate(pq)
    }))
}

/// `∫_0^1 |f(re^{iθ})|^p dr` for finite `p`, or the radial supremum for
/// `p = ∞`.
pub fn radial_integral(
    f: &AnalyticFunction,
    theta: f64,
    p: ExtendedExponent,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    check_inputs(f, cfg)?;
    Ok(refine_until_stable(cfg, |level| {
        Engine::new(f, cfg, Span::Full, level).ray_value(theta, p)
    }))
}

/// Discrete weak-type quasi-norm `sup_t t · λ(t)^{1/p}` of equally weighted
/// samples, where `λ(t)` is the fraction of samples exceeding `t`.
pub fn weak_lp_norm(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Invalid("weak_lp_norm needs at least one sample".into()));
    }
    if !(p >= 1.0) {
        return Err(Error::Invalid(format!("weak_lp_norm needs p >= 1, got {p}")));
    }
    let mut v: Vec<f64> = samples.to_vec();
    if v.iter().any(|x| !(x >= &0.0) || !x.is_finite()) {
        return Err(Error::Invalid("samples must be finite and nonnegative".into()));
    }
    v.sort_by(|a, b| b.total_cmp(a));
    let n = v.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        // for t just below v[i], every sample with value >= v[i] exceeds t
        best = best.max(v[i] * ((j + 1) as f64 / n).powf(1.0 / p));
        i = j + 1;
    }
    Ok(best)
}

/// `ρ_{p,q}(f - f_r)` for each `r` in an increasing list.
pub fn dilation_convergence(
    f: &AnalyticFunction,
    pq: ExponentPair,
    r_list: &[f64],
    cfg: &QuadratureConfig,
) -> Result<Vec<(f64, NormEstimate)>> {
    if r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid("r_list must be strictly increasing".into()));
    }
    r_list
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Domain(format!("dilation radius {r} outside (0, 1)")));
            }
            let diff = AnalyticFunction::sum(vec![
                (1.0.into(), f.clone()),
                ((-1.0).into(), f.dilate(r)?),
            ]);
            Ok((r, rm_norm(&diff, pq, cfg)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{Finite, Infinity};
    use num_complex::Complex64;

    fn one() -> AnalyticFunction {
        AnalyticFunction::constant(Complex64::new(1.0, 0.0))
    }

    #[test]
    fn config_validation() {
        assert!(QuadratureConfig::default().validate().is_ok());
        assert!(QuadratureConfig::default().with_theta_count(4).validate().is_err());
        assert!(QuadratureConfig::default().with_tol(0.5).validate().is_err());
    }

    #[test]
    fn radial_integral_examples() {
        let cfg = QuadratureConfig::default();
        let v = radial_integral(&one(), 0.7, Finite(3.0), &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
        let v = radial_integral(&AnalyticFunction::monomial(1), 0.0, Finite(2.0), &cfg).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-14);
        let f = AnalyticFunction::power_singularity(1.0);
        let v = radial_integral(&f, PI, Finite(1.0), &cfg).unwrap();
        // |1 - r e^{iπ}| = 1 + r, so the integral is ln 2
        assert!((v - LN_2).abs() < 1e-6 * LN_2, "{v}");
    }

    #[test]
    fn monomial_closed_form() {
        let cfg = QuadratureConfig::default();
        let pq = ExponentPair::finite(2.0, 7.0).unwrap();
        let e = rm_norm(&AnalyticFunction::monomial(1), pq, &cfg).unwrap();
        assert!(e.converged);
        assert!((e.expect_value() - 3f64.powf(-0.5)).abs() < 1e-9);
        let pq = ExponentPair::new(Infinity, Finite(2.0));
        let e = rm_norm(&AnalyticFunction::monomial(5), pq, &cfg).unwrap();
        assert!(e.expect_value() >= 1.0 - cfg.rel_tol);
    }

    #[test]
    fn constant_has_unit_norm_in_every_regime() {
        let cfg = QuadratureConfig::default();
        for p in [Finite(1.0), Finite(3.0), Infinity] {
            for q in [Finite(1.0), Finite(2.5), Infinity] {
                let e = rm_norm(&one(), ExponentPair::new(p, q), &cfg).unwrap();
                assert!((e.expect_value() - 1.0).abs() < 1e-12, "{p} {q}");
            }
        }
    }

    #[test]
    fn truncated_examples() {
        let cfg = QuadratureConfig::default();
        for (p, q) in [(1.0, 1.0), (2.0, 3.0), (4.0, 1.5)] {
            let pq = ExponentPair::finite(p, q).unwrap();
            let v = rm_norm_truncated(&one(), pq, 0.5, &cfg).unwrap();
            assert!((v - 0.5f64.powf(1.0 / p)).abs() < 1e-12);
        }
        let pq = ExponentPair::finite(2.0, 2.0).unwrap();
        let v = rm_norm_truncated(&AnalyticFunction::monomial(1), pq, 1.0 - 1e-9, &cfg).unwrap();
        assert!((v - 3f64.powf(-0.5)).abs() < 1e-6);
    }

    #[test]
    fn tail_of_constant() {
        let cfg = QuadratureConfig::default();
        let v = tail_sup_norm(&one(), Finite(2.0), 0.75, &cfg).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        assert!(tail_sup_norm(&one(), Infinity, 0.5, &cfg).is_err());
    }

    #[test]
    fn weak_lp_examples() {
        assert_eq!(weak_lp_norm(&[3.0; 10], 2.0).unwrap(), 3.0);
        assert!(weak_lp_norm(&[], 2.0).is_err());
        let n = 4000;
        let alpha = 2.0;
        let s: Vec<f64> = (1..=n).map(|i| (i as f64 / n as f64).powf(-1.0 / alpha)).collect();
        let w = weak_lp_norm(&s, alpha).unwrap();
        assert!((w - 1.0).abs() < 2.0 / n as f64, "{w}");
        let d: Vec<f64> = s.iter().map(|x| 2.0 * x).collect();
        assert!((weak_lp_norm(&d, alpha).unwrap() - 2.0 * w).abs() < 1e-15);
    }

    #[test]
    fn estimate_serializes_with_flag() {
        let e = NormEstimate {
            value: NormValue::Infinite,
            converged: false,
            trace: vec![(0, 1.0), (1, 2.0)],
            divergence_exponent: Some(0.3),
        };
        let s = serde_json::to_string(&e).unwrap();
        assert!(s.contains("\"value\":\"infinity\""));
        let back: NormEstimate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
    }
}
