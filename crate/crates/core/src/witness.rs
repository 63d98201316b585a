//! Explicit witness families: power singularities, powers of Cesàro sums,
//! the rational bumps of the `ℓ^∞` embedding, and the Stolz-region density
//! used against boundedness of the projection at `q = ∞`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::AreaRule;
use crate::error::{Error, Result};
use crate::function::AnalyticFunction;
use crate::quadrature::{dyadic_breaks, gauss8, Rule1D};

/// `(1 - z)^{-α}`.
pub fn power_singularity(alpha: f64) -> AnalyticFunction {
    AnalyticFunction::power_singularity(alpha)
}

/// `(Σ_{k≤n} z^k)^{1/α}`.
pub fn cesaro_power(n: u64, alpha: f64) -> Result<AnalyticFunction> {
    AnalyticFunction::cesaro_power(n, alpha)
}

/// Parameters of the rational bumps `f_k = ε_k / (z e^{-iθ_k} - a_k)²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingParams {
    pub p: f64,
    pub k_terms: usize,
    pub r: Vec<f64>,
    pub a: Vec<f64>,
    /// `a_k - 1 = 14^{-(k+1)}`, kept separately since `a_k` rounds to 1.
    pub a_minus_1: Vec<f64>,
    pub eps: Vec<f64>,
    pub theta: Vec<f64>,
}

/// Outcome of the construction-time checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingChecks {
    /// `Σ_{k<K} ε_k / r_k²`
    pub eps_sum: f64,
    /// `(7/15)(2p-1)^{1/p}`
    pub eps_sum_bound: f64,
    /// Bound on the omitted terms `k ≥ K`.
    pub tail_bound: f64,
    /// Smallest angular gap between the sectors subtended by two discs.
    pub min_sector_gap: f64,
    pub max_theta: f64,
    /// Largest deviation of the normalization integral from 1.
    pub normalization_error: f64,
}

/// `sin(arcsin r - arcsin(r/a))` for `a = 1 + e`, without cancellation.
fn sector_excess(r: f64, e: f64) -> f64 {
    let a = 1.0 + e;
    let a2m1 = e * (2.0 + e);
    let s = (r / a) * a2m1 / ((a * a - r * r).sqrt() + (1.0 - r * r).sqrt());
    s.asin()
}

impl EmbeddingParams {
    /// Build the sequences and verify their invariants.
    pub fn new(p: f64, k_terms: usize) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Invalid(format!("embedding needs p >= 1, got {p}")));
        }
        if k_terms == 0 {
            return Err(Error::Invalid("embedding needs at least one term".into()));
        }
        let mut r = Vec::with_capacity(k_terms);
        let mut a = Vec::with_capacity(k_terms);
        let mut am1 = Vec::with_capacity(k_terms);
        let mut eps = Vec::with_capacity(k_terms);
        let mut theta = Vec::with_capacity(k_terms);
        let mut asin_sum = 0.0;
        for k in 0..k_terms {
            let m = (k + 1) as i32;
            let rk = 0.5f64.powi(m);
            let ek = 14f64.powi(-m);
            let seven = ((m as f64) * (2.0 * p - 1.0) * 7f64.ln()).exp_m1();
            let epsk = (2.0 * p - 1.0).powf(1.0 / p)
                * 2f64.powf(-(m as f64) * (2.0 - 1.0 / p))
                * seven.powf(-1.0 / p);
            r.push(rk);
            am1.push(ek);
            a.push(1.0 + ek);
            eps.push(epsk);
            theta.push(rk.asin() + 2.0 * asin_sum);
            asin_sum += rk.asin();
        }
        let params = EmbeddingParams { p, k_terms, r, a, a_minus_1: am1, eps, theta };
        let checks = params.checks();
        if !(checks.eps_sum < 1.0 && checks.eps_sum <= checks.eps_sum_bound * (1.0 + 1e-12)) {
            return Err(Error::Invariant(format!("eps sum {} too large", checks.eps_sum)));
        }
        if !(checks.min_sector_gap > 0.0) {
            return Err(Error::Invariant("embedding discs overlap".into()));
        }
        if !(checks.max_theta < PI) {
            return Err(Error::Invariant("embedding angle exceeds pi".into()));
        }
        if !(checks.normalization_error < 1e-10) {
            return Err(Error::Invariant("normalization integral differs from 1".into()));
        }
        Ok(params)
    }

    /// Recompute every invariant from the stored sequences.
    pub fn checks(&self) -> EmbeddingChecks {
        let p = self.p;
        let c = 7.0 / 15.0 * (2.0 * p - 1.0).powf(1.0 / p);
        let eps_sum: f64 = self.eps.iter().zip(&self.r).map(|(e, r)| e / (r * r)).sum();
        let mut min_gap = f64::INFINITY;
        for k in 0..self.k_terms {
            for j in k + 1..self.k_terms {
                min_gap = min_gap.min(self.sector_gap(k, j));
            }
        }
        let normalization_error = (0..self.k_terms)
            .map(|k| (self.normalization(k) - 1.0).abs())
            .fold(0.0, f64::max);
        EmbeddingChecks {
            eps_sum,
            eps_sum_bound: c,
            tail_bound: c * (2.0f64 / 7.0).powi(self.k_terms as i32),
            min_sector_gap: if self.k_terms > 1 { min_gap } else { f64::INFINITY },
            max_theta: self.theta.iter().copied().fold(0.0, f64::max),
            normalization_error,
        }
    }

    /// Angular gap between the sectors `|arg z - θ_k| ≤ arcsin(r_k/a_k)` of
    /// discs `k < j`. Written as a sum of positive terms so its sign is
    /// certain in floating point.
    pub fn sector_gap(&self, k: usize, j: usize) -> f64 {
        let (k, j) = (k.min(j), k.max(j));
        let between: f64 = (k + 1..j).map(|n| self.r[n].asin()).sum();
        sector_excess(self.r[k], self.a_minus_1[k])
            + sector_excess(self.r[j], self.a_minus_1[j])
            + 2.0 * between
    }

    /// `|c_k - c_j|` for the centers `c_k = a_k e^{iθ_k}`.
    pub fn center_distance(&self, k: usize, j: usize) -> f64 {
        let (k, j) = (k.min(j), k.max(j));
        let between: f64 = (k + 1..j).map(|n| self.r[n].asin()).sum();
        let dt = self.r[k].asin() + self.r[j].asin() + 2.0 * between;
        let da = self.a_minus_1[k] - self.a_minus_1[j];
        let s = (0.5 * dt).sin();
        (da * da + 4.0 * self.a[k] * self.a[j] * s * s).sqrt()
    }

    /// `∫_{a_k - r_k}^1 ε_k^p / (a_k - r)^{2p} dr` by its antiderivative,
    /// evaluated in logarithms.
    pub fn normalization(&self, k: usize) -> f64 {
        let p = self.p;
        let m = 2.0 * p - 1.0;
        let le = self.a_minus_1[k].ln();
        let lr = self.r[k].ln();
        // eps^p/(2p-1) · [(a-1)^{1-2p} - r^{1-2p}]
        let lead = p * self.eps[k].ln() - m.ln() - m * le;
        lead.exp() * -(m * (le - lr)).exp_m1()
    }

    /// The center `a_k e^{iθ_k}` of disc `k`.
    pub fn center(&self, k: usize) -> Complex64 {
        Complex64::from_polar(self.a[k], self.theta[k])
    }

    /// `f_k` as an analytic function.
    pub fn bump(&self, k: usize) -> AnalyticFunction {
        AnalyticFunction::rational_bump_excess(self.eps[k], self.a_minus_1[k], self.theta[k])
            .expect("embedding parameters are valid")
    }

    /// Number of discs met by the ray at angle `theta`.
    pub fn discs_on_ray(&self, theta: f64) -> usize {
        (0..self.k_terms)
            .filter(|&k| {
                let d = theta - self.theta[k];
                d.cos() > 0.0 && self.a[k] * d.sin().abs() < self.r[k]
            })
            .count()
    }
}

/// The sequences `r_k, a_k, ε_k, θ_k` for `k < K`.
pub fn embedding_params(p: f64, k_terms: usize) -> Result<EmbeddingParams> {
    EmbeddingParams::new(p, k_terms)
}

/// The finite section `Σ α_k f_k`.
pub fn embedding_function(params: &EmbeddingParams, alphas: &[Complex64]) -> Result<AnalyticFunction> {
    if alphas.len() > params.k_terms {
        return Err(Error::Invalid(format!(
            "{} coefficients for {} embedding terms",
            alphas.len(),
            params.k_terms
        )));
    }
    Ok(AnalyticFunction::sum(
        alphas.iter().enumerate().map(|(k, &al)| (al, params.bump(k))).collect(),
    ))
}

/// Membership in `Ω = { re^{iθ} : 0 < θ < 1/2, 0 < r < 1 - 2θ }`.
pub fn omega_contains(z: Complex64) -> bool {
    let r = z.norm();
    if r == 0.0 {
        return false;
    }
    let t = z.arg();
    t > 0.0 && t < 0.5 && r < 1.0 - 2.0 * t
}

/// The density `θ^α K(1 - θ, re^{-iθ})` on `Ω`, zero elsewhere, with
/// `α = 2 - 1/p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnoboundWitness {
    pub p: f64,
    pub alpha: f64,
}

impl PnoboundWitness {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::Invalid(format!("witness needs 1 < p < inf, got {p}")));
        }
        Ok(PnoboundWitness { p, alpha: 2.0 - 1.0 / p })
    }

    /// Value at `re^{iθ}` with `θ ∈ (-π, π]`.
    pub fn value(&self, r: f64, theta: f64) -> Complex64 {
        if !(theta > 0.0 && theta < 0.5 && r > 0.0 && r < 1.0 - 2.0 * theta) {
            return Complex64::new(0.0, 0.0);
        }
        let w = Complex64::from_polar(r, -theta);
        let k = crate::bergman::bergman_kernel(Complex64::new(1.0 - theta, 0.0), w);
        theta.powf(self.alpha) * k
    }

    pub fn value_at(&self, z: Complex64) -> Complex64 {
        self.value(z.norm(), z.arg())
    }

    /// `∫_0^1 |f(re^{iθ})|^p dr`, on a mesh graded toward `r = 1 - 2θ`.
    pub fn ray_integral(&self, theta: f64) -> f64 {
        if !(theta > 0.0 && theta < 0.5) {
            return 0.0;
        }
        let top = 1.0 - 2.0 * theta;
        let rule = Rule1D::composite(&dyadic_breaks(top, 50), gauss8());
        rule.integrate(|s| self.value(top - s, theta).norm().powf(self.p))
    }

    /// Area rule on `Ω` graded toward the tip: dyadic in `θ` toward 0 and
    /// in `s = 1 - 2θ - r` toward 0.
    pub fn omega_rule(depth: u32) -> AreaRule {
        let t_rule = Rule1D::composite(&dyadic_breaks(0.5, depth), gauss8());
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (&t, &wt) in t_rule.nodes.iter().zip(&t_rule.weights) {
            let top = 1.0 - 2.0 * t;
            let s_rule = Rule1D::composite(&dyadic_breaks(top, depth), gauss8());
            for (&s, &ws) in s_rule.nodes.iter().zip(&s_rule.weights) {
                let r = top - s;
                points.push(Complex64::from_polar(r, t));
                weights.push(wt * ws * r / PI);
            }
        }
        AreaRule { points, weights }
    }

    /// Samples on an area rule.
    pub fn sample(&self, rule: &AreaRule) -> Vec<Complex64> {
        rule.points.iter().map(|&z| self.value_at(z)).collect()
    }
}

/// The density of [`PnoboundWitness`].
pub fn pnobound_witness(p: f64) -> Result<PnoboundWitness> {
    PnoboundWitness::new(p)
}
