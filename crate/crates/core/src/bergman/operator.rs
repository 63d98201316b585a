use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use super::grid::{AreaRule, GridFunction, PolarGrid};
use super::kernels::{bergman_kernel, GridKernel};
use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, ExtendedExponent};
use crate::function::AnalyticFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Measure used by an integral operator on the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// `ρ dρ dφ / π`
    Area,
    /// `dy dφ` in `y = 1 - ρ`
    Lebesgue,
}

impl Measure {
    fn node_weight(self, grid: &PolarGrid, k: usize) -> f64 {
        match self {
            Measure::Area => grid.area_weight(k),
            Measure::Lebesgue => grid.radial_weights[k] * 2.0 * PI / grid.n_angles() as f64,
        }
    }
}

/// Weights of the discrete mixed norm: `dr` times `dθ / 2π`.
fn norm_weight(grid: &PolarGrid, k: usize) -> f64 {
    grid.radial_weights[k] / grid.n_angles() as f64
}

/// Operators acting on grid functions.
pub trait GridOperator: Sync {
    fn apply(&self, f: &GridFunction) -> GridFunction;

    /// Adjoint for the pairing `Σ f conj g dr dθ/2π`, when available.
    fn adjoint(&self, _g: &GridFunction) -> Option<GridFunction> {
        None
    }
}

pub struct Identity;

impl GridOperator for Identity {
    fn apply(&self, f: &GridFunction) -> GridFunction {
        f.clone()
    }

    fn adjoint(&self, g: &GridFunction) -> Option<GridFunction> {
        Some(g.clone())
    }
}

pub struct ScaledIdentity(pub f64);

impl GridOperator for ScaledIdentity {
    fn apply(&self, f: &GridFunction) -> GridFunction {
        f.scale(Complex64::new(self.0, 0.0))
    }

    fn adjoint(&self, g: &GridFunction) -> Option<GridFunction> {
        Some(g.scale(Complex64::new(self.0, 0.0)))
    }
}

/// `f ↦ (T_M f)` on a polar grid. Kernels depend on the angles only through
/// `θ - φ`, so each radius pair is a circular convolution done by FFT.
pub struct KernelOperator {
    grid: PolarGrid,
    kernel: GridKernel,
    measure: Measure,
    /// `spectra[i * n_r + k]`: DFT of `a ↦ M(r_i, ρ_k, 2πa/N)`.
    spectra: Vec<Vec<Complex64>>,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl KernelOperator {
    pub fn new(grid: &PolarGrid, kernel: GridKernel, measure: Measure) -> Self {
        Self::build(grid, kernel, measure, false)
    }

    /// The discretized Bergman projection. The diagonal angular cell uses
    /// the exact cell average of `K` over the angle, since the point value
    /// `(1 - rρ)^{-2}` is not resolved by the angular mesh near the circle.
    pub fn bergman(grid: &PolarGrid) -> Self {
        Self::build(grid, GridKernel::Bergman, Measure::Area, true)
    }

    fn build(grid: &PolarGrid, kernel: GridKernel, measure: Measure, self_cell: bool) -> Self {
        let n = grid.n_angles();
        let h = 2.0 * PI / n as f64;
        let nr = grid.n_radii();
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let spectra = (0..nr * nr)
            .into_par_iter()
            .map(|ik| {
                let (i, k) = (ik / nr, ik % nr);
                let mut row: Vec<Complex64> = (0..n)
                    .map(|a| {
                        let delta = 2.0 * PI * a as f64 / n as f64;
                        kernel.eval(grid.radii[i], grid.xs[i], grid.radii[k], grid.xs[k], delta)
                    })
                    .collect();
                if self_cell {
                    row[0] = Complex64::new(bergman_cell_average(grid.xs[i], grid.xs[k], h), 0.0);
                }
                fwd.process(&mut row);
                row
            })
            .collect();
        KernelOperator { grid: grid.clone(), kernel, measure, spectra, fwd, inv }
    }

    pub fn kernel(&self) -> &GridKernel {
        &self.kernel
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }

    fn apply_weighted(&self, f: &GridFunction, weight: impl Fn(usize) -> f64) -> GridFunction {
        let g = &self.grid;
        let (n, nr) = (g.n_angles(), g.n_radii());
        let inputs: Vec<Vec<Complex64>> = (0..nr)
            .map(|k| {
                let w = weight(k);
                let mut row: Vec<Complex64> = (0..n).map(|b| f.at(k, b) * w).collect();
                self.fwd.process(&mut row);
                row
            })
            .collect();
        let rows: Vec<Vec<Complex64>> = (0..nr)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![ZERO; n];
                for (k, gk) in inputs.iter().enumerate() {
                    let m = &self.spectra[i * nr + k];
                    for ((a, mk), gv) in acc.iter_mut().zip(m).zip(gk) {
                        *a += mk * gv;
                    }
                }
                self.inv.process(&mut acc);
                let s = 1.0 / n as f64;
                acc.iter_mut().for_each(|v| *v *= s);
                acc
            })
            .collect();
        GridFunction { grid: g.clone(), values: rows.concat() }
    }
}

impl GridOperator for KernelOperator {
    fn apply(&self, f: &GridFunction) -> GridFunction {
        self.apply_weighted(f, |k| self.measure.node_weight(&self.grid, k))
    }

    /// `T* g = (μ/ν) · Σ M ν g`, valid because every [`GridKernel`] is
    /// Hermitian.
    fn adjoint(&self, g: &GridFunction) -> Option<GridFunction> {
        if !self.kernel.is_hermitian() {
            return None;
        }
        let grid = &self.grid;
        let mut out = self.apply_weighted(g, |k| norm_weight(grid, k));
        let n = grid.n_angles();
        for i in 0..grid.n_radii() {
            let s = self.measure.node_weight(grid, i) / norm_weight(grid, i);
            for v in &mut out.values[i * n..(i + 1) * n] {
                *v *= s;
            }
        }
        Some(out)
    }
}

/// `(1/h) ∫_{-h/2}^{h/2} (1 - t e^{iδ})^{-2} dδ` with `t = (1-x)(1-y)`,
/// from the antiderivative `δ + i Log(1 - t e^{iδ}) - i / (1 - t e^{iδ})`.
pub fn bergman_cell_average(x: f64, y: f64, h: f64) -> f64 {
    let t = (1.0 - x) * (1.0 - y);
    let omt = x + y - x * y;
    let half = 0.5 * h;
    let sq = (0.5 * half).sin();
    let w = Complex64::new(omt + 2.0 * t * sq * sq, -t * half.sin());
    (h - 2.0 * w.arg() + 2.0 * w.inv().im) / h
}

/// `T_M f` on the grid of `f`.
pub fn apply_tm(kernel: &GridKernel, f: &GridFunction, measure: Measure) -> GridFunction {
    KernelOperator::new(&f.grid, kernel.clone(), measure).apply(f)
}

/// `P f(z) = ∫ K(z, w) f(w) dA(w)` by the grid rule.
pub fn project(f: &AnalyticFunction, z: Complex64, grid: &PolarGrid) -> Result<Complex64> {
    project_grid(&GridFunction::from_analytic(grid, f)?, z)
}

pub fn project_grid(f: &GridFunction, z: Complex64) -> Result<Complex64> {
    check_disc(z)?;
    let g = &f.grid;
    let mut s = ZERO;
    for i in 0..g.n_radii() {
        let mut row = ZERO;
        for j in 0..g.n_angles() {
            row += bergman_kernel(z, g.point(i, j)) * f.at(i, j);
        }
        s += row * g.area_weight(i);
    }
    Ok(s)
}

/// `P f(z)` for samples `values` on an arbitrary area rule.
pub fn project_rule(rule: &AreaRule, values: &[Complex64], z: Complex64) -> Result<Complex64> {
    check_disc(z)?;
    if values.len() != rule.points.len() {
        return Err(Error::Invalid("sample count does not match the rule".into()));
    }
    Ok(rule
        .points
        .iter()
        .zip(values)
        .zip(&rule.weights)
        .map(|((w, v), wt)| bergman_kernel(z, *w) * v * *wt)
        .sum())
}

fn check_disc(z: Complex64) -> Result<()> {
    if !(z.norm() < 1.0) {
        return Err(Error::Domain(format!("|z| = {} is not inside the disc", z.norm())));
    }
    Ok(())
}

/// `∫ f conj(g) dA` on a shared grid.
pub fn duality_pairing(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if f.grid != g.grid {
        return Err(Error::Invalid("pairing needs both functions on the same grid".into()));
    }
    let gr = &f.grid;
    let n = gr.n_angles();
    Ok((0..gr.n_radii())
        .map(|i| {
            let row: Complex64 = (0..n).map(|j| f.at(i, j) * g.at(i, j).conj()).sum();
            row * gr.area_weight(i)
        })
        .sum())
}

pub fn duality_pairing_analytic(
    f: &AnalyticFunction,
    g: &AnalyticFunction,
    grid: &PolarGrid,
) -> Result<Complex64> {
    duality_pairing(&GridFunction::from_analytic(grid, f)?, &GridFunction::from_analytic(grid, g)?)
}

/// One entry of the operator-norm trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormTrial {
    pub label: String,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorNormEstimate {
    pub lower_bound: f64,
    pub trace: Vec<NormTrial>,
}

/// Norming functional of `u` for the mixed norm: `⟨u, J u⟩ = ‖u‖`, `‖J u‖_* = 1`.
fn duality_map(u: &GridFunction, p: f64, q: f64) -> GridFunction {
    let g = &u.grid;
    let n = g.n_angles();
    let norm = u.mixed_norm(ExponentPair::finite(p, q).expect("finite exponents"));
    let mut out = GridFunction::zeros(g);
    if !(norm > 0.0) {
        return out;
    }
    for j in 0..n {
        let a: f64 = (0..g.n_radii()).map(|i| g.radial_weights[i] * u.at(i, j).norm().powf(p)).sum();
        if a == 0.0 {
            continue;
        }
        let scale = a.powf(q / p - 1.0) / norm.powf(q - 1.0);
        for i in 0..g.n_radii() {
            let v = u.at(i, j);
            let m = v.norm();
            if m > 0.0 {
                out.values[i * n + j] = v * (m.powf(p - 2.0) * scale);
            }
        }
    }
    out
}

fn ratio(op: &dyn GridOperator, f: &GridFunction, pq: ExponentPair) -> Option<f64> {
    let d = f.mixed_norm(pq);
    if !(d > 0.0) || !d.is_finite() {
        return None;
    }
    let r = op.apply(f).mixed_norm(pq) / d;
    r.is_finite().then_some(r)
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Lower bound for `‖op‖` on `L^q(T, L^p[0,1])` of the grid: the best
/// ratio over seeded random draws and witness functions, polished by a
/// nonlinear power iteration when `1 < p, q < ∞` and `op` has an adjoint.
pub fn operator_norm_estimate(
    op: &dyn GridOperator,
    pq: ExponentPair,
    grid: &PolarGrid,
    trials: usize,
    seed: u64,
) -> Result<OperatorNormEstimate> {
    if trials == 0 {
        return Err(Error::Invalid("at least one trial is needed".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = Vec::new();
    let mut best: Option<(f64, GridFunction)> = None;
    let mut consider = |label: String, f: GridFunction, trace: &mut Vec<NormTrial>| -> bool {
        match ratio(op, &f, pq) {
            Some(r) => {
                trace.push(NormTrial { label, ratio: r });
                if best.as_ref().map_or(true, |(b, _)| r > *b) {
                    best = Some((r, f));
                }
                true
            }
            None => false,
        }
    };

    let ip = pq.p.reciprocal();
    for t in 0..trials {
        for _attempt in 0..16 {
            let (label, f) = if t % 2 == 0 {
                let vals = (0..grid.len()).map(|_| gaussian(&mut rng)).collect();
                (format!("gaussian {t}"), GridFunction { grid: grid.clone(), values: vals })
            } else {
                let ang: Vec<Complex64> = (0..grid.n_angles()).map(|_| gaussian(&mut rng)).collect();
                let beta = rng.gen::<f64>() * 0.9 * ip;
                let (c1, c2): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                let f = GridFunction::from_fn(grid, |_, x, th| {
                    let j = ((th / (2.0 * PI)) * grid.n_angles() as f64).round() as usize % grid.n_angles();
                    ang[j] * (x.powf(-beta) * (1.0 + c1 * x + c2 * x * x))
                });
                (format!("rank-one {t}"), f)
            };
            if consider(label, f, &mut trace) {
                break;
            }
        }
    }

    let s = pq.reciprocal_sum();
    let mut witnesses: Vec<(String, AnalyticFunction)> =
        [0u32, 1, 2, 4, 8].iter().map(|&n| (format!("monomial {n}"), AnalyticFunction::monomial(n))).collect();
    if s > 0.0 {
        for c in [0.25, 0.5, 0.75] {
            witnesses.push((format!("power {:.4}", c * s), AnalyticFunction::power_singularity(c * s)));
        }
    }
    for (label, w) in witnesses {
        if let Ok(f) = GridFunction::from_analytic(grid, &w) {
            consider(label, f, &mut trace);
        }
    }

    if let (ExtendedExponent::Finite(p), ExtendedExponent::Finite(q)) = (pq.p, pq.q) {
        if p > 1.0 && q > 1.0 {
            if let Some((_, start)) = best.clone() {
                power_iteration(op, pq, start, p, q, &mut trace, &mut best);
            }
        }
    }

    let lower_bound = best
        .map(|(r, _)| r)
        .ok_or_else(|| Error::Invariant("every trial function was degenerate".into()))?;
    Ok(OperatorNormEstimate { lower_bound, trace })
}

fn power_iteration(
    op: &dyn GridOperator,
    pq: ExponentPair,
    start: GridFunction,
    p: f64,
    q: f64,
    trace: &mut Vec<NormTrial>,
    best: &mut Option<(f64, GridFunction)>,
) {
    let (pc, qc) = (p / (p - 1.0), q / (q - 1.0));
    let mut f = start;
    let mut last = 0.0;
    for it in 0..60 {
        let u = op.apply(&f);
        let phi = duality_map(&u, p, q);
        let Some(v) = op.adjoint(&phi) else { return };
        let next = duality_map(&v, pc, qc);
        let Some(r) = ratio(op, &next, pq) else { return };
        trace.push(NormTrial { label: format!("power {it}"), ratio: r });
        if best.as_ref().map_or(true, |(b, _)| r > *b) {
            *best = Some((r, next.clone()));
        }
        if (r - last).abs() <= 1e-10 * r {
            return;
        }
        last = r;
        f = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> PolarGrid {
        PolarGrid::new(16, 16).unwrap()
    }

    #[test]
    fn fft_apply_matches_direct_sum() {
        let g = grid();
        let f = GridFunction::from_fn(&g, |r, x, t| Complex64::new(r * t.cos() + x, (2.0 * t).sin()));
        for (kernel, measure) in [
            (GridKernel::Bergman, Measure::Area),
            (GridKernel::D, Measure::Area),
            (GridKernel::H, Measure::Lebesgue),
        ] {
            let out = apply_tm(&kernel, &f, measure);
            for &(i, a) in &[(0usize, 0usize), (7, 3), (15, 11)] {
                let mut s = ZERO;
                for k in 0..g.n_radii() {
                    for b in 0..g.n_angles() {
                        let d = g.angles[a] - g.angles[b];
                        s += kernel.eval(g.radii[i], g.xs[i], g.radii[k], g.xs[k], d)
                            * f.at(k, b)
                            * measure.node_weight(&g, k);
                    }
                }
                assert!((s - out.at(i, a)).norm() < 1e-10 * (1.0 + s.norm()), "{kernel:?}");
            }
        }
    }

    #[test]
    fn cell_average_matches_quadrature() {
        let rule = crate::quadrature::GaussRule::new(40);
        for &(x, y, h) in &[(0.5, 0.3, 0.4), (0.1, 0.05, 0.1), (0.9, 0.2, 1.0)] {
            let num: f64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(u, w)| {
                    let d = h * (u - 0.5);
                    w * GridKernel::Bergman.eval(1.0 - x, x, 1.0 - y, y, d).re
                })
                .sum();
            let a = bergman_cell_average(x, y, h);
            assert!((a - num).abs() < 1e-9 * num.abs().max(1.0), "{a} {num}");
        }
    }

    #[test]
    fn adjoint_identity() {
        let g = grid();
        let op = KernelOperator::new(&g, GridKernel::Htilde, Measure::Lebesgue);
        let f = GridFunction::from_fn(&g, |r, _, t| Complex64::new(r, t.sin()));
        let h = GridFunction::from_fn(&g, |_, x, t| Complex64::new(x.sqrt(), (3.0 * t).cos()));
        let pair = |a: &GridFunction, b: &GridFunction| -> Complex64 {
            (0..g.n_radii())
                .flat_map(|i| (0..g.n_angles()).map(move |j| (i, j)))
                .map(|(i, j)| a.at(i, j) * b.at(i, j).conj() * norm_weight(&g, i))
                .sum()
        };
        let lhs = pair(&op.apply(&f), &h);
        let rhs = pair(&f, &op.adjoint(&h).unwrap());
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
    }

    #[test]
    fn constant_kernel_reproduces_mass() {
        let g = grid();
        let one = GridFunction::from_fn(&g, |_, _, _| Complex64::new(1.0, 0.0));
        let out = apply_tm(&GridKernel::Constant(1.0), &one, Measure::Area);
        assert!(out.values.iter().all(|v| (v - 1.0).norm() < 1e-12));
        let zero = apply_tm(&GridKernel::Bergman, &GridFunction::zeros(&g), Measure::Area);
        assert!(zero.values.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn identity_norms() {
        let g = grid();
        let pq = ExponentPair::finite(2.0, 3.0).unwrap();
        let e = operator_norm_estimate(&Identity, pq, &g, 4, 7).unwrap();
        assert_eq!(e.lower_bound, 1.0);
        let e = operator_norm_estimate(&ScaledIdentity(2.0), pq, &g, 4, 7).unwrap();
        assert!((e.lower_bound - 2.0).abs() < 1e-12);
        let again = operator_norm_estimate(&ScaledIdentity(2.0), pq, &g, 4, 7).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn pairing_of_monomials() {
        let g = PolarGrid::new(32, 32).unwrap();
        for n in 0..4u32 {
            let z = AnalyticFunction::monomial(n);
            let v = duality_pairing_analytic(&z, &z, &g).unwrap();
            assert!((v.re - 1.0 / (n as f64 + 1.0)).abs() < 1e-10 && v.im.abs() < 1e-12);
        }
        let v = duality_pairing_analytic(&AnalyticFunction::monomial(1), &AnalyticFunction::monomial(2), &g)
            .unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn projection_reproduces_polynomials() {
        let g = PolarGrid::new(64, 64).unwrap();
        let p = project(&AnalyticFunction::monomial(3), Complex64::new(0.5, 0.0), &g).unwrap();
        assert!((p - 0.125).norm() < 1e-8, "{p}");
        let one = project(&AnalyticFunction::constant(Complex64::new(1.0, 0.0)), Complex64::new(0.3, 0.4), &g)
            .unwrap();
        assert!((one - 1.0).norm() < 1e-8);
        assert!(project(&AnalyticFunction::monomial(1), Complex64::new(1.0, 0.0), &g).is_err());
    }
}
