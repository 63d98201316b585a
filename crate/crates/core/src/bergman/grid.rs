use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::{ExponentPair, ExtendedExponent};
use crate::function::AnalyticFunction;
use crate::quadrature::{dyadic_breaks, gauss8, Rule1D};

/// Tensor quadrature on the disc: Gauss panels on dyadic cells in
/// `x = 1 - r` and uniform angles on `[0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    /// Radii in increasing order.
    pub radii: Vec<f64>,
    /// `1 - r` for each radius, kept at full precision.
    pub xs: Vec<f64>,
    /// Weights of `dr` on `[0, 1]`; they sum to 1.
    pub radial_weights: Vec<f64>,
    pub angles: Vec<f64>,
}

impl PolarGrid {
    /// `n_angles` uniform angles and `n_radii` graded radii (a multiple of 8).
    pub fn new(n_angles: usize, n_radii: usize) -> Result<Self> {
        if n_angles < 4 {
            return Err(Error::Invalid("a polar grid needs at least 4 angles".into()));
        }
        if n_radii < 8 || n_radii % 8 != 0 {
            return Err(Error::Invalid(format!("radial count {n_radii} is not a positive multiple of 8")));
        }
        let cells = n_radii / 8;
        let rule = Rule1D::composite(&dyadic_breaks(1.0, cells as u32 - 1), gauss8());
        // x ascending means r descending; store radius-ascending
        let mut xs = rule.nodes.clone();
        let mut ws = rule.weights.clone();
        xs.reverse();
        ws.reverse();
        Ok(PolarGrid {
            radii: xs.iter().map(|x| 1.0 - x).collect(),
            xs,
            radial_weights: ws,
            angles: (0..n_angles).map(|j| 2.0 * PI * j as f64 / n_angles as f64).collect(),
        })
    }

    /// Parse `<angles>x<radii>`.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let (a, r) = spec
            .split_once(['x', 'X'])
            .ok_or_else(|| Error::Invalid(format!("grid spec '{spec}' is not <angles>x<radii>")))?;
        let a = a.trim().parse().map_err(|_| Error::Invalid(format!("bad angle count in '{spec}'")))?;
        let r = r.trim().parse().map_err(|_| Error::Invalid(format!("bad radial count in '{spec}'")))?;
        Self::new(a, r)
    }

    pub fn n_radii(&self) -> usize {
        self.radii.len()
    }

    pub fn n_angles(&self) -> usize {
        self.angles.len()
    }

    pub fn len(&self) -> usize {
        self.n_radii() * self.n_angles()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Weight of node `(i, j)` for `ρ dρ dφ / π`; independent of `j`.
    pub fn area_weight(&self, i: usize) -> f64 {
        2.0 * self.radii[i] * self.radial_weights[i] / self.n_angles() as f64
    }

    /// The full weight matrix, indexed `(radius, angle)`.
    pub fn weights(&self) -> Vec<Vec<f64>> {
        (0..self.n_radii()).map(|i| vec![self.area_weight(i); self.n_angles()]).collect()
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        Complex64::from_polar(self.radii[i], self.angles[j])
    }

    /// The same nodes as a flat area rule, radius-major.
    pub fn area_rule(&self) -> AreaRule {
        let mut points = Vec::with_capacity(self.len());
        let mut weights = Vec::with_capacity(self.len());
        for i in 0..self.n_radii() {
            for j in 0..self.n_angles() {
                points.push(self.point(i, j));
                weights.push(self.area_weight(i));
            }
        }
        AreaRule { points, weights }
    }
}

/// A quadrature rule for the normalized area measure given by nodes and
/// weights, not necessarily of tensor form.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct AreaRule {
    pub points: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl AreaRule {
    pub fn integrate(&self, values: &[Complex64]) -> Complex64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * *w).sum()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Samples on a [`PolarGrid`], indexed `(radius, angle)` radius-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    pub grid: PolarGrid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: PolarGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "{} values for a grid with {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: &PolarGrid) -> Self {
        GridFunction { grid: grid.clone(), values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Samples of `f(r, x, θ)` with `x = 1 - r`.
    pub fn from_fn(grid: &PolarGrid, f: impl Fn(f64, f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_radii() {
            for j in 0..grid.n_angles() {
                values.push(f(grid.radii[i], grid.xs[i], grid.angles[j]));
            }
        }
        GridFunction { grid: grid.clone(), values }
    }

    pub fn from_analytic(grid: &PolarGrid, f: &AnalyticFunction) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..grid.n_radii() {
            for j in 0..grid.n_angles() {
                values.push(f.evaluate_polar(grid.xs[i], grid.angles[j])?);
            }
        }
        Ok(GridFunction { grid: grid.clone(), values })
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.grid.n_angles() + j]
    }

    /// The samples along ray `j`, radius ascending.
    pub fn ray(&self, j: usize) -> Vec<Complex64> {
        (0..self.grid.n_radii()).map(|i| self.at(i, j)).collect()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|v| v * c).collect() }
    }

    pub fn add(&self, other: &GridFunction) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| Complex64::new(v.norm(), 0.0)).collect(),
        }
    }

    /// Discrete `L^q(T, L^p[0,1])` norm for `dr` and `dθ / 2π`.
    pub fn mixed_norm(&self, pq: ExponentPair) -> f64 {
        let g = &self.grid;
        let inner: Vec<f64> = (0..g.n_angles())
            .map(|j| match pq.p {
                ExtendedExponent::Finite(p) => (0..g.n_radii())
                    .map(|i| g.radial_weights[i] * self.at(i, j).norm().powf(p))
                    .sum::<f64>()
                    .powf(1.0 / p),
                ExtendedExponent::Infinity => {
                    (0..g.n_radii()).map(|i| self.at(i, j).norm()).fold(0.0, f64::max)
                }
            })
            .collect();
        match pq.q {
            ExtendedExponent::Finite(q) => {
                (inner.iter().map(|v| v.powf(q)).sum::<f64>() / g.n_angles() as f64).powf(1.0 / q)
            }
            ExtendedExponent::Infinity => inner.iter().copied().fold(0.0, f64::max),
        }
    }

    /// Radius-major CSV: `i,j,r,theta,re,im`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,r,theta,re,im\n");
        for i in 0..self.grid.n_radii() {
            for j in 0..self.grid.n_angles() {
                let v = self.at(i, j);
                let _ = writeln!(
                    s,
                    "{i},{j},{:e},{:e},{:e},{:e}",
                    self.grid.radii[i], self.grid.angles[j], v.re, v.im
                );
            }
        }
        s
    }

    /// JSON sidecar describing the grid.
    pub fn sidecar_json(&self) -> String {
        serde_json::to_string_pretty(&self.grid).expect("grids serialize")
    }

    /// Inverse of [`to_csv`](Self::to_csv) given the sidecar grid.
    pub fn from_csv(grid: PolarGrid, csv: &str) -> Result<Self> {
        let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
        let mut seen = 0usize;
        for (ln, line) in csv.lines().enumerate().skip(1) {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 6 {
                return Err(Error::Serde(format!("line {}: expected 6 columns", ln + 1)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim().parse().map_err(|_| Error::Serde(format!("line {}: bad number '{s}'", ln + 1)))
            };
            let i = parse(cols[0])? as usize;
            let j = parse(cols[1])? as usize;
            if i >= grid.n_radii() || j >= grid.n_angles() {
                return Err(Error::Serde(format!("line {}: index out of range", ln + 1)));
            }
            values[i * grid.n_angles() + j] = Complex64::new(parse(cols[4])?, parse(cols[5])?);
            seen += 1;
        }
        if seen != grid.len() {
            return Err(Error::Serde(format!("{seen} rows for {} grid nodes", grid.len())));
        }
        GridFunction::new(grid, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_are_a_probability_measure() {
        for (a, r) in [(64, 64), (128, 128), (16, 8)] {
            let g = PolarGrid::new(a, r).unwrap();
            let s: f64 = g.weights().iter().flatten().sum();
            assert!((s - 1.0).abs() < 1e-10);
            assert!(g.weights().iter().flatten().all(|&w| w >= 0.0));
            assert!(g.radii.iter().all(|&r| r > 0.0 && r < 1.0));
        }
        assert!(PolarGrid::new(64, 60).is_err());
        assert_eq!(PolarGrid::from_spec("32x16").unwrap().n_angles(), 32);
    }

    #[test]
    fn csv_round_trip() {
        let g = PolarGrid::new(8, 8).unwrap();
        let f = GridFunction::from_fn(&g, |r, _, t| Complex64::from_polar(r, t));
        let back = GridFunction::from_csv(g.clone(), &f.to_csv()).unwrap();
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).norm() < 1e-12);
        }
        let g2: PolarGrid = serde_json::from_str(&f.sidecar_json()).unwrap();
        assert_eq!(g2, g);
    }
}
