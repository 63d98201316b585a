use crate::error::{Error, Result};
use crate::function::circular_distance;

use super::kernels::kernel_h_delta;

/// A partition of `[0, 1]` carrying step functions: sample `i` is the value
/// on the cell `(x_{i-1}, x_i]`, with `x_{-1} = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RayMesh {
    /// Right endpoints, increasing, ending at 1.
    pub nodes: Vec<f64>,
    /// Cell lengths.
    pub weights: Vec<f64>,
}

impl RayMesh {
    pub fn from_breaks(breaks: &[f64]) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 || *breaks.last().unwrap() != 1.0 {
            return Err(Error::Invalid("mesh breaks must run from 0 to 1".into()));
        }
        if breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("mesh breaks must increase strictly".into()));
        }
        Ok(RayMesh {
            nodes: breaks[1..].to_vec(),
            weights: breaks.windows(2).map(|w| w[1] - w[0]).collect(),
        })
    }

    /// Dyadic cells `[2^{-j-1}, 2^{-j}]` down to `2^{-levels}`, each split
    /// uniformly into `per_cell` pieces.
    pub fn dyadic(levels: u32, per_cell: usize) -> Self {
        let mut b = vec![0.0];
        for j in (0..levels).rev() {
            let (lo, hi) = (0.5f64.powi(j as i32 + 1), 0.5f64.powi(j as i32));
            for m in 0..per_cell {
                b.push(lo + (hi - lo) * m as f64 / per_cell as f64);
            }
        }
        b.push(1.0);
        Self::from_breaks(&b).expect("dyadic breaks are valid")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn left(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.nodes[i - 1]
        }
    }

    /// Index of the cell containing `x > 0`.
    fn cell(&self, x: f64) -> usize {
        self.nodes.partition_point(|&n| n < x).min(self.len() - 1)
    }

    fn prefix(&self, samples: &[f64]) -> Vec<f64> {
        let mut s = Vec::with_capacity(samples.len() + 1);
        s.push(0.0);
        let mut acc = 0.0;
        for (v, w) in samples.iter().zip(&self.weights) {
            acc += v * w;
            s.push(acc);
        }
        s
    }

    /// `∫_0^t` of the step function.
    fn integral_to(&self, prefix: &[f64], samples: &[f64], t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return prefix[self.len()];
        }
        let i = self.cell(t);
        prefix[i] + samples[i] * (t - self.left(i))
    }
}

fn check(mesh: &RayMesh, samples: &[f64]) -> Result<()> {
    if samples.len() != mesh.len() {
        return Err(Error::Invalid(format!("{} samples on a mesh of {} cells", samples.len(), mesh.len())));
    }
    if samples.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Domain("maximal functions need nonnegative samples".into()));
    }
    Ok(())
}

/// `Rf(x) = sup_{1 ≥ t ≥ x} (1/t) ∫_0^t f`, and 0 for `x ≥ 1`. Exact for
/// the step function: on each cell the running average is monotone, so the
/// supremum sits at `t = x` or at a right endpoint.
pub fn maximal_r(mesh: &RayMesh, samples: &[f64], x: f64) -> Result<f64> {
    check(mesh, samples)?;
    if x >= 1.0 {
        return Ok(0.0);
    }
    let prefix = mesh.prefix(samples);
    let mut best = if x > 0.0 { mesh.integral_to(&prefix, samples, x) / x } else { samples[0] };
    let start = if x > 0.0 { mesh.cell(x) } else { 0 };
    for i in start..mesh.len() {
        best = best.max(prefix[i + 1] / mesh.nodes[i]);
    }
    Ok(best)
}

/// Uncentered maximal function of the step function on `[0, 1]` at `x`:
/// the largest average over intervals `[a, b] ∋ x`.
pub fn ray_maximal(mesh: &RayMesh, samples: &[f64], x: f64) -> Result<f64> {
    check(mesh, samples)?;
    let x = x.clamp(0.0, 1.0);
    let prefix = mesh.prefix(samples);
    let at = |t: f64| mesh.integral_to(&prefix, samples, t);
    let mut lefts = vec![0.0, x];
    let mut rights = vec![x, 1.0];
    for &n in &mesh.nodes {
        if n < x {
            lefts.push(n);
        } else if n > x {
            rights.push(n);
        }
    }
    // degenerate intervals shrinking to x from either side
    let mut best = if x > 0.0 { samples[mesh.cell(x)] } else { 0.0 };
    if x < 1.0 {
        best = best.max(samples[mesh.partition_after(x)]);
    }
    for &a in &lefts {
        let sa = at(a);
        for &b in &rights {
            if b > a {
                best = best.max((at(b) - sa) / (b - a));
            }
        }
    }
    Ok(best)
}

impl RayMesh {
    /// Index of the cell just to the right of `x`.
    fn partition_after(&self, x: f64) -> usize {
        self.nodes.partition_point(|&n| n <= x).min(self.len() - 1)
    }
}

/// Centered periodic maximal function on a uniform circle mesh: the largest
/// average over windows of `2k + 1` consecutive nodes.
pub fn hl_maximal(samples: &[f64]) -> Result<Vec<f64>> {
    let n = samples.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if samples.iter().any(|v| !(*v >= 0.0)) {
        return Err(Error::Domain("maximal functions need nonnegative samples".into()));
    }
    let mut prefix = vec![0.0; 2 * n + 1];
    for i in 0..2 * n {
        prefix[i + 1] = prefix[i] + samples[i % n];
    }
    let kmax = (n - 1) / 2;
    Ok((0..n)
        .map(|i| {
            let c = i + n;
            (0..=kmax)
                .map(|k| {
                    let lo = c - k;
                    let hi = (c + k + 1).min(2 * n);
                    let s = if c + k < 2 * n {
                        prefix[hi] - prefix[lo]
                    } else {
                        prefix[2 * n] - prefix[lo] + prefix[c + k + 1 - 2 * n]
                    };
                    s / (2 * k + 1) as f64
                })
                .fold(samples[i], f64::max)
        })
        .collect())
}

/// `‖(Σ_k (M g_k)^s)^{1/s}‖_{L^t} / ‖(Σ_k g_k^s)^{1/s}‖_{L^t}` on a uniform
/// circle mesh, for sequences `g_k` of equal length.
pub fn fefferman_stein_ratio(seqs: &[Vec<f64>], s: f64, t: f64) -> Result<f64> {
    let n = seqs.first().map_or(0, |v| v.len());
    if n == 0 || seqs.iter().any(|v| v.len() != n) {
        return Err(Error::Invalid("sequences must be nonempty and of equal length".into()));
    }
    let maxed: Vec<Vec<f64>> = seqs.iter().map(|g| hl_maximal(g)).collect::<Result<_>>()?;
    let norm = |vs: &[Vec<f64>]| -> f64 {
        let sum: f64 = (0..n)
            .map(|i| vs.iter().map(|v| v[i].powf(s)).sum::<f64>().powf(t / s))
            .sum();
        (sum / n as f64).powf(1.0 / t)
    };
    Ok(norm(&maxed) / norm(seqs))
}

/// Both sides of the bilinear bound for `T_H`: samples `f[a][i]` on ray `a`
/// of `n` uniform angles and cell `i` of `mesh`. Returns
/// `(∫∫ (T_H f) g, ∫∫ Rf(θ, |φ-θ|) Rg(φ, |φ-θ|))` with `dx dθ` measures.
pub fn bilinear_bound_sides(mesh: &RayMesh, f: &[Vec<f64>], g: &[Vec<f64>]) -> Result<(f64, f64)> {
    let n = f.len();
    if n == 0 || g.len() != n {
        return Err(Error::Invalid("f and g need the same nonzero number of rays".into()));
    }
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let angles: Vec<f64> = (0..n).map(|a| a as f64 * h).collect();
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    for a in 0..n {
        for b in 0..n {
            let d = circular_distance(angles[a], angles[b]);
            if d > 1.0 || d == 0.0 {
                continue;
            }
            let mut s = 0.0;
            for (i, (&x, &wx)) in mesh.nodes.iter().zip(&mesh.weights).enumerate() {
                for (k, (&y, &wy)) in mesh.nodes.iter().zip(&mesh.weights).enumerate() {
                    s += kernel_h_delta(d, x, y) * f[b][k] * g[a][i] * wx * wy;
                }
            }
            lhs += s * h * h;
            rhs += maximal_r(mesh, &f[b], d)? * maximal_r(mesh, &g[a], d)? * h * h;
        }
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_of_constant() {
        let m = RayMesh::dyadic(10, 3);
        let c = vec![2.5; m.len()];
        for x in [0.0, 1e-4, 0.3, 0.99] {
            assert!((maximal_r(&m, &c, x).unwrap() - 2.5).abs() < 1e-12);
        }
        assert_eq!(maximal_r(&m, &c, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn r_is_monotone_and_below_m() {
        let m = RayMesh::dyadic(8, 2);
        let s: Vec<f64> = (0..m.len()).map(|i| ((i * 7919) % 13) as f64).collect();
        let mut prev = f64::INFINITY;
        for j in 0..=100 {
            let x = j as f64 / 100.0;
            let r = maximal_r(&m, &s, x).unwrap();
            assert!(r <= prev + 1e-12);
            assert!(r <= ray_maximal(&m, &s, x).unwrap() + 1e-12);
            prev = r;
        }
    }

    #[test]
    fn hl_examples() {
        assert!(hl_maximal(&[3.0; 9]).unwrap().iter().all(|v| (v - 3.0).abs() < 1e-12));
        let mut spike = vec![0.0; 15];
        spike[5] = 4.0;
        let m = hl_maximal(&spike).unwrap();
        for (i, v) in m.iter().enumerate() {
            let k = circular_index_distance(i, 5, 15);
            assert!(*v >= 4.0 / (2 * k + 1) as f64 - 1e-12);
            assert!(*v >= spike[i]);
        }
    }

    fn circular_index_distance(a: usize, b: usize, n: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(n - d)
    }
}
