//! Gauss–Legendre panels on dyadically graded partitions, plus a
//! golden-section maximizer for the supremum branches.

use std::f64::consts::PI;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

use crate::function::{circular_distance, wrap_angle, Hotspot};

/// Gauss–Legendre nodes and weights mapped to `[0, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn new(m: usize) -> Self {
        let degree = NonZeroUsize::new(m.max(1)).unwrap();
        let gl = GaussLegendre::new(degree);
        let mut pairs: Vec<(f64, f64)> = gl.as_node_weight_pairs().to_vec();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussRule {
            nodes: pairs.iter().map(|(x, _)| 0.5 * (x + 1.0)).collect(),
            weights: pairs.iter().map(|(_, w)| 0.5 * w).collect(),
        }
    }
}

/// The 8-point panel used throughout.
pub fn gauss8() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::new(8))
}

/// A one-dimensional rule with absolute weights.
#[derive(Clone, Debug, Default)]
pub struct Rule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1D {
    /// Apply `rule` on each cell between consecutive breakpoints.
    pub fn composite(breaks: &[f64], rule: &GaussRule) -> Self {
        let mut out = Rule1D::default();
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = b - a;
            if h <= 0.0 {
                continue;
            }
            for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
                out.nodes.push(a + h * t);
                out.weights.push(h * wt);
            }
        }
        out
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Breakpoints `0, L·2^{-levels}, …, L/2, L` accumulating at zero.
pub fn dyadic_breaks(length: f64, levels: u32) -> Vec<f64> {
    let mut b = Vec::with_capacity(levels as usize + 2);
    b.push(0.0);
    for j in (0..=levels).rev() {
        b.push(length * 0.5f64.powi(j as i32));
    }
    b
}

/// Breakpoints on `[lo, 1]` that halve toward `lo`: the dyadic points
/// `2^{-j} > lo` followed by a geometric grading of `[lo, 2 lo]`.
pub fn dyadic_breaks_above(lo: f64, levels: u32) -> Vec<f64> {
    let mut b = vec![lo];
    let mut t = 1.0;
    let mut pts = Vec::new();
    while t > lo * (1.0 + 1e-12) {
        pts.push(t);
        t *= 0.5;
    }
    pts.reverse();
    // finer cells next to `lo` where a truncated kernel varies fastest
    let first = pts.first().copied().unwrap_or(1.0);
    let gap = first - lo;
    for j in (1..=levels.min(12)).rev() {
        let v = lo + gap * 0.5f64.powi(j as i32);
        if v > lo && v < first {
            b.push(v);
        }
    }
    b.extend(pts);
    b
}

/// Angular breakpoints on `[-π, π]`: `n` uniform cells with dyadic
/// refinement of depth `depth` toward each hotspot, stopped a few levels
/// below the hotspot's scale.
pub fn angular_breaks(n: usize, hotspots: &[Hotspot], depth: u32) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
    *b.last_mut().unwrap() = PI;
    let w = 2.0 * PI / n as f64;
    for h in hotspots {
        let phi = wrap_angle(h.angle);
        let levels = if h.scale > 0.0 {
            let need = (w / h.scale).log2().ceil().max(0.0) as u32 + 8;
            need.min(depth)
        } else {
            depth
        };
        b.push(phi);
        for j in 0..=levels {
            let d = w * 0.5f64.powi(j as i32);
            for v in [phi - d, phi + d] {
                let v = if v < -PI {
                    v + 2.0 * PI
                } else if v > PI {
                    v - 2.0 * PI
                } else {
                    v
                };
                b.push(v);
            }
        }
    }
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

/// The angular rule on `[-π, π]` with weights normalized to `dθ / 2π`.
pub fn angular_rule(n: usize, hotspots: &[Hotspot], depth: u32) -> (Rule1D, Vec<f64>) {
    let breaks = angular_breaks(n, hotspots, depth);
    let mut rule = Rule1D::composite(&breaks, gauss8());
    for w in rule.weights.iter_mut() {
        *w /= 2.0 * PI;
    }
    (rule, breaks)
}

/// Distance from `theta` to the nearest hotspot, widened by its scale.
pub fn hotspot_distance(theta: f64, hotspots: &[Hotspot]) -> f64 {
    hotspots
        .iter()
        .map(|h| circular_distance(theta, h.angle) + h.scale)
        .fold(f64::INFINITY, f64::min)
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_max(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, iters: usize) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
