use num_complex::Complex64;

use crate::function::circular_distance;

/// `K(z, w) = (1 - z w̄)^{-2}`.
pub fn bergman_kernel(z: Complex64, w: Complex64) -> Complex64 {
    let d = Complex64::new(1.0, 0.0) - z * w.conj();
    1.0 / (d * d)
}

/// `|K(re^{iθ}, ρe^{iφ})|` from the radii and the angular difference.
pub fn bergman_kernel_modulus(r: f64, rho: f64, delta: f64) -> f64 {
    let t = r * rho;
    let h = (0.5 * delta).sin();
    let m2 = (1.0 - t) * (1.0 - t) + 4.0 * t * h * h;
    1.0 / m2
}

/// The comparison kernel `D`: zero for `|θ-φ| > 1`, `1/|θ-φ|²` down to
/// `|θ-φ| = 1 - rρ`, and `1/(1-rρ)²` below.
pub fn kernel_d(r: f64, theta: f64, rho: f64, phi: f64) -> f64 {
    kernel_d_delta(r, rho, circular_distance(theta, phi))
}

pub(crate) fn kernel_d_delta(r: f64, rho: f64, d: f64) -> f64 {
    // 1 - rρ as m + n(1 - m), m = max(1 - r, 1 - ρ)
    let (x, y) = (1.0 - r, 1.0 - rho);
    let (m, n) = (x.max(y), x.min(y));
    let s = m + n * (1.0 - m);
    if d > 1.0 {
        0.0
    } else if d >= s {
        1.0 / (d * d)
    } else {
        1.0 / (s * s)
    }
}

/// `H̃` in boundary-distance coordinates `x = 1 - r`, `y = 1 - ρ`.
pub fn kernel_htilde(theta: f64, phi: f64, x: f64, y: f64) -> f64 {
    kernel_htilde_delta(circular_distance(theta, phi), x, y)
}

pub(crate) fn kernel_htilde_delta(d: f64, x: f64, y: f64) -> f64 {
    let m = x.max(y);
    if d > 1.0 {
        0.0
    } else if d >= m {
        1.0 / (d * d)
    } else {
        1.0 / (m * m)
    }
}

/// `H = 1/|θ-φ|²` on `1 ≥ |θ-φ| ≥ max{x, y}`, zero elsewhere.
pub fn kernel_h(theta: f64, phi: f64, x: f64, y: f64) -> f64 {
    kernel_h_delta(circular_distance(theta, phi), x, y)
}

pub(crate) fn kernel_h_delta(d: f64, x: f64, y: f64) -> f64 {
    if d <= 1.0 && d >= x.max(y) && d > 0.0 {
        1.0 / (d * d)
    } else {
        0.0
    }
}

/// `H_n(θ, φ, x, y) = 2^{-2n} H(θ, φ, 2^{-n}x, 2^{-n}y)`.
pub fn kernel_hn(n: u32, theta: f64, phi: f64, x: f64, y: f64) -> f64 {
    kernel_hn_delta(n, circular_distance(theta, phi), x, y)
}

pub(crate) fn kernel_hn_delta(n: u32, d: f64, x: f64, y: f64) -> f64 {
    let s = 0.5f64.powi(n as i32);
    s * s * kernel_h_delta(d, s * x, s * y)
}

/// Kernels that depend on the two radii and the angle difference only.
#[derive(Clone, Debug, PartialEq)]
pub enum GridKernel {
    /// `K(z, w)`
    Bergman,
    /// `|K(z, w)| χ_{|θ-φ| ≤ 1}`
    BergmanTruncated,
    D,
    Htilde,
    H,
    Hn(u32),
    Constant(f64),
    Scaled(f64, Box<GridKernel>),
}

impl GridKernel {
    /// Value at radii `r, ρ` (with `x = 1 - r`, `y = 1 - ρ`) and angle
    /// difference `δ = θ - φ`.
    pub fn eval(&self, r: f64, x: f64, rho: f64, y: f64, delta: f64) -> Complex64 {
        let d = circular_distance(delta, 0.0);
        let re = |v: f64| Complex64::new(v, 0.0);
        match self {
            GridKernel::Bergman => {
                let w = Complex64::new(1.0, 0.0) - Complex64::from_polar(r * rho, delta);
                1.0 / (w * w)
            }
            GridKernel::BergmanTruncated => {
                if d <= 1.0 {
                    re(bergman_kernel_modulus(r, rho, delta))
                } else {
                    re(0.0)
                }
            }
            GridKernel::D => re(kernel_d_delta(r, rho, d)),
            GridKernel::Htilde => re(kernel_htilde_delta(d, x, y)),
            GridKernel::H => re(kernel_h_delta(d, x, y)),
            GridKernel::Hn(n) => re(kernel_hn_delta(*n, d, x, y)),
            GridKernel::Constant(c) => re(*c),
            GridKernel::Scaled(c, k) => k.eval(r, x, rho, y, delta) * *c,
        }
    }

    /// True when `M(z, w) = conj M(w, z)`.
    pub fn is_hermitian(&self) -> bool {
        true
    }
}
