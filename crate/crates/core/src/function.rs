//! Closed-form and series representations of analytic functions on the disc.
//!
//! Points are carried in boundary coordinates `(x, θ)` with `x = 1 - |z|`, so
//! that `1 - z` and the rational-bump denominators are formed without
//! cancellation even when `z` is within `1e-30` of the circle.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One term `a z^n` of a lacunary series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LacunaryNode {
    pub n: u64,
    pub a: Complex64,
}

/// One term `w f` of a [`AnalyticFunction::Sum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub weight: Complex64,
    pub function: AnalyticFunction,
}

/// Tagged union of the catalogued function families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "repr")]
pub enum AnalyticFunction {
    /// `z^n`
    Monomial { n: u32 },
    /// `Σ a_k z^k`
    TaylorPolynomial { coeffs: Vec<Complex64> },
    /// `(1 - z)^{-α}`
    PowerSingularity { alpha: f64 },
    /// `((1 - z^{n+1}) / (1 - z))^{1/α}`
    CesaroPower { n: u64, alpha: f64 },
    /// `Σ a_k z^{n_k}`
    Lacunary { nodes: Vec<LacunaryNode> },
    /// `ε / (z e^{-iθ₀} - a)²`. `a_minus_1`, when present, carries `a - 1`
    /// at full precision for poles closer to the circle than one ulp of `a`.
    RationalBump {
        eps: f64,
        a: f64,
        theta0: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a_minus_1: Option<f64>,
    },
    /// `f(rz)`
    Scaled { inner: Box<AnalyticFunction>, r: f64 },
    /// `f(e^{iφ} z)`
    Rotated { inner: Box<AnalyticFunction>, phi: f64 },
    /// `Σ w_k f_k`
    Sum { terms: Vec<WeightedTerm> },
}

/// A boundary point where a function's modulus concentrates, with the
/// distance of the singularity from the circle (`0` for a boundary pole).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hotspot {
    pub angle: f64,
    pub scale: f64,
}

/// Angle reduced to `[-π, π]`; exact for inputs already in range.
pub fn wrap_angle(t: f64) -> f64 {
    if (-PI..=PI).contains(&t) {
        t
    } else {
        t - 2.0 * PI * (t / (2.0 * PI)).round()
    }
}

/// Distance in `R / 2πZ`.
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_angle(a - b).abs()
}

/// Trigonometric data of one ray, with `1 - cos θ` kept accurate near `θ = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Ray {
    pub theta: f64,
    pub cos: f64,
    pub sin: f64,
    pub omc: f64,
}

impl Ray {
    pub fn new(theta: f64) -> Self {
        let theta = wrap_angle(theta);
        let (sin, cos) = theta.sin_cos();
        let h = (0.5 * theta).sin();
        Ray { theta, cos, sin, omc: 2.0 * h * h }
    }

    #[inline]
    pub fn cis(&self) -> Complex64 {
        Complex64::new(self.cos, self.sin)
    }
}

/// A point `z = (1 - x) e^{iθ}` of the disc.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    pub x: f64,
    pub ray: Ray,
    pub z: Complex64,
}

impl Point {
    pub fn polar(x: f64, ray: Ray) -> Self {
        Point { x, ray, z: ray.cis() * (1.0 - x) }
    }

    pub fn from_z(z: Complex64) -> Self {
        let r = z.norm();
        let ray = if r == 0.0 { Ray::new(0.0) } else { Ray::new(z.arg()) };
        Point { x: 1.0 - r, ray, z }
    }

    /// `1 - z`
    #[inline]
    pub fn one_minus_z(&self) -> Complex64 {
        Complex64::new(self.ray.omc + self.x * self.ray.cos, -(1.0 - self.x) * self.ray.sin)
    }

    fn scaled(&self, r: f64) -> Self {
        Point { x: (1.0 - r) + r * self.x, ray: self.ray, z: self.z * r }
    }

    fn rotated(&self, phi: f64) -> Self {
        let ray = Ray::new(self.ray.theta + phi);
        Point { x: self.x, ray, z: self.z * Complex64::from_polar(1.0, phi) }
    }
}

/// `e^w - 1` without cancellation for small `w`.
fn expm1_c(w: Complex64) -> Complex64 {
    let em = w.re.exp_m1();
    let h = (0.5 * w.im).sin();
    let (s, c) = w.im.sin_cos();
    Complex64::new(em * c - 2.0 * h * h, (1.0 + em) * s)
}

/// `1 - z^m` for `z` given in boundary coordinates.
fn one_minus_power(pt: &Point, m: f64) -> Complex64 {
    let w = Complex64::new(m * (-pt.x).ln_1p(), m * pt.ray.theta);
    -expm1_c(w)
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn bump_denominator(pt: &Point, a_minus_1: f64, theta0: f64) -> Complex64 {
    let d = Ray::new(pt.ray.theta - theta0);
    Complex64::new(-d.omc - pt.x * d.cos - a_minus_1, (1.0 - pt.x) * d.sin)
}

fn power_of(z: Complex64, n: u64) -> Complex64 {
    if n <= u32::MAX as u64 {
        z.powu(n as u32)
    } else {
        z.powf(n as f64)
    }
}

impl AnalyticFunction {
    pub fn monomial(n: u32) -> Self {
        AnalyticFunction::Monomial { n }
    }

    pub fn constant(c: Complex64) -> Self {
        AnalyticFunction::TaylorPolynomial { coeffs: vec![c] }
    }

    pub fn taylor(coeffs: Vec<Complex64>) -> Self {
        AnalyticFunction::TaylorPolynomial { coeffs }
    }

    pub fn power_singularity(alpha: f64) -> Self {
        AnalyticFunction::PowerSingularity { alpha }
    }

    pub fn cesaro_power(n: u64, alpha: f64) -> Result<Self> {
        let f = AnalyticFunction::CesaroPower { n, alpha };
        f.validate()?;
        Ok(f)
    }

    pub fn lacunary(nodes: Vec<LacunaryNode>) -> Result<Self> {
        let f = AnalyticFunction::Lacunary { nodes };
        f.validate()?;
        Ok(f)
    }

    pub fn rational_bump(eps: f64, a: f64, theta0: f64) -> Result<Self> {
        let f = AnalyticFunction::RationalBump { eps, a, theta0, a_minus_1: None };
        f.validate()?;
        Ok(f)
    }

    /// Rational bump with the pole excess `a - 1` given directly.
    pub fn rational_bump_excess(eps: f64, a_minus_1: f64, theta0: f64) -> Result<Self> {
        let f = AnalyticFunction::RationalBump {
            eps,
            a: 1.0 + a_minus_1,
            theta0,
            a_minus_1: Some(a_minus_1),
        };
        f.validate()?;
        Ok(f)
    }

    pub fn rotated(self, phi: f64) -> Self {
        AnalyticFunction::Rotated { inner: Box::new(self), phi }
    }

    pub fn sum(terms: Vec<(Complex64, AnalyticFunction)>) -> Self {
        AnalyticFunction::Sum {
            terms: terms
                .into_iter()
                .map(|(weight, function)| WeightedTerm { weight, function })
                .collect(),
        }
    }

    /// `c · f`
    pub fn times(self, c: Complex64) -> Self {
        Self::sum(vec![(c, self)])
    }

    /// `f_r(z) = f(rz)`; `r = 1` returns `f` unchanged.
    pub fn dilate(&self, r: f64) -> Result<Self> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(Error::Domain(format!("dilation radius {r} outside (0, 1]")));
        }
        if r == 1.0 {
            return Ok(self.clone());
        }
        Ok(AnalyticFunction::Scaled { inner: Box::new(self.clone()), r })
    }

    /// Check the representation invariants recursively.
    pub fn validate(&self) -> Result<()> {
        use AnalyticFunction::*;
        match self {
            Monomial { .. } => Ok(()),
            TaylorPolynomial { coeffs } => {
                if coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
                    Ok(())
                } else {
                    Err(Error::Invalid("non-finite Taylor coefficient".into()))
                }
            }
            PowerSingularity { alpha } => {
                if alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Invalid("non-finite alpha".into()))
                }
            }
            CesaroPower { alpha, .. } => {
                if *alpha > 0.0 && alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::Invalid(format!("CesaroPower needs alpha > 0, got {alpha}")))
                }
            }
            Lacunary { nodes } => {
                if nodes.is_empty() {
                    return Err(Error::Invalid("empty lacunary node list".into()));
                }
                if nodes[0].n == 0 {
                    return Err(Error::Invalid("lacunary exponents must be positive".into()));
                }
                for w in nodes.windows(2) {
                    if w[1].n as f64 / w[0].n as f64 <= 1.0 {
                        return Err(Error::Invalid(format!(
                            "lacunary ratio n_(k+1)/n_k = {}/{} is not > 1",
                            w[1].n, w[0].n
                        )));
                    }
                }
                Ok(())
            }
            RationalBump { eps, a, theta0, a_minus_1 } => {
                let excess = a_minus_1.unwrap_or(a - 1.0);
                if !(*eps > 0.0) || !theta0.is_finite() {
                    return Err(Error::Invalid("RationalBump needs eps > 0".into()));
                }
                if !(excess > 0.0) || !(excess.is_finite()) {
                    return Err(Error::Invalid(format!(
                        "RationalBump pole must lie outside the closed disc (a - 1 = {excess})"
                    )));
                }
                if let Some(e) = a_minus_1 {
                    if (1.0 + e - a).abs() > 4.0 * f64::EPSILON * a.abs() {
                        return Err(Error::Invalid("a and a_minus_1 disagree".into()));
                    }
                }
                Ok(())
            }
            Scaled { inner, r } => {
                if !(*r > 0.0 && *r <= 1.0) {
                    return Err(Error::Domain(format!("Scaled radius {r} outside (0, 1]")));
                }
                inner.validate()
            }
            Rotated { inner, phi } => {
                if !phi.is_finite() {
                    return Err(Error::Invalid("non-finite rotation".into()));
                }
                inner.validate()
            }
            Sum { terms } => terms.iter().try_for_each(|t| t.function.validate()),
        }
    }

    /// Parse a JSON function spec and validate it.
    pub fn from_json(s: &str) -> Result<Self> {
        let f: AnalyticFunction = serde_json::from_str(s)?;
        f.validate()?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function specs always serialize")
    }

    /// True if some term has a boundary singularity at its own angle 0 that
    /// is not pushed inside by a dilation.
    fn has_boundary_singularity_at_one(&self) -> bool {
        use AnalyticFunction::*;
        match self {
            PowerSingularity { alpha } => *alpha > 0.0,
            CesaroPower { .. } => true,
            Rotated { inner, phi } => wrap_angle(*phi) == 0.0 && inner.has_boundary_singularity_at_one(),
            Sum { terms } => terms.iter().any(|t| t.function.has_boundary_singularity_at_one()),
            _ => false,
        }
    }

    fn check_point(&self, z: Complex64) -> Result<Point> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Domain("non-finite point".into()));
        }
        if z == Complex64::new(1.0, 0.0) && self.has_boundary_singularity_at_one() {
            return Err(Error::Branch("z = 1 is a branch point".into()));
        }
        if z.norm() >= 1.0 {
            return Err(Error::Domain(format!("|z| = {} is not < 1", z.norm())));
        }
        Ok(Point::from_z(z))
    }

    /// `f(z)` for `|z| < 1`.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        let pt = self.check_point(z)?;
        self.checked_value(&pt)
    }

    /// `f((1 - x) e^{iθ})` for `x ∈ (0, 1]`.
    pub fn evaluate_polar(&self, x: f64, theta: f64) -> Result<Complex64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain(format!("boundary distance {x} outside (0, 1]")));
        }
        self.checked_value(&Point::polar(x, Ray::new(theta)))
    }

    fn checked_value(&self, pt: &Point) -> Result<Complex64> {
        let v = self.value_at(pt);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Branch(format!("non-finite value at z = {}", pt.z)))
        }
    }

    /// Evaluation at a validated interior point.
    pub fn value_at(&self, pt: &Point) -> Complex64 {
        use AnalyticFunction::*;
        match self {
            Monomial { n } => pt.z.powu(*n),
            TaylorPolynomial { coeffs } => horner(coeffs, pt.z),
            PowerSingularity { alpha } => {
                if *alpha == 0.0 {
                    Complex64::new(1.0, 0.0)
                } else {
                    (-*alpha * pt.one_minus_z().ln()).exp()
                }
            }
            CesaroPower { n, alpha } => {
                if *n == 0 {
                    return Complex64::new(1.0, 0.0);
                }
                let w = one_minus_power(pt, (*n + 1) as f64);
                let lg = w.ln() - pt.one_minus_z().ln();
                assert!(lg.im.abs() < PI, "CesaroPower argument crossed the branch cut");
                (lg / *alpha).exp()
            }
            Lacunary { nodes } => {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut prev = 0u64;
                let mut zp = Complex64::new(1.0, 0.0);
                for node in nodes {
                    zp *= power_of(pt.z, node.n - prev);
                    prev = node.n;
                    acc += node.a * zp;
                }
                acc
            }
            RationalBump { eps, a, theta0, a_minus_1 } => {
                let d = bump_denominator(pt, a_minus_1.unwrap_or(a - 1.0), *theta0);
                *eps / (d * d)
            }
            Scaled { inner, r } => inner.value_at(&pt.scaled(*r)),
            Rotated { inner, phi } => inner.value_at(&pt.rotated(*phi)),
            Sum { terms } => terms.iter().map(|t| t.weight * t.function.value_at(pt)).sum(),
        }
    }

    /// `|f|^p` at an interior point, with fast paths for the singular families.
    pub fn modulus_pow(&self, pt: &Point, p: f64) -> f64 {
        use AnalyticFunction::*;
        match self {
            Monomial { n } => ((*n as f64) * p * (-pt.x).ln_1p()).exp(),
            PowerSingularity { alpha } => pt.one_minus_z().norm_sqr().powf(-0.5 * alpha * p),
            CesaroPower { n, alpha } if *n > 0 => {
                let w = one_minus_power(pt, (*n + 1) as f64);
                (w.norm_sqr() / pt.one_minus_z().norm_sqr()).powf(0.5 * p / alpha)
            }
            Scaled { inner, r } => inner.modulus_pow(&pt.scaled(*r), p),
            Rotated { inner, phi } => inner.modulus_pow(&pt.rotated(*phi), p),
            _ => {
                let m = self.value_at(pt).norm();
                if p == 1.0 {
                    m
                } else {
                    m.powf(p)
                }
            }
        }
    }

    /// `f'(z)` from closed forms.
    pub fn derivative_at(&self, z: Complex64) -> Result<Complex64> {
        let pt = self.check_point(z)?;
        let v = self.derivative_value(&pt);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::Branch(format!("non-finite derivative at z = {z}")))
        }
    }

    fn derivative_value(&self, pt: &Point) -> Complex64 {
        use AnalyticFunction::*;
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Monomial { n } => {
                if *n == 0 {
                    zero
                } else {
                    pt.z.powu(*n - 1) * (*n as f64)
                }
            }
            TaylorPolynomial { coeffs } => {
                let d: Vec<Complex64> =
                    coeffs.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
                horner(&d, pt.z)
            }
            PowerSingularity { alpha } => {
                if *alpha == 0.0 {
                    zero
                } else {
                    *alpha * (-(*alpha + 1.0) * pt.one_minus_z().ln()).exp()
                }
            }
            CesaroPower { n, alpha } => {
                if *n == 0 {
                    return zero;
                }
                let f = self.value_at(pt);
                let omz = pt.one_minus_z();
                let logderiv = if omz.norm() < 1e-3 {
                    let mut g = zero;
                    let mut dg = zero;
                    let mut zk = Complex64::new(1.0, 0.0);
                    for k in 0..=*n {
                        g += zk;
                        if k < *n {
                            dg += zk * (k + 1) as f64;
                        }
                        zk *= pt.z;
                    }
                    dg / g
                } else {
                    let w = one_minus_power(pt, (*n + 1) as f64);
                    let zn = power_of(pt.z, *n);
                    1.0 / omz - zn * ((*n + 1) as f64) / w
                };
                f * logderiv / *alpha
            }
            Lacunary { nodes } => nodes
                .iter()
                .map(|nd| nd.a * (nd.n as f64) * power_of(pt.z, nd.n - 1))
                .sum(),
            RationalBump { eps, a, theta0, a_minus_1 } => {
                let d = bump_denominator(pt, a_minus_1.unwrap_or(a - 1.0), *theta0);
                -2.0 * *eps * Complex64::from_polar(1.0, -*theta0) / (d * d * d)
            }
            Scaled { inner, r } => *r * inner.derivative_value(&pt.scaled(*r)),
            Rotated { inner, phi } => {
                Complex64::from_polar(1.0, *phi) * inner.derivative_value(&pt.rotated(*phi))
            }
            Sum { terms } => {
                terms.iter().map(|t| t.weight * t.function.derivative_value(pt)).sum()
            }
        }
    }

    /// `f'(z)` by trapezoidal quadrature of the Cauchy integral on the circle
    /// of radius `(1 - |z|)/2` about `z`, doubling from 64 nodes until two
    /// successive estimates agree to `1e-10`.
    pub fn derivative_cauchy(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        let rho = 0.5 * (1.0 - z.norm());
        let estimate = |m: usize| -> Result<Complex64> {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let u = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
                acc += self.evaluate(z + rho * u)? * u.conj();
            }
            Ok(acc / (m as f64 * rho))
        };
        let mut m = 64;
        let mut prev = estimate(m)?;
        loop {
            m *= 2;
            let next = estimate(m)?;
            if (next - prev).norm() <= 1e-10 * next.norm().max(1.0) || m >= 1 << 16 {
                return Ok(next);
            }
            prev = next;
        }
    }

    /// `a_0..a_N` from FFT samples on the circle of radius `r`.
    pub fn taylor_coefficients(&self, n: usize, r: f64) -> Result<Vec<Complex64>> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("sampling radius {r} outside (0, 1)")));
        }
        // enough nodes that aliased coefficients are damped by r^m < 1e-16
        let alias = (-37.0 / r.ln()).ceil().min((1u64 << 20) as f64) as usize;
        let m = (4 * (n + 1)).max(alias).next_power_of_two();
        let mut buf = Vec::with_capacity(m);
        for j in 0..m {
            let theta = 2.0 * PI * j as f64 / m as f64;
            buf.push(self.evaluate(Complex64::from_polar(r, theta))?);
        }
        FftPlanner::new().plan_fft_forward(m).process(&mut buf);
        let mut rk = 1.0;
        let mut out = Vec::with_capacity(n + 1);
        for c in buf.iter().take(n + 1) {
            out.push(*c / (m as f64 * rk));
            rk *= r;
        }
        Ok(out)
    }

    /// Boundary points where the modulus concentrates.
    pub fn hotspots(&self) -> Vec<Hotspot> {
        use AnalyticFunction::*;
        match self {
            PowerSingularity { alpha } if *alpha > 0.0 => vec![Hotspot { angle: 0.0, scale: 0.0 }],
            CesaroPower { n, .. } if *n > 0 => {
                vec![Hotspot { angle: 0.0, scale: 1.0 / (*n as f64 + 1.0) }]
            }
            RationalBump { a, theta0, a_minus_1, .. } => vec![Hotspot {
                angle: wrap_angle(*theta0),
                scale: a_minus_1.unwrap_or(a - 1.0),
            }],
            Scaled { inner, r } => inner
                .hotspots()
                .into_iter()
                .map(|h| Hotspot { angle: h.angle, scale: h.scale + (1.0 - r) })
                .collect(),
            Rotated { inner, phi } => inner
                .hotspots()
                .into_iter()
                .map(|h| Hotspot { angle: wrap_angle(h.angle - phi), scale: h.scale })
                .collect(),
            Sum { terms } => {
                let mut all: Vec<Hotspot> = Vec::new();
                for t in terms {
                    for h in t.function.hotspots() {
                        if let Some(e) = all.iter_mut().find(|e| e.angle == h.angle) {
                            e.scale = e.scale.min(h.scale);
                        } else {
                            all.push(h);
                        }
                    }
                }
                all
            }
            _ => Vec::new(),
        }
    }

    /// Rough upper bound for `sup |f|` on the disc where one is known in
    /// closed form; `None` for unbounded families.
    pub fn sup_bound(&self) -> Option<f64> {
        use AnalyticFunction::*;
        match self {
            Monomial { .. } => Some(1.0),
            TaylorPolynomial { coeffs } => Some(coeffs.iter().map(|c| c.norm()).sum()),
            PowerSingularity { alpha } if *alpha <= 0.0 => Some(2f64.powf(-alpha)),
            Lacunary { nodes } => Some(nodes.iter().map(|n| n.a.norm()).sum()),
            RationalBump { eps, a, a_minus_1, .. } => {
                let e = a_minus_1.unwrap_or(a - 1.0);
                Some(eps / (e * e))
            }
            Scaled { inner, r } => inner.sup_bound().or_else(|| {
                if let PowerSingularity { alpha } = inner.as_ref() {
                    Some((1.0 - r).powf(-alpha))
                } else {
                    None
                }
            }),
            Rotated { inner, .. } => inner.sup_bound(),
            Sum { terms } => terms
                .iter()
                .map(|t| t.function.sup_bound().map(|b| b * t.weight.norm()))
                .sum(),
            _ => None,
        }
    }
}

/// `f(z)`.
pub fn evaluate(f: &AnalyticFunction, z: Complex64) -> Result<Complex64> {
    f.evaluate(z)
}

/// `f'(z)`.
pub fn derivative_at(f: &AnalyticFunction, z: Complex64) -> Result<Complex64> {
    f.derivative_at(z)
}

/// Taylor coefficients `a_0..a_N` sampled on the circle of radius `r`.
pub fn taylor_coefficients(f: &AnalyticFunction, n: usize, r: f64) -> Result<Vec<Complex64>> {
    f.taylor_coefficients(n, r)
}

/// `f_r(z) = f(rz)`.
pub fn dilate(f: &AnalyticFunction, r: f64) -> Result<AnalyticFunction> {
    f.dilate(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluate_examples() {
        let v = AnalyticFunction::monomial(3).evaluate(c(0.5, 0.0)).unwrap();
        assert!((v - c(0.125, 0.0)).norm() < 1e-16);
        let v = AnalyticFunction::power_singularity(1.0).evaluate(c(0.0, 0.0)).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-16);
        let v = AnalyticFunction::cesaro_power(2, 1.0).unwrap().evaluate(c(0.5, 0.0)).unwrap();
        assert!((v - c(1.75, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn domain_and_branch_errors() {
        let f = AnalyticFunction::power_singularity(0.5);
        assert!(matches!(f.evaluate(c(1.0, 0.0)), Err(Error::Branch(_))));
        assert!(matches!(f.evaluate(c(0.0, 1.0)), Err(Error::Domain(_))));
        let m = AnalyticFunction::monomial(2);
        assert!(matches!(m.evaluate(c(1.0, 0.0)), Err(Error::Domain(_))));
        assert!(matches!(m.derivative_at(c(2.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_examples() {
        let d = AnalyticFunction::monomial(2).derivative_at(c(0.5, 0.0)).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
        let d = AnalyticFunction::power_singularity(1.0).derivative_at(c(0.0, 0.0)).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
        let f = AnalyticFunction::taylor(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let d = f.derivative_cauchy(c(0.3, 0.4)).unwrap();
        assert!((d - c(0.6, 0.8)).norm() < 1e-10);
    }

    #[test]
    fn taylor_examples() {
        let a = AnalyticFunction::monomial(2).taylor_coefficients(3, 0.5).unwrap();
        for (k, v) in a.iter().enumerate() {
            let want = if k == 2 { 1.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-12);
        }
        let a = AnalyticFunction::power_singularity(1.0).taylor_coefficients(2, 0.5).unwrap();
        for v in a {
            assert!((v - c(1.0, 0.0)).norm() < 1e-10);
        }
        let s = AnalyticFunction::monomial(1).times(c(2.0, 0.0));
        let a = s.taylor_coefficients(1, 0.9).unwrap();
        assert!(a[0].norm() < 1e-12 && (a[1] - c(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn dilation() {
        let f = AnalyticFunction::monomial(4);
        let g = f.dilate(0.7).unwrap();
        let z = c(0.3, -0.5);
        assert!((g.evaluate(z).unwrap() - (z * 0.7).powu(4)).norm() < 1e-15);
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
        assert!(f.dilate(1.5).is_err());
    }

    #[test]
    fn lacunary_validation() {
        let node = |n| LacunaryNode { n, a: c(1.0, 0.0) };
        assert!(AnalyticFunction::lacunary(vec![node(1), node(2), node(4)]).is_ok());
        assert!(AnalyticFunction::lacunary(vec![node(2), node(2)]).is_err());
        assert!(AnalyticFunction::lacunary(vec![node(4), node(3)]).is_err());
        assert!(AnalyticFunction::lacunary(vec![]).is_err());
    }

    #[test]
    fn bump_is_accurate_near_pole() {
        // pole excess far below one ulp of `a`
        let e = 14f64.powi(-17);
        let f = AnalyticFunction::rational_bump_excess(1.0, e, 0.3).unwrap();
        let v = f.evaluate_polar(e, 0.3).unwrap();
        // denominator at the nearest radial point is -(2e)
        assert!((v.re - 1.0 / (4.0 * e * e)).abs() / v.re < 1e-12);
    }

    #[test]
    fn json_round_trip_examples() {
        let f = AnalyticFunction::sum(vec![
            (c(1.0, -2.0), AnalyticFunction::monomial(2)),
            (
                c(0.5, 0.0),
                AnalyticFunction::power_singularity(0.3).dilate(0.9).unwrap().rotated(0.2),
            ),
        ]);
        let s = f.to_json();
        assert!(s.contains("\"repr\":\"Sum\""));
        assert_eq!(AnalyticFunction::from_json(&s).unwrap(), f);
        let g = AnalyticFunction::from_json(r#"{"repr":"Monomial","n":3}"#).unwrap();
        assert_eq!(g, AnalyticFunction::monomial(3));
        assert!(AnalyticFunction::from_json(r#"{"repr":"RationalBump","eps":1,"a":0.5,"theta0":0}"#)
            .is_err());
    }

    #[test]
    fn cesaro_large_n_matches_geometric_sum() {
        let n = 50u64;
        let f = AnalyticFunction::cesaro_power(n, 2.0).unwrap();
        let z = c(0.95, 0.1);
        let s: Complex64 = (0..=n).map(|k| z.powu(k as u32)).sum();
        let want = s.sqrt();
        assert!((f.evaluate(z).unwrap() - want).norm() < 1e-12 * want.norm());
        let pt = Point::from_z(z);
        assert!((f.modulus_pow(&pt, 3.0) - want.norm().powi(3)).abs() < 1e-11 * want.norm().powi(3));
    }
}
