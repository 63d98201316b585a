use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::witness::omega_contains;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StolzCheck {
    /// `|1 - z| / (1 - |z|)`
    pub ratio: f64,
    pub ratio_ok: bool,
    /// `|Arg((1-z)/(1-w))| ≤ arctan(1/2)`
    pub arg_bound_ok: bool,
    /// `Re((1-z)/(1-w))² ≥ (3/5) |(1-z)/(1-w)|²`
    pub re_bound_ok: bool,
}

impl StolzCheck {
    pub fn all_ok(&self) -> bool {
        self.ratio_ok && self.arg_bound_ok && self.re_bound_ok
    }
}

/// The three inequalities for a pair of points of `Ω`.
pub fn stolz_lemma_check(z: Complex64, w: Complex64) -> Result<StolzCheck> {
    for (name, v) in [("z", z), ("w", w)] {
        if !omega_contains(v) {
            return Err(Error::Domain(format!("{name} = {v} is not in the region")));
        }
    }
    let one = Complex64::new(1.0, 0.0);
    let (r, t) = (z.norm(), z.arg());
    let h = (0.5 * t).sin();
    // |1 - z|² = (1 - r)² + 4r sin²(θ/2)
    let ratio = (1.0 + 4.0 * r * h * h / ((1.0 - r) * (1.0 - r))).sqrt();
    let arg = (one - z).arg() - (one - w).arg();
    let q = (one - z) / (one - w);
    let q2 = q * q;
    Ok(StolzCheck {
        ratio,
        ratio_ok: (1.0..=1.25f64.sqrt()).contains(&ratio),
        arg_bound_ok: arg.abs() <= 0.5f64.atan(),
        re_bound_ok: q2.re >= 0.6 * q2.norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let z = Complex64::from_polar(0.5, 0.1);
        let c = stolz_lemma_check(z, z).unwrap();
        assert!(c.all_ok() && (c.ratio - 1.0).abs() < 0.12);
        assert!(stolz_lemma_check(Complex64::new(0.5, 0.0), z).is_err());
    }
}
