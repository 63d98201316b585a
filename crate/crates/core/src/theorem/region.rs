use serde::{Deserialize, Serialize};

use crate::exponent::ExtendedExponent;

/// Tolerance for comparisons of reciprocal exponents.
pub const RECIPROCAL_EPS: f64 = 1e-12;

/// Membership of `(p, q)` in the inclusion region `A(p₀, q₀)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionMembership {
    pub contained: bool,
    /// `(p, q) = (β, ∞)` with `1/β = 1/p₀ + 1/q₀` and `p₀, q₀` finite.
    pub excluded_point: bool,
}

impl RegionMembership {
    /// Whether `RM(p₀, q₀) ⊂ RM(p, q)`.
    pub fn inclusion_holds(&self) -> bool {
        self.contained && !self.excluded_point
    }
}

/// `1/p + 1/q ≥ 1/p₀ + 1/q₀` and `p ≤ p₀`, with the excluded point flagged.
pub fn region_a_contains(
    p0: ExtendedExponent,
    q0: ExtendedExponent,
    p: ExtendedExponent,
    q: ExtendedExponent,
) -> RegionMembership {
    let s0 = p0.reciprocal() + q0.reciprocal();
    let s = p.reciprocal() + q.reciprocal();
    let contained = s >= s0 - RECIPROCAL_EPS && p.reciprocal() >= p0.reciprocal() - RECIPROCAL_EPS;
    let excluded_point = !p0.is_infinite()
        && !q0.is_infinite()
        && q.is_infinite()
        && (p.reciprocal() - s0).abs() <= RECIPROCAL_EPS;
    RegionMembership { contained, excluded_point }
}

/// `RM(p₀, q₀) ⊂ RM(p, q)`.
pub fn inclusion_predicate(
    p0: ExtendedExponent,
    q0: ExtendedExponent,
    p: ExtendedExponent,
    q: ExtendedExponent,
) -> bool {
    region_a_contains(p0, q0, p, q).inclusion_holds()
}

/// Compactness of the inclusion: `1/p + 1/q > 1/p₀ + 1/q₀` and `p < p₀`.
pub fn compactness_predicate(
    p0: ExtendedExponent,
    q0: ExtendedExponent,
    p: ExtendedExponent,
    q: ExtendedExponent,
) -> bool {
    let s0 = p0.reciprocal() + q0.reciprocal();
    let s = p.reciprocal() + q.reciprocal();
    s > s0 + RECIPROCAL_EPS && p.reciprocal() > p0.reciprocal() + RECIPROCAL_EPS
}

/// The exponent grid `{1, 4/3, 2, 4, ∞}`.
pub fn exponent_grid() -> Vec<ExtendedExponent> {
    vec![
        ExtendedExponent::Finite(1.0),
        ExtendedExponent::Finite(4.0 / 3.0),
        ExtendedExponent::Finite(2.0),
        ExtendedExponent::Finite(4.0),
        ExtendedExponent::Infinity,
    ]
}
