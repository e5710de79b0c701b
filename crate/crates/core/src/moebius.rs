//! The Möbius automorphism φ_a of the unit ball, the chord reflection τ_a,
//! and the Jacobian factors that come with them.
//!
//! φ_a x = (a − P_a x − s_a Q_a x) / (1 − x·a), where P_a projects onto the
//! direction of a and Q_a = I − P_a. Using (1 − s_a)/|a|² = 1/(1 + s_a) the
//! numerator is evaluated as a − s_a x − (a·x)/(1 + s_a)·a, which is regular
//! at a = o and yields φ_o x = −x there (the limit along any direction).

use crate::sphere::{Center, Point, SpherePoint};

#[derive(Clone, Debug)]
pub struct MobiusMap {
    center: Center,
}

impl MobiusMap {
    pub fn new(center: Center) -> Self {
        MobiusMap { center }
    }

    pub fn center(&self) -> &Center {
        &self.center
    }

    /// P_a x. Zero at a = o.
    pub fn project(&self, x: &Point) -> Point {
        let a = self.center.coords();
        let n2 = a.norm_squared();
        if n2 == 0.0 {
            return Point::zeros(x.len());
        }
        a * (a.dot(x) / n2)
    }

    /// Q_a x = x − P_a x.
    pub fn complement(&self, x: &Point) -> Point {
        x - self.project(x)
    }

    pub fn apply(&self, x: &Point) -> Point {
        let a = self.center.coords();
        let s = self.center.s();
        let ax = a.dot(x);
        let denom = 1.0 - ax;
        // |x| ≤ 1 and |a| < 1 give 1 − x·a ≥ 1 − |a| > 0
        debug_assert!(denom >= (1.0 - a.norm()) * (1.0 - 1e-12) - 1e-15);
        (a * (1.0 - ax / (1.0 + s)) - x * s) / denom
    }

    pub fn apply_sphere(&self, x: &SpherePoint) -> SpherePoint {
        SpherePoint::renormalized(self.apply(x))
    }
}

pub fn mobius_apply(m: &MobiusMap, x: &Point) -> Point {
    m.apply(x)
}

/// τ_a x: the second intersection of the line through x and a with Sⁿ.
pub fn reflect(a: &Center, x: &Point) -> SpherePoint {
    let ac = a.coords();
    let diff = x - ac;
    let d2 = diff.norm_squared();
    let v = (x * (a.norm_sq() - 1.0) + ac * (2.0 * (1.0 - x.dot(ac)))) / d2;
    SpherePoint::renormalized(v)
}

/// s_aⁿ / (1 − a·y)ⁿ, the Jacobian of φ_a on Sⁿ.
pub fn cov_weight_mobius(a: &Center, y: &Point, exponent: i32) -> f64 {
    (a.s() / (1.0 - a.coords().dot(y))).powi(exponent)
}

/// ((1 − |a|²)/|a − x|²)^power. With power = n this is the Jacobian of τ_a.
pub fn cov_weight_reflection(a: &Center, x: &Point, power: f64) -> f64 {
    let base = (1.0 - a.norm_sq()) / (a.coords() - x).norm_squared();
    if power.fract() == 0.0 && power.abs() < i32::MAX as f64 {
        base.powi(power as i32)
    } else {
        base.powf(power)
    }
}
