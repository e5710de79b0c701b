//! The weighted reflection W_a f = ρ_a·(f∘τ_a) and the a-even / a-odd
//! projections f_a^± = (f ± W_a f)/2.

use std::sync::Arc;

use crate::error::{FunkError, Result};
use crate::moebius::{cov_weight_reflection, reflect};
use crate::sphere::{Center, Point, SphereFn};

#[derive(Clone, Debug)]
pub struct WeightedReflection {
    a: Center,
    k: usize,
}

impl WeightedReflection {
    pub fn new(a: Center, k: usize) -> Result<Self> {
        let n = a.ambient_dim() - 1;
        if k == 0 || k > n {
            return Err(FunkError::invalid(format!("section dimension k={k} outside 1..={n}")));
        }
        Ok(WeightedReflection { a, k })
    }

    pub fn center(&self) -> &Center {
        &self.a
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// ρ_a(x) = ((1 − |a|²)/|a − x|²)^{k−1}.
    pub fn rho(&self, x: &Point) -> f64 {
        cov_weight_reflection(&self.a, x, (self.k - 1) as f64)
    }

    pub fn reflect(&self, x: &Point) -> Point {
        reflect(&self.a, x).into_inner()
    }
}

/// (W_a f)(x) = ρ_a(x) f(τ_a x).
pub fn apply_w(w: &WeightedReflection, f: &dyn SphereFn, x: &Point) -> f64 {
    w.rho(x) * f.eval(&w.reflect(x))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PartKind {
    Reflected,
    Even,
    Odd,
}

/// W_a f, f_a^+ or f_a^− as an owned callable.
#[derive(Clone)]
pub struct ParityPart {
    base: Arc<dyn SphereFn>,
    w: WeightedReflection,
    kind: PartKind,
}

impl ParityPart {
    pub fn reflection(&self) -> &WeightedReflection {
        &self.w
    }
}

impl SphereFn for ParityPart {
    fn eval(&self, x: &Point) -> f64 {
        let wf = apply_w(&self.w, self.base.as_ref(), x);
        match self.kind {
            PartKind::Reflected => wf,
            PartKind::Even => 0.5 * (self.base.eval(x) + wf),
            PartKind::Odd => 0.5 * (self.base.eval(x) - wf),
        }
    }
}

pub fn reflected(f: Arc<dyn SphereFn>, w: WeightedReflection) -> ParityPart {
    ParityPart {
        base: f,
        w,
        kind: PartKind::Reflected,
    }
}

pub fn even_part(f: Arc<dyn SphereFn>, a: &Center, k: usize) -> Result<ParityPart> {
    Ok(ParityPart {
        base: f,
        w: WeightedReflection::new(a.clone(), k)?,
        kind: PartKind::Even,
    })
}

pub fn odd_part(f: Arc<dyn SphereFn>, a: &Center, k: usize) -> Result<ParityPart> {
    Ok(ParityPart {
        base: f,
        w: WeightedReflection::new(a.clone(), k)?,
        kind: PartKind::Odd,
    })
}
