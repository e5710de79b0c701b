//! Analytic test functions, evaluable anywhere on the sphere.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FunkError, Result};
use crate::harmonics::real_harmonic;
use crate::parity::{even_part, odd_part};
use crate::quadrature::sphere_area;
use crate::sphere::{Center, Point, SphereFn};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhantomSpec {
    Constant { value: f64 },
    /// x_index (zero-based).
    Coordinate { index: usize },
    /// Real orthonormal Y_l^m on S².
    Harmonic { l: usize, m: i64 },
    /// exp(−|x − c|²/(2w²)) with c a unit vector.
    GaussianBump { center: Vec<f64>, width: f64 },
    /// exp(d·x).
    ExpLinear { direction: Vec<f64> },
    /// x₃ + x₁x₂/2 on S².
    MixedQuadratic,
    AOdd { base: Box<PhantomSpec>, a: Vec<f64>, k: usize },
    AEven { base: Box<PhantomSpec>, a: Vec<f64>, k: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothness {
    Polynomial,
    Analytic,
}

#[derive(Clone)]
pub struct Phantom {
    pub name: String,
    pub spec: PhantomSpec,
    pub smoothness: Smoothness,
    /// ∫_{Sⁿ} f dσ where known in closed form.
    pub integral: Option<f64>,
    func: Arc<dyn SphereFn>,
}

impl Phantom {
    pub fn function(&self) -> Arc<dyn SphereFn> {
        self.func.clone()
    }
}

impl SphereFn for Phantom {
    fn eval(&self, x: &Point) -> f64 {
        self.func.eval(x)
    }
}

impl std::fmt::Debug for Phantom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Phantom").field("name", &self.name).field("spec", &self.spec).finish()
    }
}

/// Name and description of every phantom kind.
pub fn registry() -> Vec<(&'static str, &'static str)> {
    vec![
        ("constant", "f = value"),
        ("coordinate", "f = x_index (zero-based)"),
        ("harmonic", "real orthonormal spherical harmonic Y_l^m on S^2"),
        ("gaussian_bump", "exp(-|x - center|^2 / (2 width^2))"),
        ("exp_linear", "exp(direction . x)"),
        ("mixed_quadratic", "x3 + x1 x2 / 2 on S^2"),
        ("a_odd", "(base - W_a base)/2 for center a and section dimension k"),
        ("a_even", "(base + W_a base)/2 for center a and section dimension k"),
    ]
}

impl PhantomSpec {
    /// Parses a JSON description, reporting unknown kinds as invalid input.
    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        serde_json::from_value(value.clone()).map_err(|e| FunkError::invalid(format!("phantom: {e}")))
    }
}

fn check_dim(v: &[f64], dim: usize, what: &str) -> Result<()> {
    if v.len() != dim {
        return Err(FunkError::invalid(format!(
            "{what} has {} coordinates, expected {dim}",
            v.len()
        )));
    }
    Ok(())
}

/// Builds the phantom on Sⁿ ⊂ R^dim.
pub fn make_phantom(spec: &PhantomSpec, dim: usize) -> Result<Phantom> {
    let n = dim.checked_sub(1).ok_or_else(|| FunkError::invalid("dimension must be >= 1"))?;
    let (name, smoothness, integral, func): (String, Smoothness, Option<f64>, Arc<dyn SphereFn>) = match spec {
        PhantomSpec::Constant { value } => {
            let v = *value;
            (
                "constant".into(),
                Smoothness::Polynomial,
                Some(v * sphere_area(n)),
                Arc::new(move |_: &Point| v),
            )
        }
        PhantomSpec::Coordinate { index } => {
            let i = *index;
            if i >= dim {
                return Err(FunkError::invalid(format!("coordinate index {i} out of range")));
            }
            (
                format!("x{}", i + 1),
                Smoothness::Polynomial,
                Some(0.0),
                Arc::new(move |x: &Point| x[i]),
            )
        }
        PhantomSpec::Harmonic { l, m } => {
            if dim != 3 {
                return Err(FunkError::Unsupported("harmonic phantoms are defined on S²".into()));
            }
            if m.unsigned_abs() as usize > *l {
                return Err(FunkError::invalid("harmonic needs |m| <= l"));
            }
            let (l, m) = (*l, *m);
            let integral = if l == 0 { (4.0 * PI).sqrt() } else { 0.0 };
            (
                format!("Y_{l}^{m}"),
                Smoothness::Polynomial,
                Some(integral),
                Arc::new(move |x: &Point| real_harmonic(l, m, x)),
            )
        }
        PhantomSpec::GaussianBump { center, width } => {
            check_dim(center, dim, "bump center")?;
            if !(*width > 0.0) {
                return Err(FunkError::invalid("bump width must be positive"));
            }
            let c = Point::from_column_slice(center);
            if (c.norm() - 1.0).abs() > 1e-12 {
                return Err(FunkError::invalid("bump center must be a unit vector"));
            }
            let w2 = width * width;
            let integral = (dim == 3).then(|| 2.0 * PI * w2 * (1.0 - (-2.0 / w2).exp()));
            (
                "gaussian_bump".into(),
                Smoothness::Analytic,
                integral,
                Arc::new(move |x: &Point| (-(x - &c).norm_squared() / (2.0 * w2)).exp()),
            )
        }
        PhantomSpec::ExpLinear { direction } => {
            check_dim(direction, dim, "direction")?;
            let d = Point::from_column_slice(direction);
            let r = d.norm();
            let integral = (dim == 3).then(|| if r == 0.0 { 4.0 * PI } else { 4.0 * PI * r.sinh() / r });
            (
                "exp_linear".into(),
                Smoothness::Analytic,
                integral,
                Arc::new(move |x: &Point| d.dot(x).exp()),
            )
        }
        PhantomSpec::MixedQuadratic => {
            if dim != 3 {
                return Err(FunkError::Unsupported("mixed_quadratic is defined on S²".into()));
            }
            (
                "mixed_quadratic".into(),
                Smoothness::Polynomial,
                Some(0.0),
                Arc::new(|x: &Point| x[2] + 0.5 * x[0] * x[1]),
            )
        }
        PhantomSpec::AOdd { base, a, k } | PhantomSpec::AEven { base, a, k } => {
            check_dim(a, dim, "center")?;
            let inner = make_phantom(base, dim)?;
            let center = Center::from_slice(a)?;
            let odd = matches!(spec, PhantomSpec::AOdd { .. });
            let part: Arc<dyn SphereFn> = if odd {
                Arc::new(odd_part(inner.function(), &center, *k)?)
            } else {
                Arc::new(even_part(inner.function(), &center, *k)?)
            };
            let label = if odd { "a_odd" } else { "a_even" };
            (
                format!("{label}({})", inner.name),
                inner.smoothness,
                None,
                part,
            )
        }
    };
    Ok(Phantom {
        name,
        spec: spec.clone(),
        smoothness,
        integral,
        func,
    })
}
