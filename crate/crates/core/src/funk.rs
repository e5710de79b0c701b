//! Forward shifted Funk transforms by section quadrature, the operators M_a
//! and N_a, and the factorization F_a = N_a F_o M_a.

use crate::error::{FunkError, Result};
use crate::exec;
use crate::moebius::{reflect, MobiusMap};
use crate::planes::{central_image, map_central_to_plane, section_quadrature, PlaneFn, PlaneThrough};
use crate::sphere::{Center, Point, SphereFn};

const SAME_PLANE_TOL: f64 = 1e-9;
const SAME_CENTER_TOL: f64 = 1e-14;

/// Values g(τ) attached to a list of planes.
#[derive(Clone, Debug)]
pub struct SectionField {
    planes: Vec<PlaneThrough>,
    values: Vec<f64>,
}

impl SectionField {
    pub fn new(planes: Vec<PlaneThrough>, values: Vec<f64>) -> Result<Self> {
        if planes.len() != values.len() {
            return Err(FunkError::DimensionMismatch {
                expected: planes.len(),
                actual: values.len(),
            });
        }
        Ok(SectionField { planes, values })
    }

    pub fn planes(&self) -> &[PlaneThrough] {
        &self.planes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// max |self − other| over planes, which must be the same list.
    pub fn max_abs_diff(&self, other: &SectionField) -> Result<f64> {
        if self.len() != other.len() {
            return Err(FunkError::DimensionMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (x, y)| m.max((x - y).abs())))
    }
}

fn check_center(planes: &[PlaneThrough], a: &Center) -> Result<()> {
    for (index, plane) in planes.iter().enumerate() {
        let c = plane.center().coords();
        if c.len() != a.ambient_dim() || (c - a.coords()).amax() > SAME_CENTER_TOL {
            return Err(FunkError::PlaneFamilyMismatch { index });
        }
    }
    Ok(())
}

/// (F_a f)(τ) = ∫_{Sⁿ∩τ} f dσ for every plane τ through a.
///
/// For k = 1 the section is a point pair and the value is the sum of f at
/// both points. A [`crate::sphere::GridFunction`] must be passed through an
/// interpolant such as `nearest_node_interpolant`.
pub fn forward_funk(
    f: &dyn SphereFn,
    a: &Center,
    planes: &[PlaneThrough],
    section_resolution: usize,
) -> Result<SectionField> {
    if section_resolution < 8 {
        return Err(FunkError::invalid("section resolution must be >= 8"));
    }
    check_center(planes, a)?;
    let values = exec::map_slice(planes, |plane| -> Result<f64> {
        Ok(section_quadrature(plane, section_resolution)?.integrate(f))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    SectionField::new(planes.to_vec(), values)
}

/// F_a f as a callable over planes, for consumers that need off-sample
/// section values.
pub fn forward_funk_fn<'f>(f: &'f dyn SphereFn, section_resolution: usize) -> impl PlaneFn + 'f {
    move |plane: &PlaneThrough| {
        section_quadrature(plane, section_resolution)
            .map(|q| q.integrate(f))
            .unwrap_or(f64::NAN)
    }
}

/// (F_a f)(L_{a,x}) = f(x) + f(τ_a x) for the line through a and x.
pub fn point_pair_transform(f: &dyn SphereFn, a: &Center, x: &Point) -> f64 {
    f.eval(x) + f.eval(reflect(a, x).as_point())
}

/// (M_a f)(y) = (s_a/(1 − a·y))^{k−1} f(φ_a y). M_o is the identity.
pub fn apply_m(a: &Center, k: usize, f: &dyn SphereFn, y: &Point) -> f64 {
    if a.is_origin() {
        return f.eval(y);
    }
    let weight = (a.s() / (1.0 - a.coords().dot(y))).powi(k as i32 - 1);
    weight * f.eval(&MobiusMap::new(a.clone()).apply(y))
}

/// Exact inverse of [`apply_m`]: ((1 − a·φ_a x)/s_a)^{k−1} u(φ_a x).
pub fn apply_m_inverse(a: &Center, k: usize, u: &dyn SphereFn, x: &Point) -> f64 {
    if a.is_origin() {
        return u.eval(x);
    }
    let y = MobiusMap::new(a.clone()).apply(x);
    let weight = ((1.0 - a.coords().dot(&y)) / a.s()).powi(k as i32 - 1);
    weight * u.eval(&y)
}

/// M_a f as a callable.
pub fn m_transform<'f>(a: &Center, k: usize, f: &'f dyn SphereFn) -> impl SphereFn + 'f {
    let a = a.clone();
    move |y: &Point| apply_m(&a, k, f, y)
}

/// M_a⁻¹ u as a callable.
pub fn m_inverse_transform<'f>(a: &Center, k: usize, u: &'f dyn SphereFn) -> impl SphereFn + 'f {
    let a = a.clone();
    move |x: &Point| apply_m_inverse(&a, k, u, x)
}

/// (N_a Φ)(τ) = Φ(φ_a τ) on the planes `targets` through a. `phi` must hold
/// the central images of `targets`, index by index.
pub fn apply_n(a: &Center, phi: &SectionField, targets: &[PlaneThrough]) -> Result<SectionField> {
    if phi.len() != targets.len() {
        return Err(FunkError::DimensionMismatch {
            expected: targets.len(),
            actual: phi.len(),
        });
    }
    check_center(targets, a)?;
    let origin = Center::origin(a.ambient_dim());
    check_center(phi.planes(), &origin)?;
    let mismatch = exec::map_indices(targets.len(), |i| {
        !central_image(&targets[i]).same_set(&phi.planes[i], SAME_PLANE_TOL)
    });
    if let Some(index) = mismatch.iter().position(|&bad| bad) {
        return Err(FunkError::PlaneFamilyMismatch { index });
    }
    SectionField::new(targets.to_vec(), phi.values.clone())
}

/// (N_a⁻¹ g)(ζ) = g(φ_a ζ): the same values carried to the central images.
pub fn apply_n_inverse(a: &Center, g: &SectionField) -> Result<SectionField> {
    check_center(g.planes(), a)?;
    let planes = exec::map_slice(g.planes(), central_image);
    SectionField::new(planes, g.values.clone())
}

/// N_a Φ as a callable over planes through a, for Φ a callable over central
/// planes.
pub fn n_transform<'p>(phi: &'p dyn PlaneFn) -> impl PlaneFn + 'p {
    move |plane: &PlaneThrough| phi.eval(&central_image(plane))
}

/// N_a⁻¹ g as a callable over central planes, for g a callable over planes
/// through a.
pub fn n_inverse_transform<'p>(a: &Center, g: &'p dyn PlaneFn) -> impl PlaneFn + 'p {
    let a = a.clone();
    move |zeta: &PlaneThrough| g.eval(&map_central_to_plane(&a, zeta.frame()))
}

/// N_a F_o M_a f on the planes through a.
pub fn factorized_funk(
    f: &dyn SphereFn,
    a: &Center,
    planes: &[PlaneThrough],
    section_resolution: usize,
) -> Result<SectionField> {
    check_center(planes, a)?;
    let k = match planes.first() {
        Some(p) => p.k(),
        None => return SectionField::new(Vec::new(), Vec::new()),
    };
    let origin = Center::origin(a.ambient_dim());
    let central = exec::map_slice(planes, central_image);
    let mf = m_transform(a, k, f);
    let phi = forward_funk(&mf, &origin, &central, section_resolution)?;
    apply_n(a, &phi, planes)
}
