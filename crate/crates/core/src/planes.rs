//! Affine k-planes through an interior center, encoded by orthonormal
//! frames, and the bijection between planes through a and central planes
//! induced by φ_a.
//!
//! A plane through a is τ = {x : ξ'x = ξ'a} with ξ an (n+1)×(n+1−k)
//! orthonormal frame spanning the normal space. Frames are only defined up to
//! a right orthogonal factor, so planes are compared as sets.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{FunkError, Result};
use crate::sphere::{orthonormal_complement, Center, Point, SectionSphereQuad};

const ORTHO_TOL: f64 = 1e-12;
const EIGEN_FLOOR: f64 = 1e-14;

/// Orthonormal normal frame ξ of a k-plane in Rⁿ⁺¹.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    xi: DMatrix<f64>,
}

impl Frame {
    /// Accepts a matrix with orthonormal columns (ξ'ξ = I to 1e−12).
    pub fn new(xi: DMatrix<f64>) -> Result<Self> {
        if xi.ncols() == 0 || xi.ncols() >= xi.nrows() {
            return Err(FunkError::invalid(format!(
                "frame must have between 1 and n columns, got {}x{}",
                xi.nrows(),
                xi.ncols()
            )));
        }
        let gram = xi.transpose() * &xi;
        let dev = (gram - DMatrix::identity(xi.ncols(), xi.ncols())).amax();
        if dev > ORTHO_TOL {
            return Err(FunkError::invalid(format!("frame is not orthonormal (deviation {dev:.2e})")));
        }
        Ok(Frame { xi })
    }

    /// Orthonormalize arbitrary full-rank columns (thin QR).
    pub fn orthonormalize(m: DMatrix<f64>) -> Result<Self> {
        let cols = m.ncols();
        let qr = m.qr();
        let q = qr.q().columns(0, cols).into_owned();
        Frame::new(q)
    }

    /// Frame of a single unit normal (k = n).
    pub fn from_normal(normal: &Point) -> Result<Self> {
        Frame::orthonormalize(DMatrix::from_column_slice(normal.len(), 1, normal.as_slice()))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.xi
    }

    pub fn ambient_dim(&self) -> usize {
        self.xi.nrows()
    }

    /// Dimension k of the plane.
    pub fn k(&self) -> usize {
        self.xi.nrows() - self.xi.ncols()
    }

    /// Orthogonal projector onto the normal space, ξξ'.
    pub fn normal_projector(&self) -> DMatrix<f64> {
        &self.xi * self.xi.transpose()
    }
}

/// A k-plane τ through the center a.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneThrough {
    center: Center,
    frame: Frame,
}

impl PlaneThrough {
    pub fn new(center: Center, frame: Frame) -> Result<Self> {
        if center.ambient_dim() != frame.ambient_dim() {
            return Err(FunkError::DimensionMismatch {
                expected: center.ambient_dim(),
                actual: frame.ambient_dim(),
            });
        }
        Ok(PlaneThrough { center, frame })
    }

    pub fn center(&self) -> &Center {
        &self.center
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn k(&self) -> usize {
        self.frame.k()
    }

    /// |ξ'x − ξ'a|, zero exactly on the plane.
    pub fn residual(&self, x: &Point) -> f64 {
        (self.frame.xi.transpose() * (x - self.center.coords())).norm()
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.residual(x) <= 1e-12
    }

    /// Same affine plane as a set: equal normal spaces and `other`'s center
    /// lies on `self`.
    pub fn same_set(&self, other: &PlaneThrough, tol: f64) -> bool {
        if self.frame.xi.shape() != other.frame.xi.shape() {
            return false;
        }
        let dp = (self.frame.normal_projector() - other.frame.normal_projector()).amax();
        dp <= tol && self.residual(other.center.coords()) <= tol
    }
}

/// A real-valued function of planes (e.g. a Funk transform as a callable).
pub trait PlaneFn: Send + Sync {
    fn eval(&self, plane: &PlaneThrough) -> f64;
}

impl<F> PlaneFn for F
where
    F: Fn(&PlaneThrough) -> f64 + Send + Sync,
{
    fn eval(&self, plane: &PlaneThrough) -> f64 {
        self(plane)
    }
}

/// Center, radius and tangent frame of the section Sⁿ ∩ τ.
#[derive(Clone, Debug)]
pub struct SectionGeometry {
    pub center: Point,
    pub radius: f64,
    pub tangent: DMatrix<f64>,
}

impl SectionGeometry {
    pub fn quadrature(&self, resolution: usize) -> Result<SectionSphereQuad> {
        SectionSphereQuad::new(self.center.clone(), self.radius, self.tangent.clone(), resolution)
    }
}

/// The section of Sⁿ by τ is the (k−1)-sphere centered at ξ(ξ'a) with radius
/// √(1 − |ξ'a|²).
pub fn section_geometry(plane: &PlaneThrough) -> SectionGeometry {
    let xi = plane.frame.matrix();
    let offsets = xi.transpose() * plane.center.coords();
    let center = xi * &offsets;
    let radius = (1.0 - offsets.norm_squared()).max(0.0).sqrt();
    SectionGeometry {
        center,
        radius,
        tangent: orthonormal_complement(xi),
    }
}

pub fn section_quadrature(plane: &PlaneThrough, resolution: usize) -> Result<SectionSphereQuad> {
    section_geometry(plane).quadrature(resolution)
}

/// Inverse square root of an SPD matrix via its eigendecomposition.
fn inv_sqrt_spd(m: DMatrix<f64>) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(m);
    let d = eig.eigenvalues.map(|l| 1.0 / l.max(EIGEN_FLOOR).sqrt());
    &eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose()
}

/// Aξ with A = s_a P_a + Q_a.
fn apply_a(a: &Center, xi: &DMatrix<f64>) -> DMatrix<f64> {
    let ac = a.coords();
    let proj = ac.transpose() * xi; // 1 × m
    xi - (ac * proj) / (1.0 + a.s())
}

/// A₁η with A₁ = P_a + s_a Q_a.
fn apply_a1(a: &Center, eta: &DMatrix<f64>) -> DMatrix<f64> {
    let ac = a.coords();
    let proj = ac.transpose() * eta;
    eta * a.s() + (ac * proj) / (1.0 + a.s())
}

/// α = (Aξ)'(Aξ). Its determinant equals 1 − |ξ'a|².
pub fn plane_gram(a: &Center, frame: &Frame) -> DMatrix<f64> {
    let axi = apply_a(a, frame.matrix());
    axi.transpose() * axi
}

/// Normal frame η of the central plane φ_a(τ): η = −(Aξ)α^{−1/2}.
pub fn map_plane_to_central(a: &Center, frame: &Frame) -> Frame {
    let axi = apply_a(a, frame.matrix());
    let alpha = axi.transpose() * &axi;
    let eta = -(axi * inv_sqrt_spd(alpha));
    Frame { xi: eta }
}

/// The plane φ_a(ζ) through a for the central plane ζ = {y : η'y = 0}:
/// ξ = (A₁η)β^{−1/2}.
pub fn map_central_to_plane(a: &Center, eta: &Frame) -> PlaneThrough {
    let a1eta = apply_a1(a, eta.matrix());
    let beta = a1eta.transpose() * &a1eta;
    let xi = a1eta * inv_sqrt_spd(beta);
    PlaneThrough {
        center: a.clone(),
        frame: Frame { xi },
    }
}

/// The central plane φ_a(τ) as a [`PlaneThrough`] the origin.
pub fn central_image(plane: &PlaneThrough) -> PlaneThrough {
    let eta = map_plane_to_central(&plane.center, &plane.frame);
    PlaneThrough {
        center: Center::origin(plane.center.ambient_dim()),
        frame: eta,
    }
}

/// The line L_{a,x} through a and the sphere point x, as a 1-plane.
pub fn line_through(a: &Center, x: &Point) -> Result<PlaneThrough> {
    let d = x - a.coords();
    let len = d.norm();
    if len < 1e-14 {
        return Err(FunkError::Degenerate("line through coincident points".into()));
    }
    let dm = DMatrix::from_column_slice(d.len(), 1, (d / len).as_slice());
    PlaneThrough::new(a.clone(), Frame::new(orthonormal_complement(&dm))?)
}

/// Quasi-uniform unit vectors on the upper hemisphere of S² (Fibonacci
/// spiral, z ∈ (0, 1)). Antipodal directions never both appear.
pub fn hemisphere_spiral(count: usize) -> Vec<Point> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = 1.0 - (i as f64 + 0.5) / count as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Point::from_vec(vec![r * phi.cos(), r * phi.sin(), z])
        })
        .collect()
}

/// Deterministic family of `count` k-planes through a.
///
/// On S² the planes come from a hemispherical spiral: unit normals for k = 2,
/// line directions for k = 1. Other (n, k) use random frames from a ChaCha8
/// stream seeded with `seed`.
pub fn sample_plane_family(
    a: &Center,
    n: usize,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<PlaneThrough>> {
    if count == 0 {
        return Err(FunkError::invalid("plane count must be >= 1"));
    }
    if k == 0 || k > n || a.ambient_dim() != n + 1 {
        return Err(FunkError::invalid(format!("need 1 <= k <= n with a in R^(n+1); got n={n}, k={k}")));
    }
    let frames: Vec<Frame> = if n == 2 && k == 2 {
        hemisphere_spiral(count)
            .iter()
            .map(Frame::from_normal)
            .collect::<Result<_>>()?
    } else if n == 2 && k == 1 {
        hemisphere_spiral(count)
            .iter()
            .map(|d| {
                let dm = DMatrix::from_column_slice(3, 1, d.as_slice());
                Frame::new(orthonormal_complement(&dm))
            })
            .collect::<Result<_>>()?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let m = DMatrix::from_fn(n + 1, n + 1 - k, |_, _| StandardNormal.sample(&mut rng));
                Frame::orthonormalize(m)
            })
            .collect::<Result<_>>()?
    };
    frames
        .into_iter()
        .map(|f| PlaneThrough::new(a.clone(), f))
        .collect()
}

/// Planes through a whose central images φ_a(τ) form the central family of
/// [`sample_plane_family`]. Good sampling for inversion, which works on the
/// central side.
pub fn pullback_family(
    a: &Center,
    n: usize,
    k: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<PlaneThrough>> {
    let central = sample_plane_family(&Center::origin(n + 1), n, k, count, seed)?;
    Ok(central
        .iter()
        .map(|z| map_central_to_plane(a, z.frame()))
        .collect())
}
