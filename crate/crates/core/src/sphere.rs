//! Points on Sⁿ, interior centers, quadrature grids and grid functions.

use std::f64::consts::PI;
use std::ops::Deref;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{FunkError, Result};
use crate::exec;
use crate::quadrature::{gauss_gegenbauer, gauss_legendre};

pub type Point = DVector<f64>;

/// Tolerance on | |x| − 1 | for constructed sphere points.
pub const UNIT_TOL: f64 = 1e-12;

/// A real function on the sphere, evaluable at any unit vector.
pub trait SphereFn: Send + Sync {
    fn eval(&self, x: &Point) -> f64;
}

impl<F> SphereFn for F
where
    F: Fn(&Point) -> f64 + Send + Sync,
{
    fn eval(&self, x: &Point) -> f64 {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpherePoint(Point);

impl SpherePoint {
    /// Scale a nonzero vector onto the sphere.
    pub fn normalize(v: Point) -> Result<Self> {
        let norm = v.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(FunkError::invalid("cannot normalize a zero or non-finite vector"));
        }
        Ok(SpherePoint(v / norm))
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::normalize(Point::from_column_slice(coords))
    }

    /// Accept a vector that is already unit length to within [`UNIT_TOL`].
    pub fn from_unit(v: Point) -> Result<Self> {
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(FunkError::invalid(format!("|x| = {norm} is not 1")));
        }
        Ok(SpherePoint(v))
    }

    /// Renormalizes silently; for outputs of maps that preserve the sphere
    /// analytically.
    pub(crate) fn renormalized(v: Point) -> Self {
        let norm = v.norm();
        SpherePoint(v / norm)
    }

    /// The sphere dimension n (the point lives in Rⁿ⁺¹).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn into_inner(self) -> Point {
        self.0
    }

    pub fn as_point(&self) -> &Point {
        &self.0
    }
}

impl Deref for SpherePoint {
    type Target = Point;
    fn deref(&self) -> &Point {
        &self.0
    }
}

/// Geodesic distance on the unit sphere, accurate near 0.
pub fn geodesic_distance(x: &Point, y: &Point) -> f64 {
    let chord = (x - y).norm();
    2.0 * (0.5 * chord).min(1.0).asin()
}

/// An interior point a of the unit ball, with s_a = √(1 − |a|²) cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Center {
    coords: Point,
    s: f64,
}

impl Center {
    pub fn new(coords: Point) -> Result<Self> {
        let norm_sq = coords.norm_squared();
        if !norm_sq.is_finite() || norm_sq >= 1.0 {
            return Err(FunkError::CenterNotInterior {
                norm: norm_sq.sqrt(),
            });
        }
        let s = (1.0 - norm_sq).sqrt();
        Ok(Center { coords, s })
    }

    pub fn from_slice(coords: &[f64]) -> Result<Self> {
        Self::new(Point::from_column_slice(coords))
    }

    pub fn origin(ambient_dim: usize) -> Self {
        Center {
            coords: Point::zeros(ambient_dim),
            s: 1.0,
        }
    }

    pub fn coords(&self) -> &Point {
        &self.coords
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn norm_sq(&self) -> f64 {
        self.coords.norm_squared()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| *c == 0.0)
    }

    /// Ambient dimension n + 1.
    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }
}

/// Quadrature grid for the surface measure on Sⁿ.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    n: usize,
    nodes: Vec<SpherePoint>,
    weights: Vec<f64>,
    exactness: Option<usize>,
}

/// Product grid on Sⁿ.
///
/// n = 1: `resolution` uniform nodes on the circle. n ≥ 2: Gauss–Gegenbauer
/// nodes in the last coordinate (Gauss–Legendre for n = 2) times the grid of
/// Sⁿ⁻¹, where the innermost circle carries 2·`resolution` nodes. The rule is
/// exact for polynomials of degree ≤ 2·resolution − 1 when n ≥ 2.
pub fn build_sphere_grid(n: usize, resolution: usize) -> Result<SphereGrid> {
    if n == 0 {
        return Err(FunkError::invalid("sphere dimension must be >= 1"));
    }
    if resolution < 4 {
        return Err(FunkError::invalid(format!(
            "resolution must be >= 4, got {resolution}"
        )));
    }
    let (pts, weights, exactness) = if n == 1 {
        let (p, w) = circle_rule(resolution);
        (p, w, resolution - 1)
    } else {
        let (p, w) = product_rule(n, resolution);
        (p, w, 2 * resolution - 1)
    };
    let nodes = pts.into_iter().map(SpherePoint::renormalized).collect();
    Ok(SphereGrid {
        n,
        nodes,
        weights,
        exactness: Some(exactness),
    })
}

fn circle_rule(count: usize) -> (Vec<Point>, Vec<f64>) {
    let w = 2.0 * PI / count as f64;
    let pts = (0..count)
        .map(|j| {
            let phi = 2.0 * PI * j as f64 / count as f64;
            Point::from_vec(vec![phi.cos(), phi.sin()])
        })
        .collect();
    (pts, vec![w; count])
}

fn product_rule(n: usize, resolution: usize) -> (Vec<Point>, Vec<f64>) {
    let (inner_pts, inner_w) = if n == 2 {
        circle_rule(2 * resolution)
    } else {
        product_rule(n - 1, resolution)
    };
    let (ts, tw) = gauss_gegenbauer(resolution, (n as f64 - 2.0) / 2.0);
    let mut pts = Vec::with_capacity(ts.len() * inner_pts.len());
    let mut weights = Vec::with_capacity(pts.capacity());
    for (t, wt) in ts.iter().zip(&tw) {
        let r = (1.0 - t * t).sqrt();
        for (omega, wo) in inner_pts.iter().zip(&inner_w) {
            let mut x = Point::zeros(n + 1);
            for i in 0..n {
                x[i] = r * omega[i];
            }
            x[n] = *t;
            pts.push(x);
            weights.push(wt * wo);
        }
    }
    (pts, weights)
}

impl SphereGrid {
    /// Grid on S² adapted to functions concentrated at `pole`: the polar angle
    /// θ about the pole is split into geometric panels [θ_min·2ʲ, θ_min·2ʲ⁺¹]
    /// up to π/2, then one panel [π/2, π] split evenly; each panel carries
    /// `panel_nodes` Gauss–Legendre nodes in θ (weight sin θ), times
    /// `azimuth` uniform nodes.
    pub fn cap_graded(
        pole: &SpherePoint,
        theta_min: f64,
        panel_nodes: usize,
        azimuth: usize,
    ) -> Result<SphereGrid> {
        if pole.dim() != 2 {
            return Err(FunkError::Unsupported("graded grids are built on S² only".into()));
        }
        if !(theta_min > 0.0 && theta_min < PI / 2.0) || panel_nodes == 0 || azimuth < 4 {
            return Err(FunkError::invalid("bad graded-grid parameters"));
        }
        let mut edges = vec![0.0, theta_min];
        let mut edge = theta_min;
        while edge * 2.0 < PI / 2.0 {
            edge *= 2.0;
            edges.push(edge);
        }
        edges.push(PI / 2.0);
        for j in 1..=4 {
            edges.push(PI / 2.0 + j as f64 * PI / 8.0);
        }
        let (gx, gw) = gauss_legendre(panel_nodes);
        let frame = orthonormal_complement(&DMatrix::from_column_slice(3, 1, pole.as_slice()));
        let e1 = frame.column(0).into_owned();
        let e2 = frame.column(1).into_owned();
        let dphi = 2.0 * PI / azimuth as f64;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for pair in edges.windows(2) {
            let (lo, hi) = (pair[0], pair[1]);
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            for (x, w) in gx.iter().zip(&gw) {
                let theta = mid + half * x;
                let wt = w * half * theta.sin() * dphi;
                for j in 0..azimuth {
                    let phi = dphi * j as f64;
                    let v = pole.as_point() * theta.cos()
                        + (&e1 * phi.cos() + &e2 * phi.sin()) * theta.sin();
                    nodes.push(SpherePoint::renormalized(v));
                    weights.push(wt);
                }
            }
        }
        Ok(SphereGrid {
            n: 2,
            nodes,
            weights,
            exactness: None,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[SpherePoint] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Declared polynomial exactness, if the grid has one.
    pub fn exactness(&self) -> Option<usize> {
        self.exactness
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn sample(&self, f: &dyn SphereFn) -> Vec<f64> {
        exec::map_slice(&self.nodes, |x| f.eval(x))
    }

    pub fn integrate(&self, f: &dyn SphereFn) -> f64 {
        self.sample(f)
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Rebuild a grid from explicit nodes and weights (e.g. read from CSV).
    pub fn from_parts(nodes: Vec<SpherePoint>, weights: Vec<f64>) -> Result<SphereGrid> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(FunkError::invalid("nodes and weights must be nonempty and aligned"));
        }
        let n = nodes[0].dim();
        if nodes.iter().any(|x| x.dim() != n) {
            return Err(FunkError::invalid("nodes of mixed dimension"));
        }
        Ok(SphereGrid {
            n,
            nodes,
            weights,
            exactness: None,
        })
    }
}

/// Values of a function at the nodes of a grid.
#[derive(Clone, Debug)]
pub struct GridFunction {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FunkError::DimensionMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn sample(grid: Arc<SphereGrid>, f: &dyn SphereFn) -> Self {
        let values = grid.sample(f);
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Pointwise difference; both functions must share the same grid.
    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(FunkError::DimensionMismatch {
                expected: self.grid.len(),
                actual: other.grid.len(),
            });
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridFunction {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }

    pub fn sup_norm_outside_cap(&self, pole: &SpherePoint, delta: f64) -> Result<f64> {
        sup_norm_outside_cap(self, pole, delta)
    }

    /// Nearest-node interpolant. Off-grid values are piecewise constant, so
    /// this is only meant as a fallback when no analytic callable exists.
    pub fn nearest_node_interpolant(&self) -> NearestNode {
        log::warn!(
            "using nearest-node interpolation on a {}-node grid; expect O(spacing) error",
            self.grid.len()
        );
        NearestNode {
            function: self.clone(),
        }
    }
}

pub struct NearestNode {
    function: GridFunction,
}

impl SphereFn for NearestNode {
    fn eval(&self, x: &Point) -> f64 {
        let nodes = self.function.grid.nodes();
        let mut best = 0;
        let mut best_dot = f64::NEG_INFINITY;
        for (i, node) in nodes.iter().enumerate() {
            let d = node.dot(x);
            if d > best_dot {
                best_dot = d;
                best = i;
            }
        }
        self.function.values[best]
    }
}

/// (Σ wᵢ|fᵢ|ᵖ)^{1/p}, or max |fᵢ| for p = ∞.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    weighted_lp(f.values(), f.grid.weights(), p)
}

pub(crate) fn weighted_lp(values: &[f64], weights: &[f64], p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(FunkError::invalid(format!("p must be >= 1, got {p}")));
    }
    if p == f64::INFINITY {
        return Ok(values.iter().fold(0.0_f64, |m, v| m.max(v.abs())));
    }
    let sum: f64 = values
        .iter()
        .zip(weights)
        .map(|(v, w)| w * v.abs().powf(p))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// max |f| over nodes at geodesic distance ≥ δ from `pole`.
pub fn sup_norm_outside_cap(f: &GridFunction, pole: &SpherePoint, delta: f64) -> Result<f64> {
    if !(0.0..PI).contains(&delta) {
        return Err(FunkError::invalid(format!("cap radius must lie in [0, π), got {delta}")));
    }
    let mut found = false;
    let mut sup = 0.0_f64;
    for (x, v) in f.grid.nodes().iter().zip(&f.values) {
        if geodesic_distance(x, pole) >= delta {
            found = true;
            sup = sup.max(v.abs());
        }
    }
    if !found {
        return Err(FunkError::EmptyRegion(format!(
            "no grid node at distance >= {delta} from the pole"
        )));
    }
    Ok(sup)
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `basis` (assumed orthonormal). Deterministic: Gram–Schmidt over the
/// standard basis, most-orthogonal vectors first.
pub fn orthonormal_complement(basis: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = basis.nrows();
    let want = dim - basis.ncols();
    let mut chosen: Vec<Point> = basis.column_iter().map(|c| c.into_owned()).collect();
    let mut out: Vec<Point> = Vec::with_capacity(want);
    while out.len() < want {
        let mut best: Option<Point> = None;
        let mut best_norm = -1.0;
        for i in 0..dim {
            let mut v = Point::zeros(dim);
            v[i] = 1.0;
            for _ in 0..2 {
                for c in &chosen {
                    let proj = c.dot(&v);
                    v -= c * proj;
                }
            }
            let nv = v.norm();
            if nv > best_norm {
                best_norm = nv;
                best = Some(v);
            }
        }
        let v = best.expect("dimension > 0") / best_norm;
        chosen.push(v.clone());
        out.push(v);
    }
    DMatrix::from_columns(&out)
}

/// Quadrature on a section Sⁿ ∩ τ: a (k−1)-sphere of the given radius,
/// centered at `center`, lying in the affine k-plane spanned by `tangent`.
#[derive(Clone, Debug)]
pub struct SectionSphereQuad {
    center: Point,
    radius: f64,
    tangent: DMatrix<f64>,
    nodes: Vec<Point>,
    weights: Vec<f64>,
}

impl SectionSphereQuad {
    /// k = 1 uses the two endpoints with unit weight (counting measure on
    /// S⁰); k = 2 uses `resolution` equispaced nodes (trapezoid rule); k ≥ 3
    /// uses [`build_sphere_grid`] on Sᵏ⁻¹.
    pub fn new(center: Point, radius: f64, tangent: DMatrix<f64>, resolution: usize) -> Result<Self> {
        let k = tangent.ncols();
        if k == 0 || tangent.nrows() != center.len() {
            return Err(FunkError::invalid("tangent frame does not match the ambient space"));
        }
        if !(radius > 0.0) {
            return Err(FunkError::invalid(format!("section radius must be positive, got {radius}")));
        }
        let (unit_nodes, unit_weights): (Vec<Point>, Vec<f64>) = match k {
            1 => (
                vec![Point::from_element(1, 1.0), Point::from_element(1, -1.0)],
                vec![1.0, 1.0],
            ),
            2 => {
                if resolution < 3 {
                    return Err(FunkError::invalid("section resolution too small"));
                }
                circle_rule(resolution)
            }
            _ => {
                let g = build_sphere_grid(k - 1, resolution)?;
                (
                    g.nodes.iter().map(|p| p.as_point().clone()).collect(),
                    g.weights.clone(),
                )
            }
        };
        let scale = radius.powi(k as i32 - 1);
        let nodes = unit_nodes
            .iter()
            .map(|omega| &center + &tangent * omega * radius)
            .collect();
        let weights = unit_weights.iter().map(|w| w * scale).collect();
        Ok(SectionSphereQuad {
            center,
            radius,
            tangent,
            nodes,
            weights,
        })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn tangent(&self) -> &DMatrix<f64> {
        &self.tangent
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate(&self, f: &dyn SphereFn) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f.eval(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::sphere_area;

    type TestFn = dyn Fn(&Point) -> f64 + Send + Sync;

    fn grid(n: usize, res: usize) -> Arc<SphereGrid> {
        Arc::new(build_sphere_grid(n, res).unwrap())
    }

    #[test]
    fn s2_grid_has_full_area() {
        let g = grid(2, 32);
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-10);
        assert_eq!(g.len(), 32 * 64);
        assert!(g.exactness().unwrap() >= 32);
    }

    #[test]
    fn circle_grid_is_uniform() {
        let g = grid(1, 64);
        assert_eq!(g.len(), 64);
        for w in g.weights() {
            assert!((w - 2.0 * PI / 64.0).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_of_x3_squared() {
        let g = grid(2, 32);
        let q = g.integrate(&|x: &Point| x[2] * x[2]);
        assert!((q - 4.0 * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn higher_dimensional_grids() {
        for n in 3..=5 {
            let g = grid(n, 6);
            let area = sphere_area(n);
            assert!((g.total_weight() / area - 1.0).abs() < 1e-10, "n = {n}");
            // ∫ x₁² = area/(n+1)
            let q = g.integrate(&|x: &Point| x[0] * x[0]);
            assert!((q - area / (n as f64 + 1.0)).abs() < 1e-10 * area);
            for x in g.nodes() {
                assert!((x.norm() - 1.0).abs() < UNIT_TOL);
            }
        }
    }

    #[test]
    fn rejects_bad_grid_parameters() {
        assert!(build_sphere_grid(0, 8).is_err());
        assert!(build_sphere_grid(2, 3).is_err());
    }

    #[test]
    fn low_degree_harmonics_integrate_to_zero() {
        let g = grid(2, 16);
        let fs: Vec<Box<TestFn>> = vec![
            Box::new(|x: &Point| x[0]),
            Box::new(|x: &Point| x[0] * x[1]),
            Box::new(|x: &Point| 3.0 * x[2] * x[2] - 1.0),
            Box::new(|x: &Point| x[0].powi(3) - 3.0 * x[0] * x[1] * x[1]),
            Box::new(|x: &Point| x[1].powi(5)),
        ];
        for f in &fs {
            assert!(g.integrate(&&**f).abs() < 1e-10);
        }
    }

    #[test]
    fn lp_norm_examples() {
        let g = grid(2, 32);
        let one = GridFunction::sample(g.clone(), &|_: &Point| 1.0);
        assert!((one.lp_norm(2.0).unwrap() - (4.0 * PI).sqrt()).abs() < 1e-12);
        assert_eq!(one.lp_norm(f64::INFINITY).unwrap(), 1.0);
        let x3 = GridFunction::sample(g, &|x: &Point| x[2]);
        assert!((x3.lp_norm(2.0).unwrap() - (4.0 * PI / 3.0).sqrt()).abs() < 1e-12);
        assert!(x3.lp_norm(0.5).is_err());
        assert!(x3.lp_norm(f64::NAN).is_err());
    }

    #[test]
    fn lp_norm_is_monotone_for_probability_weights() {
        let g = build_sphere_grid(2, 12).unwrap();
        let total = g.total_weight();
        let w: Vec<f64> = g.weights().iter().map(|w| w / total).collect();
        let vals: Vec<f64> = g.nodes().iter().map(|x| (3.0 * x[0]).exp() - x[1]).collect();
        let mut last = 0.0;
        for p in [1.0, 1.5, 2.0, 3.0, 8.0, f64::INFINITY] {
            let v = weighted_lp(&vals, &w, p).unwrap();
            assert!(v >= last - 1e-14);
            last = v;
        }
    }

    #[test]
    fn sup_outside_cap() {
        let g = grid(2, 24);
        let c = GridFunction::sample(g.clone(), &|_: &Point| -2.5);
        let pole = SpherePoint::from_slice(&[0.3, -0.2, 0.9]).unwrap();
        assert_eq!(c.sup_norm_outside_cap(&pole, 0.3).unwrap(), 2.5);

        let x1 = GridFunction::sample(g.clone(), &|x: &Point| x[0]);
        let east = SpherePoint::from_slice(&[1.0, 0.0, 0.0]).unwrap();
        let full = x1.sup_norm_outside_cap(&east, 0.0).unwrap();
        assert!((full - 1.0).abs() < 1e-2);
        // outside the π/2 cap every node has x₁ ≤ 0 (up to rounding) and the
        // antipode x₁ = −1 is approached, so the sup of |x₁| is ~1 while the
        // signed max is ~0
        let mut signed_max = f64::NEG_INFINITY;
        for x in g.nodes() {
            if geodesic_distance(x, &east) >= PI / 2.0 {
                signed_max = signed_max.max(x[0]);
            }
        }
        assert!(signed_max <= 1e-12);
        assert!(x1.sup_norm_outside_cap(&east, PI / 2.0).unwrap() > 0.99);
        assert!(x1.sup_norm_outside_cap(&east, PI + 0.1).is_err());
        assert!(x1.sup_norm_outside_cap(&east, -0.1).is_err());
    }

    #[test]
    fn graded_grid_integrates_smooth_and_peaked_functions() {
        let pole = SpherePoint::from_slice(&[-1.0, 0.0, 0.0]).unwrap();
        let g = SphereGrid::cap_graded(&pole, 1e-20, 12, 32).unwrap();
        assert!((g.total_weight() - 4.0 * PI).abs() < 1e-11);
        let q = g.integrate(&|x: &Point| x[2] * x[2]);
        assert!((q - 4.0 * PI / 3.0).abs() < 1e-11);
        // normalized bump of width 1e-6 at the pole: ∫ exp(-θ²/2σ²) ≈ 2πσ²
        let sigma: f64 = 1e-6;
        let bump = move |x: &Point| {
            let t = geodesic_distance(x, &Point::from_vec(vec![-1.0, 0.0, 0.0]));
            (-(t * t) / (2.0 * sigma * sigma)).exp()
        };
        let q = g.integrate(&bump) / (2.0 * PI * sigma * sigma);
        assert!((q - 1.0).abs() < 1e-9, "{q}");
    }

    #[test]
    fn section_quadrature_area_and_nodes() {
        let tangent = DMatrix::from_column_slice(3, 2, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let r = 0.75_f64.sqrt();
        let c = Point::from_vec(vec![0.5, 0.0, 0.0]);
        let q = SectionSphereQuad::new(c, r, tangent, 32).unwrap();
        let total: f64 = q.weights().iter().sum();
        assert!((total - 2.0 * PI * r).abs() < 1e-12);
        for x in q.nodes() {
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nearest_node_interpolation_returns_node_values() {
        let g = grid(2, 8);
        let f = GridFunction::sample(g.clone(), &|x: &Point| x[0] + 2.0 * x[2]);
        let interp = f.nearest_node_interpolant();
        for (x, v) in g.nodes().iter().zip(f.values()).take(20) {
            assert_eq!(interp.eval(x), *v);
        }
    }
}
