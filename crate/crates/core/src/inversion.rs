//! Inversion of the central Funk transform on even functions of S², and of
//! the shifted transform on a-even functions through M_a⁻¹ F_o⁻¹ N_a⁻¹.
//!
//! Two routes for F_o⁻¹: a least-squares spherical-harmonic fit divided by
//! the Funk multipliers, and the mean-value formula
//! f(x) = lim_{s→1} (1/2s) d/ds [(1/π) ∫₀ˢ F*_x(r) r (s² − r²)^{−1/2} dr]
//! where F*_x(r) averages the section values over central planes at
//! geodesic distance arccos r from x.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{FunkError, Result};
use crate::exec;
use crate::funk::SectionField;
use crate::harmonics::{self, eval_all};
use crate::moebius::MobiusMap;
use crate::planes::{line_through, pullback_family, section_quadrature, Frame, PlaneFn, PlaneThrough};
use crate::quadrature::gauss_legendre;
use crate::sphere::{orthonormal_complement, Center, GridFunction, Point, SphereFn, SphereGrid};

/// Fits with σ_max/σ_min above this are refused.
pub const MAX_CONDITION: f64 = 1e10;

/// c_l with F_o Y_l = c_l Y_l for every harmonic of degree l (n = 2, k = 2).
#[derive(Clone, Debug, Serialize)]
pub struct FunkMultipliers {
    pub degree_max: usize,
    pub values: Vec<f64>,
}

impl FunkMultipliers {
    /// Integrates each zonal Y_l^0 over the equator and divides by its value
    /// at the north pole.
    pub fn compute(degree_max: usize) -> Self {
        let o = Center::origin(3);
        let equator = PlaneThrough::new(
            o,
            Frame::from_normal(&Point::from_vec(vec![0.0, 0.0, 1.0])).expect("unit normal"),
        )
        .expect("matching dimensions");
        let quad = section_quadrature(&equator, (4 * (degree_max + 1)).max(32)).expect("valid section");
        let pole = Point::from_vec(vec![0.0, 0.0, 1.0]);
        let at_pole = eval_all(&pole, degree_max);
        let mut values = vec![0.0; degree_max + 1];
        let mut integrals = vec![0.0; degree_max + 1];
        for (x, w) in quad.nodes().iter().zip(quad.weights()) {
            let y = eval_all(x, degree_max);
            for (l, acc) in integrals.iter_mut().enumerate() {
                *acc += w * y[harmonics::index(l, 0)];
            }
        }
        for l in 0..=degree_max {
            values[l] = integrals[l] / at_pole[harmonics::index(l, 0)];
        }
        FunkMultipliers { degree_max, values }
    }

    pub fn get(&self, l: usize) -> f64 {
        self.values[l]
    }
}

/// Real spherical-harmonic expansion on S², in [`harmonics::index`] order.
#[derive(Clone, Debug, Serialize)]
pub struct HarmonicCoeffs {
    pub degree_max: usize,
    pub coefficients: Vec<f64>,
    pub condition: f64,
}

impl SphereFn for HarmonicCoeffs {
    fn eval(&self, x: &Point) -> f64 {
        eval_all(x, self.degree_max)
            .iter()
            .zip(&self.coefficients)
            .map(|(y, c)| y * c)
            .sum()
    }
}

fn require_s2_central(planes: &[PlaneThrough]) -> Result<()> {
    for (index, p) in planes.iter().enumerate() {
        if p.frame().ambient_dim() != 3 || p.k() != 2 {
            return Err(FunkError::Unsupported(
                "harmonic inversion is implemented for great circles on S² (n = 2, k = 2)".into(),
            ));
        }
        if p.center().coords().amax() > 1e-14 {
            return Err(FunkError::PlaneFamilyMismatch { index });
        }
    }
    Ok(())
}

/// Least-squares fit of even-degree harmonics in the plane normal to the
/// central field Φ, divided by the multipliers. Odd degrees are zero: they
/// lie in the kernel of F_o.
pub fn fit_central_harmonics(phi: &SectionField, degree_max: usize) -> Result<HarmonicCoeffs> {
    require_s2_central(phi.planes())?;
    let even: Vec<(usize, i64)> = (0..=degree_max)
        .step_by(2)
        .flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m)))
        .collect();
    let rows = phi.len();
    let unknowns = even.len();
    if rows < unknowns {
        return Err(FunkError::IllConditioned {
            condition: f64::INFINITY,
            rows,
            unknowns,
        });
    }
    let design_rows = exec::map_slice(phi.planes(), |p| {
        let eta = p.frame().matrix().column(0).into_owned();
        let y = eval_all(&eta, degree_max);
        even.iter().map(|&(l, m)| y[harmonics::index(l, m)]).collect::<Vec<f64>>()
    });
    let design = DMatrix::from_fn(rows, unknowns, |i, j| design_rows[i][j]);
    let rhs = DVector::from_column_slice(phi.values());
    let qr = design.qr();
    let qtb = qr.q().transpose() * rhs;
    let svd = qr.r().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(FunkError::IllConditioned {
            condition,
            rows,
            unknowns,
        });
    }
    let sol = svd
        .solve(&qtb, 0.0)
        .map_err(|e| FunkError::NoConvergence(e.to_string()))?;
    let mult = FunkMultipliers::compute(degree_max);
    let mut coefficients = vec![0.0; harmonics::basis_len(degree_max)];
    for (j, &(l, m)) in even.iter().enumerate() {
        coefficients[harmonics::index(l, m)] = sol[j] / mult.get(l);
    }
    Ok(HarmonicCoeffs {
        degree_max,
        coefficients,
        condition,
    })
}

/// F_o⁻¹ Φ on `grid` by the harmonic route. Returns the even part of any
/// preimage.
pub fn invert_funk_o_harmonic(
    phi: &SectionField,
    degree_max: usize,
    grid: Arc<SphereGrid>,
) -> Result<GridFunction> {
    let coeffs = fit_central_harmonics(phi, degree_max)?;
    Ok(GridFunction::sample(grid, &coeffs))
}

/// Samples of r ↦ F*_x Φ(r).
#[derive(Clone, Debug, Serialize)]
pub struct MeanValueProfile {
    pub x: Vec<f64>,
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

/// Discretization of the mean-value route.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MeanValueOptions {
    /// Trapezoid nodes on the circle of normals at fixed r.
    pub azimuth: usize,
    /// Gauss–Legendre nodes for the Abel-type integral.
    pub theta_nodes: usize,
    /// Number of points s_j = 1 − 2^{−j}, j = 1..=levels.
    pub levels: usize,
}

impl Default for MeanValueOptions {
    fn default() -> Self {
        MeanValueOptions {
            azimuth: 48,
            theta_nodes: 24,
            levels: 8,
        }
    }
}

struct MeanValueFrame {
    x: Point,
    e1: Point,
    e2: Point,
}

impl MeanValueFrame {
    fn new(x: &Point) -> Self {
        let comp = orthonormal_complement(&DMatrix::from_column_slice(3, 1, x.as_slice()));
        MeanValueFrame {
            x: x.clone(),
            e1: comp.column(0).into_owned(),
            e2: comp.column(1).into_owned(),
        }
    }

    /// Probability average of Φ over great circles whose normal makes the
    /// angle arcsin r with x, i.e. at geodesic distance arccos r from x.
    fn average(&self, phi: &dyn PlaneFn, r: f64, azimuth: usize) -> f64 {
        let c = (1.0 - r * r).max(0.0).sqrt();
        let o = Center::origin(3);
        let mut acc = 0.0;
        for j in 0..azimuth {
            let t = 2.0 * PI * j as f64 / azimuth as f64;
            let eta = &self.x * c + (&self.e1 * t.cos() + &self.e2 * t.sin()) * r;
            let frame = Frame::new(DMatrix::from_column_slice(3, 1, eta.normalize().as_slice()))
                .expect("unit normal");
            acc += phi.eval(&PlaneThrough::new(o.clone(), frame).expect("matching dimensions"));
        }
        acc / azimuth as f64
    }
}

pub fn mean_value_profile(
    phi: &dyn PlaneFn,
    x: &Point,
    r_grid: &[f64],
    azimuth: usize,
) -> Result<MeanValueProfile> {
    if x.len() != 3 {
        return Err(FunkError::Unsupported("mean-value profiles are implemented on S²".into()));
    }
    if r_grid.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(FunkError::invalid("r values must lie in (0, 1)"));
    }
    if r_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FunkError::invalid("r values must be strictly increasing"));
    }
    let frame = MeanValueFrame::new(x);
    let values = r_grid.iter().map(|&r| frame.average(phi, r, azimuth)).collect();
    Ok(MeanValueProfile {
        x: x.as_slice().to_vec(),
        r: r_grid.to_vec(),
        values,
    })
}

/// F_o⁻¹Φ(x) by the mean-value formula for k = 2 on S².
///
/// B(s) = (1/π) ∫₀ˢ F*(r) r (s² − r²)^{−1/2} dr is computed as
/// (s/π) ∫₀^{π/2} F*(s sin θ) sin θ dθ. The derivative (1/2s) B′(s) is
/// taken by centered differences at s_j = 1 − 2^{−j} with step 2^{−j−1},
/// and the limit s → 1 by Richardson extrapolation in powers of 2^{−j}.
pub fn invert_funk_o_meanvalue(phi: &dyn PlaneFn, x: &Point, k: usize, opts: &MeanValueOptions) -> Result<f64> {
    if k != 2 || x.len() != 3 {
        return Err(FunkError::Unsupported(format!(
            "mean-value inversion is implemented for k = 2 on S² (got k = {k}, n = {}); use the harmonic route",
            x.len() as i64 - 1
        )));
    }
    if opts.levels < 2 || opts.theta_nodes == 0 || opts.azimuth < 4 {
        return Err(FunkError::invalid("mean-value options too coarse"));
    }
    let frame = MeanValueFrame::new(x);
    let (gl_x, gl_w) = gauss_legendre(opts.theta_nodes);
    let b = |s: f64| -> f64 {
        let mut acc = 0.0;
        for (t, w) in gl_x.iter().zip(&gl_w) {
            let theta = PI / 4.0 * (t + 1.0);
            let st = theta.sin();
            acc += w * PI / 4.0 * frame.average(phi, s * st, opts.azimuth) * st;
        }
        s / PI * acc
    };
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(opts.levels);
    for j in 1..=opts.levels {
        let s = 1.0 - 0.5f64.powi(j as i32);
        let h = 0.5f64.powi(j as i32 + 1);
        let d = (b(s + h) - b(s - h)) / (2.0 * h) / (2.0 * s);
        let mut row = vec![d];
        for i in 1..j {
            let p = 2f64.powi(i as i32);
            let prev: &Vec<f64> = &table[j - 2];
            row.push((p * row[i - 1] - prev[i - 1]) / (p - 1.0));
        }
        table.push(row);
    }
    let last = table.last().expect("at least two levels");
    Ok(*last.last().expect("non-empty row"))
}

/// Inversion method for F_o on the central side.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum InversionRoute {
    Harmonic { degree_max: usize, plane_count: usize },
    MeanValue(MeanValueOptions),
}

/// Section data for the shifted inversion: samples on a plane family, or a
/// callable that can be evaluated on any plane through a.
#[derive(Clone, Copy)]
pub enum SectionData<'g> {
    Sampled(&'g SectionField),
    Callable(&'g dyn PlaneFn),
}

/// f_a^+ = M_a⁻¹ F_o⁻¹ N_a⁻¹ g as an off-grid callable (harmonic route).
#[derive(Clone, Debug)]
pub struct SingleCenterInverse {
    center: Center,
    central: HarmonicCoeffs,
}

impl SingleCenterInverse {
    pub fn from_field(g: &SectionField, a: &Center, degree_max: usize) -> Result<Self> {
        let central = crate::funk::apply_n_inverse(a, g)?;
        Ok(SingleCenterInverse {
            center: a.clone(),
            central: fit_central_harmonics(&central, degree_max)?,
        })
    }

    pub fn center(&self) -> &Center {
        &self.center
    }

    pub fn central_coefficients(&self) -> &HarmonicCoeffs {
        &self.central
    }
}

impl SphereFn for SingleCenterInverse {
    fn eval(&self, x: &Point) -> f64 {
        crate::funk::apply_m_inverse(&self.center, 2, &self.central, x)
    }
}

/// Reconstructs f_a^+ on `grid` from g = F_a f (n = 2, k = 2).
pub fn invert_funk_a(
    g: SectionData<'_>,
    a: &Center,
    route: &InversionRoute,
    grid: Arc<SphereGrid>,
) -> Result<GridFunction> {
    match (route, g) {
        (InversionRoute::Harmonic { degree_max, .. }, SectionData::Sampled(field)) => {
            let inv = SingleCenterInverse::from_field(field, a, *degree_max)?;
            Ok(GridFunction::sample(grid, &inv))
        }
        (InversionRoute::Harmonic { degree_max, plane_count }, SectionData::Callable(gf)) => {
            let planes = pullback_family(a, 2, 2, *plane_count, 0)?;
            let values = exec::map_slice(&planes, |p| gf.eval(p));
            let field = SectionField::new(planes, values)?;
            let inv = SingleCenterInverse::from_field(&field, a, *degree_max)?;
            Ok(GridFunction::sample(grid, &inv))
        }
        (InversionRoute::MeanValue(_), SectionData::Sampled(_)) => Err(FunkError::Unsupported(
            "the mean-value route integrates over continuous plane families; pass callable section data".into(),
        )),
        (InversionRoute::MeanValue(opts), SectionData::Callable(gf)) => {
            let a2 = a.clone();
            let central = move |zeta: &PlaneThrough| {
                gf.eval(&crate::planes::map_central_to_plane(&a2, zeta.frame()))
            };
            let m = MobiusMap::new(a.clone());
            let values = exec::map_slice(grid.nodes(), |x| -> Result<f64> {
                if a.is_origin() {
                    return invert_funk_o_meanvalue(&central, x, 2, opts);
                }
                let y = m.apply(x);
                let u = invert_funk_o_meanvalue(&central, &y, 2, opts)?;
                Ok(((1.0 - a.coords().dot(&y)) / a.s()) * u)
            })
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
            GridFunction::new(grid, values)
        }
    }
}

/// k = 1: F_a f(L_{a,x}) = f(x) + f(τ_a x) = 2 f_a^+(x), so f_a^+ is half the
/// line value.
pub fn invert_point_pair<'g>(g: &'g dyn PlaneFn, a: &Center) -> impl SphereFn + 'g {
    let a = a.clone();
    move |x: &Point| match line_through(&a, x) {
        Ok(line) => 0.5 * g.eval(&line),
        Err(_) => f64::NAN,
    }
}
