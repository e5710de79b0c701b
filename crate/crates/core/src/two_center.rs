//! Two interior centers a ≠ b: the map T = τ_b τ_a, the operator
//! W = W_a W_b, the reconstruction series and their convergence diagnostics.
//!
//! Iterates use (W^m f)(x) = Π_{j<m} ρ(T^j x) · f(T^m x) with
//! ρ(x) = ρ_a(x) ρ_b(τ_a x), which is the m-fold composition of W.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{FunkError, Result};
use crate::exec;
use crate::funk::{forward_funk, SectionField};
use crate::inversion::SingleCenterInverse;
use crate::moebius::reflect;
use crate::parity::WeightedReflection;
use crate::planes::{line_through, PlaneFn};
use crate::sphere::{geodesic_distance, weighted_lp, Center, GridFunction, Point, SphereFn, SphereGrid, SpherePoint};

/// Inputs within this distance of a chord endpoint are mapped to it exactly.
const SNAP_TOL: f64 = 2e-15;

/// The line through a and b meets Sⁿ at a* (on the side of a) and b*.
/// Returns (a*, b*, t, s) with a = a* + t(b* − a*), b = a* + s(b* − a*).
pub fn chord_endpoints(a: &Center, b: &Center) -> Result<(SpherePoint, SpherePoint, f64, f64)> {
    if a.ambient_dim() != b.ambient_dim() {
        return Err(FunkError::DimensionMismatch {
            expected: a.ambient_dim(),
            actual: b.ambient_dim(),
        });
    }
    let diff = b.coords() - a.coords();
    let dist = diff.norm();
    if dist <= 1e-12 {
        return Err(FunkError::Degenerate("centers a and b coincide".into()));
    }
    let d = diff / dist;
    let ad = a.coords().dot(&d);
    let root = (ad * ad + 1.0 - a.norm_sq()).sqrt();
    let lo = -ad - root;
    let hi = -ad + root;
    let a_star = SpherePoint::from_unit((a.coords() + &d * lo).normalize())?;
    let b_star = SpherePoint::from_unit((a.coords() + &d * hi).normalize())?;
    let len = hi - lo;
    Ok((a_star, b_star, -lo / len, (dist - lo) / len))
}

/// n/(k − 1), the L^p threshold; infinite for k = 1.
pub fn p0(n: usize, k: usize) -> f64 {
    if k <= 1 {
        f64::INFINITY
    } else {
        n as f64 / (k - 1) as f64
    }
}

#[derive(Clone, Debug)]
pub struct TwoCenterSystem {
    wa: WeightedReflection,
    wb: WeightedReflection,
    a_star: Point,
    b_star: Point,
    t: f64,
    s: f64,
}

impl TwoCenterSystem {
    pub fn new(a: Center, b: Center, k: usize) -> Result<Self> {
        let (a_star, b_star, t, s) = chord_endpoints(&a, &b)?;
        Ok(TwoCenterSystem {
            wa: WeightedReflection::new(a, k)?,
            wb: WeightedReflection::new(b, k)?,
            a_star: a_star.into_inner(),
            b_star: b_star.into_inner(),
            t,
            s,
        })
    }

    pub fn a(&self) -> &Center {
        self.wa.center()
    }

    pub fn b(&self) -> &Center {
        self.wb.center()
    }

    pub fn k(&self) -> usize {
        self.wa.k()
    }

    pub fn n(&self) -> usize {
        self.a().ambient_dim() - 1
    }

    pub fn a_star(&self) -> &Point {
        &self.a_star
    }

    pub fn b_star(&self) -> &Point {
        &self.b_star
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn reflection_a(&self) -> &WeightedReflection {
        &self.wa
    }

    pub fn reflection_b(&self) -> &WeightedReflection {
        &self.wb
    }

    fn snap(&self, x: &Point) -> Option<Point> {
        if (x - &self.a_star).norm() <= SNAP_TOL {
            Some(self.a_star.clone())
        } else if (x - &self.b_star).norm() <= SNAP_TOL {
            Some(self.b_star.clone())
        } else {
            None
        }
    }

    /// T x = τ_b τ_a x.
    pub fn t_apply(&self, x: &Point) -> Point {
        if let Some(p) = self.snap(x) {
            return p;
        }
        reflect(self.b(), reflect(self.a(), x).as_point()).into_inner()
    }

    /// T̃ x = τ_a τ_b x = T⁻¹ x.
    pub fn t_tilde_apply(&self, x: &Point) -> Point {
        if let Some(p) = self.snap(x) {
            return p;
        }
        reflect(self.a(), reflect(self.b(), x).as_point()).into_inner()
    }

    /// ρ(x) = ρ_a(x) ρ_b(τ_a x).
    pub fn rho(&self, x: &Point) -> f64 {
        self.wa.rho(x) * self.wb.rho(&self.wa.reflect(x))
    }

    /// ρ̃(x) = ρ_b(x) ρ_a(τ_b x), the weight of W̃ = W_b W_a.
    pub fn rho_tilde(&self, x: &Point) -> f64 {
        self.wb.rho(x) * self.wa.rho(&self.wb.reflect(x))
    }

    /// [t(1 − s)/(s(1 − t))]^{k−1}.
    pub fn rho_b_star_closed_form(&self) -> f64 {
        (self.t * (1.0 - self.s) / (self.s * (1.0 - self.t))).powi(self.k() as i32 - 1)
    }

    /// 1/ρ(b*), since ρ(a*)ρ(b*) = 1.
    pub fn rho_a_star_closed_form(&self) -> f64 {
        (self.s * (1.0 - self.t) / (self.t * (1.0 - self.s))).powi(self.k() as i32 - 1)
    }

    /// T^m x for m = 0..=m.
    pub fn orbit(&self, x: &Point, m: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(m + 1);
        out.push(x.clone());
        for j in 0..m {
            let next = self.t_apply(&out[j]);
            out.push(next);
        }
        out
    }

    /// (W^m f)(x) by the running weight product.
    pub fn iterate_w(&self, f: &dyn SphereFn, m: usize, x: &Point) -> f64 {
        let mut w = 1.0;
        let mut y = x.clone();
        for _ in 0..m {
            w *= self.rho(&y);
            y = self.t_apply(&y);
        }
        w * f.eval(&y)
    }

    /// (W^j f)(x) for j = 0..=m.
    pub fn iterates(&self, f: &dyn SphereFn, m: usize, x: &Point) -> Vec<f64> {
        let mut out = Vec::with_capacity(m + 1);
        let mut w = 1.0;
        let mut y = x.clone();
        for j in 0..=m {
            out.push(w * f.eval(&y));
            if j < m {
                w *= self.rho(&y);
                y = self.t_apply(&y);
            }
        }
        out
    }

    fn iterates_tilde(&self, f: &dyn SphereFn, m: usize, x: &Point) -> Vec<f64> {
        let mut out = Vec::with_capacity(m + 1);
        let mut w = 1.0;
        let mut y = x.clone();
        for j in 0..=m {
            out.push(w * f.eval(&y));
            if j < m {
                w *= self.rho_tilde(&y);
                y = self.t_tilde_apply(&y);
            }
        }
        out
    }
}

/// One row of a convergence table.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceRecord {
    pub m: usize,
    pub sup_kdelta: f64,
    pub lp: Vec<f64>,
    pub at_a_star: f64,
    pub at_b_star: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub p_list: Vec<f64>,
    pub p0: f64,
    pub delta: f64,
    pub rho_a_star: f64,
    pub rho_b_star: f64,
    pub records: Vec<ConvergenceRecord>,
    /// exp of the least-squares slope of log sup_kdelta against m over the
    /// tail of the table.
    pub sup_rate: Option<f64>,
    /// Same fit for each L^p column.
    pub lp_rates: Vec<Option<f64>>,
}

impl ConvergenceReport {
    fn build(sys: &TwoCenterSystem, delta: f64, p_list: &[f64], records: Vec<ConvergenceRecord>) -> Self {
        let sup: Vec<(usize, f64)> = records.iter().map(|r| (r.m, r.sup_kdelta)).collect();
        let lp_rates = (0..p_list.len())
            .map(|i| fit_tail_rate(&records.iter().map(|r| (r.m, r.lp[i])).collect::<Vec<_>>()))
            .collect();
        ConvergenceReport {
            p_list: p_list.to_vec(),
            p0: p0(sys.n(), sys.k()),
            delta,
            rho_a_star: sys.rho(sys.a_star()),
            rho_b_star: sys.rho(sys.b_star()),
            sup_rate: fit_tail_rate(&sup),
            lp_rates,
            records,
        }
    }
}

/// Geometric rate fitted on the second half of the entries that sit above
/// the rounding floor (1e−13 relative to the largest entry).
pub fn fit_tail_rate(series: &[(usize, f64)]) -> Option<f64> {
    let top = series.iter().fold(0.0f64, |m, (_, v)| m.max(v.abs()));
    let usable: Vec<(f64, f64)> = series
        .iter()
        .filter(|(_, v)| v.is_finite() && v.abs() > 1e-13 * top && v.abs() > 0.0)
        .map(|&(m, v)| (m as f64, v.abs().ln()))
        .collect();
    let tail = &usable[usable.len() / 2..];
    if tail.len() < 3 {
        return None;
    }
    let n = tail.len() as f64;
    let mx = tail.iter().map(|p| p.0).sum::<f64>() / n;
    let my = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some((sxy / sxx).exp())
}

fn in_kdelta(sys: &TwoCenterSystem, x: &Point, delta: f64) -> bool {
    geodesic_distance(x, sys.a_star()) >= delta
}

/// For m = 0..=m_max: sup of |W^m f| on K_δ, its L^p norms on `grid`, and its
/// values at a* and b*.
pub fn convergence_diagnostics(
    sys: &TwoCenterSystem,
    f: &dyn SphereFn,
    m_max: usize,
    delta: f64,
    p_list: &[f64],
    grid: &SphereGrid,
) -> Result<ConvergenceReport> {
    if sys.k() < 2 {
        return Err(FunkError::Unsupported("diagnostics need k > 1".into()));
    }
    let per_node = exec::map_slice(grid.nodes(), |x| sys.iterates(f, m_max, x));
    let inside: Vec<bool> = grid.nodes().iter().map(|x| in_kdelta(sys, x, delta)).collect();
    if !inside.iter().any(|&b| b) {
        return Err(FunkError::EmptyRegion("no grid node outside the cap around a*".into()));
    }
    let at_a = sys.iterates(f, m_max, sys.a_star());
    let at_b = sys.iterates(f, m_max, sys.b_star());
    let mut records = Vec::with_capacity(m_max + 1);
    let mut column = vec![0.0; grid.len()];
    for m in 0..=m_max {
        for (c, vals) in column.iter_mut().zip(&per_node) {
            *c = vals[m];
        }
        let sup_kdelta = column
            .iter()
            .zip(&inside)
            .filter(|(_, &ins)| ins)
            .fold(0.0f64, |acc, (v, _)| acc.max(v.abs()));
        let lp = p_list
            .iter()
            .map(|&p| weighted_lp(&column, grid.weights(), p))
            .collect::<Result<Vec<f64>>>()?;
        records.push(ConvergenceRecord {
            m,
            sup_kdelta,
            lp,
            at_a_star: at_a[m],
            at_b_star: at_b[m],
        });
    }
    Ok(ConvergenceReport::build(sys, delta, p_list, records))
}

/// Smallest m with T^m x ∈ B(b*, ε) for every node x of `grid` in K_δ.
pub fn attractor_escape_time(sys: &TwoCenterSystem, grid: &SphereGrid, delta: f64, epsilon: f64) -> Result<usize> {
    const LIMIT: usize = 100_000;
    if !(epsilon > 0.0 && delta > 0.0) {
        return Err(FunkError::invalid("δ and ε must be positive"));
    }
    let nodes: Vec<&SpherePoint> = grid.nodes().iter().filter(|x| in_kdelta(sys, x, delta)).collect();
    if nodes.is_empty() {
        return Err(FunkError::EmptyRegion("no grid node in K_δ".into()));
    }
    let times = exec::map_slice(&nodes, |x| {
        // distance to b* decreases along orbits, so the first entry time is
        // the escape time
        let mut y = x.as_point().clone();
        for m in 0..LIMIT {
            if geodesic_distance(&y, sys.b_star()) < epsilon {
                return Some(m);
            }
            y = sys.t_apply(&y);
        }
        None
    });
    times
        .into_iter()
        .try_fold(0usize, |acc, t| t.map(|t| acc.max(t)))
        .ok_or_else(|| FunkError::NoConvergence(format!("orbit did not reach B(b*, {epsilon}) in {LIMIT} steps")))
}

/// Settings for [`reconstruct_two_center`].
#[derive(Clone, Debug, Serialize)]
pub struct TwoCenterOptions {
    pub m_max: usize,
    pub delta: f64,
    pub degree_max: usize,
    pub p_list: Vec<f64>,
    /// Stop once the sup over K_δ of the newest term falls below this.
    pub increment_tol: f64,
    /// Planes of g used for the consistency residual F_a(f_rec) − g.
    pub residual_planes: usize,
    pub section_resolution: usize,
}

impl Default for TwoCenterOptions {
    fn default() -> Self {
        TwoCenterOptions {
            m_max: 40,
            delta: 0.2,
            degree_max: 24,
            p_list: vec![1.0, 2.0],
            increment_tol: 1e-10,
            residual_planes: 10,
            section_resolution: 64,
        }
    }
}

/// The reconstruction series as an off-grid callable: the primary series
/// f = Σ W^j q away from a*, the alternative f = Σ W̃^j r near a*.
pub struct TwoCenterSeries {
    sys: TwoCenterSystem,
    ea: SingleCenterInverse,
    eb: SingleCenterInverse,
    terms: usize,
    delta: f64,
}

impl TwoCenterSeries {
    /// q = 2[f_a^+ − W_a f_b^+].
    pub fn q(&self, x: &Point) -> f64 {
        let wa = self.sys.reflection_a();
        2.0 * (self.ea.eval(x) - wa.rho(x) * self.eb.eval(&wa.reflect(x)))
    }

    /// r = 2[f_b^+ − W_b f_a^+].
    pub fn r(&self, x: &Point) -> f64 {
        let wb = self.sys.reflection_b();
        2.0 * (self.eb.eval(x) - wb.rho(x) * self.ea.eval(&wb.reflect(x)))
    }

    /// W^j q(x), j = 0..terms.
    pub fn primary_terms(&self, x: &Point, terms: usize) -> Vec<f64> {
        let q = |y: &Point| self.q(y);
        let mut v = self.sys.iterates(&q, terms.saturating_sub(1), x);
        v.truncate(terms);
        v
    }

    /// W̃^j r(x), j = 0..terms.
    pub fn alternative_terms(&self, x: &Point, terms: usize) -> Vec<f64> {
        let r = |y: &Point| self.r(y);
        let mut v = self.sys.iterates_tilde(&r, terms.saturating_sub(1), x);
        v.truncate(terms);
        v
    }

    /// True where the alternative series is used: inside B(a*, δ), and
    /// closer to a* than to b* when both caps apply.
    pub fn uses_alternative(&self, x: &Point) -> bool {
        let da = geodesic_distance(x, self.sys.a_star());
        let db = geodesic_distance(x, self.sys.b_star());
        da < self.delta && !(db < self.delta && db < da)
    }

    pub fn terms(&self) -> usize {
        self.terms
    }
}

impl SphereFn for TwoCenterSeries {
    fn eval(&self, x: &Point) -> f64 {
        let v = if self.uses_alternative(x) {
            self.alternative_terms(x, self.terms)
        } else {
            self.primary_terms(x, self.terms)
        };
        v.iter().sum()
    }
}

pub struct TwoCenterResult {
    pub reconstruction: GridFunction,
    pub report: ConvergenceReport,
    pub series: TwoCenterSeries,
    /// Terms actually summed (≤ m_max).
    pub terms_used: usize,
    /// max |primary − alternative| over nodes outside both caps.
    pub overlap_discrepancy: f64,
    /// max |F_a f_rec − g| over the first planes of g.
    pub consistency_residual: f64,
    pub inconsistent: bool,
}

/// Recovers f from g = F_a f and h = F_b f (k = 2 on S²).
///
/// The report tabulates, for m = 1..=terms, the remainder of the m-term
/// partial sum: against `truth` when supplied, otherwise against the final
/// sum. Its at_a_star / at_b_star columns hold W^{m−1}q at the endpoints.
pub fn reconstruct_two_center(
    g: &SectionField,
    h: &SectionField,
    sys: &TwoCenterSystem,
    grid: Arc<SphereGrid>,
    opts: &TwoCenterOptions,
    truth: Option<&dyn SphereFn>,
) -> Result<TwoCenterResult> {
    if sys.k() < 2 {
        return Err(FunkError::Unsupported("use reconstruct_two_center_k1 for k = 1".into()));
    }
    if opts.m_max == 0 {
        return Err(FunkError::invalid("m_max must be >= 1"));
    }
    let ea = SingleCenterInverse::from_field(g, sys.a(), opts.degree_max)?;
    let eb = SingleCenterInverse::from_field(h, sys.b(), opts.degree_max)?;
    let mut series = TwoCenterSeries {
        sys: sys.clone(),
        ea,
        eb,
        terms: opts.m_max,
        delta: opts.delta,
    };
    let nodes = grid.nodes();
    let alt: Vec<bool> = nodes.iter().map(|x| series.uses_alternative(x)).collect();
    let terms: Vec<Vec<f64>> = exec::map_indices(nodes.len(), |i| {
        if alt[i] {
            series.alternative_terms(&nodes[i], opts.m_max)
        } else {
            series.primary_terms(&nodes[i], opts.m_max)
        }
    });
    let kdelta: Vec<bool> = nodes.iter().map(|x| in_kdelta(sys, x, opts.delta)).collect();
    if !kdelta.iter().any(|&b| b) {
        return Err(FunkError::EmptyRegion("no grid node in K_δ".into()));
    }

    // truncation: first m whose newest term is below tolerance on K_δ
    let mut used = opts.m_max;
    for m in 1..=opts.m_max {
        let inc = terms
            .iter()
            .zip(&kdelta)
            .filter(|(_, &k)| k)
            .fold(0.0f64, |acc, (t, _)| acc.max(t[m - 1].abs()));
        if inc < opts.increment_tol {
            used = m;
            break;
        }
    }
    series.terms = used;

    let partial: Vec<Vec<f64>> = terms
        .iter()
        .map(|t| {
            let mut acc = 0.0;
            t[..used]
                .iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect()
        })
        .collect();
    let finals: Vec<f64> = partial.iter().map(|p| p[used - 1]).collect();
    let reference: Vec<f64> = match truth {
        Some(f) => grid.sample(f),
        None => finals.clone(),
    };

    let q = |y: &Point| series.q(y);
    let q_a = sys.iterates(&q, used, sys.a_star());
    let q_b = sys.iterates(&q, used, sys.b_star());
    let mut records = Vec::with_capacity(used);
    let mut column = vec![0.0; nodes.len()];
    for m in 1..=used {
        for (i, c) in column.iter_mut().enumerate() {
            *c = reference[i] - partial[i][m - 1];
        }
        let sup_kdelta = column
            .iter()
            .zip(&kdelta)
            .filter(|(_, &k)| k)
            .fold(0.0f64, |acc, (v, _)| acc.max(v.abs()));
        let lp = opts
            .p_list
            .iter()
            .map(|&p| weighted_lp(&column, grid.weights(), p))
            .collect::<Result<Vec<f64>>>()?;
        records.push(ConvergenceRecord {
            m,
            sup_kdelta,
            lp,
            at_a_star: q_a[m - 1],
            at_b_star: q_b[m - 1],
        });
    }
    let report = ConvergenceReport::build(sys, opts.delta, &opts.p_list, records);

    let both: Vec<usize> = (0..nodes.len())
        .filter(|&i| {
            geodesic_distance(&nodes[i], sys.a_star()) >= opts.delta
                && geodesic_distance(&nodes[i], sys.b_star()) >= opts.delta
        })
        .collect();
    let overlap = exec::map_slice(&both, |&i| {
        let other: f64 = series.alternative_terms(&nodes[i], used).iter().sum();
        (other - finals[i]).abs()
    });
    let overlap_discrepancy = overlap.into_iter().fold(0.0, f64::max);

    let check = g.planes().len().min(opts.residual_planes);
    let consistency_residual = if check == 0 {
        0.0
    } else {
        let fa = forward_funk(&series, sys.a(), &g.planes()[..check], opts.section_resolution)?;
        fa.values()
            .iter()
            .zip(g.values())
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    };
    let scale = g.max_abs().max(1.0);
    let inconsistent = consistency_residual > 1e-4 * scale;
    if inconsistent {
        log::warn!("reconstruction reproduces g only to {consistency_residual:.3e}; g and h may be inconsistent");
    }

    Ok(TwoCenterResult {
        reconstruction: GridFunction::new(grid, finals)?,
        report,
        series,
        terms_used: used,
        overlap_discrepancy,
        consistency_residual,
        inconsistent,
    })
}

/// k = 1 on any Sⁿ: 2f(x) = Σ_{j≥0} q(T^j x) + Σ_{j≥0} r(T̃^j x) + g(L_{a,b})
/// with q(x) = g(L_{a,x}) − h(L_{b,τ_a x}) and r(x) = h(L_{b,x}) − g(L_{a,τ_b x}).
/// Nodes at a chord endpoint take the value of the nearest other node.
pub fn reconstruct_two_center_k1(
    g: &dyn PlaneFn,
    h: &dyn PlaneFn,
    sys: &TwoCenterSystem,
    m_max: usize,
    grid: Arc<SphereGrid>,
) -> Result<GridFunction> {
    if sys.k() != 1 {
        return Err(FunkError::invalid("reconstruct_two_center_k1 needs k = 1"));
    }
    let (a, b) = (sys.a().clone(), sys.b().clone());
    let line_value = |fun: &dyn PlaneFn, c: &Center, x: &Point| -> f64 {
        match line_through(c, x) {
            Ok(l) => fun.eval(&l),
            Err(_) => f64::NAN,
        }
    };
    let q = |x: &Point| line_value(g, &a, x) - line_value(h, &b, &reflect(&a, x));
    let r = |x: &Point| line_value(h, &b, x) - line_value(g, &a, &reflect(&b, x));
    let chord = line_value(g, &a, sys.b_star());
    let endpoint = |x: &Point| {
        geodesic_distance(x, sys.a_star()) < 1e-8 || geodesic_distance(x, sys.b_star()) < 1e-8
    };
    let nodes = grid.nodes();
    let values: Vec<Option<f64>> = exec::map_slice(nodes, |x| {
        if endpoint(x) {
            return None;
        }
        let mut total = chord;
        let mut y = x.as_point().clone();
        for _ in 0..m_max {
            let v = q(&y);
            total += v;
            if v.abs() < 1e-16 {
                break;
            }
            y = sys.t_apply(&y);
        }
        let mut y = x.as_point().clone();
        for _ in 0..m_max {
            let v = r(&y);
            total += v;
            if v.abs() < 1e-16 {
                break;
            }
            y = sys.t_tilde_apply(&y);
        }
        Some(0.5 * total)
    });
    let filled: Vec<f64> = (0..nodes.len())
        .map(|i| match values[i] {
            Some(v) => Ok(v),
            None => nodes
                .iter()
                .enumerate()
                .filter(|(j, _)| values[*j].is_some())
                .max_by(|(_, p), (_, q)| p.dot(nodes[i].as_point()).total_cmp(&q.dot(nodes[i].as_point())))
                .and_then(|(j, _)| values[j])
                .ok_or_else(|| FunkError::EmptyRegion("every node is a chord endpoint".into())),
        })
        .collect::<Result<_>>()?;
    GridFunction::new(grid, filled)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Letter {
    A,
    B,
}

/// Result of alternately applying P_a^− = (I − W_a)/2 and P_b^− = (I − W_b)/2
/// to f, starting with P_a^−. Stored exactly as a combination of reduced
/// alternating words in W_a, W_b (W_a² = W_b² = I).
pub struct AlternatingOddProjection {
    sys: TwoCenterSystem,
    f: Arc<dyn SphereFn>,
    identity: f64,
    // coefficient of the word of length ℓ starting with W_a (resp. W_b) at ℓ − 1
    starts_a: Vec<f64>,
    starts_b: Vec<f64>,
}

impl AlternatingOddProjection {
    pub fn new(sys: &TwoCenterSystem, f: Arc<dyn SphereFn>, projections: usize) -> Self {
        let mut identity = 1.0;
        let mut starts_a = vec![0.0; projections + 1];
        let mut starts_b = vec![0.0; projections + 1];
        for i in 0..projections {
            let letter = if i % 2 == 0 { Letter::A } else { Letter::B };
            let (same, other) = match letter {
                Letter::A => (&starts_a, &starts_b),
                Letter::B => (&starts_b, &starts_a),
            };
            // W_X on each word: I → X; X… → drop the first letter; Y… → X Y…
            let mut w_same = vec![0.0; projections + 1];
            let mut w_other = vec![0.0; projections + 1];
            let mut w_identity = 0.0;
            w_same[0] += identity;
            for l in 1..=projections {
                let c = same[l - 1];
                if c != 0.0 {
                    if l == 1 {
                        w_identity += c;
                    } else {
                        w_other[l - 2] += c;
                    }
                }
                let c = other[l - 1];
                if c != 0.0 && l < projections + 1 {
                    w_same[l] += c;
                }
            }
            let (new_same, new_other): (Vec<f64>, Vec<f64>) = (
                same.iter().zip(&w_same).map(|(c, w)| 0.5 * (c - w)).collect(),
                other.iter().zip(&w_other).map(|(c, w)| 0.5 * (c - w)).collect(),
            );
            identity = 0.5 * (identity - w_identity);
            match letter {
                Letter::A => {
                    starts_a = new_same;
                    starts_b = new_other;
                }
                Letter::B => {
                    starts_b = new_same;
                    starts_a = new_other;
                }
            }
        }
        AlternatingOddProjection {
            sys: sys.clone(),
            f,
            identity,
            starts_a,
            starts_b,
        }
    }

    /// Σ |coefficients|, at most 1.
    pub fn coefficient_mass(&self) -> f64 {
        self.identity.abs()
            + self.starts_a.iter().map(|c| c.abs()).sum::<f64>()
            + self.starts_b.iter().map(|c| c.abs()).sum::<f64>()
    }

    fn words(&self, x: &Point, first: Letter, coeffs: &[f64]) -> f64 {
        let len = coeffs.iter().rposition(|c| *c != 0.0).map_or(0, |p| p + 1);
        let mut acc = 0.0;
        let mut w = 1.0;
        let mut y = x.clone();
        let mut letter = first;
        for c in &coeffs[..len] {
            let refl = match letter {
                Letter::A => self.sys.reflection_a(),
                Letter::B => self.sys.reflection_b(),
            };
            w *= refl.rho(&y);
            y = refl.reflect(&y);
            acc += c * w * self.f.eval(&y);
            letter = match letter {
                Letter::A => Letter::B,
                Letter::B => Letter::A,
            };
        }
        acc
    }
}

impl SphereFn for AlternatingOddProjection {
    fn eval(&self, x: &Point) -> f64 {
        self.identity * self.f.eval(x)
            + self.words(x, Letter::A, &self.starts_a)
            + self.words(x, Letter::B, &self.starts_b)
    }
}
