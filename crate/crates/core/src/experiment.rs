//! Configuration-driven experiments behind the command-line tool.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::FunkError;
use crate::funk::{forward_funk, point_pair_transform};
use crate::inversion::{
    invert_funk_a, invert_point_pair, FunkMultipliers, InversionRoute, MeanValueOptions, SectionData,
};
use crate::io::{write_convergence_csv, write_grid_function_csv, write_json, write_section_field_csv};
use crate::parity::even_part;
use crate::phantoms::{make_phantom, Phantom, PhantomSpec};
use crate::planes::{pullback_family, sample_plane_family, section_quadrature, Frame, PlaneThrough};
use crate::sphere::{build_sphere_grid, weighted_lp, Center, GridFunction, SphereFn, SphereGrid, SpherePoint};
use crate::two_center::{
    attractor_escape_time, convergence_diagnostics, p0, reconstruct_two_center, reconstruct_two_center_k1,
    TwoCenterOptions, TwoCenterSystem,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    #[default]
    Harmonic,
    Meanvalue,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub a: Vec<f64>,
    pub b: Option<Vec<f64>>,
    pub grid_resolution: usize,
    pub plane_count: usize,
    pub section_resolution: usize,
    pub phantom: PhantomSpec,
    /// Explicit plane frames for `forward`, each a list of normal columns.
    pub frames: Option<Vec<Vec<Vec<f64>>>>,
    pub degree_max: usize,
    pub route: RouteName,
    pub m_max: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub p_list: Vec<f64>,
    /// Diagnose on a grid graded towards a* instead of the product grid.
    pub graded_grid: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 2,
            k: 2,
            a: vec![0.0, 0.0, 0.0],
            b: None,
            grid_resolution: 32,
            plane_count: 1200,
            section_resolution: 64,
            phantom: PhantomSpec::Constant { value: 1.0 },
            frames: None,
            degree_max: 24,
            route: RouteName::Harmonic,
            m_max: 40,
            delta: 0.2,
            epsilon: 0.3,
            p_list: vec![1.0, 2.0, 4.0],
            graded_grid: false,
            output_dir: PathBuf::from("out"),
            seed: 0,
            threads: None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ExperimentError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Numerical(_) => 3,
            ExperimentError::Io(_) => 4,
        }
    }
}

impl From<FunkError> for ExperimentError {
    fn from(e: FunkError) -> Self {
        let msg = e.to_string();
        match e {
            FunkError::IllConditioned { .. } | FunkError::NoConvergence(_) | FunkError::EmptyRegion(_) => {
                ExperimentError::Numerical(msg)
            }
            FunkError::Io(_) | FunkError::Csv(_) | FunkError::Json(_) => ExperimentError::Io(msg),
            _ => ExperimentError::Config(msg),
        }
    }
}

pub type ExpResult<T> = std::result::Result<T, ExperimentError>;

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

pub fn load_config(path: &Path) -> ExpResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

impl ExperimentConfig {
    pub fn center_a(&self) -> ExpResult<Center> {
        self.center(&self.a)
    }

    pub fn center_b(&self) -> ExpResult<Center> {
        let b = self.b.as_ref().ok_or_else(|| config_err("second center b is required"))?;
        self.center(b)
    }

    fn center(&self, v: &[f64]) -> ExpResult<Center> {
        if v.len() != self.n + 1 {
            return Err(config_err(format!("center has {} coordinates, expected {}", v.len(), self.n + 1)));
        }
        Ok(Center::from_slice(v)?)
    }

    /// Checks everything that can be checked before any computation.
    pub fn validate(&self) -> ExpResult<()> {
        if self.n < 1 || self.k < 1 || self.k > self.n {
            return Err(config_err(format!("need 1 <= k <= n, got n={}, k={}", self.n, self.k)));
        }
        self.center_a()?;
        if self.b.is_some() {
            self.center_b()?;
        }
        if self.grid_resolution < 4 {
            return Err(config_err("grid_resolution must be >= 4"));
        }
        if self.section_resolution < 8 {
            return Err(config_err("section_resolution must be >= 8"));
        }
        if self.plane_count == 0 {
            return Err(config_err("plane_count must be >= 1"));
        }
        if !(self.delta > 0.0 && self.delta < std::f64::consts::PI) {
            return Err(config_err("delta must lie in (0, pi)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(config_err("epsilon must be positive"));
        }
        if self.p_list.iter().any(|p| !(*p >= 1.0)) {
            return Err(config_err("every p must be >= 1"));
        }
        if self.m_max == 0 {
            return Err(config_err("m_max must be >= 1"));
        }
        make_phantom(&self.phantom, self.n + 1)?;
        Ok(())
    }

    fn phantom(&self) -> ExpResult<Phantom> {
        Ok(make_phantom(&self.phantom, self.n + 1)?)
    }

    fn require_s2(&self, what: &str) -> ExpResult<()> {
        if self.n != 2 {
            return Err(config_err(format!("{what} is implemented on S^2 (n = 2)")));
        }
        Ok(())
    }
}

fn prepare_dir(dir: &Path) -> ExpResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| ExperimentError::Io(format!("{}: {e}", dir.display())))
}

fn metadata(cfg: &ExperimentConfig, command: &str, extra: serde_json::Value) -> serde_json::Value {
    json!({
        "library": "shifted-funk",
        "version": VERSION,
        "command": command,
        "config": cfg,
        "results": extra,
    })
}

fn sup_and_l2(values: &[f64], truth: &[f64], weights: &[f64]) -> ExpResult<(f64, f64)> {
    let diff: Vec<f64> = values.iter().zip(truth).map(|(v, t)| v - t).collect();
    Ok((
        weighted_lp(&diff, weights, f64::INFINITY)?,
        weighted_lp(&diff, weights, 2.0)?,
    ))
}

/// Planes for `forward`: explicit frames when given, else a sampled family.
fn forward_planes(cfg: &ExperimentConfig, a: &Center) -> ExpResult<Vec<PlaneThrough>> {
    match &cfg.frames {
        Some(frames) => frames
            .iter()
            .map(|cols| {
                let dim = cfg.n + 1;
                if cols.is_empty() || cols.iter().any(|c| c.len() != dim) {
                    return Err(config_err("each frame column needs n + 1 entries"));
                }
                let flat: Vec<f64> = cols.iter().flatten().copied().collect();
                let m = nalgebra::DMatrix::from_column_slice(dim, cols.len(), &flat);
                let frame = Frame::orthonormalize(m)?;
                if frame.k() != cfg.k {
                    return Err(config_err("frame column count must be n + 1 - k"));
                }
                Ok(PlaneThrough::new(a.clone(), frame)?)
            })
            .collect(),
        None => Ok(sample_plane_family(a, cfg.n, cfg.k, cfg.plane_count, cfg.seed)?),
    }
}

/// Forward transform of the phantom: forward.csv and forward.json.
pub fn cmd_forward(cfg: &ExperimentConfig) -> ExpResult<PathBuf> {
    cfg.validate()?;
    let a = cfg.center_a()?;
    let f = cfg.phantom()?;
    let planes = forward_planes(cfg, &a)?;
    let field = forward_funk(&f, &a, &planes, cfg.section_resolution)?;
    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    write_section_field_csv(&dir.join("forward.csv"), &field)?;
    let extra = json!({ "planes": field.len(), "max_abs": field.max_abs() });
    write_json(&dir.join("forward.json"), &metadata(cfg, "forward", extra))?;
    Ok(dir.clone())
}

/// Single-center inversion of F_a of the phantom, compared with f_a^+ and f.
pub fn cmd_invert_single(cfg: &ExperimentConfig) -> ExpResult<PathBuf> {
    cfg.validate()?;
    cfg.require_s2("single-center inversion")?;
    let a = cfg.center_a()?;
    let f = cfg.phantom()?;
    let grid = Arc::new(build_sphere_grid(cfg.n, cfg.grid_resolution)?);
    let plus = even_part(f.function(), &a, cfg.k)?;
    let (rec, route_name, extra_meta) = if cfg.k == 1 {
        let g = |line: &PlaneThrough| -> f64 {
            section_quadrature(line, 8).map(|q| q.integrate(&f)).unwrap_or(f64::NAN)
        };
        let inv = invert_point_pair(&g, &a);
        (GridFunction::sample(grid.clone(), &inv), "point_pair", json!({}))
    } else {
        let route = match cfg.route {
            RouteName::Harmonic => InversionRoute::Harmonic {
                degree_max: cfg.degree_max,
                plane_count: cfg.plane_count,
            },
            RouteName::Meanvalue => InversionRoute::MeanValue(MeanValueOptions::default()),
        };
        match cfg.route {
            RouteName::Harmonic => {
                let planes = pullback_family(&a, cfg.n, cfg.k, cfg.plane_count, cfg.seed)?;
                let g = forward_funk(&f, &a, &planes, cfg.section_resolution)?;
                let rec = invert_funk_a(SectionData::Sampled(&g), &a, &route, grid.clone())?;
                let mult = FunkMultipliers::compute(cfg.degree_max);
                (rec, "harmonic", json!({ "multipliers": mult }))
            }
            RouteName::Meanvalue => {
                let res = cfg.section_resolution;
                let g = |plane: &PlaneThrough| -> f64 {
                    section_quadrature(plane, res).map(|q| q.integrate(&f)).unwrap_or(f64::NAN)
                };
                let rec = invert_funk_a(SectionData::Callable(&g), &a, &route, grid.clone())?;
                (rec, "meanvalue", json!({}))
            }
        }
    };
    let truth_plus = grid.sample(&plus);
    let truth_f = grid.sample(&f);
    let (sup_plus, l2_plus) = sup_and_l2(rec.values(), &truth_plus, grid.weights())?;
    let (sup_f, l2_f) = sup_and_l2(rec.values(), &truth_f, grid.weights())?;
    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    write_grid_function_csv(&dir.join("reconstruction.csv"), &rec)?;
    let extra = json!({
        "route": route_name,
        "phantom": f.name,
        "error_vs_even_part": { "sup": sup_plus, "l2": l2_plus },
        "error_vs_phantom": { "sup": sup_f, "l2": l2_f },
        "details": extra_meta,
    });
    write_json(&dir.join("summary.json"), &metadata(cfg, "invert-single", extra))?;
    Ok(dir.clone())
}

/// Two-center reconstruction; k = 1 uses the symmetrized point-pair series.
pub fn cmd_reconstruct_two(cfg: &ExperimentConfig) -> ExpResult<PathBuf> {
    cfg.validate()?;
    cfg.require_s2("two-center reconstruction")?;
    let a = cfg.center_a()?;
    let b = cfg.center_b()?;
    let sys = TwoCenterSystem::new(a.clone(), b.clone(), cfg.k)?;
    let f = cfg.phantom()?;
    let grid = Arc::new(build_sphere_grid(cfg.n, cfg.grid_resolution)?);
    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    if cfg.k == 1 {
        let g = |line: &PlaneThrough| -> f64 {
            section_quadrature(line, 8).map(|q| q.integrate(&f)).unwrap_or(f64::NAN)
        };
        let rec = reconstruct_two_center_k1(&g, &g, &sys, cfg.m_max, grid.clone())?;
        let truth = grid.sample(&f);
        let away: Vec<usize> = (0..grid.len())
            .filter(|&i| {
                let x = grid.nodes()[i].as_point();
                crate::sphere::geodesic_distance(x, sys.a_star()) >= cfg.delta
                    && crate::sphere::geodesic_distance(x, sys.b_star()) >= cfg.delta
            })
            .collect();
        let sup_away = away
            .iter()
            .fold(0.0f64, |m, &i| m.max((rec.values()[i] - truth[i]).abs()));
        let (sup, l2) = sup_and_l2(rec.values(), &truth, grid.weights())?;
        write_grid_function_csv(&dir.join("reconstruction.csv"), &rec)?;
        let chord = point_pair_transform(&f, &a, sys.b_star());
        let extra = json!({
            "a_star": sys.a_star().as_slice(),
            "b_star": sys.b_star().as_slice(),
            "chord_value": chord,
            "error": { "sup": sup, "l2": l2, "sup_away_from_endpoints": sup_away },
        });
        write_json(&dir.join("summary.json"), &metadata(cfg, "reconstruct-two", extra))?;
        return Ok(dir.clone());
    }
    let ga = pullback_family(&a, cfg.n, cfg.k, cfg.plane_count, cfg.seed)?;
    let gb = pullback_family(&b, cfg.n, cfg.k, cfg.plane_count, cfg.seed)?;
    let g = forward_funk(&f, &a, &ga, cfg.section_resolution)?;
    let h = forward_funk(&f, &b, &gb, cfg.section_resolution)?;
    let opts = TwoCenterOptions {
        m_max: cfg.m_max,
        delta: cfg.delta,
        degree_max: cfg.degree_max,
        p_list: cfg.p_list.clone(),
        section_resolution: cfg.section_resolution,
        ..TwoCenterOptions::default()
    };
    let res = reconstruct_two_center(&g, &h, &sys, grid.clone(), &opts, Some(&f))?;
    write_grid_function_csv(&dir.join("reconstruction.csv"), &res.reconstruction)?;
    write_convergence_csv(&dir.join("convergence.csv"), &res.report)?;
    let extra = json!({
        "a_star": sys.a_star().as_slice(),
        "b_star": sys.b_star().as_slice(),
        "t": sys.t(),
        "s": sys.s(),
        "terms_used": res.terms_used,
        "rho_b_star_predicted": sys.rho_b_star_closed_form(),
        "rho_b_star_observed": res.report.sup_rate,
        "overlap_discrepancy": res.overlap_discrepancy,
        "consistency_residual": res.consistency_residual,
        "inconsistent": res.inconsistent,
        "report": res.report,
    });
    write_json(&dir.join("convergence.json"), &metadata(cfg, "reconstruct-two", extra))?;
    Ok(dir.clone())
}

/// Diagnostics of W^m f and the escape time into B(b*, ε).
pub fn cmd_diagnose(cfg: &ExperimentConfig) -> ExpResult<PathBuf> {
    cfg.validate()?;
    if cfg.k < 2 {
        return Err(config_err("diagnose needs k > 1"));
    }
    let sys = TwoCenterSystem::new(cfg.center_a()?, cfg.center_b()?, cfg.k)?;
    let f = cfg.phantom()?;
    let grid = if cfg.graded_grid {
        cfg.require_s2("graded grids")?;
        let pole = SpherePoint::from_unit(sys.a_star().clone())?;
        SphereGrid::cap_graded(&pole, 1e-30, 8, 2 * cfg.grid_resolution)?
    } else {
        build_sphere_grid(cfg.n, cfg.grid_resolution)?
    };
    let report = convergence_diagnostics(&sys, &f, cfg.m_max, cfg.delta, &cfg.p_list, &grid)?;
    let escape = attractor_escape_time(&sys, &grid, cfg.delta, cfg.epsilon)?;
    let dir = &cfg.output_dir;
    prepare_dir(dir)?;
    write_convergence_csv(&dir.join("diagnostics.csv"), &report)?;
    let fa = f.eval(sys.a_star());
    let growth: Vec<f64> = report
        .records
        .iter()
        .map(|r| if fa != 0.0 { r.at_a_star / (fa * report.rho_a_star.powi(r.m as i32)) } else { f64::NAN })
        .collect();
    let extra = json!({
        "p0": p0(cfg.n, cfg.k),
        "rho_a_star": report.rho_a_star,
        "rho_b_star": report.rho_b_star,
        "rho_b_star_closed_form": sys.rho_b_star_closed_form(),
        "escape_time": escape,
        "growth_ratio_at_a_star": growth,
        "report": report,
    });
    write_json(&dir.join("diagnostics.json"), &metadata(cfg, "diagnose", extra))?;
    Ok(dir.clone())
}

/// Lines for `phantom list`.
pub fn phantom_list() -> Vec<String> {
    crate::phantoms::registry()
        .into_iter()
        .map(|(name, desc)| format!("{name:<16} {desc}"))
        .collect()
}
