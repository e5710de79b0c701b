//! Acceptance criteria. Each test prints one line
//! `criterion N [PASS|FAIL] name: measured (tolerance)` to stderr and then
//! asserts.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use shifted_funk::funk::{factorized_funk, forward_funk, forward_funk_fn, point_pair_transform};
use shifted_funk::inversion::{
    fit_central_harmonics, invert_funk_o_meanvalue, MeanValueOptions, SingleCenterInverse,
};
use shifted_funk::moebius::{cov_weight_mobius, cov_weight_reflection, reflect, MobiusMap};
use shifted_funk::parity::{even_part, odd_part};
use shifted_funk::phantoms::{make_phantom, PhantomSpec};
use shifted_funk::planes::{pullback_family, sample_plane_family, Frame, PlaneThrough};
use shifted_funk::sphere::{build_sphere_grid, geodesic_distance, Center, Point, SphereFn, SphereGrid, SpherePoint};
use shifted_funk::two_center::{
    reconstruct_two_center, reconstruct_two_center_k1, convergence_diagnostics, AlternatingOddProjection,
    TwoCenterOptions, TwoCenterSystem,
};

type TestFn = dyn Fn(&Point) -> f64 + Send + Sync;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "criterion {id} [{status}] {name}: {detail}");
}

fn random_unit(rng: &mut ChaCha8Rng) -> Point {
    Point::from_fn(3, |_, _| StandardNormal.sample(rng)).normalize()
}

fn random_center(rng: &mut ChaCha8Rng, max_norm: f64) -> Center {
    let r = max_norm * rng.random::<f64>().cbrt();
    Center::new(random_unit(rng) * r).unwrap()
}

fn c(v: &[f64]) -> Center {
    Center::from_slice(v).unwrap()
}

/// Generic smooth test function, neither a-even nor b-even for the centers
/// used below, with f(a*) ≠ 0 on the x₁-axis.
fn generic(x: &Point) -> f64 {
    x[2] + 0.5 * x[0] * x[1] + x[0].exp()
}

#[test]
fn criterion_01_mobius_identities() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let mut pointwise = 0.0f64;
    for _ in 0..1000 {
        let a = random_center(&mut rng, 0.9);
        let m = MobiusMap::new(a.clone());
        let x = random_unit(&mut rng);
        let y = m.apply(&x);
        // involution
        pointwise = pointwise.max((m.apply(&y) - &x).norm());
        // boundary ratio (1 − a·φ_a x)/(1 + a·φ_a x) = (1 − |a|²)/|a − x|²
        let ay = a.coords().dot(&y);
        let ratio = (1.0 - a.norm_sq()) / (a.coords() - &x).norm_squared();
        pointwise = pointwise.max(((1.0 - ay) / (1.0 + ay) - ratio).abs() / ratio.max(1.0));
        // intertwining φ_a ∘ τ_a = −φ_a
        pointwise = pointwise.max((m.apply(&reflect(&a, &x)) + &y).norm());
        // interior norm identity
        let r = 0.999 * rng.random::<f64>().cbrt();
        let z = random_unit(&mut rng) * r;
        let lhs = 1.0 - m.apply(&z).norm_squared();
        let rhs = (1.0 - a.norm_sq()) * (1.0 - r * r) / (1.0 - z.dot(a.coords())).powi(2);
        pointwise = pointwise.max((lhs - rhs).abs());
    }
    // change of variables under φ_a and under τ_a
    let grid = build_sphere_grid(2, 128).unwrap();
    let tests: Vec<Box<TestFn>> = vec![
        Box::new(|_: &Point| 1.0),
        Box::new(|x: &Point| (0.7 * x[0] - 0.4 * x[2]).exp()),
        Box::new(|x: &Point| x[2] * x[2] + x[0] * x[1]),
    ];
    let mut quad = 0.0f64;
    for _ in 0..10 {
        let a = random_center(&mut rng, 0.8);
        let m = MobiusMap::new(a.clone());
        for f in &tests {
            let plain = grid.integrate(&|x: &Point| f(x));
            let mob = grid.integrate(&|y: &Point| f(&m.apply(y)) * cov_weight_mobius(&a, y, 2));
            let refl = grid.integrate(&|x: &Point| f(reflect(&a, x).as_point()) * cov_weight_reflection(&a, x, 2.0));
            quad = quad.max((mob - plain).abs()).max((refl - plain).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = pointwise <= 1e-12 && quad <= 1e-10 && secs < 10.0;
    report(
        1,
        "Möbius identity suite",
        pass,
        &format!("pointwise {pointwise:.2e} (<= 1e-12), quadrature {quad:.2e} (<= 1e-10), {secs:.1}s (< 10s)"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_factorization() {
    let start = Instant::now();
    let phantoms = vec![
        PhantomSpec::ExpLinear { direction: vec![0.5, 0.2, -0.3] },
        PhantomSpec::MixedQuadratic,
        PhantomSpec::GaussianBump { center: vec![0.0, 0.6, 0.8], width: 0.6 },
        PhantomSpec::Harmonic { l: 4, m: -2 },
        PhantomSpec::ExpLinear { direction: vec![-1.0, 0.0, 1.0] },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xC2);
    let mut centers = vec![c(&[0.7, 0.0, 0.0])];
    while centers.len() < 5 {
        centers.push(random_center(&mut rng, 0.7));
    }
    let mut worst = 0.0f64;
    for a in &centers {
        let planes: Vec<PlaneThrough> = (0..100)
            .map(|_| PlaneThrough::new(a.clone(), Frame::from_normal(&random_unit(&mut rng)).unwrap()).unwrap())
            .collect();
        for spec in &phantoms {
            let f = make_phantom(spec, 3).unwrap();
            let direct = forward_funk(&f, a, &planes, 64).unwrap();
            let fact = factorized_funk(&f, a, &planes, 64).unwrap();
            worst = worst.max(direct.max_abs_diff(&fact).unwrap() / direct.max_abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-6 && secs < 120.0;
    report(
        2,
        "factorization F_a = N_a F_o M_a",
        pass,
        &format!("max relative deviation {worst:.2e} (<= 1e-6) over 5x5x100, {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_03_kernel_and_single_center_inversion() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let bases: Vec<Arc<dyn SphereFn>> = vec![
        Arc::new(generic),
        Arc::new(|x: &Point| (0.8 * x[1] - 0.5 * x[2]).exp()),
        Arc::new(|x: &Point| x[2]),
    ];
    let mut kernel = 0.0f64;
    for _ in 0..3 {
        let a = random_center(&mut rng, 0.7);
        let planes = sample_plane_family(&a, 2, 2, 100, 0).unwrap();
        for base in &bases {
            let odd = odd_part(base.clone(), &a, 2).unwrap();
            kernel = kernel.max(forward_funk(&odd, &a, &planes, 256).unwrap().max_abs());
        }
    }
    // f_a^+ from F_a f, degree 24
    let grid = build_sphere_grid(2, 24).unwrap();
    let mut inv_err = 0.0f64;
    for a in [c(&[0.4, 0.0, 0.0]), c(&[-0.2, 0.5, 0.3])] {
        let f: Arc<dyn SphereFn> = Arc::new(generic);
        let planes = pullback_family(&a, 2, 2, 1200, 0).unwrap();
        let g = forward_funk(f.as_ref(), &a, &planes, 64).unwrap();
        let inv = SingleCenterInverse::from_field(&g, &a, 24).unwrap();
        let plus = even_part(f, &a, 2).unwrap();
        for x in grid.nodes() {
            inv_err = inv_err.max((inv.eval(x) - plus.eval(x)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = kernel <= 1e-8 && inv_err <= 1e-5 && secs < 120.0;
    report(
        3,
        "kernel and single-center inversion",
        pass,
        &format!("max |F_a f_odd| {kernel:.2e} (<= 1e-8), sup |rec - f_a^+| {inv_err:.2e} (<= 1e-5), {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_meanvalue_vs_harmonic() {
    let start = Instant::now();
    let o = Center::origin(3);
    let evens: Vec<Arc<dyn SphereFn>> = vec![
        Arc::new(|x: &Point| x[0] * x[0] + x[1] * x[2]),
        Arc::new(|x: &Point| (0.6 * x[0] + 0.3 * x[1] - 0.5 * x[2]).cosh()),
        Arc::new(|x: &Point| (-(x[2] * x[2]) / 0.5).exp()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let points: Vec<Point> = (0..24).map(|_| random_unit(&mut rng)).collect();
    let planes = pullback_family(&o, 2, 2, 1200, 0).unwrap();
    let opts = MeanValueOptions::default();
    let mut worst = 0.0f64;
    for f in &evens {
        let g = forward_funk(f.as_ref(), &o, &planes, 64).unwrap();
        let harmonic = fit_central_harmonics(&g, 24).unwrap();
        let phi = forward_funk_fn(f.as_ref(), 32);
        for x in &points {
            let mv = invert_funk_o_meanvalue(&phi, x, 2, &opts).unwrap();
            worst = worst.max((mv - harmonic.eval(x)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-3 && secs < 60.0;
    report(
        4,
        "mean-value inversion vs harmonic route",
        pass,
        &format!("sup difference {worst:.2e} (<= 1e-3) on 3 even phantoms, {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_05_closed_form_constants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut closed = 0.0f64;
    for _ in 0..100 {
        let a = random_center(&mut rng, 0.9);
        let b = random_center(&mut rng, 0.9);
        let sys = TwoCenterSystem::new(a, b, 2).unwrap();
        let (t, s) = (sys.t(), sys.s());
        let expect = t * (1.0 - s) / (s * (1.0 - t));
        // ρ(b*) = ρ_a(b*) ρ_b(τ_a b*), evaluated from the weights directly
        let measured = sys.rho(sys.b_star());
        closed = closed.max((measured - expect).abs());
    }
    let sym = TwoCenterSystem::new(c(&[-0.5, 0.0, 0.0]), c(&[0.5, 0.0, 0.0]), 2).unwrap();
    let rho_a = sym.rho(sym.a_star());
    let nine = (rho_a - 9.0).abs();

    // growth at a*: least-squares slope of log |W^m f|(a*) over m ≤ 12
    let mut slope_err = 0.0f64;
    let mut configs = vec![sym.clone()];
    for _ in 0..5 {
        let a = random_center(&mut rng, 0.7);
        let b = random_center(&mut rng, 0.7);
        configs.push(TwoCenterSystem::new(a, b, 2).unwrap());
    }
    for sys in &configs {
        let f = |x: &Point| 1.5 + x[0] + 0.3 * x[1] * x[2];
        let logs: Vec<(f64, f64)> = (0..=12)
            .map(|m| (m as f64, sys.iterate_w(&f, m, sys.a_star()).abs().ln()))
            .collect();
        let n = logs.len() as f64;
        let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
        let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let law = (sys.s() * (1.0 - sys.t()) / (sys.t() * (1.0 - sys.s()))).ln();
        slope_err = slope_err.max((sxy / sxx - law).abs());
    }
    let pass = closed <= 1e-12 && nine <= 1e-12 && slope_err <= 1e-6;
    report(
        5,
        "closed-form constants",
        pass,
        &format!("rho(b*) {closed:.2e} (<= 1e-12), |rho(a*) - 9| {nine:.2e} (<= 1e-12), log-slope {slope_err:.2e} (<= 1e-6)"),
    );
    assert!(pass);
}

#[test]
fn criterion_06_two_center_reconstruction() {
    let start = Instant::now();
    let a = c(&[0.25, 0.0, 0.0]);
    let b = c(&[0.5, 0.0, 0.0]);
    let sys = TwoCenterSystem::new(a.clone(), b.clone(), 2).unwrap();
    let f = |x: &Point| x[2] + 0.5 * x[0] * x[1];
    let ga = pullback_family(&a, 2, 2, 1200, 0).unwrap();
    let gb = pullback_family(&b, 2, 2, 1200, 0).unwrap();
    let g = forward_funk(&f, &a, &ga, 64).unwrap();
    let h = forward_funk(&f, &b, &gb, 64).unwrap();
    let grid = Arc::new(build_sphere_grid(2, 48).unwrap());
    let opts = TwoCenterOptions {
        m_max: 40,
        delta: 0.2,
        ..TwoCenterOptions::default()
    };
    let res = reconstruct_two_center(&g, &h, &sys, grid.clone(), &opts, Some(&f)).unwrap();
    let mut sup = 0.0f64;
    for (x, v) in grid.nodes().iter().zip(res.reconstruction.values()) {
        if geodesic_distance(x, sys.a_star()) >= 0.2 {
            sup = sup.max((v - f(x)).abs());
        }
    }
    let rate = res.report.sup_rate.unwrap_or(f64::INFINITY);
    let rho_b = sys.rho_b_star_closed_form();
    let secs = start.elapsed().as_secs_f64();
    let pass = sup <= 1e-4 && rate <= rho_b + 0.05 && secs < 300.0;
    report(
        6,
        "two-center reconstruction",
        pass,
        &format!(
            "sup error on K_0.2 {sup:.2e} (<= 1e-4) with {} terms, decay rate {rate:.4} (<= rho(b*) + 0.05 = {:.4}), overlap {:.1e}, residual {:.1e}, {secs:.1}s",
            res.terms_used,
            rho_b + 0.05,
            res.overlap_discrepancy,
            res.consistency_residual
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_07_lp_threshold() {
    let start = Instant::now();
    let sys = TwoCenterSystem::new(c(&[0.25, 0.0, 0.0]), c(&[0.5, 0.0, 0.0]), 2).unwrap();
    let pole = SpherePoint::from_unit(sys.a_star().clone()).unwrap();
    let grid = SphereGrid::cap_graded(&pole, 1e-30, 8, 64).unwrap();
    let report_ = convergence_diagnostics(&sys, &generic, 60, 0.2, &[1.0, 2.0, 4.0], &grid).unwrap();
    let r0 = &report_.records[0];
    let (l1, l2, l4) = (r0.lp[0], r0.lp[1], r0.lp[2]);
    let iso = report_.records[..=30]
        .iter()
        .map(|r| (r.lp[1] - l2).abs() / l2)
        .fold(0.0f64, f64::max);
    let l1_hit = report_.records.iter().find(|r| r.lp[0] < 0.01 * l1).map(|r| r.m);
    let l4_min = report_.records.iter().map(|r| r.lp[2]).fold(f64::INFINITY, f64::min);
    let secs = start.elapsed().as_secs_f64();
    let pass = iso <= 1e-5 && l1_hit.is_some() && l4_min >= 0.5 * l4 && secs < 120.0;
    report(
        7,
        "L^p threshold at p0 = 2",
        pass,
        &format!(
            "L2 drift {iso:.2e} (<= 1e-5, m <= 30), L1 below 1% at m = {l1_hit:?} (<= 60), min L4/||f||_4 {:.3} (>= 0.5), {secs:.1}s",
            l4_min / l4
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_alternating_projection() {
    let start = Instant::now();
    let sys = TwoCenterSystem::new(c(&[0.25, 0.0, 0.0]), c(&[0.5, 0.0, 0.0]), 2).unwrap();
    let f: Arc<dyn SphereFn> = Arc::new(generic);
    let proj = AlternatingOddProjection::new(&sys, f, 50);
    let grid = build_sphere_grid(2, 24).unwrap();
    let sup = grid
        .nodes()
        .iter()
        .filter(|x| geodesic_distance(x, sys.a_star()) >= 0.2)
        .fold(0.0f64, |m, x| m.max(proj.eval(x).abs()));
    let secs = start.elapsed().as_secs_f64();
    let pass = sup <= 1e-3 && secs < 60.0;
    report(
        8,
        "alternating projection onto C_a^- ∩ C_b^-",
        pass,
        &format!("sup on K_0.2 after 50 projections {sup:.3e} (<= 1e-3), {secs:.1}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_09_k1_reconstruction() {
    let start = Instant::now();
    let sys = TwoCenterSystem::new(c(&[0.25, 0.0, 0.0]), c(&[0.5, 0.0, 0.0]), 1).unwrap();
    let grid = Arc::new(build_sphere_grid(2, 24).unwrap());
    let phantoms: Vec<Box<TestFn>> = vec![
        Box::new(|x: &Point| x[2]),
        Box::new(|x: &Point| x[0]),
        Box::new(|_: &Point| 2.0),
        Box::new(|x: &Point| (0.4 * x[0] - 0.7 * x[1] + 0.2 * x[2]).exp()),
        Box::new(generic),
    ];
    let mut worst = 0.0f64;
    let mut chord_err = 0.0f64;
    for f in &phantoms {
        let g = |line: &PlaneThrough| -> f64 {
            let q = shifted_funk::planes::section_quadrature(line, 8).unwrap();
            q.integrate(&|x: &Point| f(x))
        };
        // F_a(L_{a,b}) = f(a*) + f(b*)
        let chord = point_pair_transform(&|x: &Point| f(x), sys.a(), sys.b_star());
        chord_err = chord_err.max((chord - f(sys.a_star()) - f(sys.b_star())).abs());
        let rec = reconstruct_two_center_k1(&g, &g, &sys, 60, grid.clone()).unwrap();
        for (x, v) in grid.nodes().iter().zip(rec.values()) {
            if geodesic_distance(x, sys.a_star()) >= 0.05 && geodesic_distance(x, sys.b_star()) >= 0.05 {
                worst = worst.max((v - f(x)).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-6 && chord_err <= 1e-14 && secs < 30.0;
    report(
        9,
        "k = 1 symmetrized reconstruction",
        pass,
        &format!("sup error away from endpoints {worst:.2e} (<= 1e-6), chord constant {chord_err:.1e}, {secs:.1}s"),
    );
    assert!(pass);
}

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_shifted-funk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let configs = [
        ("forward", r#"{"a": [0.3, -0.1, 0.2], "phantom": {"kind": "exp_linear", "direction": [0.5, 0.2, -0.3]}, "plane_count": 64, "section_resolution": 32}"#),
        ("invert-single", r#"{"a": [0.3, 0.0, 0.1], "phantom": {"kind": "mixed_quadratic"}, "plane_count": 400, "degree_max": 12, "grid_resolution": 8, "section_resolution": 32}"#),
        ("reconstruct-two", r#"{"a": [0.25, 0.0, 0.0], "b": [0.5, 0.0, 0.0], "phantom": {"kind": "mixed_quadratic"}, "plane_count": 400, "degree_max": 12, "grid_resolution": 8, "section_resolution": 32, "m_max": 20}"#),
        ("reconstruct-two", r#"{"k": 1, "a": [0.25, 0.0, 0.0], "b": [0.5, 0.0, 0.0], "phantom": {"kind": "coordinate", "index": 2}, "grid_resolution": 8, "m_max": 60}"#),
        ("diagnose", r#"{"a": [-0.5, 0.0, 0.0], "b": [0.5, 0.0, 0.0], "phantom": {"kind": "exp_linear", "direction": [1.0, 0.0, 0.0]}, "grid_resolution": 8, "m_max": 12}"#),
    ];
    let mut identical = true;
    let mut detail = Vec::new();
    for (i, (cmd, cfg)) in configs.iter().enumerate() {
        let cfg_path = tmp.path().join(format!("cfg{i}.json"));
        std::fs::write(&cfg_path, cfg).unwrap();
        let mut runs = Vec::new();
        let out = tmp.path().join(format!("out{i}"));
        for _ in 0..2 {
            let o = run_cli(&[cmd, "--config", cfg_path.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7"]);
            assert!(o.status.success(), "{cmd} failed: {}", String::from_utf8_lossy(&o.stderr));
            runs.push(dir_bytes(&out));
            std::fs::remove_dir_all(&out).unwrap();
        }
        let same = runs[0] == runs[1] && !runs[0].is_empty();
        identical &= same;
        detail.push(format!("{cmd}:{}", if same { "identical" } else { "differs" }));
    }
    report(10, "CLI determinism", identical, &detail.join(", "));
    assert!(identical);
}
