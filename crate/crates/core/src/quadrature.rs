//! One-dimensional Gauss rules and a few closed-form constants.

use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Γ(m/2) for a positive integer `m`.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m > 0, "gamma_half needs m >= 1");
    let mut value = if m.is_multiple_of(2) { 1.0 } else { PI.sqrt() };
    // climb from Γ(1) or Γ(1/2) in unit steps
    let mut arg = if m.is_multiple_of(2) { 1.0 } else { 0.5 };
    let target = m as f64 / 2.0;
    while arg < target - 0.25 {
        value *= arg;
        arg += 1.0;
    }
    value
}

/// Surface area of the unit sphere Sⁿ ⊂ Rⁿ⁺¹, i.e. 2π^{(n+1)/2}/Γ((n+1)/2).
/// `n = 0` gives 2, the counting measure of S⁰.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf((n as f64 + 1.0) / 2.0) / gamma_half(n + 1)
}

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(count > 0);
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(count, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss rule for the weight (1 − t²)^α on [-1, 1] (Golub–Welsch).
/// Falls back to Newton-refined Gauss–Legendre for α = 0.
pub fn gauss_gegenbauer(count: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(count > 0 && alpha > -1.0);
    if alpha == 0.0 {
        return gauss_legendre(count);
    }
    let mut jacobi = DMatrix::<f64>::zeros(count, count);
    for j in 1..count {
        let jf = j as f64;
        let denom = (2.0 * jf + 2.0 * alpha).powi(2) - 1.0;
        let beta = jf * (jf + 2.0 * alpha) / denom;
        jacobi[(j, j - 1)] = beta.sqrt();
        jacobi[(j - 1, j)] = beta.sqrt();
    }
    let eig = SymmetricEigen::new(jacobi);
    // ∫(1-t²)^α dt = √π Γ(α+1)/Γ(α+3/2); α is a half-integer for every sphere we build
    let mu0 = moment_zero(alpha);
    let mut pairs: Vec<(f64, f64)> = (0..count)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn moment_zero(alpha: f64) -> f64 {
    let twice = 2.0 * alpha;
    if (twice - twice.round()).abs() < 1e-12 && twice.round() >= 0.0 {
        // Γ(α+1) = Γ((2α+2)/2), Γ(α+3/2) = Γ((2α+3)/2)
        let m = twice.round() as usize;
        PI.sqrt() * gamma_half(m + 2) / gamma_half(m + 3)
    } else {
        panic!("gauss_gegenbauer only supports half-integer α, got {alpha}");
    }
}
