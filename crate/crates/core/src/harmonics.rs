//! Real orthonormal spherical harmonics on S².
//!
//! Y_l^0 = p̄_l^0(cos θ), Y_l^m = √2 p̄_l^m(cos θ) cos mφ and
//! Y_l^{−m} = √2 p̄_l^m(cos θ) sin mφ for m > 0, where p̄ are associated
//! Legendre functions normalized so that ∫_{S²} (Y_l^0)² = 1. The sign
//! convention omits the Condon–Shortley phase.

use std::f64::consts::PI;

use crate::sphere::Point;

/// Position of Y_l^m in the flattened basis: l² + l + m.
pub fn index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

/// Number of basis functions of degree ≤ `degree_max`.
pub fn basis_len(degree_max: usize) -> usize {
    (degree_max + 1) * (degree_max + 1)
}

/// Normalized associated Legendre table p̄_l^m(t), laid out as
/// `table[l*(l+1)/2 + m]` for 0 ≤ m ≤ l ≤ `degree_max`.
fn legendre_table(degree_max: usize, t: f64) -> Vec<f64> {
    let u = (1.0 - t * t).max(0.0).sqrt();
    let tri = |l: usize, m: usize| l * (l + 1) / 2 + m;
    let mut p = vec![0.0; (degree_max + 1) * (degree_max + 2) / 2];
    p[0] = (0.25 / PI).sqrt();
    for m in 0..=degree_max {
        if m > 0 {
            let mf = m as f64;
            p[tri(m, m)] = ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * u * p[tri(m - 1, m - 1)];
        }
        if m < degree_max {
            p[tri(m + 1, m)] = (2.0 * m as f64 + 3.0).sqrt() * t * p[tri(m, m)];
        }
        for l in (m + 2)..=degree_max {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            p[tri(l, m)] = a * (t * p[tri(l - 1, m)] - b * p[tri(l - 2, m)]);
        }
    }
    p
}

/// All Y_l^m(x) with l ≤ `degree_max`, in [`index`] order. `x` must be a unit
/// vector in R³.
pub fn eval_all(x: &Point, degree_max: usize) -> Vec<f64> {
    let p = legendre_table(degree_max, x[2].clamp(-1.0, 1.0));
    let phi = x[1].atan2(x[0]);
    let mut out = vec![0.0; basis_len(degree_max)];
    for l in 0..=degree_max {
        let base = l * (l + 1) / 2;
        out[index(l, 0)] = p[base];
        for m in 1..=l {
            let mf = m as f64;
            let v = std::f64::consts::SQRT_2 * p[base + m];
            out[index(l, m as i64)] = v * (mf * phi).cos();
            out[index(l, -(m as i64))] = v * (mf * phi).sin();
        }
    }
    out
}

/// Single Y_l^m(x).
pub fn real_harmonic(l: usize, m: i64, x: &Point) -> f64 {
    assert!(m.unsigned_abs() as usize <= l, "|m| must not exceed l");
    eval_all(x, l)[index(l, m)]
}

/// Legendre polynomial P_l(t).
pub fn legendre(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return 1.0;
    }
    for j in 1..l {
        let jf = j as f64;
        let p2 = ((2.0 * jf + 1.0) * t * p1 - jf * p0) / (jf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}
