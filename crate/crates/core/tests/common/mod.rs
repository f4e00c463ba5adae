//! Independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use ikwave_core::{BottomProfile, Exponents, Field, Grid, Model, ModelConfig, PeriodicDomain};

pub fn model(p: &[u32], bottom: BottomProfile, length: f64, n: usize) -> Model {
    ModelConfig {
        g: 9.81,
        h: 1.0,
        rho: 1000.0,
        p: Exponents::new(p.to_vec()).unwrap(),
        bottom,
        domain: PeriodicDomain::line(length, n).unwrap(),
    }
    .build()
    .unwrap()
}

pub fn flat(p: &[u32], n: usize) -> Model {
    model(p, BottomProfile::Flat, 2.0 * PI, n)
}

pub fn wavy(p: &[u32], n: usize, amplitude: f64) -> Model {
    model(
        p,
        BottomProfile::Sinusoidal {
            amplitude,
            mode: vec![1],
            phase: 0.3,
        },
        2.0 * PI,
        n,
    )
}

/// `Σ_m c_m cos(m x + θ_m)` on a `2π` line, modes starting at 1.
pub fn trig(grid: &Arc<Grid>, coeffs: &[(f64, f64)]) -> Field {
    let l = grid.domain().lengths[0];
    Field::from_fn(grid, |x, _| {
        coeffs
            .iter()
            .enumerate()
            .map(|(m, &(c, th))| c * ((m as f64 + 1.0) * 2.0 * PI * x / l + th).cos())
            .sum()
    })
}

/// Gauss-Legendre nodes and weights on `[0, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = (PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (x + 1.0), 0.5 * w));
    }
    out
}

/// Determinant by cofactor expansion along the first row.
pub fn cofactor_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    if n == 1 {
        return m[0][0];
    }
    (0..n)
        .map(|c| {
            let minor: Vec<Vec<f64>> = m[1..]
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(k, _)| k != c)
                        .map(|(_, &v)| v)
                        .collect()
                })
                .collect();
            let sign = if c % 2 == 0 { 1.0 } else { -1.0 };
            sign * m[0][c] * cofactor_det(&minor)
        })
        .sum()
}

/// `0/0 = 0`, otherwise plain division.
pub fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Convergent of `tanh μ/μ = 1/(1 + μ²/(3 + μ²/(5 + …)))` stopping at `4n+1`.
pub fn lambert_fraction(n: usize, mu: f64) -> f64 {
    let m2 = mu * mu;
    let mut tail = (4 * n + 1) as f64;
    for k in (0..2 * n).rev() {
        tail = (2 * k + 1) as f64 + m2 / tail;
    }
    1.0 / tail
}

/// `(A(μ)ψ)·ψ` as `∫₀¹ μ²(Σψ_i z^{p_i})² + (Σ p_iψ_i z^{p_i−1})² dz`.
pub fn quadrature_form(p: &[u32], mu: f64, psi: &[f64]) -> f64 {
    gauss_legendre(p.iter().max().copied().unwrap() as usize + 4)
        .into_iter()
        .map(|(z, w)| {
            let a: f64 = p.iter().zip(psi).map(|(&pi, &c)| c * z.powi(pi as i32)).sum();
            let b: f64 = p
                .iter()
                .zip(psi)
                .filter(|(&pi, _)| pi > 0)
                .map(|(&pi, &c)| pi as f64 * c * z.powi(pi as i32 - 1))
                .sum();
            w * (mu * mu * a * a + b * b)
        })
        .sum()
}

/// Symbol of `L_ij` on a flat bottom of depth `h` for wavenumber `k`.
pub fn flat_symbol(p: &[u32], i: usize, j: usize, h: f64, k: f64) -> f64 {
    let s = (p[i] + p[j]) as f64;
    h.powf(s + 1.0) / (s + 1.0) * k * k
        + ratio((p[i] * p[j]) as f64, s - 1.0) * if s >= 1.0 { h.powf(s - 1.0) } else { 0.0 }
}

/// Solves `𝓛φ = F` for a single cosine mode on a flat bottom by Gaussian elimination.
pub fn flat_mode_solve(p: &[u32], h: f64, k: f64, f_hat: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == 0 {
                        h.powi(p[j] as i32)
                    } else {
                        flat_symbol(p, i, j, h, k) - h.powi(p[i] as i32) * flat_symbol(p, 0, j, h, k)
                    }
                })
                .collect()
        })
        .collect();
    let mut rhs = f_hat.to_vec();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&a, &b| m[a][c].abs().partial_cmp(&m[b][c].abs()).unwrap())
            .unwrap();
        m.swap(c, piv);
        rhs.swap(c, piv);
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for cc in c..n {
                m[r][cc] -= f * m[c][cc];
            }
            rhs[r] -= f * rhs[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (rhs[r] - s) / m[r][r];
    }
    x
}

/// Energy-form integrand `∫₀^H |Σ(z^{p_i}∇φ_i − p_i z^{p_i−1}φ_i∇b)|² + (Σ p_i z^{p_i−1}φ_i)² dz`
/// integrated over a 1-D periodic grid.
pub fn depth_quadrature_energy(
    p: &[u32],
    h: &[f64],
    b_x: &[f64],
    phi: &[Vec<f64>],
    phi_x: &[Vec<f64>],
    dx: f64,
) -> f64 {
    let nodes = gauss_legendre(p.iter().max().copied().unwrap() as usize + 4);
    let mut total = 0.0;
    for k in 0..h.len() {
        let mut acc = 0.0;
        for &(t, w) in &nodes {
            let z = t * h[k];
            let mut horiz = 0.0;
            let mut vert = 0.0;
            for (i, &pi) in p.iter().enumerate() {
                horiz += z.powi(pi as i32) * phi_x[i][k];
                if pi > 0 {
                    let zp = pi as f64 * z.powi(pi as i32 - 1);
                    horiz -= zp * phi[i][k] * b_x[k];
                    vert += zp * phi[i][k];
                }
            }
            acc += w * h[k] * (horiz * horiz + vert * vert);
        }
        total += acc * dx;
    }
    total
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

pub fn rel_diff(a: &[Field], b: &[Field]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).l2_norm().powi(2)).sum();
    let den: f64 = b.iter().map(|y| y.l2_norm().powi(2)).sum();
    (num / den).sqrt()
}
