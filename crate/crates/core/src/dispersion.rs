//! Linear dispersion of the model over a flat bottom.
//!
//! With `μ = h|ξ|`, `A(μ) = μ²A₀ + A₁` and the bordered matrix
//! `Ã = [[0, 𝟙ᵀ], [-𝟙, A]]`, the squared phase speed is
//!
//! ```text
//! c²(μ) = g h · (μ⁻² det A(μ)) / det Ã(μ)
//! ```
//!
//! The first row of `A₁` vanishes, so the first row of `A(μ)` is exactly
//! `μ²·(first row of A₀)`. Factoring it out gives `μ⁻² det A(μ)` without any
//! cancellation near `μ = 0`.

use serde::Serialize;

use crate::config::Exponents;
use crate::error::{IkError, Result};
use crate::exec::ExecPolicy;
use crate::linalg::Matrix;

/// Relative threshold below which two sampled curves count as identical.
pub const EXACT_MATCH_TOL: f64 = 1e-13;

/// Tolerance on the residual of the Padé matching system.
pub const PADE_RESIDUAL_TOL: f64 = 1e-10;

/// `A₀ = (1/(p_i+p_j+1))`, `A₁ = (p_i p_j/(p_i+p_j−1))` with `0/0 = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionMatrices {
    pub a0: Matrix,
    pub a1: Matrix,
    pub p: Exponents,
}

/// Builds the dispersion matrices for a raw exponent list.
pub fn build_matrices(p: &[u32]) -> Result<DispersionMatrices> {
    Ok(DispersionMatrices::new(&Exponents::new(p.to_vec())?))
}

/// Determinant of `[[0, 𝟙ᵀ], [-𝟙, A]]`.
pub fn bordered_det(a: &Matrix) -> f64 {
    a.bordered(&vec![1.0; a.n()]).det()
}

impl DispersionMatrices {
    pub fn new(p: &Exponents) -> Self {
        let n = p.count();
        let a0 = Matrix::from_fn(n, |i, j| 1.0 / (p.get(i) + p.get(j) + 1.0));
        let a1 = Matrix::from_fn(n, |i, j| {
            let num = p.get(i) * p.get(j);
            if num == 0.0 {
                0.0
            } else {
                num / (p.get(i) + p.get(j) - 1.0)
            }
        });
        DispersionMatrices { a0, a1, p: p.clone() }
    }

    /// `A(μ) = μ²A₀ + A₁`
    pub fn at(&self, mu: f64) -> Matrix {
        self.a0.combine(mu * mu, &self.a1, 1.0)
    }

    pub fn det_a(&self, mu: f64) -> f64 {
        self.at(mu).det()
    }

    /// `det Ã(μ)`
    pub fn det_bordered(&self, mu: f64) -> f64 {
        bordered_det(&self.at(mu))
    }

    /// `μ⁻² det A(μ)`, exact at `μ = 0`.
    pub fn reduced_det_a(&self, mu: f64) -> f64 {
        let mut m = self.at(mu);
        for j in 0..m.n() {
            m.set(0, j, self.a0.get(0, j));
        }
        m.det()
    }

    /// `(c_IK/√(gh))²` at `μ`.
    pub fn normalized_speed_sq(&self, mu: f64) -> f64 {
        self.reduced_det_a(mu) / self.det_bordered(mu)
    }

    /// Large-μ plateau `det A₀ / det Ã₀` of the normalized squared speed.
    pub fn plateau(&self) -> f64 {
        self.a0.det() / bordered_det(&self.a0)
    }

    /// Polynomial coefficients (in `s = μ²`) of `μ⁻² det A` and `det Ã`,
    /// recovered by interpolation through sampled determinants.
    pub fn determinant_polynomials(&self) -> Result<DeterminantPolynomials> {
        let n = self.p.n();
        let det_a = interpolate_in_s(n + 1, |s| self.det_a(s.sqrt()))?;
        let scale = det_a.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let constant = det_a.coeffs[0];
        if constant.abs() > 1e-9 * scale {
            return Err(IkError::IdentityViolation {
                what: "constant term of det A(mu) must vanish",
                defect: constant.abs() / scale,
            });
        }
        let reduced = Polynomial {
            coeffs: det_a.coeffs[1..].to_vec(),
        };
        let bordered = interpolate_in_s(n, |s| self.det_bordered(s.sqrt()))?;
        Ok(DeterminantPolynomials {
            reduced_det_a: reduced,
            det_bordered: bordered,
            dropped_constant: constant,
        })
    }
}

/// Polynomial in `s = μ²`, coefficients in increasing degree.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().unwrap_or(&0.0)
    }
}

#[derive(Clone, Debug)]
pub struct DeterminantPolynomials {
    pub reduced_det_a: Polynomial,
    pub det_bordered: Polynomial,
    /// The interpolated constant term of `det A`, ideally zero.
    pub dropped_constant: f64,
}

/// Fits a degree-`deg` polynomial in `s` through Chebyshev nodes on `[0, 2]`.
fn interpolate_in_s<F: Fn(f64) -> f64>(deg: usize, f: F) -> Result<Polynomial> {
    let m = deg + 1;
    let nodes: Vec<f64> = (0..m)
        .map(|k| 1.0 - ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * m) as f64).cos())
        .collect();
    let vander = Matrix::from_fn(m, |i, j| nodes[i].powi(j as i32));
    let rhs: Vec<f64> = nodes.iter().map(|&s| f(s)).collect();
    let coeffs = vander.lu().solve(&rhs).ok_or(IkError::IdentityViolation {
        what: "interpolation nodes must be distinct",
        defect: 0.0,
    })?;
    Ok(Polynomial { coeffs })
}

/// Squared model phase speed `c_IK²` (m²/s²) at `μ = h|ξ|`.
pub fn phase_speed_ik(mu: f64, p: &Exponents, g: f64, h: f64) -> f64 {
    g * h * DispersionMatrices::new(p).normalized_speed_sq(mu)
}

/// Squared linear water-wave phase speed `g h tanh(μ)/μ`.
pub fn phase_speed_ww(mu: f64, g: f64, h: f64) -> f64 {
    g * h * tanh_over_x(mu)
}

/// `tanh(x)/x` with the removable singularity filled in.
pub fn tanh_over_x(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let s = x * x;
        1.0 - s / 3.0 + 2.0 * s * s / 15.0
    } else {
        x.tanh() / x
    }
}

/// Maclaurin coefficients of `tanh(x)/x` in powers of `s = x²`.
///
/// Uses `t' = 1 − t²` for `t = tanh x = Σ a_n x^{2n+1}`, which gives
/// `(2n+1) a_n = −Σ_{i+j=n−1} a_i a_j`.
pub fn tanh_over_x_series(terms: usize) -> Vec<f64> {
    let mut a = Vec::with_capacity(terms);
    for n in 0..terms {
        if n == 0 {
            a.push(1.0);
            continue;
        }
        let conv: f64 = (0..n).map(|i| a[i] * a[n - 1 - i]).sum();
        a.push(-conv / (2 * n + 1) as f64);
    }
    a
}

/// Rational function `num(s)/den(s)` in `s = μ²`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RationalFunction {
    pub num: Polynomial,
    pub den: Polynomial,
}

impl RationalFunction {
    pub fn eval_mu(&self, mu: f64) -> f64 {
        let s = mu * mu;
        self.num.eval(s) / self.den.eval(s)
    }
}

/// `[2N/2N]` Padé approximant of `tanh(μ)/μ`, normalized so `Q(0) = 1`.
pub fn pade_reference(n: usize) -> Result<RationalFunction> {
    if n == 0 {
        return Err(IkError::BadExponents("Pade order needs N >= 1".into()));
    }
    let c = tanh_over_x_series(2 * n + 1);
    // Q(s) f(s) − P(s) = O(s^{2N+1}): rows k = N+1..2N fix q_1..q_N.
    let sys = Matrix::from_fn(n, |r, m| c[n + 1 + r - (m + 1)]);
    let rhs: Vec<f64> = (0..n).map(|r| -c[n + 1 + r]).collect();
    let lu = sys.lu();
    let q_tail = lu.solve(&rhs).ok_or(IkError::PadeDegenerate {
        residual: f64::INFINITY,
    })?;
    let back = sys.mul_vec(&q_tail);
    let residual = back
        .iter()
        .zip(&rhs)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if !(residual <= PADE_RESIDUAL_TOL) {
        return Err(IkError::PadeDegenerate { residual });
    }
    let mut q = vec![1.0];
    q.extend(q_tail);
    let p: Vec<f64> = (0..=n).map(|k| (0..=k).map(|m| q[m] * c[k - m]).sum()).collect();
    Ok(RationalFunction {
        num: Polynomial { coeffs: p },
        den: Polynomial { coeffs: q },
    })
}

/// Normalized squared phase speeds `(c/√(gh))²` sampled on a μ grid.
#[derive(Clone, Debug, Serialize)]
pub struct PhaseSpeedCurve {
    pub mu: Vec<f64>,
    pub model: Vec<f64>,
    pub reference: Vec<f64>,
}

impl PhaseSpeedCurve {
    pub fn sample(p: &Exponents, mu: Vec<f64>, policy: ExecPolicy) -> Self {
        let mats = DispersionMatrices::new(p);
        let model = policy.map_range(mu.len(), |k| mats.normalized_speed_sq(mu[k]));
        let reference = mu.iter().map(|&m| tanh_over_x(m)).collect();
        PhaseSpeedCurve { mu, model, reference }
    }

    /// Uniform grid of `n` points on `[lo, hi]`.
    pub fn uniform(p: &Exponents, lo: f64, hi: f64, n: usize, policy: ExecPolicy) -> Self {
        let mu = linspace(lo, hi, n);
        Self::sample(p, mu, policy)
    }

    /// Log-log slope of `|model − reference|` over `window`.
    pub fn error_exponent(&self, window: (f64, f64)) -> Result<f64> {
        error_scaling_fit(&self.mu, &self.model, &self.reference, window)
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Geometric grid of `n` points on `[lo, hi]`, `lo > 0`.
pub fn geomspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

/// Least-squares slope of `log|a − b|` against `log μ` inside `window`.
pub fn error_scaling_fit(mu: &[f64], a: &[f64], b: &[f64], window: (f64, f64)) -> Result<f64> {
    if mu.len() != a.len() || mu.len() != b.len() {
        return Err(IkError::InvalidConfig(
            "curves must be sampled on the same grid".into(),
        ));
    }
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi && hi <= 0.5) {
        return Err(IkError::InvalidConfig(format!(
            "fit window must lie inside (0, 0.5], got [{lo}, {hi}]"
        )));
    }
    let picked: Vec<(f64, f64, f64)> = mu
        .iter()
        .zip(a.iter().zip(b))
        .filter(|(&m, _)| m >= lo && m <= hi)
        .map(|(&m, (&x, &y))| (m, x, y))
        .collect();
    let scale = picked
        .iter()
        .fold(1.0f64, |s, &(_, x, y)| s.max(x.abs()).max(y.abs()));
    let max_diff = picked.iter().fold(0.0f64, |m, &(_, x, y)| m.max((x - y).abs()));
    if max_diff <= EXACT_MATCH_TOL * scale {
        return Err(IkError::ExactMatch);
    }
    let pts: Vec<(f64, f64)> = picked
        .iter()
        .filter(|&&(_, x, y)| x != y)
        .map(|&(m, x, y)| (m.ln(), (x - y).abs().ln()))
        .collect();
    if pts.len() < 2 {
        return Err(IkError::InvalidConfig(
            "need at least two samples inside the fit window".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Exponent of the error bound: `4N+2` for `p_i = 2i`, `4⌊N/2⌋+2` for `p_i = i`.
pub fn expected_error_exponent(p: &Exponents) -> Option<f64> {
    let n = p.n();
    if p.is_even_family() {
        Some((4 * n + 2) as f64)
    } else if p.as_slice().iter().enumerate().all(|(i, &v)| v == i as u32) {
        Some((4 * (n / 2) + 2) as f64)
    } else {
        None
    }
}
