//! Inversion of `𝓛` through preconditioned conjugate gradients on `P`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::Model;
use crate::error::{IkError, Result};
use crate::field::{inner_sum, Field};
use crate::linalg::Matrix;

use super::apply::{apply_l_column, apply_p, apply_script_l, surface_combination};
use super::coeffs::Coefficients;
use super::depth::DepthField;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    /// Relative residual target `‖r‖/‖b‖`.
    pub tol: f64,
    pub max_iter: usize,
    /// Optional bound on the absolute residual `‖r‖`, enforced in addition to `tol`.
    #[serde(default)]
    pub abs_tol: Option<f64>,
    /// Recompute `𝓛φ − F` after the solve and store it in the report.
    pub verify: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: 1e-10,
            max_iter: 500,
            abs_tol: None,
            verify: true,
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub relative_residual: f64,
    /// `‖𝓛φ − F‖ / ‖F‖` when verification is on, else NaN.
    pub defect: f64,
}

/// Per-mode inverse of `P` frozen at constant depth over a flat bottom,
/// optionally wrapped in the pointwise scaling `(H/H₀)^{-(p_i+1/2)}` on both sides.
#[derive(Clone, Debug)]
pub struct ModePreconditioner {
    n: usize,
    reference_depth: f64,
    inverses: Vec<f64>,
    scaling: Option<Vec<Field>>,
}

impl ModePreconditioner {
    /// Symbol of `P` at depth `h0` and squared derivative symbol `kappa2`.
    pub fn symbol(coeffs: &Coefficients, h0: f64, kappa2: f64) -> Matrix {
        let p = coeffs.exponents();
        let lhat = |i: usize, j: usize| {
            let s = coeffs.s(i, j) as i32;
            let mut v = coeffs.a(i, j) * h0.powi(s + 1) * kappa2;
            let d = coeffs.d(i, j);
            if d != 0.0 {
                v += d * h0.powi(s - 1);
            }
            v
        };
        let hp = |i: usize| h0.powi(p[i] as i32);
        Matrix::from_fn(p.len() - 1, |r, c| {
            let (i, j) = (r + 1, c + 1);
            lhat(i, j) - hp(i) * lhat(0, j) - hp(j) * lhat(i, 0) + hp(i) * hp(j) * lhat(0, 0)
        })
    }

    pub fn new(model: &Model, reference_depth: f64) -> Result<Self> {
        let n = model.p.n();
        let grid = &model.grid;
        let mut inverses = Vec::with_capacity(grid.len() * n * n);
        for k in 0..grid.len() {
            let sym = Self::symbol(&model.coeffs, reference_depth, grid.derivative_sq(k));
            let lu = sym.lu();
            let mut inv = vec![0.0; n * n];
            for c in 0..n {
                let mut e = vec![0.0; n];
                e[c] = 1.0;
                let col = lu.solve(&e).ok_or(IkError::IdentityViolation {
                    what: "preconditioner symbol is singular",
                    defect: 0.0,
                })?;
                for r in 0..n {
                    inv[r * n + c] = col[r];
                }
            }
            inverses.extend(inv);
        }
        Ok(ModePreconditioner {
            n,
            reference_depth,
            inverses,
            scaling: None,
        })
    }

    /// Adds the depth scaling for `depth`, using its mean as reference depth.
    pub fn scaled(model: &Model, depth: &DepthField) -> Result<Self> {
        let h0 = depth.h().mean();
        let mut pre = Self::new(model, h0)?;
        let p = model.p.as_slice();
        pre.scaling = Some(
            (1..p.len())
                .map(|i| depth.h().map(|h| (h / h0).powf(-(p[i] as f64 + 0.5))))
                .collect(),
        );
        Ok(pre)
    }

    pub fn reference_depth(&self) -> f64 {
        self.reference_depth
    }

    pub fn apply(&self, r: &[Field]) -> Vec<Field> {
        let grid = r[0].grid().clone();
        let n = self.n;
        let policy = grid.policy();
        let spectra = policy.map_tasks(n, |i| match &self.scaling {
            Some(sc) => grid.forward((&r[i] * &sc[i]).values()),
            None => grid.forward(r[i].values()),
        });
        let mut out = vec![vec![Complex64::new(0.0, 0.0); grid.len()]; n];
        for k in 0..grid.len() {
            let inv = &self.inverses[k * n * n..(k + 1) * n * n];
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += spectra[j][k] * inv[i * n + j];
                }
                out[i][k] = acc;
            }
        }
        let fields = policy.map_tasks(n, |i| grid.inverse_real(out[i].clone()));
        fields
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                let f = Field::from_raw(&grid, v);
                match &self.scaling {
                    Some(sc) => &f * &sc[i],
                    None => f,
                }
            })
            .collect()
    }
}

fn norm(v: &[Field]) -> f64 {
    inner_sum(v, v).sqrt()
}

/// Solves `Pφ' = rhs` by preconditioned CG from a zero initial guess.
pub fn solve_p(
    model: &Model,
    depth: &DepthField,
    rhs: &[Field],
    opts: &SolverOptions,
) -> Result<(Vec<Field>, SolveReport)> {
    let bnorm = norm(rhs);
    let mut x: Vec<Field> = rhs.iter().map(|f| Field::zeros(f.grid())).collect();
    let mut report = SolveReport {
        defect: f64::NAN,
        ..Default::default()
    };
    if bnorm == 0.0 {
        report.residual_history.push(0.0);
        return Ok((x, report));
    }
    let pre = ModePreconditioner::scaled(model, depth)?;
    let mut r: Vec<Field> = rhs.to_vec();
    let mut z = pre.apply(&r);
    let mut d = z.clone();
    let mut rz = inner_sum(&r, &z);
    report.residual_history.push(1.0);
    for it in 1..=opts.max_iter {
        let ad = apply_p(model, depth, &d);
        let alpha = rz / inner_sum(&d, &ad);
        for (xi, di) in x.iter_mut().zip(&d) {
            xi.axpy(alpha, di);
        }
        for (ri, adi) in r.iter_mut().zip(&ad) {
            ri.axpy(-alpha, adi);
        }
        let rel = norm(&r) / bnorm;
        report.residual_history.push(rel);
        report.iterations = it;
        report.relative_residual = rel;
        if !rel.is_finite() {
            break;
        }
        if rel <= opts.tol && opts.abs_tol.is_none_or(|a| rel * bnorm <= a) {
            return Ok((x, report));
        }
        z = pre.apply(&r);
        let rz_new = inner_sum(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (di, zi) in d.iter_mut().zip(&z) {
            let mut next = zi.clone();
            next.axpy(beta, di);
            *di = next;
        }
    }
    Err(IkError::EllipticNoConverge {
        iterations: report.iterations,
        last: report.relative_residual,
        history: report.residual_history,
    })
}

/// Solves `𝓛φ = F`.
///
/// With `G_i = F_i − (L_i0 − H^{p_i}L_00)F_0` it solves `Pφ' = G` and sets
/// `φ₀ = F₀ − Σ_{j≥1} H^{p_j} φ_j`.
pub fn solve_script_l(
    model: &Model,
    depth: &DepthField,
    f: &[Field],
    opts: &SolverOptions,
) -> Result<(Vec<Field>, SolveReport)> {
    let p = model.p.as_slice();
    assert_eq!(f.len(), p.len(), "right-hand side needs N+1 fields");
    let col = apply_l_column(model, depth, 0, &f[0]);
    let g: Vec<Field> = (1..p.len())
        .map(|i| {
            let mut gi = f[i].clone();
            gi -= &col[i];
            gi += &(depth.pow(p[i]) * &col[0]);
            gi
        })
        .collect();
    let (phi_prime, mut report) = solve_p(model, depth, &g, opts)?;
    let mut phi = Vec::with_capacity(p.len());
    phi.push(Field::zeros(&model.grid));
    phi.extend(phi_prime);
    phi[0] = &f[0] - &surface_combination(depth, p, &phi, 1);
    if opts.verify {
        let back = apply_script_l(model, depth, &phi);
        let diff: Vec<Field> = back.iter().zip(f).map(|(a, b)| a - b).collect();
        let fnorm = norm(f);
        report.defect = if fnorm > 0.0 {
            norm(&diff) / fnorm
        } else {
            norm(&diff)
        };
    }
    Ok((phi, report))
}
