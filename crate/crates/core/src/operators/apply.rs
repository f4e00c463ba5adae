//! The variable-coefficient operators `L_ij`, the traces `u`, `w`, the
//! system `𝓛` and its reduction `P`.
//!
//! All products are exact collocation products; derivatives go through the
//! skew-symmetric first-derivative matrix so that `L_ij* = L_ji` holds for
//! the discrete inner product to rounding.

use crate::config::Model;
use crate::field::Field;
use crate::spectral::{divergence, gradient};

use super::depth::DepthField;

/// One input `ψ_j` together with its gradient.
struct Input<'a> {
    j: usize,
    psi: &'a Field,
    grad: Vec<Field>,
}

fn prepare<'a>(model: &Model, inputs: Vec<(usize, &'a Field)>) -> Vec<Input<'a>> {
    let policy = model.grid.policy();
    let grads = policy.map_tasks(inputs.len(), |k| gradient(inputs[k].1));
    inputs
        .into_iter()
        .zip(grads)
        .map(|((j, psi), grad)| Input { j, psi, grad })
        .collect()
}

/// `Σ_j L_ij ψ_j` over the prepared inputs.
fn row(model: &Model, depth: &DepthField, i: usize, inputs: &[Input]) -> Field {
    let grid = &model.grid;
    let policy = grid.policy();
    let co = &model.coeffs;
    let bottom = &model.bottom;
    let flat = bottom.is_flat();
    let dim = grid.dim();

    let mut flux = Vec::with_capacity(dim);
    for ax in 0..dim {
        let mut out = vec![0.0; grid.len()];
        let gb = bottom.grad[ax].values();
        policy.fill(&mut out, |k| {
            let mut acc = 0.0;
            for inp in inputs {
                let s = co.s(i, inp.j);
                acc += co.a(i, inp.j) * depth.pow(s + 1).values()[k] * inp.grad[ax].values()[k];
                let b = co.b(i, inp.j);
                if !flat && b != 0.0 {
                    acc -= b * depth.pow(s).values()[k] * inp.psi.values()[k] * gb[k];
                }
            }
            acc
        });
        flux.push(Field::from_raw(grid, out));
    }

    let mut zero = vec![0.0; grid.len()];
    policy.fill(&mut zero, |k| {
        let mut acc = 0.0;
        for inp in inputs {
            let j = inp.j;
            let s = co.s(i, j);
            let c = co.c(i, j);
            if !flat && c != 0.0 {
                let bdot: f64 = (0..dim)
                    .map(|ax| bottom.grad[ax].values()[k] * inp.grad[ax].values()[k])
                    .sum();
                acc -= c * depth.pow(s).values()[k] * bdot;
            }
            let d = co.d(i, j);
            if d != 0.0 {
                acc += d
                    * depth.pow(s - 1).values()[k]
                    * (1.0 + bottom.grad_sq.values()[k])
                    * inp.psi.values()[k];
            }
        }
        acc
    });
    let mut out = Field::from_raw(grid, zero);
    out -= &divergence(&flux);
    out
}

/// `L_ij ψ`.
pub fn apply_l(model: &Model, depth: &DepthField, i: usize, j: usize, psi: &Field) -> Field {
    let inputs = prepare(model, vec![(j, psi)]);
    row(model, depth, i, &inputs)
}

/// `(Σ_j L_ij φ_j)_{i=0..N}`.
pub fn apply_l_matrix(model: &Model, depth: &DepthField, phi: &[Field]) -> Vec<Field> {
    assert_eq!(phi.len(), model.p.count(), "wrong number of potentials");
    let inputs = prepare(model, phi.iter().enumerate().collect());
    model
        .grid
        .policy()
        .map_tasks(phi.len(), |i| row(model, depth, i, &inputs))
}

/// `(L_ij ψ)_{i=0..N}` for a single column `j`.
pub fn apply_l_column(model: &Model, depth: &DepthField, j: usize, psi: &Field) -> Vec<Field> {
    let inputs = prepare(model, vec![(j, psi)]);
    model
        .grid
        .policy()
        .map_tasks(model.p.count(), |i| row(model, depth, i, &inputs))
}

/// Horizontal and vertical velocity at the surface.
#[derive(Clone, Debug)]
pub struct Traces {
    pub u: Vec<Field>,
    pub w: Field,
}

/// `u = Σ(H^{p_i}∇φ_i − p_i H^{p_i−1} φ_i ∇b)`, `w = Σ p_i H^{p_i−1} φ_i`.
pub fn velocity_traces(model: &Model, depth: &DepthField, phi: &[Field]) -> Traces {
    let grads = model.grid.policy().map_tasks(phi.len(), |j| gradient(&phi[j]));
    traces_from_gradients(model, depth, phi, &grads)
}

pub(crate) fn traces_from_gradients(
    model: &Model,
    depth: &DepthField,
    phi: &[Field],
    grads: &[Vec<Field>],
) -> Traces {
    let grid = &model.grid;
    let policy = grid.policy();
    let p = model.p.as_slice();
    let flat = model.bottom.is_flat();
    let u = (0..grid.dim())
        .map(|ax| {
            let gb = model.bottom.grad[ax].values();
            let mut out = vec![0.0; grid.len()];
            policy.fill(&mut out, |k| {
                let mut acc = 0.0;
                for (i, &pi) in p.iter().enumerate() {
                    acc += depth.pow(pi).values()[k] * grads[i][ax].values()[k];
                    if !flat && pi > 0 {
                        acc -= pi as f64 * depth.pow(pi - 1).values()[k] * phi[i].values()[k] * gb[k];
                    }
                }
                acc
            });
            Field::from_raw(grid, out)
        })
        .collect();
    let mut w = vec![0.0; grid.len()];
    policy.fill(&mut w, |k| {
        p.iter()
            .enumerate()
            .filter(|(_, &pi)| pi > 0)
            .map(|(i, &pi)| pi as f64 * depth.pow(pi - 1).values()[k] * phi[i].values()[k])
            .sum()
    });
    Traces {
        u,
        w: Field::from_raw(grid, w),
    }
}

/// `Σ_j H^{p_j} φ_j` over `j ≥ start`.
pub fn surface_combination(depth: &DepthField, p: &[u32], phi: &[Field], start: usize) -> Field {
    let mut out = Field::zeros(depth.h().grid());
    for j in start..p.len() {
        out += &(depth.pow(p[j]) * &phi[j]);
    }
    out
}

/// `(y_i − H^{p_i} y_0)_{i=1..N}` for a full vector `y`.
fn reduce_rows(depth: &DepthField, p: &[u32], y: &[Field]) -> Vec<Field> {
    (1..p.len()).map(|i| &y[i] - &(depth.pow(p[i]) * &y[0])).collect()
}

/// `𝓛φ`: `𝓛₀φ = Σ H^{p_j}φ_j`, `𝓛_iφ = Σ_j (L_ij − H^{p_i}L_0j) φ_j`.
pub fn apply_script_l(model: &Model, depth: &DepthField, phi: &[Field]) -> Vec<Field> {
    let p = model.p.as_slice();
    let y = apply_l_matrix(model, depth, phi);
    let mut out = Vec::with_capacity(p.len());
    out.push(surface_combination(depth, p, phi, 0));
    out.extend(reduce_rows(depth, p, &y));
    out
}

/// Completes `φ' = (φ_1..φ_N)` with `φ₀ = −Σ_{j≥1} H^{p_j} φ_j`.
pub fn lift(depth: &DepthField, p: &[u32], phi_prime: &[Field]) -> Vec<Field> {
    let mut full = Vec::with_capacity(p.len());
    full.push(Field::zeros(depth.h().grid()));
    full.extend(phi_prime.iter().cloned());
    full[0] = -&surface_combination(depth, p, &full, 1);
    full
}

/// `Pφ'`, the restriction of `𝓛_{1..N}` to `𝓛₀φ = 0`.
pub fn apply_p(model: &Model, depth: &DepthField, phi_prime: &[Field]) -> Vec<Field> {
    let p = model.p.as_slice();
    assert_eq!(phi_prime.len(), p.len() - 1, "P acts on N fields");
    let full = lift(depth, p, phi_prime);
    let y = apply_l_matrix(model, depth, &full);
    reduce_rows(depth, p, &y)
}
