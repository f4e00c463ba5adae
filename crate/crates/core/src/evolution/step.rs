use serde::Serialize;

use crate::config::Model;
use crate::error::{IkError, Result};
use crate::field::Field;
use crate::operators::{
    apply_script_l, solve_script_l, surface_combination, DepthField, SolveReport, SolverOptions,
};
use crate::spectral::{dealias, laplacian};
use crate::state::State;

use super::config::EvolutionConfig;
use super::rhs::{assemble_rhs, RhsBundle};

#[derive(Clone, Debug)]
pub struct TimeDerivative {
    pub d_eta: Field,
    pub d_phi: Vec<Field>,
    pub report: SolveReport,
}

/// `𝓛⁻¹F` from an assembled right-hand side.
pub fn solve_for_phi_rate(
    model: &Model,
    rhs: &RhsBundle,
    opts: &SolverOptions,
) -> Result<(Vec<Field>, SolveReport)> {
    solve_script_l(model, &rhs.depth, &rhs.full_f(), opts)
}

/// `∂_tφ = 𝓛⁻¹F + εΔφ`, `∂_tη = F_{N+1} + εΔη`.
pub fn time_derivative(model: &Model, state: &State, cfg: &EvolutionConfig) -> Result<TimeDerivative> {
    let rhs = assemble_rhs(model, state)?;
    let opts = SolverOptions {
        verify: false,
        ..cfg.solver
    };
    let (mut d_phi, report) = solve_for_phi_rate(model, &rhs, &opts)?;
    let mut d_eta = rhs.f_np1;
    if cfg.epsilon > 0.0 {
        d_eta.axpy(cfg.epsilon, &laplacian(&state.eta));
        for (d, phi) in d_phi.iter_mut().zip(&state.phi) {
            d.axpy(cfg.epsilon, &laplacian(phi));
        }
    }
    Ok(TimeDerivative { d_eta, d_phi, report })
}

/// `∂_tφ` at a state, as used for the sign function.
pub fn initial_time_derivatives(model: &Model, state: &State, opts: &SolverOptions) -> Result<Vec<Field>> {
    let rhs = assemble_rhs(model, state)?;
    Ok(solve_for_phi_rate(model, &rhs, opts)?.0)
}

/// One classical Runge-Kutta step of size `cfg.dt` (which may be negative).
pub fn step_rk4(model: &Model, state: &State, cfg: &EvolutionConfig) -> Result<State> {
    let dt = cfg.dt;
    let k1 = time_derivative(model, state, cfg)?;
    let s2 = state.offset(0.5 * dt, &k1.d_eta, &k1.d_phi);
    let k2 = time_derivative(model, &s2, cfg)?;
    let s3 = state.offset(0.5 * dt, &k2.d_eta, &k2.d_phi);
    let k3 = time_derivative(model, &s3, cfg)?;
    let s4 = state.offset(dt, &k3.d_eta, &k3.d_phi);
    let k4 = time_derivative(model, &s4, cfg)?;

    let combine = |base: &Field, a: &Field, b: &Field, c: &Field, d: &Field| {
        let mut out = base.clone();
        out.axpy(dt / 6.0, a);
        out.axpy(dt / 3.0, b);
        out.axpy(dt / 3.0, c);
        out.axpy(dt / 6.0, d);
        if cfg.dealias {
            dealias(&out)
        } else {
            out
        }
    };
    let eta = combine(&state.eta, &k1.d_eta, &k2.d_eta, &k3.d_eta, &k4.d_eta);
    let phi = (0..state.phi.len())
        .map(|i| {
            combine(
                &state.phi[i],
                &k1.d_phi[i],
                &k2.d_phi[i],
                &k3.d_phi[i],
                &k4.d_phi[i],
            )
        })
        .collect();
    let next = State::new(eta, phi, state.t + dt);
    next.validate(model)?;
    Ok(next)
}

/// Residuals of freshly constructed initial data.
#[derive(Clone, Debug, Serialize)]
pub struct InitialDataReport {
    pub solve: SolveReport,
    /// `‖𝓛_iφ‖ / ‖φ_surface‖` for `i = 1..N` (zero surface data gives absolute norms).
    pub compatibility: Vec<f64>,
    /// `‖Σ H^{p_i}φ_i − φ_surface‖ / ‖φ_surface‖`
    pub trace_defect: f64,
}

/// Builds `φ` from `(η₀, φ_surface)` by solving `𝓛φ = (φ_surface, 0, …, 0)`.
///
/// `tol` bounds `‖𝓛_iφ‖` relative to `‖φ_surface‖`.
pub fn construct_initial_data(
    model: &Model,
    eta0: Field,
    phi_surface: &Field,
    tol: f64,
) -> Result<(State, InitialDataReport)> {
    if !(tol > 0.0) {
        return Err(IkError::InvalidConfig("tolerance must be positive".into()));
    }
    let mut state = State::rest(model);
    state.eta = eta0;
    phi_surface.check_finite()?;
    let depth = DepthField::from_state(model, &state)?;
    let snorm = phi_surface.l2_norm();
    let mut f = vec![phi_surface.clone()];
    f.extend((0..model.n()).map(|_| Field::zeros(&model.grid)));
    let opts = SolverOptions {
        tol: tol.min(1e-10),
        max_iter: 500,
        abs_tol: Some(tol * snorm),
        verify: true,
    };
    let (phi, solve) = solve_script_l(model, &depth, &f, &opts)?;
    state.phi = phi;
    let scale = if snorm > 0.0 { snorm } else { 1.0 };
    let back = apply_script_l(model, &depth, &state.phi);
    let compatibility = back[1..].iter().map(|r| r.l2_norm() / scale).collect();
    let trace = surface_combination(&depth, model.p.as_slice(), &state.phi, 0);
    let trace_defect = (&trace - phi_surface).l2_norm() / scale;
    Ok((
        state,
        InitialDataReport {
            solve,
            compatibility,
            trace_defect,
        },
    ))
}
