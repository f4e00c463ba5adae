use serde::{Deserialize, Serialize};

use crate::config::Model;
use crate::dispersion::DispersionMatrices;
use crate::error::{IkError, Result};
use crate::operators::SolverOptions;
use crate::state::State;

/// Run-time safety checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Guards {
    /// Reject time steps above the stability bound.
    pub cfl: bool,
    pub cfl_safety: f64,
    /// Abort when `min a` drops below `sign_threshold` at an output time.
    pub sign: bool,
    pub sign_threshold: f64,
    /// Relative compatibility residual above which initial data is flagged.
    pub compat_tol: f64,
}

impl Default for Guards {
    fn default() -> Self {
        Guards {
            cfl: true,
            cfl_safety: 0.8,
            sign: false,
            sign_threshold: 0.0,
            compat_tol: 1e-8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub epsilon: f64,
    /// Diagnostics every this many steps.
    #[serde(default = "default_stride")]
    pub output_stride: usize,
    #[serde(default)]
    pub guards: Guards,
    /// Apply the 2/3 filter to the state after every step.
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default)]
    pub solver: SolverOptions,
}

fn default_stride() -> usize {
    10
}

fn default_true() -> bool {
    true
}

impl EvolutionConfig {
    pub fn new(dt: f64, t_end: f64) -> Self {
        EvolutionConfig {
            dt,
            t_end,
            epsilon: 0.0,
            output_stride: default_stride(),
            guards: Guards::default(),
            dealias: true,
            solver: SolverOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt != 0.0) {
            return Err(IkError::InvalidConfig(format!(
                "dt must be nonzero, got {}",
                self.dt
            )));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(IkError::InvalidConfig(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(IkError::InvalidConfig(format!(
                "epsilon must be >= 0, got {}",
                self.epsilon
            )));
        }
        if self.output_stride == 0 {
            return Err(IkError::InvalidConfig("output_stride must be >= 1".into()));
        }
        if !(self.guards.cfl_safety > 0.0) {
            return Err(IkError::InvalidConfig("cfl_safety must be positive".into()));
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 {
            return Err(IkError::InvalidConfig(
                "solver needs tol > 0 and max_iter >= 1".into(),
            ));
        }
        Ok(())
    }

    /// Number of steps covering `[0, t_end]`, the last one possibly overshooting.
    pub fn steps(&self) -> usize {
        let r = self.t_end / self.dt.abs();
        (r - 1e-9).ceil().max(0.0) as usize
    }
}

/// Largest linear phase speed resolved on the grid at the deepest point of `state`.
pub fn max_phase_speed(model: &Model, state: &State) -> f64 {
    let hmax = state.depth_values(model).max().max(0.0);
    let mats = DispersionMatrices::new(&model.p);
    let mut sup: f64 = 1.0;
    for ax in 0..model.grid.dim() {
        for &k in model.grid.axis_wavenumbers(ax) {
            sup = sup.max(mats.normalized_speed_sq(hmax * k.abs()));
        }
    }
    (model.g * hmax * sup).sqrt()
}

/// Stability bound on `|dt|`: advective `safety·dx_min/(c_max √dim)` and,
/// for `ε > 0`, the diffusive limit `safety·2.78/(ε k_max²)`.
pub fn stable_dt(model: &Model, state: &State, cfg: &EvolutionConfig) -> f64 {
    let dom = model.grid.domain();
    let dx = (0..dom.dim).map(|a| dom.spacing(a)).fold(f64::INFINITY, f64::min);
    let c = max_phase_speed(model, state);
    let safety = cfg.guards.cfl_safety;
    let mut limit = safety * dx / (c * (dom.dim as f64).sqrt());
    if cfg.epsilon > 0.0 {
        let kmax2: f64 = (0..dom.dim)
            .map(|a| {
                model
                    .grid
                    .axis_wavenumbers(a)
                    .iter()
                    .fold(0.0f64, |m, k| m.max(k * k))
            })
            .sum();
        limit = limit.min(safety * 2.78 / (cfg.epsilon * kmax2));
    }
    limit
}

pub fn check_cfl(model: &Model, state: &State, cfg: &EvolutionConfig) -> Result<()> {
    if !cfg.guards.cfl {
        return Ok(());
    }
    let limit = stable_dt(model, state, cfg);
    if cfg.dt.abs() > limit {
        return Err(IkError::CflViolation { dt: cfg.dt, limit });
    }
    Ok(())
}
