use thiserror::Error;

use crate::config::Model;
use crate::diagnostics::{evaluate, DiagnosticsRecord, DiagnosticsSeries};
use crate::error::{IkError, Result};
use crate::operators::{apply_script_l, surface_combination, DepthField};
use crate::state::State;

use super::config::{check_cfl, EvolutionConfig};
use super::step::step_rk4;

/// Receives every diagnostics record together with the state it describes.
pub trait DiagnosticsSink {
    fn record(&mut self, record: &DiagnosticsRecord, state: &State) -> Result<()>;
}

impl<F> DiagnosticsSink for F
where
    F: FnMut(&DiagnosticsRecord, &State) -> Result<()>,
{
    fn record(&mut self, record: &DiagnosticsRecord, state: &State) -> Result<()> {
        self(record, state)
    }
}

/// Sink that discards everything.
pub struct NullSink;

impl DiagnosticsSink for NullSink {
    fn record(&mut self, _: &DiagnosticsRecord, _: &State) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug)]
pub struct RunSummary {
    pub series: DiagnosticsSeries,
    pub final_state: State,
    pub steps: usize,
}

/// A run stopped early; diagnostics up to the failure are kept.
#[derive(Debug, Error)]
#[error("run aborted at t = {t}: {error}")]
pub struct RunAbort {
    pub t: f64,
    #[source]
    pub error: IkError,
    pub series: DiagnosticsSeries,
    pub last_state: State,
}

impl RunAbort {
    /// Guard aborts as opposed to configuration or solver failures.
    pub fn is_guard(&self) -> bool {
        matches!(
            self.error,
            IkError::DepthCollapse { .. }
                | IkError::SignCondition { .. }
                | IkError::NonFiniteField
                | IkError::CflViolation { .. }
        )
    }
}

/// `max_i ‖𝓛_iφ‖ / ‖Σ H^{p_j}φ_j‖` at a state.
pub fn compatibility_ratio(model: &Model, state: &State) -> Result<f64> {
    let depth = DepthField::from_state(model, state)?;
    let sl = apply_script_l(model, &depth, &state.phi);
    let trace = surface_combination(&depth, model.p.as_slice(), &state.phi, 0).l2_norm();
    let worst = sl[1..].iter().fold(0.0f64, |m, r| m.max(r.l2_norm()));
    Ok(if trace > 0.0 { worst / trace } else { worst })
}

/// Integrates from `initial` to `cfg.t_end`, recording diagnostics every
/// `cfg.output_stride` steps and at the final step.
pub fn run_simulation(
    model: &Model,
    initial: &State,
    cfg: &EvolutionConfig,
    sink: &mut dyn DiagnosticsSink,
) -> std::result::Result<RunSummary, Box<RunAbort>> {
    let mut series = DiagnosticsSeries::default();
    let abort = |error: IkError, state: &State, series: DiagnosticsSeries| {
        Box::new(RunAbort {
            t: state.t,
            error,
            series,
            last_state: state.clone(),
        })
    };
    if let Err(e) = cfg
        .validate()
        .and_then(|_| initial.validate(model))
        .and_then(|_| check_cfl(model, initial, cfg))
    {
        return Err(abort(e, initial, series));
    }
    match compatibility_ratio(model, initial) {
        Ok(c) => {
            series.initial_compatibility = c;
            series.compatible = c <= cfg.guards.compat_tol;
        }
        Err(e) => return Err(abort(e, initial, series)),
    }

    let steps = cfg.steps();
    let mut state = initial.clone();
    let mut e0 = None;
    for n in 0..=steps {
        if n % cfg.output_stride == 0 || n == steps {
            let rec = match evaluate(model, &state, e0, &cfg.solver) {
                Ok(r) => r,
                Err(e) => return Err(abort(e, &state, series)),
            };
            e0.get_or_insert(rec.energy);
            let guard_hit = cfg.guards.sign && !(rec.min_a > cfg.guards.sign_threshold);
            let min_a = rec.min_a;
            if let Err(e) = sink.record(&rec, &state) {
                return Err(abort(e, &state, series));
            }
            series.records.push(rec);
            if guard_hit {
                let e = IkError::SignCondition {
                    min_a,
                    threshold: cfg.guards.sign_threshold,
                };
                return Err(abort(e, &state, series));
            }
        }
        if n == steps {
            break;
        }
        state = match step_rk4(model, &state, cfg) {
            Ok(s) => s,
            Err(e) => return Err(abort(e, &state, series)),
        };
    }
    Ok(RunSummary {
        series,
        final_state: state,
        steps,
    })
}
