use crate::config::Model;
use crate::error::{IkError, Result};
use crate::field::Field;

/// Surface elevation and the N+1 potential coefficients at one instant.
#[derive(Clone, Debug)]
pub struct State {
    pub eta: Field,
    pub phi: Vec<Field>,
    pub t: f64,
}

impl State {
    /// Still water: `η ≡ 0`, `φ_i ≡ 0`.
    pub fn rest(model: &Model) -> Self {
        let z = Field::zeros(&model.grid);
        State {
            eta: z.clone(),
            phi: vec![z; model.p.count()],
            t: 0.0,
        }
    }

    pub fn new(eta: Field, phi: Vec<Field>, t: f64) -> Self {
        State { eta, phi, t }
    }

    /// `H = h + η − b`, unchecked.
    pub fn depth_values(&self, model: &Model) -> Field {
        let h = model.h;
        self.eta.zip_map(&model.bottom.b, move |e, b| h + e - b)
    }

    /// Checks shapes, finiteness and strict positivity of the depth.
    pub fn validate(&self, model: &Model) -> Result<()> {
        if self.phi.len() != model.p.count() {
            return Err(IkError::InvalidConfig(format!(
                "state carries {} potentials, model expects {}",
                self.phi.len(),
                model.p.count()
            )));
        }
        for f in std::iter::once(&self.eta).chain(&self.phi) {
            if !f.same_grid(&model.bottom.b) {
                return Err(IkError::GridMismatch);
            }
            f.check_finite()?;
        }
        let min_depth = self.depth_values(model).min();
        if !(min_depth > 0.0) {
            return Err(IkError::DepthCollapse { min_depth });
        }
        Ok(())
    }

    /// `self + alpha · (d_eta, d_phi)`, time unchanged.
    pub fn offset(&self, alpha: f64, d_eta: &Field, d_phi: &[Field]) -> State {
        let mut out = self.clone();
        out.eta.axpy(alpha, d_eta);
        for (p, d) in out.phi.iter_mut().zip(d_phi) {
            p.axpy(alpha, d);
        }
        out
    }

    /// Largest absolute difference over all components.
    pub fn max_abs_diff(&self, other: &State) -> f64 {
        std::iter::once((&self.eta, &other.eta))
            .chain(self.phi.iter().zip(&other.phi))
            .map(|(a, b)| (a - b).max_abs())
            .fold(0.0, f64::max)
    }
}
