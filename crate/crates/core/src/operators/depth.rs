use crate::config::Model;
use crate::error::{IkError, Result};
use crate::field::Field;
use crate::spectral::gradient;
use crate::state::State;

/// Water depth `H = h + η − b` with a cache of its integer powers.
#[derive(Clone, Debug)]
pub struct DepthField {
    h: Field,
    powers: Vec<Field>,
    grad: Vec<Field>,
}

impl DepthField {
    /// Fails with `DepthCollapse` unless `H > 0` everywhere.
    pub fn new(h: Field, max_power: u32) -> Result<Self> {
        h.check_finite()?;
        let min_depth = h.min();
        if !(min_depth > 0.0) {
            return Err(IkError::DepthCollapse { min_depth });
        }
        let mut powers = Vec::with_capacity(max_power as usize + 1);
        powers.push(Field::constant(h.grid(), 1.0));
        for k in 1..=max_power as usize {
            let next = &powers[k - 1] * &h;
            powers.push(next);
        }
        let grad = gradient(&h);
        Ok(DepthField { h, powers, grad })
    }

    pub fn from_state(model: &Model, state: &State) -> Result<Self> {
        Self::new(state.depth_values(model), model.coeffs.max_power())
    }

    /// Depth of the undisturbed fluid, `h − b`.
    pub fn at_rest(model: &Model) -> Result<Self> {
        let h = model.h;
        Self::new(model.bottom.b.map(move |b| h - b), model.coeffs.max_power())
    }

    pub fn h(&self) -> &Field {
        &self.h
    }

    /// `H^k`; panics beyond the cached range.
    pub fn pow(&self, k: u32) -> &Field {
        &self.powers[k as usize]
    }

    pub fn max_power(&self) -> u32 {
        (self.powers.len() - 1) as u32
    }

    pub fn grad(&self) -> &[Field] {
        &self.grad
    }

    pub fn min(&self) -> f64 {
        self.h.min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Grid, PeriodicDomain};

    #[test]
    fn powers_are_consistent() {
        let g = Grid::new(PeriodicDomain::line(3.0, 32).unwrap()).unwrap();
        let h = Field::from_fn(&g, |x, _| 1.0 + 0.3 * (2.0 * x).sin());
        let d = DepthField::new(h.clone(), 9).unwrap();
        for k in 0..=9 {
            for (a, b) in d.pow(k).values().iter().zip(h.values()) {
                let want = b.powi(k as i32);
                assert!((a - want).abs() <= 1e-13 * want);
            }
        }
    }

    #[test]
    fn collapse_detected() {
        let g = Grid::new(PeriodicDomain::line(3.0, 16).unwrap()).unwrap();
        let h = Field::from_fn(&g, |x, _| x - 1.0);
        assert!(matches!(
            DepthField::new(h, 3),
            Err(IkError::DepthCollapse { .. })
        ));
    }
}
