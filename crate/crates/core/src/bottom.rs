//! Bottom topography `z = -h + b(x)` and its derivative fields.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{IkError, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::spectral::{dot, gradient, laplacian};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BottomProfile {
    #[default]
    Flat,
    /// `b = amplitude · cos(Σ 2π mode_a x_a / L_a + phase)`
    Sinusoidal {
        amplitude: f64,
        mode: Vec<i64>,
        #[serde(default)]
        phase: f64,
    },
    /// Gaussian hill centred at `center` (nearest periodic image).
    GaussianBump {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// Grid samples in row-major order.
    Sampled { values: Vec<f64> },
}

/// Bottom evaluated on a grid: `b`, `∇b`, `Δb` and `|∇b|²`.
#[derive(Clone, Debug)]
pub struct Bottom {
    pub b: Field,
    pub grad: Vec<Field>,
    pub lap: Field,
    pub grad_sq: Field,
    flat: bool,
}

impl Bottom {
    pub fn flat(grid: &Arc<Grid>) -> Self {
        let z = Field::zeros(grid);
        Bottom {
            b: z.clone(),
            grad: vec![z.clone(); grid.dim()],
            lap: z.clone(),
            grad_sq: z,
            flat: true,
        }
    }

    /// Builds derivative fields spectrally from samples of `b`.
    pub fn from_field(b: Field) -> Result<Self> {
        b.check_finite()?;
        let grad = gradient(&b);
        let lap = laplacian(&b);
        let grad_sq = dot(&grad, &grad);
        let flat = b.max_abs() == 0.0;
        let bottom = Bottom {
            b,
            grad,
            lap,
            grad_sq,
            flat,
        };
        for f in bottom.grad.iter().chain([&bottom.lap]) {
            f.check_finite()?;
        }
        Ok(bottom)
    }

    /// True when `b ≡ 0`; operators skip topography terms.
    pub fn is_flat(&self) -> bool {
        self.flat
    }

    pub fn grid(&self) -> &Arc<Grid> {
        self.b.grid()
    }
}

impl BottomProfile {
    pub fn evaluate(&self, grid: &Arc<Grid>) -> Result<Bottom> {
        let dim = grid.dim();
        let lengths = grid.domain().lengths.clone();
        match self {
            BottomProfile::Flat => Ok(Bottom::flat(grid)),
            BottomProfile::Sinusoidal {
                amplitude,
                mode,
                phase,
            } => {
                if mode.len() != dim {
                    return Err(IkError::InvalidConfig(format!(
                        "sinusoidal bottom needs {dim} mode indices"
                    )));
                }
                let k: Vec<f64> = (0..dim).map(|a| 2.0 * PI * mode[a] as f64 / lengths[a]).collect();
                let (a, ph) = (*amplitude, *phase);
                let b = Field::from_fn(grid, |x, y| {
                    let arg = k[0] * x + if dim == 2 { k[1] * y } else { 0.0 } + ph;
                    a * arg.cos()
                });
                Bottom::from_field(b)
            }
            BottomProfile::GaussianBump {
                amplitude,
                center,
                width,
            } => {
                if center.len() != dim || !(*width > 0.0) {
                    return Err(IkError::InvalidConfig(
                        "gaussian bump needs one center coordinate per axis and width > 0".into(),
                    ));
                }
                let (a, w) = (*amplitude, *width);
                let c = center.clone();
                let b = Field::from_fn(grid, |x, y| {
                    let p = [x, y];
                    let r2: f64 = (0..dim)
                        .map(|ax| {
                            let l = lengths[ax];
                            let d = (p[ax] - c[ax]).rem_euclid(l);
                            let d = if d > 0.5 * l { d - l } else { d };
                            d * d
                        })
                        .sum();
                    a * (-r2 / (2.0 * w * w)).exp()
                });
                Bottom::from_field(b)
            }
            BottomProfile::Sampled { values } => {
                Bottom::from_field(Field::from_values(grid, values.clone())?)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicDomain;

    #[test]
    fn sinusoid_derivatives_match_analytic() {
        let g = Grid::new(PeriodicDomain::line(10.0, 64).unwrap()).unwrap();
        let bottom = BottomProfile::Sinusoidal {
            amplitude: 0.2,
            mode: vec![2],
            phase: 0.0,
        }
        .evaluate(&g)
        .unwrap();
        let k = 2.0 * PI * 2.0 / 10.0;
        for i in 0..g.len() {
            let x = g.point(i)[0];
            assert!((bottom.grad[0].values()[i] + 0.2 * k * (k * x).sin()).abs() < 1e-12);
            assert!((bottom.lap.values()[i] + 0.2 * k * k * (k * x).cos()).abs() < 1e-12);
        }
        assert!(!bottom.is_flat());
    }

    #[test]
    fn sampled_length_checked() {
        let g = Grid::new(PeriodicDomain::line(1.0, 16).unwrap()).unwrap();
        let bad = BottomProfile::Sampled { values: vec![0.0; 8] };
        assert!(bad.evaluate(&g).is_err());
        let flat = BottomProfile::Sampled {
            values: vec![0.0; 16],
        };
        assert!(flat.evaluate(&g).unwrap().is_flat());
    }

    #[test]
    fn profile_json_shape() {
        let p: BottomProfile =
            serde_json::from_str(r#"{"kind":"gaussian_bump","amplitude":0.3,"center":[5.0],"width":1.0}"#)
                .unwrap();
        assert!(matches!(p, BottomProfile::GaussianBump { .. }));
    }
}
