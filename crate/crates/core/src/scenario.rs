//! JSON scenario files and the built-in presets.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bottom::BottomProfile;
use crate::config::{Exponents, Model, ModelConfig};
use crate::dispersion::phase_speed_ik;
use crate::error::{IkError, Result};
use crate::evolution::{EvolutionConfig, Guards};
use crate::field::Field;
use crate::grid::PeriodicDomain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicsSpec {
    pub g: f64,
    pub h: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    pub p: Exponents,
}

fn default_rho() -> f64 {
    1000.0
}

/// Analytic or seeded initial fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude · cos(k·x + phase)` with `k_a = 2π mode_a / L_a`.
    Cosine {
        amplitude: f64,
        mode: Vec<i64>,
        #[serde(default)]
        phase: f64,
    },
    Sine {
        amplitude: f64,
        mode: Vec<i64>,
        #[serde(default)]
        phase: f64,
    },
    /// Periodic Gaussian, nearest image.
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    Sum {
        terms: Vec<FieldSpec>,
    },
    /// Random Fourier series up to `max_mode`, scaled to `max |f| = amplitude`.
    Random {
        amplitude: f64,
        max_mode: usize,
        seed: u64,
    },
    /// Surface potential `(g a/ω) sin(k·x)` of a linear wave travelling in
    /// the `+k` direction with elevation `a cos(k·x)`.
    LinearTravelingPotential {
        amplitude: f64,
        mode: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitSpec {
    pub eta0: FieldSpec,
    pub phi_surface: FieldSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub physics: PhysicsSpec,
    #[serde(default)]
    pub bottom: BottomProfile,
    pub domain: PeriodicDomain,
    pub init: InitSpec,
    pub evolution: EvolutionConfig,
}

fn wavevector(mode: &[i64], dom: &PeriodicDomain) -> Result<Vec<f64>> {
    if mode.len() != dom.dim {
        return Err(IkError::InvalidConfig(format!(
            "mode needs {} entries, got {}",
            dom.dim,
            mode.len()
        )));
    }
    Ok(mode
        .iter()
        .zip(&dom.lengths)
        .map(|(&m, &l)| 2.0 * PI * m as f64 / l)
        .collect())
}

fn phase_at(k: &[f64], x: f64, y: f64) -> f64 {
    k[0] * x + if k.len() == 2 { k[1] * y } else { 0.0 }
}

impl FieldSpec {
    pub fn evaluate(&self, model: &Model) -> Result<Field> {
        let grid = &model.grid;
        let dom = grid.domain().clone();
        Ok(match self {
            FieldSpec::Zero => Field::zeros(grid),
            FieldSpec::Constant { value } => Field::constant(grid, *value),
            FieldSpec::Cosine {
                amplitude,
                mode,
                phase,
            } => {
                let k = wavevector(mode, &dom)?;
                let (a, ph) = (*amplitude, *phase);
                Field::from_fn(grid, move |x, y| a * (phase_at(&k, x, y) + ph).cos())
            }
            FieldSpec::Sine {
                amplitude,
                mode,
                phase,
            } => {
                let k = wavevector(mode, &dom)?;
                let (a, ph) = (*amplitude, *phase);
                Field::from_fn(grid, move |x, y| a * (phase_at(&k, x, y) + ph).sin())
            }
            FieldSpec::Gaussian {
                amplitude,
                center,
                width,
            } => {
                BottomProfile::GaussianBump {
                    amplitude: *amplitude,
                    center: center.clone(),
                    width: *width,
                }
                .evaluate(grid)?
                .b
            }
            FieldSpec::Sum { terms } => {
                let mut out = Field::zeros(grid);
                for t in terms {
                    out += &t.evaluate(model)?;
                }
                out
            }
            FieldSpec::Random {
                amplitude,
                max_mode,
                seed,
            } => random_field(model, *amplitude, *max_mode, *seed)?,
            FieldSpec::LinearTravelingPotential { amplitude, mode } => {
                let k = wavevector(mode, &dom)?;
                let kn = k.iter().map(|v| v * v).sum::<f64>().sqrt();
                if kn == 0.0 {
                    return Err(IkError::InvalidConfig(
                        "travelling wave needs a nonzero mode".into(),
                    ));
                }
                let omega = kn * phase_speed_ik(kn * model.h, &model.p, model.g, model.h).sqrt();
                let c = model.g * amplitude / omega;
                Field::from_fn(grid, move |x, y| c * phase_at(&k, x, y).sin())
            }
        })
    }

    /// Replaces the seed of every random component.
    pub fn reseed(&mut self, new_seed: u64) {
        match self {
            FieldSpec::Random { seed, .. } => *seed = new_seed,
            FieldSpec::Sum { terms } => terms.iter_mut().for_each(|t| t.reseed(new_seed)),
            _ => {}
        }
    }
}

fn random_field(model: &Model, amplitude: f64, max_mode: usize, seed: u64) -> Result<Field> {
    let grid = &model.grid;
    let dom = grid.domain();
    let cut = dom.resolution.iter().map(|&n| n / 2 - 1).min().unwrap_or(0);
    if max_mode == 0 || max_mode > cut {
        return Err(IkError::InvalidConfig(format!(
            "random field max_mode must be in 1..={cut}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = max_mode as i64;
    let mut terms = Vec::new();
    let ys: Vec<i64> = if dom.dim == 2 { (-m..=m).collect() } else { vec![0] };
    for mx in 0..=m {
        for &my in &ys {
            if mx == 0 && my <= 0 {
                continue;
            }
            let decay = 1.0 / (1.0 + (mx * mx + my * my) as f64);
            let (c, s): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            terms.push((mx, my, c * decay, s * decay));
        }
    }
    let k0 = 2.0 * PI / dom.lengths[0];
    let k1 = if dom.dim == 2 {
        2.0 * PI / dom.lengths[1]
    } else {
        0.0
    };
    let f = Field::from_fn(grid, move |x, y| {
        terms
            .iter()
            .map(|&(mx, my, c, s)| {
                let arg = k0 * mx as f64 * x + k1 * my as f64 * y;
                c * arg.cos() + s * arg.sin()
            })
            .sum()
    });
    let peak = f.max_abs();
    Ok(if peak > 0.0 { f.scale(amplitude / peak) } else { f })
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            g: self.physics.g,
            h: self.physics.h,
            rho: self.physics.rho,
            p: self.physics.p.clone(),
            bottom: self.bottom.clone(),
            domain: self.domain.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.model_config().validate()?;
        self.evolution.validate()
    }

    pub fn build_model(&self) -> Result<Model> {
        self.model_config().build()
    }

    /// `(η₀, φ_surface)` on the model grid.
    pub fn initial_fields(&self, model: &Model) -> Result<(Field, Field)> {
        Ok((
            self.init.eta0.evaluate(model)?,
            self.init.phi_surface.evaluate(model)?,
        ))
    }

    pub fn reseed(&mut self, seed: u64) {
        self.init.eta0.reseed(seed);
        self.init.phi_surface.reseed(seed);
    }

    pub fn preset(name: &str) -> Result<Self> {
        preset(name)
    }
}

/// Names accepted by [`preset`].
pub const PRESETS: &[&str] = &[
    "flat-rest",
    "standing-wave",
    "variable-bottom",
    "regularized-epsilon",
    "gaussian-hump",
    "traveling-wave",
    "adversarial-collapse",
    "adversarial-sign",
];

fn line(l: f64, n: usize) -> PeriodicDomain {
    PeriodicDomain::line(l, n).expect("preset domain is valid")
}

fn physics(p: Exponents) -> PhysicsSpec {
    PhysicsSpec {
        g: 9.81,
        h: 1.0,
        rho: 1000.0,
        p,
    }
}

/// Linear period of mode `m` on a flat bottom of depth `h` in a box of length `l`.
pub fn linear_period(p: &Exponents, g: f64, h: f64, l: f64, m: i64) -> f64 {
    let k = 2.0 * PI * m as f64 / l;
    2.0 * PI / (k * phase_speed_ik(k * h, p, g, h).sqrt())
}

pub fn preset(name: &str) -> Result<Scenario> {
    let even1 = Exponents::even(1)?;
    let s = match name {
        "flat-rest" => Scenario {
            physics: physics(even1),
            bottom: BottomProfile::Flat,
            domain: line(10.0, 64),
            init: InitSpec {
                eta0: FieldSpec::Zero,
                phi_surface: FieldSpec::Zero,
            },
            evolution: EvolutionConfig {
                output_stride: 10,
                ..EvolutionConfig::new(0.01, 1.0)
            },
        },
        "standing-wave" => {
            let period = linear_period(&even1, 9.81, 1.0, 10.0, 1);
            let steps = 4400usize;
            Scenario {
                physics: physics(even1),
                bottom: BottomProfile::Flat,
                domain: line(10.0, 256),
                init: InitSpec {
                    eta0: FieldSpec::Cosine {
                        amplitude: 0.02,
                        mode: vec![1],
                        phase: 0.0,
                    },
                    phi_surface: FieldSpec::Zero,
                },
                evolution: EvolutionConfig {
                    output_stride: 100,
                    ..EvolutionConfig::new(10.0 * period / steps as f64, 10.0 * period)
                },
            }
        }
        "variable-bottom" => Scenario {
            physics: physics(Exponents::consecutive(2)?),
            bottom: BottomProfile::Sinusoidal {
                amplitude: 0.2,
                mode: vec![1],
                phase: 0.0,
            },
            domain: line(10.0, 128),
            init: InitSpec {
                eta0: FieldSpec::Cosine {
                    amplitude: 0.01,
                    mode: vec![2],
                    phase: 0.0,
                },
                phi_surface: FieldSpec::Random {
                    amplitude: 0.05,
                    max_mode: 4,
                    seed: 1,
                },
            },
            evolution: EvolutionConfig {
                output_stride: 50,
                ..EvolutionConfig::new(0.01, 5.0)
            },
        },
        "regularized-epsilon" => Scenario {
            physics: physics(even1),
            bottom: BottomProfile::Flat,
            domain: line(10.0, 128),
            init: InitSpec {
                eta0: FieldSpec::Gaussian {
                    amplitude: 0.02,
                    center: vec![5.0],
                    width: 0.5,
                },
                phi_surface: FieldSpec::Zero,
            },
            evolution: EvolutionConfig {
                epsilon: 1e-3,
                output_stride: 20,
                ..EvolutionConfig::new(0.01, 2.0)
            },
        },
        "gaussian-hump" => Scenario {
            physics: physics(Exponents::consecutive(2)?),
            bottom: BottomProfile::GaussianBump {
                amplitude: 0.3,
                center: vec![5.0],
                width: 1.0,
            },
            domain: line(10.0, 128),
            init: InitSpec {
                eta0: FieldSpec::Gaussian {
                    amplitude: 0.05,
                    center: vec![3.0],
                    width: 0.6,
                },
                phi_surface: FieldSpec::Gaussian {
                    amplitude: 0.1,
                    center: vec![3.0],
                    width: 0.6,
                },
            },
            evolution: EvolutionConfig {
                output_stride: 20,
                ..EvolutionConfig::new(0.01, 2.0)
            },
        },
        "traveling-wave" => {
            let period = linear_period(&even1, 9.81, 1.0, 10.0, 1);
            Scenario {
                physics: physics(even1),
                bottom: BottomProfile::Flat,
                domain: line(10.0, 128),
                init: InitSpec {
                    eta0: FieldSpec::Cosine {
                        amplitude: 1e-6,
                        mode: vec![1],
                        phase: 0.0,
                    },
                    phi_surface: FieldSpec::LinearTravelingPotential {
                        amplitude: 1e-6,
                        mode: vec![1],
                    },
                },
                evolution: EvolutionConfig {
                    output_stride: 10,
                    ..EvolutionConfig::new(2.0 * period / 800.0, 2.0 * period)
                },
            }
        }
        "adversarial-collapse" => Scenario {
            physics: physics(even1),
            bottom: BottomProfile::Sinusoidal {
                amplitude: 0.5,
                mode: vec![1],
                phase: 0.0,
            },
            domain: line(10.0, 64),
            init: InitSpec {
                eta0: FieldSpec::Cosine {
                    amplitude: -0.3,
                    mode: vec![1],
                    phase: 0.0,
                },
                phi_surface: FieldSpec::Zero,
            },
            evolution: EvolutionConfig {
                output_stride: 1,
                guards: Guards {
                    cfl: false,
                    ..Guards::default()
                },
                ..EvolutionConfig::new(0.5, 5.0)
            },
        },
        "adversarial-sign" => Scenario {
            physics: physics(even1),
            bottom: BottomProfile::Flat,
            domain: line(10.0, 256),
            init: InitSpec {
                eta0: FieldSpec::Cosine {
                    amplitude: 0.5,
                    mode: vec![6],
                    phase: 0.0,
                },
                phi_surface: FieldSpec::Zero,
            },
            evolution: EvolutionConfig {
                output_stride: 1,
                guards: Guards {
                    sign: true,
                    ..Guards::default()
                },
                ..EvolutionConfig::new(0.001, 0.01)
            },
        },
        other => {
            return Err(IkError::InvalidConfig(format!(
                "unknown preset {other:?}; known: {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(s)
}
