//! Physical constants, exponent sets and the resolved model context.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bottom::{Bottom, BottomProfile};
use crate::error::{IkError, Result};
use crate::exec::ExecPolicy;
use crate::grid::{Grid, PeriodicDomain};
use crate::operators::Coefficients;

/// Largest supported number of vertical modes beyond the first.
pub const MAX_N: usize = 8;

/// Vertical exponents `0 = p_0 < p_1 < … < p_N`, `1 ≤ N ≤ MAX_N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Exponents(Vec<u32>);

impl Exponents {
    pub fn new(p: Vec<u32>) -> Result<Self> {
        if p.len() < 2 {
            return Err(IkError::BadExponents(format!(
                "need at least two exponents (N >= 1), got {:?}",
                p
            )));
        }
        if p.len() > MAX_N + 1 {
            return Err(IkError::BadExponents(format!(
                "at most {} exponents supported, got {}",
                MAX_N + 1,
                p.len()
            )));
        }
        if p[0] != 0 {
            return Err(IkError::BadExponents("first exponent must be 0".into()));
        }
        if p.windows(2).any(|w| w[0] >= w[1]) {
            return Err(IkError::BadExponents(format!(
                "exponents must be strictly increasing, got {:?}",
                p
            )));
        }
        Ok(Exponents(p))
    }

    /// `p_i = 2i`, the natural choice over a flat bottom.
    pub fn even(n: usize) -> Result<Self> {
        Self::new((0..=n as u32).map(|i| 2 * i).collect())
    }

    /// `p_i = i`, the natural choice over variable topography.
    pub fn consecutive(n: usize) -> Result<Self> {
        Self::new((0..=n as u32).collect())
    }

    /// Parses a comma separated list such as `0,2,4`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let p = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| IkError::BadExponents(format!("cannot parse {t:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(p)
    }

    /// The number N of non-trivial modes.
    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    /// Total number of potentials, N + 1.
    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i] as f64
    }

    pub fn max(&self) -> u32 {
        *self.0.last().unwrap()
    }

    pub fn sum(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_even_family(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| p == 2 * i as u32)
    }
}

impl TryFrom<Vec<u32>> for Exponents {
    type Error = IkError;
    fn try_from(v: Vec<u32>) -> Result<Self> {
        Exponents::new(v)
    }
}

impl From<Exponents> for Vec<u32> {
    fn from(p: Exponents) -> Self {
        p.0
    }
}

/// Serializable description of one model instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub g: f64,
    pub h: f64,
    pub rho: f64,
    pub p: Exponents,
    #[serde(default)]
    pub bottom: BottomProfile,
    pub domain: PeriodicDomain,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("g", self.g), ("h", self.h), ("rho", self.rho)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(IkError::InvalidConfig(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        self.domain.validate()
    }

    pub fn build(&self) -> Result<Model> {
        self.build_with_policy(ExecPolicy::default())
    }

    pub fn build_with_policy(&self, policy: ExecPolicy) -> Result<Model> {
        self.validate()?;
        let grid = Grid::with_policy(self.domain.clone(), policy)?;
        let bottom = self.bottom.evaluate(&grid)?;
        let min_rest_depth = bottom.b.map(|b| self.h - b).min();
        if min_rest_depth <= 0.0 {
            return Err(IkError::DepthCollapse {
                min_depth: min_rest_depth,
            });
        }
        Ok(Model {
            g: self.g,
            h: self.h,
            rho: self.rho,
            coeffs: Coefficients::new(&self.p),
            p: self.p.clone(),
            grid,
            bottom,
            config: self.clone(),
        })
    }
}

/// A validated model: constants, grid, evaluated bottom and the guarded
/// coefficient table. Cheap to share by reference across threads.
#[derive(Debug)]
pub struct Model {
    pub g: f64,
    pub h: f64,
    pub rho: f64,
    pub p: Exponents,
    pub grid: Arc<Grid>,
    pub bottom: Bottom,
    pub coeffs: Coefficients,
    config: ModelConfig,
}

impl Model {
    pub fn n(&self) -> usize {
        self.p.n()
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }
}
