//! Real scalar fields sampled on a periodic grid.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use crate::error::{IkError, Result};
use crate::grid::Grid;

#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Field {
            grid: grid.clone(),
            values: vec![c; grid.len()],
        }
    }

    /// Wraps raw values; the length must match the grid and all entries be finite.
    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(IkError::InvalidDomain(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let f = Field {
            grid: grid.clone(),
            values,
        };
        f.check_finite()?;
        Ok(f)
    }

    /// Internal constructor that skips validation.
    pub(crate) fn from_raw(grid: &Arc<Grid>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field {
            grid: grid.clone(),
            values,
        }
    }

    /// Samples `f(x, y)` at every grid point (`y` is 0 in 1D).
    pub fn from_fn<F>(grid: &Arc<Grid>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        let mut values = vec![0.0; grid.len()];
        grid.policy().fill(&mut values, |k| {
            let p = grid.point(k);
            f(p[0], p[1])
        });
        Field {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.domain() == other.grid.domain()
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(IkError::NonFiniteField)
        }
    }

    pub fn map<F>(&self, f: F) -> Field
    where
        F: Fn(f64) -> f64 + Sync + Send,
    {
        let mut out = vec![0.0; self.len()];
        let v = &self.values;
        self.grid.policy().fill(&mut out, |k| f(v[k]));
        Field::from_raw(&self.grid, out)
    }

    pub fn zip_map<F>(&self, other: &Field, f: F) -> Field
    where
        F: Fn(f64, f64) -> f64 + Sync + Send,
    {
        assert!(self.same_grid(other), "fields live on different grids");
        let mut out = vec![0.0; self.len()];
        let (a, b) = (&self.values, &other.values);
        self.grid.policy().fill(&mut out, |k| f(a[k], b[k]));
        Field::from_raw(&self.grid, out)
    }

    /// `self += alpha * x`
    pub fn axpy(&mut self, alpha: f64, x: &Field) {
        assert!(self.same_grid(x), "fields live on different grids");
        for (s, v) in self.values.iter_mut().zip(&x.values) {
            *s += alpha * v;
        }
    }

    pub fn scale(&self, alpha: f64) -> Field {
        self.map(|v| alpha * v)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Trapezoid approximation of `∫ self · other dx` (exact for band-limited
    /// trigonometric products on the periodic grid).
    pub fn inner(&self, other: &Field) -> f64 {
        assert!(self.same_grid(other), "fields live on different grids");
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum();
        s * self.grid.cell_volume()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// `(∫ f² dx)^{1/2}`
    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    /// Root-mean-square value over the grid.
    pub fn rms(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64).sqrt()
    }

    /// Circular shift by `cells` grid cells along `axis`: `out(x) = f(x - cells·dx)`.
    pub fn shifted(&self, axis: usize, cells: isize) -> Field {
        let res = &self.grid.domain().resolution;
        let n = res[axis] as isize;
        let mut out = vec![0.0; self.len()];
        for (k, o) in out.iter_mut().enumerate() {
            let m = self.grid.unravel(k);
            let mut src = m;
            src[axis] = ((m[axis] as isize - cells).rem_euclid(n)) as usize;
            let idx = if self.grid.dim() == 1 {
                src[0]
            } else {
                src[0] * res[1] + src[1]
            };
            *o = self.values[idx];
        }
        Field::from_raw(&self.grid, out)
    }
}

/// Inner product summed over matching components of two field lists.
pub fn inner_sum(a: &[Field], b: &[Field]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.inner(y)).sum()
}

impl Add for &Field {
    type Output = Field;
    fn add(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &Field {
    type Output = Field;
    fn sub(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul for &Field {
    type Output = Field;
    fn mul(self, rhs: &Field) -> Field {
        self.zip_map(rhs, |a, b| a * b)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, rhs: f64) -> Field {
        self.scale(rhs)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.map(|v| -v)
    }
}

impl AddAssign<&Field> for Field {
    fn add_assign(&mut self, rhs: &Field) {
        self.axpy(1.0, rhs);
    }
}

impl SubAssign<&Field> for Field {
    fn sub_assign(&mut self, rhs: &Field) {
        self.axpy(-1.0, rhs);
    }
}
