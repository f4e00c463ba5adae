//! Periodic domains and the shared spectral context built on them.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{IkError, Result};
use crate::exec::ExecPolicy;

/// Smallest accepted grid count per axis.
pub const MIN_RESOLUTION: usize = 8;

/// A 1D or 2D periodic box with a uniform grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicDomain {
    pub dim: usize,
    pub lengths: Vec<f64>,
    pub resolution: Vec<usize>,
}

impl PeriodicDomain {
    pub fn new(lengths: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let domain = PeriodicDomain {
            dim: lengths.len(),
            lengths,
            resolution,
        };
        domain.validate()?;
        Ok(domain)
    }

    pub fn line(length: f64, n: usize) -> Result<Self> {
        Self::new(vec![length], vec![n])
    }

    pub fn plane(lx: f64, ly: f64, nx: usize, ny: usize) -> Result<Self> {
        Self::new(vec![lx, ly], vec![nx, ny])
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim != 1 && self.dim != 2 {
            return Err(IkError::InvalidDomain(format!(
                "dimension must be 1 or 2, got {}",
                self.dim
            )));
        }
        if self.lengths.len() != self.dim || self.resolution.len() != self.dim {
            return Err(IkError::InvalidDomain(
                "lengths and resolution must have one entry per axis".into(),
            ));
        }
        for (&l, &n) in self.lengths.iter().zip(&self.resolution) {
            if !(l.is_finite() && l > 0.0) {
                return Err(IkError::InvalidDomain(format!("period {l} must be positive")));
            }
            if n < MIN_RESOLUTION {
                return Err(IkError::InvalidDomain(format!(
                    "resolution {n} below minimum {MIN_RESOLUTION}"
                )));
            }
        }
        Ok(())
    }

    pub fn num_points(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.resolution[axis] as f64
    }

    /// Area (or length) of one grid cell; the trapezoid weight.
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.lengths.iter().product()
    }
}

struct AxisPlan {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// Angular wavenumber of each FFT bin, Nyquist bin taken positive.
    wavenumber: Vec<f64>,
    /// First-derivative symbol; zero on the Nyquist bin.
    derivative: Vec<f64>,
    /// Signed mode index of each bin.
    index: Vec<i64>,
}

/// Grid plus cached FFT plans and wavenumber tables.
///
/// Shared behind an `Arc` by every [`Field`](crate::Field) living on it.
pub struct Grid {
    domain: PeriodicDomain,
    policy: ExecPolicy,
    axes: Vec<AxisPlan>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("domain", &self.domain)
            .field("policy", &self.policy)
            .finish()
    }
}

impl Grid {
    pub fn new(domain: PeriodicDomain) -> Result<Arc<Self>> {
        Self::with_policy(domain, ExecPolicy::default())
    }

    pub fn with_policy(domain: PeriodicDomain, policy: ExecPolicy) -> Result<Arc<Self>> {
        domain.validate()?;
        let mut planner = FftPlanner::new();
        let axes = (0..domain.dim)
            .map(|a| {
                let n = domain.resolution[a];
                let l = domain.lengths[a];
                let index: Vec<i64> = (0..n)
                    .map(|m| if m <= n / 2 { m as i64 } else { m as i64 - n as i64 })
                    .collect();
                let base = 2.0 * std::f64::consts::PI / l;
                let wavenumber: Vec<f64> = index.iter().map(|&m| base * m as f64).collect();
                let derivative = index
                    .iter()
                    .map(|&m| {
                        if n.is_multiple_of(2) && m == (n / 2) as i64 {
                            0.0
                        } else {
                            base * m as f64
                        }
                    })
                    .collect();
                AxisPlan {
                    forward: planner.plan_fft_forward(n),
                    inverse: planner.plan_fft_inverse(n),
                    wavenumber,
                    derivative,
                    index,
                }
            })
            .collect();
        Ok(Arc::new(Grid { domain, policy, axes }))
    }

    pub fn domain(&self) -> &PeriodicDomain {
        &self.domain
    }

    pub fn policy(&self) -> ExecPolicy {
        self.policy
    }

    pub fn dim(&self) -> usize {
        self.domain.dim
    }

    pub fn len(&self) -> usize {
        self.domain.num_points()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.domain.cell_volume()
    }

    /// Physical coordinates of flat index `k` (row-major, last axis fastest).
    pub fn point(&self, k: usize) -> [f64; 2] {
        let d = &self.domain;
        if d.dim == 1 {
            [k as f64 * d.spacing(0), 0.0]
        } else {
            let n1 = d.resolution[1];
            [(k / n1) as f64 * d.spacing(0), (k % n1) as f64 * d.spacing(1)]
        }
    }

    /// Multi-index of flat index `k`.
    pub(crate) fn unravel(&self, k: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [k, 0]
        } else {
            let n1 = self.domain.resolution[1];
            [k / n1, k % n1]
        }
    }

    pub fn axis_wavenumbers(&self, axis: usize) -> &[f64] {
        &self.axes[axis].wavenumber
    }

    pub fn axis_mode_index(&self, axis: usize) -> &[i64] {
        &self.axes[axis].index
    }

    /// First-derivative symbol (imaginary part) along `axis` for flat bin `k`.
    pub(crate) fn derivative_symbol(&self, axis: usize, k: usize) -> f64 {
        let m = self.unravel(k);
        self.axes[axis].derivative[m[axis]]
    }

    /// |k|² of flat bin `k` using the full wavenumber (second-derivative symbol).
    pub(crate) fn wavenumber_sq(&self, k: usize) -> f64 {
        let m = self.unravel(k);
        (0..self.dim())
            .map(|a| self.axes[a].wavenumber[m[a]].powi(2))
            .sum()
    }

    /// |k_D|² of flat bin `k` built from first-derivative symbols, i.e. the
    /// symbol of `-div grad` when both factors are spectral first derivatives.
    pub(crate) fn derivative_sq(&self, k: usize) -> f64 {
        let m = self.unravel(k);
        (0..self.dim())
            .map(|a| self.axes[a].derivative[m[a]].powi(2))
            .sum()
    }

    /// Signed mode indices of flat bin `k`.
    pub(crate) fn mode_of(&self, k: usize) -> [i64; 2] {
        let m = self.unravel(k);
        let mut out = [0i64; 2];
        for (a, o) in out.iter_mut().enumerate().take(self.dim()) {
            *o = self.axes[a].index[m[a]];
        }
        out
    }

    /// Forward DFT (unnormalized) of real grid values.
    pub fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        buf
    }

    /// Inverse DFT including the 1/n normalization; returns the real part.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, false);
        let scale = 1.0 / self.len() as f64;
        spectrum.into_iter().map(|c| c.re * scale).collect()
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let plan = |a: usize| {
            if forward {
                &self.axes[a].forward
            } else {
                &self.axes[a].inverse
            }
        };
        let res = &self.domain.resolution;
        if self.dim() == 1 {
            plan(0).process(buf);
            return;
        }
        let (n0, n1) = (res[0], res[1]);
        let p1 = plan(1);
        self.policy.for_each_chunk_mut(buf, n1, |_, row| p1.process(row));
        let mut t = vec![Complex64::new(0.0, 0.0); n0 * n1];
        for i in 0..n0 {
            for j in 0..n1 {
                t[j * n0 + i] = buf[i * n1 + j];
            }
        }
        let p0 = plan(0);
        self.policy
            .for_each_chunk_mut(&mut t, n0, |_, col| p0.process(col));
        for j in 0..n1 {
            for i in 0..n0 {
                buf[i * n1 + j] = t[j * n0 + i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_domains() {
        assert!(PeriodicDomain::line(0.0, 16).is_err());
        assert!(PeriodicDomain::line(1.0, 4).is_err());
        assert!(PeriodicDomain::new(vec![1.0; 3], vec![8; 3]).is_err());
        assert!(PeriodicDomain::new(vec![1.0], vec![8, 8]).is_err());
    }

    #[test]
    fn nyquist_has_zero_derivative_symbol() {
        let g = Grid::new(PeriodicDomain::line(2.0 * std::f64::consts::PI, 8).unwrap()).unwrap();
        assert_eq!(g.axis_mode_index(0), &[0, 1, 2, 3, 4, -3, -2, -1]);
        assert_eq!(g.derivative_symbol(0, 4), 0.0);
        assert_eq!(g.wavenumber_sq(4), 16.0);
        assert_eq!(g.derivative_symbol(0, 7), -1.0);
    }

    #[test]
    fn forward_inverse_round_trip_2d() {
        let g = Grid::new(PeriodicDomain::plane(1.0, 2.0, 8, 16).unwrap()).unwrap();
        let v: Vec<f64> = (0..g.len()).map(|k| (k as f64 * 0.731).sin()).collect();
        let back = g.inverse_real(g.forward(&v));
        for (a, b) in v.iter().zip(&back) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
